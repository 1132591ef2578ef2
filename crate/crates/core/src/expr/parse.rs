use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use super::Expr;
use crate::number::{Q, QI};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier '{name}' at {pos}")]
    UnknownIdentifier { pos: usize, name: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let lit: String = bytes[s..i].iter().collect();
            out.push((Tok::Int(lit.parse().unwrap()), s));
        } else if c.is_alphabetic() || c == '_' {
            let s = i;
            while i < bytes.len() && (bytes[i].is_alphanumeric() || bytes[i] == '_') {
                i += 1;
            }
            out.push((Tok::Name(bytes[s..i].iter().collect()), s));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(ParseError::Syntax { pos: i, msg: format!("unexpected character '{c}'") });
        }
    }
    out.push((Tok::End, bytes.len()));
    Ok(out)
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Op(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn err(&self, msg: String) -> ParseError {
        ParseError::Syntax { pos: self.pos(), msg }
    }
}

struct Parser<'a> {
    lx: Lexer,
    vars: &'a [String],
}

impl Parser<'_> {
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.lx.eat('+') {
                terms.push(self.term()?);
            } else if self.lx.eat('-') {
                terms.push(self.term()?.neg());
            } else {
                break;
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.lx.eat('*') {
                let f = self.factor()?;
                acc = acc.mul(&f);
            } else if self.lx.eat('/') {
                let pos = self.lx.pos();
                let f = self.factor()?;
                if f.is_zero() {
                    return Err(ParseError::Syntax { pos, msg: "division by zero".into() });
                }
                acc = acc.div(&f);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.lx.eat('-') {
            return Ok(self.factor()?.neg());
        }
        if self.lx.eat('+') {
            return self.factor();
        }
        let b = self.base()?;
        if self.lx.eat('^') {
            let e = self.exponent()?;
            if b.is_zero() && !e.is_positive() {
                return Err(self.lx.err("zero to a nonpositive power".into()));
            }
            return Ok(Expr::pow(b, e));
        }
        Ok(b)
    }

    fn signed_rational(&mut self) -> Result<Q, ParseError> {
        let neg = if self.lx.eat('-') {
            true
        } else {
            self.lx.eat('+');
            false
        };
        let n = match self.lx.next() {
            Tok::Int(n) => n,
            _ => return Err(self.lx.err("expected integer exponent".into())),
        };
        let mut v = Q::from_integer(n);
        let save = self.lx.at;
        if self.lx.eat('/') {
            match self.lx.next() {
                Tok::Int(d) if !d.is_zero() => v /= Q::from_integer(d),
                _ => self.lx.at = save,
            }
        }
        Ok(if neg { -v } else { v })
    }

    fn exponent(&mut self) -> Result<Q, ParseError> {
        if self.lx.eat('(') {
            let v = self.signed_rational()?;
            self.lx.expect(')')?;
            Ok(v)
        } else {
            self.signed_rational()
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let pos = self.lx.pos();
        match self.lx.next() {
            Tok::Int(n) => Ok(Expr::rational(Q::from_integer(n))),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.lx.expect(')')?;
                Ok(e)
            }
            Tok::Name(name) => {
                if self.vars.contains(&name) {
                    return Ok(Expr::var(&name));
                }
                match name.as_str() {
                    "exp" | "log" | "sqrt" => {
                        self.lx.expect('(')?;
                        let a = self.expr()?;
                        self.lx.expect(')')?;
                        Ok(match name.as_str() {
                            "exp" => Expr::exp(a),
                            "log" => {
                                if a.is_zero() {
                                    return Err(ParseError::Syntax { pos, msg: "log of zero".into() });
                                }
                                Expr::log(a)
                            }
                            _ => a.sqrt(),
                        })
                    }
                    "pi" => Ok(Expr::pi()),
                    "e" => Ok(Expr::e()),
                    "i" => Ok(Expr::num(QI::i())),
                    _ => Err(ParseError::UnknownIdentifier { pos, name }),
                }
            }
            Tok::End => Err(ParseError::Syntax { pos, msg: "unexpected end of input".into() }),
            Tok::Op(c) => Err(ParseError::Syntax { pos, msg: format!("unexpected '{c}'") }),
        }
    }
}

/// Parses `text` over the given variable names into a canonical expression.
///
/// Grammar: sums and differences of terms, terms are products and quotients
/// of factors, a factor is a base optionally raised to a signed rational
/// (`x^2`, `x^-1/2`, `x^(3/2)`). Bases are integers, names, parenthesized
/// expressions and `exp`, `log`, `sqrt` applications. A leading sign on a
/// factor is accepted. Implicit multiplication is rejected.
pub fn parse(text: &str, variables: &[String]) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { lx: Lexer { toks, at: 0 }, vars: variables };
    if *p.lx.peek() == Tok::End {
        return Err(p.lx.err("empty expression".into()));
    }
    let e = p.expr()?;
    match p.lx.peek() {
        Tok::End => Ok(e),
        Tok::Name(_) | Tok::Int(_) | Tok::Op('(') => Err(p.lx.err("implicit multiplication is not accepted".into())),
        t => Err(p.lx.err(format!("unexpected token {t:?}"))),
    }
}
