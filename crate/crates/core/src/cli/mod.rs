//! Batch front end: problem files in, expansion documents out.

use std::collections::HashMap;
use std::path::Path;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::expansion::{expand, AsymptoticExpansion, ExpandOptions, ExpansionError, ExpansionKind};
use crate::expr::{eval, parse, Expr};
use crate::geometry::{classify_point, find_points, Factor, GeometryError, Problem, ProblemError};
use crate::number::{bf_to_f64, bf_to_q, render_significant, with_precision, BigC, Number, QI};
use crate::oracle::{error_table, problem_table, ray_box, table_csv, OracleError, TableRow};
use crate::reduce::{contour_check, default_max_degree, reduce_powers_with, ContourForm, ContourOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub variables: Vec<String>,
    pub numerator: String,
    pub denominator_factors: Vec<(String, u32)>,
    pub alpha: Vec<i64>,
    #[serde(default)]
    pub points: Option<Vec<Vec<String>>>,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default)]
    pub compare: Option<Vec<u64>>,
    #[serde(default = "default_bits")]
    pub precision_bits: usize,
    #[serde(default)]
    pub assume_minimal: bool,
}

fn default_order() -> usize {
    2
}

fn default_bits() -> usize {
    256
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("validation failed: {0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Problem(_) => 2,
            CliError::Expansion(e) => match e {
                ExpansionError::Geometry(_) => 3,
                ExpansionError::Degenerate | ExpansionError::NotStationary => 4,
                _ => 5,
            },
            CliError::Oracle(_) => 5,
            CliError::Mismatch(_) => 6,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "input",
            3 => "geometry",
            4 => "degenerate",
            5 => "unsupported",
            _ => "mismatch",
        }
    }

    /// One line: `error <code> <kind>: <message>`.
    pub fn diagnostic(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("error {} {}: {}", self.exit_code(), self.kind(), msg)
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Expansion(e.into())
    }
}

impl ProblemFile {
    pub fn from_str_guess(text: &str, json: bool) -> Result<ProblemFile, CliError> {
        if json || text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| CliError::Input(format!("problem file: {e}")))
        } else {
            toml::from_str(text).map_err(|e| CliError::Input(format!("problem file: {}", e.message())))
        }
    }

    pub fn load(path: &Path) -> Result<ProblemFile, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        ProblemFile::from_str_guess(&text, path.extension().is_some_and(|x| x == "json"))
    }

    pub fn to_problem(&self) -> Result<Problem, CliError> {
        let vars = self.variables.clone();
        let g = parse(&self.numerator, &vars).map_err(|err| ProblemError::Parse { what: "numerator".into(), err })?;
        let mut factors = Vec::new();
        for (i, (text, a)) in self.denominator_factors.iter().enumerate() {
            let e = parse(text, &vars).map_err(|err| ProblemError::Parse { what: format!("factor {}", i + 1), err })?;
            factors.push(Factor { expr: e, multiplicity: *a });
        }
        let points = match &self.points {
            None => vec![],
            Some(ps) => ps.iter().map(|p| p.iter().map(|s| exact_number(s)).collect::<Result<Vec<_>, _>>()).collect::<Result<_, _>>()?,
        };
        Ok(Problem::new(vars, g, factors, self.alpha.clone(), points, self.order)?)
    }
}

/// Parses `"p/q"`, decimals, or Gaussian rationals like `"1/2+i"`.
pub fn exact_number(s: &str) -> Result<QI, CliError> {
    let e = parse(s, &[]).map_err(|e| CliError::Input(format!("point coordinate {s:?}: {e}")))?;
    match eval(&e, &HashMap::new()) {
        Ok(Number::Exact(q)) => Ok(q),
        _ => Err(CliError::Input(format!("point coordinate {s:?} is not an exact rational"))),
    }
}

/// A float with its working precision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloatDoc {
    pub re: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub im: String,
    pub bits: usize,
}

fn digits_for(bits: usize) -> usize {
    ((bits as f64) * std::f64::consts::LOG10_2).floor().max(1.0) as usize
}

fn render_part(x: &astro_float::BigFloat, digits: usize) -> String {
    bf_to_q(x).map(|q| render_significant(&q, digits)).unwrap_or_else(|| "nan".into())
}

impl FloatDoc {
    pub fn new(z: &BigC, bits: usize) -> FloatDoc {
        let digits = digits_for(bits);
        let re = render_part(&z.re, digits);
        // imaginary rounding noise is dropped
        let (re_f, im_f) = (bf_to_f64(&z.re).abs(), bf_to_f64(&z.im).abs());
        let small = im_f == 0.0 || im_f <= re_f * 10f64.powi(2 - digits as i32);
        let im = if small { String::new() } else { render_part(&z.im, digits) };
        FloatDoc { re, im, bits }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactFloat {
    pub exact: Option<String>,
    pub float: FloatDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefactorDoc {
    /// The constant is `(2 pi)^{two_pi_power} * sqrt(radicand)`.
    pub two_pi_power: String,
    pub radicand: ExactFloat,
    pub hessian_det: ExactFloat,
    pub branch_arg: String,
    pub value: FloatDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub q: usize,
    pub exponent: String,
    pub b_q_exact: Option<String>,
    pub b_q_float: FloatDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionDoc {
    pub point: Vec<String>,
    pub alpha: Vec<i64>,
    pub kind: String,
    /// `c^{-alpha}`; the expansion is `base^n` times the rest.
    pub base: ExactFloat,
    pub prefactor: PrefactorDoc,
    pub terms: Vec<TermDoc>,
    /// `None` when the error is exponentially small.
    pub error_exponent: Option<String>,
    pub reductions_applied: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowDoc {
    pub n: u64,
    pub truth: String,
    pub approx: Vec<String>,
    pub rel_err: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContourReport {
    pub point: Vec<String>,
    pub n: u64,
    pub difference: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationDoc {
    pub contour: Vec<ContourReport>,
    /// Relative error of the full expansion at the largest compared `n`.
    pub oracle_rel_err: Option<String>,
    pub tolerance: String,
    pub passed: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDocument {
    pub expansions: Vec<ExpansionDoc>,
    #[serde(default)]
    pub table: Option<Vec<RowDoc>>,
    #[serde(default)]
    pub validation: Option<ValidationDoc>,
    #[serde(default)]
    pub notes: Vec<String>,
}

pub fn expansion_doc(e: &AsymptoticExpansion, bits: usize) -> ExpansionDoc {
    let pf = &e.prefactor;
    // pi^h sqrt(R) = (2 pi)^h sqrt(R / 4^h)
    let two_h = (pf.pi_power.clone() * crate::number::qi(2)).to_integer();
    let four_h = QI::int(2).powi(two_h.try_into().unwrap_or(0)).expect("power of two");
    let radicand = pf.radicand.as_ref().map(|r| r.div(&four_h).expect("nonzero").to_string());
    let radicand_float = pf.radicand_float.clone() * &BigC::from_qi(&four_h.inv().expect("nonzero"));
    ExpansionDoc {
        point: e.point.iter().map(|c| c.to_string()).collect(),
        alpha: e.alpha.clone(),
        kind: match e.kind {
            ExpansionKind::Saddle => "saddle".into(),
            ExpansionKind::Residue => "residue".into(),
        },
        base: ExactFloat { exact: Some(e.growth.to_string()), float: FloatDoc::new(&BigC::from_qi(&e.growth), bits) },
        prefactor: PrefactorDoc {
            two_pi_power: crate::number::format_rational(&pf.pi_power),
            radicand: ExactFloat { exact: radicand, float: FloatDoc::new(&radicand_float, bits) },
            hessian_det: ExactFloat {
                exact: pf.hessian_det.as_ref().map(|d| d.to_string()),
                float: FloatDoc::new(&pf.hessian_det_float, bits),
            },
            branch_arg: format!("{:e}", pf.branch_arg),
            value: FloatDoc::new(&pf.value, bits),
        },
        terms: e
            .terms
            .iter()
            .map(|t| TermDoc {
                q: t.q,
                exponent: crate::number::format_rational(&t.n_power),
                b_q_exact: t.coefficient.as_ref().map(|c| c.to_string()),
                b_q_float: FloatDoc::new(&t.value, bits),
            })
            .collect(),
        error_exponent: e.error_exponent.as_ref().map(crate::number::format_rational),
        reductions_applied: e.reductions.clone(),
        warnings: e.warnings.clone(),
    }
}

fn row_doc(r: &TableRow, digits: usize) -> RowDoc {
    RowDoc {
        n: r.n,
        truth: crate::oracle::render(&r.truth_scaled, digits),
        approx: r.approx.iter().map(|a| crate::oracle::render(a, digits)).collect(),
        rel_err: r.rel_err.iter().map(|a| crate::oracle::render(a, digits)).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "acsv", about = "Asymptotic expansions of ray coefficients of multivariate rational generating functions")]
pub struct Args {
    /// Problem file (TOML or JSON).
    pub file: std::path::PathBuf,
    /// Number of terms.
    #[arg(long)]
    pub order: Option<usize>,
    /// Comma-separated n values for a comparison table.
    #[arg(long, value_delimiter = ',')]
    pub compare: Option<Vec<u64>>,
    /// Working precision in bits.
    #[arg(long)]
    pub precision: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Run the contour and coefficient checks.
    #[arg(long)]
    pub validate: bool,
    /// Largest accepted relative error in --validate.
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
    /// Significant digits in comparison tables.
    #[arg(long, default_value_t = 10)]
    pub digits: usize,
    /// Skip the minimality check.
    #[arg(long)]
    pub assume_minimal: bool,
    /// Search for critical points numerically (heuristic).
    #[arg(long)]
    pub find_points: bool,
}

/// Largest coefficient table the validator builds.
const MAX_CELLS: usize = 4_000_000;

/// Contour comparisons of the original and power-reduced forms at each point.
fn contour_reports(problem: &Problem, bits: usize) -> Result<Vec<ContourReport>, CliError> {
    let mut out = Vec::new();
    let fs: Vec<(Expr, u32)> = problem.factors.iter().map(|f| (f.expr.clone(), f.multiplicity)).collect();
    let max_degree = default_max_degree(&problem.variables, &fs);
    for c in &problem.points {
        let pc = classify_point(problem, c)?;
        let (active, passive): (Vec<_>, Vec<_>) = fs.iter().cloned().enumerate().partition(|(j, _)| pc.active.contains(j));
        let active: Vec<(Expr, u32)> = active.into_iter().map(|(_, f)| f).collect();
        let passive: Vec<(Expr, u32)> = passive.into_iter().map(|(_, f)| f).collect();
        if pc.r > problem.dim() || active.iter().all(|(_, a)| *a == 1) {
            continue;
        }
        let red = reduce_powers_with(&problem.variables, &problem.numerator, &active, &passive, max_degree).map_err(ExpansionError::from)?;
        let original = ContourForm::simple(problem.numerator.clone(), problem.denominator());
        let reduced = ContourForm {
            slices: red.specialize(&problem.alpha),
            denominator: Expr::product(red.factors.clone()).mul(&red.passive_product()),
        };
        for n in 1..=3 {
            let diff = contour_check(&problem.variables, &original, &reduced, &problem.alpha, n, c, &ContourOptions::default())
                .map_err(|e| CliError::Mismatch(e.to_string()))?;
            out.push(ContourReport {
                point: c.iter().map(|x| x.to_string()).collect(),
                n,
                difference: FloatDoc::new(&BigC::from_f64(diff, 0.0), bits.min(53)).re,
            });
        }
    }
    Ok(out)
}

pub struct Outcome {
    pub document: OutputDocument,
    pub rendered: String,
}

/// Runs the pipeline. On validation failure the document is still returned
/// alongside the error.
pub fn run(args: &Args) -> Result<Outcome, (CliError, Option<Box<Outcome>>)> {
    let file = ProblemFile::load(&args.file).map_err(|e| (e, None))?;
    run_file(&file, args)
}

pub fn run_file(file: &ProblemFile, args: &Args) -> Result<Outcome, (CliError, Option<Box<Outcome>>)> {
    let bits = args.precision.unwrap_or(file.precision_bits);
    with_precision(bits, || run_inner(file, args, bits))
}

fn run_inner(file: &ProblemFile, args: &Args, bits: usize) -> Result<Outcome, (CliError, Option<Box<Outcome>>)> {
    let fail = |e: CliError| (e, None);
    let mut problem = file.to_problem().map_err(fail)?;
    if let Some(n) = args.order {
        if n == 0 {
            return Err(fail(CliError::Input("order must be at least 1".into())));
        }
        problem.order = n;
    }
    let mut notes = Vec::new();
    if args.find_points || problem.points.is_empty() {
        if !args.find_points {
            return Err(fail(CliError::Input("no points given (use --find-points for a heuristic search)".into())));
        }
        let found = find_points(&problem, problem.dim(), 32, 1);
        notes.push(format!("points found by a heuristic Newton search: {}", found.len()));
        if found.is_empty() {
            return Err(fail(GeometryError::NotOnVariety.into()));
        }
        problem.points = found;
    }
    let opts = ExpandOptions { assume_minimal: args.assume_minimal || file.assume_minimal, ..Default::default() };
    let expansions = expand(&problem, &opts).map_err(|e| fail(e.into()))?;
    let docs: Vec<ExpansionDoc> = expansions.iter().map(|e| expansion_doc(e, bits)).collect();

    let compare = args.compare.clone().or_else(|| file.compare.clone());
    let ns: Option<Vec<u64>> = compare.or_else(|| args.validate.then(|| vec![1, 2, 4, 8]));
    let mut table = None;
    let mut validation = None;
    let mut mismatch = None;
    if let Some(ns) = ns.filter(|v| !v.is_empty()) {
        let n_max = *ns.iter().max().expect("nonempty");
        let dims = ray_box(&problem.alpha, n_max);
        let cells: usize = dims.iter().map(|d| d + 1).product();
        let terms = expansions.iter().map(|e| e.terms.len()).max().unwrap_or(1);
        let rows = if cells > MAX_CELLS {
            notes.push(format!("comparison skipped: a {dims:?} coefficient box is too large"));
            None
        } else {
            match problem_table(&problem, &dims) {
                Ok(t) => Some(error_table(&expansions, &t, &problem.alpha, &ns, terms).map_err(|e| fail(e.into()))?),
                Err(e) => {
                    notes.push(format!("comparison skipped: {e}"));
                    None
                }
            }
        };
        if args.validate {
            let contour = contour_reports(&problem, bits).map_err(fail)?;
            let mut vnotes = Vec::new();
            let mut passed = true;
            for c in &contour {
                if c.difference.parse::<f64>().map_or(true, |x: f64| x.is_nan() || x >= 1e-8) {
                    passed = false;
                    vnotes.push(format!("contour difference {} at n = {}", c.difference, c.n));
                }
            }
            let rel = rows.as_ref().and_then(|r| r.last()).and_then(|r| r.rel_err.last()).map(|e| e.to_c64().norm());
            match rel {
                Some(x) if x.is_nan() || x > args.tolerance => {
                    passed = false;
                    vnotes.push(format!("relative error {x:e} exceeds {}", args.tolerance));
                }
                None => vnotes.push("no coefficient comparison available".into()),
                _ => {}
            }
            if !passed {
                mismatch = Some(vnotes.join("; "));
            }
            validation = Some(ValidationDoc {
                contour,
                oracle_rel_err: rel.map(|x| format!("{x:e}")),
                tolerance: format!("{:e}", args.tolerance),
                passed,
                notes: vnotes,
            });
        }
        table = rows.map(|r| (r.iter().map(|x| row_doc(x, args.digits)).collect::<Vec<_>>(), r));
    }
    let csv_table = table.as_ref().map(|(_, r)| table_csv(r, args.digits));
    let document = OutputDocument { expansions: docs, table: table.map(|(d, _)| d), validation, notes };
    let rendered = render(&document, args.format, csv_table.as_deref());
    let outcome = Outcome { document, rendered };
    match mismatch {
        Some(m) => Err((CliError::Mismatch(m), Some(Box::new(outcome)))),
        None => Ok(outcome),
    }
}

/// Leaves of a JSON value with dotted paths.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    fn go(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, x)| go(&key(k), x, out)),
            Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| go(&key(&i.to_string()), x, out)),
            Value::Null => out.push((prefix.to_string(), String::new())),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    go("", v, &mut out);
    out
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render(doc: &OutputDocument, format: Format, table_csv: Option<&str>) -> String {
    let value = serde_json::to_value(doc).expect("serializable");
    match format {
        Format::Json => serde_json::to_string_pretty(&value).expect("serializable") + "\n",
        Format::Csv => {
            let mut out = String::from("key,value\n");
            for (k, v) in flatten(&value) {
                out.push_str(&format!("{},{}\n", csv_cell(&k), csv_cell(&v)));
            }
            if let Some(t) = table_csv {
                out.push('\n');
                out.push_str(t);
            }
            out
        }
        Format::Text => render_text(doc),
    }
}

fn float_text(f: &FloatDoc) -> String {
    if f.im.is_empty() {
        f.re.clone()
    } else {
        format!("{} + ({})*i", f.re, f.im)
    }
}

fn exact_text(x: &ExactFloat) -> String {
    match &x.exact {
        Some(e) => format!("{e} ~ {}", float_text(&x.float)),
        None => float_text(&x.float),
    }
}

fn render_text(doc: &OutputDocument) -> String {
    let mut s = String::new();
    for e in &doc.expansions {
        s.push_str(&format!("point ({}) direction ({}) [{}]\n", e.point.join(", "), e.alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", "), e.kind));
        s.push_str(&format!("  base: {}\n", exact_text(&e.base)));
        let p = &e.prefactor;
        s.push_str(&format!("  prefactor: (2 pi)^({}) * sqrt({})\n", p.two_pi_power, exact_text(&p.radicand)));
        s.push_str(&format!("    value: {}\n", float_text(&p.value)));
        s.push_str(&format!("    hessian det: {}\n", exact_text(&p.hessian_det)));
        s.push_str(&format!("    branch arg: {}\n", p.branch_arg));
        for t in &e.terms {
            let exact = t.b_q_exact.as_deref().map(|x| format!("{x} ~ ")).unwrap_or_default();
            s.push_str(&format!("  q = {}: n^({}) * {}{}\n", t.q, t.exponent, exact, float_text(&t.b_q_float)));
        }
        match &e.error_exponent {
            Some(x) => s.push_str(&format!("  error: O(n^({x}))\n")),
            None => s.push_str("  error: exponentially small\n"),
        }
        for r in &e.reductions_applied {
            s.push_str(&format!("  reduction: {r}\n"));
        }
        for w in &e.warnings {
            s.push_str(&format!("  warning: {w}\n"));
        }
    }
    if let Some(rows) = &doc.table {
        s.push_str("comparison (scaled by base^-n):\n");
        for r in rows {
            s.push_str(&format!("  n = {}: truth {} approx {} rel err {}\n", r.n, r.truth, r.approx.join(" "), r.rel_err.join(" ")));
        }
    }
    if let Some(v) = &doc.validation {
        s.push_str(&format!("validation: {}\n", if v.passed { "passed" } else { "FAILED" }));
        for c in &v.contour {
            s.push_str(&format!("  contour n = {} at ({}): {}\n", c.n, c.point.join(", "), c.difference));
        }
        if let Some(r) = &v.oracle_rel_err {
            s.push_str(&format!("  oracle relative error: {r} (tolerance {})\n", v.tolerance));
        }
        for n in &v.notes {
            s.push_str(&format!("  note: {n}\n"));
        }
    }
    for n in &doc.notes {
        s.push_str(&format!("note: {n}\n"));
    }
    s
}
