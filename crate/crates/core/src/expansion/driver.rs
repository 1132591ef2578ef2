//! From a problem and a point to an expansion: classification, reductions,
//! then the residue or stationary-phase formula.

use crate::expr::{normalize, Expr};
use crate::geometry::{
    certify_strictly_minimal, classify_point, solve_critical_weights, Certification, CertifyOptions, Factor, GeometryError,
    PointClass, Problem,
};
use crate::reduce::{default_max_degree, reduce_factors, reduce_powers_with, ReduceError};

use super::{expand_saddle, residue_coefficients, residue_expansion, AsymptoticExpansion, ExpansionError, SaddleInput, Slice};

impl From<ReduceError> for ExpansionError {
    fn from(e: ReduceError) -> Self {
        ExpansionError::Reduction(e.to_string())
    }
}

#[derive(Debug, Clone, Default)]
pub struct ExpandOptions {
    /// Skip the heuristic minimality check.
    pub assume_minimal: bool,
    pub certify: CertifyOptions,
    /// Cap on the ansatz degree of reduction certificates.
    pub max_ansatz_degree: Option<usize>,
}

fn active_and_passive(problem: &Problem, pc: &PointClass) -> (Vec<(Expr, u32)>, Vec<(Expr, u32)>) {
    let mut active = Vec::new();
    let mut passive = Vec::new();
    for (j, Factor { expr, multiplicity }) in problem.factors.iter().enumerate() {
        if pc.active.contains(&j) {
            active.push((expr.clone(), *multiplicity));
        } else {
            passive.push((expr.clone(), *multiplicity));
        }
    }
    (active, passive)
}

fn product(fs: &[(Expr, u32)]) -> Expr {
    Expr::product(fs.iter().map(|(f, a)| f.powi(*a as i64)).collect())
}

/// Point data for a sub-collection of the factors.
fn sub_problem(problem: &Problem, numerator: Expr, factors: &[(Expr, u32)]) -> Problem {
    Problem {
        variables: problem.variables.clone(),
        numerator,
        factors: factors.iter().map(|(e, a)| Factor { expr: e.clone(), multiplicity: *a }).collect(),
        alpha: problem.alpha.clone(),
        points: vec![],
        order: problem.order,
    }
}

/// Numerator slices for factors that vanish at the point; repeated factors
/// are removed first. With `symbolic`, the direction stays as symbols.
fn simple_slices(
    problem: &Problem,
    numerator: &Expr,
    active: &[(Expr, u32)],
    passive: &[(Expr, u32)],
    max_degree: usize,
    symbolic: bool,
    notes: &mut Vec<String>,
) -> Result<(Vec<Slice>, Expr), ExpansionError> {
    if active.iter().all(|(_, a)| *a == 1) {
        return Ok((vec![Slice { n_power: 0, numerator: numerator.clone() }], product(passive)));
    }
    let red = reduce_powers_with(&problem.variables, numerator, active, passive, max_degree)?;
    notes.push(format!("removed repeated factors in {} integration-by-parts steps; numerator has degree {} in n", red.steps, red.n_degree()));
    let slices = if symbolic { red.slices.clone() } else { red.specialize(&problem.alpha) };
    Ok((slices, red.passive_product()))
}

fn minimality(problem: &Problem, pc: &PointClass, opts: &ExpandOptions) -> Result<Option<String>, ExpansionError> {
    if opts.assume_minimal {
        return Ok(None);
    }
    match certify_strictly_minimal(problem, pc, &opts.certify) {
        Certification::CertifiedHeuristically { .. } => Ok(None),
        Certification::Counterexample { factor, .. } => {
            Err(GeometryError::NotMinimal(format!("factor {} vanishes inside the closed polydisc", factor + 1)).into())
        }
        Certification::Inconclusive(why) => Ok(Some(format!("minimality check inconclusive: {why}"))),
    }
}

/// Residue coefficients (ascending in `n`) for `r >= d`, with notes.
fn residue_parts(
    problem: &Problem,
    pc: &PointClass,
    max_degree: usize,
    symbolic: bool,
) -> Result<(Vec<Expr>, Vec<String>, Vec<String>), ExpansionError> {
    let d = problem.dim();
    let (active, passive) = active_and_passive(problem, pc);
    let mut notes = Vec::new();
    let mut warnings = Vec::new();
    let mut total: Vec<Expr> = Vec::new();
    let mut add = |coeffs: Vec<Expr>| {
        if total.len() < coeffs.len() {
            total.resize(coeffs.len(), Expr::zero());
        }
        for (slot, c) in total.iter_mut().zip(coeffs) {
            *slot = normalize(&slot.add(&c)).expr;
        }
    };
    if pc.r == d {
        let (slices, other) = simple_slices(problem, &problem.numerator, &active, &passive, max_degree, symbolic, &mut notes)?;
        let (coeffs, w) = residue_coefficients(&problem.variables, pc, &slices, &other);
        warnings.extend(w);
        add(coeffs);
    } else {
        let terms = reduce_factors(&problem.variables, &problem.numerator, &active, &pc.point, max_degree)?;
        notes.push(format!("split into {} terms over subsets of {d} factors", terms.len()));
        for t in terms {
            let sub = sub_problem(problem, t.numerator.clone(), &t.factors);
            let sub_pc = classify_point(&sub, &pc.point)?;
            match solve_critical_weights(&sub_pc, &problem.alpha) {
                Err(GeometryError::NotInCone) => {
                    notes.push(format!("dropped the term over factors {:?}: direction outside its cone", t.subset.iter().map(|j| j + 1).collect::<Vec<_>>()));
                    continue;
                }
                Err(e) => return Err(e.into()),
                Ok(_) => {}
            }
            let (slices, other) = simple_slices(problem, &t.numerator, &t.factors, &passive, max_degree, symbolic, &mut notes)?;
            let (coeffs, w) = residue_coefficients(&problem.variables, &sub_pc, &slices, &other);
            warnings.extend(w);
            add(coeffs);
        }
    }
    if total.is_empty() {
        total.push(Expr::zero());
    }
    Ok((total, notes, warnings))
}

fn max_degree_for(problem: &Problem, opts: &ExpandOptions) -> usize {
    let fs: Vec<(Expr, u32)> = problem.factors.iter().map(|f| (f.expr.clone(), f.multiplicity)).collect();
    opts.max_ansatz_degree.unwrap_or_else(|| default_max_degree(&problem.variables, &fs))
}

/// Expansion of `F_{n alpha}` contributed by the point `c`.
pub fn expand_point(problem: &Problem, c: &[crate::number::QI], opts: &ExpandOptions) -> Result<AsymptoticExpansion, ExpansionError> {
    let d = problem.dim();
    let pc = classify_point(problem, c)?;
    let max_degree = max_degree_for(problem, opts);
    let minimal_note = minimality(problem, &pc, opts)?;
    let mut exp = if pc.r >= d {
        if pc.r == d {
            solve_critical_weights(&pc, &problem.alpha)?;
        }
        let (coeffs, notes, warnings) = residue_parts(problem, &pc, max_degree, false)?;
        let mut e = residue_expansion(&pc, &problem.alpha, coeffs, warnings)?;
        e.reductions = notes;
        e
    } else {
        let cd = solve_critical_weights(&pc, &problem.alpha)?;
        let (active, passive) = active_and_passive(problem, &pc);
        let mut notes = Vec::new();
        let (slices, other) = simple_slices(problem, &problem.numerator, &active, &passive, max_degree, false, &mut notes)?;
        let inp = SaddleInput {
            vars: &problem.variables,
            active: active.iter().map(|(e, _)| e.clone()).collect(),
            other,
            pc: &pc,
            cd: &cd,
            alpha: &problem.alpha,
            slices,
            n_terms: problem.order,
        };
        let mut e = expand_saddle(&inp)?;
        e.reductions = notes;
        e
    };
    exp.warnings.extend(minimal_note);
    Ok(exp)
}

/// Expansions at every listed point.
pub fn expand(problem: &Problem, opts: &ExpandOptions) -> Result<Vec<AsymptoticExpansion>, ExpansionError> {
    if problem.points.is_empty() {
        return Err(ExpansionError::Unsupported("no points given".into()));
    }
    problem.points.iter().map(|c| expand_point(problem, c, opts)).collect()
}

/// For `r >= d`: the polynomial in `n` (ascending coefficients) with the
/// direction left symbolic, together with the symbol names.
pub fn residue_polynomial(problem: &Problem, c: &[crate::number::QI], opts: &ExpandOptions) -> Result<(Vec<Expr>, Vec<String>), ExpansionError> {
    let pc = classify_point(problem, c)?;
    if pc.r < problem.dim() {
        return Err(ExpansionError::Unsupported("the point has fewer than d vanishing factors".into()));
    }
    let (coeffs, _, _) = residue_parts(problem, &pc, max_degree_for(problem, opts), true)?;
    Ok((coeffs, crate::reduce::alpha_names(&problem.variables)))
}
