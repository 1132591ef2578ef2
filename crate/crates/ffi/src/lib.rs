//! C interface to the `acsv` engine.
//!
//! Objects are opaque handles created by `acsv_*_new`/`acsv_expand` and
//! released by the matching `*_free`. Every fallible call returns an
//! [`AcsvStatus`]; the message of the last failure on the calling thread is
//! available from [`acsv_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use acsv::cli::{expansion_doc, CliError, ProblemFile};
use acsv::expansion::{expand, AsymptoticExpansion, ExpandOptions};
use acsv::geometry::Problem;
use acsv::number::{q_to_f64, with_precision};

/// Status codes. Values 2 to 6 match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcsvStatus {
    Ok = 0,
    NullPointer = 1,
    Input = 2,
    Geometry = 3,
    Degenerate = 4,
    Unsupported = 5,
    Mismatch = 6,
    OutOfRange = 7,
    Panic = 8,
}

/// A parsed problem.
pub struct AcsvProblem {
    problem: Problem,
    bits: usize,
}

/// Expansions at every point of a problem.
pub struct AcsvResult {
    expansions: Vec<AsymptoticExpansion>,
    bits: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: AcsvStatus, msg: impl Into<String>) -> AcsvStatus {
    set_error(msg.into());
    status
}

fn from_cli(e: CliError) -> AcsvStatus {
    let status = match e.exit_code() {
        2 => AcsvStatus::Input,
        3 => AcsvStatus::Geometry,
        4 => AcsvStatus::Degenerate,
        5 => AcsvStatus::Unsupported,
        _ => AcsvStatus::Mismatch,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> AcsvStatus) -> AcsvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(AcsvStatus::Panic, "internal panic"),
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, AcsvStatus> {
    if p.is_null() {
        return Err(fail(AcsvStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(AcsvStatus::Input, "string is not UTF-8"))
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn acsv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a problem document (TOML, or JSON when `is_json` is nonzero).
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acsv_problem_new(source: *const c_char, is_json: c_int, out: *mut *mut AcsvProblem) -> AcsvStatus {
    guard(|| {
        if out.is_null() {
            return fail(AcsvStatus::NullPointer, "null output pointer");
        }
        let src = match text(source) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let parsed = ProblemFile::from_str_guess(src, is_json != 0).and_then(|f| Ok((f.to_problem()?, f.precision_bits)));
        match parsed {
            Ok((problem, bits)) => {
                *out = Box::into_raw(Box::new(AcsvProblem { problem, bits }));
                AcsvStatus::Ok
            }
            Err(e) => from_cli(e),
        }
    })
}

/// # Safety
/// `p` must come from [`acsv_problem_new`] (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn acsv_problem_free(p: *mut AcsvProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Computes expansions at every point of the problem. `order` 0 keeps the
/// problem's own order.
///
/// # Safety
/// `p` must be a live problem handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acsv_expand(p: *const AcsvProblem, order: usize, assume_minimal: c_int, out: *mut *mut AcsvResult) -> AcsvStatus {
    guard(|| {
        if p.is_null() || out.is_null() {
            return fail(AcsvStatus::NullPointer, "null handle");
        }
        let p = &*p;
        let mut problem = p.problem.clone();
        if order > 0 {
            problem.order = order;
        }
        if problem.points.is_empty() {
            return fail(AcsvStatus::Input, "problem has no points");
        }
        let opts = ExpandOptions { assume_minimal: assume_minimal != 0, ..Default::default() };
        match with_precision(p.bits, || expand(&problem, &opts)) {
            Ok(expansions) => {
                *out = Box::into_raw(Box::new(AcsvResult { expansions, bits: p.bits }));
                AcsvStatus::Ok
            }
            Err(e) => from_cli(e.into()),
        }
    })
}

/// # Safety
/// `r` must come from [`acsv_expand`] (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn acsv_result_free(r: *mut AcsvResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

unsafe fn expansion<'a>(r: *const AcsvResult, point: usize) -> Result<(&'a AcsvResult, &'a AsymptoticExpansion), AcsvStatus> {
    if r.is_null() {
        return Err(fail(AcsvStatus::NullPointer, "null result"));
    }
    let r = &*r;
    match r.expansions.get(point) {
        Some(e) => Ok((r, e)),
        None => Err(fail(AcsvStatus::OutOfRange, format!("point index {point} out of range"))),
    }
}

/// Number of points (0 for a null handle).
///
/// # Safety
/// `r` must be a live result handle or null.
#[no_mangle]
pub unsafe extern "C" fn acsv_result_points(r: *const AcsvResult) -> usize {
    if r.is_null() {
        0
    } else {
        (*r).expansions.len()
    }
}

/// Number of terms at a point (0 when out of range).
///
/// # Safety
/// `r` must be a live result handle or null.
#[no_mangle]
pub unsafe extern "C" fn acsv_result_terms(r: *const AcsvResult, point: usize) -> usize {
    expansion(r, point).map_or(0, |(_, e)| e.terms.len())
}

/// Exponential growth `c^{-alpha}` as a complex double.
///
/// # Safety
/// `r` must be a live result handle; `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn acsv_result_growth(r: *const AcsvResult, point: usize, re: *mut f64, im: *mut f64) -> AcsvStatus {
    guard(|| {
        let (_, e) = match expansion(r, point) {
            Ok(x) => x,
            Err(s) => return s,
        };
        if re.is_null() || im.is_null() {
            return fail(AcsvStatus::NullPointer, "null output pointer");
        }
        let z = e.growth.to_c64();
        *re = z.re;
        *im = z.im;
        AcsvStatus::Ok
    })
}

/// Term `q`: the power of `n` and the coefficient including the prefactor.
///
/// # Safety
/// `r` must be a live result handle; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn acsv_result_term(
    r: *const AcsvResult,
    point: usize,
    q: usize,
    exponent: *mut f64,
    re: *mut f64,
    im: *mut f64,
) -> AcsvStatus {
    guard(|| {
        let (res, e) = match expansion(r, point) {
            Ok(x) => x,
            Err(s) => return s,
        };
        if exponent.is_null() || re.is_null() || im.is_null() {
            return fail(AcsvStatus::NullPointer, "null output pointer");
        }
        let Some(t) = e.terms.get(q) else {
            return fail(AcsvStatus::OutOfRange, format!("term {q} out of range"));
        };
        let z = with_precision(res.bits, || (t.value.clone() * &e.prefactor.value).to_c64());
        *exponent = q_to_f64(&t.n_power);
        *re = z.re;
        *im = z.im;
        AcsvStatus::Ok
    })
}

/// Sum of the first `terms` terms at `n`, divided by `growth^n`.
///
/// # Safety
/// `r` must be a live result handle; `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn acsv_result_evaluate(r: *const AcsvResult, point: usize, n: u64, terms: usize, re: *mut f64, im: *mut f64) -> AcsvStatus {
    guard(|| {
        let (res, e) = match expansion(r, point) {
            Ok(x) => x,
            Err(s) => return s,
        };
        if re.is_null() || im.is_null() {
            return fail(AcsvStatus::NullPointer, "null output pointer");
        }
        let z = with_precision(res.bits, || e.partial_sum(n, terms)).to_c64();
        *re = z.re;
        *im = z.im;
        AcsvStatus::Ok
    })
}

/// The expansions as a JSON array of documents with exact coefficients.
/// Release the string with [`acsv_string_free`].
///
/// # Safety
/// `r` must be a live result handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acsv_result_json(r: *const AcsvResult, out: *mut *mut c_char) -> AcsvStatus {
    guard(|| {
        if r.is_null() || out.is_null() {
            return fail(AcsvStatus::NullPointer, "null handle");
        }
        let r = &*r;
        let docs: Vec<_> = with_precision(r.bits, || r.expansions.iter().map(|e| expansion_doc(e, r.bits)).collect());
        let json = serde_json::to_string(&docs).expect("serializable");
        *out = CString::new(json).expect("no interior NUL").into_raw();
        AcsvStatus::Ok
    })
}

/// # Safety
/// `s` must come from this library (or be null).
#[no_mangle]
pub unsafe extern "C" fn acsv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
