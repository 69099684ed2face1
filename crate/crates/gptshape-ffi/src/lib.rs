//! C ABI for the gptshape library: boundary curves, tesselated GPT matrices,
//! kernel-polynomial recovery, and domain candidates behind opaque handles.
//!
//! Every fallible call returns a [`GptStatus`]; on failure a thread-local
//! message is retrievable with [`gpt_last_error_message`]. All handles must be
//! released with their matching `*_free` function exactly once.

use gptshape::geometry::{make_shape, resample, BoundaryCurve, ShapeSpec};
use gptshape::inversion::recover_coefficients;
use gptshape::nptensor::{assemble_np, tgpt, Contrast, TgptMatrix};
use gptshape::pipeline::{recover_domain, RecoveryConfig};
use gptshape::poly2d::{MultiIndex, Poly2};
use gptshape::topology::DomainCandidate;
use libc::{c_char, size_t};
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GptStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ComputationFailed = 3,
    Panic = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

/// Copies the message of the most recent error on this thread into `buf`
/// (NUL-terminated, truncated to `len`). Returns the full message length in
/// bytes, excluding the terminator.
///
/// # Safety
/// `buf` must point to at least `len` writable bytes, or be null (in which
/// case only the length is returned).
#[no_mangle]
pub unsafe extern "C" fn gpt_last_error_message(buf: *mut c_char, len: size_t) -> size_t {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

fn guarded<F: FnOnce() -> GptStatus>(f: F) -> GptStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            GptStatus::Panic
        }
    }
}

/// Opaque discretized boundary curve.
pub struct GptCurve(BoundaryCurve);

/// Opaque tesselated GPT matrix.
pub struct GptTensor(TgptMatrix);

/// Opaque bivariate polynomial.
pub struct GptPoly(Poly2);

/// Opaque list of recovered domain candidates, ranked best first.
pub struct GptCandidates(Vec<DomainCandidate>);

/// Builds a boundary curve by resampling a closed point loop given as
/// interleaved `x0, y0, x1, y1, ...` to `n_nodes` arclength-uniform nodes.
///
/// # Safety
/// `xy` must point to `2 * n_points` doubles; `out` must be a valid pointer.
/// The returned handle must be freed with [`gpt_curve_free`].
#[no_mangle]
pub unsafe extern "C" fn gpt_curve_from_points(
    xy: *const f64,
    n_points: size_t,
    n_nodes: size_t,
    out: *mut *mut GptCurve,
) -> GptStatus {
    if xy.is_null() || out.is_null() {
        set_error("null pointer argument");
        return GptStatus::NullPointer;
    }
    let flat = std::slice::from_raw_parts(xy, 2 * n_points);
    guarded(|| {
        let points: Vec<[f64; 2]> = flat.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        match resample(&points, n_nodes) {
            Ok(curve) => {
                *out = Box::into_raw(Box::new(GptCurve(curve)));
                GptStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                GptStatus::InvalidArgument
            }
        }
    })
}

/// Builds one of the parametric test shapes from its JSON description, e.g.
/// `{"kind":"ellipse","a":2.0,"b":1.0}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
/// The returned handle must be freed with [`gpt_curve_free`].
#[no_mangle]
pub unsafe extern "C" fn gpt_curve_from_shape_json(
    json: *const c_char,
    n_nodes: size_t,
    out: *mut *mut GptCurve,
) -> GptStatus {
    if json.is_null() || out.is_null() {
        set_error("null pointer argument");
        return GptStatus::NullPointer;
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("shape JSON is not valid UTF-8");
            return GptStatus::InvalidArgument;
        }
    };
    guarded(|| {
        let spec: ShapeSpec = match serde_json::from_str(text) {
            Ok(s) => s,
            Err(e) => {
                set_error(&e.to_string());
                return GptStatus::InvalidArgument;
            }
        };
        match make_shape(&spec, n_nodes) {
            Ok(curve) => {
                *out = Box::into_raw(Box::new(GptCurve(curve)));
                GptStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                GptStatus::InvalidArgument
            }
        }
    })
}

/// Number of nodes of a curve handle.
///
/// # Safety
/// `curve` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gpt_curve_len(curve: *const GptCurve) -> size_t {
    if curve.is_null() {
        return 0;
    }
    (*curve).0.len()
}

/// Copies the node coordinates (interleaved x,y) into `out_xy`.
///
/// # Safety
/// `out_xy` must have room for `2 * gpt_curve_len(curve)` doubles.
#[no_mangle]
pub unsafe extern "C" fn gpt_curve_nodes(curve: *const GptCurve, out_xy: *mut f64) -> GptStatus {
    if curve.is_null() || out_xy.is_null() {
        set_error("null pointer argument");
        return GptStatus::NullPointer;
    }
    for (i, p) in (*curve).0.nodes().iter().enumerate() {
        *out_xy.add(2 * i) = p[0];
        *out_xy.add(2 * i + 1) = p[1];
    }
    GptStatus::Ok
}

/// # Safety
/// `curve` must come from this library and not be freed twice; null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn gpt_curve_free(curve: *mut GptCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Computes the tesselated GPT of order `d` at spectral parameter `lambda`.
///
/// # Safety
/// `curve` must be a live handle; `out` must be valid. The returned handle
/// must be freed with [`gpt_tensor_free`].
#[no_mangle]
pub unsafe extern "C" fn gpt_tensor_compute(
    curve: *const GptCurve,
    lambda: f64,
    d: size_t,
    out: *mut *mut GptTensor,
) -> GptStatus {
    if curve.is_null() || out.is_null() {
        set_error("null pointer argument");
        return GptStatus::NullPointer;
    }
    guarded(|| {
        let contrast = match Contrast::new(lambda) {
            Ok(c) => c,
            Err(e) => {
                set_error(&e.to_string());
                return GptStatus::InvalidArgument;
            }
        };
        let result = assemble_np(&(*curve).0).and_then(|op| tgpt(&op, &contrast, d));
        match result {
            Ok(t) => {
                *out = Box::into_raw(Box::new(GptTensor(t)));
                GptStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                GptStatus::ComputationFailed
            }
        }
    })
}

/// # Safety
/// `t` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gpt_tensor_rows(t: *const GptTensor) -> size_t {
    if t.is_null() {
        return 0;
    }
    (*t).0.rows()
}

/// # Safety
/// `t` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gpt_tensor_cols(t: *const GptTensor) -> size_t {
    if t.is_null() {
        return 0;
    }
    (*t).0.cols()
}

/// Copies the entries row-major into `out`.
///
/// # Safety
/// `out` must have room for `rows * cols` doubles.
#[no_mangle]
pub unsafe extern "C" fn gpt_tensor_entries(t: *const GptTensor, out: *mut f64) -> GptStatus {
    if t.is_null() || out.is_null() {
        set_error("null pointer argument");
        return GptStatus::NullPointer;
    }
    let m = (*t).0.entries();
    let mut k = 0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            *out.add(k) = m[(i, j)];
            k += 1;
        }
    }
    GptStatus::Ok
}

/// Parses a tensor from its JSON serialization.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be valid. The returned handle
/// must be freed with [`gpt_tensor_free`].
#[no_mangle]
pub unsafe extern "C" fn gpt_tensor_from_json(
    json: *const c_char,
    out: *mut *mut GptTensor,
) -> GptStatus {
    if json.is_null() || out.is_null() {
        set_error("null pointer argument");
        return GptStatus::NullPointer;
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("tensor JSON is not valid UTF-8");
            return GptStatus::InvalidArgument;
        }
    };
    match serde_json::from_str::<TgptMatrix>(text) {
        Ok(t) => {
            *out = Box::into_raw(Box::new(GptTensor(t)));
            GptStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            GptStatus::InvalidArgument
        }
    }
}

/// # Safety
/// `t` must come from this library and not be freed twice; null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn gpt_tensor_free(t: *mut GptTensor) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Recovers the minimal boundary polynomial from the tensor's numerical
/// kernel.
///
/// # Safety
/// `t` must be a live handle; `out` must be valid. The returned handle must
/// be freed with [`gpt_poly_free`].
#[no_mangle]
pub unsafe extern "C" fn gpt_recover_poly(
    t: *const GptTensor,
    out: *mut *mut GptPoly,
) -> GptStatus {
    if t.is_null() || out.is_null() {
        set_error("null pointer argument");
        return GptStatus::NullPointer;
    }
    guarded(|| match recover_coefficients(&(*t).0) {
        Ok(rec) => {
            *out = Box::into_raw(Box::new(GptPoly(rec.poly)));
            GptStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            GptStatus::ComputationFailed
        }
    })
}

/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gpt_poly_degree(p: *const GptPoly) -> size_t {
    if p.is_null() {
        return 0;
    }
    (*p).0.degree()
}

/// Coefficient of the monomial `x^a1 * y^a2` (0 when out of range).
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gpt_poly_coeff(p: *const GptPoly, a1: size_t, a2: size_t) -> f64 {
    if p.is_null() || a1 + a2 > (*p).0.degree() {
        return 0.0;
    }
    (*p).0.coeff(MultiIndex::new(a1, a2))
}

/// Evaluates the polynomial at `(x, y)`.
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gpt_poly_eval(p: *const GptPoly, x: f64, y: f64) -> f64 {
    if p.is_null() {
        return f64::NAN;
    }
    (*p).0.eval([x, y])
}

/// # Safety
/// `p` must come from this library and not be freed twice; null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn gpt_poly_free(p: *mut GptPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Runs the full recovery pipeline and returns the ranked domain candidates.
/// `rank` toggles the forward-solve scoring stage.
///
/// # Safety
/// `t` must be a live handle; `out` must be valid. The returned handle must
/// be freed with [`gpt_candidates_free`].
#[no_mangle]
pub unsafe extern "C" fn gpt_recover_candidates(
    t: *const GptTensor,
    rank: bool,
    out: *mut *mut GptCandidates,
) -> GptStatus {
    if t.is_null() || out.is_null() {
        set_error("null pointer argument");
        return GptStatus::NullPointer;
    }
    guarded(|| {
        let cfg = RecoveryConfig {
            skip_ranking: !rank,
            ..RecoveryConfig::default()
        };
        match recover_domain(&(*t).0, &cfg, None) {
            Ok(outcome) => {
                *out = Box::into_raw(Box::new(GptCandidates(outcome.candidates)));
                GptStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                GptStatus::ComputationFailed
            }
        }
    })
}

/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gpt_candidates_count(c: *const GptCandidates) -> size_t {
    if c.is_null() {
        return 0;
    }
    (*c).0.len()
}

/// Number of boundary points of candidate `index`.
///
/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gpt_candidates_len(c: *const GptCandidates, index: size_t) -> size_t {
    if c.is_null() || index >= (*c).0.len() {
        return 0;
    }
    (&(*c).0)[index].loop_points.len()
}

/// Copies the boundary loop of candidate `index` (interleaved x,y).
///
/// # Safety
/// `out_xy` must have room for `2 * gpt_candidates_len(c, index)` doubles.
#[no_mangle]
pub unsafe extern "C" fn gpt_candidates_points(
    c: *const GptCandidates,
    index: size_t,
    out_xy: *mut f64,
) -> GptStatus {
    if c.is_null() || out_xy.is_null() {
        set_error("null pointer argument");
        return GptStatus::NullPointer;
    }
    if index >= (*c).0.len() {
        set_error("candidate index out of range");
        return GptStatus::InvalidArgument;
    }
    for (i, p) in (&(*c).0)[index].loop_points.iter().enumerate() {
        *out_xy.add(2 * i) = p[0];
        *out_xy.add(2 * i + 1) = p[1];
    }
    GptStatus::Ok
}

/// Candidate score (relative first-order tensor discrepancy), or NaN when
/// unscored.
///
/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gpt_candidates_score(c: *const GptCandidates, index: size_t) -> f64 {
    if c.is_null() || index >= (*c).0.len() {
        return f64::NAN;
    }
    (&(*c).0)[index].score.unwrap_or(f64::NAN)
}

/// # Safety
/// `c` must come from this library and not be freed twice; null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn gpt_candidates_free(c: *mut GptCandidates) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}
