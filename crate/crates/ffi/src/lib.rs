//! C ABI for the Boubaker-expansion quantum-well solver.
//!
//! The surface follows the usual opaque-handle pattern: `bpes_run_new`
//! solves the expansion and returns a `BpesRun*`; getters copy results into
//! caller-owned buffers; `bpes_run_reconstruct` produces a `BpesField*`
//! grid handle. Every fallible call returns a `BpesStatus`, with a
//! thread-local detail message readable via `bpes_last_error_message`.
//! Handles must be released with the matching `*_free` function exactly
//! once; all other functions never take ownership.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bpes_core::{
    normalize_probability, reconstruct, solve_coefficients, subnorm_h, AssembledSystem,
    BoubakerBasis, ChainRuleMode, CoefficientSet, Error, ExpansionConfig, PhysicalParams,
    SolutionField,
};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BpesStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NoPositiveRoot = 3,
    QuadratureFailed = 4,
    GridOutOfDomain = 5,
    ZeroField = 6,
    DegenerateDenominator = 7,
    BufferTooSmall = 8,
    InternalError = 9,
}

/// Chain-rule placement in the assembled functional.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BpesChainRule {
    Literal = 0,
    Single = 1,
}

/// A solved expansion: parameters, basis, assembled system, coefficients.
pub struct BpesRun {
    params: PhysicalParams,
    basis: BoubakerBasis,
    system: AssembledSystem,
    coeffs: CoefficientSet,
}

/// A reconstructed solution grid.
pub struct BpesField {
    field: SolutionField,
    scale: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let text = CString::new(msg.into()).unwrap_or_else(|_| CString::new("error").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn status_for(err: &Error) -> BpesStatus {
    match err {
        Error::InvalidConfig(_) => BpesStatus::InvalidArgument,
        Error::NoPositiveRoot { .. } => BpesStatus::NoPositiveRoot,
        Error::QuadratureNonFinite { .. } => BpesStatus::QuadratureFailed,
        Error::GridOutOfDomain { .. } => BpesStatus::GridOutOfDomain,
        Error::ZeroField => BpesStatus::ZeroField,
        Error::DegenerateDenominator { .. } => BpesStatus::DegenerateDenominator,
        Error::PipelineStage { source, .. } => status_for(source),
    }
}

fn fail_with(err: Error) -> BpesStatus {
    let status = status_for(&err);
    set_last_error(err.to_string());
    status
}

fn guard(f: impl FnOnce() -> BpesStatus) -> BpesStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            BpesStatus::InternalError
        }
    }
}

/// Copies `src` into a caller buffer, demanding an exact length match.
fn copy_slice(src: &[f64], buf: *mut f64, len: usize) -> BpesStatus {
    if buf.is_null() {
        set_last_error("output buffer is null");
        return BpesStatus::NullPointer;
    }
    if len != src.len() {
        set_last_error(format!("buffer holds {len} values, need {}", src.len()));
        return BpesStatus::BufferTooSmall;
    }
    unsafe { std::ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len()) };
    BpesStatus::Ok
}

/// Library version as a static NUL-terminated string; never freed.
#[no_mangle]
pub extern "C" fn bpes_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static name of a status code; never freed.
#[no_mangle]
pub extern "C" fn bpes_status_name(status: BpesStatus) -> *const c_char {
    let name: &'static str = match status {
        BpesStatus::Ok => "ok\0",
        BpesStatus::NullPointer => "null pointer\0",
        BpesStatus::InvalidArgument => "invalid argument\0",
        BpesStatus::NoPositiveRoot => "no positive root\0",
        BpesStatus::QuadratureFailed => "quadrature failed\0",
        BpesStatus::GridOutOfDomain => "grid out of domain\0",
        BpesStatus::ZeroField => "zero field\0",
        BpesStatus::DegenerateDenominator => "degenerate denominator\0",
        BpesStatus::BufferTooSmall => "buffer too small\0",
        BpesStatus::InternalError => "internal error\0",
    };
    name.as_ptr() as *const c_char
}

/// Copies the thread-local detail message for the last failure into `buf`
/// (NUL-terminated, truncated to `cap`). Returns the full length including
/// the NUL, or 0 when no error is recorded. `buf` may be null to query the
/// required size.
///
/// # Safety
/// `buf`, when non-null, must point to at least `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bpes_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(msg) = slot.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            // Guarantee termination even when truncated.
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Solves the expansion of order `n0` with explicit physical parameters
/// and writes a new handle to `out`. `quad_nodes = 0` selects the
/// exact-for-polynomials default node count.
///
/// # Safety
/// `out` must be a valid pointer to a `BpesRun*` slot.
#[no_mangle]
pub unsafe extern "C" fn bpes_run_new(
    n0: u32,
    hbar: f64,
    mass: f64,
    momentum: f64,
    energy: f64,
    radius: f64,
    coupling: f64,
    quad_nodes: u32,
    theta_lo: f64,
    theta_hi: f64,
    chain_rule: BpesChainRule,
    out: *mut *mut BpesRun,
) -> BpesStatus {
    if out.is_null() {
        set_last_error("output handle slot is null");
        return BpesStatus::NullPointer;
    }
    guard(|| {
        let params = match PhysicalParams::new(hbar, mass, momentum, energy, radius, coupling) {
            Ok(p) => p,
            Err(e) => return fail_with(e),
        };
        let mut config = match ExpansionConfig::new(n0 as usize) {
            Ok(c) => c,
            Err(e) => return fail_with(e),
        };
        if quad_nodes != 0 {
            config.quad_nodes = quad_nodes as usize;
        }
        config.theta_lo = theta_lo;
        config.theta_hi = theta_hi;
        config.chain_rule_mode = match chain_rule {
            BpesChainRule::Literal => ChainRuleMode::Literal,
            BpesChainRule::Single => ChainRuleMode::Single,
        };
        if let Err(e) = config.validate() {
            return fail_with(e);
        }
        let basis = match BoubakerBasis::build(n0 as usize, 1e-12) {
            Ok(b) => b,
            Err(e) => return fail_with(e),
        };
        let system = match bpes_core::assemble(&config, &params, &basis) {
            Ok(s) => s,
            Err(e) => return fail_with(e),
        };
        let coeffs = solve_coefficients(&system);
        let run = Box::new(BpesRun {
            params,
            basis,
            system,
            coeffs,
        });
        unsafe { *out = Box::into_raw(run) };
        BpesStatus::Ok
    })
}

/// `bpes_run_new` with natural units (hbar = mass = p = E = R = 1),
/// theta on [0, 1], default quadrature, literal chain rule.
///
/// # Safety
/// `out` must be a valid pointer to a `BpesRun*` slot.
#[no_mangle]
pub unsafe extern "C" fn bpes_run_default(n0: u32, out: *mut *mut BpesRun) -> BpesStatus {
    bpes_run_new(
        n0,
        1.0,
        1.0,
        1.0,
        1.0,
        1.0,
        1.0,
        0,
        0.0,
        1.0,
        BpesChainRule::Literal,
        out,
    )
}

/// Releases a run handle. Null is a no-op.
///
/// # Safety
/// `run` must have come from `bpes_run_new`/`bpes_run_default` and must not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bpes_run_free(run: *mut BpesRun) {
    if !run.is_null() {
        drop(unsafe { Box::from_raw(run) });
    }
}

/// Expansion order of the handle (0 for null).
///
/// # Safety
/// `run` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bpes_run_n0(run: *const BpesRun) -> u32 {
    match unsafe { run.as_ref() } {
        Some(r) => r.basis.n0() as u32,
        None => 0,
    }
}

/// Achieved residual functional Omega.
///
/// # Safety
/// `run` must be a live handle or null; `out` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn bpes_run_omega(run: *const BpesRun, out: *mut f64) -> BpesStatus {
    let (Some(r), Some(out)) = (unsafe { run.as_ref() }, unsafe { out.as_mut() }) else {
        set_last_error("null handle or output pointer");
        return BpesStatus::NullPointer;
    };
    *out = r.coeffs.omega;
    BpesStatus::Ok
}

/// Euclidean norm of the assembled residual row.
///
/// # Safety
/// `run` must be a live handle or null; `out` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn bpes_run_row_norm(run: *const BpesRun, out: *mut f64) -> BpesStatus {
    let (Some(r), Some(out)) = (unsafe { run.as_ref() }, unsafe { out.as_mut() }) else {
        set_last_error("null handle or output pointer");
        return BpesStatus::NullPointer;
    };
    *out = r.system.row_norm();
    BpesStatus::Ok
}

/// Copies the minimal positive roots mu_1..mu_n0 into `buf` (length must
/// equal n0).
///
/// # Safety
/// `run` must be a live handle or null; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bpes_run_roots(
    run: *const BpesRun,
    buf: *mut f64,
    len: usize,
) -> BpesStatus {
    let Some(r) = (unsafe { run.as_ref() }) else {
        set_last_error("null run handle");
        return BpesStatus::NullPointer;
    };
    copy_slice(r.basis.roots().mus(), buf, len)
}

/// Copies the per-root residuals |B_4k(mu_k)|.
///
/// # Safety
/// `run` must be a live handle or null; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bpes_run_root_residuals(
    run: *const BpesRun,
    buf: *mut f64,
    len: usize,
) -> BpesStatus {
    let Some(r) = (unsafe { run.as_ref() }) else {
        set_last_error("null run handle");
        return BpesStatus::NullPointer;
    };
    let residuals: Vec<f64> = (1..=r.basis.n0())
        .map(|k| r.basis.roots().residual(k))
        .collect();
    copy_slice(&residuals, buf, len)
}

/// Copies the solved unit-norm coefficients xi_1..xi_n0.
///
/// # Safety
/// `run` must be a live handle or null; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bpes_run_coefficients(
    run: *const BpesRun,
    buf: *mut f64,
    len: usize,
) -> BpesStatus {
    let Some(r) = (unsafe { run.as_ref() }) else {
        set_last_error("null run handle");
        return BpesStatus::NullPointer;
    };
    copy_slice(&r.coeffs.xi, buf, len)
}

/// Subnormalization constant H_n from the closed formula, for
/// n in 1..=n0.
///
/// # Safety
/// `run` must be a live handle or null; `out` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn bpes_run_subnorm_h(
    run: *const BpesRun,
    n: u32,
    out: *mut f64,
) -> BpesStatus {
    let (Some(r), Some(out)) = (unsafe { run.as_ref() }, unsafe { out.as_mut() }) else {
        set_last_error("null handle or output pointer");
        return BpesStatus::NullPointer;
    };
    match subnorm_h(n as usize, r.basis.roots()) {
        Ok(h) => {
            *out = h;
            BpesStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Reconstructs u and |u|^2 on an nx-by-nt grid over [0, R] x [0, t_m] and
/// writes a new field handle to `out`. When `normalize` is true the t = 0
/// density slice is rescaled to integrate to one.
///
/// # Safety
/// `run` must be a live handle or null; `out` must point to a `BpesField*`
/// slot.
#[no_mangle]
pub unsafe extern "C" fn bpes_run_reconstruct(
    run: *const BpesRun,
    nx: usize,
    nt: usize,
    normalize: bool,
    out: *mut *mut BpesField,
) -> BpesStatus {
    let Some(r) = (unsafe { run.as_ref() }) else {
        set_last_error("null run handle");
        return BpesStatus::NullPointer;
    };
    if out.is_null() {
        set_last_error("output handle slot is null");
        return BpesStatus::NullPointer;
    }
    if nx < 2 || nt < 2 {
        set_last_error("grid needs at least 2 points per axis");
        return BpesStatus::InvalidArgument;
    }
    guard(|| {
        let xs = bpes_core::model::linspace(0.0, r.params.radius(), nx);
        let ts = bpes_core::model::linspace(0.0, bpes_core::t_max(&r.params), nt);
        let mut field = match reconstruct(&r.coeffs, &r.basis, &r.params, &xs, &ts) {
            Ok(f) => f,
            Err(e) => return fail_with(e),
        };
        let scale = if normalize {
            match normalize_probability(&mut field) {
                Ok(s) => s,
                Err(e) => return fail_with(e),
            }
        } else {
            1.0
        };
        unsafe { *out = Box::into_raw(Box::new(BpesField { field, scale })) };
        BpesStatus::Ok
    })
}

/// Releases a field handle. Null is a no-op.
///
/// # Safety
/// `field` must have come from `bpes_run_reconstruct` and must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn bpes_field_free(field: *mut BpesField) {
    if !field.is_null() {
        drop(unsafe { Box::from_raw(field) });
    }
}

/// Number of x grid points (0 for null).
///
/// # Safety
/// `field` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bpes_field_nx(field: *const BpesField) -> usize {
    unsafe { field.as_ref() }.map_or(0, |f| f.field.nx())
}

/// Number of t grid points (0 for null).
///
/// # Safety
/// `field` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bpes_field_nt(field: *const BpesField) -> usize {
    unsafe { field.as_ref() }.map_or(0, |f| f.field.nt())
}

/// Normalization factor that was applied to the field.
///
/// # Safety
/// `field` must be a live handle or null; `out` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn bpes_field_scale(field: *const BpesField, out: *mut f64) -> BpesStatus {
    let (Some(f), Some(out)) = (unsafe { field.as_ref() }, unsafe { out.as_mut() }) else {
        set_last_error("null handle or output pointer");
        return BpesStatus::NullPointer;
    };
    *out = f.scale;
    BpesStatus::Ok
}

/// Copies the x grid (length must equal nx).
///
/// # Safety
/// `field` must be a live handle or null; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bpes_field_x_grid(
    field: *const BpesField,
    buf: *mut f64,
    len: usize,
) -> BpesStatus {
    let Some(f) = (unsafe { field.as_ref() }) else {
        set_last_error("null field handle");
        return BpesStatus::NullPointer;
    };
    copy_slice(f.field.x_grid(), buf, len)
}

/// Copies the t grid (length must equal nt).
///
/// # Safety
/// `field` must be a live handle or null; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bpes_field_t_grid(
    field: *const BpesField,
    buf: *mut f64,
    len: usize,
) -> BpesStatus {
    let Some(f) = (unsafe { field.as_ref() }) else {
        set_last_error("null field handle");
        return BpesStatus::NullPointer;
    };
    copy_slice(f.field.t_grid(), buf, len)
}

fn copy_field_component(
    field: *const BpesField,
    buf: *mut f64,
    len: usize,
    component: impl Fn(&BpesField, usize) -> f64,
) -> BpesStatus {
    let Some(f) = (unsafe { field.as_ref() }) else {
        set_last_error("null field handle");
        return BpesStatus::NullPointer;
    };
    let total = f.field.nx() * f.field.nt();
    if buf.is_null() {
        set_last_error("output buffer is null");
        return BpesStatus::NullPointer;
    }
    if len != total {
        set_last_error(format!("buffer holds {len} values, need {total}"));
        return BpesStatus::BufferTooSmall;
    }
    for idx in 0..total {
        unsafe { *buf.add(idx) = component(f, idx) };
    }
    BpesStatus::Ok
}

/// Copies Re(u), row-major with x as the slow axis (length nx*nt).
///
/// # Safety
/// `field` must be a live handle or null; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bpes_field_u_real(
    field: *const BpesField,
    buf: *mut f64,
    len: usize,
) -> BpesStatus {
    copy_field_component(field, buf, len, |f, i| f.field.u_data()[i].re)
}

/// Copies Im(u), row-major with x as the slow axis (length nx*nt).
///
/// # Safety
/// `field` must be a live handle or null; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bpes_field_u_imag(
    field: *const BpesField,
    buf: *mut f64,
    len: usize,
) -> BpesStatus {
    copy_field_component(field, buf, len, |f, i| f.field.u_data()[i].im)
}

/// Copies |u|^2, row-major with x as the slow axis (length nx*nt).
///
/// # Safety
/// `field` must be a live handle or null; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bpes_field_density(
    field: *const BpesField,
    buf: *mut f64,
    len: usize,
) -> BpesStatus {
    copy_field_component(field, buf, len, |f, i| f.field.density_data()[i])
}

/// Probability density at an arbitrary point: exactly zero outside [0, R],
/// the nearest grid sample inside.
///
/// # Safety
/// `field` must be a live handle or null; `out` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn bpes_field_density_at(
    field: *const BpesField,
    x: f64,
    t: f64,
    out: *mut f64,
) -> BpesStatus {
    let (Some(f), Some(out)) = (unsafe { field.as_ref() }, unsafe { out.as_mut() }) else {
        set_last_error("null handle or output pointer");
        return BpesStatus::NullPointer;
    };
    *out = f.field.density_at(x, t);
    BpesStatus::Ok
}
