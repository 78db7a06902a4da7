//! C ABI for the `qeci` library.
//!
//! Densities live behind an opaque [`QeciDensity`] handle that the caller
//! releases with [`qeci_density_free`]. Every function returns a
//! [`QeciStatus`]; on failure [`qeci_last_error`] yields the message for the
//! calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qeci::causal::{qeci_infer as infer, Direction};
use qeci::channels::{bitflip_entangled, depolarizing_mixture, qsc_computational, qsc_hadamard};
use qeci::coupling::{greedy_min_entropy_coupling, MarginalSet};
use qeci::{validate_density, Complex, ComplexMatrix, DensityMatrix, Error};

/// Result code of every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QeciStatus {
    Ok = 0,
    NullPointer = 1,
    DimensionMismatch = 2,
    NonFinite = 3,
    NotHermitian = 4,
    NotPsd = 5,
    TraceNotOne = 6,
    NotNormalized = 7,
    OutOfRange = 8,
    InvalidMarginals = 9,
    InvalidDistribution = 10,
    NoConvergence = 11,
    ZeroProbabilityCondition = 12,
    BufferTooSmall = 13,
    Panic = 14,
}

impl From<&Error> for QeciStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch(_) => QeciStatus::DimensionMismatch,
            Error::NonFinite { .. } => QeciStatus::NonFinite,
            Error::NotHermitian { .. } => QeciStatus::NotHermitian,
            Error::NotPsd { .. } => QeciStatus::NotPsd,
            Error::TraceNotOne { .. } => QeciStatus::TraceNotOne,
            Error::NotNormalized { .. } => QeciStatus::NotNormalized,
            Error::OutOfRange { .. } => QeciStatus::OutOfRange,
            Error::InvalidMarginals(_) => QeciStatus::InvalidMarginals,
            Error::InvalidDistribution(_) => QeciStatus::InvalidDistribution,
            Error::NoConvergence { .. } => QeciStatus::NoConvergence,
            Error::ZeroProbabilityCondition { .. } => QeciStatus::ZeroProbabilityCondition,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QeciDirection {
    AToB = 0,
    BToA = 1,
    Tie = 2,
}

/// Entropies in bits; `s_forward = s_cause_fwd + s_exo_fwd`, likewise backward.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QeciVerdict {
    pub direction: QeciDirection,
    pub s_forward: f64,
    pub s_backward: f64,
    pub s_cause_fwd: f64,
    pub s_exo_fwd: f64,
    pub s_cause_bwd: f64,
    pub s_exo_bwd: f64,
    /// Number of near-degenerate reduced spectra encountered.
    pub warning_count: u32,
}

/// Opaque validated bipartite density matrix.
pub struct QeciDensity {
    inner: DensityMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn fail(status: QeciStatus, msg: impl Into<String>) -> QeciStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> QeciStatus {
    let status = QeciStatus::from(&e);
    set_error(e.to_string());
    status
}

/// Runs `body`, converting panics into [`QeciStatus::Panic`].
fn guard(body: impl FnOnce() -> QeciStatus) -> QeciStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            fail(QeciStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn emit(rho: qeci::Result<DensityMatrix>, out: *mut *mut QeciDensity) -> QeciStatus {
    if out.is_null() {
        return fail(QeciStatus::NullPointer, "out is null");
    }
    match rho {
        Ok(inner) => {
            let handle = Box::into_raw(Box::new(QeciDensity { inner }));
            // SAFETY: `out` is non-null and the caller guarantees it is writable.
            unsafe { *out = handle };
            QeciStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Copies the message of the calling thread's last failure into `buf`
/// (NUL-terminated, truncated to `len`). Returns the full message length
/// excluding the terminator, or 0 when there is no error.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn qeci_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(msg) = slot.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            // SAFETY: `buf` holds `len` bytes and `n < len`.
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Validates a row-major `(dim_a·dim_b)²` matrix as a density on `[dim_a, dim_b]`.
/// `im` may be null for a real matrix.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `(dim_a·dim_b)²` doubles;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qeci_density_new(
    re: *const f64,
    im: *const f64,
    dim_a: usize,
    dim_b: usize,
    tol: f64,
    out: *mut *mut QeciDensity,
) -> QeciStatus {
    guard(|| {
        if re.is_null() {
            return fail(QeciStatus::NullPointer, "re is null");
        }
        let Some(n) = dim_a.checked_mul(dim_b).filter(|&n| n > 0) else {
            return fail(QeciStatus::DimensionMismatch, "dimensions must be positive");
        };
        let Some(len) = n.checked_mul(n) else {
            return fail(QeciStatus::DimensionMismatch, "dimensions overflow");
        };
        // SAFETY: the caller guarantees `len` readable doubles behind each pointer.
        let re = unsafe { std::slice::from_raw_parts(re, len) };
        let im = (!im.is_null()).then(|| unsafe { std::slice::from_raw_parts(im, len) });
        let data = (0..len)
            .map(|k| Complex::new(re[k], im.map_or(0.0, |v| v[k])))
            .collect();
        let rho = ComplexMatrix::new(n, n, data).and_then(|m| validate_density(m, &[dim_a, dim_b], tol));
        emit(rho, out)
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `rho` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qeci_density_free(rho: *mut QeciDensity) {
    if !rho.is_null() {
        // SAFETY: the handle came from `Box::into_raw` and is freed once.
        drop(unsafe { Box::from_raw(rho) });
    }
}

/// Writes the total dimension `dim_a·dim_b`.
///
/// # Safety
/// `rho` must be a live handle; `dim` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qeci_density_dim(rho: *const QeciDensity, dim: *mut usize) -> QeciStatus {
    guard(|| {
        // SAFETY: null-checked; liveness is the caller's contract.
        match (unsafe { rho.as_ref() }, dim.is_null()) {
            (Some(r), false) => {
                unsafe { *dim = r.inner.dim() };
                QeciStatus::Ok
            }
            _ => fail(QeciStatus::NullPointer, "null argument"),
        }
    })
}

/// Von Neumann entropy in bits.
///
/// # Safety
/// `rho` must be a live handle; `bits` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qeci_density_entropy(rho: *const QeciDensity, bits: *mut f64) -> QeciStatus {
    guard(|| {
        // SAFETY: null-checked; liveness is the caller's contract.
        match (unsafe { rho.as_ref() }, bits.is_null()) {
            (Some(r), false) => {
                unsafe { *bits = r.inner.entropy() };
                QeciStatus::Ok
            }
            _ => fail(QeciStatus::NullPointer, "null argument"),
        }
    })
}

/// Copies the validated matrix, row-major, into `re` and `im` (each `len` doubles;
/// `len` must be at least `dim²`). `im` may be null.
///
/// # Safety
/// `rho` must be a live handle; `re`/`im` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qeci_density_copy_matrix(
    rho: *const QeciDensity,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> QeciStatus {
    guard(|| {
        // SAFETY: null-checked; liveness is the caller's contract.
        let Some(r) = (unsafe { rho.as_ref() }) else {
            return fail(QeciStatus::NullPointer, "rho is null");
        };
        if re.is_null() {
            return fail(QeciStatus::NullPointer, "re is null");
        }
        let data = r.inner.matrix().as_slice();
        if len < data.len() {
            return fail(
                QeciStatus::BufferTooSmall,
                format!("need {} entries, got {len}", data.len()),
            );
        }
        for (k, z) in data.iter().enumerate() {
            // SAFETY: `k < data.len() <= len`.
            unsafe {
                *re.add(k) = z.re;
                if !im.is_null() {
                    *im.add(k) = z.im;
                }
            }
        }
        QeciStatus::Ok
    })
}

/// Quantum symmetric channel in the computational basis.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qeci_channel_qsc(q: f64, p: f64, out: *mut *mut QeciDensity) -> QeciStatus {
    guard(|| emit(qsc_computational(q, p), out))
}

/// Quantum symmetric channel in the Hadamard basis.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qeci_channel_gqsc(q: f64, p: f64, out: *mut *mut QeciDensity) -> QeciStatus {
    guard(|| emit(qsc_hadamard(q, p), out))
}

/// Mixture `q·ρ(γ₁, λ₁) + (1−q)·ρ(γ₂, λ₂)` of depolarized pure inputs.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qeci_channel_depolarizing(
    q: f64,
    gamma1: f64,
    lambda1: f64,
    gamma2: f64,
    lambda2: f64,
    p: f64,
    out: *mut *mut QeciDensity,
) -> QeciStatus {
    guard(|| emit(depolarizing_mixture(q, (gamma1, lambda1), (gamma2, lambda2), p), out))
}

/// Bell pair sent through a bit-flip channel with probability `p`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qeci_channel_bitflip(p: f64, out: *mut *mut QeciDensity) -> QeciStatus {
    guard(|| emit(bitflip_entangled(p), out))
}

/// Infers the causal direction between the two subsystems of `rho`.
///
/// # Safety
/// `rho` must be a live handle; `verdict` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qeci_infer(
    rho: *const QeciDensity,
    tie_tol: f64,
    verdict: *mut QeciVerdict,
) -> QeciStatus {
    guard(|| {
        // SAFETY: null-checked; liveness is the caller's contract.
        let Some(r) = (unsafe { rho.as_ref() }) else {
            return fail(QeciStatus::NullPointer, "rho is null");
        };
        if verdict.is_null() {
            return fail(QeciStatus::NullPointer, "verdict is null");
        }
        match infer(&r.inner, tie_tol) {
            Ok(v) => {
                let out = QeciVerdict {
                    direction: match v.direction {
                        Direction::AtoB => QeciDirection::AToB,
                        Direction::BtoA => QeciDirection::BToA,
                        Direction::Tie => QeciDirection::Tie,
                    },
                    s_forward: v.s_forward,
                    s_backward: v.s_backward,
                    s_cause_fwd: v.s_cause_fwd,
                    s_exo_fwd: v.s_exo_fwd,
                    s_cause_bwd: v.s_cause_bwd,
                    s_exo_bwd: v.s_exo_bwd,
                    warning_count: v.warnings.len() as u32,
                };
                // SAFETY: non-null and writable by contract.
                unsafe { *verdict = out };
                QeciStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Entropy in bits of the greedy minimum-entropy coupling of `n_rows`
/// probability rows of `width` entries each, stored contiguously.
///
/// # Safety
/// `rows` must point to `n_rows·width` doubles; `bits` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qeci_coupling_entropy(
    rows: *const f64,
    n_rows: usize,
    width: usize,
    bits: *mut f64,
) -> QeciStatus {
    guard(|| {
        if rows.is_null() || bits.is_null() {
            return fail(QeciStatus::NullPointer, "null argument");
        }
        let Some(len) = n_rows.checked_mul(width) else {
            return fail(QeciStatus::DimensionMismatch, "size overflow");
        };
        // SAFETY: the caller guarantees `len` readable doubles.
        let flat = unsafe { std::slice::from_raw_parts(rows, len) };
        let rows = if width == 0 { Vec::new() } else { flat.chunks(width).map(<[f64]>::to_vec).collect() };
        match MarginalSet::new(rows) {
            Ok(set) => {
                // SAFETY: non-null and writable by contract.
                unsafe { *bits = greedy_min_entropy_coupling(&set).entropy_bits };
                QeciStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
