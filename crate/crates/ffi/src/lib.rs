//! C ABI over `qic-core`.
//!
//! Every function returns a [`QicStatus`]; on failure a message is available
//! from [`qic_last_error`] on the same thread. Objects are opaque handles
//! created by `*_new`/`*_vacuum` and released with the matching `*_free`.
//! Complex arrays are interleaved `(re, im)` pairs of doubles. Matrices are
//! row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::{DMatrix, DVector};
use qic_core::algebra::{self, PureState, SuBasis};
use qic_core::gaussian::{self, GaussianState};
use qic_core::lattice::{self, LatticeConfig, ModeMatrix};
use qic_core::linalg::{identity, CMatrix, CVector, C64};
use qic_core::qudit::{self, WriteOperation};
use qic_core::QicError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QicStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvariantViolation = 3,
    NumericalFailure = 4,
    Panic = 5,
}

/// Opaque Gaussian state handle.
pub struct QicGaussianState {
    inner: GaussianState,
}

/// Opaque lattice handle: configuration plus its mode matrix.
pub struct QicLattice {
    config: LatticeConfig,
    modes: ModeMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &QicError) -> QicStatus {
    match e {
        QicError::InvalidDimension(_)
        | QicError::DimensionMismatch { .. }
        | QicError::InvalidUnitary { .. }
        | QicError::NotHermitian { .. }
        | QicError::NotNormalized { .. }
        | QicError::Precondition(_)
        | QicError::Parse { .. }
        | QicError::Io { .. } => QicStatus::InvalidArgument,
        QicError::IllConditioned { .. } | QicError::NumericalFailure { .. } => {
            QicStatus::NumericalFailure
        }
        _ => QicStatus::InvariantViolation,
    }
}

struct Failure(QicStatus, String);

impl From<QicError> for Failure {
    fn from(e: QicError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(QicStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(QicStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QicStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QicStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            QicStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn complex_vector(p: *const f64, len: usize, what: &str) -> Result<CVector, Failure> {
    let raw = slice(p, 2 * len, what)?;
    Ok(CVector::from_iterator(
        len,
        raw.chunks_exact(2).map(|c| C64::new(c[0], c[1])),
    ))
}

unsafe fn complex_matrix(p: *const f64, n: usize, what: &str) -> Result<CMatrix, Failure> {
    let v = complex_vector(p, n * n, what)?;
    Ok(CMatrix::from_row_slice(n, n, v.as_slice()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qic_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next call into the library from this thread.
#[no_mangle]
pub extern "C" fn qic_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Vacuum of `n_modes` oscillators.
///
/// # Safety
/// `out_state` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn qic_gaussian_vacuum(
    n_modes: usize,
    out_state: *mut *mut QicGaussianState,
) -> QicStatus {
    guard(|| {
        let slot = out(out_state, "out_state")?;
        if n_modes == 0 {
            return Err(invalid("n_modes must be positive"));
        }
        *slot = Box::into_raw(Box::new(QicGaussianState {
            inner: GaussianState::vacuum(n_modes),
        }));
        Ok(())
    })
}

/// State from a mean of length `2 n_modes` and a row-major covariance of
/// `(2 n_modes)²` entries. Symmetry and the uncertainty relation are checked.
///
/// # Safety
/// `mean` and `covariance` must point to arrays of the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn qic_gaussian_new(
    n_modes: usize,
    mean: *const f64,
    covariance: *const f64,
    out_state: *mut *mut QicGaussianState,
) -> QicStatus {
    guard(|| {
        let slot = out(out_state, "out_state")?;
        if n_modes == 0 {
            return Err(invalid("n_modes must be positive"));
        }
        let dim = 2 * n_modes;
        let m = slice(mean, dim, "mean")?;
        let c = slice(covariance, dim * dim, "covariance")?;
        let state = GaussianState::new(
            DVector::from_row_slice(m),
            DMatrix::from_row_slice(dim, dim, c),
        )?;
        *slot = Box::into_raw(Box::new(QicGaussianState { inner: state }));
        Ok(())
    })
}

/// # Safety
/// `state` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qic_gaussian_free(state: *mut QicGaussianState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle; `out_modes` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qic_gaussian_n_modes(
    state: *const QicGaussianState,
    out_modes: *mut usize,
) -> QicStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        *out(out_modes, "out_modes")? = s.inner.n_modes();
        Ok(())
    })
}

/// `max |MΩM − Ω/4|`.
///
/// # Safety
/// `state` must be a live handle; `out_residual` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qic_gaussian_purity_residual(
    state: *const QicGaussianState,
    out_residual: *mut f64,
) -> QicStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        *out(out_residual, "out_residual")? = s.inner.purity_residual();
        Ok(())
    })
}

/// Conjugate QIC vector `u = −ΩMv/(vᵀMv)`; `v` and `u_out` hold `len = 2N`
/// doubles. The state must be pure.
///
/// # Safety
/// Pointers must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qic_gaussian_conjugate(
    state: *const QicGaussianState,
    v: *const f64,
    len: usize,
    u_out: *mut f64,
) -> QicStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        let v = DVector::from_row_slice(slice(v, len, "v")?);
        let pair = gaussian::conjugate_qic_vector(&v, &s.inner)?;
        slice_mut(u_out, len, "u_out")?.copy_from_slice(pair.u.as_slice());
        Ok(())
    })
}

/// Determinant of the mode covariance of `(v, u(v))` and the mode's
/// entanglement entropy.
///
/// # Safety
/// `v` must be valid for `len` doubles; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qic_gaussian_mode_entropy(
    state: *const QicGaussianState,
    v: *const f64,
    len: usize,
    out_det: *mut f64,
    out_entropy: *mut f64,
) -> QicStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        let v = DVector::from_row_slice(slice(v, len, "v")?);
        let pair = gaussian::conjugate_qic_vector(&v, &s.inner)?;
        let m = gaussian::mode_covariance(&pair, &s.inner);
        let entropy = gaussian::mode_entropy(&m)?;
        *out(out_det, "out_det")? = m.det();
        *out(out_entropy, "out_entropy")? = entropy;
        Ok(())
    })
}

/// Entropy as a function of `g = √(4 det m − 1)`; negative `g` yields NaN.
#[no_mangle]
pub extern "C" fn qic_entropy_from_g(g: f64) -> f64 {
    if g.is_nan() || g < 0.0 {
        return f64::NAN;
    }
    gaussian::entropy_from_g(g)
}

/// # Safety
/// `out_lattice` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn qic_lattice_new(
    n_sites: usize,
    eta: f64,
    out_lattice: *mut *mut QicLattice,
) -> QicStatus {
    guard(|| {
        let slot = out(out_lattice, "out_lattice")?;
        let config = LatticeConfig::new(n_sites, eta)?;
        let modes = ModeMatrix::new(&config)?;
        *slot = Box::into_raw(Box::new(QicLattice { config, modes }));
        Ok(())
    })
}

/// # Safety
/// `lattice` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qic_lattice_free(lattice: *mut QicLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// Writes `ω_k`, `k = 1..N`, into `out_omegas` (length `N`).
///
/// # Safety
/// `out_omegas` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qic_lattice_dispersion(
    lattice: *const QicLattice,
    out_omegas: *mut f64,
    len: usize,
) -> QicStatus {
    guard(|| {
        let l = lattice.as_ref().ok_or_else(|| null("lattice"))?;
        if len != l.config.n_sites() {
            return Err(invalid(format!(
                "expected {} entries, got {len}",
                l.config.n_sites()
            )));
        }
        slice_mut(out_omegas, len, "out_omegas")?.copy_from_slice(l.modes.omegas());
        Ok(())
    })
}

/// Vacuum state of the lattice as a new Gaussian state handle.
///
/// # Safety
/// `lattice` must be live; `out_state` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn qic_lattice_vacuum(
    lattice: *const QicLattice,
    out_state: *mut *mut QicGaussianState,
) -> QicStatus {
    guard(|| {
        let l = lattice.as_ref().ok_or_else(|| null("lattice"))?;
        let slot = out(out_state, "out_state")?;
        *slot = Box::into_raw(Box::new(QicGaussianState {
            inner: lattice::vacuum_covariance(&l.config),
        }));
        Ok(())
    })
}

/// Evolves the weighting vectors `(v, u)` to time `t`. All arrays hold
/// `len = 2N` doubles.
///
/// # Safety
/// All pointers must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qic_lattice_evolve(
    lattice: *const QicLattice,
    v: *const f64,
    u: *const f64,
    len: usize,
    t: f64,
    v_out: *mut f64,
    u_out: *mut f64,
) -> QicStatus {
    guard(|| {
        let l = lattice.as_ref().ok_or_else(|| null("lattice"))?;
        let pair = gaussian::ModePair {
            v: DVector::from_row_slice(slice(v, len, "v")?),
            u: DVector::from_row_slice(slice(u, len, "u")?),
            q_offset: 0.0,
            p_offset: 0.0,
        };
        if !t.is_finite() {
            return Err(invalid("t must be finite"));
        }
        let ev = lattice::evolve_pair(&pair, t, &l.modes)?;
        slice_mut(v_out, len, "v_out")?.copy_from_slice(ev.v_t.as_slice());
        slice_mut(u_out, len, "u_out")?.copy_from_slice(ev.u_t.as_slice());
        Ok(())
    })
}

/// `max |SWAP − (1/d) Σ t_μ ⊗ t_μ|` for local dimension `d`.
///
/// # Safety
/// `out_residual` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qic_swap_identity_residual(d: usize, out_residual: *mut f64) -> QicStatus {
    guard(|| {
        let slot = out(out_residual, "out_residual")?;
        let basis = SuBasis::new(d)?;
        let swap = algebra::swap_operator(d)?;
        *slot = qic_core::linalg::max_abs_diff(&swap, &algebra::swap_from_generators(&basis));
        Ok(())
    })
}

unsafe fn qudit_inputs(
    d: usize,
    n: usize,
    state: *const f64,
    generator: *const f64,
    conjugator: *const f64,
) -> Result<(WriteOperation, PureState), Failure> {
    if d < 2 || n < 1 || n > 8 {
        return Err(invalid(format!("unsupported d={d}, N={n}")));
    }
    let dim = d
        .checked_pow(n as u32)
        .filter(|&x| x <= 4096)
        .ok_or_else(|| invalid("register too large"))?;
    let amps = complex_vector(state, dim, "state")?;
    let t = complex_matrix(generator, d, "generator")?;
    let u = if conjugator.is_null() {
        identity(dim)
    } else {
        complex_matrix(conjugator, dim, "conjugator")?
    };
    let write = WriteOperation::new(t, u, n)?;
    Ok((write, PureState::new(d, n, amps)?))
}

/// Builds a QIC for the write `(t̂, Û)` on a pure state and reports its purity.
///
/// `state` holds `d^N` interleaved complex amplitudes (first site most
/// significant), `generator` the `d × d` matrix `t̂` and `conjugator` the
/// `d^N × d^N` matrix `Û`, or NULL for the identity.
///
/// # Safety
/// Non-null pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn qic_construct_qic_purity(
    d: usize,
    n: usize,
    state: *const f64,
    generator: *const f64,
    conjugator: *const f64,
    out_purity: *mut f64,
) -> QicStatus {
    guard(|| {
        let slot = out(out_purity, "out_purity")?;
        let (write, psi) = qudit_inputs(d, n, state, generator, conjugator)?;
        *slot = qudit::construct_qic(&write, &psi)?.purity();
        Ok(())
    })
}

/// `F = 4⟨(ΔT̂)²⟩` for the write `(t̂, Û)`; arguments as in
/// [`qic_construct_qic_purity`].
///
/// # Safety
/// Non-null pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn qic_fisher_information(
    d: usize,
    n: usize,
    state: *const f64,
    generator: *const f64,
    conjugator: *const f64,
    out_fisher: *mut f64,
) -> QicStatus {
    guard(|| {
        let slot = out(out_fisher, "out_fisher")?;
        let (write, psi) = qudit_inputs(d, n, state, generator, conjugator)?;
        *slot = qudit::fisher_information(&write, &psi)?;
        Ok(())
    })
}
