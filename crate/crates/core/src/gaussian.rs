//! Pure Gaussian states of `N` oscillators, shift writes and conjugate QIC modes.
//!
//! Canonical variables are ordered `(q₁, p₁, …, q_N, p_N)` and the symplectic
//! form is `Ω = ⊕ [[0, 1], [−1, 0]]`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::Rng;

use crate::error::{QicError, Result};
use crate::linalg::{hermitian_eigen, CMatrix, C64};
use crate::random;

/// Accepted deviation `‖MΩM − Ω/4‖_max` for states treated as pure.
pub const PURITY_TOL: f64 = 1e-8;
/// Accepted asymmetry of a covariance matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Accepted negativity of `M + iΩ/2`.
pub const UNCERTAINTY_TOL: f64 = 1e-9;
/// Floor on `vᵀMv` below which a mode has no usable variance.
pub const VARIANCE_FLOOR: f64 = 1e-14;
/// Below this `g` the entropy is set to its limit 0.
pub const ENTROPY_G_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    n_modes: usize,
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Self {
        let mut matrix = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        for n in 0..n_modes {
            matrix[(2 * n, 2 * n + 1)] = 1.0;
            matrix[(2 * n + 1, 2 * n)] = -1.0;
        }
        SymplecticForm { n_modes, matrix }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `Ω x` without forming the matrix.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        omega_times(x)
    }
}

pub fn omega_times(x: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(x.len());
    for n in 0..x.len() / 2 {
        out[2 * n] = x[2 * n + 1];
        out[2 * n + 1] = -x[2 * n];
    }
    out
}

/// `aᵀ Ω b`.
pub fn symplectic_product(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.dot(&omega_times(b))
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// First moments and covariance matrix `M = Re⟨R̂ R̂ᵀ⟩` of a Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
}

impl GaussianState {
    /// Validates shape, symmetry and the uncertainty relation.
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || dim % 2 != 0 {
            return Err(QicError::InvalidDimension(format!(
                "first-moment vector must have even positive length, got {dim}"
            )));
        }
        if covariance.shape() != (dim, dim) {
            return Err(QicError::DimensionMismatch {
                expected: dim,
                found: covariance.nrows(),
            });
        }
        let state = GaussianState { mean, covariance };
        let residual = state.symmetry_residual();
        if residual >= SYMMETRY_TOL {
            return Err(QicError::AsymmetricCovariance { residual });
        }
        let min_eigenvalue = state.uncertainty_min_eigenvalue();
        if min_eigenvalue < -UNCERTAINTY_TOL {
            return Err(QicError::Uncertainty { min_eigenvalue });
        }
        Ok(state)
    }

    /// As [`GaussianState::new`], additionally requiring `MΩM = Ω/4`.
    pub fn new_pure(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let state = Self::new(mean, covariance)?;
        state.require_pure()?;
        Ok(state)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        GaussianState {
            mean: DVector::zeros(2 * n_modes),
            covariance: DMatrix::identity(2 * n_modes, 2 * n_modes).scale(0.5),
        }
    }

    /// Single-mode squeezed vacuum, `M = diag(e^{2r}, e^{−2r})/2`.
    pub fn squeezed(r: f64) -> Self {
        let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![
            0.5 * (2.0 * r).exp(),
            0.5 * (-2.0 * r).exp(),
        ]));
        GaussianState {
            mean: DVector::zeros(2),
            covariance: cov,
        }
    }

    /// Two-mode squeezed vacuum with squeezing `r`.
    ///
    /// `⟨q₁q₂⟩ = sinh(2r)/2` and `⟨p₁p₂⟩ = −sinh(2r)/2`; local variances are
    /// `cosh(2r)/2`.
    pub fn two_mode_squeezed(r: f64) -> Self {
        let c = 0.5 * (2.0 * r).cosh();
        let s = 0.5 * (2.0 * r).sinh();
        #[rustfmt::skip]
        let cov = DMatrix::from_row_slice(4, 4, &[
            c,   0.0, s,   0.0,
            0.0, c,   0.0, -s,
            s,   0.0, c,   0.0,
            0.0, -s,  0.0, c,
        ]);
        GaussianState {
            mean: DVector::zeros(4),
            covariance: cov,
        }
    }

    /// `M = SᵀS/2` for a symplectic `S`, mean zero.
    pub fn from_symplectic(s: &DMatrix<f64>) -> Result<Self> {
        let m = (s.transpose() * s).scale(0.5);
        let m = (&m + m.transpose()).scale(0.5);
        Self::new(DVector::zeros(s.nrows()), m)
    }

    /// Random pure state from `S = exp(ΩH)` with `H` symmetric, entries uniform
    /// in `[−1, 1]`, and `ΩH` rescaled to spectral norm at most 2.
    pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, n_modes: usize) -> Result<Self> {
        let s = random_symplectic(rng, n_modes);
        Self::from_symplectic(&s)
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn with_mean(&self, mean: DVector<f64>) -> Result<Self> {
        if mean.len() != self.mean.len() {
            return Err(QicError::DimensionMismatch {
                expected: self.mean.len(),
                found: mean.len(),
            });
        }
        Ok(GaussianState {
            mean,
            covariance: self.covariance.clone(),
        })
    }

    pub fn symmetry_residual(&self) -> f64 {
        max_abs(&(&self.covariance - self.covariance.transpose()))
    }

    /// `‖MΩM − Ω/4‖_max`.
    pub fn purity_residual(&self) -> f64 {
        purity_residual(&self.covariance)
    }

    /// Smallest eigenvalue of `M + iΩ/2`.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        let omega = SymplecticForm::new(self.n_modes());
        let h = CMatrix::from_fn(self.mean.len(), self.mean.len(), |i, j| {
            C64::new(self.covariance[(i, j)], 0.5 * omega.matrix()[(i, j)])
        });
        hermitian_eigen(&h).0[0]
    }

    pub fn is_pure(&self) -> bool {
        self.purity_residual() < PURITY_TOL
    }

    pub fn require_pure(&self) -> Result<()> {
        let residual = self.purity_residual();
        if residual >= PURITY_TOL {
            return Err(QicError::ImpureState { residual });
        }
        Ok(())
    }

    /// `vᵀ M w`.
    pub fn covariance_form(&self, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        v.dot(&(&self.covariance * w))
    }

    fn check_vector(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.mean.len() {
            return Err(QicError::DimensionMismatch {
                expected: self.mean.len(),
                found: v.len(),
            });
        }
        Ok(())
    }
}

/// `‖MΩM − Ω/4‖_max` for a raw covariance matrix.
pub fn purity_residual(covariance: &DMatrix<f64>) -> f64 {
    let omega = SymplecticForm::new(covariance.nrows() / 2);
    let lhs = covariance * omega.matrix() * covariance;
    max_abs(&(lhs - omega.matrix().scale(0.25)))
}

/// Random symplectic matrix `exp(ΩH)`; see [`GaussianState::random_pure`].
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, n_modes: usize) -> DMatrix<f64> {
    let dim = 2 * n_modes;
    let raw = random::uniform_matrix(rng, dim, dim);
    let h = (&raw + raw.transpose()).scale(0.5);
    let omega = SymplecticForm::new(n_modes);
    let mut generator = omega.matrix() * h;
    let spectral = generator
        .clone()
        .singular_values()
        .iter()
        .fold(0.0f64, |a, &b| a.max(b));
    if spectral > 2.0 {
        generator.scale_mut(2.0 / spectral);
    }
    generator.exp()
}

/// Weighting vectors of a mode: `Q̂ = vᵀR̂`, `P̂ = uᵀR̂` with the first-moment
/// offsets `vᵀ⟨r̂⟩`, `uᵀ⟨r̂⟩` kept explicit.
#[derive(Debug, Clone, PartialEq)]
pub struct ModePair {
    pub v: DVector<f64>,
    pub u: DVector<f64>,
    pub q_offset: f64,
    pub p_offset: f64,
}

impl ModePair {
    /// Requires `vᵀΩu = 1` to within `1e-10`.
    pub fn new(v: DVector<f64>, u: DVector<f64>, q_offset: f64, p_offset: f64) -> Result<Self> {
        if v.len() != u.len() || v.len() % 2 != 0 {
            return Err(QicError::DimensionMismatch {
                expected: v.len(),
                found: u.len(),
            });
        }
        let pairing = symplectic_product(&v, &u);
        if (pairing - 1.0).abs() > 1e-10 {
            return Err(QicError::Precondition(format!(
                "mode pair must satisfy v^T Omega u = 1, got {pairing}"
            )));
        }
        Ok(ModePair {
            v,
            u,
            q_offset,
            p_offset,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.v.len() / 2
    }

    /// `vᵀΩu`, equal to 1 for canonical pairs.
    pub fn pairing(&self) -> f64 {
        symplectic_product(&self.v, &self.u)
    }
}

/// Covariance matrix `m` of a single mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCovariance {
    pub matrix: Matrix2<f64>,
}

impl ModeCovariance {
    pub fn new(matrix: Matrix2<f64>) -> Self {
        ModeCovariance { matrix }
    }

    pub fn det(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn off_diagonal(&self) -> f64 {
        self.matrix[(0, 1)]
    }

    /// `g = √(4 det m − 1)`, clamped at zero.
    pub fn g(&self) -> f64 {
        (4.0 * self.det() - 1.0).max(0.0).sqrt()
    }
}

/// The conjugate QIC vector `u = −Ω M v / (vᵀMv)`.
pub fn conjugate_qic_vector(v: &DVector<f64>, state: &GaussianState) -> Result<ModePair> {
    state.check_vector(v)?;
    state.require_pure()?;
    let mv = state.covariance() * v;
    let variance = v.dot(&mv);
    if variance <= VARIANCE_FLOOR {
        return Err(QicError::DegenerateVariance { variance });
    }
    let u = -omega_times(&mv) / variance;
    Ok(ModePair {
        q_offset: v.dot(state.mean()),
        p_offset: u.dot(state.mean()),
        v: v.clone(),
        u,
    })
}

pub fn mode_covariance(pair: &ModePair, state: &GaussianState) -> ModeCovariance {
    let vv = state.covariance_form(&pair.v, &pair.v);
    let vu = state.covariance_form(&pair.v, &pair.u);
    let uv = state.covariance_form(&pair.u, &pair.v);
    let uu = state.covariance_form(&pair.u, &pair.u);
    ModeCovariance::new(Matrix2::new(vv, 0.5 * (vu + uv), 0.5 * (vu + uv), uu))
}

/// Entanglement entropy of a mode with its complement as a function of
/// `g = √(4 det m − 1)`.
pub fn entropy_from_g(g: f64) -> f64 {
    if g < ENTROPY_G_FLOOR {
        return 0.0;
    }
    // √(1+g²)·ln((√(1+g²)+1)/g) + ln(g/2) rewritten with x = ν − ½, where
    // ν = √(1+g²)/2; the direct form cancels catastrophically for small g
    let root = (1.0 + g * g).sqrt();
    let x = g * g / (2.0 * (root + 1.0));
    ((1.0 + x) * x.ln_1p() - x * x.ln()).max(0.0)
}

pub fn mode_entropy(m: &ModeCovariance) -> Result<f64> {
    let det = m.det();
    if det < 0.25 - 1e-10 {
        return Err(QicError::UnphysicalMode { det });
    }
    Ok(entropy_from_g(m.g()))
}

/// Shift write: `⟨r̂⟩ ↦ ⟨r̂⟩ + θΩv`, covariance unchanged.
pub fn apply_shift_write(
    state: &GaussianState,
    v: &DVector<f64>,
    theta: f64,
) -> Result<GaussianState> {
    state.check_vector(v)?;
    state.with_mean(state.mean() + omega_times(v).scale(theta))
}

/// Commutation and independence of a family of shift writes.
#[derive(Debug, Clone)]
pub struct MultiParamReport {
    /// `v_iᵀ Ω v_j`.
    pub symplectic: DMatrix<f64>,
    /// `v_iᵀ M v_j`.
    pub covariance: DMatrix<f64>,
    pub commuting: bool,
    pub independent: bool,
    /// Conjugate vectors `u_i`, present when the family is independent.
    pub conjugates: Option<Vec<DVector<f64>>>,
    /// `v_iᵀ Ω u_j`, present when the family is independent.
    pub cross_pairing: Option<DMatrix<f64>>,
}

impl MultiParamReport {
    /// First `(i, j)`, `i < j`, whose writes fail to commute.
    pub fn first_non_commuting(&self) -> Option<(usize, usize)> {
        first_offending(&self.symplectic)
    }

    pub fn first_dependent(&self) -> Option<(usize, usize)> {
        first_offending(&self.covariance)
    }

    /// `max |v_iᵀΩu_j − δ_ij|`, when conjugates were built.
    pub fn cross_pairing_residual(&self) -> Option<f64> {
        self.cross_pairing.as_ref().map(|c| {
            let k = c.nrows();
            max_abs(&(c - DMatrix::identity(k, k)))
        })
    }
}

fn first_offending(m: &DMatrix<f64>) -> Option<(usize, usize)> {
    let k = m.nrows();
    (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .find(|&(i, j)| m[(i, j)].abs() >= 1e-10)
}

pub fn multiparam_conditions(
    vectors: &[DVector<f64>],
    state: &GaussianState,
) -> Result<MultiParamReport> {
    if vectors.is_empty() {
        return Err(QicError::Precondition(
            "at least one weighting vector is required".into(),
        ));
    }
    for v in vectors {
        state.check_vector(v)?;
    }
    let k = vectors.len();
    let symplectic = DMatrix::from_fn(k, k, |i, j| symplectic_product(&vectors[i], &vectors[j]));
    let covariance =
        DMatrix::from_fn(k, k, |i, j| state.covariance_form(&vectors[i], &vectors[j]));
    let commuting = first_offending(&symplectic).is_none();
    let independent = first_offending(&covariance).is_none();
    let (conjugates, cross_pairing) = if independent {
        let mut us = Vec::with_capacity(k);
        for v in vectors {
            let variance = state.covariance_form(v, v);
            if variance <= VARIANCE_FLOOR {
                return Err(QicError::DegenerateVariance { variance });
            }
            us.push(-omega_times(&(state.covariance() * v)) / variance);
        }
        let cross = DMatrix::from_fn(k, k, |i, j| symplectic_product(&vectors[i], &us[j]));
        (Some(us), Some(cross))
    } else {
        (None, None)
    };
    Ok(MultiParamReport {
        symplectic,
        covariance,
        commuting,
        independent,
        conjugates,
        cross_pairing,
    })
}

/// `diag(4 v_iᵀ M v_i)` for a commuting, independent family of shift writes.
pub fn shift_fisher_matrix(
    vectors: &[DVector<f64>],
    state: &GaussianState,
) -> Result<DMatrix<f64>> {
    let report = multiparam_conditions(vectors, state)?;
    if let Some((i, j)) = report.first_non_commuting() {
        return Err(QicError::Precondition(format!(
            "writes {i} and {j} do not commute (v^T Omega v' = {:e})",
            report.symplectic[(i, j)]
        )));
    }
    if let Some((i, j)) = report.first_dependent() {
        return Err(QicError::Precondition(format!(
            "writes {i} and {j} are not independent (v^T M v' = {:e})",
            report.covariance[(i, j)]
        )));
    }
    let diag = DVector::from_iterator(
        vectors.len(),
        (0..vectors.len()).map(|i| 4.0 * report.covariance[(i, i)]),
    );
    Ok(DMatrix::from_diagonal(&diag))
}

/// Random `δ` with `vᵀΩδ = 0` and `vᵀMδ = 0`, scaled to unit norm.
///
/// Adding such a `δ` to the conjugate vector keeps both conditions on the pair
/// and can only raise `det m`.
pub fn admissible_perturbation<R: Rng + ?Sized>(
    rng: &mut R,
    v: &DVector<f64>,
    state: &GaussianState,
) -> Result<DVector<f64>> {
    state.check_vector(v)?;
    let dim = v.len();
    if dim < 4 {
        return Err(QicError::Precondition(
            "a single mode admits no nonzero perturbation".into(),
        ));
    }
    let mut constraints: Vec<DVector<f64>> = Vec::with_capacity(2);
    for c in [omega_times(v), state.covariance() * v] {
        let mut w = c;
        for e in &constraints {
            w -= e * e.dot(&w);
        }
        let norm = w.norm();
        if norm > 1e-12 {
            constraints.push(w / norm);
        }
    }
    loop {
        let mut delta = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..=1.0));
        for _ in 0..2 {
            for e in &constraints {
                delta -= e * e.dot(&delta);
            }
        }
        let norm = delta.norm();
        if norm > 1e-6 {
            return Ok(delta / norm);
        }
    }
}

/// Additive shifts of `(Q̂₁, P̂₁)` caused by a second write `Ŵ₂(θ₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QicDrift {
    /// `|θ₂ v₁ᵀΩv₂|`.
    pub q_drift: f64,
    /// `|θ₂ v₁ᵀMv₂ / (v₁ᵀMv₁)|`.
    pub p_drift: f64,
}

impl QicDrift {
    pub fn max(&self) -> f64 {
        self.q_drift.max(self.p_drift)
    }
}

pub fn qic_invariance_under_other_writes(
    pair: &ModePair,
    v2: &DVector<f64>,
    theta2: f64,
    state: &GaussianState,
) -> Result<QicDrift> {
    state.check_vector(&pair.v)?;
    state.check_vector(v2)?;
    let variance = state.covariance_form(&pair.v, &pair.v);
    if variance <= VARIANCE_FLOOR {
        return Err(QicError::DegenerateVariance { variance });
    }
    Ok(QicDrift {
        q_drift: (theta2 * symplectic_product(&pair.v, v2)).abs(),
        p_drift: (theta2 * state.covariance_form(&pair.v, v2) / variance).abs(),
    })
}

/// Bilinear coupling `exp(i·strength·(Q̂ p̂_ext − P̂ q̂_ext))` that swaps a mode
/// with an external oscillator. Only the descriptor is exported.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapCoupling {
    pub pair: ModePair,
    pub strength: f64,
}

pub fn cv_swap_generator(pair: &ModePair) -> SwapCoupling {
    SwapCoupling {
        pair: pair.clone(),
        strength: FRAC_PI_2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng_from_seed;

    fn vec(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    #[test]
    fn symplectic_form_properties() {
        let omega = SymplecticForm::new(3);
        let m = omega.matrix();
        assert_eq!(max_abs(&(m + m.transpose())), 0.0);
        assert_eq!(max_abs(&(m * m + DMatrix::identity(6, 6))), 0.0);
        let x = vec(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(omega.apply(&x), m * &x);
    }

    #[test]
    fn vacuum_conjugate_is_momentum() {
        let pair = conjugate_qic_vector(&vec(&[1.0, 0.0]), &GaussianState::vacuum(1)).unwrap();
        assert!((pair.u.clone() - vec(&[0.0, 1.0])).norm() < 1e-15);
        let m = mode_covariance(&pair, &GaussianState::vacuum(1));
        assert!((m.matrix - Matrix2::identity().scale(0.5)).abs().max() < 1e-15);
        assert_eq!(mode_entropy(&m).unwrap(), 0.0);
    }

    #[test]
    fn squeezed_conjugate_ignores_squeezing() {
        for r in [0.3, -0.8, 1.5] {
            let state = GaussianState::squeezed(r);
            let pair = conjugate_qic_vector(&vec(&[1.0, 0.0]), &state).unwrap();
            assert!((pair.u.clone() - vec(&[0.0, 1.0])).norm() < 1e-14);
            assert!((mode_covariance(&pair, &state).det() - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn two_mode_squeezed_conjugate_spreads() {
        let state = GaussianState::two_mode_squeezed(0.6);
        assert!(state.purity_residual() < 1e-14);
        let pair = conjugate_qic_vector(&vec(&[1.0, 0.0, 0.0, 0.0]), &state).unwrap();
        assert!(pair.u[1].abs() > 1e-3 && pair.u[3].abs() > 1e-3);
        let m = mode_covariance(&pair, &state);
        assert!((m.det() - 0.25).abs() < 1e-10);
        assert!(m.off_diagonal().abs() < 1e-10);
        assert!((pair.pairing() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conjugate_vector_errors() {
        let state = GaussianState::vacuum(2);
        assert!(matches!(
            conjugate_qic_vector(&vec(&[0.0; 4]), &state),
            Err(QicError::DegenerateVariance { .. })
        ));
        let mixed = GaussianState::new(
            DVector::zeros(2),
            DMatrix::identity(2, 2).scale(1.0),
        )
        .unwrap();
        assert!(matches!(
            conjugate_qic_vector(&vec(&[1.0, 0.0]), &mixed),
            Err(QicError::ImpureState { .. })
        ));
        assert!(matches!(
            conjugate_qic_vector(&vec(&[1.0, 0.0]), &state),
            Err(QicError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn state_validation() {
        let mut cov = DMatrix::identity(2, 2).scale(0.5);
        cov[(0, 1)] = 1e-3;
        assert!(matches!(
            GaussianState::new(DVector::zeros(2), cov),
            Err(QicError::AsymmetricCovariance { .. })
        ));
        let tight = DMatrix::identity(2, 2).scale(0.3);
        assert!(matches!(
            GaussianState::new(DVector::zeros(2), tight),
            Err(QicError::Uncertainty { .. })
        ));
    }

    #[test]
    fn random_pure_states_satisfy_purity_relation() {
        let mut rng = rng_from_seed(17);
        for n in 1..=8 {
            let state = GaussianState::random_pure(&mut rng, n).unwrap();
            assert!(state.purity_residual() < 1e-8, "n={n}");
            assert!(state.uncertainty_min_eigenvalue() > -1e-9);
        }
    }

    #[test]
    fn mode_covariance_of_random_vector_obeys_uncertainty() {
        let mut rng = rng_from_seed(3);
        let state = GaussianState::random_pure(&mut rng, 4).unwrap();
        let v = DVector::from_fn(8, |_, _| rng.gen_range(-1.0..1.0));
        let u = DVector::from_fn(8, |_, _| rng.gen_range(-1.0..1.0));
        let scale = symplectic_product(&v, &u);
        let pair = ModePair::new(v, u / scale, 0.0, 0.0).unwrap();
        assert!(mode_covariance(&pair, &state).det() >= 0.25 - 1e-10);
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy_from_g(0.0), 0.0);
        // high-precision reference for g = 1
        assert!((entropy_from_g(1.0) - 0.553_303_299_720_515_7).abs() < 1e-12);
        let m = ModeCovariance::new(Matrix2::new(0.5, 0.0, 0.0, 1.0));
        assert!((mode_entropy(&m).unwrap() - entropy_from_g(1.0)).abs() < 1e-15);
        let bad = ModeCovariance::new(Matrix2::new(0.2, 0.0, 0.0, 1.0));
        assert!(matches!(mode_entropy(&bad), Err(QicError::UnphysicalMode { .. })));
    }

    #[test]
    fn entropy_matches_direct_closed_form() {
        for g in [0.05f64, 0.3, 1.0, 3.0, 10.0, 100.0] {
            let root = (1.0 + g * g).sqrt();
            let direct = root * ((root + 1.0) / g).ln() + (g / 2.0).ln();
            assert!((entropy_from_g(g) - direct).abs() < 1e-13 * (1.0 + direct), "g={g}");
        }
    }

    #[test]
    fn entropy_monotone_down_to_floor() {
        let grid: Vec<f64> = (0..=400).map(|i| 1e-8 * 1e9f64.powf(i as f64 / 400.0)).collect();
        for w in grid.windows(2) {
            assert!(entropy_from_g(w[1]) > entropy_from_g(w[0]), "g={}", w[0]);
        }
    }

    #[test]
    fn entropy_agrees_with_symplectic_eigenvalue_form() {
        for g in [1e-3f64, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let nu = (1.0 + g * g).sqrt() / 2.0;
            let reference = (nu + 0.5) * (nu + 0.5).ln() - (nu - 0.5) * (nu - 0.5).ln();
            assert!((entropy_from_g(g) - reference).abs() < 1e-12, "g={g}");
        }
    }

    #[test]
    fn shift_write_moves_mean_only() {
        let state = GaussianState::vacuum(1);
        let same = apply_shift_write(&state, &vec(&[1.0, 0.0]), 0.0).unwrap();
        assert_eq!(same, state);
        let moved = apply_shift_write(&state, &vec(&[1.0, 0.0]), 1.0).unwrap();
        assert_eq!(moved.mean(), &vec(&[0.0, -1.0]));
        assert_eq!(moved.covariance(), state.covariance());
    }

    #[test]
    fn multiparam_classification() {
        let vac = GaussianState::vacuum(2);
        let vs = [vec(&[1.0, 0.0, 0.0, 0.0]), vec(&[0.0, 0.0, 1.0, 0.0])];
        let report = multiparam_conditions(&vs, &vac).unwrap();
        assert!(report.commuting && report.independent);
        assert!(report.cross_pairing_residual().unwrap() < 1e-12);

        let single = GaussianState::vacuum(1);
        let report =
            multiparam_conditions(&[vec(&[1.0, 0.0]), vec(&[0.0, 1.0])], &single).unwrap();
        assert!(!report.commuting);
        assert_eq!(report.first_non_commuting(), Some((0, 1)));

        let tms = GaussianState::two_mode_squeezed(0.5);
        let report = multiparam_conditions(&vs, &tms).unwrap();
        assert!(report.commuting && !report.independent);
        assert!(report.conjugates.is_none());
    }

    #[test]
    fn shift_fisher_examples() {
        let vac = GaussianState::vacuum(1);
        let f = shift_fisher_matrix(&[vec(&[1.0, 0.0])], &vac).unwrap();
        assert!((f[(0, 0)] - 2.0).abs() < 1e-15);
        let f3 = shift_fisher_matrix(&[vec(&[3.0, 0.0])], &vac).unwrap();
        assert!((f3[(0, 0)] - 18.0).abs() < 1e-12);
        let tms = GaussianState::two_mode_squeezed(0.5);
        let vs = [vec(&[1.0, 0.0, 0.0, 0.0]), vec(&[0.0, 0.0, 1.0, 0.0])];
        assert!(matches!(
            shift_fisher_matrix(&vs, &tms),
            Err(QicError::Precondition(_))
        ));
    }

    #[test]
    fn drift_examples() {
        let state = GaussianState::two_mode_squeezed(0.4);
        let v = vec(&[1.0, 0.0, 0.0, 0.0]);
        let pair = conjugate_qic_vector(&v, &state).unwrap();
        let same = qic_invariance_under_other_writes(&pair, &v, 0.7, &state).unwrap();
        assert!(same.q_drift.abs() < 1e-15);
        assert!((same.p_drift - 0.7).abs() < 1e-14);
        let none = qic_invariance_under_other_writes(&pair, &v, 0.0, &state).unwrap();
        assert_eq!(none.max(), 0.0);
        let vac = GaussianState::vacuum(2);
        let pair = conjugate_qic_vector(&v, &vac).unwrap();
        let other = vec(&[0.0, 0.0, 0.0, 1.0]);
        assert!(qic_invariance_under_other_writes(&pair, &other, 2.0, &vac).unwrap().max() < 1e-10);
    }

    #[test]
    fn swap_descriptor() {
        let pair = conjugate_qic_vector(&vec(&[1.0, 0.0]), &GaussianState::squeezed(0.9)).unwrap();
        let coupling = cv_swap_generator(&pair);
        assert_eq!(coupling.strength, FRAC_PI_2);
        assert!((coupling.pair.u.clone() - vec(&[0.0, 1.0])).norm() < 1e-14);
    }

    #[test]
    fn admissible_perturbations_raise_det() {
        let mut rng = rng_from_seed(23);
        for n in 2..=5 {
            let state = GaussianState::random_pure(&mut rng, n).unwrap();
            let v = DVector::from_fn(2 * n, |_, _| rng.gen_range(-1.0..1.0));
            let pair = conjugate_qic_vector(&v, &state).unwrap();
            let base = mode_covariance(&pair, &state).det();
            for _ in 0..20 {
                let delta = admissible_perturbation(&mut rng, &v, &state).unwrap();
                assert!(symplectic_product(&v, &delta).abs() < 1e-12);
                assert!(state.covariance_form(&v, &delta).abs() < 1e-12);
                let moved = ModePair { u: &pair.u + &delta * 0.1, ..pair.clone() };
                assert!(mode_covariance(&moved, &state).det() > base);
            }
        }
        let single = GaussianState::vacuum(1);
        assert!(admissible_perturbation(&mut rng, &DVector::from_row_slice(&[1.0, 0.0]), &single).is_err());
    }
}
