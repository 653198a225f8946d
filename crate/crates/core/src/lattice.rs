//! Periodic lattice of `N` coupled oscillators (a discretized massive scalar
//! field in 1+1 dimensions).
//!
//! Sites are numbered `1..=N`. Canonical variables follow the Gaussian module:
//! `(q₁, p₁, …, q_N, p_N)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{QicError, Result};
use crate::gaussian::{self, conjugate_qic_vector, GaussianState, ModePair};
use crate::linalg::{identity, max_abs_diff, CMatrix, CVector, C64, I, ONE};

/// Accepted `‖A·A⁻¹ − I‖_max` for a mode matrix.
pub const INVERSE_TOL: f64 = 1e-10;
/// Beyond this inversion residual the mode matrix is rejected.
pub const ILL_CONDITIONED_TOL: f64 = 1e-8;
/// Accepted imaginary part left over after evolving a real weighting vector.
pub const IMAGINARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeConfig {
    n_sites: usize,
    eta: f64,
}

impl LatticeConfig {
    /// `eta = 1/(mε)²` must be positive and finite. A single site is allowed
    /// and reduces to one unit-frequency oscillator.
    pub fn new(n_sites: usize, eta: f64) -> Result<Self> {
        if n_sites == 0 {
            return Err(QicError::InvalidDimension(
                "lattice needs at least one site".into(),
            ));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(QicError::Precondition(format!(
                "eta must be positive and finite, got {eta}"
            )));
        }
        Ok(LatticeConfig { n_sites, eta })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n_sites {
            return Err(QicError::Precondition(format!(
                "site {site} outside 1..={}",
                self.n_sites
            )));
        }
        Ok(())
    }
}

/// `ω_k = √(1 + 2η(1 − cos(2πk/N)))` for `k = 1..=N` (index `k−1`).
pub fn dispersion(config: &LatticeConfig) -> Vec<f64> {
    let n = config.n_sites as f64;
    (1..=config.n_sites)
        .map(|k| {
            let c = (2.0 * PI * k as f64 / n).cos();
            (1.0 + 2.0 * config.eta * (1.0 - c)).sqrt()
        })
        .collect()
}

/// `f_k(n) = e^{2πikn/N}/√N`.
pub fn mode_function(k: usize, n: usize, n_sites: usize) -> C64 {
    let phase = 2.0 * PI * ((k * n) % n_sites) as f64 / n_sites as f64;
    C64::from_polar(1.0 / (n_sites as f64).sqrt(), phase)
}

/// The map `r̂ = A (â₁, â₁†, …, â_N, â_N†)ᵀ` and its inverse.
#[derive(Debug, Clone)]
pub struct ModeMatrix {
    config: LatticeConfig,
    a: CMatrix,
    a_inv: CMatrix,
    omegas: Vec<f64>,
    inverse_residual: f64,
}

impl ModeMatrix {
    pub fn new(config: &LatticeConfig) -> Result<Self> {
        let n = config.n_sites;
        let omegas = dispersion(config);
        let a = CMatrix::from_fn(2 * n, 2 * n, |row, col| {
            // 1-based a, b of the element table
            let (a_idx, b_idx) = (row + 1, col + 1);
            let site = a_idx.div_ceil(2);
            let k = b_idx.div_ceil(2);
            let w = omegas[k - 1];
            let f = mode_function(k, site, n);
            match (a_idx % 2 == 1, b_idx % 2 == 1) {
                (true, true) => f / (2.0 * w).sqrt(),
                (true, false) => f.conj() / (2.0 * w).sqrt(),
                (false, true) => -I * f * (w / 2.0).sqrt(),
                (false, false) => I * f.conj() * (w / 2.0).sqrt(),
            }
        });
        let a_inv = a.clone().try_inverse().ok_or(QicError::IllConditioned {
            residual: f64::INFINITY,
        })?;
        let residual = max_abs_diff(&(&a * &a_inv), &identity(2 * n));
        if residual > ILL_CONDITIONED_TOL {
            return Err(QicError::IllConditioned { residual });
        }
        Ok(ModeMatrix {
            config: *config,
            a,
            a_inv,
            omegas,
            inverse_residual: residual,
        })
    }

    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn a_inv(&self) -> &CMatrix {
        &self.a_inv
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// `‖A·A⁻¹ − I‖_max`.
    pub fn inverse_residual(&self) -> f64 {
        self.inverse_residual
    }

    /// `A diag(e^{iω_k t}, e^{−iω_k t}) A⁻¹`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        let mut scaled = self.a.clone();
        for (k, &w) in self.omegas.iter().enumerate() {
            let phase = C64::from_polar(1.0, w * t);
            let mut c = scaled.column_mut(2 * k);
            c *= phase;
            let mut c = scaled.column_mut(2 * k + 1);
            c *= phase.conj();
        }
        scaled * &self.a_inv
    }

    /// `max |Im(A x)|` over ladder vectors `x` with the pattern
    /// `(z₁, z̄₁, …, z_N, z̄_N)`; zero when `A` respects Hermiticity of `r̂`.
    pub fn reality_residual(&self, ladder: &[C64]) -> f64 {
        let x = CVector::from_iterator(
            2 * ladder.len(),
            ladder.iter().flat_map(|z| [*z, z.conj()]),
        );
        (&self.a * x).iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

/// Ground state of `Ĥ = Σ ω_k â_k†â_k` from the cosine mode sums.
pub fn vacuum_covariance(config: &LatticeConfig) -> GaussianState {
    let n = config.n_sites;
    let omegas = dispersion(config);
    let kernel = |diff: usize, weight: &dyn Fn(f64) -> f64| -> f64 {
        let s: f64 = omegas
            .iter()
            .enumerate()
            .map(|(k, &w)| {
                let arg = 2.0 * PI * (((k + 1) * diff) % n) as f64 / n as f64;
                arg.cos() * weight(w)
            })
            .sum();
        s / (2.0 * n as f64)
    };
    let qq: Vec<f64> = (0..n).map(|d| kernel(d, &|w| 1.0 / w)).collect();
    let pp: Vec<f64> = (0..n).map(|d| kernel(d, &|w| w)).collect();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let d = (i + n - j) % n;
            m[(2 * i, 2 * j)] = qq[d];
            m[(2 * i + 1, 2 * j + 1)] = pp[d];
        }
    }
    let m = (&m + m.transpose()).scale(0.5);
    GaussianState::new(DVector::zeros(2 * n), m)
        .expect("vacuum covariance is symmetric and physical by construction")
}

/// The same covariance assembled as `Re(A D Aᵀ)` with `D = ⊕ [[0, 1], [0, 0]]`
/// (only `⟨â â†⟩ = 1` survives in the vacuum).
pub fn vacuum_covariance_from_modes(mm: &ModeMatrix) -> DMatrix<f64> {
    let n = mm.config.n_sites;
    let mut d = CMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        d[(2 * k, 2 * k + 1)] = ONE;
    }
    let full = mm.a() * d * mm.a().transpose();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| full[(i, j)].re)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedPair {
    pub t: f64,
    pub v_t: DVector<f64>,
    pub u_t: DVector<f64>,
    /// Largest discarded imaginary part.
    pub imaginary_residue: f64,
}

impl EvolvedPair {
    pub fn pairing(&self) -> f64 {
        gaussian::symplectic_product(&self.v_t, &self.u_t)
    }

    pub fn as_mode_pair(&self) -> ModePair {
        ModePair {
            v: self.v_t.clone(),
            u: self.u_t.clone(),
            q_offset: 0.0,
            p_offset: 0.0,
        }
    }
}

/// `xᵀ A diag(e^{iω_k t}, e^{−iω_k t}) A⁻¹` for a real row vector `x`.
pub fn evolve_vector(x: &DVector<f64>, t: f64, mm: &ModeMatrix) -> Result<(DVector<f64>, f64)> {
    let dim = 2 * mm.config.n_sites;
    if x.len() != dim {
        return Err(QicError::DimensionMismatch {
            expected: dim,
            found: x.len(),
        });
    }
    if t == 0.0 {
        // all phases are 1 and A·A⁻¹ = I
        return Ok((x.clone(), 0.0));
    }
    let xc = CVector::from_iterator(dim, x.iter().map(|&r| C64::new(r, 0.0)));
    let mut row = mm.a().transpose() * xc;
    for (k, &w) in mm.omegas().iter().enumerate() {
        let phase = C64::from_polar(1.0, w * t);
        row[2 * k] *= phase;
        row[2 * k + 1] *= phase.conj();
    }
    let out = mm.a_inv().transpose() * row;
    let residue = out.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    Ok((DVector::from_iterator(dim, out.iter().map(|z| z.re)), residue))
}

pub fn evolve_pair(pair: &ModePair, t: f64, mm: &ModeMatrix) -> Result<EvolvedPair> {
    let (v_t, rv) = evolve_vector(&pair.v, t, mm)?;
    let (u_t, ru) = evolve_vector(&pair.u, t, mm)?;
    let residue = rv.max(ru);
    if residue >= IMAGINARY_TOL {
        return Err(QicError::NumericalFailure {
            what: "imaginary residue after evolution",
            residual: residue,
        });
    }
    let evolved = EvolvedPair {
        t,
        v_t,
        u_t,
        imaginary_residue: residue,
    };
    let drift = (evolved.pairing() - pair.pairing()).abs();
    if drift > 1e-9 {
        return Err(QicError::NumericalFailure {
            what: "symplectic pairing drift under evolution",
            residual: drift,
        });
    }
    Ok(evolved)
}

/// Unit vector selecting `q̂_site` (1-based).
pub fn site_q_vector(config: &LatticeConfig, site: usize) -> Result<DVector<f64>> {
    config.check_site(site)?;
    let mut v = DVector::zeros(2 * config.n_sites);
    v[2 * (site - 1)] = 1.0;
    Ok(v)
}

/// Per-site profile of `v(t)` and `u(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub site: usize,
    pub v_q: f64,
    pub v_p: f64,
    pub u_q: f64,
    pub u_p: f64,
}

#[derive(Debug, Clone)]
pub struct TimeSlice {
    pub t: f64,
    pub rows: Vec<ProfileRow>,
    pub pairing: f64,
    pub det_m: f64,
    pub imaginary_residue: f64,
}

impl TimeSlice {
    /// Number of sites where `|u_q|` or `|u_p|` exceeds `threshold`.
    pub fn u_support(&self, threshold: f64) -> usize {
        self.rows
            .iter()
            .filter(|r| r.u_q.abs() > threshold || r.u_p.abs() > threshold)
            .count()
    }

    pub fn weight_support(&self, threshold: f64) -> usize {
        self.rows
            .iter()
            .filter(|r| {
                [r.v_q, r.v_p, r.u_q, r.u_p]
                    .iter()
                    .any(|x| x.abs() > threshold)
            })
            .count()
    }

    /// Largest `|u|` component away from `site`.
    pub fn max_off_site_u(&self, site: usize) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.site != site)
            .map(|r| r.u_q.abs().max(r.u_p.abs()))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct FigureData {
    pub config: LatticeConfig,
    pub write_site: usize,
    pub omegas: Vec<f64>,
    pub inverse_residual: f64,
    pub vacuum_purity_residual: f64,
    pub slices: Vec<TimeSlice>,
}

/// Writes `q̂_site`, builds its conjugate QIC against the vacuum and evolves
/// the pair to each time.
pub fn figure_experiment(
    config: &LatticeConfig,
    write_site: usize,
    times: &[f64],
) -> Result<FigureData> {
    let v = site_q_vector(config, write_site)?;
    let mm = ModeMatrix::new(config)?;
    let vacuum = vacuum_covariance(config);
    let pair = conjugate_qic_vector(&v, &vacuum)?;
    let slices = times
        .iter()
        .map(|&t| {
            let ev = evolve_pair(&pair, t, &mm)?;
            let det_m = gaussian::mode_covariance(&ev.as_mode_pair(), &vacuum).det();
            let rows = (0..config.n_sites)
                .map(|i| ProfileRow {
                    site: i + 1,
                    v_q: ev.v_t[2 * i],
                    v_p: ev.v_t[2 * i + 1],
                    u_q: ev.u_t[2 * i],
                    u_p: ev.u_t[2 * i + 1],
                })
                .collect();
            Ok(TimeSlice {
                t,
                rows,
                pairing: ev.pairing(),
                det_m,
                imaginary_residue: ev.imaginary_residue,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FigureData {
        config: *config,
        write_site,
        omegas: mm.omegas().to_vec(),
        inverse_residual: mm.inverse_residual(),
        vacuum_purity_residual: vacuum.purity_residual(),
        slices,
    })
}
