//! Finite-dimensional operator algebra for qudit registers.
//!
//! Amplitudes of an `N`-site register are stored with the first site as the
//! most significant index, so `|i₁ i₂ … i_N⟩` lives at
//! `i₁·d^{N−1} + … + i_N`.

use crate::error::{QicError, Result};
use crate::linalg::{
    self, first_site_matrix, hermiticity_residual, identity, kron, unitarity_residual, CMatrix,
    CVector, C64, I, ONE,
};

const UNITARY_TOL: f64 = 1e-8;

/// Generalized Gell-Mann basis of su(d) normalized to `Tr(t_i t_j) = d δ_ij`.
///
/// Ordering: symmetric pairs `(j, k)` with `j < k` in row-major order, then the
/// antisymmetric pairs in the same order, then the `d − 1` diagonal
/// generators. For `d = 2` this is `(σ_x, σ_y, σ_z)`.
#[derive(Debug, Clone)]
pub struct SuBasis {
    d: usize,
    generators: Vec<CMatrix>,
}

impl SuBasis {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(QicError::InvalidDimension(format!(
                "su(d) needs d >= 2, got {d}"
            )));
        }
        let scale = (d as f64 / 2.0).sqrt();
        let mut generators = Vec::with_capacity(d * d - 1);
        for j in 0..d {
            for k in j + 1..d {
                let mut m = CMatrix::zeros(d, d);
                m[(j, k)] = C64::new(scale, 0.0);
                m[(k, j)] = C64::new(scale, 0.0);
                generators.push(m);
            }
        }
        for j in 0..d {
            for k in j + 1..d {
                let mut m = CMatrix::zeros(d, d);
                m[(j, k)] = -I * scale;
                m[(k, j)] = I * scale;
                generators.push(m);
            }
        }
        for l in 1..d {
            let norm = (2.0 / (l * (l + 1)) as f64).sqrt() * scale;
            let mut m = CMatrix::zeros(d, d);
            for j in 0..l {
                m[(j, j)] = C64::new(norm, 0.0);
            }
            m[(l, l)] = C64::new(-(l as f64) * norm, 0.0);
            generators.push(m);
        }
        Ok(SuBasis { d, generators })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of traceless generators, `d² − 1`.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    /// Extended index: `μ = 0` is the identity, `μ ≥ 1` is generator `μ − 1`.
    pub fn extended(&self, mu: usize) -> CMatrix {
        if mu == 0 {
            identity(self.d)
        } else {
            self.generators[mu - 1].clone()
        }
    }

    pub fn extended_len(&self) -> usize {
        self.d * self.d
    }

    /// The diagonal (Cartan) generators, mutually commuting.
    pub fn cartan(&self) -> &[CMatrix] {
        &self.generators[self.generators.len() - (self.d - 1)..]
    }

    /// Coordinates of a Hermitian matrix in the extended basis:
    /// `h = (1/d) Σ_μ Tr(t_μ h) t_μ`.
    pub fn coordinates(&self, h: &CMatrix) -> Vec<f64> {
        (0..self.extended_len())
            .map(|mu| linalg::trace(&(self.extended(mu) * h)).re / self.d as f64)
            .collect()
    }
}

/// Normalized pure state of `num_sites` qudits of dimension `local_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    local_dim: usize,
    num_sites: usize,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(local_dim: usize, num_sites: usize, amplitudes: CVector) -> Result<Self> {
        if local_dim < 2 || num_sites == 0 {
            return Err(QicError::InvalidDimension(format!(
                "register of {num_sites} sites with local dimension {local_dim}"
            )));
        }
        let expected = local_dim.pow(num_sites as u32);
        if amplitudes.len() != expected {
            return Err(QicError::DimensionMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(QicError::NotNormalized { norm });
        }
        Ok(PureState {
            local_dim,
            num_sites,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes` before wrapping them.
    pub fn normalized(local_dim: usize, num_sites: usize, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(QicError::NotNormalized { norm });
        }
        Self::new(local_dim, num_sites, amplitudes.unscale(norm))
    }

    pub fn basis(local_dim: usize, digits: &[usize]) -> Result<Self> {
        let dim = local_dim.pow(digits.len() as u32);
        let mut index = 0;
        for &x in digits {
            if x >= local_dim {
                return Err(QicError::InvalidDimension(format!(
                    "digit {x} out of range for local dimension {local_dim}"
                )));
            }
            index = index * local_dim + x;
        }
        let mut amps = CVector::zeros(dim);
        amps[index] = ONE;
        Self::new(local_dim, digits.len(), amps)
    }

    /// `first ⊗ rest`, where `rest` is a state of the remaining sites.
    pub fn product(first: &CVector, rest: &PureState) -> Result<Self> {
        if first.len() != rest.local_dim {
            return Err(QicError::DimensionMismatch {
                expected: rest.local_dim,
                found: first.len(),
            });
        }
        Self::normalized(
            rest.local_dim,
            rest.num_sites + 1,
            linalg::kron_vec(first, &rest.amplitudes),
        )
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    /// Total Hilbert-space dimension `d^N`.
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Dimension of the sites after the first, `d^{N−1}`.
    pub fn rest_dim(&self) -> usize {
        self.amplitudes.len() / self.local_dim
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    /// Same register, new amplitudes (renormalized against rounding drift).
    pub(crate) fn with_amplitudes(&self, amplitudes: CVector) -> Result<Self> {
        Self::normalized(self.local_dim, self.num_sites, amplitudes)
    }

    pub fn expectation(&self, op: &CMatrix) -> C64 {
        linalg::expectation(op, &self.amplitudes)
    }

    pub fn overlap(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

#[derive(Debug, Clone)]
pub struct HermitianOp {
    matrix: CMatrix,
}

impl HermitianOp {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(QicError::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let residual = hermiticity_residual(&matrix);
        if residual >= 1e-12 {
            return Err(QicError::NotHermitian { residual });
        }
        Ok(HermitianOp { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// Schmidt decomposition across the cut after the first site.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// `√p_i`, nonincreasing, exactly `d` entries (zero-padded).
    pub coefficients: Vec<f64>,
    /// Orthonormal vectors on the first site.
    pub left: Vec<CVector>,
    /// Orthonormal vectors on the remaining `N − 1` sites.
    pub right: Vec<CVector>,
}

impl SchmidtDecomposition {
    pub fn probabilities(&self) -> Vec<f64> {
        self.coefficients.iter().map(|s| s * s).collect()
    }

    pub fn reconstruct(&self) -> CVector {
        let dim = self.left[0].len() * self.right[0].len();
        let mut out = CVector::zeros(dim);
        for ((s, l), r) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            out += linalg::kron_vec(l, r).scale(*s);
        }
        out
    }
}

pub fn schmidt(state: &PureState) -> Result<SchmidtDecomposition> {
    if state.num_sites() < 2 {
        return Err(QicError::NoEnvironment);
    }
    let d = state.local_dim();
    let rest = state.rest_dim();
    let c = first_site_matrix(state.amplitudes(), d);
    let svd = c.svd(true, true);
    let u = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let left_raw: Vec<CVector> = order.iter().map(|&k| u.column(k).into_owned()).collect();
    // C = U S V†, so the right Schmidt vectors are the rows of V† read as columns.
    let right_raw: Vec<CVector> = order
        .iter()
        .map(|&k| v_t.row(k).transpose().into_owned())
        .collect();
    let mut coefficients: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    coefficients.resize(d, 0.0);
    let left = linalg::orthonormal_completion(&left_raw, d, d);
    let right = linalg::orthonormal_completion(&right_raw, rest, d);
    Ok(SchmidtDecomposition {
        coefficients,
        left,
        right,
    })
}

/// `Σ_{i,j} |i⟩⟨j| ⊗ |j⟩⟨i|` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> Result<CMatrix> {
    if d < 2 {
        return Err(QicError::InvalidDimension(format!(
            "SWAP needs d >= 2, got {d}"
        )));
    }
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(i * d + j, j * d + i)] = ONE;
        }
    }
    Ok(s)
}

/// `(1/d) Σ_μ t_μ ⊗ t_μ` over the extended basis.
pub fn swap_from_generators(basis: &SuBasis) -> CMatrix {
    let d = basis.dim();
    let mut s = CMatrix::zeros(d * d, d * d);
    for mu in 0..basis.extended_len() {
        let t = basis.extended(mu);
        s += kron(&t, &t);
    }
    s.unscale(d as f64)
}

pub fn check_unitary(u: &CMatrix) -> Result<()> {
    if !u.is_square() {
        return Err(QicError::DimensionMismatch {
            expected: u.nrows(),
            found: u.ncols(),
        });
    }
    let residual = unitarity_residual(u);
    if residual > UNITARY_TOL {
        return Err(QicError::InvalidUnitary { residual });
    }
    Ok(())
}

/// Applies `U† (w ⊗ I) U` (or `w ⊗ I` when `global_u` is `None`).
pub fn apply_structured_unitary(
    state: &PureState,
    u_first: &CMatrix,
    global_u: Option<&CMatrix>,
) -> Result<PureState> {
    let d = state.local_dim();
    if u_first.nrows() != d {
        return Err(QicError::DimensionMismatch {
            expected: d,
            found: u_first.nrows(),
        });
    }
    check_unitary(u_first)?;
    let amps = match global_u {
        None => linalg::apply_on_first_site(u_first, state.amplitudes()),
        Some(g) => {
            if g.nrows() != state.dim() {
                return Err(QicError::DimensionMismatch {
                    expected: state.dim(),
                    found: g.nrows(),
                });
            }
            check_unitary(g)?;
            let rotated = g * state.amplitudes();
            let written = linalg::apply_on_first_site(u_first, &rotated);
            g.adjoint() * written
        }
    };
    state.with_amplitudes(amps)
}

/// Unitary `V` with `V·src = dst`, acting as the identity on the orthogonal
/// complement of `span{src, dst}`.
///
/// Writing `dst = c·src + s·e` with `e ⊥ src` and `s ≥ 0`, `V` is the rotation
/// `[[c, −s], [s, c̄]]` in the basis `(src, e)`. When `s` vanishes the target is a
/// phase multiple of the source (including the antipodal case `dst = −src`)
/// and `V = I + (c − 1)|src⟩⟨src|`.
pub fn map_vector_unitary(src: &CVector, dst: &CVector) -> Result<CMatrix> {
    if src.len() != dst.len() {
        return Err(QicError::DimensionMismatch {
            expected: src.len(),
            found: dst.len(),
        });
    }
    let n = src.len();
    let c = src.dotc(dst);
    let mut perp = dst - src * c;
    // second pass keeps e orthogonal to src when s is small
    let again = src.dotc(&perp);
    perp -= src * again;
    let s = perp.norm();
    let mut v = identity(n);
    if s < 1e-15 {
        let phase = c / c.norm().max(f64::MIN_POSITIVE);
        v += (src * src.adjoint()) * (phase - ONE);
        return Ok(v);
    }
    let e = perp.unscale(s);
    let s = C64::new(s, 0.0);
    // V = I − P + [src e] R [src e]†
    let ss = src * src.adjoint();
    let ee = &e * e.adjoint();
    let se = src * e.adjoint();
    let es = &e * src.adjoint();
    v -= &ss + &ee;
    v += ss * c + es * s - se * s + ee * c.conj();
    Ok(v)
}
