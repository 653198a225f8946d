//! Dense complex linear algebra helpers shared by the qudit and lattice code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            out[i * b.len() + j] = a[i] * b[j];
        }
    }
    out
}

/// `op ⊗ I_rest`.
pub fn embed_first(op: &CMatrix, rest: usize) -> CMatrix {
    kron(op, &identity(rest))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &identity(n))
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn expectation(op: &CMatrix, psi: &CVector) -> C64 {
    psi.dotc(&(op * psi))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Columns of the returned matrix are the eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    // symmetrize so tiny anti-Hermitian noise does not leak into the solver
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

/// `exp(-i θ h)` for Hermitian `h`, via its spectral decomposition.
pub fn unitary_from_hermitian(h: &CMatrix, theta: f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(h);
    let phases = CVector::from_iterator(
        values.len(),
        values.iter().map(|&r| C64::from_polar(1.0, -theta * r)),
    );
    &vectors * CMatrix::from_diagonal(&phases) * vectors.adjoint()
}

/// Trace distance `½‖ρ − σ‖₁` between two density matrices.
pub fn trace_distance(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let (values, _) = hermitian_eigen(&(rho - sigma));
    0.5 * values.iter().map(|x| x.abs()).sum::<f64>()
}

pub fn projector(psi: &CVector) -> CMatrix {
    psi * psi.adjoint()
}

/// Views a vector on `d ⊗ rest` as the `d × rest` coefficient matrix.
pub fn first_site_matrix(amplitudes: &CVector, d: usize) -> CMatrix {
    let rest = amplitudes.len() / d;
    CMatrix::from_fn(d, rest, |i, j| amplitudes[i * rest + j])
}

pub fn flatten_first_site(coeffs: &CMatrix) -> CVector {
    let (d, rest) = coeffs.shape();
    CVector::from_fn(d * rest, |k, _| coeffs[(k / rest, k % rest)])
}

/// Applies `op ⊗ I` to a vector without forming the full operator.
pub fn apply_on_first_site(op: &CMatrix, amplitudes: &CVector) -> CVector {
    let d = op.ncols();
    flatten_first_site(&(op * first_site_matrix(amplitudes, d)))
}

/// Reduced density matrix of the first `d`-dimensional factor.
pub fn reduce_to_first_site(amplitudes: &CVector, d: usize) -> CMatrix {
    let c = first_site_matrix(amplitudes, d);
    &c * c.adjoint()
}

/// Reduced density matrix of the leading `d^N/ext` block after tracing out a
/// trailing factor of dimension `ext`.
pub fn trace_out_last(amplitudes: &CVector, ext: usize) -> CMatrix {
    let lead = amplitudes.len() / ext;
    let c = CMatrix::from_fn(lead, ext, |i, j| amplitudes[i * ext + j]);
    &c * c.adjoint()
}

/// Reduced density matrix of a trailing factor of dimension `ext`.
pub fn reduce_to_last(amplitudes: &CVector, ext: usize) -> CMatrix {
    let lead = amplitudes.len() / ext;
    let c = CMatrix::from_fn(lead, ext, |i, j| amplitudes[i * ext + j]);
    (c.adjoint() * &c).transpose()
}

/// Orthonormalizes `vectors` in order (modified Gram–Schmidt) and completes
/// them with standard basis vectors until `target` vectors exist.
///
/// Vectors whose residual norm drops below `1e-10` are replaced by the
/// first standard basis vector that is still linearly independent.
pub fn orthonormal_completion(vectors: &[CVector], dim: usize, target: usize) -> Vec<CVector> {
    let mut out: Vec<CVector> = Vec::with_capacity(target);
    let push = |candidate: &CVector, out: &mut Vec<CVector>| -> bool {
        let mut w = candidate.clone();
        for _ in 0..2 {
            for e in out.iter() {
                let overlap = e.dotc(&w);
                w -= e * overlap;
            }
        }
        let norm = w.norm();
        if norm < 1e-10 {
            return false;
        }
        out.push(w.unscale(norm));
        true
    };
    let mut next_basis = 0usize;
    for v in vectors.iter().take(target) {
        if push(v, &mut out) {
            continue;
        }
        while next_basis < dim {
            let mut e = CVector::zeros(dim);
            e[next_basis] = ONE;
            next_basis += 1;
            if push(&e, &mut out) {
                break;
            }
        }
    }
    while out.len() < target && next_basis < dim {
        let mut e = CVector::zeros(dim);
        e[next_basis] = ONE;
        next_basis += 1;
        push(&e, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_of_identities_is_identity() {
        let k = kron(&identity(2), &identity(3));
        assert_eq!(max_abs_diff(&k, &identity(6)), 0.0);
    }

    #[test]
    fn unitary_from_hermitian_matches_pauli_rotation() {
        let z = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, -ONE]));
        let theta = 0.37;
        let u = unitary_from_hermitian(&z, theta);
        assert!((u[(0, 0)] - C64::from_polar(1.0, -theta)).norm() < 1e-14);
        assert!((u[(1, 1)] - C64::from_polar(1.0, theta)).norm() < 1e-14);
        assert!(unitarity_residual(&u) < 1e-14);
    }

    #[test]
    fn completion_handles_dependent_input() {
        let mut a = CVector::zeros(3);
        a[0] = ONE;
        let basis = orthonormal_completion(&[a.clone(), a], 3, 3);
        assert_eq!(basis.len(), 3);
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((x.dotc(y).re - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_traces_of_product_state() {
        let a = CVector::from_vec(vec![ONE, ZERO]);
        let b = CVector::from_vec(vec![ZERO, ONE, ZERO]);
        let psi = kron_vec(&a, &b);
        assert!(max_abs_diff(&reduce_to_first_site(&psi, 2), &projector(&a)) < 1e-15);
        assert!(max_abs_diff(&reduce_to_last(&psi, 3), &projector(&b)) < 1e-15);
        assert!(max_abs_diff(&trace_out_last(&psi, 3), &projector(&a)) < 1e-15);
    }
}
