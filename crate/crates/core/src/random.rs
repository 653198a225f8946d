//! Seeded random ensembles.
//!
//! Every randomized routine draws from [`QicRng`], a ChaCha8 stream seeded
//! with an explicit 64-bit seed through `SeedableRng::seed_from_u64`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::SuBasis;
use crate::linalg::{CMatrix, CVector, C64};

pub type QicRng = ChaCha8Rng;

/// Human-readable name of the generator, recorded in report headers.
pub const PRNG_NAME: &str = "ChaCha8 (rand_chacha, seed_from_u64)";

pub fn rng_from_seed(seed: u64) -> QicRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Uniformly distributed unit vector in `C^dim`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    let v = CVector::from_fn(dim, |_, _| complex_normal(rng));
    let norm = v.norm();
    v.unscale(norm)
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` absorbed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Random element of su(d) normalized to `Tr(t²) = d`.
pub fn random_local_generator<R: Rng + ?Sized>(rng: &mut R, basis: &SuBasis) -> CMatrix {
    let d = basis.dim();
    let coeffs: Vec<f64> = (0..basis.len())
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    let mut t = CMatrix::zeros(d, d);
    for (c, g) in coeffs.iter().zip(basis.generators()) {
        t += g.scale(c / norm);
    }
    t
}

/// Real matrix with entries uniform in `[-1, 1]`.
pub fn uniform_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..=1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{trace, unitarity_residual};

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from_seed(1);
        for n in [2, 5, 9] {
            assert!(unitarity_residual(&haar_unitary(&mut rng, n)) < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let a = random_unit_vector(&mut rng_from_seed(42), 6);
        let b = random_unit_vector(&mut rng_from_seed(42), 6);
        assert_eq!(a, b);
    }

    #[test]
    fn random_generator_is_normalized() {
        let basis = SuBasis::new(3).unwrap();
        let t = random_local_generator(&mut rng_from_seed(3), &basis);
        assert!((trace(&(&t * &t)).re - 3.0).abs() < 1e-12);
        assert!(trace(&t).norm() < 1e-12);
    }
}
