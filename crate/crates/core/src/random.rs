//! Seeded random matrices for the property suites.
//!
//! Each sample draws from its own generator seeded by `(seed, index)` so that
//! results do not depend on evaluation order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{Matrix, SpdMatrix, SymMatrix};

pub type SampleRng = ChaCha8Rng;

/// Default eigenvalue range for random SPD matrices.
pub const EIGEN_RANGE: (f64, f64) = (1e-2, 1e2);

/// splitmix64 finalizer applied to `seed` and `index`.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn sample_rng(seed: u64, index: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(sub_seed(seed, index))
}

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

pub fn gaussian_matrix(rng: &mut impl Rng, n: usize) -> Matrix {
    Matrix::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Orthogonal factor of the QR decomposition of a Gaussian matrix, with the
/// sign convention `diag(R) > 0`.
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> Matrix {
    let g = gaussian_matrix(rng, n);
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| g.get(i, j)).collect()).collect();
    for j in 0..n {
        for k in 0..j {
            let dot: f64 = (0..n).map(|i| cols[j][i] * cols[k][i]).sum();
            for i in 0..n {
                cols[j][i] -= dot * cols[k][i];
            }
        }
        let norm = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    Matrix::from_fn(n, |i, j| cols[j][i])
}

/// `QᵀDQ` with Haar-distributed `Q` and log-uniform eigenvalues in `range`.
pub fn random_spd_in(rng: &mut impl Rng, n: usize, range: (f64, f64)) -> SpdMatrix {
    let q = random_orthogonal(rng, n);
    let d: Vec<f64> = (0..n).map(|_| log_uniform(rng, range.0, range.1)).collect();
    let m = &(&q.transpose() * &Matrix::from_diagonal(&d)) * &q;
    SpdMatrix::new(SymMatrix::from_matrix(m).expect("finite")).expect("eigenvalues are bounded away from zero")
}

pub fn random_spd(rng: &mut impl Rng, n: usize) -> SpdMatrix {
    random_spd_in(rng, n, EIGEN_RANGE)
}

pub fn random_diagonal_spd(rng: &mut impl Rng, n: usize) -> SpdMatrix {
    let d: Vec<f64> = (0..n).map(|_| log_uniform(rng, EIGEN_RANGE.0, EIGEN_RANGE.1)).collect();
    SpdMatrix::from_diagonal(&d).expect("positive diagonal")
}

/// `U·diag(σ)·Vᵀ` with singular values log-uniform in `[1/√κ, √κ]`, so the
/// condition number never exceeds `max_cond`.
pub fn random_invertible(rng: &mut impl Rng, n: usize, max_cond: f64) -> Matrix {
    let u = random_orthogonal(rng, n);
    let v = random_orthogonal(rng, n);
    let half = max_cond.sqrt();
    let s: Vec<f64> = (0..n).map(|_| log_uniform(rng, 1.0 / half, half)).collect();
    &(&u * &Matrix::from_diagonal(&s)) * &v.transpose()
}

/// Symmetric Gaussian matrix with unit Frobenius norm.
pub fn random_symmetric_unit(rng: &mut impl Rng, n: usize) -> SymMatrix {
    let g = gaussian_matrix(rng, n);
    let s = SymMatrix::from_matrix(g).expect("finite");
    let norm = s.frobenius();
    s.scale(1.0 / norm)
}

/// Random probability vector (normalized exponentials).
pub fn random_weights(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

/// Random positive semidefinite perturbation: rank one half of the time.
pub fn random_psd(rng: &mut impl Rng, n: usize) -> SymMatrix {
    if rng.random::<bool>() {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let scale = log_uniform(rng, 1e-2, 1e1);
        SymMatrix::from_matrix(Matrix::from_fn(n, |i, j| scale * v[i] * v[j])).expect("finite")
    } else {
        random_spd(rng, n).into_sym()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut rng = sample_rng(7, 0);
        for n in 1..8 {
            let q = random_orthogonal(&mut rng, n);
            assert!((&q.transpose() * &q).max_abs_diff(&Matrix::identity(n)) < 1e-13);
        }
    }

    #[test]
    fn spd_eigenvalues_in_range() {
        let mut rng = sample_rng(3, 1);
        let a = random_spd(&mut rng, 5);
        assert!(a.min_eigenvalue() >= 1e-2 * (1.0 - 1e-10));
        assert!(a.max_eigenvalue() <= 1e2 * (1.0 + 1e-10));
    }

    #[test]
    fn invertible_condition_cap() {
        let mut rng = sample_rng(11, 2);
        let c = random_invertible(&mut rng, 4, 100.0);
        let gram = SpdMatrix::new(SymMatrix::from_matrix(&c.transpose() * &c).unwrap()).unwrap();
        let cond = (gram.max_eigenvalue() / gram.min_eigenvalue()).sqrt();
        assert!(cond <= 100.0 * (1.0 + 1e-9));
    }

    #[test]
    fn sub_seeds_are_reproducible_and_distinct() {
        assert_eq!(sub_seed(42, 5), sub_seed(42, 5));
        assert_ne!(sub_seed(42, 5), sub_seed(42, 6));
        assert_ne!(sub_seed(42, 5), sub_seed(43, 5));
    }

    #[test]
    fn weights_are_a_probability_vector() {
        let mut rng = sample_rng(1, 1);
        let w = random_weights(&mut rng, 5);
        assert!(w.iter().all(|&x| x > 0.0));
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
