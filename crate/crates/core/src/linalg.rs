//! Small dense linear-algebra helpers shared by the operator library and the
//! certification code.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Iteration limits for the power method.
#[derive(Debug, Clone, Copy)]
pub struct PowerOptions {
    pub max_sweeps: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            max_sweeps: 10_000,
            tol: 1e-10,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerEstimate {
    pub value: f64,
    pub sweeps: usize,
    pub converged: bool,
}

pub fn gaussian_vector(n: usize, rng: &mut ChaCha8Rng) -> Vector {
    Vector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(rng)))
}

/// Largest eigenvalue of the symmetric positive semidefinite map `op` by the
/// power method. Stops when the Rayleigh quotient changes by less than
/// `tol` (relative).
pub fn power_iteration<F>(n: usize, op: F, opts: PowerOptions) -> PowerEstimate
where
    F: Fn(&Vector) -> Vector,
{
    if n == 0 {
        return PowerEstimate {
            value: 0.0,
            sweeps: 0,
            converged: true,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v = gaussian_vector(n, &mut rng);
    v /= v.norm();
    let mut lambda = 0.0;
    for sweep in 1..=opts.max_sweeps {
        let w = op(&v);
        let next = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            return PowerEstimate {
                value: 0.0,
                sweeps: sweep,
                converged: true,
            };
        }
        v = w / norm;
        if (next - lambda).abs() <= opts.tol * next.abs() {
            return PowerEstimate {
                value: next,
                sweeps: sweep,
                converged: true,
            };
        }
        lambda = next;
    }
    PowerEstimate {
        value: lambda,
        sweeps: opts.max_sweeps,
        converged: false,
    }
}

/// Column-by-column matrix of a linear map `R^n -> R^m`.
pub fn materialize<F>(n: usize, op: F) -> Matrix
where
    F: Fn(&Vector) -> Vector,
{
    let mut columns = Vec::with_capacity(n);
    let mut e = Vector::zeros(n);
    for i in 0..n {
        e[i] = 1.0;
        columns.push(op(&e));
        e[i] = 0.0;
    }
    if columns.is_empty() {
        return Matrix::zeros(0, 0);
    }
    Matrix::from_columns(&columns)
}

/// Matrix of the linear part of an affine map, `x -> op(x) - op(0)`.
pub fn materialize_affine<F>(n: usize, op: F) -> Matrix
where
    F: Fn(&Vector) -> Vector,
{
    let offset = op(&Vector::zeros(n));
    materialize(n, |x| op(x) - &offset)
}

/// Largest singular value.
pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// `(lambda_min, lambda_max)` of a symmetric matrix.
pub fn symmetric_extremes(m: &Matrix) -> (f64, f64) {
    let eig = m.symmetric_eigenvalues();
    (eig.min(), eig.max())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn power_iteration_matches_dense_eigenvalue() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = Matrix::from_fn(9, 6, |_, _| StandardNormal.sample(&mut rng));
        let gram = a.transpose() * &a;
        let est = power_iteration(6, |v| &gram * v, PowerOptions::default());
        let (_, top) = symmetric_extremes(&gram);
        assert!(est.converged);
        assert_relative_eq!(est.value, top, max_relative = 1e-8);
        assert_relative_eq!(spectral_norm(&a).powi(2), top, max_relative = 1e-12);
    }

    #[test]
    fn materialize_recovers_matrix() {
        let m = Matrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let got = materialize(3, |x| &m * x);
        assert_eq!(got, m);
        let affine = materialize_affine(3, |x| &m * x + Vector::from_element(2, 7.0));
        assert_eq!(affine, m);
    }
}
