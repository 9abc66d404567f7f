//! Linear maps with adjoints: identity, dense matrices and the first-order
//! difference operator with its odd/even row restrictions.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{gaussian_vector, power_iteration, spectral_norm, Matrix, PowerOptions, Vector};

/// Squared operator norm, flagged when it is a power-iteration estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSq {
    pub value: f64,
    pub exact: bool,
}

pub trait LinearMap: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn apply(&self, x: &Vector) -> Vector;
    fn adjoint(&self, y: &Vector) -> Vector;

    /// Closed-form `||L||^2` when one is known.
    fn exact_norm_sq(&self) -> Option<f64> {
        None
    }

    fn operator_norm_sq(&self) -> NormSq {
        match self.exact_norm_sq() {
            Some(value) => NormSq { value, exact: true },
            None => NormSq {
                value: estimate_norm_sq(self, PowerOptions::default()),
                exact: false,
            },
        }
    }
}

/// `||L||^2` as the top eigenvalue of `L^T L`.
pub fn estimate_norm_sq<L: LinearMap + ?Sized>(map: &L, opts: PowerOptions) -> f64 {
    power_iteration(map.dim_in(), |v| map.adjoint(&map.apply(v)), opts).value
}

/// Largest relative defect of `<Lx, y> = <x, L^T y>` over random pairs.
pub fn adjoint_defect<L: LinearMap + ?Sized>(map: &L, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let x = gaussian_vector(map.dim_in(), &mut rng);
        let y = gaussian_vector(map.dim_out(), &mut rng);
        let lx = map.apply(&x);
        let lty = map.adjoint(&y);
        let scale = (lx.norm() * y.norm()).max(x.norm() * lty.norm()).max(1e-300);
        worst = worst.max((lx.dot(&y) - x.dot(&lty)).abs() / scale);
    }
    worst
}

#[derive(Debug, Clone, Copy)]
pub struct Identity {
    pub n: usize,
}

impl LinearMap for Identity {
    fn dim_in(&self) -> usize {
        self.n
    }
    fn dim_out(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &Vector) -> Vector {
        x.clone()
    }
    fn adjoint(&self, y: &Vector) -> Vector {
        y.clone()
    }
    fn exact_norm_sq(&self) -> Option<f64> {
        Some(if self.n == 0 { 0.0 } else { 1.0 })
    }
}

#[derive(Debug, Clone)]
pub struct DenseMap {
    matrix: Matrix,
}

impl DenseMap {
    pub fn new(matrix: Matrix) -> Self {
        DenseMap { matrix }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

impl LinearMap for DenseMap {
    fn dim_in(&self) -> usize {
        self.matrix.ncols()
    }
    fn dim_out(&self) -> usize {
        self.matrix.nrows()
    }
    fn apply(&self, x: &Vector) -> Vector {
        &self.matrix * x
    }
    fn adjoint(&self, y: &Vector) -> Vector {
        self.matrix.tr_mul(y)
    }
    fn exact_norm_sq(&self) -> Option<f64> {
        Some(spectral_norm(&self.matrix).powi(2))
    }
}

/// `(Dx)_n = (x_n - x_{n-1}) / 2` for `n = 1..N-1`, a map `R^N -> R^{N-1}`.
#[derive(Debug, Clone, Copy)]
pub struct DifferenceOperator {
    n: usize,
}

pub fn difference_operator(n: usize) -> DifferenceOperator {
    DifferenceOperator { n }
}

impl DifferenceOperator {
    pub fn signal_len(&self) -> usize {
        self.n
    }
}

impl LinearMap for DifferenceOperator {
    fn dim_in(&self) -> usize {
        self.n
    }
    fn dim_out(&self) -> usize {
        self.n.saturating_sub(1)
    }
    fn apply(&self, x: &Vector) -> Vector {
        Vector::from_iterator(
            self.dim_out(),
            (0..self.dim_out()).map(|r| 0.5 * (x[r + 1] - x[r])),
        )
    }
    fn adjoint(&self, y: &Vector) -> Vector {
        let mut out = Vector::zeros(self.n);
        for (r, &v) in y.iter().enumerate() {
            out[r] -= 0.5 * v;
            out[r + 1] += 0.5 * v;
        }
        out
    }
    /// `D^T D` is a quarter of the path Laplacian, whose top eigenvalue is
    /// `2 + 2 cos(pi / N)`.
    fn exact_norm_sq(&self) -> Option<f64> {
        if self.n < 2 {
            Some(0.0)
        } else {
            Some((PI / (2.0 * self.n as f64)).cos().powi(2))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// Rows `1, 3, 5, ...` (one-based).
    Odd,
    /// Rows `2, 4, 6, ...` (one-based).
    Even,
}

/// Rows of [`DifferenceOperator`] with the given one-based parity. The rows
/// have disjoint supports, so `L L^T = Id / 2`.
#[derive(Debug, Clone, Copy)]
pub struct DifferenceRows {
    n: usize,
    parity: Parity,
}

pub fn odd_even_split(d: &DifferenceOperator) -> (DifferenceRows, DifferenceRows) {
    (
        DifferenceRows {
            n: d.n,
            parity: Parity::Odd,
        },
        DifferenceRows {
            n: d.n,
            parity: Parity::Even,
        },
    )
}

impl DifferenceRows {
    fn first_row(&self) -> usize {
        match self.parity {
            Parity::Odd => 0,
            Parity::Even => 1,
        }
    }

    /// Zero-based row indices of the parent operator.
    pub fn rows(&self) -> impl Iterator<Item = usize> {
        (self.first_row()..self.n.saturating_sub(1)).step_by(2)
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }
}

impl LinearMap for DifferenceRows {
    fn dim_in(&self) -> usize {
        self.n
    }
    fn dim_out(&self) -> usize {
        self.rows().count()
    }
    fn apply(&self, x: &Vector) -> Vector {
        Vector::from_iterator(self.dim_out(), self.rows().map(|r| 0.5 * (x[r + 1] - x[r])))
    }
    fn adjoint(&self, y: &Vector) -> Vector {
        let mut out = Vector::zeros(self.n);
        for (k, r) in self.rows().enumerate() {
            out[r] -= 0.5 * y[k];
            out[r + 1] += 0.5 * y[k];
        }
        out
    }
    fn exact_norm_sq(&self) -> Option<f64> {
        Some(if self.dim_out() == 0 { 0.0 } else { 0.5 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(x: &[f64]) -> Vector {
        Vector::from_column_slice(x)
    }

    #[test]
    fn difference_examples() {
        let d = difference_operator(3);
        assert_eq!(d.apply(&v(&[1.0, 1.0, 1.0])), v(&[0.0, 0.0]));
        assert_eq!(d.apply(&v(&[0.0, 2.0, 2.0])), v(&[1.0, 0.0]));
        assert_eq!(d.adjoint(&v(&[1.0, 0.0])), v(&[-0.5, 0.5, 0.0]));
        let d = difference_operator(6);
        assert_eq!(
            d.adjoint(&v(&[1.0, 0.0, 0.0, 0.0, 0.0])),
            v(&[-0.5, 0.5, 0.0, 0.0, 0.0, 0.0])
        );
    }

    #[test]
    fn difference_norm_closed_form_matches_power_iteration() {
        for n in [2usize, 3, 8, 33] {
            let d = difference_operator(n);
            let exact = d.exact_norm_sq().unwrap();
            let est = estimate_norm_sq(
                &d,
                PowerOptions {
                    max_sweeps: 200_000,
                    tol: 1e-15,
                    seed: 1,
                },
            );
            assert!(exact <= 1.0);
            assert_abs_diff_eq!(est, exact, epsilon = 1e-6);
        }
    }

    #[test]
    fn split_rows() {
        let d = difference_operator(3);
        let (odd, even) = odd_even_split(&d);
        assert_eq!(odd.dim_out(), 1);
        assert_eq!(even.dim_out(), 1);
        assert_eq!(odd.adjoint(&v(&[1.0])), v(&[-0.5, 0.5, 0.0]));
        assert_eq!(even.adjoint(&v(&[1.0])), v(&[0.0, -0.5, 0.5]));

        let (_, even) = odd_even_split(&difference_operator(2));
        assert_eq!(even.dim_out(), 0);
        assert_eq!(even.apply(&v(&[1.0, 2.0])).len(), 0);
        assert_eq!(even.adjoint(&Vector::zeros(0)), v(&[0.0, 0.0]));
    }

    #[test]
    fn split_rows_are_semi_orthogonal() {
        let d = difference_operator(11);
        let (odd, even) = odd_even_split(&d);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for map in [&odd, &even] {
            let u = gaussian_vector(map.dim_out(), &mut rng);
            let back = map.apply(&map.adjoint(&u));
            assert_abs_diff_eq!((back - &u * 0.5).norm(), 0.0, epsilon = 1e-15);
        }
        // together they cover every row of D
        assert_eq!(odd.dim_out() + even.dim_out(), d.dim_out());
    }

    #[test]
    fn adjoints_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dense = DenseMap::new(Matrix::from_fn(5, 4, |_, _| {
            rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, &mut rng)
        }));
        let d = difference_operator(17);
        let (odd, even) = odd_even_split(&d);
        let maps: [&dyn LinearMap; 5] = [&Identity { n: 4 }, &dense, &d, &odd, &even];
        for map in maps {
            assert!(adjoint_defect(map, 100, 5) < 1e-10);
        }
    }
}
