//! Concrete smooth functions and the composite proximity rules.

use std::sync::Arc;

use nalgebra::SymmetricEigen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{gaussian_vector, materialize, Matrix, Vector};
use crate::operators::{LinearMap, SmoothFunction};

/// Relative threshold below which the smallest Hessian eigenvalue is taken
/// to be zero.
const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct Zero {
    pub dim: usize,
}

impl SmoothFunction for Zero {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _x: &Vector) -> f64 {
        0.0
    }
    fn gradient(&self, x: &Vector) -> Vector {
        Vector::zeros(x.len())
    }
    fn has_prox(&self) -> bool {
        true
    }
    fn prox(&self, x: &Vector, _tau: f64) -> Result<Vector> {
        Ok(x.clone())
    }
    fn grad_lipschitz(&self) -> f64 {
        0.0
    }
    fn strong_convexity(&self) -> f64 {
        0.0
    }
    fn describe(&self) -> String {
        "0".into()
    }
}

/// `x -> |x - z|^2 / 2`.
#[derive(Debug, Clone)]
pub struct SquaredDistance {
    pub z: Vector,
}

impl SmoothFunction for SquaredDistance {
    fn dim(&self) -> usize {
        self.z.len()
    }
    fn value(&self, x: &Vector) -> f64 {
        0.5 * (x - &self.z).norm_squared()
    }
    fn gradient(&self, x: &Vector) -> Vector {
        x - &self.z
    }
    fn has_prox(&self) -> bool {
        true
    }
    fn prox(&self, x: &Vector, tau: f64) -> Result<Vector> {
        Ok((x + &self.z * tau) / (1.0 + tau))
    }
    fn grad_lipschitz(&self) -> f64 {
        1.0
    }
    fn strong_convexity(&self) -> f64 {
        1.0
    }
    fn describe(&self) -> String {
        "|. - z|^2 / 2".into()
    }
}

/// `x -> x^T H x / 2 + c^T x + offset` with symmetric positive semidefinite
/// `H`, kept in eigen-decomposed form so that every prox is a diagonal
/// solve.
#[derive(Debug, Clone)]
pub struct Quadratic {
    hessian: Matrix,
    linear: Vector,
    offset: f64,
    basis: Matrix,
    eigenvalues: Vector,
    lambda_min: f64,
    lambda_max: f64,
}

impl Quadratic {
    pub fn new(hessian: Matrix, linear: Vector, offset: f64) -> Result<Self> {
        let n = hessian.nrows();
        if hessian.ncols() != n || linear.len() != n {
            return Err(Error::Construction(format!(
                "quadratic with {}x{} Hessian and {}-vector linear term",
                n,
                hessian.ncols(),
                linear.len()
            )));
        }
        let hessian = (&hessian + hessian.transpose()) * 0.5;
        let eig = SymmetricEigen::new(hessian.clone());
        let lambda_max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let lambda_min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if n > 0 && lambda_min < -1e-10 * lambda_max.max(1.0) {
            return Err(Error::Construction(format!(
                "quadratic Hessian is not positive semidefinite (eigenvalue {lambda_min:e})"
            )));
        }
        let eigenvalues = eig.eigenvalues.map(|v| v.max(0.0));
        let lambda_min = if n == 0 || lambda_min <= RANK_TOL * lambda_max {
            0.0
        } else {
            lambda_min
        };
        Ok(Quadratic {
            hessian,
            linear,
            offset,
            basis: eig.eigenvectors,
            eigenvalues,
            lambda_min,
            lambda_max,
        })
    }

    /// `|A x - z|^2 / 2` for a dense `A`.
    pub fn least_squares(a: &Matrix, z: &Vector) -> Result<Self> {
        if z.len() != a.nrows() {
            return Err(Error::Construction(format!(
                "observation has length {} but A has {} rows",
                z.len(),
                a.nrows()
            )));
        }
        Quadratic::new(a.tr_mul(a), -a.tr_mul(z), 0.5 * z.norm_squared())
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Quadratic::new(
            Matrix::from_diagonal(&Vector::from_column_slice(diag)),
            Vector::zeros(n),
            0.0,
        )
    }

    pub fn hessian(&self) -> &Matrix {
        &self.hessian
    }

    pub fn linear(&self) -> &Vector {
        &self.linear
    }

    pub fn eigenvalues(&self) -> &Vector {
        &self.eigenvalues
    }

    /// `(I + tau H)^{-1} v`.
    pub fn resolvent_solve(&self, v: &Vector, tau: f64) -> Vector {
        let mut coords = self.basis.tr_mul(v);
        for (c, &l) in coords.iter_mut().zip(self.eigenvalues.iter()) {
            *c /= 1.0 + tau * l;
        }
        &self.basis * coords
    }
}

impl SmoothFunction for Quadratic {
    fn dim(&self) -> usize {
        self.linear.len()
    }
    fn value(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&(&self.hessian * x)) + self.linear.dot(x) + self.offset
    }
    fn gradient(&self, x: &Vector) -> Vector {
        &self.hessian * x + &self.linear
    }
    fn has_prox(&self) -> bool {
        true
    }
    fn prox(&self, x: &Vector, tau: f64) -> Result<Vector> {
        Ok(self.resolvent_solve(&(x - &self.linear * tau), tau))
    }
    fn grad_lipschitz(&self) -> f64 {
        self.lambda_max
    }
    fn strong_convexity(&self) -> f64 {
        self.lambda_min
    }
    fn describe(&self) -> String {
        format!("quadratic(n = {})", self.dim())
    }
}

/// `x -> |A x - z|^2 / 2`. The Gram matrix `A^T A` is formed once and its
/// eigen-decomposition gives the extreme eigenvalues and every prox.
pub fn quadratic_fidelity(a: &dyn LinearMap, z: &Vector) -> Result<Quadratic> {
    if z.len() != a.dim_out() {
        return Err(Error::Construction(format!(
            "observation has length {} but A maps into R^{}",
            z.len(),
            a.dim_out()
        )));
    }
    let n = a.dim_in();
    let gram = materialize(n, |v| a.adjoint(&a.apply(v)));
    let linear = -a.adjoint(z);
    Quadratic::new(gram, linear, 0.5 * z.norm_squared())
}

/// `f + g`. Only a gradient is available.
#[derive(Clone)]
pub struct Sum {
    pub f: Arc<dyn SmoothFunction>,
    pub g: Arc<dyn SmoothFunction>,
}

impl SmoothFunction for Sum {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn value(&self, x: &Vector) -> f64 {
        self.f.value(x) + self.g.value(x)
    }
    fn gradient(&self, x: &Vector) -> Vector {
        self.f.gradient(x) + self.g.gradient(x)
    }
    fn grad_lipschitz(&self) -> f64 {
        self.f.grad_lipschitz() + self.g.grad_lipschitz()
    }
    fn strong_convexity(&self) -> f64 {
        self.f.strong_convexity() + self.g.strong_convexity()
    }
    fn describe(&self) -> String {
        format!("{} + {}", self.f.describe(), self.g.describe())
    }
}

/// How the prox of `h o L` is obtained from the prox of `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompositionRule {
    /// No closed form; gradient only.
    None,
    /// `L L^T = c Id`.
    SemiOrthogonal(f64),
    /// `L^T L = L L^T = Id`.
    Orthonormal,
}

/// `x -> h(L x)`.
#[derive(Clone)]
pub struct LinearComposition {
    h: Arc<dyn SmoothFunction>,
    map: Arc<dyn LinearMap>,
    rule: CompositionRule,
    norm_sq: f64,
}

fn max_defect<F: Fn(&Vector) -> Vector>(dim: usize, f: F, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let u = gaussian_vector(dim, &mut rng);
        worst = worst.max(f(&u).norm() / u.norm().max(1e-300));
    }
    worst
}

impl LinearComposition {
    /// Checks the claimed structure of `map` on random vectors before
    /// accepting it.
    pub fn new(
        h: Arc<dyn SmoothFunction>,
        map: Arc<dyn LinearMap>,
        rule: CompositionRule,
    ) -> Result<Self> {
        if h.dim() != map.dim_out() {
            return Err(Error::Construction(format!(
                "h acts on R^{} but L maps into R^{}",
                h.dim(),
                map.dim_out()
            )));
        }
        let check = 1e-10;
        match rule {
            CompositionRule::None => {}
            CompositionRule::SemiOrthogonal(c) => {
                if !(c > 0.0) {
                    return Err(Error::Construction(format!(
                        "semi-orthogonality constant must be positive, got {c}"
                    )));
                }
                if map.dim_out() > 0 {
                    let d = max_defect(
                        map.dim_out(),
                        |u| map.apply(&map.adjoint(u)) - u * c,
                        8,
                        17,
                    );
                    if d > check {
                        return Err(Error::Construction(format!(
                            "L L^T = {c} Id fails with relative defect {d:e}"
                        )));
                    }
                }
            }
            CompositionRule::Orthonormal => {
                if map.dim_in() != map.dim_out() {
                    return Err(Error::Construction("orthonormal map must be square".into()));
                }
                let n = map.dim_in();
                let d1 = max_defect(n, |u| map.adjoint(&map.apply(u)) - u, 8, 18);
                let d2 = max_defect(n, |u| map.apply(&map.adjoint(u)) - u, 8, 19);
                if d1.max(d2) > check {
                    return Err(Error::Construction(format!(
                        "map is not orthonormal (relative defect {:e})",
                        d1.max(d2)
                    )));
                }
            }
        }
        let norm_sq = match rule {
            CompositionRule::SemiOrthogonal(c) if map.dim_out() > 0 => c,
            CompositionRule::SemiOrthogonal(_) => 0.0,
            CompositionRule::Orthonormal => 1.0,
            CompositionRule::None => map.operator_norm_sq().value,
        };
        Ok(LinearComposition {
            h,
            map,
            rule,
            norm_sq,
        })
    }

    pub fn rule(&self) -> CompositionRule {
        self.rule
    }

    pub fn map_norm_sq(&self) -> f64 {
        self.norm_sq
    }
}

impl SmoothFunction for LinearComposition {
    fn dim(&self) -> usize {
        self.map.dim_in()
    }
    fn value(&self, x: &Vector) -> f64 {
        self.h.value(&self.map.apply(x))
    }
    fn gradient(&self, x: &Vector) -> Vector {
        self.map.adjoint(&self.h.gradient(&self.map.apply(x)))
    }
    fn has_prox(&self) -> bool {
        self.rule != CompositionRule::None && self.h.has_prox()
    }
    fn prox(&self, x: &Vector, tau: f64) -> Result<Vector> {
        match self.rule {
            CompositionRule::None => Err(Error::ProxUnavailable(self.describe())),
            CompositionRule::SemiOrthogonal(c) => {
                semiorthogonal_prox(self.h.as_ref(), self.map.as_ref(), c, x, tau)
            }
            CompositionRule::Orthonormal => {
                orthonormal_prox(self.h.as_ref(), self.map.as_ref(), x, tau)
            }
        }
    }
    fn grad_lipschitz(&self) -> f64 {
        if self.norm_sq == 0.0 {
            0.0
        } else {
            self.h.grad_lipschitz() * self.norm_sq
        }
    }
    fn strong_convexity(&self) -> f64 {
        match self.rule {
            CompositionRule::Orthonormal => self.h.strong_convexity(),
            _ => 0.0,
        }
    }
    fn describe(&self) -> String {
        format!("({}) o L", self.h.describe())
    }
}

/// `prox_{tau h o L}(x) = x - L^T (L x - prox_{c tau h}(L x)) / c` for
/// `L L^T = c Id`.
pub fn semiorthogonal_prox(
    h: &dyn SmoothFunction,
    l: &dyn LinearMap,
    c: f64,
    x: &Vector,
    tau: f64,
) -> Result<Vector> {
    if l.dim_out() == 0 {
        return Ok(x.clone());
    }
    let lx = l.apply(x);
    let p = h.prox(&lx, c * tau)?;
    Ok(x - l.adjoint(&(lx - p)) / c)
}

/// `prox_{tau h o W}(x) = W^T prox_{tau h}(W x)` for orthonormal `W`.
pub fn orthonormal_prox(
    h: &dyn SmoothFunction,
    w: &dyn LinearMap,
    x: &Vector,
    tau: f64,
) -> Result<Vector> {
    Ok(w.adjoint(&h.prox(&w.apply(x), tau)?))
}

/// `prox_{tau (|. - z|^2/2 + g)}(x) = prox_{tau/(1+tau) g}((x + tau z)/(1 + tau))`.
pub fn scaled_shifted_prox(
    z: &Vector,
    g: &dyn SmoothFunction,
    x: &Vector,
    tau: f64,
) -> Result<Vector> {
    let centre = (x + z * tau) / (1.0 + tau);
    g.prox(&centre, tau / (1.0 + tau))
}

/// `x -> |x - z|^2 / 2 + g(x)`.
#[derive(Clone)]
pub struct ShiftedQuadraticSum {
    z: Vector,
    g: Arc<dyn SmoothFunction>,
}

impl ShiftedQuadraticSum {
    pub fn new(z: Vector, g: Arc<dyn SmoothFunction>) -> Result<Self> {
        if g.dim() != z.len() {
            return Err(Error::Construction(format!(
                "g acts on R^{} but z has length {}",
                g.dim(),
                z.len()
            )));
        }
        Ok(ShiftedQuadraticSum { z, g })
    }
}

impl SmoothFunction for ShiftedQuadraticSum {
    fn dim(&self) -> usize {
        self.z.len()
    }
    fn value(&self, x: &Vector) -> f64 {
        0.5 * (x - &self.z).norm_squared() + self.g.value(x)
    }
    fn gradient(&self, x: &Vector) -> Vector {
        x - &self.z + self.g.gradient(x)
    }
    fn has_prox(&self) -> bool {
        self.g.has_prox()
    }
    fn prox(&self, x: &Vector, tau: f64) -> Result<Vector> {
        scaled_shifted_prox(&self.z, self.g.as_ref(), x, tau)
    }
    fn grad_lipschitz(&self) -> f64 {
        1.0 + self.g.grad_lipschitz()
    }
    fn strong_convexity(&self) -> f64 {
        1.0 + self.g.strong_convexity()
    }
    fn describe(&self) -> String {
        format!("|. - z|^2/2 + {}", self.g.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{
        difference_operator, odd_even_split, DenseMap, HuberParams, HuberPenalty, Identity,
    };
    use approx::assert_abs_diff_eq;

    fn v(x: &[f64]) -> Vector {
        Vector::from_column_slice(x)
    }

    fn huber(dim: usize, mu: f64, chi: f64) -> Arc<dyn SmoothFunction> {
        Arc::new(HuberPenalty::new(dim, HuberParams::new(mu, chi).unwrap()))
    }

    #[test]
    fn fidelity_with_identity() {
        let f = quadratic_fidelity(&Identity { n: 2 }, &Vector::zeros(2)).unwrap();
        assert_abs_diff_eq!((f.prox(&v(&[2.0, 2.0]), 1.0).unwrap() - v(&[1.0, 1.0])).norm(), 0.0, epsilon = 1e-14);
        let z = v(&[0.3, -1.0]);
        let f = quadratic_fidelity(&Identity { n: 2 }, &z).unwrap();
        let x = v(&[1.0, 2.0]);
        assert_abs_diff_eq!((f.gradient(&x) - (&x - &z)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.value(&x), 0.5 * (&x - &z).norm_squared(), epsilon = 1e-14);
        assert_abs_diff_eq!(f.strong_convexity(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.grad_lipschitz(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn fidelity_extreme_eigenvalues() {
        let a = DenseMap::new(Matrix::from_diagonal(&v(&[1.0, 2.0])));
        let f = quadratic_fidelity(&a, &Vector::zeros(2)).unwrap();
        assert_abs_diff_eq!(f.strong_convexity(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.grad_lipschitz(), 4.0, epsilon = 1e-12);

        let a = DenseMap::new(Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]));
        let f = quadratic_fidelity(&a, &v(&[1.0, 0.0])).unwrap();
        assert_eq!(f.strong_convexity(), 0.0);
        // prox still defined and optimal
        let x = v(&[0.5, -2.0]);
        let p = f.prox(&x, 0.7).unwrap();
        let r = (&x - &p) / 0.7 - f.gradient(&p);
        assert!(r.norm() < 1e-12);
    }

    #[test]
    fn semiorthogonal_hand_value() {
        let d = difference_operator(3);
        let (odd, _) = odd_even_split(&d);
        let h = huber(1, 0.5, 1.0);
        let p = semiorthogonal_prox(h.as_ref(), &odd, 0.5, &v(&[0.0, 2.0, 2.0]), 1.0).unwrap();
        assert_abs_diff_eq!((p - v(&[0.5, 1.5, 2.0])).norm(), 0.0, epsilon = 1e-14);

        let x = Vector::from_element(3, 4.0);
        let p = semiorthogonal_prox(h.as_ref(), &odd, 0.5, &x, 1.0).unwrap();
        assert_eq!(p, x);
    }

    #[test]
    fn composition_rules_reduce_to_plain_prox() {
        let h = huber(4, 0.3, 2.0);
        let x = v(&[1.0, -0.1, 3.0, 0.2]);
        let id: Arc<dyn LinearMap> = Arc::new(Identity { n: 4 });
        let direct = h.prox(&x, 0.4).unwrap();
        let semi = LinearComposition::new(h.clone(), id.clone(), CompositionRule::SemiOrthogonal(1.0)).unwrap();
        let ortho = LinearComposition::new(h.clone(), id, CompositionRule::Orthonormal).unwrap();
        assert_abs_diff_eq!((semi.prox(&x, 0.4).unwrap() - &direct).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((ortho.prox(&x, 0.4).unwrap() - &direct).norm(), 0.0, epsilon = 1e-15);

        let w: Arc<dyn LinearMap> = Arc::new(crate::operators::haar_transform(4, 0).unwrap());
        let p = orthonormal_prox(&Zero { dim: 4 }, w.as_ref(), &x, 1.0).unwrap();
        assert_abs_diff_eq!((p - &x).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn composition_rejects_wrong_structure() {
        let d: Arc<dyn LinearMap> = Arc::new(difference_operator(5));
        let h = huber(4, 1.0, 1.0);
        assert!(LinearComposition::new(h.clone(), d.clone(), CompositionRule::SemiOrthogonal(0.5)).is_err());
        assert!(LinearComposition::new(h.clone(), d.clone(), CompositionRule::Orthonormal).is_err());
        let plain = LinearComposition::new(h, d, CompositionRule::None).unwrap();
        assert!(!plain.has_prox());
        assert!(plain.prox(&Vector::zeros(5), 1.0).is_err());
    }

    #[test]
    fn split_constants() {
        let (mu, chi) = (1e-4, 0.7);
        let d = difference_operator(9);
        let (odd, even) = odd_even_split(&d);
        let g1 = LinearComposition::new(
            huber(odd_dim(&odd), mu, chi),
            Arc::new(odd),
            CompositionRule::SemiOrthogonal(0.5),
        )
        .unwrap();
        assert_abs_diff_eq!(1.0 / g1.grad_lipschitz(), 2.0 * mu / chi, epsilon = 1e-18);
        let g2 = LinearComposition::new(
            huber(odd_dim(&even), mu, chi),
            Arc::new(even),
            CompositionRule::SemiOrthogonal(0.5),
        )
        .unwrap();
        let ft = ShiftedQuadraticSum::new(Vector::zeros(9), Arc::new(g2)).unwrap();
        assert_abs_diff_eq!(1.0 / ft.grad_lipschitz(), mu / (mu + chi / 2.0), epsilon = 1e-15);
        assert_eq!(ft.strong_convexity(), 1.0);
    }

    fn odd_dim(m: &dyn LinearMap) -> usize {
        m.dim_out()
    }

    #[test]
    fn scaled_shifted_with_zero() {
        let z = v(&[1.0, 2.0]);
        let x = v(&[-1.0, 0.5]);
        let p = scaled_shifted_prox(&z, &Zero { dim: 2 }, &x, 3.0).unwrap();
        assert_abs_diff_eq!((p - (&x + &z * 3.0) / 4.0).norm(), 0.0, epsilon = 1e-15);
        let p = scaled_shifted_prox(&z, &Zero { dim: 2 }, &x, 1e-14).unwrap();
        assert_abs_diff_eq!((p - &x).norm(), 0.0, epsilon = 1e-12);
    }
}
