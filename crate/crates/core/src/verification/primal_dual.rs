//! The primal-dual pair of the minimization `|Ax - z|^2/2 + h(Dx)`:
//! `A(x, u) = (grad f(x) - eta x, grad h*(u) - eta u)` and
//! `B(x, u) = (eta x + D^T u, eta u - D x)`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, Matrix, Vector};
use crate::operators::{Quadratic, SmoothFunction};
use crate::verification::{check_cocoercive, check_strongly_monotone, CertificationReport, Sampler};

pub type ProductOperator = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PrimalDualConstants {
    /// Strong convexity of `f`.
    pub mu: f64,
    /// `|A|^2`, the gradient-Lipschitz constant of `f`.
    pub f_lipschitz: f64,
    /// Gradient-Lipschitz constant of `h`, so `h*` is `1/L`-strongly convex.
    pub h_lipschitz: f64,
    /// Strong convexity of `h` (`0` if unknown).
    pub h_strong_convexity: f64,
    pub eta: f64,
    pub b_norm: f64,
    pub a_strong_monotonicity: f64,
    /// Only meaningful when `h_strong_convexity > 0`.
    pub a_cocoercivity: f64,
    pub b_cocoercivity: f64,
    /// The weaker-looking `eta / |B|` variant, reported for comparison.
    pub b_cocoercivity_unsquared: f64,
}

pub struct PrimalDual {
    pub dim_x: usize,
    pub dim_u: usize,
    pub op_a: ProductOperator,
    pub op_b: ProductOperator,
    pub constants: PrimalDualConstants,
}

impl PrimalDual {
    pub fn dim(&self) -> usize {
        self.dim_x + self.dim_u
    }
}

/// `f` is the fidelity (strongly convex, smooth), `hstar` the conjugate of
/// `h` given through its gradient, `d` the coupling matrix (`K x N`).
pub fn build_primal_dual(
    f: Arc<dyn SmoothFunction>,
    hstar: Arc<dyn SmoothFunction>,
    d: Matrix,
    eta: f64,
) -> Result<PrimalDual> {
    let (n, k) = (f.dim(), hstar.dim());
    if d.nrows() != k || d.ncols() != n {
        return Err(Error::Construction(format!(
            "D must be {k}x{n}, got {}x{}",
            d.nrows(),
            d.ncols()
        )));
    }
    let mu = f.strong_convexity();
    let f_lipschitz = f.grad_lipschitz();
    let inv_l = hstar.strong_convexity();
    if !(inv_l > 0.0) {
        return Err(Error::Parameter("h must have a Lipschitz gradient (h* strongly convex)".into()));
    }
    let h_lipschitz = 1.0 / inv_l;
    let h_strong_convexity = if hstar.grad_lipschitz().is_finite() && hstar.grad_lipschitz() > 0.0 {
        1.0 / hstar.grad_lipschitz()
    } else {
        0.0
    };
    let cap = mu.min(inv_l);
    if !(eta > 0.0 && eta < cap) {
        return Err(Error::Parameter(format!(
            "eta must lie in ]0, min(mu, 1/L)[ = ]0, {cap}[, got {eta}"
        )));
    }

    let d_norm = spectral_norm(&d);
    let b_norm = (eta * eta + d_norm * d_norm).sqrt();
    let a_cocoercivity = if h_strong_convexity > 0.0 {
        h_strong_convexity.min(1.0 / f_lipschitz) / (1.0 + eta * (1.0 / mu).max(h_lipschitz)).powi(2)
    } else {
        0.0
    };
    let constants = PrimalDualConstants {
        mu,
        f_lipschitz,
        h_lipschitz,
        h_strong_convexity,
        eta,
        b_norm,
        a_strong_monotonicity: cap - eta,
        a_cocoercivity,
        b_cocoercivity: eta / (b_norm * b_norm),
        b_cocoercivity_unsquared: eta / b_norm,
    };

    let op_a: ProductOperator = Arc::new(move |v: &Vector| {
        let x = v.rows(0, n).into_owned();
        let u = v.rows(n, k).into_owned();
        let gx = f.gradient(&x) - &x * eta;
        let gu = hstar.gradient(&u) - &u * eta;
        concat(&gx, &gu)
    });
    let op_b: ProductOperator = Arc::new(move |v: &Vector| {
        let x = v.rows(0, n).into_owned();
        let u = v.rows(n, k).into_owned();
        let bx = &x * eta + d.tr_mul(&u);
        let bu = &u * eta - &d * &x;
        concat(&bx, &bu)
    });
    Ok(PrimalDual {
        dim_x: n,
        dim_u: k,
        op_a,
        op_b,
        constants,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PrimalDualSummary {
    pub instances: usize,
    pub pairs: usize,
    pub seed: u64,
    pub constants: Vec<PrimalDualConstants>,
    pub monotonicity: Vec<CertificationReport>,
    pub cocoercivity: Vec<CertificationReport>,
}

impl PrimalDualSummary {
    pub fn violated(&self) -> bool {
        self.monotonicity.iter().chain(&self.cocoercivity).any(|r| r.violated)
    }
}

/// Random instances with a Gaussian `A`, a diagonal quadratic `h*` and a
/// Gaussian coupling `D`; `eta` is drawn uniformly in `]0, min(mu, 1/L)[`.
pub fn primal_dual_suite(n_instances: usize, n_pairs: usize, seed: u64) -> Result<PrimalDualSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = PrimalDualSummary {
        instances: n_instances,
        pairs: n_pairs,
        seed,
        constants: Vec::new(),
        monotonicity: Vec::new(),
        cocoercivity: Vec::new(),
    };
    for i in 0..n_instances {
        let n = rng.random_range(2..=6);
        let k = rng.random_range(1..=6);
        let a = Matrix::from_fn(n + rng.random_range(0..=3), n, |_, _| StandardNormal.sample(&mut rng));
        let z = Vector::from_fn(a.nrows(), |_, _| StandardNormal.sample(&mut rng));
        let f: Arc<dyn SmoothFunction> = Arc::new(Quadratic::least_squares(&a, &z)?);
        let spectrum: Vec<f64> = (0..k).map(|_| 10f64.powf(rng.random_range(-1.0..1.0))).collect();
        let hstar: Arc<dyn SmoothFunction> = Arc::new(Quadratic::diagonal(&spectrum)?);
        let scale = 10f64.powf(rng.random_range(-1.0..1.0));
        let d = Matrix::from_fn(k, n, |_, _| scale * Distribution::<f64>::sample(&StandardNormal, &mut rng));
        let cap = f.strong_convexity().min(hstar.strong_convexity());
        let eta = cap * rng.random_range(0.01..0.99);
        let ex = build_primal_dual(f, hstar, d, eta)?;
        let sampler = Sampler::gaussian(ex.dim(), seed.wrapping_add(i as u64));
        let c = ex.constants;
        summary
            .monotonicity
            .push(check_strongly_monotone(ex.op_a.as_ref(), c.a_strong_monotonicity, &sampler, n_pairs));
        summary
            .cocoercivity
            .push(check_cocoercive(ex.op_b.as_ref(), c.b_cocoercivity, &sampler, n_pairs));
        summary.constants.push(c);
    }
    Ok(summary)
}

fn concat(a: &Vector, b: &Vector) -> Vector {
    Vector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}
