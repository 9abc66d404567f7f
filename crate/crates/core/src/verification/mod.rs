//! Sampling-based certification of cocoercivity, strong monotonicity,
//! Lipschitz and averagedness claims. For affine maps the exact Lipschitz
//! factor is also computed from the materialized linear part.

mod primal_dual;
mod fuzz;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::linalg::{gaussian_vector, materialize_affine, spectral_norm, Vector};

pub use primal_dual::{build_primal_dual, primal_dual_suite, PrimalDual, PrimalDualConstants, PrimalDualSummary};
pub use fuzz::{
    averagedness_suite, contraction_suite, tightness_witness, AveragednessSummary,
    ContractionCase, ContractionSummary, Tightness,
};

/// Gaussian pairs `(s g1, s g2)` cycling through the configured scales.
#[derive(Debug, Clone)]
pub struct Sampler {
    pub dim: usize,
    pub scales: Vec<f64>,
    pub seed: u64,
    /// Violation threshold on margins normalized by `|x - y|^2`.
    pub tol: f64,
}

impl Sampler {
    pub fn gaussian(dim: usize, seed: u64) -> Self {
        Sampler {
            dim,
            scales: vec![1e-2, 1.0, 1e2],
            seed,
            tol: 1e-10,
        }
    }

    pub fn pairs(&self, n: usize) -> Vec<(Vector, Vector)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..n)
            .map(|i| {
                let s = self.scales[i % self.scales.len()];
                (
                    gaussian_vector(self.dim, &mut rng) * s,
                    gaussian_vector(self.dim, &mut rng) * s,
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    pub claim: String,
    pub constant: f64,
    pub samples: usize,
    /// Smallest `(lhs - rhs) / |x - y|^2` (Lipschitz: `/ |x - y|`).
    pub worst_margin: f64,
    pub violated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_factor: Option<f64>,
}

fn run_check<F, M>(claim: &str, constant: f64, op: F, sampler: &Sampler, n_pairs: usize, margin: M) -> CertificationReport
where
    F: Fn(&Vector) -> Vector,
    M: Fn(&Vector, &Vector) -> f64,
{
    let mut worst = f64::INFINITY;
    let mut witness = None;
    let mut samples = 0;
    for (x, y) in sampler.pairs(n_pairs.max(1)) {
        let d = &x - &y;
        if d.norm() == 0.0 {
            continue;
        }
        samples += 1;
        let delta = op(&x) - op(&y);
        let m = margin(&d, &delta);
        if m < worst {
            worst = m;
            witness = Some(Witness {
                x: x.iter().copied().collect(),
                y: y.iter().copied().collect(),
            });
        }
    }
    let violated = worst < -sampler.tol;
    CertificationReport {
        claim: claim.into(),
        constant,
        samples,
        worst_margin: worst,
        violated,
        witness: if violated { witness } else { None },
        seed: sampler.seed,
        exact_factor: None,
    }
}

/// `<Mx - My, x - y> >= eta |Mx - My|^2`.
pub fn check_cocoercive<F: Fn(&Vector) -> Vector>(op: F, eta: f64, sampler: &Sampler, n_pairs: usize) -> CertificationReport {
    run_check("cocoercive", eta, op, sampler, n_pairs, |d, delta| {
        (delta.dot(d) - eta * delta.norm_squared()) / d.norm_squared()
    })
}

/// `<Mx - My, x - y> >= rho |x - y|^2`.
pub fn check_strongly_monotone<F: Fn(&Vector) -> Vector>(op: F, rho: f64, sampler: &Sampler, n_pairs: usize) -> CertificationReport {
    run_check("strongly monotone", rho, op, sampler, n_pairs, |d, delta| {
        delta.dot(d) / d.norm_squared() - rho
    })
}

/// `|Mx - My| <= omega |x - y|` on samples.
pub fn check_lipschitz<F: Fn(&Vector) -> Vector>(op: F, omega: f64, sampler: &Sampler, n_pairs: usize) -> CertificationReport {
    run_check("lipschitz", omega, op, sampler, n_pairs, |d, delta| {
        omega - delta.norm() / d.norm()
    })
}

/// As [`check_lipschitz`] for an affine map, plus its exact factor (largest
/// singular value of the linear part), which decides the verdict.
pub fn check_lipschitz_affine<F: Fn(&Vector) -> Vector>(op: F, omega: f64, sampler: &Sampler, n_pairs: usize) -> CertificationReport {
    let exact = spectral_norm(&materialize_affine(sampler.dim, &op));
    let mut report = check_lipschitz(&op, omega, sampler, n_pairs);
    report.claim = "lipschitz (affine)".into();
    report.exact_factor = Some(exact);
    report.violated = exact > omega + sampler.tol;
    report
}

/// `|Mx - My|^2 <= |x - y|^2 - (1 - mu)/mu |(x - Mx) - (y - My)|^2`.
pub fn check_averaged<F: Fn(&Vector) -> Vector>(op: F, mu: f64, sampler: &Sampler, n_pairs: usize) -> CertificationReport {
    run_check("averaged", mu, op, sampler, n_pairs, |d, delta| {
        let rest = d - delta;
        (d.norm_squared() - (1.0 - mu) / mu * rest.norm_squared() - delta.norm_squared()) / d.norm_squared()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{HuberParams, HuberPenalty, Quadratic, SmoothFunction};
    use crate::linalg::Matrix;

    #[test]
    fn cocoercive_examples() {
        let s = Sampler::gaussian(4, 1);
        assert!(!check_cocoercive(|x: &Vector| x.clone(), 1.0, &s, 200).violated);
        let r = check_cocoercive(|x: &Vector| x * 2.0, 1.0, &s, 200);
        assert!(r.violated);
        assert!(r.witness.is_some());
        let h = HuberPenalty::new(4, HuberParams::new(0.3, 1.0).unwrap());
        assert!(!check_cocoercive(|x: &Vector| h.gradient(x), 0.3, &s, 10_000).violated);
    }

    #[test]
    fn strong_monotonicity_examples() {
        let s = Sampler::gaussian(3, 2);
        assert!(!check_strongly_monotone(|x: &Vector| x.clone(), 1.0, &s, 100).violated);
        assert!(check_strongly_monotone(|x: &Vector| x * 0.0, 0.1, &s, 100).violated);
        let a = Matrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.0, 1.5, 0.3, 0.1, 0.0, 0.7]);
        let f = crate::operators::quadratic_fidelity(&crate::operators::DenseMap::new(a), &Vector::zeros(3)).unwrap();
        let rho = f.strong_convexity();
        assert!(!check_strongly_monotone(|x: &Vector| f.gradient(x), rho, &s, 1000).violated);
    }

    #[test]
    fn lipschitz_examples() {
        let s = Sampler::gaussian(2, 3);
        let r = check_lipschitz_affine(|x: &Vector| x * 0.5, 0.5, &s, 100);
        assert!(!r.violated);
        assert!(r.worst_margin.abs() < 1e-15);
        assert!((r.exact_factor.unwrap() - 0.5).abs() < 1e-15);
        let r = check_lipschitz_affine(|x: &Vector| x * 0.5, 0.49, &s, 100);
        assert!(r.violated);
    }

    #[test]
    fn averaged_examples() {
        let s = Sampler::gaussian(3, 4);
        assert!(!check_averaged(|x: &Vector| x.clone(), 0.3, &s, 100).violated);
        // a constant map is 1/2-averaged but not 0.1-averaged
        let c = Vector::from_element(3, 1.0);
        assert!(!check_averaged(|_: &Vector| c.clone(), 0.5, &s, 100).violated);
        assert!(check_averaged(|_: &Vector| c.clone(), 0.1, &s, 100).violated);
        // gradient step on a 1-smooth quadratic with tau = 1 is 1/2-averaged
        let q = Quadratic::diagonal(&[1.0, 0.5, 0.0]).unwrap();
        assert!(!check_averaged(|x: &Vector| x - q.gradient(x), 0.5, &s, 1000).violated);
    }

    #[test]
    fn report_serializes() {
        let s = Sampler::gaussian(2, 9);
        let r = check_cocoercive(|x: &Vector| x * 2.0, 1.0, &s, 10);
        let json = serde_json::to_value(&r).unwrap();
        for key in ["claim", "constant", "samples", "worst_margin", "witness", "seed"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}
