//! Randomized suites comparing exact contraction factors of the splitting
//! operators on quadratic and linear instances with the closed-form rates.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{gaussian_vector, materialize_affine, spectral_norm, Matrix, Vector};
use crate::operators::{Quadratic, SmoothFunction};
use crate::rates::{
    admissible_interval, averaged_constant, coco_rate, opt_optimal, coco_optimal, opt_rate,
    Algorithm, ProblemParams, Setting,
};
use crate::solvers::{drs_operator, ea_operator, fbs_operator, prs_operator, FixedPointOperator};
use crate::verification::{check_averaged, CertificationReport, Sampler};

const TWO_OPERATOR: [Algorithm; 5] = [
    Algorithm::Ea,
    Algorithm::FbsGradFProxG,
    Algorithm::FbsGradGProxF,
    Algorithm::Prs,
    Algorithm::Drs,
];

#[derive(Debug, Clone, Serialize)]
pub struct ContractionCase {
    pub setting: Setting,
    pub algorithm: Algorithm,
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub tau: f64,
    pub dim: usize,
    pub claimed: f64,
    pub exact: f64,
}

impl ContractionCase {
    pub fn excess(&self) -> f64 {
        self.exact - self.claimed
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionSummary {
    pub cases: usize,
    pub checks: usize,
    pub tol: f64,
    pub seed: u64,
    pub worst_excess: f64,
    pub worst: Option<ContractionCase>,
    pub violations: Vec<ContractionCase>,
}

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let g = Matrix::from_fn(n, n, |_, _| rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, rng));
    g.qr().q()
}

/// Spectrum spanning `[lo, hi]` with both ends attained.
fn spectrum(n: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut s: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    s[0] = lo;
    if n > 1 {
        s[n - 1] = hi;
    }
    s
}

fn rotated(eigs: &[f64], q: Option<&Matrix>) -> Matrix {
    let d = Matrix::from_diagonal(&Vector::from_column_slice(eigs));
    match q {
        Some(q) => q * d * q.transpose(),
        None => d,
    }
}

fn random_params(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let alpha = 10f64.powf(rng.random_range(-1.0..1.0));
    let beta = if rng.random_bool(0.05) {
        f64::INFINITY
    } else {
        10f64.powf(rng.random_range(-1.5..1.5))
    };
    let rho = 10f64.powf(rng.random_range(-3.0..0.0)) / alpha;
    (alpha, beta, rho)
}

fn random_tau(
    setting: Setting,
    algorithm: Algorithm,
    params: &ProblemParams,
    rng: &mut ChaCha8Rng,
) -> f64 {
    if rng.random_bool(0.25) {
        let best = match setting {
            Setting::Cocoercive => coco_optimal(algorithm, params),
            Setting::Optimization => opt_optimal(algorithm, params),
        };
        if let Ok(c) = best {
            if admissible_interval(algorithm, params).contains(c.tau_star) {
                return c.tau_star;
            }
        }
    }
    let interval = admissible_interval(algorithm, params);
    if interval.upper.is_finite() {
        if interval.closed && rng.random_bool(0.1) {
            interval.upper
        } else {
            interval.upper * rng.random_range(0.01..0.99)
        }
    } else {
        (params.alpha() / params.rho()).sqrt() * 10f64.powf(rng.random_range(-2.0..2.0))
    }
}

/// The operator of `algorithm` for `f + g`, with `f` the strongly convex term.
pub(crate) fn splitting_operator(
    algorithm: Algorithm,
    f: Arc<dyn SmoothFunction>,
    g: Arc<dyn SmoothFunction>,
    tau: f64,
) -> Result<FixedPointOperator> {
    match algorithm {
        Algorithm::Ea => ea_operator(f, g, tau),
        Algorithm::FbsGradFProxG => fbs_operator(g, f, tau),
        Algorithm::FbsGradGProxF => fbs_operator(f, g, tau),
        Algorithm::Prs => prs_operator(f, g, tau),
        _ => drs_operator(f, g, tau),
    }
}

fn exact_factor(op: &FixedPointOperator) -> f64 {
    spectral_norm(&materialize_affine(op.dim(), |x| op.apply(x).expect("quadratic prox")))
}

/// Exact factors of the linear-operator versions of the five maps for
/// `A` and `B` given as matrices.
fn linear_factor(algorithm: Algorithm, a: &Matrix, b: &Matrix, tau: f64) -> f64 {
    let n = a.nrows();
    let id = Matrix::identity(n, n);
    let resolvent = |m: &Matrix| (&id + m * tau).try_inverse().expect("monotone resolvent");
    let m = match algorithm {
        Algorithm::Ea => &id - (a + b) * tau,
        Algorithm::FbsGradFProxG => resolvent(b) * (&id - a * tau),
        Algorithm::FbsGradGProxF => resolvent(a) * (&id - b * tau),
        _ => {
            let r = (resolvent(b) * 2.0 - &id) * (resolvent(a) * 2.0 - &id);
            if algorithm == Algorithm::Prs {
                r
            } else {
                (&id + r) * 0.5
            }
        }
    };
    spectral_norm(&m)
}

fn optimization_case(rng: &mut ChaCha8Rng) -> Result<Vec<ContractionCase>> {
    let (alpha, beta, rho) = random_params(rng);
    let params = ProblemParams::new(alpha, beta, rho)?;
    let n = rng.random_range(2..=6);
    let hf = rotated(&spectrum(n, rho, 1.0 / alpha, rng), None);
    let q = random_orthogonal(n, rng);
    let gq = if rng.random_bool(0.5) { Some(&q) } else { None };
    let hg = rotated(&spectrum(n, 0.0, params.inv_beta(), rng), gq);
    let f: Arc<dyn SmoothFunction> = Arc::new(Quadratic::new(hf, gaussian_vector(n, rng), 0.0)?);
    let g: Arc<dyn SmoothFunction> = Arc::new(Quadratic::new(hg, gaussian_vector(n, rng), 0.0)?);
    let mut out = Vec::new();
    for algorithm in TWO_OPERATOR {
        let tau = random_tau(Setting::Optimization, algorithm, &params, rng);
        let claimed = opt_rate(algorithm, &params, tau)?;
        let op = splitting_operator(algorithm, f.clone(), g.clone(), tau)?;
        out.push(ContractionCase {
            setting: Setting::Optimization,
            algorithm,
            alpha,
            beta,
            rho,
            tau,
            dim: n,
            claimed,
            exact: exact_factor(&op),
        });
    }
    Ok(out)
}

fn cocoercive_case(rng: &mut ChaCha8Rng) -> Result<Vec<ContractionCase>> {
    let (alpha, beta, _) = random_params(rng);
    let n = rng.random_range(2..=6);
    let id = Matrix::identity(n, n);
    let c_a = rng.random_range(0.2..0.95);
    let a = (&id + random_orthogonal(n, rng) * c_a) / (2.0 * alpha);
    let b = if beta.is_finite() {
        let c_b = rng.random_range(0.0..=1.0);
        (&id + random_orthogonal(n, rng) * c_b) / (2.0 * beta)
    } else {
        Matrix::zeros(n, n)
    };
    let sym = (&a + a.transpose()) * 0.5;
    let rho = sym.symmetric_eigenvalues().min().min(1.0 / alpha);
    let params = ProblemParams::new(alpha, beta, rho)?;
    let mut out = Vec::new();
    for algorithm in TWO_OPERATOR {
        let tau = random_tau(Setting::Cocoercive, algorithm, &params, rng);
        out.push(ContractionCase {
            setting: Setting::Cocoercive,
            algorithm,
            alpha,
            beta,
            rho,
            tau,
            dim: n,
            claimed: coco_rate(algorithm, &params, tau)?,
            exact: linear_factor(algorithm, &a, &b, tau),
        });
    }
    Ok(out)
}

/// `n_cases` random instances per setting, every two-operator algorithm on
/// each. A check fails when the exact factor exceeds the claim by `tol`.
pub fn contraction_suite(n_cases: usize, seed: u64, tol: f64) -> Result<ContractionSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all = Vec::new();
    for _ in 0..n_cases {
        all.extend(optimization_case(&mut rng)?);
        all.extend(cocoercive_case(&mut rng)?);
    }
    let worst = all
        .iter()
        .max_by(|x, y| x.excess().total_cmp(&y.excess()))
        .cloned();
    Ok(ContractionSummary {
        cases: n_cases,
        checks: all.len(),
        tol,
        seed,
        worst_excess: worst.as_ref().map_or(f64::NEG_INFINITY, |w| w.excess()),
        violations: all.iter().filter(|c| c.excess() > tol).cloned().collect(),
        worst,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tightness {
    pub exact: f64,
    pub claimed: f64,
}

/// Gradient step on `f` with Hessian `diag(rho, 1/alpha)` plus `g` with
/// `diag(0, 1/beta)`: the factor of `Id - tau (H_f + H_g)` equals the
/// optimization rate of EA.
pub fn tightness_witness(params: &ProblemParams, tau: f64) -> Result<Tightness> {
    let f: Arc<dyn SmoothFunction> = Arc::new(Quadratic::diagonal(&[params.rho(), 1.0 / params.alpha()])?);
    let g: Arc<dyn SmoothFunction> = Arc::new(Quadratic::diagonal(&[0.0, params.inv_beta()])?);
    let op = ea_operator(f, g, tau)?;
    Ok(Tightness {
        exact: exact_factor(&op),
        claimed: opt_rate(Algorithm::Ea, params, tau)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AveragednessSummary {
    pub reports: Vec<(Algorithm, CertificationReport)>,
}

impl AveragednessSummary {
    pub fn violated(&self) -> bool {
        self.reports.iter().any(|(_, r)| r.violated)
    }
}

/// Averagedness of EA, forward-backward, PRS and DRS at `rho = 0` on random
/// convex quadratic pairs, `n_pairs` samples per operator and instance.
pub fn averagedness_suite(n_instances: usize, n_pairs: usize, seed: u64) -> Result<AveragednessSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    for i in 0..n_instances {
        let alpha = 10f64.powf(rng.random_range(-1.0..1.0));
        let beta = 10f64.powf(rng.random_range(-1.0..1.0));
        let params = ProblemParams::new(alpha, beta, 0.0)?;
        let n = rng.random_range(2..=6);
        let qf = random_orthogonal(n, &mut rng);
        let qg = random_orthogonal(n, &mut rng);
        let hf = rotated(&spectrum(n, 0.0, 1.0 / alpha, &mut rng), Some(&qf));
        let hg = rotated(&spectrum(n, 0.0, 1.0 / beta, &mut rng), Some(&qg));
        let f: Arc<dyn SmoothFunction> = Arc::new(Quadratic::new(hf, gaussian_vector(n, &mut rng), 0.0)?);
        let g: Arc<dyn SmoothFunction> = Arc::new(Quadratic::new(hg, gaussian_vector(n, &mut rng), 0.0)?);
        for algorithm in [Algorithm::Ea, Algorithm::FbsGradFProxG, Algorithm::Prs, Algorithm::Drs] {
            let interval = admissible_interval(algorithm, &params);
            let tau = if interval.upper.is_finite() {
                interval.upper * rng.random_range(0.01..0.99)
            } else {
                10f64.powf(rng.random_range(-1.5..1.5))
            };
            let mu = averaged_constant(algorithm, alpha, beta, tau)?;
            let op = splitting_operator(algorithm, f.clone(), g.clone(), tau)?;
            let sampler = Sampler::gaussian(n, seed.wrapping_add(i as u64 * 7919));
            let report = check_averaged(|x: &Vector| op.apply(x).expect("quadratic prox"), mu, &sampler, n_pairs);
            reports.push((algorithm, report));
        }
    }
    Ok(AveragednessSummary { reports })
}
