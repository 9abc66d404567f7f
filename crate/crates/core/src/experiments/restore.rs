//! Restoration `|A x - z|^2/2 + chi h_mu(W x)` with a Gaussian `A` and an
//! orthonormal Haar `W`.

use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{piecewise_constant, run_scheme, write_run_outputs, ParamsReport, Scheme, SchemeRun, SchemeSetup};
use crate::linalg::{gaussian_vector, power_iteration, Matrix, PowerOptions, Vector};
use crate::operators::{
    CompositionRule, HaarTransform, HuberParams, HuberPenalty, LinearComposition, Quadratic,
    SmoothFunction,
};
use crate::rates::{Algorithm, ProblemParams};
use crate::regions::{classify, RegionLabel, RegionPoint};
use crate::solvers::{drs_operator, fbs_operator, prs_operator, reference_solution, ReferenceOptions};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RestoreConfig {
    pub n_pixels: usize,
    pub m_rows: usize,
    pub chi: f64,
    pub mu: f64,
    pub wavelet_levels: usize,
    pub algorithms: Vec<Scheme>,
    pub noise_sigma: f64,
    pub max_iter: usize,
    pub stop_tol: f64,
    pub seed: u64,
}

impl Default for RestoreConfig {
    fn default() -> Self {
        RestoreConfig {
            n_pixels: 1024,
            m_rows: 1229,
            chi: 10.0,
            mu: 1.0,
            wavelet_levels: 3,
            algorithms: Scheme::RESTORE.to_vec(),
            noise_sigma: 0.05,
            max_iter: 1000,
            stop_tol: 1e-12,
            seed: 1,
        }
    }
}

impl RestoreConfig {
    /// The original problem size: 4096 pixels, 4900 measurements.
    pub fn full_size(self) -> Self {
        RestoreConfig {
            n_pixels: 4096,
            m_rows: 4900,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n_pixels.is_power_of_two() || self.n_pixels < 2 {
            return Err(Error::Parameter(format!("n_pixels must be a power of two, got {}", self.n_pixels)));
        }
        if self.m_rows < self.n_pixels {
            return Err(Error::Parameter(format!(
                "m_rows = {} must be at least n_pixels = {}",
                self.m_rows, self.n_pixels
            )));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::Parameter(format!("noise_sigma must be nonnegative, got {}", self.noise_sigma)));
        }
        if self.max_iter == 0 {
            return Err(Error::Parameter("max_iter must be at least 1".into()));
        }
        if let Some(s) = self.algorithms.iter().find(|s| !Scheme::RESTORE.contains(s)) {
            return Err(Error::Parameter(format!("{s} is not a restoration scheme (use FBS, PRS, DRS)")));
        }
        HuberParams::new(self.mu, self.chi)?;
        Ok(())
    }
}

/// I.i.d. Gaussian `m x n` matrix rescaled so that `lambda_max(A^T A) = 1`.
pub fn gaussian_operator(m: usize, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let a = Matrix::from_fn(m, n, |_, _| StandardNormal.sample(rng));
    let top = power_iteration(
        n,
        |v| a.tr_mul(&(&a * v)),
        PowerOptions {
            max_sweeps: 10_000,
            tol: 1e-13,
            seed: rng.random(),
        },
    );
    a / top.value.sqrt()
}

/// Square image of random axis-aligned rectangles with levels in `[0, 1]`.
pub fn rectangle_phantom(side: usize, n_rects: usize, rng: &mut ChaCha8Rng) -> Vector {
    let mut img = Vector::zeros(side * side);
    for _ in 0..n_rects {
        let (r0, c0) = (rng.random_range(0..side), rng.random_range(0..side));
        let (h, w) = (rng.random_range(1..=side / 2 + 1), rng.random_range(1..=side / 2 + 1));
        let level: f64 = rng.random_range(0.0..=1.0);
        for r in r0..(r0 + h).min(side) {
            for c in c0..(c0 + w).min(side) {
                img[r * side + c] = level;
            }
        }
    }
    img
}

#[derive(Debug, Clone, Serialize)]
pub struct RestoreResult {
    pub config: RestoreConfig,
    pub params: ParamsReport,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Label of `(beta / alpha, rho alpha)`; absent outside the plane.
    pub predicted: Option<RegionLabel>,
    pub reference_iterations: usize,
    pub reference_residual: f64,
    pub runs: Vec<SchemeRun>,
    pub image_shape: Vec<usize>,
    #[serde(skip)]
    pub ground_truth: Vector,
    #[serde(skip)]
    pub observation: Vector,
    #[serde(skip)]
    pub reference: Vector,
    #[serde(skip)]
    pub normal_residual: f64,
}

pub fn run_restore(cfg: &RestoreConfig) -> Result<RestoreResult> {
    cfg.validate()?;
    let huber = HuberParams::new(cfg.mu, cfg.chi)?;
    let n = cfg.n_pixels;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let w = HaarTransform::for_pixels(n, cfg.wavelet_levels)?;
    let (truth, image_shape) = match w.shape() {
        crate::operators::haar::HaarShape::Image(side) => (rectangle_phantom(side, 6, &mut rng), vec![side, side]),
        crate::operators::haar::HaarShape::Signal(_) => (piecewise_constant(n, 8, &mut rng), vec![n]),
    };
    let a = gaussian_operator(cfg.m_rows, n, &mut rng);
    let z = &a * &truth + gaussian_vector(cfg.m_rows, &mut rng) * cfg.noise_sigma;

    let fidelity = Quadratic::least_squares(&a, &z)?;
    let lambda_min = fidelity.strong_convexity();
    let lambda_max = fidelity.grad_lipschitz();
    if !(lambda_min > 0.0) {
        return Err(Error::Domain("A^T A is singular: the fidelity is not strongly convex".into()));
    }
    let f: Arc<dyn SmoothFunction> = Arc::new(fidelity);
    let g: Arc<dyn SmoothFunction> = Arc::new(LinearComposition::new(
        Arc::new(HuberPenalty::new(n, huber)),
        Arc::new(w),
        CompositionRule::Orthonormal,
    )?);
    let params = ProblemParams::new(1.0 / lambda_max, 1.0 / g.grad_lipschitz(), lambda_min)?;
    let predicted = RegionPoint::normalized(params.alpha(), params.beta(), params.rho())
        .ok()
        .map(|p| classify(&p));

    let back = a.tr_mul(&z);
    let reference = reference_solution(f.clone(), g.clone(), &params, &back, ReferenceOptions::default())?;

    let setups: Vec<SchemeSetup> = cfg
        .algorithms
        .iter()
        .map(|&scheme| {
            let (f, g, u) = (f.clone(), g.clone(), back.clone());
            match scheme {
                Scheme::Fbs => SchemeSetup {
                    scheme,
                    algorithm: Algorithm::FbsGradGProxF,
                    params,
                    build: Box::new(move |tau| fbs_operator(f.clone(), g.clone(), tau)),
                    start: u,
                    lift: None,
                },
                _ => {
                    let fx = f.clone();
                    let prs = scheme == Scheme::Prs;
                    SchemeSetup {
                        scheme,
                        algorithm: if prs { Algorithm::Prs } else { Algorithm::Drs },
                        params,
                        build: Box::new(move |tau| {
                            if prs {
                                prs_operator(f.clone(), g.clone(), tau)
                            } else {
                                drs_operator(f.clone(), g.clone(), tau)
                            }
                        }),
                        start: u,
                        lift: Some(fx),
                    }
                }
            }
        })
        .collect();
    let runs: Vec<SchemeRun> = setups
        .par_iter()
        .map(|s| run_scheme(s, &reference.x, cfg.max_iter, cfg.stop_tol))
        .collect();

    let normal_residual = (a.tr_mul(&(&a * &reference.x - &z))).norm();
    Ok(RestoreResult {
        config: cfg.clone(),
        params: ParamsReport::from_params(&params),
        lambda_min,
        lambda_max,
        predicted,
        reference_iterations: reference.iterations,
        reference_residual: reference.residual,
        runs,
        image_shape,
        ground_truth: truth,
        observation: z,
        reference: reference.x,
        normal_residual,
    })
}

impl RestoreResult {
    pub fn run(&self, scheme: Scheme) -> Option<&SchemeRun> {
        self.runs.iter().find(|r| r.scheme == scheme)
    }

    /// `|A^T (A x - z)|` at the reference solution.
    pub fn normal_equation_residual(&self) -> f64 {
        self.normal_residual
    }

    /// Scheme with the smallest theoretical optimal rate.
    pub fn theoretical_winner(&self) -> Option<Scheme> {
        self.runs
            .iter()
            .filter(|r| r.rate.is_finite())
            .min_by(|a, b| a.rate.total_cmp(&b.rate))
            .map(|r| r.scheme)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut params = serde_json::to_value(self)?;
        params["notes"] = serde_json::json!({
            "wavelet": "orthonormal Haar, unit weights",
            "lambda_min": "measured on this draw of A",
        });
        write_run_outputs(
            dir,
            &params,
            &self.runs,
            &format!("restoration, beta = mu/chi = {}", self.params.beta),
            &self.reference,
            &self.image_shape,
        )
    }
}
