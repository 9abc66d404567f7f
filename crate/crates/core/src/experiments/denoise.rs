//! Huber-regularized denoising of a piecewise-constant signal,
//! `|x - z|^2/2 + chi h_mu(D x)`, in its plain and odd/even split forms.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{run_scheme, write_run_outputs, ParamsReport, Scheme, SchemeRun, SchemeSetup};
use crate::linalg::{gaussian_vector, Vector};
use crate::operators::{
    difference_operator, odd_even_split, CompositionRule, HuberParams, HuberPenalty,
    LinearComposition, LinearMap, ShiftedQuadraticSum, SmoothFunction, SquaredDistance,
};
use crate::rates::{Algorithm, ProblemParams};
use crate::solvers::{
    drs_operator, ea_operator, fbs_operator, prs_operator, reference_solution, ReferenceOptions,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DenoiseConfig {
    pub n: usize,
    pub n_segments: usize,
    pub noise_sigma: f64,
    pub chi: f64,
    pub mu: f64,
    pub algorithms: Vec<Scheme>,
    pub max_iter: usize,
    pub stop_tol: f64,
    pub seed: u64,
    /// Noisy signal to use instead of the synthetic one.
    pub observation: Option<PathBuf>,
}

impl Default for DenoiseConfig {
    fn default() -> Self {
        DenoiseConfig {
            n: 512,
            n_segments: 8,
            noise_sigma: 0.1,
            chi: 0.7,
            mu: 1e-4,
            algorithms: Scheme::DENOISE.to_vec(),
            max_iter: 2000,
            stop_tol: 1e-12,
            seed: 1,
            observation: None,
        }
    }
}

impl DenoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.observation.is_none() && self.n < 4 {
            return Err(Error::Parameter(format!("signal length must be at least 4, got {}", self.n)));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::Parameter(format!("noise_sigma must be nonnegative, got {}", self.noise_sigma)));
        }
        if self.n_segments == 0 {
            return Err(Error::Parameter("n_segments must be at least 1".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Parameter("max_iter must be at least 1".into()));
        }
        HuberParams::new(self.mu, self.chi)?;
        Ok(())
    }
}

/// `n` samples, `segments` constant pieces with breakpoints and levels drawn
/// uniformly (levels in `[0, 1]`).
pub fn piecewise_constant(n: usize, segments: usize, rng: &mut ChaCha8Rng) -> Vector {
    let segments = segments.clamp(1, n.max(1));
    let mut cuts: Vec<usize> = Vec::with_capacity(segments + 1);
    cuts.push(0);
    while cuts.len() < segments {
        let c = rng.random_range(1..n);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    cuts.push(n);
    let mut x = Vector::zeros(n);
    for w in cuts.windows(2) {
        let level: f64 = rng.random_range(0.0..=1.0);
        for i in w[0]..w[1] {
            x[i] = level;
        }
    }
    x
}

#[derive(Debug, Clone, Serialize)]
pub struct DenoiseResult {
    pub config: DenoiseConfig,
    /// `f = |. - z|^2/2`, `g = chi h_mu o D`.
    pub unsplit: ParamsReport,
    /// `f~ = f + chi h o D_I2`, `g~ = chi h o D_I1`.
    pub split: ParamsReport,
    pub d_norm_sq: f64,
    pub reference_iterations: usize,
    pub reference_residual: f64,
    pub runs: Vec<SchemeRun>,
    #[serde(skip)]
    pub ground_truth: Option<Vector>,
    #[serde(skip)]
    pub observation: Vector,
    #[serde(skip)]
    pub reference: Vector,
}

fn huber_on(dim: usize, params: HuberParams) -> Arc<dyn SmoothFunction> {
    Arc::new(HuberPenalty::new(dim, params))
}

pub fn run_denoise(cfg: &DenoiseConfig) -> Result<DenoiseResult> {
    cfg.validate()?;
    let huber = HuberParams::new(cfg.mu, cfg.chi)?;
    let (ground_truth, z) = match &cfg.observation {
        Some(path) => {
            let z = Vector::from_vec(crate::io::read_signal(path)?);
            if z.len() < 4 {
                return Err(Error::Parameter(format!("observation has {} samples, need at least 4", z.len())));
            }
            (None, z)
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let truth = piecewise_constant(cfg.n, cfg.n_segments, &mut rng);
            let z = &truth + gaussian_vector(cfg.n, &mut rng) * cfg.noise_sigma;
            (Some(truth), z)
        }
    };
    let n = z.len();

    let d = difference_operator(n);
    let d_norm_sq = d.exact_norm_sq().unwrap_or(1.0);
    let (odd, even) = odd_even_split(&d);

    let f: Arc<dyn SmoothFunction> = Arc::new(SquaredDistance { z: z.clone() });
    let g: Arc<dyn SmoothFunction> = Arc::new(LinearComposition::new(
        huber_on(d.dim_out(), huber),
        Arc::new(d),
        CompositionRule::None,
    )?);
    let g_odd: Arc<dyn SmoothFunction> = Arc::new(LinearComposition::new(
        huber_on(odd.dim_out(), huber),
        Arc::new(odd),
        CompositionRule::SemiOrthogonal(0.5),
    )?);
    let g_even: Arc<dyn SmoothFunction> = Arc::new(LinearComposition::new(
        huber_on(even.dim_out(), huber),
        Arc::new(even),
        CompositionRule::SemiOrthogonal(0.5),
    )?);
    let f_split: Arc<dyn SmoothFunction> = Arc::new(ShiftedQuadraticSum::new(z.clone(), g_even)?);

    let unsplit = ProblemParams::new(1.0, cfg.mu / (cfg.chi * d_norm_sq), 1.0)?;
    let split = ProblemParams::new(1.0 / f_split.grad_lipschitz(), 1.0 / g_odd.grad_lipschitz(), 1.0)?;

    let reference = reference_solution(f_split.clone(), g_odd.clone(), &split, &z, ReferenceOptions::default())?;

    let setups: Vec<SchemeSetup> = cfg
        .algorithms
        .iter()
        .map(|&scheme| {
            let (f, g, fs, gs, z) = (f.clone(), g.clone(), f_split.clone(), g_odd.clone(), z.clone());
            match scheme {
                Scheme::Ea => SchemeSetup {
                    scheme,
                    algorithm: Algorithm::Ea,
                    params: unsplit,
                    build: Box::new(move |tau| ea_operator(f.clone(), g.clone(), tau)),
                    start: z.clone(),
                    lift: None,
                },
                Scheme::Fbs => SchemeSetup {
                    scheme,
                    algorithm: Algorithm::FbsGradGProxF,
                    params: unsplit,
                    build: Box::new(move |tau| fbs_operator(f.clone(), g.clone(), tau)),
                    start: z.clone(),
                    lift: None,
                },
                Scheme::Fbs2 => SchemeSetup {
                    scheme,
                    algorithm: Algorithm::FbsGradFProxG,
                    params: split,
                    build: Box::new(move |tau| fbs_operator(gs.clone(), fs.clone(), tau)),
                    start: z.clone(),
                    lift: None,
                },
                Scheme::Fbs3 => SchemeSetup {
                    scheme,
                    algorithm: Algorithm::FbsGradGProxF,
                    params: split,
                    build: Box::new(move |tau| fbs_operator(fs.clone(), gs.clone(), tau)),
                    start: z.clone(),
                    lift: None,
                },
                Scheme::Prs | Scheme::Drs => {
                    let fx = fs.clone();
                    SchemeSetup {
                        scheme,
                        algorithm: if scheme == Scheme::Prs { Algorithm::Prs } else { Algorithm::Drs },
                        params: split,
                        build: Box::new(move |tau| {
                            if scheme == Scheme::Prs {
                                prs_operator(fs.clone(), gs.clone(), tau)
                            } else {
                                drs_operator(fs.clone(), gs.clone(), tau)
                            }
                        }),
                        // recover(x0) = prox_{tau f~}(x0) = z
                        start: z,
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

    Ok(DenoiseResult {
        config: cfg.clone(),
        unsplit: ParamsReport::from_params(&unsplit),
        split: ParamsReport::from_params(&split),
        d_norm_sq,
        reference_iterations: reference.iterations,
        reference_residual: reference.residual,
        runs,
        ground_truth,
        observation: z,
        reference: reference.x,
    })
}

impl DenoiseResult {
    pub fn run(&self, scheme: Scheme) -> Option<&SchemeRun> {
        self.runs.iter().find(|r| r.scheme == scheme)
    }

    pub fn params_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).unwrap_or_default();
        v["notes"] = serde_json::json!({
            "ground_truth": "piecewise constant, uniform breakpoints, levels uniform in [0, 1]",
            "signal_length_and_noise": "desk-scale defaults, not stated for the original experiment",
        });
        v
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let n = self.reference.len();
        write_run_outputs(
            dir,
            &self.params_json(),
            &self.runs,
            &format!("denoising, chi = {}, mu = {}", self.config.chi, self.config.mu),
            &self.reference,
            &[n],
        )
    }
}
