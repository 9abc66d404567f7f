//! Desk-scale versions of the denoising and image-restoration benchmarks.

mod denoise;
mod restore;

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::operators::SmoothFunction;
use crate::plot::plot_traces;
use crate::rates::{opt_optimal, Algorithm, ProblemParams};
use crate::solvers::{banach_picard, empirical_rate, first_below, FixedPointOperator, IterationTrace, PicardOptions};

pub use denoise::{piecewise_constant, run_denoise, DenoiseConfig, DenoiseResult};
pub use restore::{gaussian_operator, rectangle_phantom, run_restore, RestoreConfig, RestoreResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "EA")]
    Ea,
    #[serde(rename = "FBS")]
    Fbs,
    #[serde(rename = "FBS2")]
    Fbs2,
    #[serde(rename = "FBS3")]
    Fbs3,
    #[serde(rename = "PRS")]
    Prs,
    #[serde(rename = "DRS")]
    Drs,
}

impl Scheme {
    pub const DENOISE: [Scheme; 6] = [Scheme::Ea, Scheme::Fbs, Scheme::Fbs2, Scheme::Fbs3, Scheme::Prs, Scheme::Drs];
    pub const RESTORE: [Scheme; 3] = [Scheme::Fbs, Scheme::Prs, Scheme::Drs];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ea => "EA",
            Scheme::Fbs => "FBS",
            Scheme::Fbs2 => "FBS2",
            Scheme::Fbs3 => "FBS3",
            Scheme::Prs => "PRS",
            Scheme::Drs => "DRS",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::DENOISE
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parameter(format!("unknown scheme {s:?}")))
    }
}

/// Constants of one formulation `f + g` of a benchmark problem.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParamsReport {
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
}

impl ParamsReport {
    pub fn from_params(p: &ProblemParams) -> Self {
        ParamsReport {
            alpha: p.alpha(),
            beta: p.beta(),
            rho: p.rho(),
        }
    }
}

/// One scheme of a benchmark run.
#[derive(Debug, Clone, Serialize)]
pub struct SchemeRun {
    pub scheme: Scheme,
    pub algorithm: Algorithm,
    pub tau: f64,
    pub rate: f64,
    pub iterations_to_1e3: Option<usize>,
    pub empirical_rate: Option<f64>,
    /// Worst `|x_k - x*| / (rate^k |x_0 - x*|)` of the iterated variable.
    pub bound_ratio: Option<f64>,
    /// The same ratio for the recovered primal errors.
    pub primal_bound_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    #[serde(skip)]
    pub trace: Option<IterationTrace>,
}

pub(crate) struct SchemeSetup {
    pub scheme: Scheme,
    pub algorithm: Algorithm,
    pub params: ProblemParams,
    pub build: Box<dyn Fn(f64) -> Result<FixedPointOperator> + Send + Sync>,
    /// Primal starting point.
    pub start: Vector,
    /// `Some(f)` when the iterated variable is `x + tau grad f(x)` of the
    /// primal one (PRS and DRS, whose recover step is `prox_{tau f}`).
    pub lift: Option<Arc<dyn SmoothFunction>>,
}

impl SchemeSetup {
    fn lifted(&self, tau: f64, x: &Vector) -> Vector {
        match &self.lift {
            Some(f) => x + f.gradient(x) * tau,
            None => x.clone(),
        }
    }
}

/// `max_k errors[k] / (rate^k errors[0])` over the entries with a positive bound.
pub fn bound_ratio(errors: &[f64], rate: f64) -> Option<f64> {
    let e0 = *errors.first()?;
    let mut worst: f64 = 0.0;
    let mut bound = e0;
    for &e in errors {
        if bound > 0.0 {
            worst = worst.max(e / bound);
        } else if e > 0.0 {
            return Some(f64::INFINITY);
        }
        bound *= rate;
    }
    Some(worst)
}

pub(crate) fn run_scheme(setup: &SchemeSetup, reference: &Vector, max_iter: usize, stop_tol: f64) -> SchemeRun {
    let failed = |tau: f64, rate: f64, msg: String| SchemeRun {
        scheme: setup.scheme,
        algorithm: setup.algorithm,
        tau,
        rate,
        iterations_to_1e3: None,
        empirical_rate: None,
        bound_ratio: None,
        primal_bound_ratio: None,
        failure: Some(msg),
        trace: None,
    };
    let choice = match opt_optimal(setup.algorithm, &setup.params) {
        Ok(c) => c,
        Err(e) => return failed(f64::NAN, f64::NAN, e.to_string()),
    };
    let (tau, rate) = (choice.tau_star, choice.rate_star);
    let op = match (setup.build)(tau) {
        Ok(op) => op.with_theoretical_rate(rate),
        Err(e) => return failed(tau, rate, e.to_string()),
    };
    let opts = PicardOptions {
        max_iter,
        stop_tol,
        reference: Some(reference.clone()),
        fixed_point_reference: Some(setup.lifted(tau, reference)),
    };
    match banach_picard(&op, &setup.lifted(tau, &setup.start), &opts) {
        Ok(mut trace) => {
            trace.algorithm = setup.scheme.name().to_string();
            SchemeRun {
                scheme: setup.scheme,
                algorithm: setup.algorithm,
                tau,
                rate,
                iterations_to_1e3: first_below(&trace.errors, 1e-3),
                empirical_rate: empirical_rate(&trace, 10).ok(),
                bound_ratio: trace.fixed_point_errors.as_deref().and_then(|e| bound_ratio(e, rate)),
                primal_bound_ratio: bound_ratio(&trace.errors, rate),
                failure: None,
                trace: Some(trace),
            }
        }
        Err(e) => failed(tau, rate, e.to_string()),
    }
}

pub(crate) fn write_run_outputs(
    dir: &Path,
    params_json: &serde_json::Value,
    runs: &[SchemeRun],
    title: &str,
    solution: &Vector,
    shape: &[usize],
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let write = |name: &str, bytes: Vec<u8>| -> Result<()> {
        let p = dir.join(name);
        fs::write(&p, bytes).map_err(|e| Error::io(format!("writing {}", p.display()), e))
    };
    write("params.json", serde_json::to_vec_pretty(params_json)?)?;
    let mut traces = Vec::new();
    for run in runs {
        if let Some(t) = &run.trace {
            let mut buf = Vec::new();
            t.write_csv(&mut buf).map_err(|e| Error::io("formatting trace", e))?;
            write(&format!("{}_trace.csv", run.scheme), buf)?;
            traces.push(t.clone());
        }
    }
    plot_traces(&traces, title, &dir.join("errors.svg"))?;
    crate::io::write_f64(&dir.join("solution.f64"), solution.as_slice(), shape)
}
