//! Closed-form Lipschitz constants and optimal step-sizes of the splitting
//! schemes.
//!
//! Two settings are covered. In the *cocoercive* setting `A` is
//! `alpha`-cocoercive and `rho`-strongly monotone and `B` is
//! `beta`-cocoercive. In the *optimization* setting `A = grad f` and
//! `B = grad g` with `f` `rho`-strongly convex, `grad f` `1/alpha`-Lipschitz
//! and `grad g` `1/beta`-Lipschitz. Every formula is written in terms of
//! `1/beta` so that `beta = +inf` (i.e. `B = 0`) takes the analytic limit.
//!
//! Naming of the forward-backward variants follows the operator that is
//! activated explicitly: [`Algorithm::FbsGradFProxG`] is `J_{tau B} o
//! G_{tau A}` and [`Algorithm::FbsGradGProxF`] is `J_{tau A} o G_{tau B}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, StepInterval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    /// Explicit (gradient) step on the sum.
    #[serde(rename = "EA")]
    Ea,
    /// Resolvent of the sum.
    #[serde(rename = "PPA")]
    Ppa,
    /// Gradient step on `A` (strongly monotone part), resolvent of `B`.
    #[serde(rename = "FBS_gradF_proxG")]
    FbsGradFProxG,
    /// Gradient step on `B`, resolvent of `A`.
    #[serde(rename = "FBS_gradG_proxF")]
    FbsGradGProxF,
    #[serde(rename = "PRS")]
    Prs,
    #[serde(rename = "DRS")]
    Drs,
    /// Gradient step on `A` alone (`B = 0`).
    #[serde(rename = "EA_single")]
    EaSingle,
    /// Resolvent of `A` alone (`B = 0`).
    #[serde(rename = "PROX_single")]
    ProxSingle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Ea,
        Algorithm::Ppa,
        Algorithm::FbsGradFProxG,
        Algorithm::FbsGradGProxF,
        Algorithm::Prs,
        Algorithm::Drs,
        Algorithm::EaSingle,
        Algorithm::ProxSingle,
    ];

    /// The five two-operator splitting schemes compared in the rate tables.
    pub const SPLITTING: [Algorithm; 5] = [
        Algorithm::Ea,
        Algorithm::FbsGradFProxG,
        Algorithm::FbsGradGProxF,
        Algorithm::Prs,
        Algorithm::Drs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ea => "EA",
            Algorithm::Ppa => "PPA",
            Algorithm::FbsGradFProxG => "FBS_gradF_proxG",
            Algorithm::FbsGradGProxF => "FBS_gradG_proxF",
            Algorithm::Prs => "PRS",
            Algorithm::Drs => "DRS",
            Algorithm::EaSingle => "EA_single",
            Algorithm::ProxSingle => "PROX_single",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let alg = match key.as_str() {
            "ea" | "gradient" => Algorithm::Ea,
            "ppa" => Algorithm::Ppa,
            "fbs_gradf_proxg" | "fbs_proxg" => Algorithm::FbsGradFProxG,
            "fbs_gradg_proxf" | "fbs_proxf" => Algorithm::FbsGradGProxF,
            "prs" => Algorithm::Prs,
            "drs" => Algorithm::Drs,
            "ea_single" => Algorithm::EaSingle,
            "prox_single" => Algorithm::ProxSingle,
            _ => return Err(Error::Parameter(format!("unknown algorithm `{s}`"))),
        };
        Ok(alg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Cocoercive,
    Optimization,
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Setting::Cocoercive => "cocoercive",
            Setting::Optimization => "optimization",
        })
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "coco" | "cocoercive" => Ok(Setting::Cocoercive),
            "opt" | "optimization" => Ok(Setting::Optimization),
            _ => Err(Error::Parameter(format!("unknown setting `{s}`"))),
        }
    }
}

/// The triple `(alpha, beta, rho)` shared by every rate formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    alpha: f64,
    beta: f64,
    rho: f64,
}

/// Slack on `rho <= 1/alpha`, so that `rho = 1/alpha` computed in floating
/// point is not rejected.
const RHO_SLACK: f64 = 1e-12;

impl ProblemParams {
    pub fn new(alpha: f64, beta: f64, rho: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Parameter(format!("alpha must be positive and finite, got {alpha}")));
        }
        if !(beta > 0.0) {
            return Err(Error::Parameter(format!("beta must be positive (or +inf), got {beta}")));
        }
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::Parameter(format!("rho must be nonnegative and finite, got {rho}")));
        }
        if rho * alpha > 1.0 + RHO_SLACK {
            return Err(Error::Parameter(format!(
                "rho = {rho} exceeds 1/alpha = {}",
                1.0 / alpha
            )));
        }
        Ok(ProblemParams { alpha, beta, rho })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `1/beta`, exactly zero when `beta = +inf`.
    pub fn inv_beta(&self) -> f64 {
        if self.beta.is_infinite() {
            0.0
        } else {
            1.0 / self.beta
        }
    }

    /// Cocoercivity modulus `alpha beta / (alpha + beta)` of `A + B`.
    pub fn sum_cocoercivity(&self) -> f64 {
        self.alpha / (1.0 + self.alpha * self.inv_beta())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub algorithm: Algorithm,
    pub setting: Setting,
    pub tau: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalChoice {
    pub tau_star: f64,
    pub rate_star: f64,
}

/// Step-sizes for which the Lipschitz constant of `algorithm` is established.
pub fn admissible_interval(algorithm: Algorithm, params: &ProblemParams) -> StepInterval {
    let alpha = params.alpha;
    match algorithm {
        Algorithm::Ea => StepInterval {
            upper: 2.0 * params.sum_cocoercivity(),
            closed: false,
        },
        Algorithm::FbsGradFProxG | Algorithm::EaSingle => StepInterval {
            upper: 2.0 * alpha,
            closed: false,
        },
        Algorithm::FbsGradGProxF => {
            if params.beta.is_infinite() {
                StepInterval::unbounded()
            } else {
                StepInterval {
                    upper: 2.0 * params.beta,
                    closed: true,
                }
            }
        }
        Algorithm::Ppa | Algorithm::Prs | Algorithm::Drs | Algorithm::ProxSingle => {
            StepInterval::unbounded()
        }
    }
}

fn check_tau(algorithm: Algorithm, params: &ProblemParams, tau: f64) -> Result<()> {
    let interval = admissible_interval(algorithm, params);
    if interval.contains(tau) && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::StepSize {
            algorithm,
            tau,
            interval,
        })
    }
}

/// `sqrt` that maps tiny negative round-off to zero.
fn sqrt0(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

fn resolvent_factor(rho: f64, tau: f64) -> f64 {
    1.0 / (1.0 + tau * rho)
}

/// Cocoercive gradient-step constant of a single `alpha`-cocoercive,
/// `rho`-strongly monotone operator.
fn coco_gradient_single(alpha: f64, rho: f64, tau: f64) -> f64 {
    sqrt0(1.0 - tau * rho / alpha * (2.0 * alpha - tau))
}

fn coco_prs(alpha: f64, rho: f64, tau: f64) -> f64 {
    let t2r = tau * tau * rho;
    let num = alpha - 2.0 * tau * rho * alpha + t2r;
    let den = alpha + 2.0 * tau * rho * alpha + t2r;
    sqrt0(num / den)
}

/// Second branch of the DRS constant, `(beta + tau^2 rho) / (beta + tau beta
/// rho + tau^2 rho)`, divided through by `beta`.
fn drs_second_branch(inv_beta: f64, rho: f64, tau: f64) -> f64 {
    let q = tau * tau * rho * inv_beta;
    (1.0 + q) / (1.0 + tau * rho + q)
}

fn opt_gradient_single(alpha: f64, rho: f64, tau: f64) -> f64 {
    (1.0 - tau * rho).abs().max((1.0 - tau / alpha).abs())
}

fn opt_prs(alpha: f64, rho: f64, tau: f64) -> f64 {
    let s = tau / alpha;
    ((1.0 - tau * rho) / (1.0 + tau * rho)).max((s - 1.0) / (s + 1.0))
}

/// Lipschitz constant of the cocoercive-setting operator at step-size `tau`.
pub fn coco_rate(algorithm: Algorithm, params: &ProblemParams, tau: f64) -> Result<f64> {
    check_tau(algorithm, params, tau)?;
    let (alpha, rho, ib) = (params.alpha, params.rho, params.inv_beta());
    let rate = match algorithm {
        Algorithm::Ea => {
            let num = 2.0 * tau * rho * (2.0 * alpha - tau * (1.0 + alpha * ib));
            let den = alpha * (2.0 - tau * ib);
            sqrt0(1.0 - num / den)
        }
        Algorithm::FbsGradFProxG | Algorithm::EaSingle => coco_gradient_single(alpha, rho, tau),
        Algorithm::FbsGradGProxF | Algorithm::Ppa | Algorithm::ProxSingle => {
            resolvent_factor(rho, tau)
        }
        Algorithm::Prs => coco_prs(alpha, rho, tau),
        Algorithm::Drs => {
            let averaged = 0.5 * (1.0 + coco_prs(alpha, rho, tau));
            averaged.min(drs_second_branch(ib, rho, tau))
        }
    };
    Ok(rate)
}

/// Lipschitz constant of the optimization-setting operator at step-size `tau`.
pub fn opt_rate(algorithm: Algorithm, params: &ProblemParams, tau: f64) -> Result<f64> {
    check_tau(algorithm, params, tau)?;
    let (alpha, rho, ib) = (params.alpha, params.rho, params.inv_beta());
    let rate = match algorithm {
        Algorithm::Ea => (1.0 - tau * rho)
            .abs()
            .max((1.0 - tau * (ib + 1.0 / alpha)).abs()),
        Algorithm::FbsGradFProxG | Algorithm::EaSingle => opt_gradient_single(alpha, rho, tau),
        Algorithm::FbsGradGProxF | Algorithm::Ppa | Algorithm::ProxSingle => {
            resolvent_factor(rho, tau)
        }
        Algorithm::Prs => opt_prs(alpha, rho, tau),
        Algorithm::Drs => {
            let averaged = 0.5 * (1.0 + opt_prs(alpha, rho, tau));
            averaged.min(drs_second_branch(ib, rho, tau))
        }
    };
    Ok(rate)
}

pub fn rate(
    setting: Setting,
    algorithm: Algorithm,
    params: &ProblemParams,
    tau: f64,
) -> Result<RateResult> {
    let rate = match setting {
        Setting::Cocoercive => coco_rate(algorithm, params, tau)?,
        Setting::Optimization => opt_rate(algorithm, params, tau)?,
    };
    Ok(RateResult {
        algorithm,
        setting,
        tau,
        rate,
    })
}

fn require_strong_monotonicity(algorithm: Algorithm, params: &ProblemParams) -> Result<()> {
    if params.rho > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{algorithm}: rho = 0 gives no strict contraction and no finite minimizer"
        )))
    }
}

fn finite_choice(algorithm: Algorithm, tau_star: f64, rate_star: f64) -> Result<OptimalChoice> {
    if tau_star.is_finite() && tau_star > 0.0 {
        Ok(OptimalChoice {
            tau_star,
            rate_star,
        })
    } else {
        Err(Error::NoOptimum(algorithm))
    }
}

/// Closed-form minimizer of [`coco_rate`] over the admissible interval.
pub fn coco_optimal(algorithm: Algorithm, params: &ProblemParams) -> Result<OptimalChoice> {
    require_strong_monotonicity(algorithm, params)?;
    let (alpha, beta, rho, ib) = (params.alpha, params.beta, params.rho, params.inv_beta());
    let ar = alpha * rho;
    match algorithm {
        Algorithm::Ea => {
            let s = (1.0 + alpha * ib).sqrt();
            let tau = 2.0 * alpha / (s * (s + 1.0));
            let rate = sqrt0(1.0 - 4.0 * rho * alpha / ((s + 1.0) * (s + 1.0)));
            finite_choice(algorithm, tau, rate)
        }
        Algorithm::FbsGradFProxG | Algorithm::EaSingle => {
            finite_choice(algorithm, alpha, sqrt0(1.0 - ar))
        }
        Algorithm::FbsGradGProxF => {
            finite_choice(algorithm, 2.0 * beta, 1.0 / (1.0 + 2.0 * beta * rho))
        }
        Algorithm::Prs => {
            let root = ar.sqrt();
            finite_choice(
                algorithm,
                (alpha / rho).sqrt(),
                sqrt0((1.0 - root) / (1.0 + root)),
            )
        }
        Algorithm::Drs => {
            let s = sqrt0(1.0 - ar);
            let threshold = 4.0 * alpha / ((1.0 + s) * (1.0 + s));
            if beta <= threshold {
                finite_choice(
                    algorithm,
                    (alpha / rho).sqrt(),
                    (1.0 + s) / (1.0 + s + ar.sqrt()),
                )
            } else {
                finite_choice(
                    algorithm,
                    (beta / rho).sqrt(),
                    2.0 / (2.0 + (beta * rho).sqrt()),
                )
            }
        }
        Algorithm::Ppa | Algorithm::ProxSingle => Err(Error::NoOptimum(algorithm)),
    }
}

/// Closed-form minimizer of [`opt_rate`] over the admissible interval.
pub fn opt_optimal(algorithm: Algorithm, params: &ProblemParams) -> Result<OptimalChoice> {
    require_strong_monotonicity(algorithm, params)?;
    let (alpha, beta, rho, ib) = (params.alpha, params.beta, params.rho, params.inv_beta());
    let ia = 1.0 / alpha;
    let ar = alpha * rho;
    match algorithm {
        Algorithm::Ea => finite_choice(
            algorithm,
            2.0 / (rho + ia + ib),
            (ia + ib - rho) / (ia + ib + rho),
        ),
        Algorithm::FbsGradFProxG | Algorithm::EaSingle => {
            finite_choice(algorithm, 2.0 / (rho + ia), (ia - rho) / (ia + rho))
        }
        Algorithm::FbsGradGProxF => {
            finite_choice(algorithm, 2.0 * beta, 1.0 / (1.0 + 2.0 * beta * rho))
        }
        Algorithm::Prs => {
            let root = ar.sqrt();
            finite_choice(algorithm, (alpha / rho).sqrt(), (1.0 - root) / (1.0 + root))
        }
        Algorithm::Drs => {
            if beta <= 4.0 * alpha {
                finite_choice(algorithm, (alpha / rho).sqrt(), 1.0 / (1.0 + ar.sqrt()))
            } else {
                finite_choice(
                    algorithm,
                    (beta / rho).sqrt(),
                    2.0 / (2.0 + (beta * rho).sqrt()),
                )
            }
        }
        Algorithm::Ppa | Algorithm::ProxSingle => Err(Error::NoOptimum(algorithm)),
    }
}

pub fn optimal(setting: Setting, algorithm: Algorithm, params: &ProblemParams) -> Result<OptimalChoice> {
    match setting {
        Setting::Cocoercive => coco_optimal(algorithm, params),
        Setting::Optimization => opt_optimal(algorithm, params),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SingleKind {
    Gradient,
    Resolvent,
}

/// Constants of `G_{tau A}` and `J_{tau A}` for a single operator (`B = 0`).
pub fn single_operator_rate(
    kind: SingleKind,
    setting: Setting,
    alpha: f64,
    rho: f64,
    tau: f64,
) -> Result<f64> {
    let params = ProblemParams::new(alpha, f64::INFINITY, rho)?;
    let algorithm = match kind {
        SingleKind::Gradient => Algorithm::EaSingle,
        SingleKind::Resolvent => Algorithm::ProxSingle,
    };
    match setting {
        Setting::Cocoercive => coco_rate(algorithm, &params, tau),
        Setting::Optimization => opt_rate(algorithm, &params, tau),
    }
}

/// Averagedness parameter of the fixed-point operator when `rho = 0`.
pub fn averaged_constant(algorithm: Algorithm, alpha: f64, beta: f64, tau: f64) -> Result<f64> {
    let params = ProblemParams::new(alpha, beta, 0.0)?;
    check_tau(algorithm, &params, tau)?;
    let ib = params.inv_beta();
    let gamma = params.sum_cocoercivity();
    match algorithm {
        Algorithm::Ea => Ok(tau / (2.0 * gamma)),
        Algorithm::FbsGradFProxG => {
            Ok(2.0 * tau * (1.0 + alpha * ib) / (4.0 * alpha + tau * (4.0 * alpha - tau) * ib))
        }
        Algorithm::Prs => Ok(tau / (gamma + tau)),
        Algorithm::Drs => Ok(0.5 * tau / (gamma + tau)),
        _ => Err(Error::Parameter(format!(
            "no averagedness constant is provided for {algorithm}"
        ))),
    }
}
