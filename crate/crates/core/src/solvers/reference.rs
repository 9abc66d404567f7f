use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::operators::SmoothFunction;
use crate::rates::{opt_optimal, Algorithm, ProblemParams};
use crate::solvers::prs_operator;

#[derive(Debug, Clone, Copy)]
pub struct ReferenceOptions {
    /// Target accuracy used to size the iteration cap.
    pub tol: f64,
    /// Accepted `|grad f + grad g|` relative to `1 + |x|`.
    pub residual_tol: f64,
    /// Relative successive change at which the run stops early.
    pub change_tol: f64,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        ReferenceOptions {
            tol: 1e-15,
            residual_tol: 1e-10,
            change_tol: 1e-15,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub x: Vector,
    pub iterations: usize,
    pub residual: f64,
    pub tau: f64,
}

/// Minimizer of `f + g` by a long Peaceman-Rachford run at its optimal
/// step-size, where `params` describe `f` (strongly convex) and `g`.
///
/// The cap is `max(1e5, 50 ceil(log tol / log rate))` iterations. The run
/// also stops once the successive change drops below `change_tol` or stops
/// improving for a while, which happens at rounding level.
pub fn reference_solution(
    f: Arc<dyn SmoothFunction>,
    g: Arc<dyn SmoothFunction>,
    params: &ProblemParams,
    x0: &Vector,
    opts: ReferenceOptions,
) -> Result<ReferenceSolution> {
    let choice = opt_optimal(Algorithm::Prs, params)?;
    let op = prs_operator(f.clone(), g.clone(), choice.tau_star)?;
    let rate = choice.rate_star;
    let cap = if rate > 0.0 && rate < 1.0 {
        let k = (opts.tol.ln() / rate.ln()).ceil().max(1.0);
        (50.0 * k).clamp(1e5, 1e9) as usize
    } else {
        100_000
    };
    let patience = if rate < 1.0 {
        ((20.0 / (1.0 - rate)) as usize).max(200)
    } else {
        200
    };

    let mut x = x0.clone();
    let mut best = f64::INFINITY;
    let mut best_at = 0;
    let mut iterations = 0;
    for k in 0..cap {
        let next = op.apply(&x)?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { iteration: k + 1 });
        }
        let change = (&next - &x).norm() / (1.0 + x.norm());
        x = next;
        iterations = k + 1;
        if change <= opts.change_tol {
            break;
        }
        if change < best {
            best = change;
            best_at = k;
        } else if k - best_at > patience {
            break;
        }
    }
    let solution = op.recover(&x)?;
    let residual = (f.gradient(&solution) + g.gradient(&solution)).norm();
    if residual > opts.residual_tol * (1.0 + solution.norm()) {
        return Err(Error::Reference {
            residual,
            iterations,
        });
    }
    Ok(ReferenceSolution {
        x: solution,
        iterations,
        residual,
        tau: choice.tau_star,
    })
}
