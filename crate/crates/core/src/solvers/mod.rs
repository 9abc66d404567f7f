//! Fixed-point operators of the splitting methods and the Banach-Picard
//! driver.

mod picard;
mod reference;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::operators::SmoothFunction;

pub use picard::{banach_picard, empirical_rate, first_below, IterationTrace, PicardOptions};
pub use reference::{reference_solution, ReferenceOptions, ReferenceSolution};

pub type VectorMap = Box<dyn Fn(&Vector) -> Result<Vector> + Send + Sync>;

/// A self-map `Phi` whose fixed points encode a solution, together with the
/// map sending a fixed point to that solution.
pub struct FixedPointOperator {
    name: String,
    dim: usize,
    tau: f64,
    apply: VectorMap,
    recover: VectorMap,
    theoretical_rate: Option<f64>,
}

impl FixedPointOperator {
    pub fn new(name: impl Into<String>, dim: usize, tau: f64, apply: VectorMap, recover: VectorMap) -> Self {
        FixedPointOperator {
            name: name.into(),
            dim,
            tau,
            apply,
            recover,
            theoretical_rate: None,
        }
    }

    /// Operator with identity recovery.
    pub fn from_fn<F>(name: impl Into<String>, dim: usize, tau: f64, apply: F) -> Self
    where
        F: Fn(&Vector) -> Result<Vector> + Send + Sync + 'static,
    {
        FixedPointOperator::new(name, dim, tau, Box::new(apply), Box::new(|x: &Vector| Ok(x.clone())))
    }

    pub fn with_theoretical_rate(mut self, rate: f64) -> Self {
        self.theoretical_rate = Some(rate);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn theoretical_rate(&self) -> Option<f64> {
        self.theoretical_rate
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        (self.apply)(x)
    }

    pub fn recover(&self, x: &Vector) -> Result<Vector> {
        (self.recover)(x)
    }
}

impl std::fmt::Debug for FixedPointOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FixedPointOperator")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("tau", &self.tau)
            .field("theoretical_rate", &self.theoretical_rate)
            .finish()
    }
}

fn check_step(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("step-size must be positive and finite, got {tau}")))
    }
}

fn check_dims(f: &dyn SmoothFunction, g: &dyn SmoothFunction) -> Result<usize> {
    if f.dim() != g.dim() {
        return Err(Error::Construction(format!(
            "functions act on R^{} and R^{}",
            f.dim(),
            g.dim()
        )));
    }
    Ok(f.dim())
}

fn require_prox(h: &dyn SmoothFunction) -> Result<()> {
    if h.has_prox() {
        Ok(())
    } else {
        Err(Error::ProxUnavailable(h.describe()))
    }
}

fn require_finite_lipschitz(h: &dyn SmoothFunction) -> Result<()> {
    if h.grad_lipschitz().is_finite() {
        Ok(())
    } else {
        Err(Error::Construction(format!(
            "{} has no Lipschitz gradient",
            h.describe()
        )))
    }
}

/// `x -> x - tau (grad f(x) + grad g(x))`.
pub fn ea_operator(
    f: Arc<dyn SmoothFunction>,
    g: Arc<dyn SmoothFunction>,
    tau: f64,
) -> Result<FixedPointOperator> {
    check_step(tau)?;
    let dim = check_dims(f.as_ref(), g.as_ref())?;
    require_finite_lipschitz(f.as_ref())?;
    require_finite_lipschitz(g.as_ref())?;
    Ok(FixedPointOperator::from_fn("EA", dim, tau, move |x| {
        Ok(x - (f.gradient(x) + g.gradient(x)) * tau)
    }))
}

/// `x -> prox_{tau h}(x)` for `h = f + g` given jointly.
pub fn ppa_operator(h: Arc<dyn SmoothFunction>, tau: f64) -> Result<FixedPointOperator> {
    check_step(tau)?;
    require_prox(h.as_ref())?;
    let dim = h.dim();
    Ok(FixedPointOperator::from_fn("PPA", dim, tau, move |x| h.prox(x, tau)))
}

/// `x -> prox_{tau p}(x - tau grad q(x))`.
pub fn fbs_operator(
    prox_side: Arc<dyn SmoothFunction>,
    grad_side: Arc<dyn SmoothFunction>,
    tau: f64,
) -> Result<FixedPointOperator> {
    check_step(tau)?;
    let dim = check_dims(prox_side.as_ref(), grad_side.as_ref())?;
    require_prox(prox_side.as_ref())?;
    require_finite_lipschitz(grad_side.as_ref())?;
    Ok(FixedPointOperator::from_fn("FBS", dim, tau, move |x| {
        prox_side.prox(&(x - grad_side.gradient(x) * tau), tau)
    }))
}

fn reflected_pair(
    f: &dyn SmoothFunction,
    g: &dyn SmoothFunction,
    x: &Vector,
    tau: f64,
) -> Result<(Vector, Vector)> {
    let half = f.prox(x, tau)?;
    let other = g.prox(&(&half * 2.0 - x), tau)?;
    Ok((half, other))
}

fn splitting_parts(
    f: &Arc<dyn SmoothFunction>,
    g: &Arc<dyn SmoothFunction>,
    tau: f64,
) -> Result<(usize, VectorMap)> {
    check_step(tau)?;
    let dim = check_dims(f.as_ref(), g.as_ref())?;
    require_prox(f.as_ref())?;
    require_prox(g.as_ref())?;
    let f = f.clone();
    Ok((dim, Box::new(move |x: &Vector| f.prox(x, tau))))
}

/// `(2 prox_{tau g} - Id)(2 prox_{tau f} - Id)`, recovered through
/// `prox_{tau f}`.
pub fn prs_operator(
    f: Arc<dyn SmoothFunction>,
    g: Arc<dyn SmoothFunction>,
    tau: f64,
) -> Result<FixedPointOperator> {
    let (dim, recover) = splitting_parts(&f, &g, tau)?;
    let apply: VectorMap = Box::new(move |x: &Vector| {
        let (half, other) = reflected_pair(f.as_ref(), g.as_ref(), x, tau)?;
        Ok(other * 2.0 - half * 2.0 + x)
    });
    Ok(FixedPointOperator::new("PRS", dim, tau, apply, recover))
}

/// Average of the identity and the Peaceman-Rachford operator.
pub fn drs_operator(
    f: Arc<dyn SmoothFunction>,
    g: Arc<dyn SmoothFunction>,
    tau: f64,
) -> Result<FixedPointOperator> {
    let (dim, recover) = splitting_parts(&f, &g, tau)?;
    let apply: VectorMap = Box::new(move |x: &Vector| {
        let (half, other) = reflected_pair(f.as_ref(), g.as_ref(), x, tau)?;
        Ok(x + other - half)
    });
    Ok(FixedPointOperator::new("DRS", dim, tau, apply, recover))
}
