//! Huber loss `phi_mu`, its derivative and its proximity operator, plus the
//! coordinatewise penalty `weight * sum_i phi_mu(x_i)`.

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::operators::SmoothFunction;

/// `|z| - mu/2` outside `[-mu, mu]`, `z^2 / (2 mu)` inside.
pub fn huber_value(zeta: f64, mu: f64) -> f64 {
    let a = zeta.abs();
    if a > mu {
        a - 0.5 * mu
    } else {
        zeta * zeta / (2.0 * mu)
    }
}

pub fn huber_gradient(zeta: f64, mu: f64) -> f64 {
    if zeta.abs() > mu {
        zeta.signum()
    } else {
        zeta / mu
    }
}

/// `prox_{tau phi_mu}`. The kink `|z| = tau + mu` belongs to the linear branch.
pub fn huber_prox(zeta: f64, mu: f64, tau: f64) -> f64 {
    if zeta.abs() > tau + mu {
        zeta - tau * zeta.signum()
    } else {
        mu * zeta / (tau + mu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HuberParams {
    pub mu: f64,
    pub chi: f64,
}

impl HuberParams {
    pub fn new(mu: f64, chi: f64) -> Result<Self> {
        if !(mu > 0.0) || !(chi > 0.0) {
            return Err(Error::Parameter(format!(
                "Huber parameters need mu > 0 and chi > 0, got mu = {mu}, chi = {chi}"
            )));
        }
        Ok(HuberParams { mu, chi })
    }
}

/// `x -> chi * sum_i phi_mu(x_i)` on `R^dim`.
#[derive(Debug, Clone)]
pub struct HuberPenalty {
    dim: usize,
    params: HuberParams,
}

impl HuberPenalty {
    pub fn new(dim: usize, params: HuberParams) -> Self {
        HuberPenalty { dim, params }
    }

    pub fn params(&self) -> HuberParams {
        self.params
    }
}

impl SmoothFunction for HuberPenalty {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Vector) -> f64 {
        let HuberParams { mu, chi } = self.params;
        chi * x.iter().map(|&v| huber_value(v, mu)).sum::<f64>()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let HuberParams { mu, chi } = self.params;
        x.map(|v| chi * huber_gradient(v, mu))
    }

    fn has_prox(&self) -> bool {
        true
    }

    fn prox(&self, x: &Vector, tau: f64) -> Result<Vector> {
        let HuberParams { mu, chi } = self.params;
        Ok(x.map(|v| huber_prox(v, mu, tau * chi)))
    }

    fn grad_lipschitz(&self) -> f64 {
        self.params.chi / self.params.mu
    }

    fn strong_convexity(&self) -> f64 {
        0.0
    }

    fn describe(&self) -> String {
        format!(
            "{} * huber_{}",
            self.params.chi, self.params.mu
        )
    }
}
