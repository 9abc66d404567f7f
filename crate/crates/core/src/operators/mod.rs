//! Smooth convex functions, their proximity operators and the linear maps
//! used to compose them.

pub mod functions;
pub mod haar;
pub mod huber;
pub mod linear;

use crate::error::{Error, Result};
use crate::linalg::Vector;

pub use functions::{
    orthonormal_prox, quadratic_fidelity, scaled_shifted_prox, semiorthogonal_prox,
    CompositionRule, LinearComposition, Quadratic, ShiftedQuadraticSum, SquaredDistance, Sum,
    Zero,
};
pub use haar::{haar_transform, HaarTransform};
pub use huber::{huber_gradient, huber_prox, huber_value, HuberParams, HuberPenalty};
pub use linear::{
    adjoint_defect, difference_operator, estimate_norm_sq, odd_even_split, DenseMap,
    DifferenceOperator, DifferenceRows, Identity, LinearMap, NormSq, Parity,
};

/// A convex function with Lipschitz gradient.
pub trait SmoothFunction: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector) -> f64;
    fn gradient(&self, x: &Vector) -> Vector;

    fn has_prox(&self) -> bool {
        false
    }

    /// `argmin_y f(y) + |y - x|^2 / (2 tau)`.
    fn prox(&self, _x: &Vector, _tau: f64) -> Result<Vector> {
        Err(Error::ProxUnavailable(self.describe()))
    }

    /// Lipschitz constant of the gradient, possibly `+inf`.
    fn grad_lipschitz(&self) -> f64;
    fn strong_convexity(&self) -> f64;
    fn describe(&self) -> String;
}
