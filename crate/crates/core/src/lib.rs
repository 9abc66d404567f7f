//! Splitting methods for strongly monotone cocoercive equations and strongly
//! convex smooth minimization: closed-form linear rates, optimal step-sizes,
//! efficiency regions, an operator library, fixed-point solvers, numerical
//! certification and reproducible experiments.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod experiments;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod plot;
pub mod rates;
pub mod regions;
pub mod solvers;
pub mod verification;

pub use error::{Error, Result, StepInterval};
pub use rates::{Algorithm, OptimalChoice, ProblemParams, RateResult, Setting};
