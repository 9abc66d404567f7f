use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::solvers::FixedPointOperator;

#[derive(Debug, Clone)]
pub struct PicardOptions {
    pub max_iter: usize,
    /// Relative successive-change threshold; `0` runs all `max_iter` steps.
    pub stop_tol: f64,
    /// Solution used to measure `|recover(x_k) - reference|`.
    pub reference: Option<Vector>,
    /// Fixed point of the operator, for `|x_k - x*|`.
    pub fixed_point_reference: Option<Vector>,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions {
            max_iter: 1000,
            stop_tol: 1e-12,
            reference: None,
            fixed_point_reference: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationTrace {
    pub algorithm: String,
    pub step_size: f64,
    pub theoretical_rate: Option<f64>,
    /// `errors[k]` belongs to iterate `k`; there are `iterations_run + 1`.
    pub errors: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_point_errors: Option<Vec<f64>>,
    pub iterations_run: usize,
    pub converged: bool,
    #[serde(skip)]
    pub final_point: Vector,
}

impl IterationTrace {
    /// `rate^k * errors[0]`, when a theoretical rate is attached.
    pub fn theoretical_bound(&self, k: usize) -> Option<f64> {
        self.theoretical_rate
            .map(|r| r.powi(k as i32) * self.errors.first().copied().unwrap_or(0.0))
    }

    /// `rate^k * fixed_point_errors[0]`.
    pub fn fixed_point_bound(&self, k: usize) -> Option<f64> {
        let e0 = *self.fixed_point_errors.as_ref()?.first()?;
        self.theoretical_rate.map(|r| r.powi(k as i32) * e0)
    }

    /// Columns `iter,error,theoretical_bound`, plus
    /// `fixed_point_error,fixed_point_bound` when the iterated variable was
    /// tracked.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        let fp = self.fixed_point_errors.as_ref();
        let opt = |v: Option<f64>| v.map_or(String::new(), |b| format!("{b:e}"));
        if fp.is_some() {
            writeln!(out, "iter,error,theoretical_bound,fixed_point_error,fixed_point_bound")?;
        } else {
            writeln!(out, "iter,error,theoretical_bound")?;
        }
        for (k, e) in self.errors.iter().enumerate() {
            write!(out, "{k},{e:e},{}", opt(self.theoretical_bound(k)))?;
            if let Some(fp) = fp {
                write!(out, ",{},{}", opt(fp.get(k).copied()), opt(self.fixed_point_bound(k)))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

fn non_finite(v: &Vector) -> bool {
    v.iter().any(|x| !x.is_finite())
}

/// `x_{k+1} = Phi x_k` from `x0`.
///
/// With a reference the recorded error is `|recover(x_k) - reference|`,
/// otherwise the residual `|x_{k+1} - x_k|`.
pub fn banach_picard(op: &FixedPointOperator, x0: &Vector, opts: &PicardOptions) -> Result<IterationTrace> {
    if opts.max_iter == 0 {
        return Err(Error::Parameter("max_iter must be at least 1".into()));
    }
    if !(opts.stop_tol >= 0.0) {
        return Err(Error::Parameter(format!("stop_tol must be nonnegative, got {}", opts.stop_tol)));
    }
    if x0.len() != op.dim() {
        return Err(Error::Construction(format!(
            "starting point has length {} but the operator acts on R^{}",
            x0.len(),
            op.dim()
        )));
    }
    if non_finite(x0) {
        return Err(Error::Divergence { iteration: 0 });
    }

    let measure = |x: &Vector| -> Result<Option<f64>> {
        match &opts.reference {
            Some(r) => Ok(Some((op.recover(x)? - r).norm())),
            None => Ok(None),
        }
    };
    let mut fp_errors = opts
        .fixed_point_reference
        .as_ref()
        .map(|r| vec![(x0 - r).norm()]);

    let mut errors = Vec::with_capacity(opts.max_iter.min(1 << 20) + 1);
    if let Some(e) = measure(x0)? {
        errors.push(e);
    }
    let mut x = x0.clone();
    let mut converged = false;
    let mut iterations = 0;
    for k in 0..opts.max_iter {
        let next = op.apply(&x)?;
        if non_finite(&next) {
            return Err(Error::Divergence { iteration: k + 1 });
        }
        let step = (&next - &x).norm();
        if opts.reference.is_none() {
            errors.push(step);
        }
        let scale = 1.0 + x.norm();
        x = next;
        iterations = k + 1;
        if let Some(e) = measure(&x)? {
            errors.push(e);
        }
        if let (Some(fp), Some(r)) = (fp_errors.as_mut(), &opts.fixed_point_reference) {
            fp.push((&x - r).norm());
        }
        if opts.stop_tol > 0.0 && step <= opts.stop_tol * scale {
            converged = true;
            break;
        }
    }
    if opts.reference.is_none() {
        let next = op.apply(&x)?;
        errors.push((&next - &x).norm());
    }

    Ok(IterationTrace {
        algorithm: op.name().to_string(),
        step_size: op.tau(),
        theoretical_rate: op.theoretical_rate(),
        errors,
        fixed_point_errors: fp_errors,
        iterations_run: iterations,
        converged,
        final_point: x,
    })
}

/// Geometric decay factor fitted by least squares to `log errors[k]` over
/// the iterations after `burn_in`, up to the first one that reaches
/// rounding level.
pub fn empirical_rate(trace: &IterationTrace, burn_in: usize) -> Result<f64> {
    let e0 = trace.errors.first().copied().unwrap_or(0.0);
    let floor = 1e2 * f64::EPSILON * e0;
    let points: Vec<(f64, f64)> = trace
        .errors
        .iter()
        .enumerate()
        .skip(burn_in)
        .take_while(|(_, &e)| e > floor)
        .map(|(k, &e)| (k as f64, e.ln()))
        .collect();
    if points.len() < 5 {
        return Err(Error::Domain(format!(
            "empirical rate needs at least 5 usable points after burn-in {burn_in}, found {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mean_k = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_l = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_k) * (p.1 - mean_l)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_k).powi(2)).sum();
    Ok((sxy / sxx).exp())
}

/// First index whose error is at most `level * errors[0]`.
pub fn first_below(errors: &[f64], level: f64) -> Option<usize> {
    let e0 = *errors.first()?;
    errors.iter().position(|&e| e <= level * e0)
}
