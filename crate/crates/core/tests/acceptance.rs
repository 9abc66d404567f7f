//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every check prints exactly one PASS/FAIL line; the process exits 1 if any
//! check fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use opsplit::experiments::{run_denoise, run_restore, DenoiseConfig, DenoiseResult, RestoreConfig, RestoreResult, Scheme, SchemeRun};
use opsplit::operators::{
    huber_prox, huber_value, orthonormal_prox, scaled_shifted_prox, semiorthogonal_prox, CompositionRule, DenseMap,
    HuberParams, HuberPenalty, LinearComposition, SmoothFunction,
};
use opsplit::rates::{
    admissible_interval, coco_rate, optimal, rate, single_operator_rate, Algorithm, ProblemParams, Setting, SingleKind,
};
use opsplit::regions::{best_by_enumeration, classify, eta, log_grid, OptimalRates, RegionPoint, Winner};
use opsplit::verification::{averagedness_suite, contraction_suite, primal_dual_suite, tightness_witness};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    Distribution::<f64>::sample(&StandardNormal, rng)
}

// ---------------------------------------------------------------------------

fn random_params(rng: &mut ChaCha8Rng) -> ProblemParams {
    let alpha = 10f64.powf(rng.random_range(-2.0..2.0));
    let beta = alpha * 10f64.powf(rng.random_range(-2.0..3.0));
    let rho = rng.random_range(1e-3..0.999) / alpha;
    ProblemParams::new(alpha, beta, rho).unwrap()
}

/// Grid minimum of `tau -> rate` over the admissible interval.
fn grid_minimum(setting: Setting, alg: Algorithm, p: &ProblemParams, n: usize) -> f64 {
    let interval = admissible_interval(alg, p);
    let taus: Vec<f64> = if interval.upper.is_finite() {
        (1..=n).map(|i| interval.upper * i as f64 / n as f64).collect()
    } else {
        let scale = p.alpha().max(p.beta());
        log_grid(p.alpha().min(p.beta()) * 1e-6, scale * 1e6, n)
    };
    taus.iter()
        .filter_map(|&t| rate(setting, alg, p, t).ok())
        .map(|r| r.rate)
        .fold(f64::INFINITY, f64::min)
}

fn optimal_step_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sets: Vec<ProblemParams> = (0..1000).map(|_| random_params(&mut rng)).collect();
    let results: Vec<(usize, f64, Option<String>)> = sets
        .par_iter()
        .map(|p| {
            let (mut count, mut worst, mut bad) = (0, f64::NEG_INFINITY, None);
            for setting in [Setting::Cocoercive, Setting::Optimization] {
                for alg in Algorithm::SPLITTING {
                    let c = optimal(setting, alg, p).expect("closed-form optimum");
                    let grid = grid_minimum(setting, alg, p, 10_000);
                    let excess = c.rate_star - grid;
                    count += 1;
                    worst = worst.max(excess);
                    if excess > 1e-9 {
                        bad = Some(format!("{alg} {setting} at {p:?}: {} vs grid {grid}", c.rate_star));
                    }
                }
            }
            (count, worst, bad)
        })
        .collect();
    let elapsed = start.elapsed();
    let count: usize = results.iter().map(|r| r.0).sum();
    let worst = results.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    if let Some(bad) = results.iter().find_map(|r| r.2.clone()) {
        return Err(bad);
    }
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{count} optima, worst excess over grid {worst:.2e}, {elapsed:.2?}"))
}

fn contraction_certification() -> Outcome {
    let summary = contraction_suite(500, 2024, 1e-8).map_err(|e| e.to_string())?;
    ensure(summary.violations.is_empty(), || {
        format!("{} violations, first {:?}", summary.violations.len(), summary.violations.first())
    })?;
    let mut worst_gap: f64 = 0.0;
    for (alpha, beta, rho, frac) in [(1.0, 2.0, 0.3, 0.4), (0.5, 0.1, 1.5, 0.9), (3.0, 30.0, 0.01, 0.2)] {
        let p = ProblemParams::new(alpha, beta, rho).unwrap();
        let tau = frac * admissible_interval(Algorithm::Ea, &p).upper;
        let t = tightness_witness(&p, tau).map_err(|e| e.to_string())?;
        worst_gap = worst_gap.max((t.exact - t.claimed).abs());
    }
    ensure(worst_gap <= 1e-10, || format!("tightness gap {worst_gap:e}"))?;
    Ok(format!(
        "{} cases / {} checks, worst excess {:.2e}; EA tightness gap {:.1e}",
        summary.cases, summary.checks, summary.worst_excess, worst_gap
    ))
}

fn ordering_laws() -> Outcome {
    let betas = log_grid(1e-2, 1e4, 100);
    let rhos = log_grid(1e-6, 0.99, 100);
    let tie = 1e-12;
    let (mut min_margin, mut checked, mut boundary, mut ties) = (f64::INFINITY, 0usize, 0usize, 0usize);
    for &b in &betas {
        for &r in &rhos {
            let point = RegionPoint::new(b, r).unwrap();
            let rates = OptimalRates::at(&point);
            // r_G > r_T1 > r_R
            let m = (rates.r_g - rates.r_t1).min(rates.r_t1 - rates.r_r);
            ensure(m > 0.0, || format!("chain fails at ({b}, {r})"))?;
            min_margin = min_margin.min(m);

            let near = |x: f64, y: f64| (x - y).abs() <= tie * (1.0 + y.abs());
            // (i)
            let cond_i = b > 4.0 && {
                let e = eta(b).unwrap();
                b * r > e && b * r < 1.0 / e
            };
            let edge_i = near(rates.r_t2, rates.r_r)
                || near(b, 4.0)
                || (b > 4.0 && {
                    let e = eta(b).unwrap();
                    near(b * r, e) || near(b * r, 1.0 / e)
                });
            // (ii)
            let bound_ii = 1.0 - 8.0 * (b.sqrt() - 2.0) / b;
            let cond_ii = b > 16.0 && r < bound_ii;
            let edge_ii = near(rates.r_s, rates.r_r) || near(b, 16.0) || near(r, bound_ii);
            // (iii)
            let cond_iii = r < 1.0 / (16.0 * b);
            let edge_iii = near(rates.r_s, rates.r_t2) || near(r, 1.0 / (16.0 * b));
            if edge_i || edge_ii || (b > 4.0 && edge_iii) {
                boundary += 1;
            } else {
                ensure((rates.r_t2 < rates.r_r) == cond_i, || format!("(i) fails at ({b}, {r})"))?;
                ensure((rates.r_s < rates.r_r) == cond_ii, || format!("(ii) fails at ({b}, {r})"))?;
                if b > 4.0 {
                    ensure((rates.r_s < rates.r_t2) == cond_iii, || format!("(iii) fails at ({b}, {r})"))?;
                }
                checked += 1;
            }

            // splitting beats the unsplit gradient constant
            let p = ProblemParams::new(1.0, b, r).unwrap();
            let gamma = p.sum_cocoercivity();
            for frac in [0.1, 0.5, 0.9] {
                let tau = 2.0 * gamma * frac;
                let split = coco_rate(Algorithm::Ea, &p, tau).unwrap();
                let whole = single_operator_rate(SingleKind::Gradient, Setting::Cocoercive, gamma, r, tau).unwrap();
                ensure(split < whole, || format!("omega_G >= omega_G0 at ({b}, {r}, {tau})"))?;
            }

            // classifier against brute force
            let (best, _) = best_by_enumeration(&point);
            let label = classify(&point);
            if label.winner.algorithm() != best {
                let chosen = rates
                    .entries()
                    .iter()
                    .find(|e| e.0 == label.winner.algorithm())
                    .unwrap()
                    .1;
                let min = rates.entries().iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
                ensure(near(chosen, min), || {
                    format!("classifier says {} but {best} is better at ({b}, {r})", label.winner)
                })?;
                ties += 1;
            }
        }
    }
    Ok(format!(
        "10000 cells, chain margin {min_margin:.2e}, biconditionals on {checked} cells ({boundary} on a boundary), classifier ties {ties}"
    ))
}

// ---------------------------------------------------------------------------

static RESTORE: OnceLock<Vec<(f64, RestoreResult)>> = OnceLock::new();
static DENOISE: OnceLock<(DenoiseResult, Duration)> = OnceLock::new();

fn restore_runs() -> &'static [(f64, RestoreResult)] {
    RESTORE.get_or_init(|| {
        [10.0, 0.04, 0.001]
            .into_iter()
            .map(|chi| {
                let cfg = RestoreConfig {
                    chi,
                    mu: 1.0,
                    ..RestoreConfig::default()
                };
                (chi, run_restore(&cfg).expect("restoration run"))
            })
            .collect()
    })
}

fn denoise_run() -> &'static (DenoiseResult, Duration) {
    DENOISE.get_or_init(|| {
        let cfg = DenoiseConfig {
            n: 512,
            chi: 0.7,
            mu: 1e-4,
            noise_sigma: 0.1,
            seed: 1,
            ..DenoiseConfig::default()
        };
        let start = Instant::now();
        let r = run_denoise(&cfg).expect("denoising run");
        (r, start.elapsed())
    })
}

fn restoration_regions() -> Outcome {
    let expected = [(0.1, Winner::Prs), (25.0, Winner::Drs), (1000.0, Winner::FbsProxF)];
    for (beta, want) in expected {
        let got = classify(&RegionPoint::new(beta, 0.0022).unwrap()).winner;
        ensure(got == want, || format!("({beta}, 0.0022) -> {got}, expected {want}"))?;
    }
    let mut notes = Vec::new();
    for (chi, r) in restore_runs() {
        let predicted = r.predicted.ok_or_else(|| format!("chi = {chi}: point outside the plane"))?;
        let winner = r.theoretical_winner().ok_or("no finite rates")?;
        let as_scheme = match predicted.winner {
            Winner::Prs => Scheme::Prs,
            Winner::Drs => Scheme::Drs,
            Winner::FbsProxF => Scheme::Fbs,
        };
        ensure(winner == as_scheme, || {
            format!("chi = {chi}: classifier predicts {} but rates favour {winner}", predicted.winner)
        })?;
        notes.push(format!("chi {chi} -> {}", predicted.winner));
    }
    Ok(format!(
        "PRS / DRS / FBS_proxF at rho = 0.0022; measured lambda_min {:.5}: {}",
        restore_runs()[0].1.lambda_min,
        notes.join(", ")
    ))
}

/// Checks `|x_k - x*| <= rate^k |x_0 - x*|` on the iterated variable and
/// returns the worst ratio for it and for the recovered primal errors.
fn bound_check(run: &SchemeRun) -> Result<(f64, f64, usize), String> {
    if let Some(f) = &run.failure {
        return Err(format!("{} failed: {f}", run.scheme));
    }
    let trace = run.trace.as_ref().ok_or("missing trace")?;
    let errors = trace.fixed_point_errors.as_ref().ok_or("iterated variable not tracked")?;
    let e0 = errors[0];
    let mut worst: f64 = 0.0;
    for (k, &e) in errors.iter().enumerate() {
        let bound = run.rate.powi(k as i32) * e0;
        if e > bound * (1.0 + 1e-6) {
            return Err(format!("{} at k = {k}: error {e:e} > bound {bound:e}", run.scheme));
        }
        if bound > 0.0 {
            worst = worst.max(e / bound);
        }
    }
    Ok((worst, run.primal_bound_ratio.unwrap_or(f64::NAN), errors.len()))
}

fn banach_picard_bound() -> Outcome {
    let (mut total, mut traces) = (0, 0);
    let mut worst: f64 = 0.0;
    let mut primal: Vec<String> = Vec::new();
    let denoise = denoise_run().0.runs.iter().map(|r| ("denoise".to_string(), r));
    let restore = restore_runs()
        .iter()
        .flat_map(|(chi, r)| r.runs.iter().map(move |run| (format!("restore chi {chi}"), run)));
    for (label, run) in denoise.chain(restore) {
        let (w, p, n) = bound_check(run).map_err(|e| format!("{label}: {e}"))?;
        worst = worst.max(w);
        if p > 1.0 + 1e-6 {
            primal.push(format!("{label} {} x{p:.2}", run.scheme));
        }
        total += n;
        traces += 1;
    }
    let note = if primal.is_empty() {
        "recovered errors also within the bound".to_string()
    } else {
        format!("recovered errors above r^k e_0: {}", primal.join(", "))
    };
    Ok(format!("{total} iterates over {traces} traces, max |x_k - x*| / bound = {worst:.6}; {note}"))
}

fn denoising_claim() -> Outcome {
    let (result, elapsed) = denoise_run();
    let hit = |s: Scheme| result.run(s).and_then(|r| r.iterations_to_1e3);
    let (prs, drs, ea) = (hit(Scheme::Prs), hit(Scheme::Drs), hit(Scheme::Ea));
    let show = |v: Option<usize>| v.map_or(format!("> {}", result.config.max_iter), |k| k.to_string());
    let summary = format!(
        "iterations to 1e-3: PRS {}, DRS {}, EA {} (rates {:.5} / {:.5} / {:.6}), {elapsed:.2?}",
        show(prs),
        show(drs),
        show(ea),
        result.run(Scheme::Prs).map_or(f64::NAN, |r| r.rate),
        result.run(Scheme::Drs).map_or(f64::NAN, |r| r.rate),
        result.run(Scheme::Ea).map_or(f64::NAN, |r| r.rate),
    );
    let within = |v: Option<usize>| v.is_some_and(|k| k <= 100);
    let ea_slower = match (prs, ea) {
        (Some(p), Some(e)) => e > p,
        (Some(_), None) => true,
        _ => false,
    };
    if within(prs) && within(drs) && ea_slower && *elapsed < Duration::from_secs(30) {
        Ok(summary)
    } else {
        Err(summary)
    }
}

// ---------------------------------------------------------------------------

fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Coordinate descent with a golden-section search per coordinate, each
/// coordinate bracketed by `x_i +- radius`. Stops once a sweep no longer
/// lowers the objective; golden section cannot resolve the argmin below the
/// square root of machine precision anyway.
fn coordinate_argmin<F: Fn(&DVector<f64>) -> f64>(objective: F, x: &DVector<f64>, radius: f64) -> DVector<f64> {
    let mut y = x.clone();
    let mut value = objective(&y);
    for _ in 0..5_000 {
        for i in 0..y.len() {
            let mut trial = y.clone();
            y[i] = golden_section(
                |t| {
                    trial[i] = t;
                    objective(&trial)
                },
                x[i] - radius,
                x[i] + radius,
            );
        }
        let next = objective(&y);
        if value - next <= 1e-15 * (1.0 + next.abs()) {
            break;
        }
        value = next;
    }
    y
}

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| normal(rng)).qr().q()
}

fn huber_of(params: HuberParams, v: &DVector<f64>) -> f64 {
    params.chi * v.iter().map(|&t| huber_value(t, params.mu)).sum::<f64>()
}

fn prox_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = [0.0f64; 4];

    for _ in 0..100 {
        let zeta = 3.0 * normal(&mut rng);
        let mu = 10f64.powf(rng.random_range(-2.0..1.0));
        let tau = 10f64.powf(rng.random_range(-2.0..1.0));
        let oracle = golden_section(|y| huber_value(y, mu) + (y - zeta).powi(2) / (2.0 * tau), zeta - tau - 1.0, zeta + tau + 1.0);
        worst[0] = worst[0].max((huber_prox(zeta, mu, tau) - oracle).abs());
    }

    for _ in 0..100 {
        let n = rng.random_range(2..=5);
        let k = rng.random_range(1..=n);
        let c = 10f64.powf(rng.random_range(-0.5..0.5));
        let q = random_orthogonal(n, &mut rng);
        let l = q.rows(0, k).into_owned() * c.sqrt();
        let params = HuberParams::new(10f64.powf(rng.random_range(-0.5..0.5)), rng.random_range(0.1..1.0)).unwrap();
        let tau = 10f64.powf(rng.random_range(-1.0..0.0));
        let x = DVector::from_fn(n, |_, _| 2.0 * normal(&mut rng));
        let h = HuberPenalty::new(k, params);
        let got = semiorthogonal_prox(&h, &DenseMap::new(l.clone()), c, &x, tau).map_err(|e| e.to_string())?;
        let radius = tau * params.chi * l.abs().sum() + 1.0;
        let oracle = coordinate_argmin(|y| huber_of(params, &(&l * y)) + (y - &x).norm_squared() / (2.0 * tau), &x, radius);
        worst[1] = worst[1].max((got - oracle).amax());
    }

    for _ in 0..100 {
        let n = rng.random_range(2..=5);
        let w = random_orthogonal(n, &mut rng);
        let params = HuberParams::new(10f64.powf(rng.random_range(-0.5..0.5)), rng.random_range(0.1..1.0)).unwrap();
        let tau = 10f64.powf(rng.random_range(-1.0..0.0));
        let x = DVector::from_fn(n, |_, _| 2.0 * normal(&mut rng));
        let h = HuberPenalty::new(n, params);
        let got = orthonormal_prox(&h, &DenseMap::new(w.clone()), &x, tau).map_err(|e| e.to_string())?;
        let radius = tau * params.chi * w.abs().sum() + 1.0;
        let oracle = coordinate_argmin(|y| huber_of(params, &(&w * y)) + (y - &x).norm_squared() / (2.0 * tau), &x, radius);
        worst[2] = worst[2].max((got - oracle).amax());
    }

    for _ in 0..100 {
        let n = rng.random_range(2..=5);
        let k = rng.random_range(1..=n);
        let c: f64 = rng.random_range(0.3..3.0);
        let l = random_orthogonal(n, &mut rng).rows(0, k).into_owned() * c.sqrt();
        let params = HuberParams::new(rng.random_range(0.3..3.0), rng.random_range(0.1..1.0)).unwrap();
        let g = LinearComposition::new(
            Arc::new(HuberPenalty::new(k, params)),
            Arc::new(DenseMap::new(l.clone())),
            CompositionRule::SemiOrthogonal(c),
        )
        .map_err(|e| e.to_string())?;
        let tau = 10f64.powf(rng.random_range(-1.0..0.0));
        let z = DVector::from_fn(n, |_, _| normal(&mut rng));
        let x = DVector::from_fn(n, |_, _| 2.0 * normal(&mut rng));
        let got = scaled_shifted_prox(&z, &g, &x, tau).map_err(|e| e.to_string())?;
        let radius = tau * (params.chi * l.abs().sum() + (&x - &z).amax() + 1.0) + 1.0;
        let oracle = coordinate_argmin(
            |y| 0.5 * (y - &z).norm_squared() + g.value(y) + (y - &x).norm_squared() / (2.0 * tau),
            &x,
            radius,
        );
        worst[3] = worst[3].max((got - oracle).amax());
    }

    let names = ["huber", "semi-orthogonal", "orthonormal", "scaled-shifted"];
    for (name, w) in names.iter().zip(worst) {
        ensure(w <= 1e-6, || format!("{name} prox off by {w:e}"))?;
    }
    Ok(format!(
        "100 instances each, max deviation {:.1e} / {:.1e} / {:.1e} / {:.1e}",
        worst[0], worst[1], worst[2], worst[3]
    ))
}

fn primal_dual_certification() -> Outcome {
    let s = primal_dual_suite(20, 1000, 5).map_err(|e| e.to_string())?;
    ensure(!s.violated(), || "a strong monotonicity or cocoercivity check was violated".into())?;
    let mono = s.monotonicity.iter().map(|r| r.worst_margin).fold(f64::INFINITY, f64::min);
    let coco = s.cocoercivity.iter().map(|r| r.worst_margin).fold(f64::INFINITY, f64::min);
    Ok(format!("20 instances x 1000 pairs, worst margins {mono:.2e} (A) / {coco:.2e} (B)"))
}

fn limit_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let alpha = 10f64.powf(rng.random_range(-2.0..2.0));
        let rho = rng.random_range(1e-3..1.0) / alpha;
        let tau = alpha * rng.random_range(0.01..1.98);
        let p = ProblemParams::new(alpha, 1e12, rho).unwrap();
        for setting in [Setting::Cocoercive, Setting::Optimization] {
            let grad = single_operator_rate(SingleKind::Gradient, setting, alpha, rho, tau).map_err(|e| e.to_string())?;
            let res = single_operator_rate(SingleKind::Resolvent, setting, alpha, rho, tau).map_err(|e| e.to_string())?;
            for (alg, single) in [
                (Algorithm::Ea, grad),
                (Algorithm::FbsGradFProxG, grad),
                (Algorithm::FbsGradGProxF, res),
            ] {
                let two = rate(setting, alg, &p, tau).map_err(|e| e.to_string())?.rate;
                let rel = (two - single).abs() / single.abs().max(1e-300);
                worst = worst.max(rel);
                ensure(rel <= 1e-6, || format!("{alg} {setting}: {two} vs {single} at (alpha {alpha}, rho {rho}, tau {tau})"))?;
            }
        }
    }
    Ok(format!("100 cases, worst relative gap {worst:.2e}"))
}

fn averagedness() -> Outcome {
    let s = averagedness_suite(20, 1000, 31).map_err(|e| e.to_string())?;
    if let Some((alg, r)) = s.reports.iter().find(|r| r.1.violated) {
        return Err(format!("{alg} violates averagedness with constant {}: margin {:e}", r.constant, r.worst_margin));
    }
    let worst = s.reports.iter().map(|r| r.1.worst_margin).fold(f64::INFINITY, f64::min);
    Ok(format!("{} operator reports x 1000 pairs, worst margin {worst:.2e}", s.reports.len()))
}

// ---------------------------------------------------------------------------

type Check = (&'static str, fn() -> Outcome);

fn main() {
    let checks: [Check; 10] = [
        ("optimal step-size oracle", optimal_step_oracle),
        ("contraction certification", contraction_certification),
        ("ordering laws and classifier", ordering_laws),
        ("restoration regions", restoration_regions),
        ("Banach-Picard bound", banach_picard_bound),
        ("denoising iterations", denoising_claim),
        ("prox oracle equivalence", prox_oracles),
        ("primal-dual certification", primal_dual_certification),
        ("beta -> infinity limit", limit_consistency),
        ("averagedness at rho = 0", averagedness),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || f == &(i + 1).to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[{:>2}] {name:<30} PASS  ({secs:.1} s) {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[{:>2}] {name:<30} FAIL  ({secs:.1} s) {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
