//! Command-line front end. `run` returns the process exit code: 0 on
//! success, 1 on invalid input or I/O failure, 2 when a verification check
//! finds a violation.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use crate::error::{Error, Result};
use crate::experiments::{run_denoise, run_restore, DenoiseConfig, RestoreConfig, Scheme, SchemeRun};
use crate::plot::plot_rate_curves;
use crate::rates::{optimal, rate, Algorithm, ProblemParams, Setting};
use crate::regions::{classify, linear_grid, log_grid, region_map, OptimalRates, RegionPoint};
use crate::verification::{averagedness_suite, contraction_suite, primal_dual_suite, tightness_witness};

#[derive(Parser, Debug)]
#[command(name = "opsplit", version, about = "Linear rates, optimal step-sizes and benchmarks for splitting methods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rates of one or more algorithms at given step-sizes, or at the optimum.
    Rates(RatesArgs),
    /// Winner of the efficiency regions at a point, or a map over a grid.
    Regions(RegionsArgs),
    /// Piecewise-constant denoising benchmark.
    Denoise(DenoiseArgs),
    /// Compressed-sensing restoration benchmark.
    Restore(RestoreArgs),
    /// Certification suites; exits 2 on any violation.
    Verify(VerifyArgs),
    /// Rate-versus-step-size curves.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SettingArg {
    Coco,
    Opt,
    Both,
}

impl SettingArg {
    fn settings(self) -> Vec<Setting> {
        match self {
            SettingArg::Coco => vec![Setting::Cocoercive],
            SettingArg::Opt => vec![Setting::Optimization],
            SettingArg::Both => vec![Setting::Cocoercive, Setting::Optimization],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Pretty,
    Csv,
}

#[derive(Args, Debug)]
struct ParamArgs {
    #[arg(long)]
    alpha: f64,
    /// `inf` for `B = 0`.
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    rho: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<ProblemParams> {
        ProblemParams::new(self.alpha, self.beta, self.rho)
    }
}

#[derive(Args, Debug)]
struct RatesArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Repeatable; defaults to the five splitting schemes.
    #[arg(long = "algo", value_delimiter = ',')]
    algorithms: Vec<Algorithm>,
    #[arg(long, value_enum, default_value = "both")]
    setting: SettingArg,
    /// Evaluate at this step-size.
    #[arg(long, conflicts_with_all = ["optimal", "tau_min"])]
    tau: Option<f64>,
    /// Report the optimal step-size and rate (the default).
    #[arg(long)]
    optimal: bool,
    /// Tabulate over `[tau_min, tau_max]`.
    #[arg(long, requires = "tau_max")]
    tau_min: Option<f64>,
    #[arg(long, requires = "tau_min")]
    tau_max: Option<f64>,
    #[arg(long, default_value_t = 11)]
    n_tau: usize,
    #[arg(long, value_enum, default_value = "pretty")]
    format: Format,
}

#[derive(Args, Debug)]
struct RegionsArgs {
    /// Normalized `beta / alpha` of a single point.
    #[arg(long, required_unless_present = "grid")]
    beta: Option<f64>,
    /// Normalized `rho alpha` of a single point.
    #[arg(long, required_unless_present = "grid")]
    rho: Option<f64>,
    /// Also print the region and the five optimal rates.
    #[arg(long)]
    verbose: bool,
    /// Map a grid instead, writing `regions.csv` and `regions.svg`.
    #[arg(long, conflicts_with_all = ["beta", "rho"])]
    grid: bool,
    #[arg(long, default_value_t = 1e-2)]
    beta_min: f64,
    #[arg(long, default_value_t = 1e4)]
    beta_max: f64,
    #[arg(long, default_value_t = 100)]
    n_beta: usize,
    #[arg(long, default_value_t = 1e-3)]
    rho_min: f64,
    #[arg(long, default_value_t = 0.99)]
    rho_max: f64,
    #[arg(long, default_value_t = 100)]
    n_rho: usize,
    #[arg(long, default_value = "regions")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DenoiseArgs {
    /// JSON file with `DenoiseConfig` fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "runs/denoise")]
    out: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    n_segments: Option<usize>,
    #[arg(long)]
    noise_sigma: Option<f64>,
    #[arg(long)]
    chi: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<Scheme>>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    stop_tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Noisy signal to denoise (`.csv`, or `.f64` with sidecar).
    #[arg(long)]
    observation: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RestoreArgs {
    /// JSON file with `RestoreConfig` fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "runs/restore")]
    out: PathBuf,
    /// 4096 pixels and 4900 measurements.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    n_pixels: Option<usize>,
    #[arg(long)]
    m_rows: Option<usize>,
    #[arg(long)]
    chi: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    wavelet_levels: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<Scheme>>,
    #[arg(long)]
    noise_sigma: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    stop_tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 500)]
    cases: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    pairs: usize,
    #[arg(long, default_value_t = 20)]
    instances: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the full JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long = "algo", value_delimiter = ',')]
    algorithms: Vec<Algorithm>,
    #[arg(long, value_enum, default_value = "opt")]
    setting: SettingArg,
    /// Upper end of the grid; defaults to twice the largest optimal step.
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long, default_value_t = 400)]
    n: usize,
    #[arg(long, default_value = "sweep")]
    out: PathBuf,
}

enum Outcome {
    Done,
    Violations,
}

/// Parse `argv` (program name first) and run the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::Violations) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Rates(a) => rates_cmd(a),
        Command::Regions(a) => regions_cmd(a),
        Command::Denoise(a) => denoise_cmd(a),
        Command::Restore(a) => restore_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
    }
}

fn or_splitting(algs: Vec<Algorithm>) -> Vec<Algorithm> {
    if algs.is_empty() {
        Algorithm::SPLITTING.to_vec()
    } else {
        algs
    }
}

fn rates_cmd(a: RatesArgs) -> Result<Outcome> {
    let params = a.params.params()?;
    let algorithms = or_splitting(a.algorithms);
    let taus: Option<Vec<f64>> = match (a.tau, a.tau_min, a.tau_max) {
        (Some(t), _, _) => Some(vec![t]),
        (None, Some(lo), Some(hi)) => {
            if !(lo > 0.0 && hi >= lo) || a.n_tau == 0 {
                return Err(Error::Parameter(format!("bad step-size range [{lo}, {hi}] x {}", a.n_tau)));
            }
            Some(linear_grid(lo, hi, a.n_tau))
        }
        _ => None,
    };
    let show_optimal = a.optimal || taus.is_none();

    type Row = (Setting, Algorithm, std::result::Result<(f64, f64), String>, bool);
    let mut rows: Vec<Row> = Vec::new();
    for setting in a.setting.settings() {
        for &alg in &algorithms {
            if show_optimal {
                let r = optimal(setting, alg, &params).map(|c| (c.tau_star, c.rate_star));
                rows.push((setting, alg, r.map_err(|e| e.to_string()), true));
            }
            for &tau in taus.iter().flatten() {
                let r = rate(setting, alg, &params, tau).map(|r| (tau, r.rate));
                rows.push((setting, alg, r.map_err(|e| e.to_string()), false));
            }
        }
    }

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let w = |e: std::io::Error| Error::io("writing to stdout", e);
    match a.format {
        Format::Csv => {
            writeln!(out, "setting,algorithm,optimal,tau,rate").map_err(w)?;
            for (s, alg, r, opt) in &rows {
                match r {
                    Ok((tau, rate)) => writeln!(out, "{s},{alg},{opt},{tau},{rate}"),
                    Err(_) => writeln!(out, "{s},{alg},{opt},,"),
                }
                .map_err(w)?;
            }
        }
        Format::Pretty => {
            writeln!(out, "alpha = {}, beta = {}, rho = {}", params.alpha(), params.beta(), params.rho()).map_err(w)?;
            writeln!(out, "{:<13} {:<16} {:>14} {:>10}", "setting", "algorithm", "tau", "rate").map_err(w)?;
            for (s, alg, r, opt) in &rows {
                let name = alg.name();
                match r {
                    Ok((tau, rate)) => {
                        let label = if *opt { format!("{tau:.6} *") } else { format!("{tau:.6}  ") };
                        writeln!(out, "{:<13} {name:<16} {label:>14} {rate:>10.6}", s.to_string())
                    }
                    Err(msg) => writeln!(out, "{:<13} {name:<16} {msg}", s.to_string()),
                }
                .map_err(w)?;
            }
        }
    }
    if rows.iter().all(|r| r.2.is_err()) {
        return Err(Error::Domain(rows.first().and_then(|r| r.2.clone().err()).unwrap_or_else(|| "nothing to compute".into())));
    }
    Ok(Outcome::Done)
}

fn regions_cmd(a: RegionsArgs) -> Result<Outcome> {
    if a.grid {
        if a.n_beta == 0 || a.n_rho == 0 {
            return Err(Error::Parameter("grid needs at least one point per axis".into()));
        }
        let map = region_map(&log_grid(a.beta_min, a.beta_max, a.n_beta), &linear_grid(a.rho_min, a.rho_max, a.n_rho))?;
        fs::create_dir_all(&a.out).map_err(|e| Error::io(format!("creating {}", a.out.display()), e))?;
        let csv = a.out.join("regions.csv");
        let file = fs::File::create(&csv).map_err(|e| Error::io(format!("creating {}", csv.display()), e))?;
        map.write_csv(std::io::BufWriter::new(file))
            .map_err(|e| Error::io(format!("writing {}", csv.display()), e))?;
        write_file(&a.out.join("regions.svg"), map.to_svg().as_bytes())?;
        println!("wrote {} cells to {}", a.n_beta * a.n_rho, a.out.display());
        return Ok(Outcome::Done);
    }
    let (beta, rho) = (a.beta.unwrap_or_default(), a.rho.unwrap_or_default());
    let point = RegionPoint::new(beta, rho)?;
    let label = classify(&point);
    println!("{}", label.winner);
    if a.verbose {
        println!("region: {:?}", label.region);
        for (alg, r) in OptimalRates::at(&point).entries() {
            println!("{:<16} {r:.6}", alg.name());
        }
    }
    Ok(Outcome::Done)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn load_config<T: DeserializeOwned + Default>(path: &Option<PathBuf>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::io(format!("reading config {}", p.display()), e))?;
            serde_json::from_str(&text).map_err(Error::from)
        }
    }
}

macro_rules! override_fields {
    ($cfg:ident, $args:ident, $($field:ident),*) => {
        $(if let Some(v) = $args.$field.clone() { $cfg.$field = v; })*
    };
}

fn print_runs(runs: &[SchemeRun]) {
    println!("{:<6} {:>12} {:>10} {:>10} {:>10}", "scheme", "tau", "rate", "empirical", "to 1e-3");
    for r in runs {
        let emp = r.empirical_rate.map_or("-".to_string(), |v| format!("{v:.6}"));
        let hit = r.iterations_to_1e3.map_or("-".to_string(), |k| k.to_string());
        println!("{:<6} {:>12.6e} {:>10.6} {emp:>10} {hit:>10}", r.scheme.name(), r.tau, r.rate);
        if let Some(f) = &r.failure {
            println!("       failed: {f}");
        }
    }
}

fn denoise_cmd(a: DenoiseArgs) -> Result<Outcome> {
    let mut cfg: DenoiseConfig = load_config(&a.config)?;
    override_fields!(cfg, a, n, n_segments, noise_sigma, chi, mu, algorithms, max_iter, stop_tol, seed);
    if a.observation.is_some() {
        cfg.observation = a.observation.clone();
    }
    let result = run_denoise(&cfg)?;
    println!(
        "split: alpha = {:.6e}, beta = {:.6e}, rho = {}; reference after {} iterations",
        result.split.alpha, result.split.beta, result.split.rho, result.reference_iterations
    );
    print_runs(&result.runs);
    result.write(&a.out)?;
    println!("outputs in {}", a.out.display());
    Ok(Outcome::Done)
}

fn restore_cmd(a: RestoreArgs) -> Result<Outcome> {
    let mut cfg: RestoreConfig = load_config(&a.config)?;
    if a.full {
        cfg = cfg.full_size();
    }
    override_fields!(cfg, a, n_pixels, m_rows, chi, mu, wavelet_levels, algorithms, noise_sigma, max_iter, stop_tol, seed);
    let result = run_restore(&cfg)?;
    println!(
        "lambda_min = {:.6e}, lambda_max = {:.6}, beta = mu/chi = {}",
        result.lambda_min, result.lambda_max, result.params.beta
    );
    match result.predicted {
        Some(l) => println!("predicted winner: {} ({:?})", l.winner, l.region),
        None => println!("predicted winner: none (point outside the normalized plane)"),
    }
    print_runs(&result.runs);
    result.write(&a.out)?;
    println!("outputs in {}", a.out.display());
    Ok(Outcome::Done)
}

fn verify_cmd(a: VerifyArgs) -> Result<Outcome> {
    let contraction = contraction_suite(a.cases, a.seed, a.tol)?;
    println!(
        "contraction: {} cases, {} checks, worst excess {:.3e}, {} violations",
        contraction.cases,
        contraction.checks,
        contraction.worst_excess,
        contraction.violations.len()
    );
    let tight_params = ProblemParams::new(1.0, 2.0, 0.3)?;
    let tight = tightness_witness(&tight_params, 0.5)?;
    let tight_ok = (tight.exact - tight.claimed).abs() <= 1e-10;
    println!("tightness: exact {:.12} claimed {:.12}", tight.exact, tight.claimed);
    let averaged = averagedness_suite(a.instances, a.pairs, a.seed)?;
    println!(
        "averagedness: {} reports, {} violated",
        averaged.reports.len(),
        averaged.reports.iter().filter(|r| r.1.violated).count()
    );
    let primal_dual = primal_dual_suite(a.instances, a.pairs, a.seed)?;
    println!("primal-dual: {} instances, violated: {}", primal_dual.instances, primal_dual.violated());

    let bad = !contraction.violations.is_empty() || !tight_ok || averaged.violated() || primal_dual.violated();
    if let Some(path) = &a.out {
        let report = serde_json::json!({
            "contraction": contraction,
            "tightness": { "params": tight_params, "tau": 0.5, "exact": tight.exact, "claimed": tight.claimed },
            "averagedness": averaged,
            "primal_dual": primal_dual,
            "violated": bad,
        });
        write_file(path, &serde_json::to_vec_pretty(&report)?)?;
    }
    Ok(if bad { Outcome::Violations } else { Outcome::Done })
}

fn sweep_cmd(a: SweepArgs) -> Result<Outcome> {
    let params = a.params.params()?;
    let algorithms = or_splitting(a.algorithms);
    let settings = a.setting.settings();
    if a.n < 2 {
        return Err(Error::Parameter("sweep needs at least 2 points".into()));
    }
    let tau_max = match a.tau_max {
        Some(t) if t > 0.0 => t,
        Some(t) => return Err(Error::Parameter(format!("tau_max must be positive, got {t}"))),
        None => {
            let best = settings
                .iter()
                .flat_map(|&s| algorithms.iter().filter_map(move |&alg| optimal(s, alg, &params).ok()))
                .map(|c| c.tau_star)
                .fold(0.0, f64::max);
            if best > 0.0 { 2.0 * best } else { 1.0 }
        }
    };
    let taus: Vec<f64> = (1..=a.n).map(|i| tau_max * i as f64 / a.n as f64).collect();
    let mut series = Vec::new();
    for &s in &settings {
        for &alg in &algorithms {
            let pts = taus
                .iter()
                .map(|&t| (t, rate(s, alg, &params, t).map_or(f64::NAN, |r| r.rate)))
                .collect::<Vec<_>>();
            let label = if settings.len() > 1 { format!("{alg} ({s})") } else { alg.to_string() };
            series.push((label, pts));
        }
    }
    fs::create_dir_all(&a.out).map_err(|e| Error::io(format!("creating {}", a.out.display()), e))?;
    let mut csv = String::from("tau");
    for (label, _) in &series {
        csv.push(',');
        csv.push_str(label);
    }
    csv.push('\n');
    for (i, t) in taus.iter().enumerate() {
        csv.push_str(&t.to_string());
        for (_, pts) in &series {
            csv.push(',');
            if pts[i].1.is_finite() {
                csv.push_str(&pts[i].1.to_string());
            }
        }
        csv.push('\n');
    }
    write_file(&a.out.join("sweep.csv"), csv.as_bytes())?;
    let title = format!("alpha = {}, beta = {}, rho = {}", params.alpha(), params.beta(), params.rho());
    write_file(&a.out.join("sweep.svg"), plot_rate_curves(&series, &title).as_bytes())?;
    println!("wrote {} step-sizes x {} curves to {}", a.n, series.len(), a.out.display());
    Ok(Outcome::Done)
}
