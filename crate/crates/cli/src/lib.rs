//! Command-line front end: tabulation of `F_k` and `f`, identity suites and
//! Monte Carlo campaigns.

pub mod config;
pub mod verify;

use std::borrow::Cow;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use prmt_core::fredholm::{self, Discretization, SpikeVector};
use prmt_core::models::{self, LppConfig, SimResult, TabulatedCdf};
use prmt_core::painleve::{self, PainleveTable};
use rayon::prelude::*;

pub use config::{ConfigError, RunConfig};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const CONVERGENCE: i32 = 3;
    pub const ROUTE_DISAGREEMENT: i32 = 4;
    pub const TOLERANCE: i32 = 5;
}

/// Largest allowed `|fredholm − painleve|` in `tabulate --route both`.
pub const ROUTE_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "prmt", version, about = "Generalized Tracy-Widom distributions: tables, checks and simulations")]
pub struct Cli {
    /// `key = value` config file.
    #[arg(long, env = "PRMT_CONFIG", global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags that take precedence over the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Gauss–Legendre nodes on (x, x + L).
    #[arg(long, global = true)]
    pub quad_n: Option<usize>,
    /// Truncation length L of the Fredholm quadrature.
    #[arg(long = "quad-L", global = true)]
    pub quad_l: Option<f64>,
    /// Left end of the Hastings–McLeod table.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub painleve_xmin: Option<f64>,
    /// Right end of the Hastings–McLeod table.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub painleve_xmax: Option<f64>,
    /// Local error tolerance for the table.
    #[arg(long, global = true)]
    pub painleve_tol: Option<f64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate a distribution function on a grid.
    Tabulate(TabulateArgs),
    /// Mean and standard deviation of F_k.
    Moments(MomentsArgs),
    /// Run identity suites.
    Verify(VerifyArgs),
    /// Monte Carlo sampling with an optional KS comparison.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dist {
    F0,
    F1,
    F2,
    F3,
    Fk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Fredholm,
    Painleve,
    Both,
}

#[derive(Debug, Args)]
pub struct TabulateArgs {
    #[arg(long, value_enum)]
    pub dist: Dist,
    /// Spike offsets for `fk`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub w: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub xmin: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub xmax: f64,
    #[arg(long)]
    pub step: f64,
    #[arg(long, value_enum, default_value = "painleve")]
    pub route: Route,
    /// Add dF/dx by 5-point centered differences.
    #[arg(long)]
    pub density: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=3))]
    pub k: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Thm11,
    Thm12,
    Lemma,
    Opuc,
    Gcbo,
    Scaling,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Random spike vectors per k in `thm11`.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Lpp,
    Tasep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Compare {
    F0,
    F1,
    F2,
    F3,
    Fk,
    Gk,
    /// TASEP only: event simulation against the LPP duality.
    Dual,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub model: Model,
    /// M.
    #[arg(long, default_value_t = 400)]
    pub rows: usize,
    /// N.
    #[arg(long, default_value_t = 400)]
    pub cols: usize,
    /// Means of the leading columns.
    #[arg(long, value_delimiter = ',', conflicts_with = "bbp2_w")]
    pub spikes: Option<Vec<f64>>,
    /// Critical-window offsets w_j; means follow the BBP scaling.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub bbp2_w: Option<Vec<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub compare: Option<Compare>,
    /// TASEP: the site m in #(m, t).
    #[arg(long, default_value_t = 0)]
    pub m: usize,
    /// TASEP: observation time.
    #[arg(long, default_value_t = 1.0)]
    pub time: f64,
    /// TASEP: number of simulated particles.
    #[arg(long, default_value_t = 10)]
    pub particles: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub msg: String,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure { code: exit::USAGE, msg: msg.into() }
    }
}

impl From<prmt_core::Error> for Failure {
    fn from(e: prmt_core::Error) -> Self {
        use prmt_core::Error as E;
        let code = match e {
            E::InvalidParams(_) | E::ConfluentParameters { .. } | E::Parse { .. } => exit::USAGE,
            _ => exit::CONVERGENCE,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Settings after merging the config file with flags.
pub struct Context {
    pub disc: Discretization,
    pub table: Cow<'static, PainleveTable>,
    pub seed: u64,
    pub samples: usize,
    pub threads: Option<usize>,
}

impl Context {
    pub fn resolve(file: &RunConfig, flags: &Overrides) -> Result<Self, Failure> {
        let base = Discretization::default();
        let disc = Discretization {
            length: flags.quad_l.or(file.quad_l).unwrap_or(base.length),
            n: flags.quad_n.or(file.quad_n).unwrap_or(base.n),
        };
        if !(disc.length > 0.0) || disc.n == 0 {
            return Err(Failure::usage("quadrature length and node count must be positive"));
        }
        let xmin = flags.painleve_xmin.or(file.painleve_xmin);
        let xmax = flags.painleve_xmax.or(file.painleve_xmax);
        let tol = flags.painleve_tol.or(file.painleve_tol);
        let table = if xmin.is_none() && xmax.is_none() && tol.is_none() {
            Cow::Borrowed(painleve::default_table()?)
        } else {
            Cow::Owned(painleve::solve_hastings_mcleod(
                xmin.unwrap_or(painleve::DEFAULT_X_MIN),
                xmax.unwrap_or(painleve::DEFAULT_X_MAX),
                tol.unwrap_or(painleve::DEFAULT_TOL),
            )?)
        };
        Ok(Context {
            disc,
            table,
            seed: file.sim_seed.unwrap_or(0),
            samples: file.sim_samples.unwrap_or(2000),
            threads: flags.threads.or(file.sim_threads),
        })
    }
}

/// Formats a float so that it parses back to the same value.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Parses arguments and runs the command; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return exit::USAGE;
            }
            let _ = write!(stdout, "{e}");
            return exit::OK;
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.msg);
            f.code
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, Failure> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
            RunConfig::parse(&text).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    let file = load_config(&cli.config)?;
    let ctx = Context::resolve(&file, &cli.overrides)?;
    let body = |stdout: &mut Vec<u8>, stderr: &mut Vec<u8>| match &cli.command {
        Command::Tabulate(a) => cmd_tabulate(a, &ctx, stdout),
        Command::Moments(a) => cmd_moments(a, &ctx, stdout),
        Command::Verify(a) => cmd_verify(a, &ctx, stdout),
        Command::Simulate(a) => cmd_simulate(a, &ctx, stdout, stderr),
    };
    // Output is buffered so the work can run inside a sized thread pool.
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let result = match ctx.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::usage(e.to_string()))?
            .install(|| body(&mut out, &mut err)),
        None => body(&mut out, &mut err),
    };
    stdout.write_all(&out)?;
    stderr.write_all(&err)?;
    result
}

fn cdf_value(dist: Dist, ws: &[f64], route: Route, x: f64, ctx: &Context) -> prmt_core::Result<f64> {
    let table = ctx.table.as_ref();
    match (dist, route) {
        (Dist::F0, Route::Fredholm) => fredholm::f0_fredholm_with(x, &ctx.disc),
        (Dist::F0, _) => painleve::f0_painleve(x, table),
        (Dist::Fk, Route::Fredholm) => fredholm::fk_definition_with(x, &SpikeVector::new(ws.to_vec())?, &ctx.disc),
        (Dist::Fk, _) => fredholm::fk_determinant(x, &SpikeVector::new(ws.to_vec())?, table),
        (d, Route::Fredholm) => fredholm::fk_definition_with(x, &SpikeVector::zeros(dist_k(d))?, &ctx.disc),
        (d, _) => painleve::fk_closed_form(dist_k(d), x, table),
    }
}

fn dist_k(d: Dist) -> usize {
    match d {
        Dist::F0 => 0,
        Dist::F1 => 1,
        Dist::F2 => 2,
        Dist::F3 => 3,
        Dist::Fk => usize::MAX,
    }
}

fn tabulate_route(dist: Dist, ws: &[f64], route: Route, xs: &[f64], ctx: &Context) -> Result<Vec<f64>, Failure> {
    let vals = xs.par_iter().map(|&x| cdf_value(dist, ws, route, x, ctx)).collect::<prmt_core::Result<Vec<_>>>();
    vals.map_err(|e| match e {
        prmt_core::Error::ConfluentParameters { .. } => {
            Failure::usage("the Fredholm route needs distinct w values; use --route painleve for coinciding spikes")
        }
        e => e.into(),
    })
}

pub fn cmd_tabulate(a: &TabulateArgs, ctx: &Context, stdout: &mut dyn Write) -> Outcome {
    if !(a.step > 0.0) || !(a.xmax >= a.xmin) || !a.xmin.is_finite() || !a.xmax.is_finite() {
        return Err(Failure::usage("need finite xmin <= xmax and step > 0"));
    }
    let ws = match (a.dist, &a.w) {
        (Dist::Fk, Some(w)) if !w.is_empty() => w.clone(),
        (Dist::Fk, _) => return Err(Failure::usage("--dist fk needs --w")),
        (_, Some(_)) => return Err(Failure::usage("--w is only valid with --dist fk")),
        (_, None) => Vec::new(),
    };
    let count = ((a.xmax - a.xmin) / a.step + 1e-9).floor() as usize + 1;
    let pad = if a.density { 2 } else { 0 };
    let xs: Vec<f64> = (0..count + 2 * pad).map(|i| a.xmin + (i as f64 - pad as f64) * a.step).collect();
    let primary = if a.route == Route::Painleve { Route::Painleve } else { Route::Fredholm };
    let values = tabulate_route(a.dist, &ws, primary, &xs, ctx)?;
    let other = if a.route == Route::Both { Some(tabulate_route(a.dist, &ws, Route::Painleve, &xs, ctx)?) } else { None };

    let mut text = String::from("x,");
    text.push_str(if a.density { "F,dFdx" } else { "value" });
    if other.is_some() {
        text.push_str(",diff");
    }
    text.push('\n');
    let mut max_diff: f64 = 0.0;
    for i in pad..pad + count {
        let _ = write!(text, "{},{}", fmt_f64(xs[i]), fmt_f64(values[i]));
        if a.density {
            let d = (values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2]) / (12.0 * a.step);
            let _ = write!(text, ",{}", fmt_f64(d));
        }
        if let Some(o) = &other {
            let diff = values[i] - o[i];
            max_diff = max_diff.max(diff.abs());
            let _ = write!(text, ",{}", fmt_f64(diff));
        }
        text.push('\n');
    }
    emit(&a.out, &text, stdout)?;
    Ok(if max_diff > ROUTE_TOL { exit::ROUTE_DISAGREEMENT } else { exit::OK })
}

/// Printed-digit intervals `(mean, sd)` of the moment table.
pub const MOMENT_TABLE: [((f64, f64), (f64, f64)); 4] = [
    ((-1.772, -1.771), (0.90, 0.91)),
    ((-0.495, -0.494), (1.11, 1.12)),
    ((0.543, 0.544), (1.18, 1.19)),
    ((1.445, 1.446), (1.21, 1.22)),
];

pub fn cmd_moments(a: &MomentsArgs, ctx: &Context, stdout: &mut dyn Write) -> Outcome {
    let k = a.k as usize;
    let (mean, sd) = fredholm::moments(k, ctx.table.as_ref())?;
    writeln!(stdout, "k,mean,sd\n{k},{},{}", fmt_f64(mean), fmt_f64(sd))?;
    let ((m0, m1), (s0, s1)) = MOMENT_TABLE[k];
    let ok = (m0..=m1).contains(&mean) && sd >= s0 && sd < s1;
    Ok(if ok { exit::OK } else { exit::TOLERANCE })
}

pub fn cmd_verify(a: &VerifyArgs, ctx: &Context, stdout: &mut dyn Write) -> Outcome {
    let suites = match a.suite {
        Suite::All => vec![Suite::Thm11, Suite::Thm12, Suite::Lemma, Suite::Opuc, Suite::Gcbo, Suite::Scaling],
        s => vec![s],
    };
    let mut all_pass = true;
    for s in suites {
        let r = verify::run_suite(s, a.trials, a.seed.unwrap_or(ctx.seed), ctx)?;
        writeln!(stdout, "{} {} {:.3e}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.max_err)?;
        all_pass &= r.pass;
    }
    Ok(if all_pass { exit::OK } else { exit::VERIFY_FAILED })
}

/// KS tolerance for a comparison target.
pub fn scenario_tolerance(c: Compare) -> f64 {
    match c {
        Compare::F0 => 0.10,
        Compare::F1 | Compare::F2 | Compare::F3 | Compare::Fk => 0.12,
        Compare::Gk => 0.08,
        Compare::Dual => 0.02,
    }
}

pub fn cmd_simulate(a: &SimulateArgs, ctx: &Context, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    let seed = a.seed.unwrap_or(ctx.seed);
    let samples = a.samples.unwrap_or(ctx.samples);
    if samples == 0 {
        return Err(Failure::usage("--samples must be at least 1"));
    }
    let (result, ks) = match a.model {
        Model::Lpp => simulate_lpp(a, ctx, seed, samples)?,
        Model::Tasep => simulate_tasep(a, seed, samples)?,
    };
    let summary = match ks {
        Some(v) => format!("KS={} n={samples}\n", fmt_f64(v)),
        None => format!("n={samples}\n"),
    };
    let csv = result.to_csv();
    match &a.out {
        Some(p) => {
            std::fs::write(p, csv)?;
            stdout.write_all(summary.as_bytes())?;
        }
        None => {
            stdout.write_all(csv.as_bytes())?;
            stderr.write_all(summary.as_bytes())?;
        }
    }
    let over = matches!((a.compare, ks), (Some(c), Some(v)) if v > scenario_tolerance(c));
    Ok(if over { exit::TOLERANCE } else { exit::OK })
}

fn simulate_lpp(a: &SimulateArgs, ctx: &Context, seed: u64, samples: usize) -> Result<(SimResult, Option<f64>), Failure> {
    if a.rows < a.cols || a.cols == 0 {
        return Err(Failure::usage("need rows >= cols >= 1"));
    }
    let gamma = (a.rows as f64 / a.cols as f64).sqrt();
    let means = match (&a.spikes, &a.bbp2_w) {
        (Some(s), _) => s.clone(),
        (None, Some(w)) => models::bbp2_spike_means(gamma, a.rows, w)?,
        (None, None) => Vec::new(),
    };
    let cfg = LppConfig::new(a.cols, a.rows, means.clone(), seed)?;
    let (center, scale) = if a.compare == Some(Compare::Gk) {
        let l1 = means.iter().copied().fold(f64::NAN, f64::max);
        if l1.is_nan() {
            return Err(Failure::usage("--compare gk needs --spikes"));
        }
        models::supercritical_scaling(a.rows, gamma, l1)?
    } else {
        models::null_scaling(a.rows, gamma)
    };
    let result = SimResult::lpp(&cfg, samples, center, scale);
    let table = ctx.table.as_ref();
    let reference = |ws: &[f64]| TabulatedCdf::fk(ws, table, 0.01);
    let ks = match a.compare {
        None => None,
        Some(Compare::Dual) => return Err(Failure::usage("--compare dual applies to tasep only")),
        Some(Compare::Gk) => {
            let l1 = means.iter().copied().fold(f64::NAN, f64::max);
            let k = means.iter().filter(|m| (**m - l1).abs() <= 1e-12).count();
            let g = models::sample_streams(seed.wrapping_add(1), samples, |r| models::gue_max_sample(k, r).unwrap_or(f64::NAN));
            if g.iter().any(|v| v.is_nan()) {
                return Err(Failure::usage(format!("G_k sampler supports k <= 8, got {k}")));
            }
            Some(models::ks_two_sample(&result.samples, &g))
        }
        Some(c) => {
            let ws: Vec<f64> = match c {
                Compare::F0 => Vec::new(),
                Compare::F1 => vec![0.0],
                Compare::F2 => vec![0.0; 2],
                Compare::F3 => vec![0.0; 3],
                _ => a.bbp2_w.clone().ok_or_else(|| Failure::usage("--compare fk needs --bbp2-w"))?,
            };
            let f = reference(&ws)?;
            Some(models::ks_statistic(&result.samples, |x| f.eval(x)))
        }
    };
    Ok((result, ks))
}

fn simulate_tasep(a: &SimulateArgs, seed: u64, samples: usize) -> Result<(SimResult, Option<f64>), Failure> {
    if a.particles == 0 || !(a.time >= 0.0) {
        return Err(Failure::usage("need --particles >= 1 and --time >= 0"));
    }
    let rates = a.spikes.clone().unwrap_or_default();
    if rates.iter().any(|l| !(*l > 0.0)) {
        return Err(Failure::usage("slow-start means must be positive"));
    }
    let counts = models::sample_streams(seed, samples, |r| {
        models::tasep_count(&models::tasep_event_sim(a.particles, &rates, a.time, r), a.m as i64) as f64
    });
    let holes = counts.iter().map(|c| models::tasep_hole_count(*c as usize, a.m) as f64).collect();
    let ks = match a.compare {
        None => None,
        Some(Compare::Dual) => {
            let dual = models::sample_streams(seed.wrapping_add(1), samples, |r| {
                models::tasep_count_dual(a.m, a.time, &rates, a.particles, r) as f64
            });
            Some(models::ks_two_sample(&counts, &dual))
        }
        Some(_) => return Err(Failure::usage("tasep supports --compare dual only")),
    };
    Ok((SimResult { raw: counts, samples: holes, scaling: None, seed, streams: samples }, ks))
}
