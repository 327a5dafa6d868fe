//! Batch front end: configuration loading, the four commands, report
//! writing and exit codes.
//!
//! Reports are JSON with the resolved configuration embedded; wall time
//! lives in its own `timing` field so everything else is reproducible
//! byte for byte. Sweeps and optimizer traces are also available as CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kappa::{self, BoundReport};
use crate::mollifier::{MollifierConfig, TermGrids, PRINT_PRECISION_TOL};
use crate::optimizer::{self, OptimizationResult, OptimizerSettings};
use crate::terms::Term;
use crate::verify::{self, CheckOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

/// Bundled presets by name.
pub const PRESETS: [(&str, &str); 2] = [
    ("paper_kappa", include_str!("../presets/paper_kappa.toml")),
    ("paper_kappa_star", include_str!("../presets/paper_kappa_star.toml")),
];

pub fn preset_text(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let known: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
            Error::config("preset", format!("unknown preset {name:?}; known: {}", known.join(", ")))
        })
}

/// Parses a TOML configuration. Unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<MollifierConfig> {
    toml::from_str(text).map_err(|e| Error::config("config", e.to_string().trim_end().to_string()))
}

#[derive(Debug, Parser)]
#[command(name = "critline", version, about = "Main-term constants and zero-proportion bounds for a three-piece mollifier")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads for quadrature (results do not depend on it).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every term and the bound for one configuration.
    Eval(EvalArgs),
    /// Maximize the bound over the polynomial coefficients and R.
    Optimize(OptimizeArgs),
    /// Run the identity checks; exits 4 if any residual is too large.
    Verify(VerifyArgs),
    /// Tabulate c and the bound over a range of R as CSV.
    Sweep(SweepArgs),
}

/// Where the configuration comes from, plus grid overrides.
#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Bundled preset: paper_kappa or paper_kappa_star.
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Nodes per dimension for every term.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub grid_c1: Option<usize>,
    #[arg(long)]
    pub grid_c12: Option<usize>,
    #[arg(long)]
    pub grid_c2: Option<usize>,
    #[arg(long)]
    pub grid_c3: Option<usize>,
    #[arg(long)]
    pub grid_c23: Option<usize>,
    #[arg(long)]
    pub grid_c31: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub source: Source,
    /// Report path; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Objective evaluations allowed during the search.
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    #[arg(long, default_value_t = 3)]
    pub restarts: usize,
    /// Seed of the restart jitter.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the search trace as CSV.
    #[arg(long)]
    pub trace_csv: Option<PathBuf>,
    /// Suppress progress lines on stderr.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Seed of the random sweeps.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: Source,
    /// CSV path; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub r_min: f64,
    #[arg(long)]
    pub r_max: f64,
    /// Number of R values, endpoints included.
    #[arg(long, default_value_t = 11)]
    pub r_steps: usize,
}

/// A configuration ready to run, with what loading changed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Loaded {
    pub config: MollifierConfig,
    /// Amount added to the linear coefficient of `P1` to restore
    /// `P1(1) + P3(1) = 1`.
    pub renormalization: Option<f64>,
    pub warnings: Vec<String>,
}

impl Source {
    pub fn preset(name: &str) -> Self {
        Source {
            preset: Some(name.to_string()),
            config: None,
            grid: None,
            grid_c1: None,
            grid_c12: None,
            grid_c2: None,
            grid_c3: None,
            grid_c23: None,
            grid_c31: None,
        }
    }

    fn apply_grid(&self, grid: &mut TermGrids) {
        if let Some(n) = self.grid {
            *grid = TermGrids::uniform(n);
        }
        for (slot, v) in [
            (&mut grid.c1, self.grid_c1),
            (&mut grid.c12, self.grid_c12),
            (&mut grid.c2, self.grid_c2),
            (&mut grid.c3, self.grid_c3),
            (&mut grid.c23, self.grid_c23),
            (&mut grid.c31, self.grid_c31),
        ] {
            if let Some(n) = v {
                *slot = n;
            }
        }
    }

    pub fn load(&self) -> Result<Loaded> {
        let mut config = match (&self.preset, &self.config) {
            (Some(name), None) => parse_config(preset_text(name)?)?,
            (None, Some(path)) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    Error::config("config", format!("cannot read {}: {e}", path.display()))
                })?;
                parse_config(&text)?
            }
            (None, None) => return Err(Error::config("config", "pass --preset or --config")),
            (Some(_), Some(_)) => {
                return Err(Error::config("config", "--preset and --config are exclusive"))
            }
        };
        self.apply_grid(&mut config.grid);
        let renormalization = config.polys.renormalize();
        let mut warnings = Vec::new();
        if let Some(d) = renormalization {
            if d.abs() > PRINT_PRECISION_TOL {
                warnings.push(format!(
                    "P1(1) + P3(1) was off by {d:.3e}, beyond coefficient rounding; P1 linear coefficient adjusted"
                ));
            }
        }
        config.validate()?;
        Ok(Loaded {
            config,
            renormalization,
            warnings,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

/// The JSON document written by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub command: String,
    pub config: MollifierConfig,
    pub renormalization: Option<f64>,
    pub warnings: Vec<String>,
    pub result: T,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyResult {
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "R")]
    pub r: f64,
    pub c_total: f64,
    pub bound: f64,
}

fn report<T>(command: &str, loaded: Loaded, result: T, started: Instant) -> Report<T> {
    Report {
        command: command.to_string(),
        config: loaded.config,
        renormalization: loaded.renormalization,
        warnings: loaded.warnings,
        result,
        timing: Timing {
            wall_seconds: started.elapsed().as_secs_f64(),
        },
    }
}

pub fn cmd_eval(args: &EvalArgs) -> Result<Report<BoundReport>> {
    let started = Instant::now();
    let mut loaded = args.source.load()?;
    let result = kappa::evaluate(&loaded.config)?;
    loaded.warnings.extend(result.terms.warnings.iter().cloned());
    Ok(report("eval", loaded, result, started))
}

pub fn cmd_optimize<P>(args: &OptimizeArgs, progress: P) -> Result<Report<OptimizationResult>>
where
    P: FnMut(&optimizer::Progress),
{
    let started = Instant::now();
    let loaded = args.source.load()?;
    let settings = OptimizerSettings {
        budget: args.budget,
        restarts: args.restarts,
        seed: args.seed,
        ..OptimizerSettings::default()
    };
    let result = optimizer::optimize_with_progress(&loaded.config, &settings, progress)?;
    Ok(report("optimize", loaded, result, started))
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Report<VerifyResult>> {
    let started = Instant::now();
    let loaded = args.source.load()?;
    let checks = verify::run_suite(&loaded.config, args.seed)?;
    let passed = checks.iter().all(|c| c.passed);
    Ok(report("verify", loaded, VerifyResult { passed, checks }, started))
}

/// Evaluates the bound at `r_steps` equally spaced values of `R` with the
/// polynomials held fixed.
pub fn cmd_sweep(args: &SweepArgs) -> Result<Report<Vec<SweepRow>>> {
    let started = Instant::now();
    let loaded = args.source.load()?;
    let (lo, hi, n) = (args.r_min, args.r_max, args.r_steps);
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
        return Err(Error::config("r_min, r_max", format!("invalid range [{lo}, {hi}]")));
    }
    if n == 0 || (n == 1 && hi != lo) {
        return Err(Error::config(
            "r_steps",
            "need at least 2 steps, or 1 step with r_min = r_max",
        ));
    }
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let r = if n == 1 {
            lo
        } else {
            lo + (hi - lo) * k as f64 / (n - 1) as f64
        };
        let mut cfg = loaded.config.clone();
        cfg.r = r;
        cfg.validate()?;
        let rep = kappa::evaluate(&cfg)?;
        rows.push(SweepRow {
            r,
            c_total: rep.c_total,
            bound: rep.bound,
        });
    }
    Ok(report("sweep", loaded, rows, started))
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("R,c_total,bound\n");
    for row in rows {
        let _ = writeln!(s, "{:?},{:?},{:?}", row.r, row.c_total, row.bound);
    }
    s
}

pub fn trace_csv(res: &OptimizationResult) -> String {
    let mut s = String::from("evaluation,bound\n");
    for p in &res.trace {
        let _ = writeln!(s, "{},{:?}", p.evaluation, p.bound);
    }
    s
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn summarize_bound(rep: &BoundReport) {
    for t in Term::ALL {
        let v = rep.terms.get(t);
        eprintln!(
            "  {:<4} {:>18.12}   delta {:.1e}",
            t.name(),
            v.value,
            v.refinement_delta
        );
    }
    eprintln!("  c    {:>18.12}", rep.c_total);
    eprintln!("  {} ({}) {:.7} at R = {}", rep.label, rep.mode.label(), rep.bound, rep.r);
}

fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Eval(args) => {
            let rep = cmd_eval(args)?;
            summarize_bound(&rep.result);
            emit(&to_json(&rep), args.output.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Optimize(args) => {
            let quiet = args.quiet;
            let rep = cmd_optimize(args, |p| {
                if !quiet {
                    let terms: Vec<String> = p.terms.iter().map(|v| format!("{v:.6e}")).collect();
                    eprintln!(
                        "eval {:>5}  iter {:>5}  R {:.5}  bound {:.9}  [{}]",
                        p.evaluation,
                        p.iteration,
                        p.r,
                        p.bound,
                        terms.join(" ")
                    );
                }
            })?;
            let res = &rep.result;
            eprintln!(
                "start {:.7} -> best {:.7} (fine grid), {} evaluations, converged: {}",
                res.start_bound, res.best_bound, res.evaluations, res.converged
            );
            if let Some(path) = &args.trace_csv {
                fs::write(path, trace_csv(res))?;
            }
            emit(&to_json(&rep), args.output.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Verify(args) => {
            let rep = cmd_verify(args)?;
            for c in &rep.result.checks {
                eprintln!(
                    "{} {:<34} residual {:.3e} (threshold {:.0e})",
                    if c.passed { "pass" } else { "FAIL" },
                    c.name,
                    c.residual,
                    c.tolerance
                );
            }
            emit(&to_json(&rep), args.output.as_deref())?;
            Ok(if rep.result.passed { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::Sweep(args) => {
            let rep = cmd_sweep(args)?;
            if let Some(best) = rep
                .result
                .iter()
                .max_by(|a, b| a.bound.total_cmp(&b.bound))
            {
                eprintln!("largest bound {:.7} at R = {}", best.bound, best.r);
            }
            emit(&sweep_csv(&rep.result), args.output.as_deref())?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let outcome = match cli.workers {
        Some(0) => Err(Error::config("workers", "must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config("workers", e.to_string()))
            .and_then(|pool| pool.install(|| execute(&cli))),
        None => execute(&cli),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
