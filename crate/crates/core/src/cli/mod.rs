//! The `levymap` command line.
//!
//! Exit codes: 0 on success, 1 when a verify suite fails or a computation
//! errors, 2 on usage or input errors.

pub mod document;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::catalog::{exp_composed_density, exp_pushforward_density};
use crate::error::{LevyError, Result};
use crate::mapping::{
    apply_j_exponent, apply_j_triplet, compose_j_exponent, compose_j_triplet, RandomIntegralSpec,
};
use crate::simulate::{
    empirical_cf, sample_random_integral, SimConfig, SmallJumpMode, DEFAULT_SEED,
};
use crate::triplet::LevyTriplet;
use crate::verify::{run_suite, Suite, Tolerances, VerifyOptions};

pub use document::{parse_triplet, serialize_triplet, triplet_to_value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "levymap",
    version,
    about = "Infinitely divisible laws and the random integral mappings J^β"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the characteristic exponent of a triplet.
    Exponent {
        #[arg(long)]
        triplet: PathBuf,
        #[command(flatten)]
        grid: YGrid,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Apply J^β to a triplet.
    Map {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        triplet: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Apply J^α∘J^β to a triplet.
    Compose {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        triplet: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Monte Carlo estimate of the characteristic function of J^β or J^α∘J^β.
    Simulate(SimulateArgs),
    /// Tabulate the Lévy density of a mapped exponential example.
    Density(DensityArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct YGrid {
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    pub y_min: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub y_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 41)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all",
          value_parser = ["all", "factorization", "commutativity", "prop3", "stable", "exponential",
                          "limit", "corollary2", "montecarlo", "special", "timechange"])]
    pub suite: String,
    /// Write a JSON summary of every check to this file.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long, env = "LEVYMAP_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 20_000)]
    pub mc_samples: usize,
    #[arg(long, default_value_t = 512)]
    pub mc_steps: usize,
    #[arg(long)]
    pub tol_identity: Option<f64>,
    #[arg(long)]
    pub tol_density: Option<f64>,
    #[arg(long)]
    pub tol_closed_form: Option<f64>,
    #[arg(long)]
    pub tol_parameter: Option<f64>,
    #[arg(long)]
    pub tol_mass: Option<f64>,
    #[arg(long)]
    pub tol_monte_carlo: Option<f64>,
    #[arg(long)]
    pub tol_limit: Option<f64>,
    #[arg(long)]
    pub tol_special: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub triplet: PathBuf,
    /// Outer index; omit to simulate J^β alone.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 512)]
    pub time_steps: usize,
    /// Jumps of size at most this are replaced by a Gaussian with matching variance.
    #[arg(long, default_value_t = 1e-3)]
    pub cutoff: f64,
    /// Discard small jumps instead of approximating them.
    #[arg(long)]
    pub drop_small_jumps: bool,
    #[arg(long, env = "LEVYMAP_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub grid: YGrid,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DensityExample {
    /// Lévy density of J^β applied to the exponential law.
    ExpMap,
    /// Lévy density of J^α∘J^β applied to the exponential law.
    ExpComposed,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long, value_enum)]
    pub example: DensityExample,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    pub x_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(msg: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            message: msg.to_string(),
        }
    }
}

impl From<LevyError> for CliError {
    fn from(e: LevyError) -> Self {
        let code = match e {
            LevyError::Parse(_) | LevyError::Domain(_) | LevyError::InvalidMeasure(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Parses `args` and runs the command, writing results to stdout or the
/// requested file and diagnostics to stderr. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("levymap: {}", e.message);
            e.code
        }
    }
}

fn execute(cmd: &Command) -> std::result::Result<i32, CliError> {
    match cmd {
        Command::Exponent {
            triplet,
            grid,
            output,
        } => {
            let t = read_triplet(triplet)?;
            let ys = grid.points()?;
            let phi = t.exponent();
            let mut out = String::from("y,re_phi,im_phi\n");
            for y in ys {
                let v = phi.eval(y)?;
                writeln!(out, "{},{},{}", num(y), num(v.re), num(v.im)).unwrap();
            }
            emit(output.as_deref(), &out)?;
        }
        Command::Map {
            beta,
            triplet,
            output,
        } => {
            let t = read_triplet(triplet)?;
            let mapped = apply_j_triplet(*beta, &t)?;
            emit(output.as_deref(), &serialize_triplet(&mapped))?;
        }
        Command::Compose {
            alpha,
            beta,
            triplet,
            output,
        } => {
            let t = read_triplet(triplet)?;
            let mapped = compose_j_triplet(*alpha, *beta, &t)?;
            emit(output.as_deref(), &serialize_triplet(&mapped))?;
        }
        Command::Verify(args) => return verify(args),
        Command::Simulate(args) => simulate(args)?,
        Command::Density(args) => density(args)?,
    }
    Ok(EXIT_OK)
}

impl YGrid {
    fn points(&self) -> std::result::Result<Vec<f64>, CliError> {
        linspace(self.y_min, self.y_max, self.steps)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> std::result::Result<Vec<f64>, CliError> {
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(CliError::usage(format!("invalid range [{lo}, {hi}]")));
    }
    match n {
        0 => Err(CliError::usage("steps must be at least 1")),
        1 => Ok(vec![lo]),
        _ => Ok((0..n)
            .map(|k| {
                if k + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (n - 1) as f64
                }
            })
            .collect()),
    }
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn read_triplet(path: &Path) -> Result<LevyTriplet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LevyError::Parse(format!("{}: {e}", path.display())))?;
    parse_triplet(&text).map_err(|e| match e {
        LevyError::Parse(m) => LevyError::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn emit(path: Option<&Path>, text: &str) -> std::result::Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError {
            code: EXIT_FAILURE,
            message: format!("{}: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verify(args: &VerifyArgs) -> std::result::Result<i32, CliError> {
    let suites = Suite::parse_selection(&args.suite)?;
    let mut tol = Tolerances::default();
    for (slot, value) in [
        (&mut tol.identity, args.tol_identity),
        (&mut tol.density, args.tol_density),
        (&mut tol.closed_form, args.tol_closed_form),
        (&mut tol.parameter, args.tol_parameter),
        (&mut tol.mass, args.tol_mass),
        (&mut tol.monte_carlo, args.tol_monte_carlo),
        (&mut tol.limit, args.tol_limit),
        (&mut tol.special, args.tol_special),
    ] {
        if let Some(v) = value {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::usage(format!(
                    "tolerance must be positive, got {v}"
                )));
            }
            *slot = v;
        }
    }
    if args.mc_samples == 0 || args.mc_steps == 0 {
        return Err(CliError::usage("mc-samples and mc-steps must be positive"));
    }
    let opts = VerifyOptions {
        tolerances: tol,
        seed: args.seed,
        mc_samples: args.mc_samples,
        mc_steps: args.mc_steps,
    };

    let mut reports = Vec::new();
    for suite in suites {
        let report = run_suite(suite, &opts);
        for c in &report.checks {
            println!("{suite} {}", c.line());
        }
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        println!(
            "{suite}: {} ({} checks, {failed} failed, {:.2}s)",
            if report.passed() { "PASS" } else { "FAIL" },
            report.checks.len(),
            report.elapsed_seconds
        );
        reports.push(report);
    }
    let all_passed = reports.iter().all(|r| r.passed());
    if let Some(path) = &args.summary {
        let doc = json!({
            "passed": all_passed,
            "seed": opts.seed,
            "tolerances": opts.tolerances,
            "suites": reports,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("summary serializes");
        text.push('\n');
        emit(Some(path), &text)?;
    }
    Ok(if all_passed { EXIT_OK } else { EXIT_FAILURE })
}

fn simulate(args: &SimulateArgs) -> std::result::Result<(), CliError> {
    let driver = read_triplet(&args.triplet)?;
    let ys = args.grid.points()?;
    let (spec, phi) = match args.alpha {
        Some(alpha) => (
            RandomIntegralSpec::composition(alpha, args.beta, driver.clone())?,
            compose_j_exponent(alpha, args.beta, &driver.exponent())?,
        ),
        None => (
            RandomIntegralSpec::j_beta(args.beta, driver.clone())?,
            apply_j_exponent(args.beta, &driver.exponent())?,
        ),
    };
    let cfg = SimConfig {
        n_samples: args.samples,
        n_steps: args.time_steps,
        jump_cutoff: args.cutoff,
        seed: args.seed,
        small_jump_mode: if args.drop_small_jumps {
            SmallJumpMode::Drop
        } else {
            SmallJumpMode::GaussianApproximate
        },
        parallel: true,
    };
    cfg.validate()?;
    let samples = sample_random_integral(&spec, &cfg)?;
    let emp = empirical_cf(&samples, &ys)?;
    let mut out = String::from("y,re_emp,im_emp,re_analytic,im_analytic,abs_diff\n");
    let mut sup: f64 = 0.0;
    for (&y, &v) in ys.iter().zip(&emp.values) {
        let a = phi.characteristic_function(y)?;
        let d = (v - a).norm();
        sup = sup.max(d);
        writeln!(
            out,
            "{},{},{},{},{},{}",
            num(y),
            num(v.re),
            num(v.im),
            num(a.re),
            num(a.im),
            num(d)
        )
        .unwrap();
    }
    writeln!(
        out,
        "# sup_abs_diff={} max_std_error={}",
        num(sup),
        num(emp.max_std_error())
    )
    .unwrap();
    emit(args.output.as_deref(), &out)?;
    eprintln!(
        "sup |empirical - analytic| = {sup:.4e} over {} samples (seed {})",
        args.samples, args.seed
    );
    Ok(())
}

fn density(args: &DensityArgs) -> std::result::Result<(), CliError> {
    if !(args.x_min > 0.0) {
        return Err(CliError::usage("x-min must be positive"));
    }
    let xs = linspace(args.x_min, args.x_max, args.steps)?;
    let f: Box<dyn Fn(f64) -> Result<f64>> = match (args.example, args.alpha) {
        (DensityExample::ExpMap, None) => {
            Box::new(|x| exp_pushforward_density(args.beta, args.lambda, x))
        }
        (DensityExample::ExpMap, Some(_)) => {
            return Err(CliError::usage("exp-map takes no --alpha"))
        }
        (DensityExample::ExpComposed, None) => {
            return Err(CliError::usage("exp-composed requires --alpha"))
        }
        (DensityExample::ExpComposed, Some(alpha)) => {
            Box::new(move |x| exp_composed_density(alpha, args.beta, args.lambda, x))
        }
    };
    let mut out = String::from("x,density\n");
    for x in xs {
        writeln!(out, "{},{}", num(x), num(f(x)?)).unwrap();
    }
    emit(args.output.as_deref(), &out)
}
