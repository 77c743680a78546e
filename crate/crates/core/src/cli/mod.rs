//! Command-line front end: scenario registry, solver commands and report emission.
//!
//! Exit status: 0 pass, 1 fail, 3 undetermined, 2 usage error, 4 runtime error.
//! Solver commands print their certificate and exit 0 unless an error occurs.

pub mod report;
pub mod scenarios;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::expansivity::{
    check_ball_expanding, check_expanding, check_locally_injective, check_open_on, check_star,
    positively_expansive_falsify, shift_positively_expansive, ExpansivityError, RegionSpec,
};
use crate::kneading::{find_parameter, k_word, KneadingError, KneadingWord};
use crate::numerics::{parse_rational, NumericsError, Rational, RationalIntervalSet};
use crate::pseudo_orbits::{self, OrbitError, PseudoOrbit};
use crate::shadowing::{h_shadow_solve, shadow_oracle, shadow_oracle_enclosure, ShadowError};
use crate::systems::{Point, SystemError, SystemSpec};

pub use report::{emit, render, Format, Report, Status};
pub use scenarios::{registry, run_scenario, ScenarioParams, DEFAULT_SEED};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Shadow(#[from] ShadowError),
    #[error(transparent)]
    Expansivity(#[from] ExpansivityError),
    #[error(transparent)]
    Kneading(#[from] KneadingError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 4,
        }
    }
}

pub fn status_code(status: Status) -> i32 {
    match status {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Undetermined => 3,
    }
}

#[derive(Debug, Parser)]
#[command(name = "shadowlab", version, about = "Exact shadowing and expansivity analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Reproducible scenarios.
    #[command(subcommand)]
    Scenario(ScenarioCommand),
    /// Shadowing solvers for a pseudo-orbit file.
    Shadow(ShadowArgs),
    /// Expansivity certifiers.
    #[command(subcommand)]
    Expansivity(ExpansivityCommand),
    /// Kneading parameter search in the family 1 - mu x^2.
    #[command(subcommand)]
    Kneading(KneadingCommand),
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum ScenarioCommand {
    /// Print the registered scenarios.
    List,
    /// Run one scenario, or every scenario with `all`.
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct Output {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct RunArgs {
    name: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Bits for enclosure arithmetic.
    #[arg(long)]
    precision: Option<u32>,
    /// Cantor or odometer truncation depth.
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_parser = parse_rational_arg)]
    epsilon: Option<Rational>,
    #[arg(long, value_parser = parse_rational_arg)]
    delta: Option<Rational>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ShadowKind {
    /// h-shadowing: the shadowing orbit hits the last point.
    Solve,
    /// Plain shadowing.
    Oracle,
}

#[derive(Debug, Args)]
struct ShadowArgs {
    #[arg(value_enum)]
    kind: ShadowKind,
    /// System JSON file.
    #[arg(long)]
    system: PathBuf,
    /// Pseudo-orbit file, JSON or CSV by extension.
    #[arg(long)]
    orbit: PathBuf,
    #[arg(long, value_parser = parse_rational_arg)]
    epsilon: Rational,
    /// Starting bits for enclosure mode (quadratic maps).
    #[arg(long, default_value_t = 64)]
    precision: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PropertyArg {
    Expanding,
    Star,
    BallExpanding,
    Open,
    LocallyInjective,
    PositivelyExpansive,
}

#[derive(Debug, Subcommand)]
enum ExpansivityCommand {
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long, value_enum)]
    property: PropertyArg,
    /// Region as JSON pairs, e.g. '[["0","1/2"]]'; defaults to the whole space.
    #[arg(long, conflicts_with = "points")]
    region: Option<String>,
    /// Comma-separated points.
    #[arg(long)]
    points: Option<String>,
    #[arg(long, value_parser = parse_rational_arg)]
    delta: Option<Rational>,
    #[arg(long, value_parser = parse_rational_arg)]
    mu: Option<Rational>,
    #[arg(long, value_parser = parse_rational_arg)]
    nu: Option<Rational>,
    /// Comma-separated radii for ball expansion.
    #[arg(long)]
    eps_grid: Option<String>,
    /// Expansivity constant.
    #[arg(long, value_parser = parse_rational_arg)]
    b: Option<Rational>,
    #[arg(long, default_value_t = 64)]
    horizon: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum KneadingCommand {
    Search(SearchArgs),
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Target word over L, C, R.
    #[arg(long, conflicts_with = "generated", required_unless_present = "generated")]
    target: Option<String>,
    /// Use this many symbols of the generated word.
    #[arg(long)]
    generated: Option<usize>,
    #[arg(long, default_value_t = 15)]
    horizon: usize,
    #[arg(long, default_value_t = 120)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_list(s: &str) -> Result<Vec<Rational>, CliError> {
    s.split(',').map(|t| Ok(parse_rational(t.trim())?)).collect()
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.into(), e))
}

fn load_system(path: &Path) -> Result<SystemSpec, CliError> {
    Ok(serde_json::from_str(&read(path)?)?)
}

fn load_orbit(system: &SystemSpec, path: &Path) -> Result<PseudoOrbit, CliError> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        Ok(pseudo_orbits::from_csv(system, &text)?)
    } else {
        Ok(pseudo_orbits::from_json(system, &serde_json::from_str(&text)?)?)
    }
}

fn write_out(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(p.into(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_json(v: &Value, out: Option<&Path>) -> Result<(), CliError> {
    write_out(&report::json_text(v), out)
}

fn require<'a>(v: &'a Option<Rational>, flag: &str) -> Result<&'a Rational, CliError> {
    v.as_ref().ok_or_else(|| CliError::Usage(format!("--{flag} is required for this property")))
}

/// Parses `args` (program name first) and runs the command; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Scenario(ScenarioCommand::List) => {
            for s in registry() {
                println!("{:<14} {}", s.name, s.description);
            }
            Ok(0)
        }
        Command::Scenario(ScenarioCommand::Run(a)) => run_named(a),
        Command::Shadow(a) => shadow(a),
        Command::Expansivity(ExpansivityCommand::Check(a)) => check(a),
        Command::Kneading(KneadingCommand::Search(a)) => search(a),
    }
}

fn run_named(a: RunArgs) -> Result<i32, CliError> {
    let params = ScenarioParams {
        seed: a.seed,
        precision: a.precision,
        depth: a.depth,
        trials: a.trials,
        epsilon: a.epsilon,
        delta: a.delta,
    };
    let names: Vec<&str> = if a.name == "all" {
        registry().iter().map(|s| s.name).collect()
    } else {
        vec![a.name.as_str()]
    };
    if names.len() > 1 && a.output.out.as_ref().is_some_and(|p| !p.is_dir()) {
        return Err(CliError::Usage("--out must be a directory when running all scenarios".into()));
    }
    let mut worst = Status::Pass;
    for name in names {
        let mut r = run_scenario(name, &params)?;
        let ext = match a.output.format {
            Format::Json => "json",
            Format::Csv => "csv",
        };
        match &a.output.out {
            Some(dir) if dir.is_dir() => {
                let path = dir.join(format!("{name}.{ext}"));
                r.artifacts.push(path.display().to_string());
                emit(&r, a.output.format, &path).map_err(|e| CliError::Io(path.clone(), e))?;
            }
            Some(path) => {
                r.artifacts.push(path.display().to_string());
                emit(&r, a.output.format, path).map_err(|e| CliError::Io(path.clone(), e))?;
            }
            None => print!("{}", render(&r, a.output.format)),
        }
        eprintln!("{name}: {}", r.status());
        worst = match (worst, r.status()) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Undetermined, _) | (_, Status::Undetermined) => Status::Undetermined,
            _ => Status::Pass,
        };
    }
    Ok(status_code(worst))
}

fn shadow(a: ShadowArgs) -> Result<i32, CliError> {
    let system = load_system(&a.system)?;
    let orbit = load_orbit(&system, &a.orbit)?;
    let cert = match (a.kind, &system) {
        (ShadowKind::Oracle, SystemSpec::Quadratic(_)) => {
            shadow_oracle_enclosure(&system, &orbit, &a.epsilon, a.precision, a.precision.max(1024))?
        }
        (ShadowKind::Oracle, _) => shadow_oracle(&system, &orbit, &a.epsilon)?,
        (ShadowKind::Solve, _) => h_shadow_solve(&system, &orbit, &a.epsilon)?,
    };
    write_json(&cert.to_json(&system), a.out.as_deref())?;
    Ok(0)
}

fn check(a: CheckArgs) -> Result<i32, CliError> {
    let system = load_system(&a.system)?;
    let region = match (&a.region, &a.points) {
        (Some(r), _) => RegionSpec::intervals(serde_json::from_str::<RationalIntervalSet>(r)?),
        (None, Some(p)) => RegionSpec::points(
            p.split(',').map(|t| system.parse_point(t.trim())).collect::<Result<Vec<Point>, _>>()?,
        ),
        (None, None) => match system.space() {
            Some(s) => RegionSpec::intervals(s),
            None => RegionSpec::points(Vec::new()),
        },
    };
    let v = match a.property {
        PropertyArg::Expanding => check_expanding(&system, &region, require(&a.delta, "delta")?, require(&a.mu, "mu")?)?,
        PropertyArg::Star => check_star(&system, &region, require(&a.delta, "delta")?, require(&a.mu, "mu")?)?,
        PropertyArg::BallExpanding => {
            let grid = match &a.eps_grid {
                Some(g) => parse_list(g)?,
                None => Vec::new(),
            };
            check_ball_expanding(&system, &region, require(&a.mu, "mu")?, require(&a.nu, "nu")?, &grid)?
        }
        PropertyArg::Open => check_open_on(&system, &region)?,
        PropertyArg::LocallyInjective => check_locally_injective(&system, &region)?,
        PropertyArg::PositivelyExpansive => {
            let b = require(&a.b, "b")?;
            if system.is_symbolic() {
                shift_positively_expansive(&system, b)?
            } else {
                positively_expansive_falsify(&system, b, a.horizon, a.seed)?
            }
        }
    };
    let revalidated = v.revalidate(&system);
    let mut out = v.to_json();
    out["revalidated"] = json!(revalidated);
    write_json(&out, a.out.as_deref())?;
    Ok(0)
}

fn search(a: SearchArgs) -> Result<i32, CliError> {
    let target: KneadingWord = match (&a.target, a.generated) {
        (Some(t), _) => t.parse()?,
        (None, Some(n)) => k_word(n),
        (None, None) => return Err(CliError::Usage("give --target or --generated".into())),
    };
    let s = find_parameter(&target, a.horizon, a.steps)?;
    write_json(&s.to_json(), a.out.as_deref())?;
    Ok(if s.matched { 0 } else { 1 })
}
