//! `hyporate`: rate curves, decay certificates, simulations and figure data
//! for linear kinetic relaxation models.
//!
//! Exit codes: 0 on success, 2 for invalid configuration, 3 when a
//! certificate or an envelope check fails.

mod commands;
mod figures;
mod table;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{BoundKind, Preset};

#[derive(Debug, Parser)]
#[command(name = "hyporate", version, about = "Hypocoercive decay rates for kinetic models")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write the result to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct SGrid {
    #[arg(long, default_value_t = 1e-3)]
    s_min: f64,
    #[arg(long, default_value_t = 1e3)]
    s_max: f64,
    /// Number of log-spaced points.
    #[arg(long, default_value_t = 400)]
    points: usize,
}

#[derive(Debug, Args)]
struct TGrid {
    #[arg(long, default_value_t = 1e-3)]
    t_min: f64,
    #[arg(long, default_value_t = 1e3)]
    t_max: f64,
    /// Geometric samples per decade; `t = 0` is always prepended.
    #[arg(long, default_value_t = 200)]
    per_decade: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mode-by-mode rate curves λ₀, λ₁, λ₂, λ̃₂ and their twists.
    Rates {
        #[command(flatten)]
        grid: SGrid,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Decay certificates for the Goldstein–Taylor model on the torus.
    Certify {
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 256)]
        xi_max: usize,
        /// Regularization for the defective case `sigma = 2`.
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact modal evolution checked against the certified envelope.
    Simulate {
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, value_enum, default_value_t = Preset::Cosine)]
        preset: Preset,
        /// Seed for the `random` preset.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Torus truncation: modes `-n..=n`.
        #[arg(long, default_value_t = 64)]
        modes: usize,
        /// Excited mode for the `single` and `worst` presets.
        #[arg(long, default_value_t = 1)]
        mode: usize,
        /// Initial angle for the `single` preset.
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 256)]
        xi_max: usize,
        #[command(flatten)]
        times: TGrid,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Algebraic decay envelopes: Nash heat bound or the GT line bounds.
    Bound {
        #[arg(long, value_enum, default_value_t = BoundKind::Line)]
        kind: BoundKind,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Initial data preset supplying the two norms of the line bounds.
        #[arg(long, value_enum, default_value_t = Preset::Gaussian)]
        preset: Preset,
        /// Override the squared L¹-type norm of the initial data.
        #[arg(long)]
        l1_sq: Option<f64>,
        /// Override the squared L² norm of the initial data.
        #[arg(long)]
        l2_sq: Option<f64>,
        /// Space dimension of the heat example.
        #[arg(long, default_value_t = 1)]
        dim: u32,
        /// Radius bracket for the heat example.
        #[arg(long, default_value_t = 1e-6)]
        r_min: f64,
        #[arg(long, default_value_t = 1e3)]
        r_max: f64,
        #[command(flatten)]
        times: TGrid,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Data behind one of the figures.
    Figure {
        /// One of fig1_triangle, fig2_lambdas, fig3_deltas, fig4_tilde,
        /// fig5_gap, fig6_hplus, fig7_mutilde.
        name: String,
        #[arg(long)]
        s_min: Option<f64>,
        #[arg(long)]
        s_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Mode used by fig1_triangle.
        #[arg(long, default_value_t = 5.0)]
        s: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Certification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Certification(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Certification(m) => write!(f, "certification failed: {m}"),
        }
    }
}

impl From<hyporate::Error> for CliError {
    fn from(e: hyporate::Error) -> Self {
        use hyporate::Error as E;
        match e {
            E::DefectiveSigma { .. } | E::CertificateViolation { .. } => {
                CliError::Certification(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

/// Command result. `failure` is set when the output is complete but a
/// check inside it did not hold.
pub struct Output {
    pub body: String,
    pub failure: Option<String>,
}

#[cfg(feature = "parallel")]
fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("HYPORATE_THREADS") else {
        return Ok(());
    };
    let n = v
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("HYPORATE_THREADS={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

#[cfg(not(feature = "parallel"))]
fn init_threads() -> Result<(), CliError> {
    Ok(())
}

fn run(cmd: Command) -> Result<(Output, Option<PathBuf>), CliError> {
    init_threads()?;
    let (out, path) = match cmd {
        Command::Rates { grid, output } => (
            commands::rates(grid.s_min, grid.s_max, grid.points, output.format.unwrap_or(Format::Csv))?,
            output.out,
        ),
        Command::Certify { sigma, xi_max, eps, output } => (
            commands::certify(sigma, xi_max, eps, output.format.unwrap_or(Format::Json))?,
            output.out,
        ),
        Command::Simulate {
            sigma,
            preset,
            seed,
            modes,
            mode,
            phi,
            eps,
            xi_max,
            times,
            output,
        } => {
            let cfg = commands::SimConfig {
                sigma,
                preset,
                seed,
                modes,
                mode,
                phi,
                eps,
                xi_max,
                times: (times.t_min, times.t_max, times.per_decade),
            };
            (commands::simulate(&cfg, output.format.unwrap_or(Format::Csv))?, output.out)
        }
        Command::Bound {
            kind,
            sigma,
            preset,
            l1_sq,
            l2_sq,
            dim,
            r_min,
            r_max,
            times,
            output,
        } => {
            let cfg = commands::BoundConfig {
                kind,
                sigma,
                preset,
                l1_sq,
                l2_sq,
                dim,
                bracket: (r_min, r_max),
                times: (times.t_min, times.t_max, times.per_decade),
            };
            (commands::bound(&cfg, output.format.unwrap_or(Format::Csv))?, output.out)
        }
        Command::Figure { name, s_min, s_max, points, s, output } => {
            let grid = figures::GridOverride { s_min, s_max, points };
            let table = figures::figure(&name, &grid, s)?;
            (table::render(&table, output.format.unwrap_or(Format::Csv))?, output.out)
        }
    };
    Ok((out, path))
}

fn emit(body: &str, path: Option<PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(&p, body).map_err(|e| CliError::Config(format!("{}: {e}", p.display()))),
        None => match std::io::stdout().lock().write_all(body.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Config(e.to_string())),
            _ => Ok(()),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli.cmd).and_then(|(out, path)| {
        emit(&out.body, path)?;
        match out.failure {
            Some(why) => Err(CliError::Certification(why)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hyporate: {e}");
            ExitCode::from(e.code())
        }
    }
}
