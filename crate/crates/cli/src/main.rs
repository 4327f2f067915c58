mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use contactor::hj::Branch;

use report::Outcome;

#[derive(Parser)]
#[command(
    name = "contactor",
    version,
    about = "Simulate and certify contact, evolution and Herglotz systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// System configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for CSV output and report.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Random samples per check.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Sample seed; defaults to the config's, then 42.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE", value_parser = parse_tol)]
    pub tol: Vec<(String, f64)>,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let v: f64 = value.parse().map_err(|e| format!("{value}: {e}"))?;
    if !(v >= 0.0 && v.is_finite()) {
        return Err("tolerance must be a finite non-negative number".into());
    }
    Ok((name.to_string(), v))
}

/// `lo:hi:N`.
fn parse_grid(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err("expected LO:HI:N".into());
    };
    let lo: f64 = lo.parse().map_err(|e| format!("{lo}: {e}"))?;
    let hi: f64 = hi.parse().map_err(|e| format!("{hi}: {e}"))?;
    let n: usize = n.parse().map_err(|e| format!("{n}: {e}"))?;
    if !(hi > lo) || n < 2 {
        return Err("need HI > LO and N ≥ 2".into());
    }
    Ok((lo, hi, n))
}

#[derive(Subcommand)]
enum Command {
    /// Integrate an explicit system (contact, evolution, symplectic, Herglotz).
    Simulate(Common),
    /// Integrate the implicit system of a Morse family or Herglotz Lagrangian.
    ImplicitSimulate(Common),
    /// Test a characteristic function against both HJ conditions.
    HjCheck {
        #[command(flatten)]
        common: Common,
        /// Characteristic function, replacing the config's `W`.
        #[arg(long = "w", value_name = "EXPR")]
        w: Option<String>,
    },
    /// Solve the one-dimensional evolution HJ equation H(q, W', W) = c.
    HjSolve1d {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        #[arg(long, value_name = "LO:HI:N", value_parser = parse_grid, allow_hyphen_values = true)]
        grid: Option<(f64, f64, usize)>,
        #[arg(long)]
        branch: Option<Branch>,
        #[arg(long, allow_negative_numbers = true)]
        w0: Option<f64>,
    },
    /// Lift a reduced trajectory through W and measure the full equations' defect.
    Lift {
        #[command(flatten)]
        common: Common,
        /// Tabulated W (CSV with q, W, dW, ddW) instead of the config's `W`.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Characteristic function, replacing the config's `W`.
        #[arg(long = "w", value_name = "EXPR", conflicts_with = "table")]
        w: Option<String>,
        /// Reduced trajectory CSV; integrated from the config when absent.
        #[arg(long)]
        reduced: Option<PathBuf>,
    },
    /// Structural identities, β-maps and the image of the dynamics.
    GeometryCheck(Common),
    /// Generated submanifolds: isotropy, rank of the family, Φ equivalence.
    LegendrianCheck(Common),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CONTACTOR_LOG", "warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(c) => commands::simulate(&c),
        Command::ImplicitSimulate(c) => commands::implicit_simulate(&c),
        Command::HjCheck { common, w } => commands::hj_check(&common, w.as_deref()),
        Command::HjSolve1d {
            common,
            c,
            grid,
            branch,
            w0,
        } => commands::hj_solve1d(&common, c, grid, branch, w0),
        Command::Lift {
            common,
            table,
            w,
            reduced,
        } => commands::lift(&common, table.as_deref(), w.as_deref(), reduced.as_deref()),
        Command::GeometryCheck(c) => commands::geometry_check(&c),
        Command::LegendrianCheck(c) => commands::legendrian_check(&c),
    };
    match outcome {
        Ok(Outcome { pass: true }) => ExitCode::SUCCESS,
        Ok(Outcome { pass: false }) => ExitCode::from(4),
        Err(e) => {
            eprintln!("{}", report::error_json(&e));
            ExitCode::from(if e.is_usage() { 2 } else { 3 })
        }
    }
}
