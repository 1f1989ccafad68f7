//! `lpnf`: normal forms, base-point filtering, measure estimates and numerical
//! verification driven by JSON problem files.

mod commands;
mod error;
mod problem;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lpnf::psalg::C64;
use serde_json::json;

use commands::{Output, Overrides};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "lpnf", version, about = "Lindstedt-Poincare normal forms of perturbed integrable vector fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Problem file (JSON).
    problem: PathBuf,
    /// Target normalization order.
    #[arg(long)]
    order: Option<u32>,
    /// Base point as a comma list of re,im pairs.
    #[arg(long, allow_hyphen_values = true)]
    base: Option<String>,
    /// Last filtering stage.
    #[arg(long)]
    kmax: Option<u32>,
    /// Grid spacing per real coordinate.
    #[arg(long = "grid-h")]
    grid_h: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed of the random samplers.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Require exact (integer or rational) eigenvalues.
    #[arg(long = "exact-resonance")]
    exact_resonance: bool,
    /// Report a trivial invariant ring instead of failing.
    #[arg(long = "allow-trivial-ring")]
    allow_trivial_ring: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariant generators, weights and the ω_k(S) table.
    Resonances(Common),
    /// Newton normalization to the requested order.
    Normalize(Common),
    /// Removal of base points with small divisors on the grid.
    Filter(Common),
    /// Empirical excluded measure against the analytic estimate.
    Measure(Common),
    /// Conjugacy residual, flow invariance and the oracle comparison.
    Verify(Common),
    /// Writes the reference problem files.
    Scenario {
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn parse_base(s: &str) -> Result<Vec<C64>, CliError> {
    let vals = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Schema(format!("bad number '{t}' in --base"))))
        .collect::<Result<Vec<_>, _>>()?;
    if vals.len() % 2 != 0 {
        return Err(CliError::Schema("--base needs re,im pairs".into()));
    }
    Ok(vals.chunks(2).map(|p| C64::new(p[0], p[1])).collect())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let started = Instant::now();
    let (name, out_dir, report) = match &cli.command {
        Command::Scenario { out } => {
            let o = Output::new(out)?;
            ("scenario", out.clone(), commands::scenario(&o)?)
        }
        Command::Resonances(c) | Command::Normalize(c) | Command::Filter(c) | Command::Measure(c) | Command::Verify(c) => {
            let ov = Overrides {
                order: c.order,
                base: c.base.as_deref().map(parse_base).transpose()?,
                kmax: c.kmax,
                grid_h: c.grid_h,
                seed: c.seed,
                exact_resonance: c.exact_resonance,
                allow_trivial_ring: c.allow_trivial_ring,
            };
            let pf = commands::load(&c.problem, &ov)?;
            let o = Output::new(&c.out)?;
            let (name, report) = match &cli.command {
                Command::Resonances(_) => ("resonances", commands::resonances(&pf, &ov)?),
                Command::Normalize(_) => ("normalize", commands::normalize(&pf, &ov, &o)?),
                Command::Filter(_) => ("filter", commands::filter(&pf, &ov, &o)?),
                Command::Measure(_) => ("measure", commands::measure(&pf, &ov, &o)?),
                _ => ("verify", commands::verify(&pf, &ov)?),
            };
            (name, c.out.clone(), report)
        }
    };
    let o = Output::new(&out_dir)?;
    o.json("report.json", &report)?;
    o.json(
        "run.json",
        &json!({
            "command": name,
            "args": std::env::args().collect::<Vec<_>>(),
            "version": env!("CARGO_PKG_VERSION"),
            "elapsed_seconds": started.elapsed().as_secs_f64(),
        }),
    )?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
