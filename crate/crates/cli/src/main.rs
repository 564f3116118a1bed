//! `netsync`: simulate coupled oscillator networks and certify their synchronization.

mod commands;
mod config;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use netsync_core::DiscAxis;

use commands::{floquet, gershgorin, msf, reproduce, simulate, topo, wien};
use config::{Overrides, RunConfig};
use error::{CliError, CliResult};
use output::{resolve_out_dir, Artifacts};

#[derive(Parser)]
#[command(name = "netsync", version, about = "Synchronization analysis for networks of coupled oscillators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a topology and write its Laplacian and spectrum.
    Topo(TopoArgs),
    /// Integrate a system and classify its synchronization.
    Simulate(RunArgs),
    /// Settle onto a limit cycle and compute its Floquet multipliers.
    Floquet(RunArgs),
    /// Sweep the master stability function of the FitzHugh-Nagumo cycle.
    Msf(MsfArgs),
    /// Gershgorin discs of a matrix read from CSV.
    Gershgorin(GershgorinArgs),
    /// Simulate a Wien-bridge oscillator and measure frequency and amplitude.
    Wien(RunArgs),
    /// Run every canned experiment and print a pass/fail table.
    ReproducePaper(OutArgs),
}

#[derive(Args)]
struct OutArgs {
    /// Output directory (default: $NETSYNC_OUT, then the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("source").required(true))]
struct TopoArgs {
    /// Star with N peripheral nodes.
    #[arg(long, group = "source", value_name = "N")]
    star: Option<usize>,
    /// Graph JSON file: {"n": N, "edges": [[i, j], ...]}.
    #[arg(long, group = "source", value_name = "FILE")]
    edges: Option<PathBuf>,
    /// Preferential-attachment graph with N nodes, M edges per new node.
    #[arg(long, group = "source", value_name = "N,M", value_parser = topo::parse_pair)]
    scale_free: Option<(usize, usize)>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    transient: Option<f64>,
    /// Seed for the random initial state (ignored when the config gives one).
    #[arg(long)]
    seed: Option<u64>,
    /// Also write gnuplot scripts.
    #[arg(long)]
    plot: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct MsfArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, allow_negative_numbers = true)]
    gamma_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Graph JSON file for the network report.
    #[arg(long, value_name = "FILE")]
    graph: Option<PathBuf>,
    /// Coupling strength for the network report.
    #[arg(long)]
    phi: Option<f64>,
}

#[derive(Args)]
struct GershgorinArgs {
    /// Square matrix as CSV (an optional header row is skipped).
    #[arg(long, value_name = "FILE")]
    matrix: PathBuf,
    #[arg(long, default_value = "row", value_parser = parse_axis)]
    axis: DiscAxis,
    #[command(flatten)]
    out: OutArgs,
}

fn parse_axis(s: &str) -> Result<DiscAxis, String> {
    s.parse().map_err(|e: netsync_core::Error| e.to_string())
}

fn load(args: &RunArgs) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::load(&args.config)?;
    cfg.plot |= args.plot;
    cfg.resolve(&Overrides {
        dt: args.dt,
        t_end: args.t_end,
        transient: args.transient,
        seed: args.seed,
    })
}

/// Cycle-based analyses use every integration step for section crossings.
fn every_step(mut cfg: RunConfig) -> RunConfig {
    if let Some(i) = cfg.integrator.as_mut() {
        i.sample_every = 1;
    }
    cfg
}

fn finish(out: Artifacts, dir: &Path) -> CliResult<()> {
    for path in out.write_all(dir)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn out_dir(args: &OutArgs, cfg: Option<&RunConfig>) -> PathBuf {
    resolve_out_dir(args.out.as_deref(), cfg.and_then(|c| c.out_dir.as_deref()))
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Topo(args) => {
            let source = match (args.star, &args.edges, args.scale_free) {
                (Some(n), _, _) => topo::TopoSource::Star { n_peripheral: n },
                (_, Some(path), _) => topo::TopoSource::Edges {
                    graph: topo::read_graph(path)?,
                },
                (_, _, Some((n, m))) => topo::TopoSource::ScaleFree { n, m, seed: args.seed },
                _ => return Err(CliError::config("one of --star, --edges, --scale-free is required")),
            };
            let (out, summary) = topo::run(&source)?;
            topo::print_summary(&summary);
            finish(out, &out_dir(&args.out, None))?;
        }
        Command::Simulate(args) => {
            let cfg = load(&args)?;
            let (out, summary) = simulate::run(&cfg)?;
            simulate::print_summary(&summary);
            finish(out, &out_dir(&args.out, Some(&cfg)))?;
        }
        Command::Floquet(args) => {
            let cfg = every_step(load(&args)?);
            let (out, summary) = floquet::run(&cfg)?;
            floquet::print_summary(&summary);
            finish(out, &out_dir(&args.out, Some(&cfg)))?;
        }
        Command::Msf(args) => {
            let graph = args.graph.as_ref().map(topo::read_graph).transpose()?;
            let ov = msf::MsfOverrides {
                gamma_min: args.gamma_min,
                gamma_max: args.gamma_max,
                steps: args.steps,
                graph,
                phi: args.phi,
            };
            let cfg = every_step(msf::resolve(load(&args.run)?, ov)?);
            let (out, summary) = msf::run(&cfg)?;
            msf::print_summary(&summary);
            finish(out, &out_dir(&args.run.out, Some(&cfg)))?;
        }
        Command::Gershgorin(args) => {
            let cfg = gershgorin::GershgorinConfig {
                matrix: gershgorin::read_matrix(&args.matrix)?,
                axis: args.axis,
            };
            let (out, summary) = gershgorin::run(&cfg)?;
            gershgorin::print_summary(&summary);
            finish(out, &out_dir(&args.out, None))?;
        }
        Command::Wien(args) => {
            let cfg = load(&args)?;
            let (out, summary) = wien::run(&cfg)?;
            wien::print_summary(&summary);
            finish(out, &out_dir(&args.out, Some(&cfg)))?;
        }
        Command::ReproducePaper(args) => {
            let dir = out_dir(&args, None);
            let checks = reproduce::run(&dir)?;
            reproduce::print_table(&checks);
            eprintln!("artifacts under {}", dir.display());
            if checks.iter().any(|c| !c.pass) {
                return Ok(ExitCode::from(error::Exit::Failure as u8));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(error::Exit::Config as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}
