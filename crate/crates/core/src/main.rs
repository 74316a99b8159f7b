use clap::{Args, Parser, Subcommand};
use nashswitch::cli;
use nashswitch::config::GridSpec;
use nashswitch::error::{Error, Result};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "nashswitch",
    version,
    about = "Stability analysis and simulation of loss-averse two-agent gradient play"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Write report.json with the equilibrium, mode map, γ_rg and verdict.
    Analyze(Common),
    /// Write trajectory.csv and events.csv.
    Simulate(Common),
    /// Write domains.csv, a raster of domain membership and effective mode.
    Domains {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true, requires_all = ["xmax", "ymin", "ymax", "n"])]
        xmin: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        xmax: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        ymin: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        ymax: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Write sweep.csv, one verdict per value of the configured parameter.
    Sweep(Common),
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Analyze(c) => {
            let r = cli::run_analyze(&c.config, &c.out)?;
            println!("{} {}", r.verdict, c.out.join("report.json").display());
        }
        Command::Simulate(c) => {
            let t = cli::run_simulate(&c.config, &c.out)?;
            println!("{} samples, {} events -> {}", t.samples.len(), t.events.len(), c.out.display());
        }
        Command::Domains { common, xmin, xmax, ymin, ymax, n } => {
            let grid = match (xmin, xmax, ymin, ymax, n) {
                (Some(xmin), Some(xmax), Some(ymin), Some(ymax), Some(n)) => {
                    Some(GridSpec { xmin, xmax, ymin, ymax, n })
                }
                (None, None, None, None, None) => None,
                _ => return Err(Error::DegenerateGrid("give all of --xmin --xmax --ymin --ymax --n or none".into())),
            };
            let p = cli::export_domains(&common.config, grid, &common.out)?;
            println!("{}", p.display());
        }
        Command::Sweep(c) => {
            let rows = cli::run_sweep(&c.config, &c.out)?;
            println!("{} rows -> {}", rows.len(), c.out.join("sweep.csv").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("NASHSWITCH_LOG")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            eprintln!("{}", cli::error_json(&e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
