use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use flrw_bgk::verify::VerifyOptions;
use flrw_bgk::{MomentPair, RuleKind, Statistics};
use flrw_bgk_cli::commands::{self, EquilibriumRequest, MomentSource};
use flrw_bgk_cli::output::fmt_f64;
use flrw_bgk_cli::{out_root, CliError, OUT_ROOT_ENV};

#[derive(Parser)]
#[command(
    name = "flrw-bgk",
    version,
    about = "Relaxation of massless BGK gases in a radiation-era FLRW background"
)]
#[command(after_help = "Outputs go below $FLRW_BGK_OUT (default ./out).")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation described by a TOML config.
    Simulate { config: PathBuf },
    /// Solve for the equilibrium carrying given moments and sample it.
    #[command(group(ArgGroup::new("input").required(true).args(["rho", "table"])))]
    Equilibrium {
        #[arg(long, requires = "energy", allow_negative_numbers = true)]
        rho: Option<f64>,
        #[arg(long, requires = "rho", allow_negative_numbers = true)]
        energy: Option<f64>,
        /// CSV with columns `r,f` at the grid nodes; moments are taken from it.
        #[arg(long, conflicts_with_all = ["rho", "energy"])]
        table: Option<PathBuf>,
        #[arg(long, value_parser = parse_stats)]
        stats: Statistics,
        #[arg(long, default_value = "exponential", value_parser = parse_rule)]
        rule: RuleKind,
        #[arg(long, default_value_t = 64)]
        n_nodes: usize,
        #[arg(long)]
        r_max: Option<f64>,
        /// Destination for the sampled equilibrium (default: <out root>/equilibrium_<stats>.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in check suite; exit 1 if any check fails.
    Verify {
        #[arg(long, default_value = "exponential", value_parser = parse_rule)]
        rule: RuleKind,
        #[arg(long, default_value_t = 64)]
        grid_nodes: usize,
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long, default_value_t = VerifyOptions::default().seed)]
        seed: u64,
    },
    /// Run every `*.toml` config in a directory concurrently.
    Sweep { dir: PathBuf },
}

fn parse_stats(s: &str) -> Result<Statistics, String> {
    s.parse()
}

fn parse_rule(s: &str) -> Result<RuleKind, String> {
    s.parse()
}

fn report(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let root = out_root();
    match cli.command {
        Command::Simulate { config } => match commands::simulate(&config, &root) {
            Ok(run) => {
                let s = &run.summary;
                println!("run `{}` -> {}", s.run, run.dir.display());
                println!("steps recorded: {}", s.steps_recorded);
                println!("max moment drift: {}", fmt_f64(s.max_drift));
                if let Some(dev) = s.max_analytic_deviation {
                    println!("max deviation from explicit solution: {}", fmt_f64(dev));
                }
                println!("wall time: {:.3} s", s.wall_time_seconds);
                match run.failure {
                    Some(e) => {
                        let f = s.failure.as_ref().expect("failure summary recorded");
                        eprintln!("run stopped at step {} (t = {})", f.step, f.time);
                        report(&CliError::Math(e))
                    }
                    None => ExitCode::SUCCESS,
                }
            }
            Err(e) => report(&e),
        },
        Command::Equilibrium {
            rho,
            energy,
            table,
            stats,
            rule,
            n_nodes,
            r_max,
            out,
        } => {
            let source = match (rho, energy, table) {
                (Some(rho), Some(energy), None) => {
                    MomentSource::Given(MomentPair::new(rho, energy))
                }
                (None, None, Some(path)) => MomentSource::Table(path),
                _ => unreachable!("clap enforces one input"),
            };
            let req = EquilibriumRequest {
                source,
                statistics: stats,
                rule,
                n_nodes,
                r_max,
                out: out.unwrap_or_else(|| root.join(format!("equilibrium_{stats}.csv"))),
            };
            match commands::equilibrium(&req) {
                Ok(_) => ExitCode::SUCCESS,
                Err(e) => report(&e),
            }
        }
        Command::Verify {
            rule,
            grid_nodes,
            r_max,
            seed,
        } => {
            let options = VerifyOptions {
                rule,
                n_nodes: grid_nodes,
                r_max,
                seed,
            };
            match commands::verify(&options) {
                Ok(_) => ExitCode::SUCCESS,
                Err(e) => report(&e),
            }
        }
        Command::Sweep { dir } => match commands::sweep(&dir, &root) {
            Ok(runs) => {
                let mut code = 0;
                for (name, result) in &runs {
                    match result {
                        Ok(run) => println!(
                            "ok    {name:<24} drift {} -> {}",
                            fmt_f64(run.summary.max_drift),
                            run.dir.display()
                        ),
                        Err(e) => {
                            println!("fail  {name:<24} {e}");
                            code = code.max(e.exit_code());
                        }
                    }
                }
                eprintln!(
                    "{} runs below {} (set {OUT_ROOT_ENV} to change)",
                    runs.len(),
                    root.display()
                );
                ExitCode::from(code)
            }
            Err(e) => report(&e),
        },
    }
}
