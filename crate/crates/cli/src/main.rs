use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use tvgl_cli::config::ExperimentConfig;
use tvgl_cli::runner::Overrides;
use tvgl_cli::{bench, plot, runner, CliError};

#[derive(Parser)]
#[command(
    name = "tvgl",
    version,
    about = "Learn time-varying graphs from smooth signals and run the experiment suite"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config
    Run {
        config: PathBuf,
        /// Replace the config's master seed
        #[arg(long)]
        seed: Option<u64>,
        /// Rayon workers per solve (default 1)
        #[arg(long)]
        workers: Option<usize>,
        /// Replace the config's output directory
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Time the bench method across slot and worker counts
    Bench {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Generate the config's datasets and save them, one directory per repeat
    GenData {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Aggregate a results or bench CSV into plot-ready tables
    PlotData {
        input: PathBuf,
        /// Where to write the aggregates (default: next to the input)
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Run {
            config,
            seed,
            workers,
            output_dir,
        } => {
            let (cfg, text) = ExperimentConfig::from_path(&config)?;
            let ov = Overrides {
                seed,
                workers,
                output_dir,
            };
            let summary = runner::run(&cfg, &text, &ov)?;
            println!(
                "wrote {} rows to {}",
                summary.rows,
                summary.results_path.display()
            );
            if summary.non_converged > 0 {
                eprintln!(
                    "warning: {} solve(s) stopped at the iteration cap",
                    summary.non_converged
                );
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench {
            config,
            seed,
            output_dir,
        } => {
            let (cfg, _) = ExperimentConfig::from_path(&config)?;
            let ov = Overrides {
                seed,
                workers: None,
                output_dir,
            };
            let summary = bench::bench(&cfg, &ov)?;
            println!(
                "wrote {} rows to {}",
                summary.rows,
                summary.results_path.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::GenData {
            config,
            seed,
            output_dir,
        } => {
            let (cfg, _) = ExperimentConfig::from_path(&config)?;
            let ov = Overrides {
                seed,
                workers: None,
                output_dir,
            };
            for dir in runner::gen_data(&cfg, &ov)? {
                println!("wrote {}", dir.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::PlotData { input, output_dir } => {
            let out = output_dir.unwrap_or_else(|| {
                input
                    .parent()
                    .filter(|p| !p.as_os_str().is_empty())
                    .map(|p| p.to_path_buf())
                    .unwrap_or_else(|| PathBuf::from("."))
            });
            for file in plot::plot_data(&input, &out)? {
                println!("wrote {}", file.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
