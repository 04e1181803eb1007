use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};
use ppide_cli::{configure_threads, run_to_dir, write_table1, ExperimentConfig};

#[derive(Parser)]
#[command(name = "ppide", version, about = "Jump-integral PIDE experiments")]
struct Cli {
    /// Worker threads for parallel solves (overrides PPIDE_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override a config key, e.g. `--set grid.n_time=0`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the grid-step table.
    Table1 {
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Run { config, sets, out } => {
            let cfg = ExperimentConfig::from_file(&config, &sets)?;
            let path = run_to_dir(&cfg, &out)?;
            println!("{}", path.display());
        }
        Command::Table1 { out } => {
            write_table1(&out)?;
            println!("{}", out.display());
        }
    }
    Ok(())
}
