//! Experiment runner for the `ppide-core` solvers: TOML configuration in,
//! CSV out.

pub mod config;
pub mod experiments;
pub mod output;
pub mod table1;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

pub use config::{apply_override, Experiment, ExperimentConfig};
pub use experiments::run_experiment;
pub use table1::{format_sig, table1};

/// Sizes the global rayon pool. `threads` wins over `PPIDE_THREADS`; with
/// neither, rayon picks.
pub fn configure_threads(threads: Option<usize>) -> Result<()> {
    let n = match threads {
        Some(n) => Some(n),
        None => match std::env::var("PPIDE_THREADS") {
            Ok(v) => Some(v.trim().parse().with_context(|| format!("PPIDE_THREADS = '{v}' is not a count"))?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        anyhow::ensure!(n >= 1, "thread count must be at least 1");
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

/// Runs `cfg` and writes its CSV into `out_dir`, returning the file path.
pub fn run_to_dir(cfg: &ExperimentConfig, out_dir: &Path) -> Result<PathBuf> {
    let csv = run_experiment(cfg).with_context(|| format!("experiment {}", cfg.experiment.name()))?;
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let path = out_dir.join(cfg.file_name());
    std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn write_table1(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, table1()?).with_context(|| format!("writing {}", path.display()))
}
