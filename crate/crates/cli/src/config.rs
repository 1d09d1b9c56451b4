use std::path::Path;

use anyhow::{Context, Result};
use clap::Args;
use serde::Deserialize;
use tailcheck::roc::{DEFAULT_BOOTSTRAPS, DEFAULT_PERMUTATIONS};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_REPS: usize = 1000;
pub const DEFAULT_SEED: u64 = 2021;

/// Optional defaults read from `--config`. Field names follow the
/// experiment config.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: Option<f64>,
    pub n_reps: Option<usize>,
    pub master_seed: Option<u64>,
    pub n_permutations: Option<usize>,
    pub n_boot: Option<usize>,
    pub threads: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Significance level [default: 0.05]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Monte Carlo replications [default: 1000]
    #[arg(long)]
    pub reps: Option<usize>,
    /// Master seed [default: 2021]
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Flag, then config file, then built-in default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub alpha: f64,
    pub n_reps: usize,
    pub master_seed: u64,
    pub n_permutations: usize,
    pub n_boot: usize,
}

impl Settings {
    pub fn resolve(
        run: &RunArgs,
        permutations: Option<usize>,
        boots: Option<usize>,
        file: &FileConfig,
    ) -> Self {
        Settings {
            alpha: run.alpha.or(file.alpha).unwrap_or(DEFAULT_ALPHA),
            n_reps: run.reps.or(file.n_reps).unwrap_or(DEFAULT_REPS),
            master_seed: run.seed.or(file.master_seed).unwrap_or(DEFAULT_SEED),
            n_permutations: permutations
                .or(file.n_permutations)
                .unwrap_or(DEFAULT_PERMUTATIONS),
            n_boot: boots.or(file.n_boot).unwrap_or(DEFAULT_BOOTSTRAPS),
        }
    }
}
