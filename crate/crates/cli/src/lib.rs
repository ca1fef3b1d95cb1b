//! Library surface of the `pbrkit` binary: command implementations, file
//! formats, and plotting, importable by integration tests so outputs can
//! be re-read with the toolkit's own parsers.

pub mod commands;
pub mod errors;
pub mod files;
pub mod svg;

use std::path::{Path, PathBuf};

use pbrkit_core::config::ToolkitConfig;

use crate::errors::CliError;

/// Resolved invocation context shared by all commands.
pub struct Ctx {
    pub config: ToolkitConfig,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Ctx {
    /// Precedence: flag, then `PBRKIT_SEED`, then the config seed; likewise
    /// the output directory flag over `io.output_dir`.
    pub fn resolve(
        config_path: Option<&Path>,
        seed_flag: Option<u64>,
        out_flag: Option<PathBuf>,
    ) -> Result<Ctx, CliError> {
        let config = ToolkitConfig::load(config_path)?;
        let seed = match seed_flag {
            Some(seed) => seed,
            None => match std::env::var("PBRKIT_SEED") {
                Ok(text) => text
                    .parse::<u64>()
                    .map_err(|_| CliError::config(format!("PBRKIT_SEED {text:?} is not a u64")))?,
                Err(std::env::VarError::NotPresent) => config.io.seed,
                Err(e) => return Err(CliError::config(format!("PBRKIT_SEED: {e}"))),
            },
        };
        let out_dir = out_flag.unwrap_or_else(|| config.io.output_dir.clone());
        Ok(Ctx {
            config,
            seed,
            out_dir,
        })
    }
}
