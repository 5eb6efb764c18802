//! Command-line pipeline over `flowspec-core`.
//!
//! Each subcommand is a function taking a [`RunConfig`]; the binary only
//! parses arguments and maps errors to exit codes (1 for usage errors, 2 for
//! data errors).

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod svg;

use std::fs;

pub use args::{Cli, Command};
pub use commands::{
    cmd_dmap, cmd_decay, cmd_ingest, cmd_pca, cmd_reconstruct, cmd_stability, DecayOutcome,
    DmapSummary, ReconstructSummary,
};
pub use config::{Epsilon, RunConfig};
pub use error::{CliError, Result};

use flowspec_core::export::parse_coords_csv;

/// Runs one subcommand and returns a one-line summary for the terminal.
pub fn run(command: Command, cfg: &RunConfig) -> Result<String> {
    Ok(match command {
        Command::Ingest => {
            let m = cmd_ingest(cfg)?;
            format!(
                "ingested {} frames of {}x{} (p = {}), checksum {}",
                m.n, m.width, m.height, m.p, m.checksum
            )
        }
        Command::Pca => {
            let model = cmd_pca(cfg)?;
            format!(
                "fitted {} PCA with q = {} on {} frames",
                model.method,
                model.q(),
                model.n_samples
            )
        }
        Command::Dmap => {
            let s = cmd_dmap(cfg)?;
            format!(
                "diffusion map of {} frames, epsilon = {} ({}), t = {}, q = {}",
                s.n, s.epsilon, s.epsilon_source, s.t, s.q
            )
        }
        Command::Stability => {
            let r = cmd_stability(cfg)?;
            format!(
                "{} runs, {} pairs: mean distance {:.6}, std {:.6}",
                r.runs,
                r.pairwise_distances.len(),
                r.mean,
                r.std_dev
            )
        }
        Command::Decay => {
            let d = cmd_decay(cfg)?;
            format!(
                "wrote {} PCA and {} diffusion values",
                d.pca.values.len(),
                d.diffusion.values.len()
            )
        }
        Command::Reconstruct => {
            let path = match &cfg.coords {
                Some(p) => p.clone(),
                None => [&cfg.input_dir, &cfg.output_dir]
                    .iter()
                    .map(|d| d.join(commands::PCA_COORDS_FILE))
                    .find(|p| p.is_file())
                    .ok_or_else(|| {
                        CliError::Usage(
                            "no coordinates given; pass --coords or run `flowspec pca` first".into(),
                        )
                    })?,
            };
            let coords = parse_coords_csv(&fs::read_to_string(&path)?)?;
            let s = cmd_reconstruct(cfg, &coords)?;
            format!(
                "wrote {} frames to {} ({} pixels clamped to [0, 1])",
                s.frames,
                s.dir.display(),
                s.clamped
            )
        }
    })
}
