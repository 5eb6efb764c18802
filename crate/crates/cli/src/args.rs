use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use flowspec_core::pca::FitMethod;

use crate::config::{Epsilon, RunConfig, DEFAULT_DECAY_COUNT, DEFAULT_DMAP_CAP, DEFAULT_OVERSAMPLING, DEFAULT_RUNS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Decode PGM frames into a dataset
    Ingest,
    /// Fit PCA and project every frame
    Pca,
    /// Diffusion-map embedding
    Dmap,
    /// Subspace distances across repeated stochastic PCA runs
    Stability,
    /// Normalized spectra of both methods
    Decay,
    /// Map reduced coordinates back to frames
    Reconstruct,
}

/// Dimensionality reduction of frame sequences with stochastic PCA and
/// diffusion maps.
#[derive(Debug, Parser)]
#[command(name = "flowspec", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// Frame directory (ingest) or directory holding earlier outputs
    #[arg(long, value_name = "DIR")]
    pub input: PathBuf,

    #[arg(long, value_name = "DIR")]
    pub output: PathBuf,

    /// Number of reduced coordinates
    #[arg(long, default_value_t = 3)]
    pub q: usize,

    /// Diffusion scale
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    pub t: u32,

    /// Kernel bandwidth: `auto` (largest squared pairwise distance) or a number
    #[arg(long, default_value = "auto", value_name = "auto|FLOAT")]
    pub epsilon: Epsilon,

    #[arg(long, default_value = "stochastic", value_name = "exact|stochastic")]
    pub method: FitMethod,

    #[arg(long, default_value_t = DEFAULT_OVERSAMPLING)]
    pub oversampling: usize,

    #[arg(long, default_value_t = 0)]
    pub power_iterations: usize,

    /// Random seed; drawn from the OS and logged when omitted
    #[arg(long)]
    pub seed: Option<u64>,

    /// Stochastic PCA repetitions for `stability`
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    pub runs: usize,

    #[arg(long, default_value_t = DEFAULT_DECAY_COUNT)]
    pub decay_count: usize,

    /// Average non-overlapping N x N pixel blocks while ingesting
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub downsample: u64,

    /// Replace existing outputs
    #[arg(long)]
    pub force: bool,

    /// Largest frame count accepted by `dmap`
    #[arg(long, default_value_t = DEFAULT_DMAP_CAP)]
    pub dmap_cap: usize,

    /// Coordinates CSV for `reconstruct` [default: <input>/pca_coords.csv]
    #[arg(long, value_name = "FILE")]
    pub coords: Option<PathBuf>,

    /// Group name for the row appended to table1.csv
    #[arg(long, default_value = "dataset")]
    pub label: String,
}

impl Cli {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            input_dir: self.input.clone(),
            output_dir: self.output.clone(),
            q: self.q,
            t: self.t,
            epsilon: self.epsilon,
            method: self.method,
            oversampling: self.oversampling,
            power_iterations: self.power_iterations,
            seed: self.seed,
            runs: self.runs,
            decay_count: self.decay_count,
            downsample_factor: self.downsample as usize,
            force: self.force,
            dmap_cap: self.dmap_cap,
            coords: self.coords.clone(),
            label: self.label.clone(),
        }
    }
}
