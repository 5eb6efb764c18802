use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use flowspec_core::diffusion::DEFAULT_SCALE;
use flowspec_core::pca::{FitMethod, DEFAULT_COMPONENTS};

/// Kernel bandwidth: the maximum pairwise squared distance, or a fixed value.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Epsilon {
    #[default]
    Auto,
    Fixed(f64),
}

impl Epsilon {
    pub fn value(self) -> Option<f64> {
        match self {
            Epsilon::Auto => None,
            Epsilon::Fixed(e) => Some(e),
        }
    }
}

impl FromStr for Epsilon {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Epsilon::Auto);
        }
        match s.parse::<f64>() {
            Ok(e) if e > 0.0 && e.is_finite() => Ok(Epsilon::Fixed(e)),
            Ok(e) => Err(format!("epsilon must be positive and finite, got {e}")),
            Err(_) => Err(format!("expected `auto` or a positive number, got `{s}`")),
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Epsilon::Auto => f.write_str("auto"),
            Epsilon::Fixed(e) => write!(f, "{e}"),
        }
    }
}

pub const DEFAULT_RUNS: usize = 5;
pub const DEFAULT_DECAY_COUNT: usize = 100;
pub const DEFAULT_OVERSAMPLING: usize = 10;
pub const DEFAULT_DMAP_CAP: usize = 5000;

/// Everything a command needs; field defaults follow the reference
/// experiment settings.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input_dir: PathBuf,
    pub output_dir: PathBuf,
    pub q: usize,
    pub t: u32,
    pub epsilon: Epsilon,
    pub method: FitMethod,
    pub oversampling: usize,
    pub power_iterations: usize,
    /// `None` draws a seed from the OS; the value used is written to the run log.
    pub seed: Option<u64>,
    pub runs: usize,
    pub decay_count: usize,
    pub downsample_factor: usize,
    /// Allow replacing existing outputs.
    pub force: bool,
    /// Largest frame count accepted by `dmap`.
    pub dmap_cap: usize,
    /// Coordinates file for `reconstruct`; defaults to `pca_coords.csv` next to the model.
    pub coords: Option<PathBuf>,
    /// Group name of the row `stability` appends to `table1.csv`.
    pub label: String,
}

impl RunConfig {
    pub fn new(input_dir: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            input_dir: input_dir.into(),
            output_dir: output_dir.into(),
            q: DEFAULT_COMPONENTS,
            t: DEFAULT_SCALE,
            epsilon: Epsilon::Auto,
            method: FitMethod::Stochastic,
            oversampling: DEFAULT_OVERSAMPLING,
            power_iterations: 0,
            seed: None,
            runs: DEFAULT_RUNS,
            decay_count: DEFAULT_DECAY_COUNT,
            downsample_factor: 1,
            force: false,
            dmap_cap: DEFAULT_DMAP_CAP,
            coords: None,
            label: "dataset".to_string(),
        }
    }

    pub fn resolve_seed(&self) -> u64 {
        self.seed.unwrap_or_else(rand::random)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_parsing() {
        assert_eq!("auto".parse::<Epsilon>().unwrap(), Epsilon::Auto);
        assert_eq!("AUTO".parse::<Epsilon>().unwrap(), Epsilon::Auto);
        assert_eq!("0.5".parse::<Epsilon>().unwrap(), Epsilon::Fixed(0.5));
        assert!("0".parse::<Epsilon>().is_err());
        assert!("-1".parse::<Epsilon>().is_err());
        assert!("inf".parse::<Epsilon>().is_err());
        assert!("wide".parse::<Epsilon>().is_err());
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::new("in", "out");
        assert_eq!((cfg.q, cfg.t, cfg.runs, cfg.decay_count), (3, 2, 5, 100));
        assert_eq!(cfg.epsilon, Epsilon::Auto);
        assert_eq!(cfg.method, FitMethod::Stochastic);
        assert_eq!(cfg.dmap_cap, 5000);
        assert_eq!(RunConfig { seed: Some(9), ..cfg }.resolve_seed(), 9);
    }
}
