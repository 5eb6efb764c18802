//! Principal component analysis through the SVD of the mean-centered data.
//!
//! The covariance matrix is never formed; components come straight from the
//! left singular vectors of the centered `p x n` matrix, computed either
//! exactly or with the randomized SVD.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diffusion::{eigen_decay, DecayCurve};
use crate::error::{Error, Result};
use crate::ingestion::DataMatrix;
use crate::linalg::{svd_exact, Matrix};
use crate::rsvd::{rsvd_full, RsvdConfig};

/// Default number of retained components.
pub const DEFAULT_COMPONENTS: usize = 3;

/// 12-byte magic followed by a little-endian `u32` format version.
pub const MODEL_MAGIC: &[u8; 12] = b"FLOWSPEC-PCA";
pub const MODEL_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Exact,
    Stochastic,
}

impl std::str::FromStr for FitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(FitMethod::Exact),
            "stochastic" => Ok(FitMethod::Stochastic),
            other => Err(Error::InvalidParameter(format!(
                "unknown method {other:?} (expected exact or stochastic)"
            ))),
        }
    }
}

impl std::fmt::Display for FitMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FitMethod::Exact => "exact",
            FitMethod::Stochastic => "stochastic",
        })
    }
}

/// A fitted PCA model. Immutable once built.
#[derive(Clone, Debug)]
pub struct PcaModel {
    /// Sample mean of the training observations (length `p`).
    pub mean: Vec<f64>,
    /// `p x q` principal components, orthonormal columns.
    pub components: Matrix,
    /// The `q` leading singular values of the centered data.
    pub sigma: Vec<f64>,
    pub n_samples: usize,
    /// Every singular value the factorization produced (`min(p, n)` for the
    /// exact path, `k + oversampling` for the stochastic one).
    pub spectrum: Vec<f64>,
    pub method: FitMethod,
    /// Randomized SVD settings, for stochastic fits.
    pub rsvd: Option<RsvdConfig>,
}

/// Subtracts the column mean from every observation.
pub fn mean_center(y: &DataMatrix) -> Result<(DataMatrix, Vec<f64>)> {
    let (p, n) = (y.dim(), y.len());
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "mean centering needs at least 2 observations, got {n}"
        )));
    }
    let mut mean = vec![0.0; p];
    for j in 0..n {
        for (m, v) in mean.iter_mut().zip(y.column(j)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut x = y.matrix().clone();
    for j in 0..n {
        for (v, m) in x.col_mut(j).iter_mut().zip(&mean) {
            *v -= m;
        }
    }
    Ok((y.with_values(x), mean))
}

/// Fits `q` principal components. `cfg` is required for
/// [`FitMethod::Stochastic`]; its `target_rank` is replaced by `q`.
pub fn fit(
    y: &DataMatrix,
    q: usize,
    method: FitMethod,
    cfg: Option<&RsvdConfig>,
) -> Result<PcaModel> {
    let (p, n) = (y.dim(), y.len());
    let limit = p.min(n.saturating_sub(1));
    if q == 0 || q > limit {
        return Err(Error::InvalidParameter(format!(
            "number of components q = {q} must lie in 1..={limit} for {p}x{n} data"
        )));
    }
    let rsvd_cfg = match (method, cfg) {
        (FitMethod::Stochastic, None) => return Err(Error::MissingRsvdConfig),
        (FitMethod::Stochastic, Some(c)) => Some(RsvdConfig {
            target_rank: q,
            ..*c
        }),
        (FitMethod::Exact, _) => None,
    };

    let (x, mean) = mean_center(y)?;
    let svd = match &rsvd_cfg {
        None => svd_exact(x.matrix())?,
        Some(c) => rsvd_full(x.matrix(), c)?,
    };
    Ok(PcaModel {
        mean,
        components: svd.u.leading_columns(q),
        sigma: svd.sigma[..q].to_vec(),
        n_samples: n,
        spectrum: svd.sigma,
        method,
        rsvd: rsvd_cfg,
    })
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn q(&self) -> usize {
        self.components.cols()
    }

    /// Coordinates `U_q^T (y - mean)`.
    pub fn project(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                op: "project",
                left: (self.dim(), 1),
                right: (y.len(), 1),
            });
        }
        let centered: Vec<f64> = y.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        self.components.t_mul_vec(&centered)
    }

    /// Projects every column of `y`; row `j` of the result is frame `j`.
    pub fn project_all(&self, y: &DataMatrix) -> Result<Matrix> {
        let mut coords = Matrix::zeros(y.len(), self.q());
        for j in 0..y.len() {
            for (c, a) in self.project(y.column(j))?.into_iter().enumerate() {
                coords[(j, c)] = a;
            }
        }
        Ok(coords)
    }

    /// `mean + U_q alpha`.
    pub fn reconstruct(&self, alpha: &[f64]) -> Result<Vec<f64>> {
        if alpha.len() != self.q() {
            return Err(Error::DimensionMismatch {
                op: "reconstruct",
                left: (self.q(), 1),
                right: (alpha.len(), 1),
            });
        }
        let mut out = self.components.mul_vec(alpha)?;
        out.iter_mut().zip(&self.mean).for_each(|(o, m)| *o += m);
        Ok(out)
    }

    /// Covariance eigenvalues `sigma_i^2 / (n - 1)`.
    pub fn explained_variance(&self) -> Vec<f64> {
        let denom = (self.n_samples - 1) as f64;
        self.sigma.iter().map(|s| s * s / denom).collect()
    }

    /// Leading singular values relative to the largest.
    pub fn decay(&self, count: usize) -> Result<DecayCurve> {
        eigen_decay(&self.spectrum, count)
    }

    /// Writes the binary container and its JSON sidecar.
    pub fn save(&self, bin_path: &Path, json_path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(16 + 8 * (self.dim() * (self.q() + 1) + self.q()));
        buf.extend_from_slice(MODEL_MAGIC);
        buf.extend_from_slice(&MODEL_VERSION.to_le_bytes());
        for x in self
            .mean
            .iter()
            .chain(&self.sigma)
            .chain(self.components.as_slice())
        {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        fs::File::create(bin_path)?.write_all(&buf)?;

        let sidecar = PcaSidecar {
            p: self.dim(),
            q: self.q(),
            n_samples: self.n_samples,
            method: self.method,
            seed: self.rsvd.map(|c| c.seed),
            oversampling: self.rsvd.map(|c| c.oversampling),
            power_iterations: self.rsvd.map(|c| c.power_iterations),
            spectrum: self.spectrum.clone(),
        };
        fs::write(json_path, serde_json::to_string_pretty(&sidecar)? + "\n")?;
        Ok(())
    }

    pub fn load(bin_path: &Path, json_path: &Path) -> Result<Self> {
        let sidecar: PcaSidecar = serde_json::from_str(&fs::read_to_string(json_path)?)?;
        let bytes = fs::read(bin_path)?;
        if bytes.len() < 16 || &bytes[..12] != MODEL_MAGIC {
            return Err(Error::Format("not a PCA model file".into()));
        }
        let version = u32::from_le_bytes(bytes[12..16].try_into().expect("4 bytes"));
        if version != MODEL_VERSION {
            return Err(Error::Format(format!("unsupported PCA model version {version}")));
        }
        let (p, q) = (sidecar.p, sidecar.q);
        let expected = 16 + 8 * (p + q + p * q);
        if bytes.len() != expected {
            return Err(Error::Format(format!(
                "PCA model has {} bytes, sidecar implies {expected}",
                bytes.len()
            )));
        }
        let floats: Vec<f64> = bytes[16..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        let rsvd = match (sidecar.method, sidecar.seed) {
            (FitMethod::Stochastic, Some(seed)) => Some(RsvdConfig {
                target_rank: q,
                oversampling: sidecar.oversampling.unwrap_or(0),
                power_iterations: sidecar.power_iterations.unwrap_or(0),
                seed,
            }),
            _ => None,
        };
        Ok(PcaModel {
            mean: floats[..p].to_vec(),
            sigma: floats[p..p + q].to_vec(),
            components: Matrix::new(p, q, floats[p + q..].to_vec())?,
            n_samples: sidecar.n_samples,
            spectrum: sidecar.spectrum,
            method: sidecar.method,
            rsvd,
        })
    }
}

/// JSON sidecar accompanying the binary PCA model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PcaSidecar {
    pub p: usize,
    pub q: usize,
    pub n_samples: usize,
    pub method: FitMethod,
    pub seed: Option<u64>,
    pub oversampling: Option<usize>,
    pub power_iterations: Option<usize>,
    pub spectrum: Vec<f64>,
}
