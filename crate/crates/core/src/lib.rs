//! Dimensionality reduction for frame sequences.
//!
//! Frames (grayscale images flattened to vectors) are stacked as the columns
//! of a `p x n` data matrix and reduced to a handful of coordinates per frame
//! either linearly, with PCA computed through a randomized SVD, or
//! non-linearly, with diffusion maps. The crate also measures how stable the
//! randomized principal subspace is across seeds and compares how quickly
//! the two spectra decay.
//!
//! ```
//! use flowspec_core::{pca, rsvd::RsvdConfig, synthetic};
//!
//! let frames = synthetic::low_rank_frames(16, 16, 40, 4, 0.01, 1);
//! let model = pca::fit(&frames, 3, pca::FitMethod::Stochastic, Some(&RsvdConfig::new(3, 7))).unwrap();
//! let coords = model.project_all(&frames).unwrap();
//! assert_eq!(coords.shape(), (40, 3));
//! ```

pub mod diffusion;
pub mod error;
pub mod export;
pub mod ingestion;
pub mod linalg;
pub mod pca;
pub mod rsvd;
pub mod subspace;
pub mod synthetic;

pub use error::{Error, Result};
pub use ingestion::DataMatrix;
pub use linalg::{Matrix, SvdResult};
