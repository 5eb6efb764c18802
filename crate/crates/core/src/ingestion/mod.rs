//! Frame decoding and assembly of the `p x n` observation matrix.
//!
//! Frames are grayscale images with pixel values normalized to `[0, 1]`,
//! flattened row-major (top-left pixel first). A sequence is read from a
//! directory of PGM files in lexicographic file-name order, so files should
//! use zero-padded numbering (`frames/0001.pgm`, `frames/0002.pgm`, ...).

mod dataset;
mod pgm;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use dataset::{read_dataset, write_dataset, DatasetManifest, DATASET_MAGIC, DATASET_VERSION};
pub use pgm::{decode_pgm, encode_pgm, load_pgm, write_pgm};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// A single grayscale image.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    /// Row-major, `width * height` values in `[0, 1]`.
    pub pixels: Vec<f64>,
}

impl Frame {
    pub fn mean(&self) -> f64 {
        self.pixels.iter().sum::<f64>() / self.pixels.len() as f64
    }
}

/// Ordered frames of identical size together with their source names.
#[derive(Clone, Debug)]
pub struct FrameSequence {
    pub width: usize,
    pub height: usize,
    pub frames: Vec<Vec<f64>>,
    pub source_names: Vec<String>,
}

/// Observations as columns: `p` pixels by `n` frames.
#[derive(Clone, Debug, PartialEq)]
pub struct DataMatrix {
    values: Matrix,
    frame_shape: Option<(usize, usize)>,
}

impl DataMatrix {
    pub fn new(values: Matrix) -> Self {
        Self {
            values,
            frame_shape: None,
        }
    }

    /// Data whose columns are `width x height` frames.
    pub fn with_frame_shape(values: Matrix, width: usize, height: usize) -> Result<Self> {
        if width * height != values.rows() {
            return Err(Error::InvalidParameter(format!(
                "{width}x{height} frames do not match {} rows",
                values.rows()
            )));
        }
        Ok(Self {
            values,
            frame_shape: Some((width, height)),
        })
    }

    /// Same frame shape, new values.
    pub(crate) fn with_values(&self, values: Matrix) -> Self {
        Self {
            values,
            frame_shape: self.frame_shape,
        }
    }

    /// Ambient dimension `p`.
    pub fn dim(&self) -> usize {
        self.values.rows()
    }

    /// Number of observations `n`.
    pub fn len(&self) -> usize {
        self.values.cols()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn column(&self, j: usize) -> &[f64] {
        self.values.col(j)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.values
    }

    pub fn into_matrix(self) -> Matrix {
        self.values
    }

    /// `(width, height)` when the columns are images.
    pub fn frame_shape(&self) -> Option<(usize, usize)> {
        self.frame_shape
    }

    /// Column `j` as a frame, if the frame shape is known.
    pub fn frame(&self, j: usize) -> Option<Frame> {
        self.frame_shape.map(|(width, height)| Frame {
            width,
            height,
            pixels: self.column(j).to_vec(),
        })
    }
}

/// Luma weights (ITU-R BT.601).
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// RGB to gray with `0.299 r + 0.587 g + 0.114 b`; inputs outside `[0, 1]`
/// are clamped. Returns the gray value and whether anything was clamped.
pub fn rgb_to_gray(r: f64, g: f64, b: f64) -> (f64, bool) {
    let clamped = [r, g, b].iter().any(|v| !(0.0..=1.0).contains(v));
    // per-mille weights keep (1, 1, 1) -> 1 exact
    let gray = (299.0 * r.clamp(0.0, 1.0) + 587.0 * g.clamp(0.0, 1.0) + 114.0 * b.clamp(0.0, 1.0))
        / 1000.0;
    (gray, clamped)
}

/// Converts RGB pixels while counting clamped inputs.
#[derive(Debug, Default)]
pub struct LumaConverter {
    pub clamped: usize,
}

impl LumaConverter {
    pub fn convert(&mut self, r: f64, g: f64, b: f64) -> f64 {
        let (gray, clamped) = rgb_to_gray(r, g, b);
        self.clamped += clamped as usize;
        gray
    }

    /// Interleaved `rgbrgb...` pixels to gray.
    pub fn convert_interleaved(&mut self, rgb: &[f64]) -> Vec<f64> {
        rgb.chunks_exact(3)
            .map(|px| self.convert(px[0], px[1], px[2]))
            .collect()
    }
}

/// Averages non-overlapping `factor x factor` blocks.
pub fn downsample(frame: &Frame, factor: usize) -> Result<Frame> {
    if factor == 0 || frame.width % factor != 0 || frame.height % factor != 0 {
        return Err(Error::InvalidParameter(format!(
            "downsample factor {factor} does not divide {}x{}",
            frame.width, frame.height
        )));
    }
    if factor == 1 {
        return Ok(frame.clone());
    }
    let (w, h) = (frame.width / factor, frame.height / factor);
    let area = (factor * factor) as f64;
    let mut pixels = Vec::with_capacity(w * h);
    for by in 0..h {
        for bx in 0..w {
            let mut sum = 0.0;
            for y in by * factor..(by + 1) * factor {
                let row = &frame.pixels[y * frame.width..(y + 1) * frame.width];
                sum += row[bx * factor..(bx + 1) * factor].iter().sum::<f64>();
            }
            pixels.push(sum / area);
        }
    }
    Ok(Frame {
        width: w,
        height: h,
        pixels,
    })
}

/// Stacks the frames as columns of a `p x n` matrix.
pub fn assemble(seq: &FrameSequence) -> Result<DataMatrix> {
    if seq.frames.is_empty() {
        return Err(Error::InvalidParameter("cannot assemble an empty sequence".into()));
    }
    let p = seq.width * seq.height;
    for (i, frame) in seq.frames.iter().enumerate() {
        if frame.len() != p {
            return Err(Error::FrameShape {
                name: seq
                    .source_names
                    .get(i)
                    .cloned()
                    .unwrap_or_else(|| format!("#{i}")),
                expected: (seq.width, seq.height),
                found: (frame.len(), 1),
            });
        }
    }
    let values = Matrix::new(p, seq.frames.len(), seq.frames.concat())?;
    DataMatrix::with_frame_shape(values, seq.width, seq.height)
}

/// Resolves the directory that actually holds the frames: `dir/frames` when
/// present, `dir` otherwise.
pub fn frame_dir(dir: &Path) -> PathBuf {
    let nested = dir.join("frames");
    if nested.is_dir() {
        nested
    } else {
        dir.to_path_buf()
    }
}

/// Lists `*.pgm` files in lexicographic order of file name.
pub fn list_frames(dir: &Path) -> Result<Vec<PathBuf>> {
    let dir = frame_dir(dir);
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
        })
        .collect();
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    if paths.is_empty() {
        return Err(Error::EmptySequence(dir));
    }
    Ok(paths)
}

/// Decodes every frame in `dir` (optionally downsampled) into a sequence.
pub fn load_sequence(dir: &Path, downsample_factor: usize) -> Result<FrameSequence> {
    let paths = list_frames(dir)?;
    let frames: Vec<Frame> = paths
        .par_iter()
        .map(|p| load_pgm(p).and_then(|f| downsample(&f, downsample_factor).map_err(|e| e.in_frame(p))))
        .collect::<Result<_>>()?;

    let names: Vec<String> = paths
        .iter()
        .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
        .collect();
    let (width, height) = (frames[0].width, frames[0].height);
    for (f, name) in frames.iter().zip(&names) {
        if (f.width, f.height) != (width, height) {
            return Err(Error::FrameShape {
                name: name.clone(),
                expected: (width, height),
                found: (f.width, f.height),
            });
        }
    }
    Ok(FrameSequence {
        width,
        height,
        frames: frames.into_iter().map(|f| f.pixels).collect(),
        source_names: names,
    })
}
