use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use flowspec_core::diffusion::{eigen_decay, embed, DecayCurve, DiffusionModel};
use flowspec_core::export::{coords_csv, decay_csv, eigenvalues_csv};
use flowspec_core::ingestion::{
    assemble, load_sequence, read_dataset, write_dataset, write_pgm, DatasetManifest, Frame,
    DATASET_VERSION,
};
use flowspec_core::pca::{fit, FitMethod, PcaModel, PcaSidecar};
use flowspec_core::rsvd::RsvdConfig;
use flowspec_core::subspace::{stability_study, StabilityReport};
use flowspec_core::{DataMatrix, Matrix};

use crate::config::{Epsilon, RunConfig};
use crate::error::{CliError, Result};
use crate::svg;

pub const DATASET_FILE: &str = "dataset.bin";
pub const MANIFEST_FILE: &str = "dataset.json";
pub const PCA_MODEL_FILE: &str = "pca_model.bin";
pub const PCA_SIDECAR_FILE: &str = "pca_model.json";
pub const PCA_COORDS_FILE: &str = "pca_coords.csv";
pub const PCA_SCATTER_FILE: &str = "pca_scatter.svg";
pub const DMAP_MODEL_FILE: &str = "dmap_model.json";
pub const DMAP_EIGENVALUES_FILE: &str = "dmap_eigenvalues.csv";
pub const DMAP_COORDS_FILE: &str = "dmap_coords.csv";
pub const DMAP_SCATTER_FILE: &str = "dmap_scatter.svg";
pub const STABILITY_FILE: &str = "stability.json";
pub const TABLE1_FILE: &str = "table1.csv";
pub const DECAY_CSV_FILE: &str = "decay.csv";
pub const DECAY_SVG_FILE: &str = "decay.svg";
pub const RECONSTRUCTED_DIR: &str = "reconstructed";
pub const RUN_LOG_FILE: &str = "run.log";

/// Fails if any of `names` already exists in the output directory, unless
/// `--force` was given. Creates the directory.
fn claim_outputs(cfg: &RunConfig, names: &[&str]) -> Result<()> {
    fs::create_dir_all(&cfg.output_dir)?;
    if cfg.force {
        return Ok(());
    }
    for name in names {
        let path = cfg.output_dir.join(name);
        if path.exists() {
            return Err(CliError::Usage(format!(
                "{} already exists; pass --force to replace it",
                path.display()
            )));
        }
    }
    Ok(())
}

/// Looks for an artifact in the input directory, then the output directory.
fn find_artifact(cfg: &RunConfig, name: &str, producer: &str) -> Result<PathBuf> {
    [&cfg.input_dir, &cfg.output_dir]
        .iter()
        .map(|dir| dir.join(name))
        .find(|p| p.is_file())
        .ok_or_else(|| {
            CliError::Usage(format!(
                "{name} not found in {} or {}; run `flowspec {producer}` first",
                cfg.input_dir.display(),
                cfg.output_dir.display()
            ))
        })
}

fn append_log(cfg: &RunConfig, command: &str, entries: &[(&str, String)]) -> Result<()> {
    let mut line = command.to_string();
    for (key, value) in entries {
        line.push_str(&format!(" {key}={value}"));
    }
    line.push('\n');
    OpenOptions::new()
        .create(true)
        .append(true)
        .open(cfg.output_dir.join(RUN_LOG_FILE))?
        .write_all(line.as_bytes())?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn rsvd_config(cfg: &RunConfig, seed: u64) -> RsvdConfig {
    RsvdConfig::new(cfg.q, seed)
        .with_oversampling(cfg.oversampling)
        .with_power_iterations(cfg.power_iterations)
}

/// Reads the ingested dataset.
pub fn load_dataset(cfg: &RunConfig) -> Result<DataMatrix> {
    let path = find_artifact(cfg, DATASET_FILE, "ingest")?;
    Ok(read_dataset(&path)?)
}

/// Decodes the frames in `input_dir` and writes `dataset.bin` plus its
/// manifest `dataset.json`.
pub fn cmd_ingest(cfg: &RunConfig) -> Result<DatasetManifest> {
    if !cfg.input_dir.is_dir() {
        return Err(CliError::Usage(format!(
            "input directory {} does not exist",
            cfg.input_dir.display()
        )));
    }
    claim_outputs(cfg, &[DATASET_FILE, MANIFEST_FILE])?;
    let seq = load_sequence(&cfg.input_dir, cfg.downsample_factor)?;
    if seq.frames.len() < 2 {
        return Err(CliError::Data(flowspec_core::Error::InvalidParameter(format!(
            "{} holds {} frame; at least 2 are needed",
            cfg.input_dir.display(),
            seq.frames.len()
        ))));
    }
    let data = assemble(&seq)?;
    let checksum = write_dataset(&cfg.output_dir.join(DATASET_FILE), &data)?;
    let manifest = DatasetManifest {
        format_version: DATASET_VERSION,
        width: seq.width,
        height: seq.height,
        p: data.dim(),
        n: data.len(),
        downsample: cfg.downsample_factor,
        files: seq.source_names,
        checksum,
    };
    manifest.save(&cfg.output_dir.join(MANIFEST_FILE))?;
    append_log(
        cfg,
        "ingest",
        &[
            ("frames", manifest.n.to_string()),
            ("width", manifest.width.to_string()),
            ("height", manifest.height.to_string()),
            ("p", manifest.p.to_string()),
            ("downsample", manifest.downsample.to_string()),
            ("checksum", manifest.checksum.clone()),
        ],
    )?;
    Ok(manifest)
}

/// Fits PCA and writes the model, per-frame coordinates and a scatter plot.
pub fn cmd_pca(cfg: &RunConfig) -> Result<PcaModel> {
    claim_outputs(
        cfg,
        &[PCA_MODEL_FILE, PCA_SIDECAR_FILE, PCA_COORDS_FILE, PCA_SCATTER_FILE],
    )?;
    let y = load_dataset(cfg)?;
    let mut log = vec![("method", cfg.method.to_string()), ("q", cfg.q.to_string())];
    let rsvd = match cfg.method {
        FitMethod::Exact => None,
        FitMethod::Stochastic => {
            let seed = cfg.resolve_seed();
            log.push(("seed", seed.to_string()));
            log.push(("oversampling", cfg.oversampling.to_string()));
            log.push(("power_iterations", cfg.power_iterations.to_string()));
            Some(rsvd_config(cfg, seed))
        }
    };
    let model = fit(&y, cfg.q, cfg.method, rsvd.as_ref())?;
    let coords = model.project_all(&y)?;

    let out = &cfg.output_dir;
    model.save(&out.join(PCA_MODEL_FILE), &out.join(PCA_SIDECAR_FILE))?;
    fs::write(out.join(PCA_COORDS_FILE), coords_csv(&coords))?;
    fs::write(
        out.join(PCA_SCATTER_FILE),
        svg::scatter(&coords, &format!("PCA coordinates ({})", cfg.method)),
    )?;
    log.push(("p", y.dim().to_string()));
    log.push(("n", y.len().to_string()));
    append_log(cfg, "pca", &log)?;
    Ok(model)
}

/// Contents of `dmap_model.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DmapSummary {
    pub n: usize,
    pub q: usize,
    pub t: u32,
    pub epsilon: f64,
    /// `"auto"` (largest squared pairwise distance) or `"fixed"`.
    pub epsilon_source: String,
    /// All eigenvalues of the diffusion matrix, nonincreasing; entry 0 is the trivial one.
    pub eigenvalues: Vec<f64>,
}

/// Builds the diffusion map and writes eigenvalues, coordinates and a scatter plot.
pub fn cmd_dmap(cfg: &RunConfig) -> Result<DmapSummary> {
    claim_outputs(
        cfg,
        &[DMAP_MODEL_FILE, DMAP_EIGENVALUES_FILE, DMAP_COORDS_FILE, DMAP_SCATTER_FILE],
    )?;
    let y = load_dataset(cfg)?;
    if y.len() > cfg.dmap_cap {
        return Err(CliError::Usage(format!(
            "{} frames exceed the diffusion-map cap of {}; raise --dmap-cap or downsample the sequence",
            y.len(),
            cfg.dmap_cap
        )));
    }
    let model = DiffusionModel::fit(&y, cfg.epsilon.value()).map_err(|e| match e {
        flowspec_core::Error::IdenticalPoints => CliError::DataContext {
            context: format!(
                "all {} ingested frames are identical, so no kernel bandwidth exists; \
                 check the input frames and the downsample factor",
                y.len()
            ),
            source: e,
        },
        other => CliError::Data(other),
    })?;
    let embedding = embed(&model, cfg.q, cfg.t)?;

    let summary = DmapSummary {
        n: model.n(),
        q: cfg.q,
        t: cfg.t,
        epsilon: model.epsilon,
        epsilon_source: match cfg.epsilon {
            Epsilon::Auto => "auto".into(),
            Epsilon::Fixed(_) => "fixed".into(),
        },
        eigenvalues: model.eigenvalues.clone(),
    };
    let out = &cfg.output_dir;
    write_json(&out.join(DMAP_MODEL_FILE), &summary)?;
    fs::write(out.join(DMAP_EIGENVALUES_FILE), eigenvalues_csv(&model.eigenvalues))?;
    fs::write(out.join(DMAP_COORDS_FILE), coords_csv(&embedding.coords))?;
    fs::write(
        out.join(DMAP_SCATTER_FILE),
        svg::scatter(&embedding.coords, &format!("Diffusion map (t = {})", cfg.t)),
    )?;
    append_log(
        cfg,
        "dmap",
        &[
            ("epsilon", summary.epsilon.to_string()),
            ("epsilon_source", summary.epsilon_source.clone()),
            ("t", cfg.t.to_string()),
            ("q", cfg.q.to_string()),
            ("n", summary.n.to_string()),
        ],
    )?;
    Ok(summary)
}

/// Repeats stochastic PCA `runs` times, writes `stability.json` and appends
/// a `group,mean,std` row to `table1.csv`.
pub fn cmd_stability(cfg: &RunConfig) -> Result<StabilityReport> {
    claim_outputs(cfg, &[STABILITY_FILE])?;
    let y = load_dataset(cfg)?;
    let seed = cfg.resolve_seed();
    let report = stability_study(&y, cfg.q, cfg.runs, &rsvd_config(cfg, seed))?;
    fs::write(cfg.output_dir.join(STABILITY_FILE), report.to_json()? + "\n")?;

    let table = cfg.output_dir.join(TABLE1_FILE);
    let mut text = String::new();
    if !table.exists() {
        text.push_str(StabilityReport::CSV_HEADER);
        text.push('\n');
    }
    text.push_str(&report.csv_row(&cfg.label));
    text.push('\n');
    OpenOptions::new()
        .create(true)
        .append(true)
        .open(&table)?
        .write_all(text.as_bytes())?;

    let seeds: Vec<String> = report.seeds.iter().map(u64::to_string).collect();
    append_log(
        cfg,
        "stability",
        &[
            ("q", cfg.q.to_string()),
            ("runs", cfg.runs.to_string()),
            ("seeds", seeds.join(",")),
            ("oversampling", cfg.oversampling.to_string()),
            ("power_iterations", cfg.power_iterations.to_string()),
            ("mean", report.mean.to_string()),
            ("std", report.std_dev.to_string()),
        ],
    )?;
    Ok(report)
}

/// Normalized spectra of the two methods.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayOutcome {
    pub pca: DecayCurve,
    pub diffusion: DecayCurve,
}

/// Writes the leading `decay_count` normalized PCA singular values and
/// nontrivial diffusion eigenvalues, as CSV and as an overlay chart.
pub fn cmd_decay(cfg: &RunConfig) -> Result<DecayOutcome> {
    claim_outputs(cfg, &[DECAY_CSV_FILE, DECAY_SVG_FILE])?;
    let pca_path = find_artifact(cfg, PCA_SIDECAR_FILE, "pca")?;
    let dmap_path = find_artifact(cfg, DMAP_MODEL_FILE, "dmap")?;
    let pca: PcaSidecar = serde_json::from_str(&fs::read_to_string(pca_path)?)?;
    let dmap: DmapSummary = serde_json::from_str(&fs::read_to_string(dmap_path)?)?;

    let outcome = DecayOutcome {
        pca: eigen_decay(&pca.spectrum, cfg.decay_count)?,
        diffusion: eigen_decay(dmap.eigenvalues.get(1..).unwrap_or(&[]), cfg.decay_count)?,
    };
    let out = &cfg.output_dir;
    fs::write(
        out.join(DECAY_CSV_FILE),
        decay_csv(&[("pca", &outcome.pca), ("diffusion", &outcome.diffusion)]),
    )?;
    fs::write(
        out.join(DECAY_SVG_FILE),
        svg::line_chart(
            &[
                ("pca", &outcome.pca.values),
                ("diffusion", &outcome.diffusion.values),
            ],
            &format!("Decay of the first {} eigenvalues", cfg.decay_count),
            "relative value",
        ),
    )?;
    append_log(
        cfg,
        "decay",
        &[
            ("decay_count", cfg.decay_count.to_string()),
            ("pca_values", outcome.pca.values.len().to_string()),
            ("diffusion_values", outcome.diffusion.values.len().to_string()),
        ],
    )?;
    Ok(outcome)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconstructSummary {
    pub frames: usize,
    /// Pixels that fell outside `[0, 1]` before quantization.
    pub clamped: usize,
    pub dir: PathBuf,
}

/// Maps each row of `coords` back to image space through the PCA model and
/// writes the frames as 8-bit PGM files.
pub fn cmd_reconstruct(cfg: &RunConfig, coords: &Matrix) -> Result<ReconstructSummary> {
    let model = PcaModel::load(
        &find_artifact(cfg, PCA_MODEL_FILE, "pca")?,
        &find_artifact(cfg, PCA_SIDECAR_FILE, "pca")?,
    )?;
    let manifest = DatasetManifest::load(&find_artifact(cfg, MANIFEST_FILE, "ingest")?)?;
    if manifest.width * manifest.height != model.dim() {
        return Err(CliError::Data(flowspec_core::Error::InvalidParameter(format!(
            "PCA model has {} pixels but the dataset frames are {}x{}",
            model.dim(),
            manifest.width,
            manifest.height
        ))));
    }
    if coords.cols() != model.q() {
        return Err(CliError::Data(flowspec_core::Error::DimensionMismatch {
            op: "reconstruct",
            left: (model.q(), 1),
            right: (coords.cols(), 1),
        }));
    }

    fs::create_dir_all(&cfg.output_dir)?;
    let dir = cfg.output_dir.join(RECONSTRUCTED_DIR);
    if dir.is_dir() && fs::read_dir(&dir)?.next().is_some() {
        if !cfg.force {
            return Err(CliError::Usage(format!(
                "{} is not empty; pass --force to replace it",
                dir.display()
            )));
        }
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "pgm") {
                fs::remove_file(path)?;
            }
        }
    }
    fs::create_dir_all(&dir)?;
    let digits = coords.rows().to_string().len().max(4);
    let mut clamped = 0;
    for j in 0..coords.rows() {
        let pixels = model.reconstruct(&coords.row(j))?;
        let frame = Frame {
            width: manifest.width,
            height: manifest.height,
            pixels,
        };
        clamped += write_pgm(&dir.join(format!("{:0digits$}.pgm", j + 1)), &frame)?;
    }
    append_log(
        cfg,
        "reconstruct",
        &[
            ("frames", coords.rows().to_string()),
            ("q", model.q().to_string()),
            ("clamped_pixels", clamped.to_string()),
        ],
    )?;
    Ok(ReconstructSummary {
        frames: coords.rows(),
        clamped,
        dir,
    })
}
