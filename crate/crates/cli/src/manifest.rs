use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use touchtone::decoder::{ColumnSet, SegmentationConfig};

use crate::args::TimingRecord;

/// Fully resolved configuration of one run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub digits: Option<String>,
    pub fs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<TimingRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline_timing: Option<TimingRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_dft: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segmentation: Option<SegmentationConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub columns: Option<ColumnSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallel: Option<bool>,
    pub out_dir: PathBuf,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    argv: &'a [String],
    config: &'a RunConfig,
    artifacts: &'a [String],
}

pub fn create_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

/// Writes `manifest.json` next to the artifacts. Contains no timestamps, so
/// identical runs produce identical manifests.
pub fn write_manifest(config: &RunConfig, argv: &[String], artifacts: &[String]) -> Result<PathBuf> {
    let path = config.out_dir.join("manifest.json");
    let manifest = Manifest {
        tool: "touchtone",
        version: env!("CARGO_PKG_VERSION"),
        argv,
        config,
        artifacts,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}
