//! The experiment pipeline: data -> RDCA -> desensitization -> SVM, wired
//! into the five named experiments, plus the suite runner.

mod report;
mod runner;

pub use report::{
    emit_summary, emit_table, summarize, Accuracies, ChosenParams, ConfigEcho, DatasetStats,
    ExperimentReport, LabelResult, LabelStat, ReportFormat, Role, SelectedParams, SplitEcho,
    SuiteSummary, SummaryRow, TradeoffAggregates, WorkCounters, SCHEMA_VERSION,
};
pub use runner::run_on_split;

use std::path::{Path, PathBuf};

use crate::data::{
    build_split_labels, load_cmu_faces, load_har, load_semeion, stratified_split, SplitDataset,
};
use crate::error::{Error, Result};

/// The five experiments the toolkit reproduces.
pub const EXPERIMENT_NAMES: [&str; 5] = [
    "har",
    "cmu-pose-utility",
    "cmu-glasses-utility",
    "semeion-u04",
    "semeion-u59",
];

/// Default ridge grid, as multipliers of trace(S_T)/M of the training set.
pub const DEFAULT_RHO_MULTIPLIERS: [f64; 7] = [1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0, 1e3];
/// Default SVM cost grid.
pub const DEFAULT_C_GRID: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];
pub const DEFAULT_FOLDS: usize = 5;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Har,
    Cmu,
    Semeion,
}

impl DatasetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DatasetKind::Har => "har",
            DatasetKind::Cmu => "cmu",
            DatasetKind::Semeion => "semeion",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitSpec {
    /// Use the dataset's published train/test files as-is.
    Published,
    /// Stratify by the privacy label with the experiment seed.
    Stratified { test_fraction: f64 },
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub dataset: DatasetKind,
    pub utility_label: String,
    pub privacy_label: String,
    pub split: SplitSpec,
    pub rho_multipliers: Vec<f64>,
    pub c_grid: Vec<f64>,
    pub folds: usize,
    pub seed: u64,
    /// Worker threads for internal parallelism; 0 = library default. Does
    /// not affect report bytes.
    pub threads: usize,
    pub data_dir: PathBuf,
    /// Where the CLI writes the report; unused by the library pipeline.
    pub out: Option<PathBuf>,
    pub format: ReportFormat,
}

impl ExperimentConfig {
    /// Configuration for one of the five named experiments.
    pub fn for_name(name: &str, data_dir: impl Into<PathBuf>) -> Result<ExperimentConfig> {
        let (dataset, utility, privacy, split) = match name {
            "har" => (DatasetKind::Har, "activity", "subject", SplitSpec::Published),
            "cmu-pose-utility" => (
                DatasetKind::Cmu,
                "pose",
                "sunglasses",
                SplitSpec::Stratified { test_fraction: 0.3 },
            ),
            "cmu-glasses-utility" => (
                DatasetKind::Cmu,
                "sunglasses",
                "pose",
                SplitSpec::Stratified { test_fraction: 0.3 },
            ),
            "semeion-u04" => (
                DatasetKind::Semeion,
                "digits-0-4",
                "digits-5-9",
                SplitSpec::Stratified { test_fraction: 0.3 },
            ),
            "semeion-u59" => (
                DatasetKind::Semeion,
                "digits-5-9",
                "digits-0-4",
                SplitSpec::Stratified { test_fraction: 0.3 },
            ),
            other => {
                return Err(Error::UnknownExperiment {
                    name: other.to_string(),
                    valid: EXPERIMENT_NAMES.join(", "),
                });
            }
        };
        Ok(ExperimentConfig {
            name: name.to_string(),
            dataset,
            utility_label: utility.to_string(),
            privacy_label: privacy.to_string(),
            split,
            rho_multipliers: DEFAULT_RHO_MULTIPLIERS.to_vec(),
            c_grid: DEFAULT_C_GRID.to_vec(),
            folds: DEFAULT_FOLDS,
            seed: DEFAULT_SEED,
            threads: 0,
            data_dir: data_dir.into(),
            out: None,
            format: ReportFormat::Json,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.utility_label == self.privacy_label {
            return Err(Error::Config(format!(
                "utility and privacy labels must differ, both are {:?}",
                self.utility_label
            )));
        }
        if self.folds < 2 {
            return Err(Error::Config(format!(
                "need at least 2 cross-validation folds, got {}",
                self.folds
            )));
        }
        if self.c_grid.is_empty() || self.c_grid.iter().any(|&c| c <= 0.0 || c.is_nan()) {
            return Err(Error::Config(
                "C grid must be nonempty and positive".to_string(),
            ));
        }
        if self.rho_multipliers.is_empty() || self.rho_multipliers.iter().any(|&r| r < 0.0 || r.is_nan()) {
            return Err(Error::Config(
                "rho grid must be nonempty and nonnegative".to_string(),
            ));
        }
        if let SplitSpec::Stratified { test_fraction } = self.split {
            if !(test_fraction > 0.0 && test_fraction < 1.0) {
                return Err(Error::Config(format!(
                    "test fraction must be in (0, 1), got {test_fraction}"
                )));
            }
        }
        if self.dataset == DatasetKind::Har && self.split != SplitSpec::Published {
            return Err(Error::Config(
                "the HAR experiment honors the published train/test split".to_string(),
            ));
        }
        Ok(())
    }

    pub(crate) fn split_echo(&self) -> SplitEcho {
        match self.split {
            SplitSpec::Published => SplitEcho::Published,
            SplitSpec::Stratified { test_fraction } => SplitEcho::Stratified { test_fraction },
        }
    }
}

/// Resolve the dataset root: explicit flag, then `DESENSE_DATA_DIR`, then
/// `./data`.
pub fn resolve_data_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os("DESENSE_DATA_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("data"))
}

/// Locate the HAR directory under the data root.
pub fn har_dir(data_dir: &Path) -> PathBuf {
    for candidate in ["har", "UCI HAR Dataset"] {
        let dir = data_dir.join(candidate);
        if dir.join("train").join("X_train.txt").exists() {
            return dir;
        }
    }
    if data_dir.join("train").join("X_train.txt").exists() {
        return data_dir.to_path_buf();
    }
    data_dir.join("har")
}

pub fn cmu_dir(data_dir: &Path) -> PathBuf {
    for candidate in ["cmu-faces", "cmu_faces", "faces"] {
        let dir = data_dir.join(candidate);
        if dir.is_dir() {
            return dir;
        }
    }
    data_dir.join("cmu-faces")
}

pub fn semeion_file(data_dir: &Path) -> PathBuf {
    for candidate in ["semeion/semeion.data", "semeion.data"] {
        let file = data_dir.join(candidate);
        if file.exists() {
            return file;
        }
    }
    data_dir.join("semeion").join("semeion.data")
}

/// Whether the files for a dataset kind are present under the data root.
pub fn dataset_available(kind: DatasetKind, data_dir: &Path) -> bool {
    match kind {
        DatasetKind::Har => har_dir(data_dir).join("train").join("X_train.txt").exists(),
        DatasetKind::Cmu => cmu_dir(data_dir).is_dir(),
        DatasetKind::Semeion => semeion_file(data_dir).exists(),
    }
}

/// Load and split the configured dataset. Returns the split plus the count
/// of skipped corrupt images (CMU only).
pub fn load_and_split(cfg: &ExperimentConfig) -> Result<(SplitDataset, u64)> {
    let context = |e: Error| e.with_context(format!("experiment {:?}", cfg.name));
    match cfg.dataset {
        DatasetKind::Har => {
            let split = load_har(&har_dir(&cfg.data_dir)).map_err(context)?;
            Ok((split, 0))
        }
        DatasetKind::Cmu => {
            let SplitSpec::Stratified { test_fraction } = cfg.split else {
                return Err(Error::Config(
                    "CMU Faces has no published split; use a stratified one".to_string(),
                ));
            };
            let faces = load_cmu_faces(&cmu_dir(&cfg.data_dir)).map_err(context)?;
            let split =
                stratified_split(&faces.dataset, &cfg.privacy_label, test_fraction, cfg.seed)
                    .map_err(context)?;
            Ok((split, faces.skipped as u64))
        }
        DatasetKind::Semeion => {
            let SplitSpec::Stratified { test_fraction } = cfg.split else {
                return Err(Error::Config(
                    "Semeion has no published split; use a stratified one".to_string(),
                ));
            };
            let mut ds = load_semeion(&semeion_file(&cfg.data_dir)).map_err(context)?;
            let digits = ds.label("digit")?.clone();
            let (low_or_util, high_or_priv) = build_split_labels(&digits, true)?;
            ds.push_label(low_or_util)?;
            ds.push_label(high_or_priv)?;
            let split = stratified_split(&ds, &cfg.privacy_label, test_fraction, cfg.seed)
                .map_err(context)?;
            Ok((split, 0))
        }
    }
}

/// Run one experiment end to end: load, split, and evaluate the three
/// conditions for both labels.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let (split, skipped) = load_and_split(cfg)?;
    let mut report = run_on_split(&split, cfg)?;
    report.dataset.skipped_images = skipped;
    Ok(report)
}

/// Run a list of named experiments and summarize them. When `out_dir` is
/// set, one report file per experiment plus `summary.<ext>` are written.
#[derive(Debug)]
pub struct SuiteOutcome {
    pub reports: Vec<ExperimentReport>,
    pub summary: SuiteSummary,
}

pub fn run_suite(
    names: &[String],
    data_dir: &Path,
    seed: u64,
    threads: usize,
    format: ReportFormat,
    out_dir: Option<&Path>,
) -> Result<SuiteOutcome> {
    for name in names {
        if !EXPERIMENT_NAMES.contains(&name.as_str()) {
            return Err(Error::UnknownExperiment {
                name: name.clone(),
                valid: EXPERIMENT_NAMES.join(", "),
            });
        }
    }
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }

    let mut reports = Vec::with_capacity(names.len());
    for name in names {
        let mut cfg = ExperimentConfig::for_name(name, data_dir)?;
        cfg.seed = seed;
        cfg.threads = threads;
        cfg.format = format;
        let report = run_experiment(&cfg)?;
        if let Some(dir) = out_dir {
            let path = dir.join(format!("{name}.{}", format.extension()));
            std::fs::write(&path, emit_table(&report, format)).map_err(|source| Error::Io {
                path,
                source,
            })?;
        }
        reports.push(report);
    }

    let summary = summarize(&reports);
    if let Some(dir) = out_dir {
        let path = dir.join(format!("summary.{}", format.extension()));
        std::fs::write(&path, emit_summary(&summary, format)).map_err(|source| Error::Io {
            path,
            source,
        })?;
    }
    Ok(SuiteOutcome { reports, summary })
}
