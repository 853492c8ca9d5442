//! Report structures and table emission.
//!
//! Reports are plain serde structs; JSON serialization round-trips every
//! f64 losslessly, and all emitters are deterministic so equal-seed runs
//! produce byte-identical files.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ReportFormat> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::Config(format!(
                "unknown format {other:?}; expected json, csv or markdown"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Utility,
    Privacy,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Utility => "utility",
            Role::Privacy => "privacy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SplitEcho {
    Published,
    Stratified { test_fraction: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub name: String,
    pub dataset: String,
    pub utility_label: String,
    pub privacy_label: String,
    pub split: SplitEcho,
    pub seed: u64,
    pub folds: usize,
    pub c_grid: Vec<f64>,
    pub rho_multipliers: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelStat {
    pub name: String,
    pub num_classes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n_train: usize,
    pub n_test: usize,
    pub num_features: usize,
    /// Noise-subspace width: num_features - (privacy classes - 1).
    pub desensitized_dim: usize,
    pub labels: Vec<LabelStat>,
    /// Corrupt images skipped by the loader (CMU Faces only).
    pub skipped_images: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChosenParams {
    pub rho: f64,
    pub rho_multiplier: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedParams {
    pub before_utility: ChosenParams,
    pub before_privacy: ChosenParams,
    /// Ridge and utility-C for the desensitized condition; the ridge is
    /// chosen by cross-validation on the utility task.
    pub after: ChosenParams,
    /// C chosen for the privacy classifier on the desensitized data.
    pub after_privacy_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Accuracies {
    pub overall: f64,
    pub per_class: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelResult {
    pub label: String,
    pub role: Role,
    pub class_names: Vec<String>,
    pub random_guess: Accuracies,
    pub before: Accuracies,
    pub after: Accuracies,
}

/// Deterministic work counters. Wall-clock time goes to the log rather than
/// the report so equal-seed runs stay byte-identical.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkCounters {
    pub rdca_fits: u64,
    pub svm_trainings: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub dataset: DatasetStats,
    pub selected: SelectedParams,
    /// Utility row first, privacy row second.
    pub results: Vec<LabelResult>,
    pub timing: WorkCounters,
}

impl ExperimentReport {
    pub fn result_for(&self, role: Role) -> Option<&LabelResult> {
        self.results.iter().find(|r| r.role == role)
    }
}

fn pct(v: f64) -> String {
    format!("{:.2}%", v * 100.0)
}

/// Display name for a class; the grouped class prints as "The Rest".
fn class_display(name: &str) -> &str {
    if name == "Rest" {
        "The Rest"
    } else {
        name
    }
}

/// Per-class row order: class-index order with the grouped "Rest" class
/// last.
fn class_order(names: &[String]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..names.len()).filter(|&i| names[i] != "Rest").collect();
    order.extend((0..names.len()).filter(|&i| names[i] == "Rest"));
    order
}

fn markdown(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("# Experiment `{}`\n\n", report.config.name));
    out.push_str(&format!(
        "dataset: {} | train/test: {}/{} | features: {} | desensitized dim: {} | seed: {}\n\n",
        report.config.dataset,
        report.dataset.n_train,
        report.dataset.n_test,
        report.dataset.num_features,
        report.dataset.desensitized_dim,
        report.config.seed,
    ));
    out.push_str("| Label | Random Guess | Before Desensitization | After Desensitization |\n");
    out.push_str("| --- | --- | --- | --- |\n");
    for row in &report.results {
        out.push_str(&format!(
            "| {} ({}) | {} | {} | {} |\n",
            row.label,
            row.role.as_str(),
            pct(row.random_guess.overall),
            pct(row.before.overall),
            pct(row.after.overall),
        ));
    }
    for row in &report.results {
        if !row.class_names.iter().any(|n| n == "Rest") {
            continue;
        }
        out.push_str(&format!(
            "\n## {} ({}) per class\n\n",
            row.label,
            row.role.as_str()
        ));
        out.push_str("| Class | Random Guess | Before Desensitization | After Desensitization |\n");
        out.push_str("| --- | --- | --- | --- |\n");
        for c in class_order(&row.class_names) {
            out.push_str(&format!(
                "| {} | {} | {} | {} |\n",
                class_display(&row.class_names[c]),
                pct(row.random_guess.per_class[c]),
                pct(row.before.per_class[c]),
                pct(row.after.per_class[c]),
            ));
        }
    }
    out
}

fn csv(report: &ExperimentReport) -> String {
    let mut out = String::from("experiment,label,role,class,random_guess,before,after\n");
    for row in &report.results {
        out.push_str(&format!(
            "{},{},{},(overall),{},{},{}\n",
            report.config.name,
            row.label,
            row.role.as_str(),
            row.random_guess.overall,
            row.before.overall,
            row.after.overall,
        ));
        for c in class_order(&row.class_names) {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                report.config.name,
                row.label,
                row.role.as_str(),
                row.class_names[c],
                row.random_guess.per_class[c],
                row.before.per_class[c],
                row.after.per_class[c],
            ));
        }
    }
    out
}

/// Render a report in the requested format. Same report, same bytes.
pub fn emit_table(report: &ExperimentReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Csv => csv(report),
        ReportFormat::Markdown => markdown(report),
    }
}

/// The headline tradeoff aggregates, in percentage points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffAggregates {
    /// Utility accuracy drop (before - after) on HAR.
    pub har_utility_drop_pp: Option<f64>,
    /// Mean utility drop over the two CMU Faces experiments.
    pub cmu_mean_utility_drop_pp: Option<f64>,
    /// Mean per-digit utility drop over the non-grouped digits of the
    /// Semeion experiments.
    pub semeion_mean_utility_digit_drop_pp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub label: String,
    pub role: Role,
    pub random_guess: f64,
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub schema_version: u32,
    pub rows: Vec<SummaryRow>,
    pub aggregates: TradeoffAggregates,
}

/// Combine per-experiment reports into the suite summary, including the
/// tradeoff aggregates for whichever datasets are present.
pub fn summarize(reports: &[ExperimentReport]) -> SuiteSummary {
    let mut rows = Vec::new();
    for report in reports {
        for r in &report.results {
            rows.push(SummaryRow {
                experiment: report.config.name.clone(),
                label: r.label.clone(),
                role: r.role,
                random_guess: r.random_guess.overall,
                before: r.before.overall,
                after: r.after.overall,
            });
        }
    }

    let utility_drop = |r: &ExperimentReport| {
        r.result_for(Role::Utility)
            .map(|u| (u.before.overall - u.after.overall) * 100.0)
    };

    let har = reports
        .iter()
        .find(|r| r.config.dataset == "har")
        .and_then(utility_drop);

    let cmu_drops: Vec<f64> = reports
        .iter()
        .filter(|r| r.config.dataset == "cmu")
        .filter_map(utility_drop)
        .collect();
    let cmu = if cmu_drops.is_empty() {
        None
    } else {
        Some(cmu_drops.iter().sum::<f64>() / cmu_drops.len() as f64)
    };

    let mut digit_drops = Vec::new();
    for report in reports.iter().filter(|r| r.config.dataset == "semeion") {
        if let Some(u) = report.result_for(Role::Utility) {
            for (c, name) in u.class_names.iter().enumerate() {
                if name != "Rest" {
                    digit_drops.push((u.before.per_class[c] - u.after.per_class[c]) * 100.0);
                }
            }
        }
    }
    let semeion = if digit_drops.is_empty() {
        None
    } else {
        Some(digit_drops.iter().sum::<f64>() / digit_drops.len() as f64)
    };

    SuiteSummary {
        schema_version: SCHEMA_VERSION,
        rows,
        aggregates: TradeoffAggregates {
            har_utility_drop_pp: har,
            cmu_mean_utility_drop_pp: cmu,
            semeion_mean_utility_digit_drop_pp: semeion,
        },
    }
}

fn opt_pp(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.2} pp"),
        None => "n/a".to_string(),
    }
}

pub fn emit_summary(summary: &SuiteSummary, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut out =
                String::from("experiment,label,role,random_guess,before,after\n");
            for r in &summary.rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.experiment,
                    r.label,
                    r.role.as_str(),
                    r.random_guess,
                    r.before,
                    r.after
                ));
            }
            out
        }
        ReportFormat::Markdown => {
            let mut out = String::from("# Suite summary\n\n");
            out.push_str(
                "| Experiment | Label | Random Guess | Before Desensitization | After Desensitization |\n",
            );
            out.push_str("| --- | --- | --- | --- | --- |\n");
            for r in &summary.rows {
                out.push_str(&format!(
                    "| {} | {} ({}) | {} | {} | {} |\n",
                    r.experiment,
                    r.label,
                    r.role.as_str(),
                    pct(r.random_guess),
                    pct(r.before),
                    pct(r.after)
                ));
            }
            out.push_str("\nUtility cost of desensitization:\n\n");
            out.push_str(&format!(
                "- HAR utility drop: {}\n",
                opt_pp(summary.aggregates.har_utility_drop_pp)
            ));
            out.push_str(&format!(
                "- CMU Faces mean utility drop: {}\n",
                opt_pp(summary.aggregates.cmu_mean_utility_drop_pp)
            ));
            out.push_str(&format!(
                "- Semeion mean utility digit drop: {}\n",
                opt_pp(summary.aggregates.semeion_mean_utility_digit_drop_pp)
            ));
            out
        }
    }
}
