//! The three-condition evaluation pipeline.
//!
//! For each label the report carries the frequency-matched random-guess
//! baseline, the "before" condition (full-dimension RDCA projection for that
//! label, then SVM), and the "after" condition (projection onto the privacy
//! noise subspace, then SVM for both labels). Ridge and cost are selected by
//! stratified grid-search cross-validation per condition; in the after
//! condition the ridge is scored on the utility task and the privacy
//! classifier then picks its own cost on the desensitized data.

use crate::classifier::{
    accuracy, cross_validate, per_class_accuracy, predict, train_linear_svm, CvPipeline, CvPlan,
    IdentityPipeline,
};
use crate::data::{random_guess_accuracy, Label, SplitDataset};
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::parallel;
use crate::rdca::{fit_rdca, project, total_scatter_trace};

use super::report::{
    Accuracies, ChosenParams, ConfigEcho, DatasetStats, ExperimentReport, LabelResult, LabelStat,
    Role, SelectedParams, WorkCounters, SCHEMA_VERSION,
};
use super::ExperimentConfig;

// Stage offsets mixed into the experiment seed so each cross-validation
// shuffles independently but reproducibly.
const SEED_BEFORE_UTILITY: u64 = 1;
const SEED_BEFORE_PRIVACY: u64 = 2;
const SEED_AFTER: u64 = 3;
const SEED_AFTER_PRIVACY_C: u64 = 4;

fn stage_seed(seed: u64, stage: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(stage)
}

/// Remap class indices to a dense 0..k range; cross-validation folds can
/// lose sparsely populated classes of the auxiliary (non-scoring) label.
fn compact_classes(y: &[usize]) -> Vec<usize> {
    let max = y.iter().map(|&c| c + 1).max().unwrap_or(0);
    let mut present = vec![false; max];
    for &c in y {
        present[c] = true;
    }
    let mut map = vec![usize::MAX; max];
    let mut next = 0;
    for c in 0..max {
        if present[c] {
            map[c] = next;
            next += 1;
        }
    }
    y.iter().map(|&c| map[c]).collect()
}

/// Fit RDCA on the fold's training rows for the given label and project both
/// sides through the requested subspace.
struct RdcaPipeline<'a> {
    fit_label: &'a [usize],
    noise_only: bool,
}

impl CvPipeline for RdcaPipeline<'_> {
    fn transform(
        &self,
        rho: f64,
        x: &Matrix,
        train_idx: &[usize],
        val_idx: &[usize],
    ) -> Result<(Matrix, Matrix)> {
        let xtr = x.select_rows(train_idx);
        let ytr: Vec<usize> = train_idx.iter().map(|&i| self.fit_label[i]).collect();
        let model = fit_rdca(&xtr, &compact_classes(&ytr), rho)?;
        let sub = if self.noise_only {
            model.noise_subspace()
        } else {
            model.full_projection()
        };
        Ok((project(&xtr, &sub)?, project(&x.select_rows(val_idx), &sub)?))
    }
}

fn accuracies(pred: &[usize], truth: &Label) -> Result<Accuracies> {
    Ok(Accuracies {
        overall: accuracy(pred, &truth.classes)?,
        per_class: per_class_accuracy(pred, &truth.classes, truth.num_classes())?,
    })
}

fn ensure_all_classes_present(label: &Label) -> Result<()> {
    if let Some(class) = label.class_counts().iter().position(|&c| c == 0) {
        return Err(Error::EmptyClass { class }
            .with_context(format!("training split, label {:?}", label.name)));
    }
    Ok(())
}

struct Condition {
    accuracies: Accuracies,
    chosen: ChosenParams,
}

/// "Before desensitization": RDCA refitted for the evaluated label, all M
/// components kept.
fn before_condition(
    split: &SplitDataset,
    label: &Label,
    rho_grid: &[f64],
    rho_multipliers: &[f64],
    cfg: &ExperimentConfig,
    stage: u64,
    work: &mut WorkCounters,
) -> Result<Condition> {
    let train_label = label;
    let test_label = split.test.label(&label.name)?;
    let plan = CvPlan {
        folds: cfg.folds,
        c_grid: cfg.c_grid.clone(),
        rho_grid: rho_grid.to_vec(),
        seed: stage_seed(cfg.seed, stage),
    };
    let pipeline = RdcaPipeline {
        fit_label: &train_label.classes,
        noise_only: false,
    };
    let outcome = cross_validate(&split.train.features, &train_label.classes, &plan, &pipeline)?;
    work.rdca_fits += outcome.pipeline_fits;
    work.svm_trainings += outcome.svm_trainings;

    let best = outcome.best;
    let mut model = fit_rdca(&split.train.features, &train_label.classes, best.rho)?;
    model.set_label_info(&train_label.name, train_label.class_names.clone());
    work.rdca_fits += 1;
    let full = model.full_projection();
    let ztr = project(&split.train.features, &full)?;
    let zte = project(&split.test.features, &full)?;
    let svm = train_linear_svm(&ztr, &train_label.classes, best.c)?;
    work.svm_trainings += 1;
    let pred = predict(&svm, &zte)?;

    let idx = rho_grid
        .iter()
        .position(|&r| r == best.rho)
        .expect("chosen rho comes from the grid");
    Ok(Condition {
        accuracies: accuracies(&pred, test_label)?,
        chosen: ChosenParams {
            rho: best.rho,
            rho_multiplier: rho_multipliers[idx],
            c: best.c,
        },
    })
}

struct AfterOutcome {
    utility: Condition,
    privacy: Accuracies,
    privacy_c: f64,
    desensitized_dim: usize,
}

/// "After desensitization": RDCA fitted on the privacy label, both labels
/// classified in its noise subspace.
fn after_condition(
    split: &SplitDataset,
    utility: &Label,
    privacy: &Label,
    rho_grid: &[f64],
    rho_multipliers: &[f64],
    cfg: &ExperimentConfig,
    work: &mut WorkCounters,
) -> Result<AfterOutcome> {
    let utility_test = split.test.label(&utility.name)?;
    let privacy_test = split.test.label(&privacy.name)?;

    // ridge and utility cost, scored on the utility task
    let plan = CvPlan {
        folds: cfg.folds,
        c_grid: cfg.c_grid.clone(),
        rho_grid: rho_grid.to_vec(),
        seed: stage_seed(cfg.seed, SEED_AFTER),
    };
    let pipeline = RdcaPipeline {
        fit_label: &privacy.classes,
        noise_only: true,
    };
    let outcome = cross_validate(&split.train.features, &utility.classes, &plan, &pipeline)?;
    work.rdca_fits += outcome.pipeline_fits;
    work.svm_trainings += outcome.svm_trainings;
    let best = outcome.best;

    let mut model = fit_rdca(&split.train.features, &privacy.classes, best.rho)?;
    model.set_label_info(&privacy.name, privacy.class_names.clone());
    work.rdca_fits += 1;
    let noise = model.noise_subspace();
    let ztr = project(&split.train.features, &noise)?;
    let zte = project(&split.test.features, &noise)?;

    let svm_u = train_linear_svm(&ztr, &utility.classes, best.c)?;
    work.svm_trainings += 1;
    let pred_u = predict(&svm_u, &zte)?;

    // the privacy classifier picks its own cost on the desensitized data
    let plan_p = CvPlan {
        folds: cfg.folds,
        c_grid: cfg.c_grid.clone(),
        rho_grid: vec![0.0],
        seed: stage_seed(cfg.seed, SEED_AFTER_PRIVACY_C),
    };
    let outcome_p = cross_validate(&ztr, &privacy.classes, &plan_p, &IdentityPipeline)?;
    work.svm_trainings += outcome_p.svm_trainings;
    let svm_p = train_linear_svm(&ztr, &privacy.classes, outcome_p.best.c)?;
    work.svm_trainings += 1;
    let pred_p = predict(&svm_p, &zte)?;

    let idx = rho_grid
        .iter()
        .position(|&r| r == best.rho)
        .expect("chosen rho comes from the grid");
    Ok(AfterOutcome {
        utility: Condition {
            accuracies: accuracies(&pred_u, utility_test)?,
            chosen: ChosenParams {
                rho: best.rho,
                rho_multiplier: rho_multipliers[idx],
                c: best.c,
            },
        },
        privacy: accuracies(&pred_p, privacy_test)?,
        privacy_c: outcome_p.best.c,
        desensitized_dim: noise.dim(),
    })
}

/// Evaluate all three conditions on an already-loaded split.
pub fn run_on_split(split: &SplitDataset, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let context = |e: Error| e.with_context(format!("experiment {:?}", cfg.name));
    parallel::with_threads(cfg.threads, || run_inner(split, cfg).map_err(context))
}

fn run_inner(split: &SplitDataset, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if split.train.num_features() != split.test.num_features() {
        return Err(Error::BadLabel(format!(
            "train has {} features but test has {}",
            split.train.num_features(),
            split.test.num_features()
        )));
    }
    let utility = split.train.label(&cfg.utility_label)?.clone();
    let privacy = split.train.label(&cfg.privacy_label)?.clone();
    split.test.label(&cfg.utility_label)?;
    split.test.label(&cfg.privacy_label)?;
    ensure_all_classes_present(&utility)?;
    ensure_all_classes_present(&privacy)?;

    let m = split.train.num_features();
    let trace = total_scatter_trace(&split.train.features);
    let rho_grid: Vec<f64> = cfg
        .rho_multipliers
        .iter()
        .map(|mult| mult * trace / m as f64)
        .collect();

    let mut work = WorkCounters::default();

    let (rand_u_pc, rand_u) = random_guess_accuracy(&utility);
    let (rand_p_pc, rand_p) = random_guess_accuracy(&privacy);

    let before_u = before_condition(
        split,
        &utility,
        &rho_grid,
        &cfg.rho_multipliers,
        cfg,
        SEED_BEFORE_UTILITY,
        &mut work,
    )?;
    let before_p = before_condition(
        split,
        &privacy,
        &rho_grid,
        &cfg.rho_multipliers,
        cfg,
        SEED_BEFORE_PRIVACY,
        &mut work,
    )?;
    let after = after_condition(
        split,
        &utility,
        &privacy,
        &rho_grid,
        &cfg.rho_multipliers,
        cfg,
        &mut work,
    )?;

    let results = vec![
        LabelResult {
            label: utility.name.clone(),
            role: Role::Utility,
            class_names: utility.class_names.clone(),
            random_guess: Accuracies {
                overall: rand_u,
                per_class: rand_u_pc,
            },
            before: before_u.accuracies,
            after: after.utility.accuracies,
        },
        LabelResult {
            label: privacy.name.clone(),
            role: Role::Privacy,
            class_names: privacy.class_names.clone(),
            random_guess: Accuracies {
                overall: rand_p,
                per_class: rand_p_pc,
            },
            before: before_p.accuracies,
            after: after.privacy,
        },
    ];

    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION,
        config: ConfigEcho {
            name: cfg.name.clone(),
            dataset: cfg.dataset.as_str().to_string(),
            utility_label: cfg.utility_label.clone(),
            privacy_label: cfg.privacy_label.clone(),
            split: cfg.split_echo(),
            seed: cfg.seed,
            folds: cfg.folds,
            c_grid: cfg.c_grid.clone(),
            rho_multipliers: cfg.rho_multipliers.clone(),
        },
        dataset: DatasetStats {
            n_train: split.train.num_samples(),
            n_test: split.test.num_samples(),
            num_features: m,
            desensitized_dim: after.desensitized_dim,
            labels: vec![
                LabelStat {
                    name: utility.name.clone(),
                    num_classes: utility.num_classes(),
                },
                LabelStat {
                    name: privacy.name.clone(),
                    num_classes: privacy.num_classes(),
                },
            ],
            skipped_images: 0,
        },
        selected: SelectedParams {
            before_utility: before_u.chosen,
            before_privacy: before_p.chosen,
            after: after.utility.chosen,
            after_privacy_c: after.privacy_c,
        },
        results,
        timing: work,
    })
}
