//! One-vs-rest linear SVM with cross-validated hyperparameter search and
//! accuracy metrics.

mod cv;
mod svm;

pub use cv::{cross_validate, CvOutcome, CvParams, CvPipeline, CvPlan, IdentityPipeline};
pub use svm::{
    dual_objective, load_svm_model, predict, save_svm_model, train_binary_dcd, train_linear_svm,
    BinarySvm, LinearSvmModel, DCD_MAX_PASSES, DCD_TOLERANCE,
};

use crate::error::{Error, Result};

/// Fraction of predictions matching the truth.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::BadLabel(format!(
            "prediction length {} does not match truth length {}",
            pred.len(),
            truth.len()
        )));
    }
    let correct = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(correct as f64 / pred.len().max(1) as f64)
}

/// Per-class recall: fraction of truth-class-c samples predicted c. Classes
/// absent from the truth score 0.
pub fn per_class_accuracy(pred: &[usize], truth: &[usize], num_classes: usize) -> Result<Vec<f64>> {
    if pred.len() != truth.len() {
        return Err(Error::BadLabel(format!(
            "prediction length {} does not match truth length {}",
            pred.len(),
            truth.len()
        )));
    }
    let mut totals = vec![0usize; num_classes];
    let mut hits = vec![0usize; num_classes];
    for (&p, &t) in pred.iter().zip(truth) {
        totals[t] += 1;
        if p == t {
            hits[t] += 1;
        }
    }
    Ok((0..num_classes)
        .map(|c| {
            if totals[c] == 0 {
                0.0
            } else {
                hits[c] as f64 / totals[c] as f64
            }
        })
        .collect())
}
