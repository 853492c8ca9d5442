//! Dataset parsing, label construction and deterministic splitting.

mod cmu_faces;
mod har;
mod semeion;

pub use cmu_faces::{load_cmu_faces, CmuFaces};
pub use har::load_har;
pub use semeion::load_semeion;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// One named labeling of a sample set: a class index per sample plus the
/// ordered class-name table.
#[derive(Debug, Clone, PartialEq)]
pub struct Label {
    pub name: String,
    /// Per-sample class index, each < `class_names.len()`.
    pub classes: Vec<usize>,
    pub class_names: Vec<String>,
}

impl Label {
    pub fn new(
        name: impl Into<String>,
        classes: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Label> {
        let label = Label {
            name: name.into(),
            classes,
            class_names,
        };
        if let Some(&bad) = label
            .classes
            .iter()
            .find(|&&c| c >= label.class_names.len())
        {
            return Err(Error::BadLabel(format!(
                "label {:?}: class index {} out of range for {} classes",
                label.name,
                bad,
                label.class_names.len()
            )));
        }
        Ok(label)
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Sample count per class index.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.num_classes()];
        for &c in &self.classes {
            counts[c] += 1;
        }
        counts
    }

    fn subset(&self, indices: &[usize]) -> Label {
        Label {
            name: self.name.clone(),
            classes: indices.iter().map(|&i| self.classes[i]).collect(),
            class_names: self.class_names.clone(),
        }
    }
}

/// A feature matrix with one or more named labelings.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Matrix,
    labels: Vec<Label>,
    pub sample_ids: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(features: Matrix, labels: Vec<Label>, sample_ids: Option<Vec<String>>) -> Result<Dataset> {
        let ds = Dataset {
            features,
            labels,
            sample_ids,
        };
        ds.validate()?;
        Ok(ds)
    }

    fn validate(&self) -> Result<()> {
        let n = self.features.rows();
        if let Some(ids) = &self.sample_ids {
            if ids.len() != n {
                return Err(Error::BadLabel(format!(
                    "sample id count {} does not match {} samples",
                    ids.len(),
                    n
                )));
            }
        }
        for label in &self.labels {
            if label.classes.len() != n {
                return Err(Error::BadLabel(format!(
                    "label {:?} has {} entries for {} samples",
                    label.name,
                    label.classes.len(),
                    n
                )));
            }
            let nonempty = label.class_counts().iter().filter(|&&c| c > 0).count();
            if nonempty < 2 {
                return Err(Error::BadLabel(format!(
                    "label {:?} needs at least 2 non-empty classes, found {}",
                    label.name, nonempty
                )));
            }
        }
        Ok(())
    }

    pub fn num_samples(&self) -> usize {
        self.features.rows()
    }

    pub fn num_features(&self) -> usize {
        self.features.cols()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, name: &str) -> Result<&Label> {
        self.labels
            .iter()
            .find(|l| l.name == name)
            .ok_or_else(|| {
                Error::Config(format!(
                    "label {:?} not found; dataset has {:?}",
                    name,
                    self.labels.iter().map(|l| l.name.as_str()).collect::<Vec<_>>()
                ))
            })
    }

    pub fn push_label(&mut self, label: Label) -> Result<()> {
        if label.classes.len() != self.num_samples() {
            return Err(Error::BadLabel(format!(
                "label {:?} has {} entries for {} samples",
                label.name,
                label.classes.len(),
                self.num_samples()
            )));
        }
        self.labels.push(label);
        Ok(())
    }

    /// Row subset preserving label tables and sample ids.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let m = self.num_features();
        let mut data = Vec::with_capacity(indices.len() * m);
        for &i in indices {
            data.extend_from_slice(self.features.row(i));
        }
        let features = Matrix::from_vec(indices.len(), m, data)?;
        let labels = self.labels.iter().map(|l| l.subset(indices)).collect();
        let sample_ids = self
            .sample_ids
            .as_ref()
            .map(|ids| indices.iter().map(|&i| ids[i].clone()).collect());
        Dataset::new(features, labels, sample_ids)
    }
}

/// Train/test halves sharing feature width and label tables.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitDataset {
    pub train: Dataset,
    pub test: Dataset,
}

/// Build the Split-Label utility/privacy pair from a 10-class digit label.
///
/// With `protect_high` set the utility keeps digits 0-4 (grouped class
/// "Rest" last) and the privacy label keeps digits 5-9 (grouped class "Rest"
/// first); with it clear the roles are swapped.
pub fn build_split_labels(digits: &Label, protect_high: bool) -> Result<(Label, Label)> {
    if digits.num_classes() > 10 {
        return Err(Error::BadLabel(format!(
            "digit label has {} classes, expected at most 10",
            digits.num_classes()
        )));
    }
    if let Some(&bad) = digits.classes.iter().find(|&&d| d > 9) {
        return Err(Error::BadLabel(format!(
            "digit class index {bad} outside 0-9"
        )));
    }

    // Low-digit label: classes 0-4 keep their digit, 5-9 group to "Rest" = 5.
    let low_names: Vec<String> = (0..5)
        .map(|d| d.to_string())
        .chain(std::iter::once("Rest".to_string()))
        .collect();
    let low = Label::new(
        "digits-0-4",
        digits.classes.iter().map(|&d| d.min(5)).collect(),
        low_names,
    )?;

    // High-digit label: "Rest" = 0, digits 5-9 at indices 1-5.
    let high_names: Vec<String> = std::iter::once("Rest".to_string())
        .chain((5..10).map(|d| d.to_string()))
        .collect();
    let high = Label::new(
        "digits-5-9",
        digits
            .classes
            .iter()
            .map(|&d| if d >= 5 { d - 4 } else { 0 })
            .collect(),
        high_names,
    )?;

    if protect_high {
        Ok((low, high))
    } else {
        Ok((high, low))
    }
}

/// Frequency-matched random-guess baseline.
///
/// A guesser that predicts class c with probability n_c/N scores n_c/N on
/// class-c samples; its overall expected accuracy is the sum of squared
/// class frequencies.
pub fn random_guess_accuracy(label: &Label) -> (Vec<f64>, f64) {
    let n = label.classes.len() as f64;
    assert!(n > 0.0, "random_guess_accuracy needs a nonempty label");
    let per_class: Vec<f64> = label
        .class_counts()
        .iter()
        .map(|&c| c as f64 / n)
        .collect();
    let overall = per_class.iter().map(|p| p * p).sum();
    (per_class, overall)
}

fn shuffle(indices: &mut [usize], rng: &mut ChaCha8Rng) {
    for i in (1..indices.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        indices.swap(i, j);
    }
}

/// Deterministic stratified train/test split.
///
/// Per-class test counts are round(class size x test_fraction); a class
/// whose rounded count would empty either side is an error.
pub fn stratified_split(
    ds: &Dataset,
    stratify_by: &str,
    test_fraction: f64,
    seed: u64,
) -> Result<SplitDataset> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Config(format!(
            "test fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    let label = ds.label(stratify_by)?;
    let num_classes = label.num_classes();

    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); num_classes];
    for (i, &c) in label.classes.iter().enumerate() {
        per_class[c].push(i);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for (class, members) in per_class.iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let n_c = members.len();
        let take = (n_c as f64 * test_fraction).round() as usize;
        if take == 0 || take >= n_c {
            return Err(Error::SplitImpossible {
                class,
                size: n_c,
                fraction: test_fraction,
            });
        }
        let mut order = members.clone();
        shuffle(&mut order, &mut rng);
        test_idx.extend_from_slice(&order[..take]);
        train_idx.extend_from_slice(&order[take..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();

    Ok(SplitDataset {
        train: ds.subset(&train_idx)?,
        test: ds.subset(&test_idx)?,
    })
}
