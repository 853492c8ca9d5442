//! Stratified k-fold cross-validation over a (C, rho) grid.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::svm::{predict, train_linear_svm};
use super::accuracy;
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::parallel;

/// Grid-search plan. `folds == N` requests leave-one-out; otherwise folds are
/// stratified and must not exceed the smallest class size.
#[derive(Debug, Clone)]
pub struct CvPlan {
    pub folds: usize,
    pub c_grid: Vec<f64>,
    /// Ridge values evaluated jointly with C. Pipelines that do not use a
    /// ridge pass a single placeholder value.
    pub rho_grid: Vec<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvParams {
    pub c: f64,
    pub rho: f64,
}

#[derive(Debug, Clone)]
pub struct CvOutcome {
    pub best: CvParams,
    /// Mean validation accuracy per grid point, rho-major then C, fixed
    /// order.
    pub table: Vec<(CvParams, f64)>,
    /// Multiclass SVM trainings performed during the search.
    pub svm_trainings: u64,
    /// Pipeline fits performed (one per fold x rho cell).
    pub pipeline_fits: u64,
}

/// Maps fold features into classifier space for a given rho. Implementations
/// may fit per-fold state (e.g. an RDCA model on the fold's training rows)
/// but must be deterministic.
pub trait CvPipeline: Sync {
    fn transform(
        &self,
        rho: f64,
        x: &Matrix,
        train_idx: &[usize],
        val_idx: &[usize],
    ) -> Result<(Matrix, Matrix)>;
}

/// Pass features through unchanged.
pub struct IdentityPipeline;

impl CvPipeline for IdentityPipeline {
    fn transform(
        &self,
        _rho: f64,
        x: &Matrix,
        train_idx: &[usize],
        val_idx: &[usize],
    ) -> Result<(Matrix, Matrix)> {
        Ok((x.select_rows(train_idx), x.select_rows(val_idx)))
    }
}

fn build_folds(y: &[usize], folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let n = y.len();
    if folds == n {
        // leave-one-out
        return Ok((0..n).map(|i| vec![i]).collect());
    }
    if folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {folds}")));
    }
    let num_classes = y.iter().map(|&c| c + 1).max().unwrap_or(0);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); num_classes];
    for (i, &c) in y.iter().enumerate() {
        members[c].push(i);
    }
    let smallest = members
        .iter()
        .filter(|m| !m.is_empty())
        .map(|m| m.len())
        .min()
        .unwrap_or(0);
    if smallest < folds {
        return Err(Error::FoldConstruction { folds, smallest });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); folds];
    for class_members in members.iter_mut() {
        // shuffle then deal round-robin
        for i in (1..class_members.len()).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            class_members.swap(i, j);
        }
        for (k, &sample) in class_members.iter().enumerate() {
            out[k % folds].push(sample);
        }
    }
    for fold in &mut out {
        fold.sort_unstable();
    }
    Ok(out)
}

/// Stratified grid search: returns the mean validation accuracy for every
/// (rho, C) pair and the winner. Ties go to the smaller C, then the smaller
/// rho. Deterministic for a fixed seed, independent of thread count.
pub fn cross_validate<P: CvPipeline>(
    x: &Matrix,
    y: &[usize],
    plan: &CvPlan,
    pipeline: &P,
) -> Result<CvOutcome> {
    if plan.c_grid.is_empty() || plan.rho_grid.is_empty() {
        return Err(Error::Config("empty cross-validation grid".to_string()));
    }
    let folds = build_folds(y, plan.folds, plan.seed)?;
    let k = folds.len();

    let all: Vec<usize> = (0..y.len()).collect();
    let cells: Vec<(usize, usize)> = (0..k)
        .flat_map(|f| (0..plan.rho_grid.len()).map(move |r| (f, r)))
        .collect();

    // accuracy per (fold, rho, c), computed in parallel, gathered in order
    let results: Vec<Result<Vec<f64>>> = parallel::map_collect(cells.clone(), |(f, r)| {
        let val_idx = &folds[f];
        let train_idx: Vec<usize> = all
            .iter()
            .copied()
            .filter(|i| !val_idx.contains(i))
            .collect();
        let (ztr, zva) = pipeline.transform(plan.rho_grid[r], x, &train_idx, val_idx)?;
        let ytr: Vec<usize> = train_idx.iter().map(|&i| y[i]).collect();
        let yva: Vec<usize> = val_idx.iter().map(|&i| y[i]).collect();
        plan.c_grid
            .iter()
            .map(|&c| {
                let model = train_linear_svm(&ztr, &ytr, c)?;
                let pred = predict(&model, &zva)?;
                accuracy(&pred, &yva)
            })
            .collect()
    });

    let num_rho = plan.rho_grid.len();
    let num_c = plan.c_grid.len();
    let mut sums = vec![0.0f64; num_rho * num_c];
    for ((_, r), cell) in cells.iter().zip(results) {
        let accs = cell?;
        for (ci, acc) in accs.iter().enumerate() {
            sums[r * num_c + ci] += acc;
        }
    }

    let mut table = Vec::with_capacity(num_rho * num_c);
    for (r, &rho) in plan.rho_grid.iter().enumerate() {
        for (ci, &c) in plan.c_grid.iter().enumerate() {
            table.push((CvParams { c, rho }, sums[r * num_c + ci] / k as f64));
        }
    }

    let mut best = table[0].0;
    let mut best_acc = table[0].1;
    for &(params, acc) in &table[1..] {
        let better = acc > best_acc
            || (acc == best_acc
                && (params.c < best.c || (params.c == best.c && params.rho < best.rho)));
        if better {
            best = params;
            best_acc = acc;
        }
    }

    Ok(CvOutcome {
        best,
        table,
        svm_trainings: (k * num_rho * num_c) as u64,
        pipeline_fits: (k * num_rho) as u64,
    })
}
