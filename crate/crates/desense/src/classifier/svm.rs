//! One-vs-rest linear SVM trained by dual coordinate descent.
//!
//! Each binary problem minimizes the L2-regularized L1-hinge dual
//!
//! ```text
//! f(a) = 1/2 a'Qa - sum(a),  0 <= a_i <= C,  Q_ij = y_i y_j x_i.x_j
//! ```
//!
//! on bias-augmented features (a constant 1 appended to every sample), so
//! there is no equality constraint. Samples are visited in fixed order, which
//! makes training deterministic.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::model_io::{fmt_real, LineReader};
use crate::numerics::Matrix;
use crate::parallel;

/// Stop when the largest projected-gradient violation in a pass drops below
/// this.
pub const DCD_TOLERANCE: f64 = 1e-3;
/// Hard cap on passes over the data.
pub const DCD_MAX_PASSES: usize = 1000;

/// Solution of one binary subproblem.
#[derive(Debug, Clone)]
pub struct BinarySvm {
    /// d+1 weights, bias last.
    pub weights: Vec<f64>,
    /// Dual variables, one per sample, each in [0, C].
    pub alpha: Vec<f64>,
    /// Passes the solver ran before meeting the tolerance (or the cap).
    pub passes: usize,
    /// Whether the projected-gradient tolerance was met within the pass cap.
    pub converged: bool,
}

/// Train one binary problem; `ybin` entries are +1/-1.
pub fn train_binary_dcd(x: &Matrix, ybin: &[f64], c: f64) -> BinarySvm {
    let (n, d) = x.shape();
    debug_assert_eq!(ybin.len(), n);
    let dim = d + 1;

    // Q_ii = |x_i|^2 + 1 (bias term)
    let q_diag: Vec<f64> = (0..n)
        .map(|i| x.row(i).iter().map(|v| v * v).sum::<f64>() + 1.0)
        .collect();

    let mut w = vec![0.0; dim];
    let mut alpha = vec![0.0; n];
    let mut passes = 0;
    let mut converged = false;
    for _ in 0..DCD_MAX_PASSES {
        passes += 1;
        let mut max_violation = 0.0f64;
        for i in 0..n {
            let row = x.row(i);
            let yi = ybin[i];
            let mut decision = w[d];
            for (j, v) in row.iter().enumerate() {
                decision += w[j] * v;
            }
            let g = yi * decision - 1.0;
            let a = alpha[i];
            let pg = if a == 0.0 {
                g.min(0.0)
            } else if a == c {
                g.max(0.0)
            } else {
                g
            };
            max_violation = max_violation.max(pg.abs());
            if pg != 0.0 {
                let a_new = (a - g / q_diag[i]).clamp(0.0, c);
                if a_new != a {
                    let step = (a_new - a) * yi;
                    for (j, v) in row.iter().enumerate() {
                        w[j] += step * v;
                    }
                    w[d] += step;
                    alpha[i] = a_new;
                }
            }
        }
        if max_violation < DCD_TOLERANCE {
            converged = true;
            break;
        }
    }

    BinarySvm {
        weights: w,
        alpha,
        passes,
        converged,
    }
}

/// Dual objective 1/2 a'Qa - sum(a) evaluated directly from the
/// bias-augmented data.
pub fn dual_objective(x: &Matrix, ybin: &[f64], alpha: &[f64]) -> f64 {
    let (n, d) = x.shape();
    let mut quad = 0.0;
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            if alpha[j] == 0.0 {
                continue;
            }
            let mut dot = 1.0; // bias coordinate
            let (ri, rj) = (x.row(i), x.row(j));
            for k in 0..d {
                dot += ri[k] * rj[k];
            }
            quad += alpha[i] * alpha[j] * ybin[i] * ybin[j] * dot;
        }
    }
    0.5 * quad - alpha.iter().sum::<f64>()
}

/// One-vs-rest multiclass model: one hyperplane per class, bias folded into
/// the last weight column.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvmModel {
    /// L x (d+1) weights.
    pub weights: Matrix,
    pub c: f64,
    pub num_classes: usize,
    /// DCD passes per class problem; diagnostics, not persisted.
    pub passes: Vec<usize>,
}

/// Train one binary hyperplane per class (class c vs rest).
pub fn train_linear_svm(x: &Matrix, y: &[usize], c: f64) -> Result<LinearSvmModel> {
    let n = x.rows();
    if y.len() != n {
        return Err(Error::BadLabel(format!(
            "label has {} entries for {} samples",
            y.len(),
            n
        )));
    }
    if c <= 0.0 || c.is_nan() {
        return Err(Error::Config(format!("C must be positive, got {c}")));
    }
    let num_classes = y.iter().map(|&v| v + 1).max().unwrap_or(0);
    if num_classes < 2 {
        return Err(Error::BadLabel(
            "training needs at least 2 classes".to_string(),
        ));
    }
    let mut counts = vec![0usize; num_classes];
    for &cls in y {
        counts[cls] += 1;
    }
    if let Some(class) = counts.iter().position(|&v| v == 0) {
        return Err(Error::EmptyClass { class });
    }
    if n < num_classes {
        return Err(Error::BadLabel(format!(
            "{n} samples cannot cover {num_classes} classes"
        )));
    }

    let solutions = parallel::map_collect((0..num_classes).collect(), |cls| {
        let ybin: Vec<f64> = y
            .iter()
            .map(|&v| if v == cls { 1.0 } else { -1.0 })
            .collect();
        train_binary_dcd(x, &ybin, c)
    });

    let dim = x.cols() + 1;
    let mut weights = Matrix::zeros(num_classes, dim);
    let mut passes = Vec::with_capacity(num_classes);
    for (cls, sol) in solutions.into_iter().enumerate() {
        weights.row_mut(cls).copy_from_slice(&sol.weights);
        passes.push(sol.passes);
    }
    weights.check_finite("train_linear_svm")?;
    Ok(LinearSvmModel {
        weights,
        c,
        num_classes,
        passes,
    })
}

/// Per-class decision values for one sample.
fn decisions(model: &LinearSvmModel, row: &[f64]) -> Vec<f64> {
    let d = model.weights.cols() - 1;
    (0..model.num_classes)
        .map(|cls| {
            let w = model.weights.row(cls);
            let mut v = w[d];
            for (j, x) in row.iter().enumerate() {
                v += w[j] * x;
            }
            v
        })
        .collect()
}

/// Argmax decision value; ties break toward the lowest class index.
pub fn predict(model: &LinearSvmModel, x: &Matrix) -> Result<Vec<usize>> {
    let d = model.weights.cols() - 1;
    if x.cols() != d {
        return Err(Error::DimensionMismatch {
            op: "predict",
            lhs_rows: x.rows(),
            lhs_cols: x.cols(),
            rhs_rows: model.weights.rows(),
            rhs_cols: d,
        });
    }
    let mut out = Vec::with_capacity(x.rows());
    for i in 0..x.rows() {
        let vals = decisions(model, x.row(i));
        let mut best = 0usize;
        for (cls, &v) in vals.iter().enumerate().skip(1) {
            if v > vals[best] {
                best = cls;
            }
        }
        out.push(best);
    }
    Ok(out)
}

const SVM_HEADER: &str = "desense-model svm v1";

/// Persist in the same text container family as the RDCA model.
pub fn save_svm_model(model: &LinearSvmModel, w: &mut impl Write) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<model>".into(),
        source,
    };
    (|| -> std::io::Result<()> {
        writeln!(w, "{SVM_HEADER}")?;
        writeln!(w, "classes {}", model.num_classes)?;
        writeln!(w, "cost {}", fmt_real(model.c))?;
        writeln!(w, "dim {}", model.weights.cols())?;
        writeln!(w, "weights")?;
        for i in 0..model.weights.rows() {
            let mut line = String::new();
            for (j, v) in model.weights.row(i).iter().enumerate() {
                if j > 0 {
                    line.push(' ');
                }
                line.push_str(&fmt_real(*v));
            }
            writeln!(w, "{line}")?;
        }
        writeln!(w, "end")
    })()
    .map_err(io_err)
}

pub fn load_svm_model(r: &mut impl BufRead) -> Result<LinearSvmModel> {
    let mut lr = LineReader::new(r);
    lr.expect(SVM_HEADER)?;
    let num_classes = lr.keyed_usize("classes")?;
    let c = lr.keyed_real("cost")?;
    let dim = lr.keyed_usize("dim")?;
    lr.expect("weights")?;
    let weights = lr.matrix(num_classes, dim)?;
    lr.expect("end")?;
    Ok(LinearSvmModel {
        weights,
        c,
        num_classes,
        passes: Vec::new(),
    })
}
