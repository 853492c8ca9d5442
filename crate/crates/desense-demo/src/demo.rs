//! Demo computations behind the browser bindings: synthetic two-label
//! Gaussian data, an RDCA fit on the privacy label, and the resulting
//! geometry and accuracy tradeoffs, all serialized as JSON-friendly structs.
//!
//! Everything is deterministic in the seed so slider moves are reproducible.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use desense::classifier::{accuracy, predict, train_linear_svm};
use desense::data::{random_guess_accuracy, Label};
use desense::numerics::Matrix;
use desense::rdca::{fit_rdca, project, total_scatter_trace};
use desense::Result;

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = ((uniform(rng) + 1.0) * 0.5).max(1e-12);
    let u2 = (uniform(rng) + 1.0) * 0.5;
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[derive(Debug, Clone, Deserialize)]
pub struct GeometryParams {
    pub seed: u64,
    /// Samples per (privacy, utility) cell.
    pub n_per_cell: usize,
    /// Distance between the two privacy class means.
    pub privacy_separation: f64,
    /// Distance between the two utility class means.
    pub utility_separation: f64,
    /// Angle in degrees between the privacy and utility mean directions.
    pub angle_deg: f64,
    /// Isotropic noise level.
    pub noise: f64,
    /// Ridge parameter as a multiple of trace(S_T)/M.
    pub ridge_multiplier: f64,
}

impl Default for GeometryParams {
    fn default() -> Self {
        GeometryParams {
            seed: 7,
            n_per_cell: 40,
            privacy_separation: 3.0,
            utility_separation: 3.0,
            angle_deg: 90.0,
            noise: 0.55,
            ridge_multiplier: 1.0,
        }
    }
}

/// 2-D points with both labels, the fitted axes, and the desensitized
/// projection (noise-axis coordinate per point).
#[derive(Debug, Clone, Serialize)]
pub struct GeometryView {
    pub points: Vec<[f64; 2]>,
    pub privacy: Vec<u8>,
    pub utility: Vec<u8>,
    pub mean: [f64; 2],
    /// Unit vector of the top discriminant component (privacy signal).
    pub signal_axis: [f64; 2],
    /// Unit vector of the remaining component (desensitized subspace).
    pub noise_axis: [f64; 2],
    pub powers: [f64; 2],
    pub ridge: f64,
    /// Noise-axis coordinate of each point: the desensitized data.
    pub desensitized: Vec<f64>,
    /// Privacy class centroids of the desensitized coordinate.
    pub desensitized_centroids: [f64; 2],
}

fn synth_2d(params: &GeometryParams) -> (Matrix, Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let angle = params.angle_deg.to_radians();
    let p_dir = [1.0, 0.0];
    let u_dir = [angle.cos(), angle.sin()];
    let n = params.n_per_cell * 4;
    let mut data = Vec::with_capacity(n * 2);
    let mut privacy = Vec::with_capacity(n);
    let mut utility = Vec::with_capacity(n);
    for cell in 0..4 {
        let p = cell % 2;
        let u = cell / 2;
        let p_shift = (p as f64 - 0.5) * params.privacy_separation;
        let u_shift = (u as f64 - 0.5) * params.utility_separation;
        for _ in 0..params.n_per_cell {
            let x = p_shift * p_dir[0] + u_shift * u_dir[0] + params.noise * gaussian(&mut rng);
            let y = p_shift * p_dir[1] + u_shift * u_dir[1] + params.noise * gaussian(&mut rng);
            data.push(x);
            data.push(y);
            privacy.push(p);
            utility.push(u);
        }
    }
    (
        Matrix::from_vec(n, 2, data).expect("finite synthetic data"),
        privacy,
        utility,
    )
}

/// Fit RDCA on the privacy label of a 2-D synthetic set and expose the
/// subspace geometry.
pub fn subspace_geometry(params: &GeometryParams) -> Result<GeometryView> {
    let (x, privacy, utility) = synth_2d(params);
    let trace = total_scatter_trace(&x);
    let ridge = params.ridge_multiplier.max(1e-9) * trace / 2.0;
    let model = fit_rdca(&x, &privacy, ridge)?;

    let unit = |col: usize| -> [f64; 2] {
        let v = [model.components.get(0, col), model.components.get(1, col)];
        let norm = (v[0] * v[0] + v[1] * v[1]).sqrt().max(1e-30);
        [v[0] / norm, v[1] / norm]
    };

    let z = project(&x, &model.noise_subspace())?;
    let desensitized: Vec<f64> = (0..z.rows()).map(|i| z.get(i, 0)).collect();
    let mut centroids = [0.0f64; 2];
    let mut counts = [0usize; 2];
    for (i, &p) in privacy.iter().enumerate() {
        centroids[p] += desensitized[i];
        counts[p] += 1;
    }
    for p in 0..2 {
        centroids[p] /= counts[p].max(1) as f64;
    }

    Ok(GeometryView {
        points: (0..x.rows()).map(|i| [x.get(i, 0), x.get(i, 1)]).collect(),
        privacy: privacy.iter().map(|&p| p as u8).collect(),
        utility: utility.iter().map(|&u| u as u8).collect(),
        mean: [model.mean[0], model.mean[1]],
        signal_axis: unit(0),
        noise_axis: unit(1),
        powers: [model.powers[0], model.powers[1]],
        ridge,
        desensitized,
        desensitized_centroids: centroids,
    })
}

#[derive(Debug, Clone, Deserialize)]
pub struct TradeoffParams {
    pub seed: u64,
    pub n_per_cell: usize,
    pub privacy_separation: f64,
    pub utility_separation: f64,
    pub angle_deg: f64,
    pub noise: f64,
    /// SVM cost used for all four classifiers.
    pub svm_cost: f64,
}

impl Default for TradeoffParams {
    fn default() -> Self {
        TradeoffParams {
            seed: 7,
            n_per_cell: 30,
            privacy_separation: 3.0,
            utility_separation: 3.0,
            angle_deg: 90.0,
            noise: 0.55,
            svm_cost: 1.0,
        }
    }
}

/// Accuracy of the four classifiers (utility/privacy x before/after) under
/// one parameter setting, plus the random-guess baselines.
#[derive(Debug, Clone, Serialize)]
pub struct TradeoffPoint {
    pub angle_deg: f64,
    pub utility_before: f64,
    pub utility_after: f64,
    pub privacy_before: f64,
    pub privacy_after: f64,
    pub utility_random: f64,
    pub privacy_random: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TradeoffCurve {
    pub points: Vec<TradeoffPoint>,
}

fn evaluate(params: &TradeoffParams, angle_deg: f64) -> Result<TradeoffPoint> {
    let geo = GeometryParams {
        seed: params.seed,
        n_per_cell: params.n_per_cell * 2, // half goes to the test side
        privacy_separation: params.privacy_separation,
        utility_separation: params.utility_separation,
        angle_deg,
        noise: params.noise,
        ridge_multiplier: 1.0,
    };
    let (x, privacy, utility) = synth_2d(&geo);
    // alternate samples into train and test; cells are interleaved already
    let n = x.rows();
    let train_idx: Vec<usize> = (0..n).step_by(2).collect();
    let test_idx: Vec<usize> = (1..n).step_by(2).collect();
    let pick = |idx: &[usize], v: &[usize]| -> Vec<usize> { idx.iter().map(|&i| v[i]).collect() };
    let xtr = x.select_rows(&train_idx);
    let xte = x.select_rows(&test_idx);
    let (ptr, pte) = (pick(&train_idx, &privacy), pick(&test_idx, &privacy));
    let (utr, ute) = (pick(&train_idx, &utility), pick(&test_idx, &utility));

    let trace = total_scatter_trace(&xtr);
    let ridge = trace / 2.0;
    let c = params.svm_cost;

    let score = |fit_y: &[usize], noise_only: bool, eval_tr: &[usize], eval_te: &[usize]| -> Result<f64> {
        let model = fit_rdca(&xtr, fit_y, ridge)?;
        let sub = if noise_only {
            model.noise_subspace()
        } else {
            model.full_projection()
        };
        let ztr = project(&xtr, &sub)?;
        let zte = project(&xte, &sub)?;
        let svm = train_linear_svm(&ztr, eval_tr, c)?;
        accuracy(&predict(&svm, &zte)?, eval_te)
    };

    let utility_before = score(&utr, false, &utr, &ute)?;
    let privacy_before = score(&ptr, false, &ptr, &pte)?;
    let utility_after = score(&ptr, true, &utr, &ute)?;
    let privacy_after = score(&ptr, true, &ptr, &pte)?;

    let label = |classes: &[usize]| {
        Label::new("l", classes.to_vec(), vec!["0".into(), "1".into()]).expect("binary label")
    };
    let (_, utility_random) = random_guess_accuracy(&label(&utr));
    let (_, privacy_random) = random_guess_accuracy(&label(&ptr));

    Ok(TradeoffPoint {
        angle_deg,
        utility_before,
        utility_after,
        privacy_before,
        privacy_after,
        utility_random,
        privacy_random,
    })
}

/// Sweep the angle between the utility and privacy directions and report the
/// four accuracies at each step. At 90 degrees desensitization is free; as
/// the directions align, protecting privacy costs utility.
pub fn tradeoff_curve(params: &TradeoffParams, steps: usize) -> Result<TradeoffCurve> {
    let steps = steps.clamp(2, 37);
    let mut points = Vec::with_capacity(steps);
    for k in 0..steps {
        let angle = 90.0 * k as f64 / (steps - 1) as f64;
        points.push(evaluate(params, angle)?);
    }
    Ok(TradeoffCurve { points })
}

/// One evaluated setting (used by the single-angle readout under the
/// geometry view).
pub fn tradeoff_at(params: &TradeoffParams) -> Result<TradeoffPoint> {
    evaluate(params, params.angle_deg)
}
