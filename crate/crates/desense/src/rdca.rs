//! Ridge discriminant component analysis: scatter matrices, the whitened
//! eigenproblem fit, signal/noise subspace extraction, and projection.
//!
//! The fit maximizes w'S_B w subject to w'(S_T + rho I)w = 1. Components come
//! back ordered by decreasing discriminant power; for an L-class label all
//! power lives in the first L-1 components, and the remaining M-L+1 span the
//! noise (desensitized) subspace where class centroids coincide.

mod persist;

pub use persist::{load_rdca_model, save_rdca_model};

use crate::error::{Error, Result};
use crate::numerics::{cholesky, matmul, solve_triangular, sym_eig, Matrix, TriangularSide};
use crate::parallel;

/// Between-class, within-class and total scatter of a labeled sample set.
#[derive(Debug, Clone)]
pub struct ScatterSet {
    pub s_b: Matrix,
    pub s_w: Matrix,
    pub s_t: Matrix,
    pub global_mean: Vec<f64>,
    /// L x M matrix of class means.
    pub class_means: Matrix,
    pub class_counts: Vec<usize>,
}

/// A fitted RDCA model: all M components in power order.
#[derive(Debug, Clone, PartialEq)]
pub struct RdcaModel {
    /// Training global mean; applied to any data before projection.
    pub mean: Vec<f64>,
    /// M x M matrix whose columns are the components w_1..w_M.
    pub components: Matrix,
    /// Discriminant powers, descending, aligned with the columns.
    pub powers: Vec<f64>,
    pub num_classes: usize,
    pub ridge: f64,
    /// Label the model was fitted against; set by pipelines, defaults empty.
    pub label_name: String,
    pub class_names: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceKind {
    Signal,
    Noise,
    Full,
}

impl SubspaceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SubspaceKind::Signal => "signal",
            SubspaceKind::Noise => "noise",
            SubspaceKind::Full => "full",
        }
    }
}

/// A deployable projection: a contiguous slice of a model's components plus
/// the centering mean.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceProjection {
    /// M x d basis, columns in power order.
    pub basis: Matrix,
    pub kind: SubspaceKind,
    pub mean: Vec<f64>,
    pub source_label: String,
}

impl SubspaceProjection {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

fn class_count(y: &[usize]) -> usize {
    y.iter().map(|&c| c + 1).max().unwrap_or(0)
}

/// Sum of squared distances to the column mean: trace(S_T) without forming
/// the scatter matrix. Used to resolve relative ridge grids.
pub fn total_scatter_trace(x: &Matrix) -> f64 {
    let (n, m) = x.shape();
    if n == 0 {
        return 0.0;
    }
    let mut mean = vec![0.0; m];
    for i in 0..n {
        for (j, v) in x.row(i).iter().enumerate() {
            mean[j] += v;
        }
    }
    for v in &mut mean {
        *v /= n as f64;
    }
    let mut total = 0.0;
    for i in 0..n {
        for (j, v) in x.row(i).iter().enumerate() {
            let d = v - mean[j];
            total += d * d;
        }
    }
    total
}

/// Between-class, within-class and total scatter.
///
/// S_B = sum_l N_l (mu_l - mu)(mu_l - mu)', S_W = sum of within-class outer
/// products, S_T = S_B + S_W. Symmetry is enforced by averaging with the
/// transpose.
pub fn compute_scatter(x: &Matrix, y: &[usize]) -> Result<ScatterSet> {
    let (n, m) = x.shape();
    if y.len() != n {
        return Err(Error::BadLabel(format!(
            "label has {} entries for {} samples",
            y.len(),
            n
        )));
    }
    if n < 2 {
        return Err(Error::BadLabel(format!(
            "scatter needs at least 2 samples, got {n}"
        )));
    }
    let num_classes = class_count(y);
    if num_classes < 2 {
        return Err(Error::BadLabel(
            "scatter needs at least 2 classes".to_string(),
        ));
    }
    let mut counts = vec![0usize; num_classes];
    for &c in y {
        counts[c] += 1;
    }
    if let Some(class) = counts.iter().position(|&c| c == 0) {
        return Err(Error::EmptyClass { class });
    }

    // global and class means, accumulated in sample order
    let mut global = vec![0.0; m];
    let mut class_means = Matrix::zeros(num_classes, m);
    for (i, &c) in y.iter().enumerate() {
        let row = x.row(i);
        let cm = class_means.row_mut(c);
        for j in 0..m {
            global[j] += row[j];
            cm[j] += row[j];
        }
    }
    for v in &mut global {
        *v /= n as f64;
    }
    for c in 0..num_classes {
        let count = counts[c] as f64;
        for v in class_means.row_mut(c) {
            *v /= count;
        }
    }

    // within-class scatter as a Gram matrix of class-centered data
    let mut centered_t = Matrix::zeros(m, n);
    for (i, &c) in y.iter().enumerate() {
        let row = x.row(i);
        let cm = class_means.row(c);
        for j in 0..m {
            centered_t.set(j, i, row[j] - cm[j]);
        }
    }
    let mut s_w = Matrix::zeros(m, m);
    {
        let ct = &centered_t;
        parallel::for_each_row(s_w.as_mut_slice(), m, |i, out| {
            let ri = ct.row(i);
            for (j, slot) in out.iter_mut().enumerate() {
                let rj = ct.row(j);
                let mut acc = 0.0;
                for k in 0..n {
                    acc += ri[k] * rj[k];
                }
                *slot = acc;
            }
        });
    }

    // between-class scatter from count-weighted mean deviations
    let mut deviations = Matrix::zeros(num_classes, m);
    for c in 0..num_classes {
        let cm = class_means.row(c);
        let dst = deviations.row_mut(c);
        for j in 0..m {
            dst[j] = cm[j] - global[j];
        }
    }
    let mut s_b = Matrix::zeros(m, m);
    {
        let dev = &deviations;
        let counts = &counts;
        parallel::for_each_row(s_b.as_mut_slice(), m, |i, out| {
            for c in 0..num_classes {
                let d = dev.row(c);
                let w = counts[c] as f64 * d[i];
                for (j, slot) in out.iter_mut().enumerate() {
                    *slot += w * d[j];
                }
            }
        });
    }

    let s_b = s_b.symmetrized();
    let s_w = s_w.symmetrized();
    let mut s_t = Matrix::zeros(m, m);
    for (dst, (a, b)) in s_t
        .as_mut_slice()
        .iter_mut()
        .zip(s_b.as_slice().iter().zip(s_w.as_slice()))
    {
        *dst = a + b;
    }

    s_b.check_finite("compute_scatter")?;
    s_w.check_finite("compute_scatter")?;
    Ok(ScatterSet {
        s_b,
        s_w,
        s_t,
        global_mean: global,
        class_means,
        class_counts: counts,
    })
}

/// Fit RDCA by whitening the ridge-regularized total scatter.
///
/// Algorithm: C = S_T + rho I, C = L L', K = L^-1 S_B L^-T (symmetrized),
/// eigendecompose K, map eigenvectors back through w = L^-T v. The resulting
/// components are C-orthonormal and ordered by decreasing discriminant power
/// lambda_i = w_i'S_B w_i / w_i'C w_i.
pub fn fit_rdca(x: &Matrix, y: &[usize], rho: f64) -> Result<RdcaModel> {
    if rho < 0.0 || rho.is_nan() {
        return Err(Error::Config(format!("ridge must be >= 0, got {rho}")));
    }
    let scatter = compute_scatter(x, y)?;
    fit_from_scatter(&scatter, rho)
}

/// Fit from precomputed scatter matrices.
pub fn fit_from_scatter(scatter: &ScatterSet, rho: f64) -> Result<RdcaModel> {
    let c = scatter.s_t.add_scaled_identity(rho);
    let l = match cholesky(&c) {
        Ok(l) => l,
        Err(Error::NotPositiveDefinite { index, .. }) => {
            return Err(Error::RidgeTooSmall {
                rho,
                pivot_index: index,
            });
        }
        Err(e) => return Err(e),
    };
    // K = L^-1 S_B L^-T
    let half = solve_triangular(&l, &scatter.s_b, TriangularSide::Lower)?;
    let k = solve_triangular(&l, &half.transpose(), TriangularSide::Lower)?;
    let k = k.symmetrized();
    let eig = sym_eig(&k)?;
    let components = solve_triangular(&l, &eig.vectors, TriangularSide::LowerTransposed)?;

    let num_classes = scatter.class_counts.len();
    Ok(RdcaModel {
        mean: scatter.global_mean.clone(),
        components,
        powers: eig.values,
        num_classes,
        ridge: rho,
        label_name: String::new(),
        class_names: (0..num_classes).map(|c| c.to_string()).collect(),
    })
}

impl RdcaModel {
    pub fn num_features(&self) -> usize {
        self.components.rows()
    }

    pub fn set_label_info(&mut self, name: impl Into<String>, class_names: Vec<String>) {
        self.label_name = name.into();
        self.class_names = class_names;
    }

    fn slice(&self, range: std::ops::Range<usize>, kind: SubspaceKind) -> SubspaceProjection {
        SubspaceProjection {
            basis: self.components.columns(range),
            kind,
            mean: self.mean.clone(),
            source_label: self.label_name.clone(),
        }
    }

    /// First L-1 components: all discriminant power for the fitted label.
    pub fn signal_subspace(&self) -> SubspaceProjection {
        self.slice(0..self.num_classes - 1, SubspaceKind::Signal)
    }

    /// Components L..M: the desensitized subspace where class centroids
    /// coincide.
    pub fn noise_subspace(&self) -> SubspaceProjection {
        self.slice(self.num_classes - 1..self.num_features(), SubspaceKind::Noise)
    }

    /// All M components; the "before desensitization" condition.
    pub fn full_projection(&self) -> SubspaceProjection {
        self.slice(0..self.num_features(), SubspaceKind::Full)
    }
}

/// Center rows by the subspace mean and project onto its basis.
pub fn project(x: &Matrix, sub: &SubspaceProjection) -> Result<Matrix> {
    if x.cols() != sub.basis.rows() {
        return Err(Error::DimensionMismatch {
            op: "project",
            lhs_rows: x.rows(),
            lhs_cols: x.cols(),
            rhs_rows: sub.basis.rows(),
            rhs_cols: sub.basis.cols(),
        });
    }
    let (n, m) = x.shape();
    let mut centered = x.clone();
    for i in 0..n {
        let row = centered.row_mut(i);
        for j in 0..m {
            row[j] -= sub.mean[j];
        }
    }
    matmul(&centered, &sub.basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_point() -> (Matrix, Vec<usize>) {
        let x = Matrix::from_vec(
            4,
            2,
            vec![1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0],
        )
        .unwrap();
        (x, vec![0, 0, 1, 1])
    }

    #[test]
    fn scatter_four_point_example() {
        let (x, y) = four_point();
        let s = compute_scatter(&x, &y).unwrap();
        assert_eq!(s.s_b.as_slice(), &[4.0, 0.0, 0.0, 0.0]);
        assert_eq!(s.s_w.as_slice(), &[0.0, 0.0, 0.0, 4.0]);
        assert_eq!(s.s_t.as_slice(), &[4.0, 0.0, 0.0, 4.0]);
        assert_eq!(s.global_mean, vec![0.0, 0.0]);
        assert_eq!(s.class_counts, vec![2, 2]);
    }

    #[test]
    fn scatter_identical_samples_is_zero() {
        let x = Matrix::from_vec(4, 2, vec![3.0, -1.0, 3.0, -1.0, 3.0, -1.0, 3.0, -1.0]).unwrap();
        let y = vec![0, 1, 0, 1];
        let s = compute_scatter(&x, &y).unwrap();
        assert_eq!(s.s_b.max_abs(), 0.0);
        assert_eq!(s.s_w.max_abs(), 0.0);
        assert_eq!(s.s_t.max_abs(), 0.0);
    }

    #[test]
    fn scatter_rejects_empty_class() {
        let x = Matrix::from_vec(3, 1, vec![0.0, 1.0, 2.0]).unwrap();
        let err = compute_scatter(&x, &[0, 0, 2]).unwrap_err();
        assert!(matches!(err, Error::EmptyClass { class: 1 }));
    }

    #[test]
    fn scatter_total_matches_direct_form() {
        // S_T from S_B + S_W must equal the centered second moment
        let x = Matrix::from_vec(
            5,
            3,
            vec![
                0.1, 1.2, -0.3, 2.0, 0.4, 0.9, -1.1, 0.0, 0.5, 0.7, -0.2, 1.4, 0.3, 0.8, -0.6,
            ],
        )
        .unwrap();
        let y = vec![0, 1, 0, 2, 1];
        let s = compute_scatter(&x, &y).unwrap();
        let (n, m) = x.shape();
        let mut direct = Matrix::zeros(m, m);
        for i in 0..n {
            for a in 0..m {
                for b in 0..m {
                    let da = x.get(i, a) - s.global_mean[a];
                    let db = x.get(i, b) - s.global_mean[b];
                    direct[(a, b)] += da * db;
                }
            }
        }
        let scale = direct.max_abs().max(1.0);
        for (got, want) in s.s_t.as_slice().iter().zip(direct.as_slice()) {
            assert!((got - want).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn fit_four_point_example() {
        let (x, y) = four_point();
        let model = fit_rdca(&x, &y, 1.0).unwrap();
        assert!((model.powers[0] - 0.8).abs() < 1e-12);
        assert!(model.powers[1].abs() < 1e-12);
        let inv_sqrt5 = 1.0 / 5.0_f64.sqrt();
        // signal component along axis 1, noise component along axis 2
        assert!((model.components.get(0, 0) - inv_sqrt5).abs() < 1e-12);
        assert!(model.components.get(1, 0).abs() < 1e-12);
        assert!(model.components.get(0, 1).abs() < 1e-12);
        assert!((model.components.get(1, 1) - inv_sqrt5).abs() < 1e-12);
    }

    #[test]
    fn fit_identical_samples_all_noise() {
        let x = Matrix::from_vec(4, 3, vec![1.0; 12]).unwrap();
        let y = vec![0, 1, 0, 1];
        let model = fit_rdca(&x, &y, 0.5).unwrap();
        for p in &model.powers {
            assert!(p.abs() < 1e-12);
        }
        assert_eq!(model.noise_subspace().dim(), 3 - 1);
    }

    #[test]
    fn fit_rejects_zero_ridge_on_singular_total_scatter() {
        // N <= M makes S_T singular
        let x = Matrix::from_vec(2, 3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        let y = vec![0, 1];
        match fit_rdca(&x, &y, 0.0).unwrap_err() {
            Error::RidgeTooSmall { .. } => {}
            other => panic!("unexpected error {other:?}"),
        }
        assert!(fit_rdca(&x, &y, 0.1).is_ok());
    }

    #[test]
    fn subspace_dimensions() {
        let (x, y) = four_point();
        let model = fit_rdca(&x, &y, 1.0).unwrap();
        assert_eq!(model.signal_subspace().dim(), 1);
        assert_eq!(model.noise_subspace().dim(), 1);
        assert_eq!(model.full_projection().dim(), 2);
        assert_eq!(model.signal_subspace().kind, SubspaceKind::Signal);
        assert_eq!(model.noise_subspace().kind, SubspaceKind::Noise);
    }

    #[test]
    fn project_identity_basis_is_no_op() {
        let x = Matrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let sub = SubspaceProjection {
            basis: Matrix::identity(2),
            kind: SubspaceKind::Full,
            mean: vec![0.0, 0.0],
            source_label: String::new(),
        };
        assert_eq!(project(&x, &sub).unwrap(), x);
    }

    #[test]
    fn project_four_point_noise_collapses_centroids() {
        let (x, y) = four_point();
        let model = fit_rdca(&x, &y, 1.0).unwrap();
        let z = project(&x, &model.noise_subspace()).unwrap();
        assert_eq!(z.shape(), (4, 1));
        // proportional to (1, -1, 1, -1)
        let base = z.get(0, 0);
        assert!(base > 0.0);
        let expect = [1.0, -1.0, 1.0, -1.0];
        for i in 0..4 {
            assert!((z.get(i, 0) - expect[i] * base).abs() < 1e-12);
        }
        // both class centroids at zero
        let c0 = 0.5 * (z.get(0, 0) + z.get(1, 0));
        let c1 = 0.5 * (z.get(2, 0) + z.get(3, 0));
        assert!(c0.abs() < 1e-12 && c1.abs() < 1e-12);
    }

    #[test]
    fn project_rejects_mismatch() {
        let (x, y) = four_point();
        let model = fit_rdca(&x, &y, 1.0).unwrap();
        let wide = Matrix::zeros(2, 5);
        assert!(project(&wide, &model.noise_subspace()).is_err());
    }

    #[test]
    fn signal_plus_noise_reconstructs_in_c_metric() {
        // W is C-orthonormal, so W^-1 = W'C and projection is invertible.
        let x = Matrix::from_vec(
            6,
            3,
            vec![
                1.0, 0.2, -0.5, 0.8, -0.3, 0.1, -0.9, 0.5, 0.4, 0.2, 1.1, -0.7, -0.4, -0.8, 0.9,
                0.6, 0.3, -0.2,
            ],
        )
        .unwrap();
        let y = vec![0, 1, 2, 0, 1, 2];
        let rho = 0.5;
        let model = fit_rdca(&x, &y, rho).unwrap();
        let scatter = compute_scatter(&x, &y).unwrap();
        let c = scatter.s_t.add_scaled_identity(rho);

        let z = project(&x, &model.full_projection()).unwrap();
        let back = matmul(&z, &matmul(&model.components.transpose(), &c).unwrap()).unwrap();
        for i in 0..x.rows() {
            for j in 0..x.cols() {
                let want = x.get(i, j) - model.mean[j];
                assert!((back.get(i, j) - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn ridge_only_shrinks_powers() {
        use rand_chacha::rand_core::{RngCore, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let (n, m, l) = (24, 6, 3);
            let mut data = Vec::with_capacity(n * m);
            for _ in 0..n * m {
                data.push((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5);
            }
            let x = Matrix::from_vec(n, m, data).unwrap();
            let y: Vec<usize> = (0..n).map(|i| i % l).collect();
            let small = fit_rdca(&x, &y, 0.05).unwrap();
            let large = fit_rdca(&x, &y, 0.5).unwrap();
            for (a, b) in large.powers.iter().zip(&small.powers) {
                assert!(a <= &(b + 1e-8), "ridge grew a power: {a} > {b}");
            }
        }
    }

    #[test]
    fn powers_rank_bound_on_random_data() {
        use rand_chacha::rand_core::{RngCore, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (n, m, l) = (40, 20, 5);
        let mut data = Vec::with_capacity(n * m);
        for _ in 0..n * m {
            data.push((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5);
        }
        let x = Matrix::from_vec(n, m, data).unwrap();
        let y: Vec<usize> = (0..n).map(|i| i % l).collect();
        let model = fit_rdca(&x, &y, 0.1).unwrap();
        let above = model.powers.iter().filter(|&&p| p > 1e-6).count();
        assert_eq!(above, l - 1);
        let below = model.powers.iter().filter(|&&p| p.abs() <= 1e-6).count();
        assert_eq!(below, m - (l - 1));
    }
}
