//! Shared test oracles and fixture builders. Everything here is an
//! independent route to the quantities the library computes: eigenvalues by
//! inertia bisection on determinant pivots, Cholesky in outer-product form,
//! and the SVM dual by exhaustive active-set enumeration.

#![allow(dead_code)]

use desense::numerics::Matrix;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

pub fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut s = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = uniform(rng);
            s.set(i, j, v);
            s.set(j, i, v);
        }
    }
    s
}

pub fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    // A'A + n*I is comfortably positive definite
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, uniform(rng));
        }
    }
    let mut s = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += a.get(k, i) * a.get(k, j);
            }
            s.set(i, j, acc + if i == j { n as f64 } else { 0.0 });
        }
    }
    s
}

/// Labeled random classification data with every class populated.
pub fn random_problem(
    n: usize,
    m: usize,
    num_classes: usize,
    rng: &mut ChaCha8Rng,
) -> (Matrix, Vec<usize>) {
    let mut data = Vec::with_capacity(n * m);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % num_classes;
        y.push(class);
        for j in 0..m {
            // class-dependent shift keeps S_B generic
            let shift = (class as f64 + 1.0) * 0.7 * ((j % 3) as f64 - 1.0);
            data.push(uniform(rng) + shift);
        }
    }
    (Matrix::from_vec(n, m, data).unwrap(), y)
}

/// Number of eigenvalues of S strictly below `lambda`, by counting negative
/// pivots of the LDL' elimination of S - lambda I. Retries with a tiny nudge
/// when elimination breaks down on a zero pivot.
pub fn count_eigs_below(s: &Matrix, lambda: f64) -> usize {
    let n = s.rows();
    let scale = s.max_abs().max(1.0);
    let mut shift = lambda;
    'retry: for attempt in 0..40 {
        let mut a = s.clone();
        for i in 0..n {
            let v = a.get(i, i) - shift;
            a.set(i, i, v);
        }
        let mut negatives = 0;
        for k in 0..n {
            let pivot = a.get(k, k);
            if pivot.abs() <= 1e-14 * scale {
                // shift off the breakdown point and start over
                shift = lambda + (attempt as f64 + 1.0) * 1e-12 * scale;
                continue 'retry;
            }
            if pivot < 0.0 {
                negatives += 1;
            }
            for i in (k + 1)..n {
                let factor = a.get(i, k) / pivot;
                for j in k..n {
                    let v = a.get(i, j) - factor * a.get(k, j);
                    a.set(i, j, v);
                }
            }
        }
        return negatives;
    }
    panic!("inertia count failed to escape zero pivots");
}

/// All eigenvalues of a symmetric matrix, descending, by bisection on the
/// inertia count. Independent of the production Jacobi path.
pub fn eig_oracle(s: &Matrix, tol: f64) -> Vec<f64> {
    let n = s.rows();
    // Gershgorin bound
    let mut radius: f64 = 0.0;
    for i in 0..n {
        let row_sum: f64 = (0..n).map(|j| s.get(i, j).abs()).sum();
        radius = radius.max(row_sum);
    }
    radius += 1.0;

    let mut out = Vec::with_capacity(n);
    // k-th smallest eigenvalue: the infimum of { t : count_below(t) >= k+1 }
    for k in 0..n {
        let mut lo = -radius;
        let mut hi = radius;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if count_eigs_below(s, mid) >= k + 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out.reverse();
    out
}

/// Inertia of (S_B - lambda C) with C positive definite equals the inertia of
/// the whitened pencil, so the same bisection yields the generalized
/// eigenvalues of (S_B, C).
pub fn generalized_eig_count_below(s_b: &Matrix, c: &Matrix, lambda: f64) -> usize {
    let n = s_b.rows();
    let mut pencil = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            pencil.set(i, j, s_b.get(i, j) - lambda * c.get(i, j));
        }
    }
    count_eigs_below(&pencil, 0.0)
}

/// Generalized eigenvalues of (S_B, C), descending. `hi` must exceed the
/// largest one; for ratios of PSD scatter to a dominating C, 1 + slack works.
pub fn generalized_eig_oracle(s_b: &Matrix, c: &Matrix, lo: f64, hi: f64, tol: f64) -> Vec<f64> {
    let n = s_b.rows();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut a = lo;
        let mut b = hi;
        while b - a > tol {
            let mid = 0.5 * (a + b);
            if generalized_eig_count_below(s_b, c, mid) >= k + 1 {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    out.reverse();
    out
}

/// Textbook outer-product Cholesky: eliminates one column at a time against
/// the trailing submatrix. Different elimination order from the library's
/// inner-product form.
pub fn cholesky_oracle(s: &Matrix) -> Option<Matrix> {
    let n = s.rows();
    let mut a = s.clone();
    let mut l = Matrix::zeros(n, n);
    for k in 0..n {
        let pivot = a.get(k, k);
        if pivot <= 0.0 {
            return None;
        }
        let d = pivot.sqrt();
        l.set(k, k, d);
        for i in (k + 1)..n {
            l.set(i, k, a.get(i, k) / d);
        }
        for i in (k + 1)..n {
            for j in (k + 1)..=i {
                let v = a.get(i, j) - l.get(i, k) * l.get(j, k);
                a.set(i, j, v);
                a.set(j, i, v);
            }
        }
    }
    Some(l)
}

/// Exhaustive active-set solution of min 1/2 a'Qa - sum(a), 0 <= a <= C,
/// where Q_ij = y_i y_j (x_i.x_j + 1). Enumerates all 3^n bound patterns,
/// solves the free block exactly, and keeps the best KKT-feasible point.
pub fn brute_force_box_qp(x: &Matrix, ybin: &[f64], c: f64) -> (Vec<f64>, f64) {
    let n = x.rows();
    let d = x.cols();
    let mut q = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut dot = 1.0;
            for k in 0..d {
                dot += x.get(i, k) * x.get(j, k);
            }
            q[i][j] = ybin[i] * ybin[j] * dot;
        }
    }
    let objective = |alpha: &[f64]| -> f64 {
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += alpha[i] * q[i][j] * alpha[j];
            }
        }
        0.5 * quad - alpha.iter().sum::<f64>()
    };

    let mut best: Option<(Vec<f64>, f64)> = None;
    let patterns = 3usize.pow(n as u32);
    'pattern: for code in 0..patterns {
        // digit 0: at lower bound, 1: at upper bound, 2: free
        let mut digits = Vec::with_capacity(n);
        let mut rem = code;
        for _ in 0..n {
            digits.push(rem % 3);
            rem /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| digits[i] == 2).collect();
        let mut alpha = vec![0.0; n];
        for i in 0..n {
            if digits[i] == 1 {
                alpha[i] = c;
            }
        }

        if !free.is_empty() {
            // solve Q_FF a_F = 1 - Q_FU * C
            let f = free.len();
            let mut mat = vec![vec![0.0; f + 1]; f];
            for (r, &i) in free.iter().enumerate() {
                for (cc, &j) in free.iter().enumerate() {
                    mat[r][cc] = q[i][j];
                }
                let mut rhs = 1.0;
                for j in 0..n {
                    if digits[j] == 1 {
                        rhs -= q[i][j] * c;
                    }
                }
                mat[r][f] = rhs;
            }
            // Gaussian elimination with partial pivoting
            for col in 0..f {
                let mut piv = col;
                for r in (col + 1)..f {
                    if mat[r][col].abs() > mat[piv][col].abs() {
                        piv = r;
                    }
                }
                if mat[piv][col].abs() < 1e-12 {
                    continue 'pattern; // singular free block
                }
                mat.swap(col, piv);
                for r in (col + 1)..f {
                    let factor = mat[r][col] / mat[col][col];
                    for cc in col..=f {
                        mat[r][cc] -= factor * mat[col][cc];
                    }
                }
            }
            for r in (0..f).rev() {
                let mut v = mat[r][f];
                for cc in (r + 1)..f {
                    v -= mat[r][cc] * mat[cc][f];
                }
                mat[r][f] = v / mat[r][r];
            }
            for (r, &i) in free.iter().enumerate() {
                alpha[i] = mat[r][f];
                if !(-1e-9..=c + 1e-9).contains(&alpha[i]) {
                    continue 'pattern;
                }
                alpha[i] = alpha[i].clamp(0.0, c);
            }
        }

        // KKT signs at the bounds
        for i in 0..n {
            let mut g = -1.0;
            for j in 0..n {
                g += q[i][j] * alpha[j];
            }
            match digits[i] {
                0 if g < -1e-7 => continue 'pattern,
                1 if g > 1e-7 => continue 'pattern,
                _ => {}
            }
        }

        let obj = objective(&alpha);
        if best.as_ref().is_none_or(|(_, b)| obj < *b) {
            best = Some((alpha, obj));
        }
    }
    best.expect("box QP always has a KKT point")
}

/// Write a HAR-layout directory with synthetic separable data so the full
/// pipeline can run without the published dataset.
pub fn write_synthetic_har(
    root: &std::path::Path,
    train_per_cell: usize,
    test_per_cell: usize,
    num_features: usize,
    num_activities: usize,
    num_subjects: usize,
    seed: u64,
) {
    use std::fmt::Write as _;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (tag, per_cell) in [("train", train_per_cell), ("test", test_per_cell)] {
        let dir = root.join(tag);
        std::fs::create_dir_all(&dir).unwrap();
        let mut x = String::new();
        let mut y = String::new();
        let mut subj = String::new();
        for activity in 0..num_activities {
            for subject in 0..num_subjects {
                for _ in 0..per_cell {
                    for j in 0..num_features {
                        // activity drives the first features, subject the next
                        let a_shift = if j < 3 {
                            1.5 * activity as f64 * ((j + 1) as f64)
                        } else {
                            0.0
                        };
                        let s_shift = if (3..6).contains(&j) {
                            1.2 * subject as f64 * ((j - 2) as f64)
                        } else {
                            0.0
                        };
                        let noise = 0.3 * uniform(&mut rng);
                        write!(x, "{:.6} ", a_shift + s_shift + noise).unwrap();
                    }
                    x.push('\n');
                    writeln!(y, "{}", activity + 1).unwrap();
                    writeln!(subj, "{}", subject + 1).unwrap();
                }
            }
        }
        std::fs::write(dir.join(format!("X_{tag}.txt")), x).unwrap();
        std::fs::write(dir.join(format!("y_{tag}.txt")), y).unwrap();
        std::fs::write(dir.join(format!("subject_{tag}.txt")), subj).unwrap();
    }
}
