use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::parallel;

/// Relative tolerance for the symmetry precondition of the factorizations.
pub(crate) const SYMMETRY_REL_TOL: f64 = 1e-9;

/// C = A * B with C[i,j] = sum_k A[i,k] * B[k,j], accumulated in ascending k
/// so the result is bit-identical regardless of thread count.
pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch {
            op: "matmul",
            lhs_rows: a.rows(),
            lhs_cols: a.cols(),
            rhs_rows: b.rows(),
            rhs_cols: b.cols(),
        });
    }
    let (m, k_dim, n) = (a.rows(), a.cols(), b.cols());
    let mut c = Matrix::zeros(m, n);
    parallel::for_each_row(c.as_mut_slice(), n.max(1), |i, out_row| {
        if n == 0 {
            return;
        }
        let a_row = a.row(i);
        for (k, &aik) in a_row.iter().enumerate().take(k_dim) {
            let b_row = b.row(k);
            for j in 0..n {
                out_row[j] += aik * b_row[j];
            }
        }
    });
    c.check_finite("matmul")?;
    Ok(c)
}

/// Lower-triangular Cholesky factor L with S = L * L^T.
///
/// Rejects non-symmetric input and reports the failing pivot index when S is
/// not positive definite (pivot at or below 1e-12 * trace(S)/n).
pub fn cholesky(s: &Matrix) -> Result<Matrix> {
    if !s.is_square() {
        return Err(Error::NotSquare {
            op: "cholesky",
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    if !s.is_symmetric(SYMMETRY_REL_TOL) {
        return Err(Error::NotSymmetric {
            op: "cholesky",
            max_asymmetry: s.max_asymmetry(),
        });
    }
    let n = s.rows();
    let pivot_tol = 1e-12 * s.trace().max(0.0) / n.max(1) as f64;
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut diag = s.get(j, j);
        for k in 0..j {
            diag -= l.get(j, k) * l.get(j, k);
        }
        if diag <= pivot_tol {
            return Err(Error::NotPositiveDefinite {
                index: j,
                pivot: diag,
            });
        }
        let ljj = diag.sqrt();
        l.set(j, j, ljj);
        for i in (j + 1)..n {
            let mut v = s.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, v / ljj);
        }
    }
    l.check_finite("cholesky")?;
    Ok(l)
}

/// Which system `solve_triangular` solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangularSide {
    /// L * X = B by forward substitution.
    Lower,
    /// L^T * X = B by backward substitution.
    LowerTransposed,
}

/// Solve a triangular system against a block of right-hand sides. Entries
/// above the diagonal of `l` are ignored.
pub fn solve_triangular(l: &Matrix, b: &Matrix, side: TriangularSide) -> Result<Matrix> {
    if !l.is_square() || l.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            op: "solve_triangular",
            lhs_rows: l.rows(),
            lhs_cols: l.cols(),
            rhs_rows: b.rows(),
            rhs_cols: b.cols(),
        });
    }
    let n = l.rows();
    for i in 0..n {
        if l.get(i, i) == 0.0 {
            return Err(Error::SingularSystem { index: i });
        }
    }
    let m = b.cols();
    let mut x = b.clone();
    match side {
        TriangularSide::Lower => {
            for i in 0..n {
                for k in 0..i {
                    let lik = l.get(i, k);
                    if lik != 0.0 {
                        let (head, tail) = x.as_mut_slice().split_at_mut(i * m);
                        let xk = &head[k * m..(k + 1) * m];
                        let xi = &mut tail[..m];
                        for j in 0..m {
                            xi[j] -= lik * xk[j];
                        }
                    }
                }
                let inv = 1.0 / l.get(i, i);
                for v in x.row_mut(i) {
                    *v *= inv;
                }
            }
        }
        TriangularSide::LowerTransposed => {
            for i in (0..n).rev() {
                for k in (i + 1)..n {
                    let lki = l.get(k, i);
                    if lki != 0.0 {
                        let (head, tail) = x.as_mut_slice().split_at_mut(k * m);
                        let xi = &mut head[i * m..(i + 1) * m];
                        let xk = &tail[..m];
                        for j in 0..m {
                            xi[j] -= lki * xk[j];
                        }
                    }
                }
                let inv = 1.0 / l.get(i, i);
                for v in x.row_mut(i) {
                    *v *= inv;
                }
            }
        }
    }
    x.check_finite("solve_triangular")?;
    Ok(x)
}
