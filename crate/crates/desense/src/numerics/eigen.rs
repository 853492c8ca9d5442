use super::factor::SYMMETRY_REL_TOL;
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Iteration cap for the cyclic Jacobi sweeps.
pub const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEig {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `values`.
    pub vectors: Matrix,
    /// Sweeps the solver actually ran.
    pub sweeps: usize,
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// The sweep order is fixed, eigenvalues come back sorted descending (ties
/// keep sweep order), and each eigenvector's sign is fixed so its
/// largest-magnitude entry is positive (ties to the lower index). Identical
/// inputs therefore produce bit-identical outputs.
pub fn sym_eig(s: &Matrix) -> Result<SymEig> {
    if !s.is_square() {
        return Err(Error::NotSquare {
            op: "sym_eig",
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    if !s.is_symmetric(SYMMETRY_REL_TOL) {
        return Err(Error::NotSymmetric {
            op: "sym_eig",
            max_asymmetry: s.max_asymmetry(),
        });
    }

    let n = s.rows();
    let mut a = s.symmetrized();
    let mut v = Matrix::identity(n);
    let mut d: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    let mut sweeps_done = 0;
    let mut converged = n < 2;
    for sweep in 0..MAX_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).abs();
            }
        }
        if off == 0.0 {
            converged = true;
            break;
        }
        sweeps_done = sweep + 1;

        // During the first sweeps only rotate the larger elements.
        let thresh = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };

        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let g = 100.0 * apq.abs();
                // Skip (and zero) elements that are negligible against both
                // diagonal entries once the process has settled.
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a.set(p, q, 0.0);
                    continue;
                }
                if apq.abs() <= thresh {
                    continue;
                }

                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let mut t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        t = -t;
                    }
                    t
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                let tau = sn / (1.0 + c);
                let htm = t * apq;
                z[p] -= htm;
                z[q] += htm;
                d[p] -= htm;
                d[q] += htm;
                a.set(p, q, 0.0);

                let rotate = |m: &mut Matrix, i1: usize, j1: usize, i2: usize, j2: usize| {
                    let g = m.get(i1, j1);
                    let h = m.get(i2, j2);
                    m.set(i1, j1, g - sn * (h + g * tau));
                    m.set(i2, j2, h + sn * (g - h * tau));
                };
                for j in 0..p {
                    rotate(&mut a, j, p, j, q);
                }
                for j in (p + 1)..q {
                    rotate(&mut a, p, j, j, q);
                }
                for j in (q + 1)..n {
                    rotate(&mut a, p, j, q, j);
                }
                for j in 0..n {
                    rotate(&mut v, j, p, j, q);
                }
            }
        }

        for p in 0..n {
            b[p] += z[p];
            d[p] = b[p];
            z[p] = 0.0;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    // Sort descending; stable so equal eigenvalues keep sweep order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].partial_cmp(&d[i]).unwrap());

    let mut values = Vec::with_capacity(n);
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(d[src]);
        // Sign rule: largest-magnitude entry positive, ties to the lower index.
        let mut pivot = 0;
        let mut best = -1.0;
        for i in 0..n {
            let mag = v.get(i, src).abs();
            if mag > best {
                best = mag;
                pivot = i;
            }
        }
        let flip = if v.get(pivot, src) < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors.set(i, dst, flip * v.get(i, src));
        }
    }

    vectors.check_finite("sym_eig")?;
    for val in &values {
        if !val.is_finite() {
            return Err(Error::NonFinite {
                op: "sym_eig",
                row: 0,
                col: 0,
            });
        }
    }
    Ok(SymEig {
        values,
        vectors,
        sweeps: sweeps_done,
    })
}
