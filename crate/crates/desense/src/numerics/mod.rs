//! Dense linear-algebra kernels with explicit numerical contracts.
//!
//! All kernels are pure functions over immutable inputs and deterministic:
//! identical inputs produce bit-identical outputs, independent of thread
//! count.

mod eigen;
mod factor;
mod matrix;

pub use eigen::{sym_eig, SymEig, MAX_SWEEPS};
pub use factor::{cholesky, matmul, solve_triangular, TriangularSide};
pub use matrix::Matrix;
