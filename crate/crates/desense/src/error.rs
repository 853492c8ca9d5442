use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Coarse failure class, used by callers (e.g. the CLI) to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Data,
    Numerical,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{op}: dimension mismatch, left is {lhs_rows}x{lhs_cols}, right is {rhs_rows}x{rhs_cols}")]
    DimensionMismatch {
        op: &'static str,
        lhs_rows: usize,
        lhs_cols: usize,
        rhs_rows: usize,
        rhs_cols: usize,
    },

    #[error("{op}: matrix must be square, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("{op}: matrix is not symmetric, max |S[i,j]-S[j,i]| = {max_asymmetry:e}")]
    NotSymmetric {
        op: &'static str,
        max_asymmetry: f64,
    },

    #[error("matrix is not positive definite: pivot {index} = {pivot:e}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("singular triangular system: zero diagonal entry at index {index}")]
    SingularSystem { index: usize },

    #[error("jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("{op}: non-finite value produced at entry ({row},{col})")]
    NonFinite {
        op: &'static str,
        row: usize,
        col: usize,
    },

    #[error("ridge {rho:e} too small: regularized total scatter is not positive definite at pivot {pivot_index}; increase the ridge parameter")]
    RidgeTooSmall { rho: f64, pivot_index: usize },

    #[error("missing file: {path}")]
    MissingFile { path: PathBuf },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("no PGM files found under {dir}")]
    NoPgmFiles { dir: PathBuf },

    #[error("class {class} has no samples")]
    EmptyClass { class: usize },

    #[error("invalid label data: {0}")]
    BadLabel(String),

    #[error("stratified split: class {class} of size {size} leaves an empty side at test fraction {fraction}")]
    SplitImpossible {
        class: usize,
        size: usize,
        fraction: f64,
    },

    #[error("cross-validation: cannot build {folds} stratified folds, smallest class has {smallest} samples")]
    FoldConstruction { folds: usize, smallest: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown experiment {name:?}; valid names: {valid}")]
    UnknownExperiment { name: String, valid: String },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wrap an error with experiment/pipeline context.
    pub fn with_context(self, context: impl Into<String>) -> Error {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config(_) | Error::UnknownExperiment { .. } => ErrorCategory::Config,
            Error::MissingFile { .. }
            | Error::Io { .. }
            | Error::Parse { .. }
            | Error::NoPgmFiles { .. }
            | Error::BadLabel(_)
            | Error::EmptyClass { .. }
            | Error::SplitImpossible { .. } => ErrorCategory::Data,
            Error::Context { source, .. } => source.category(),
            _ => ErrorCategory::Numerical,
        }
    }
}
