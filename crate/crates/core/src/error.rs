use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },

    #[error("vector has a kernel component of relative size {relative:.3e}")]
    KernelViolation { relative: f64 },

    #[error("zero query vector")]
    ZeroVector,

    #[error("solver stopped after {iterations} iterations with relative residual {residual:.3e}")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("eigenvalue iteration did not converge (residual {residual:.3e})")]
    EigenNonConvergence { residual: f64 },

    #[error("solve for sketch row {row} failed: {source}")]
    RowSolve {
        row: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },

    #[error("sketch transforms differ")]
    TransformMismatch,

    #[error("matrix of size {n} exceeds dense cap {cap}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {lambda_min:.3e})")]
    NotPsd { lambda_min: f64 },

    #[error("spectral radius {rho:.6} exceeds {limit:.6}")]
    SpectralRadius { rho: f64, limit: f64 },

    #[error("generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error("spectral function undefined at singular value {sigma:.3e}")]
    UndefinedSpectralValue { sigma: f64 },

    #[error("graph must be unweighted for this reduction")]
    WeightedInput,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
