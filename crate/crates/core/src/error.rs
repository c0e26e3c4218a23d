use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("unsupported anisotropy: spacing {dx_x} along x differs from {dx_y} along y")]
    UnsupportedAnisotropy { dx_x: f64, dx_y: f64 },

    #[error("node set was not produced by a regular grid generator")]
    NotRegularGrid,

    #[error("invalid irregularity scale {0}: must be finite and non-negative")]
    InvalidPerturbation(f64),

    #[error("invalid cutoff radius {0}: must be finite and positive")]
    InvalidRadius(f64),

    #[error("singular weight: coincident nodes at distance {0}")]
    SingularWeight(f64),

    #[error("coincident node: zero offset in design row")]
    CoincidentNode,

    #[error("node {node}: {found} neighbors, at least {required} required")]
    InsufficientNeighbors {
        node: usize,
        found: usize,
        required: usize,
    },

    #[error("node {node}: degenerate neighborhood (normal matrix condition {condition:e})")]
    DegenerateNeighborhood { node: usize, condition: f64 },

    #[error("grid of {nx}x{ny} nodes is too small for the requested stencil")]
    InsufficientGrid { nx: usize, ny: usize },

    #[error("node {node}: finite-difference stencil leaves the grid")]
    OutsideGrid { node: usize },

    #[error("scheme {0:?} cannot be used for this derivative")]
    InvalidScheme(crate::regular_fd::FdScheme),

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("empty sample: no valid nodes are included in the RMS")]
    EmptySample,

    #[error("cannot take the logarithm of non-positive value {0}")]
    DegenerateLog(f64),

    #[error("invalid study configuration: {0}")]
    InvalidConfig(String),

    #[error("{method} at n = {n}: {source}")]
    Study {
        method: crate::analysis::Method,
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed node file, line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}
