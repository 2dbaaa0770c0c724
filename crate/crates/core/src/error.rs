use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not skew-Hermitian (residual {0:.3e})")]
    NotSkewHermitian(f64),

    #[error("not complex-linear: [r, J] residual {0:.3e}")]
    NotComplexLinear(f64),

    #[error("metric is not Hermitian positive definite: {0}")]
    InvalidMetric(String),

    #[error("bidegree overflow: ({p}, {q}) exceeds complex dimension {m}")]
    BidegreeOverflow { p: usize, q: usize, m: usize },

    #[error("degree out of range for the beta construction: p = {p}, m = {m} (need 1 <= p <= m - 1)")]
    DegreeOutOfRange { p: usize, m: usize },

    #[error("unknown model '{name}'; catalog: {}", catalog.join(", "))]
    UnknownModel { name: String, catalog: Vec<String> },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("singular metric at the evaluation point")]
    SingularMetric,

    #[error("point too close to the domain boundary (margin {margin:.3e} required)")]
    TooCloseToBoundary { margin: f64 },

    #[error("derivative order {0} unsupported")]
    UnsupportedOrder(usize),

    #[error("connection data evaluated at different points")]
    PointMismatch,

    #[error("algebra is not closed: close the algebra first")]
    NotClosed,

    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),

    #[error("degenerate sampler: {0}")]
    DegenerateSampler(String),

    #[error("torus grid too coarse: N = {0} (need N >= 3)")]
    GridTooCoarse(usize),

    #[error("curvature symmetry violated (residual {0:.3e})")]
    SymmetryViolation(f64),

    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("optimizer did not converge: {0}")]
    NotConverged(String),

    #[error("minimizer not certified (first-order residual {0:.3e})")]
    UncertifiedMinimizer(f64),

    #[error("hypothesis unverified: {0}")]
    HypothesisUnverified(String),

    #[error("zero form")]
    ZeroForm,

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
