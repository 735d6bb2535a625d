use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FinslerError {
    #[error("point {point:?} lies outside the chart")]
    DomainError { point: Vec<f64> },
    #[error("tangent vector is zero")]
    ZeroVector,
    #[error("fundamental tensor is not positive-definite (eigenvalues in [{min:e}, {max:e}])")]
    NotConvex { min: f64, max: f64 },
    #[error("matrix is singular to working precision")]
    SingularMetric,
    #[error("Ricci tensor is not negative-definite (largest eigenvalue {max_eig:e})")]
    NotNegativeDefinite { max_eig: f64 },
    #[error("geodesic left the chart at s = {s}")]
    ChartExit { s: f64 },
    #[error("unit-speed drift {drift:e} exceeds tolerance; reduce the step")]
    StepTooLarge { drift: f64 },
    #[error("derivative vanishes (|p'| = {dp:e}); Schwarzian undefined")]
    CriticalPoint { dp: f64 },
    #[error("sample grid mismatch: {0}")]
    GridMismatch(String),
    #[error("degenerate coefficients: determinant {det:e}")]
    DegenerateCoefficients { det: f64 },
    #[error("equation is not nonoscillatory in the requested direction")]
    NotNonoscillatory,
    #[error("interval cover misses ({from}, {to})")]
    CoverageGap { from: f64, to: f64 },
    #[error("chain endpoints do not match at segment {segment}: gap {gap:e}")]
    BrokenChain { segment: usize, gap: f64 },
    #[error("projective parameter does not sweep the real line around the requested points")]
    ParameterNotGlobal,
    #[error("no geodesic found: {0}")]
    NoGeodesicFound(String),
    #[error("invalid metric descriptor: {0}")]
    InvalidDescriptor(String),
}

pub type Result<T, E = FinslerError> = std::result::Result<T, E>;
