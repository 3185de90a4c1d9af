use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("automorphism parameter must lie in the open unit disc (|c| = {0})")]
    DegenerateMobius(f64),
    #[error("point {0} is not in the open unit disc")]
    OutsideDisc(String),
    #[error("strip map is undefined at the branch points ±1")]
    BranchPoint,
    #[error("arc length {0} outside [0, 2π]")]
    InvalidArc(f64),
    #[error("certificate coefficients vanish identically")]
    ZeroCertificate,
    #[error("circle symbol changes sign (a = {a}, b = {b})")]
    SignChangingSymbol { a: String, b: f64 },
    #[error("strip certificate requires |b| < 2|a| (a = {a}, b = {b})")]
    DegenerateStripCertificate { a: String, b: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("quadrature did not converge after {nodes} nodes (last change {change:e})")]
    Quadrature { nodes: usize, change: f64 },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("inadmissible geodesic: {0}")]
    Inadmissible(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
