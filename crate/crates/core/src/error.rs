use thiserror::Error;

/// Errors raised by grid construction, dynamics, diagnostics and probes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode count {modes} along axis {axis} is odd")]
    OddModeCount { axis: usize, modes: usize },
    #[error("mode count along axis {axis} must be positive")]
    ZeroModeCount { axis: usize },
    #[error("period along axis {axis} is not a positive finite number")]
    NonPositivePeriod { axis: usize },
    #[error("dimension {0} is not supported (expected 2, 3 or 4)")]
    UnsupportedDimension(usize),
    #[error("expected {expected} directions/modes, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("grid has no truncated-Euclidean direction")]
    NoEuclideanDirection,
    #[error("no lattice frequency satisfies |xi| >= {n}")]
    EmptyRange { n: f64 },
    #[error("boundary mass fraction {fraction:.3e} exceeds {threshold:.1e} at t = {t}")]
    BoundaryMassExceeded { t: f64, fraction: f64, threshold: f64 },
    #[error("non-finite amplitude encountered at t = {t}")]
    NonFinite { t: f64 },
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("trajectory samples do not cover the window [{t0}, {t1}]")]
    WindowNotCovered { t0: f64, t1: f64 },
    #[error("sample spacing {dt:.3e} too coarse: dt * xi_max^2 = {product:.3} > 0.5")]
    InsufficientSampling { dt: f64, product: f64 },
    #[error("frequency shell around N = {n} contains no lattice point")]
    EmptyShell { n: f64 },
    #[error("lattice resolves |xi| <= {available:.3} but {required:.3} is required")]
    UnderResolved { required: f64, available: f64 },
    #[error("s = {s} is at or below the 5/6 threshold")]
    SubThreshold { s: f64 },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
