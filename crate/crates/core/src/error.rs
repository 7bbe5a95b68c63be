use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid extent: {0}")]
    InvalidExtent(String),
    #[error("grid needs at least 2 cells per axis, got {n_time}x{n_space}")]
    GridTooSmall { n_time: usize, n_space: usize },
    #[error("inverted interval [{lo}, {hi}]")]
    InvertedInterval { lo: f64, hi: f64 },
    #[error("cell ({it}, {ix}) outside {n_time}x{n_space} grid")]
    CellOutOfBounds {
        it: usize,
        ix: usize,
        n_time: usize,
        n_space: usize,
    },
    #[error("time index {index} out of range 0..{len}")]
    TimeIndexOutOfBounds { index: usize, len: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("weight must have unit length (|w| = {norm})")]
    NonUnitWeight { norm: f64 },
    #[error("weight has {got} components, particle kind needs {expected}")]
    WeightDimension { expected: usize, got: usize },
    #[error("invalid mass for {kind}: {mass}")]
    InvalidMass { kind: &'static str, mass: f64 },
    #[error("photon weight must be transverse")]
    PhotonNotTransverse,
    #[error("photon packet wave vectors are not collinear")]
    PhotonNotCollinear,
    #[error("particle kinds differ within one mode set")]
    KindMismatch,
    #[error("empty mode list")]
    EmptyModes,
    #[error("{modes} modes but {coefficients} coefficients")]
    LengthMismatch { modes: usize, coefficients: usize },
    #[error("expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("mode with p1 = {p1} exceeds the band limit {limit}")]
    Aliased { p1: f64, limit: f64 },
    #[error("mode set is not orthonormal on the grid (max Gram deviation {deviation})")]
    NotOrthonormal { deviation: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("input must be normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("unsupported particle kind for this operation: {0}")]
    UnsupportedKind(&'static str),
    #[error("Courant condition violated: dt = {dt} > dx = {dx}")]
    Courant { dt: f64, dx: f64 },
    #[error("invalid boost velocity {0}")]
    InvalidBoost(f64),
    #[error("event ({t}, {x}) lies outside the box")]
    OutsideBox { t: f64, x: f64 },
    #[error("boosted region is truncated by the box")]
    CoverageTruncated,
    #[error("mode index {index} out of range 0..{len}")]
    ModeOutOfRange { index: usize, len: usize },
    #[error("creation exceeds the truncation N = {max}")]
    TruncationOverflow { max: usize },
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("{0} bins have fewer than 5 expected counts")]
    UnderfilledBins(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
