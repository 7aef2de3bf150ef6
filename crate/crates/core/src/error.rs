use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a polygon needs n >= 3 sides (got {0})")]
    TooFewSides(usize),
    #[error("circumradius must be positive and finite (got {0})")]
    BadRadius(f64),
    #[error("edge index {index} out of range for n = {n}")]
    EdgeIndex { index: usize, n: usize },
    #[error("point {0} lies outside the polygon")]
    Outside(crate::geometry::PlanePoint),
    #[error("points lie on the same face; a crossing needs opposite faces")]
    SameFace,
    #[error("samples per edge must be at least 2 (got {0})")]
    TooFewSamples(usize),
    #[error("over-under step must satisfy 1 <= step <= n/2 (got step {step} for n = {n})")]
    InvalidStep { step: usize, n: usize },
    #[error("the period-4 family lives on the doubled triangle; got n = {0}")]
    NotTriangle(usize),
    #[error("offset u = {u} outside the admissible interval ({lo}, {hi})")]
    InadmissibleOffset { u: f64, lo: f64, hi: f64 },
    #[error("trace cannot start at a vertex")]
    StartAtVertex,
    #[error("launch direction is parallel to the starting edge")]
    ParallelLaunch,
    #[error("launch direction points out of the face at an edge start")]
    OutwardLaunch,
    #[error("max_segments must be at least 1")]
    NoSegments,
    #[error("k must be at least 2 (got {0})")]
    InvalidK(usize),
    #[error("grid of {grid} points is too coarse; need at least {min}")]
    GridTooSmall { grid: usize, min: usize },
    #[error("tolerance must be non-negative and finite (got {0})")]
    BadTolerance(f64),
    #[error("curve is not closed")]
    NotClosed,
    #[error("curve is not an over-under curve")]
    NotOverUnder,
    #[error("parameter t = {0} sits at a junction; the shortcut triangles degenerate")]
    AtJunction(f64),
    #[error("curve is not the midpoint period-4 curve on the doubled triangle")]
    NotMidpointPeriodFour,
    #[error("period must be an even integer >= 2 (got {0})")]
    InvalidPeriod(usize),
    #[error("seed grid {nu}x{ntheta} is too coarse; need at least 16x16")]
    SeedGridTooCoarse { nu: usize, ntheta: usize },
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("curves do not share one polygon")]
    MixedSpecs,
    #[error("unsupported schema_version {0}; expected 1")]
    Schema(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
