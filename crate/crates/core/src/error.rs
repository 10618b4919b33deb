use thiserror::Error;

use crate::geometry::CoordinatePoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point {point} lies outside the domain of {metric}")]
    OutsideDomain {
        metric: &'static str,
        point: CoordinatePoint,
    },
    #[error("non-finite coordinate in {0:?}")]
    NonFinitePoint([f64; 4]),
    #[error("expected 4 coordinates, got {0}")]
    WrongDimension(usize),
    #[error("singular matrix (det = {det:e})")]
    Singular { det: f64 },
    #[error("metric is not diagonal")]
    NonDiagonal,
    #[error("zero diagonal metric component g_{{{0}{0}}}")]
    ZeroDiagonal(usize),
    #[error("invalid Lorentz plane ({0}, {1})")]
    InvalidPlane(usize, usize),
}
