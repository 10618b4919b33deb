//! Numerical audit of the tetrad postulate and of the claimed proportionality
//! `box q^a_lambda = R q^a_lambda` on a small catalog of 4-dimensional spacetimes.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: coordinate points, the metric catalog, inverse metrics.
//! * [`calculus`]: Richardson-extrapolated finite differences and Christoffel symbols.
//! * [`frames`]: tetrads, local Lorentz transformations, the spin connection
//!   solved from the tetrad postulate, and the postulate residual.
//! * [`audit`]: the wave operator on the tetrad, the connection form of its
//!   right-hand side, the 16 per-component ratios, best-fit scalar and trace checks.

#![allow(clippy::needless_range_loop)]

pub mod audit;
pub mod calculus;
pub mod error;
pub mod frames;
pub mod geometry;

pub use audit::{audit, AuditOptions, AuditReport, Variant};
pub use calculus::{christoffel, partial_derivative, second_partial, ChristoffelField, Linear, Step};
pub use error::{Error, Result};
pub use frames::{
    diagonal_tetrad, inverse_tetrad, lorentz_transform_tetrad, spin_connection, tetrad_postulate_residual, Rapidity,
    SpinConnection, Tetrad, TetradKind,
};
pub use geometry::{catalog_lookup, inverse_metric, Chart, CoordinatePoint, FrameMetric, MetricSpec};

/// A rank-3 array of components, `[i][j][k]`.
pub type Rank3 = [[[f64; 4]; 4]; 4];

pub(crate) fn max_abs_rank3(a: &Rank3) -> f64 {
    a.iter().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
}
