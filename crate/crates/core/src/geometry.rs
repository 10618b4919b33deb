//! Coordinate points, the metric catalog and metric evaluation.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Rank3;

/// Horizon margin for Schwarzschild: the chart starts at `r > 2M(1 + EPS_HORIZON)`.
pub const EPS_HORIZON: f64 = 1e-3;
/// Polar margin for Schwarzschild and the FLRW big-bang margin.
pub const EPS_CHART: f64 = 1e-2;

/// Symmetry tolerance for metric components.
pub const SYMMETRY_TOL: f64 = 1e-14;
/// Minimum `|det g|` inside a catalog chart.
pub const DET_FLOOR: f64 = 1e-12;

/// Metric signature `(+,-,-,-)`.
pub const SIGNATURE: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    /// `(t, x, y, z)`
    Cartesian,
    /// `(t, r, theta, phi)`
    Spherical,
}

impl Chart {
    pub fn name(self) -> &'static str {
        match self {
            Chart::Cartesian => "cartesian",
            Chart::Spherical => "spherical",
        }
    }

    pub fn coordinate_names(self) -> [&'static str; 4] {
        match self {
            Chart::Cartesian => ["t", "x", "y", "z"],
            Chart::Spherical => ["t", "r", "theta", "phi"],
        }
    }

    /// Index of a coordinate by name (`r`, `theta`, ...) or by `x0`..`x3`.
    pub fn coordinate_index(self, name: &str) -> Option<usize> {
        if let Some(i) = self.coordinate_names().iter().position(|n| *n == name) {
            return Some(i);
        }
        match name {
            "x0" => Some(0),
            "x1" => Some(1),
            "x2" => Some(2),
            "x3" => Some(3),
            _ => None,
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A point in a 4-dimensional chart. Coordinates are always finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordinatePoint {
    pub chart: Chart,
    pub x: [f64; 4],
}

impl CoordinatePoint {
    pub fn new(chart: Chart, x: [f64; 4]) -> Result<Self> {
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinitePoint(x));
        }
        Ok(Self { chart, x })
    }

    /// Builds a point from a slice, which must hold exactly four coordinates.
    pub fn from_slice(chart: Chart, x: &[f64]) -> Result<Self> {
        let x: [f64; 4] = x.try_into().map_err(|_| Error::WrongDimension(x.len()))?;
        Self::new(chart, x)
    }

    /// The point displaced by `delta` along coordinate `mu`.
    pub fn shifted(&self, mu: usize, delta: f64) -> Self {
        let mut x = self.x;
        x[mu] += delta;
        Self { chart: self.chart, x }
    }

    pub fn shifted2(&self, mu: usize, d_mu: f64, nu: usize, d_nu: f64) -> Self {
        let mut x = self.x;
        x[mu] += d_mu;
        x[nu] += d_nu;
        Self { chart: self.chart, x }
    }
}

impl fmt::Display for CoordinatePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.chart.coordinate_names();
        write!(f, "(")?;
        for (i, (n, v)) in names.iter().zip(self.x.iter()).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}={v}")?;
        }
        write!(f, ")")
    }
}

/// The frame metric `eta = diag(+1, -1, -1, -1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameMetric {
    pub eta: Matrix4<f64>,
}

impl FrameMetric {
    pub fn new() -> Self {
        Self {
            eta: Matrix4::from_diagonal(&SIGNATURE.into()),
        }
    }

    pub fn diag(&self, a: usize) -> f64 {
        self.eta[(a, a)]
    }
}

impl Default for FrameMetric {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum MetricKind {
    Minkowski,
    Schwarzschild {
        mass: f64,
    },
    /// Matter-dominated FLRW with scale factor `a(t) = t^(2/3)`.
    Flrw,
    /// `diag(1+x^2, -(1+y^2), -(1+z^2), -(1+t^2))`.
    PolyDiag,
}

/// One entry of the closed metric catalog.
///
/// Every catalog metric is diagonal, so each entry stores the four diagonal
/// components as closed-form functions together with their exact gradients.
/// The gradients feed the closed-form Christoffel symbols, which serve as an
/// independent check on the finite-difference route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub kind: MetricKind,
}

pub const CATALOG_NAMES: [&str; 4] = ["minkowski", "schwarzschild", "flrw", "poly-diag"];

/// Looks up a catalog metric by name. `params` is empty for every metric
/// except `schwarzschild`, which takes an optional mass (default 1).
pub fn catalog_lookup(name: &str, params: &[f64]) -> Result<MetricSpec> {
    let no_params = |name: &str| {
        if params.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "{name} takes no parameters, got {}",
                params.len()
            )))
        }
    };
    let kind = match name {
        "minkowski" => {
            no_params(name)?;
            MetricKind::Minkowski
        }
        "schwarzschild" => {
            let mass = match params {
                [] => 1.0,
                [m] => *m,
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "schwarzschild takes one parameter (M), got {}",
                        params.len()
                    )))
                }
            };
            if !(mass.is_finite() && mass > 0.0) {
                return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
            }
            MetricKind::Schwarzschild { mass }
        }
        "flrw" => {
            no_params(name)?;
            MetricKind::Flrw
        }
        "poly-diag" => {
            no_params(name)?;
            MetricKind::PolyDiag
        }
        other => return Err(Error::UnknownMetric(other.to_string())),
    };
    Ok(MetricSpec { kind })
}

impl MetricSpec {
    pub fn minkowski() -> Self {
        Self {
            kind: MetricKind::Minkowski,
        }
    }

    pub fn schwarzschild(mass: f64) -> Result<Self> {
        catalog_lookup("schwarzschild", &[mass])
    }

    pub fn flrw() -> Self {
        Self { kind: MetricKind::Flrw }
    }

    pub fn poly_diag() -> Self {
        Self {
            kind: MetricKind::PolyDiag,
        }
    }

    /// Every catalog entry with default parameters.
    pub fn catalog() -> Vec<MetricSpec> {
        CATALOG_NAMES
            .iter()
            .map(|n| catalog_lookup(n, &[]).expect("catalog defaults are valid"))
            .collect()
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            MetricKind::Minkowski => "minkowski",
            MetricKind::Schwarzschild { .. } => "schwarzschild",
            MetricKind::Flrw => "flrw",
            MetricKind::PolyDiag => "poly-diag",
        }
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match self.kind {
            MetricKind::Schwarzschild { mass } => vec![("M", mass)],
            _ => Vec::new(),
        }
    }

    pub fn chart(&self) -> Chart {
        match self.kind {
            MetricKind::Schwarzschild { .. } => Chart::Spherical,
            _ => Chart::Cartesian,
        }
    }

    pub fn domain_description(&self) -> String {
        match self.kind {
            MetricKind::Minkowski | MetricKind::PolyDiag => "all of R^4".to_string(),
            MetricKind::Schwarzschild { mass } => format!(
                "r > {} (2M(1+{EPS_HORIZON})), {EPS_CHART} < theta < pi-{EPS_CHART}",
                2.0 * mass * (1.0 + EPS_HORIZON)
            ),
            MetricKind::Flrw => format!("t > {EPS_CHART}"),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        true
    }

    pub fn point(&self, x: [f64; 4]) -> Result<CoordinatePoint> {
        CoordinatePoint::new(self.chart(), x)
    }

    pub fn in_domain(&self, p: &CoordinatePoint) -> bool {
        if p.chart != self.chart() || p.x.iter().any(|c| !c.is_finite()) {
            return false;
        }
        match self.kind {
            MetricKind::Minkowski | MetricKind::PolyDiag => true,
            MetricKind::Schwarzschild { mass } => {
                let [_, r, theta, _] = p.x;
                r > 2.0 * mass * (1.0 + EPS_HORIZON) && theta > EPS_CHART && theta < PI - EPS_CHART
            }
            MetricKind::Flrw => p.x[0] > EPS_CHART,
        }
    }

    pub fn check_domain(&self, p: &CoordinatePoint) -> Result<()> {
        if self.in_domain(p) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                metric: self.name(),
                point: *p,
            })
        }
    }

    /// Diagonal components `g_{mu mu}` without a domain check.
    fn diagonal_unchecked(&self, x: &[f64; 4]) -> [f64; 4] {
        match self.kind {
            MetricKind::Minkowski => SIGNATURE,
            MetricKind::Schwarzschild { mass } => {
                let [_, r, theta, _] = *x;
                let f = 1.0 - 2.0 * mass / r;
                let s = theta.sin();
                [f, -1.0 / f, -r * r, -r * r * s * s]
            }
            MetricKind::Flrw => {
                let a2 = x[0].powf(4.0 / 3.0);
                [1.0, -a2, -a2, -a2]
            }
            MetricKind::PolyDiag => {
                let [t, xx, y, z] = *x;
                [1.0 + xx * xx, -(1.0 + y * y), -(1.0 + z * z), -(1.0 + t * t)]
            }
        }
    }

    /// Exact gradients `d_sigma g_{mu mu}`, indexed `[sigma][mu]`.
    fn diagonal_gradient_unchecked(&self, x: &[f64; 4]) -> [[f64; 4]; 4] {
        let mut d = [[0.0; 4]; 4];
        match self.kind {
            MetricKind::Minkowski => {}
            MetricKind::Schwarzschild { mass } => {
                let [_, r, theta, _] = *x;
                let f = 1.0 - 2.0 * mass / r;
                let df = 2.0 * mass / (r * r);
                let (s, c) = theta.sin_cos();
                d[1][0] = df;
                d[1][1] = df / (f * f);
                d[1][2] = -2.0 * r;
                d[1][3] = -2.0 * r * s * s;
                d[2][3] = -2.0 * r * r * s * c;
            }
            MetricKind::Flrw => {
                let da2 = (4.0 / 3.0) * x[0].powf(1.0 / 3.0);
                d[0][1] = -da2;
                d[0][2] = -da2;
                d[0][3] = -da2;
            }
            MetricKind::PolyDiag => {
                let [t, xx, y, z] = *x;
                d[1][0] = 2.0 * xx;
                d[2][1] = -2.0 * y;
                d[3][2] = -2.0 * z;
                d[0][3] = -2.0 * t;
            }
        }
        d
    }

    /// `g_{mu nu}(p)`.
    pub fn components(&self, p: &CoordinatePoint) -> Result<Matrix4<f64>> {
        self.check_domain(p)?;
        Ok(Matrix4::from_diagonal(&self.diagonal_unchecked(&p.x).into()))
    }

    /// `g^{mu nu}(p)`.
    pub fn inverse_metric(&self, p: &CoordinatePoint) -> Result<Matrix4<f64>> {
        inverse_metric(self, p)
    }

    /// Closed-form Levi-Civita symbols `Gamma^nu_{mu lambda}` indexed
    /// `[nu][mu][lambda]`, from exact metric gradients.
    pub fn closed_form_christoffel(&self, p: &CoordinatePoint) -> Option<Result<Rank3>> {
        Some(self.closed_form_christoffel_checked(p))
    }

    fn closed_form_christoffel_checked(&self, p: &CoordinatePoint) -> Result<Rank3> {
        self.check_domain(p)?;
        let g = self.diagonal_unchecked(&p.x);
        let dg = self.diagonal_gradient_unchecked(&p.x);
        let mut gamma = [[[0.0; 4]; 4]; 4];
        // diagonal metric: Gamma^n_{ml} = 1/(2 g_nn) (d_m g_nl + d_l g_nm - d_n g_ml)
        for n in 0..4 {
            for m in 0..4 {
                for l in 0..4 {
                    let mut s = 0.0;
                    if n == l {
                        s += dg[m][n];
                    }
                    if n == m {
                        s += dg[l][n];
                    }
                    if m == l {
                        s -= dg[n][m];
                    }
                    gamma[n][m][l] = 0.5 * s / g[n];
                }
            }
        }
        Ok(gamma)
    }
}

/// `g^{mu nu}(p)`, with `g^{mu s} g_{s nu} = delta` to within 1e-12.
pub fn inverse_metric(spec: &MetricSpec, p: &CoordinatePoint) -> Result<Matrix4<f64>> {
    let g = spec.components(p)?;
    invert(&g)
}

pub(crate) fn invert(m: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    let det = m.determinant();
    if det.is_nan() || det.abs() <= DET_FLOOR {
        return Err(Error::Singular { det });
    }
    m.try_inverse().ok_or(Error::Singular { det })
}

/// Signs of the eigenvalues of `g`, sorted so that a `(+,-,-,-)` metric gives `[1,-1,-1,-1]`.
pub fn eigen_signature(g: &Matrix4<f64>) -> [f64; 4] {
    let eig = g.symmetric_eigenvalues();
    let mut signs: Vec<f64> = eig.iter().map(|e| e.signum()).collect();
    signs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    [signs[0], signs[1], signs[2], signs[3]]
}
