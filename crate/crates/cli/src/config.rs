//! Audit run configuration: tetrad specs, explicit points and grids.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tetrad_audit::{
    diagonal_tetrad, lorentz_transform_tetrad, Chart, CoordinatePoint, MetricSpec, Rapidity, Step, Tetrad, Variant,
};

use crate::CliError;

/// Upper bound on the number of points in one run.
pub const MAX_POINTS: usize = 100_000;

/// `diag` or `boost:<ab>:<coeff>[:<coord>]`.
///
/// The boost variant applies a local Lorentz transformation in the frame
/// plane `(a, b)` with parameter `coeff * x_coord` (`coord` defaults to 1).
/// A plane without the time index is a rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TetradSpec {
    Diag,
    Boost {
        plane: (usize, usize),
        coeff: f64,
        coord: usize,
    },
}

impl TetradSpec {
    pub fn build(&self, metric: &MetricSpec) -> Result<Tetrad, CliError> {
        let diag = diagonal_tetrad(metric)?;
        match *self {
            TetradSpec::Diag => Ok(diag),
            TetradSpec::Boost { plane, coeff, coord } => Ok(lorentz_transform_tetrad(
                &diag,
                Rapidity::Linear { coeff, coord },
                plane,
            )?),
        }
    }
}

impl FromStr for TetradSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Usage(format!("invalid tetrad `{s}`: {why}"));
        if s == "diag" {
            return Ok(TetradSpec::Diag);
        }
        let parts: Vec<&str> = s.split(':').collect();
        let (plane, coeff, coord) = match parts.as_slice() {
            ["boost", plane, coeff] => (*plane, *coeff, "1"),
            ["boost", plane, coeff, coord] => (*plane, *coeff, *coord),
            _ => return Err(bad("expected `diag` or `boost:<ab>:<coeff>[:<coord>]`")),
        };
        let digits: Vec<usize> = plane
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<_>>()
            .ok_or_else(|| bad("plane must be two frame indices such as 01"))?;
        let plane = match digits.as_slice() {
            [a, b] if a != b && *a < 4 && *b < 4 => (*a.min(b), *a.max(b)),
            _ => return Err(bad("plane must be two distinct frame indices in 0..4")),
        };
        let coeff: f64 = coeff
            .parse()
            .ok()
            .filter(|c: &f64| c.is_finite())
            .ok_or_else(|| bad("coefficient must be a finite number"))?;
        let coord: usize = coord
            .parse()
            .ok()
            .filter(|c| *c < 4)
            .ok_or_else(|| bad("coordinate must be 0, 1, 2 or 3"))?;
        Ok(TetradSpec::Boost { plane, coeff, coord })
    }
}

impl fmt::Display for TetradSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TetradSpec::Diag => f.write_str("diag"),
            TetradSpec::Boost { plane, coeff, coord } => write!(f, "boost:{}{}:{coeff}:{coord}", plane.0, plane.1),
        }
    }
}

/// Inclusive evenly spaced samples of one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub coord: usize,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            1 => vec![self.start],
            n => (0..n)
                .map(|i| {
                    if i + 1 == n {
                        self.stop
                    } else {
                        self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

/// A product grid; coordinates not mentioned are held at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axes: Vec<GridAxis>,
}

impl GridSpec {
    /// Parses `name=start:stop:count,...` with names from `chart` or `x0`..`x3`.
    pub fn parse(s: &str, chart: Chart) -> Result<Self, CliError> {
        let bad = |why: String| CliError::Usage(format!("invalid grid `{s}`: {why}"));
        let mut axes: Vec<GridAxis> = Vec::new();
        for item in s.split(',').map(str::trim) {
            let (name, range) = item
                .split_once('=')
                .ok_or_else(|| bad(format!("`{item}` is not name=start:stop:count")))?;
            let coord = chart.coordinate_index(name.trim()).ok_or_else(|| {
                bad(format!(
                    "unknown coordinate `{name}` (expected one of {} or x0..x3)",
                    chart.coordinate_names().join(", ")
                ))
            })?;
            if axes.iter().any(|a| a.coord == coord) {
                return Err(bad(format!("coordinate `{name}` given twice")));
            }
            let fields: Vec<&str> = range.split(':').collect();
            let [start, stop, count] = fields.as_slice() else {
                return Err(bad(format!("`{range}` is not start:stop:count")));
            };
            let num = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(format!("`{t}` is not a finite number")))
            };
            let count: usize = count
                .trim()
                .parse()
                .ok()
                .filter(|c| *c >= 1)
                .ok_or_else(|| bad(format!("count `{count}` must be a positive integer")))?;
            axes.push(GridAxis {
                coord,
                start: num(start)?,
                stop: num(stop)?,
                count,
            });
        }
        let spec = GridSpec { axes };
        if spec.len() > MAX_POINTS {
            return Err(bad(format!("{} points exceeds the limit of {MAX_POINTS}", spec.len())));
        }
        Ok(spec)
    }

    /// Number of points, saturating on overflow.
    pub fn len(&self) -> usize {
        self.axes.iter().fold(1usize, |n, a| n.saturating_mul(a.count))
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in row-major order: the first listed axis varies slowest.
    pub fn points(&self) -> Vec<[f64; 4]> {
        let mut out = vec![[0.0; 4]];
        for axis in &self.axes {
            let values = axis.values();
            out = out
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut q = p;
                        q[axis.coord] = *v;
                        q
                    })
                })
                .collect();
        }
        out
    }
}

/// Parses `c0,c1,c2,c3`.
pub fn parse_point(s: &str) -> Result<[f64; 4], CliError> {
    let values: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect::<Option<_>>()
        .ok_or_else(|| CliError::Usage(format!("invalid point `{s}`: expected four finite numbers")))?;
    values
        .try_into()
        .map_err(|v: Vec<f64>| CliError::Usage(format!("invalid point `{s}`: expected 4 coordinates, got {}", v.len())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointSource {
    Explicit(Vec<[f64; 4]>),
    Grid(GridSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantChoice {
    RaiseOutside,
    RaiseInside,
    Both,
}

impl VariantChoice {
    pub fn variants(self) -> &'static [Variant] {
        match self {
            VariantChoice::RaiseOutside => &[Variant::RaiseOutside],
            VariantChoice::RaiseInside => &[Variant::RaiseInside],
            VariantChoice::Both => &Variant::BOTH,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

/// Everything needed to reproduce one audit run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRunConfig {
    pub metric: MetricSpec,
    pub tetrad: TetradSpec,
    pub points: PointSource,
    pub variant: VariantChoice,
    pub step: Step,
    pub format: Format,
}

impl AuditRunConfig {
    pub fn coordinates(&self) -> Vec<[f64; 4]> {
        match &self.points {
            PointSource::Explicit(v) => v.clone(),
            PointSource::Grid(g) => g.points(),
        }
    }

    /// Checks the point budget and that every point lies in the metric domain.
    pub fn validate(&self) -> Result<Vec<CoordinatePoint>, CliError> {
        let n = match &self.points {
            PointSource::Explicit(v) => v.len(),
            PointSource::Grid(g) => g.len(),
        };
        if n == 0 {
            return Err(CliError::Usage("no points given; use --point or --grid".into()));
        }
        if n > MAX_POINTS {
            return Err(CliError::Usage(format!("{n} points exceeds the limit of {MAX_POINTS}")));
        }
        if !(self.step.base().is_finite() && self.step.base() > 0.0) {
            return Err(CliError::Usage(format!(
                "step must be positive, got {}",
                self.step.base()
            )));
        }
        self.coordinates()
            .into_iter()
            .map(|x| {
                let p = self.metric.point(x)?;
                self.metric.check_domain(&p)?;
                Ok(p)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tetrad_specs() {
        assert_eq!("diag".parse::<TetradSpec>().unwrap(), TetradSpec::Diag);
        assert_eq!(
            "boost:01:0.1".parse::<TetradSpec>().unwrap(),
            TetradSpec::Boost {
                plane: (0, 1),
                coeff: 0.1,
                coord: 1
            }
        );
        assert_eq!(
            "boost:21:-2:3".parse::<TetradSpec>().unwrap(),
            TetradSpec::Boost {
                plane: (1, 2),
                coeff: -2.0,
                coord: 3
            }
        );
        for bad in [
            "",
            "boost",
            "boost:00:1",
            "boost:04:1",
            "boost:01:x",
            "boost:01:1:4",
            "boost:012:1",
            "boost:01:inf",
            "rot:01:1",
        ] {
            assert!(bad.parse::<TetradSpec>().is_err(), "{bad}");
        }
        for s in ["diag", "boost:01:0.1:1", "boost:23:-1.5:0"] {
            assert_eq!(s.parse::<TetradSpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn grid_points() {
        let g = GridSpec::parse("r=6:20:3,theta=1.0:2.0:2", Chart::Spherical).unwrap();
        assert_eq!(g.len(), 6);
        let pts = g.points();
        assert_eq!(pts[0], [0.0, 6.0, 1.0, 0.0]);
        assert_eq!(pts[1], [0.0, 6.0, 2.0, 0.0]);
        assert_eq!(pts[2], [0.0, 13.0, 1.0, 0.0]);
        assert_eq!(pts[5], [0.0, 20.0, 2.0, 0.0]);
        let g = GridSpec::parse("x0=0.1:0.1:1", Chart::Cartesian).unwrap();
        assert_eq!(g.points(), vec![[0.1, 0.0, 0.0, 0.0]]);
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let a = GridAxis {
            coord: 0,
            start: 0.1,
            stop: 0.7,
            count: 7,
        };
        let v = a.values();
        assert_eq!(v.len(), 7);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[6], 0.7);
    }

    #[test]
    fn grid_errors() {
        for bad in [
            "",
            "r",
            "r=1:2",
            "r=1:2:0",
            "q=1:2:3",
            "r=1:2:3,r=1:2:3",
            "r=a:2:3",
            "r=1:2:3.5",
            "t=0:1:1000,r=0:1:1000",
        ] {
            assert!(GridSpec::parse(bad, Chart::Spherical).is_err(), "{bad}");
        }
    }

    #[test]
    fn points() {
        assert_eq!(parse_point("0, 1.5,-2,3e1").unwrap(), [0.0, 1.5, -2.0, 30.0]);
        for bad in ["", "1,2,3", "1,2,3,4,5", "1,2,nan,4", "a,b,c,d"] {
            assert!(parse_point(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn validation() {
        let cfg = |metric: MetricSpec, pts: Vec<[f64; 4]>| AuditRunConfig {
            metric,
            tetrad: TetradSpec::Diag,
            points: PointSource::Explicit(pts),
            variant: VariantChoice::Both,
            step: Step::default(),
            format: Format::Json,
        };
        let s = MetricSpec::schwarzschild(1.0).unwrap();
        assert!(cfg(s, vec![[0.0, 10.0, 1.0, 0.0]]).validate().is_ok());
        assert!(cfg(s, vec![[0.0, 1.999, 1.57, 0.0]]).validate().is_err());
        assert!(cfg(s, vec![]).validate().is_err());
        assert!(cfg(MetricSpec::flrw(), vec![[0.0; 4]]).validate().is_err());
    }
}
