//! Tetrads, local Lorentz transformations and the spin connection.
//!
//! A tetrad is stored as a matrix `q^a_mu` with the frame index `a` as row and
//! the coordinate index `mu` as column. The spin connection is obtained by
//! solving the tetrad postulate
//!
//! ```text
//! D_mu q^a_l = d_mu q^a_l + w^a_{mu b} q^b_l - Gamma^n_{mu l} q^a_n = 0
//! ```
//!
//! for `w`, so the postulate holds by construction and its residual measures
//! only floating-point error.

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::calculus::{christoffel, gradient, Step};
use crate::error::{Error, Result};
use crate::geometry::{invert, CoordinatePoint, FrameMetric, MetricSpec};
use crate::Rank3;

pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Rapidity (or rotation angle) of a local Lorentz transformation as a
/// function of position.
#[derive(Clone)]
pub enum Rapidity {
    Constant(f64),
    /// `coeff * x_coord`
    Linear {
        coeff: f64,
        coord: usize,
    },
    Custom(Arc<dyn Fn(&CoordinatePoint) -> f64 + Send + Sync>),
}

impl Rapidity {
    pub fn at(&self, p: &CoordinatePoint) -> f64 {
        match self {
            Rapidity::Constant(v) => *v,
            Rapidity::Linear { coeff, coord } => coeff * p.x[*coord],
            Rapidity::Custom(f) => f(p),
        }
    }
}

impl fmt::Debug for Rapidity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rapidity::Constant(v) => write!(f, "Constant({v})"),
            Rapidity::Linear { coeff, coord } => write!(f, "Linear({coeff} * x{coord})"),
            Rapidity::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl fmt::Display for Rapidity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rapidity::Constant(v) => write!(f, "{v}"),
            Rapidity::Linear { coeff, coord } => write!(f, "{coeff}*x{coord}"),
            Rapidity::Custom(_) => f.write_str("custom"),
        }
    }
}

/// A local Lorentz transformation acting on frame indices in one plane.
/// A plane containing the time index is a boost; a purely spatial plane is a rotation.
#[derive(Debug, Clone)]
pub struct LocalLorentz {
    pub plane: (usize, usize),
    pub rapidity: Rapidity,
}

impl LocalLorentz {
    pub fn matrix_at(&self, p: &CoordinatePoint) -> Matrix4<f64> {
        lorentz_matrix(self.plane, self.rapidity.at(p))
    }
}

/// `Lambda^a_b` for the given plane and parameter.
///
/// Boosts: `Lambda^0_0 = Lambda^k_k = cosh`, `Lambda^0_k = Lambda^k_0 = sinh`.
/// Rotations in spatial planes use `cos`/`sin`. Either way `Lambda^T eta Lambda = eta`.
pub fn lorentz_matrix(plane: (usize, usize), phi: f64) -> Matrix4<f64> {
    let (i, j) = plane;
    let mut l = Matrix4::identity();
    if i == 0 || j == 0 {
        let k = i.max(j);
        let (ch, sh) = (phi.cosh(), phi.sinh());
        l[(0, 0)] = ch;
        l[(k, k)] = ch;
        l[(0, k)] = sh;
        l[(k, 0)] = sh;
    } else {
        let (c, s) = (phi.cos(), phi.sin());
        l[(i, i)] = c;
        l[(j, j)] = c;
        l[(i, j)] = -s;
        l[(j, i)] = s;
    }
    l
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TetradKind {
    Diagonal,
    LorentzTransformed,
}

/// A tetrad field adapted to a catalog metric: the diagonal tetrad followed by
/// any number of local Lorentz transformations.
#[derive(Debug, Clone)]
pub struct Tetrad {
    metric: MetricSpec,
    transforms: Vec<LocalLorentz>,
}

/// `q^a_mu = sqrt|g_{mu mu}| delta^a_mu`.
pub fn diagonal_tetrad(spec: &MetricSpec) -> Result<Tetrad> {
    if !spec.is_diagonal() {
        return Err(Error::NonDiagonal);
    }
    Ok(Tetrad {
        metric: *spec,
        transforms: Vec::new(),
    })
}

/// `q'^a_mu = Lambda^a_b(p) q^b_mu`.
pub fn lorentz_transform_tetrad(t: &Tetrad, rapidity: Rapidity, plane: (usize, usize)) -> Result<Tetrad> {
    if plane.0 == plane.1 || plane.0 > 3 || plane.1 > 3 {
        return Err(Error::InvalidPlane(plane.0, plane.1));
    }
    let mut out = t.clone();
    out.transforms.push(LocalLorentz { plane, rapidity });
    Ok(out)
}

impl Tetrad {
    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    pub fn kind(&self) -> TetradKind {
        if self.transforms.is_empty() {
            TetradKind::Diagonal
        } else {
            TetradKind::LorentzTransformed
        }
    }

    pub fn transforms(&self) -> &[LocalLorentz] {
        &self.transforms
    }

    pub fn describe(&self) -> String {
        let mut s = String::from("diag");
        for t in &self.transforms {
            s.push_str(&format!(" | boost:{}{}:{}", t.plane.0, t.plane.1, t.rapidity));
        }
        s
    }

    /// `q^a_mu(p)`.
    pub fn eval(&self, p: &CoordinatePoint) -> Result<Matrix4<f64>> {
        let g = self.metric.components(p)?;
        let mut q = Matrix4::zeros();
        for mu in 0..4 {
            let gmm = g[(mu, mu)];
            if gmm == 0.0 {
                return Err(Error::ZeroDiagonal(mu));
            }
            q[(mu, mu)] = gmm.abs().sqrt();
        }
        for t in &self.transforms {
            q = t.matrix_at(p) * q;
        }
        Ok(q)
    }

    /// `max |q g^{-1} q^T - eta|`.
    pub fn orthonormality_defect(&self, p: &CoordinatePoint) -> Result<f64> {
        let q = self.eval(p)?;
        let ginv = self.metric.inverse_metric(p)?;
        let m = q * ginv * q.transpose() - FrameMetric::new().eta;
        Ok(m.amax())
    }
}

/// `q^mu_a(p)`, the matrix inverse of `q^a_mu(p)` (rows `mu`, columns `a`).
pub fn inverse_tetrad(t: &Tetrad, p: &CoordinatePoint) -> Result<Matrix4<f64>> {
    invert(&t.eval(p)?)
}

/// `max(|qinv q - 1|, |q qinv - 1|)`.
pub fn inverse_defect(q: &Matrix4<f64>, qinv: &Matrix4<f64>) -> f64 {
    let id = Matrix4::identity();
    (qinv * q - id).amax().max((q * qinv - id).amax())
}

/// `w^a_{mu b}` at a point, indexed `[a][mu][b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinConnection {
    pub omega: Rank3,
}

impl SpinConnection {
    pub fn zero() -> Self {
        Self {
            omega: [[[0.0; 4]; 4]; 4],
        }
    }

    pub fn get(&self, a: usize, mu: usize, b: usize) -> f64 {
        self.omega[a][mu][b]
    }

    /// `w_{mu a b} = eta_{ac} w^c_{mu b}`, indexed `[mu][a][b]`.
    pub fn lowered(&self) -> Rank3 {
        let eta = FrameMetric::new();
        let mut out = [[[0.0; 4]; 4]; 4];
        for mu in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    out[mu][a][b] = eta.diag(a) * self.omega[a][mu][b];
                }
            }
        }
        out
    }

    /// `max |w_{mu a b} + w_{mu b a}|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let low = self.lowered();
        let mut worst: f64 = 0.0;
        for slab in &low {
            for a in 0..4 {
                for b in 0..4 {
                    worst = worst.max((slab[a][b] + slab[b][a]).abs());
                }
            }
        }
        worst
    }
}

/// `[d_mu q]` for `mu = 0..3`.
pub fn tetrad_gradient(t: &Tetrad, p: &CoordinatePoint, step: Step) -> Result<[Matrix4<f64>; 4]> {
    gradient(|x: &CoordinatePoint| t.eval(x), p, step)
}

/// Solves the tetrad postulate for the spin connection:
/// `w^a_{mu b} = (Gamma^n_{mu l} q^a_n - d_mu q^a_l) q^l_b`.
pub fn spin_connection(t: &Tetrad, p: &CoordinatePoint, step: Step) -> Result<SpinConnection> {
    let q = t.eval(p)?;
    let qinv = invert(&q)?;
    let dq = tetrad_gradient(t, p, step)?;
    let gamma = christoffel(t.metric(), p, step)?.gamma;
    Ok(solve_spin_connection(&q, &qinv, &dq, &gamma))
}

pub(crate) fn solve_spin_connection(
    q: &Matrix4<f64>,
    qinv: &Matrix4<f64>,
    dq: &[Matrix4<f64>; 4],
    gamma: &Rank3,
) -> SpinConnection {
    let mut omega = [[[0.0; 4]; 4]; 4];
    for mu in 0..4 {
        // A^a_l = Gamma^n_{mu l} q^a_n - d_mu q^a_l
        let a_mat = connection_term(q, gamma, mu) - dq[mu];
        let w = a_mat * qinv;
        for a in 0..4 {
            for b in 0..4 {
                omega[a][mu][b] = w[(a, b)];
            }
        }
    }
    SpinConnection { omega }
}

/// `Gamma^n_{mu l} q^a_n` as a matrix over `(a, l)`.
pub(crate) fn connection_term(q: &Matrix4<f64>, gamma: &Rank3, mu: usize) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for a in 0..4 {
        for l in 0..4 {
            let mut s = 0.0;
            for n in 0..4 {
                s += gamma[n][mu][l] * q[(a, n)];
            }
            m[(a, l)] = s;
        }
    }
    m
}

/// `w^a_{mu b} q^b_l` as a matrix over `(a, l)`.
pub(crate) fn spin_term(q: &Matrix4<f64>, w: &SpinConnection, mu: usize) -> Matrix4<f64> {
    let mut wm = Matrix4::zeros();
    for a in 0..4 {
        for b in 0..4 {
            wm[(a, b)] = w.omega[a][mu][b];
        }
    }
    wm * q
}

/// Max-abs over `a, mu, l` of `d_mu q^a_l + w^a_{mu b} q^b_l - Gamma^n_{mu l} q^a_n`.
pub fn tetrad_postulate_residual(t: &Tetrad, w: &SpinConnection, p: &CoordinatePoint, step: Step) -> Result<f64> {
    let q = t.eval(p)?;
    let dq = tetrad_gradient(t, p, step)?;
    let gamma = christoffel(t.metric(), p, step)?.gamma;
    let mut worst: f64 = 0.0;
    for mu in 0..4 {
        let d = dq[mu] + spin_term(&q, w, mu) - connection_term(&q, &gamma, mu);
        worst = worst.max(d.amax());
    }
    Ok(worst)
}
