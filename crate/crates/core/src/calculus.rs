//! Finite differences on fields over a chart, and Christoffel symbols.
//!
//! First derivatives use a central difference with one Richardson step,
//! `(4 D_{h/2} - D_h) / 3`, which is `O(h^4)` for smooth fields. Pure second
//! derivatives use the 5-point central stencil and mixed ones the symmetric
//! 4-corner stencil.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{CoordinatePoint, MetricSpec};
use crate::{max_abs_rank3, Rank3};

/// Values that can be combined linearly by a difference stencil.
pub trait Linear: Clone {
    fn scale(&mut self, c: f64);
    fn add_scaled(&mut self, c: f64, other: &Self);
}

impl Linear for f64 {
    fn scale(&mut self, c: f64) {
        *self *= c;
    }
    fn add_scaled(&mut self, c: f64, other: &Self) {
        *self += c * other;
    }
}

impl Linear for Matrix4<f64> {
    fn scale(&mut self, c: f64) {
        *self *= c;
    }
    fn add_scaled(&mut self, c: f64, other: &Self) {
        *self += other * c;
    }
}

impl<T: Linear, const N: usize> Linear for [T; N] {
    fn scale(&mut self, c: f64) {
        self.iter_mut().for_each(|v| v.scale(c));
    }
    fn add_scaled(&mut self, c: f64, other: &Self) {
        self.iter_mut().zip(other.iter()).for_each(|(v, o)| v.add_scaled(c, o));
    }
}

fn combine<T: Linear>(terms: &[(f64, T)]) -> T {
    let (c0, first) = &terms[0];
    let mut acc = first.clone();
    acc.scale(*c0);
    for (c, v) in &terms[1..] {
        acc.add_scaled(*c, v);
    }
    acc
}

/// Finite-difference step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "h", rename_all = "kebab-case")]
pub enum Step {
    /// The same `h` in every direction.
    Absolute(f64),
    /// `h * max(1, |x_mu|)` along direction `mu`.
    Relative(f64),
}

impl Default for Step {
    fn default() -> Self {
        Step::Relative(1e-4)
    }
}

impl Step {
    pub fn along(&self, p: &CoordinatePoint, mu: usize) -> f64 {
        match *self {
            Step::Absolute(h) => h,
            Step::Relative(h) => h * p.x[mu].abs().max(1.0),
        }
    }

    pub fn base(&self) -> f64 {
        match *self {
            Step::Absolute(h) | Step::Relative(h) => h,
        }
    }
}

/// `d_mu f` at `p` by Richardson-extrapolated central differences.
///
/// Any error from `f` (typically a stencil point leaving the metric domain)
/// is propagated.
pub fn partial_derivative<T, F>(f: F, p: &CoordinatePoint, mu: usize, step: Step) -> Result<T>
where
    T: Linear,
    F: Fn(&CoordinatePoint) -> Result<T>,
{
    let h = step.along(p, mu);
    let fp1 = f(&p.shifted(mu, h))?;
    let fm1 = f(&p.shifted(mu, -h))?;
    let fph = f(&p.shifted(mu, 0.5 * h))?;
    let fmh = f(&p.shifted(mu, -0.5 * h))?;
    Ok(combine(&[
        (-1.0 / (6.0 * h), fp1),
        (1.0 / (6.0 * h), fm1),
        (4.0 / (3.0 * h), fph),
        (-4.0 / (3.0 * h), fmh),
    ]))
}

/// All four first derivatives `[d_0 f, .., d_3 f]`.
pub fn gradient<T, F>(f: F, p: &CoordinatePoint, step: Step) -> Result<[T; 4]>
where
    T: Linear,
    F: Fn(&CoordinatePoint) -> Result<T>,
{
    Ok([
        partial_derivative(&f, p, 0, step)?,
        partial_derivative(&f, p, 1, step)?,
        partial_derivative(&f, p, 2, step)?,
        partial_derivative(&f, p, 3, step)?,
    ])
}

/// `d_mu d_nu f` at `p`. Symmetric in `(mu, nu)` by construction.
pub fn second_partial<T, F>(f: F, p: &CoordinatePoint, mu: usize, nu: usize, step: Step) -> Result<T>
where
    T: Linear,
    F: Fn(&CoordinatePoint) -> Result<T>,
{
    if mu == nu {
        let h = step.along(p, mu);
        let h2 = h * h;
        // differences against the centre keep constant fields exactly zero
        let f0 = f(p)?;
        let diff = |x: &CoordinatePoint| -> Result<T> {
            let mut v = f(x)?;
            v.add_scaled(-1.0, &f0);
            Ok(v)
        };
        Ok(combine(&[
            (-1.0 / (12.0 * h2), diff(&p.shifted(mu, 2.0 * h))?),
            (16.0 / (12.0 * h2), diff(&p.shifted(mu, h))?),
            (16.0 / (12.0 * h2), diff(&p.shifted(mu, -h))?),
            (-1.0 / (12.0 * h2), diff(&p.shifted(mu, -2.0 * h))?),
        ]))
    } else {
        let (mu, nu) = (mu.min(nu), mu.max(nu));
        let hm = step.along(p, mu);
        let hn = step.along(p, nu);
        let c = 1.0 / (4.0 * hm * hn);
        Ok(combine(&[
            (c, f(&p.shifted2(mu, hm, nu, hn))?),
            (-c, f(&p.shifted2(mu, hm, nu, -hn))?),
            (-c, f(&p.shifted2(mu, -hm, nu, hn))?),
            (c, f(&p.shifted2(mu, -hm, nu, -hn))?),
        ]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChristoffelSource {
    ClosedForm,
    FiniteDifference,
}

/// `Gamma^nu_{mu lambda}` at a point, indexed `[nu][mu][lambda]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChristoffelField {
    pub gamma: Rank3,
    pub point: CoordinatePoint,
    pub source: ChristoffelSource,
    /// Max-abs deviation from the closed form, when the metric provides one.
    pub closed_form_deviation: Option<f64>,
}

impl ChristoffelField {
    pub fn get(&self, nu: usize, mu: usize, lambda: usize) -> f64 {
        self.gamma[nu][mu][lambda]
    }
}

/// `d_sigma g_{mu nu}` for each `sigma`.
pub fn metric_gradient(spec: &MetricSpec, p: &CoordinatePoint, step: Step) -> Result<[Matrix4<f64>; 4]> {
    gradient(|q: &CoordinatePoint| spec.components(q), p, step)
}

/// Levi-Civita symbols by finite differences of the metric:
/// `Gamma^n_{ml} = 1/2 g^{ns} (d_m g_{sl} + d_l g_{sm} - d_s g_{ml})`.
pub fn christoffel(spec: &MetricSpec, p: &CoordinatePoint, step: Step) -> Result<ChristoffelField> {
    let ginv = spec.inverse_metric(p)?;
    let dg = metric_gradient(spec, p, step)?;
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for n in 0..4 {
        for m in 0..4 {
            for l in 0..4 {
                let mut acc = 0.0;
                for s in 0..4 {
                    let gi = ginv[(n, s)];
                    if gi == 0.0 {
                        continue;
                    }
                    acc += gi * (dg[m][(s, l)] + dg[l][(s, m)] - dg[s][(m, l)]);
                }
                gamma[n][m][l] = 0.5 * acc;
            }
        }
    }
    symmetrize_lower(&mut gamma);
    let closed_form_deviation = match spec.closed_form_christoffel(p) {
        Some(cf) => {
            let cf = cf?;
            let mut diff = gamma;
            diff.add_scaled(-1.0, &cf);
            Some(max_abs_rank3(&diff))
        }
        None => None,
    };
    Ok(ChristoffelField {
        gamma,
        point: *p,
        source: ChristoffelSource::FiniteDifference,
        closed_form_deviation,
    })
}

fn symmetrize_lower(gamma: &mut Rank3) {
    for slab in gamma.iter_mut() {
        for m in 0..4 {
            for l in m + 1..4 {
                let avg = 0.5 * (slab[m][l] + slab[l][m]);
                slab[m][l] = avg;
                slab[l][m] = avg;
            }
        }
    }
}

/// Metric compatibility defect
/// `max |d_s g_{mn} - Gamma^r_{sm} g_{rn} - Gamma^r_{sn} g_{mr}|`.
pub fn metric_compatibility_defect(spec: &MetricSpec, p: &CoordinatePoint, step: Step) -> Result<f64> {
    let g = spec.components(p)?;
    let dg = metric_gradient(spec, p, step)?;
    let gamma = christoffel(spec, p, step)?.gamma;
    let mut worst: f64 = 0.0;
    for s in 0..4 {
        for m in 0..4 {
            for n in 0..4 {
                let mut v = dg[s][(m, n)];
                for r in 0..4 {
                    v -= gamma[r][s][m] * g[(r, n)] + gamma[r][s][n] * g[(m, r)];
                }
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}
