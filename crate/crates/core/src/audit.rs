//! The wave operator on a tetrad and the proportionality test
//! `box q^a_l = R q^a_l`.
//!
//! Differentiating the tetrad postulate gives two routes to `box q`:
//! directly, as second derivatives of `q`, and through the connections, as
//! `d^mu(Gamma^n_{mu l} q^a_n) - d^mu(w^a_{mu b} q^b_l)`. Both must agree.
//! The proportionality claim then requires the 16 ratios `rhs^a_l / q^a_l`
//! to coincide, which they do not in general.
//!
//! How `d^mu` acts on a non-scalar in a curved chart is not fixed by the
//! notation, so both readings are computed (see [`Variant`]).

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::calculus::christoffel;
use crate::calculus::{gradient, second_partial, Step};
use crate::error::Result;
use crate::frames::{connection_term, inverse_tetrad, solve_spin_connection, spin_term, tetrad_gradient, Tetrad};
use crate::geometry::{invert, CoordinatePoint};

/// Agreement required between the two routes to `box q`.
pub const LHS_RHS_TOL: f64 = 1e-5;
/// Relative threshold below which a tetrad component is treated as zero.
pub const EPS_Q: f64 = 1e-9;
const TINY: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `g^{mu s}(p) d_s d_mu q`: the metric is held outside the derivative.
    RaiseOutside,
    /// `d_s (g^{mu s} d_mu q)`: the metric is differentiated too.
    RaiseInside,
}

impl Variant {
    pub const BOTH: [Variant; 2] = [Variant::RaiseOutside, Variant::RaiseInside];

    pub fn name(self) -> &'static str {
        match self {
            Variant::RaiseOutside => "raise-outside",
            Variant::RaiseInside => "raise-inside",
        }
    }

    pub fn note(self) -> &'static str {
        match self {
            Variant::RaiseOutside => "d^mu X_mu := g^{mu s}(p) d_s X_mu",
            Variant::RaiseInside => "d^mu X_mu := d_s (g^{mu s} X_mu)",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raise-outside" => Ok(Variant::RaiseOutside),
            "raise-inside" => Ok(Variant::RaiseInside),
            other => Err(format!("unknown variant `{other}`")),
        }
    }
}

/// `box q^a_l` from second derivatives of the tetrad.
pub fn box_tetrad(t: &Tetrad, p: &CoordinatePoint, variant: Variant, step: Step) -> Result<Matrix4<f64>> {
    let spec = t.metric();
    let ginv = spec.inverse_metric(p)?;
    let field = |x: &CoordinatePoint| t.eval(x);
    let mut out = Matrix4::zeros();
    for mu in 0..4 {
        for s in mu..4 {
            let g = ginv[(mu, s)];
            if g == 0.0 {
                continue;
            }
            let d2: Matrix4<f64> = second_partial(field, p, mu, s, step)?;
            let weight = if mu == s { g } else { 2.0 * g };
            out += d2 * weight;
        }
    }
    if variant == Variant::RaiseInside {
        // product rule: (d_s g^{mu s}) d_mu q
        let dginv = gradient(|x: &CoordinatePoint| spec.inverse_metric(x), p, step)?;
        let dq = tetrad_gradient(t, p, step)?;
        for s in 0..4 {
            for mu in 0..4 {
                let c = dginv[s][(mu, s)];
                if c != 0.0 {
                    out += dq[mu] * c;
                }
            }
        }
    }
    Ok(out)
}

/// `X_mu = Gamma^n_{mu l} q^a_n - w^a_{mu b} q^b_l`, with the spin connection
/// re-solved at `p`. Equal to `d_mu q` up to rounding.
pub fn connection_field(t: &Tetrad, p: &CoordinatePoint, step: Step) -> Result<[Matrix4<f64>; 4]> {
    let q = t.eval(p)?;
    let qinv = invert(&q)?;
    let dq = tetrad_gradient(t, p, step)?;
    let gamma = christoffel(t.metric(), p, step)?.gamma;
    let w = solve_spin_connection(&q, &qinv, &dq, &gamma);
    Ok(std::array::from_fn(|mu| {
        connection_term(&q, &gamma, mu) - spin_term(&q, &w, mu)
    }))
}

/// Right side of the differentiated postulate,
/// `d^mu(Gamma^n_{mu l} q^a_n) - d^mu(w^a_{mu b} q^b_l)`.
pub fn connection_rhs(t: &Tetrad, p: &CoordinatePoint, variant: Variant, step: Step) -> Result<Matrix4<f64>> {
    let spec = t.metric();
    let mut out = Matrix4::zeros();
    match variant {
        Variant::RaiseOutside => {
            let ginv = spec.inverse_metric(p)?;
            let dx = gradient(|x: &CoordinatePoint| connection_field(t, x, step), p, step)?;
            for mu in 0..4 {
                for s in 0..4 {
                    let g = ginv[(mu, s)];
                    if g != 0.0 {
                        out += dx[s][mu] * g;
                    }
                }
            }
        }
        Variant::RaiseInside => {
            let raised = |x: &CoordinatePoint| -> Result<[Matrix4<f64>; 4]> {
                let ginv = spec.inverse_metric(x)?;
                let xs = connection_field(t, x, step)?;
                Ok(std::array::from_fn(|s| {
                    let mut y = Matrix4::zeros();
                    for mu in 0..4 {
                        y += xs[mu] * ginv[(mu, s)];
                    }
                    y
                }))
            };
            let dy = gradient(raised, p, step)?;
            for s in 0..4 {
                out += dy[s][s];
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub a: usize,
    pub lambda: usize,
    /// `rhs^a_l / q^a_l`, absent when `q^a_l` is numerically zero.
    pub value: Option<f64>,
    pub defined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateTable {
    pub candidates: Vec<Candidate>,
    pub spread_abs: f64,
    pub spread_rel: f64,
}

impl CandidateTable {
    pub fn defined_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.candidates.iter().filter_map(|c| c.value)
    }
}

/// The 16 per-component ratios and their spread.
pub fn candidate_r_table(rhs: &Matrix4<f64>, q: &Matrix4<f64>) -> CandidateTable {
    let eps = EPS_Q * q.amax();
    let mut candidates = Vec::with_capacity(16);
    for a in 0..4 {
        for lambda in 0..4 {
            let qv = q[(a, lambda)];
            let value = (qv.abs() > eps).then(|| rhs[(a, lambda)] / qv);
            candidates.push(Candidate {
                a,
                lambda,
                value,
                defined: value.is_some(),
            });
        }
    }
    let (lo, hi, amax) = candidates
        .iter()
        .filter_map(|c| c.value)
        .fold((f64::INFINITY, f64::NEG_INFINITY, 0.0f64), |(lo, hi, m), v| {
            (lo.min(v), hi.max(v), m.max(v.abs()))
        });
    let spread_abs = if lo.is_finite() { hi - lo } else { 0.0 };
    CandidateTable {
        candidates,
        spread_abs,
        spread_rel: spread_abs / amax.max(TINY),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestFit {
    pub r_star: f64,
    /// `||rhs - R* q||_F / ||rhs||_F`, in `[0, 1]`.
    pub residual_rel: f64,
}

/// Least-squares scalar `R*` minimising `||rhs - R q||_F`.
pub fn best_fit_r(rhs: &Matrix4<f64>, q: &Matrix4<f64>) -> BestFit {
    let r_star = rhs.dot(q) / q.dot(q);
    let resid = (rhs - q * r_star).norm();
    BestFit {
        r_star,
        residual_rel: resid / rhs.norm().max(TINY),
    }
}

/// `q^l_a q^a_l`, the trace of the Kronecker delta: 4, not 1.
pub fn tetrad_trace(t: &Tetrad, p: &CoordinatePoint) -> Result<f64> {
    let q = t.eval(p)?;
    let qinv = invert(&q)?;
    Ok((qinv * q).trace())
}

/// `q^l_a rhs^a_l`, the full double contraction.
pub fn trace_contraction(qinv: &Matrix4<f64>, rhs: &Matrix4<f64>) -> f64 {
    (qinv * rhs).trace()
}

/// The scalar `R = q^l_a d^mu(Gamma^n_{mu l} q^a_n - w^a_{mu b} q^b_l)`.
pub fn evans_trace_r(t: &Tetrad, p: &CoordinatePoint, variant: Variant, step: Step) -> Result<f64> {
    let rhs = connection_rhs(t, p, variant, step)?;
    Ok(trace_contraction(&inverse_tetrad(t, p)?, &rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditOptions {
    pub variant: Variant,
    pub step: Step,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            variant: Variant::RaiseOutside,
            step: Step::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub signature: String,
    pub frame_metric: String,
    pub tetrad_layout: String,
    pub variant: String,
    pub step: Step,
}

impl Conventions {
    pub fn new(variant: Variant, step: Step) -> Self {
        Self {
            signature: "(+,-,-,-)".into(),
            frame_metric: "diag(+1,-1,-1,-1)".into(),
            tetrad_layout: "q[a][lambda]: row = frame index, column = coordinate index".into(),
            variant: variant.note().into(),
            step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub point: CoordinatePoint,
    pub variant: Variant,
    pub box_lhs: [[f64; 4]; 4],
    pub rhs: [[f64; 4]; 4],
    pub lhs_rhs_defect: f64,
    pub candidates: Vec<Candidate>,
    pub spread_abs: f64,
    pub spread_rel: f64,
    #[serde(rename = "best_fit_R")]
    pub best_fit_r: f64,
    pub best_fit_residual: f64,
    pub trace_q: f64,
    #[serde(rename = "evans_trace_R")]
    pub evans_trace_r: f64,
    #[serde(rename = "evans_trace_R_normalized")]
    pub evans_trace_r_normalized: f64,
    /// False when the two routes to `box q` disagree by `LHS_RHS_TOL` or more.
    pub reliable: bool,
    pub conventions: Conventions,
}

pub fn to_rows(m: &Matrix4<f64>) -> [[f64; 4]; 4] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

/// Runs every check at one point.
pub fn audit(t: &Tetrad, p: &CoordinatePoint, options: AuditOptions) -> Result<AuditReport> {
    let AuditOptions { variant, step } = options;
    t.metric().check_domain(p)?;
    let q = t.eval(p)?;
    let qinv = invert(&q)?;
    let lhs = box_tetrad(t, p, variant, step)?;
    let rhs = connection_rhs(t, p, variant, step)?;
    let defect = (lhs - rhs).amax();
    let table = candidate_r_table(&rhs, &q);
    let fit = best_fit_r(&rhs, &q);
    let evans = trace_contraction(&qinv, &rhs);
    Ok(AuditReport {
        point: *p,
        variant,
        box_lhs: to_rows(&lhs),
        rhs: to_rows(&rhs),
        lhs_rhs_defect: defect,
        candidates: table.candidates,
        spread_abs: table.spread_abs,
        spread_rel: table.spread_rel,
        best_fit_r: fit.r_star,
        best_fit_residual: fit.residual_rel,
        trace_q: (qinv * q).trace(),
        evans_trace_r: evans,
        evans_trace_r_normalized: evans / 4.0,
        reliable: defect < LHS_RHS_TOL,
        conventions: Conventions::new(variant, step),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{diagonal_tetrad, lorentz_transform_tetrad, Rapidity};
    use crate::geometry::MetricSpec;
    use std::f64::consts::PI;

    #[test]
    fn flat_identity_is_trivial() {
        let m = MetricSpec::minkowski();
        let t = diagonal_tetrad(&m).unwrap();
        let p = m.point([0.2, -1.0, 0.5, 3.0]).unwrap();
        for v in Variant::BOTH {
            assert!(box_tetrad(&t, &p, v, Step::default()).unwrap().amax() < 1e-10);
            assert!(connection_rhs(&t, &p, v, Step::default()).unwrap().amax() < 1e-10);
            assert!(evans_trace_r(&t, &p, v, Step::default()).unwrap().abs() < 1e-10);
            let r = audit(
                &t,
                &p,
                AuditOptions {
                    variant: v,
                    step: Step::default(),
                },
            )
            .unwrap();
            assert_eq!(r.spread_abs, 0.0);
            assert_eq!(r.best_fit_r, 0.0);
            assert_eq!(r.best_fit_residual, 0.0);
            assert_eq!(r.trace_q, 4.0);
            assert_eq!(r.candidates.iter().filter(|c| c.defined).count(), 4);
            assert!(r.reliable);
        }
    }

    #[test]
    fn boosted_flat_box() {
        let m = MetricSpec::minkowski();
        let t = lorentz_transform_tetrad(
            &diagonal_tetrad(&m).unwrap(),
            Rapidity::Linear { coeff: 0.1, coord: 1 },
            (0, 1),
        )
        .unwrap();
        let p = m.point([0.0; 4]).unwrap();
        for v in Variant::BOTH {
            let b = box_tetrad(&t, &p, v, Step::default()).unwrap();
            // g^{11} d_1^2 cosh(0.1 x_1) = -0.01 cosh(0)
            assert!((b[(0, 0)] + 0.01).abs() < 1e-6, "{}", b[(0, 0)]);
            let r = connection_rhs(&t, &p, v, Step::default()).unwrap();
            assert!((b - r).amax() < 1e-6);
        }
    }

    #[test]
    fn candidate_table_proportional() {
        let q = Matrix4::new(
            1.0, 0.5, 0.0, 0.0, 0.2, 2.0, 0.0, 0.0, 0.0, 0.0, 3.0, 1e-12, 0.0, 0.0, 0.0, 4.0,
        );
        let table = candidate_r_table(&(q * -2.5), &q);
        assert_eq!(table.candidates.len(), 16);
        assert_eq!(table.candidates.iter().filter(|c| c.defined).count(), 6);
        for v in table.defined_values() {
            assert!((v + 2.5).abs() < 1e-15);
        }
        assert!(table.spread_abs < 1e-15);
        let undefined = table.candidates.iter().find(|c| c.a == 2 && c.lambda == 3).unwrap();
        assert!(!undefined.defined && undefined.value.is_none());
    }

    #[test]
    fn candidate_table_all_undefined() {
        let table = candidate_r_table(&Matrix4::identity(), &Matrix4::zeros());
        assert!(table.candidates.iter().all(|c| !c.defined));
        assert_eq!(table.spread_abs, 0.0);
        assert_eq!(table.spread_rel, 0.0);
    }

    #[test]
    fn best_fit_examples() {
        let q = Matrix4::new(
            2.0, 0.1, 0.0, 0.0, 0.0, 1.0, 0.3, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 5.0,
        );
        let f = best_fit_r(&Matrix4::zeros(), &q);
        assert_eq!((f.r_star, f.residual_rel), (0.0, 0.0));
        let f = best_fit_r(&(q * 3.0), &q);
        assert!((f.r_star - 3.0).abs() < 1e-15);
        assert!(f.residual_rel < 1e-15);
        // orthogonal rhs: nothing of it is explained
        let mut rhs = Matrix4::zeros();
        rhs[(3, 0)] = 1.0;
        let f = best_fit_r(&rhs, &q);
        assert_eq!(f.r_star, 0.0);
        assert!((f.residual_rel - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trace_is_four_not_one() {
        let s = MetricSpec::schwarzschild(1.0).unwrap();
        let t = diagonal_tetrad(&s).unwrap();
        let p = s.point([0.0, 10.0, PI / 3.0, 0.0]).unwrap();
        assert!((tetrad_trace(&t, &p).unwrap() - 4.0).abs() < 1e-12);
        let q = t.eval(&p).unwrap();
        let qinv = inverse_tetrad(&t, &p).unwrap();
        assert!((trace_contraction(&qinv, &(q * 0.7)) - 2.8).abs() < 1e-12);
    }

    #[test]
    fn schwarzschild_candidates_match_closed_form() {
        // diagonal tetrad, raise-outside: box q^a_a = g^{rr} d_r^2 Q_a + g^{thth} d_th^2 Q_a with
        // Q = (sqrt f, 1/sqrt f, r, r sin th).
        let mass = 1.0;
        let s = MetricSpec::schwarzschild(mass).unwrap();
        let t = diagonal_tetrad(&s).unwrap();
        let (r, th) = (10.0, PI / 3.0);
        let p = s.point([0.0, r, th, 0.0]).unwrap();
        let rep = audit(&t, &p, AuditOptions::default()).unwrap();
        let f = 1.0 - 2.0 * mass / r;
        let (fp, fpp) = (2.0 * mass / (r * r), -4.0 * mass / (r * r * r));
        let sqf = f.sqrt();
        let d2_sqrt_f = fpp / (2.0 * sqf) - fp * fp / (4.0 * f * sqf);
        let d2_inv_sqrt_f = -fpp / (2.0 * f * sqf) + 3.0 * fp * fp / (4.0 * f * f * sqf);
        let want = [
            -f * d2_sqrt_f / sqf,
            -f * d2_inv_sqrt_f * sqf,
            0.0,
            (-1.0 / (r * r)) * (-r * th.sin()) / (r * th.sin()),
        ];
        for c in rep.candidates.iter().filter(|c| c.defined) {
            assert_eq!(c.a, c.lambda);
            assert!(
                (c.value.unwrap() - want[c.a]).abs() < 1e-6,
                "R_{} = {:?} want {}",
                c.a,
                c.value,
                want[c.a]
            );
        }
        assert!(rep.spread_rel > 0.1);
        assert!(rep.best_fit_residual > 0.05);
    }
}
