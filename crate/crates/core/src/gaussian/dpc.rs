//! Dirty-paper coding on scalar components and its gap to superposition.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rayon::prelude::*;
use serde::Serialize;

use super::model::{GaussianBC, Scalar};
use super::prop1::{scalar_rates, scalar_support};
use super::to_bits;
use crate::error::{Error, Result};
use crate::region::{pentagon_max, RatePoint, RateRegion, Support};

/// `X = a U1 + b U2` with unit-variance `U1, U2` of correlation `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpcParams {
    pub a: f64,
    pub b: f64,
    pub rho: f64,
}

impl DpcParams {
    /// `E[X²] = a² + b² + 2abρ`.
    pub fn power(&self) -> f64 {
        self.a * self.a + self.b * self.b + 2.0 * self.a * self.b * self.rho
    }

    /// Point with power `s P` at angle `phi` in the `(a, b)` plane.
    fn from_polar(power: f64, s: f64, rho: f64, phi: f64) -> Self {
        let r2 = s * power / (1.0 + rho * (2.0 * phi).sin());
        let r = r2.max(0.0).sqrt();
        Self {
            a: r * phi.cos(),
            b: r * phi.sin(),
            rho,
        }
    }
}

/// Individual and sum-rate bounds in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpcBounds {
    pub r1: f64,
    pub r2: f64,
    pub sum: f64,
}

fn bounds_nats(s: &Scalar, p: &DpcParams) -> (f64, f64, f64) {
    let g2 = s.g * s.g;
    let q = 1.0 - p.rho * p.rho;
    let term = |num: f64, den: f64, w: f64| {
        w * (1.0 + g2 * num / (g2 * den + s.n1)).ln() + (1.0 - w) * (1.0 + g2 * num / (g2 * den + s.n2)).ln()
    };
    let r1 = term((p.a + p.b * p.rho).powi(2), p.b * p.b * q, s.p1);
    let r2 = term((p.b + p.a * p.rho).powi(2), p.a * p.a * q, s.p2);
    (r1, r2, r1 + r2 - (1.0 / q).ln())
}

fn check(s: &Scalar, p: &DpcParams) -> Result<()> {
    if !(p.rho.abs() < 1.0) {
        return Err(Error::InvalidModel(format!("correlation {} must lie in (-1, 1)", p.rho)));
    }
    if p.power() > s.power * (1.0 + 1e-12) {
        return Err(Error::InvalidModel(format!("power {} exceeds {}", p.power(), s.power)));
    }
    Ok(())
}

pub fn dpc_rates(bc: &GaussianBC, params: &DpcParams) -> Result<DpcBounds> {
    let s = bc.require_scalar()?;
    check(&s, params)?;
    let (r1, r2, sum) = bounds_nats(&s, params);
    Ok(DpcBounds {
        r1: to_bits(r1),
        r2: to_bits(r2),
        sum: to_bits(sum),
    })
}

fn weighted_nats(s: &Scalar, p: &DpcParams, l1: f64, l2: f64) -> (f64, RatePoint) {
    let (r1, r2, sum) = bounds_nats(s, p);
    pentagon_max(r1, r2, sum, l1, l2)
}

/// Best weighted sum over the dirty-paper region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpcOptimum {
    /// Bits.
    pub value: f64,
    pub params: DpcParams,
    pub point: RatePoint,
}

struct Negated<'a> {
    s: &'a Scalar,
    l1: f64,
    l2: f64,
}

const RHO_LIMIT: f64 = 1.0 - 1e-9;

impl Negated<'_> {
    fn params(&self, x: &[f64]) -> DpcParams {
        DpcParams::from_polar(self.s.power, x[0].clamp(0.0, 1.0), x[1].clamp(-RHO_LIMIT, RHO_LIMIT), x[2])
    }
}

impl CostFunction for Negated<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(-weighted_nats(self.s, &self.params(x), self.l1, self.l2).0)
    }
}

/// Grid over power fraction, correlation and angle, then Nelder–Mead from
/// the best grid points.
pub fn dpc_weighted_max(bc: &GaussianBC, l1: f64, l2: f64) -> Result<DpcOptimum> {
    let s = bc.require_scalar()?;
    let cost = Negated { s: &s, l1, l2 };
    let mut grid: Vec<(f64, [f64; 3])> = Vec::new();
    for i in 1..=10 {
        for j in 0..41 {
            for k in 0..72 {
                let x = [i as f64 / 10.0, -0.975 + 0.04875 * j as f64, std::f64::consts::PI * k as f64 / 72.0];
                grid.push((cost.cost(&x.to_vec()).expect("finite"), x));
            }
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = (f64::INFINITY, vec![0.0; 3]);
    for (_, x0) in grid.iter().take(10) {
        let mut simplex = vec![x0.to_vec()];
        for d in 0..3 {
            let mut v = x0.to_vec();
            v[d] += if d == 0 { -0.05 } else { 0.05 };
            simplex.push(v);
        }
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(1e-15)
            .map_err(|e| Error::InvariantBreach(e.to_string()))?;
        let res = Executor::new(
            Negated { s: &s, l1, l2 },
            solver,
        )
        .configure(|st| st.max_iters(4000))
        .run()
        .map_err(|e| Error::InvariantBreach(e.to_string()))?;
        let state = res.state();
        if let Some(p) = state.get_best_param() {
            if state.get_best_cost() < best.0 {
                best = (state.get_best_cost(), p.clone());
            }
        }
    }
    let params = cost.params(&best.1);
    let (v, point) = weighted_nats(&s, &params, l1, l2);
    Ok(DpcOptimum {
        value: to_bits(v),
        params,
        point: RatePoint::new(to_bits(point.r1), to_bits(point.r2)),
    })
}

/// Supports of the dirty-paper region, with `(a, b, ρ)` as parameters.
pub fn dpc_region(bc: &GaussianBC, directions: &[Vec<f64>]) -> Result<RateRegion> {
    let supports = directions
        .par_iter()
        .map(|d| {
            let best = dpc_weighted_max(bc, d[0], d[1])?;
            Ok(Support::new(d.clone(), best.point).with_params(serde_json::json!(best.params)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateRegion::from_supports(supports, &[]))
}

/// Superposition value in nats at the split implied by dirty-paper
/// parameters, `α T = a²(1 - ρ²)`.
fn implied_superposition(s: &Scalar, p: &DpcParams, l1: f64, l2: f64) -> f64 {
    let t = p.power().min(s.power);
    let (r1, r2) = scalar_rates(s, t, (p.a * p.a * (1.0 - p.rho * p.rho)).min(t));
    l1 * r1 + l2 * r2
}

/// Superposition minus dirty-paper value, in bits, at the split implied by
/// `params`; never negative.
pub fn dominance_slack(bc: &GaussianBC, params: &DpcParams, lambda: f64) -> Result<f64> {
    let s = bc.require_scalar()?;
    check(&s, params)?;
    Ok(to_bits(implied_superposition(&s, params, 1.0, lambda) - weighted_nats(&s, params, 1.0, lambda).0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpcGap {
    pub lambda: f64,
    /// Bits; superposition minus dirty paper.
    pub gap: f64,
    pub superposition: f64,
    pub dpc: f64,
    /// Whether the superposition optimum is `max(C1, λ C2)`.
    pub corner: bool,
    pub dpc_params: DpcParams,
    /// Superposition power and private fraction.
    pub power: f64,
    pub alpha: f64,
}

/// Gap between the superposition and dirty-paper optima of `R1 + λ R2`.
pub fn dpc_gap(bc: &GaussianBC, lambda: f64) -> Result<DpcGap> {
    if !(lambda > 1.0 && lambda.is_finite()) {
        return Err(Error::InvalidModel(format!("weight {lambda} must exceed 1")));
    }
    let s = bc.require_scalar()?;
    let dpc = dpc_weighted_max(bc, 1.0, lambda)?;
    let (mut sup, mut power, mut alpha) = scalar_support(&s, 1.0, lambda, 400, 10);
    let p = dpc.params;
    let implied = implied_superposition(&s, &p, 1.0, lambda);
    if implied > sup {
        sup = implied;
        power = p.power().min(s.power);
        alpha = if power > 0.0 { p.a * p.a * (1.0 - p.rho * p.rho) / power } else { 0.0 };
    }
    let gap = to_bits(sup) - dpc.value;
    if gap < -1e-9 {
        return Err(Error::InvariantBreach(format!("dirty paper exceeds superposition by {}", -gap)));
    }
    let c1 = scalar_rates(&s, s.power, s.power).0;
    let c2 = scalar_rates(&s, s.power, 0.0).1;
    Ok(DpcGap {
        lambda,
        gap: gap.max(0.0),
        superposition: to_bits(sup),
        dpc: dpc.value,
        corner: (sup - c1.max(lambda * c2)).abs() <= 1e-9,
        dpc_params: p,
        power,
        alpha,
    })
}
