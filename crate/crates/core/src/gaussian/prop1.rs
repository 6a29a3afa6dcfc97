use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde_json::json;

use super::model::{GaussianBC, GaussianSplit, Scalar};
use super::to_bits;
use crate::error::{Error, Result};
use crate::region::{RatePoint, RateRegion, Support};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prop1Options {
    /// Grid points per axis of the scalar `(T, α)` search.
    pub resolution: usize,
    pub refine: usize,
    /// Random restarts of the vector ascent.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for Prop1Options {
    fn default() -> Self {
        Self {
            resolution: 400,
            refine: 10,
            restarts: 32,
            seed: 0,
        }
    }
}

/// Best weighted sum in one direction and the split attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop1Support {
    /// Bits.
    pub value: f64,
    pub point: RatePoint,
    pub split: GaussianSplit,
}

fn log_det(m: &DMatrix<f64>) -> Result<f64> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidModel("log-determinant of a matrix that is not positive definite".into()))?;
    Ok(2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

fn rates_nats(bc: &GaussianBC, k: &DMatrix<f64>, k1: &DMatrix<f64>) -> Result<(f64, f64)> {
    let g = bc.gain();
    let (gk, gk1) = (g * k * g.transpose(), g * k1 * g.transpose());
    let mut r = (0.0, 0.0);
    for i in 0..2 {
        let n = bc.noise(i);
        let (w1, w2) = if i == 0 { (bc.p(0), bc.p(1)) } else { (1.0 - bc.p(0), 1.0 - bc.p(1)) };
        let inner = log_det(&(&gk1 + n))?;
        r.0 += w1 * (inner - log_det(n)?);
        r.1 += w2 * (log_det(&(&gk + n))? - inner);
    }
    Ok(r)
}

/// Rate pair in bits of a covariance split.
pub fn prop1_rates(bc: &GaussianBC, split: &GaussianSplit) -> Result<RatePoint> {
    if split.k.shape() != (bc.t(), bc.t()) || split.k1.shape() != (bc.t(), bc.t()) {
        return Err(Error::DimensionMismatch {
            expected: bc.t(),
            got: split.k.nrows(),
        });
    }
    split.validate(bc.power())?;
    let (r1, r2) = rates_nats(bc, &split.k, &split.k1)?;
    Ok(RatePoint::new(to_bits(r1), to_bits(r2)))
}

/// Scalar rates in nats at total power `t` with `k1` in receiver 1's layer.
pub(crate) fn scalar_rates(s: &Scalar, t: f64, k1: f64) -> (f64, f64) {
    let g2 = s.g * s.g;
    let (a, b) = (g2 * k1, g2 * t);
    let r1 = s.p1 * ((a + s.n1) / s.n1).ln() + (1.0 - s.p1) * ((a + s.n2) / s.n2).ln();
    let r2 = s.p2 * ((b + s.n1) / (a + s.n1)).ln() + (1.0 - s.p2) * ((b + s.n2) / (a + s.n2)).ln();
    (r1, r2)
}

/// Scalar optimum over `T ∈ [0, P]`, `α ∈ [0, 1]` in nats, as
/// `(value, T, α)`: grid, local grid, then golden-section polish per axis.
pub fn scalar_support(s: &Scalar, l1: f64, l2: f64, resolution: usize, refine: usize) -> (f64, f64, f64) {
    let f = |t: f64, a: f64| {
        let (r1, r2) = scalar_rates(s, t, a * t);
        l1 * r1 + l2 * r2
    };
    let n = resolution.max(1);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let consider = |t: f64, a: f64, best: &mut (f64, f64, f64)| {
        let (t, a) = (t.clamp(0.0, s.power), a.clamp(0.0, 1.0));
        let v = f(t, a);
        if v > best.0 {
            *best = (v, t, a);
        }
    };
    for i in 0..=n {
        for j in 0..=n {
            consider(s.power * i as f64 / n as f64, j as f64 / n as f64, &mut best);
        }
    }
    let (ht, ha) = (s.power / n as f64, 1.0 / n as f64);
    let m = refine.max(1) as i64;
    let (t0, a0) = (best.1, best.2);
    for i in -m..=m {
        for j in -m..=m {
            consider(t0 + ht * i as f64 / m as f64, a0 + ha * j as f64 / m as f64, &mut best);
        }
    }
    let golden = |lo: f64, hi: f64, g: &dyn Fn(f64) -> f64| -> (f64, f64) {
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..80 {
            let (x1, x2) = (hi - r * (hi - lo), lo + r * (hi - lo));
            if g(x1) >= g(x2) {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        let x = 0.5 * (lo + hi);
        (g(x), x)
    };
    for _ in 0..3 {
        let (t, a) = (best.1, best.2);
        let cell = ht / m as f64;
        let (v, t2) = golden((t - cell).max(0.0), (t + cell).min(s.power), &|x| f(x, a));
        if v > best.0 {
            best = (v, t2, a);
        }
        let (t, a) = (best.1, best.2);
        let cell = ha / m as f64;
        let (v, a2) = golden((a - cell).max(0.0), (a + cell).min(1.0), &|x| f(t, x));
        if v > best.0 {
            best = (v, t, a2);
        }
    }
    best
}

/// `K1 = A Aᵀ`, `K = K1 + B Bᵀ`, scaled down onto `tr K <= P`.
fn split_of(x: &[f64], t: usize, power: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let a = DMatrix::from_column_slice(t, t, &x[..t * t]);
    let b = DMatrix::from_column_slice(t, t, &x[t * t..]);
    let k1 = &a * a.transpose();
    let mut k = &k1 + &b * b.transpose();
    let mut k1 = k1;
    let tr = k.trace();
    if tr > power {
        k *= power / tr;
        k1 *= power / tr;
    }
    (k, k1)
}

fn vector_support(bc: &GaussianBC, l1: f64, l2: f64, options: &Prop1Options) -> Result<(f64, DMatrix<f64>, DMatrix<f64>)> {
    let t = bc.t();
    let dim = 2 * t * t;
    let objective = |x: &[f64]| -> f64 {
        let (k, k1) = split_of(x, t, bc.power());
        rates_nats(bc, &k, &k1).map_or(f64::NEG_INFINITY, |(r1, r2)| l1 * r1 + l2 * r2)
    };
    let scale = (bc.power() / t as f64).sqrt();
    let identity: Vec<f64> = (0..t * t).map(|i| if i % (t + 1) == 0 { scale } else { 0.0 }).collect();
    let mut starts: Vec<Vec<f64>> = vec![
        [identity.clone(), vec![0.0; t * t]].concat(),
        [vec![0.0; t * t], identity.clone()].concat(),
    ];
    starts.extend((0..options.restarts).map(|r| {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_add(r as u64));
        (0..dim).map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            scale * z
        }).collect()
    }));
    let runs: Vec<(f64, Vec<f64>)> = starts
        .into_par_iter()
        .map(|mut x| {
            let mut value = objective(&x);
            let mut step = scale;
            let h = 1e-6 * scale;
            for _ in 0..5000 {
                if step < 1e-10 * scale {
                    break;
                }
                let grad: Vec<f64> = (0..dim)
                    .map(|i| {
                        let mut hi = x.clone();
                        let mut lo = x.clone();
                        hi[i] += h;
                        lo[i] -= h;
                        (objective(&hi) - objective(&lo)) / (2.0 * h)
                    })
                    .collect();
                let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                if norm == 0.0 {
                    break;
                }
                loop {
                    let cand: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi + step * gi / norm).collect();
                    let v = objective(&cand);
                    if v > value {
                        x = cand;
                        value = v;
                        break;
                    }
                    step *= 0.5;
                    if step < 1e-10 * scale {
                        break;
                    }
                }
            }
            (value, x)
        })
        .collect();
    let (value, x) = runs
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new()), |a, b| if b.0 > a.0 { b } else { a });
    let (k, k1) = split_of(&x, t, bc.power());
    Ok((value, k, k1))
}

/// Largest `l1 R1 + l2 R2` over Gaussian splits.
///
/// The scalar search is exhaustive on its grid; the vector search is a
/// multi-start ascent and may undershoot the optimum.
pub fn prop1_support(bc: &GaussianBC, direction: &[f64], options: &Prop1Options) -> Result<Prop1Support> {
    let (l1, l2) = (direction[0], direction[1]);
    let split = match bc.as_scalar() {
        Some(s) => {
            let (_, t, a) = scalar_support(&s, l1, l2, options.resolution, options.refine);
            GaussianSplit::scalar(t, a * t)
        }
        None => {
            let (_, k, k1) = vector_support(bc, l1, l2, options)?;
            GaussianSplit::new(k, k1)
        }
    };
    let (r1, r2) = rates_nats(bc, &split.k, &split.k1)?;
    let point = RatePoint::new(to_bits(r1), to_bits(r2)).clamped();
    Ok(Prop1Support {
        value: point.dot(direction),
        point,
        split,
    })
}

fn matrix_json(m: &DMatrix<f64>) -> serde_json::Value {
    json!((0..m.nrows()).map(|i| m.row(i).iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>())
}

/// Supports of the superposition region in each direction.
pub fn prop1_region(bc: &GaussianBC, directions: &[Vec<f64>], options: &Prop1Options) -> Result<RateRegion> {
    let supports = directions
        .par_iter()
        .map(|d| {
            let s = prop1_support(bc, d, options)?;
            Ok(Support::new(d.clone(), s.point).with_params(json!({ "K": matrix_json(&s.split.k), "K1": matrix_json(&s.split.k1) })))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateRegion::from_supports(supports, &[]))
}
