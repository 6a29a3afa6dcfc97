//! Marton sum rate restricted to randomized time division over five cells.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bc_state::{Receiver, StateBC};
use crate::error::{Error, Result};
use crate::prob::{entropy_of, plogp, Pmf};
use crate::region::RatePoint;
use crate::search::first_argmax;

/// Number of time-sharing cells.
pub const CELLS: usize = 5;

/// Optimized cell weights, split and per-cell inputs.
///
/// Cells `0..split` carry private information to receiver 1 and the rest to
/// receiver 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartonRTDParams {
    pub weights: Pmf,
    pub split: usize,
    /// `P(X = 1)` in each cell.
    pub inputs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MartonOptions {
    pub restarts: usize,
    pub seed: u64,
}

impl Default for MartonOptions {
    fn default() -> Self {
        Self { restarts: 64, seed: 0 }
    }
}

/// `(I(X; Y1 | S), I(X; Y2 | S))` for a binary input, as a function of
/// `P(X = 1)`.
struct BinaryMi {
    /// Per component: state weights at both receivers, rows for `x = 0, 1`
    /// and their entropies.
    parts: Vec<([f64; 2], Vec<f64>, Vec<f64>, f64, f64)>,
}

impl BinaryMi {
    fn new(bc: &StateBC) -> Self {
        let (s1, s2) = (bc.state_pmf(Receiver::One), bc.state_pmf(Receiver::Two));
        let parts = bc
            .components()
            .iter()
            .enumerate()
            .filter(|(i, _)| s1[*i] > 0.0 || s2[*i] > 0.0)
            .map(|(i, c)| {
                let (r0, r1) = (c.row(0).to_vec(), c.row(1).to_vec());
                let (h0, h1) = (entropy_of(&r0), entropy_of(&r1));
                ([s1[i], s2[i]], r0, r1, h0, h1)
            })
            .collect();
        Self { parts }
    }

    fn eval(&self, x: f64) -> [f64; 2] {
        let mut total = [0.0; 2];
        for (w, r0, r1, h0, h1) in &self.parts {
            let h: f64 = r0.iter().zip(r1).map(|(a, b)| plogp((1.0 - x) * a + x * b)).sum();
            let i = (h - (1.0 - x) * h0 - x * h1).max(0.0);
            total[0] += w[0] * i;
            total[1] += w[1] * i;
        }
        total
    }
}

/// Common part `min(I(W;Y1|S), I(W;Y2|S))` and the two private parts.
fn parts(mi: &BinaryMi, beta: &[f64], inputs: &[f64], split: usize) -> (f64, [f64; 2]) {
    let mean: f64 = beta.iter().zip(inputs).map(|(b, x)| b * x).sum();
    let mut cloud = mi.eval(mean);
    let mut private = [0.0; 2];
    for (j, (&b, &x)) in beta.iter().zip(inputs).enumerate() {
        if b == 0.0 {
            continue;
        }
        let [i1, i2] = mi.eval(x);
        cloud[0] -= b * i1;
        cloud[1] -= b * i2;
        private[usize::from(j >= split)] += b * if j < split { i1 } else { i2 };
    }
    (cloud[0].min(cloud[1]), private)
}

fn objective(mi: &BinaryMi, beta: &[f64], inputs: &[f64], split: usize) -> f64 {
    let (common, private) = parts(mi, beta, inputs, split);
    common + private[0] + private[1]
}

fn check_binary(bc: &StateBC) -> Result<()> {
    if bc.input_size() != 2 {
        return Err(Error::Unsupported(format!(
            "randomized time division needs a binary input, got {}",
            bc.input_size()
        )));
    }
    Ok(())
}

/// The sum-rate bound at fixed parameters.
pub fn marton_rtd_sum(bc: &StateBC, params: &MartonRTDParams) -> Result<f64> {
    check_binary(bc)?;
    if params.weights.len() != CELLS || params.inputs.len() != CELLS || params.split > CELLS {
        return Err(Error::InvalidModel("time division needs five cells and a split in 0..=5".into()));
    }
    Ok(objective(&BinaryMi::new(bc), params.weights.weights(), &params.inputs, params.split))
}

/// Sum-rate point with the common part given to receiver 1.
pub fn marton_rtd_point(bc: &StateBC, params: &MartonRTDParams) -> Result<RatePoint> {
    marton_rtd_sum(bc, params)?;
    let (common, private) = parts(&BinaryMi::new(bc), params.weights.weights(), &params.inputs, params.split);
    Ok(RatePoint::new(common.max(0.0) + private[0], private[1]))
}

/// Coordinates are five unnormalized weights then five inputs, all in [0, 1].
struct Problem<'a> {
    mi: &'a BinaryMi,
    split: usize,
}

impl Problem<'_> {
    fn value(&self, z: &[f64]) -> f64 {
        let total: f64 = z[..CELLS].iter().sum();
        if total <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let beta: Vec<f64> = z[..CELLS].iter().map(|w| w / total).collect();
        objective(self.mi, &beta, &z[CELLS..], self.split)
    }

    /// Maximizes coordinate `i` with the others fixed.
    fn line_search(&self, z: &mut [f64], i: usize, current: f64) -> f64 {
        const STEPS: usize = 24;
        let mut probe = z.to_vec();
        let at = |t: f64, probe: &mut Vec<f64>| {
            probe[i] = t;
            self.value(probe)
        };
        let values: Vec<f64> = (0..=STEPS).map(|s| at(s as f64 / STEPS as f64, &mut probe)).collect();
        let s = first_argmax(&values).expect("nonempty");
        let (mut lo, mut hi) = ((s.max(1) - 1) as f64 / STEPS as f64, (s + 1).min(STEPS) as f64 / STEPS as f64);
        let (mut best_t, mut best_v) = (s as f64 / STEPS as f64, values[s]);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..30 {
            let (a, b) = (hi - g * (hi - lo), lo + g * (hi - lo));
            let (va, vb) = (at(a, &mut probe), at(b, &mut probe));
            for (t, v) in [(a, va), (b, vb)] {
                if v > best_v {
                    best_t = t;
                    best_v = v;
                }
            }
            if va >= vb {
                hi = b;
            } else {
                lo = a;
            }
        }
        if best_v > current {
            z[i] = best_t;
            best_v
        } else {
            current
        }
    }

    fn ascend(&self, z: &mut [f64]) -> f64 {
        let mut value = self.value(z);
        for _ in 0..500 {
            let before = value;
            for i in 0..2 * CELLS {
                value = self.line_search(z, i, value);
            }
            if value - before < 1e-7 {
                break;
            }
        }
        value
    }

    /// Single-coordinate steps of `1e-3` until no step improves.
    fn polish(&self, z: &mut [f64], mut value: f64) -> f64 {
        const STEP: f64 = 1e-3;
        let mut improved = true;
        while improved {
            improved = false;
            for i in 0..2 * CELLS {
                for dir in [-1.0, 1.0] {
                    loop {
                        let t = z[i] + dir * STEP;
                        if !(0.0..=1.0).contains(&t) {
                            break;
                        }
                        let old = z[i];
                        z[i] = t;
                        let v = self.value(z);
                        if v > value + 1e-15 {
                            value = v;
                            improved = true;
                        } else {
                            z[i] = old;
                            break;
                        }
                    }
                }
            }
        }
        value
    }
}

/// Maximizes the randomized time-division sum rate over the split, the cell
/// weights and the cell inputs.
///
/// Every restart draws its start from its own seeded stream, so results do
/// not depend on the thread count.
pub fn marton_rtd_sumrate(bc: &StateBC, options: MartonOptions) -> Result<(f64, MartonRTDParams)> {
    check_binary(bc)?;
    let mi = BinaryMi::new(bc);
    let runs: Vec<(f64, usize, Vec<f64>)> = (0..options.restarts.max(1))
        .into_par_iter()
        .flat_map_iter(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_add(r as u64));
            // stratify the first input over the restarts
            let stratum = (r as f64 + rng.random::<f64>()) / options.restarts.max(1) as f64;
            let start: Vec<f64> = (0..2 * CELLS)
                .map(|i| if i == CELLS { stratum } else { rng.random::<f64>() })
                .collect();
            let mi = &mi;
            (0..=CELLS).map(move |split| {
                let problem = Problem { mi, split };
                let mut z = start.clone();
                let v = problem.ascend(&mut z);
                let v = problem.polish(&mut z, v);
                (v, split, z)
            })
        })
        .collect();
    let values: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let (value, split, z) = runs[first_argmax(&values).expect("at least one restart")].clone();
    let params = MartonRTDParams {
        weights: Pmf::from_unnormalized(z[..CELLS].to_vec())?,
        split,
        inputs: z[CELLS..].to_vec(),
    };
    Ok((value, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{binary_entropy, ChannelMatrix};

    fn quick() -> MartonOptions {
        MartonOptions { restarts: 4, seed: 7 }
    }

    #[test]
    fn identical_receivers_reach_the_common_capacity() {
        let bc = StateBC::two_component(ChannelMatrix::bsc(0.11), ChannelMatrix::bsc(0.2), 0.6, 0.6).unwrap();
        let c = 0.6 * (1.0 - binary_entropy(0.11)) + 0.4 * (1.0 - binary_entropy(0.2));
        let (v, params) = marton_rtd_sumrate(&bc, quick()).unwrap();
        assert!((v - c).abs() < 1e-6);
        assert!((marton_rtd_sum(&bc, &params).unwrap() - v).abs() < 1e-12);
    }

    #[test]
    fn evaluator_matches_direct_mutual_information() {
        let bc = StateBC::two_component(ChannelMatrix::bsc(0.1), ChannelMatrix::bec(0.3), 0.7, 0.2).unwrap();
        let mi = BinaryMi::new(&bc);
        for x in [0.0, 0.13, 0.5, 0.91] {
            let p = Pmf::bernoulli(x);
            let [a, b] = mi.eval(x);
            assert!((a - bc.conditional_mi(Receiver::One, &p).unwrap()).abs() < 1e-12);
            assert!((b - bc.conditional_mi(Receiver::Two, &p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_ternary_inputs() {
        let w = ChannelMatrix::deterministic(&[0, 1, 2], 3).unwrap();
        let bc = StateBC::two_component(w.clone(), w, 0.5, 0.5).unwrap();
        assert!(matches!(marton_rtd_sumrate(&bc, quick()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn same_seed_same_answer() {
        let bc = StateBC::two_component(ChannelMatrix::bsc(0.1), ChannelMatrix::z_channel(0.4), 0.7, 0.2).unwrap();
        let a = marton_rtd_sumrate(&bc, quick()).unwrap();
        let b = marton_rtd_sumrate(&bc, quick()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn point_splits_the_sum() {
        let bc = StateBC::two_component(ChannelMatrix::bsc(0.1), ChannelMatrix::bec(0.3), 0.7, 0.2).unwrap();
        let (v, params) = marton_rtd_sumrate(&bc, quick()).unwrap();
        let p = marton_rtd_point(&bc, &params).unwrap();
        assert!((p.r1 + p.r2 - v).abs() < 1e-12);
        assert!(p.r1 >= 0.0 && p.r2 >= 0.0);
    }
}
