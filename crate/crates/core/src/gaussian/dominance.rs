//! Monte-Carlo check that discrete superposition inputs do not beat the
//! Gaussian split on the complex scalar channel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use super::model::{GaussianBC, Scalar};
use super::prop1::scalar_support;
use super::to_bits;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceOptions {
    pub strategies: usize,
    /// Monte-Carlo samples per strategy.
    pub samples: usize,
    pub blocks: usize,
    pub lambdas: Vec<f64>,
    pub seed: u64,
}

impl Default for DominanceOptions {
    fn default() -> Self {
        Self {
            strategies: 100,
            samples: 1_000_000,
            blocks: 100,
            lambdas: vec![1.0, 1.5, 2.0, 4.0],
            seed: 0,
        }
    }
}

/// One sampled input: cloud atoms with their conditional constellations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Strategy {
    pub clouds: Vec<(f64, Vec<(f64, [f64; 2])>)>,
}

impl Strategy {
    pub fn power(&self) -> f64 {
        self.clouds
            .iter()
            .map(|(w, xs)| w * xs.iter().map(|(p, x)| p * (x[0] * x[0] + x[1] * x[1])).sum::<f64>())
            .sum()
    }

    /// Constellation points on a grid of step 1/4 in `[-2, 2]²`, rescaled to
    /// a random fraction of the power budget.
    fn random(rng: &mut ChaCha8Rng, power: f64) -> Self {
        loop {
            let clouds: Vec<(f64, Vec<(f64, [f64; 2])>)> = (0..rng.random_range(1..=3))
                .map(|_| {
                    let xs = (0..rng.random_range(1..=4))
                        .map(|_| {
                            let q = |rng: &mut ChaCha8Rng| rng.random_range(-8i32..=8) as f64 / 4.0;
                            (rng.random::<f64>() + 0.05, [q(rng), q(rng)])
                        })
                        .collect::<Vec<_>>();
                    (rng.random::<f64>() + 0.05, normalize(xs))
                })
                .collect();
            let total: f64 = clouds.iter().map(|c| c.0).sum();
            let mut s = Strategy {
                clouds: clouds.into_iter().map(|(w, xs)| (w / total, xs)).collect(),
            };
            let p = s.power();
            if p <= 0.0 {
                continue;
            }
            let scale = (rng.random_range(0.5..=1.0) * power / p).sqrt();
            for (_, xs) in s.clouds.iter_mut() {
                for (_, x) in xs.iter_mut() {
                    x[0] *= scale;
                    x[1] *= scale;
                }
            }
            return s;
        }
    }
}

fn normalize(xs: Vec<(f64, [f64; 2])>) -> Vec<(f64, [f64; 2])> {
    let total: f64 = xs.iter().map(|x| x.0).sum();
    xs.into_iter().map(|(w, x)| (w / total, x)).collect()
}

/// Mean and block-jackknife standard error.
fn jackknife(values: &[f64], blocks: usize) -> (f64, f64) {
    let b = blocks.clamp(2, values.len().max(2));
    let size = values.len() / b;
    let sums: Vec<f64> = (0..b).map(|i| values[i * size..(i + 1) * size].iter().sum()).collect();
    let total: f64 = sums.iter().sum();
    let n = (size * b) as f64;
    let loo: Vec<f64> = sums.iter().map(|s| (total - s) / (n - size as f64)).collect();
    let mean_loo = loo.iter().sum::<f64>() / b as f64;
    let var = (b as f64 - 1.0) / b as f64 * loo.iter().map(|x| (x - mean_loo).powi(2)).sum::<f64>();
    (total / n, var.sqrt())
}

/// Estimates `h(g X + Z)` in nats for `X` from `mixture`, `Z ~ CN(0, n)`.
fn entropy_estimate(mixture: &[(f64, [f64; 2])], g: f64, n: f64, samples: usize, blocks: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let normal = Normal::new(0.0, (n / 2.0).sqrt()).expect("positive variance");
    let cumulative: Vec<f64> = mixture
        .iter()
        .scan(0.0, |acc, (w, _)| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let log_norm = (std::f64::consts::PI * n).ln();
    let values: Vec<f64> = (0..samples)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * cumulative.last().copied().unwrap_or(1.0);
            let k = cumulative.iter().position(|c| u < *c).unwrap_or(mixture.len() - 1);
            let x = mixture[k].1;
            let y = [g * x[0] + normal.sample(rng), g * x[1] + normal.sample(rng)];
            let exps: Vec<f64> = mixture
                .iter()
                .map(|(w, x)| w.ln() - ((y[0] - g * x[0]).powi(2) + (y[1] - g * x[1]).powi(2)) / n)
                .collect();
            let m = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + exps.iter().map(|e| (e - m).exp()).sum::<f64>().ln();
            log_norm - lse
        })
        .collect();
    jackknife(&values, blocks)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceOutcome {
    pub lambda: f64,
    /// Estimated `I(X;Y1|U,S) + λ I(U;Y2|S)` in bits.
    pub estimate: f64,
    pub sigma: f64,
    /// Gaussian support in bits.
    pub gaussian: f64,
    pub exceeds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub outcomes: Vec<DominanceOutcome>,
    pub exceedances: usize,
}

/// Estimates the weighted superposition value of one strategy, in nats,
/// with its standard error.
pub fn estimate(s: &Scalar, strategy: &Strategy, lambda: f64, samples: usize, blocks: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let mut value = 0.0;
    let mut var = 0.0;
    let whole: Vec<(f64, [f64; 2])> = strategy
        .clouds
        .iter()
        .flat_map(|(w, xs)| xs.iter().map(move |(p, x)| (w * p, *x)))
        .collect();
    // terms: (coefficient, mixture)
    let mut terms: Vec<(f64, f64, &[(f64, [f64; 2])])> = Vec::new();
    for (i, n) in [s.n1, s.n2].into_iter().enumerate() {
        let c1 = if i == 0 { s.p1 } else { 1.0 - s.p1 };
        let c2 = if i == 0 { s.p2 } else { 1.0 - s.p2 };
        value -= c1 * (std::f64::consts::PI * std::f64::consts::E * n).ln();
        terms.push((lambda * c2, n, &whole));
        for (w, xs) in &strategy.clouds {
            terms.push((w * (c1 - lambda * c2), n, xs));
        }
    }
    terms.retain(|t| t.0 != 0.0);
    let per = (samples / terms.len().max(1)).max(blocks * 2);
    for (c, n, mix) in terms {
        let (h, e) = entropy_estimate(mix, s.g, n, per, blocks, rng);
        value += c * h;
        var += c * c * e * e;
    }
    (value, var.sqrt())
}

/// Samples strategies and counts those exceeding the Gaussian support by
/// more than three standard errors.
pub fn dominance_harness(bc: &GaussianBC, options: &DominanceOptions) -> Result<DominanceReport> {
    let s = bc.require_scalar()?;
    let gaussian: Vec<f64> = options
        .lambdas
        .iter()
        .map(|&l| to_bits(scalar_support(&s, 1.0, l, 400, 10).0))
        .collect();
    let outcomes: Vec<DominanceOutcome> = (0..options.strategies)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_add(i as u64));
            let k = i % options.lambdas.len();
            let lambda = options.lambdas[k];
            let strategy = Strategy::random(&mut rng, s.power);
            let (v, e) = estimate(&s, &strategy, lambda, options.samples, options.blocks, &mut rng);
            let (estimate, sigma) = (to_bits(v), to_bits(e));
            DominanceOutcome {
                lambda,
                estimate,
                sigma,
                gaussian: gaussian[k],
                exceeds: estimate > gaussian[k] + 3.0 * sigma,
            }
        })
        .collect();
    let exceedances = outcomes.iter().filter(|o| o.exceeds).count();
    Ok(DominanceReport { outcomes, exceedances })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Scalar {
        Scalar {
            g: 1.0,
            n1: 1.0,
            n2: 2.0,
            power: 10.0,
            p1: 0.8,
            p2: 0.3,
        }
    }

    #[test]
    fn jackknife_of_a_constant_has_no_error() {
        let (m, e) = jackknife(&[2.5; 1000], 10);
        assert!((m - 2.5).abs() < 1e-12 && e.abs() < 1e-12);
    }

    #[test]
    fn point_input_has_noise_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (h, e) = entropy_estimate(&[(1.0, [0.3, -1.0])], 1.0, 2.0, 20_000, 20, &mut rng);
        let want = (std::f64::consts::PI * std::f64::consts::E * 2.0).ln();
        assert!((h - want).abs() < 4.0 * e.max(1e-3), "{h} vs {want} ± {e}");
    }

    #[test]
    fn bpsk_layer_matches_numerical_integral() {
        // one cloud, two equiprobable points: I(X;Y1|U,S) by quadrature vs Monte Carlo
        let s = Scalar { p1: 1.0, p2: 1.0, ..example() };
        let strategy = Strategy {
            clouds: vec![(1.0, vec![(0.5, [1.0, 0.0]), (0.5, [-1.0, 0.0])])],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (v, e) = estimate(&s, &strategy, 1.0, 400_000, 100, &mut rng);
        // h(Y) for a real-axis BPSK mixture in CN(0, 1): imaginary part is N(0, 1/2)
        let h_imag = 0.5 * (std::f64::consts::PI * std::f64::consts::E).ln();
        let sd = 0.5f64.sqrt();
        let pdf = |y: f64| {
            let g = |m: f64| (-(y - m).powi(2) / (2.0 * sd * sd)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt());
            0.5 * g(1.0) + 0.5 * g(-1.0)
        };
        let h_real: f64 = (0..200_000)
            .map(|i| {
                let y = -8.0 + 16.0 * (i as f64 + 0.5) / 200_000.0;
                let f = pdf(y);
                if f > 0.0 { -f * f.ln() * 16.0 / 200_000.0 } else { 0.0 }
            })
            .sum();
        let want = h_real + h_imag - (std::f64::consts::PI * std::f64::consts::E).ln();
        assert!((v - want).abs() < 4.0 * e, "{v} vs {want} ± {e}");
    }

    #[test]
    fn small_harness_is_deterministic() {
        let bc = GaussianBC::scalar(example()).unwrap();
        let opts = DominanceOptions {
            strategies: 4,
            samples: 20_000,
            blocks: 20,
            ..DominanceOptions::default()
        };
        let a = dominance_harness(&bc, &opts).unwrap();
        assert_eq!(a, dominance_harness(&bc, &opts).unwrap());
        assert_eq!(a.exceedances, 0);
    }
}
