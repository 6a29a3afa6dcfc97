#![allow(dead_code)]

use bcregions::prob::{ChannelMatrix, Pmf};
use bcregions::region::RatePoint;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Dirichlet(1, ..., 1) weights with a small chance of exact zeros.
pub fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..n)
            .map(|_| if rng.random::<f64>() < 0.1 { 0.0 } else { -rng.random::<f64>().max(1e-300).ln() })
            .collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            return w.into_iter().map(|x| x / total).collect();
        }
    }
}

pub fn random_pmf(rng: &mut ChaCha8Rng, n: usize) -> Pmf {
    Pmf::new(random_weights(rng, n)).unwrap()
}

pub fn random_channel(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ChannelMatrix {
    ChannelMatrix::new((0..rows).map(|_| random_weights(rng, cols)).collect()).unwrap()
}

/// Largest amount by which `point` leaves the polygon spanned by `vertices`
/// along any of `directions`.
pub fn excess(point: &RatePoint, vertices: &[RatePoint], directions: &[Vec<f64>]) -> f64 {
    directions
        .iter()
        .map(|d| {
            let best = vertices.iter().map(|v| v.dot(d)).fold(f64::NEG_INFINITY, f64::max);
            point.dot(d) - best
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn has_vertex(vertices: &[RatePoint], r1: f64, r2: f64, tol: f64) -> bool {
    vertices.iter().any(|v| (v.r1 - r1).abs() <= tol && (v.r2 - r2).abs() <= tol)
}

/// Unit directions around the nonnegative quadrant.
pub fn fan(n: usize) -> Vec<Vec<f64>> {
    (0..=n)
        .map(|i| {
            let t = std::f64::consts::FRAC_PI_2 * i as f64 / n as f64;
            vec![t.cos(), t.sin()]
        })
        .collect()
}

/// Random channel with between 2 and `max_cols` outputs.
pub fn random_channel_upto(rng: &mut ChaCha8Rng, rows: usize, max_cols: usize) -> ChannelMatrix {
    let cols = rng.random_range(2..=max_cols);
    random_channel(rng, rows, cols)
}
