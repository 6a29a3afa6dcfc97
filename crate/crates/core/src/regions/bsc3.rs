//! Capacity region of the three-component BSC channel.

use crate::error::{Error, Result};
use crate::prob::{binary_convolution, binary_entropy, Pmf};
use crate::region::{polygon, RatePoint, RateRegion};

/// Points on `[0, 1/2]` at which the cloud-center curve is sampled.
const CURVE_POINTS: usize = 4000;

/// Rate pair reached by a single cloud-center crossover `b`, as
/// `(Σ p_i (H(b*α_i) - H(α_i)), 1 - Σ q_i H(b*α_i))`.
pub fn three_bsc_curve(alpha: &[f64; 3], p: &Pmf, q: &Pmf, b: f64) -> RatePoint {
    let mut r1 = 0.0;
    let mut r2 = 1.0;
    for i in 0..3 {
        let h = binary_entropy(binary_convolution(b, alpha[i]));
        r1 += p[i] * (h - binary_entropy(alpha[i]));
        r2 -= q[i] * h;
    }
    RatePoint::new(r1, r2)
}

/// Keeps the part of a convex polygon with `r1 + r2 <= cap`.
fn clip_sum(vertices: &[RatePoint], cap: f64) -> Vec<RatePoint> {
    let f = |v: &RatePoint| v.r1 + v.r2 - cap;
    let mut out = Vec::new();
    for (i, a) in vertices.iter().enumerate() {
        let b = &vertices[(i + 1) % vertices.len()];
        let (fa, fb) = (f(a), f(b));
        if fa <= 0.0 {
            out.push(*a);
        }
        if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
            let t = fa / (fa - fb);
            out.push(RatePoint::new(a.r1 + t * (b.r1 - a.r1), a.r2 + t * (b.r2 - a.r2)));
        }
    }
    out
}

/// Region for BSC components with crossovers `alpha` seen by receiver 1 with
/// pmf `p` and by receiver 2 with pmf `q`.
///
/// Two-point mixtures of the cloud-center curve give the hull of the curve,
/// which is then cut by the sum-rate cap `1 - Σ p_i H(α_i)`. Receivers are
/// exchanged first when receiver 2 has the larger capacity.
pub fn three_bsc_region(alpha: [f64; 3], p: &Pmf, q: &Pmf, directions: &[Vec<f64>]) -> Result<RateRegion> {
    if p.len() != 3 || q.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: if p.len() != 3 { p.len() } else { q.len() },
        });
    }
    if let Some(a) = alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::InvalidChannel(format!("crossover {a} outside [0, 1]")));
    }
    let alpha = alpha.map(|a| a.min(1.0 - a));
    let capacity = |s: &Pmf| 1.0 - (0..3).map(|i| s[i] * binary_entropy(alpha[i])).sum::<f64>();
    let swap = capacity(q) > capacity(p);
    let (p, q) = if swap { (q, p) } else { (p, q) };
    let curve: Vec<RatePoint> = (0..=CURVE_POINTS)
        .map(|i| three_bsc_curve(&alpha, p, q, 0.5 * i as f64 / CURVE_POINTS as f64))
        .collect();
    let mut vertices = clip_sum(&polygon(&curve), capacity(p));
    if swap {
        vertices = vertices.into_iter().map(|v| RatePoint::new(v.r2, v.r1)).collect();
    }
    Ok(RateRegion::from_points(&vertices, directions))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pmf(w: &[f64]) -> Pmf {
        Pmf::new(w.to_vec()).unwrap()
    }

    #[test]
    fn equal_crossovers_give_time_division() {
        let c = 1.0 - binary_entropy(0.11);
        let r = three_bsc_region([0.11; 3], &pmf(&[0.2, 0.3, 0.5]), &pmf(&[0.6, 0.1, 0.3]), &[vec![1.0, 1.0], vec![1.0, 3.0]]).unwrap();
        assert!((r.supports[0].value - c).abs() < 1e-12);
        assert!((r.supports[1].value - 3.0 * c).abs() < 1e-12);
    }

    #[test]
    fn zero_cloud_crossover_is_the_second_corner() {
        let alpha = [0.2, 0.3, 0.4];
        let (p, q) = (pmf(&[1.0 / 3.0; 3]), pmf(&[0.2, 0.3, 0.5]));
        let pt = three_bsc_curve(&alpha, &p, &q, 0.0);
        let want = 1.0 - (0..3).map(|i| q[i] * binary_entropy(alpha[i])).sum::<f64>();
        assert_eq!(pt.r1, 0.0);
        assert!((pt.r2 - want).abs() < 1e-15);
    }

    #[test]
    fn more_capable_instance_reaches_the_cap() {
        let alpha = [0.2, 0.3, 0.4];
        let p = pmf(&[1.0 / 3.0; 3]);
        let r = three_bsc_region(alpha, &p, &pmf(&[0.2, 0.3, 0.5]), &[vec![1.0, 1.0]]).unwrap();
        let cap = 1.0 - alpha.iter().map(|&a| binary_entropy(a)).sum::<f64>() / 3.0;
        assert!((r.max_sum_rate() - cap).abs() < 1e-12);
        r.validate().unwrap();
    }

    #[test]
    fn crossovers_above_half_are_folded() {
        let (p, q) = (pmf(&[0.5, 0.25, 0.25]), pmf(&[0.1, 0.1, 0.8]));
        let d = [vec![1.0, 0.5], vec![1.0, 2.0]];
        let a = three_bsc_region([0.1, 0.2, 0.3], &p, &q, &d).unwrap();
        let b = three_bsc_region([0.9, 0.2, 0.7], &p, &q, &d).unwrap();
        for (x, y) in a.supports.iter().zip(&b.supports) {
            assert!((x.value - y.value).abs() < 1e-12);
        }
    }
}
