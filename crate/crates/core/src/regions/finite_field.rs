//! Deterministic components that are two linear forms over a prime field.

use crate::bc_state::DeterministicPair;
use crate::error::{Error, Result};
use crate::region::{RatePoint, RateRegion};

pub fn is_prime(k: u64) -> bool {
    k >= 2 && (2..).take_while(|d| d * d <= k).all(|d| k % d != 0)
}

fn check_field(k: u64) -> Result<()> {
    if !is_prime(k) {
        return Err(Error::InvalidModel(format!("field size {k} is not prime")));
    }
    Ok(())
}

/// Maps `x = K x1 + x2` to `(h11 x1 + h12 x2, h21 x1 + h22 x2) mod K`.
pub fn finite_field_pair(k: u64, gain: [[u64; 2]; 2]) -> Result<DeterministicPair> {
    check_field(k)?;
    let det = (gain[0][0] * gain[1][1] % k + k * k - gain[0][1] * gain[1][0] % k) % k;
    if det == 0 {
        return Err(Error::InvalidModel(format!("gain {gain:?} is singular mod {k}")));
    }
    let n = k * k;
    let form = |row: [u64; 2]| -> Vec<usize> { (0..n).map(|x| ((row[0] * (x / k) + row[1] * (x % k)) % k) as usize).collect() };
    DeterministicPair::new(form(gain[0]), form(gain[1]))
}

/// Hull of `(0,0)`, `(1,0)`, `(0,1)` and the inner corner, in bits.
///
/// The inner corner is `(p1, 1 - p2) log K` when `p1 >= p2` and
/// `(1 - p1, p2) log K` otherwise.
pub fn finite_field_region(k: u64, p1: f64, p2: f64, directions: &[Vec<f64>]) -> Result<RateRegion> {
    check_field(k)?;
    for p in [p1, p2] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidPmf(format!("state probability {p} outside [0, 1]")));
        }
    }
    let scale = (k as f64).log2();
    let corner = if p1 >= p2 { (p1, 1.0 - p2) } else { (1.0 - p1, p2) };
    let points = [
        RatePoint::new(scale, 0.0),
        RatePoint::new(0.0, scale),
        RatePoint::new(corner.0 * scale, corner.1 * scale),
    ];
    Ok(RateRegion::from_points(&points, directions))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vertices(r: &RateRegion) -> Vec<(f64, f64)> {
        r.vertices.iter().map(|v| (v.r1, v.r2)).collect()
    }

    #[test]
    fn primes() {
        let got: Vec<u64> = (0..20).filter(|&k| is_prime(k)).collect();
        assert_eq!(got, vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn no_state_gives_the_square() {
        let r = finite_field_region(2, 1.0, 0.0, &[vec![1.0, 1.0]]).unwrap();
        assert_eq!(vertices(&r), vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
    }

    #[test]
    fn equal_states_give_time_division() {
        let r = finite_field_region(5, 0.5, 0.5, &[vec![1.0, 1.0]]).unwrap();
        let s = 5f64.log2();
        assert_eq!(vertices(&r), vec![(0.0, 0.0), (s, 0.0), (0.0, s)]);
    }

    #[test]
    fn inner_corner() {
        let r = finite_field_region(2, 0.7, 0.4, &[]).unwrap();
        assert_eq!(vertices(&r), vec![(0.0, 0.0), (1.0, 0.0), (0.7, 0.6), (0.0, 1.0)]);
        let r = finite_field_region(2, 0.4, 0.7, &[]).unwrap();
        assert_eq!(vertices(&r), vec![(0.0, 0.0), (1.0, 0.0), (0.6, 0.7), (0.0, 1.0)]);
    }

    #[test]
    fn rejects_composites_and_singular_gains() {
        assert!(finite_field_region(4, 0.7, 0.4, &[]).is_err());
        assert!(finite_field_pair(3, [[1, 2], [1, 1]]).is_ok());
        assert!(finite_field_pair(3, [[1, 2], [2, 1]]).is_err());
        assert!(finite_field_pair(3, [[1, 2], [2, 4]]).is_err());
        assert!(finite_field_pair(6, [[1, 0], [0, 1]]).is_err());
    }

    #[test]
    fn pair_maps() {
        let det = finite_field_pair(2, [[1, 0], [1, 1]]).unwrap();
        assert_eq!(det.f1(), &[0, 0, 1, 1]);
        assert_eq!(det.f2(), &[0, 1, 1, 0]);
    }
}
