//! Closed form for erasure components.

use crate::error::{Error, Result};
use crate::prob::Pmf;
use crate::region::{RatePoint, RateRegion};

/// `(C1, C2)` with `Cj = 1 - Σ pj(i) ε_i`.
pub fn bec_capacities(eps: &[f64], p1: &Pmf, p2: &Pmf) -> Result<(f64, f64)> {
    if let Some(e) = eps.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(Error::InvalidChannel(format!("erasure probability {e} outside [0, 1]")));
    }
    for p in [p1, p2] {
        if p.len() != eps.len() {
            return Err(Error::DimensionMismatch {
                expected: eps.len(),
                got: p.len(),
            });
        }
    }
    let c = |p: &Pmf| 1.0 - p.weights().iter().zip(eps).map(|(w, e)| w * e).sum::<f64>();
    Ok((c(p1), c(p2)))
}

/// The triangle `R1/C1 + R2/C2 <= 1`.
pub fn bec_region(eps: &[f64], p1: &Pmf, p2: &Pmf, directions: &[Vec<f64>]) -> Result<RateRegion> {
    let (c1, c2) = bec_capacities(eps, p1, p2)?;
    Ok(RateRegion::from_points(&[RatePoint::new(c1, 0.0), RatePoint::new(0.0, c2)], directions))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixture_capacities() {
        let p = |w: Vec<f64>| Pmf::new(w).unwrap();
        let (c1, c2) = bec_capacities(&[0.2, 0.6], &p(vec![0.8, 0.2]), &p(vec![0.3, 0.7])).unwrap();
        assert!((c1 - 0.72).abs() < 1e-15);
        assert!((c2 - 0.52).abs() < 1e-15);
        let (c1, c2) = bec_capacities(&[0.0, 1.0], &Pmf::point(2, 0), &Pmf::point(2, 1)).unwrap();
        assert_eq!((c1, c2), (1.0, 0.0));
    }

    #[test]
    fn single_component_triangle() {
        let r = bec_region(&[0.25], &Pmf::point(1, 0), &Pmf::point(1, 0), &[vec![1.0, 2.0]]).unwrap();
        let got: Vec<(f64, f64)> = r.vertices.iter().map(|v| (v.r1, v.r2)).collect();
        assert_eq!(got, vec![(0.0, 0.0), (0.75, 0.0), (0.0, 0.75)]);
        assert_eq!(r.supports[0].value, 1.5);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(bec_capacities(&[1.5], &Pmf::point(1, 0), &Pmf::point(1, 0)).is_err());
        assert!(bec_capacities(&[0.5, 0.5], &Pmf::point(1, 0), &Pmf::uniform(2)).is_err());
    }
}
