//! Capacity region of the deterministic-component state channel.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{check_input_size, pmf_json};
use crate::bc_state::DeterministicPair;
use crate::error::{Error, Result};
use crate::prob::Pmf;
use crate::region::{pentagon_max, RatePoint, RateRegion, Support};
use crate::search::{maximize, GridSpec};

/// Largest input alphabet accepted here; four covers the binary finite field.
pub const TDCS_MAX_INPUT: usize = 4;

/// Auxiliary pair `(U1, U2)` achieving a support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TdcsChoice {
    /// `(X, ∅)`
    First,
    /// `(f1, f2)`
    Split,
    /// `(∅, X)`
    Second,
}

/// Rate bounds of one choice at one input, as `(a, b, sum)`.
fn bounds(det: &DeterministicPair, p1: f64, p2: f64, px: &Pmf, choice: TdcsChoice) -> (f64, f64, f64) {
    let (h1, h2, i12) = det.entropies(px);
    match choice {
        TdcsChoice::First => {
            let r = p1 * h1 + (1.0 - p1) * h2;
            (r, 0.0, r)
        }
        TdcsChoice::Second => {
            let r = p2 * h1 + (1.0 - p2) * h2;
            (0.0, r, r)
        }
        TdcsChoice::Split => {
            let a = p1 * h1 + (1.0 - p1) * i12;
            let b = p2 * i12 + (1.0 - p2) * h2;
            (a, b, a + b - i12)
        }
    }
}

fn best_choice(det: &DeterministicPair, p1: f64, p2: f64, px: &Pmf, l1: f64, l2: f64) -> (f64, RatePoint, TdcsChoice) {
    [TdcsChoice::First, TdcsChoice::Split, TdcsChoice::Second]
        .into_iter()
        .map(|c| {
            let (a, b, s) = bounds(det, p1, p2, px, c);
            let (v, pt) = pentagon_max(a, b, s, l1, l2);
            (v, pt, c)
        })
        .fold(None, |acc: Option<(f64, RatePoint, TdcsChoice)>, cand| match acc {
            Some(best) if best.0 >= cand.0 => Some(best),
            _ => Some(cand),
        })
        .expect("three choices")
}

fn check(det: &DeterministicPair, p1: f64, p2: f64) -> Result<()> {
    check_input_size(det.input_size(), TDCS_MAX_INPUT)?;
    for p in [p1, p2] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidPmf(format!("state probability {p} outside [0, 1]")));
        }
    }
    Ok(())
}

/// Weighted-sum supports of the capacity region, one per direction.
///
/// Receiver `j` sees `f1(X)` with probability `pj` and `f2(X)` otherwise.
/// When `p1 < p2` the two maps are exchanged first, which leaves the region
/// unchanged.
pub fn tdcs_supports(
    det: &DeterministicPair,
    p1: f64,
    p2: f64,
    directions: &[Vec<f64>],
    grid: GridSpec,
) -> Result<Vec<Support>> {
    check(det, p1, p2)?;
    let (det, p1, p2) = if p1 < p2 {
        (DeterministicPair::new(det.f2().to_vec(), det.f1().to_vec())?, 1.0 - p1, 1.0 - p2)
    } else {
        (det.clone(), p1, p2)
    };
    let n = det.input_size();
    directions
        .par_iter()
        .map(|d| {
            let (l1, l2) = (d[0], d[1]);
            let (px, _) = maximize(n, grid, |px| best_choice(&det, p1, p2, px, l1, l2).0);
            let (_, point, choice) = best_choice(&det, p1, p2, &px, l1, l2);
            Ok(Support::new(d.clone(), point).with_params(json!({ "input": pmf_json(&px), "choice": choice })))
        })
        .collect()
}

/// Capacity region as the hull of the supports' achieving points and the
/// single-user corners.
pub fn tdcs_region(det: &DeterministicPair, p1: f64, p2: f64, directions: &[Vec<f64>], grid: GridSpec) -> Result<RateRegion> {
    let axes = [vec![1.0, 0.0], vec![0.0, 1.0]];
    let corners: Vec<RatePoint> = tdcs_supports(det, p1, p2, &axes, grid)?.into_iter().map(|s| s.point).collect();
    let supports = tdcs_supports(det, p1, p2, directions, grid)?;
    Ok(RateRegion::from_supports(supports, &corners))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::Sweep;

    fn grid() -> GridSpec {
        GridSpec::new(60, 10)
    }

    #[test]
    fn blackwell_equal_states_is_time_division() {
        let dirs = Sweep::new(15, 0.1, 10.0).unwrap().directions(&[]);
        let r = tdcs_region(&DeterministicPair::blackwell(), 0.5, 0.5, &dirs, grid()).unwrap();
        for s in &r.supports {
            assert!((s.value - s.direction[0].max(s.direction[1])).abs() < 1e-9, "{s:?}");
        }
    }

    #[test]
    fn blackwell_without_state_beats_time_division() {
        let dirs = Sweep::new(15, 0.1, 10.0).unwrap().directions(&[]);
        let r = tdcs_region(&DeterministicPair::blackwell(), 1.0, 0.0, &dirs, grid()).unwrap();
        assert!(r.max_sum_rate() > 1.1);
        for corner in [(1.0, 0.0), (0.0, 1.0)] {
            assert!(r.vertices.iter().any(|v| (v.r1 - corner.0).abs() < 1e-9 && (v.r2 - corner.1).abs() < 1e-9));
        }
        r.validate().unwrap();
    }

    #[test]
    fn identical_identity_maps_give_the_sum_line() {
        let det = DeterministicPair::new(vec![0, 1, 2], vec![0, 1, 2]).unwrap();
        let dirs = Sweep::new(9, 0.2, 5.0).unwrap().directions(&[]);
        let r = tdcs_region(&det, 1.0, 0.0, &dirs, grid()).unwrap();
        for s in &r.supports {
            let want = 3f64.log2() * s.direction[0].max(s.direction[1]);
            assert!((s.value - want).abs() < 1e-9);
        }
    }

    #[test]
    fn label_exchange_leaves_region_unchanged() {
        let dirs = Sweep::new(7, 0.2, 5.0).unwrap().directions(&[]);
        let det = DeterministicPair::blackwell();
        let swapped = DeterministicPair::new(det.f2().to_vec(), det.f1().to_vec()).unwrap();
        let a = tdcs_supports(&det, 0.7, 0.3, &dirs, grid()).unwrap();
        let b = tdcs_supports(&swapped, 0.3, 0.7, &dirs, grid()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.value - y.value).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_large_alphabets() {
        let det = DeterministicPair::new(vec![0, 1, 2, 3, 4], vec![0, 0, 1, 1, 2]).unwrap();
        assert!(matches!(tdcs_region(&det, 0.7, 0.3, &[vec![1.0, 1.0]], grid()), Err(Error::Unsupported(_))));
    }
}
