//! Superposition coding region, with the cloud center decoded by both
//! receivers.

use rayon::prelude::*;
use serde_json::json;

use super::{capacities, check_input_size, mi_pair, pmf_json, MAX_INPUT};
use crate::bc_state::StateBC;
use crate::error::Result;
use crate::prob::Pmf;
use crate::region::{pentagon_max, RatePoint, RateRegion, Support};
use crate::search::{maximize_envelope_by, GridSpec};

/// Number of multipliers tried on the sum constraint.
const MULTIPLIERS: usize = 11;

/// Pentagon bounds `(I(X;Y1|U,S), I(U;Y2|S), I(X;Y1|S))` of an input and
/// its decomposition.
fn pentagon(bc: &StateBC, p: &Pmf, atoms: &[(f64, &Pmf)]) -> (f64, f64, f64) {
    let (c1, c2) = mi_pair(bc, p);
    let (s1, s2) = atoms.iter().fold((0.0, 0.0), |(s1, s2), (w, q)| {
        let (a, b) = mi_pair(bc, q);
        (s1 + w * a, s2 + w * b)
    });
    (s1, c2 - s2, c1)
}

/// Best point for `l1 R1 + l2 R2` with the cloud center `U` decoded at
/// receiver 2, or `None` when the single-user corner `(C1, 0)` is optimal.
fn oriented(bc: &StateBC, l1: f64, l2: f64, grid: GridSpec) -> Result<Option<(f64, RatePoint, Pmf, Vec<(f64, Pmf)>)>> {
    if l2 <= l1 {
        return Ok(None);
    }
    let n = bc.input_size();
    let mut best: Option<(f64, RatePoint, Pmf, Vec<(f64, Pmf)>)> = None;
    for k in 0..MULTIPLIERS {
        // θ = 1 drops the sum constraint; θ = 0 keeps only it
        let theta = k as f64 / (MULTIPLIERS - 1) as f64;
        let (g1, g2) = (l1 * theta, l2 - l1 * (1.0 - theta));
        let found = maximize_envelope_by(
            n,
            grid,
            |p| {
                let (a, b) = mi_pair(bc, p);
                g1 * a - g2 * b
            },
            |p, _, atoms| {
                let (a, b, c) = pentagon(bc, p, atoms);
                pentagon_max(a, b, c, l1, l2).0
            },
        )?;
        if best.as_ref().is_none_or(|b| found.value > b.0) {
            let atoms: Vec<(f64, &Pmf)> = found.mixture.iter().map(|(w, p)| (*w, p)).collect();
            let (a, b, c) = pentagon(bc, &found.input, &atoms);
            let (value, point) = pentagon_max(a, b, c, l1, l2);
            best = Some((value, point, found.input.clone(), found.mixture.clone()));
        }
    }
    Ok(best)
}

fn support(d: &[f64], point: RatePoint, decoded_by: u8, input: Option<(&Pmf, &[(f64, Pmf)])>) -> Support {
    let mut params = json!({ "cloud_decoded_by": decoded_by });
    if let Some((p, mix)) = input {
        params["input"] = pmf_json(p);
        params["mixture"] = mix.iter().map(|(w, q)| json!({ "weight": w, "input": pmf_json(q) })).collect();
    }
    Support::new(d.to_vec(), point).with_params(params)
}

/// Supports of the union of both superposition orders.
///
/// In each direction both orders are optimized and the larger weighted sum
/// is kept.
pub fn superposition_supports(bc: &StateBC, directions: &[Vec<f64>], grid: GridSpec) -> Result<Vec<Support>> {
    check_input_size(bc.input_size(), MAX_INPUT)?;
    let (c1, c2) = capacities(bc, grid)?;
    let swapped = bc.swap_receivers();
    directions
        .par_iter()
        .map(|d| {
            let (l1, l2) = (d[0], d[1]);
            let first = match oriented(bc, l1, l2, grid)? {
                Some((_, pt, p, mix)) => support(d, pt, 2, Some((&p, &mix))),
                None => support(d, RatePoint::new(c1, 0.0), 2, None),
            };
            let second = match oriented(&swapped, l2, l1, grid)? {
                Some((_, pt, p, mix)) => support(d, RatePoint::new(pt.r2, pt.r1), 1, Some((&p, &mix))),
                None => support(d, RatePoint::new(0.0, c2), 1, None),
            };
            Ok(if second.value > first.value { second } else { first })
        })
        .collect()
}

/// Superposition region as the hull of its supports and the two corners.
///
/// This is an inner bound in general and the capacity region when receiver 1
/// is more capable or dominantly c-symmetric relative to receiver 2.
pub fn superposition_region(bc: &StateBC, directions: &[Vec<f64>], grid: GridSpec) -> Result<RateRegion> {
    let (c1, c2) = capacities(bc, grid)?;
    let supports = superposition_supports(bc, directions, grid)?;
    Ok(RateRegion::from_supports(
        supports,
        &[RatePoint::new(c1, 0.0), RatePoint::new(0.0, c2)],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc_state::bsc_mixture;
    use crate::prob::ChannelMatrix;
    use crate::region::Sweep;

    #[test]
    fn degraded_bsc_pair_matches_textbook_region() {
        // BSC(0.1) to receiver 1 and BSC(0.2) to receiver 2, no state
        let bc = StateBC::two_component(ChannelMatrix::bsc(0.1), ChannelMatrix::bsc(0.2), 1.0, 0.0).unwrap();
        let dirs = Sweep::new(7, 0.3, 4.0).unwrap().directions(&[]);
        let supports = superposition_supports(&bc, &dirs, GridSpec::new(200, 10)).unwrap();
        let h = crate::prob::binary_entropy;
        let conv = crate::prob::binary_convolution;
        for s in supports {
            let (l1, l2) = (s.direction[0], s.direction[1]);
            let oracle = (0..=5000)
                .map(|i| {
                    let b = 0.5 * i as f64 / 5000.0;
                    l1 * (h(conv(b, 0.1)) - h(0.1)) + l2 * (1.0 - h(conv(b, 0.2)))
                })
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((s.value - oracle).abs() < 1e-4, "{:?}: {} vs {oracle}", s.direction, s.value);
        }
    }

    #[test]
    fn four_bsc_sum_rate_is_the_larger_capacity() {
        let bc = bsc_mixture(&[0.28, 0.04, 0.02, 0.18], &[0.38, 0.62, 0.0, 0.0], &[0.0, 0.0, 0.38, 0.62]).unwrap();
        let grid = GridSpec::new(200, 10);
        let (c1, c2) = capacities(&bc, grid).unwrap();
        let s = superposition_supports(&bc, &[vec![1.0, 1.0]], grid).unwrap();
        assert!((s[0].value - c1.max(c2)).abs() < 1e-6);
    }
}
