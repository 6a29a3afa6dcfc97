//! UV outer bound supports.

use rayon::prelude::*;
use serde_json::json;

use super::{check_input_size, mi_pair, pmf_json, MAX_INPUT};
use crate::bc_state::StateBC;
use crate::error::Result;
use crate::prob::Pmf;
use crate::region::{RatePoint, RateRegion, Support};
use crate::search::{maximize_with_envelope, GridSpec};

/// One upper bound on `l1 R1 + l2 R2` with the point on its hyperplane.
struct Bound {
    value: f64,
    point: RatePoint,
    input: Pmf,
    mixture: Vec<(f64, Pmf)>,
}

/// Sums `Σ w f(p)` over a mixture for both receivers.
fn mixture_mis(bc: &StateBC, mixture: &[(f64, Pmf)]) -> (f64, f64) {
    mixture.iter().fold((0.0, 0.0), |(s1, s2), (w, p)| {
        let (a, b) = mi_pair(bc, p);
        (s1 + w * a, s2 + w * b)
    })
}

/// A nonnegative point on `l1 r1 + l2 r2 = value`, preferring `(r1, r2)`.
fn on_hyperplane(r1: f64, r2: f64, value: f64, l1: f64, l2: f64) -> RatePoint {
    if r1 >= 0.0 && r2 >= 0.0 {
        RatePoint::new(r1, r2)
    } else if l1 > 0.0 && (r2 < 0.0 || l2 == 0.0) {
        RatePoint::new(value / l1, 0.0)
    } else {
        RatePoint::new(0.0, value / l2)
    }
}

/// Bounds for `l2 <= l1`: the common-`V` form and the corner-plus-sum form.
fn weak_second(bc: &StateBC, l1: f64, l2: f64, grid: GridSpec) -> Result<[Bound; 2]> {
    let n = bc.input_size();
    let i1 = |p: &Pmf| mi_pair(bc, p).0;
    let i2 = |p: &Pmf| mi_pair(bc, p).1;

    // R1 <= I(V;Y1|S), R1 + R2 <= I(V;Y1|S) + I(X;Y2|V,S)
    let a = maximize_with_envelope(n, grid, |p| l1 * i1(p), |p| l2 * i2(p) - l1 * i1(p))?;
    let (s1, s2) = mixture_mis(bc, &a.mixture);
    let a = Bound {
        value: a.value,
        point: on_hyperplane(i1(&a.input) - s1, s2, a.value, l1, l2),
        input: a.input,
        mixture: a.mixture,
    };

    // R1 <= I(X;Y1|S), R1 + R2 <= I(U;Y2|S) + I(X;Y1|U,S)
    let b = maximize_with_envelope(n, grid, |p| (l1 - l2) * i1(p) + l2 * i2(p), |p| l2 * (i1(p) - i2(p)))?;
    let (s1, s2) = mixture_mis(bc, &b.mixture);
    let (c1, c2) = mi_pair(bc, &b.input);
    let b = Bound {
        value: b.value,
        point: on_hyperplane(c1, c2 - s2 + s1 - c1, b.value, l1, l2),
        input: b.input,
        mixture: b.mixture,
    };
    Ok([a, b])
}

/// Outer-bound supports in each direction `(l1, l2)`.
///
/// Each support is the smaller of two bounds obtained by weighting one
/// single-rate constraint against one sum constraint.
pub fn uv_outer_supports(bc: &StateBC, directions: &[Vec<f64>], grid: GridSpec) -> Result<Vec<Support>> {
    check_input_size(bc.input_size(), MAX_INPUT)?;
    let swapped = bc.swap_receivers();
    directions
        .par_iter()
        .map(|d| {
            let (l1, l2) = (d[0], d[1]);
            let bounds = if l2 <= l1 {
                weak_second(bc, l1, l2, grid)?
            } else {
                weak_second(&swapped, l2, l1, grid)?.map(|b| Bound {
                    point: RatePoint::new(b.point.r2, b.point.r1),
                    ..b
                })
            };
            let [a, b] = bounds;
            let (form, best) = if b.value < a.value { ("sum", b) } else { ("common", a) };
            let mix: Vec<_> = best.mixture.iter().map(|(w, p)| json!({ "weight": w, "input": pmf_json(p) })).collect();
            Ok(Support {
                direction: d.clone(),
                value: best.value,
                point: best.point,
                params: Some(json!({ "form": form, "input": pmf_json(&best.input), "mixture": mix })),
            })
        })
        .collect()
}

/// Region with the outer supports and their hyperplane points as vertices.
pub fn uv_outer_region(bc: &StateBC, directions: &[Vec<f64>], grid: GridSpec) -> Result<RateRegion> {
    Ok(RateRegion::from_supports(uv_outer_supports(bc, directions, grid)?, &[]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc_state::bsc_mixture;
    use crate::prob::ChannelMatrix;
    use crate::regions::capacities;

    #[test]
    fn axes_give_single_user_capacities() {
        let bc = StateBC::two_component(ChannelMatrix::bsc(0.1), ChannelMatrix::bec(0.4), 0.8, 0.3).unwrap();
        let grid = GridSpec::new(100, 10);
        let (c1, c2) = capacities(&bc, grid).unwrap();
        let s = uv_outer_supports(&bc, &[vec![1.0, 0.0], vec![0.0, 1.0]], grid).unwrap();
        assert!((s[0].value - c1).abs() < 1e-9);
        assert!((s[1].value - c2).abs() < 1e-9);
    }

    #[test]
    fn hyperplane_points_match_values() {
        let bc = bsc_mixture(&[0.28, 0.04, 0.02, 0.18], &[0.38, 0.62, 0.0, 0.0], &[0.0, 0.0, 0.38, 0.62]).unwrap();
        let dirs = vec![vec![1.0, 0.3], vec![1.0, 1.0], vec![1.0, 4.0]];
        for s in uv_outer_supports(&bc, &dirs, GridSpec::new(100, 10)).unwrap() {
            assert!((s.point.dot(&s.direction) - s.value).abs() < 1e-9);
        }
    }
}
