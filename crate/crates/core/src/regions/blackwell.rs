//! Closed-form region of the Blackwell functions with state.

use crate::error::{Error, Result};
use crate::prob::{binary_entropy, simplex_grid};
use crate::region::{pentagon_max, RatePoint, RateRegion, Support};

/// `(a, b, sum)` bounds of the split-auxiliary pentagon at
/// `P(X=0) = a0`, `P(X=1) = a1`.
fn bounds(p1: f64, p2: f64, a0: f64, a1: f64) -> (f64, f64, f64) {
    // H(t/s) scaled by s, zero when s vanishes
    let hs = |t: f64, s: f64| if s > 0.0 { s * binary_entropy((t / s).clamp(0.0, 1.0)) } else { 0.0 };
    let r1 = binary_entropy(a0) - (1.0 - p1) * hs(a0, 1.0 - a1);
    let r2 = binary_entropy(a1) - p2 * hs(a1, 1.0 - a0);
    let sum = r1 + (1.0 - p2) * hs(a1, 1.0 - a0);
    (r1, r2, sum)
}

/// Region for `0 <= p2 <= p1 <= 1` from a grid of `resolution` steps per
/// axis over `(P(X=0), P(X=1))`, together with the corners `(1,0)`, `(0,1)`.
pub fn blackwell_state_region(p1: f64, p2: f64, directions: &[Vec<f64>], resolution: usize) -> Result<RateRegion> {
    if !(0.0 <= p2 && p2 <= p1 && p1 <= 1.0) {
        return Err(Error::InvalidModel(format!("need 0 <= p2 <= p1 <= 1, got ({p1}, {p2})")));
    }
    let grid = simplex_grid(3, resolution.max(1));
    let corners = [RatePoint::new(1.0, 0.0), RatePoint::new(0.0, 1.0)];
    let supports = directions
        .iter()
        .map(|d| {
            let best = grid
                .iter()
                .map(|p| {
                    let (a, b, s) = bounds(p1, p2, p[0], p[1]);
                    pentagon_max(a, b, s, d[0], d[1])
                })
                .chain(corners.iter().map(|c| (c.dot(d), *c)))
                .max_by(|x, y| x.0.total_cmp(&y.0))
                .expect("nonempty grid");
            Support::new(d.clone(), best.1)
        })
        .collect();
    Ok(RateRegion::from_supports(supports, &corners))
}
