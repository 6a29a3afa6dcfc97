//! Inner bounds, outer bounds and capacity regions of discrete broadcast
//! channels with receiver-side state.

mod bec;
mod blackwell;
mod bsc3;
mod common;
mod finite_field;
mod marton;
mod superposition;
mod tdcs;
mod uv;

pub use bec::{bec_capacities, bec_region};
pub use blackwell::blackwell_state_region;
pub use bsc3::{three_bsc_curve, three_bsc_region};
pub use common::{common_message_supports, CommonGrid};
pub use finite_field::{finite_field_pair, finite_field_region, is_prime};
pub use marton::{marton_rtd_point, marton_rtd_sum, marton_rtd_sumrate, MartonOptions, MartonRTDParams};
pub use superposition::{superposition_region, superposition_supports};
pub use tdcs::{tdcs_region, tdcs_supports, TdcsChoice};
pub use uv::{uv_outer_region, uv_outer_supports};

use crate::bc_state::{Receiver, StateBC};
use crate::error::{Error, Result};
use crate::prob::Pmf;
use crate::search::{maximize, GridSpec};

/// Largest input alphabet handled by the simplex searches.
pub const MAX_INPUT: usize = 3;

pub(crate) fn check_input_size(n: usize, max: usize) -> Result<()> {
    if n > max {
        return Err(Error::Unsupported(format!("input alphabet of size {n} exceeds {max}")));
    }
    Ok(())
}

/// Single-user capacities `(C1, C2)` by grid search.
pub fn capacities(bc: &StateBC, grid: GridSpec) -> Result<(f64, f64)> {
    check_input_size(bc.input_size(), MAX_INPUT)?;
    let c = |r: Receiver| maximize(bc.input_size(), grid, |p| bc.conditional_mi(r, p).unwrap_or(f64::NAN)).1;
    Ok((c(Receiver::One), c(Receiver::Two)))
}

/// Evaluates `(I(X;Y1|S), I(X;Y2|S))`; inputs are validated by the callers.
pub(crate) fn mi_pair(bc: &StateBC, p: &Pmf) -> (f64, f64) {
    (
        bc.conditional_mi(Receiver::One, p).expect("input size checked"),
        bc.conditional_mi(Receiver::Two, p).expect("input size checked"),
    )
}

pub(crate) fn pmf_json(p: &Pmf) -> serde_json::Value {
    serde_json::json!(p.weights())
}
