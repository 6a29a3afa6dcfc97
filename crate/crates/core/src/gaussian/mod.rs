//! Superposition regions of state channels with degraded Gaussian
//! components, and the dirty-paper comparison.
//!
//! Rates use `log` without a `1/2` factor, which is the complex circularly
//! symmetric channel. Computations run in nats and are reported in bits.

pub mod dpc;
pub mod dominance;
mod model;
mod prop1;

pub use model::{GaussianBC, GaussianFile, GaussianSplit, Scalar};
pub use prop1::{prop1_rates, prop1_region, prop1_support, scalar_support, Prop1Options, Prop1Support};

pub(crate) fn to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}
