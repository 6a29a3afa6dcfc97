pub mod bc_state;
pub mod envelope;
pub mod error;
pub mod gaussian;
pub mod lp;
pub mod orderings;
pub mod prob;
pub mod region;
pub mod regions;
pub mod search;

pub use error::{Error, Result};
