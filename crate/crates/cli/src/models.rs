//! Model files for the region kinds that are not plain discrete channels.

use std::fs;
use std::path::Path;

use bcregions::bc_state::{DiscreteModel, Receiver};
use bcregions::gaussian::GaussianBC;
use bcregions::orderings::{ordering_report, transfer_check};
use bcregions::{Error, Result};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

pub fn read<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn discrete(path: &Path) -> Result<DiscreteModel> {
    DiscreteModel::from_json(&fs::read_to_string(path)?)
}

pub fn gaussian(path: &Path) -> Result<GaussianBC> {
    GaussianBC::from_json(&fs::read_to_string(path)?)
}

/// `k` erasure components.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BecModel {
    pub eps: Vec<f64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
}

/// Three BSC components.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bsc3Model {
    pub alpha: [f64; 3],
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

/// Two-state models fixed by their state probabilities alone.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatesModel {
    pub p1: f64,
    pub p2: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldModel {
    #[serde(rename = "K")]
    pub k: u64,
    pub p1: f64,
    pub p2: f64,
}

/// Transfer report for two components, lifted-pair report otherwise.
pub fn order_check(path: &Path) -> Result<Value> {
    let bc = discrete(path)?.state_bc()?;
    if bc.k() == 2 {
        Ok(serde_json::to_value(transfer_check(&bc)?)?)
    } else {
        let lifted = ordering_report(&bc.lift(Receiver::One), &bc.lift(Receiver::Two))?;
        if lifted.degraded && !lifted.less_noisy || lifted.less_noisy && !lifted.more_capable {
            return Err(Error::InvariantBreach("ordering chain broken on the lifted pair".into()));
        }
        Ok(serde_json::json!({ "lifted": lifted }))
    }
}
