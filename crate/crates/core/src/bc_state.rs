//! Broadcast channels whose component is drawn per receiver from a finite
//! list, with the draw known at the receiver.
//!
//! Receiver `j` sees component `s` with probability `p_j(s)`. Only the two
//! marginal state pmfs are stored; the joint law of the two states never
//! affects the capacity region.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{entropy_of, mutual_information, push_forward, ChannelMatrix, Pmf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Receiver {
    One,
    Two,
}

impl Receiver {
    pub fn other(self) -> Self {
        match self {
            Receiver::One => Receiver::Two,
            Receiver::Two => Receiver::One,
        }
    }
}

impl TryFrom<u8> for Receiver {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            1 => Ok(Receiver::One),
            2 => Ok(Receiver::Two),
            other => Err(Error::InvalidModel(format!("receiver {other} is not 1 or 2"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateBC {
    components: Vec<ChannelMatrix>,
    p1: Pmf,
    p2: Pmf,
}

impl StateBC {
    pub fn new(components: Vec<ChannelMatrix>, p1: Pmf, p2: Pmf) -> Result<Self> {
        let k = components.len();
        if k < 2 {
            return Err(Error::InvalidModel(format!("need at least two components, got {k}")));
        }
        if p1.len() != k || p2.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: if p1.len() != k { p1.len() } else { p2.len() },
            });
        }
        let input = components[0].rows();
        if let Some(c) = components.iter().find(|c| c.rows() != input) {
            return Err(Error::DimensionMismatch {
                expected: input,
                got: c.rows(),
            });
        }
        Ok(Self { components, p1, p2 })
    }

    /// Two-component channel with `P(S_j = 1) = p_j`.
    ///
    /// If `p1 < p2` the components are relabeled so that the stored state pmfs
    /// satisfy `p1(1) >= p2(1)`; receiver numbering is left untouched.
    pub fn two_component(w1: ChannelMatrix, w2: ChannelMatrix, p1: f64, p2: f64) -> Result<Self> {
        for p in [p1, p2] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidPmf(format!("state probability {p} outside [0, 1]")));
            }
        }
        if p1 >= p2 {
            Self::new(vec![w1, w2], Pmf::bernoulli(1.0 - p1), Pmf::bernoulli(1.0 - p2))
        } else {
            Self::new(vec![w2, w1], Pmf::bernoulli(p1), Pmf::bernoulli(p2))
        }
    }

    pub fn components(&self) -> &[ChannelMatrix] {
        &self.components
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn input_size(&self) -> usize {
        self.components[0].rows()
    }

    pub fn state_pmf(&self, receiver: Receiver) -> &Pmf {
        match receiver {
            Receiver::One => &self.p1,
            Receiver::Two => &self.p2,
        }
    }

    /// Same channel with the two receivers' state pmfs exchanged.
    pub fn swap_receivers(&self) -> Self {
        Self {
            components: self.components.clone(),
            p1: self.p2.clone(),
            p2: self.p1.clone(),
        }
    }

    /// `I(X; Y_j | S)` as the state mixture of component informations.
    pub fn conditional_mi(&self, receiver: Receiver, px: &Pmf) -> Result<f64> {
        let mut total = 0.0;
        for (w, c) in self.state_pmf(receiver).weights().iter().zip(&self.components) {
            if *w > 0.0 {
                total += w * mutual_information(px, c)?;
            }
        }
        Ok(total)
    }

    /// Per-component informations `I(X; Ỹ_i)` for one input.
    pub fn component_mis(&self, px: &Pmf) -> Result<Vec<f64>> {
        self.components.iter().map(|c| mutual_information(px, c)).collect()
    }

    /// The channel `X -> (Y_j, S_j)` as an ordinary matrix.
    pub fn lift(&self, receiver: Receiver) -> ChannelMatrix {
        lift_state_channel(self, receiver)
    }
}

/// Output alphabet is the disjoint union of the component alphabets, block `s`
/// holding `p_j(s) W_s(y|x)`.
pub fn lift_state_channel(bc: &StateBC, receiver: Receiver) -> ChannelMatrix {
    let ps = bc.state_pmf(receiver);
    let rows = (0..bc.input_size())
        .map(|x| {
            bc.components
                .iter()
                .zip(ps.weights())
                .flat_map(|(c, &w)| c.row(x).iter().map(move |v| w * v))
                .collect()
        })
        .collect();
    ChannelMatrix::new(rows).expect("mixture of stochastic rows is stochastic")
}

pub fn conditional_mi(bc: &StateBC, receiver: Receiver, px: &Pmf) -> Result<f64> {
    bc.conditional_mi(receiver, px)
}

/// Two deterministic maps of a common input.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicPair {
    f1: Vec<usize>,
    f2: Vec<usize>,
    n1: usize,
    n2: usize,
}

impl DeterministicPair {
    /// Output alphabets are taken as `0..=max` of each map.
    pub fn new(f1: Vec<usize>, f2: Vec<usize>) -> Result<Self> {
        if f1.is_empty() || f1.len() != f2.len() {
            return Err(Error::DimensionMismatch {
                expected: f1.len(),
                got: f2.len(),
            });
        }
        let n1 = f1.iter().max().map_or(1, |m| m + 1);
        let n2 = f2.iter().max().map_or(1, |m| m + 1);
        Ok(Self { f1, f2, n1, n2 })
    }

    pub fn from_matrices(f1: &ChannelMatrix, f2: &ChannelMatrix) -> Result<Self> {
        let m1 = f1
            .as_map()
            .ok_or_else(|| Error::InvalidModel("f1 is not deterministic".into()))?;
        let m2 = f2
            .as_map()
            .ok_or_else(|| Error::InvalidModel("f2 is not deterministic".into()))?;
        let mut pair = Self::new(m1, m2)?;
        pair.n1 = f1.cols();
        pair.n2 = f2.cols();
        Ok(pair)
    }

    /// The Blackwell functions on `{0, 1, 2}`.
    pub fn blackwell() -> Self {
        Self::new(vec![0, 1, 1], vec![0, 1, 0]).expect("static maps")
    }

    pub fn input_size(&self) -> usize {
        self.f1.len()
    }

    pub fn f1(&self) -> &[usize] {
        &self.f1
    }

    pub fn f2(&self) -> &[usize] {
        &self.f2
    }

    pub fn f1_matrix(&self) -> ChannelMatrix {
        ChannelMatrix::deterministic(&self.f1, self.n1).expect("valid map")
    }

    pub fn f2_matrix(&self) -> ChannelMatrix {
        ChannelMatrix::deterministic(&self.f2, self.n2).expect("valid map")
    }

    /// Entropies `(H(f1), H(f2), I(f1; f2))` of the push-forwards of `px`.
    pub fn entropies(&self, px: &Pmf) -> (f64, f64, f64) {
        let h1 = entropy_of(&push_forward(px, &self.f1, self.n1));
        let h2 = entropy_of(&push_forward(px, &self.f2, self.n2));
        let mut joint = vec![0.0; self.n1 * self.n2];
        for (x, &w) in px.weights().iter().enumerate() {
            joint[self.f1[x] * self.n2 + self.f2[x]] += w;
        }
        let h12 = entropy_of(&joint);
        (h1, h2, (h1 + h2 - h12).max(0.0))
    }

    /// State channel with components `(f1, f2)` and `P(S_j = 1) = p_j`.
    pub fn with_states(&self, p1: f64, p2: f64) -> Result<StateBC> {
        StateBC::new(
            vec![self.f1_matrix(), self.f2_matrix()],
            Pmf::bernoulli(1.0 - p1),
            Pmf::bernoulli(1.0 - p2),
        )
    }
}

/// Probability of state 1 given either as a number or a full pmf.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    First(f64),
    Pmf(Vec<f64>),
}

impl StateSpec {
    fn to_pmf(&self, k: usize) -> Result<Pmf> {
        match self {
            StateSpec::First(p) if k == 2 => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::InvalidPmf(format!("state probability {p} outside [0, 1]")));
                }
                Ok(Pmf::bernoulli(1.0 - p))
            }
            StateSpec::First(_) => Err(Error::InvalidModel(
                "a scalar state probability needs exactly two components".into(),
            )),
            StateSpec::Pmf(v) => Pmf::new(v.clone()),
        }
    }

    fn first(&self) -> Result<f64> {
        match self {
            StateSpec::First(p) => Ok(*p),
            StateSpec::Pmf(v) if v.len() == 2 => Ok(v[0]),
            StateSpec::Pmf(v) => Err(Error::DimensionMismatch {
                expected: 2,
                got: v.len(),
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeterministicSpec {
    pub f1: Vec<usize>,
    pub f2: Vec<usize>,
}

/// On-disk discrete model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deterministic: Option<DeterministicSpec>,
    pub p1: StateSpec,
    pub p2: StateSpec,
}

/// A validated discrete model.
#[derive(Debug, Clone)]
pub enum DiscreteModel {
    State(StateBC),
    Deterministic { pair: DeterministicPair, p1: f64, p2: f64 },
}

impl DiscreteModel {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        file.validate()
    }

    /// General state-channel view of either variant.
    pub fn state_bc(&self) -> Result<StateBC> {
        match self {
            DiscreteModel::State(bc) => Ok(bc.clone()),
            DiscreteModel::Deterministic { pair, p1, p2 } => pair.with_states(*p1, *p2),
        }
    }
}

impl ModelFile {
    pub fn validate(&self) -> Result<DiscreteModel> {
        match (&self.components, &self.deterministic) {
            (Some(_), Some(_)) => Err(Error::InvalidModel(
                "give either components or deterministic, not both".into(),
            )),
            (None, None) => Err(Error::InvalidModel("model has no channel".into())),
            (None, Some(det)) => {
                let pair = DeterministicPair::new(det.f1.clone(), det.f2.clone())?;
                if let Some(n) = self.input_size {
                    if n != pair.input_size() {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            got: pair.input_size(),
                        });
                    }
                }
                let p1 = self.p1.first()?;
                let p2 = self.p2.first()?;
                for p in [p1, p2] {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::InvalidPmf(format!("state probability {p} outside [0, 1]")));
                    }
                }
                Ok(DiscreteModel::Deterministic { pair, p1, p2 })
            }
            (Some(comps), None) => {
                let components = comps
                    .iter()
                    .map(|rows| ChannelMatrix::new(rows.clone()))
                    .collect::<Result<Vec<_>>>()?;
                if let (Some(n), Some(c)) = (self.input_size, components.first()) {
                    if c.rows() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            got: c.rows(),
                        });
                    }
                }
                let k = components.len();
                let bc = StateBC::new(components, self.p1.to_pmf(k)?, self.p2.to_pmf(k)?)?;
                Ok(DiscreteModel::State(bc))
            }
        }
    }
}

impl From<&StateBC> for ModelFile {
    fn from(bc: &StateBC) -> Self {
        ModelFile {
            input_size: Some(bc.input_size()),
            components: Some(bc.components.iter().map(|c| c.to_rows()).collect()),
            deterministic: None,
            p1: StateSpec::Pmf(bc.p1.weights().to_vec()),
            p2: StateSpec::Pmf(bc.p2.weights().to_vec()),
        }
    }
}

/// The binary-input four-component example with BSC components.
pub fn bsc_mixture(crossovers: &[f64], p: &[f64], q: &[f64]) -> Result<StateBC> {
    StateBC::new(
        crossovers.iter().map(|&a| ChannelMatrix::bsc(a)).collect(),
        Pmf::new(p.to_vec())?,
        Pmf::new(q.to_vec())?,
    )
}
