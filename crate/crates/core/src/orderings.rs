//! Certificates for the classical broadcast channel orderings.
//!
//! For a pair `(W1, W2)` with a common input, the report states whether
//! `W2` is a degraded version of `W1`, whether `W1` is less noisy or more
//! capable than `W2`, and whether the pair is dominantly c-symmetric. Less
//! noisy is decided through concavity of `I(X;W1) - I(X;W2)` on a simplex
//! grid, more capable through its minimum.

use serde::{Deserialize, Serialize};

use crate::bc_state::{Receiver, StateBC};
use crate::envelope::ConcaveEnvelope;
use crate::error::{Error, Result};
use crate::lp::LinearProgram;
use crate::prob::{binary_entropy, mutual_information, simplex_grid, ChannelMatrix, Pmf};
use crate::search::evaluate;

/// Residual below which `W2 = W1 Q` counts as exact.
pub const DEGRADED_TOLERANCE: f64 = 1e-7;
/// Slack allowed in the grid tests for less noisy, more capable and dominance.
pub const GRID_TOLERANCE: f64 = 1e-6;
/// Entry tolerance for matching columns in the c-symmetry search.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Grid resolution used by the sampled certificates.
pub fn certificate_resolution(dim: usize) -> usize {
    match dim {
        0..=2 => 400,
        _ => 60,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub degraded: bool,
    pub degraded_witness: Option<Vec<Vec<f64>>>,
    pub less_noisy: bool,
    pub less_noisy_violation: Option<Vec<f64>>,
    pub more_capable: bool,
    pub more_capable_violation: Option<Vec<f64>>,
    pub c_symmetric: bool,
    /// Output permutations per input shift, for the first and second channel.
    pub permutations: Option<[Vec<Vec<usize>>; 2]>,
    pub dominantly_c_symmetric: bool,
}

fn check_pair(w1: &ChannelMatrix, w2: &ChannelMatrix) -> Result<()> {
    if w1.rows() != w2.rows() {
        return Err(Error::DimensionMismatch {
            expected: w1.rows(),
            got: w2.rows(),
        });
    }
    Ok(())
}

/// Decides whether `W2 = W1 Q` for some row-stochastic `Q`.
///
/// Solves `min t` subject to `|W1 Q - W2| <= t` entrywise; the optimal `Q`
/// is returned when `t <= 1e-7`.
pub fn is_degraded(w1: &ChannelMatrix, w2: &ChannelMatrix) -> Result<(bool, Option<ChannelMatrix>)> {
    check_pair(w1, w2)?;
    let (nx, nz, ny) = (w1.rows(), w1.cols(), w2.cols());
    let nq = nz * ny;
    let t = nq;
    let mut cost = vec![0.0; nq + 1];
    cost[t] = 1.0;
    let mut lp = LinearProgram::minimize(cost);
    for x in 0..nx {
        for y in 0..ny {
            let mut row = vec![0.0; nq + 1];
            for z in 0..nz {
                row[z * ny + y] = w1.get(x, z);
            }
            let mut upper = row.clone();
            upper[t] = -1.0;
            lp.less_eq(upper, w2.get(x, y));
            let mut lower = row;
            lower[t] = 1.0;
            lp.greater_eq(lower, w2.get(x, y));
        }
    }
    for z in 0..nz {
        let mut row = vec![0.0; nq + 1];
        row[z * ny..(z + 1) * ny].fill(1.0);
        lp.equal(row, 1.0);
    }
    let sol = lp.solve()?;
    let rows: Vec<Vec<f64>> = (0..nz)
        .map(|z| {
            let r: Vec<f64> = sol.x[z * ny..(z + 1) * ny].iter().map(|v| v.max(0.0)).collect();
            let s: f64 = r.iter().sum();
            r.into_iter().map(|v| v / s).collect()
        })
        .collect();
    let q = ChannelMatrix::new(rows)?;
    let residual = w1.compose(&q)?.max_abs_diff(w2);
    if residual <= DEGRADED_TOLERANCE {
        Ok((true, Some(q)))
    } else {
        Ok((false, None))
    }
}

fn difference_on_grid(w1: &ChannelMatrix, w2: &ChannelMatrix) -> Result<(Vec<Pmf>, Vec<f64>)> {
    check_pair(w1, w2)?;
    let dim = w1.rows();
    if dim > 3 {
        return Err(Error::Unsupported(format!("ordering certificate for |X| = {dim}")));
    }
    let grid = simplex_grid(dim, certificate_resolution(dim));
    let d = evaluate(&grid, |p| {
        mutual_information(p, w1).expect("sizes checked") - mutual_information(p, w2).expect("sizes checked")
    });
    Ok((grid, d))
}

/// Van Dijk test: `W1` is less noisy than `W2` iff `I(X;W1) - I(X;W2)` is concave.
pub fn is_less_noisy(w1: &ChannelMatrix, w2: &ChannelMatrix) -> Result<(bool, Option<Pmf>)> {
    let (grid, d) = difference_on_grid(w1, w2)?;
    let env = ConcaveEnvelope::new(grid, d.clone())?;
    let answers = env.at_samples()?;
    let (worst, gap) = answers
        .iter()
        .zip(&d)
        .map(|(a, v)| a.value - v)
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });
    if gap <= GRID_TOLERANCE {
        Ok((true, None))
    } else {
        Ok((false, Some(env.points()[worst].clone())))
    }
}

/// `W1` is more capable than `W2` iff `I(X;W1) >= I(X;W2)` for every input.
pub fn is_more_capable(w1: &ChannelMatrix, w2: &ChannelMatrix) -> Result<(bool, Option<Pmf>)> {
    let (grid, d) = difference_on_grid(w1, w2)?;
    let (worst, min) = d
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    if min >= -GRID_TOLERANCE {
        Ok((true, None))
    } else {
        Ok((false, Some(grid[worst].clone())))
    }
}

/// Output permutations `π_j` with `W(π_j(y) | i + j) = W(y | i)`, one per shift.
pub fn is_c_symmetric(w: &ChannelMatrix) -> (bool, Option<Vec<Vec<usize>>>) {
    let m = w.rows();
    let n = w.cols();
    let column = |shift: usize, y: usize| -> Vec<f64> { (0..m).map(|i| w.get((i + shift) % m, y)).collect() };
    let same = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= SYMMETRY_TOLERANCE);
    let mut perms = Vec::with_capacity(m);
    for j in 0..m {
        let mut used = vec![false; n];
        let mut pi = vec![0usize; n];
        for y in 0..n {
            let target = column(0, y);
            let found = (0..n).find(|&z| !used[z] && same(&column(j, z), &target));
            match found {
                Some(z) => {
                    used[z] = true;
                    pi[y] = z;
                }
                None => return (false, None),
            }
        }
        perms.push(pi);
    }
    (true, Some(perms))
}

/// Whether `I(X;W1) - I(X;W2)` peaks at the uniform input.
///
/// Both channels must be c-symmetric; otherwise an error is returned.
pub fn is_dominantly_c_symmetric(w1: &ChannelMatrix, w2: &ChannelMatrix) -> Result<bool> {
    check_pair(w1, w2)?;
    if !is_c_symmetric(w1).0 || !is_c_symmetric(w2).0 {
        return Err(Error::InvalidChannel("dominance needs c-symmetric channels".into()));
    }
    let (_, d) = difference_on_grid(w1, w2)?;
    let u = Pmf::uniform(w1.rows());
    let du = mutual_information(&u, w1)? - mutual_information(&u, w2)?;
    Ok(d.iter().all(|&v| v <= du + GRID_TOLERANCE))
}

/// Runs every certificate on `(W1, W2)` and checks the implication chain.
pub fn ordering_report(w1: &ChannelMatrix, w2: &ChannelMatrix) -> Result<OrderingReport> {
    let (degraded, witness) = is_degraded(w1, w2)?;
    let (less_noisy, ln_violation) = is_less_noisy(w1, w2)?;
    let (more_capable, mc_violation) = is_more_capable(w1, w2)?;
    let (s1, p1) = is_c_symmetric(w1);
    let (s2, p2) = is_c_symmetric(w2);
    let c_symmetric = s1 && s2;
    let dominantly_c_symmetric = c_symmetric && is_dominantly_c_symmetric(w1, w2)?;
    if degraded && !less_noisy {
        return Err(Error::InvariantBreach(format!(
            "degraded pair failed the less-noisy test at {:?}",
            ln_violation.map(|p| p.into_weights())
        )));
    }
    if less_noisy && !more_capable {
        return Err(Error::InvariantBreach(format!(
            "less-noisy pair failed the more-capable test at {:?}",
            mc_violation.map(|p| p.into_weights())
        )));
    }
    Ok(OrderingReport {
        degraded,
        degraded_witness: witness.map(|q| q.to_rows()),
        less_noisy,
        less_noisy_violation: ln_violation.map(Pmf::into_weights),
        more_capable,
        more_capable_violation: mc_violation.map(Pmf::into_weights),
        c_symmetric,
        permutations: match (p1, p2) {
            (Some(a), Some(b)) => Some([a, b]),
            _ => None,
        },
        dominantly_c_symmetric,
    })
}

/// Orderings of the component pair and of the lifted pair `(Y_1,S)`, `(Y_2,S)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub components: OrderingReport,
    pub lifted: OrderingReport,
}

/// Certifies both pairs of a two-component channel and checks that every
/// ordering of the components carries over to the lifted channel.
///
/// Components are relabeled first if needed so that receiver 1 sees
/// component 1 at least as often as receiver 2 does.
pub fn transfer_check(bc: &StateBC) -> Result<TransferReport> {
    if bc.k() != 2 {
        return Err(Error::Unsupported(format!("transfer check for {} components", bc.k())));
    }
    let bc = canonical_two_component(bc)?;
    let comps = bc.components();
    let components = ordering_report(&comps[0], &comps[1])?;
    let lifted = ordering_report(&bc.lift(Receiver::One), &bc.lift(Receiver::Two))?;
    let inherited = [
        ("degraded", components.degraded, lifted.degraded),
        ("less noisy", components.less_noisy, lifted.less_noisy),
        ("more capable", components.more_capable, lifted.more_capable),
        (
            "dominantly c-symmetric",
            components.dominantly_c_symmetric,
            lifted.dominantly_c_symmetric,
        ),
    ];
    for (name, comp, lift) in inherited {
        if comp && !lift {
            return Err(Error::InvariantBreach(format!(
                "components are {name} but the lifted pair is not"
            )));
        }
    }
    Ok(TransferReport { components, lifted })
}

fn canonical_two_component(bc: &StateBC) -> Result<StateBC> {
    let a = bc.state_pmf(Receiver::One)[0];
    let b = bc.state_pmf(Receiver::Two)[0];
    if a >= b {
        return Ok(bc.clone());
    }
    let comps = bc.components();
    StateBC::new(
        vec![comps[1].clone(), comps[0].clone()],
        Pmf::bernoulli(a),
        Pmf::bernoulli(b),
    )
}

/// Product of two state channels: `bc_a` drives the first input, `bc_b` the
/// second.
///
/// Returns true when component 1 of `bc_a` is more capable than its component
/// 2, component 2 of `bc_b` is more capable than its component 1, and the
/// lifted sub-channels are then reversely more capable on the input grid.
pub fn product_transfer_check(bc_a: &StateBC, bc_b: &StateBC) -> Result<bool> {
    for (name, bc) in [("first", bc_a), ("second", bc_b)] {
        if bc.k() != 2 {
            return Err(Error::Unsupported(format!("{name} sub-channel has {} components", bc.k())));
        }
        if bc.state_pmf(Receiver::One)[0] < bc.state_pmf(Receiver::Two)[0] {
            return Err(Error::InvalidModel(format!(
                "{name} sub-channel must give receiver 1 state 1 at least as often as receiver 2"
            )));
        }
    }
    let a = bc_a.components();
    let b = bc_b.components();
    if !is_more_capable(&a[0], &a[1])?.0 || !is_more_capable(&b[1], &b[0])?.0 {
        return Ok(false);
    }
    for (bc, stronger) in [(bc_a, Receiver::One), (bc_b, Receiver::Two)] {
        let dim = bc.input_size();
        if dim > 3 {
            return Err(Error::Unsupported(format!("product check for |X| = {dim}")));
        }
        for p in simplex_grid(dim, certificate_resolution(dim)) {
            let strong = bc.conditional_mi(stronger, &p)?;
            let weak = bc.conditional_mi(stronger.other(), &p)?;
            if strong < weak - GRID_TOLERANCE {
                return Err(Error::InvariantBreach(format!(
                    "reversely more capable components but lifted inequality fails at {:?}",
                    p.weights()
                )));
            }
        }
    }
    Ok(true)
}

/// Closed-form thresholds for the BSC(p) / BEC(e) pair.
pub mod bsc_bec {
    use super::binary_entropy;

    pub fn degraded(p: f64) -> f64 {
        2.0 * p
    }

    pub fn less_noisy(p: f64) -> f64 {
        4.0 * p * (1.0 - p)
    }

    pub fn more_capable(p: f64) -> f64 {
        binary_entropy(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AtlasOrdering {
    Degraded,
    LessNoisy,
    MoreCapable,
    DominantlyCSymmetric,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtlasCell {
    pub p: f64,
    pub e: f64,
    pub ordering: AtlasOrdering,
    pub expected: bool,
    pub certified: bool,
    /// Inside the exclusion band around the threshold.
    pub excluded: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtlasReport {
    pub cells: Vec<AtlasCell>,
    pub compared: usize,
    pub mismatches: usize,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Certifier verdicts for BSC(p) and BEC(e) on an `n × n` grid of
/// `(p, e) ∈ [0, 1/2] × [0, 1]`, compared against the closed-form thresholds.
///
/// Orientation: the BSC is a degraded version of the BEC iff `e <= 2p`; the
/// BEC is less noisy iff `e <= 4p(1-p)` and more capable iff `e <= H(p)`; the
/// pair (BSC, BEC) is dominantly c-symmetric iff `e >= H(p)`.
pub fn example3_atlas(n: usize, band: f64) -> Result<AtlasReport> {
    use rayon::prelude::*;
    let ps = linspace(0.0, 0.5, n);
    let es = linspace(0.0, 1.0, n);
    let pairs: Vec<(f64, f64)> = ps.iter().flat_map(|&p| es.iter().map(move |&e| (p, e))).collect();
    let per_pair: Vec<Result<Vec<AtlasCell>>> = pairs
        .par_iter()
        .map(|&(p, e)| {
            let bsc = ChannelMatrix::bsc(p);
            let bec = ChannelMatrix::bec(e);
            let cell = |ordering, threshold: f64, expected: bool, certified: bool| AtlasCell {
                p,
                e,
                ordering,
                expected,
                certified,
                excluded: (e - threshold).abs() < band,
            };
            let t_deg = bsc_bec::degraded(p);
            let t_ln = bsc_bec::less_noisy(p);
            let t_mc = bsc_bec::more_capable(p);
            Ok(vec![
                cell(AtlasOrdering::Degraded, t_deg, e <= t_deg, is_degraded(&bec, &bsc)?.0),
                cell(AtlasOrdering::LessNoisy, t_ln, e <= t_ln, is_less_noisy(&bec, &bsc)?.0),
                cell(AtlasOrdering::MoreCapable, t_mc, e <= t_mc, is_more_capable(&bec, &bsc)?.0),
                cell(
                    AtlasOrdering::DominantlyCSymmetric,
                    t_mc,
                    e >= t_mc,
                    is_dominantly_c_symmetric(&bsc, &bec)?,
                ),
            ])
        })
        .collect();
    let mut cells = Vec::with_capacity(4 * pairs.len());
    for r in per_pair {
        cells.extend(r?);
    }
    let compared = cells.iter().filter(|c| !c.excluded).count();
    let mismatches = cells
        .iter()
        .filter(|c| !c.excluded && c.expected != c.certified)
        .count();
    Ok(AtlasReport {
        cells,
        compared,
        mismatches,
    })
}
