//! Supports of the region with a common message for deterministic
//! components.

use rayon::prelude::*;
use serde_json::json;

use super::{check_input_size, pmf_json, MAX_INPUT};
use crate::bc_state::DeterministicPair;
use crate::error::{Error, Result};
use crate::prob::{refine_around, simplex_grid, simplex_grid_len, Pmf};
use crate::region::{pentagon_max, RatePoint, Support};

/// Size of the search over `p(u0, x)`.
///
/// The cloud-center variable has `|X| + 1` atoms. Atoms and their weights
/// share one grid resolution, the largest whose product grid stays within
/// `budget`; the optimum is then refined around each atom and around the weights
/// on grids `refine`, `refine²` and `refine³` times finer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommonGrid {
    pub budget: usize,
    pub refine: usize,
}

impl Default for CommonGrid {
    fn default() -> Self {
        Self {
            budget: 100_000,
            refine: 5,
        }
    }
}

/// Successively finer local searches after the product grid.
const REFINE_LEVELS: usize = 3;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

impl CommonGrid {
    /// Largest resolution, at most 20, whose product grid fits the budget.
    pub fn resolution(&self, inputs: usize) -> usize {
        let atoms = inputs + 1;
        (1..=20)
            .rev()
            .find(|&r| {
                binomial(simplex_grid_len(inputs, r), atoms).saturating_mul(simplex_grid_len(atoms, r)) <= self.budget
            })
            .unwrap_or(1)
    }
}

/// Per-atom quantities: the two conditional informations and the
/// `(I(U1;Y1|u), I(U2;Y2|u), I(U1;U2|u))` of each auxiliary choice.
#[derive(Debug, Clone)]
struct Atom {
    i: [f64; 2],
    choices: [[f64; 3]; 3],
}

struct Model {
    det: DeterministicPair,
    p1: f64,
    p2: f64,
}

impl Model {
    fn informations(&self, p: &Pmf) -> ([f64; 2], f64, f64, f64) {
        let (h1, h2, i12) = self.det.entropies(p);
        let i = [self.p1 * h1 + (1.0 - self.p1) * h2, self.p2 * h1 + (1.0 - self.p2) * h2];
        (i, h1, h2, i12)
    }

    fn atom(&self, p: &Pmf) -> Atom {
        let (i, h1, h2, i12) = self.informations(p);
        Atom {
            i,
            choices: [
                [i[0], 0.0, 0.0],
                [self.p1 * h1 + (1.0 - self.p1) * i12, self.p2 * i12 + (1.0 - self.p2) * h2, i12],
                [0.0, i[1], 0.0],
            ],
        }
    }
}

/// Maximizes `λ0 R0 + λ1 R1 + λ2 R2` over `R0 <= m`, `R0 + R1 <= t1`,
/// `R0 + R2 <= t2`, `R0 + R1 + R2 <= s`, `R >= 0`.
///
/// For fixed `R0 = r` the remaining problem is a pentagon whose value is
/// concave and piecewise linear in `r`, with a kink only at `t1 + t2 - s`.
fn polytope_max(l: &[f64], m: f64, t1: f64, t2: f64, s: f64) -> (f64, RatePoint) {
    let top = m.min(t1).min(t2).min(s).max(0.0);
    [0.0, top, (t1 + t2 - s).clamp(0.0, top)]
        .into_iter()
        .map(|r| {
            let (v, pt) = pentagon_max(t1 - r, t2 - r, s - r, l[1], l[2]);
            (l[0] * r + v, RatePoint::with_common(r, pt.r1, pt.r2))
        })
        .fold((f64::NEG_INFINITY, RatePoint::with_common(0.0, 0.0, 0.0)), |a, b| if b.0 > a.0 { b } else { a })
}

#[derive(Debug, Clone)]
struct Candidate {
    value: f64,
    point: RatePoint,
    atoms: Vec<Pmf>,
    weights: Pmf,
    choices: Vec<usize>,
}

/// Best auxiliary choices for fixed atoms and weights.
fn evaluate(model: &Model, l: &[f64], atoms: &[&Pmf], stats: &[&Atom], weights: &[f64]) -> Option<(f64, RatePoint, Vec<usize>)> {
    let parts: Vec<(f64, &Pmf)> = weights.iter().copied().zip(atoms.iter().copied()).filter(|(w, _)| *w > 0.0).collect();
    let mean = Pmf::mixture(&parts).ok()?;
    let (outer, ..) = model.informations(&mean);
    let mut cloud = outer;
    for (w, a) in weights.iter().zip(stats) {
        cloud[0] -= w * a.i[0];
        cloud[1] -= w * a.i[1];
    }
    let m = cloud[0].min(cloud[1]).max(0.0);
    let k = stats.len();
    let mut best: Option<(f64, RatePoint, Vec<usize>)> = None;
    for code in 0..3usize.pow(k as u32) {
        let mut c = code;
        let mut sums = [0.0; 3];
        let mut picks = Vec::with_capacity(k);
        for (w, a) in weights.iter().zip(stats) {
            let pick = c % 3;
            c /= 3;
            picks.push(pick);
            for (s, v) in sums.iter_mut().zip(a.choices[pick]) {
                *s += w * v;
            }
        }
        let t1 = cloud[0].max(0.0) + sums[0];
        let t2 = cloud[1].max(0.0) + sums[1];
        let (v, pt) = polytope_max(l, m, t1, t2, m + sums[0] + sums[1] - sums[2]);
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, pt, picks));
        }
    }
    best
}

/// Strictly increasing index tuples of length `k` below `n`.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn search(model: &Model, l: &[f64], grid: CommonGrid) -> Candidate {
    let n = model.det.input_size();
    let k = n + 1;
    let r = grid.resolution(n);
    let points = simplex_grid(n, r);
    let stats: Vec<Atom> = points.iter().map(|p| model.atom(p)).collect();
    let weights = simplex_grid(k, r);
    let sets = subsets(points.len(), k);

    let (value, point, set, w, choices) = sets
        .par_iter()
        .flat_map_iter(|set| {
            let atoms: Vec<&Pmf> = set.iter().map(|&i| &points[i]).collect();
            let st: Vec<&Atom> = set.iter().map(|&i| &stats[i]).collect();
            weights.iter().filter_map(move |w| {
                evaluate(model, l, &atoms, &st, w.weights()).map(|(v, pt, c)| (v, pt, set.clone(), w.clone(), c))
            })
        })
        .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && (&b.2, b.3.weights()) < (&a.2, a.3.weights())) { b } else { a })
        .expect("nonempty grid");
    let mut best = Candidate {
        value,
        point,
        atoms: set.iter().map(|&i| points[i].clone()).collect(),
        weights: w,
        choices,
    };

    if grid.refine > 1 {
        let mut res = r;
        for _ in 0..REFINE_LEVELS {
            for _ in 0..4 {
                let before = best.value;
                for u in 0..k {
                    for p in refine_around(&best.atoms[u], res, grid.refine) {
                        let mut atoms = best.atoms.clone();
                        atoms[u] = p;
                        let weights = best.weights.clone();
                        try_improve(model, l, &mut best, atoms, weights);
                    }
                }
                for w in refine_around(&best.weights, res, grid.refine) {
                    let atoms = best.atoms.clone();
                    try_improve(model, l, &mut best, atoms, w);
                }
                if best.value <= before {
                    break;
                }
            }
            res *= grid.refine;
        }
    }
    best
}

fn try_improve(model: &Model, l: &[f64], best: &mut Candidate, atoms: Vec<Pmf>, weights: Pmf) {
    let stats: Vec<Atom> = atoms.iter().map(|p| model.atom(p)).collect();
    let refs: Vec<&Pmf> = atoms.iter().collect();
    let srefs: Vec<&Atom> = stats.iter().collect();
    if let Some((v, pt, choices)) = evaluate(model, l, &refs, &srefs, weights.weights()) {
        if v > best.value + 1e-13 {
            *best = Candidate {
                value: v,
                point: pt,
                atoms,
                weights,
                choices,
            };
        }
    }
}

/// Supports in directions `(λ0, λ1, λ2)`, where `λ0` weights the common
/// rate.
///
/// Each cloud-center atom independently takes one of the auxiliary pairs
/// `(X, ∅)`, `(f1, f2)` or `(∅, X)`.
pub fn common_message_supports(
    det: &DeterministicPair,
    p1: f64,
    p2: f64,
    directions: &[Vec<f64>],
    grid: CommonGrid,
) -> Result<Vec<Support>> {
    check_input_size(det.input_size(), MAX_INPUT)?;
    for p in [p1, p2] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidPmf(format!("state probability {p} outside [0, 1]")));
        }
    }
    if let Some(d) = directions.iter().find(|d| d.len() != 3) {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: d.len(),
        });
    }
    let model = if p1 < p2 {
        Model {
            det: DeterministicPair::new(det.f2().to_vec(), det.f1().to_vec())?,
            p1: 1.0 - p1,
            p2: 1.0 - p2,
        }
    } else {
        Model { det: det.clone(), p1, p2 }
    };
    Ok(directions
        .iter()
        .map(|d| {
            let best = search(&model, d, grid);
            let names = ["first", "split", "second"];
            let atoms: Vec<_> = best
                .atoms
                .iter()
                .zip(best.weights.weights())
                .zip(&best.choices)
                .map(|((p, w), c)| json!({ "weight": w, "input": pmf_json(p), "choice": names[*c] }))
                .collect();
            Support::new(d.clone(), best.point).with_params(json!({ "cloud": atoms }))
        })
        .collect())
}
