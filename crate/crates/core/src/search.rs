//! Grid maximization over the probability simplex with one level of local
//! refinement.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::envelope::{ConcaveEnvelope, EnvelopeAtoms};
use crate::error::Result;
use crate::prob::{refine_around, simplex_grid, Pmf};

/// Coarse resolution and refinement factor for a simplex search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub resolution: usize,
    pub refine: usize,
}

impl GridSpec {
    pub const fn new(resolution: usize, refine: usize) -> Self {
        Self { resolution, refine }
    }

    /// 400 points on the line, 100 per axis on the triangle, both refined ×10.
    pub fn default_for(dim: usize) -> Self {
        match dim {
            0..=2 => Self::new(400, 10),
            3 => Self::new(100, 10),
            _ => Self::new(20, 5),
        }
    }

    /// Same refinement with the coarse resolution replaced when given.
    pub fn with_resolution(self, resolution: Option<usize>) -> Self {
        match resolution {
            Some(r) => Self { resolution: r, ..self },
            None => self,
        }
    }

    pub fn finest(&self) -> usize {
        self.resolution * self.refine.max(1)
    }
}

/// Index of the first maximum; NaNs never win.
pub fn first_argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some(b) if values[b] >= *v => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Evaluates `f` on every point in parallel, keeping input order.
pub fn evaluate<F>(points: &[Pmf], f: F) -> Vec<f64>
where
    F: Fn(&Pmf) -> f64 + Sync,
{
    points.par_iter().map(&f).collect()
}

/// Maximizes `f` on the grid, then on a finer grid around the coarse optimum.
pub fn maximize<F>(dim: usize, spec: GridSpec, f: F) -> (Pmf, f64)
where
    F: Fn(&Pmf) -> f64 + Sync,
{
    let grid = simplex_grid(dim, spec.resolution);
    let values = evaluate(&grid, &f);
    let i = first_argmax(&values).expect("nonempty grid");
    let (mut best_p, mut best_v) = (grid[i].clone(), values[i]);
    if spec.refine > 1 && dim > 1 {
        let local = refine_around(&best_p, spec.resolution, spec.refine);
        let lv = evaluate(&local, &f);
        if let Some(j) = first_argmax(&lv) {
            if lv[j] > best_v {
                best_p = local[j].clone();
                best_v = lv[j];
            }
        }
    }
    (best_p, best_v)
}

/// Optimum of a score built from the input and an envelope mixture.
#[derive(Debug, Clone)]
pub struct EnvelopeMax {
    pub value: f64,
    pub input: Pmf,
    pub envelope: f64,
    pub mixture: Vec<(f64, Pmf)>,
}

/// Maximizes `base + concave envelope of inner` over the simplex.
pub fn maximize_with_envelope<B, I>(dim: usize, spec: GridSpec, base: B, inner: I) -> Result<EnvelopeMax>
where
    B: Fn(&Pmf) -> f64 + Sync,
    I: Fn(&Pmf) -> f64 + Sync,
{
    maximize_envelope_by(dim, spec, inner, |p, env, _| base(p) + env)
}

/// Maximizes `score(p, 𝔉[inner](p), mixture)` over grid inputs `p`, where the
/// mixture is the envelope decomposition of `p`.
///
/// The refinement pass resamples `inner` on a finer grid around the coarse
/// optimum and around each atom of its mixture, so the envelope itself is
/// refined where it matters.
pub fn maximize_envelope_by<I, S>(dim: usize, spec: GridSpec, inner: I, score: S) -> Result<EnvelopeMax>
where
    I: Fn(&Pmf) -> f64 + Sync,
    S: Fn(&Pmf, f64, &[(f64, &Pmf)]) -> f64 + Sync,
{
    let grid = simplex_grid(dim, spec.resolution);
    let inner_values = evaluate(&grid, &inner);
    let env = ConcaveEnvelope::new(grid, inner_values)?;
    let answers = env.at_samples()?;
    let scored = |env: &ConcaveEnvelope, queries: &[Pmf], answers: &[EnvelopeAtoms]| -> Vec<f64> {
        queries
            .par_iter()
            .zip(answers.par_iter())
            .map(|(q, a)| {
                let atoms: Vec<(f64, &Pmf)> = a.atoms.iter().map(|&(w, k)| (w, &env.points()[k])).collect();
                score(q, a.value, &atoms)
            })
            .collect()
    };
    let totals = scored(&env, env.points(), &answers);
    let i = first_argmax(&totals).expect("nonempty grid");
    let mut best = EnvelopeMax {
        value: totals[i],
        input: env.points()[i].clone(),
        envelope: answers[i].value,
        mixture: env.materialize(answers[i].clone()).mixture,
    };
    if spec.refine <= 1 || dim == 1 {
        return Ok(best);
    }

    let fine = spec.finest();
    let key = |p: &Pmf| -> Vec<i64> { p.weights().iter().map(|w| (w * fine as f64).round() as i64).collect() };
    let mut keys: BTreeSet<Vec<i64>> = env.points().iter().map(key).collect();
    let mut samples: Vec<Pmf> = env.points().to_vec();
    let mut centers = vec![best.input.clone()];
    centers.extend(best.mixture.iter().map(|(_, p)| p.clone()));
    for c in &centers {
        for p in refine_around(c, spec.resolution, spec.refine) {
            if keys.insert(key(&p)) {
                samples.push(p);
            }
        }
    }
    let values = evaluate(&samples, &inner);
    let env = ConcaveEnvelope::new(samples, values)?;
    let queries = refine_around(&best.input, spec.resolution, spec.refine);
    let answers = env.eval_many_atoms(&queries)?;
    let totals = scored(&env, &queries, &answers);
    if let Some(j) = first_argmax(&totals) {
        if totals[j] > best.value {
            best = EnvelopeMax {
                value: totals[j],
                input: queries[j].clone(),
                envelope: answers[j].value,
                mixture: env.materialize(answers[j].clone()).mixture,
            };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{binary_entropy, entropy};

    #[test]
    fn ties_go_to_first_grid_point() {
        let (p, v) = maximize(2, GridSpec::new(10, 1), |_| 1.0);
        assert_eq!(v, 1.0);
        assert_eq!(p.weights(), &[0.0, 1.0]);
    }

    #[test]
    fn refinement_finds_off_grid_peak() {
        let target = 0.3141;
        let (p, _) = maximize(2, GridSpec::new(100, 10), |p| -(p[1] - target).powi(2));
        assert!((p[1] - target).abs() <= 5e-4);
        let (p, v) = maximize(3, GridSpec::new(20, 10), entropy);
        assert!((v - 3f64.log2()).abs() < 1e-3);
        assert!(p.max_abs_diff(&Pmf::uniform(3)) < 0.01);
    }

    #[test]
    fn envelope_objective_matches_closed_form() {
        // max_p [ -H(p) + 𝔉[H](p) ] = 0 since H is concave
        let r = maximize_with_envelope(2, GridSpec::new(40, 10), |p| -binary_entropy(p[1]), |p| binary_entropy(p[1])).unwrap();
        assert!(r.value.abs() < 1e-9);
        // convex inner function: envelope is the chord through the endpoints
        let r = maximize_with_envelope(2, GridSpec::new(40, 10), |p| binary_entropy(p[1]), |p| (p[1] - 0.5).powi(2)).unwrap();
        assert!((r.value - 1.25).abs() < 1e-9);
        assert!((r.input[1] - 0.5).abs() < 1e-12);
        assert_eq!(r.mixture.len(), 2);
    }
}
