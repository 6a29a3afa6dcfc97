//! Dense two-phase simplex for small linear programs.
//!
//! Problems are stated as `minimize c·x` subject to `A_ub x <= b_ub`,
//! `A_eq x = b_eq` and `x >= 0`. The entering column follows Bland's rule and
//! the leaving row a Harris ratio test; the programs solved here have at most
//! a few hundred columns.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const RATIO_PIVOT_EPS: f64 = 1e-9;
const HARRIS_SLACK: f64 = 1e-11;
const FEASIBILITY_EPS: f64 = 1e-9;
const REDUNDANT_EPS: f64 = 1e-7;
const RESIDUAL_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    cost: Vec<f64>,
    ub: Vec<(Vec<f64>, f64)>,
    eq: Vec<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

impl LinearProgram {
    /// Minimization problem over `cost.len()` nonnegative variables.
    pub fn minimize(cost: Vec<f64>) -> Self {
        Self {
            cost,
            ub: Vec::new(),
            eq: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.cost.len()
    }

    /// Adds `row · x <= rhs`.
    pub fn less_eq(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        assert_eq!(row.len(), self.cost.len(), "constraint width");
        self.ub.push((row, rhs));
        self
    }

    /// Adds `row · x >= rhs`.
    pub fn greater_eq(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.less_eq(row.into_iter().map(|v| -v).collect(), -rhs)
    }

    /// Adds `row · x = rhs`.
    pub fn equal(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        assert_eq!(row.len(), self.cost.len(), "constraint width");
        self.eq.push((row, rhs));
        self
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let sol = Tableau::build(self).solve(&self.cost)?;
        let dot = |a: &[f64]| a.iter().zip(&sol.x).map(|(u, v)| u * v).sum::<f64>();
        let scale = 1.0 + sol.x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let worst = self
            .ub
            .iter()
            .map(|(a, b)| dot(a) - b)
            .chain(self.eq.iter().map(|(a, b)| (dot(a) - b).abs()))
            .fold(0.0f64, f64::max);
        if worst > RESIDUAL_EPS * scale {
            return Err(Error::InvariantBreach(format!("simplex solution violates a constraint by {worst:.3e}")));
        }
        Ok(sol)
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    n_struct: usize,
    n_cols: usize,
    first_artificial: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.cost.len();
        let n_slack = lp.ub.len();
        let m = lp.ub.len() + lp.eq.len();
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut needs_artificial = Vec::with_capacity(m);
        for (i, (a, b)) in lp.ub.iter().enumerate() {
            let sign = if *b < 0.0 { -1.0 } else { 1.0 };
            let mut row = vec![0.0; n + n_slack];
            for (r, v) in row.iter_mut().zip(a) {
                *r = sign * v;
            }
            row[n + i] = sign;
            rows.push(row);
            rhs.push(sign * b);
            needs_artificial.push(sign < 0.0);
        }
        for (a, b) in &lp.eq {
            let sign = if *b < 0.0 { -1.0 } else { 1.0 };
            let mut row = vec![0.0; n + n_slack];
            for (r, v) in row.iter_mut().zip(a) {
                *r = sign * v;
            }
            rows.push(row);
            rhs.push(sign * b);
            needs_artificial.push(true);
        }
        let first_artificial = n + n_slack;
        let n_art = needs_artificial.iter().filter(|&&f| f).count();
        let n_cols = first_artificial + n_art;
        let mut basis = Vec::with_capacity(m);
        let mut next_art = first_artificial;
        for (i, row) in rows.iter_mut().enumerate() {
            row.resize(n_cols, 0.0);
            if needs_artificial[i] {
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            } else {
                basis.push(n + i);
            }
        }
        Self {
            rows,
            rhs,
            basis,
            n_struct: n,
            n_cols,
            first_artificial,
        }
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rhs[r] /= p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][col];
            if f == 0.0 {
                continue;
            }
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.rhs[i] -= f * pivot_rhs;
        }
        self.basis[r] = col;
    }

    /// Runs the simplex minimizing `cost` over columns `< limit`.
    fn optimize(&mut self, cost: &[f64], limit: usize) -> Result<()> {
        let max_iter = 50_000;
        for _ in 0..max_iter {
            let mut duals = vec![0.0; self.rows.len()];
            for (i, &b) in self.basis.iter().enumerate() {
                duals[i] = cost.get(b).copied().unwrap_or(0.0);
            }
            let entering = (0..limit).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let z: f64 = (0..self.rows.len()).map(|i| duals[i] * self.rows[i][j]).sum();
                cost[j] - z < -PIVOT_EPS
            });
            let Some(col) = entering else {
                return Ok(());
            };
            // Harris ratio test: relaxed minimum ratio, then the largest pivot
            let candidates: Vec<usize> = (0..self.rows.len()).filter(|&i| self.rows[i][col] > RATIO_PIVOT_EPS).collect();
            let relaxed = candidates
                .iter()
                .map(|&i| (self.rhs[i].max(0.0) + HARRIS_SLACK) / self.rows[i][col])
                .fold(f64::INFINITY, f64::min);
            let best = candidates
                .into_iter()
                .filter(|&i| self.rhs[i].max(0.0) / self.rows[i][col] <= relaxed)
                .max_by(|&a, &b| {
                    self.rows[a][col]
                        .total_cmp(&self.rows[b][col])
                        .then(self.basis[b].cmp(&self.basis[a]))
                })
                .map(|i| (i, ()));
            let Some((r, _)) = best else {
                return Err(Error::InvariantBreach("linear program is unbounded".into()));
            };
            self.pivot(r, col);
        }
        Err(Error::InvariantBreach("simplex iteration limit reached".into()))
    }

    fn solve(mut self, cost: &[f64]) -> Result<LpSolution> {
        if self.n_cols > self.first_artificial {
            let mut phase1 = vec![0.0; self.n_cols];
            for c in phase1.iter_mut().skip(self.first_artificial) {
                *c = 1.0;
            }
            self.optimize(&phase1, self.n_cols)?;
            let infeasibility: f64 = self
                .basis
                .iter()
                .zip(&self.rhs)
                .filter(|(&b, _)| b >= self.first_artificial)
                .map(|(_, &v)| v)
                .sum();
            if infeasibility > FEASIBILITY_EPS {
                return Err(Error::Infeasible);
            }
            // pivot degenerate artificials out on the largest entry; rows with
            // none left are redundant
            for r in (0..self.rows.len()).rev() {
                if self.basis[r] < self.first_artificial {
                    continue;
                }
                let best = (0..self.first_artificial)
                    .filter(|j| !self.basis.contains(j))
                    .max_by(|&a, &b| self.rows[r][a].abs().total_cmp(&self.rows[r][b].abs()));
                match best {
                    Some(col) if self.rows[r][col].abs() > REDUNDANT_EPS => self.pivot(r, col),
                    _ => {
                        self.rows.remove(r);
                        self.rhs.remove(r);
                        self.basis.remove(r);
                    }
                }
            }
        }
        let mut phase2 = vec![0.0; self.n_cols];
        phase2[..self.n_struct].copy_from_slice(cost);
        self.optimize(&phase2, self.first_artificial)?;
        let mut x = vec![0.0; self.n_struct];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                x[b] = self.rhs[i].max(0.0);
            }
        }
        let objective = x.iter().zip(cost).map(|(a, b)| a * b).sum();
        Ok(LpSolution { x, objective })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
        let mut lp = LinearProgram::minimize(vec![-3.0, -5.0]);
        lp.less_eq(vec![1.0, 0.0], 4.0)
            .less_eq(vec![0.0, 2.0], 12.0)
            .less_eq(vec![3.0, 2.0], 18.0);
        let s = lp.solve().unwrap();
        assert!((s.objective + 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_lower_bounds() {
        // min x + 2y s.t. x + y = 3, y >= 1
        let mut lp = LinearProgram::minimize(vec![1.0, 2.0]);
        lp.equal(vec![1.0, 1.0], 3.0).greater_eq(vec![0.0, 1.0], 1.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 4.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        let mut lp = LinearProgram::minimize(vec![1.0]);
        lp.less_eq(vec![1.0], 1.0).greater_eq(vec![1.0], 2.0);
        assert!(matches!(lp.solve(), Err(Error::Infeasible)));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::minimize(vec![1.0, 1.0]);
        lp.equal(vec![1.0, 1.0], 1.0).equal(vec![2.0, 2.0], 2.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 1.0).abs() < 1e-9);
    }
}
