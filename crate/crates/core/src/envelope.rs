//! Upper concave envelopes of functions sampled on the probability simplex.
//!
//! Binary alphabets use a monotone-chain upper hull. Ternary alphabets solve
//! the lifted hull problem as a three-row linear program
//!
//! ```text
//! maximize  Σ_k w_k g_k
//! subject to Σ_k w_k (1, p_k0, p_k1) = (1, q0, q1),  w >= 0
//! ```
//!
//! whose optimal bases are exactly the facets of the upper hull. Queries
//! answered in sequence reuse the previous facet and walk to the next one
//! with dual simplex pivots.

use crate::error::{Error, Result};
use crate::prob::Pmf;

/// Envelope value at a query point and a mixture of sample points realizing it.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeResult {
    pub value: f64,
    pub mixture: Vec<(f64, Pmf)>,
}

/// Index-based variant of [`EnvelopeResult`]; atoms refer to sample positions.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeAtoms {
    pub value: f64,
    pub atoms: Vec<(f64, usize)>,
}

#[derive(Debug, Clone)]
enum Kernel {
    Point,
    Chain { hull: Vec<usize> },
    Lifted,
}

/// Preprocessed sample set supporting repeated envelope queries.
#[derive(Debug, Clone)]
pub struct ConcaveEnvelope {
    dim: usize,
    points: Vec<Pmf>,
    values: Vec<f64>,
    kernel: Kernel,
}

const ARTIFICIAL_DEPTH: f64 = 1e3;
const REDUCED_COST_EPS: f64 = 1e-12;
const PRIMAL_EPS: f64 = 1e-12;

impl ConcaveEnvelope {
    pub fn new(points: Vec<Pmf>, values: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: values.len(),
            });
        }
        let dim = points[0].len();
        if let Some(bad) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("non-finite envelope sample".into()));
        }
        let kernel = match dim {
            1 => Kernel::Point,
            2 => Kernel::Chain {
                hull: upper_chain(&points, &values),
            },
            3 => Kernel::Lifted,
            d => {
                return Err(Error::Unsupported(format!(
                    "concave envelope over an alphabet of size {d}"
                )))
            }
        };
        Ok(Self {
            dim,
            points,
            values,
            kernel,
        })
    }

    /// Samples `f` on `points` and preprocesses.
    pub fn sample(points: Vec<Pmf>, f: impl Fn(&Pmf) -> f64) -> Result<Self> {
        let values = points.iter().map(&f).collect();
        Self::new(points, values)
    }

    pub fn points(&self) -> &[Pmf] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, query: &Pmf) -> Result<EnvelopeResult> {
        let atoms = self.eval_atoms(query)?;
        Ok(self.materialize(atoms))
    }

    pub fn eval_atoms(&self, query: &Pmf) -> Result<EnvelopeAtoms> {
        if query.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: query.len(),
            });
        }
        match &self.kernel {
            Kernel::Point => Ok(self.point_answer()),
            Kernel::Chain { hull } => self.chain_query(hull, query[1]),
            Kernel::Lifted => {
                let mut walker = LiftedWalker::new(&self.points, &self.values);
                walker.query(query[0], query[1])
            }
        }
    }

    /// Answers a batch of queries; ternary batches reuse the facet found for
    /// the previous query, so nearby consecutive queries are cheap.
    pub fn eval_many_atoms(&self, queries: &[Pmf]) -> Result<Vec<EnvelopeAtoms>> {
        match &self.kernel {
            Kernel::Lifted => {
                let mut walker = LiftedWalker::new(&self.points, &self.values);
                queries
                    .iter()
                    .map(|q| {
                        if q.len() != 3 {
                            return Err(Error::DimensionMismatch {
                                expected: 3,
                                got: q.len(),
                            });
                        }
                        walker.query(q[0], q[1])
                    })
                    .collect()
            }
            _ => queries.iter().map(|q| self.eval_atoms(q)).collect(),
        }
    }

    pub fn eval_many(&self, queries: &[Pmf]) -> Result<Vec<EnvelopeResult>> {
        Ok(self
            .eval_many_atoms(queries)?
            .into_iter()
            .map(|a| self.materialize(a))
            .collect())
    }

    /// Envelope evaluated at every sample point, in sample order.
    pub fn at_samples(&self) -> Result<Vec<EnvelopeAtoms>> {
        let order = snake_order(&self.points);
        let queries: Vec<Pmf> = order.iter().map(|&i| self.points[i].clone()).collect();
        let answers = self.eval_many_atoms(&queries)?;
        let mut out = vec![None; self.points.len()];
        for (i, a) in order.into_iter().zip(answers) {
            out[i] = Some(a);
        }
        Ok(out.into_iter().map(|a| a.expect("every sample answered")).collect())
    }

    pub fn materialize(&self, atoms: EnvelopeAtoms) -> EnvelopeResult {
        EnvelopeResult {
            value: atoms.value,
            mixture: atoms
                .atoms
                .into_iter()
                .map(|(w, i)| (w, self.points[i].clone()))
                .collect(),
        }
    }

    fn point_answer(&self) -> EnvelopeAtoms {
        let (best, &value) = self
            .values
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
        EnvelopeAtoms {
            value,
            atoms: vec![(1.0, best)],
        }
    }

    fn chain_query(&self, hull: &[usize], x: f64) -> Result<EnvelopeAtoms> {
        let xs = |i: usize| self.points[hull[i]][1];
        let lo = xs(0);
        let hi = xs(hull.len() - 1);
        if x < lo - 1e-12 || x > hi + 1e-12 {
            return Err(Error::OutsideHull);
        }
        // first hull vertex with abscissa >= x
        let pos = hull.partition_point(|&i| self.points[i][1] < x);
        if pos < hull.len() && (xs(pos) - x).abs() <= 1e-15 {
            let k = hull[pos];
            return Ok(EnvelopeAtoms {
                value: self.values[k],
                atoms: vec![(1.0, k)],
            });
        }
        if pos == 0 || pos == hull.len() {
            let k = if pos == 0 { hull[0] } else { hull[hull.len() - 1] };
            return Ok(EnvelopeAtoms {
                value: self.values[k],
                atoms: vec![(1.0, k)],
            });
        }
        let (a, b) = (hull[pos - 1], hull[pos]);
        let (xa, xb) = (self.points[a][1], self.points[b][1]);
        let t = (x - xa) / (xb - xa);
        Ok(EnvelopeAtoms {
            value: (1.0 - t) * self.values[a] + t * self.values[b],
            atoms: vec![(1.0 - t, a), (t, b)],
        })
    }
}

/// One-shot envelope query over explicit samples.
pub fn upper_concave_envelope(samples: &[(Pmf, f64)], query: &Pmf) -> Result<EnvelopeResult> {
    let (points, values): (Vec<Pmf>, Vec<f64>) = samples.iter().cloned().unzip();
    ConcaveEnvelope::new(points, values)?.eval(query)
}

fn upper_chain(points: &[Pmf], values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a][1]
            .total_cmp(&points[b][1])
            .then(values[b].total_cmp(&values[a]))
    });
    // keep the highest sample per abscissa
    order.dedup_by(|b, a| points[*a][1] == points[*b][1]);
    let mut hull: Vec<usize> = Vec::with_capacity(order.len());
    for k in order {
        while hull.len() >= 2 {
            let i = hull[hull.len() - 2];
            let j = hull[hull.len() - 1];
            let (x1, y1) = (points[i][1], values[i]);
            let (x2, y2) = (points[j][1], values[j]);
            let (x3, y3) = (points[k][1], values[k]);
            let cross = (x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    hull
}

/// Sample indices ordered row by row with alternating direction, so that
/// consecutive points are grid neighbours.
fn snake_order(points: &[Pmf]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    if points.first().map(|p| p.len()).unwrap_or(0) < 3 {
        return order;
    }
    let key = |p: &Pmf| (p[0] * 1e9).round() as i64;
    let mut rows: Vec<i64> = points.iter().map(key).collect();
    rows.sort_unstable();
    rows.dedup();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (key(&points[a]), key(&points[b]));
        ra.cmp(&rb).then_with(|| {
            let parity = rows.binary_search(&ra).unwrap_or(0) % 2;
            let c = points[a][1].total_cmp(&points[b][1]);
            if parity == 0 {
                c
            } else {
                c.reverse()
            }
        })
    });
    order
}

/// Revised simplex state over the lifted ternary samples.
///
/// Columns `0..n` are samples; `n..n+3` are artificial simplex vertices sitting
/// far below every sample so that the vertex basis is always feasible.
struct LiftedWalker<'a> {
    points: &'a [Pmf],
    values: &'a [f64],
    perturbed: Vec<f64>,
    basis: [usize; 3],
    warm: bool,
}

impl<'a> LiftedWalker<'a> {
    fn new(points: &'a [Pmf], values: &'a [f64]) -> Self {
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        let scale = 1.0 + hi.abs().max(lo.abs());
        let n = points.len();
        // Tiny index-dependent tilt so coplanar samples do not stall the pivots.
        let mut perturbed: Vec<f64> = values
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let h = (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 40;
                v + 1e-13 * scale * (h as f64 / (1u64 << 24) as f64)
            })
            .collect();
        let floor = lo - ARTIFICIAL_DEPTH * scale;
        perturbed.extend([floor; 3]);
        Self {
            points,
            values,
            perturbed,
            basis: [n, n + 1, n + 2],
            warm: false,
        }
    }

    fn n(&self) -> usize {
        self.points.len()
    }

    fn column(&self, k: usize) -> [f64; 3] {
        if k < self.n() {
            let p = &self.points[k];
            [1.0, p[0], p[1]]
        } else {
            match k - self.n() {
                0 => [1.0, 1.0, 0.0],
                1 => [1.0, 0.0, 1.0],
                _ => [1.0, 0.0, 0.0],
            }
        }
    }

    fn basis_inverse(&self) -> Option<[[f64; 3]; 3]> {
        let c: Vec<[f64; 3]> = self.basis.iter().map(|&k| self.column(k)).collect();
        // B has columns c[0], c[1], c[2]
        let m = [
            [c[0][0], c[1][0], c[2][0]],
            [c[0][1], c[1][1], c[2][1]],
            [c[0][2], c[1][2], c[2][2]],
        ];
        invert3(&m)
    }

    fn query(&mut self, q0: f64, q1: f64) -> Result<EnvelopeAtoms> {
        if q0 < -1e-12 || q1 < -1e-12 || q0 + q1 > 1.0 + 1e-12 {
            return Err(Error::OutsideHull);
        }
        let b = [1.0, q0, q1];
        let solved = if self.warm {
            self.dual_walk(&b)
        } else {
            false
        };
        if !solved {
            self.basis = [self.n(), self.n() + 1, self.n() + 2];
            self.primal(&b)?;
        }
        self.warm = true;
        self.answer(&b)
    }

    fn answer(&self, b: &[f64; 3]) -> Result<EnvelopeAtoms> {
        let inv = self.basis_inverse().ok_or_else(singular)?;
        let x = mat_vec(&inv, b);
        let mut atoms = Vec::with_capacity(3);
        let mut value = 0.0;
        for (i, &k) in self.basis.iter().enumerate() {
            let w = x[i].max(0.0);
            if w <= 1e-15 {
                continue;
            }
            if k >= self.n() {
                if w > 1e-9 {
                    return Err(Error::OutsideHull);
                }
                continue;
            }
            atoms.push((w, k));
            value += w * self.values[k];
        }
        let total: f64 = atoms.iter().map(|a| a.0).sum();
        if total <= 0.0 {
            return Err(Error::OutsideHull);
        }
        if total != 1.0 {
            for a in atoms.iter_mut() {
                a.0 /= total;
            }
            value /= total;
        }
        atoms.sort_by_key(|a| a.1);
        Ok(EnvelopeAtoms { value, atoms })
    }

    fn duals(&self, inv: &[[f64; 3]; 3]) -> [f64; 3] {
        let cb = [
            self.perturbed[self.basis[0]],
            self.perturbed[self.basis[1]],
            self.perturbed[self.basis[2]],
        ];
        // y = B^{-T} c_B
        let mut y = [0.0; 3];
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = (0..3).map(|i| inv[i][j] * cb[i]).sum();
        }
        y
    }

    fn reduced(&self, y: &[f64; 3], k: usize) -> f64 {
        let a = self.column(k);
        self.perturbed[k] - (y[0] * a[0] + y[1] * a[1] + y[2] * a[2])
    }

    fn primal(&mut self, b: &[f64; 3]) -> Result<()> {
        let total = self.n() + 3;
        let mut degenerate_run = 0usize;
        let limit = 20 * total + 1000;
        for _ in 0..limit {
            let inv = self.basis_inverse().ok_or_else(singular)?;
            let x = mat_vec(&inv, b);
            let y = self.duals(&inv);
            let bland = degenerate_run > 50;
            let mut entering = None;
            let mut best = REDUCED_COST_EPS;
            for k in 0..total {
                if self.basis.contains(&k) {
                    continue;
                }
                let d = self.reduced(&y, k);
                if d > best {
                    entering = Some(k);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(e) = entering else {
                return Ok(());
            };
            let u = mat_vec(&inv, &self.column(e));
            let mut leave = None;
            let mut ratio = f64::INFINITY;
            for i in 0..3 {
                if u[i] > 1e-12 {
                    let r = x[i].max(0.0) / u[i];
                    if r < ratio - 1e-15
                        || (r <= ratio + 1e-15 && leave.is_some_and(|l: usize| self.basis[i] < self.basis[l]))
                    {
                        ratio = r;
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else {
                return Err(Error::InvariantBreach("unbounded envelope program".into()));
            };
            degenerate_run = if ratio <= PRIMAL_EPS { degenerate_run + 1 } else { 0 };
            self.basis[r] = e;
        }
        Err(Error::InvariantBreach("envelope simplex did not converge".into()))
    }

    /// Dual simplex from the previous optimal basis. Returns false when the
    /// walk gives up, in which case the caller restarts from scratch.
    fn dual_walk(&mut self, b: &[f64; 3]) -> bool {
        let total = self.n() + 3;
        for _ in 0..200 {
            let Some(inv) = self.basis_inverse() else {
                return false;
            };
            let x = mat_vec(&inv, b);
            let (r, &xr) = x
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("three rows");
            if xr >= -PRIMAL_EPS {
                return true;
            }
            let y = self.duals(&inv);
            let rho = inv[r];
            let mut entering = None;
            let mut best_ratio = f64::INFINITY;
            let mut best_alpha = 0.0;
            for k in 0..total {
                if self.basis.contains(&k) {
                    continue;
                }
                let a = self.column(k);
                let alpha = rho[0] * a[0] + rho[1] * a[1] + rho[2] * a[2];
                if alpha < -1e-12 {
                    let ratio = (-self.reduced(&y, k)).max(0.0) / -alpha;
                    if ratio < best_ratio - 1e-15
                        || (ratio <= best_ratio + 1e-15 && -alpha > best_alpha)
                    {
                        best_ratio = ratio;
                        best_alpha = -alpha;
                        entering = Some(k);
                    }
                }
            }
            match entering {
                Some(e) => self.basis[r] = e,
                None => return false,
            }
        }
        false
    }
}

fn singular() -> Error {
    Error::InvariantBreach("singular envelope basis".into())
}

fn mat_vec(m: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    let c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    let c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    if det.abs() < 1e-14 {
        return None;
    }
    let inv_det = 1.0 / det;
    Some([
        [
            c00 * inv_det,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det,
        ],
        [
            c01 * inv_det,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det,
        ],
        [
            c02 * inv_det,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det,
        ],
    ])
}
