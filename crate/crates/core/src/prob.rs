//! Finite-alphabet probability primitives.
//!
//! Everything here works in bits with the conventions `0 log 0 = 0` and
//! `0 log(0/0) = 0`. Probability vectors and channel matrices are validated
//! on construction so that the optimizers downstream can index freely.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Construction tolerance for row sums and probability vectors.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A probability vector over the alphabet `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf {
    weights: Vec<f64>,
}

impl Pmf {
    /// Validates `weights` and renormalizes away rounding error.
    ///
    /// Entries down to `-1e-12` are clamped to zero; anything more negative,
    /// non-finite, or a sum further than [`SUM_TOLERANCE`] from one is
    /// rejected.
    pub fn new(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidPmf("empty probability vector".into()));
        }
        for w in weights.iter_mut() {
            if !w.is_finite() || *w < -1e-12 {
                return Err(Error::InvalidPmf(format!("entry {w} is not a probability")));
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidPmf(format!("entries sum to {sum}")));
        }
        if sum != 1.0 {
            weights.iter_mut().for_each(|w| *w /= sum);
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform pmf over an empty alphabet");
        Self {
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// Point mass on `index`.
    pub fn point(n: usize, index: usize) -> Self {
        assert!(index < n, "point mass index out of range");
        let mut weights = vec![0.0; n];
        weights[index] = 1.0;
        Self { weights }
    }

    /// `Bern(x)` written as `(1 - x, x)`.
    pub fn bernoulli(x: f64) -> Self {
        let x = x.clamp(0.0, 1.0);
        Self {
            weights: vec![1.0 - x, x],
        }
    }

    /// Builds from nonnegative weights of arbitrary total mass.
    pub fn from_unnormalized(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidPmf("weights must be nonnegative with positive mass".into()));
        }
        Ok(Self {
            weights: weights.into_iter().map(|w| w / sum).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    /// Weighted average `Σ_k w_k p_k` of equally sized pmfs.
    pub fn mixture(parts: &[(f64, &Pmf)]) -> Result<Pmf> {
        let n = parts
            .first()
            .map(|(_, p)| p.len())
            .ok_or_else(|| Error::InvalidPmf("empty mixture".into()))?;
        let mut acc = vec![0.0; n];
        for (w, p) in parts {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: p.len(),
                });
            }
            for (a, x) in acc.iter_mut().zip(p.weights()) {
                *a += w * x;
            }
        }
        Pmf::new(acc)
    }

    /// L-infinity distance between two pmfs of the same length.
    pub fn max_abs_diff(&self, other: &Pmf) -> f64 {
        self.weights
            .iter()
            .zip(other.weights.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Pmf::new(value)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(value: Pmf) -> Self {
        value.weights
    }
}

impl std::ops::Index<usize> for Pmf {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.weights[index]
    }
}

/// Row-stochastic matrix `p(y|x)`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl ChannelMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_rows = rows.len();
        if n_rows == 0 {
            return Err(Error::InvalidChannel("no input symbols".into()));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::InvalidChannel("no output symbols".into()));
        }
        let mut entries = Vec::with_capacity(n_rows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidChannel(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            let pmf = Pmf::new(row)
                .map_err(|e| Error::InvalidChannel(format!("row {i}: {e}")))?;
            entries.extend_from_slice(pmf.weights());
        }
        Ok(Self {
            rows: n_rows,
            cols,
            entries,
        })
    }

    /// Deterministic channel sending input `x` to output `map[x]`.
    pub fn deterministic(map: &[usize], output_size: usize) -> Result<Self> {
        let mut rows = Vec::with_capacity(map.len());
        for &y in map {
            if y >= output_size {
                return Err(Error::InvalidChannel(format!(
                    "output {y} outside alphabet of size {output_size}"
                )));
            }
            let mut row = vec![0.0; output_size];
            row[y] = 1.0;
            rows.push(row);
        }
        Self::new(rows)
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(p: f64) -> Self {
        Self {
            rows: 2,
            cols: 2,
            entries: vec![1.0 - p, p, p, 1.0 - p],
        }
    }

    /// Binary erasure channel with erasure probability `e`; outputs are
    /// ordered `(0, erasure, 1)`.
    pub fn bec(e: f64) -> Self {
        Self {
            rows: 2,
            cols: 3,
            entries: vec![1.0 - e, e, 0.0, 0.0, e, 1.0 - e],
        }
    }

    /// Z-channel: input 0 is received cleanly, input 1 flips with probability `p`.
    pub fn z_channel(p: f64) -> Self {
        Self {
            rows: 2,
            cols: 2,
            entries: vec![1.0, 0.0, p, 1.0 - p],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.entries[x * self.cols..(x + 1) * self.cols]
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.entries[x * self.cols + y]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|x| self.row(x).to_vec()).collect()
    }

    /// Output distribution for input pmf `px`.
    pub fn output(&self, px: &Pmf) -> Result<Vec<f64>> {
        if px.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: px.len(),
            });
        }
        let mut out = vec![0.0; self.cols];
        for (x, &w) in px.weights().iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, &e) in out.iter_mut().zip(self.row(x)) {
                *o += w * e;
            }
        }
        Ok(out)
    }

    /// Cascade `self · other`.
    pub fn compose(&self, other: &ChannelMatrix) -> Result<ChannelMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut entries = vec![0.0; self.rows * other.cols];
        for x in 0..self.rows {
            for z in 0..self.cols {
                let a = self.get(x, z);
                if a == 0.0 {
                    continue;
                }
                for y in 0..other.cols {
                    entries[x * other.cols + y] += a * other.get(z, y);
                }
            }
        }
        Ok(ChannelMatrix {
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }

    /// True when every row is a point mass.
    pub fn is_deterministic(&self) -> bool {
        (0..self.rows).all(|x| self.row(x).iter().filter(|&&v| v == 1.0).count() == 1)
    }

    /// Output index of each row for a deterministic channel.
    pub fn as_map(&self) -> Option<Vec<usize>> {
        (0..self.rows)
            .map(|x| self.row(x).iter().position(|&v| v == 1.0))
            .collect::<Option<Vec<_>>>()
            .filter(|_| self.is_deterministic())
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &ChannelMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[inline]
pub(crate) fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy of a raw weight slice in bits.
pub fn entropy_of(weights: &[f64]) -> f64 {
    weights.iter().map(|&p| plogp(p)).sum()
}

/// Shannon entropy in bits.
pub fn entropy(p: &Pmf) -> f64 {
    entropy_of(p.weights())
}

/// Binary entropy function `H(x)` in bits.
pub fn binary_entropy(x: f64) -> f64 {
    plogp(x) + plogp(1.0 - x)
}

/// Binary convolution `a * b = a(1-b) + b(1-a)`.
pub fn binary_convolution(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

/// `I(X;Y)` in bits for `X ~ px` through `channel`.
pub fn mutual_information(px: &Pmf, channel: &ChannelMatrix) -> Result<f64> {
    let out = channel.output(px)?;
    let noise: f64 = px
        .weights()
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(x, &w)| w * entropy_of(channel.row(x)))
        .sum();
    Ok((entropy_of(&out) - noise).max(0.0))
}

/// Distribution of `f(X)` for a deterministic map `f`.
pub fn push_forward(px: &Pmf, map: &[usize], output_size: usize) -> Vec<f64> {
    let mut out = vec![0.0; output_size];
    for (x, &w) in px.weights().iter().enumerate() {
        out[map[x]] += w;
    }
    out
}

/// All compositions `(k_1, .., k_dim) / resolution` in lexicographic order.
///
/// The count is `C(resolution + dim - 1, dim - 1)`.
pub fn simplex_grid(dim: usize, resolution: usize) -> Vec<Pmf> {
    assert!(dim >= 1 && resolution >= 1, "simplex grid needs dim, resolution >= 1");
    let mut out = Vec::new();
    let mut counts = vec![0usize; dim];
    compositions(&mut counts, 0, resolution, &mut |c| {
        out.push(Pmf {
            weights: c.iter().map(|&k| k as f64 / resolution as f64).collect(),
        })
    });
    out
}

fn compositions(counts: &mut [usize], pos: usize, left: usize, emit: &mut impl FnMut(&[usize])) {
    if pos + 1 == counts.len() {
        counts[pos] = left;
        emit(counts);
        return;
    }
    for k in 0..=left {
        counts[pos] = k;
        compositions(counts, pos + 1, left - k, emit);
    }
}

/// Grid of resolution `coarse * factor` restricted to the L-infinity ball of
/// radius `1 / coarse` around `center`.
///
/// This is the local refinement step used after a coarse grid search.
pub fn refine_around(center: &Pmf, coarse: usize, factor: usize) -> Vec<Pmf> {
    let dim = center.len();
    let fine = coarse * factor;
    let radius = factor as i64;
    let ranges: Vec<(i64, i64)> = center
        .weights()
        .iter()
        .map(|&c| {
            let mid = (c * fine as f64).round() as i64;
            ((mid - radius).max(0), (mid + radius).min(fine as i64))
        })
        .collect();
    let mut out = Vec::new();
    if dim == 1 {
        out.push(Pmf::point(1, 0));
        return out;
    }
    let mut counts = vec![0i64; dim];
    refine_rec(&ranges, &mut counts, 0, fine as i64, &mut |c| {
        out.push(Pmf {
            weights: c.iter().map(|&k| k as f64 / fine as f64).collect(),
        })
    });
    out
}

fn refine_rec(ranges: &[(i64, i64)], counts: &mut [i64], pos: usize, left: i64, emit: &mut impl FnMut(&[i64])) {
    if pos + 1 == counts.len() {
        let (lo, hi) = ranges[pos];
        if left >= lo && left <= hi {
            counts[pos] = left;
            emit(counts);
        }
        return;
    }
    let (lo, hi) = ranges[pos];
    for k in lo..=hi.min(left) {
        counts[pos] = k;
        refine_rec(ranges, counts, pos + 1, left - k, emit);
    }
}

/// Number of points of [`simplex_grid`].
pub fn simplex_grid_len(dim: usize, resolution: usize) -> usize {
    // C(resolution + dim - 1, dim - 1) computed incrementally
    let mut acc: u128 = 1;
    for i in 1..dim as u128 {
        acc = acc * (resolution as u128 + i) / i;
    }
    acc as usize
}
