use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest vector dimension supported.
pub const MAX_DIM: usize = 3;

/// On-disk form of a [`GaussianBC`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianFile {
    pub t: usize,
    #[serde(rename = "G")]
    pub g: Vec<Vec<f64>>,
    #[serde(rename = "N1")]
    pub n1: Vec<Vec<f64>>,
    #[serde(rename = "N2")]
    pub n2: Vec<Vec<f64>>,
    #[serde(rename = "P")]
    pub power: f64,
    pub p1: f64,
    pub p2: f64,
}

/// `Ỹ_i = G X + Z_i` with `Z_i ~ N(0, N_i)`, `N1 ⪯ N2`; receiver `j` sees
/// component 1 with probability `pj`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBC {
    g: DMatrix<f64>,
    n: [DMatrix<f64>; 2],
    power: f64,
    p: [f64; 2],
}

/// Scalar parameters of a one-dimensional instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scalar {
    pub g: f64,
    pub n1: f64,
    pub n2: f64,
    pub power: f64,
    pub p1: f64,
    pub p2: f64,
}

fn matrix(rows: &[Vec<f64>], t: usize, name: &str) -> Result<DMatrix<f64>> {
    if rows.len() != t || rows.iter().any(|r| r.len() != t) {
        return Err(Error::InvalidModel(format!("{name} must be {t}x{t}")));
    }
    Ok(DMatrix::from_fn(t, t, |i, j| rows[i][j]))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub(crate) fn is_symmetric(m: &DMatrix<f64>) -> bool {
    let scale = m.amax().max(1.0);
    (m - m.transpose()).amax() <= 1e-9 * scale
}

/// Smallest eigenvalue of a symmetric matrix.
pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.min()
}

impl GaussianBC {
    pub fn new(g: DMatrix<f64>, n1: DMatrix<f64>, n2: DMatrix<f64>, power: f64, p1: f64, p2: f64) -> Result<Self> {
        let t = g.nrows();
        if t == 0 || t > MAX_DIM {
            return Err(Error::Unsupported(format!("dimension {t} outside 1..={MAX_DIM}")));
        }
        if !g.is_square() || n1.shape() != (t, t) || n2.shape() != (t, t) {
            return Err(Error::InvalidModel("gain and noise matrices must all be t x t".into()));
        }
        for (name, n) in [("N1", &n1), ("N2", &n2)] {
            if !is_symmetric(n) || n.clone().cholesky().is_none() {
                return Err(Error::InvalidModel(format!("{name} is not symmetric positive definite")));
            }
        }
        if min_eigenvalue(&(&n2 - &n1)) < -1e-10 * n2.amax() {
            return Err(Error::InvalidModel("N2 - N1 is not positive semidefinite".into()));
        }
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::InvalidModel(format!("power {power} must be positive")));
        }
        for p in [p1, p2] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidPmf(format!("state probability {p} outside [0, 1]")));
            }
        }
        Ok(Self {
            g,
            n: [n1, n2],
            power,
            p: [p1, p2],
        })
    }

    pub fn scalar(s: Scalar) -> Result<Self> {
        let m = |v: f64| DMatrix::from_element(1, 1, v);
        Self::new(m(s.g), m(s.n1), m(s.n2), s.power, s.p1, s.p2)
    }

    pub fn from_file(file: &GaussianFile) -> Result<Self> {
        let t = file.t;
        if t == 0 || t > MAX_DIM {
            return Err(Error::Unsupported(format!("dimension {t} outside 1..={MAX_DIM}")));
        }
        Self::new(
            matrix(&file.g, t, "G")?,
            matrix(&file.n1, t, "N1")?,
            matrix(&file.n2, t, "N2")?,
            file.power,
            file.p1,
            file.p2,
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }

    pub fn to_file(&self) -> GaussianFile {
        GaussianFile {
            t: self.t(),
            g: rows(&self.g),
            n1: rows(&self.n[0]),
            n2: rows(&self.n[1]),
            power: self.power,
            p1: self.p[0],
            p2: self.p[1],
        }
    }

    pub fn t(&self) -> usize {
        self.g.nrows()
    }

    pub fn gain(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// Noise covariance of component `i` in `{0, 1}`.
    pub fn noise(&self, i: usize) -> &DMatrix<f64> {
        &self.n[i]
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    /// Probability that receiver `j` in `{0, 1}` sees component 1.
    pub fn p(&self, j: usize) -> f64 {
        self.p[j]
    }

    pub fn as_scalar(&self) -> Option<Scalar> {
        (self.t() == 1).then(|| Scalar {
            g: self.g[(0, 0)],
            n1: self.n[0][(0, 0)],
            n2: self.n[1][(0, 0)],
            power: self.power,
            p1: self.p[0],
            p2: self.p[1],
        })
    }

    pub(crate) fn require_scalar(&self) -> Result<Scalar> {
        self.as_scalar()
            .ok_or_else(|| Error::Unsupported(format!("needs a scalar channel, got dimension {}", self.t())))
    }
}

/// Total input covariance `K` and the covariance `K1` of the layer decoded
/// only by receiver 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSplit {
    pub k: DMatrix<f64>,
    pub k1: DMatrix<f64>,
}

impl GaussianSplit {
    pub fn new(k: DMatrix<f64>, k1: DMatrix<f64>) -> Self {
        Self { k, k1 }
    }

    pub fn scalar(k: f64, k1: f64) -> Self {
        Self::new(DMatrix::from_element(1, 1, k), DMatrix::from_element(1, 1, k1))
    }

    /// Checks `K ⪰ K1 ⪰ 0` and `tr K <= P`.
    pub fn validate(&self, power: f64) -> Result<()> {
        let tol = 1e-10 * power.max(1.0);
        if !is_symmetric(&self.k) || !is_symmetric(&self.k1) {
            return Err(Error::InvalidModel("covariances must be symmetric".into()));
        }
        if min_eigenvalue(&self.k1) < -tol || min_eigenvalue(&(&self.k - &self.k1)) < -tol {
            return Err(Error::InvalidModel("need K ⪰ K1 ⪰ 0".into()));
        }
        if self.k.trace() > power + tol {
            return Err(Error::InvalidModel(format!("trace {} exceeds power {power}", self.k.trace())));
        }
        Ok(())
    }
}
