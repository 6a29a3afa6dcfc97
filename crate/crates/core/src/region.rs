//! Rate regions stored as sampled support functions plus the polygon of
//! achieving points.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance of the consistency validator.
pub const VALIDATION_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64) -> Self {
        Self { r0: None, r1, r2 }
    }

    pub fn with_common(r0: f64, r1: f64, r2: f64) -> Self {
        Self { r0: Some(r0), r1, r2 }
    }

    /// Weighted sum `λ·r`; a direction of length 3 is `(λ0, λ1, λ2)`.
    pub fn dot(&self, direction: &[f64]) -> f64 {
        match direction {
            [l1, l2] => l1 * self.r1 + l2 * self.r2,
            [l0, l1, l2] => l0 * self.r0.unwrap_or(0.0) + l1 * self.r1 + l2 * self.r2,
            _ => panic!("direction must have two or three entries"),
        }
    }

    /// Coordinates clipped at zero, removing round-off below the axes.
    pub fn clamped(self) -> Self {
        Self {
            r0: self.r0.map(|v| v.max(0.0)),
            r1: self.r1.max(0.0),
            r2: self.r2.max(0.0),
        }
    }
}

/// One sampled supporting hyperplane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub direction: Vec<f64>,
    pub value: f64,
    pub point: RatePoint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
}

impl Support {
    pub fn new(direction: Vec<f64>, point: RatePoint) -> Self {
        let point = point.clamped();
        Self {
            value: point.dot(&direction),
            direction,
            point,
            params: None,
        }
    }

    pub fn with_params(mut self, params: serde_json::Value) -> Self {
        self.params = Some(params);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegion {
    pub supports: Vec<Support>,
    pub vertices: Vec<RatePoint>,
}

impl RateRegion {
    /// Region generated by the achieving points of `supports` and `extra`
    /// points, closed downward in each rate.
    ///
    /// Support values are raised to the best vertex in their direction, so a
    /// direction whose optimizer fell short is answered by a better point
    /// found elsewhere.
    pub fn from_supports(mut supports: Vec<Support>, extra: &[RatePoint]) -> Self {
        let three_d = supports.iter().any(|s| s.direction.len() == 3);
        let mut points: Vec<RatePoint> = supports.iter().map(|s| s.point).collect();
        points.extend(extra.iter().map(|p| p.clamped()));
        let vertices = if three_d { dedup_points(points) } else { polygon(&points) };
        for s in supports.iter_mut() {
            if let Some(best) = vertices
                .iter()
                .max_by(|a, b| a.dot(&s.direction).total_cmp(&b.dot(&s.direction)))
            {
                let v = best.dot(&s.direction);
                if v > s.value + 1e-15 {
                    s.value = v;
                    s.point = *best;
                    s.params = None;
                }
            }
        }
        Self { supports, vertices }
    }

    /// Region spanned by explicit points, sampled along `directions`.
    pub fn from_points(points: &[RatePoint], directions: &[Vec<f64>]) -> Self {
        let supports = directions
            .iter()
            .map(|d| {
                let best = points
                    .iter()
                    .max_by(|a, b| a.dot(d).total_cmp(&b.dot(d)))
                    .copied()
                    .unwrap_or(RatePoint::new(0.0, 0.0));
                Support::new(d.clone(), best)
            })
            .collect();
        Self::from_supports(supports, points)
    }

    pub fn is_three_dimensional(&self) -> bool {
        self.supports.iter().any(|s| s.direction.len() == 3)
    }

    /// Maximum of `direction · r` over the vertex set.
    pub fn support(&self, direction: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(direction))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_sum_rate(&self) -> f64 {
        self.vertices.iter().map(|v| v.r1 + v.r2).fold(0.0, f64::max)
    }

    /// Checks nonnegativity, `value = λ·point`, and that every vertex lies
    /// under every sampled hyperplane.
    pub fn validate(&self) -> Result<()> {
        let tol = VALIDATION_TOLERANCE;
        for v in &self.vertices {
            if v.r1 < -tol || v.r2 < -tol || v.r0.is_some_and(|r| r < -tol) {
                return Err(Error::InvariantBreach(format!("negative rate in vertex {v:?}")));
            }
        }
        for s in &self.supports {
            if (s.point.dot(&s.direction) - s.value).abs() > tol * (1.0 + s.value.abs()) {
                return Err(Error::InvariantBreach(format!(
                    "support {} in direction {:?} disagrees with its point",
                    s.value, s.direction
                )));
            }
            for v in &self.vertices {
                if v.dot(&s.direction) > s.value + tol {
                    return Err(Error::InvariantBreach(format!(
                        "vertex {v:?} lies above the support in direction {:?}",
                        s.direction
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let three = self.is_three_dimensional();
        let mut w = csv::Writer::from_writer(out);
        if three {
            w.write_record(["lambda1", "lambda2", "lambda0", "support_bits", "r1", "r2", "r0"])?;
        } else {
            w.write_record(["lambda1", "lambda2", "support_bits", "r1", "r2"])?;
        }
        let f = |v: f64| format!("{v:.10}");
        for s in &self.supports {
            let mut rec = Vec::with_capacity(7);
            if three {
                rec.extend([f(s.direction[1]), f(s.direction[2]), f(s.direction[0])]);
            } else {
                rec.extend([f(s.direction[0]), f(s.direction[1])]);
            }
            rec.extend([f(s.value), f(s.point.r1), f(s.point.r2)]);
            if three {
                rec.push(f(s.point.r0.unwrap_or(0.0)));
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Parses the CSV layout written by [`RateRegion::write_csv`].
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let need = |name: &str| col(name).ok_or_else(|| Error::InvalidModel(format!("missing column {name}")));
        let (l1, l2, sv, r1, r2) = (need("lambda1")?, need("lambda2")?, need("support_bits")?, need("r1")?, need("r2")?);
        let (l0, r0) = (col("lambda0"), col("r0"));
        let mut supports = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::InvalidModel(format!("bad number in column {i}")))
            };
            let (direction, point) = match (l0, r0) {
                (Some(a), Some(b)) => (
                    vec![num(a)?, num(l1)?, num(l2)?],
                    RatePoint::with_common(num(b)?, num(r1)?, num(r2)?),
                ),
                _ => (vec![num(l1)?, num(l2)?], RatePoint::new(num(r1)?, num(r2)?)),
            };
            supports.push(Support {
                direction,
                value: num(sv)?,
                point,
                params: None,
            });
        }
        let points: Vec<RatePoint> = supports.iter().map(|s| s.point).collect();
        let vertices = if supports.iter().any(|s| s.direction.len() == 3) {
            dedup_points(points)
        } else {
            polygon(&points)
        };
        Ok(Self { supports, vertices })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn dedup_points(mut points: Vec<RatePoint>) -> Vec<RatePoint> {
    points.sort_by(|a, b| {
        a.r0.unwrap_or(0.0)
            .total_cmp(&b.r0.unwrap_or(0.0))
            .then(a.r1.total_cmp(&b.r1))
            .then(a.r2.total_cmp(&b.r2))
    });
    points.dedup_by(|a, b| {
        (a.r0.unwrap_or(0.0) - b.r0.unwrap_or(0.0)).abs() < 1e-12
            && (a.r1 - b.r1).abs() < 1e-12
            && (a.r2 - b.r2).abs() < 1e-12
    });
    points
}

/// Vertices of the down-closure of the convex hull of `points` in the first
/// quadrant, counter-clockwise from the origin.
pub fn polygon(points: &[RatePoint]) -> Vec<RatePoint> {
    let mut pts: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for p in points {
        let (x, y) = (p.r1.max(0.0), p.r2.max(0.0));
        pts.extend([(x, y), (x, 0.0), (0.0, y)]);
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-14);
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-15 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-15 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // rotate so the origin comes first
    if let Some(i) = lower.iter().position(|&(x, y)| x == 0.0 && y == 0.0) {
        lower.rotate_left(i);
    }
    lower.into_iter().map(|(x, y)| RatePoint::new(x, y)).collect()
}

/// Maximizes `λ1 R1 + λ2 R2` over `R1 <= a`, `R2 <= b`, `R1 + R2 <= c`,
/// `R >= 0`.
pub fn pentagon_max(a: f64, b: f64, c: f64, l1: f64, l2: f64) -> (f64, RatePoint) {
    let (a, b, c) = (a.max(0.0), b.max(0.0), c.max(0.0));
    let (r1, r2) = if l1 >= l2 {
        let r1 = a.min(c);
        (r1, b.min(c - r1))
    } else {
        let r2 = b.min(c);
        (a.min(c - r2), r2)
    };
    (l1 * r1 + l2 * r2, RatePoint::new(r1, r2))
}

/// Directions `(1, λ)` for log-spaced `λ`, plus the two axes and any extra
/// breakpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub count: usize,
    pub min: f64,
    pub max: f64,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            count: 60,
            min: 1.0 / 32.0,
            max: 32.0,
        }
    }
}

impl Sweep {
    pub fn new(count: usize, min: f64, max: f64) -> Result<Self> {
        if !(min > 0.0 && min < max && max.is_finite()) {
            return Err(Error::InvalidModel(format!("sweep needs 0 < min < max, got {min}:{max}")));
        }
        Ok(Self { count, min, max })
    }

    /// Parses `n:min:max`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let bad = || Error::InvalidModel(format!("sweep must look like n:min:max, got {spec}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let count = parts[0].parse().map_err(|_| bad())?;
        let min = parts[1].parse().map_err(|_| bad())?;
        let max = parts[2].parse().map_err(|_| bad())?;
        Self::new(count, min, max)
    }

    pub fn lambdas(&self) -> Vec<f64> {
        match self.count {
            0 => vec![],
            1 => vec![(self.min * self.max).sqrt()],
            n => {
                let (a, b) = (self.min.ln(), self.max.ln());
                (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
            }
        }
    }

    /// Two-dimensional directions, ordered by angle.
    pub fn directions(&self, breakpoints: &[f64]) -> Vec<Vec<f64>> {
        let mut lambdas = self.lambdas();
        lambdas.extend(breakpoints.iter().copied().filter(|l| l.is_finite() && *l > 0.0));
        lambdas.sort_by(f64::total_cmp);
        lambdas.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        let mut out = vec![vec![1.0, 0.0]];
        out.extend(lambdas.into_iter().map(|l| vec![1.0, l]));
        out.push(vec![0.0, 1.0]);
        out
    }

    /// The ratios `p̄1/p̄2`, `1` and `p1/p2` at which optimal inputs change.
    pub fn breakpoints(p1: f64, p2: f64) -> Vec<f64> {
        let mut b = vec![1.0];
        if p2 > 0.0 {
            b.push(p1 / p2);
        }
        if p2 < 1.0 {
            b.push((1.0 - p1) / (1.0 - p2));
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_of_triangle() {
        let v = polygon(&[RatePoint::new(1.0, 0.0), RatePoint::new(0.0, 1.0), RatePoint::new(0.3, 0.3)]);
        let got: Vec<(f64, f64)> = v.iter().map(|p| (p.r1, p.r2)).collect();
        assert_eq!(got, vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
    }

    #[test]
    fn polygon_keeps_corner() {
        let v = polygon(&[RatePoint::new(1.0, 0.0), RatePoint::new(0.0, 1.0), RatePoint::new(0.7, 0.6)]);
        assert_eq!(v.len(), 4);
        assert!(v.contains(&RatePoint::new(0.7, 0.6)));
    }

    #[test]
    fn pentagon_corners() {
        let (v, p) = pentagon_max(0.8, 0.5, 1.0, 2.0, 1.0);
        assert_eq!((p.r1, p.r2), (0.8, 0.19999999999999996));
        assert!((v - 1.8).abs() < 1e-12);
        let (_, p) = pentagon_max(0.8, 0.5, 1.0, 1.0, 3.0);
        assert_eq!((p.r1, p.r2), (0.5, 0.5));
    }

    #[test]
    fn supports_are_reconciled_and_validated() {
        let supports = vec![
            Support::new(vec![1.0, 1.0], RatePoint::new(0.2, 0.2)),
            Support::new(vec![1.0, 0.0], RatePoint::new(1.0, 0.0)),
        ];
        let region = RateRegion::from_supports(supports, &[RatePoint::new(0.5, 0.6)]);
        assert!((region.supports[0].value - 1.1).abs() < 1e-12);
        region.validate().unwrap();
    }

    #[test]
    fn validator_rejects_point_above_support() {
        let mut region = RateRegion::from_points(&[RatePoint::new(1.0, 1.0)], &[vec![1.0, 1.0]]);
        region.supports[0].value = 1.5;
        region.supports[0].point = RatePoint::new(0.75, 0.75);
        assert!(region.validate().is_err());
    }

    #[test]
    fn csv_round_trip() {
        let dirs = Sweep::default().directions(&[]);
        let region = RateRegion::from_points(&[RatePoint::new(0.72, 0.0), RatePoint::new(0.0, 0.52)], &dirs);
        let text = region.to_csv_string().unwrap();
        assert!(text.starts_with("lambda1,lambda2,support_bits,r1,r2\n"));
        let back = RateRegion::read_csv(text.as_bytes()).unwrap();
        back.validate().unwrap();
        assert_eq!(back.supports.len(), region.supports.len());
        let json = region.to_json().unwrap();
        assert_eq!(RateRegion::from_json(&json).unwrap(), region);
    }

    #[test]
    fn sweep_directions() {
        let s = Sweep::parse("5:0.25:4").unwrap();
        let d = s.directions(&Sweep::breakpoints(0.7, 0.3));
        assert_eq!(d.first().unwrap(), &vec![1.0, 0.0]);
        assert_eq!(d.last().unwrap(), &vec![0.0, 1.0]);
        // 0.25, 0.5, 1, 2, 4 plus 3/7 and 7/3; 1 is shared
        assert_eq!(d.len(), 2 + 7);
        assert!(Sweep::parse("5:4:1").is_err());
        assert!(Sweep::parse("x").is_err());
    }
}
