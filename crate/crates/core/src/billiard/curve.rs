//! Convex billiard curves and their support points.
//!
//! A curve is traversed counterclockwise, so its interior lies on the left of
//! every tangent. For an exterior point `z`, the function
//!
//! ```text
//! φ(q) = det(q − z, t(q))
//! ```
//!
//! is negative on the boundary arc hidden behind the near side and positive on
//! the rest. The support point used by the outer billiard map is where `φ`
//! turns from non-positive to positive along the traversal: there the ray from
//! `z` grazes the curve with the curve on its left.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{det2, inner2, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Polygon,
    Smooth,
}

/// JSON form: `{"kind": "polygon"|"smooth", "points": [[x, y], ...], "tangents": optional}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFile {
    pub kind: CurveKind,
    pub points: Vec<Vec2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tangents: Option<Vec<Vec2>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub corners: Vec<usize>,
}

/// Where a support point sits on the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportSite {
    /// A polygon vertex or a corner sample.
    Vertex(usize),
    /// Interior of the smooth segment from sample `segment` to the next, at parameter `u`.
    Segment { segment: usize, u: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub point: Vec2,
    pub site: SupportSite,
    /// `|sin|` of the angle between the ray and the nearest boundary piece that
    /// would make the support ambiguous; zero on the singular set.
    pub clearance: f64,
}

/// Support points closer than this (as a sine) to a segment-supporting line are singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexCurve {
    kind: CurveKind,
    points: Vec<Vec2>,
    /// Unit tangents (smooth curves only).
    tangents: Vec<Vec2>,
    corners: Vec<bool>,
    diameter: f64,
}

impl ConvexCurve {
    /// A convex polygon, vertices counterclockwise.
    pub fn polygon(vertices: Vec<Vec2>) -> Result<Self> {
        let n = vertices.len();
        let curve = Self {
            kind: CurveKind::Polygon,
            corners: vec![true; n],
            tangents: Vec::new(),
            diameter: diameter(&vertices),
            points: vertices,
        };
        curve.check_convex()?;
        Ok(curve)
    }

    pub fn regular_polygon(n: usize, radius: f64) -> Result<Self> {
        Self::polygon(
            (0..n)
                .map(|k| Vec2::from_angle(std::f64::consts::TAU * k as f64 / n as f64 + std::f64::consts::FRAC_PI_2) * radius)
                .collect(),
        )
    }

    /// A smooth curve from dense counterclockwise samples. Missing tangents are
    /// estimated from neighbouring samples. At `corners` the one-sided
    /// tangents are the adjacent chord directions.
    pub fn smooth(points: Vec<Vec2>, tangents: Option<Vec<Vec2>>, corners: &[usize]) -> Result<Self> {
        let n = points.len();
        let tangents = match tangents {
            Some(t) if t.len() == n => t.into_iter().map(normalized).collect::<Result<Vec<_>>>()?,
            Some(t) => {
                return Err(Error::InvalidCurve(format!(
                    "{} tangents for {n} points",
                    t.len()
                )))
            }
            None if n >= 3 => (0..n)
                .map(|j| normalized(points[(j + 1) % n] - points[(j + n - 1) % n]))
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let mut corner_flags = vec![false; n];
        for &c in corners {
            if c >= n {
                return Err(Error::InvalidCurve(format!("corner index {c} out of range")));
            }
            corner_flags[c] = true;
        }
        let curve = Self {
            kind: CurveKind::Smooth,
            diameter: diameter(&points),
            points,
            tangents,
            corners: corner_flags,
        };
        curve.check_convex()?;
        Ok(curve)
    }

    /// `samples` points of a circle with exact tangents.
    pub fn circle(center: Vec2, radius: f64, samples: usize) -> Result<Self> {
        let angles = (0..samples).map(|k| std::f64::consts::TAU * k as f64 / samples as f64);
        let points = angles.clone().map(|a| center + Vec2::from_angle(a) * radius).collect();
        let tangents = angles.map(|a| Vec2::from_angle(a).perp()).collect();
        Self::smooth(points, Some(tangents), &[])
    }

    pub fn from_file(file: CurveFile) -> Result<Self> {
        match file.kind {
            CurveKind::Polygon => Self::polygon(file.points),
            CurveKind::Smooth => Self::smooth(file.points, file.tangents, &file.corners),
        }
    }

    pub fn to_file(&self) -> CurveFile {
        CurveFile {
            kind: self.kind,
            points: self.points.clone(),
            tangents: (self.kind == CurveKind::Smooth).then(|| self.tangents.clone()),
            corners: match self.kind {
                CurveKind::Polygon => Vec::new(),
                CurveKind::Smooth => (0..self.points.len()).filter(|&j| self.corners[j]).collect(),
            },
        }
    }

    fn check_convex(&self) -> Result<()> {
        let n = self.points.len();
        if n < 3 {
            return Err(Error::InvalidCurve(format!("need at least 3 points, got {n}")));
        }
        if !self.points.iter().all(|p| p.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut turning = 0.0;
        for j in 0..n {
            let a = self.points[j] - self.points[(j + n - 1) % n];
            let b = self.points[(j + 1) % n] - self.points[j];
            if det2(a, b) <= 0.0 {
                return Err(Error::InvalidCurve(format!(
                    "not strictly convex and counterclockwise at point {j}"
                )));
            }
            turning += det2(a, b).atan2(inner2(a, b));
        }
        if (turning - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(Error::InvalidCurve("boundary winds more than once".into()));
        }
        Ok(())
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    fn len(&self) -> usize {
        self.points.len()
    }

    /// Incoming and outgoing unit tangents at sample `j`.
    fn one_sided_tangents(&self, j: usize) -> (Vec2, Vec2) {
        let n = self.len();
        if self.kind == CurveKind::Polygon || self.corners[j] {
            let inc = self.points[j] - self.points[(j + n - 1) % n];
            let out = self.points[(j + 1) % n] - self.points[j];
            (inc * (1.0 / inc.norm()), out * (1.0 / out.norm()))
        } else {
            (self.tangents[j], self.tangents[j])
        }
    }

    /// Hermite segment from sample `j` to `j + 1`: position and derivative at `u ∈ [0, 1]`.
    fn segment(&self, j: usize, u: f64) -> (Vec2, Vec2) {
        let n = self.len();
        let k = (j + 1) % n;
        let (p0, p1) = (self.points[j], self.points[k]);
        if self.kind == CurveKind::Polygon {
            return (p0 + (p1 - p0) * u, p1 - p0);
        }
        let h = p0.distance(p1);
        let m0 = self.one_sided_tangents(j).1 * h;
        let m1 = self.one_sided_tangents(k).0 * h;
        let (u2, u3) = (u * u, u * u * u);
        let pos = p0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + m0 * (u3 - 2.0 * u2 + u)
            + p1 * (-2.0 * u3 + 3.0 * u2)
            + m1 * (u3 - u2);
        let der = p0 * (6.0 * u2 - 6.0 * u)
            + m0 * (3.0 * u2 - 4.0 * u + 1.0)
            + p1 * (-6.0 * u2 + 6.0 * u)
            + m1 * (3.0 * u2 - 2.0 * u);
        (pos, der)
    }

    /// Sine of the angle from `q − z` to `t`.
    fn phi(z: Vec2, q: Vec2, t: Vec2) -> f64 {
        let w = q - z;
        det2(w, t) / (w.norm() * t.norm())
    }

    /// The support point of the outer billiard map at `z`.
    pub fn tangency_point(&self, z: Vec2) -> Result<Support> {
        if !z.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = self.len();
        // φ at both sides of each sample and along each segment
        let mut min_phi = f64::INFINITY;
        for j in 0..n {
            let (tin, tout) = self.one_sided_tangents(j);
            let q = self.points[j];
            if q.distance(z) <= 1e-14 * self.diameter {
                return Err(Error::InsideCurve);
            }
            min_phi = min_phi
                .min(Self::phi(z, q, tin))
                .min(Self::phi(z, q, tout));
            if self.kind == CurveKind::Smooth {
                let (qm, tm) = self.segment(j, 0.5);
                min_phi = min_phi.min(Self::phi(z, qm, tm));
            }
        }
        if min_phi > -SINGULAR_TOLERANCE {
            return Err(Error::InsideCurve);
        }

        for j in 0..n {
            let (tin, tout) = self.one_sided_tangents(j);
            let q = self.points[j];
            let before = Self::phi(z, q, tin);
            let after = Self::phi(z, q, tout);
            let is_corner = self.kind == CurveKind::Polygon || self.corners[j];
            if is_corner && before <= SINGULAR_TOLERANCE && after > SINGULAR_TOLERANCE {
                if before.abs() <= SINGULAR_TOLERANCE {
                    // the incoming side lies on the ray: the support line meets a segment
                    return Err(Error::SingularLine);
                }
                return Ok(Support {
                    point: q,
                    site: SupportSite::Vertex(j),
                    clearance: before.abs().min(after.abs()),
                });
            }
            if self.kind == CurveKind::Smooth {
                let k = (j + 1) % n;
                let start = after;
                let end = Self::phi(z, self.points[k], self.one_sided_tangents(k).0);
                if start <= 0.0 && end > 0.0 && !(self.corners[k] && end <= SINGULAR_TOLERANCE) {
                    return Ok(self.bisect(z, j));
                }
            }
        }
        Err(Error::SingularLine)
    }

    fn bisect(&self, z: Vec2, j: usize) -> Support {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let (q, t) = self.segment(j, mid);
            let f = Self::phi(z, q, t);
            if f <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-17 {
                break;
            }
        }
        let u = 0.5 * (lo + hi);
        let (point, _) = self.segment(j, u);
        Support {
            point,
            site: SupportSite::Segment { segment: j, u },
            clearance: 1.0,
        }
    }

    /// Distance from `q` to the boundary.
    pub fn distance_to_boundary(&self, q: Vec2) -> f64 {
        let n = self.len();
        (0..n)
            .map(|j| match self.kind {
                CurveKind::Polygon => point_segment_distance(q, self.points[j], self.points[(j + 1) % n]),
                CurveKind::Smooth => self.distance_to_segment(q, j),
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn distance_to_segment(&self, q: Vec2, j: usize) -> f64 {
        // coarse scan then golden-section refinement on |P(u) − q|²
        let dist2 = |u: f64| (self.segment(j, u).0 - q).norm_squared();
        let steps = 8;
        let best = (0..=steps)
            .map(|i| i as f64 / steps as f64)
            .min_by(|a, b| dist2(*a).total_cmp(&dist2(*b)))
            .unwrap();
        let (mut a, mut b) = ((best - 1.0 / steps as f64).max(0.0), (best + 1.0 / steps as f64).min(1.0));
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..100 {
            let c = b - ratio * (b - a);
            let d = a + ratio * (b - a);
            if dist2(c) < dist2(d) {
                b = d;
            } else {
                a = c;
            }
        }
        dist2(0.5 * (a + b)).sqrt()
    }

    /// Whether `q` lies strictly inside.
    pub fn contains(&self, q: Vec2) -> bool {
        matches!(self.tangency_point(q), Err(Error::InsideCurve))
    }
}

fn normalized(v: Vec2) -> Result<Vec2> {
    let len = v.norm();
    if len == 0.0 || !len.is_finite() {
        return Err(Error::InvalidCurve("zero or non-finite tangent".into()));
    }
    Ok(v * (1.0 / len))
}

fn diameter(points: &[Vec2]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max(a.distance(*b));
        }
    }
    d
}

fn point_segment_distance(q: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let t = (inner2(q - a, ab) / ab.norm_squared()).clamp(0.0, 1.0);
    q.distance(a + ab * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexCurve {
        ConvexCurve::polygon(vec![
            Vec2::new(1.0, -1.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(-1.0, 1.0),
            Vec2::new(-1.0, -1.0),
        ])
        .unwrap()
    }

    /// Exhaustive oracle: the vertex `v` with every other vertex on the left
    /// of the ray from `z` through `v`.
    fn oracle_vertex(vertices: &[Vec2], z: Vec2) -> Vec2 {
        *vertices
            .iter()
            .find(|&&v| {
                vertices
                    .iter()
                    .all(|&w| w == v || det2(v - z, w - z) > 0.0)
            })
            .unwrap()
    }

    #[test]
    fn square_support_vertex() {
        let sq = unit_square();
        let z = Vec2::new(2.0, 0.5);
        let s = sq.tangency_point(z).unwrap();
        assert_eq!(s.point, Vec2::new(1.0, 1.0));
        assert_eq!(s.point, oracle_vertex(sq.points(), z));
    }

    #[test]
    fn support_matches_exhaustive_oracle() {
        let hex = ConvexCurve::polygon(vec![
            Vec2::new(1.0, 0.0),
            Vec2::new(0.6, 0.9),
            Vec2::new(-0.5, 1.0),
            Vec2::new(-1.2, 0.1),
            Vec2::new(-0.4, -0.8),
            Vec2::new(0.7, -0.9),
        ])
        .unwrap();
        for k in 0..200 {
            let a = k as f64 * 0.137;
            let z = Vec2::from_angle(a) * (2.0 + (k % 7) as f64 * 0.4);
            let s = hex.tangency_point(z).unwrap();
            assert_eq!(s.point, oracle_vertex(hex.points(), z), "z = {z:?}");
        }
    }

    #[test]
    fn circle_tangency() {
        let circle = ConvexCurve::circle(Vec2::ZERO, 1.0, 720).unwrap();
        for k in 0..12 {
            let z = Vec2::from_angle(0.4 + k as f64 * 0.5) * 2.0;
            let p = circle.tangency_point(z).unwrap().point;
            assert!((p.norm() - 1.0).abs() < 1e-9, "|p| = {}", p.norm());
            // cubic interpolation: tangent direction error is O(h³)
            assert!(inner2(p - z, p).abs() < 1e-5);
            // the disk lies on the left of the ray z → p
            assert!(det2(p - z, Vec2::ZERO - z) > 0.0);
        }
    }

    #[test]
    fn edge_extension_is_singular() {
        let sq = unit_square();
        // behind the right edge, whose line is the left-hand support line
        assert_eq!(sq.tangency_point(Vec2::new(1.0, -3.0)), Err(Error::SingularLine));
        // ahead of it the edge line is the other support line; the map is defined
        let s = sq.tangency_point(Vec2::new(1.0, 3.0)).unwrap();
        assert_eq!(s.point, Vec2::new(-1.0, 1.0));
    }

    #[test]
    fn inside_points_are_rejected() {
        let sq = unit_square();
        assert_eq!(sq.tangency_point(Vec2::new(0.2, 0.3)), Err(Error::InsideCurve));
        assert_eq!(sq.tangency_point(Vec2::new(1.0, 0.0)), Err(Error::InsideCurve));
        assert!(sq.contains(Vec2::ZERO));
        let circle = ConvexCurve::circle(Vec2::ZERO, 1.0, 64).unwrap();
        assert_eq!(circle.tangency_point(Vec2::new(0.5, 0.0)), Err(Error::InsideCurve));
    }

    #[test]
    fn rejects_non_convex_or_clockwise() {
        let cw: Vec<Vec2> = unit_square().points().iter().rev().copied().collect();
        assert!(matches!(ConvexCurve::polygon(cw), Err(Error::InvalidCurve(_))));
        let dent = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(1.0, 0.2),
            Vec2::new(2.0, 2.0),
            Vec2::new(0.0, 2.0),
        ];
        assert!(ConvexCurve::polygon(dent).is_err());
    }

    #[test]
    fn distance_to_boundary() {
        let sq = unit_square();
        assert!((sq.distance_to_boundary(Vec2::new(3.0, 0.0)) - 2.0).abs() < 1e-15);
        assert_eq!(sq.distance_to_boundary(Vec2::new(1.0, 1.0)), 0.0);
        let circle = ConvexCurve::circle(Vec2::ZERO, 1.0, 256).unwrap();
        assert!((circle.distance_to_boundary(Vec2::new(2.0, 0.3)) - (Vec2::new(2.0, 0.3).norm() - 1.0)).abs() < 1e-8);
    }

    #[test]
    fn curve_json() {
        let text = r#"{"kind": "polygon", "points": [[0, 0], [1, 0], [0, 1]]}"#;
        let file: CurveFile = serde_json::from_str(text).unwrap();
        let curve = ConvexCurve::from_file(file.clone()).unwrap();
        assert_eq!(curve.to_file(), file);
        assert!(serde_json::from_str::<CurveFile>(r#"{"kind": "blob", "points": []}"#).is_err());
    }
}
