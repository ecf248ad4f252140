//! Planar primitives and the cyclic quantities derived from an orbit polygon.
//!
//! Vertices are labelled `z_0, …, z_{n-1}` and every index is taken mod `n`.
//! From them we derive
//!
//! * half-edges `r_i = (z_i − z_{i+1}) / 2` and midpoints `r̄_i = (z_i + z_{i+1}) / 2`,
//! * lengths `s_i = |r_i|`,
//! * `Δ_i = det(r_{i−1}, r_i)`, half the area of the triangle `z_{i−1} z_i z_{i+1}`,
//! * `d_i = det(r_{i−1}, r_{i+1})`,
//! * turning angles `δ_i` from `r_{i−1}` to `r_i`, interior angles `α_i = π − δ_i`,
//!   and the winding number `m = Σδ_i / 2π`.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};

/// A point or vector of the plane. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Coord", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub type PlanePoint = Vec2;
pub type PlaneVector = Vec2;

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_squared(self) -> f64 {
        inner2(self, self)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Counterclockwise rotation by a quarter turn.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn midpoint(self, other: Vec2) -> Vec2 {
        (self + other) * 0.5
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Vec2::new(x, y)
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

/// Wire form of a coordinate pair: numbers or decimal strings are accepted.
#[derive(Deserialize)]
struct Coord([Real; 2]);

#[derive(Deserialize)]
#[serde(untagged)]
enum Real {
    Num(f64),
    Str(String),
}

impl Real {
    fn value(&self) -> f64 {
        match self {
            Real::Num(v) => *v,
            Real::Str(s) => s.trim().parse().unwrap_or(f64::NAN),
        }
    }
}

impl From<Coord> for Vec2 {
    fn from(Coord([x, y]): Coord) -> Self {
        Vec2::new(x.value(), y.value())
    }
}

/// `u.x·v.y − u.y·v.x`.
pub fn det2(u: PlaneVector, v: PlaneVector) -> f64 {
    u.x * v.y - u.y * v.x
}

pub fn inner2(u: PlaneVector, v: PlaneVector) -> f64 {
    u.x * v.x + u.y * v.y
}

/// Signed angle from `u` to `v`, in `(−π, π]`.
pub fn turning_angle(u: PlaneVector, v: PlaneVector) -> f64 {
    det2(u, v).atan2(inner2(u, v))
}

#[inline]
pub(crate) fn cyc(i: isize, n: usize) -> usize {
    i.rem_euclid(n as isize) as usize
}

/// A closed polygon `z_0 … z_{n−1}` together with every derived cyclic quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitPolygon {
    vertices: Vec<PlanePoint>,
    r: Vec<PlaneVector>,
    rbar: Vec<PlanePoint>,
    s: Vec<f64>,
    delta: Vec<f64>,
    d: Vec<f64>,
    alpha: Vec<f64>,
    exterior: Vec<f64>,
    winding: i64,
    locally_convex: bool,
}

/// JSON form of a polygon: `{"vertices": [[x, y], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonFile {
    pub vertices: Vec<PlanePoint>,
}

impl OrbitPolygon {
    /// Derives all cyclic quantities with default tolerances.
    pub fn new(vertices: Vec<PlanePoint>) -> Result<Self> {
        Self::with_tolerances(vertices, &Tolerances::default())
    }

    pub fn with_tolerances(vertices: Vec<PlanePoint>, tol: &Tolerances) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        if !vertices.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let r: Vec<Vec2> = (0..n)
            .map(|i| (vertices[i] - vertices[(i + 1) % n]) * 0.5)
            .collect();
        let rbar: Vec<Vec2> = (0..n)
            .map(|i| (vertices[i] + vertices[(i + 1) % n]) * 0.5)
            .collect();
        let s: Vec<f64> = r.iter().map(|v| v.norm()).collect();
        if let Some(i) = s.iter().position(|&len| len == 0.0) {
            return Err(Error::DegeneratePolygon {
                index: i,
                next: (i + 1) % n,
            });
        }
        let prev = |i: usize| (i + n - 1) % n;
        let delta: Vec<f64> = (0..n).map(|i| det2(r[prev(i)], r[i])).collect();
        let d: Vec<f64> = (0..n)
            .map(|i| det2(r[prev(i)], r[(i + 1) % n]))
            .collect();
        let exterior: Vec<f64> = (0..n).map(|i| turning_angle(r[prev(i)], r[i])).collect();
        let alpha: Vec<f64> = exterior.iter().map(|t| PI - t).collect();

        let turns = exterior.iter().sum::<f64>() / TAU;
        let winding = turns.round();
        if (turns - winding).abs() >= tol.winding {
            return Err(Error::NonIntegralWinding { turns });
        }

        let smax = s.iter().cloned().fold(0.0, f64::max);
        let eps = tol.local_convexity * smax * smax;
        let locally_convex = delta.iter().all(|&dl| dl > eps);

        Ok(Self {
            vertices,
            r,
            rbar,
            s,
            delta,
            d,
            alpha,
            exterior,
            winding: winding as i64,
            locally_convex,
        })
    }

    /// Like [`OrbitPolygon::with_tolerances`] but rejects polygons with some `Δ_i <= ε`.
    pub fn locally_convex(vertices: Vec<PlanePoint>, tol: &Tolerances) -> Result<Self> {
        let poly = Self::with_tolerances(vertices, tol)?;
        poly.require_locally_convex(tol)?;
        Ok(poly)
    }

    /// Vertices of the regular star polygon `{n/m}` with the given circumradius.
    pub fn regular_star(n: usize, m: usize, radius: f64) -> Result<Self> {
        let vertices = (0..n)
            .map(|k| Vec2::from_angle(TAU * (m * k) as f64 / n as f64) * radius)
            .collect();
        Self::new(vertices)
    }

    pub fn require_locally_convex(&self, tol: &Tolerances) -> Result<()> {
        let eps = tol.local_convexity * self.area_scale();
        match self.delta.iter().position(|&dl| dl <= eps) {
            Some(index) => Err(Error::NotLocallyConvex {
                index,
                delta: self.delta[index],
            }),
            None => Ok(()),
        }
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[PlanePoint] {
        &self.vertices
    }

    pub fn r(&self) -> &[PlaneVector] {
        &self.r
    }

    pub fn rbar(&self) -> &[PlanePoint] {
        &self.rbar
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    /// `Δ_i = det(r_{i−1}, r_i)`.
    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    /// `d_i = det(r_{i−1}, r_{i+1})`.
    pub fn d(&self) -> &[f64] {
        &self.d
    }

    /// Interior angles `α_i = π − δ_i`.
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Turning angles `δ_i`, each in `(−π, π]`.
    pub fn exterior(&self) -> &[f64] {
        &self.exterior
    }

    pub fn winding(&self) -> i64 {
        self.winding
    }

    pub fn is_locally_convex(&self) -> bool {
        self.locally_convex
    }

    /// Cyclic accessors taking any integer index.
    pub fn delta_at(&self, i: isize) -> f64 {
        self.delta[cyc(i, self.n())]
    }

    pub fn d_at(&self, i: isize) -> f64 {
        self.d[cyc(i, self.n())]
    }

    pub fn r_at(&self, i: isize) -> PlaneVector {
        self.r[cyc(i, self.n())]
    }

    /// `max s_i`.
    pub fn length_scale(&self) -> f64 {
        self.s.iter().cloned().fold(0.0, f64::max)
    }

    /// `max s_i²`, the unit in which `Δ_i`, `d_i` and `c_i` are measured.
    pub fn area_scale(&self) -> f64 {
        let l = self.length_scale();
        l * l
    }

    /// `|Σ edge vectors|`; zero up to rounding for any vertex list.
    pub fn closure_residual(&self) -> f64 {
        let sum = self.r.iter().fold(Vec2::ZERO, |acc, &v| acc + v);
        2.0 * sum.norm()
    }

    pub fn to_file(&self) -> PolygonFile {
        PolygonFile {
            vertices: self.vertices.clone(),
        }
    }

    pub fn from_json(text: &str) -> std::result::Result<PolygonFile, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl TryFrom<PolygonFile> for OrbitPolygon {
    type Error = Error;
    fn try_from(file: PolygonFile) -> Result<Self> {
        OrbitPolygon::new(file.vertices)
    }
}

/// `f(r_0, r_1, r_2) = r_0 det(r_1, r_2) + r_1 det(r_2, r_0) + r_2 det(r_0, r_1)`.
///
/// Multilinear and alternating, hence identically zero in the plane.
pub fn alternating_triple(r0: PlaneVector, r1: PlaneVector, r2: PlaneVector) -> PlaneVector {
    r0 * det2(r1, r2) + r1 * det2(r2, r0) + r2 * det2(r0, r1)
}
