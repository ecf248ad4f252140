//! Integral elements of the periodic-orbit system.
//!
//! A vector `c ∈ R^n` defines an integral element over an orbit polygon when the
//! band-cyclic matrix `C(c)` has rank exactly `n − 2`. Row `j` of `C` encodes
//!
//! ```text
//! Δ_{j+1} ω_{j−1} + c_j ω_j + Δ_j ω_{j+1} = 0,
//! ```
//!
//! so row 0 reads `(c_0, Δ_0, 0, …, 0, Δ_1)`. The element is convex when
//! `c_i ≤ d_i` for every `i`; equality at `i` means the billiard curve has a
//! corner at the midpoint `r̄_i`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geom::{OrbitPolygon, Vec2};
use crate::rank::{rank_report, RankReport, RankTolerance};
use crate::variety::{max_abs, normalized_residuals};

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicMatrixC {
    pub c: Vec<f64>,
    pub delta: Vec<f64>,
    pub entries: DMatrix<f64>,
}

impl CyclicMatrixC {
    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn rank_report(&self, tol: RankTolerance) -> RankReport {
        rank_report(&self.entries, tol)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (&self.entries * DVector::from_column_slice(v))
            .iter()
            .copied()
            .collect()
    }
}

fn check_len(poly: &OrbitPolygon, c: &[f64]) -> Result<()> {
    if c.len() != poly.n() {
        return Err(Error::LengthMismatch {
            expected: poly.n(),
            got: c.len(),
        });
    }
    Ok(())
}

pub fn build_matrix_c(poly: &OrbitPolygon, c: &[f64], tol: &Tolerances) -> Result<CyclicMatrixC> {
    check_len(poly, c)?;
    poly.require_locally_convex(tol)?;
    Ok(assemble(poly.delta(), c))
}

fn assemble(delta: &[f64], c: &[f64]) -> CyclicMatrixC {
    let n = c.len();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let prev = (j + n - 1) % n;
        let next = (j + 1) % n;
        m[(j, prev)] += delta[next];
        m[(j, j)] += c[j];
        m[(j, next)] += delta[j];
    }
    CyclicMatrixC {
        c: c.to_vec(),
        delta: delta.to_vec(),
        entries: m,
    }
}

/// Which of the always-available elements a vector coincides with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecialKind {
    /// `c = −d`, any n.
    Minus,
    /// `c = +d`, even n.
    Plus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralElement {
    pub base: OrbitPolygon,
    pub c: Vec<f64>,
    pub is_valid: bool,
    pub is_convex: bool,
    pub is_special_minus: bool,
    pub is_special_plus: bool,
    pub rank_margin: f64,
}

/// Wire form `{"c": [...], "is_valid": bool, "is_convex": bool, "rank_margin": real}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementJson {
    pub c: Vec<f64>,
    pub is_valid: bool,
    pub is_convex: bool,
    pub rank_margin: f64,
}

impl IntegralElement {
    /// Classifies `c` over `base`. Never fails on a non-integral `c`; the flags say so.
    pub fn classify(base: &OrbitPolygon, c: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        let check = check_element(base, &c, tol)?;
        let is_convex = check.is_valid && convexity_violation(base, &c, tol).is_none();
        let a = base.area_scale();
        let close = |sign: f64| {
            c.iter()
                .zip(base.d())
                .all(|(ci, di)| (ci - sign * di).abs() <= tol.convex * a)
        };
        Ok(Self {
            is_special_minus: close(-1.0),
            is_special_plus: base.n().is_multiple_of(2) && close(1.0),
            base: base.clone(),
            c,
            is_valid: check.is_valid,
            is_convex,
            rank_margin: check.rank.margin,
        })
    }

    pub fn to_json(&self) -> ElementJson {
        ElementJson {
            c: self.c.clone(),
            is_valid: self.is_valid,
            is_convex: self.is_convex,
            rank_margin: self.rank_margin,
        }
    }
}

/// Both integrality tests for one vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementCheck {
    pub rank: RankReport,
    pub rank_ok: bool,
    /// Largest normalized variety residual, for n ∈ {4, 5, 6}.
    pub variety_residual: Option<f64>,
    pub variety_ok: Option<bool>,
    /// The decision: variety residuals for n ∈ {5, 6}, the rank elsewhere.
    pub is_valid: bool,
}

impl ElementCheck {
    /// True when the two tests agree (or only one applies).
    pub fn consistent(&self) -> bool {
        self.variety_ok.is_none_or(|v| v == self.rank_ok)
    }
}

pub fn check_element(poly: &OrbitPolygon, c: &[f64], tol: &Tolerances) -> Result<ElementCheck> {
    let matrix = build_matrix_c(poly, c, tol)?;
    let n = poly.n();
    let rank = matrix.rank_report(RankTolerance {
        relative: tol.rank,
    });
    let rank_ok = rank.rank == n - 2;
    let variety_residual = match n {
        4..=6 => Some(max_abs(&normalized_residuals(poly, c)?)),
        _ => None,
    };
    let variety_ok = variety_residual.map(|r| r < tol.variety);
    let is_valid = match (n, variety_ok) {
        (5 | 6, Some(v)) => v,
        _ => rank_ok,
    };
    Ok(ElementCheck {
        rank,
        rank_ok,
        variety_residual,
        variety_ok,
        is_valid,
    })
}

pub fn is_integral_element(poly: &OrbitPolygon, c: &[f64], tol: &Tolerances) -> Result<bool> {
    Ok(check_element(poly, c, tol)?.is_valid)
}

fn special(poly: &OrbitPolygon, sign: f64, tol: &Tolerances) -> Result<IntegralElement> {
    poly.require_locally_convex(tol)?;
    // `+ 0.0` keeps negative zeros out of reports
    let c: Vec<f64> = poly.d().iter().map(|d| sign * d + 0.0).collect();
    let element = IntegralElement::classify(poly, c, tol)?;
    let check = check_element(poly, &element.c, tol)?;
    if !check.rank_ok {
        return Err(Error::ValidationFailed {
            rank: check.rank.rank,
            expected: poly.n() - 2,
        });
    }
    Ok(element)
}

/// The element `c = −d`, available for every n.
pub fn special_element_minus(poly: &OrbitPolygon, tol: &Tolerances) -> Result<IntegralElement> {
    special(poly, -1.0, tol)
}

/// The element `c = +d`, available for even n.
pub fn special_element_plus(poly: &OrbitPolygon, tol: &Tolerances) -> Result<IntegralElement> {
    if poly.n() % 2 == 1 {
        return Err(Error::OddPeriod(poly.n()));
    }
    special(poly, 1.0, tol)
}

/// `max(|C r_x|, |C r_y|) / (A · L)` for the null vectors of a special element:
/// the coordinates of `r_i` for [`SpecialKind::Minus`], of `(−1)^i r_i` for
/// [`SpecialKind::Plus`].
pub fn null_vector_residual(poly: &OrbitPolygon, kind: SpecialKind) -> Result<f64> {
    let n = poly.n();
    let (sign, alternate) = match kind {
        SpecialKind::Minus => (-1.0, false),
        SpecialKind::Plus if n.is_multiple_of(2) => (1.0, true),
        SpecialKind::Plus => return Err(Error::OddPeriod(n)),
    };
    let c: Vec<f64> = poly.d().iter().map(|d| sign * d).collect();
    let m = assemble(poly.delta(), &c);
    let vectors: Vec<Vec2> = poly
        .r()
        .iter()
        .enumerate()
        .map(|(i, &r)| if alternate && i % 2 == 1 { -r } else { r })
        .collect();
    let xs: Vec<f64> = vectors.iter().map(|v| v.x).collect();
    let ys: Vec<f64> = vectors.iter().map(|v| v.y).collect();
    let res = max_abs(&m.apply(&xs)).max(max_abs(&m.apply(&ys)));
    Ok(res / (poly.area_scale() * poly.length_scale()))
}

/// First index with `c_i > d_i + ε`, if any.
fn convexity_violation(poly: &OrbitPolygon, c: &[f64], tol: &Tolerances) -> Option<usize> {
    let eps = tol.convex * poly.area_scale();
    c.iter().zip(poly.d()).position(|(ci, di)| *ci > di + eps)
}

pub fn is_convex_element(poly: &OrbitPolygon, c: &[f64], tol: &Tolerances) -> Result<bool> {
    if !is_integral_element(poly, c, tol)? {
        return Err(Error::NotIntegralElement);
    }
    Ok(convexity_violation(poly, c, tol).is_none())
}

/// Curvature of the billiard curve at a midpoint; `Corner` stands for `κ = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curvature {
    Finite(f64),
    Corner,
}

impl Curvature {
    pub fn is_corner(self) -> bool {
        matches!(self, Curvature::Corner)
    }

    pub fn value(self) -> f64 {
        match self {
            Curvature::Finite(k) => k,
            Curvature::Corner => f64::INFINITY,
        }
    }
}

impl Serialize for Curvature {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Curvature::Finite(k) => s.serialize_f64(*k),
            Curvature::Corner => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Curvature {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct CurvatureVisitor;
        impl Visitor<'_> for CurvatureVisitor {
            type Value = Curvature;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a positive number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Curvature, E> {
                Ok(Curvature::Finite(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Curvature, E> {
                Ok(Curvature::Finite(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Curvature, E> {
                Ok(Curvature::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Curvature, E> {
                match v {
                    "inf" => Ok(Curvature::Corner),
                    other => other
                        .parse()
                        .map(Curvature::Finite)
                        .map_err(|_| E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }
        d.deserialize_any(CurvatureVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProfile {
    pub kappa: Vec<Curvature>,
}

/// Inverts `c_i = d_i − 2 Δ_i Δ_{i+1} / (κ_i s_i³)`.
///
/// Integrality of `c` is not checked here; only the sign condition `c_i ≤ d_i`.
pub fn curvature_from_element(
    poly: &OrbitPolygon,
    c: &[f64],
    tol: &Tolerances,
) -> Result<CurvatureProfile> {
    check_len(poly, c)?;
    if let Some(index) = convexity_violation(poly, c, tol) {
        return Err(Error::NotConvexElement { index });
    }
    let eps = tol.convex * poly.area_scale();
    let n = poly.n();
    let kappa = (0..n)
        .map(|i| {
            let gap = poly.d()[i] - c[i];
            if gap.abs() <= eps {
                Curvature::Corner
            } else {
                let s = poly.s()[i];
                let num = 2.0 * poly.delta()[i] * poly.delta()[(i + 1) % n];
                Curvature::Finite(num / (gap * s * s * s))
            }
        })
        .collect();
    Ok(CurvatureProfile { kappa })
}

/// `c_i = d_i − 2 Δ_i Δ_{i+1} / (κ_i s_i³)`, with `c_i = d_i` at corners.
pub fn element_from_curvature(poly: &OrbitPolygon, profile: &CurvatureProfile) -> Result<Vec<f64>> {
    let n = poly.n();
    if profile.kappa.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: profile.kappa.len(),
        });
    }
    Ok((0..n)
        .map(|i| match profile.kappa[i] {
            Curvature::Corner => poly.d()[i],
            Curvature::Finite(k) => {
                let s = poly.s()[i];
                poly.d()[i] - 2.0 * poly.delta()[i] * poly.delta()[(i + 1) % n] / (k * s * s * s)
            }
        })
        .collect())
}

/// `max_i min(α_{i−1} + α_i − π, α_i + α_{i+1} − π)`; positive iff paradoxical.
pub fn paradox_margin(alpha: &[f64]) -> f64 {
    let n = alpha.len();
    (0..n)
        .map(|i| {
            let prev = alpha[(i + n - 1) % n] + alpha[i];
            let next = alpha[i] + alpha[(i + 1) % n];
            (prev - std::f64::consts::PI).min(next - std::f64::consts::PI)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Whether some `i` has both `α_{i−1} + α_i > π` and `α_i + α_{i+1} > π`.
pub fn is_paradoxical_angles(alpha: &[f64]) -> bool {
    paradox_margin(alpha) > 0.0
}

/// Paradoxical test for a (6,2) orbit polygon.
pub fn classify_paradoxical(poly: &OrbitPolygon) -> Result<bool> {
    if poly.n() != 6 || poly.winding() != 2 {
        return Err(Error::WrongPeriodOrWinding {
            n: poly.n(),
            m: poly.winding(),
        });
    }
    Ok(is_paradoxical_angles(poly.alpha()))
}
