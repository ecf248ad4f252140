//! Random `(n, m)` orbit polygons.
//!
//! Turning angles are drawn from a symmetric Dirichlet distribution scaled to
//! total `2πm` (or, when their mean exceeds `π/2`, the interior angles
//! `π − turning` are drawn instead, scaled to `nπ − 2πm`), which fixes every
//! edge direction. Edge lengths then solve the
//! two linear closure equations `Σ ℓ_k u_k = 0`: a random positive length vector
//! is projected onto the closure plane along the directions themselves,
//!
//! ```text
//! ℓ_k = w_k + ⟨p, u_k⟩,   p = −M⁻¹ Σ w_k u_k,   M = Σ u_k u_kᵀ,
//! ```
//!
//! and the draw is kept only if every length stays positive.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geom::{det2, OrbitPolygon, Vec2};
use crate::seeds::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSampler {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// Rejection budget per emitted polygon.
    pub max_attempts: usize,
    /// Dirichlet concentration of the turning angles; larger is more regular.
    pub concentration: f64,
    /// Every turning angle is kept in `[margin, π − margin]`.
    pub angle_margin: f64,
}

impl OrbitSampler {
    pub fn new(n: usize, m: usize, seed: u64) -> Self {
        Self {
            n,
            m,
            seed,
            max_attempts: 10_000,
            concentration: 2.0,
            angle_margin: 0.02,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::TooFewVertices(self.n));
        }
        if self.m == 0 || 2 * self.m >= self.n {
            return Err(Error::InvalidWinding {
                n: self.n,
                m: self.m as i64,
            });
        }
        Ok(())
    }
}

/// A sampled polygon with the data it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPolygon {
    pub polygon: OrbitPolygon,
    /// Turning angle at each vertex, `Σ = 2πm`.
    pub turning: Vec<f64>,
    /// Edge lengths `|z_{k+1} − z_k|` before normalization.
    pub lengths: Vec<f64>,
    /// `|Σ ℓ_k u_k|` relative to the total length, from the solved lengths.
    pub closure_defect: f64,
    pub attempts: usize,
}

pub fn sample_orbit_polygon(sampler: &OrbitSampler) -> Result<OrbitPolygon> {
    Ok(sample_detailed(sampler)?.polygon)
}

pub fn sample_detailed(sampler: &OrbitSampler) -> Result<SampledPolygon> {
    sampler.validate()?;
    let mut g = rng(sampler.seed);
    sample_with(sampler, &mut g)
}

pub(crate) fn sample_with<R: Rng>(sampler: &OrbitSampler, g: &mut R) -> Result<SampledPolygon> {
    let gamma = Gamma::new(sampler.concentration, 1.0)
        .map_err(|_| Error::InvalidCurve("concentration must be positive".into()))?;
    let n = sampler.n as f64;
    let total = TAU * sampler.m as f64;
    // draw whichever of the turning angles or the interior angles π − turning
    // has the smaller mean, so the cap at π rarely bites
    let complement = total > 0.5 * PI * n;
    let budget = if complement { PI * n - total } else { total };
    let mut attempts = 0;
    while attempts < sampler.max_attempts {
        attempts += 1;
        let raw: Vec<f64> = (0..sampler.n).map(|_| gamma.sample(g)).collect();
        let sum: f64 = raw.iter().sum();
        let turning: Vec<f64> = raw
            .iter()
            .map(|w| budget * w / sum)
            .map(|t| if complement { PI - t } else { t })
            .collect();
        if !turning_ok(&turning, sampler.angle_margin) {
            continue;
        }
        // a few length draws per angle draw; most rejections come from the angles
        for _ in 0..8 {
            attempts += 1;
            if let Some(mut s) = polygon_from_turning(&turning, g) {
                if s.polygon.winding() == sampler.m as i64 && s.polygon.is_locally_convex() {
                    s.attempts = attempts;
                    return Ok(s);
                }
            }
        }
    }
    Err(Error::SamplerExhausted { attempts })
}

fn turning_ok(turning: &[f64], margin: f64) -> bool {
    turning.iter().all(|&t| t >= margin && t <= PI - margin)
}

/// Builds a closed polygon with the given turning angles and random positive
/// edge lengths, or `None` if the projected lengths are not all positive.
pub(crate) fn polygon_from_turning<R: Rng>(turning: &[f64], g: &mut R) -> Option<SampledPolygon> {
    let n = turning.len();
    let phase = g.gen_range(0.0..TAU);
    // edge k runs from z_k to z_{k+1}; the turn at z_k is turning[k]
    let mut heading = phase;
    let dirs: Vec<Vec2> = (0..n)
        .map(|k| {
            if k > 0 {
                heading += turning[k];
            }
            Vec2::from_angle(heading)
        })
        .collect();
    let weights: Vec<f64> = (0..n).map(|_| g.gen_range(0.2..1.0)).collect();
    let lengths = close_lengths(&dirs, &weights)?;
    let min = lengths.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = lengths.iter().sum::<f64>() / n as f64;
    if min < 0.05 * mean {
        return None;
    }
    let closure = dirs
        .iter()
        .zip(&lengths)
        .fold(Vec2::ZERO, |acc, (&u, &l)| acc + u * l);
    let closure_defect = closure.norm() / (mean * n as f64);

    let mut vertices = Vec::with_capacity(n);
    let mut z = Vec2::ZERO;
    for k in 0..n {
        vertices.push(z);
        z = z + dirs[k] * lengths[k];
    }
    let centroid = vertices.iter().fold(Vec2::ZERO, |a, &v| a + v) * (1.0 / n as f64);
    // half-edges s_k = ℓ_k / 2, so this makes max s_k = 1
    let scale = 2.0 / lengths.iter().cloned().fold(0.0, f64::max);
    let vertices: Vec<Vec2> = vertices.iter().map(|&v| (v - centroid) * scale).collect();
    let polygon = OrbitPolygon::with_tolerances(vertices, &Tolerances::default()).ok()?;
    Some(SampledPolygon {
        polygon,
        turning: turning.to_vec(),
        lengths,
        closure_defect,
        attempts: 0,
    })
}

/// Positive `ℓ` near `w` with `Σ ℓ_k u_k = 0`, if the correction keeps every entry positive.
fn close_lengths(dirs: &[Vec2], weights: &[f64]) -> Option<Vec<f64>> {
    let (mut mxx, mut mxy, mut myy) = (0.0, 0.0, 0.0);
    let mut b = Vec2::ZERO;
    for (&u, &w) in dirs.iter().zip(weights) {
        mxx += u.x * u.x;
        mxy += u.x * u.y;
        myy += u.y * u.y;
        b = b + u * w;
    }
    let det = mxx * myy - mxy * mxy;
    if det.abs() < 1e-12 {
        return None;
    }
    // p = −M⁻¹ b
    let p = Vec2::new(-(myy * b.x - mxy * b.y) / det, -(mxx * b.y - mxy * b.x) / det);
    let lengths: Vec<f64> = dirs
        .iter()
        .zip(weights)
        .map(|(&u, &w)| w + u.x * p.x + u.y * p.y)
        .collect();
    lengths.iter().all(|&l| l > 0.0).then_some(lengths)
}

/// Twice the signed area of the triangle `a b c`.
pub fn twice_area(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    det2(b - a, c - a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_winding() {
        assert_eq!(
            sample_orbit_polygon(&OrbitSampler::new(5, 0, 1)),
            Err(Error::InvalidWinding { n: 5, m: 0 })
        );
        assert_eq!(
            sample_orbit_polygon(&OrbitSampler::new(6, 3, 1)),
            Err(Error::InvalidWinding { n: 6, m: 3 })
        );
    }

    #[test]
    fn triangles_are_always_closable() {
        for seed in 0..50 {
            let s = sample_detailed(&OrbitSampler::new(3, 1, seed)).unwrap();
            assert_eq!(s.polygon.n(), 3);
            assert!(s.closure_defect < 1e-14);
        }
    }

    #[test]
    fn star_pentagons_have_negative_d() {
        for seed in 0..50 {
            let p = sample_orbit_polygon(&OrbitSampler::new(5, 2, seed)).unwrap();
            assert_eq!(p.winding(), 2);
            let alpha_sum: f64 = p.alpha().iter().sum();
            assert!((alpha_sum - PI).abs() < 1e-10);
            assert!(p.d().iter().all(|&d| d < 0.0));
        }
    }

    #[test]
    fn star_hexagons_have_angle_budget_two_pi() {
        for seed in 0..50 {
            let p = sample_orbit_polygon(&OrbitSampler::new(6, 2, seed)).unwrap();
            assert_eq!(p.winding(), 2);
            assert!((p.alpha().iter().sum::<f64>() - TAU).abs() < 1e-10);
        }
    }

    #[test]
    fn high_winding_classes_sample() {
        for (n, m) in [(7, 3), (9, 4), (11, 5), (12, 5)] {
            let p = sample_orbit_polygon(&OrbitSampler::new(n, m, 3)).unwrap();
            assert_eq!((p.n(), p.winding()), (n, m as i64));
        }
    }

    #[test]
    fn same_seed_same_polygon() {
        let a = sample_orbit_polygon(&OrbitSampler::new(6, 1, 99)).unwrap();
        let b = sample_orbit_polygon(&OrbitSampler::new(6, 1, 99)).unwrap();
        assert_eq!(a, b);
    }
}
