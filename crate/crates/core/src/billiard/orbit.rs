//! Iteration of the outer billiard map and periodic orbits.

use serde::{Deserialize, Serialize};

use crate::billiard::curve::{ConvexCurve, Support};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geom::{OrbitPolygon, Vec2};

/// Clearance below which an orbit is flagged as passing close to the singular
/// set. The map itself only aborts below [`SINGULAR_TOLERANCE`](crate::billiard::SINGULAR_TOLERANCE).
pub const NEAR_SINGULAR: f64 = 1e-6;

/// `F(z) = 2p − z`, with `p` the support point at `z`.
pub fn outer_map(curve: &ConvexCurve, z: Vec2) -> Result<Vec2> {
    Ok(step(curve, z)?.0)
}

fn step(curve: &ConvexCurve, z: Vec2) -> Result<(Vec2, Support)> {
    let support = curve.tangency_point(z)?;
    Ok((support.point * 2.0 - z, support))
}

/// The iterates `z_0, …, z_k` of one orbit, stopped at the first closure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub start: Vec2,
    pub points: Vec<Vec2>,
    /// Smallest `n` with `|F^n(z_0) − z_0| < tol · diameter`, certified by a
    /// second pass from `F^n(z_0)`.
    pub period: Option<usize>,
    /// Winding number of the orbit polygon when periodic.
    pub winding: Option<i64>,
    /// `|F^n(z_0) − z_0|` for the period, otherwise the smallest return distance seen.
    pub closure_residual: f64,
    /// Some step came within [`NEAR_SINGULAR`] of the singular set.
    pub singular_flag: bool,
    /// Largest distance from a midpoint `(z_k + z_{k+1}) / 2` to the curve.
    pub midpoint_error: f64,
}

/// Iterates up to `steps` times from `z0`.
///
/// A step that lands on the singular set aborts with [`Error::SingularOrbit`].
pub fn iterate(curve: &ConvexCurve, z0: Vec2, steps: usize, tol: &Tolerances) -> Result<OrbitRecord> {
    let threshold = tol.period * curve.diameter();
    let mut points = vec![z0];
    let mut z = z0;
    let mut singular_flag = false;
    let mut midpoint_error: f64 = 0.0;
    let mut best = f64::INFINITY;
    let mut period = None;
    for k in 1..=steps {
        let (next, support) = step(curve, z).map_err(|e| match e {
            Error::SingularLine => Error::SingularOrbit { step: k - 1 },
            other => other,
        })?;
        singular_flag |= support.clearance < NEAR_SINGULAR;
        midpoint_error = midpoint_error.max(curve.distance_to_boundary(z.midpoint(next)));
        points.push(next);
        z = next;
        let back = z.distance(z0);
        best = best.min(back);
        if back < threshold && certify(curve, z, k, threshold) {
            period = Some(k);
            best = back;
            break;
        }
    }
    let winding = match period {
        Some(n) if n >= 3 => OrbitPolygon::new(points[..n].to_vec())
            .ok()
            .map(|p| p.winding()),
        _ => None,
    };
    Ok(OrbitRecord {
        start: z0,
        points,
        period,
        winding,
        closure_residual: best,
        singular_flag,
        midpoint_error,
    })
}

fn certify(curve: &ConvexCurve, from: Vec2, n: usize, threshold: f64) -> bool {
    let mut z = from;
    for _ in 0..n {
        match outer_map(curve, z) {
            Ok(next) => z = next,
            Err(_) => return false,
        }
    }
    z.distance(from) < threshold
}

/// The orbit polygon of a periodic record, after checking that every edge
/// midpoint lies on the curve and the polygon is locally convex.
pub fn orbit_polygon(record: &OrbitRecord, curve: &ConvexCurve, tol: &Tolerances) -> Result<OrbitPolygon> {
    let n = record.period.ok_or(Error::NotPeriodic)?;
    let vertices = record.points[..n].to_vec();
    let limit = tol.period * curve.diameter();
    for i in 0..n {
        let mid = vertices[i].midpoint(vertices[(i + 1) % n]);
        let distance = curve.distance_to_boundary(mid);
        if distance > limit {
            return Err(Error::MidpointOffCurve { index: i, distance });
        }
    }
    OrbitPolygon::locally_convex(vertices, tol)
}

/// `|sin|` margin of the support at `z`; zero on the singular set.
pub fn singular_clearance(curve: &ConvexCurve, z: Vec2) -> f64 {
    match curve.tangency_point(z) {
        Ok(s) => s.clearance,
        Err(_) => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexCurve {
        ConvexCurve::polygon(vec![
            Vec2::new(1.0, -1.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(-1.0, 1.0),
            Vec2::new(-1.0, -1.0),
        ])
        .unwrap()
    }

    #[test]
    fn square_step() {
        assert_eq!(outer_map(&square(), Vec2::new(2.0, 0.5)).unwrap(), Vec2::new(0.0, 1.5));
    }

    #[test]
    fn singular_start_aborts() {
        let tol = Tolerances::default();
        assert_eq!(
            iterate(&square(), Vec2::new(1.0, -3.0), 10, &tol),
            Err(Error::SingularOrbit { step: 0 })
        );
    }

    #[test]
    fn local_isometry_and_reversibility() {
        let sq = square();
        let a = Vec2::new(2.3, 0.4);
        let b = Vec2::new(2.31, 0.42);
        let (fa, fb) = (outer_map(&sq, a).unwrap(), outer_map(&sq, b).unwrap());
        assert!((fa.distance(fb) - a.distance(b)).abs() < 1e-14);
        // F⁻¹ is the same reflection with the curve traversed the other way:
        // reflecting F(a) back through the same support point recovers a
        let p = sq.tangency_point(a).unwrap().point;
        assert!((p * 2.0 - fa).distance(a) < 1e-15);
    }

    #[test]
    fn square_orbits_are_periodic() {
        let tol = Tolerances::default();
        let rec = iterate(&square(), Vec2::new(2.0, 0.5), 100, &tol).unwrap();
        let n = rec.period.expect("periodic");
        assert!(n >= 3);
        assert_eq!(rec.winding, Some(1));
        assert!(rec.midpoint_error < 1e-12);
        let poly = orbit_polygon(&rec, &square(), &tol).unwrap();
        assert_eq!(poly.n(), n);
    }

    #[test]
    fn circle_orbit_midpoints_on_curve() {
        let circle = ConvexCurve::circle(Vec2::ZERO, 1.0, 1024).unwrap();
        let rec = iterate(&circle, Vec2::new(0.0, -1.5), 50, &Tolerances::default()).unwrap();
        assert_eq!(rec.points.len(), 51);
        assert!(rec.midpoint_error < 1e-9);
        // the map preserves the distance from the center on a circle
        for z in &rec.points {
            assert!((z.norm() - 1.5).abs() < 1e-7);
        }
    }

    #[test]
    fn aperiodic_record_has_no_polygon() {
        let circle = ConvexCurve::circle(Vec2::ZERO, 1.0, 256).unwrap();
        let tol = Tolerances::default();
        let rec = iterate(&circle, Vec2::new(0.0, -1.3), 5, &tol).unwrap();
        assert_eq!(rec.period, None);
        assert_eq!(orbit_polygon(&rec, &circle, &tol), Err(Error::NotPeriodic));
    }

    #[test]
    fn triangle_cell_across_an_edge_has_period_six() {
        let tri = ConvexCurve::regular_polygon(3, 1.0).unwrap();
        let tol = Tolerances::default();
        let [v0, v1, v2] = [tri.points()[0], tri.points()[1], tri.points()[2]];
        // the triangle v1 v2 (v1 + v2 − v0) is one cell; its centroid is −v0
        for z in [v0 * -1.0, v0 * -0.6, v0 * -1.9, (v1 - v0) * 0.5, (v2 - v0) * 0.5] {
            let rec = iterate(&tri, z, 50, &tol).unwrap();
            assert_eq!(rec.period, Some(6), "z = {z:?}");
            assert_eq!(rec.winding, Some(2));
            assert!(!rec.singular_flag);
            assert!(orbit_polygon(&rec, &tri, &tol).is_ok());
        }
    }
}
