//! The outer billiard map of a convex curve.
//!
//! From a point `z` outside the curve `Γ`, draw the support line of `Γ` that
//! has `Γ` on its left and reflect `z` through the support point `p`:
//! `F(z) = 2p − z`. Polygons and densely sampled smooth curves are supported;
//! on a polygon the map is undefined on the extensions of the edges, which is
//! reported as a singular line.

mod curve;
mod orbit;

pub use curve::{ConvexCurve, CurveFile, CurveKind, Support, SupportSite, SINGULAR_TOLERANCE};
pub use orbit::{iterate, orbit_polygon, outer_map, singular_clearance, OrbitRecord, NEAR_SINGULAR};
