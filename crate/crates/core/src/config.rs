use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every module.
///
/// Relative tolerances are dimensionless. Quantities with units are first
/// divided by the matching power of the polygon's length scale (the largest
/// half-edge `s_i`), so a single number works for polygons of any size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// `Δ_i` must exceed this times `max s_i²` to count as locally convex.
    pub local_convexity: f64,
    /// Allowed distance of `Σδ_i / 2π` from an integer.
    pub winding: f64,
    /// Singular values below `rank * σ_max` are treated as zero.
    pub rank: f64,
    /// Bound on normalized variety residuals.
    pub variety: f64,
    /// Slack in `c_i <= d_i`, relative to `max s_i²`.
    pub convex: f64,
    /// Closure tolerance for period detection, relative to the curve diameter.
    pub period: f64,
    /// Bound on normalized null-vector residuals `|C r|`.
    pub null_vector: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            local_convexity: 1e-12,
            winding: 1e-9,
            rank: 1e-9,
            variety: 1e-8,
            convex: 1e-12,
            period: 1e-9,
            null_vector: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn is_valid(&self) -> bool {
        [
            self.local_convexity,
            self.winding,
            self.rank,
            self.variety,
            self.convex,
            self.period,
            self.null_vector,
        ]
        .iter()
        .all(|t| t.is_finite() && *t > 0.0)
    }
}
