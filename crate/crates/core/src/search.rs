//! Search for convex integral elements over a fixed orbit polygon.
//!
//! * n = 3: the only integral element is read off the rank-one condition.
//! * n = 4: the variety is the conic `c_0 c_1 = Δ_0Δ_2 − Δ_1Δ_3` with
//!   `c_2 = −c_0`, `c_3 = −c_1`; it is swept against the box `c ≤ d`.
//! * n = 5, 6: multi-start Levenberg–Marquardt on the variety residuals plus
//!   hinge penalties `max(0, c_i − d_i)²`. Every candidate is polished by
//!   pinning near-active coordinates to `d_i` and is then re-checked with the
//!   strict integrality and convexity tests.
//!
//! A `None` result is numerical evidence, not a proof of absence.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::elements::IntegralElement;
use crate::error::{Error, Result};
use crate::geom::OrbitPolygon;
use crate::lm::{minimize, LeastSquares, LmSettings};
use crate::seeds::{derive_seed, rng, DEFAULT_SEED};
use crate::variety::{variety_system, VarietyEquation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchBudget {
    pub starts: usize,
    pub max_iterations: usize,
    pub seed: u64,
    /// Starts are drawn from `[−k|d_i| − kΔ̄, d_i]` with this `k`.
    pub box_factor: f64,
    /// Hinge weights tried in turn, each phase warm-started from the last.
    pub penalty_weights: [f64; 3],
    /// Distance below `d_i` (in units of `max s_i²`) at which the polish
    /// step pins `c_i = d_i`.
    pub active_set: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            starts: 200,
            max_iterations: 80,
            seed: DEFAULT_SEED,
            box_factor: 3.0,
            penalty_weights: [1.0, 1e3, 1e6],
            active_set: 1e-6,
        }
    }
}

/// Result of [`convex_element_search_detailed`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub element: Option<IntegralElement>,
    /// Index of the start that produced the element.
    pub start: Option<usize>,
    /// Smallest penalized cost reached over all starts (zero for n ≤ 4).
    pub best_cost: f64,
}

pub fn convex_element_search(
    poly: &OrbitPolygon,
    budget: &SearchBudget,
    tol: &Tolerances,
) -> Result<Option<IntegralElement>> {
    Ok(convex_element_search_detailed(poly, budget, tol)?.element)
}

pub fn convex_element_search_detailed(
    poly: &OrbitPolygon,
    budget: &SearchBudget,
    tol: &Tolerances,
) -> Result<SearchOutcome> {
    let n = poly.n();
    if !(3..=6).contains(&n) {
        return Err(Error::UnsupportedPeriod(n));
    }
    poly.require_locally_convex(tol)?;
    match n {
        3 => {
            let element = IntegralElement::classify(poly, triangle_element(poly), tol)?;
            Ok(SearchOutcome {
                element: element.is_convex.then_some(element),
                start: None,
                best_cost: 0.0,
            })
        }
        4 => {
            let found = quadrilateral_convex_elements(poly, tol)?.into_iter().next();
            Ok(SearchOutcome {
                element: found,
                start: None,
                best_cost: 0.0,
            })
        }
        _ => multistart(poly, budget, tol, None),
    }
}

/// Like [`convex_element_search_detailed`] for n = 5, 6, but elements within
/// `radius · max s_i²` (sup norm) of `avoid` do not count as hits.
pub fn convex_element_search_avoiding(
    poly: &OrbitPolygon,
    budget: &SearchBudget,
    tol: &Tolerances,
    avoid: &[f64],
    radius: f64,
) -> Result<SearchOutcome> {
    let n = poly.n();
    if !(5..=6).contains(&n) {
        return Err(Error::UnsupportedPeriod(n));
    }
    if avoid.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: avoid.len(),
        });
    }
    poly.require_locally_convex(tol)?;
    multistart(poly, budget, tol, Some((avoid, radius)))
}

/// The unique integral element of a triangle, from the rank-one condition
/// `C_ij C_kl = C_il C_kj` applied to the off-diagonal entries.
pub fn triangle_element(poly: &OrbitPolygon) -> Vec<f64> {
    let dl = poly.delta();
    // row j holds Δ_{j+1} in column j−1 and Δ_j in column j+1
    let entry = |row: usize, col: usize| {
        if col == (row + 2) % 3 {
            dl[(row + 1) % 3]
        } else {
            dl[row]
        }
    };
    (0..3)
        .map(|j| {
            let a = (j + 1) % 3;
            let b = (j + 2) % 3;
            entry(j, a) * entry(b, j) / entry(b, a)
        })
        .collect()
}

/// Points of the n = 4 conic inside the box `c ≤ d + ε`, each re-verified.
///
/// The conic is parametrized by `c_0` (and by `c_1` near its asymptote);
/// the box projects onto `c_0 ∈ [−d_2, d_0]` and `c_1 ∈ [−d_3, d_1]`.
/// When `Δ_0Δ_2 = Δ_1Δ_3` (a trapezoid) the conic splits into the two lines
/// `c_0 = 0` and `c_1 = 0`, which are swept separately.
pub fn quadrilateral_convex_elements(
    poly: &OrbitPolygon,
    tol: &Tolerances,
) -> Result<Vec<IntegralElement>> {
    if poly.n() != 4 {
        return Err(Error::WrongPeriod {
            expected: 4,
            got: poly.n(),
        });
    }
    let a = poly.area_scale();
    let eps = tol.convex * a;
    let d = poly.d();
    let dl = poly.delta();
    let k = dl[0] * dl[2] - dl[1] * dl[3];
    let span0 = (-d[2] - eps, d[0] + eps);
    let span1 = (-d[3] - eps, d[1] + eps);
    if span0.0 > span0.1 || span1.0 > span1.1 {
        return Ok(Vec::new());
    }
    const STEPS: usize = 32;
    let grid = |(lo, hi): (f64, f64)| (0..=STEPS).map(move |i| lo + (hi - lo) * i as f64 / STEPS as f64);
    let inside = |v: f64, (lo, hi): (f64, f64)| v >= lo && v <= hi;

    let mut points: Vec<(f64, f64)> = Vec::new();
    for c0 in grid(span0) {
        if c0 != 0.0 && inside(k / c0, span1) {
            points.push((c0, k / c0));
        }
    }
    for c1 in grid(span1) {
        if c1 != 0.0 && inside(k / c1, span0) {
            points.push((k / c1, c1));
        }
    }
    if k.abs() <= tol.variety * a * a {
        if inside(0.0, span0) {
            points.extend(grid(span1).map(|c1| (0.0, c1)));
        }
        if inside(0.0, span1) {
            points.extend(grid(span0).map(|c0| (c0, 0.0)));
        }
    }
    let mut found = Vec::new();
    for (c0, c1) in points {
        let element = IntegralElement::classify(poly, vec![c0, c1, -c0, -c1], tol)?;
        if element.is_convex {
            found.push(element);
        }
    }
    Ok(found)
}

/// Variety residuals and weighted hinges on a polygon scaled to `max s_i = 1`.
struct Penalized<'a> {
    equations: &'a [VarietyEquation],
    d: &'a [f64],
    weight: f64,
    /// Coordinates held fixed at `d_i`; only the rest are unknowns.
    pinned: Option<&'a [bool]>,
}

impl Penalized<'_> {
    fn expand(&self, x: &[f64], full: &mut [f64]) {
        match self.pinned {
            None => full.copy_from_slice(x),
            Some(pinned) => {
                let mut free = x.iter();
                for (i, slot) in full.iter_mut().enumerate() {
                    *slot = if pinned[i] { self.d[i] } else { *free.next().unwrap() };
                }
            }
        }
    }

    fn free_indices(&self) -> Vec<usize> {
        (0..self.d.len())
            .filter(|&i| self.pinned.is_none_or(|p| !p[i]))
            .collect()
    }
}

impl LeastSquares for Penalized<'_> {
    fn dims(&self) -> (usize, usize) {
        let hinges = if self.pinned.is_some() { 0 } else { self.d.len() };
        (self.equations.len() + hinges, self.free_indices().len())
    }

    fn evaluate(&self, x: &[f64], r: &mut [f64], jac: &mut [f64]) {
        let n = self.d.len();
        let free = self.free_indices();
        let cols = free.len();
        let mut c = [0.0; 8];
        let c = &mut c[..n];
        self.expand(x, c);
        jac.iter_mut().for_each(|v| *v = 0.0);
        let mut grad = [0.0; 8];
        for (k, eq) in self.equations.iter().enumerate() {
            r[k] = eq.eval(c);
            let g = &mut grad[..n];
            g.iter_mut().for_each(|v| *v = 0.0);
            eq.accumulate_gradient(c, 1.0, g);
            for (col, &i) in free.iter().enumerate() {
                jac[k * cols + col] = g[i];
            }
        }
        if self.pinned.is_none() {
            let w = self.weight.sqrt();
            let base = self.equations.len();
            for i in 0..n {
                let excess = c[i] - self.d[i];
                if excess > 0.0 {
                    r[base + i] = w * excess;
                    jac[(base + i) * cols + i] = w;
                } else {
                    r[base + i] = 0.0;
                }
            }
        }
    }
}

fn multistart(
    poly: &OrbitPolygon,
    budget: &SearchBudget,
    tol: &Tolerances,
    avoid: Option<(&[f64], f64)>,
) -> Result<SearchOutcome> {
    let n = poly.n();
    let scale = poly.length_scale();
    let area = poly.area_scale();
    let unit = OrbitPolygon::new(poly.vertices().iter().map(|&v| v * (1.0 / scale)).collect())?;
    let equations = variety_system(&unit)?;
    let d = unit.d().to_vec();
    let mean_delta = unit.delta().iter().sum::<f64>() / n as f64;
    let settings = LmSettings {
        max_iterations: budget.max_iterations,
        ..LmSettings::default()
    };

    let run = |start: usize| -> (f64, Option<IntegralElement>) {
        let mut g = rng(derive_seed(budget.seed, start as u64));
        let mut x: Vec<f64> = d
            .iter()
            .map(|&di| {
                let lo = -budget.box_factor * (di.abs() + mean_delta);
                g.gen_range(lo.min(di)..=di)
            })
            .collect();
        let mut cost = f64::INFINITY;
        for &weight in &budget.penalty_weights {
            let problem = Penalized {
                equations: &equations,
                d: &d,
                weight,
                pinned: None,
            };
            cost = minimize(&problem, &mut x, settings).cost;
        }
        // NaN costs are rejected too
        if cost.is_nan() || cost >= 1e-8 {
            return (cost, None);
        }
        let element = verified(poly, &x, area, tol).or_else(|| {
            let polished = polish(&equations, &d, &x, budget.active_set, settings);
            verified(poly, &polished, area, tol)
        });
        let element = element.filter(|e| match avoid {
            Some((c, radius)) => e.c.iter().zip(c).any(|(a, b)| (a - b).abs() > radius * area),
            None => true,
        });
        (cost, element)
    };

    // costs are non-negative, so their bit patterns order like the values
    let best = AtomicU64::new(f64::INFINITY.to_bits());
    let hit = (0..budget.starts).into_par_iter().find_map_first(|start| {
        let (cost, element) = run(start);
        if cost.is_finite() {
            best.fetch_min(cost.max(0.0).to_bits(), Ordering::Relaxed);
        }
        element.map(|e| (start, e))
    });
    Ok(match hit {
        Some((start, element)) => SearchOutcome {
            element: Some(element),
            start: Some(start),
            best_cost: 0.0,
        },
        None => SearchOutcome {
            element: None,
            start: None,
            best_cost: f64::from_bits(best.into_inner()),
        },
    })
}

/// Pins every coordinate within `active` of its bound to `d_i` and re-solves
/// the variety equations for the remaining ones.
fn polish(equations: &[VarietyEquation], d: &[f64], x: &[f64], active: f64, settings: LmSettings) -> Vec<f64> {
    let pinned: Vec<bool> = x.iter().zip(d).map(|(xi, di)| *xi > di - active).collect();
    let problem = Penalized {
        equations,
        d,
        weight: 0.0,
        pinned: Some(&pinned),
    };
    let mut free: Vec<f64> = x.iter().zip(&pinned).filter(|(_, p)| !**p).map(|(v, _)| *v).collect();
    if !free.is_empty() {
        minimize(&problem, &mut free, settings);
    }
    let mut full = vec![0.0; d.len()];
    problem.expand(&free, &mut full);
    full
}

fn verified(poly: &OrbitPolygon, unit_c: &[f64], area: f64, tol: &Tolerances) -> Option<IntegralElement> {
    let c: Vec<f64> = unit_c.iter().map(|v| v * area).collect();
    IntegralElement::classify(poly, c, tol)
        .ok()
        .filter(|e| e.is_convex)
}
