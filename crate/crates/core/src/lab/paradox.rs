//! Exploration of paradoxical (6,2) orbit polygons.
//!
//! Whether a paradoxical (6,2) orbit can come from a convex billiard curve is
//! open. This module only looks at polygons: it maximizes the paradox margin
//! `max_i min(α_{i−1} + α_i − π, α_i + α_{i+1} − π)` by random sampling followed
//! by a hill climb on the turning angles, and runs the convex-element search on
//! every polygon with positive margin. Nothing here passes or fails.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::elements::{classify_paradoxical, paradox_margin};
use crate::geom::{OrbitPolygon, PolygonFile};
use crate::lab::sampler::{polygon_from_turning, sample_with, OrbitSampler};
use crate::search::{convex_element_search, SearchBudget};
use crate::seeds::{derive_seed, rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParadoxBudget {
    /// Number of polygons drawn; half of them go to the hill climb.
    pub samples: usize,
    /// Candidates kept in the report, best margin first.
    pub keep: usize,
    pub search: SearchBudget,
}

impl Default for ParadoxBudget {
    fn default() -> Self {
        Self {
            samples: 2000,
            keep: 10,
            search: SearchBudget {
                starts: 50,
                ..SearchBudget::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadoxCandidate {
    pub polygon: PolygonFile,
    pub margin: f64,
    pub alpha: Vec<f64>,
    /// Convex element found by the search, if any.
    pub convex_element: Option<Vec<f64>>,
    /// Whether that element is the all-corner element `c = d`.
    pub element_is_d: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadoxReport {
    pub seed: u64,
    pub sampled: usize,
    pub paradoxical: usize,
    pub best_margin: Option<f64>,
    pub candidates: Vec<ParadoxCandidate>,
}

impl ParadoxReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn search_paradoxical(budget: &ParadoxBudget, seed: u64) -> ParadoxReport {
    let tol = Tolerances::default();
    let sampler = OrbitSampler::new(6, 2, seed);
    let explore = budget.samples.div_ceil(2);
    let mut pool: Vec<(f64, OrbitPolygon, Vec<f64>)> = Vec::new();
    let mut sampled = 0;

    let mut g = rng(derive_seed(seed, 0));
    for _ in 0..explore {
        if let Ok(s) = sample_with(&sampler, &mut g) {
            sampled += 1;
            pool.push((paradox_margin(s.polygon.alpha()), s.polygon, s.turning));
        }
    }
    pool.sort_by(|a, b| b.0.total_cmp(&a.0));

    // hill climb from the best seed polygon on the turning angles
    if let Some((mut best_margin, _, mut best_turning)) = pool.first().cloned() {
        let mut g = rng(derive_seed(seed, 1));
        for _ in explore..budget.samples {
            let trial = perturb(&best_turning, &mut g);
            let Some(s) = polygon_from_turning(&trial, &mut g) else {
                continue;
            };
            if s.polygon.winding() != 2 || !s.polygon.is_locally_convex() {
                continue;
            }
            sampled += 1;
            let margin = paradox_margin(s.polygon.alpha());
            if margin > best_margin {
                best_margin = margin;
                best_turning = trial;
            }
            pool.push((margin, s.polygon, s.turning));
        }
    }
    pool.sort_by(|a, b| b.0.total_cmp(&a.0));

    let paradoxical = pool.iter().filter(|(m, _, _)| *m > 0.0).count();
    let best_margin = pool.first().map(|(m, _, _)| *m);
    let candidates = pool
        .iter()
        .filter(|(m, p, _)| *m > 0.0 && classify_paradoxical(p).unwrap_or(false))
        .take(budget.keep)
        .enumerate()
        .map(|(k, (margin, poly, _))| {
            let search = SearchBudget {
                seed: derive_seed(seed, 100 + k as u64),
                ..budget.search
            };
            let found = convex_element_search(poly, &search, &tol).ok().flatten();
            let a = poly.area_scale();
            let element_is_d = found.as_ref().map(|e| {
                e.c.iter().zip(poly.d()).all(|(c, d)| (c - d).abs() <= 1e-8 * a)
            });
            ParadoxCandidate {
                polygon: poly.to_file(),
                margin: *margin,
                alpha: poly.alpha().to_vec(),
                convex_element: found.map(|e| e.c),
                element_is_d,
            }
        })
        .collect();
    ParadoxReport {
        seed,
        sampled,
        paradoxical,
        best_margin,
        candidates,
    }
}

/// Moves a little turning from one vertex to another, keeping the sum at 4π
/// and every angle inside `(0, π)`.
fn perturb<R: Rng>(turning: &[f64], g: &mut R) -> Vec<f64> {
    let n = turning.len();
    loop {
        let mut t = turning.to_vec();
        let i = g.gen_range(0..n);
        let j = (i + g.gen_range(1..n)) % n;
        let amount = g.gen_range(-0.1..0.1);
        t[i] += amount;
        t[j] -= amount;
        if t.iter().all(|&x| x > 0.02 && x < std::f64::consts::PI - 0.02) {
            debug_assert!((t.iter().sum::<f64>() - 2.0 * TAU).abs() < 1e-9);
            return t;
        }
    }
}
