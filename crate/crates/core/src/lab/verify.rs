//! Randomized corroboration of the scarcity theorems for periods 3 to 6.
//!
//! Each verifier samples polygons of the relevant `(n, m)` class, runs the
//! element calculus on them, and counts violations. Trials are independent:
//! trial `k` draws from a seed derived from the master seed and `k`, so the
//! report does not depend on scheduling or thread count.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::elements::{check_element, classify_paradoxical, IntegralElement};
use crate::error::{Error, Result};
use crate::geom::{OrbitPolygon, PolygonFile, Vec2};
use crate::lab::sampler::{sample_orbit_polygon, twice_area, OrbitSampler};
use crate::lm::{minimize, LeastSquares, LmSettings};
use crate::search::{
    convex_element_search, convex_element_search_avoiding, quadrilateral_convex_elements, triangle_element, SearchBudget,
};
use crate::seeds::{derive_seed, rng, DEFAULT_SEED};
use crate::variety::{max_abs, normalized_residuals, variety_system, VarietyEquation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "n3")]
    Triangle,
    #[serde(rename = "n4")]
    Quadrilateral,
    #[serde(rename = "n52")]
    StarPentagon,
    #[serde(rename = "n62")]
    StarHexagon,
}

impl TheoremId {
    pub const ALL: [TheoremId; 4] = [
        TheoremId::Triangle,
        TheoremId::Quadrilateral,
        TheoremId::StarPentagon,
        TheoremId::StarHexagon,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Triangle => "n3",
            TheoremId::Quadrilateral => "n4",
            TheoremId::StarPentagon => "n52",
            TheoremId::StarHexagon => "n62",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnknownTheorem(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
    /// Size of the positive-control run for (5,1) and (6,1).
    pub control_trials: usize,
    pub budget: SearchBudget,
    pub tol: Tolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: DEFAULT_SEED,
            control_trials: 100,
            budget: SearchBudget::default(),
            tol: Tolerances::default(),
        }
    }
}

/// A failing sample, kept so it can be replayed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replay {
    pub trial: usize,
    pub seed: u64,
    pub polygon: PolygonFile,
    pub candidate: Option<Vec<f64>>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlReport {
    pub n: usize,
    pub m: usize,
    pub samples: usize,
    /// Samples for which a convex element was found.
    pub found: usize,
    /// Samples whose element differs from `d` by more than `1e-3 · max s_i²`.
    pub found_off_corner: usize,
    /// Largest `max_i |c_i − d_i| / max s_i²` over found elements.
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifierReport {
    pub theorem: TheoremId,
    pub seed: u64,
    pub samples: usize,
    pub failures: usize,
    /// Worst value over all samples of the quantity the theorem constrains;
    /// see [`verify`] for the meaning per theorem.
    pub worst_margin: f64,
    pub notes: Vec<String>,
    pub control: Option<ControlReport>,
    pub replays: Vec<Replay>,
}

impl VerifierReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs one verifier.
///
/// `worst_margin` per theorem, all in units of `max s_i²`:
///
/// * `n3`: `min (c_0 − d_0)`, positive when every triangle's element is non-convex;
/// * `n4`: `max |c − d|` over convex elements found on the conic;
/// * `n52`: `min_i (−d_i)`, positive when every sampled `d_i` is negative;
/// * `n62`: `max |c − d|` over convex elements found.
pub fn verify(theorem: TheoremId, config: &VerifyConfig) -> VerifierReport {
    match theorem {
        TheoremId::Triangle => verify_theorem_n3(config),
        TheoremId::Quadrilateral => verify_theorem_n4(config),
        TheoremId::StarPentagon => verify_theorem_n52(config),
        TheoremId::StarHexagon => verify_theorem_n62(config),
    }
}

/// Outcome of one trial.
struct Trial {
    margin: f64,
    failure: Option<Replay>,
    note: Option<&'static str>,
}

impl Trial {
    fn ok(margin: f64) -> Self {
        Self {
            margin,
            failure: None,
            note: None,
        }
    }
}

fn replay(trial: usize, seed: u64, poly: &OrbitPolygon, c: Option<&[f64]>, reason: impl Into<String>) -> Replay {
    Replay {
        trial,
        seed,
        polygon: poly.to_file(),
        candidate: c.map(|c| c.to_vec()),
        reason: reason.into(),
    }
}

fn run_trials<F>(
    theorem: TheoremId,
    config: &VerifyConfig,
    worst: fn(f64, f64) -> f64,
    identity: f64,
    trial: F,
) -> VerifierReport
where
    F: Fn(usize, u64) -> Result<Trial> + Sync,
{
    let outcomes: Vec<(u64, Result<Trial>)> = (0..config.trials)
        .into_par_iter()
        .map(|k| {
            let seed = derive_seed(config.seed, k as u64);
            (seed, trial(k, seed))
        })
        .collect();
    let mut report = VerifierReport {
        theorem,
        seed: config.seed,
        samples: 0,
        failures: 0,
        worst_margin: identity,
        notes: Vec::new(),
        control: None,
        replays: Vec::new(),
    };
    let mut sampler_errors = 0;
    let mut tagged: Vec<(&'static str, usize)> = Vec::new();
    for (_, outcome) in outcomes {
        match outcome {
            Ok(t) => {
                report.samples += 1;
                report.worst_margin = worst(report.worst_margin, t.margin);
                if let Some(tag) = t.note {
                    match tagged.iter_mut().find(|(name, _)| *name == tag) {
                        Some((_, count)) => *count += 1,
                        None => tagged.push((tag, 1)),
                    }
                }
                if let Some(r) = t.failure {
                    report.failures += 1;
                    report.replays.push(r);
                }
            }
            Err(_) => sampler_errors += 1,
        }
    }
    if sampler_errors > 0 {
        report
            .notes
            .push(format!("{sampler_errors} trials skipped: sampler exhausted"));
    }
    for (tag, count) in tagged {
        report.notes.push(format!("{count} samples: {tag}"));
    }
    if !report.worst_margin.is_finite() {
        report.worst_margin = 0.0;
    }
    report
}

fn deviation_from_d(poly: &OrbitPolygon, c: &[f64]) -> f64 {
    let a = poly.area_scale();
    c.iter()
        .zip(poly.d())
        .map(|(ci, di)| (ci - di).abs() / a)
        .fold(0.0, f64::max)
}

/// Every triangle carries exactly one integral element, `c_i = Δ` (half the
/// area), and it is not convex because `d_i = −Δ`.
pub fn verify_theorem_n3(config: &VerifyConfig) -> VerifierReport {
    let tol = config.tol;
    let mut report = run_trials(TheoremId::Triangle, config, f64::min, f64::INFINITY, |k, seed| {
        let poly = sample_orbit_polygon(&OrbitSampler::new(3, 1, seed))?;
        let v = poly.vertices();
        let half_area = 0.25 * twice_area(v[0], v[1], v[2]);
        let c = triangle_element(&poly);
        let a = poly.area_scale();
        if c.iter().any(|ci| (ci - half_area).abs() > 1e-9 * half_area) {
            return Ok(Trial {
                margin: 0.0,
                failure: Some(replay(k, seed, &poly, Some(&c), "element differs from half the area")),
                note: None,
            });
        }
        let check = check_element(&poly, &c, &tol)?;
        if !check.is_valid {
            return Ok(Trial {
                margin: 0.0,
                failure: Some(replay(k, seed, &poly, Some(&c), "rank of C is not 1")),
                note: None,
            });
        }
        // uniqueness: moving any single entry breaks rank one
        let mut g = rng(seed ^ 0x7E57);
        let mut bumped = c.clone();
        let j = g.gen_range(0..3);
        bumped[j] += g.gen_range(0.05..1.0) * half_area;
        if check_element(&poly, &bumped, &tol)?.is_valid {
            return Ok(Trial {
                margin: 0.0,
                failure: Some(replay(k, seed, &poly, Some(&bumped), "perturbed vector still has rank 1")),
                note: None,
            });
        }
        let margin = (c[0] - poly.d()[0]) / a;
        let element = IntegralElement::classify(&poly, c.clone(), &tol)?;
        if element.is_convex || margin <= 0.0 {
            return Ok(Trial {
                margin,
                failure: Some(replay(k, seed, &poly, Some(&c), "triangle element is convex")),
                note: None,
            });
        }
        Ok(Trial::ok(margin))
    });
    report
        .notes
        .push("worst_margin = min (c_0 - d_0) / max s_i^2".into());
    report
}

/// A trapezoid with parallel horizontal sides, randomly rotated.
fn random_trapezoid<R: Rng>(g: &mut R) -> Result<OrbitPolygon> {
    let h = g.gen_range(0.4..1.5);
    let (a, b) = (g.gen_range(0.3..1.5), g.gen_range(0.3..1.5));
    let (c, e) = (g.gen_range(0.3..1.5), g.gen_range(0.3..1.5));
    let rot = g.gen_range(0.0..2.0 * PI);
    let (s, co) = rot.sin_cos();
    let turn = |v: Vec2| Vec2::new(co * v.x - s * v.y, s * v.x + co * v.y);
    OrbitPolygon::new(vec![
        turn(Vec2::new(-a, 0.0)),
        turn(Vec2::new(b, 0.0)),
        turn(Vec2::new(c, h)),
        turn(Vec2::new(-e, h)),
    ])
}

/// Every convex quadrilateral has exactly one convex integral element, `c = d`.
///
/// Every tenth trial uses a trapezoid, where the conic degenerates into two lines.
pub fn verify_theorem_n4(config: &VerifyConfig) -> VerifierReport {
    let tol = config.tol;
    let mut report = run_trials(TheoremId::Quadrilateral, config, f64::max, 0.0, |k, seed| {
        let trapezoid = k % 10 == 9;
        let poly = if trapezoid {
            random_trapezoid(&mut rng(seed))?
        } else {
            sample_orbit_polygon(&OrbitSampler::new(4, 1, seed))?
        };
        let found = quadrilateral_convex_elements(&poly, &tol)?;
        let note = trapezoid.then_some("trapezoid (degenerate conic)");
        if found.is_empty() {
            return Ok(Trial {
                margin: 0.0,
                failure: Some(replay(k, seed, &poly, None, "conic sweep found no convex element")),
                note,
            });
        }
        let margin = found
            .iter()
            .map(|e| deviation_from_d(&poly, &e.c))
            .fold(0.0, f64::max);
        if margin > 1e-8 {
            let worst = found
                .iter()
                .max_by(|x, y| deviation_from_d(&poly, &x.c).total_cmp(&deviation_from_d(&poly, &y.c)))
                .unwrap();
            return Ok(Trial {
                margin,
                failure: Some(replay(k, seed, &poly, Some(&worst.c), "convex element differs from d")),
                note,
            });
        }
        Ok(Trial {
            margin,
            failure: None,
            note,
        })
    });
    report
        .notes
        .push("worst_margin = max |c - d| / max s_i^2 over convex elements".into());
    report
}

/// Pure variety projection, no hinge; used to probe the sign argument.
struct VarietyOnly<'a>(&'a [VarietyEquation]);

impl LeastSquares for VarietyOnly<'_> {
    fn dims(&self) -> (usize, usize) {
        (self.0.len(), 5)
    }
    fn evaluate(&self, x: &[f64], r: &mut [f64], jac: &mut [f64]) {
        jac.iter_mut().for_each(|v| *v = 0.0);
        for (k, eq) in self.0.iter().enumerate() {
            r[k] = eq.eval(x);
            eq.accumulate_gradient(x, 1.0, &mut jac[k * 5..(k + 1) * 5]);
        }
    }
}

/// `c_0 c_1 − d_0 d_1 − (c_3 + d_3) Δ_1`, zero on the n = 5 variety.
pub fn n5_difference_identity(poly: &OrbitPolygon, c: &[f64]) -> f64 {
    let d = poly.d();
    c[0] * c[1] - d[0] * d[1] - (c[3] + d[3]) * poly.delta()[1]
}

/// No (5,2) orbit polygon carries a convex integral element.
///
/// Per trial: all `d_i < 0`; the search finds nothing; and a few variety
/// points reached from inside the box satisfy the difference identity while
/// leaving the box, as the sign argument forces. Also runs the (5,1) positive
/// control, where convex elements must be found.
pub fn verify_theorem_n52(config: &VerifyConfig) -> VerifierReport {
    let tol = config.tol;
    let budget = config.budget;
    let mut report = run_trials(TheoremId::StarPentagon, config, f64::min, f64::INFINITY, |k, seed| {
        let poly = sample_orbit_polygon(&OrbitSampler::new(5, 2, seed))?;
        let a = poly.area_scale();
        let margin = poly.d().iter().map(|d| -d / a).fold(f64::INFINITY, f64::min);
        if margin <= 0.0 {
            return Ok(Trial {
                margin,
                failure: Some(replay(k, seed, &poly, None, "some d_i >= 0")),
                note: None,
            });
        }
        let budget = SearchBudget {
            seed: derive_seed(seed, 1),
            ..budget
        };
        if let Some(e) = convex_element_search(&poly, &budget, &tol)? {
            return Ok(Trial {
                margin,
                failure: Some(replay(k, seed, &poly, Some(&e.c), "convex element found")),
                note: None,
            });
        }
        if let Some(c) = sign_argument_counterexample(&poly, seed, &tol)? {
            return Ok(Trial {
                margin,
                failure: Some(replay(k, seed, &poly, Some(&c), "variety point violates the sign argument")),
                note: None,
            });
        }
        Ok(Trial::ok(margin))
    });
    report
        .notes
        .push("worst_margin = min_i (-d_i) / max s_i^2".into());
    let control = positive_control(5, 1, config);
    if control.found < control.samples {
        report.failures += control.samples - control.found;
        report
            .notes
            .push("positive control: some (5,1) samples had no convex element".into());
    }
    report.control = Some(control);
    report
}

/// Projects a few box points onto the n = 5 variety and returns one that
/// breaks the difference identity or lands inside the convex box.
fn sign_argument_counterexample(poly: &OrbitPolygon, seed: u64, tol: &Tolerances) -> Result<Option<Vec<f64>>> {
    let scale = poly.length_scale();
    let a = poly.area_scale();
    let unit = OrbitPolygon::new(poly.vertices().iter().map(|&v| v * (1.0 / scale)).collect())?;
    let equations = variety_system(&unit)?;
    let mut g = rng(derive_seed(seed, 2));
    for _ in 0..4 {
        let mut x: Vec<f64> = unit.d().iter().map(|&d| g.gen_range(3.0 * d - 1.0..d)).collect();
        minimize(&VarietyOnly(&equations), &mut x, LmSettings::default());
        let c: Vec<f64> = x.iter().map(|v| v * a).collect();
        if max_abs(&normalized_residuals(poly, &c)?) > tol.variety {
            continue;
        }
        let identity = n5_difference_identity(poly, &c) / (a * a);
        let inside = c.iter().zip(poly.d()).all(|(ci, di)| *ci <= di + tol.convex * a);
        if identity.abs() > 1e-8 || inside {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Non-paradoxical (6,2) polygons carry no convex element other than `c = d`.
///
/// Paradoxical samples are discarded and redrawn within the trial. Also runs
/// the (6,1) control, where elements away from `d` must show up.
pub fn verify_theorem_n62(config: &VerifyConfig) -> VerifierReport {
    let tol = config.tol;
    let budget = config.budget;
    let mut report = run_trials(TheoremId::StarHexagon, config, f64::max, 0.0, |k, seed| {
        let mut redraws = 0u64;
        let poly = loop {
            let p = sample_orbit_polygon(&OrbitSampler::new(6, 2, derive_seed(seed, redraws)))?;
            if !classify_paradoxical(&p)? {
                break p;
            }
            redraws += 1;
            if redraws > 1000 {
                return Err(Error::SamplerExhausted { attempts: 1000 });
            }
        };
        let positive = poly.d().iter().filter(|&&d| d > 0.0).count();
        let note = match positive {
            0 => None,
            1 => Some("exactly one d_i > 0"),
            _ => Some("two or more d_i > 0"),
        };
        let budget = SearchBudget {
            seed: derive_seed(seed, u64::MAX),
            ..budget
        };
        let mut margin: f64 = 0.0;
        if let Some(e) = convex_element_search(&poly, &budget, &tol)? {
            margin = deviation_from_d(&poly, &e.c);
            if margin > 1e-8 {
                let failure = replay(k, seed, &poly, Some(&e.c), "convex element differs from d");
                return Ok(Trial { margin, failure: Some(failure), note });
            }
        }
        // a first hit at c = d would end the search, so look again away from it
        let away = SearchBudget {
            seed: derive_seed(seed, u64::MAX - 1),
            ..budget
        };
        if let Some(e) = convex_element_search_avoiding(&poly, &away, &tol, poly.d(), 1e-8)?.element {
            margin = margin.max(deviation_from_d(&poly, &e.c));
            let failure = replay(k, seed, &poly, Some(&e.c), "convex element away from d");
            return Ok(Trial { margin, failure: Some(failure), note });
        }
        Ok(Trial { margin, failure: None, note })
    });
    report
        .notes
        .push("worst_margin = max |c - d| / max s_i^2 over convex elements".into());
    let control = positive_control(6, 1, config);
    if control.found_off_corner == 0 && control.samples > 0 {
        report.failures += 1;
        report
            .notes
            .push("positive control: no (6,1) element away from c = d".into());
    }
    report.control = Some(control);
    report
}

/// Runs the search on `control_trials` polygons of class `(n, m)`.
pub fn positive_control(n: usize, m: usize, config: &VerifyConfig) -> ControlReport {
    let master = derive_seed(config.seed, 0xC0_4780_1000 + (10 * n + m) as u64);
    let results: Vec<Option<Option<f64>>> = (0..config.control_trials)
        .into_par_iter()
        .map(|k| {
            let seed = derive_seed(master, k as u64);
            let poly = sample_orbit_polygon(&OrbitSampler::new(n, m, seed)).ok()?;
            let budget = SearchBudget {
                seed: derive_seed(seed, 1),
                ..config.budget
            };
            let found = convex_element_search(&poly, &budget, &config.tol).ok()?;
            Some(found.map(|e| deviation_from_d(&poly, &e.c)))
        })
        .collect();
    let samples = results.iter().filter(|r| r.is_some()).count();
    let deviations: Vec<f64> = results.into_iter().flatten().flatten().collect();
    ControlReport {
        n,
        m,
        samples,
        found: deviations.len(),
        found_off_corner: deviations.iter().filter(|&&d| d > 1e-3).count(),
        max_deviation: deviations.iter().cloned().fold(0.0, f64::max),
    }
}
