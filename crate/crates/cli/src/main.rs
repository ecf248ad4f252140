//! `outer-eds` command-line front end.
//!
//! Exit codes: 0 success, 1 assertion failure, 2 input error, 3 singular orbit.

mod svg;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use outer_eds::billiard::{iterate, ConvexCurve, CurveFile, OrbitRecord};
use outer_eds::elements::{check_element, CurvatureProfile, ElementJson, IntegralElement};
use outer_eds::lab::{
    sample_orbit_polygon, search_paradoxical, verify, OrbitSampler, ParadoxBudget, TheoremId,
    VerifierReport, VerifyConfig,
};
use outer_eds::search::{convex_element_search, SearchBudget};
use outer_eds::seeds::{derive_seed, DEFAULT_SEED};
use outer_eds::{
    curvature_from_element, special_element_minus, special_element_plus, Error, OrbitPolygon,
    Tolerances, Vec2,
};
use serde::Serialize;

use svg::Plot;

#[derive(Parser)]
#[command(name = "outer-eds", version, about = "Outer billiards and integral elements of periodic orbits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Master seed [default: 0x5EED0B11A4D5].
    #[arg(long, global = true, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Trials (verify), samples (search-paradoxical) or polygon count (sample).
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    #[arg(long, global = true)]
    tol_variety: Option<f64>,
    #[arg(long, global = true)]
    tol_convex: Option<f64>,
    #[arg(long, global = true)]
    tol_period: Option<f64>,
    /// Write an SVG plot here.
    #[arg(long, global = true, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the outer billiard map of a convex curve.
    Orbit {
        /// Curve JSON: {"kind": "polygon"|"smooth", "points": [[x, y], ...]}.
        curve: PathBuf,
        /// Starting point `x,y` outside the curve.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        start: Vec2,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// Classify a vector c over an orbit polygon.
    #[command(group(ArgGroup::new("which").required(true).args(["c", "special_minus", "special_plus", "search"])))]
    Element {
        /// Polygon JSON: {"vertices": [[x, y], ...]}.
        polygon: PathBuf,
        /// Comma-separated entries c_0,…,c_{n−1}.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        c: Option<Vec<f64>>,
        /// Use c = −d.
        #[arg(long)]
        special_minus: bool,
        /// Use c = +d (even n).
        #[arg(long)]
        special_plus: bool,
        /// Search for a convex element (n = 3..6).
        #[arg(long)]
        search: bool,
    },
    /// Run a theorem verifier: n3, n4, n52, n62 or all.
    Verify {
        #[arg(default_value = "all")]
        theorem: String,
        /// Size of the positive-control run.
        #[arg(long, default_value_t = 100)]
        control_trials: usize,
    },
    /// Look for paradoxical (6,2) orbit polygons.
    SearchParadoxical {
        /// Candidates kept in the report.
        #[arg(long, default_value_t = 10)]
        keep: usize,
    },
    /// Draw random (n, m) orbit polygons.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
}

enum Failure {
    Assertion(String),
    Input(String),
    Singular(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Input(_) => 2,
            Failure::Singular(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Assertion(m) | Failure::Input(m) | Failure::Singular(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SingularOrbit { .. } | Error::SingularLine => Failure::Singular(e.to_string()),
            Error::ValidationFailed { .. } => Failure::Assertion(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => s.replace('_', "").parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn parse_point(s: &str) -> Result<Vec2, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [x, y] = parts.as_slice() else {
        return Err(format!("expected x,y, got {s:?}"));
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok(Vec2::new(num(x)?, num(y)?))
}

impl Common {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    fn tolerances(&self) -> Result<Tolerances, Failure> {
        let mut tol = Tolerances::default();
        for (field, value) in [
            (&mut tol.rank, self.tol_rank),
            (&mut tol.variety, self.tol_variety),
            (&mut tol.convex, self.tol_convex),
            (&mut tol.period, self.tol_period),
        ] {
            if let Some(v) = value {
                *field = v;
            }
        }
        if !tol.is_valid() {
            return Err(Failure::Input("tolerances must be positive and finite".into()));
        }
        Ok(tol)
    }

    /// Writes the report to `--json` or stdout.
    fn emit<T: Serialize>(&self, value: &T, summary: &str) -> Outcome {
        let text = serde_json::to_string_pretty(value).expect("report serializes");
        match &self.json {
            Some(path) => {
                write(path, &(text + "\n"))?;
                stdout_line(summary);
            }
            None => stdout_line(&text),
        }
        Ok(())
    }

    fn plot(&self, plot: impl FnOnce() -> Plot) -> Outcome {
        match &self.svg {
            Some(path) => write(path, &plot().render()),
            None => Ok(()),
        }
    }
}

/// Like `println!`, but a closed pipe (`| head`) is not an error.
fn stdout_line(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_polygon(path: &Path, tol: &Tolerances) -> Result<OrbitPolygon, Failure> {
    let file: outer_eds::geom::PolygonFile = read_json(path)?;
    Ok(OrbitPolygon::with_tolerances(file.vertices, tol)?)
}

fn cmd_orbit(common: &Common, curve: &Path, start: Vec2, steps: usize) -> Outcome {
    let tol = common.tolerances()?;
    let file: CurveFile = read_json(curve)?;
    let curve = ConvexCurve::from_file(file)?;
    let record: OrbitRecord = iterate(&curve, start, steps, &tol)?;
    common.plot(|| {
        let mut plot = Plot::new();
        plot.outline(curve.points());
        match record.period {
            Some(n) => plot.orbit(&record.points[..n], true),
            None => plot.orbit(&record.points, false),
        }
        plot
    })?;
    let summary = match record.period {
        Some(n) => format!("period {n}, closure residual {:e}", record.closure_residual),
        None => format!("no period within {steps} steps"),
    };
    common.emit(&record, &summary)
}

#[derive(Serialize)]
struct ElementReport {
    n: usize,
    winding: i64,
    /// `null` when a search found nothing.
    element: Option<ElementJson>,
    rank: Option<usize>,
    expected_rank: usize,
    singular_values: Option<Vec<f64>>,
    variety_residual: Option<f64>,
    is_special_minus: Option<bool>,
    is_special_plus: Option<bool>,
    curvature: Option<CurvatureProfile>,
}

fn cmd_element(common: &Common, path: &Path, c: Option<Vec<f64>>, minus: bool, plus: bool) -> Outcome {
    let tol = common.tolerances()?;
    let poly = read_polygon(path, &tol)?;
    let element: Option<IntegralElement> = if let Some(c) = c {
        Some(IntegralElement::classify(&poly, c, &tol)?)
    } else if minus {
        Some(special_element_minus(&poly, &tol)?)
    } else if plus {
        Some(special_element_plus(&poly, &tol)?)
    } else {
        let budget = SearchBudget {
            seed: common.seed(),
            ..SearchBudget::default()
        };
        convex_element_search(&poly, &budget, &tol)?
    };
    let mut report = ElementReport {
        n: poly.n(),
        winding: poly.winding(),
        element: None,
        rank: None,
        expected_rank: poly.n() - 2,
        singular_values: None,
        variety_residual: None,
        is_special_minus: None,
        is_special_plus: None,
        curvature: None,
    };
    let summary = match &element {
        Some(e) => {
            let check = check_element(&poly, &e.c, &tol)?;
            report.rank = Some(check.rank.rank);
            report.singular_values = Some(check.rank.singular_values.clone());
            report.variety_residual = check.variety_residual;
            report.is_special_minus = Some(e.is_special_minus);
            report.is_special_plus = Some(e.is_special_plus);
            if e.is_convex {
                report.curvature = Some(curvature_from_element(&poly, &e.c, &tol)?);
            }
            report.element = Some(e.to_json());
            format!("valid {}, convex {}", e.is_valid, e.is_convex)
        }
        None => "no convex element found".to_string(),
    };
    common.plot(|| {
        let mut plot = Plot::new();
        plot.orbit(poly.vertices(), true);
        plot
    })?;
    common.emit(&report, &summary)
}

fn cmd_verify(common: &Common, theorem: &str, control_trials: usize) -> Outcome {
    let tol = common.tolerances()?;
    let theorems: Vec<TheoremId> = if theorem == "all" {
        TheoremId::ALL.to_vec()
    } else {
        vec![theorem.parse::<TheoremId>()?]
    };
    let config = VerifyConfig {
        trials: common.trials.unwrap_or(1000),
        seed: common.seed(),
        control_trials,
        budget: SearchBudget::default(),
        tol,
    };
    let reports: Vec<VerifierReport> = theorems.iter().map(|&t| verify(t, &config)).collect();
    let failures: usize = reports.iter().map(|r| r.failures).sum();
    let summary = reports
        .iter()
        .map(|r| format!("{}: {} samples, {} failures", r.theorem, r.samples, r.failures))
        .collect::<Vec<_>>()
        .join("; ");
    if let [single] = reports.as_slice() {
        common.emit(single, &summary)?;
    } else {
        common.emit(&reports, &summary)?;
    }
    if failures > 0 {
        return Err(Failure::Assertion(format!("{failures} verifier failures")));
    }
    Ok(())
}

fn cmd_search_paradoxical(common: &Common, keep: usize) -> Outcome {
    let budget = ParadoxBudget {
        samples: common.trials.unwrap_or(ParadoxBudget::default().samples),
        keep,
        ..ParadoxBudget::default()
    };
    let report = search_paradoxical(&budget, common.seed());
    if let Some(best) = report.candidates.first() {
        let vertices = best.polygon.vertices.clone();
        common.plot(|| {
            let mut plot = Plot::new();
            plot.orbit(&vertices, true);
            plot
        })?;
    }
    let summary = format!(
        "{} sampled, {} paradoxical, best margin {}",
        report.sampled,
        report.paradoxical,
        report.best_margin.map_or("none".into(), |m| format!("{m:.4}"))
    );
    common.emit(&report, &summary)
}

fn cmd_sample(common: &Common, n: usize, m: usize) -> Outcome {
    let count = common.trials.unwrap_or(1);
    let seed = common.seed();
    let polygons = (0..count)
        .map(|k| {
            let s = if count == 1 { seed } else { derive_seed(seed, k as u64) };
            sample_orbit_polygon(&OrbitSampler::new(n, m, s)).map(|p| p.to_file())
        })
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(first) = polygons.first() {
        common.plot(|| {
            let mut plot = Plot::new();
            plot.orbit(&first.vertices, true);
            plot
        })?;
    }
    let summary = format!("{count} ({n},{m}) polygons");
    // a single polygon is written in the plain polygon schema so it can be fed back in
    match polygons.as_slice() {
        [single] => common.emit(single, &summary),
        _ => common.emit(&polygons, &summary),
    }
}

fn run(cli: Cli) -> Outcome {
    let common = &cli.common;
    match cli.command {
        Command::Orbit { curve, start, steps } => cmd_orbit(common, &curve, start, steps),
        Command::Element {
            polygon,
            c,
            special_minus,
            special_plus,
            search: _,
        } => cmd_element(common, &polygon, c, special_minus, special_plus),
        Command::Verify {
            theorem,
            control_trials,
        } => cmd_verify(common, &theorem, control_trials),
        Command::SearchParadoxical { keep } => cmd_search_paradoxical(common, keep),
        Command::Sample { n, m } => cmd_sample(common, n, m),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
