//! End-to-end acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use congruent::config::{Param, RunConfig, Suite};
use congruent::harness::{self, build_pool, Check, Resolved, SuiteReport};
use congruent::sample_sphere;
use congruent_core::{
    blind_congruence_search, certify, Body, Flavor, Group, Lattice, SphereFunction, Vector,
};

const SEED: u64 = 20240607;
const DIRECTIONS: usize = 1000;
const SUBSPHERE_SAMPLES: usize = 10_000;
const TIME_BUDGET_S: f64 = 60.0;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Self {
            pass: true,
            detail: String::new(),
        }
    }

    fn note(&mut self, ok: bool, text: String) {
        self.pass &= ok;
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(&text);
    }
}

fn config(n: usize, suites: &[Suite]) -> RunConfig {
    RunConfig {
        n,
        semi_axes: (1..=n).rev().map(|a| a as f64).collect(),
        delta: Param::Auto,
        epsilon: Param::Auto,
        directions: DIRECTIONS,
        subsphere_samples: SUBSPHERE_SAMPLES,
        seed: SEED,
        suites: suites.to_vec(),
    }
}

struct Dimension {
    n: usize,
    resolved: Resolved,
    calibration_s: f64,
}

fn run_suite(d: &Dimension, suite: Suite, pool: &rayon::ThreadPool) -> SuiteReport {
    let cfg = config(d.n, &[suite]);
    harness::run_resolved(&cfg, &d.resolved, pool)
        .suites
        .remove(0)
}

fn failed_checks(checks: &[&Check]) -> String {
    checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{}={:e}", c.name, c.value))
        .collect::<Vec<_>>()
        .join(",")
}

fn congruence_criterion(dims: &[Dimension], suite: Suite, pool: &rayon::ThreadPool) -> Outcome {
    let mut out = Outcome::new();
    for d in dims {
        if suite == Suite::SectionsSO && d.n < 4 {
            continue;
        }
        let start = Instant::now();
        let r = run_suite(d, suite, pool);
        let secs = d.calibration_s + start.elapsed().as_secs_f64();
        let det_ok = suite != Suite::SectionsSO
            || r.directions
                .iter()
                .all(|rec| rec.outcome.as_ref().is_ok_and(|c| c.det == 1));
        let counts = r.case_counts.unwrap_or_default();
        let ok = r.pass && det_ok && secs <= TIME_BUDGET_S && counts.total() == DIRECTIONS;
        out.note(
            ok,
            format!(
                "n={} max {:.1e} cases {}/{}/{} {:.1}s{}",
                d.n,
                r.max_residual.unwrap_or(f64::NAN),
                counts.avoids_i1,
                counts.hits_i1_only,
                counts.hits_both,
                secs,
                if det_ok { "" } else { " det!=+1" }
            ),
        );
    }
    if suite == Suite::SectionsSO {
        let three = dims.iter().find(|d| d.n == 3).expect("n = 3 configured");
        let r = run_suite(three, suite, pool);
        let refused = !r.pass && r.failures.iter().any(|f| f.kind == "unsupported-dimension");
        out.note(
            refused,
            format!(
                "n=3 {}",
                if refused {
                    "unsupported-dimension"
                } else {
                    "not refused"
                }
            ),
        );
    }
    out
}

fn checks_criterion(
    reports: &[(usize, SuiteReport)],
    select: impl Fn(&Check) -> bool,
    failures: bool,
) -> Outcome {
    let mut out = Outcome::new();
    for (n, r) in reports {
        let chosen: Vec<&Check> = r.checks.iter().filter(|c| select(c)).collect();
        let mut ok = !chosen.is_empty() && chosen.iter().all(|c| c.pass);
        let mut text = format!("n={n} {} checks", chosen.len());
        if failures {
            ok &= r.failures.is_empty();
            text.push_str(&format!(", {} failures", r.failures.len()));
        }
        if !ok {
            text.push_str(&format!(" [{}]", failed_checks(&chosen)));
        }
        out.note(ok, text);
    }
    out
}

/// `L` with an extra bump near `+e₂` that no frame-aligned map can produce from `K`.
struct Dented<'a> {
    inner: &'a Body,
}

impl SphereFunction for Dented<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, theta: &Vector) -> f64 {
        let a1 = self.inner.ellipsoid().largest();
        let c = theta[1];
        let extra = if c > 0.8 {
            0.03 * a1 * ((c - 0.8) / 0.2).powi(2)
        } else {
            0.0
        };
        self.inner.value(theta) + extra
    }

    fn scale(&self) -> f64 {
        self.inner.ellipsoid().largest()
    }
}

fn blind_criterion(dims: &[Dimension]) -> Outcome {
    let mut out = Outcome::new();
    for d in dims {
        let samples = Lattice::subsphere(d.n, SUBSPHERE_SAMPLES);
        let mut worst_blind: f64 = 0.0;
        let mut worst_excess = f64::NEG_INFINITY;
        let mut ok = true;
        for flavor in [Flavor::Radial, Flavor::Support] {
            let (k, l) = d.resolved.pair(flavor);
            for xi in sample_sphere(d.n, 100, SEED ^ 0x9e37) {
                let built = certify(&k, &l, &xi, Group::Orthogonal, &samples);
                let blind = blind_congruence_search(k.base(), &k, &l, &xi, &samples);
                match (built, blind) {
                    (Ok(c), Ok(b)) => {
                        worst_blind = worst_blind.max(b.residual);
                        worst_excess = worst_excess.max(b.residual - c.residual);
                        ok &= b.residual <= 1e-6 && b.residual <= c.residual + 1e-9;
                    }
                    _ => ok = false,
                }
            }
        }
        out.note(
            ok,
            format!(
                "n={} blind max {:.1e} excess {:.1e}",
                d.n, worst_blind, worst_excess
            ),
        );
    }
    let three = dims.iter().find(|d| d.n == 3).expect("n = 3 configured");
    let (k, l) = three.resolved.pair(Flavor::Radial);
    let dented = Dented { inner: &l };
    let samples = Lattice::subsphere(3, SUBSPHERE_SAMPLES);
    let xi = Vector::basis(3, 2);
    match blind_congruence_search(k.base(), &k, &dented, &xi, &samples) {
        Ok(b) => out.note(b.residual > 1e-4, format!("dented {:.2e}", b.residual)),
        Err(e) => out.note(false, format!("dented error {e}")),
    }
    out
}

fn determinism_criterion() -> Outcome {
    let mut out = Outcome::new();
    let dir = tempfile::tempdir().expect("temp dir");
    let mut cfg = config(4, &Suite::ALL);
    cfg.directions = 200;
    cfg.subsphere_samples = 2000;
    let cfg_path = dir.path().join("config.json");
    std::fs::write(&cfg_path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    let mut outputs = Vec::new();
    for jobs in [1, 4] {
        let report = dir.path().join(format!("report-{jobs}.json"));
        let csv = dir.path().join(format!("residuals-{jobs}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_congruent"))
            .args(["verify", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(&report)
            .arg("--csv")
            .arg(&csv)
            .args(["--jobs", &jobs.to_string()])
            .output()
            .expect("run cli");
        out.note(
            status.status.code() == Some(0),
            format!("jobs={jobs} exit {:?}", status.status.code()),
        );
        outputs.push((
            std::fs::read(&report).unwrap_or_default(),
            std::fs::read(&csv).unwrap_or_default(),
        ));
    }
    let same = outputs[0] == outputs[1] && !outputs[0].0.is_empty();
    out.note(
        same,
        format!(
            "{} report bytes {}",
            outputs[0].0.len(),
            if same { "identical" } else { "differ" }
        ),
    );
    out
}

fn main() -> ExitCode {
    let pool = build_pool(1).expect("pool");
    let mut dims = Vec::new();
    for n in [3, 4, 5] {
        let start = Instant::now();
        let resolved =
            harness::resolve(&config(n, &[Suite::SectionsO])).expect("parameters resolve");
        dims.push(Dimension {
            n,
            resolved,
            calibration_s: start.elapsed().as_secs_f64(),
        });
    }

    let mut results: Vec<(&str, Outcome)> = Vec::new();
    results.push((
        "sections, orthogonal maps",
        congruence_criterion(&dims, Suite::SectionsO, &pool),
    ));
    results.push((
        "projections, orthogonal maps",
        congruence_criterion(&dims, Suite::ProjectionsO, &pool),
    ));
    results.push((
        "sections, rotations",
        congruence_criterion(&dims, Suite::SectionsSO, &pool),
    ));

    let distinct: Vec<(usize, SuiteReport)> = dims
        .iter()
        .map(|d| (d.n, run_suite(d, Suite::Distinctness, &pool)))
        .collect();
    results.push(("distinctness", checks_criterion(&distinct, |_| true, true)));

    let lemmas: Vec<(usize, SuiteReport)> = dims
        .iter()
        .map(|d| (d.n, run_suite(d, Suite::Lemmas, &pool)))
        .collect();
    results.push((
        "elliptic cones",
        checks_criterion(&lemmas, |c| c.name.starts_with("cone-"), false),
    ));
    results.push((
        "section extrema and symmetry",
        checks_criterion(
            &lemmas,
            |c| {
                c.name.starts_with("extremum-")
                    || c.name == "reflection-symmetry"
                    || c.name == "level-set-symmetry"
                    || c.name == "evenness"
            },
            true,
        ),
    ));
    results.push((
        "level-set relations",
        checks_criterion(
            &lemmas,
            |c| c.name.starts_with("level-set-upper") || c.name.starts_with("level-set-lower"),
            false,
        ),
    ));

    let convex: Vec<(usize, SuiteReport)> = dims
        .iter()
        .map(|d| (d.n, run_suite(d, Suite::Convexity, &pool)))
        .collect();
    results.push(("convexity", checks_criterion(&convex, |_| true, true)));
    results.push(("blind oracle agreement", blind_criterion(&dims)));
    results.push(("determinism across worker counts", determinism_criterion()));

    let mut all = true;
    for (i, (name, o)) in results.iter().enumerate() {
        all &= o.pass;
        println!(
            "criterion {:>2} {:<32} {}  {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
