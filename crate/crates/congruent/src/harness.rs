//! Certification runs: sample directions, run the suites, aggregate a report.

use std::time::{Duration, Instant};

use congruent_core::{
    calibrate_epsilon, certify, convexity_check, default_delta, default_epsilon_seed,
    distinctness_check, max_delta, Body, CaseClass, CongruenceCertificate, EllipsoidSpec, Flavor,
    Group, Lattice, PerturbationParams, Vector,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::Serialize;

use crate::config::{ConfigError, Param, RunConfig, Suite};
use crate::lemmas;

pub const CONGRUENCE_TOL: f64 = 1e-9;
pub const CALIBRATION_SAMPLES: usize = 2000;
pub const CONVEXITY_SAMPLES: usize = 2000;
pub const DISTINCTNESS_SAMPLES: usize = 10_000;
pub const DISTINCTNESS_REL_TOL: f64 = 1e-6;
pub const NEGATIVE_CONTROL_EPSILON: f64 = 10.0;
pub const CONE_SAMPLES: usize = 10_000;

pub const HISTOGRAM_BINS: usize = 32;
pub const HISTOGRAM_LO: f64 = 1e-18;
pub const HISTOGRAM_HI: f64 = 1e-2;

/// The `index`-th direction of the stream keyed by `seed`: a normalized standard
/// normal vector, redrawn if its norm falls below `1e-8`.
pub fn sample_direction(n: usize, seed: u64, index: u64) -> Vector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let c: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm >= 1e-8 {
            let c: Vec<f64> = c.iter().map(|x| x / norm).collect();
            return Vector::new(&c).expect("finite");
        }
    }
}

pub fn sample_sphere(n: usize, count: usize, seed: u64) -> Vec<Vector> {
    (0..count as u64)
        .map(|j| sample_direction(n, seed, j))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `"<="`, `">="` or `">"`.
    pub relation: &'static str,
    pub bound: f64,
    pub samples: usize,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: String, value: f64, bound: f64, samples: usize) -> Self {
        Self {
            name,
            value,
            relation: "<=",
            bound,
            samples,
            pass: value <= bound,
        }
    }

    pub fn at_least(name: String, value: f64, bound: f64, samples: usize) -> Self {
        Self {
            name,
            value,
            relation: ">=",
            bound,
            samples,
            pass: value >= bound,
        }
    }

    pub fn above(name: String, value: f64, bound: f64, samples: usize) -> Self {
        Self {
            name,
            value,
            relation: ">",
            bound,
            samples,
            pass: value > bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub xi_index: Option<usize>,
    pub xi: Option<Vec<f64>>,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn at(index: usize, xi: &Vector, kind: &str, message: String) -> Self {
        Self {
            xi_index: Some(index),
            xi: Some(xi.as_slice().to_vec()),
            kind: kind.into(),
            message,
        }
    }

    pub fn global(kind: &str, message: String) -> Self {
        Self {
            xi_index: None,
            xi: None,
            kind: kind.into(),
            message,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    /// Residuals below `lo`, including exact zeros.
    pub underflow: u64,
    pub counts: Vec<u64>,
    /// Residuals at or above `hi`, and NaN.
    pub overflow: u64,
}

impl Default for Histogram {
    fn default() -> Self {
        Self {
            lo: HISTOGRAM_LO,
            hi: HISTOGRAM_HI,
            underflow: 0,
            counts: vec![0; HISTOGRAM_BINS],
            overflow: 0,
        }
    }
}

impl Histogram {
    pub fn add(&mut self, r: f64) {
        if r < self.lo {
            self.underflow += 1;
        } else if r >= self.hi || r.is_nan() {
            self.overflow += 1;
        } else {
            let span = self.hi.log10() - self.lo.log10();
            let t = (r.log10() - self.lo.log10()) / span;
            let bin = ((t * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
            self.counts[bin] += 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.underflow + self.overflow + self.counts.iter().sum::<u64>()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CaseCounts {
    pub avoids_i1: usize,
    pub hits_i1_only: usize,
    pub hits_both: usize,
    /// Directions whose certification raised an error.
    pub failed: usize,
}

impl CaseCounts {
    fn add(&mut self, case: Option<CaseClass>) {
        match case {
            Some(CaseClass::AvoidsI1) => self.avoids_i1 += 1,
            Some(CaseClass::HitsI1Only) => self.hits_i1_only += 1,
            Some(CaseClass::HitsBoth) => self.hits_both += 1,
            None => self.failed += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.avoids_i1 + self.hits_i1_only + self.hits_both + self.failed
    }
}

/// Outcome for one sampled direction of a directional suite.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionRecord {
    pub xi_index: usize,
    pub xi: Vector,
    pub outcome: Result<CongruenceCertificate, congruent_core::Error>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Worst {
    pub xi_index: usize,
    pub xi: Vec<f64>,
    pub case: &'static str,
    pub map: &'static str,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub pass: bool,
    pub tolerance: Option<f64>,
    pub max_residual: Option<f64>,
    pub histogram: Option<Histogram>,
    pub case_counts: Option<CaseCounts>,
    pub borderline: Option<usize>,
    pub worst: Option<Worst>,
    pub checks: Vec<Check>,
    pub failures: Vec<Failure>,
    #[serde(skip)]
    pub directions: Vec<DirectionRecord>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        Self {
            suite,
            pass: false,
            tolerance: None,
            max_residual: None,
            histogram: None,
            case_counts: None,
            borderline: None,
            worst: None,
            checks: Vec::new(),
            failures: Vec::new(),
            directions: Vec::new(),
            wall_time: Duration::ZERO,
        }
    }

    fn from_checks(
        suite: Suite,
        tolerance: Option<f64>,
        checks: Vec<Check>,
        failures: Vec<Failure>,
    ) -> Self {
        let mut r = Self::new(suite);
        r.pass = failures.is_empty() && checks.iter().all(|c| c.pass);
        r.tolerance = tolerance;
        r.checks = checks;
        r.failures = failures;
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlavorCalibration {
    pub epsilon: f64,
    pub residual_k: f64,
    pub residual_l: f64,
    pub halvings: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationRecord {
    pub seed: f64,
    pub sample_count: usize,
    pub radial: FlavorCalibration,
    pub support: FlavorCalibration,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Parameters {
    pub n: usize,
    pub semi_axes: Vec<f64>,
    pub max_delta: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub bump_height: f64,
    pub calibration: Option<CalibrationRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub parameters: Parameters,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Core(#[from] congruent_core::Error),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// Geometry and perturbation parameters after resolving `"auto"` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub ellipsoid: EllipsoidSpec,
    pub params: PerturbationParams,
    pub calibration: Option<CalibrationRecord>,
}

impl Resolved {
    pub fn pair(&self, flavor: Flavor) -> (Body, Body) {
        Body::pair(self.ellipsoid, self.params, flavor)
    }

    pub fn parameters(&self) -> Parameters {
        let e = &self.ellipsoid;
        Parameters {
            n: e.dim(),
            semi_axes: e.semi_axes().to_vec(),
            max_delta: max_delta(e),
            delta: self.params.delta(),
            epsilon: self.params.epsilon(),
            bump_height: self.params.bump_height(),
            calibration: self.calibration.clone(),
        }
    }
}

fn flavor_calibration(c: congruent_core::Calibration) -> FlavorCalibration {
    FlavorCalibration {
        epsilon: c.epsilon,
        residual_k: c.residual_k,
        residual_l: c.residual_l,
        halvings: c.halvings,
    }
}

/// Resolves `δ` (default fraction of `max_delta`) and `ε` (calibrated for both flavors,
/// the smaller of the two).
pub fn resolve(config: &RunConfig) -> Result<Resolved, HarnessError> {
    config.validate()?;
    let e = config.ellipsoid()?;
    let delta = match config.delta {
        Param::Auto => default_delta(&e),
        Param::Value(d) => d,
    };
    let (epsilon, calibration) = match config.epsilon {
        Param::Value(eps) => (eps, None),
        Param::Auto => {
            let seed = default_epsilon_seed(&e);
            let radial = calibrate_epsilon(&e, delta, seed, Flavor::Radial, CALIBRATION_SAMPLES)?;
            let support = calibrate_epsilon(&e, delta, seed, Flavor::Support, CALIBRATION_SAMPLES)?;
            let record = CalibrationRecord {
                seed,
                sample_count: CALIBRATION_SAMPLES,
                radial: flavor_calibration(radial),
                support: flavor_calibration(support),
            };
            (radial.epsilon.min(support.epsilon), Some(record))
        }
    };
    let params = PerturbationParams::new(&e, delta, epsilon)?;
    Ok(Resolved {
        ellipsoid: e,
        params,
        calibration,
    })
}

pub fn build_pool(jobs: usize) -> Result<ThreadPool, HarnessError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))
}

/// One certificate per direction, in direction order regardless of scheduling.
fn certify_all(
    k: &Body,
    l: &Body,
    group: Group,
    directions: &[Vector],
    samples: &Lattice,
    pool: &ThreadPool,
) -> Vec<DirectionRecord> {
    pool.install(|| {
        directions
            .par_iter()
            .enumerate()
            .map(|(i, xi)| DirectionRecord {
                xi_index: i,
                xi: *xi,
                outcome: certify(k, l, xi, group, samples),
            })
            .collect()
    })
}

fn directional_report(suite: Suite, records: Vec<DirectionRecord>, group: Group) -> SuiteReport {
    let mut r = SuiteReport::new(suite);
    r.tolerance = Some(CONGRUENCE_TOL);
    let mut hist = Histogram::default();
    let mut counts = CaseCounts::default();
    let mut borderline = 0usize;
    let mut max_residual: f64 = 0.0;
    for rec in &records {
        match &rec.outcome {
            Ok(cert) => {
                counts.add(Some(cert.case));
                hist.add(cert.residual);
                if cert.borderline {
                    borderline += 1;
                }
                let worse = r
                    .worst
                    .as_ref()
                    .is_none_or(|w| !(cert.residual <= w.residual));
                if worse {
                    r.worst = Some(Worst {
                        xi_index: rec.xi_index,
                        xi: rec.xi.as_slice().to_vec(),
                        case: cert.case.name(),
                        map: cert.map.kind().name(),
                        residual: cert.residual,
                    });
                }
                if !(cert.residual <= max_residual) {
                    max_residual = cert.residual;
                }
                if !(cert.residual <= CONGRUENCE_TOL) {
                    r.failures.push(Failure::at(
                        rec.xi_index,
                        &rec.xi,
                        "residual",
                        format!("residual {:e} exceeds {CONGRUENCE_TOL:e}", cert.residual),
                    ));
                }
                if group == Group::Special && cert.det != 1 {
                    r.failures.push(Failure::at(
                        rec.xi_index,
                        &rec.xi,
                        "determinant",
                        format!("map has determinant {}", cert.det),
                    ));
                }
            }
            Err(e) => {
                counts.add(None);
                r.failures
                    .push(Failure::at(rec.xi_index, &rec.xi, e.kind(), e.to_string()));
            }
        }
    }
    r.pass = r.failures.is_empty();
    r.max_residual = Some(max_residual);
    r.histogram = Some(hist);
    r.case_counts = Some(counts);
    r.borderline = Some(borderline);
    r.directions = records;
    r
}

fn distinctness_report(resolved: &Resolved) -> SuiteReport {
    let bump = resolved.params.bump_height();
    let mut checks = Vec::new();
    for flavor in [Flavor::Radial, Flavor::Support] {
        let (k, l) = resolved.pair(flavor);
        let (d_id, d_neg) = distinctness_check(&k, &l, DISTINCTNESS_SAMPLES);
        let f = flavor.name();
        let samples = DISTINCTNESS_SAMPLES;
        checks.push(Check::at_most(
            format!("{f}-d_id-relative-error"),
            rel_err(d_id, bump),
            DISTINCTNESS_REL_TOL,
            samples,
        ));
        checks.push(Check::at_most(
            format!("{f}-d_neg-relative-error"),
            rel_err(d_neg, bump),
            DISTINCTNESS_REL_TOL,
            samples,
        ));
        checks.push(Check::above(format!("{f}-d_id"), d_id, 0.5 * bump, samples));
        checks.push(Check::above(
            format!("{f}-d_neg"),
            d_neg,
            0.5 * bump,
            samples,
        ));
    }
    SuiteReport::from_checks(
        Suite::Distinctness,
        Some(DISTINCTNESS_REL_TOL),
        checks,
        Vec::new(),
    )
}

fn rel_err(value: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        if value == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (value - reference).abs() / reference
    }
}

fn convexity_report(resolved: &Resolved, pool: &ThreadPool) -> SuiteReport {
    let e = &resolved.ellipsoid;
    let tol = congruent_core::body::CONVEXITY_TOL * e.largest();
    let mut jobs: Vec<(String, Body, bool)> = Vec::new();
    for flavor in [Flavor::Radial, Flavor::Support] {
        let (k, l) = resolved.pair(flavor);
        let f = flavor.name();
        for (label, body) in [("K", k), ("L", l)] {
            let wild = body
                .with_epsilon(NEGATIVE_CONTROL_EPSILON)
                .expect("valid epsilon");
            jobs.push((format!("{label}-{f}"), body, false));
            jobs.push((format!("{label}-{f}-negative-control"), wild, true));
        }
    }
    let residuals: Vec<f64> = pool.install(|| {
        jobs.par_iter()
            .map(|(_, b, _)| convexity_check(b, CONVEXITY_SAMPLES))
            .collect()
    });
    let mut checks = Vec::new();
    let mut max_residual = f64::NEG_INFINITY;
    for ((name, _, control), res) in jobs.into_iter().zip(residuals) {
        if control {
            checks.push(Check::above(name, res, tol, CONVEXITY_SAMPLES));
        } else {
            max_residual = max_residual.max(res);
            checks.push(Check::at_most(name, res, tol, CONVEXITY_SAMPLES));
        }
    }
    let mut r = SuiteReport::from_checks(Suite::Convexity, Some(tol), checks, Vec::new());
    r.max_residual = Some(max_residual);
    r
}

fn lemma_report(config: &RunConfig, resolved: &Resolved, pool: &ThreadPool) -> SuiteReport {
    let e = &resolved.ellipsoid;
    let mut checks = lemmas::cone_checks(e, config.seed, CONE_SAMPLES);
    let reflection_samples = Lattice::subsphere(e.dim(), config.subsphere_samples);
    let (extremum, failures) =
        lemmas::extremum_checks(e, config.seed, config.directions, &reflection_samples, pool);
    checks.extend(extremum);
    let (k, l) = resolved.pair(Flavor::Radial);
    checks.extend(lemmas::level_set_checks(&k, &l, lemmas::LEVEL_SET_SAMPLES));
    checks.push(lemmas::evenness_check(e, lemmas::LEVEL_SET_SAMPLES));
    SuiteReport::from_checks(Suite::Lemmas, None, checks, failures)
}

/// Runs every configured suite with `jobs` workers. The report does not depend on `jobs`.
pub fn run(config: &RunConfig, jobs: usize) -> Result<RunReport, HarnessError> {
    let resolved = resolve(config)?;
    let pool = build_pool(jobs)?;
    Ok(run_resolved(config, &resolved, &pool))
}

pub fn run_resolved(config: &RunConfig, resolved: &Resolved, pool: &ThreadPool) -> RunReport {
    let n = resolved.ellipsoid.dim();
    let directions = sample_sphere(n, config.directions, config.seed);
    let samples = Lattice::subsphere(n, config.subsphere_samples);
    let mut suites = Vec::new();
    for &suite in &config.suites {
        let start = Instant::now();
        let mut report = match suite {
            Suite::SectionsO | Suite::ProjectionsO | Suite::SectionsSO => {
                let flavor = if suite == Suite::ProjectionsO {
                    Flavor::Support
                } else {
                    Flavor::Radial
                };
                let group = if suite == Suite::SectionsSO {
                    Group::Special
                } else {
                    Group::Orthogonal
                };
                if group == Group::Special && n < 4 {
                    let mut r = SuiteReport::new(suite);
                    r.tolerance = Some(CONGRUENCE_TOL);
                    r.failures.push(Failure::global(
                        "unsupported-dimension",
                        format!("rotation congruence requires n >= 4, got n = {n}"),
                    ));
                    r
                } else {
                    let (k, l) = resolved.pair(flavor);
                    directional_report(
                        suite,
                        certify_all(&k, &l, group, &directions, &samples, pool),
                        group,
                    )
                }
            }
            Suite::Lemmas => lemma_report(config, resolved, pool),
            Suite::Distinctness => distinctness_report(resolved),
            Suite::Convexity => convexity_report(resolved, pool),
        };
        report.wall_time = start.elapsed();
        suites.push(report);
    }
    RunReport {
        config: config.clone(),
        parameters: resolved.parameters(),
        pass: suites.iter().all(|s| s.pass),
        suites,
    }
}
