//! Property checks for the ellipsoid lemmas and the level-set relations of the bodies.

use congruent_core::{
    cone_membership_lower, cone_membership_upper, h1, h2, hyperplane_frame,
    reflection_preserves_section, subsphere_extrema, Body, EllipsoidSpec, IsometryMap, Lattice,
    QuadraticSphereFunction, RegionId, SphereFunction, Vector,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::harness::{sample_direction, Check, Failure};

/// Points within this distance of the level `τ` are not labelled.
pub const CONE_BOUNDARY_TOL: f64 = 1e-10;
pub const CONE_SCALES: [f64; 3] = [0.5, 2.0, 10.0];
pub const BRUTE_FORCE_SAMPLES: usize = 100_000;
pub const EXTREMUM_TOL: f64 = 1e-5;
pub const REFLECTION_TOL: f64 = 1e-10;
pub const LEVEL_SET_SYMMETRY_TOL: f64 = 1e-9;
pub const NEAR_EXTREMUM: f64 = 1e-6;
pub const CLUSTER_RADIUS: f64 = 0.05;
pub const LEVEL_SET_SAMPLES: usize = 100_000;
pub const LEVEL_VALUE_TOL: f64 = 1e-10;
pub const LEVEL_BASE_TOL: f64 = 1e-8;

const CONE_STREAM: u64 = 1 << 61;
const LEMMA_STREAM: u64 = 1 << 62;

#[derive(Clone, Copy)]
enum Cone {
    Upper,
    Lower,
}

/// Labelled cone samples: `(x, expected membership)`.
fn cone_samples(
    e: &EllipsoidSpec,
    cone: Cone,
    tau: f64,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(Vector, bool)> {
    let n = e.dim();
    let rho = QuadraticSphereFunction::radial(*e);
    let axis = match cone {
        Cone::Upper => 0,
        Cone::Lower => n - 1,
    };
    let box_coord = Uniform::new(-1.0, 1.0);
    let (mut inside, mut outside) = (Vec::new(), Vec::new());
    let mut proposal = 0usize;
    while (inside.len() < count || outside.len() < count) && proposal < 1000 * count {
        // alternate box proposals around the axis with uniform directions
        let mut c = vec![0.0; n];
        if proposal.is_multiple_of(2) {
            for (i, x) in c.iter_mut().enumerate() {
                *x = if i == axis {
                    1.0
                } else {
                    box_coord.sample(rng)
                };
            }
        } else {
            for x in c.iter_mut() {
                *x = StandardNormal.sample(rng);
            }
        }
        proposal += 1;
        let Ok(theta) = Vector::new(&c).and_then(|v| v.normalized()) else {
            continue;
        };
        let r = rho.value(&theta);
        if (r - tau).abs() <= CONE_BOUNDARY_TOL {
            continue;
        }
        let member = match cone {
            Cone::Upper => r >= tau && theta[axis] > 0.0,
            Cone::Lower => r <= tau && theta[axis] > 0.0,
        };
        let labelled_out = match cone {
            Cone::Upper => r < tau,
            Cone::Lower => r > tau,
        };
        if member && inside.len() < count {
            inside.push((theta * r, true));
        } else if labelled_out && outside.len() < count {
            outside.push((theta * r, false));
        }
    }
    inside.extend(outside);
    inside
}

/// Elliptic cone characterization of the upper and lower level sets at the midpoint levels.
pub fn cone_checks(e: &EllipsoidSpec, seed: u64, count: usize) -> Vec<Check> {
    let n = e.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(CONE_STREAM);
    let mut checks = Vec::new();
    for (cone, label) in [(Cone::Upper, "upper"), (Cone::Lower, "lower")] {
        let tau = match cone {
            Cone::Upper => 0.5 * (e.axis(0) + e.axis(1)),
            Cone::Lower => 0.5 * (e.axis(n - 2) + e.axis(n - 1)),
        };
        let member = |x: &Vector| match cone {
            Cone::Upper => cone_membership_upper(x, tau, e),
            Cone::Lower => cone_membership_lower(x, tau, e),
        };
        let samples = cone_samples(e, cone, tau, count, &mut rng);
        let inside = samples.iter().filter(|s| s.1).count();
        let mut wrong = 0usize;
        let mut scale_mismatch = 0usize;
        for (x, expected) in &samples {
            let got = member(x).unwrap_or(!*expected);
            if got != *expected {
                wrong += 1;
            }
            for lambda in CONE_SCALES {
                if member(&(*x * lambda)).unwrap_or(!got) != got {
                    scale_mismatch += 1;
                }
            }
        }
        checks.push(Check::at_most(
            format!("cone-{label}-misclassified"),
            wrong as f64,
            0.0,
            samples.len(),
        ));
        checks.push(Check::at_most(
            format!("cone-{label}-scale-mismatches"),
            scale_mismatch as f64,
            0.0,
            samples.len(),
        ));
        // both labels must be populated for the check to mean anything
        checks.push(Check::at_least(
            format!("cone-{label}-inside-samples"),
            inside as f64,
            count as f64,
            inside,
        ));
        checks.push(Check::at_least(
            format!("cone-{label}-outside-samples"),
            (samples.len() - inside) as f64,
            count as f64,
            samples.len() - inside,
        ));
    }
    checks
}

/// Coordinate pattern search for a local maximum of `f` on the unit sphere of the span of `basis`.
pub fn polish_max<F: Fn(&Vector) -> f64>(f: F, basis: &[Vector], start: Vector) -> (f64, Vector) {
    let mut x = start;
    let mut best = f(&x);
    let mut step = 0.05;
    while step > 1e-10 {
        let mut improved = false;
        for b in basis {
            for s in [step, -step] {
                let Ok(cand) = x.axpy(s, b).normalized() else {
                    continue;
                };
                let v = f(&cand);
                if v > best {
                    best = v;
                    x = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, x)
}

fn axis_angle(theta: &Vector, axis: &Vector) -> f64 {
    theta.dot(axis).abs().min(1.0).acos()
}

/// Per-direction outcome of the subsphere-extremum checks.
#[derive(Clone, Debug)]
struct ExtremumRecord {
    index: usize,
    xi: Vector,
    max_gap: f64,
    min_gap: f64,
    /// `None` when the clustering hypothesis does not apply.
    max_cluster: Option<f64>,
    min_cluster: Option<f64>,
    max_unique: bool,
    min_unique: bool,
    reflection: f64,
    level_symmetry: f64,
    error: Option<congruent_core::Error>,
}

fn extremum_record(
    f: &QuadraticSphereFunction,
    index: usize,
    xi: Vector,
    brute: &Lattice,
    reflection_samples: &Lattice,
) -> ExtremumRecord {
    let e = f.ellipsoid();
    let n = e.dim();
    let a1 = e.largest();
    let mut rec = ExtremumRecord {
        index,
        xi,
        max_gap: f64::NAN,
        min_gap: f64::NAN,
        max_cluster: None,
        min_cluster: None,
        max_unique: true,
        min_unique: true,
        reflection: f64::NAN,
        level_symmetry: f64::NAN,
        error: None,
    };
    let result = (|| -> congruent_core::Result<()> {
        let ex = subsphere_extrema(f, &xi)?;
        let frame = hyperplane_frame(&xi)?;
        let basis = frame.vectors().to_vec();

        let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
        let (mut arg_hi, mut arg_lo) = (xi, xi);
        let (mut spread_hi, mut spread_lo): (f64, f64) = (0.0, 0.0);
        for theta in brute.lifted(&frame) {
            let v = f.value(&theta);
            if v > hi {
                hi = v;
                arg_hi = theta;
            }
            if v < lo {
                lo = v;
                arg_lo = theta;
            }
            if v >= ex.tau_max - NEAR_EXTREMUM {
                spread_hi = spread_hi.max(axis_angle(&theta, &ex.eta_max));
            }
            if v <= ex.tau_min + NEAR_EXTREMUM {
                spread_lo = spread_lo.max(axis_angle(&theta, &ex.eta_min));
            }
        }
        let (hi, top) = polish_max(|t| f.value(t), &basis, arg_hi);
        let (neg_lo, bottom) = polish_max(|t| -f.value(t), &basis, arg_lo);
        rec.max_gap = (hi - ex.tau_max).abs() / a1;
        rec.min_gap = (-neg_lo - ex.tau_min).abs() / a1;

        if ex.tau_max > e.axis(1) + NEAR_EXTREMUM {
            rec.max_unique = ex.gap_max > 0.0;
            rec.max_cluster = Some(spread_hi.max(axis_angle(&top, &ex.eta_max)));
        }
        if ex.tau_min < e.axis(n - 2) - NEAR_EXTREMUM {
            rec.min_unique = ex.gap_min > 0.0;
            rec.min_cluster = Some(spread_lo.max(axis_angle(&bottom, &ex.eta_min)));
        }

        let r1 = IsometryMap::reflect_in_vector(xi, ex.eta_max)?;
        let r2 = IsometryMap::reflect_in_vector(xi, ex.eta_min)?;
        let d1 = reflection_preserves_section(f, &xi, &r1, reflection_samples)?;
        let d2 = reflection_preserves_section(f, &xi, &r2, reflection_samples)?;
        rec.reflection = d1.max(d2);
        // the same sup in absolute units is the level-set displacement
        rec.level_symmetry = rec.reflection * a1;
        Ok(())
    })();
    rec.error = result.err();
    rec
}

/// Directions for the extremum suite: seeded draws meeting `τ₁ > a₂` and `τ₂ < a_{n−1}`.
pub fn extremum_directions(f: &QuadraticSphereFunction, seed: u64, count: usize) -> Vec<Vector> {
    let e = f.ellipsoid();
    let n = e.dim();
    let mut out = Vec::with_capacity(count);
    let mut j = 0u64;
    while out.len() < count && j < 1000 * count as u64 {
        let xi = sample_direction(n, seed, LEMMA_STREAM | j);
        j += 1;
        if let Ok(ex) = subsphere_extrema(f, &xi) {
            if ex.tau_max > e.axis(1) && ex.tau_min < e.axis(n - 2) {
                out.push(xi);
            }
        }
    }
    out
}

/// Extremum, uniqueness and reflection-symmetry checks of the ellipsoid sections.
pub fn extremum_checks(
    e: &EllipsoidSpec,
    seed: u64,
    count: usize,
    reflection_samples: &Lattice,
    pool: &ThreadPool,
) -> (Vec<Check>, Vec<Failure>) {
    let f = QuadraticSphereFunction::radial(*e);
    let dirs = extremum_directions(&f, seed, count);
    let brute = Lattice::subsphere(e.dim(), BRUTE_FORCE_SAMPLES);
    let records: Vec<ExtremumRecord> = pool.install(|| {
        dirs.par_iter()
            .enumerate()
            .map(|(i, xi)| extremum_record(&f, i, *xi, &brute, reflection_samples))
            .collect()
    });

    let mut failures = Vec::new();
    let mut worst_gap: f64 = 0.0;
    let mut worst_cluster: f64 = 0.0;
    let mut clustered = 0usize;
    let mut non_unique = 0usize;
    let mut worst_reflection: f64 = 0.0;
    let mut worst_level: f64 = 0.0;
    for r in &records {
        if let Some(err) = r.error {
            failures.push(Failure::at(r.index, &r.xi, err.kind(), err.to_string()));
            continue;
        }
        let gap = r.max_gap.max(r.min_gap);
        worst_gap = worst_gap.max(gap);
        if !(gap <= EXTREMUM_TOL) {
            failures.push(Failure::at(
                r.index,
                &r.xi,
                "extremum-gap",
                format!("sampled extremum off by {gap:e}·a1"),
            ));
        }
        for c in [r.max_cluster, r.min_cluster].into_iter().flatten() {
            clustered += 1;
            worst_cluster = worst_cluster.max(c);
            if !(c <= CLUSTER_RADIUS) {
                failures.push(Failure::at(
                    r.index,
                    &r.xi,
                    "cluster",
                    format!("near-extremal sample at angle {c}"),
                ));
            }
        }
        if !r.max_unique || !r.min_unique {
            non_unique += 1;
            failures.push(Failure::at(
                r.index,
                &r.xi,
                "non-unique",
                "zero eigen-gap under the uniqueness hypothesis".into(),
            ));
        }
        worst_reflection = worst_reflection.max(r.reflection);
        worst_level = worst_level.max(r.level_symmetry);
        if !(r.reflection <= REFLECTION_TOL) {
            failures.push(Failure::at(
                r.index,
                &r.xi,
                "reflection",
                format!("reflection residual {:e}", r.reflection),
            ));
        }
    }
    let total = records.len();
    let checks = vec![
        Check::at_least(
            "extremum-directions".into(),
            total as f64,
            count as f64,
            total,
        ),
        Check::at_most(
            "extremum-vs-brute-force".into(),
            worst_gap,
            EXTREMUM_TOL,
            total,
        ),
        Check::at_most(
            "extremum-cluster-angle".into(),
            worst_cluster,
            CLUSTER_RADIUS,
            clustered,
        ),
        Check::at_most("extremum-non-unique".into(), non_unique as f64, 0.0, total),
        Check::at_most(
            "reflection-symmetry".into(),
            worst_reflection,
            REFLECTION_TOL,
            total,
        ),
        Check::at_most(
            "level-set-symmetry".into(),
            worst_level,
            LEVEL_SET_SYMMETRY_TOL,
            total,
        ),
    ];
    (checks, failures)
}

/// Inverse of an increasing function on `[lo, hi]` by bisection.
fn invert_increasing<F: Fn(f64) -> f64>(g: F, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Default)]
struct Tally {
    tested: usize,
    violations: usize,
}

/// The level sets of the bodies near the extreme values are the matching level sets of
/// the base function, restricted to the cap half-spaces.
///
/// Upper level sets are checked on `θ₁ > 0` for `K` and on `θ₁ < 0` for `L`, lower
/// level sets on `θₙ > 0` for both. Each tested point is also checked in the other
/// direction: a point of the cap satisfies the profile relation exactly.
pub fn level_set_checks(k: &Body, l: &Body, sample_count: usize) -> Vec<Check> {
    let e = k.ellipsoid();
    let n = e.dim();
    let (a1, an) = (e.largest(), e.smallest());
    let params = *k.params();
    let delta = params.delta();
    let up = |x: f64| h1(x, &params, a1).unwrap_or(f64::NAN);
    let down = |x: f64| h2(x, &params, an).unwrap_or(f64::NAN);
    let up_range = (a1 - delta, up(a1));
    let down_range = (down(an), an + delta);

    let samples = Lattice::sphere(n, sample_count);
    let mut upper_k = Tally::default();
    let mut upper_l = Tally::default();
    let mut lower = Tally::default();

    let upper = |body: &Body, theta: &Vector, cap: RegionId, tally: &mut Tally| {
        let v = body.value(theta);
        let base = body.base().value(theta);
        let in_level = v > up_range.0 && v <= up_range.1;
        let in_cap = body.region_of(theta) == cap;
        if in_level {
            tally.tested += 1;
            let tau = invert_increasing(up, v, a1 - delta, a1);
            if !((v - up(tau)).abs() <= LEVEL_VALUE_TOL
                && (base - tau).abs() <= LEVEL_BASE_TOL
                && in_cap)
            {
                tally.violations += 1;
            }
        } else if in_cap {
            tally.tested += 1;
            tally.violations += 1;
        }
    };
    for theta in samples.points() {
        if theta[0] > 0.0 {
            upper(k, theta, RegionId::I1, &mut upper_k);
        } else if theta[0] < 0.0 {
            upper(l, theta, RegionId::NegI1, &mut upper_l);
        }
        if theta[n - 1] > 0.0 {
            for body in [k, l] {
                let v = body.value(theta);
                let base = body.base().value(theta);
                let in_level = v >= down_range.0 && v < down_range.1;
                let in_cap = body.region_of(theta) == RegionId::I2;
                if in_level {
                    lower.tested += 1;
                    let tau = invert_increasing(down, v, an, an + delta);
                    if !((v - down(tau)).abs() <= LEVEL_VALUE_TOL
                        && (base - tau).abs() <= LEVEL_BASE_TOL
                        && in_cap)
                    {
                        lower.violations += 1;
                    }
                } else if in_cap {
                    lower.tested += 1;
                    lower.violations += 1;
                }
            }
        }
    }
    let mut checks = Vec::new();
    for (name, t) in [
        ("level-set-upper-K", upper_k),
        ("level-set-upper-L", upper_l),
        ("level-set-lower", lower),
    ] {
        checks.push(Check::at_most(
            name.into(),
            t.violations as f64,
            0.0,
            t.tested,
        ));
        checks.push(Check::at_least(
            format!("{name}-tested"),
            t.tested as f64,
            1.0,
            t.tested,
        ));
    }
    checks
}

/// `f(−θ) = f(θ)` bit for bit.
pub fn evenness_check(e: &EllipsoidSpec, sample_count: usize) -> Check {
    let samples = Lattice::sphere(e.dim(), sample_count);
    let mut mismatches = 0usize;
    for f in [
        QuadraticSphereFunction::radial(*e),
        QuadraticSphereFunction::support(*e),
    ] {
        for theta in samples.points() {
            if f.value(&-*theta) != f.value(theta) {
                mismatches += 1;
            }
        }
    }
    Check::at_most("evenness".into(), mismatches as f64, 0.0, 2 * samples.len())
}
