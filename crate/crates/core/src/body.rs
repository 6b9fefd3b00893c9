//! Perturbed ellipsoids `K` and `L`.
//!
//! Both bodies agree with the base ellipsoid except on two caps: around `e₁`
//! (`I₁`, where `K` is bumped) or its antipode (`−I₁`, where `L` is bumped), and
//! around `eₙ` (`I₂`, where both are dented). The bump and dent are the cubic
//! profiles [`h1`] and [`h2`], which meet the identity to second order at the
//! cap boundary so the glued boundary function stays `C²`.

use alloc::vec::Vec;

use crate::ellipsoid::{EllipsoidSpec, Flavor, QuadraticSphereFunction, SphereFunction};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{Vector, MAX_DIM};

/// Fraction of [`max_delta`] used when no `δ` is given.
pub const DEFAULT_DELTA_FRACTION: f64 = 0.8;

/// Relative convexity residual (in units of `a₁`) a calibrated body must meet.
pub const CONVEXITY_TOL: f64 = 1e-7;

/// Smallest `ε` the calibration probe will try.
pub const EPSILON_FLOOR: f64 = 1e-12;

/// `min_{2≤i≤n} (a_{i−1} − aᵢ)/2`: the cap width below which `I₁`, `I₂` and their
/// antipodes stay separated.
pub fn max_delta(e: &EllipsoidSpec) -> f64 {
    e.semi_axes()
        .windows(2)
        .map(|w| (w[0] - w[1]) / 2.0)
        .fold(f64::INFINITY, f64::min)
}

/// `0.8 · max_delta`.
pub fn default_delta(e: &EllipsoidSpec) -> f64 {
    DEFAULT_DELTA_FRACTION * max_delta(e)
}

/// Starting point of the calibration probe, `0.1 / a₁²`.
pub fn default_epsilon_seed(e: &EllipsoidSpec) -> f64 {
    0.1 / (e.largest() * e.largest())
}

/// Cap width `δ` and bump size `ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationParams {
    delta: f64,
    epsilon: f64,
}

impl PerturbationParams {
    /// Requires `0 < δ < max_delta(e)` and a finite `ε ≥ 0`.
    pub fn new(e: &EllipsoidSpec, delta: f64, epsilon: f64) -> Result<Self> {
        let hi = max_delta(e);
        if !(delta > 0.0 && delta < hi) {
            return Err(Error::Domain {
                what: "delta",
                value: delta,
                lo: 0.0,
                hi,
            });
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::Domain {
                what: "epsilon",
                value: epsilon,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        Ok(Self { delta, epsilon })
    }

    #[inline]
    pub fn delta(&self) -> f64 {
        self.delta
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `εδ³`, the height of the bump at `e₁` and depth of the dent at `eₙ`.
    #[inline]
    pub fn bump_height(&self) -> f64 {
        self.epsilon * self.delta * self.delta * self.delta
    }
}

/// Which of the two bodies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Bumped on `I₁`.
    K,
    /// Bumped on `−I₁`.
    L,
}

/// Which cap a direction lies in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionId {
    I1,
    NegI1,
    I2,
    Outside,
}

/// `h₁(x) = x − ε(a₁ − x − δ)³` on `[a₁ − δ, a₁]`.
pub fn h1(x: f64, params: &PerturbationParams, a1: f64) -> Result<f64> {
    let lo = a1 - params.delta;
    if !(x >= lo && x <= a1) {
        return Err(Error::Domain {
            what: "h1 argument",
            value: x,
            lo,
            hi: a1,
        });
    }
    Ok(bump(x, params, a1))
}

/// `h₂(x) = x + ε(x − aₙ − δ)³` on `[aₙ, aₙ + δ]`.
pub fn h2(x: f64, params: &PerturbationParams, an: f64) -> Result<f64> {
    let hi = an + params.delta;
    if !(x >= an && x <= hi) {
        return Err(Error::Domain {
            what: "h2 argument",
            value: x,
            lo: an,
            hi,
        });
    }
    Ok(dent(x, params, an))
}

#[inline]
fn bump(x: f64, p: &PerturbationParams, a1: f64) -> f64 {
    let t = a1 - x - p.delta;
    x - p.epsilon * t * t * t
}

#[inline]
fn bump_slope(x: f64, p: &PerturbationParams, a1: f64) -> f64 {
    let t = a1 - x - p.delta;
    1.0 + 3.0 * p.epsilon * t * t
}

#[inline]
fn dent(x: f64, p: &PerturbationParams, an: f64) -> f64 {
    let t = x - an - p.delta;
    x + p.epsilon * t * t * t
}

#[inline]
fn dent_slope(x: f64, p: &PerturbationParams, an: f64) -> f64 {
    let t = x - an - p.delta;
    1.0 + 3.0 * p.epsilon * t * t
}

/// `h₁'(x) = 1 + 3ε(a₁ − x − δ)²`.
pub fn h1_slope(x: f64, params: &PerturbationParams, a1: f64) -> f64 {
    bump_slope(x, params, a1)
}

/// `h₂'(x) = 1 + 3ε(x − aₙ − δ)²`.
pub fn h2_slope(x: f64, params: &PerturbationParams, an: f64) -> f64 {
    dent_slope(x, params, an)
}

/// A perturbed ellipsoid, described by its radial or support function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Body {
    base: QuadraticSphereFunction,
    params: PerturbationParams,
    variant: Variant,
}

impl Body {
    pub fn new(
        ellipsoid: EllipsoidSpec,
        params: PerturbationParams,
        variant: Variant,
        flavor: Flavor,
    ) -> Self {
        Self {
            base: QuadraticSphereFunction::new(ellipsoid, flavor),
            params,
            variant,
        }
    }

    /// The pair `(K, L)` sharing base and parameters.
    pub fn pair(
        ellipsoid: EllipsoidSpec,
        params: PerturbationParams,
        flavor: Flavor,
    ) -> (Self, Self) {
        (
            Self::new(ellipsoid, params, Variant::K, flavor),
            Self::new(ellipsoid, params, Variant::L, flavor),
        )
    }

    #[inline]
    pub fn base(&self) -> &QuadraticSphereFunction {
        &self.base
    }

    #[inline]
    pub fn ellipsoid(&self) -> &EllipsoidSpec {
        self.base.ellipsoid()
    }

    #[inline]
    pub fn params(&self) -> &PerturbationParams {
        &self.params
    }

    #[inline]
    pub fn variant(&self) -> Variant {
        self.variant
    }

    #[inline]
    pub fn flavor(&self) -> Flavor {
        self.base.flavor()
    }

    /// Same body with a different `ε`.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        let params = PerturbationParams::new(self.ellipsoid(), self.params.delta, epsilon)?;
        Ok(Self { params, ..*self })
    }

    /// Region of `θ`, judged by the base function value (`ρ_E` or `h_E`).
    pub fn region_of(&self, theta: &Vector) -> RegionId {
        self.region_with_base(theta, self.base.value(theta))
    }

    #[inline]
    fn region_with_base(&self, theta: &Vector, base: f64) -> RegionId {
        let e = self.ellipsoid();
        let n = e.dim();
        let delta = self.params.delta;
        if e.largest() - base < delta {
            if theta[0] > 0.0 {
                return RegionId::I1;
            }
            if theta[0] < 0.0 {
                return RegionId::NegI1;
            }
        } else if base - e.smallest() < delta && theta[n - 1] > 0.0 {
            return RegionId::I2;
        }
        RegionId::Outside
    }

    /// Checked evaluation of `ρ_K`, `ρ_L` (or `h_K`, `h_L`).
    pub fn eval(&self, theta: &Vector) -> Result<f64> {
        if theta.dim() != self.dim() {
            return Err(Error::InvalidInput("dimension mismatch"));
        }
        if !theta.is_unit() {
            return Err(Error::InvalidInput(
                "direction must be a finite unit vector",
            ));
        }
        Ok(self.value(theta))
    }

    /// Base value, region, and boundary value together.
    #[inline]
    pub fn evaluate(&self, theta: &Vector) -> (f64, RegionId, f64) {
        let base = self.base.value(theta);
        let region = self.region_with_base(theta, base);
        let e = self.ellipsoid();
        let value = match (region, self.variant) {
            (RegionId::I1, Variant::K) | (RegionId::NegI1, Variant::L) => {
                bump(base, &self.params, e.largest())
            }
            (RegionId::I2, _) => dent(base, &self.params, e.smallest()),
            _ => base,
        };
        (base, region, value)
    }

    /// `d value / d base` at `θ`: the profile slope on perturbed caps, 1 elsewhere.
    fn profile_slope(&self, base: f64, region: RegionId) -> f64 {
        let e = self.ellipsoid();
        match (region, self.variant) {
            (RegionId::I1, Variant::K) | (RegionId::NegI1, Variant::L) => {
                bump_slope(base, &self.params, e.largest())
            }
            (RegionId::I2, _) => dent_slope(base, &self.params, e.smallest()),
            _ => 1.0,
        }
    }

    /// Outward unit normal of the radial-flavor boundary at `ρ(θ)θ`.
    ///
    /// With `s = ρ_E(θ)` and `G(x) = |x| − h(s(x̂))`, the gradient at the boundary
    /// point is proportional to `(1 − h'(s)) θ + h'(s) s² Qθ`, `Q = diag(aᵢ⁻²)`.
    pub fn outward_normal(&self, theta: &Vector) -> Vector {
        debug_assert_eq!(self.flavor(), Flavor::Radial);
        let (base, region, _) = self.evaluate(theta);
        let slope = self.profile_slope(base, region);
        let q_theta = self.base.form().apply(theta);
        let g = (*theta * (1.0 - slope)).axpy(slope * base * base, &q_theta);
        g * (1.0 / g.norm())
    }
}

impl SphereFunction for Body {
    #[inline]
    fn dim(&self) -> usize {
        self.base.dim()
    }

    #[inline]
    fn value(&self, theta: &Vector) -> f64 {
        self.evaluate(theta).2
    }

    fn scale(&self) -> f64 {
        self.ellipsoid().largest()
    }
}

/// Lattice points on `S^{n−1}` followed by the signed coordinate axes.
fn sphere_samples(n: usize, count: usize) -> Vec<Vector> {
    let mut pts: Vec<Vector> = Lattice::sphere(n, count).points().to_vec();
    for i in 0..n {
        pts.push(Vector::basis(n, i));
        pts.push(-Vector::basis(n, i));
    }
    pts
}

/// Sampled convexity residual, in length units. Non-positive up to rounding for a
/// convex body.
///
/// Radial flavor: for every boundary point `p` with outward normal `ν`, the largest
/// `⟨q − p, ν⟩` over all other boundary points `q` (how far the body pokes through
/// the tangent plane at `p`). Support flavor: the largest `H(u + v) − H(u) − H(v)`
/// over sample pairs, `H` the 1-homogeneous extension of the support function.
pub fn convexity_check(body: &Body, sample_count: usize) -> f64 {
    let n = body.dim();
    let dirs = sphere_samples(n, sample_count);
    match body.flavor() {
        Flavor::Radial => {
            let pts: Vec<Vector> = dirs.iter().map(|t| *t * body.value(t)).collect();
            let mut worst = f64::NEG_INFINITY;
            for (t, p) in dirs.iter().zip(&pts) {
                let nu = body.outward_normal(t);
                let support = p.dot(&nu);
                for q in &pts {
                    worst = worst.max(q.dot(&nu) - support);
                }
            }
            worst
        }
        Flavor::Support => {
            let vals: Vec<f64> = dirs.iter().map(|t| body.value(t)).collect();
            let mut worst = f64::NEG_INFINITY;
            for i in 0..dirs.len() {
                for j in (i + 1)..dirs.len() {
                    let w = dirs[i] + dirs[j];
                    let len = w.norm();
                    if len < 1e-6 {
                        continue;
                    }
                    let hw = len * body.value(&(w * (1.0 / len)));
                    worst = worst.max(hw - vals[i] - vals[j]);
                }
            }
            worst
        }
    }
}

/// Outcome of [`calibrate_epsilon`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    pub epsilon: f64,
    pub residual_k: f64,
    pub residual_l: f64,
    /// Number of halvings from the seed.
    pub halvings: u32,
}

/// Largest `ε ∈ {ε₀, ε₀/2, ε₀/4, …}` for which both `K` and `L` pass
/// [`convexity_check`] with residual `≤ CONVEXITY_TOL · a₁`.
///
/// The next halving below the returned value is probed too; a failure there means
/// the sampled certificate is not monotone in `ε` and is reported as a calibration
/// failure.
pub fn calibrate_epsilon(
    e: &EllipsoidSpec,
    delta: f64,
    seed: f64,
    flavor: Flavor,
    sample_count: usize,
) -> Result<Calibration> {
    let tol = CONVEXITY_TOL * e.largest();
    let check = |epsilon: f64| -> Result<(f64, f64)> {
        let params = PerturbationParams::new(e, delta, epsilon)?;
        let (k, l) = Body::pair(*e, params, flavor);
        let rk = convexity_check(&k, sample_count);
        let rl = convexity_check(&l, sample_count);
        Ok((rk, rl))
    };

    let mut epsilon = seed;
    let mut halvings = 0;
    let mut last = (f64::INFINITY, f64::INFINITY);
    while epsilon >= EPSILON_FLOOR {
        let (rk, rl) = check(epsilon)?;
        if rk <= tol && rl <= tol {
            let (ck, cl) = check(epsilon / 2.0)?;
            if ck > tol || cl > tol {
                return Err(Error::CalibrationFailed {
                    last_epsilon: epsilon / 2.0,
                    residual: ck.max(cl),
                });
            }
            return Ok(Calibration {
                epsilon,
                residual_k: rk,
                residual_l: rl,
                halvings,
            });
        }
        last = (rk, rl);
        epsilon /= 2.0;
        halvings += 1;
    }
    Err(Error::CalibrationFailed {
        last_epsilon: epsilon * 2.0,
        residual: last.0.max(last.1),
    })
}

/// Sampled `sup |K(θ) − L(θ)|` and `sup |K(−θ) − L(θ)|`.
///
/// The sample set includes the signed coordinate axes, where both suprema
/// (`εδ³`, at `e₁` and `eₙ`) are attained.
pub fn distinctness_check(k: &Body, l: &Body, sample_count: usize) -> (f64, f64) {
    let dirs = sphere_samples(k.dim(), sample_count);
    let mut d_id: f64 = 0.0;
    let mut d_neg: f64 = 0.0;
    for t in &dirs {
        let lv = l.value(t);
        d_id = d_id.max(libm::fabs(k.value(t) - lv));
        d_neg = d_neg.max(libm::fabs(k.value(&-*t) - lv));
    }
    (d_id, d_neg)
}

/// A unit vector in the `(eᵢ, eⱼ)` plane at angle `t` from `eᵢ`.
pub fn planar_direction(n: usize, i: usize, j: usize, t: f64) -> Vector {
    let mut c = [0.0; MAX_DIM];
    c[i] = libm::cos(t);
    c[j] = libm::sin(t);
    Vector::new(&c[..n]).expect("finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn e321() -> EllipsoidSpec {
        EllipsoidSpec::new(&[3.0, 2.0, 1.0]).unwrap()
    }

    fn params(eps: f64) -> PerturbationParams {
        PerturbationParams::new(&e321(), 0.4, eps).unwrap()
    }

    #[test]
    fn max_delta_examples() {
        assert_abs_diff_eq!(max_delta(&e321()), 0.5);
        assert_abs_diff_eq!(max_delta(&EllipsoidSpec::standard(4).unwrap()), 0.5);
        assert_abs_diff_eq!(
            max_delta(&EllipsoidSpec::new(&[3.0, 2.9, 1.0]).unwrap()),
            0.05,
            epsilon = 1e-15
        );
    }

    #[test]
    fn params_validate_delta() {
        assert!(PerturbationParams::new(&e321(), 0.5, 0.01).is_err());
        assert!(PerturbationParams::new(&e321(), 0.0, 0.01).is_err());
        assert!(PerturbationParams::new(&e321(), 0.4, -1.0).is_err());
        assert!(PerturbationParams::new(&e321(), 0.4, 0.0).is_ok());
    }

    #[test]
    fn region_examples() {
        let (k, _) = Body::pair(e321(), params(0.01), Flavor::Radial);
        assert_eq!(k.region_of(&Vector::basis(3, 0)), RegionId::I1);
        assert_eq!(k.region_of(&-Vector::basis(3, 0)), RegionId::NegI1);
        assert_eq!(k.region_of(&Vector::basis(3, 1)), RegionId::Outside);
        assert_eq!(k.region_of(&Vector::basis(3, 2)), RegionId::I2);
        assert_eq!(k.region_of(&-Vector::basis(3, 2)), RegionId::Outside);
    }

    #[test]
    fn profile_examples() {
        let p = params(0.01);
        assert_abs_diff_eq!(
            h1(3.0, &p, 3.0).unwrap(),
            3.0 + 0.01 * 0.064,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            h2(1.0, &p, 1.0).unwrap(),
            1.0 - 0.01 * 0.064,
            epsilon = 1e-15
        );
        assert_eq!(h1(2.6, &p, 3.0).unwrap(), 2.6);
        assert_eq!(h2(1.4, &p, 1.0).unwrap(), 1.4);
        assert!(h1(2.5, &p, 3.0).is_err());
        assert!(h2(1.5, &p, 1.0).is_err());
    }

    #[test]
    fn eval_examples() {
        let (k, l) = Body::pair(e321(), params(0.01), Flavor::Radial);
        let e1 = Vector::basis(3, 0);
        let e3 = Vector::basis(3, 2);
        assert_abs_diff_eq!(k.eval(&e1).unwrap(), 3.00064, epsilon = 1e-14);
        assert_abs_diff_eq!(l.eval(&e1).unwrap(), 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.eval(&e3).unwrap(), 0.99936, epsilon = 1e-14);
        assert_abs_diff_eq!(l.eval(&e3).unwrap(), 0.99936, epsilon = 1e-14);
        assert!(k.eval(&Vector::new(&[1.0, 1.0, 0.0]).unwrap()).is_err());
    }

    #[test]
    fn unperturbed_ellipsoid_is_convex() {
        let e = e321();
        for flavor in [Flavor::Radial, Flavor::Support] {
            let (k, _) = Body::pair(e, PerturbationParams::new(&e, 0.4, 0.0).unwrap(), flavor);
            let r = convexity_check(&k, 2000);
            assert!(r <= 1e-9 * e.largest(), "{flavor:?}: {r}");
        }
    }

    #[test]
    fn distinctness_examples() {
        let (k, l) = Body::pair(e321(), params(0.01), Flavor::Radial);
        let (d_id, d_neg) = distinctness_check(&k, &l, 1000);
        assert!((d_id - 6.4e-4).abs() <= 1e-6 * 6.4e-4);
        assert!((d_neg - 6.4e-4).abs() <= 1e-6 * 6.4e-4);
        let (k0, l0) = Body::pair(e321(), params(0.0), Flavor::Radial);
        assert_eq!(distinctness_check(&k0, &l0, 1000), (0.0, 0.0));
    }

    #[test]
    fn normal_of_ellipsoid_matches_gradient_of_form() {
        let e = e321();
        let (k, _) = Body::pair(
            e,
            PerturbationParams::new(&e, 0.4, 0.0).unwrap(),
            Flavor::Radial,
        );
        for t in Lattice::sphere(3, 200).points() {
            let p = *t * k.value(t);
            let mut g = [0.0; 3];
            for i in 0..3 {
                g[i] = p[i] / (e.axis(i) * e.axis(i));
            }
            let g = Vector::new(&g).unwrap().normalized().unwrap();
            assert!(k.outward_normal(t).max_abs_diff(&g) < 1e-13);
        }
    }
}
