//! The base ellipsoid `E = {x : Σ xᵢ²/aᵢ² ≤ 1}` and its boundary functions.
//!
//! Both the radial function `ρ_E(θ) = (θᵀ diag(aᵢ⁻²) θ)^{−1/2}` and the support
//! function `h_E(θ) = (θᵀ diag(aᵢ²) θ)^{1/2}` are quadratic forms raised to
//! `∓1/2`, so one type serves both. Their extrema on a subsphere `S^{n−1} ∩ ξ^⊥`
//! are eigenvalues of the form restricted to `ξ^⊥`.

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{
    hyperplane_frame, sym_eigen, OrthonormalFrame, SectionMap, SymmetricForm, Vector, MAX_DIM,
};

/// Smallest supported ambient dimension.
pub const MIN_DIM: usize = 3;

/// Minimum gap between consecutive semi-axes.
pub const MIN_AXIS_GAP: f64 = 1e-9;

/// Relative eigen-gap below which an extremal direction is treated as non-unique.
pub const DEGENERATE_GAP: f64 = 1e-9;

/// Semi-axes `a₁ > a₂ > … > aₙ > 0` of a coordinate-aligned ellipsoid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipsoidSpec {
    semi_axes: Vector,
}

impl EllipsoidSpec {
    pub fn new(semi_axes: &[f64]) -> Result<Self> {
        let n = semi_axes.len();
        if !(MIN_DIM..=MAX_DIM).contains(&n) {
            return Err(Error::UnsupportedDimension {
                n,
                reason: "ellipsoids are supported for 3 <= n <= 8",
            });
        }
        if semi_axes.iter().any(|a| !a.is_finite() || *a <= 0.0) {
            return Err(Error::InvalidInput("semi-axes must be finite and positive"));
        }
        if semi_axes.windows(2).any(|w| w[0] - w[1] < MIN_AXIS_GAP) {
            return Err(Error::InvalidInput("semi-axes must be strictly decreasing"));
        }
        Ok(Self {
            semi_axes: Vector::new(semi_axes)?,
        })
    }

    /// `(n, n−1, …, 1)`.
    pub fn standard(n: usize) -> Result<Self> {
        if !(MIN_DIM..=MAX_DIM).contains(&n) {
            return Err(Error::UnsupportedDimension {
                n,
                reason: "ellipsoids are supported for 3 <= n <= 8",
            });
        }
        let mut axes = [0.0; MAX_DIM];
        for (i, a) in axes.iter_mut().enumerate().take(n) {
            *a = (n - i) as f64;
        }
        Self::new(&axes[..n])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.semi_axes.dim()
    }

    #[inline]
    pub fn semi_axes(&self) -> &[f64] {
        self.semi_axes.as_slice()
    }

    /// Semi-axis `a_{i+1}` (zero based).
    #[inline]
    pub fn axis(&self, i: usize) -> f64 {
        self.semi_axes[i]
    }

    /// `a₁`.
    #[inline]
    pub fn largest(&self) -> f64 {
        self.semi_axes[0]
    }

    /// `aₙ`.
    #[inline]
    pub fn smallest(&self) -> f64 {
        self.semi_axes[self.dim() - 1]
    }
}

/// Which boundary function of a body is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// Radial function: governs sections.
    Radial,
    /// Support function: governs projections.
    Support,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Self::Radial => "radial",
            Self::Support => "support",
        }
    }
}

/// A positive, even function on the unit sphere.
pub trait SphereFunction {
    /// Ambient dimension.
    fn dim(&self) -> usize;

    /// Value at a unit vector. Callers guarantee `‖θ‖ = 1`.
    fn value(&self, theta: &Vector) -> f64;

    /// Length scale used to make residuals dimensionless (`a₁` for ellipsoid-based bodies).
    fn scale(&self) -> f64;
}

/// `(θᵀQθ)^{∓1/2}` for the ellipsoid's diagonal form `Q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticSphereFunction {
    form: SymmetricForm,
    flavor: Flavor,
    ellipsoid: EllipsoidSpec,
}

impl QuadraticSphereFunction {
    pub fn new(ellipsoid: EllipsoidSpec, flavor: Flavor) -> Self {
        let mut diag = [0.0; MAX_DIM];
        let n = ellipsoid.dim();
        for (i, d) in diag.iter_mut().enumerate().take(n) {
            let a = ellipsoid.axis(i);
            *d = match flavor {
                Flavor::Radial => 1.0 / (a * a),
                Flavor::Support => a * a,
            };
        }
        let form = SymmetricForm::from_diagonal(&diag[..n]).expect("validated semi-axes");
        Self {
            form,
            flavor,
            ellipsoid,
        }
    }

    pub fn radial(ellipsoid: EllipsoidSpec) -> Self {
        Self::new(ellipsoid, Flavor::Radial)
    }

    pub fn support(ellipsoid: EllipsoidSpec) -> Self {
        Self::new(ellipsoid, Flavor::Support)
    }

    #[inline]
    pub fn form(&self) -> &SymmetricForm {
        &self.form
    }

    #[inline]
    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    #[inline]
    pub fn ellipsoid(&self) -> &EllipsoidSpec {
        &self.ellipsoid
    }

    /// Checked evaluation.
    pub fn eval(&self, theta: &Vector) -> Result<f64> {
        if theta.dim() != self.dim() {
            return Err(Error::InvalidInput("dimension mismatch"));
        }
        theta.require_unit("direction must be a finite unit vector")?;
        Ok(self.value(theta))
    }

    /// Maps an eigenvalue of the (restricted) form to a function value.
    #[inline]
    fn value_at_eigenvalue(&self, lambda: f64) -> f64 {
        match self.flavor {
            Flavor::Radial => 1.0 / libm::sqrt(lambda),
            Flavor::Support => libm::sqrt(lambda),
        }
    }
}

impl SphereFunction for QuadraticSphereFunction {
    #[inline]
    fn dim(&self) -> usize {
        self.form.dim()
    }

    #[inline]
    fn value(&self, theta: &Vector) -> f64 {
        self.value_at_eigenvalue(self.form.quadratic(theta))
    }

    fn scale(&self) -> f64 {
        self.ellipsoid.largest()
    }
}

fn check_cone_args(x: &Vector, tau: f64, e: &EllipsoidSpec, lo: f64, hi: f64) -> Result<()> {
    if x.dim() != e.dim() || !x.is_finite() {
        return Err(Error::InvalidInput(
            "point must be finite with the ellipsoid's dimension",
        ));
    }
    if !(tau > lo && tau < hi) {
        return Err(Error::Domain {
            what: "tau",
            value: tau,
            lo,
            hi,
        });
    }
    Ok(())
}

/// Membership in the elliptic cone around `e₁` over `{ρ_E ≥ τ} ∩ (e₁)^⊥₊`, `τ ∈ (a₂, a₁)`.
///
/// Tests `x₁ ≥ 0` and `(1 − τ²/a₁²) x₁² ≥ Σ_{i≥2} (τ²/aᵢ² − 1) xᵢ²`.
pub fn cone_membership_upper(x: &Vector, tau: f64, e: &EllipsoidSpec) -> Result<bool> {
    check_cone_args(x, tau, e, e.axis(1), e.largest())?;
    if x[0] < 0.0 {
        return Ok(false);
    }
    let t2 = tau * tau;
    let lhs = (1.0 - t2 / (e.largest() * e.largest())) * x[0] * x[0];
    let mut rhs = 0.0;
    for i in 1..e.dim() {
        let a = e.axis(i);
        rhs += (t2 / (a * a) - 1.0) * x[i] * x[i];
    }
    Ok(lhs >= rhs)
}

/// Membership in the elliptic cone around `eₙ` over `{ρ_E ≤ τ} ∩ (eₙ)^⊥₊`, `τ ∈ (aₙ, a_{n−1})`.
///
/// Tests `xₙ ≥ 0` and `(τ²/aₙ² − 1) xₙ² ≥ Σ_{i<n} (1 − τ²/aᵢ²) xᵢ²`.
pub fn cone_membership_lower(x: &Vector, tau: f64, e: &EllipsoidSpec) -> Result<bool> {
    let n = e.dim();
    check_cone_args(x, tau, e, e.smallest(), e.axis(n - 2))?;
    if x[n - 1] < 0.0 {
        return Ok(false);
    }
    let t2 = tau * tau;
    let an = e.smallest();
    let lhs = (t2 / (an * an) - 1.0) * x[n - 1] * x[n - 1];
    let mut rhs = 0.0;
    for i in 0..n - 1 {
        let a = e.axis(i);
        rhs += (1.0 - t2 / (a * a)) * x[i] * x[i];
    }
    Ok(lhs >= rhs)
}

/// Extreme values of a quadratic sphere function on `S^{n−1} ∩ ξ^⊥`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubsphereExtrema {
    pub xi: Vector,
    /// `τ₁`, the maximum.
    pub tau_max: f64,
    /// `τ₂`, the minimum.
    pub tau_min: f64,
    /// `η₁`, a maximizer, signed so that `⟨η₁, e₁⟩ ≥ 0`.
    pub eta_max: Vector,
    /// `η₂`, a minimizer, signed so that `⟨η₂, eₙ⟩ ≥ 0`.
    pub eta_min: Vector,
    /// Relative eigen-gap separating the maximizer from the next axis.
    pub gap_max: f64,
    /// Relative eigen-gap separating the minimizer from the next axis.
    pub gap_min: f64,
}

impl SubsphereExtrema {
    pub fn max_is_unique(&self) -> bool {
        self.gap_max >= DEGENERATE_GAP
    }

    pub fn min_is_unique(&self) -> bool {
        self.gap_min >= DEGENERATE_GAP
    }
}

/// Principal axes of the section `E ∩ ξ^⊥` (or of the projection, support flavor).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrincipalFrame {
    /// `η₁, ζ₂, …, ζ_{n−2}, η₂`, ordered by descending section semi-axis.
    pub frame: OrthonormalFrame,
    /// `τ₁, ã₂, …, ã_{n−2}, τ₂`.
    pub semi_axes: Vector,
}

struct RestrictedEigen {
    values: Vector,
    vectors: [Vector; MAX_DIM],
    m: usize,
}

/// Eigenpairs of `PᵀQP` sorted so that function values descend, lifted to `ℝⁿ`.
fn restricted_eigen(f: &QuadraticSphereFunction, xi: &Vector) -> Result<RestrictedEigen> {
    if xi.dim() != f.dim() {
        return Err(Error::InvalidInput("dimension mismatch"));
    }
    let p = hyperplane_frame(xi)?;
    let eig = sym_eigen(&f.form().restrict(&p))?;
    let m = p.len();
    let mut values = Vector::zeros(m);
    let mut vectors = [Vector::zeros(f.dim()); MAX_DIM];
    for k in 0..m {
        // radial: ascending eigenvalues are descending values; support: reverse
        let src = match f.flavor() {
            Flavor::Radial => k,
            Flavor::Support => m - 1 - k,
        };
        values.set(k, eig.values[src]);
        vectors[k] = p.lift(eig.vectors.get(src).as_slice());
    }
    Ok(RestrictedEigen { values, vectors, m })
}

/// `τ₁, τ₂, η₁, η₂` of `f` on the subsphere orthogonal to `ξ`.
pub fn subsphere_extrema(f: &QuadraticSphereFunction, xi: &Vector) -> Result<SubsphereExtrema> {
    let r = restricted_eigen(f, xi)?;
    let n = f.dim();
    let m = r.m;
    let scale = r
        .values
        .as_slice()
        .iter()
        .fold(0.0f64, |s, l| s.max(libm::fabs(*l)));
    let gap = |a: f64, b: f64| libm::fabs(a - b) / scale;

    let mut eta_max = r.vectors[0];
    if eta_max[0] < 0.0 {
        eta_max = -eta_max;
    }
    let mut eta_min = r.vectors[m - 1];
    if eta_min[n - 1] < 0.0 {
        eta_min = -eta_min;
    }
    Ok(SubsphereExtrema {
        xi: *xi,
        tau_max: f.value_at_eigenvalue(r.values[0]),
        tau_min: f.value_at_eigenvalue(r.values[m - 1]),
        eta_max,
        eta_min,
        gap_max: gap(r.values[0], r.values[1]),
        gap_min: gap(r.values[m - 1], r.values[m - 2]),
    })
}

/// Full eigenbasis of the restricted form, first vector `η₁`, last `η₂`.
pub fn principal_frame(f: &QuadraticSphereFunction, xi: &Vector) -> Result<PrincipalFrame> {
    let r = restricted_eigen(f, xi)?;
    let n = f.dim();
    let m = r.m;
    let mut vectors = r.vectors;
    if vectors[0][0] < 0.0 {
        vectors[0] = -vectors[0];
    }
    if vectors[m - 1][n - 1] < 0.0 {
        vectors[m - 1] = -vectors[m - 1];
    }
    let mut axes = [0.0; MAX_DIM];
    for (k, a) in axes.iter_mut().enumerate().take(m) {
        *a = f.value_at_eigenvalue(r.values[k]);
    }
    Ok(PrincipalFrame {
        frame: OrthonormalFrame::from_unchecked(&vectors[..m]),
        semi_axes: Vector::from_array(m, axes),
    })
}

/// `sup_θ |f(φθ) − f(θ)| / a₁` over the lattice points of the subsphere `ξ^⊥`.
pub fn reflection_preserves_section<M: SectionMap>(
    f: &QuadraticSphereFunction,
    xi: &Vector,
    map: &M,
    samples: &Lattice,
) -> Result<f64> {
    let p = hyperplane_frame(xi)?;
    let a1 = f.ellipsoid().largest();
    let mut worst: f64 = 0.0;
    for theta in samples.lifted(&p) {
        let d = libm::fabs(f.value(&map.apply(&theta)) - f.value(&theta)) / a1;
        worst = worst.max(d);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IsometryMap;
    use approx::assert_abs_diff_eq;

    fn e321() -> EllipsoidSpec {
        EllipsoidSpec::new(&[3.0, 2.0, 1.0]).unwrap()
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(EllipsoidSpec::new(&[3.0, 3.0, 1.0]).is_err());
        assert!(EllipsoidSpec::new(&[3.0, 2.0, 0.0]).is_err());
        assert!(EllipsoidSpec::new(&[2.0, 1.0]).is_err());
        assert!(EllipsoidSpec::standard(9).is_err());
        assert_eq!(
            EllipsoidSpec::standard(4).unwrap().semi_axes(),
            &[4.0, 3.0, 2.0, 1.0]
        );
    }

    #[test]
    fn eval_examples() {
        let rho = QuadraticSphereFunction::radial(e321());
        assert_abs_diff_eq!(
            rho.eval(&Vector::basis(3, 0)).unwrap(),
            3.0,
            epsilon = 1e-15
        );
        let r = 1.0 / libm::sqrt(2.0);
        let theta = Vector::new(&[r, r, 0.0]).unwrap();
        assert_abs_diff_eq!(
            rho.eval(&theta).unwrap(),
            libm::sqrt(72.0 / 13.0),
            epsilon = 1e-14
        );
        let h = QuadraticSphereFunction::support(e321());
        assert_abs_diff_eq!(h.eval(&Vector::basis(3, 2)).unwrap(), 1.0, epsilon = 1e-15);
        assert!(rho.eval(&Vector::new(&[1.0, 1.0, 0.0]).unwrap()).is_err());
    }

    #[test]
    fn cone_examples() {
        let e = e321();
        assert!(cone_membership_upper(&Vector::basis(3, 0), 2.5, &e).unwrap());
        assert!(!cone_membership_upper(&Vector::basis(3, 1), 2.5, &e).unwrap());
        assert!(cone_membership_lower(&Vector::basis(3, 2), 1.4, &e).unwrap());
        assert!(!cone_membership_lower(&Vector::basis(3, 0), 1.4, &e).unwrap());
        assert!(matches!(
            cone_membership_upper(&Vector::basis(3, 0), 1.5, &e),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            cone_membership_lower(&Vector::basis(3, 0), 2.0, &e),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn coordinate_subspheres() {
        let rho = QuadraticSphereFunction::radial(e321());
        let ex = subsphere_extrema(&rho, &Vector::basis(3, 2)).unwrap();
        assert_abs_diff_eq!(ex.tau_max, 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ex.tau_min, 2.0, epsilon = 1e-14);
        assert!(ex.eta_max.max_abs_diff(&Vector::basis(3, 0)) < 1e-14);
        assert!(ex.eta_min.max_abs_diff(&Vector::basis(3, 1)) < 1e-14);

        let ex = subsphere_extrema(&rho, &Vector::basis(3, 0)).unwrap();
        assert_abs_diff_eq!(ex.tau_max, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ex.tau_min, 1.0, epsilon = 1e-14);
        assert!(ex.eta_max.max_abs_diff(&Vector::basis(3, 1)) < 1e-14);
        assert!(ex.eta_min.max_abs_diff(&Vector::basis(3, 2)) < 1e-14);
    }

    #[test]
    fn support_flavor_swaps_roles() {
        let h = QuadraticSphereFunction::support(e321());
        let ex = subsphere_extrema(&h, &Vector::basis(3, 2)).unwrap();
        assert_abs_diff_eq!(ex.tau_max, 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ex.tau_min, 2.0, epsilon = 1e-14);
        assert!(ex.eta_max.max_abs_diff(&Vector::basis(3, 0)) < 1e-14);
    }

    #[test]
    fn principal_frames_on_coordinate_hyperplanes() {
        let rho = QuadraticSphereFunction::radial(e321());
        let pf = principal_frame(&rho, &Vector::basis(3, 2)).unwrap();
        assert!(pf.frame.get(0).max_abs_diff(&Vector::basis(3, 0)) < 1e-14);
        assert!(pf.frame.get(1).max_abs_diff(&Vector::basis(3, 1)) < 1e-14);
        assert!(
            pf.semi_axes
                .max_abs_diff(&Vector::new(&[3.0, 2.0]).unwrap())
                < 1e-14
        );

        let rho4 = QuadraticSphereFunction::radial(EllipsoidSpec::standard(4).unwrap());
        let pf = principal_frame(&rho4, &Vector::basis(4, 3)).unwrap();
        for i in 0..3 {
            assert!(pf.frame.get(i).max_abs_diff(&Vector::basis(4, i)) < 1e-14);
        }
        assert!(
            pf.semi_axes
                .max_abs_diff(&Vector::new(&[4.0, 3.0, 2.0]).unwrap())
                < 1e-14
        );
    }

    #[test]
    fn coordinate_reflection_symmetry() {
        let rho = QuadraticSphereFunction::radial(e321());
        let xi = Vector::basis(3, 2);
        let map = IsometryMap::reflect_in_vector(xi, Vector::basis(3, 1)).unwrap();
        let lat = Lattice::subsphere(3, 2000);
        assert!(reflection_preserves_section(&rho, &xi, &map, &lat).unwrap() <= 1e-12);
    }

    #[test]
    fn evenness_is_exact() {
        let rho = QuadraticSphereFunction::radial(EllipsoidSpec::standard(5).unwrap());
        let lat = Lattice::sphere(5, 500);
        for p in lat.points() {
            assert_eq!(rho.value(p), rho.value(&-*p));
        }
    }
}
