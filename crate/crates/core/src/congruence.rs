//! Per-direction congruence of the sections (or projections) of `K` and `L`.
//!
//! For each hyperplane `ξ^⊥` the subsphere falls into one of three cases,
//! depending on whether it reaches the caps `I₁` and `I₂`; each case comes with
//! an explicit involution `φ_ξ` of `ξ^⊥` such that `K(φ_ξ θ) = L(θ)` on the
//! subsphere. [`blind_congruence_search`] is an independent check that ignores the
//! case analysis and tries every frame-aligned orthogonal map instead.

use alloc::vec;
use alloc::vec::Vec;

use crate::body::Body;
use crate::ellipsoid::{
    principal_frame, subsphere_extrema, Flavor, PrincipalFrame, QuadraticSphereFunction,
    SphereFunction, SubsphereExtrema,
};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{
    hyperplane_frame, isometry_det, IsometryMap, SectionMap, SquareMatrix, Vector, MAX_DIM,
};

/// Distance of `τ₁` (resp. `τ₂`) from its cap threshold below which both
/// neighbouring cases are tried.
pub const BORDERLINE_TOL: f64 = 1e-6;

/// Maximum component of a map generator along `ξ` tolerated by [`verify_congruence`].
pub const MAP_LEAK_TOL: f64 = 1e-10;

/// Relative tolerance for treating two section semi-axes as equal in the blind search.
pub const AXIS_MATCH_TOL: f64 = 1e-9;

/// How the subsphere `S^{n−1} ∩ ξ^⊥` meets the caps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseClass {
    /// `τ₁ ≤ a₁ − δ`.
    AvoidsI1,
    /// `τ₁ > a₁ − δ` and `τ₂ ≥ aₙ + δ`.
    HitsI1Only,
    /// `τ₁ > a₁ − δ` and `τ₂ < aₙ + δ`.
    HitsBoth,
}

impl CaseClass {
    pub const ALL: [CaseClass; 3] = [
        CaseClass::AvoidsI1,
        CaseClass::HitsI1Only,
        CaseClass::HitsBoth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::AvoidsI1 => "avoids-i1",
            Self::HitsI1Only => "hits-i1-only",
            Self::HitsBoth => "hits-both",
        }
    }

    fn from_flags(hits_i1: bool, hits_i2: bool) -> Self {
        match (hits_i1, hits_i2) {
            (false, _) => Self::AvoidsI1,
            (true, false) => Self::HitsI1Only,
            (true, true) => Self::HitsBoth,
        }
    }
}

/// Which group the congruence map is drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    /// `O(n−1)`.
    Orthogonal,
    /// `SO(n−1)`.
    Special,
}

/// Record of one verified direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CongruenceCertificate {
    pub xi: Vector,
    pub case: CaseClass,
    pub map: IsometryMap,
    pub det: i32,
    /// `sup |K(φθ) − L(θ)| / a₁` over the subsphere samples.
    pub residual: f64,
    pub sample_count: usize,
    pub flavor: Flavor,
    pub group: Group,
    /// True when `τ₁` or `τ₂` sat within [`BORDERLINE_TOL`] of its threshold.
    pub borderline: bool,
}

/// Case from the subsphere extrema of the base function.
pub fn classify(extrema: &SubsphereExtrema, body: &Body) -> CaseClass {
    let e = body.ellipsoid();
    let delta = body.params().delta();
    CaseClass::from_flags(
        extrema.tau_max > e.largest() - delta,
        extrema.tau_min < e.smallest() + delta,
    )
}

/// Case of direction `ξ` for the pair sharing `body`'s base and parameters.
pub fn classify_direction(body: &Body, xi: &Vector) -> Result<CaseClass> {
    Ok(classify(&subsphere_extrema(body.base(), xi)?, body))
}

/// Cases consistent with the extrema once each threshold comparison within
/// [`BORDERLINE_TOL`] is allowed to go either way. The strict classification comes first.
fn candidate_cases(extrema: &SubsphereExtrema, body: &Body) -> Vec<CaseClass> {
    let e = body.ellipsoid();
    let delta = body.params().delta();
    let t1 = e.largest() - delta;
    let t2 = e.smallest() + delta;
    let hits_i1 = extrema.tau_max > t1;
    let hits_i2 = extrema.tau_min < t2;
    let i1_options: &[bool] = if libm::fabs(extrema.tau_max - t1) <= BORDERLINE_TOL {
        &[hits_i1, !hits_i1]
    } else {
        &[hits_i1]
    };
    let i2_options: &[bool] = if libm::fabs(extrema.tau_min - t2) <= BORDERLINE_TOL {
        &[hits_i2, !hits_i2]
    } else {
        &[hits_i2]
    };
    let mut out = Vec::new();
    for &a in i1_options {
        for &b in i2_options {
            let c = CaseClass::from_flags(a, b);
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out
}

/// The `O(n−1)` map: identity, `−id`, or the reflection in `η₂`.
pub fn build_isometry_o(
    xi: &Vector,
    case: CaseClass,
    extrema: &SubsphereExtrema,
) -> Result<IsometryMap> {
    match case {
        CaseClass::AvoidsI1 => IsometryMap::identity(*xi),
        CaseClass::HitsI1Only => IsometryMap::point_reflection(*xi),
        CaseClass::HitsBoth => {
            if !extrema.min_is_unique() {
                return Err(Error::Degenerate {
                    gap: extrema.gap_min,
                });
            }
            IsometryMap::reflect_in_vector(*xi, extrema.eta_min)
        }
    }
}

/// The `SO(n−1)` map built from the principal frame `η₁, ζ₂, …, ζ_{n−2}, η₂`.
///
/// For even `n` it reflects in the last principal axis; for odd `n` in the plane of
/// the last two. Both keep `η₂` fixed and send `η₁` to `−η₁`.
pub fn build_isometry_so(
    xi: &Vector,
    case: CaseClass,
    frame: &PrincipalFrame,
    n: usize,
) -> Result<IsometryMap> {
    if n < 4 {
        return Err(Error::UnsupportedDimension {
            n,
            reason: "rotation congruence requires n >= 4",
        });
    }
    let m = frame.frame.len();
    if m != n - 1 {
        return Err(Error::InvalidInput(
            "principal frame must span the hyperplane",
        ));
    }
    match case {
        CaseClass::AvoidsI1 => IsometryMap::identity(*xi),
        CaseClass::HitsI1Only | CaseClass::HitsBoth => {
            let last = *frame.frame.get(m - 1);
            if n.is_multiple_of(2) {
                IsometryMap::reflect_in_vector(*xi, last)
            } else {
                IsometryMap::reflect_in_plane(*xi, *frame.frame.get(m - 2), last)
            }
        }
    }
}

/// `sup |K(φθ) − L(θ)| / scale` over the subsphere lattice; no map validation.
pub fn section_mismatch<K, L, M>(
    k: &K,
    l: &L,
    xi: &Vector,
    map: &M,
    samples: &Lattice,
) -> Result<f64>
where
    K: SphereFunction + ?Sized,
    L: SphereFunction + ?Sized,
    M: SectionMap + ?Sized,
{
    let p = hyperplane_frame(xi)?;
    let scale = k.scale();
    let mut worst: f64 = 0.0;
    for theta in samples.lifted(&p) {
        let d = libm::fabs(k.value(&map.apply(&theta)) - l.value(&theta));
        // NaN must not hide behind max()
        if !(d <= worst) {
            worst = d;
        }
    }
    Ok(worst / scale)
}

/// Checks that `φ` preserves `ξ^⊥`, then returns the sampled relative mismatch.
pub fn verify_congruence<K, L>(
    k: &K,
    l: &L,
    xi: &Vector,
    map: &IsometryMap,
    samples: &Lattice,
) -> Result<f64>
where
    K: SphereFunction + ?Sized,
    L: SphereFunction + ?Sized,
{
    let leak = map.leak_along(xi);
    if leak > MAP_LEAK_TOL {
        return Err(Error::InvalidMap { leak });
    }
    section_mismatch(k, l, xi, map, samples)
}

/// Builds, verifies and records `φ_ξ` for one direction.
///
/// Borderline directions try every candidate case and keep the smallest residual.
pub fn certify(
    k: &Body,
    l: &Body,
    xi: &Vector,
    group: Group,
    samples: &Lattice,
) -> Result<CongruenceCertificate> {
    let n = k.dim();
    if group == Group::Special && n < 4 {
        return Err(Error::UnsupportedDimension {
            n,
            reason: "rotation congruence requires n >= 4",
        });
    }
    let extrema = subsphere_extrema(k.base(), xi)?;
    let frame = match group {
        Group::Special => Some(principal_frame(k.base(), xi)?),
        Group::Orthogonal => None,
    };
    let cases = candidate_cases(&extrema, k);
    let borderline = cases.len() > 1;

    let mut best: Option<(CaseClass, IsometryMap, f64)> = None;
    let mut first_err = None;
    for case in cases {
        let map = match (&frame, group) {
            (Some(f), Group::Special) => build_isometry_so(xi, case, f, n),
            _ => build_isometry_o(xi, case, &extrema),
        };
        let map = match map {
            Ok(m) => m,
            Err(e) => {
                first_err.get_or_insert(e);
                continue;
            }
        };
        let residual = verify_congruence(k, l, xi, &map, samples)?;
        if best.as_ref().is_none_or(|b| residual < b.2) {
            best = Some((case, map, residual));
        }
    }
    let (case, map, residual) = match best {
        Some(b) => b,
        None => return Err(first_err.unwrap_or(Error::InvalidInput("no candidate case"))),
    };
    Ok(CongruenceCertificate {
        xi: *xi,
        case,
        map,
        det: isometry_det(&map, n),
        residual,
        sample_count: samples.len(),
        flavor: k.flavor(),
        group,
        borderline,
    })
}

/// An orthogonal map of `ℝⁿ` that fixes `ξ` and permutes/flips principal axes of `ξ^⊥`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameAlignedMap {
    /// `n × n` matrix of the map.
    pub matrix: SquareMatrix,
    /// Sign applied to each principal axis (in principal-frame order).
    pub signs: [i8; MAX_DIM],
    /// Axis `a` is sent to axis `permutation[a]`.
    pub permutation: [u8; MAX_DIM],
}

impl SectionMap for FrameAlignedMap {
    #[inline]
    fn apply(&self, x: &Vector) -> Vector {
        self.matrix.apply(x)
    }
}

/// Best map found by [`blind_congruence_search`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlindSearchResult {
    pub map: FrameAlignedMap,
    pub residual: f64,
    pub candidates: usize,
}

/// Heap's algorithm, in a fixed order.
fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut a = items.to_vec();
    let k = a.len();
    let mut out = vec![a.clone()];
    let mut c = vec![0usize; k];
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Axis permutations that only exchange section semi-axes of equal length.
fn admissible_permutations(semi_axes: &Vector) -> Vec<[u8; MAX_DIM]> {
    let m = semi_axes.dim();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for a in 0..m {
        match clusters.last_mut() {
            Some(cl)
                if libm::fabs(semi_axes[cl[0]] - semi_axes[a])
                    <= AXIS_MATCH_TOL * libm::fabs(semi_axes[cl[0]]) =>
            {
                cl.push(a)
            }
            _ => clusters.push(vec![a]),
        }
    }
    let mut out: Vec<[u8; MAX_DIM]> = vec![{
        let mut id = [0u8; MAX_DIM];
        for (a, slot) in id.iter_mut().enumerate() {
            *slot = a as u8;
        }
        id
    }];
    for cl in clusters.iter().filter(|cl| cl.len() > 1) {
        let perms = permutations(cl);
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for base in &out {
            for p in &perms {
                let mut q = *base;
                for (src, dst) in cl.iter().zip(p) {
                    q[*src] = *dst as u8;
                }
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Tries every sign flip (and equal-axis permutation) of the base section's principal
/// frame and returns the map with the smallest sampled mismatch.
///
/// The search uses only the base function's principal frame, not the case analysis.
/// Ties keep the first candidate in enumeration order, which starts at the identity.
pub fn blind_congruence_search<K, L>(
    base: &QuadraticSphereFunction,
    k: &K,
    l: &L,
    xi: &Vector,
    samples: &Lattice,
) -> Result<BlindSearchResult>
where
    K: SphereFunction + ?Sized,
    L: SphereFunction + ?Sized,
{
    let n = base.dim();
    let pf = principal_frame(base, xi)?;
    let m = pf.frame.len();
    let perms = admissible_permutations(&pf.semi_axes);

    let mut best: Option<BlindSearchResult> = None;
    let mut count = 0;
    for perm in &perms {
        for mask in 0u32..(1u32 << m) {
            let mut signs = [1i8; MAX_DIM];
            let mut matrix = SquareMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    matrix.set(i, j, xi[i] * xi[j]);
                }
            }
            for a in 0..m {
                let s = if mask & (1 << a) != 0 { -1.0 } else { 1.0 };
                signs[a] = s as i8;
                let src = pf.frame.get(a);
                let dst = pf.frame.get(perm[a] as usize);
                for i in 0..n {
                    for j in 0..n {
                        matrix.set(i, j, matrix.get(i, j) + s * dst[i] * src[j]);
                    }
                }
            }
            let map = FrameAlignedMap {
                matrix,
                signs,
                permutation: *perm,
            };
            let residual = section_mismatch(k, l, xi, &map, samples)?;
            count += 1;
            if best.as_ref().is_none_or(|b| residual < b.residual) {
                best = Some(BlindSearchResult {
                    map,
                    residual,
                    candidates: 0,
                });
            }
        }
    }
    let mut best = best.expect("at least the identity candidate");
    best.candidates = count;
    Ok(best)
}
