//! Convex bodies `K ≠ ±L` in `ℝⁿ` whose hyperplane sections (or projections) are
//! pairwise congruent, together with the kernels that certify it numerically.
//!
//! The bodies are perturbations of an ellipsoid with distinct semi-axes. For every
//! direction `ξ` the crate builds an explicit involution `φ_ξ` of `ξ^⊥` with
//! `ρ_K ∘ φ_ξ = ρ_L` on the subsphere (`h_K ∘ φ_ξ = h_L` for projections), in both
//! an `O(n−1)` and an `SO(n−1)` version.
//!
//! The crate is `no_std` (with `alloc`) and has no I/O; see the `congruent` crate
//! for the certification harness and command-line tool.
#![no_std]
#![forbid(unsafe_code)]
// NaN must fail tolerance checks, hence `!(x <= tol)`
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod body;
pub mod congruence;
pub mod ellipsoid;
pub mod error;
pub mod lattice;
pub mod linalg;

pub use body::{
    calibrate_epsilon, convexity_check, default_delta, default_epsilon_seed, distinctness_check,
    h1, h2, max_delta, Body, Calibration, PerturbationParams, RegionId, Variant,
};
pub use congruence::{
    blind_congruence_search, build_isometry_o, build_isometry_so, certify, classify_direction,
    verify_congruence, BlindSearchResult, CaseClass, CongruenceCertificate, FrameAlignedMap, Group,
};
pub use ellipsoid::{
    cone_membership_lower, cone_membership_upper, principal_frame, reflection_preserves_section,
    subsphere_extrema, EllipsoidSpec, Flavor, PrincipalFrame, QuadraticSphereFunction,
    SphereFunction, SubsphereExtrema,
};
pub use error::{Error, Result};
pub use lattice::{Lattice, SphereSequence};
pub use linalg::{
    hyperplane_frame, isometry_det, reflect_in_plane, reflect_in_vector, sym_eigen, IsometryKind,
    IsometryMap, OrthonormalFrame, SectionMap, SquareMatrix, SymEigen, SymmetricForm, Vector,
};
