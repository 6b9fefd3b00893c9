//! Prefix-nested quasi-uniform point sets on spheres.
//!
//! Point `j` depends only on `j` and the sphere dimension, never on the total
//! count, so the first `N` points of a larger set are exactly the set of size
//! `N`. Sampled suprema are therefore monotone in the sample count.
//!
//! * `S¹`: golden-ratio angle sequence.
//! * `S²`: the `R₂` Kronecker sequence pushed through the Archimedes equal-area map
//!   (the nested relative of the spherical Fibonacci lattice).
//! * `S^k`, `k ≥ 3`: an `R_d` Kronecker sequence, Box–Muller to Gaussians, normalized.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::linalg::{OrthonormalFrame, Vector, MAX_DIM};

/// Positive root of `x^{d+1} = x + 1`.
fn generalized_golden(d: usize) -> f64 {
    let mut x = 2.0;
    for _ in 0..64 {
        x = libm::pow(1.0 + x, 1.0 / (d as f64 + 1.0));
    }
    x
}

#[inline]
fn frac(x: f64) -> f64 {
    x - libm::floor(x)
}

/// Generator for the `j`-th point of a Kronecker sequence in `[0,1)^d`.
#[derive(Clone, Copy, Debug)]
struct Kronecker {
    d: usize,
    alpha: [f64; MAX_DIM],
}

impl Kronecker {
    fn new(d: usize) -> Self {
        let g = generalized_golden(d);
        let mut alpha = [0.0; MAX_DIM];
        let mut p = 1.0;
        for a in alpha.iter_mut().take(d) {
            p /= g;
            *a = p;
        }
        Self { d, alpha }
    }

    #[inline]
    fn point(&self, j: usize, out: &mut [f64; MAX_DIM]) {
        let jf = j as f64;
        for i in 0..self.d {
            out[i] = frac(0.5 + jf * self.alpha[i]);
        }
    }
}

/// The `j`-th point of the nested lattice on the unit sphere of `ℝ^m`, `2 ≤ m ≤ 8`.
#[derive(Clone, Copy, Debug)]
pub struct SphereSequence {
    m: usize,
    kron: Kronecker,
}

impl SphereSequence {
    pub fn new(m: usize) -> Self {
        assert!(
            (2..=MAX_DIM).contains(&m),
            "sphere ambient dimension {m} out of range"
        );
        let d = match m {
            2 => 1,
            3 => 2,
            _ => 2 * m.div_ceil(2),
        };
        Self {
            m,
            kron: Kronecker::new(d),
        }
    }

    /// Ambient dimension of the sphere.
    pub fn ambient_dim(&self) -> usize {
        self.m
    }

    pub fn point(&self, j: usize) -> Vector {
        let mut u = [0.0; MAX_DIM];
        self.kron.point(j, &mut u);
        let mut c = [0.0; MAX_DIM];
        match self.m {
            2 => {
                let t = 2.0 * PI * u[0];
                c[0] = libm::cos(t);
                c[1] = libm::sin(t);
            }
            3 => {
                let z = 2.0 * u[0] - 1.0;
                let r = libm::sqrt((1.0 - z * z).max(0.0));
                let t = 2.0 * PI * u[1];
                c[0] = r * libm::cos(t);
                c[1] = r * libm::sin(t);
                c[2] = z;
            }
            m => {
                let mut k = 0;
                while k < m {
                    let u1 = u[k].max(f64::MIN_POSITIVE);
                    let r = libm::sqrt(-2.0 * libm::log(u1));
                    let t = 2.0 * PI * u[k + 1];
                    c[k] = r * libm::cos(t);
                    if k + 1 < m {
                        c[k + 1] = r * libm::sin(t);
                    }
                    k += 2;
                }
                let mut norm = 0.0;
                for x in c.iter().take(m) {
                    norm += x * x;
                }
                let norm = libm::sqrt(norm);
                if norm < 1e-8 {
                    // measure-zero; fall back to an axis so the sequence stays total
                    c = [0.0; MAX_DIM];
                    c[j % m] = 1.0;
                } else {
                    for x in c.iter_mut().take(m) {
                        *x /= norm;
                    }
                }
            }
        }
        Vector::from_array(self.m, c)
    }
}

/// A materialized prefix of a [`SphereSequence`], stored in local coordinates.
///
/// Used both for the full sphere `S^{n−1}` (identity frame) and for subspheres
/// `S^{n−1} ∩ ξ^⊥`, where the local points live in `ℝ^{n−1}` and are lifted
/// through a frame of `ξ^⊥`.
#[derive(Clone, Debug)]
pub struct Lattice {
    m: usize,
    points: Vec<Vector>,
}

impl Lattice {
    /// The first `count` points on the unit sphere of `ℝ^m`.
    pub fn new(m: usize, count: usize) -> Self {
        let seq = SphereSequence::new(m);
        Self {
            m,
            points: (0..count).map(|j| seq.point(j)).collect(),
        }
    }

    /// Lattice for the subspheres of hyperplanes in `ℝⁿ`.
    pub fn subsphere(n: usize, count: usize) -> Self {
        Self::new(n - 1, count)
    }

    /// Lattice on the full sphere `S^{n−1}`.
    pub fn sphere(n: usize, count: usize) -> Self {
        Self::new(n, count)
    }

    /// Ambient dimension of the local points.
    pub fn local_dim(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    /// Points lifted into `ℝⁿ` through `frame` (one frame vector per local coordinate).
    pub fn lifted<'a>(&'a self, frame: &'a OrthonormalFrame) -> impl Iterator<Item = Vector> + 'a {
        assert_eq!(
            frame.len(),
            self.m,
            "frame size must match lattice dimension"
        );
        self.points.iter().map(move |p| frame.lift(p.as_slice()))
    }
}
