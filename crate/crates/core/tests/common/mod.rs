#![allow(dead_code)]

use congruent_core::Vector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

pub fn unit(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    loop {
        let g = gaussian(rng, n);
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            let c: Vec<f64> = g.iter().map(|x| x / norm).collect();
            return Vector::new(&c).unwrap();
        }
    }
}

/// Uniform point on the subsphere orthogonal to `xi`, by projecting a Gaussian.
/// Independent of the crate's hyperplane frames.
pub fn unit_in_hyperplane(rng: &mut ChaCha8Rng, xi: &Vector) -> Vector {
    loop {
        let g = Vector::new(&gaussian(rng, xi.dim())).unwrap();
        let p = g.axpy(-g.dot(xi), xi);
        let norm = p.norm();
        if norm > 1e-8 {
            return p * (1.0 / norm);
        }
    }
}

/// Gram–Schmidt basis of `xi^⊥` seeded with the standard basis.
pub fn gram_schmidt_complement(xi: &Vector) -> Vec<Vector> {
    let n = xi.dim();
    let mut basis: Vec<Vector> = vec![*xi];
    for i in 0..n {
        let mut v = Vector::basis(n, i);
        for b in &basis {
            v = v.axpy(-v.dot(b), b);
        }
        if v.norm() > 1e-6 {
            basis.push(v * (1.0 / v.norm()));
        }
        if basis.len() == n {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Local refinement of a sampled maximizer of `f` on the subsphere spanned by `basis`:
/// coordinate pattern search in the tangent directions with a shrinking step.
pub fn polish_max<F: Fn(&Vector) -> f64>(f: F, basis: &[Vector], start: Vector) -> f64 {
    let mut x = start;
    let mut best = f(&x);
    let mut step = 0.05;
    while step > 1e-9 {
        let mut improved = false;
        for b in basis {
            for s in [step, -step] {
                let cand = x.axpy(s, b);
                let cand = cand * (1.0 / cand.norm());
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
    best
}

/// Determinant by cofactor expansion (independent of the crate's elimination).
pub fn det_cofactor(m: &[Vec<f64>]) -> f64 {
    let k = m.len();
    if k == 1 {
        return m[0][0];
    }
    let mut acc = 0.0;
    for c in 0..k {
        let minor: Vec<Vec<f64>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != c)
                    .map(|(_, v)| *v)
                    .collect()
            })
            .collect();
        let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * m[0][c] * det_cofactor(&minor);
    }
    acc
}
