//! Seeded generators of random points, sets and operators used by the
//! property suites and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::sets::ClosedSet;
use crate::vector::{orthonormalize, NormKind, Vector};

/// The generator every suite uses, seeded from a `u64`.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in `[-half, half]^d`.
pub fn point<R: Rng>(rng: &mut R, d: usize, half: f64) -> Vector {
    Vector::new((0..d).map(|_| rng.random_range(-half..=half)).collect())
}

/// Uniformly distributed unit vector.
pub fn direction<R: Rng>(rng: &mut R, d: usize) -> Vector {
    loop {
        let v = Vector::new((0..d).map(|_| StandardNormal.sample(rng)).collect());
        let n = v.norm();
        if n > 1e-6 {
            return v.scale(1.0 / n);
        }
    }
}

/// Polytope with `1..=d+4` vertices in `[-2, 2]^d` (points and segments
/// included).
pub fn polytope<R: Rng>(rng: &mut R, d: usize) -> ClosedSet {
    let k = rng.random_range(1..=d + 4);
    let c = point(rng, d, 1.5);
    let s = rng.random_range(0.2..1.0);
    ClosedSet::Polytope {
        vertices: (0..k).map(|_| c.axpy(s, &point(rng, d, 1.0))).collect(),
    }
}

/// Full-dimensional-ish polytope: `d + 1 ..= d + 5` vertices.
pub fn solid_polytope<R: Rng>(rng: &mut R, d: usize) -> ClosedSet {
    let k = rng.random_range(d + 1..=d + 5);
    let c = point(rng, d, 1.5);
    let s = rng.random_range(0.3..1.0);
    ClosedSet::Polytope {
        vertices: (0..k).map(|_| c.axpy(s, &point(rng, d, 1.0))).collect(),
    }
}

pub fn ball<R: Rng>(rng: &mut R, d: usize, norm: NormKind) -> ClosedSet {
    ClosedSet::Ball {
        center: point(rng, d, 1.5),
        radius: rng.random_range(0.1..1.5),
        norm,
    }
}

/// Random affine flat of dimension `0..=d`.
pub fn flat<R: Rng>(rng: &mut R, d: usize) -> ClosedSet {
    let k = rng.random_range(0..=d);
    let raw: Vec<Vector> = (0..k).map(|_| direction(rng, d)).collect();
    ClosedSet::Subspace {
        basis: orthonormalize(&raw, 1e-6),
        offset: point(rng, d, 1.5),
    }
}

/// Random bounded convex set: a polytope or a ball of any norm.
pub fn bounded_convex<R: Rng>(rng: &mut R, d: usize) -> ClosedSet {
    match rng.random_range(0..4) {
        0 => polytope(rng, d),
        1 => ball(rng, d, NormKind::L2),
        2 => ball(rng, d, NormKind::L1),
        _ => ball(rng, d, NormKind::LInf),
    }
}

/// Random set of any nonempty variant except cylinders.
pub fn any_set<R: Rng>(rng: &mut R, d: usize) -> ClosedSet {
    match rng.random_range(0..10) {
        0..=2 => polytope(rng, d),
        3 | 4 => ball(rng, d, NormKind::L2),
        5 => ball(rng, d, NormKind::L1),
        6 => ball(rng, d, NormKind::LInf),
        7 | 8 => flat(rng, d),
        _ => {
            let k = rng.random_range(2..=3);
            ClosedSet::Union {
                parts: (0..k).map(|_| bounded_convex(rng, d)).collect(),
            }
        }
    }
}

/// Random point of a nonempty set.
pub fn point_in<R: Rng>(rng: &mut R, c: &ClosedSet) -> Vector {
    match c {
        ClosedSet::Ball { center, radius, norm } => {
            let d = center.dim();
            let u = direction(rng, d);
            // scale so the point stays inside in every norm
            let unit = u.norm_with(*norm);
            let t: f64 = rng.random::<f64>().powf(1.0 / d as f64);
            center.axpy(radius * t / unit, &u)
        }
        ClosedSet::Polytope { vertices } => {
            let w: Vec<f64> = vertices.iter().map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
            let total: f64 = w.iter().sum();
            vertices
                .iter()
                .zip(&w)
                .fold(Vector::zeros(vertices[0].dim()), |acc, (v, wi)| acc.axpy(wi / total, v))
        }
        ClosedSet::Subspace { basis, offset } => basis
            .iter()
            .fold(offset.clone(), |acc, b| acc.axpy(rng.random_range(-3.0..3.0), b)),
        ClosedSet::Cylinder { base, directions } => directions
            .iter()
            .fold(point_in(rng, base), |acc, b| acc.axpy(rng.random_range(-3.0..3.0), b)),
        ClosedSet::Union { parts } => {
            let nonempty: Vec<&ClosedSet> = parts.iter().filter(|p| !p.is_empty()).collect();
            let k = rng.random_range(0..nonempty.len());
            point_in(rng, nonempty[k])
        }
        ClosedSet::Empty => panic!("no point in the empty set"),
    }
}

/// Random square matrix with entries in `[-1, 1]`, row-major.
pub fn matrix<R: Rng>(rng: &mut R, d: usize) -> Vec<Vec<f64>> {
    (0..d)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect()
}
