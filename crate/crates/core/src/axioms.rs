//! Seeded property suite for the point-to-set axioms (N1)-(N8).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::kappa::{minkowski_sum_cl, rho_unchecked};
use crate::random;
use crate::report::{AxiomReport, Tally};
use crate::sets::{ClosedSet, MEMBERSHIP_TOL};
use crate::vector::{NormKind, Vector};

/// A candidate kappa-norm `rho(x, C)`.
pub trait KappaNorm {
    fn rho(&self, x: &Vector, c: &ClosedSet) -> f64;
}

impl<F: Fn(&Vector, &ClosedSet) -> f64> KappaNorm for F {
    fn rho(&self, x: &Vector, c: &ClosedSet) -> f64 {
        self(x, c)
    }
}

/// The library's own kappa-norm, [`crate::rho`] without input validation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Euclidean;

impl KappaNorm for Euclidean {
    fn rho(&self, x: &Vector, c: &ClosedSet) -> f64 {
        rho_unchecked(x, c)
    }
}

/// Seed, dimension and instance count of a randomized suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub dim: usize,
    pub instances: usize,
}

impl SuiteConfig {
    pub fn new(seed: u64, dim: usize, instances: usize) -> Self {
        SuiteConfig { seed, dim, instances }
    }
}

/// Pass threshold for every axiom of [`axiom_suite`].
pub const AXIOM_TOL: f64 = 1e-9;

/// Levels of the nested chains used for (N4).
pub const CHAIN_LEVELS: usize = 50;

/// Checks (N1)-(N8) for `eval` on `cfg.instances` random instances.
///
/// Sets are drawn from every variant; each ball carries its own norm, so
/// the two triangle laws (N5) are exercised on pairs sharing a norm. (N3)
/// is checked as 1-Lipschitz continuity in the Euclidean norm, or in the L1
/// norm when an L1 ball is involved. (N4) uses chains that shrink a set
/// towards an interior point by `1 - 2^-k`, or that grow cross-polytopes of
/// radius `2^(k/5)` inside a flat.
pub fn axiom_suite(eval: &impl KappaNorm, cfg: &SuiteConfig) -> AxiomReport {
    let d = cfg.dim;
    let mut rng = random::rng(cfg.seed);
    let mut n1 = Tally::new("N1");
    let mut n2 = Tally::new("N2");
    let mut n3 = Tally::new("N3");
    let mut n4 = Tally::new("N4");
    let mut n5a = Tally::new("N5a");
    let mut n5b = Tally::new("N5b");
    let mut n6 = Tally::new("N6");
    let mut n7 = Tally::new("N7");
    let mut n8 = Tally::new("N8");

    for _ in 0..cfg.instances {
        let c = random::any_set(&mut rng, d);
        let inside = random::point_in(&mut rng, &c);
        let outside = random::point(&mut rng, d, 4.0);

        for x in [&inside, &outside] {
            let r = eval.rho(x, &c);
            let member = c.contains(x, MEMBERSHIP_TOL);
            // a point outside the set at distance zero is a categorical miss
            let v = if member {
                r
            } else if r > 0.0 {
                0.0
            } else {
                1.0
            };
            n1.record(v, || format!("x = {x:?}, C = {c:?}, rho = {r}, member = {member}"));
        }

        let delta = rng.random_range(0.01..0.5);
        let bigger = dilate(&c, delta);
        for x in [&inside, &outside] {
            let (r, rb) = (eval.rho(x, &c), eval.rho(x, &bigger));
            n2.record(rb - r, || format!("x = {x:?}, C = {c:?}, C' = {bigger:?}"));
        }

        let lip_norm = if has_l1_ball(&c) { NormKind::L1 } else { NormKind::L2 };
        for base in [&inside, &outside] {
            let scale = [1e-3, 0.1, 1.0, 3.0][rng.random_range(0..4)];
            let y = base.axpy(scale, &random::direction(&mut rng, d));
            let gap = (eval.rho(base, &c) - eval.rho(&y, &c)).abs();
            let step = (base - &y).norm_with(lip_norm);
            n3.record(gap - step, || format!("x = {base:?}, x' = {y:?}, C = {c:?}"));
        }

        {
            let x = &outside;
            let target = eval.rho(x, &c);
            let mut prev = f64::INFINITY;
            let mut running = f64::INFINITY;
            let mut worst: f64 = 0.0;
            for k in 1..=CHAIN_LEVELS {
                let r = eval.rho(x, &chain_level(&c, k));
                worst = worst.max(r - prev);
                prev = r;
                running = running.min(r);
            }
            worst = worst.max((target - running).abs());
            n4.record(worst, || {
                format!("x = {x:?}, C = {c:?}, inf over chain = {running}, rho = {target}")
            });
        }

        let (c1, c2) = summable_pair(&mut rng, d);
        let x = if rng.random_bool(0.3) {
            random::point_in(&mut rng, &c1)
        } else {
            random::point(&mut rng, d, 4.0)
        };
        let y = if rng.random_bool(0.3) {
            random::point_in(&mut rng, &c2)
        } else {
            random::point(&mut rng, d, 4.0)
        };
        match minkowski_sum_cl(&c1, &c2) {
            Ok(sum) => {
                let v = eval.rho(&(&x + &y), &sum) - eval.rho(&x, &c1) - eval.rho(&y, &c2);
                n5a.record(v, || format!("x = {x:?}, y = {y:?}, C1 = {c1:?}, C2 = {c2:?}"));
            }
            Err(_) => n5a.skip(),
        }

        let (c1, c2, verts) = triangle_pair(&mut rng, d);
        let rb = verts.iter().map(|v| eval.rho(v, &c1)).fold(0.0, f64::max);
        let x = random::point(&mut rng, d, 4.0);
        let v = eval.rho(&x, &c1) - eval.rho(&x, &c2) - rb;
        n5b.record(v, || format!("x = {x:?}, C1 = {c1:?}, C2 = {c2:?}"));

        let lambda = rng.random_range(0.1..5.0) * if rng.random_bool(0.5) { -1.0 } else { 1.0 };
        for x in [&inside, &outside] {
            let scaled = c.map_affine(lambda, &Vector::zeros(d));
            let v = (eval.rho(&x.scale(lambda), &scaled) - lambda.abs() * eval.rho(x, &c)).abs();
            n6.record(v, || format!("lambda = {lambda}, x = {x:?}, C = {c:?}"));
        }

        let shift = random::point(&mut rng, d, 3.0);
        for x in [&inside, &outside] {
            let moved = c.map_affine(1.0, &shift);
            let v = (eval.rho(&(x + &shift), &moved) - eval.rho(x, &c)).abs();
            n7.record(v, || format!("y = {shift:?}, x = {x:?}, C = {c:?}"));
        }

        let on_empty = eval.rho(&outside, &ClosedSet::Empty);
        let on_set = eval.rho(&outside, &c);
        let v = if on_empty == f64::INFINITY && on_set.is_finite() {
            0.0
        } else {
            1.0
        };
        n8.record(v, || {
            format!("x = {outside:?}, rho(x, empty) = {on_empty}, rho(x, C) = {on_set}, C = {c:?}")
        });
    }

    AxiomReport {
        suite: "kappa".into(),
        seed: cfg.seed,
        dim: d,
        instances: cfg.instances,
        tolerance: AXIOM_TOL,
        entries: [n1, n2, n3, n4, n5a, n5b, n6, n7, n8]
            .into_iter()
            .map(|t| t.finish(AXIOM_TOL))
            .collect(),
    }
}

fn has_l1_ball(c: &ClosedSet) -> bool {
    match c {
        ClosedSet::Ball { norm, .. } => *norm == NormKind::L1,
        ClosedSet::Union { parts } => parts.iter().any(has_l1_ball),
        _ => false,
    }
}

fn centroid(vertices: &[Vector]) -> Vector {
    let n = vertices.len() as f64;
    vertices
        .iter()
        .fold(Vector::zeros(vertices[0].dim()), |acc, v| acc.axpy(1.0 / n, v))
}

/// A superset of `c`: balls grow their radius, polytopes are scaled about
/// their vertex centroid, flats are thickened into cylinders.
fn dilate(c: &ClosedSet, delta: f64) -> ClosedSet {
    match c {
        ClosedSet::Ball { center, radius, norm } => ClosedSet::Ball {
            center: center.clone(),
            radius: radius + delta,
            norm: *norm,
        },
        ClosedSet::Polytope { vertices } => {
            let g = centroid(vertices);
            ClosedSet::Polytope {
                vertices: vertices.iter().map(|v| g.axpy(1.0 + delta, &(v - &g))).collect(),
            }
        }
        ClosedSet::Subspace { offset, .. } => {
            minkowski_sum_cl(c, &ClosedSet::ball(Vector::zeros(offset.dim()), delta)).expect("flat plus ball")
        }
        ClosedSet::Union { parts } => ClosedSet::Union {
            parts: parts.iter().map(|p| dilate(p, delta)).collect(),
        },
        other => other.clone(),
    }
}

/// Level `k` of an increasing chain whose closed union is `c`.
fn chain_level(c: &ClosedSet, k: usize) -> ClosedSet {
    let shrink = 1.0 - 0.5f64.powi(k as i32);
    match c {
        ClosedSet::Ball { center, radius, norm } => ClosedSet::Ball {
            center: center.clone(),
            radius: radius * shrink,
            norm: *norm,
        },
        ClosedSet::Polytope { vertices } => {
            let g = centroid(vertices);
            ClosedSet::Polytope {
                vertices: vertices.iter().map(|v| g.axpy(shrink, &(v - &g))).collect(),
            }
        }
        ClosedSet::Subspace { basis, offset } => {
            let r = 2f64.powf(k as f64 / 5.0);
            let mut vertices = vec![offset.clone()];
            for b in basis {
                vertices.push(offset.axpy(r, b));
                vertices.push(offset.axpy(-r, b));
            }
            ClosedSet::Polytope { vertices }
        }
        ClosedSet::Union { parts } => ClosedSet::Union {
            parts: parts.iter().map(|p| chain_level(p, k)).collect(),
        },
        other => other.clone(),
    }
}

/// Two sets whose closed Minkowski sum is represented exactly and whose
/// distances share one norm.
fn summable_pair<R: Rng>(rng: &mut R, d: usize) -> (ClosedSet, ClosedSet) {
    match rng.random_range(0..7) {
        0 | 1 => (random::polytope(rng, d), random::polytope(rng, d)),
        2 => {
            let norm = [NormKind::L2, NormKind::L1, NormKind::LInf][rng.random_range(0..3)];
            (random::ball(rng, d, norm), random::ball(rng, d, norm))
        }
        3 => (random::flat(rng, d), random::flat(rng, d)),
        4 => (random::flat(rng, d), random::polytope(rng, d)),
        5 => (random::ball(rng, d, NormKind::L2), random::flat(rng, d)),
        // a polytope plus a Euclidean ball is only approximated; use a point
        _ => (random::polytope(rng, d), ClosedSet::point(random::point(rng, d, 1.5))),
    }
}

/// `(C1, C2, vertices of C2)` with `C2` described by finitely many vertices
/// and `C1` convex in the same norm, so the supremum of `rho(., C1)` over
/// `C2` is a maximum over the vertices.
fn triangle_pair<R: Rng>(rng: &mut R, d: usize) -> (ClosedSet, ClosedSet, Vec<Vector>) {
    let (c1, c2) = match rng.random_range(0..5) {
        0 => (random::polytope(rng, d), random::polytope(rng, d)),
        1 => (random::ball(rng, d, NormKind::L2), random::polytope(rng, d)),
        2 => (random::flat(rng, d), random::polytope(rng, d)),
        3 => (random::ball(rng, d, NormKind::L1), random::ball(rng, d, NormKind::L1)),
        _ => (
            random::ball(rng, d, NormKind::LInf),
            random::ball(rng, d, NormKind::LInf),
        ),
    };
    let verts = c2.as_polytope_exact().expect("vertex description");
    (c1, c2, verts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_rho_passes_every_axiom() {
        for d in 1..=3 {
            let r = axiom_suite(&Euclidean, &SuiteConfig::new(42, d, 200));
            assert_eq!(r.entries.len(), 9);
            for e in &r.entries {
                assert!(e.pass, "d = {d}: {e:?}");
                assert!(e.worst_violation <= 1e-9);
            }
        }
    }

    #[test]
    fn shifted_rho_fails_n1() {
        let shifted = |x: &Vector, c: &ClosedSet| rho_unchecked(x, c) + 1.0;
        let r = axiom_suite(&shifted, &SuiteConfig::new(42, 2, 200));
        assert!(!r.entry("N1").unwrap().pass);
    }

    #[test]
    fn squared_rho_fails_n5a() {
        let squared = |x: &Vector, c: &ClosedSet| rho_unchecked(x, c).powi(2);
        let r = axiom_suite(&squared, &SuiteConfig::new(42, 2, 200));
        let e = r.entry("N5a").unwrap();
        assert!(!e.pass);
        assert!(e.witness.is_some());
    }

    #[test]
    fn suite_is_deterministic() {
        let a = axiom_suite(&Euclidean, &SuiteConfig::new(9, 2, 30));
        let b = axiom_suite(&Euclidean, &SuiteConfig::new(9, 2, 30));
        assert_eq!(a, b);
    }
}
