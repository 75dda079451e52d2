//! Fixed benchmark inputs, built from seeded generators so every run times
//! the same work.

use kappa_core::random::{self as gen, rng};
use kappa_core::{ChainFamily, ClosedSet, FunctionOnT, Operator, OperatorSet, ProbeFamily, Vector};

/// `n` random planar polytopes.
pub fn polygons(seed: u64, n: usize) -> Vec<ClosedSet> {
    let mut g = rng(seed);
    (0..n).map(|_| gen::polytope(&mut g, 2)).collect()
}

/// `n` random points in `[-4, 4]^d`.
pub fn points(seed: u64, d: usize, n: usize) -> Vec<Vector> {
    let mut g = rng(seed);
    (0..n).map(|_| gen::point(&mut g, d, 4.0)).collect()
}

/// An operator, a finite set of four operators and a probe family in R^2.
pub fn operator_case(seed: u64) -> (Operator, OperatorSet, ProbeFamily) {
    let a = Operator::new(vec![vec![1.0, 0.5], vec![-0.3, 2.0]]).expect("invertible");
    let ops = (1..=4)
        .map(|k| Operator::new(vec![vec![k as f64, 0.1], vec![0.0, 1.0]]).expect("invertible"))
        .collect();
    let probes = ProbeFamily::generate(seed, 2, 8).expect("probe family");
    (a, OperatorSet::finite(ops), probes)
}

/// A function on `n` points with two overlapping chains.
pub fn chain_case(n: usize) -> (FunctionOnT, ChainFamily) {
    let ids: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
    let values = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), ((i * 7919) % 13) as f64 - 6.0))
        .collect();
    let evens = ids.iter().step_by(2).cloned().collect();
    let chains = ChainFamily::new(vec![ids.clone(), evens]);
    (FunctionOnT::new(values).expect("finite values"), chains)
}
