use kappa_core::random::{self as gen, rng};
use kappa_core::{rho_L_bracket, rho_L_sampled, Operator, OperatorSet, ProbeFamily};
use proptest::prelude::*;
use rand::Rng;

fn invertible<R: Rng>(g: &mut R, d: usize) -> Operator {
    loop {
        if let Ok(op) = Operator::new(gen::matrix(g, d)) {
            if op.condition_number() < 1e3 {
                return op;
            }
        }
    }
}

fn value(a: &Operator, s: &OperatorSet, p: &ProbeFamily) -> f64 {
    rho_L_sampled(a, s, p).unwrap().value()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn members_have_zero_norm(seed in any::<u64>(), d in 1usize..4) {
        let mut g = rng(seed);
        let p = ProbeFamily::generate(seed, d, 6).unwrap();
        let ops: Vec<Operator> = (0..3).map(|_| invertible(&mut g, d)).collect();
        let a = ops[1].clone();
        prop_assert_eq!(value(&a, &OperatorSet::finite(ops), &p), 0.0);
    }

    #[test]
    fn monotone_in_the_set(seed in any::<u64>()) {
        let mut g = rng(seed);
        let p = ProbeFamily::generate(seed, 2, 6).unwrap();
        let ops: Vec<Operator> = (0..4).map(|_| invertible(&mut g, 2)).collect();
        let a = invertible(&mut g, 2);
        let big = value(&a, &OperatorSet::finite(ops.clone()), &p);
        let small = value(&a, &OperatorSet::finite(ops[..2].to_vec()), &p);
        prop_assert!(big <= small + 1e-12);
    }

    #[test]
    fn more_probes_never_decrease(seed in any::<u64>()) {
        let mut g = rng(seed);
        let p = ProbeFamily::generate(seed, 2, 8).unwrap();
        let fewer = ProbeFamily::new(p.probes()[..4].to_vec()).unwrap();
        let s = OperatorSet::finite((0..2).map(|_| invertible(&mut g, 2)).collect());
        let a = invertible(&mut g, 2);
        prop_assert!(value(&a, &s, &fewer) <= value(&a, &s, &p) + 1e-12);
    }

    #[test]
    fn scaling_is_homogeneous(seed in any::<u64>(), lambda in 0.2f64..3.0) {
        let mut g = rng(seed);
        let p = ProbeFamily::generate(seed, 2, 6).unwrap();
        let ops: Vec<Operator> = (0..2).map(|_| invertible(&mut g, 2)).collect();
        let a = invertible(&mut g, 2);
        let scaled = OperatorSet::finite(ops.iter().map(|o| o.scale(lambda).unwrap()).collect());
        let lhs = value(&a.scale(lambda).unwrap(), &scaled, &p);
        let rhs = lambda * value(&a, &OperatorSet::finite(ops), &p);
        prop_assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + rhs));
    }
}

#[test]
fn empty_set_is_infinite() {
    let p = ProbeFamily::generate(1, 2, 4).unwrap();
    assert!(rho_L_sampled(&Operator::identity(2), &OperatorSet::Empty, &p)
        .unwrap()
        .is_infinite());
}

#[test]
fn singular_operators_are_rejected() {
    assert!(Operator::new(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).is_err());
}

#[test]
fn ball_bracket_contains_center_distance() {
    let p = ProbeFamily::generate(2, 2, 6).unwrap();
    let center = Operator::new(vec![vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let s = OperatorSet::ball(center.clone(), 0.1);
    let a = Operator::identity(2);
    let b = rho_L_bracket(&a, &s, &p).unwrap();
    let at_center = value(&a, &OperatorSet::finite(vec![center]), &p);
    assert!(b.fine <= b.coarse + 1e-12);
    assert!(b.coarse <= at_center + 1e-12);
}
