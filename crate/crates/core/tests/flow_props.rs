use kappa_core::random::rng;
use kappa_core::{
    metric_d, solve_point_ode, solve_set_ode, solve_set_ode_from, Builtin, ClosedSet, InitialGuess, SolverConfig,
    Vector, VectorField,
};
use kappa_oracles::{mat, rk4};
use rand::Rng;

fn cfg(h: f64) -> SolverConfig {
    SolverConfig {
        h,
        ..SolverConfig::default()
    }
}

#[test]
fn point_solver_matches_closed_form() {
    let mut g = rng(12);
    for _ in 0..5 {
        let p: Vec<Vec<f64>> = loop {
            let p: Vec<Vec<f64>> = (0..2)
                .map(|_| (0..2).map(|_| g.random_range(-1.0..1.0)).collect())
                .collect();
            if (p[0][0] * p[1][1] - p[0][1] * p[1][0]).abs() > 0.3 {
                break p;
            }
        };
        let lambda: Vec<f64> = (0..2).map(|_| g.random_range(-1.0..1.0)).collect();
        let pinv = mat::inverse(&p).unwrap();
        let diag = vec![vec![lambda[0], 0.0], vec![0.0, lambda[1]]];
        let l = mat::mul(&mat::mul(&p, &diag), &pinv);
        let x0 = [1.0, -0.5];
        let tr = solve_point_ode(&VectorField::affine(l, None), &Vector::from(x0), 1.0, &cfg(1e-3)).unwrap();
        let want = mat::apply(&mat::exp_diagonalizable(&p, &lambda, 1.0), &x0);
        assert!(tr.last().distance(&Vector::from(want)) < 1e-6);
    }
}

#[test]
fn pendulum_matches_rk4() {
    let f = VectorField::Builtin(Builtin::Pendulum);
    let tr = solve_point_ode(&f, &Vector::from([1.0, 0.0]), 2.0, &cfg(1e-3)).unwrap();
    let want = rk4(|_, x| vec![x[1], -x[0].sin()], &[1.0, 0.0], 2.0, 20_000);
    assert!(tr.last().distance(&Vector::from(want)) < 1e-5);
}

#[test]
fn zero_field_is_stationary() {
    let a0 = ClosedSet::polytope([[0.0, 0.0], [1.0, 0.2], [0.3, 1.0]]);
    let sol = solve_set_ode(&VectorField::Builtin(Builtin::Zero), &a0, 0.5, &cfg(1e-2)).unwrap();
    for s in &sol.trajectory.sets {
        assert_eq!(metric_d(s, &a0).unwrap().value(), 0.0);
    }
}

#[test]
fn inclusion_is_preserved_for_affine_fields() {
    let f = VectorField::affine(vec![vec![0.3, -0.5], vec![0.4, 0.1]], Some(Vector::from([0.1, 0.0])));
    let small = ClosedSet::boxed(&[-0.5, -0.5], &[0.5, 0.5]);
    let big = ClosedSet::polytope([[-1.0, -1.0], [1.5, -1.0], [1.0, 1.0], [-1.0, 1.2]]);
    let c = cfg(1e-2);
    let a = solve_set_ode(&f, &small, 0.5, &c).unwrap().trajectory;
    let b = solve_set_ode(&f, &big, 0.5, &c).unwrap().trajectory;
    for (sa, sb) in a.sets.iter().zip(&b.sets) {
        for v in sa.as_polytope_exact().unwrap() {
            assert!(sb.contains(&v, 1e-7));
        }
    }
}

#[test]
fn initial_guess_does_not_matter() {
    let f = VectorField::affine(vec![vec![1.0, 0.0], vec![0.0, 2.0]], None);
    let a0 = ClosedSet::boxed(&[-1.0, -1.0], &[1.0, 1.0]);
    let c = cfg(1e-2);
    let one = solve_set_ode_from(&f, &a0, 0.5, &c, InitialGuess::Constant).unwrap();
    let two = solve_set_ode_from(&f, &a0, 0.5, &c, InitialGuess::Inflated(2.0)).unwrap();
    for (p, q) in one.trajectory.sets.iter().zip(&two.trajectory.sets) {
        assert!(metric_d(p, q).unwrap().value() <= 10.0 * c.picard_tol);
    }
}

#[test]
fn rotation_preserves_a_centered_disk() {
    let f = VectorField::Builtin(Builtin::Rotation);
    let a0 = ClosedSet::ball([0.0, 0.0], 1.0);
    let sol = solve_set_ode(&f, &a0, 0.3, &cfg(1e-2)).unwrap();
    assert!(sol
        .segments
        .iter()
        .all(|s| s.contraction.ratio <= s.contraction.bound + 1e-6));
}

#[test]
fn scenario_rejects_bad_step() {
    let f = VectorField::Builtin(Builtin::Zero);
    let bad = cfg(-1.0);
    assert!(solve_point_ode(&f, &Vector::from([0.0]), 1.0, &bad).is_err());
}
