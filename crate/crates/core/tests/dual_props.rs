use kappa_core::random::{self as gen, rng};
use kappa_core::{
    dual_kappa_norm_sampled, kappa_form, metric_d, polar, rho, rho_tilde_sampled, ClosedSet, NormKind, TestFamily,
    Vector,
};
use kappa_oracles::geom2;
use proptest::prelude::*;
use rand::Rng;

fn pts2(c: &ClosedSet) -> Vec<geom2::P> {
    c.as_polytope_exact()
        .unwrap()
        .iter()
        .map(|v| [v.as_slice()[0], v.as_slice()[1]])
        .collect()
}

fn p2(v: &Vector) -> geom2::P {
    [v.as_slice()[0], v.as_slice()[1]]
}

/// Bounded convex set whose kappa-norm is the Euclidean distance.
fn euclidean_convex<R: Rng>(g: &mut R, dim: usize) -> ClosedSet {
    match g.random_range(0..3) {
        0 => gen::polytope(g, dim),
        1 => gen::ball(g, dim, NormKind::L2),
        _ => ClosedSet::point(gen::point(g, dim, 3.0)),
    }
}

/// Symmetric polygon with the origin inside: hull of `+-v_i`.
fn balanced_polygon<R: Rng>(g: &mut R) -> ClosedSet {
    let k = g.random_range(2..5);
    let mut vs = Vec::new();
    for _ in 0..k {
        let a: f64 = g.random_range(0.0..std::f64::consts::PI);
        let r: f64 = g.random_range(0.5..2.0);
        vs.push([r * a.cos(), r * a.sin()]);
        vs.push([-r * a.cos(), -r * a.sin()]);
    }
    vs.push([0.4, 0.0]);
    vs.push([-0.4, 0.0]);
    vs.push([0.0, 0.4]);
    vs.push([0.0, -0.4]);
    ClosedSet::polytope(vs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn form_bounded_by_product_of_norms(seed in any::<u64>(), dim in 1usize..4) {
        let mut g = rng(seed);
        let a = euclidean_convex(&mut g, dim);
        let b = euclidean_convex(&mut g, dim);
        let x = gen::point(&mut g, dim, 4.0);
        let y = gen::point(&mut g, dim, 4.0);
        let f = kappa_form(&x, &a, &y, &b).unwrap().value();
        let bound = rho(&x, &a).unwrap().value() * rho(&y, &b).unwrap().value();
        prop_assert!(f <= bound + 1e-12, "{} > {}", f, bound);
    }

    #[test]
    fn sampled_dual_norms_below_rho(seed in any::<u64>(), dim in 1usize..4) {
        let mut g = rng(seed);
        let t = TestFamily::generate(seed, dim, 16).unwrap();
        let a = euclidean_convex(&mut g, dim);
        let x = gen::point(&mut g, dim, 4.0);
        let r = rho(&x, &a).unwrap().value();
        prop_assert!(rho_tilde_sampled(&x, &a, &t).unwrap().value() <= r + 1e-12);
        prop_assert!(dual_kappa_norm_sampled(&x, &a, &t).unwrap().value() <= r + 1e-12);
    }

    #[test]
    fn sampled_dual_norm_respects_inclusion(seed in any::<u64>()) {
        let mut g = rng(seed);
        let t = TestFamily::generate(seed ^ 1, 2, 16).unwrap();
        let b = gen::polytope(&mut g, 2);
        let bigger = ClosedSet::polytope(
            b.as_polytope_exact().unwrap().into_iter().chain([gen::point(&mut g, 2, 4.0)]).collect::<Vec<_>>(),
        );
        let y = gen::point(&mut g, 2, 4.0);
        let small = dual_kappa_norm_sampled(&y, &bigger, &t).unwrap().value();
        let large = dual_kappa_norm_sampled(&y, &b, &t).unwrap().value();
        prop_assert!(small <= large + 1e-12);
    }

    #[test]
    fn polar_is_antitone(seed in any::<u64>(), s in 1.0f64..2.0) {
        let mut g = rng(seed);
        let a = balanced_polygon(&mut g);
        let b = kappa_core::affine_transform(s, &Vector::zeros(2), &a).unwrap();
        let pa = polar(&a).unwrap();
        let pb = polar(&b).unwrap();
        for v in pb.as_polytope_exact().unwrap() {
            prop_assert!(pa.contains(&v, 1e-9));
        }
    }

    #[test]
    fn bipolar_identity(seed in any::<u64>()) {
        let mut g = rng(seed);
        let a = balanced_polygon(&mut g);
        let back = polar(&polar(&a).unwrap()).unwrap();
        prop_assert!(metric_d(&a, &back).unwrap().value() <= 1e-9);
    }
}

#[test]
fn form_matches_grid_oracle() {
    let mut g = rng(21);
    for _ in 0..8 {
        let a = gen::polytope(&mut g, 2);
        let b = gen::polytope(&mut g, 2);
        let x = gen::point(&mut g, 2, 3.0);
        let y = gen::point(&mut g, 2, 3.0);
        let got = kappa_form(&x, &a, &y, &b).unwrap().value();
        let (ha, hb) = (geom2::hull(&pts2(&a)), geom2::hull(&pts2(&b)));
        let want = geom2::kappa_form_grid(p2(&x), &ha, p2(&y), &hb, 1e-2);
        assert!((got - want).abs() < 1e-1, "{got} vs {want}");
        assert!(got <= want + 1e-9, "{got} above sampled {want}");
    }
}

#[test]
fn polar_matches_halfspace_oracle() {
    let mut g = rng(4);
    for _ in 0..20 {
        let a = balanced_polygon(&mut g);
        let want = ClosedSet::polytope(geom2::polar_by_halfspaces(&pts2(&a)));
        assert!(metric_d(&polar(&a).unwrap(), &want).unwrap().value() < 1e-9);
    }
}

#[test]
fn polar_of_balls_and_subspaces() {
    let b = polar(&ClosedSet::ball([0.0, 0.0, 0.0], 4.0)).unwrap();
    assert!(metric_d(&b, &ClosedSet::ball([0.0, 0.0, 0.0], 0.25)).unwrap().value() < 1e-12);
    let line = ClosedSet::span(&[Vector::from([1.0, 0.0])], 2);
    let p = polar(&line).unwrap();
    assert!(p.contains(&Vector::from([0.0, 7.0]), 1e-12));
    assert!(!p.contains(&Vector::from([1.0, 0.0]), 1e-9));
}

#[test]
fn form_is_zero_when_interval_straddles() {
    let a = ClosedSet::boxed(&[-1.0, -1.0], &[1.0, 1.0]);
    let x = Vector::zeros(2);
    let v = kappa_form(&x, &a, &Vector::from([5.0, 0.0]), &ClosedSet::point([6.0, 0.0])).unwrap();
    assert_eq!(v.value(), 0.0);
    let empty = kappa_form(&x, &a, &x, &ClosedSet::Empty).unwrap();
    assert!(empty.is_infinite());
}
