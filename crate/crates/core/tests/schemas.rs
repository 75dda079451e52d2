use kappa_core::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fmt::Debug;

fn round_trip<T: Serialize + DeserializeOwned + PartialEq + Debug>(v: &T) {
    let text = serde_json::to_string(v).unwrap();
    let back: T = serde_json::from_str(&text).unwrap();
    assert_eq!(&back, v, "{text}");
}

#[test]
fn closed_sets_round_trip() {
    let sets = [
        ClosedSet::ball([1.0, 2.0], 0.5),
        ClosedSet::ball_with([0.0, 0.0], 2.0, NormKind::L1),
        ClosedSet::polytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        ClosedSet::span(&[Vector::from([0.6, 0.8])], 2),
        ClosedSet::union(vec![ClosedSet::point([1.0]), ClosedSet::ball([3.0], 1.0)]),
        ClosedSet::Empty,
    ];
    for s in &sets {
        round_trip(s);
    }
    let parsed: ClosedSet = serde_json::from_str(r#"{"type":"ball","center":[0,0],"radius":1}"#).unwrap();
    assert_eq!(parsed, ClosedSet::ball([0.0, 0.0], 1.0));
}

#[test]
fn invalid_sets_fail_to_parse() {
    for bad in [
        r#"{"type":"ball","center":[0,0],"radius":-1}"#,
        r#"{"type":"polytope","vertices":[]}"#,
        r#"{"type":"subspace","basis":[[1,1]],"offset":[0,0]}"#,
        r#"{"type":"cube"}"#,
    ] {
        assert!(serde_json::from_str::<ClosedSet>(bad).is_err(), "{bad}");
    }
}

#[test]
fn kappa_values_keep_infinity() {
    let v = KappaValue::new(f64::INFINITY);
    assert_eq!(serde_json::to_string(&v).unwrap(), "\"inf\"");
    round_trip(&v);
    round_trip(&KappaValue::new(1.25));
}

#[test]
fn duality_and_operator_schemas_round_trip() {
    round_trip(&TestFamily::generate(3, 2, 8).unwrap());
    round_trip(&ProbeFamily::generate(3, 2, 4).unwrap());
    let op = Operator::new(vec![vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
    round_trip(&op);
    round_trip(&OperatorSet::finite(vec![op.clone(), Operator::identity(2)]));
    round_trip(&OperatorSet::ball(op, 0.3));
    assert!(serde_json::from_str::<Operator>(r#"{"matrix":[[1,2],[2,4]]}"#).is_err());
}

#[test]
fn order_schemas_round_trip() {
    let p: IntervalOrder = serde_json::from_str(r#"{"elements":["a","b","c"],"less":[["a","b"],["a","c"]]}"#).unwrap();
    round_trip(&p);
    round_trip(&find_representation(&p).unwrap());
    let f = FunctionOnT::from_pairs([("a", 1.0), ("b", -2.0)]).unwrap();
    round_trip(&f);
    let lambda = ChainFamily::from_ids(&[&["a", "b"]]);
    round_trip(&lambda);
    round_trip(&build_constraint_set(&f, &lambda, &[0.5]).unwrap());
    assert!(serde_json::from_str::<IntervalOrder>(r#"{"elements":["a"],"less":[["a","a"]]}"#).is_err());
}

#[test]
fn scenario_pieces_round_trip() {
    round_trip(&SolverConfig::default());
    let f: VectorField = serde_json::from_str(r#"{"affine":{"L":[[0,-1],[1,0]]}}"#).unwrap();
    assert!(f.as_affine(2).is_some());
    let b: VectorField = serde_json::from_str(r#"{"builtin":"rotation"}"#).unwrap();
    assert!(matches!(b, VectorField::Builtin(Builtin::Rotation)));
}
