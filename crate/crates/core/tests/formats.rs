use prv_core::arena::{product, GameArena, MooreMachine, Player};
use prv_core::generators::{gen_from_cnf, gen_intersection, gen_random, RandomSpec};
use prv_core::io::{parse_arena, parse_dimacs, parse_lasso, parse_moore, write_arena, write_dimacs, write_moore};
use prv_core::verifier::{compute_pareto_set, counterexample_verify, verify, Algorithm};

#[test]
fn intersection_round_trip_keeps_verdict_and_pareto_set() {
    for negative in [false, true] {
        let arena = gen_intersection(1, false, negative).unwrap();
        let text = write_arena(&arena);
        let back = parse_arena(&text).unwrap();
        assert_eq!(back, arena);
        assert_eq!(write_arena(&back), text);
        for alg in Algorithm::ALL {
            assert_eq!(verify(&back, alg).unwrap().positive, !negative);
        }
        assert_eq!(compute_pareto_set(&back).unwrap(), compute_pareto_set(&arena).unwrap());
    }
}

#[test]
fn random_serialization_is_byte_stable() {
    let spec = RandomSpec::new(40, 3, 4, 99);
    assert_eq!(write_arena(&gen_random(&spec).unwrap()), write_arena(&gen_random(&spec).unwrap()));
    let back = parse_arena(&write_arena(&gen_random(&spec).unwrap())).unwrap();
    assert_eq!(back, gen_random(&spec).unwrap());
}

#[test]
fn printed_counterexample_parses_back() {
    let arena = gen_intersection(1, false, true).unwrap();
    let r = counterexample_verify(&arena).unwrap();
    let lasso = r.counterexample.unwrap();
    let back = parse_lasso(&lasso.to_string()).unwrap();
    assert_eq!(back, lasso);
    back.validate_in(&arena).unwrap();
}

#[test]
fn dimacs_reduction_round_trip() {
    let f = parse_dimacs("p cnf 2 2\n1 2 0\n-1 -2 0\n").unwrap();
    assert_eq!(parse_dimacs(&write_dimacs(&f)).unwrap(), f);
    assert_eq!(gen_from_cnf(&f).objective_count(), 1 + 4 + 4);
}

#[test]
fn strategy_product_from_files() {
    // System vertex 0 chooses between a won loop at 1 and a lost loop at 2.
    let arena = GameArena::try_new(
        vec![Player::System, Player::Environment, Player::Environment],
        vec![vec![1, 2], vec![1], vec![2]],
        0,
        vec![vec![1, 0], vec![0, 1], vec![1, 0]],
        None,
    )
    .unwrap();
    let arena = parse_arena(&write_arena(&arena)).unwrap();
    let good = parse_moore("MOORE 1\nSTATES 1\nINITIAL 0\nC 0 0 1\nEND\n").unwrap();
    let bad = MooreMachine::memoryless([(0, 2)]);
    assert_eq!(parse_moore(&write_moore(&bad)).unwrap(), bad);
    assert!(verify(&product(&arena, &good).unwrap(), Algorithm::Counterexample).unwrap().positive);
    assert!(!verify(&product(&arena, &bad).unwrap(), Algorithm::Counterexample).unwrap().positive);
}
