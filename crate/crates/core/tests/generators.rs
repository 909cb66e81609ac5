use prv_core::arena::Vertex;
use prv_core::emptiness::extended_payoff;
use prv_core::generators::{gen_from_cnf, gen_intersection, gen_random, CnfFormula, CnfLayout, Literal, RandomSpec};
use prv_core::lattice::Antichain;
use prv_core::oracle::{enumerate_inf_sets, oracle_pareto_set, oracle_verify};
use prv_core::verifier::{antichain_verify, compute_pareto_set, counterexample_verify};

fn small_formulas() -> Vec<CnfFormula> {
    let signed: Vec<(usize, Vec<Vec<i64>>)> = vec![
        (1, vec![vec![1]]),
        (1, vec![vec![1], vec![-1]]),
        (2, vec![vec![1, 2], vec![-1, -2]]),
        (2, vec![vec![1, -2], vec![-1, 2]]),
        (2, vec![vec![1, 2, -1], vec![-2]]),
        (2, vec![vec![1], vec![-1, 2]]),
    ];
    signed
        .into_iter()
        .map(|(m, cs)| {
            let refs: Vec<&[i64]> = cs.iter().map(Vec::as_slice).collect();
            CnfFormula::from_signed(m, &refs).unwrap()
        })
        .collect()
}

#[test]
fn intersection_pareto_set_does_not_depend_on_copies() {
    let expected = Antichain::ceil(["(1,0,1,1)".parse().unwrap(), "(1,1,0,0)".parse().unwrap()]);
    for k in [1, 2, 3, 5] {
        let arena = gen_intersection(k, false, false).unwrap();
        assert!(arena.validate().is_empty());
        assert_eq!(compute_pareto_set(&arena).unwrap(), expected, "k = {k}");
        assert!(antichain_verify(&arena).unwrap().positive);
        assert!(counterexample_verify(&arena).unwrap().positive);
    }
}

#[test]
fn per_copy_family_agrees_with_oracle_at_two_copies() {
    for negative in [false, true] {
        let arena = gen_intersection(2, true, negative).unwrap();
        assert_eq!(arena.vertex_count(), 45);
        assert_eq!(arena.objective_count(), 6);
        let oracle = oracle_verify(&arena).unwrap();
        assert_eq!(oracle.positive, !negative);
        assert_eq!(antichain_verify(&arena).unwrap().positive, !negative);
        assert_eq!(counterexample_verify(&arena).unwrap().positive, !negative);
        assert_eq!(compute_pareto_set(&arena).unwrap(), oracle_pareto_set(&arena).unwrap());
    }
}

#[test]
fn intersection_inf_sets_are_the_self_loops() {
    let arena = gen_intersection(1, false, false).unwrap();
    let sets = enumerate_inf_sets(&arena).unwrap();
    assert_eq!(sets.len(), 22);
    assert!(sets.iter().all(|s| s.len() == 1));
    let distinct: std::collections::BTreeSet<_> = sets.iter().map(|s| extended_payoff(&arena, s).payoff).collect();
    assert_eq!(distinct.len(), 9);
}

#[test]
fn all_generated_arenas_validate() {
    for seed in 0..50 {
        let spec = RandomSpec::new(1 + seed as usize % 40, 1 + seed as usize % 5, 2 * (seed as u32 % 3), seed);
        assert!(gen_random(&spec).unwrap().validate().is_empty());
    }
    for f in small_formulas() {
        assert!(gen_from_cnf(&f).validate().is_empty());
    }
}

#[test]
fn reduction_objective_count() {
    for f in small_formulas() {
        let arena = gen_from_cnf(&f);
        assert_eq!(arena.objective_count(), 1 + 2 * f.variable_count() + f.literal_count());
        assert_eq!(oracle_verify(&arena).unwrap().positive, !f.is_satisfiable(), "{f}");
    }
}

/// Vertices of one stable run around the cycle of `part`, following the
/// assignment.
fn stable_cycle(layout: &CnfLayout, part: Option<usize>, assignment: &[bool]) -> Vec<Vertex> {
    let mut set = vec![part.map_or(CnfLayout::V1, |i| layout.clause_start(i))];
    for (k, &value) in assignment.iter().enumerate() {
        set.push(layout.literal_vertex(part, Literal { variable: k + 1, positive: value }));
        set.push(layout.junction(part, k + 1));
    }
    set.sort_unstable();
    set
}

#[test]
fn unstable_cycles_are_never_pareto_optimal() {
    for f in small_formulas() {
        let arena = gen_from_cnf(&f);
        let layout = CnfLayout { variables: f.variable_count(), clauses: f.clauses().len() };
        let pareto = oracle_pareto_set(&arena).unwrap();
        let mut unstable = 0;
        for set in enumerate_inf_sets(&arena).unwrap() {
            let part = if set.iter().all(|&v| !layout.in_second_part(v)) {
                None
            } else {
                Some((0..layout.clauses).find(|&i| set.contains(&layout.clause_start(i))).unwrap())
            };
            let is_unstable = (1..=f.variable_count()).any(|x| {
                let pos = layout.literal_vertex(part, Literal { variable: x, positive: true });
                let neg = layout.literal_vertex(part, Literal { variable: x, positive: false });
                set.contains(&pos) && set.contains(&neg)
            });
            if is_unstable {
                unstable += 1;
                let payoff = extended_payoff(&arena, &set).payoff;
                assert!(!pareto.contains(&payoff), "{f}: unstable {set:?} has Pareto-optimal payoff {payoff}");
            }
        }
        assert!(unstable > 0);
    }
}

#[test]
fn stable_clause_cycles_miss_only_their_own_literals() {
    for f in small_formulas() {
        let arena = gen_from_cnf(&f);
        let m = f.variable_count();
        let layout = CnfLayout { variables: m, clauses: f.clauses().len() };
        for bits in 0u32..1 << m {
            let assignment: Vec<bool> = (0..m).map(|k| bits >> k & 1 == 1).collect();
            for i in 0..f.clauses().len() {
                let e = extended_payoff(&arena, &stable_cycle(&layout, Some(i), &assignment));
                assert!(e.won && e.payoff.get(0));
                for (ci, c) in f.clauses().iter().enumerate() {
                    for j in 0..c.len() {
                        let bit = CnfLayout::occurrence_objective(&f, ci, j) - 1;
                        assert_eq!(e.payoff.get(bit), ci != i, "{f}: clause {i}, occurrence ({ci},{j})");
                    }
                }
                for x in 1..=m {
                    let value = assignment[x - 1];
                    let own = layout.literal_objective(Literal { variable: x, positive: value }) - 1;
                    let other = layout.literal_objective(Literal { variable: x, positive: !value }) - 1;
                    assert!(e.payoff.get(own) && !e.payoff.get(other));
                }
            }
            let first = extended_payoff(&arena, &stable_cycle(&layout, None, &assignment));
            assert!(!first.won && !first.payoff.get(0));
        }
    }
}
