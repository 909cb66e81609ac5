//! Brute-force reference semantics for small arenas.
//!
//! The inf-set of a play is a reachable vertex set inducing a strongly
//! connected subgraph with at least one edge, and every such set is the
//! inf-set of some lasso. The oracle enumerates these sets directly and
//! derives payoffs, Pareto sets and verdicts from them without touching
//! the emptiness engine.
//!
//! Inf-sets never cross mutual-reachability classes, so subsets are
//! enumerated class by class and the size cap bounds the largest class.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::acceptance::Acceptance;
use crate::arena::{GameArena, Vertex};
use crate::emptiness::lasso_through;
use crate::lattice::{Antichain, ExtendedPayoff, Payoff};
use crate::verifier::{VerificationResult, VerificationStats};

pub const DEFAULT_CAP: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("a strongly connected class has {size} vertices, above the oracle cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
}

fn forward_closure(arena: &GameArena, from: Vertex) -> Vec<bool> {
    let mut seen = vec![false; arena.vertex_count()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &w in arena.successors(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Reachable vertices grouped into mutual-reachability classes.
fn classes(arena: &GameArena) -> Vec<Vec<Vertex>> {
    let reachable = forward_closure(arena, arena.initial());
    let closures: Vec<Option<Vec<bool>>> =
        arena.vertices().map(|v| reachable[v].then(|| forward_closure(arena, v))).collect();
    let mut assigned = vec![false; arena.vertex_count()];
    let mut out = Vec::new();
    for v in arena.vertices().filter(|&v| reachable[v]) {
        if assigned[v] {
            continue;
        }
        let from_v = closures[v].as_ref().expect("reachable");
        let class: Vec<Vertex> = arena
            .vertices()
            .filter(|&w| from_v[w] && closures[w].as_ref().is_some_and(|c| c[v]))
            .collect();
        for &w in &class {
            assigned[w] = true;
        }
        out.push(class);
    }
    out
}

/// Whether the subgraph induced by `members` (a bitmask over `class`) is
/// strongly connected and has an edge.
fn induces_cycle(arena: &GameArena, class: &[Vertex], members: u64) -> bool {
    let local = |w: Vertex| class.iter().position(|&c| c == w);
    let inside = |i: usize| members >> i & 1 == 1;
    let start = members.trailing_zeros() as usize;

    let mut forward = 1u64 << start;
    let mut stack = vec![start];
    let mut has_edge = false;
    while let Some(i) = stack.pop() {
        for &w in arena.successors(class[i]) {
            if let Some(j) = local(w).filter(|&j| inside(j)) {
                has_edge = true;
                if forward >> j & 1 == 0 {
                    forward |= 1 << j;
                    stack.push(j);
                }
            }
        }
    }
    if !has_edge || forward != members {
        return false;
    }

    let mut backward = 1u64 << start;
    let mut changed = true;
    while changed {
        changed = false;
        for (i, &vertex) in class.iter().enumerate() {
            if !inside(i) || backward >> i & 1 == 1 {
                continue;
            }
            let hits = arena.successors(vertex).iter().any(|&w| local(w).is_some_and(|j| backward >> j & 1 == 1));
            if hits {
                backward |= 1 << i;
                changed = true;
            }
        }
    }
    backward == members
}

pub fn enumerate_inf_sets(arena: &GameArena) -> Result<Vec<Vec<Vertex>>, OracleError> {
    enumerate_inf_sets_with_cap(arena, DEFAULT_CAP)
}

/// All possible inf-sets, each sorted, ordered by class then by bitmask.
pub fn enumerate_inf_sets_with_cap(arena: &GameArena, cap: usize) -> Result<Vec<Vec<Vertex>>, OracleError> {
    let classes = classes(arena);
    if let Some(size) = classes.iter().map(Vec::len).find(|&s| s > cap.min(63)) {
        return Err(OracleError::CapExceeded { size, cap });
    }
    let mut out = Vec::new();
    for class in &classes {
        for members in 1u64..(1 << class.len()) {
            if induces_cycle(arena, class, members) {
                let mut set: Vec<Vertex> =
                    (0..class.len()).filter(|&i| members >> i & 1 == 1).map(|i| class[i]).collect();
                set.sort_unstable();
                out.push(set);
            }
        }
    }
    Ok(out)
}

fn satisfies(arena: &GameArena, set: &[Vertex], objective: usize) -> bool {
    set.iter().map(|&v| arena.priority(v, objective)).min().is_some_and(|p| p.is_multiple_of(2))
}

fn extended_of(arena: &GameArena, set: &[Vertex]) -> ExtendedPayoff {
    let bits: Vec<bool> = (1..=arena.objective_count()).map(|i| satisfies(arena, set, i)).collect();
    ExtendedPayoff { won: satisfies(arena, set, 0), payoff: Payoff::from_bools(&bits).expect("at most 64 objectives") }
}

/// Every extended payoff realized by some play.
pub fn oracle_realizable(arena: &GameArena) -> Result<BTreeSet<ExtendedPayoff>, OracleError> {
    Ok(enumerate_inf_sets(arena)?.iter().map(|s| extended_of(arena, s)).collect())
}

pub fn oracle_pareto_set(arena: &GameArena) -> Result<Antichain, OracleError> {
    Ok(Antichain::ceil(oracle_realizable(arena)?.into_iter().map(|e| e.payoff)))
}

/// Decides the instance by enumeration. A negative answer carries a lost
/// play whose payoff is Pareto-optimal; a positive one carries the Pareto
/// set as certificate.
pub fn oracle_verify(arena: &GameArena) -> Result<VerificationResult, OracleError> {
    let sets = enumerate_inf_sets(arena)?;
    let pareto = Antichain::ceil(sets.iter().map(|s| extended_of(arena, s).payoff));
    let stats = VerificationStats { peak_antichain: pareto.len(), ..Default::default() };
    let lost = sets.iter().find(|s| {
        let e = extended_of(arena, s);
        !e.won && pareto.contains(&e.payoff)
    });
    Ok(match lost {
        Some(set) => VerificationResult {
            positive: false,
            counterexample: Some(lasso_through(arena, set)),
            certificate: None,
            antichain: pareto,
            stats,
        },
        None => VerificationResult {
            positive: true,
            counterexample: None,
            certificate: Some(pareto.clone()),
            antichain: pareto,
            stats,
        },
    })
}

/// Whether some play's inf-set satisfies `f`.
pub fn oracle_check_formula(arena: &GameArena, f: &Acceptance) -> Result<bool, OracleError> {
    Ok(enumerate_inf_sets(arena)?.iter().any(|s| f.eval_on(arena, s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::Player;

    fn arena(succ: Vec<Vec<usize>>, prio: Vec<Vec<u32>>) -> GameArena {
        let n = succ.len();
        GameArena::try_new(vec![Player::Environment; n], succ, 0, prio, None).unwrap()
    }

    #[test]
    fn self_loop_and_two_cycle() {
        let a = arena(vec![vec![0]], vec![vec![0, 0]]);
        assert_eq!(enumerate_inf_sets(&a).unwrap(), vec![vec![0]]);

        let b = arena(vec![vec![1], vec![0]], vec![vec![0, 0]; 2]);
        assert_eq!(enumerate_inf_sets(&b).unwrap(), vec![vec![0, 1]]);
    }

    #[test]
    fn unreachable_cycles_are_ignored() {
        // 0 -> 0, 1 -> 1 with 1 unreachable.
        let a = arena(vec![vec![0], vec![1]], vec![vec![0, 0]; 2]);
        assert_eq!(enumerate_inf_sets(&a).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn triangle_with_chord() {
        // 0 -> 1 -> 2 -> 0 and 0 -> 2: inf-sets {0,1,2} and {0,2}.
        let a = arena(vec![vec![1, 2], vec![2], vec![0]], vec![vec![0, 0]; 3]);
        let sets: BTreeSet<_> = enumerate_inf_sets(&a).unwrap().into_iter().collect();
        assert_eq!(sets, BTreeSet::from([vec![0, 2], vec![0, 1, 2]]));
    }

    #[test]
    fn cap_is_a_hard_error() {
        let n = 5;
        let succ = (0..n).map(|v| vec![(v + 1) % n]).collect();
        let a = arena(succ, vec![vec![0, 0]; n]);
        assert_eq!(enumerate_inf_sets_with_cap(&a, 4), Err(OracleError::CapExceeded { size: 5, cap: 4 }));
        assert_eq!(enumerate_inf_sets_with_cap(&a, 5).unwrap().len(), 1);
    }

    #[test]
    fn verdicts() {
        let lost = arena(vec![vec![0]], vec![vec![1, 0]]);
        let r = oracle_verify(&lost).unwrap();
        assert!(!r.positive);
        assert_eq!(r.counterexample.unwrap(), crate::arena::Lasso::new(vec![], vec![0]));

        let won = arena(vec![vec![0]], vec![vec![0, 1]]);
        assert!(oracle_verify(&won).unwrap().positive);
        assert!(oracle_check_formula(&won, &Acceptance::True).unwrap());
        assert!(!oracle_check_formula(&won, &Acceptance::False).unwrap());
    }
}
