//! Emptiness checking for single-player arenas under Emerson-Lei and
//! Streett acceptance.
//!
//! Both checks refine strongly connected components recursively and return
//! a [`Lasso`] through an accepting component. SCCs are always visited in
//! order of their smallest vertex, and the generic check always branches on
//! the lowest `Fin` mark (removal branch first), so equal inputs yield equal
//! witnesses.

use std::collections::VecDeque;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::acceptance::{Acceptance, MarkSpace, StreettPairs};
use crate::arena::{ArenaError, GameArena, Lasso, Vertex, Violation};
use crate::lattice::{ExtendedPayoff, Payoff};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmptinessError {
    #[error("emptiness checks need a single-player arena")]
    NotSinglePlayer,
    #[error("invalid arena: {0:?}")]
    InvalidArena(Vec<Violation>),
    #[error("formula references marks the arena does not have")]
    ForeignMarks,
    #[error(transparent)]
    Arena(#[from] ArenaError),
}

/// Instrumentation counters for one or more checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EmptinessStats {
    /// Number of top-level checks.
    pub checks: usize,
    /// SCCs examined (including re-decomposed sub-components).
    pub components: usize,
    /// Two-way branches on a non-top-level `Fin` atom.
    pub branches: usize,
    pub max_depth: usize,
}

/// Reusable Tarjan state; membership is tracked with generation stamps so
/// nested decompositions of shrinking regions need no clearing.
struct SccFinder {
    member: Vec<u32>,
    visited: Vec<u32>,
    index: Vec<u32>,
    low: Vec<u32>,
    on_stack: Vec<bool>,
    generation: u32,
}

impl SccFinder {
    fn new(n: usize) -> Self {
        SccFinder {
            member: vec![0; n],
            visited: vec![0; n],
            index: vec![0; n],
            low: vec![0; n],
            on_stack: vec![false; n],
            generation: 0,
        }
    }

    fn next_generation(&mut self) -> u32 {
        if self.generation == u32::MAX {
            self.member.fill(0);
            self.visited.fill(0);
            self.generation = 0;
        }
        self.generation += 1;
        self.generation
    }

    /// SCCs of the subgraph induced by `region`; each sorted, ordered by
    /// smallest vertex.
    fn decompose(&mut self, arena: &GameArena, region: &[Vertex]) -> Vec<Vec<Vertex>> {
        let gen = self.next_generation();
        for &v in region {
            self.member[v] = gen;
        }
        let mut roots: Vec<Vertex> = region.to_vec();
        roots.sort_unstable();

        let mut components = Vec::new();
        let mut counter = 0u32;
        let mut stack: Vec<Vertex> = Vec::new();
        let mut calls: Vec<(Vertex, usize)> = Vec::new();
        for root in roots {
            if self.visited[root] == gen {
                continue;
            }
            self.open(root, gen, &mut counter, &mut stack);
            calls.push((root, 0));
            while let Some(&mut (v, ref mut pos)) = calls.last_mut() {
                let succ = arena.successors(v);
                if *pos < succ.len() {
                    let w = succ[*pos];
                    *pos += 1;
                    if self.member[w] != gen {
                        continue;
                    }
                    if self.visited[w] != gen {
                        self.open(w, gen, &mut counter, &mut stack);
                        calls.push((w, 0));
                    } else if self.on_stack[w] {
                        self.low[v] = self.low[v].min(self.index[w]);
                    }
                } else {
                    calls.pop();
                    if let Some(&(u, _)) = calls.last() {
                        self.low[u] = self.low[u].min(self.low[v]);
                    }
                    if self.low[v] == self.index[v] {
                        let mut component = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            self.on_stack[w] = false;
                            component.push(w);
                            if w == v {
                                break;
                            }
                        }
                        component.sort_unstable();
                        components.push(component);
                    }
                }
            }
        }
        components.sort_unstable_by_key(|c| c[0]);
        components
    }

    fn open(&mut self, v: Vertex, gen: u32, counter: &mut u32, stack: &mut Vec<Vertex>) {
        self.visited[v] = gen;
        self.index[v] = *counter;
        self.low[v] = *counter;
        *counter += 1;
        stack.push(v);
        self.on_stack[v] = true;
    }
}

/// Whether `component` can host an infinite play: more than one vertex, or
/// a self-loop.
fn is_nontrivial(arena: &GameArena, component: &[Vertex]) -> bool {
    component.len() > 1 || arena.has_edge(component[0], component[0])
}

/// Strongly connected components of the subgraph induced by `restrict`.
pub fn sccs(arena: &GameArena, restrict: &[Vertex]) -> Vec<Vec<Vertex>> {
    SccFinder::new(arena.vertex_count()).decompose(arena, restrict)
}

fn reachable_vertices(arena: &GameArena) -> Vec<Vertex> {
    arena.reachable().iter().enumerate().filter(|(_, &r)| r).map(|(v, _)| v).collect()
}

fn precondition(arena: &GameArena) -> Result<(), EmptinessError> {
    let violations = arena.validate();
    if !violations.is_empty() {
        return Err(EmptinessError::InvalidArena(violations));
    }
    if !arena.is_single_player() {
        return Err(EmptinessError::NotSinglePlayer);
    }
    Ok(())
}

struct Engine<'a> {
    arena: &'a GameArena,
    space: MarkSpace,
    scc: SccFinder,
    stats: &'a mut EmptinessStats,
}

impl Engine<'_> {
    fn search_region(&mut self, region: &[Vertex], f: &Acceptance, depth: usize) -> Option<Vec<Vertex>> {
        for component in self.scc.decompose(self.arena, region) {
            if !is_nontrivial(self.arena, &component) {
                continue;
            }
            if let Some(found) = self.search_component(component, f, depth) {
                return Some(found);
            }
        }
        None
    }

    fn search_component(&mut self, component: Vec<Vertex>, f: &Acceptance, depth: usize) -> Option<Vec<Vertex>> {
        self.stats.components += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        let present = self.space.present(self.arena, component.iter().copied());
        let space = &self.space;
        let g = f.restrict(&|m| present.contains(space.id(m)));
        match g {
            Acceptance::True => return Some(component),
            Acceptance::False => return None,
            _ => {}
        }
        // Fin atoms over absent marks are gone, so every remaining Inf atom
        // is satisfied by the whole component.
        if g.is_fin_free() {
            return g.eval_with(&|m| present.contains(space.id(m))).then_some(component);
        }

        // Top-level Fin(m): accepting subsets avoid m altogether.
        let fins = g.top_level_fins();
        if !fins.is_empty() {
            let g = fins.iter().fold(g, |acc, &m| acc.assign_fin(m, true));
            let rest = self.without(&component, &fins);
            return self.search_region(&rest, &g, depth + 1);
        }

        if let Acceptance::Or(parts) = &g {
            for part in parts {
                if let Some(found) = self.search_component(component.clone(), part, depth + 1) {
                    return Some(found);
                }
            }
            return None;
        }

        let mark = *g.fin_marks().first().expect("formula with Fin atoms");
        self.stats.branches += 1;
        let rest = self.without(&component, &[mark]);
        if let Some(found) = self.search_region(&rest, &g.assign_fin(mark, true), depth + 1) {
            return Some(found);
        }
        self.search_component(component, &g.assign_fin(mark, false), depth + 1)
    }

    fn without(&self, component: &[Vertex], marks: &[crate::acceptance::Mark]) -> Vec<Vertex> {
        component
            .iter()
            .copied()
            .filter(|&v| !marks.iter().any(|m| self.arena.priority(v, m.objective) == m.priority))
            .collect()
    }
}

/// Searches for a play of `arena` whose inf-set satisfies `f`.
pub fn check(arena: &GameArena, f: &Acceptance) -> Result<Option<Lasso>, EmptinessError> {
    check_with_stats(arena, f, &mut EmptinessStats::default())
}

pub fn check_with_stats(
    arena: &GameArena,
    f: &Acceptance,
    stats: &mut EmptinessStats,
) -> Result<Option<Lasso>, EmptinessError> {
    precondition(arena)?;
    if !f.is_valid_for(arena) {
        return Err(EmptinessError::ForeignMarks);
    }
    stats.checks += 1;
    let region = reachable_vertices(arena);
    let mut engine =
        Engine { arena, space: MarkSpace::new(arena), scc: SccFinder::new(arena.vertex_count()), stats };
    let Some(set) = engine.search_region(&region, f, 0) else {
        return Ok(None);
    };
    let lasso = lasso_through(arena, &set);
    debug_assert!(f.eval_on(arena, &lasso.inf_set()), "unsound witness for {f}");
    Ok(Some(lasso))
}

struct StreettSearch<'a> {
    arena: &'a GameArena,
    pairs: &'a StreettPairs,
    scc: SccFinder,
    removed: FixedBitSet,
}

impl StreettSearch<'_> {
    fn search_region(&mut self, region: &[Vertex]) -> Option<Vec<Vertex>> {
        for component in self.scc.decompose(self.arena, region) {
            if !is_nontrivial(self.arena, &component) {
                continue;
            }
            if let Some(found) = self.search_component(component) {
                return Some(found);
            }
        }
        None
    }

    fn search_component(&mut self, component: Vec<Vertex>) -> Option<Vec<Vertex>> {
        let mut bad = Vec::new();
        for pair in &self.pairs.pairs {
            let hits_f = component.iter().any(|&v| pair.f.contains(v));
            if hits_f && !component.iter().any(|&v| pair.e.contains(v)) {
                bad.extend(component.iter().copied().filter(|&v| pair.f.contains(v)));
            }
        }
        if bad.is_empty() {
            return Some(component);
        }
        for &v in &bad {
            self.removed.insert(v);
        }
        let rest: Vec<Vertex> = component.iter().copied().filter(|&v| !self.removed.contains(v)).collect();
        for &v in &bad {
            self.removed.set(v, false);
        }
        self.search_region(&rest)
    }
}

/// Searches for a play satisfying every Streett pair.
pub fn streett_check(arena: &GameArena, pairs: &StreettPairs) -> Result<Option<Lasso>, EmptinessError> {
    precondition(arena)?;
    let n = arena.vertex_count();
    let region = reachable_vertices(arena);
    let mut search = StreettSearch { arena, pairs, scc: SccFinder::new(n), removed: FixedBitSet::with_capacity(n) };
    let Some(set) = search.search_region(&region) else {
        return Ok(None);
    };
    let lasso = lasso_through(arena, &set);
    debug_assert!(pairs.satisfied_by(&lasso.inf_set()));
    Ok(Some(lasso))
}

/// Builds a lasso from the initial vertex whose cycle visits exactly the
/// vertices of `set`, which must be reachable, strongly connected, and
/// contain an edge.
pub fn lasso_through(arena: &GameArena, set: &[Vertex]) -> Lasso {
    let n = arena.vertex_count();
    let mut inside = vec![false; n];
    for &v in set {
        inside[v] = true;
    }

    // Shortest path from the initial vertex into the set.
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::from([arena.initial()]);
    parent[arena.initial()] = arena.initial();
    let mut entry = None;
    while let Some(v) = queue.pop_front() {
        if inside[v] {
            entry = Some(v);
            break;
        }
        for &w in arena.successors(v) {
            if parent[w] == usize::MAX {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    let entry = entry.expect("set is reachable from the initial vertex");
    let mut prefix = Vec::new();
    let mut v = entry;
    while v != arena.initial() {
        v = parent[v];
        prefix.push(v);
    }
    prefix.reverse();

    // Closed walk from `entry` through every vertex of the set.
    let mut cycle = vec![entry];
    let mut seen = vec![false; n];
    seen[entry] = true;
    let mut current = entry;
    let mut targets: Vec<Vertex> = set.to_vec();
    targets.sort_unstable();
    for target in targets {
        if seen[target] {
            continue;
        }
        for w in path_within(arena, &inside, current, target) {
            seen[w] = true;
            cycle.push(w);
        }
        current = target;
    }
    cycle.extend(path_within(arena, &inside, current, entry));
    cycle.pop();
    Lasso::new(prefix, cycle)
}

/// Vertices after `from` on a shortest nonempty path to `to` that stays
/// inside `inside`; `to` is the last element.
fn path_within(arena: &GameArena, inside: &[bool], from: Vertex, to: Vertex) -> Vec<Vertex> {
    let n = arena.vertex_count();
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &w in arena.successors(from) {
        if inside[w] && parent[w] == usize::MAX {
            parent[w] = from;
            queue.push_back(w);
        }
    }
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &w in arena.successors(v) {
            if inside[w] && parent[w] == usize::MAX {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    assert!(parent[to] != usize::MAX, "set is not strongly connected");
    let mut path = vec![to];
    let mut v = parent[to];
    while v != from {
        path.push(v);
        v = parent[v];
    }
    path.reverse();
    path
}

/// Extended payoff of any play whose inf-set is `set`.
pub fn extended_payoff(arena: &GameArena, set: &[Vertex]) -> ExtendedPayoff {
    let satisfied = |objective: usize| {
        set.iter().map(|&v| arena.priority(v, objective)).min().is_some_and(|p| p.is_multiple_of(2))
    };
    let t = arena.objective_count();
    let bits: Vec<bool> = (1..=t).map(satisfied).collect();
    ExtendedPayoff { won: satisfied(0), payoff: Payoff::from_bools(&bits).expect("objective count checked at parse time") }
}

/// A witness play rendered for humans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayReport {
    pub extended: ExtendedPayoff,
    pub trace: String,
}

impl fmt::Display for PlayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} with extended payoff {}", self.trace, self.extended)
    }
}

pub fn witness_to_play_report(arena: &GameArena, lasso: &Lasso) -> Result<PlayReport, ArenaError> {
    lasso.validate_in(arena)?;
    Ok(PlayReport { extended: extended_payoff(arena, &lasso.inf_set()), trace: lasso.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acceptance::{parity_formula, Mark};
    use crate::arena::Player;

    fn arena(succ: Vec<Vec<Vertex>>, prio: Vec<Vec<u32>>) -> GameArena {
        let n = succ.len();
        GameArena::try_new(vec![Player::Environment; n], succ, 0, prio, None).unwrap()
    }

    #[test]
    fn scc_examples() {
        let a = arena(vec![vec![0]], vec![vec![0]]);
        assert_eq!(sccs(&a, &[0]), vec![vec![0]]);

        // 0 <-> 1, 1 -> 2 -> 3 -> 3
        let b = arena(vec![vec![1], vec![0, 2], vec![3], vec![3]], vec![vec![0]; 4]);
        let comps = sccs(&b, &[0, 1, 2, 3]);
        assert_eq!(comps, vec![vec![0, 1], vec![2], vec![3]]);
        assert!(!is_nontrivial(&b, &[2]));
        assert!(is_nontrivial(&b, &[3]));
        assert_eq!(sccs(&b, &[1, 2]), vec![vec![1], vec![2]]);
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let n = 200_000;
        let succ: Vec<Vec<Vertex>> = (0..n).map(|v| vec![(v + 1) % n]).collect();
        let a = arena(succ, vec![vec![0]; n]);
        let all: Vec<Vertex> = (0..n).collect();
        assert_eq!(sccs(&a, &all).len(), 1);
    }

    #[test]
    fn check_on_single_vertex() {
        let a = arena(vec![vec![0]], vec![vec![1, 0]]);
        let w = check(&a, &parity_formula(&a, 1, false)).unwrap().unwrap();
        assert_eq!(w, Lasso::new(vec![], vec![0]));
        assert_eq!(check(&a, &parity_formula(&a, 1, true)).unwrap(), None);
    }

    #[test]
    fn check_rejects_two_player_arena() {
        let a = GameArena::try_new(vec![Player::System], vec![vec![0]], 0, vec![vec![0]], None).unwrap();
        assert_eq!(check(&a, &Acceptance::True), Err(EmptinessError::NotSinglePlayer));
    }

    #[test]
    fn fin_free_formulas_never_branch() {
        let a = arena(vec![vec![1], vec![0, 2], vec![2]], vec![vec![0, 1], vec![1, 2], vec![2, 0]]);
        let f = Acceptance::and([Acceptance::Inf(Mark::new(1, 1)), Acceptance::Inf(Mark::new(0, 0))]);
        let mut stats = EmptinessStats::default();
        let w = check_with_stats(&a, &f, &mut stats).unwrap().unwrap();
        assert_eq!(w.inf_set(), vec![0, 1]);
        assert_eq!(stats.branches, 0);
        assert_eq!(stats.max_depth, 0);
    }

    #[test]
    fn fin_branching_finds_sub_cycles() {
        // Two-vertex cycle {0, 1} plus self-loop on 1. Objective 1 has
        // priority 1 on vertex 0 and 2 on vertex 1: only the self-loop on 1
        // wins, found after removing Fin(1:1)'s vertex.
        let a = arena(vec![vec![1], vec![0, 1]], vec![vec![0, 1], vec![0, 2]]);
        let w = check(&a, &parity_formula(&a, 1, false)).unwrap().unwrap();
        assert_eq!(w.inf_set(), vec![1]);
        assert_eq!(w, Lasso::new(vec![0], vec![1]));
    }

    #[test]
    fn streett_examples() {
        let a = arena(vec![vec![1], vec![0, 1]], vec![vec![0], vec![1]]);
        let none = StreettPairs::default();
        let w = streett_check(&a, &none).unwrap().unwrap();
        assert_eq!(w.inf_set(), vec![0, 1]);

        let mut all = FixedBitSet::with_capacity(2);
        all.insert_range(..);
        let blocked = StreettPairs {
            pairs: vec![crate::acceptance::StreettPair { e: FixedBitSet::with_capacity(2), f: all }],
        };
        assert_eq!(streett_check(&a, &blocked).unwrap(), None);
    }

    #[test]
    fn lasso_covers_component() {
        // 0 -> 1 -> 2 -> 3 -> 1, 3 -> 2
        let a = arena(vec![vec![1], vec![2], vec![3], vec![1, 2]], vec![vec![0]; 4]);
        let w = lasso_through(&a, &[1, 2, 3]);
        assert!(w.validate_in(&a).is_ok());
        assert_eq!(w.inf_set(), vec![1, 2, 3]);
        assert_eq!(w.prefix, vec![0]);
    }

    #[test]
    fn play_reports() {
        let a = arena(vec![vec![0]], vec![vec![0, 0, 0]]);
        let report = witness_to_play_report(&a, &Lasso::new(vec![], vec![0])).unwrap();
        assert_eq!(report.extended.to_string(), "1,(1,1)");
        assert_eq!(report.trace, "(0)^ω");
        assert!(witness_to_play_report(&a, &Lasso::new(vec![], vec![])).is_err());
    }
}
