//! Game arenas, Moore machines, and ultimately periodic plays.
//!
//! Vertices are dense ids `0..n`. Every vertex carries `t + 1` priorities:
//! index 0 belongs to the system objective, indices `1..=t` to the
//! environment objectives. Successor lists are ordered, which keeps every
//! witness extraction in the crate deterministic.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

pub type Vertex = usize;
pub type Priority = u32;
pub type State = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    /// Player 0, the system.
    System,
    /// Player 1, the environment.
    Environment,
}

impl Player {
    pub fn index(self) -> u8 {
        match self {
            Player::System => 0,
            Player::Environment => 1,
        }
    }

    pub fn from_index(index: u8) -> Option<Self> {
        match index {
            0 => Some(Player::System),
            1 => Some(Player::Environment),
            _ => None,
        }
    }
}

/// A broken arena invariant, as reported by [`GameArena::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Empty,
    NoSuccessor(Vertex),
    EdgeOutOfRange { source: Vertex, target: Vertex },
    InitialOutOfRange(Vertex),
    PriorityAboveMaximum { vertex: Vertex, objective: usize, priority: Priority, max: Priority },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "arena has no vertices"),
            Violation::NoSuccessor(v) => write!(f, "vertex {v} has no successor"),
            Violation::EdgeOutOfRange { target, .. } => write!(f, "edge target {target} out of range"),
            Violation::InitialOutOfRange(v) => write!(f, "initial vertex {v} out of range"),
            Violation::PriorityAboveMaximum { vertex, objective, priority, max } => write!(
                f,
                "vertex {vertex} has priority {priority} for objective {objective} above the declared maximum {max}"
            ),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArenaError {
    #[error("invalid arena: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("malformed arena: {0}")]
    Shape(String),
    #[error("strategy incomplete: no {kind} entry for state {state} at vertex {vertex}")]
    StrategyIncomplete { kind: &'static str, state: State, vertex: Vertex },
    #[error("strategy chooses {choice} at vertex {vertex}, which is not a successor")]
    IllegalChoice { vertex: Vertex, choice: Vertex },
    #[error("strategy state {0} out of range")]
    StateOutOfRange(State),
    #[error("invalid lasso: {0}")]
    InvalidLasso(String),
    #[error("objective {objective} out of range (arena has {count} priority functions)")]
    ObjectiveOutOfRange { objective: usize, count: usize },
}

fn join_violations(violations: &[Violation]) -> String {
    violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Rounds a declared maximum priority up to the next even integer.
pub fn pad_even(d: Priority) -> Priority {
    d + (d & 1)
}

/// A finite game arena with `t + 1` priority functions.
///
/// Immutable once built. Use [`GameArena::try_new`] for a checked arena;
/// [`GameArena::from_parts`] keeps structurally sound but possibly invalid
/// input around so [`GameArena::validate`] can report on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameArena {
    owner: Vec<Player>,
    successors: Vec<Vec<Vertex>>,
    initial: Vertex,
    /// Row-major, `t + 1` entries per vertex.
    priorities: Vec<Priority>,
    max_priority: Vec<Priority>,
}

impl GameArena {
    /// Assembles an arena without checking graph invariants.
    ///
    /// `max_priority` defaults to the per-objective maximum occurring in
    /// `priorities`. Declared maxima are padded up to the next even value.
    /// Fails only when the vectors disagree in shape.
    pub fn from_parts(
        owner: Vec<Player>,
        successors: Vec<Vec<Vertex>>,
        initial: Vertex,
        priorities: Vec<Vec<Priority>>,
        max_priority: Option<Vec<Priority>>,
    ) -> Result<Self, ArenaError> {
        let n = owner.len();
        if successors.len() != n || priorities.len() != n {
            return Err(ArenaError::Shape(format!(
                "{} owners, {} successor lists, {} priority rows",
                n,
                successors.len(),
                priorities.len()
            )));
        }
        let width = match (&max_priority, priorities.first()) {
            (Some(max), _) => max.len(),
            (None, Some(row)) => row.len(),
            (None, None) => 1,
        };
        if width == 0 {
            return Err(ArenaError::Shape("at least the system objective is required".into()));
        }
        if let Some(v) = priorities.iter().position(|row| row.len() != width) {
            return Err(ArenaError::Shape(format!(
                "vertex {v} has {} priorities, expected {width}",
                priorities[v].len()
            )));
        }
        let max_priority = match max_priority {
            Some(max) => max,
            None => (0..width)
                .map(|i| priorities.iter().map(|row| row[i]).max().unwrap_or(0))
                .collect(),
        };
        let max_priority = max_priority.into_iter().map(pad_even).collect();
        Ok(GameArena {
            owner,
            successors,
            initial,
            priorities: priorities.into_iter().flatten().collect(),
            max_priority,
        })
    }

    /// Like [`GameArena::from_parts`], additionally rejecting arenas with
    /// any [`Violation`].
    pub fn try_new(
        owner: Vec<Player>,
        successors: Vec<Vec<Vertex>>,
        initial: Vertex,
        priorities: Vec<Vec<Priority>>,
        max_priority: Option<Vec<Priority>>,
    ) -> Result<Self, ArenaError> {
        let arena = Self::from_parts(owner, successors, initial, priorities, max_priority)?;
        let violations = arena.validate();
        if violations.is_empty() {
            Ok(arena)
        } else {
            Err(ArenaError::Invalid(violations))
        }
    }

    /// Lists every broken invariant; empty iff the arena is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.vertex_count();
        if n == 0 {
            out.push(Violation::Empty);
        }
        if self.initial >= n && n > 0 {
            out.push(Violation::InitialOutOfRange(self.initial));
        }
        for (v, succ) in self.successors.iter().enumerate() {
            if succ.is_empty() {
                out.push(Violation::NoSuccessor(v));
            }
            for &w in succ {
                if w >= n {
                    out.push(Violation::EdgeOutOfRange { source: v, target: w });
                }
            }
        }
        for v in 0..n {
            for (objective, (&priority, &max)) in
                self.priorities(v).iter().zip(&self.max_priority).enumerate()
            {
                if priority > max {
                    out.push(Violation::PriorityAboveMaximum { vertex: v, objective, priority, max });
                }
            }
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.owner.len()
    }

    /// Number `t` of environment objectives.
    pub fn objective_count(&self) -> usize {
        self.max_priority.len() - 1
    }

    pub fn initial(&self) -> Vertex {
        self.initial
    }

    pub fn owner(&self, v: Vertex) -> Player {
        self.owner[v]
    }

    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        &self.successors[v]
    }

    pub fn has_edge(&self, v: Vertex, w: Vertex) -> bool {
        self.successors[v].contains(&w)
    }

    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    /// All `t + 1` priorities of `v`; index 0 is the system objective.
    pub fn priorities(&self, v: Vertex) -> &[Priority] {
        let width = self.max_priority.len();
        &self.priorities[v * width..(v + 1) * width]
    }

    pub fn priority(&self, v: Vertex, objective: usize) -> Priority {
        self.priorities[v * self.max_priority.len() + objective]
    }

    /// Padded (even) maximum priority per objective, `d_0..d_t`.
    pub fn max_priorities(&self) -> &[Priority] {
        &self.max_priority
    }

    pub fn is_single_player(&self) -> bool {
        self.owner.iter().all(|&p| p == Player::Environment)
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.vertex_count()
    }

    /// Vertices reachable from the initial vertex, as a membership mask.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(v) = queue.pop_front() {
            for &w in self.successors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    fn check_objective(&self, objective: usize) -> Result<(), ArenaError> {
        if objective < self.max_priority.len() {
            Ok(())
        } else {
            Err(ArenaError::ObjectiveOutOfRange { objective, count: self.max_priority.len() })
        }
    }

    /// Returns a copy with one priority changed. The maximum for that
    /// objective grows (padded) if needed.
    pub fn with_priority(&self, v: Vertex, objective: usize, priority: Priority) -> Self {
        let mut out = self.clone();
        let width = out.max_priority.len();
        out.priorities[v * width + objective] = priority;
        out.max_priority[objective] = out.max_priority[objective].max(pad_even(priority));
        out
    }
}

/// A finite-memory strategy for Player 0.
///
/// The update function consumes every visited vertex, the initial one
/// included; the choice at a Player-0 vertex reads the state reached after
/// consuming that vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MooreMachine {
    pub state_count: usize,
    pub initial_state: State,
    pub update: HashMap<(State, Vertex), State>,
    pub choice: HashMap<(State, Vertex), Vertex>,
}

impl MooreMachine {
    /// One state that never changes and no choices.
    pub fn trivial() -> Self {
        MooreMachine { state_count: 1, initial_state: 0, update: HashMap::new(), choice: HashMap::new() }
    }

    /// Memoryless machine; missing update entries default to staying in
    /// state 0.
    pub fn memoryless(choice: impl IntoIterator<Item = (Vertex, Vertex)>) -> Self {
        MooreMachine {
            state_count: 1,
            initial_state: 0,
            update: HashMap::new(),
            choice: choice.into_iter().map(|(v, w)| ((0, v), w)).collect(),
        }
    }

    fn next_state(&self, state: State, vertex: Vertex) -> Result<State, ArenaError> {
        if self.state_count == 1 {
            return Ok(*self.update.get(&(state, vertex)).unwrap_or(&0));
        }
        let next = *self
            .update
            .get(&(state, vertex))
            .ok_or(ArenaError::StrategyIncomplete { kind: "update", state, vertex })?;
        if next >= self.state_count {
            return Err(ArenaError::StateOutOfRange(next));
        }
        Ok(next)
    }
}

/// Restricts `arena` to the plays consistent with the strategy encoded by
/// `machine`, yielding a single-player arena over reachable
/// `(vertex, state)` pairs in BFS discovery order.
pub fn product(arena: &GameArena, machine: &MooreMachine) -> Result<GameArena, ArenaError> {
    let violations = arena.validate();
    if !violations.is_empty() {
        return Err(ArenaError::Invalid(violations));
    }
    if machine.initial_state >= machine.state_count {
        return Err(ArenaError::StateOutOfRange(machine.initial_state));
    }
    let mut index: HashMap<(Vertex, State), Vertex> = HashMap::new();
    let mut pairs: Vec<(Vertex, State)> = Vec::new();
    let mut successors: Vec<Vec<Vertex>> = Vec::new();
    let mut queue = VecDeque::new();

    let start = (arena.initial(), machine.next_state(machine.initial_state, arena.initial())?);
    index.insert(start, 0);
    pairs.push(start);
    queue.push_back(start);

    while let Some((v, m)) = queue.pop_front() {
        let targets: Vec<Vertex> = match arena.owner(v) {
            Player::Environment => arena.successors(v).to_vec(),
            Player::System => {
                let w = *machine
                    .choice
                    .get(&(m, v))
                    .ok_or(ArenaError::StrategyIncomplete { kind: "choice", state: m, vertex: v })?;
                if !arena.has_edge(v, w) {
                    return Err(ArenaError::IllegalChoice { vertex: v, choice: w });
                }
                vec![w]
            }
        };
        let mut row = Vec::with_capacity(targets.len());
        for w in targets {
            let pair = (w, machine.next_state(m, w)?);
            let id = *index.entry(pair).or_insert_with(|| {
                pairs.push(pair);
                queue.push_back(pair);
                pairs.len() - 1
            });
            if !row.contains(&id) {
                row.push(id);
            }
        }
        successors.push(row);
    }

    let priorities = pairs.iter().map(|&(v, _)| arena.priorities(v).to_vec()).collect();
    GameArena::try_new(
        vec![Player::Environment; pairs.len()],
        successors,
        0,
        priorities,
        Some(arena.max_priorities().to_vec()),
    )
}

/// An ultimately periodic play `prefix · cycle^ω`.
///
/// The play starts at the first prefix vertex, or at the first cycle vertex
/// when the prefix is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub prefix: Vec<Vertex>,
    pub cycle: Vec<Vertex>,
}

impl Lasso {
    pub fn new(prefix: Vec<Vertex>, cycle: Vec<Vertex>) -> Self {
        Lasso { prefix, cycle }
    }

    /// The set of vertices visited infinitely often.
    pub fn inf_set(&self) -> Vec<Vertex> {
        let set: BTreeSet<Vertex> = self.cycle.iter().copied().collect();
        set.into_iter().collect()
    }

    pub fn first(&self) -> Option<Vertex> {
        self.prefix.first().or(self.cycle.first()).copied()
    }

    /// Checks that the lasso is a play of `arena` from its initial vertex.
    pub fn validate_in(&self, arena: &GameArena) -> Result<(), ArenaError> {
        let bad = |msg: String| Err(ArenaError::InvalidLasso(msg));
        if self.cycle.is_empty() {
            return bad("empty cycle".into());
        }
        let n = arena.vertex_count();
        if let Some(&v) = self.prefix.iter().chain(&self.cycle).find(|&&v| v >= n) {
            return bad(format!("vertex {v} out of range"));
        }
        if self.first() != Some(arena.initial()) {
            return bad(format!("play does not start at the initial vertex {}", arena.initial()));
        }
        let walk: Vec<Vertex> =
            self.prefix.iter().chain(&self.cycle).chain(self.cycle.first()).copied().collect();
        for pair in walk.windows(2) {
            if !arena.has_edge(pair[0], pair[1]) {
                return bad(format!("missing edge ({}, {})", pair[0], pair[1]));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Lasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.prefix {
            write!(f, "{v} ")?;
        }
        let cycle: Vec<String> = self.cycle.iter().map(ToString::to_string).collect();
        write!(f, "({})^ω", cycle.join(" "))
    }
}

/// Priorities of `objective` seen infinitely often along `lasso`.
pub fn lasso_inf_priorities(
    arena: &GameArena,
    lasso: &Lasso,
    objective: usize,
) -> Result<BTreeSet<Priority>, ArenaError> {
    arena.check_objective(objective)?;
    lasso.validate_in(arena)?;
    Ok(lasso.cycle.iter().map(|&v| arena.priority(v, objective)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn self_loop(priorities: Vec<Priority>) -> GameArena {
        GameArena::try_new(vec![Player::Environment], vec![vec![0]], 0, vec![priorities], None).unwrap()
    }

    #[test]
    fn smallest_arena_is_valid() {
        let arena = self_loop(vec![0, 0]);
        assert!(arena.validate().is_empty());
        assert!(arena.is_single_player());
        assert_eq!(arena.objective_count(), 1);
    }

    #[test]
    fn reports_missing_successor() {
        let arena =
            GameArena::from_parts(vec![Player::Environment], vec![vec![]], 0, vec![vec![0, 0]], None).unwrap();
        let report: Vec<String> = arena.validate().iter().map(ToString::to_string).collect();
        assert_eq!(report, vec!["vertex 0 has no successor"]);
    }

    #[test]
    fn reports_edge_out_of_range() {
        let arena = GameArena::from_parts(
            vec![Player::Environment; 2],
            vec![vec![5], vec![1]],
            0,
            vec![vec![0, 0]; 2],
            None,
        )
        .unwrap();
        let report: Vec<String> = arena.validate().iter().map(ToString::to_string).collect();
        assert_eq!(report, vec!["edge target 5 out of range"]);
    }

    #[test]
    fn odd_maxima_are_padded() {
        let arena = self_loop(vec![1, 3]);
        assert_eq!(arena.max_priorities(), &[2, 4]);
        let declared = GameArena::try_new(
            vec![Player::Environment],
            vec![vec![0]],
            0,
            vec![vec![1, 1]],
            Some(vec![1, 5]),
        )
        .unwrap();
        assert_eq!(declared.max_priorities(), &[2, 6]);
    }

    #[test]
    fn priority_above_declared_maximum() {
        let arena = GameArena::from_parts(
            vec![Player::Environment],
            vec![vec![0]],
            0,
            vec![vec![0, 5]],
            Some(vec![0, 2]),
        )
        .unwrap();
        assert_eq!(arena.validate().len(), 1);
    }

    #[test]
    fn product_with_single_player_arena_copies_reachable_part() {
        // 0 -> 1 -> 1, vertex 2 unreachable.
        let arena = GameArena::try_new(
            vec![Player::Environment; 3],
            vec![vec![1], vec![1], vec![0]],
            0,
            vec![vec![0, 1], vec![1, 2], vec![2, 2]],
            None,
        )
        .unwrap();
        let prod = product(&arena, &MooreMachine::trivial()).unwrap();
        assert_eq!(prod.vertex_count(), 2);
        assert_eq!(prod.successors(0), &[1]);
        assert_eq!(prod.successors(1), &[1]);
        assert_eq!(prod.priorities(1), &[1, 2]);
    }

    #[test]
    fn product_follows_forced_choice() {
        let arena = GameArena::try_new(
            vec![Player::System, Player::Environment],
            vec![vec![0, 1], vec![1]],
            0,
            vec![vec![0, 0], vec![1, 1]],
            None,
        )
        .unwrap();
        let prod = product(&arena, &MooreMachine::memoryless([(0, 1)])).unwrap();
        assert!(prod.is_single_player());
        assert_eq!(prod.vertex_count(), 2);
        assert_eq!(prod.successors(0), &[1]);
        assert_eq!(prod.successors(1), &[1]);
    }

    #[test]
    fn product_with_alternating_machine() {
        // Vertex 0 (Player 0) has a self-loop and an exit to 1; vertex 1
        // (Player 1) loops. The machine stays once, then exits.
        //   state 0 --0--> 1, state 1 --0--> 0, any --1--> same.
        // Unrolled by hand: (0,s1) -choice 0-> (0,s0) -choice 1-> (1,s0).
        let arena = GameArena::try_new(
            vec![Player::System, Player::Environment],
            vec![vec![0, 1], vec![1]],
            0,
            vec![vec![0, 0], vec![1, 1]],
            None,
        )
        .unwrap();
        let machine = MooreMachine {
            state_count: 2,
            initial_state: 0,
            update: HashMap::from([((0, 0), 1), ((1, 0), 0), ((0, 1), 0), ((1, 1), 1)]),
            choice: HashMap::from([((1, 0), 0), ((0, 0), 1)]),
        };
        let prod = product(&arena, &machine).unwrap();
        assert!(prod.vertex_count() <= 2 * arena.vertex_count());
        assert_eq!(prod.vertex_count(), 3);
        assert_eq!(prod.successors(0), &[1]);
        assert_eq!(prod.successors(1), &[2]);
        assert_eq!(prod.successors(2), &[2]);
    }

    #[test]
    fn product_reports_missing_choice() {
        let arena = GameArena::try_new(
            vec![Player::System],
            vec![vec![0]],
            0,
            vec![vec![0, 0]],
            None,
        )
        .unwrap();
        let err = product(&arena, &MooreMachine::trivial()).unwrap_err();
        assert!(matches!(err, ArenaError::StrategyIncomplete { kind: "choice", .. }));
    }

    #[test]
    fn product_rejects_choice_off_the_graph() {
        let arena = GameArena::try_new(
            vec![Player::System, Player::Environment],
            vec![vec![0], vec![1]],
            0,
            vec![vec![0, 0]; 2],
            None,
        )
        .unwrap();
        let err = product(&arena, &MooreMachine::memoryless([(0, 1)])).unwrap_err();
        assert_eq!(err, ArenaError::IllegalChoice { vertex: 0, choice: 1 });
    }

    #[test]
    fn inf_priorities_of_lassos() {
        let arena = self_loop(vec![0, 2]);
        let w = Lasso::new(vec![], vec![0]);
        assert_eq!(lasso_inf_priorities(&arena, &w, 0).unwrap(), BTreeSet::from([0]));

        let two = GameArena::try_new(
            vec![Player::Environment; 2],
            vec![vec![1], vec![0]],
            0,
            vec![vec![0, 1], vec![0, 2]],
            None,
        )
        .unwrap();
        let w = Lasso::new(vec![], vec![0, 1]);
        assert_eq!(lasso_inf_priorities(&two, &w, 1).unwrap(), BTreeSet::from([1, 2]));
        assert!(lasso_inf_priorities(&two, &w, 2).is_err());
    }

    #[test]
    fn lasso_validation() {
        let arena = GameArena::try_new(
            vec![Player::Environment; 2],
            vec![vec![1], vec![1]],
            0,
            vec![vec![0, 0]; 2],
            None,
        )
        .unwrap();
        assert!(Lasso::new(vec![0], vec![1]).validate_in(&arena).is_ok());
        assert!(Lasso::new(vec![], vec![1]).validate_in(&arena).is_err());
        assert!(Lasso::new(vec![0], vec![]).validate_in(&arena).is_err());
        assert!(Lasso::new(vec![], vec![0, 1]).validate_in(&arena).is_err());
        assert_eq!(Lasso::new(vec![0], vec![1]).to_string(), "0 (1)^ω");
    }
}
