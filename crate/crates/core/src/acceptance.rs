//! Emerson-Lei acceptance formulas over priority marks, and Streett pairs.
//!
//! A mark `(i, p)` is carried by exactly the vertices whose priority for
//! objective `i` equals `p`, so the marks of one objective partition the
//! vertex set. Formulas are positive Boolean combinations of `Inf(mark)` and
//! `Fin(mark)` atoms; there is no negation node. Complements of parity
//! objectives are expressed by the min-odd unfolding instead.

use std::collections::BTreeSet;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::arena::{GameArena, Priority, Vertex};
use crate::lattice::{Antichain, Payoff};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mark {
    pub objective: usize,
    pub priority: Priority,
}

impl Mark {
    pub fn new(objective: usize, priority: Priority) -> Self {
        Mark { objective, priority }
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.objective, self.priority)
    }
}

/// Dense numbering of the marks of an arena, objective-major.
#[derive(Debug, Clone)]
pub struct MarkSpace {
    offsets: Vec<usize>,
    total: usize,
}

impl MarkSpace {
    pub fn new(arena: &GameArena) -> Self {
        let mut offsets = Vec::with_capacity(arena.max_priorities().len());
        let mut total = 0;
        for &d in arena.max_priorities() {
            offsets.push(total);
            total += d as usize + 1;
        }
        MarkSpace { offsets, total }
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn id(&self, mark: Mark) -> usize {
        self.offsets[mark.objective] + mark.priority as usize
    }

    /// The set of marks carried by at least one vertex of `set`.
    pub fn present(&self, arena: &GameArena, set: impl IntoIterator<Item = Vertex>) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(self.total);
        for v in set {
            for (i, &p) in arena.priorities(v).iter().enumerate() {
                bits.insert(self.offsets[i] + p as usize);
            }
        }
        bits
    }
}

/// Whether a comparison asks for payoff equality or domination (`≥`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Eq,
    Geq,
}

/// A positive Boolean combination of `Inf`/`Fin` atoms.
///
/// Build through [`Acceptance::and`] and [`Acceptance::or`], which fold
/// constants and flatten nested connectives of the same kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Acceptance {
    True,
    False,
    Inf(Mark),
    Fin(Mark),
    And(Vec<Acceptance>),
    Or(Vec<Acceptance>),
}

impl Acceptance {
    pub fn and(parts: impl IntoIterator<Item = Acceptance>) -> Acceptance {
        let mut out = Vec::new();
        for part in parts {
            match part {
                Acceptance::True => {}
                Acceptance::False => return Acceptance::False,
                Acceptance::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Acceptance::True,
            1 => out.pop().unwrap(),
            _ => Acceptance::And(out),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Acceptance>) -> Acceptance {
        let mut out = Vec::new();
        for part in parts {
            match part {
                Acceptance::False => {}
                Acceptance::True => return Acceptance::True,
                Acceptance::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Acceptance::False,
            1 => out.pop().unwrap(),
            _ => Acceptance::Or(out),
        }
    }

    /// Evaluates under `present(m)` = "mark `m` occurs infinitely often".
    pub fn eval_with(&self, present: &impl Fn(Mark) -> bool) -> bool {
        match self {
            Acceptance::True => true,
            Acceptance::False => false,
            Acceptance::Inf(m) => present(*m),
            Acceptance::Fin(m) => !present(*m),
            Acceptance::And(parts) => parts.iter().all(|p| p.eval_with(present)),
            Acceptance::Or(parts) => parts.iter().any(|p| p.eval_with(present)),
        }
    }

    /// Evaluates the formula on an inf-set `set` of `arena`.
    pub fn eval_on(&self, arena: &GameArena, set: &[Vertex]) -> bool {
        let space = MarkSpace::new(arena);
        let present = space.present(arena, set.iter().copied());
        self.eval_with(&|m| present.contains(space.id(m)))
    }

    /// Partial evaluation: `assign` may fix the value of an atom.
    pub fn substitute(&self, assign: &impl Fn(&Acceptance) -> Option<bool>) -> Acceptance {
        match self {
            Acceptance::True | Acceptance::False => self.clone(),
            Acceptance::Inf(_) | Acceptance::Fin(_) => match assign(self) {
                Some(true) => Acceptance::True,
                Some(false) => Acceptance::False,
                None => self.clone(),
            },
            Acceptance::And(parts) => Acceptance::and(parts.iter().map(|p| p.substitute(assign))),
            Acceptance::Or(parts) => Acceptance::or(parts.iter().map(|p| p.substitute(assign))),
        }
    }

    /// Sets every atom over a mark absent from `present` to its value on
    /// any subset: `Inf(m)` false, `Fin(m)` true.
    pub fn restrict(&self, present: &impl Fn(Mark) -> bool) -> Acceptance {
        self.substitute(&|atom| match atom {
            Acceptance::Inf(m) if !present(*m) => Some(false),
            Acceptance::Fin(m) if !present(*m) => Some(true),
            _ => None,
        })
    }

    /// Fixes the value of the atom `Fin(mark)`.
    pub fn assign_fin(&self, mark: Mark, value: bool) -> Acceptance {
        self.substitute(&|atom| match atom {
            Acceptance::Fin(m) if *m == mark => Some(value),
            _ => None,
        })
    }

    pub fn fin_marks(&self) -> BTreeSet<Mark> {
        let mut out = BTreeSet::new();
        self.collect_marks(&mut out, true);
        out
    }

    pub fn inf_marks(&self) -> BTreeSet<Mark> {
        let mut out = BTreeSet::new();
        self.collect_marks(&mut out, false);
        out
    }

    fn collect_marks(&self, out: &mut BTreeSet<Mark>, fin: bool) {
        match self {
            Acceptance::Fin(m) if fin => {
                out.insert(*m);
            }
            Acceptance::Inf(m) if !fin => {
                out.insert(*m);
            }
            Acceptance::And(parts) | Acceptance::Or(parts) => {
                parts.iter().for_each(|p| p.collect_marks(out, fin))
            }
            _ => {}
        }
    }

    pub fn is_fin_free(&self) -> bool {
        match self {
            Acceptance::Fin(_) => false,
            Acceptance::And(parts) | Acceptance::Or(parts) => parts.iter().all(Acceptance::is_fin_free),
            _ => true,
        }
    }

    /// `Fin` atoms that are top-level conjuncts.
    pub fn top_level_fins(&self) -> Vec<Mark> {
        match self {
            Acceptance::Fin(m) => vec![*m],
            Acceptance::And(parts) => parts
                .iter()
                .filter_map(|p| match p {
                    Acceptance::Fin(m) => Some(*m),
                    _ => None,
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Number of nodes in the formula tree.
    pub fn size(&self) -> usize {
        match self {
            Acceptance::And(parts) | Acceptance::Or(parts) => 1 + parts.iter().map(Acceptance::size).sum::<usize>(),
            _ => 1,
        }
    }

    /// Whether every mark names an existing `(objective, priority)` pair.
    pub fn is_valid_for(&self, arena: &GameArena) -> bool {
        let max = arena.max_priorities();
        self.inf_marks().union(&self.fin_marks()).all(|m| m.objective < max.len() && m.priority <= max[m.objective])
    }
}

impl fmt::Display for Acceptance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, a: &Acceptance) -> fmt::Result {
            match a {
                Acceptance::And(_) | Acceptance::Or(_) => write!(f, "({a})"),
                _ => write!(f, "{a}"),
            }
        }
        let (parts, sep) = match self {
            Acceptance::True => return write!(f, "true"),
            Acceptance::False => return write!(f, "false"),
            Acceptance::Inf(m) => return write!(f, "Inf({m})"),
            Acceptance::Fin(m) => return write!(f, "Fin({m})"),
            Acceptance::And(parts) => (parts, " & "),
            Acceptance::Or(parts) => (parts, " | "),
        };
        for (i, part) in parts.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            child(f, part)?;
        }
        Ok(())
    }
}

/// The parity condition of `objective`: the least priority seen infinitely
/// often is even, or odd when `complement` is set.
///
/// Unfolds to `Inf(0) ∨ (Fin(1) ∧ (Inf(2) ∨ …))`, and to
/// `Fin(0) ∧ (Inf(1) ∨ (Fin(2) ∧ …))` for the complement.
pub fn parity_formula(arena: &GameArena, objective: usize, complement: bool) -> Acceptance {
    let d = arena.max_priorities()[objective];
    let accepting = |p: Priority| p.is_multiple_of(2) != complement;
    let atom = |p: Priority| {
        let m = Mark::new(objective, p);
        if accepting(p) {
            Acceptance::Inf(m)
        } else {
            Acceptance::Fin(m)
        }
    };
    let mut formula = atom(d);
    for p in (0..d).rev() {
        formula = if accepting(p) {
            Acceptance::or([atom(p), formula])
        } else {
            Acceptance::and([atom(p), formula])
        };
    }
    formula
}

/// Plays whose payoff is exactly `p`.
pub fn payoff_eq_formula(arena: &GameArena, p: &Payoff) -> Acceptance {
    Acceptance::and((0..p.len()).map(|i| parity_formula(arena, i + 1, !p.get(i))))
}

/// Plays whose payoff is at least `p`.
pub fn payoff_geq_formula(arena: &GameArena, p: &Payoff) -> Acceptance {
    Acceptance::and((0..p.len()).filter(|&i| p.get(i)).map(|i| parity_formula(arena, i + 1, false)))
}

pub fn payoff_formula(arena: &GameArena, p: &Payoff, mode: Mode) -> Acceptance {
    match mode {
        Mode::Eq => payoff_eq_formula(arena, p),
        Mode::Geq => payoff_geq_formula(arena, p),
    }
}

/// Plays with won-bit `won` and a payoff equal to (or at least) `p`.
pub fn extended_formula(arena: &GameArena, won: bool, p: &Payoff, mode: Mode) -> Acceptance {
    Acceptance::and([parity_formula(arena, 0, !won), payoff_formula(arena, p, mode)])
}

/// Plays whose payoff is not strictly below any element of `antichain`;
/// with `lost_only`, additionally lost by the system.
pub fn not_strictly_below_formula(arena: &GameArena, antichain: &Antichain, lost_only: bool) -> Acceptance {
    let per_element = antichain.iter().map(|p| {
        let above = Acceptance::and((0..p.len()).filter(|&i| p.get(i)).map(|i| parity_formula(arena, i + 1, false)));
        let escapes = Acceptance::or((0..p.len()).filter(|&i| !p.get(i)).map(|i| parity_formula(arena, i + 1, false)));
        Acceptance::or([above, escapes])
    });
    let lost = if lost_only { parity_formula(arena, 0, true) } else { Acceptance::True };
    Acceptance::and(std::iter::once(lost).chain(per_element))
}

/// One Streett pair: infinitely many visits to `f` demand infinitely many
/// visits to `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreettPair {
    pub e: FixedBitSet,
    pub f: FixedBitSet,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StreettPairs {
    pub pairs: Vec<StreettPair>,
}

impl StreettPairs {
    /// Streett encoding of a conjunction of parity conditions, each given
    /// as `(objective, complement)`.
    ///
    /// For every rejecting priority `r` of a conjunct (odd, or even when
    /// complemented) there is one pair with `F` = vertices of priority `r`
    /// and `E` = vertices of smaller priority.
    pub fn for_conjunction(arena: &GameArena, conjuncts: &[(usize, bool)]) -> Self {
        let n = arena.vertex_count();
        let mut pairs = Vec::new();
        for &(objective, complement) in conjuncts {
            let d = arena.max_priorities()[objective];
            for r in (0..=d).filter(|r| (r % 2 == 1) != complement) {
                let mut e = FixedBitSet::with_capacity(n);
                let mut f = FixedBitSet::with_capacity(n);
                for v in 0..n {
                    let c = arena.priority(v, objective);
                    if c < r {
                        e.insert(v);
                    } else if c == r {
                        f.insert(v);
                    }
                }
                pairs.push(StreettPair { e, f });
            }
        }
        StreettPairs { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Whether a play with inf-set `set` satisfies every pair.
    pub fn satisfied_by(&self, set: &[Vertex]) -> bool {
        self.pairs.iter().all(|pair| {
            !set.iter().any(|&v| pair.f.contains(v)) || set.iter().any(|&v| pair.e.contains(v))
        })
    }
}

/// Streett pairs for plays whose payoff is equal to (or at least) `p`.
pub fn conjunction_to_streett(arena: &GameArena, p: &Payoff, mode: Mode) -> StreettPairs {
    StreettPairs::for_conjunction(arena, &payoff_conjuncts(p, mode))
}

/// Streett pairs for plays with extended payoff `(won, p)` in `mode`.
pub fn extended_to_streett(arena: &GameArena, won: bool, p: &Payoff, mode: Mode) -> StreettPairs {
    let mut conjuncts = vec![(0, !won)];
    conjuncts.extend(payoff_conjuncts(p, mode));
    StreettPairs::for_conjunction(arena, &conjuncts)
}

fn payoff_conjuncts(p: &Payoff, mode: Mode) -> Vec<(usize, bool)> {
    (0..p.len())
        .filter(|&i| mode == Mode::Eq || p.get(i))
        .map(|i| (i + 1, !p.get(i)))
        .collect()
}
