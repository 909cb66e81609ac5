//! Realizability queries over a fixed single-player arena.
//!
//! Equality queries go through the generic Emerson-Lei check; domination
//! (`≥`) queries are conjunctions of parity conditions and use the Streett
//! check instead.

use std::cell::Cell;

use crate::acceptance::{
    conjunction_to_streett, extended_formula, extended_to_streett, not_strictly_below_formula, payoff_eq_formula,
    Acceptance, Mode, StreettPairs,
};
use crate::arena::{GameArena, Lasso};
use crate::emptiness::{check_with_stats, extended_payoff, streett_check, EmptinessError, EmptinessStats};
use crate::lattice::{Antichain, Payoff};

/// Query front end counting the emptiness checks it issues.
pub struct Queries<'a> {
    arena: &'a GameArena,
    generic_calls: Cell<usize>,
    streett_calls: Cell<usize>,
    engine: Cell<EmptinessStats>,
}

impl<'a> Queries<'a> {
    /// Fails unless `arena` is valid and single-player.
    pub fn new(arena: &'a GameArena) -> Result<Self, EmptinessError> {
        let violations = arena.validate();
        if !violations.is_empty() {
            return Err(EmptinessError::InvalidArena(violations));
        }
        if !arena.is_single_player() {
            return Err(EmptinessError::NotSinglePlayer);
        }
        Ok(Queries { arena, generic_calls: Cell::new(0), streett_calls: Cell::new(0), engine: Cell::default() })
    }

    pub fn arena(&self) -> &'a GameArena {
        self.arena
    }

    pub fn objective_count(&self) -> usize {
        self.arena.objective_count()
    }

    /// Total emptiness checks issued so far.
    pub fn calls(&self) -> usize {
        self.generic_calls.get() + self.streett_calls.get()
    }

    pub fn streett_calls(&self) -> usize {
        self.streett_calls.get()
    }

    pub fn engine_stats(&self) -> EmptinessStats {
        self.engine.get()
    }

    fn generic(&self, f: &Acceptance) -> Result<Option<Lasso>, EmptinessError> {
        self.generic_calls.set(self.generic_calls.get() + 1);
        let mut stats = self.engine.get();
        let out = check_with_stats(self.arena, f, &mut stats);
        self.engine.set(stats);
        out
    }

    fn streett(&self, pairs: &StreettPairs) -> Result<Option<Lasso>, EmptinessError> {
        self.streett_calls.set(self.streett_calls.get() + 1);
        streett_check(self.arena, pairs)
    }

    /// A play with payoff exactly `p`.
    pub fn exists_payoff_eq(&self, p: &Payoff) -> Result<Option<Lasso>, EmptinessError> {
        self.generic(&payoff_eq_formula(self.arena, p))
    }

    /// A play with payoff at least `p`.
    pub fn exists_payoff_geq(&self, p: &Payoff) -> Result<Option<Lasso>, EmptinessError> {
        self.streett(&conjunction_to_streett(self.arena, p, Mode::Geq))
    }

    /// A play with won-bit `won` and payoff equal to (or at least) `p`.
    pub fn exists_extended(&self, won: bool, p: &Payoff, mode: Mode) -> Result<Option<Lasso>, EmptinessError> {
        match mode {
            Mode::Eq => self.generic(&extended_formula(self.arena, won, p, mode)),
            Mode::Geq => self.streett(&extended_to_streett(self.arena, won, p, mode)),
        }
    }

    /// Whether the realizable payoff `p` is Pareto-optimal: no payoff with
    /// one more satisfied objective is dominated by a play.
    pub fn is_pareto_optimal(&self, p: &Payoff) -> Result<bool, EmptinessError> {
        debug_assert!(
            crate::emptiness::check(self.arena, &payoff_eq_formula(self.arena, p))?.is_some(),
            "is_pareto_optimal called on unrealizable payoff {p}"
        );
        for q in p.one_bit_up() {
            if self.exists_payoff_geq(&q)?.is_some() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// A play lost by the system whose payoff is not strictly below any
    /// element of `antichain`.
    pub fn exists_lost_not_below(&self, antichain: &Antichain) -> Result<Option<Lasso>, EmptinessError> {
        self.generic(&not_strictly_below_formula(self.arena, antichain, true))
    }

    /// Payoff of the play described by `lasso`.
    pub fn payoff_of(&self, lasso: &Lasso) -> Payoff {
        extended_payoff(self.arena, &lasso.inf_set()).payoff
    }
}
