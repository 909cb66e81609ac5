//! Decision procedures for Pareto-rational verification.
//!
//! An instance is positive when every play with a Pareto-optimal payoff is
//! won by the system. Three procedures are provided:
//!
//! * [`naive_verify`] computes the Pareto set by testing all `2^t` payoffs,
//!   then looks for a lost play realizing one of them.
//! * [`antichain_verify`] descends the payoff lattice level by level from
//!   the top, keeping the Pareto-optimal payoffs found so far in an
//!   antichain and stopping at the first lost Pareto-optimal play.
//! * [`counterexample_verify`] grows an under-approximation of the Pareto
//!   set from lost plays, ending with either a certificate or a
//!   counterexample.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::acceptance::Mode;
use crate::arena::{GameArena, Lasso};
use crate::emptiness::{extended_payoff, EmptinessError};
use crate::lattice::{Antichain, ExtendedPayoff, Payoff};
use crate::realizability::Queries;

/// Largest `t` for which the full lattice is enumerated.
pub const MAX_ENUMERATED_OBJECTIVES: usize = 30;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Emptiness(#[from] EmptinessError),
    #[error("{0} objectives are too many to enumerate the payoff lattice")]
    LatticeTooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Naive,
    Antichain,
    Counterexample,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Naive, Algorithm::Antichain, Algorithm::Counterexample];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::Antichain => "antichain",
            Algorithm::Counterexample => "counterexample",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Algorithm::Naive),
            "antichain" => Ok(Algorithm::Antichain),
            "counterexample" => Ok(Algorithm::Counterexample),
            _ => Err(format!("unknown algorithm {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationStats {
    /// Main-loop iterations: lattice points for the naive procedure,
    /// dequeues for the antichain descent, rounds for the counterexample loop.
    pub iterations: usize,
    pub emptiness_calls: usize,
    pub peak_antichain: usize,
    /// `|A|` at the start of every iteration.
    pub antichain_sizes: Vec<usize>,
    /// Successive antichains of the counterexample loop.
    pub antichain_history: Vec<Antichain>,
    /// Duration of the lost-play query of every counterexample round.
    pub lost_query_times: Vec<Duration>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationResult {
    pub positive: bool,
    /// A lost play with a Pareto-optimal payoff; present iff negative.
    pub counterexample: Option<Lasso>,
    /// An antichain satisfying the certificate conditions; present iff
    /// positive.
    pub certificate: Option<Antichain>,
    /// The antichain held by the procedure when it stopped.
    pub antichain: Antichain,
    pub stats: VerificationStats,
}

impl VerificationResult {
    fn positive(certificate: Antichain, stats: VerificationStats) -> Self {
        VerificationResult {
            positive: true,
            counterexample: None,
            certificate: Some(certificate.clone()),
            antichain: certificate,
            stats,
        }
    }

    fn negative(witness: Lasso, antichain: Antichain, stats: VerificationStats) -> Self {
        VerificationResult { positive: false, counterexample: Some(witness), certificate: None, antichain, stats }
    }

    /// Extended payoff of the counterexample, if any.
    pub fn counterexample_payoff(&self, arena: &GameArena) -> Option<ExtendedPayoff> {
        self.counterexample.as_ref().map(|w| extended_payoff(arena, &w.inf_set()))
    }
}

fn enumerable(t: usize) -> Result<(), VerifyError> {
    if t > MAX_ENUMERATED_OBJECTIVES {
        Err(VerifyError::LatticeTooLarge(t))
    } else {
        Ok(())
    }
}

fn pareto_set_with(queries: &Queries<'_>) -> Result<Antichain, VerifyError> {
    let t = queries.objective_count();
    enumerable(t)?;
    let mut realizable = Vec::new();
    for p in Payoff::all(t) {
        if queries.exists_payoff_eq(&p)?.is_some() {
            realizable.push(p);
        }
    }
    Ok(Antichain::ceil(realizable))
}

/// The Pareto set: maximal payoffs among those realized by some play.
pub fn compute_pareto_set(arena: &GameArena) -> Result<Antichain, VerifyError> {
    pareto_set_with(&Queries::new(arena)?)
}

pub fn verify(arena: &GameArena, algorithm: Algorithm) -> Result<VerificationResult, VerifyError> {
    match algorithm {
        Algorithm::Naive => naive_verify(arena),
        Algorithm::Antichain => antichain_verify(arena),
        Algorithm::Counterexample => counterexample_verify(arena),
    }
}

pub fn naive_verify(arena: &GameArena) -> Result<VerificationResult, VerifyError> {
    let start = Instant::now();
    let queries = Queries::new(arena)?;
    let pareto = pareto_set_with(&queries)?;
    let mut stats = VerificationStats {
        iterations: 1 << queries.objective_count(),
        peak_antichain: pareto.len(),
        ..Default::default()
    };
    let mut witness = None;
    for p in &pareto {
        if let Some(w) = queries.exists_extended(false, p, Mode::Eq)? {
            witness = Some(w);
            break;
        }
    }
    stats.emptiness_calls = queries.calls();
    stats.wall_time = start.elapsed();
    Ok(match witness {
        Some(w) => VerificationResult::negative(w, pareto, stats),
        None => VerificationResult::positive(pareto, stats),
    })
}

/// Level-by-level descent from the top payoff.
///
/// Both realizability tests use `≥` queries. A payoff `p` reaches the test
/// only when `p ∉ ↓^<A`. Any realizable `q > p` outside `↓^<A` lies on a
/// higher level, so it was dequeued and added to `A` earlier, putting `p`
/// into `↓^<A`. Hence no realizable payoff exceeds `p` at that point, and a
/// play with payoff `≥ p` has payoff exactly `p`.
pub fn antichain_verify(arena: &GameArena) -> Result<VerificationResult, VerifyError> {
    let start = Instant::now();
    let queries = Queries::new(arena)?;
    let t = queries.objective_count();
    let mut stats = VerificationStats::default();
    let mut antichain = Antichain::new();
    let mut queue = VecDeque::from([Payoff::top(t)]);
    let mut enqueued: HashSet<Payoff> = HashSet::from([Payoff::top(t)]);

    let finish = |mut stats: VerificationStats, antichain: &Antichain, queries: &Queries<'_>| {
        stats.emptiness_calls = queries.calls();
        stats.peak_antichain = antichain.len();
        stats.wall_time = start.elapsed();
        stats
    };

    while let Some(p) = queue.pop_front() {
        stats.iterations += 1;
        stats.antichain_sizes.push(antichain.len());
        if antichain.strictly_dominates(&p) {
            continue;
        }
        if queries.exists_payoff_geq(&p)?.is_some() {
            antichain.insert(p);
            if let Some(w) = queries.exists_extended(false, &p, Mode::Geq)? {
                let stats = finish(stats, &antichain, &queries);
                return Ok(VerificationResult::negative(w, antichain, stats));
            }
        } else {
            for child in p.one_bit_down() {
                if !antichain.strictly_dominates(&child) && enqueued.insert(child) {
                    queue.push_back(child);
                }
            }
        }
    }
    let stats = finish(stats, &antichain, &queries);
    Ok(VerificationResult::positive(antichain, stats))
}

/// Counterexample-guided construction of a certificate.
///
/// A lost play that no won play strictly dominates proves the instance
/// negative; before it is reported, it is replaced by lost plays of
/// strictly larger payoff until its payoff is Pareto-optimal.
pub fn counterexample_verify(arena: &GameArena) -> Result<VerificationResult, VerifyError> {
    let start = Instant::now();
    let queries = Queries::new(arena)?;
    let mut stats = VerificationStats::default();
    let mut antichain = Antichain::new();

    loop {
        stats.iterations += 1;
        stats.antichain_sizes.push(antichain.len());
        stats.antichain_history.push(antichain.clone());
        stats.peak_antichain = stats.peak_antichain.max(antichain.len());

        let asked = Instant::now();
        let lost = queries.exists_lost_not_below(&antichain)?;
        stats.lost_query_times.push(asked.elapsed());
        let Some(lost) = lost else {
            stats.emptiness_calls = queries.calls();
            stats.wall_time = start.elapsed();
            return Ok(VerificationResult::positive(antichain, stats));
        };

        let p = queries.payoff_of(&lost);
        let mut dominating = None;
        for q in p.one_bit_up() {
            if let Some(w) = queries.exists_extended(true, &q, Mode::Geq)? {
                dominating = Some(w);
                break;
            }
        }
        match dominating {
            Some(w) => {
                let better = queries.payoff_of(&w);
                antichain.insert(better);
            }
            None => {
                let witness = climb_lost(&queries, lost)?;
                stats.emptiness_calls = queries.calls();
                stats.wall_time = start.elapsed();
                return Ok(VerificationResult::negative(witness, antichain, stats));
            }
        }
    }
}

/// Replaces a lost play by lost plays of strictly larger payoff until none
/// exists. Only called when no won play dominates the current payoff, so
/// every play above it is lost too.
fn climb_lost(queries: &Queries<'_>, mut lost: Lasso) -> Result<Lasso, VerifyError> {
    'climb: loop {
        let p = queries.payoff_of(&lost);
        for q in p.one_bit_up() {
            if let Some(w) = queries.exists_extended(false, &q, Mode::Geq)? {
                lost = w;
                continue 'climb;
            }
        }
        return Ok(lost);
    }
}

/// Whether `antichain` is a certificate: every element is realizable and
/// every lost play has a payoff strictly below some element.
pub fn check_certificate(arena: &GameArena, antichain: &Antichain) -> Result<bool, VerifyError> {
    let queries = Queries::new(arena)?;
    for p in antichain {
        if queries.exists_payoff_eq(p)?.is_none() {
            return Ok(false);
        }
    }
    Ok(queries.exists_lost_not_below(antichain)?.is_none())
}
