//! The payoff lattice `({0,1}^t, ≤)` and antichains over it.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Upper bound on the number of environment objectives.
pub const MAX_OBJECTIVES: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("payoff lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("at most {MAX_OBJECTIVES} objectives are supported, got {0}")]
    TooManyObjectives(usize),
    #[error("cannot parse payoff {0:?}")]
    Parse(String),
}

/// Outcome of comparing two payoffs componentwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayoffOrder {
    Less,
    Equal,
    Greater,
    Incomparable,
}

/// Which objectives a play satisfies. Bit `i` stands for objective `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Payoff {
    len: u8,
    bits: u64,
}

fn mask(len: usize) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl Payoff {
    pub fn new(len: usize, bits: u64) -> Result<Self, LatticeError> {
        if len > MAX_OBJECTIVES {
            return Err(LatticeError::TooManyObjectives(len));
        }
        Ok(Payoff { len: len as u8, bits: bits & mask(len) })
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self, LatticeError> {
        let word = bits.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i));
        Self::new(bits.len(), word)
    }

    pub fn bottom(len: usize) -> Self {
        Payoff { len: len as u8, bits: 0 }
    }

    pub fn top(len: usize) -> Self {
        Payoff { len: len as u8, bits: mask(len) }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Whether objective `i + 1` is satisfied.
    pub fn get(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn with(&self, i: usize, value: bool) -> Self {
        let bits = if value { self.bits | 1 << i } else { self.bits & !(1 << i) };
        Payoff { len: self.len, bits }
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }

    /// Componentwise comparison.
    pub fn compare(&self, other: &Payoff) -> Result<PayoffOrder, LatticeError> {
        if self.len != other.len {
            return Err(LatticeError::LengthMismatch(self.len(), other.len()));
        }
        Ok(match (self.bits & !other.bits == 0, other.bits & !self.bits == 0) {
            (true, true) => PayoffOrder::Equal,
            (true, false) => PayoffOrder::Less,
            (false, true) => PayoffOrder::Greater,
            (false, false) => PayoffOrder::Incomparable,
        })
    }

    /// `self ≤ other`. Lengths must agree.
    pub fn le(&self, other: &Payoff) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.bits & !other.bits == 0
    }

    /// `self < other`. Lengths must agree.
    pub fn lt(&self, other: &Payoff) -> bool {
        self.le(other) && self.bits != other.bits
    }

    /// Payoffs obtained by clearing exactly one set bit, by ascending index.
    pub fn one_bit_down(&self) -> Vec<Payoff> {
        (0..self.len()).filter(|&i| self.get(i)).map(|i| self.with(i, false)).collect()
    }

    /// Payoffs obtained by setting exactly one cleared bit, by ascending index.
    pub fn one_bit_up(&self) -> Vec<Payoff> {
        (0..self.len()).filter(|&i| !self.get(i)).map(|i| self.with(i, true)).collect()
    }

    /// Every payoff of length `len`, in increasing numeric order.
    pub fn all(len: usize) -> impl Iterator<Item = Payoff> {
        assert!(len < 64, "cannot enumerate 2^{len} payoffs");
        (0..1u64 << len).map(move |bits| Payoff { len: len as u8, bits })
    }
}

impl fmt::Display for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.iter().map(|b| if b { "1" } else { "0" }).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for Payoff {
    type Err = LatticeError;

    /// Parses `(1,0,1)`; the parentheses are optional.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        if inner.trim().is_empty() {
            return Ok(Payoff::bottom(0));
        }
        let bits = inner
            .split(',')
            .map(|part| match part.trim() {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(LatticeError::Parse(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Payoff::from_bools(&bits)
    }
}

/// A payoff together with the system's won-bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtendedPayoff {
    pub won: bool,
    pub payoff: Payoff,
}

impl fmt::Display for ExtendedPayoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", u8::from(self.won), self.payoff)
    }
}

/// Outcome of comparing two antichains under `⊑`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AntichainOrder {
    /// `A ⊑ B` and `A ≠ B`.
    StrictlyBelow,
    /// `A ⊑ B` and `A = B`.
    BelowOrEqual,
    Neither,
}

/// A set of pairwise incomparable payoffs, kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Antichain {
    elements: Vec<Payoff>,
}

impl Antichain {
    pub fn new() -> Self {
        Antichain::default()
    }

    /// The maximal elements of `payoffs`.
    pub fn ceil(payoffs: impl IntoIterator<Item = Payoff>) -> Self {
        let mut out = Antichain::new();
        for p in payoffs {
            out.insert(p);
        }
        out
    }

    /// Adds `p` unless some element dominates it, dropping the elements `p`
    /// dominates. Returns whether `p` was added.
    pub fn insert(&mut self, p: Payoff) -> bool {
        if self.elements.iter().any(|q| p.le(q)) {
            return false;
        }
        self.elements.retain(|q| !q.lt(&p));
        let at = self.elements.binary_search(&p).unwrap_err();
        self.elements.insert(at, p);
        true
    }

    /// Whether `p ∈ ↓^<A`, i.e. some element is strictly above `p`.
    pub fn strictly_dominates(&self, p: &Payoff) -> bool {
        self.elements.iter().any(|a| p.lt(a))
    }

    /// Like [`Antichain::strictly_dominates`], checking lengths.
    pub fn in_strict_down(&self, p: &Payoff) -> Result<bool, LatticeError> {
        if let Some(a) = self.elements.iter().find(|a| a.len() != p.len()) {
            return Err(LatticeError::LengthMismatch(p.len(), a.len()));
        }
        Ok(self.strictly_dominates(p))
    }

    /// Whether some element is `≥ p`.
    pub fn dominates(&self, p: &Payoff) -> bool {
        self.elements.iter().any(|a| p.le(a))
    }

    /// Compares `self` against `other` under `⊑`.
    pub fn compare(&self, other: &Antichain) -> AntichainOrder {
        if !self.elements.iter().all(|a| other.dominates(a)) {
            AntichainOrder::Neither
        } else if self == other {
            AntichainOrder::BelowOrEqual
        } else {
            AntichainOrder::StrictlyBelow
        }
    }

    pub fn is_below(&self, other: &Antichain) -> bool {
        self.compare(other) != AntichainOrder::Neither
    }

    pub fn is_strictly_below(&self, other: &Antichain) -> bool {
        self.compare(other) == AntichainOrder::StrictlyBelow
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, p: &Payoff) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Payoff> {
        self.elements.iter()
    }

    pub fn as_slice(&self) -> &[Payoff] {
        &self.elements
    }
}

impl<'a> IntoIterator for &'a Antichain {
    type Item = &'a Payoff;
    type IntoIter = std::slice::Iter<'a, Payoff>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

impl FromIterator<Payoff> for Antichain {
    fn from_iter<I: IntoIterator<Item = Payoff>>(iter: I) -> Self {
        Antichain::ceil(iter)
    }
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Payoff {
        s.parse().unwrap()
    }

    fn chain(items: &[&str]) -> Antichain {
        Antichain::ceil(items.iter().map(|s| p(s)))
    }

    #[test]
    fn compare_examples() {
        assert_eq!(p("(0,1,0)").compare(&p("(0,1,1)")), Ok(PayoffOrder::Less));
        assert_eq!(p("(0,1,1)").compare(&p("(1,1,0)")), Ok(PayoffOrder::Incomparable));
        assert_eq!(p("(1,0,1)").compare(&p("(1,0,1)")), Ok(PayoffOrder::Equal));
        assert_eq!(p("(1,1,1)").compare(&p("(1,0,1)")), Ok(PayoffOrder::Greater));
        assert_eq!(p("(1,1)").compare(&p("(1,1,1)")), Err(LatticeError::LengthMismatch(2, 3)));
    }

    #[test]
    fn ceil_examples() {
        let a = chain(&["(0,0,0)", "(0,1,0)", "(0,1,1)", "(1,1,0)"]);
        assert_eq!(a, chain(&["(0,1,1)", "(1,1,0)"]));
        assert_eq!(a.len(), 2);
        assert!(Antichain::ceil(std::iter::empty()).is_empty());

        // Payoffs displayed on the loops of the intersection arena.
        let loops = [
            "(0,0,0,0)", "(0,0,0,1)", "(1,0,0,1)", "(0,0,1,1)", "(1,0,1,1)", "(0,0,1,0)",
            "(1,0,1,0)", "(0,1,0,0)", "(1,1,0,0)",
        ];
        assert_eq!(chain(&loops), chain(&["(1,0,1,1)", "(1,1,0,0)"]));
    }

    #[test]
    fn strict_down_closure() {
        let a = chain(&["(0,1,1)", "(1,1,0)"]);
        assert!(a.strictly_dominates(&p("(0,0,1)")));
        assert!(!a.strictly_dominates(&p("(1,0,1)")));
        assert!(!a.strictly_dominates(&p("(1,1,1)")));
        assert!(!a.strictly_dominates(&p("(0,1,1)")));
        assert!(a.in_strict_down(&p("(0,1)")).is_err());
    }

    #[test]
    fn antichain_order_examples() {
        let a = chain(&["(0,1,1)", "(1,1,0)"]);
        let a2 = chain(&["(0,1,0)"]);
        assert_eq!(a2.compare(&a), AntichainOrder::StrictlyBelow);
        assert_eq!(a.compare(&a), AntichainOrder::BelowOrEqual);
        assert_eq!(chain(&["(1,0,0)"]).compare(&chain(&["(0,1,0)"])), AntichainOrder::Neither);
        assert_eq!(Antichain::new().compare(&a), AntichainOrder::StrictlyBelow);
    }

    #[test]
    fn one_bit_neighbours() {
        assert_eq!(p("(1,1)").one_bit_down(), vec![p("(0,1)"), p("(1,0)")]);
        assert!(p("(0,0)").one_bit_down().is_empty());
        assert_eq!(p("(1,0,1,1)").one_bit_up(), vec![p("(1,1,1,1)")]);
    }

    #[test]
    fn rendering_round_trips() {
        assert_eq!(p("(1,0,1,1)").to_string(), "(1,0,1,1)");
        let e = ExtendedPayoff { won: false, payoff: p("(0,0,0,1)") };
        assert_eq!(e.to_string(), "0,(0,0,0,1)");
        assert!("(1,2)".parse::<Payoff>().is_err());
        assert_eq!(Payoff::top(64).count_ones(), 64);
    }

    fn payoff_set(len: usize) -> impl Strategy<Value = Vec<Payoff>> {
        prop::collection::vec(0u64..(1 << len), 0..12)
            .prop_map(move |v| v.into_iter().map(|b| Payoff::new(len, b).unwrap()).collect())
    }

    fn antichain(len: usize) -> impl Strategy<Value = Antichain> {
        payoff_set(len).prop_map(Antichain::ceil)
    }

    proptest! {
        #[test]
        fn ceil_is_maximal_and_idempotent(set in payoff_set(4)) {
            let c = Antichain::ceil(set.iter().copied());
            for a in &c {
                prop_assert!(set.contains(a));
                for b in &c {
                    prop_assert!(a == b || a.compare(b).unwrap() == PayoffOrder::Incomparable);
                }
            }
            for q in &set {
                prop_assert!(c.dominates(q));
            }
            prop_assert_eq!(Antichain::ceil(c.iter().copied()), c.clone());
            prop_assert!(c.len() <= 1 << 4);
        }

        #[test]
        fn strict_down_of_ceil_matches_set(set in payoff_set(4), probe in 0u64..16) {
            let q = Payoff::new(4, probe).unwrap();
            let c = Antichain::ceil(set.iter().copied());
            prop_assert_eq!(c.strictly_dominates(&q), set.iter().any(|s| q.lt(s)));
        }

        #[test]
        fn antichain_order_is_transitive(a in antichain(3), b in antichain(3), c in antichain(3)) {
            if a.is_below(&b) && b.is_below(&c) {
                prop_assert!(a.is_below(&c));
            }
            if a.is_strictly_below(&b) {
                prop_assert!(!b.is_strictly_below(&a));
            }
            prop_assert!(!a.is_strictly_below(&a));
        }
    }
}
