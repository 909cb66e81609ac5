use std::fmt;

use super::GeneratorError;
use crate::arena::{GameArena, Player, Priority, Vertex};

/// A variable (numbered from 1) or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub variable: usize,
    pub positive: bool,
}

impl Literal {
    /// Reads a DIMACS-style signed index.
    pub fn from_signed(value: i64) -> Option<Literal> {
        (value != 0).then(|| Literal { variable: value.unsigned_abs() as usize, positive: value > 0 })
    }

    pub fn signed(self) -> i64 {
        let v = self.variable as i64;
        if self.positive {
            v
        } else {
            -v
        }
    }

    pub fn negated(self) -> Literal {
        Literal { positive: !self.positive, ..self }
    }

    pub fn holds(self, assignment: &[bool]) -> bool {
        assignment[self.variable - 1] == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("¬")?;
        }
        write!(f, "x{}", self.variable)
    }
}

/// A CNF formula whose clauses have one to three literals and in which
/// every variable occurs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    variable_count: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(variable_count: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, GeneratorError> {
        let bad = |msg: String| Err(GeneratorError::InvalidFormula(msg));
        if clauses.is_empty() {
            return bad("the formula has no clause".into());
        }
        let mut occurs = vec![false; variable_count];
        for (i, clause) in clauses.iter().enumerate() {
            if clause.is_empty() || clause.len() > 3 {
                return bad(format!("clause {} has {} literals, expected 1 to 3", i + 1, clause.len()));
            }
            for lit in clause {
                if lit.variable == 0 || lit.variable > variable_count {
                    return bad(format!("clause {} mentions variable {} of {}", i + 1, lit.variable, variable_count));
                }
                occurs[lit.variable - 1] = true;
            }
        }
        if let Some(v) = occurs.iter().position(|&o| !o) {
            return bad(format!("variable {} occurs in no clause", v + 1));
        }
        Ok(CnfFormula { variable_count, clauses })
    }

    /// Builds a formula from signed indices, DIMACS style.
    pub fn from_signed(variable_count: usize, clauses: &[&[i64]]) -> Result<Self, GeneratorError> {
        let clauses = clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&l| Literal::from_signed(l).ok_or_else(|| GeneratorError::InvalidFormula("literal 0".into())))
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        CnfFormula::new(variable_count, clauses)
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn literal_count(&self) -> usize {
        self.clauses.iter().map(Vec::len).sum()
    }

    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.holds(assignment)))
    }

    /// A satisfying assignment found by trying all of them.
    pub fn satisfying_assignment(&self) -> Option<Vec<bool>> {
        let m = self.variable_count;
        (0u64..1 << m)
            .map(|bits| (0..m).map(|k| bits >> k & 1 == 1).collect::<Vec<_>>())
            .find(|a| self.evaluate(a))
    }

    pub fn is_satisfiable(&self) -> bool {
        self.satisfying_assignment().is_some()
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, clause) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∧ ")?;
            }
            f.write_str("(")?;
            for (j, lit) in clause.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ∨ ")?;
                }
                write!(f, "{lit}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Vertex and objective numbering of the arena built by [`gen_from_cnf`].
///
/// Vertex 0 is initial and moves to `v1` (first part) or `v2` (second
/// part). The first part is one cycle through `v1` choosing `x` or `¬x` for
/// every variable in turn, each choice followed by a junction. The second
/// part offers one such cycle per clause, entered through its own start
/// vertex `s_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CnfLayout {
    pub variables: usize,
    pub clauses: usize,
}

impl CnfLayout {
    pub const INITIAL: Vertex = 0;
    pub const V1: Vertex = 1;

    pub fn v2(&self) -> Vertex {
        2 + 3 * self.variables
    }

    /// Start vertex of the cycle for clause `i` (from 0).
    pub fn clause_start(&self, i: usize) -> Vertex {
        self.v2() + 1 + i * (1 + 3 * self.variables)
    }

    /// Vertex labeled by `lit` in the first part (`clause == None`) or in
    /// the cycle of a clause.
    pub fn literal_vertex(&self, clause: Option<usize>, lit: Literal) -> Vertex {
        let base = match clause {
            None => Self::V1,
            Some(i) => self.clause_start(i),
        };
        base + 1 + 3 * (lit.variable - 1) + usize::from(!lit.positive)
    }

    pub fn junction(&self, clause: Option<usize>, variable: usize) -> Vertex {
        self.literal_vertex(clause, Literal { variable, positive: true }) + 2
    }

    pub fn vertex_count(&self) -> usize {
        self.clause_start(self.clauses)
    }

    pub fn in_second_part(&self, v: Vertex) -> bool {
        v >= self.v2()
    }

    /// Objective requiring that `lit`'s negation is eventually avoided.
    pub fn literal_objective(&self, lit: Literal) -> usize {
        2 + 2 * (lit.variable - 1) + usize::from(!lit.positive)
    }

    /// Objective of the `j`-th literal (from 0) of clause `i`, given the
    /// clause sizes.
    pub fn occurrence_objective(formula: &CnfFormula, i: usize, j: usize) -> usize {
        let before: usize = formula.clauses()[..i].iter().map(Vec::len).sum();
        2 + 2 * formula.variable_count() + before + j
    }
}

/// Builds the arena whose instance is positive iff `formula` is
/// unsatisfiable.
///
/// Objectives, after the system's: the objective shared with the system
/// (met only by plays ending in the second part), then for every variable
/// `x` one objective for `x` and one for `¬x`, then one objective per
/// literal occurrence in clause order. All priorities are 1 or 2.
pub fn gen_from_cnf(formula: &CnfFormula) -> GameArena {
    let m = formula.variable_count();
    let r = formula.clauses().len();
    let layout = CnfLayout { variables: m, clauses: r };
    let n = layout.vertex_count();
    let t = 1 + 2 * m + formula.literal_count();

    let mut successors: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    successors[CnfLayout::INITIAL] = vec![CnfLayout::V1, layout.v2()];
    successors[layout.v2()] = (0..r).map(|i| layout.clause_start(i)).collect();
    let parts = std::iter::once(None).chain((0..r).map(Some));
    for part in parts.clone() {
        let head = part.map_or(CnfLayout::V1, |i| layout.clause_start(i));
        let mut from = head;
        for x in 1..=m {
            let pos = layout.literal_vertex(part, Literal { variable: x, positive: true });
            let neg = layout.literal_vertex(part, Literal { variable: x, positive: false });
            let junction = layout.junction(part, x);
            successors[from] = vec![pos, neg];
            successors[pos] = vec![junction];
            successors[neg] = vec![junction];
            from = junction;
        }
        successors[from] = vec![head];
    }

    let mut priorities: Vec<Vec<Priority>> = vec![vec![2; t + 1]; n];
    for (v, row) in priorities.iter_mut().enumerate() {
        let shared = if layout.in_second_part(v) { 2 } else { 1 };
        row[0] = shared;
        row[1] = shared;
    }
    for part in parts {
        for x in 1..=m {
            for positive in [true, false] {
                let lit = Literal { variable: x, positive };
                let v = layout.literal_vertex(part, lit);
                // Visiting `lit` infinitely often violates the objective of its negation.
                priorities[v][layout.literal_objective(lit.negated())] = 1;
                if part.is_none() {
                    for (i, clause) in formula.clauses().iter().enumerate() {
                        for (j, &occ) in clause.iter().enumerate() {
                            if occ == lit.negated() {
                                priorities[v][CnfLayout::occurrence_objective(formula, i, j)] = 1;
                            }
                        }
                    }
                }
            }
        }
    }
    for i in 0..r {
        let s = layout.clause_start(i);
        for j in 0..formula.clauses()[i].len() {
            priorities[s][CnfLayout::occurrence_objective(formula, i, j)] = 1;
        }
    }

    GameArena::try_new(vec![Player::Environment; n], successors, 0, priorities, Some(vec![2; t + 1]))
        .expect("reduction arena is valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emptiness::extended_payoff;

    #[test]
    fn formula_validation() {
        assert!(CnfFormula::from_signed(1, &[]).is_err());
        assert!(CnfFormula::from_signed(2, &[&[1]]).is_err());
        assert!(CnfFormula::from_signed(1, &[&[1, 1, 1, 1]]).is_err());
        assert!(CnfFormula::from_signed(1, &[&[2]]).is_err());
        assert!(CnfFormula::from_signed(1, &[&[0]]).is_err());
        let f = CnfFormula::from_signed(2, &[&[1, -2], &[2]]).unwrap();
        assert_eq!(f.to_string(), "(x1 ∨ ¬x2) ∧ (x2)");
        assert_eq!(f.satisfying_assignment(), Some(vec![true, true]));
        assert!(!CnfFormula::from_signed(1, &[&[1], &[-1]]).unwrap().is_satisfiable());
    }

    #[test]
    fn single_literal_arena() {
        let f = CnfFormula::from_signed(1, &[&[1]]).unwrap();
        let a = gen_from_cnf(&f);
        let l = CnfLayout { variables: 1, clauses: 1 };
        assert_eq!(a.vertex_count(), 10);
        assert_eq!(a.objective_count(), 4);
        assert_eq!(l.v2(), 5);
        assert_eq!(a.successors(0), &[1, 5]);
        assert_eq!(a.successors(1), &[2, 3]);
        assert_eq!(a.successors(4), &[1]);
        assert_eq!(a.successors(5), &[6]);
        assert_eq!(a.successors(9), &[6]);
        // Stable cycle choosing x1 in the first part.
        assert_eq!(extended_payoff(&a, &[1, 2, 4]).to_string(), "0,(0,1,0,1)");
        assert_eq!(extended_payoff(&a, &[6, 7, 9]).to_string(), "1,(1,1,0,0)");
        assert_eq!(extended_payoff(&a, &[1, 2, 3, 4]).to_string(), "0,(0,0,0,0)");
    }
}
