//! Text formats: SPGAME arenas, MOORE strategies, DIMACS formulas and
//! printed lassos.
//!
//! All formats are line based with whitespace-separated fields. Text after
//! `#` is ignored, as are blank lines.
//!
//! ```text
//! SPGAME 1
//! VERTICES 2
//! OBJECTIVES 1
//! MAXPRIORITY 2 2
//! INITIAL 0
//! V 0 1 1 0
//! V 1 1 0 2
//! E 0 1
//! E 1 1
//! END
//! ```
//!
//! A `V` line gives the owner (0 for the system, 1 for the environment)
//! followed by one priority per objective, the system's first.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::arena::{GameArena, Lasso, MooreMachine, Player, Priority, Vertex, Violation};
use crate::generators::{CnfFormula, GeneratorError, Literal};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid arena: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Formula(#[from] GeneratorError),
}

fn join(violations: &[Violation]) -> String {
    violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { inner: text.lines().enumerate(), last: 0 }
    }

    /// Next non-empty line as `(line number, fields)`.
    fn next_fields(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let content = raw.split('#').next().unwrap_or("");
            let fields: Vec<&str> = content.split_whitespace().collect();
            self.last = i + 1;
            if !fields.is_empty() {
                return Some((i + 1, fields));
            }
        }
        None
    }
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, IoError> {
    Err(IoError::Parse { line, message: message.into() })
}

fn number<T: FromStr>(line: usize, field: &str, what: &str) -> Result<T, IoError> {
    field.parse().or_else(|_| err(line, format!("{what} must be a non-negative integer, found {field:?}")))
}

fn expect_header(lines: &mut Lines<'_>, keyword: &str, version: &str) -> Result<(), IoError> {
    match lines.next_fields() {
        Some((_, f)) if f == [keyword, version] => Ok(()),
        Some((line, f)) => err(line, format!("expected \"{keyword} {version}\", found {:?}", f.join(" "))),
        None => err(lines.last.max(1), format!("expected \"{keyword} {version}\", found end of input")),
    }
}

/// Checks that a keyword line carries exactly `count` values.
fn single(line: usize, fields: &[&str], count: usize) -> Result<(), IoError> {
    if fields.len() != count + 1 {
        return err(line, format!("{} takes {count} value(s), found {}", fields[0], fields.len() - 1));
    }
    Ok(())
}

pub fn parse_arena(text: &str) -> Result<GameArena, IoError> {
    let mut lines = Lines::new(text);
    expect_header(&mut lines, "SPGAME", "1")?;

    let mut vertices: Option<usize> = None;
    let mut objectives: Option<usize> = None;
    let mut max_priority: Option<Vec<Priority>> = None;
    let mut initial: Option<Vertex> = None;
    let mut owner: Vec<Option<Player>> = Vec::new();
    let mut priorities: Vec<Vec<Priority>> = Vec::new();
    let mut successors: Vec<Vec<Vertex>> = Vec::new();
    let mut ended = false;

    while let Some((line, fields)) = lines.next_fields() {
        if ended {
            return err(line, "content after END");
        }
        let body_started = !owner.is_empty();
        match fields[0] {
            "VERTICES" | "OBJECTIVES" | "MAXPRIORITY" | "INITIAL" if body_started => {
                return err(line, format!("{} must precede vertex and edge lines", fields[0]));
            }
            "VERTICES" => {
                single(line, &fields, 1)?;
                vertices = Some(number(line, fields[1], "vertex count")?);
            }
            "OBJECTIVES" => {
                single(line, &fields, 1)?;
                let t: usize = number(line, fields[1], "objective count")?;
                if t > crate::lattice::MAX_OBJECTIVES {
                    return err(line, format!("at most {} objectives are supported", crate::lattice::MAX_OBJECTIVES));
                }
                objectives = Some(t);
            }
            "MAXPRIORITY" => {
                let values =
                    fields[1..].iter().map(|f| number(line, f, "priority")).collect::<Result<Vec<Priority>, _>>()?;
                max_priority = Some(values);
            }
            "INITIAL" => {
                single(line, &fields, 1)?;
                initial = Some(number(line, fields[1], "initial vertex")?);
            }
            "V" | "E" => {
                let (Some(n), Some(t), Some(max), Some(_)) = (vertices, objectives, &max_priority, initial) else {
                    return err(line, "VERTICES, OBJECTIVES, MAXPRIORITY and INITIAL must precede vertex and edge lines");
                };
                if max.len() != t + 1 {
                    return err(line, format!("MAXPRIORITY lists {} values, expected {}", max.len(), t + 1));
                }
                if !body_started {
                    owner = vec![None; n];
                    priorities = vec![Vec::new(); n];
                    successors = vec![Vec::new(); n];
                    if n == 0 {
                        return err(line, "an arena needs at least one vertex");
                    }
                }
                if fields[0] == "V" {
                    if fields.len() != t + 4 {
                        return err(line, format!("V takes an id, an owner and {} priorities", t + 1));
                    }
                    let id: Vertex = number(line, fields[1], "vertex id")?;
                    if id >= n {
                        return err(line, format!("vertex {id} out of range"));
                    }
                    if owner[id].is_some() {
                        return err(line, format!("vertex {id} declared twice"));
                    }
                    let player = match fields[2] {
                        "0" => Player::System,
                        "1" => Player::Environment,
                        _ => return err(line, "owner must be 0 or 1"),
                    };
                    owner[id] = Some(player);
                    priorities[id] =
                        fields[3..].iter().map(|f| number(line, f, "priority")).collect::<Result<_, _>>()?;
                } else {
                    if fields.len() != 3 {
                        return err(line, "E takes a source and a target");
                    }
                    let src: Vertex = number(line, fields[1], "edge source")?;
                    let dst: Vertex = number(line, fields[2], "edge target")?;
                    if src >= n {
                        return err(line, format!("edge source {src} out of range"));
                    }
                    if successors[src].contains(&dst) {
                        return err(line, format!("duplicate edge {src} {dst}"));
                    }
                    successors[src].push(dst);
                }
            }
            "END" => {
                single(line, &fields, 0)?;
                ended = true;
            }
            other => return err(line, format!("unknown keyword {other:?}")),
        }
    }
    if !ended {
        return err(lines.last.max(1), "missing END");
    }
    let (Some(n), Some(_), Some(max), Some(initial)) = (vertices, objectives, max_priority, initial) else {
        return err(lines.last, "header incomplete: VERTICES, OBJECTIVES, MAXPRIORITY and INITIAL are required");
    };
    if owner.is_empty() {
        return err(lines.last, if n == 0 { "an arena needs at least one vertex".to_string() } else { "no vertex lines".to_string() });
    }
    if let Some(v) = owner.iter().position(Option::is_none) {
        return err(lines.last, format!("vertex {v} is never declared"));
    }
    let owner = owner.into_iter().map(|o| o.expect("checked above")).collect();
    let arena = GameArena::from_parts(owner, successors, initial, priorities, Some(max))
        .map_err(|e| IoError::Parse { line: lines.last, message: e.to_string() })?;
    let violations = arena.validate();
    if !violations.is_empty() {
        return Err(IoError::Invalid(violations));
    }
    Ok(arena)
}

fn join_numbers<T: ToString>(values: impl IntoIterator<Item = T>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Canonical SPGAME text; [`parse_arena`] reads it back unchanged.
pub fn write_arena(arena: &GameArena) -> String {
    let mut out = String::new();
    out.push_str("SPGAME 1\n");
    writeln!(out, "VERTICES {}", arena.vertex_count()).unwrap();
    writeln!(out, "OBJECTIVES {}", arena.objective_count()).unwrap();
    writeln!(out, "MAXPRIORITY {}", join_numbers(arena.max_priorities())).unwrap();
    writeln!(out, "INITIAL {}", arena.initial()).unwrap();
    for v in arena.vertices() {
        writeln!(out, "V {v} {} {}", arena.owner(v).index(), join_numbers(arena.priorities(v))).unwrap();
    }
    for v in arena.vertices() {
        for w in arena.successors(v) {
            writeln!(out, "E {v} {w}").unwrap();
        }
    }
    out.push_str("END\n");
    out
}

/// Reads a strategy:
///
/// ```text
/// MOORE 1
/// STATES 2
/// INITIAL 0
/// T 0 3 1     # in state 0, reading vertex 3 leads to state 1
/// C 1 3 4     # in state 1 at vertex 3, move to vertex 4
/// END
/// ```
pub fn parse_moore(text: &str) -> Result<MooreMachine, IoError> {
    let mut lines = Lines::new(text);
    expect_header(&mut lines, "MOORE", "1")?;
    let mut states: Option<usize> = None;
    let mut initial: Option<usize> = None;
    let mut update = HashMap::new();
    let mut choice = HashMap::new();
    let mut ended = false;
    while let Some((line, fields)) = lines.next_fields() {
        if ended {
            return err(line, "content after END");
        }
        match fields[0] {
            "STATES" => {
                single(line, &fields, 1)?;
                let k: usize = number(line, fields[1], "state count")?;
                if k == 0 {
                    return err(line, "a machine needs at least one state");
                }
                states = Some(k);
            }
            "INITIAL" => {
                single(line, &fields, 1)?;
                initial = Some(number(line, fields[1], "initial state")?);
            }
            "T" | "C" => {
                let Some(k) = states else {
                    return err(line, "STATES must precede transitions");
                };
                single(line, &fields, 3)?;
                let state: usize = number(line, fields[1], "state")?;
                let vertex: Vertex = number(line, fields[2], "vertex")?;
                let value: usize = number(line, fields[3], if fields[0] == "T" { "state" } else { "vertex" })?;
                if state >= k || (fields[0] == "T" && value >= k) {
                    return err(line, format!("state out of range 0..{k}"));
                }
                let map = if fields[0] == "T" { &mut update } else { &mut choice };
                if map.insert((state, vertex), value).is_some() {
                    return err(line, format!("{} entry for state {state} and vertex {vertex} given twice", fields[0]));
                }
            }
            "END" => {
                single(line, &fields, 0)?;
                ended = true;
            }
            other => return err(line, format!("unknown keyword {other:?}")),
        }
    }
    if !ended {
        return err(lines.last.max(1), "missing END");
    }
    let (Some(state_count), Some(initial_state)) = (states, initial) else {
        return err(lines.last, "STATES and INITIAL are required");
    };
    if initial_state >= state_count {
        return err(lines.last, format!("initial state {initial_state} out of range 0..{state_count}"));
    }
    Ok(MooreMachine { state_count, initial_state, update, choice })
}

pub fn write_moore(machine: &MooreMachine) -> String {
    let mut out = String::from("MOORE 1\n");
    writeln!(out, "STATES {}", machine.state_count).unwrap();
    writeln!(out, "INITIAL {}", machine.initial_state).unwrap();
    let mut update: Vec<_> = machine.update.iter().collect();
    update.sort();
    for (&(s, v), &next) in update {
        writeln!(out, "T {s} {v} {next}").unwrap();
    }
    let mut choice: Vec<_> = machine.choice.iter().collect();
    choice.sort();
    for (&(s, v), &w) in choice {
        writeln!(out, "C {s} {v} {w}").unwrap();
    }
    out.push_str("END\n");
    out
}

/// Reads a DIMACS CNF file. Lines starting with `c` are comments; clauses
/// may span lines and end with `0`.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, IoError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('p') {
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if header.is_some() {
                return err(line, "duplicate problem line");
            }
            if fields.len() != 4 || fields[1] != "cnf" {
                return err(line, "expected \"p cnf <variables> <clauses>\"");
            }
            header = Some((number(line, fields[2], "variable count")?, number(line, fields[3], "clause count")?));
            continue;
        }
        let Some((m, _)) = header else {
            return err(line, "clause before the problem line");
        };
        for field in trimmed.split_whitespace() {
            let value: i64 = field.parse().or_else(|_| err(line, format!("bad literal {field:?}")))?;
            match Literal::from_signed(value) {
                None => clauses.push(std::mem::take(&mut current)),
                Some(lit) if lit.variable > m => {
                    return err(line, format!("variable {} exceeds the declared {m}", lit.variable));
                }
                Some(lit) => current.push(lit),
            }
        }
    }
    let Some((m, r)) = header else {
        return err(last.max(1), "missing problem line");
    };
    if !current.is_empty() {
        return err(last, "last clause is not terminated by 0");
    }
    if clauses.len() != r {
        return err(last, format!("problem line declares {r} clauses, found {}", clauses.len()));
    }
    Ok(CnfFormula::new(m, clauses)?)
}

pub fn write_dimacs(formula: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", formula.variable_count(), formula.clauses().len());
    for clause in formula.clauses() {
        writeln!(out, "{} 0", join_numbers(clause.iter().map(|l| l.signed()))).unwrap();
    }
    out
}

/// Reads a lasso printed as `prefix (cycle)^ω`, with `^w` accepted for
/// `^ω`.
pub fn parse_lasso(text: &str) -> Result<Lasso, IoError> {
    let text = text.trim();
    let bad = |message: &str| err(1, message.to_string());
    let body = text.strip_suffix("^ω").or_else(|| text.strip_suffix("^w"));
    let Some(body) = body.and_then(|b| b.strip_suffix(')')) else {
        return bad("expected a lasso of the form \"prefix (cycle)^ω\"");
    };
    let Some((prefix, cycle)) = body.split_once('(') else {
        return bad("missing \"(\" before the cycle");
    };
    let list = |s: &str| -> Result<Vec<Vertex>, IoError> { s.split_whitespace().map(|f| number(1, f, "vertex")).collect() };
    let cycle = list(cycle)?;
    if cycle.is_empty() {
        return bad("empty cycle");
    }
    Ok(Lasso::new(list(prefix)?, cycle))
}
