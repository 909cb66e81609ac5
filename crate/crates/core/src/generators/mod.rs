//! Instance families: the intersection example and its scaled copies,
//! random arenas, and the arena built from a CNF formula.

mod cnf;
mod intersection;
mod random;

pub use cnf::{gen_from_cnf, CnfFormula, CnfLayout, Literal};
pub use intersection::{gen_intersection, INTERSECTION_VERTICES};
pub use random::{gen_random, RandomSpec};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid formula: {0}")]
    InvalidFormula(String),
}
