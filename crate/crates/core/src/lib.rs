//! Pareto-rational verification of single-player parity Stackelberg-Pareto
//! games.
//!
//! Given a single-player arena with one parity objective for the system and
//! `t` parity objectives for the environment, the verifier decides whether
//! every play with a Pareto-optimal environment payoff is won by the system.

pub mod acceptance;
pub mod arena;
pub mod bench;
pub mod emptiness;
pub mod generators;
pub mod io;
pub mod lattice;
pub mod oracle;
pub mod realizability;
pub mod verifier;
