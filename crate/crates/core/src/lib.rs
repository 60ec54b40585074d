//! Asynchronous and concurrent game semantics of multiplicative-additive
//! linear logic.
//!
//! Formulas are turned into asynchronous games, sequent proofs into
//! positional strategies, and strategies into closure operators on the
//! lattice of positions. Every property of the model is decided by
//! exhaustive enumeration, which keeps instances small but exact.

pub mod formula;
pub mod game;
pub mod homotopy;
pub mod proof;
pub mod strategy;
pub mod concurrent;
pub mod compose;
pub mod focus;
pub mod export;
pub mod corpus;

pub use formula::{parse_formula, Addr, Formula, ParseError, Position, Side};
pub use game::{AsyncGame, Polarity, VarEnv, Vertex};
