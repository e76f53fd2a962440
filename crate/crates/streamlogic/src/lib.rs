//! Linear temporal logic over partial streams, with a geometric-logic backend.
//!
//! A partial stream assigns to every position either a letter from a finite
//! alphabet or "undefined" (bottom). Total streams are the usual omega-words;
//! partial ones order themselves by information content. This crate works with
//! the ultimately periodic (lasso shaped) representatives of that domain, which
//! are exactly the streams a finite check can decide facts about.
//!
//! The modules:
//!
//! * [`stream`]: lifted letters, lasso streams in canonical form, finite
//!   elements, and the information order.
//! * [`ltl`]: temporal formulas, a reference evaluator over lasso streams,
//!   the syntactic strata that control which backends apply, and the
//!   next-pushing rewrite.
//! * [`geometry`]: positive formulas over stream atoms (finite and countable
//!   joins of finite conjunctions), sequents, symbolic theories, valuations,
//!   and budgeted satisfaction checking.
//! * [`translation`]: the inductive translation of negation-free temporal
//!   formulas into geometric formulas and theories, with stabilization hints
//!   that make lasso-stream checks terminate with a definite verdict.
//! * [`deduction`]: derivations in the sequent calculus for geometric logic
//!   over a theory, a structural proof checker, and an exhaustive soundness
//!   harness for small universes.
//! * [`filter`]: the stream-filter case study connecting a fueled filter to
//!   its limit through the geometric translation.
//! * [`acceptance`]: the executable acceptance suite (also wired into the
//!   command-line `selftest`).

pub mod acceptance;
pub mod deduction;
pub mod filter;
pub mod geometry;
pub mod ltl;
pub mod stream;
pub mod translation;

use std::fmt;

/// Error produced by the text parsers, with a character position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError { position, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}
