//! Pattern parsing and compilation to minimal deterministic automata.
//!
//! Pipeline: [`parse_query`] → Thompson ε-NFA → subset construction →
//! Hopcroft minimization → Boolean decomposition ([`TwoNfa`]).

mod ast;
mod automaton;
mod dfa;
mod nfa;

pub use ast::{parse_query, ParseError, RegexAst, Symbol};
pub use automaton::{compile, AutomatonError, Transition, TwoNfa};
pub use dfa::Dfa;
