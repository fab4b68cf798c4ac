//! Syntactically co-safe LTL: parsing, compilation to good-prefix DFAs,
//! a reference evaluator, and the product with a labeled game.

mod dfa;
mod formula;
mod parser;
mod product;
mod semantics;

use thiserror::Error;

pub use dfa::{compile, Dfa, DfaDocument, DfaEdge, MAX_PROPS};
pub use formula::{Expr, Formula};
pub use parser::parse;
pub use product::{product, product_without_sinks};
pub use semantics::semantic_oracle;

#[derive(Debug, Error)]
pub enum ScltlError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("undeclared proposition `{name}` at {pos}")]
    UndeclaredProp { name: String, pos: usize },
    #[error("negation applied to a compound formula at {pos}")]
    NegatedCompound { pos: usize },
    #[error("invalid proposition name `{0}`")]
    BadProposition(String),
    #[error("{0} propositions exceed the alphabet limit of {MAX_PROPS}")]
    TooManyProps(usize),
    #[error("automaton exceeds {0} states")]
    TooManyStates(usize),
    #[error("symbol {0} is outside the alphabet")]
    SymbolOutOfRange(u32),
    #[error("automata are over different propositions")]
    PropMismatch,
    #[error("malformed automaton: {0}")]
    Dfa(String),
    #[error("malformed automaton document: {0}")]
    Schema(#[from] serde_json::Error),
}
