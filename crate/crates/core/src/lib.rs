//! Fly-automata over clique-width terms of incidence graphs.
//!
//! Terms over the two-sorted signature (vertex labels positive, edge labels
//! negative) denote incidence graphs of directed graphs. Property automata
//! check them bottom-up with states computed on demand rather than stored
//! in tables.

pub mod label;
pub mod fa;
pub mod term;
pub mod automata;
pub mod oracle;
pub mod td;

pub use label::{Label, Sort};
pub use term::{parse_term, Position, Symbol, Term, TermError};
