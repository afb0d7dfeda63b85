//! Dual-normal disjunctive logic programs.
//!
//! Ground programs with classification, brute-force and dual-Horn answer-set
//! computation, a SAT encoding of consistency, the head/body swapping
//! translation into normal programs, SE- and UE-model analysis with program
//! synthesis, and reductions from QBF and UNSAT.

pub mod ast;
pub mod classify;
pub mod dual_horn;
pub mod error;
pub mod gen;
pub mod oracle;
pub mod parser;
pub mod reductions;
pub mod sat;
pub mod se;
pub mod translation;

pub use ast::{Atom, AtomSet, AtomTable, Interpretation, Program, Rule};
pub use error::{Error, Result, SourceSpan};
pub use oracle::OracleBudget;
pub use parser::{parse_program, render_program};
