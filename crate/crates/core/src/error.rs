use std::fmt;

use thiserror::Error;

/// 1-based position in an input text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {span}: {message}")]
    Syntax { span: SourceSpan, message: String },

    #[error("atom `{name}` at {span} uses the reserved prefix `__`")]
    ReservedAtom { span: SourceSpan, name: String },

    #[error("empty rule at {span}: a rule needs a head or a body")]
    EmptyRule { span: SourceSpan },

    #[error("universe of {atoms} atoms exceeds the budget of {max}")]
    BudgetExceeded { atoms: usize, max: usize },

    #[error("program is not dual-Horn")]
    NotDualHorn,

    #[error("program is not dual-normal")]
    NotDualNormal,

    #[error("atom `{0}` already occurs in the program")]
    AtomInProgram(String),

    #[error("atom `{0}` does not occur in the program")]
    UnknownAtom(String),

    #[error("interpretation is not a subset of the program's atoms")]
    NotInUniverse,

    #[error("atom `{0}` is not in the interpretation")]
    NotInInterpretation(String),

    #[error("level {level} is outside 1..={max}")]
    LevelOutOfRange { level: usize, max: usize },

    #[error("SE-interpretation at {span} violates X ⊆ Y")]
    NotSubset { span: SourceSpan },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("solver resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("malformed DIMACS: {0}")]
    Dimacs(String),
}

pub type Result<T> = std::result::Result<T, Error>;
