use thiserror::Error;

use crate::term::Position;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A position does not address a subterm.
    #[error("position {0} is out of range")]
    PositionOutOfRange(Position),

    /// An operation that needs a compound D-term got a primitive one.
    #[error("expected a compound D-term, got primitive `{0}`")]
    NotCompound(String),

    /// A label is not bound in the compacted D-term.
    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    /// The label bindings of a compacted D-term form a cycle.
    #[error("label bindings are cyclic through `{0}`")]
    CyclicLabels(String),

    /// Binding ranges must be compound D-terms.
    #[error("label `{0}` is bound to a primitive D-term")]
    PrimitiveBinding(String),

    /// A computation exceeded its time, memory or size budget.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// Shifting requires positional variables only.
    #[error("variable `{0}` is not positional")]
    NonPositionalVariable(String),

    /// A primitive D-term has no axiom assigned.
    #[error("no axiom assigned to primitive `{0}`")]
    MissingAxiom(String),

    /// The D-term has no most general theorem.
    #[error("the most general theorem of {0} is undefined")]
    UndefinedMgt(String),

    /// An `n` leaf occurs where its side condition fails.
    #[error("invalid use of `n` at position {0}")]
    InvalidNUse(Position),

    /// The formula contains symbols other than implication and variables.
    #[error("formula {0} is not purely implicational")]
    NonImplicational(String),

    /// The formula is not a classical tautology.
    #[error("formula {0} is not a theorem")]
    NotATheorem(String),

    /// Two goals or proof problems do not fit together.
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Errors raised by the text formats.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    /// Syntax error, with line (1-based, 0 when unknown) and column (byte offset).
    #[error("line {line}, column {column}: {message}")]
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: undefined label `{label}`")]
    UndefinedLabel { line: usize, label: String },

    #[error("line {line}: duplicate label `{label}`")]
    DuplicateLabel { line: usize, label: String },

    #[error("cyclic label definitions through `{0}`")]
    CyclicLabels(String),

    #[error("clause `{0}` has an unrecognized shape")]
    UnrecognizedClauseShape(String),

    #[error("more than one detachment clause (`{0}` and `{1}`)")]
    MultipleDetClauses(String, String),
}

impl ParseError {
    pub(crate) fn malformed(column: usize, message: impl Into<String>) -> Self {
        ParseError::Malformed {
            line: 0,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            ParseError::Malformed {
                column, message, ..
            } => ParseError::Malformed {
                line,
                column,
                message,
            },
            ParseError::UndefinedLabel { label, .. } => ParseError::UndefinedLabel { line, label },
            ParseError::DuplicateLabel { label, .. } => ParseError::DuplicateLabel { line, label },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
