use thiserror::Error;

use crate::position::Position;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("symbol `{symbol}` has arity {expected} but was given {found} argument(s)")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("position {0} is not defined in the term")]
    UndefinedPosition(Position),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("duplicate symbol declaration `{0}`")]
    DuplicateSymbol(String),
    #[error("malformed symbol declaration `{0}`")]
    BadDeclaration(String),
    #[error("malformed position `{0}`")]
    BadPosition(String),
    #[error("duplicate pattern label `{0}`")]
    DuplicateLabel(String),
    #[error("pattern `{0}` is a variable; patterns must start with a function symbol")]
    VariablePattern(String),
    #[error("declared symbol `{0}` used without arguments")]
    SymbolAsVariable(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

impl ParseError {
    pub(crate) fn at(line: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("pattern `{0}` is not linear")]
    NonLinear(String),
    #[error("strategy `{strategy}` returned {choice}, which is not in the work set")]
    Contract { strategy: String, choice: String },
    #[error("strategy `{0}` has no entry for the current work set")]
    Exhausted(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("position {0} is not defined in the input term")]
    UndefinedPosition(Position),
    #[error("input term is not ground")]
    NotGround,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniverseError {
    #[error("universe has {size} terms, more than the cap of {cap}")]
    TooLarge { size: u128, cap: usize },
    #[error("no constant among the chosen symbols, so there are no ground terms")]
    NoConstants,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error("automata disagree on {term}: {left:?} vs {right:?}")]
    Disagree {
        term: String,
        left: Vec<usize>,
        right: Vec<usize>,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
}
