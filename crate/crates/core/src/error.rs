use thiserror::Error;

use crate::sequences::Word;

/// Errors raised by the library outside of DSL parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("an alphabet needs at least two symbols, got {0}")]
    AlphabetTooSmall(usize),

    #[error("duplicate alphabet symbol `{0}`")]
    DuplicateSymbol(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("symbol index {index} is outside an alphabet of {size} symbols")]
    SymbolOutOfRange { index: usize, size: usize },

    #[error("alphabet mismatch: [{left}] vs [{right}]")]
    AlphabetMismatch { left: String, right: String },

    #[error("a lasso period must be nonempty")]
    EmptyPeriod,

    #[error("unknown state {0}")]
    UnknownState(usize),

    #[error("state {state} steps to {target}, which is not a state")]
    DanglingTransition { state: usize, target: usize },

    #[error("state {state} has {got} transitions, expected one per symbol ({expected})")]
    IncompleteStep {
        state: usize,
        got: usize,
        expected: usize,
    },

    #[error("iteration power must be at least 1")]
    ZeroPower,

    #[error("the empty word is not allowed here")]
    EmptyWord,

    #[error("depth must be at least 1")]
    ZeroDepth,

    #[error("budget must be at least 1")]
    ZeroBudget,

    #[error("set is not prefix-free: {prefix:?} is a proper prefix of {word:?}")]
    NotPrefixFree { prefix: Word, word: Word },

    #[error("decision procedure accepts {prefix:?}, a proper prefix of {word:?}")]
    PrefixAccepted { prefix: Word, word: Word },

    #[error("epsilon violation: the violation language contains the empty word")]
    EpsilonViolation,

    #[error("enumeration budget exhausted after {steps} steps")]
    BudgetExhausted { steps: usize },

    #[error("enumerator produced a word outside the alphabet: {0}")]
    MalformedEnumeration(String),

    #[error("family is not closed: derivative of {set} by `{symbol}` is missing")]
    NotUniversal { set: String, symbol: String },

    #[error("monitor already reached a terminal verdict")]
    MonitorTerminated,

    #[error("malformed {what} text at line {line}: {message}")]
    Format {
        what: &'static str,
        line: usize,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
