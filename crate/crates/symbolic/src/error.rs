use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolicError {
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(usize),
    #[error("alphabet size {0} exceeds the supported maximum of 255")]
    AlphabetTooLarge(usize),
    #[error("transition matrix must be {d}x{d}")]
    TransitionShape { d: usize },
    #[error("transition matrix entries must be 0 or 1")]
    TransitionEntry,
    #[error("symbol {0} has no allowed successor or predecessor")]
    StrandedSymbol(usize),
    #[error("transition graph is not irreducible")]
    Reducible,
    #[error("theta must lie in (0,1), got {0}")]
    Theta(f64),
    #[error("empty word")]
    EmptyWord,
    #[error("symbol {symbol} out of range for alphabet of size {d}")]
    SymbolOutOfRange { symbol: usize, d: usize },
    #[error("cannot parse word {0:?}")]
    Parse(String),
    #[error("word {0} is not admissible")]
    Inadmissible(String),
    #[error("word {0} is not cyclically admissible")]
    NotCyclic(String),
    #[error("period {n} exceeds the period cap {cap}")]
    PeriodCapExceeded { n: usize, cap: usize },
    #[error("period must be at least 1")]
    ZeroPeriod,
    #[error("potential range must be at least 1")]
    ZeroRange,
    #[error("potential range {m} too large for alphabet of size {d}")]
    RangeTooLarge { m: usize, d: usize },
    #[error("potential table has no value for admissible word {0}")]
    MissingValue(String),
    #[error("potential table assigns a value to {0}, which is not an admissible word of the right length")]
    UnexpectedValue(String),
    #[error("potential value for {0} is not finite")]
    NonFinite(String),
    #[error("potentials live on different shifts")]
    ShiftMismatch,
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, SymbolicError>;
