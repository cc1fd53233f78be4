use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("alphabet must not be empty")]
    EmptyAlphabet,
    #[error("automaton must have at least one state")]
    EmptyAutomaton,
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("automaton is not deterministic and complete: {0}")]
    Malformed(String),
    #[error("state `{0}` does not induce a bijection, so its inverse is undefined")]
    NotInvertible(String),
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("{0} is not a power of two")]
    NotPowerOfTwo(u64),
    #[error("expanded length {length} exceeds guard {guard}")]
    GuardExceeded { length: String, guard: u64 },
    #[error("grammar is cyclic through variable `{0}`")]
    CyclicGrammar(String),
    #[error("tape alphabet plus states has size {0}, which is not a power of two")]
    GammaNotPowerOfTwo(usize),
    #[error("machine left its space bound: {0}")]
    SpaceViolation(String),
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
