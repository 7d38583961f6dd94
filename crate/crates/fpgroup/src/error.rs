use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FpError {
    #[error("letter {letter} is outside the alphabet of {rank} generators")]
    AlphabetMismatch { letter: i32, rank: usize },
    #[error("presentation parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("coset table is incomplete at coset {coset}, column {column}")]
    IncompleteTable { coset: usize, column: usize },
    #[error("relator {relator} does not act trivially on coset {coset}")]
    RelatorFails { relator: usize, coset: usize },
    #[error("word does not lie in the subgroup (ends at coset {coset})")]
    NotInSubgroup { coset: usize },
    #[error("finite action has {states} states, above the limit of {limit}")]
    ActionTooLarge { states: usize, limit: usize },
    #[error("relator count exceeds the limit of {limit}")]
    TooManyRelators { limit: usize },
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}
