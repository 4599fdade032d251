use thiserror::Error;

use crate::word::Letter;

/// Text-format error with a 1-based line and column into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError { line, column, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("letter {0} does not occur in the word")]
    LetterAbsent(Letter),
    #[error("letter {letter} has {count} occurrence(s), index {index} is out of range")]
    OccurrenceOutOfRange { letter: Letter, index: usize, count: usize },
    #[error("letter {0} is not multiple in the word")]
    NotMultiple(Letter),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("family size must be at least 1")]
    ZeroSize,
    #[error("exponents must be positive")]
    NonPositive,
    #[error("expected {expected} exponents, got {got}")]
    ExponentCount { expected: usize, got: usize },
    #[error("{0:?} is not a permutation of 1..{1}")]
    NotAPermutation(Vec<usize>, usize),
}

/// Violated precondition of a macro rewrite.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("split does not reassemble to the word")]
    SplitMismatch,
    #[error("letter {0} of the middle factor is simple in the word")]
    SimpleInMiddle(Letter),
    #[error("letter {0} is not multiple in the word")]
    NotMultiple(Letter),
    #[error("letters {0} and {1} are not integrated")]
    NotIntegrated(Letter, Letter),
    #[error("no occurrence of {0} in the prefix is followed only by multiple letters")]
    NoSecondOccurrenceWitness(Letter),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("monoid is not associative: ({0}·{1})·{2} ≠ {0}·({1}·{2})")]
    NotAssociative(String, String, String),
    #[error("element {0} is not a two-sided identity")]
    NotIdentity(String),
    #[error("table is not a total operation on {0} elements")]
    MalformedTable(usize),
    #[error("presentation does not close within {0} elements")]
    SizeExceeded(usize),
    #[error("unknown element label {0}")]
    UnknownElement(String),
    #[error("letter {0} of a relation is not a generator")]
    UnknownGenerator(Letter),
    #[error("invalid monoid JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExperimentError {
    #[error("experiment needs n ≥ 1 and truncation m ≥ 1 (got n = {n}, m = {m})")]
    BadParameters { n: usize, m: usize },
    #[error("seed {seed} is not of the form {template}")]
    SeedNotTemplate { seed: String, template: String },
    #[error("template experiments exist only for H, I, J")]
    NoTemplate,
}
