use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("FASTA line {line}: text before the first '>' header")]
    MissingHeader { line: usize },

    #[error("FASTA record '{record}' (line {line}): invalid nucleotide {byte:?}")]
    InvalidBase { record: String, line: usize, byte: char },

    #[error("FASTA record '{record}' (line {line}) has no sequence")]
    EmptyRecord { record: String, line: usize },

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("sequence too short for SNR (length {0}, need at least 3)")]
    SequenceTooShort(usize),

    #[error("training set is not a two-class problem")]
    SingleClass,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("model file line {line}: {msg}")]
    ModelFormat { line: usize, msg: String },

    #[error("unknown sequence id '{0}'")]
    UnknownSequence(String),

    #[error("no positive ground truth")]
    NoPositiveTruth,

    #[error("no positive predictions")]
    NoPositivePredictions,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
