//! Exon prediction in DNA sequences.
//!
//! Candidate exons are proposed between intron signals (`AG … GT`), filtered
//! by a linear SVM over one-hot encoded 40-base boundary windows, and finally
//! called by their three-base-periodicity signal-to-noise ratio. The [`eval`]
//! module scores predictions at nucleotide level.

pub mod candidates;
pub mod error;
pub mod eval;
pub mod pipeline;
mod rng;
pub mod seqio;
pub mod spectral;
pub mod svm;
pub mod synth;

pub use error::{Error, Result};
