//! Deterministic synthetic genomes with planted, codon-biased exons.
//!
//! Each sequence is laid out as
//! `filler, (AG, exon, GT, filler)*` where fillers are drawn base by base
//! from the intron distribution and exons codon by codon from the codon
//! table. Sequence `i` uses its own random substream derived from
//! `(seed, i)` (see the `rng` module for the exact generator), so corpora are
//! reproducible across runs and platforms.

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::seqio::{Annotation, Sequence};

const BASES: &[u8; 4] = b"ACGT";

/// Codons favoured by the default table; together they take
/// [`PREFERRED_MASS`] of the probability, the rest is spread evenly over all
/// 64 codons.
pub const PREFERRED_CODONS: [&str; 8] = ["GCC", "GAG", "GCT", "AAG", "GAC", "CAG", "GGC", "ATC"];
pub const PREFERRED_MASS: f64 = 0.7;

/// Index of a codon in `A, C, G, T` lexicographic order (`AAA` = 0,
/// `TTT` = 63).
pub fn codon_index(codon: &[u8]) -> Option<usize> {
    if codon.len() != 3 {
        return None;
    }
    codon.iter().try_fold(0usize, |acc, &b| {
        BASES.iter().position(|&x| x == b).map(|i| acc * 4 + i)
    })
}

fn codon_bases(index: usize) -> [u8; 3] {
    [BASES[index / 16], BASES[(index / 4) % 4], BASES[index % 4]]
}

pub fn default_codon_table() -> [f64; 64] {
    let mut table = [(1.0 - PREFERRED_MASS) / 64.0; 64];
    let share = PREFERRED_MASS / PREFERRED_CODONS.len() as f64;
    for c in PREFERRED_CODONS {
        table[codon_index(c.as_bytes()).unwrap()] += share;
    }
    table
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub seed: u64,
    pub n_sequences: usize,
    /// Inclusive bounds on the random filler between signals.
    pub intron_len: (usize, usize),
    /// Inclusive bounds; only multiples of three are drawn.
    pub exon_len: (usize, usize),
    pub exons_per_sequence: usize,
    /// Codon probabilities in [`codon_index`] order.
    pub codon_probs: [f64; 64],
    /// Filler base probabilities in `A, C, G, T` order.
    pub intron_probs: [f64; 4],
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            seed: 42,
            n_sequences: 10,
            intron_len: (150, 600),
            exon_len: (60, 300),
            exons_per_sequence: 3,
            codon_probs: default_codon_table(),
            intron_probs: [0.25; 4],
        }
    }
}

fn check_probs(name: &str, probs: &[f64]) -> Result<()> {
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "{name} must be non-negative"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "{name} must sum to 1, got {total}"
        )));
    }
    Ok(())
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    // Absorb rounding so the last bucket catches u close to 1.
    if let Some(last) = out.last_mut() {
        *last = f64::INFINITY;
    }
    out
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_sequences == 0 {
            return Err(Error::InvalidParameter("n_sequences must be at least 1".into()));
        }
        let (ilo, ihi) = self.intron_len;
        if ilo > ihi {
            return Err(Error::InvalidParameter(format!(
                "intron length range [{ilo}, {ihi}] is empty"
            )));
        }
        let (elo, ehi) = self.exon_len;
        if elo < 3 || elo > ehi {
            return Err(Error::InvalidParameter(format!(
                "exon length range [{elo}, {ehi}] must be non-empty with minimum at least 3"
            )));
        }
        if elo.div_ceil(3) > ehi / 3 {
            return Err(Error::InvalidParameter(format!(
                "exon length range [{elo}, {ehi}] contains no multiple of 3"
            )));
        }
        if self.exons_per_sequence == 0 && ilo == 0 {
            return Err(Error::InvalidParameter(
                "sequences without exons need a positive minimum intron length".into(),
            ));
        }
        check_probs("codon probabilities", &self.codon_probs)?;
        check_probs("intron base probabilities", &self.intron_probs)?;
        Ok(())
    }

    /// Overrides fields from `key=value` lines. `#` starts a comment.
    /// Keys: `seed`, `n_sequences`, `intron_min`, `intron_max`, `exon_min`,
    /// `exon_max`, `exons_per_sequence`, `intron_probs` (four comma-separated
    /// values, `A,C,G,T`), `codon_probs` (64 comma-separated values).
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: i + 1, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, found {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let int = |v: &str| {
                v.parse::<u64>()
                    .map_err(|_| bad(format!("{key}: {v:?} is not a non-negative integer")))
            };
            let floats = |v: &str, n: usize| -> Result<Vec<f64>> {
                let xs = v
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad(format!("{key}: expected comma-separated numbers")))?;
                if xs.len() != n {
                    return Err(bad(format!("{key}: expected {n} values, found {}", xs.len())));
                }
                Ok(xs)
            };
            match key {
                "seed" => self.seed = int(value)?,
                "n_sequences" => self.n_sequences = int(value)? as usize,
                "intron_min" => self.intron_len.0 = int(value)? as usize,
                "intron_max" => self.intron_len.1 = int(value)? as usize,
                "exon_min" => self.exon_len.0 = int(value)? as usize,
                "exon_max" => self.exon_len.1 = int(value)? as usize,
                "exons_per_sequence" => self.exons_per_sequence = int(value)? as usize,
                "intron_probs" => self.intron_probs.copy_from_slice(&floats(value, 4)?),
                "codon_probs" => self.codon_probs.copy_from_slice(&floats(value, 64)?),
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        Ok(())
    }
}

/// Generates `spec.n_sequences` sequences named `synth1`, `synth2`, … and the
/// exact intervals of the planted exons.
pub fn generate(spec: &SynthSpec) -> Result<(Vec<Sequence>, Vec<Annotation>)> {
    spec.validate()?;
    let codon_cdf = cumulative(&spec.codon_probs);
    let base_cdf = cumulative(&spec.intron_probs);
    let (elo, ehi) = (spec.exon_len.0.div_ceil(3), spec.exon_len.1 / 3);

    let mut seqs = Vec::with_capacity(spec.n_sequences);
    let mut annotations = Vec::new();
    for i in 0..spec.n_sequences {
        let id = format!("synth{}", i + 1);
        let mut rng = SeededRng::substream(spec.seed, i as u64);
        let mut bases = Vec::new();
        let filler = |rng: &mut SeededRng, bases: &mut Vec<u8>| {
            let n = rng.range_inclusive(spec.intron_len.0, spec.intron_len.1);
            bases.extend((0..n).map(|_| BASES[rng.categorical(&base_cdf)]));
        };

        filler(&mut rng, &mut bases);
        for _ in 0..spec.exons_per_sequence {
            bases.extend_from_slice(b"AG");
            let start = bases.len() + 1;
            let codons = rng.range_inclusive(elo, ehi);
            for _ in 0..codons {
                bases.extend_from_slice(&codon_bases(rng.categorical(&codon_cdf)));
            }
            annotations.push(Annotation::new(id.clone(), start, bases.len()));
            bases.extend_from_slice(b"GT");
            filler(&mut rng, &mut bases);
        }
        seqs.push(Sequence::new(id, bases)?);
    }
    Ok((seqs, annotations))
}
