//! Indicator mapping, DFT power spectrum and the three-base-periodicity SNR.
//!
//! The SNR is the power at frequency 2π/3 divided by the mean power. Because
//! every position carries exactly one nucleotide, the mean power including
//! the DC term is always `N`, and the period-3 power has a closed form in the
//! per-codon-position nucleotide counts. The production path uses that
//! closed form (O(N)); the naive O(N²) transform is kept for spectra output
//! and as a cross-check.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::seqio::Sequence;

/// The four nucleotides, ordered `A, T, G, C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Nucleotide {
    A,
    T,
    G,
    C,
}

impl Nucleotide {
    pub const ALL: [Nucleotide; 4] = [Nucleotide::A, Nucleotide::T, Nucleotide::G, Nucleotide::C];

    pub fn from_byte(b: u8) -> Option<Nucleotide> {
        match b {
            b'A' => Some(Nucleotide::A),
            b'T' => Some(Nucleotide::T),
            b'G' => Some(Nucleotide::G),
            b'C' => Some(Nucleotide::C),
            _ => None,
        }
    }

    pub fn as_byte(self) -> u8 {
        match self {
            Nucleotide::A => b'A',
            Nucleotide::T => b'T',
            Nucleotide::G => b'G',
            Nucleotide::C => b'C',
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Index of a validated base in `A, T, G, C` order.
fn base_index(b: u8) -> usize {
    Nucleotide::from_byte(b)
        .expect("sequence bases are validated")
        .index()
}

/// Four binary indicator sequences, one per nucleotide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorSet {
    rows: [Vec<u8>; 4],
}

impl IndicatorSet {
    pub fn get(&self, base: Nucleotide) -> &[u8] {
        &self.rows[base.index()]
    }

    pub fn len(&self) -> usize {
        self.rows[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows[0].is_empty()
    }
}

pub fn voss_map(seq: &Sequence) -> IndicatorSet {
    let n = seq.len();
    let mut rows: [Vec<u8>; 4] = std::array::from_fn(|_| vec![0u8; n]);
    for (i, &b) in seq.bases().iter().enumerate() {
        rows[base_index(b)][i] = 1;
    }
    IndicatorSet { rows }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    p: Vec<f64>,
}

impl PowerSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.p.iter().sum::<f64>() / self.p.len() as f64
    }

    /// `P[N/3] / mean(P)`, defined only when `N` is a multiple of three.
    pub fn period3_snr(&self) -> Option<f64> {
        let n = self.p.len();
        (n >= 3 && n % 3 == 0).then(|| self.p[n / 3] / self.mean())
    }
}

/// Naive DFT of each indicator, summed power per frequency:
/// `P[k] = Σ_b |Σ_n u_b[n]·exp(-2πi·nk/N)|²` for `k = 0..N`.
pub fn power_spectrum(ind: &IndicatorSet) -> PowerSpectrum {
    let n = ind.len();
    let twiddle: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, -2.0 * PI * m as f64 / n as f64))
        .collect();

    let p = (0..n)
        .map(|k| {
            Nucleotide::ALL
                .iter()
                .map(|&b| {
                    ind.get(b)
                        .iter()
                        .enumerate()
                        .filter(|(_, &u)| u == 1)
                        .map(|(pos, _)| twiddle[(pos * k) % n])
                        .sum::<Complex64>()
                        .norm_sqr()
                })
                .sum()
        })
        .collect();
    PowerSpectrum { p }
}

/// Occurrences of each nucleotide at 0-based positions ≡ 0, 1, 2 (mod 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CodonPositionCounts {
    counts: [[u64; 3]; 4],
}

impl CodonPositionCounts {
    pub fn from_counts(counts: [[u64; 3]; 4]) -> Self {
        CodonPositionCounts { counts }
    }

    /// `[x_b, y_b, z_b]` for `base`.
    pub fn get(&self, base: Nucleotide) -> [u64; 3] {
        self.counts[base.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

pub fn codon_position_counts(seq: &Sequence) -> CodonPositionCounts {
    let mut counts = [[0u64; 3]; 4];
    for (i, &b) in seq.bases().iter().enumerate() {
        counts[base_index(b)][i % 3] += 1;
    }
    CodonPositionCounts { counts }
}

/// Period-3 power from codon-position counts:
/// `Σ_b (x² + y² + z² − xy − xz − yz)`.
pub fn closed_form_peak(counts: &CodonPositionCounts) -> f64 {
    let total: i128 = counts
        .counts
        .iter()
        .map(|&[x, y, z]| {
            let (x, y, z) = (x as i128, y as i128, z as i128);
            x * x + y * y + z * z - x * y - x * z - y * z
        })
        .sum();
    total as f64
}

pub fn snr(seq: &Sequence) -> Result<f64> {
    let n = seq.len();
    if n < 3 {
        return Err(Error::SequenceTooShort(n));
    }
    Ok(closed_form_peak(&codon_position_counts(seq)) / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Exon,
    Intron,
}

impl Verdict {
    /// Exon iff `snr >= r0`.
    pub fn from_snr(snr: f64, r0: f64) -> Verdict {
        if snr >= r0 {
            Verdict::Exon
        } else {
            Verdict::Intron
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Exon => "exon",
            Verdict::Intron => "intron",
        })
    }
}

pub fn classify_region(seq: &Sequence, r0: f64) -> Result<Verdict> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "SNR threshold must be positive, got {r0}"
        )));
    }
    Ok(Verdict::from_snr(snr(seq)?, r0))
}
