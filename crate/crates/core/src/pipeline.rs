//! End-to-end exon prediction.
//!
//! 1. propose every `AG … GT` candidate inside the length bounds,
//! 2. classify the 40-base window at each candidate boundary,
//! 3. keep candidates whose start window looks like an exon start and whose
//!    end window looks like an intron start,
//! 4. score survivors by three-base-periodicity SNR and call exon/intron.
//!
//! Near the sequence end a boundary window may not fit; such a candidate
//! survives on the window that does exist. A candidate with neither window is
//! dropped.

use std::collections::HashSet;

use crate::candidates::{
    candidate_regions, extract_windows, BoundaryWindow, CandidateRegion, RegionKind, Side,
    DEFAULT_MAX_LEN, DEFAULT_MIN_LEN, WINDOW_LEN,
};
use crate::error::{Error, Result};
use crate::seqio::{ScoredRegion, Sequence};
use crate::spectral::{snr, Verdict};
use crate::svm::{filter_windows, BoundaryClassifier, Label};

pub const DEFAULT_R0: f64 = 2.0;
pub const DEFAULT_SCAN_WINDOW: usize = 351;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub min_len: usize,
    pub max_len: usize,
    /// SNR threshold; a region is an exon iff `snr >= r0`.
    pub r0: f64,
    pub scan_window: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            min_len: DEFAULT_MIN_LEN,
            max_len: DEFAULT_MAX_LEN,
            r0: DEFAULT_R0,
            scan_window: DEFAULT_SCAN_WINDOW,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        // SNR is undefined below three bases.
        if self.min_len < 3 || self.min_len > self.max_len {
            return Err(Error::InvalidParameter(format!(
                "length bounds must satisfy 3 <= min_len <= max_len, got [{}, {}]",
                self.min_len, self.max_len
            )));
        }
        if !(self.r0 >= 0.0 && self.r0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "r0 must be a non-negative number, got {}",
                self.r0
            )));
        }
        if self.scan_window < 3 || self.scan_window % 3 != 0 {
            return Err(Error::InvalidParameter(format!(
                "scan window must be a positive multiple of 3, got {}",
                self.scan_window
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub seq_id: String,
    pub region: CandidateRegion,
    pub snr: f64,
    pub verdict: Verdict,
}

impl Prediction {
    pub fn scored(&self) -> ScoredRegion {
        ScoredRegion {
            seq_id: self.seq_id.clone(),
            region: self.region,
            snr: self.snr,
        }
    }
}

/// Accepts every window: exon-start windows are labelled `+1`, exon-end
/// windows `-1`. Useful to look at the candidate and SNR stages alone.
#[derive(Debug, Clone, Copy, Default)]
pub struct AcceptAll;

impl BoundaryClassifier for AcceptAll {
    fn classify(&self, window: &BoundaryWindow) -> Label {
        match window.side() {
            Side::ExonStart => Label::Positive,
            Side::ExonEnd => Label::Negative,
        }
    }
}

pub fn predict_sequence<C: BoundaryClassifier + ?Sized>(
    seq: &Sequence,
    classifier: &C,
    cfg: &PipelineConfig,
) -> Result<Vec<Prediction>> {
    cfg.validate()?;
    let regions = candidate_regions(seq, cfg.min_len, cfg.max_len)?;

    // Many candidates share a boundary; classify each window once.
    let mut seen = HashSet::new();
    let windows: Vec<BoundaryWindow> = extract_windows(seq, &regions)
        .into_iter()
        .filter(|w| seen.insert((w.side(), w.offset())))
        .collect();
    let (starts, ends) = filter_windows(classifier, &windows);
    let start_ok: HashSet<usize> = starts.iter().map(|w| w.offset()).collect();
    let end_ok: HashSet<usize> = ends.iter().map(|w| w.offset()).collect();

    let fits = |offset: usize| offset + WINDOW_LEN - 1 <= seq.len();
    let mut out = Vec::new();
    for r in regions {
        let kind = match (fits(r.start), fits(r.end + 1)) {
            (true, true) if start_ok.contains(&r.start) && end_ok.contains(&(r.end + 1)) => {
                RegionKind::Both
            }
            (true, false) if start_ok.contains(&r.start) => RegionKind::ExonStartAnchored,
            (false, true) if end_ok.contains(&(r.end + 1)) => RegionKind::ExonEndAnchored,
            _ => continue,
        };
        let value = snr(&seq.subsequence(r.start, r.end))?;
        out.push(Prediction {
            seq_id: seq.id().to_string(),
            region: CandidateRegion::new(r.start, r.end, kind),
            snr: value,
            verdict: Verdict::from_snr(value, cfg.r0),
        });
    }
    Ok(out)
}

/// Predictions for every sequence, concatenated in input order.
pub fn predict_all<C: BoundaryClassifier + ?Sized>(
    seqs: &[Sequence],
    classifier: &C,
    cfg: &PipelineConfig,
) -> Result<Vec<Prediction>> {
    let mut out = Vec::new();
    for s in seqs {
        out.extend(predict_sequence(s, classifier, cfg)?);
    }
    Ok(out)
}

/// SNR of every window `[o, o + window − 1]` for `o = 1, 1 + step, …` that
/// fits inside the sequence.
pub fn scan(seq: &Sequence, window: usize, step: usize) -> Result<Vec<(usize, f64)>> {
    if window < 3 || window % 3 != 0 {
        return Err(Error::InvalidParameter(format!(
            "scan window must be a positive multiple of 3, got {window}"
        )));
    }
    if step == 0 {
        return Err(Error::InvalidParameter("scan step must be at least 1".into()));
    }
    if window > seq.len() {
        return Ok(Vec::new());
    }
    (1..=seq.len() - window + 1)
        .step_by(step)
        .map(|o| Ok((o, snr(&seq.subsequence(o, o + window - 1))?)))
        .collect()
}
