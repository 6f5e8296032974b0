//! Candidate exon generation from GT-AG intron signals.
//!
//! An intron begins with `GT` and ends with `AG`, so every `AG` proposes an
//! exon start right after it and every `GT` proposes an exon end right before
//! it. All pairs inside the length bounds are emitted.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::seqio::{Annotation, Sequence};

/// Length of the boundary windows fed to the SVM.
pub const WINDOW_LEN: usize = 40;

pub const DEFAULT_MIN_LEN: usize = 40;
pub const DEFAULT_MAX_LEN: usize = 300;

/// Which boundary windows back a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionKind {
    ExonStartAnchored,
    ExonEndAnchored,
    Both,
}

/// A proposed exon, 1-based inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CandidateRegion {
    pub start: usize,
    pub end: usize,
    pub kind: RegionKind,
}

impl CandidateRegion {
    pub fn new(start: usize, end: usize, kind: RegionKind) -> Self {
        debug_assert!(start >= 1 && start <= end);
        CandidateRegion { start, end, kind }
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    ExonStart,
    ExonEnd,
}

/// A 40-base window at one boundary of a candidate region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryWindow {
    seq_id: String,
    offset: usize,
    bases: Vec<u8>,
    side: Side,
}

impl BoundaryWindow {
    pub fn seq_id(&self) -> &str {
        &self.seq_id
    }

    /// 1-based position of the first base.
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn bases(&self) -> &[u8] {
        &self.bases
    }

    pub fn side(&self) -> Side {
        self.side
    }
}

fn find_motif(seq: &Sequence, motif: &[u8; 2]) -> Vec<usize> {
    seq.bases()
        .windows(2)
        .enumerate()
        .filter(|(_, w)| *w == motif)
        .map(|(i, _)| i + 1)
        .collect()
}

/// 1-based positions of every `AG` dinucleotide, ascending.
pub fn find_ag_sites(seq: &Sequence) -> Vec<usize> {
    find_motif(seq, b"AG")
}

/// 1-based positions of every `GT` dinucleotide, ascending.
pub fn find_gt_sites(seq: &Sequence) -> Vec<usize> {
    find_motif(seq, b"GT")
}

/// Every `[AG + 2, GT − 1]` interval whose length lies in `[min_len, max_len]`,
/// ordered by `(start, end)`.
pub fn candidate_regions(
    seq: &Sequence,
    min_len: usize,
    max_len: usize,
) -> Result<Vec<CandidateRegion>> {
    if min_len < 1 || min_len > max_len {
        return Err(Error::InvalidParameter(format!(
            "length bounds must satisfy 1 <= min_len <= max_len, got [{min_len}, {max_len}]"
        )));
    }
    let ends: Vec<usize> = find_gt_sites(seq).into_iter().map(|g| g - 1).collect();
    let mut out = Vec::new();
    for start in find_ag_sites(seq).into_iter().map(|a| a + 2) {
        let lo = start + min_len - 1;
        let hi = start.saturating_add(max_len - 1);
        let first = ends.partition_point(|&e| e < lo);
        out.extend(
            ends[first..]
                .iter()
                .take_while(|&&e| e <= hi)
                .map(|&end| CandidateRegion::new(start, end, RegionKind::Both)),
        );
    }
    Ok(out)
}

fn window_at(seq: &Sequence, offset: usize, side: Side) -> Option<BoundaryWindow> {
    let last = offset + WINDOW_LEN - 1;
    (offset >= 1 && last <= seq.len()).then(|| BoundaryWindow {
        seq_id: seq.id().to_string(),
        offset,
        bases: seq.bases()[offset - 1..last].to_vec(),
        side,
    })
}

/// Exon-start window at `region.start` for the given region, if it fits.
pub fn start_window(seq: &Sequence, region: &CandidateRegion) -> Option<BoundaryWindow> {
    window_at(seq, region.start, Side::ExonStart)
}

/// Intron-side window at `region.end + 1` (the `GT`), if it fits.
pub fn end_window(seq: &Sequence, region: &CandidateRegion) -> Option<BoundaryWindow> {
    window_at(seq, region.end + 1, Side::ExonEnd)
}

/// For each region, the exon-start window and the exon-end window, skipping
/// any that would run past the sequence end.
pub fn extract_windows(seq: &Sequence, regions: &[CandidateRegion]) -> Vec<BoundaryWindow> {
    regions
        .iter()
        .flat_map(|r| [start_window(seq, r), end_window(seq, r)])
        .flatten()
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LengthStats {
    /// Share of annotations with `lo <= length <= hi`.
    pub fraction: f64,
    pub histogram: BTreeMap<usize, usize>,
}

pub fn exon_length_stats(annotations: &[Annotation], lo: usize, hi: usize) -> Result<LengthStats> {
    if annotations.is_empty() {
        return Err(Error::InvalidParameter(
            "exon length statistics need at least one annotation".into(),
        ));
    }
    let mut histogram = BTreeMap::new();
    let mut inside = 0usize;
    for a in annotations {
        let len = a.len();
        *histogram.entry(len).or_insert(0) += 1;
        if (lo..=hi).contains(&len) {
            inside += 1;
        }
    }
    Ok(LengthStats {
        fraction: inside as f64 / annotations.len() as f64,
        histogram,
    })
}
