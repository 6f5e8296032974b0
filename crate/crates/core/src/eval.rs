//! Nucleotide-level evaluation: confusion counts, Sn/Sp, ROC and AUC.
//!
//! Intervals are unioned per sequence before counting, so overlapping or
//! adjacent predictions never count a base twice.
//!
//! Two ROC conventions are produced. The `Paper` convention plots
//! `1 − TP/(TP+FP)` against sensitivity (its "specificity" is what is usually
//! called precision); the `Standard` convention plots the false-positive rate
//! `FP/(FP+TN)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use crate::candidates::CandidateRegion;
use crate::error::{Error, Result};
use crate::seqio::{Annotation, ScoredRegion};

/// Anything with a sequence id and a 1-based inclusive span.
pub trait GenomicInterval {
    fn seq_id(&self) -> &str;
    fn start(&self) -> usize;
    fn end(&self) -> usize;
}

impl GenomicInterval for Annotation {
    fn seq_id(&self) -> &str {
        &self.seq_id
    }
    fn start(&self) -> usize {
        self.start
    }
    fn end(&self) -> usize {
        self.end
    }
}

impl GenomicInterval for ScoredRegion {
    fn seq_id(&self) -> &str {
        &self.seq_id
    }
    fn start(&self) -> usize {
        self.region.start
    }
    fn end(&self) -> usize {
        self.region.end
    }
}

impl GenomicInterval for (String, CandidateRegion) {
    fn seq_id(&self) -> &str {
        &self.0
    }
    fn start(&self) -> usize {
        self.1.start
    }
    fn end(&self) -> usize {
        self.1.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

impl Add for ConfusionCounts {
    type Output = ConfusionCounts;

    fn add(self, o: ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts {
            tp: self.tp + o.tp,
            tn: self.tn + o.tn,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }
}

impl AddAssign for ConfusionCounts {
    fn add_assign(&mut self, o: ConfusionCounts) {
        *self = *self + o;
    }
}

/// Sorted, disjoint, non-adjacent union of 1-based inclusive spans.
fn merge(mut spans: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    spans.sort_unstable();
    let mut out: Vec<(usize, usize)> = Vec::with_capacity(spans.len());
    for (s, e) in spans {
        match out.last_mut() {
            Some(last) if s <= last.1 + 1 => last.1 = last.1.max(e),
            _ => out.push((s, e)),
        }
    }
    out
}

fn covered(spans: &[(usize, usize)]) -> u64 {
    spans.iter().map(|(s, e)| (e - s + 1) as u64).sum()
}

fn intersection(a: &[(usize, usize)], b: &[(usize, usize)]) -> u64 {
    let (mut i, mut j, mut total) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo <= hi {
            total += (hi - lo + 1) as u64;
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}

type SpansById<'a> = BTreeMap<&'a str, Vec<(usize, usize)>>;

fn group<'a, I: GenomicInterval + 'a>(
    items: impl IntoIterator<Item = &'a I>,
    seq_lengths: &HashMap<String, usize>,
) -> Result<SpansById<'a>> {
    let mut out: SpansById<'a> = BTreeMap::new();
    for it in items {
        let len = *seq_lengths
            .get(it.seq_id())
            .ok_or_else(|| Error::UnknownSequence(it.seq_id().to_string()))?;
        if it.start() < 1 || it.start() > it.end() || it.end() > len {
            return Err(Error::InvalidParameter(format!(
                "interval {}:{}-{} outside sequence of length {len}",
                it.seq_id(),
                it.start(),
                it.end()
            )));
        }
        out.entry(it.seq_id()).or_default().push((it.start(), it.end()));
    }
    Ok(out)
}

/// Nucleotide-level counts summed over every sequence in `seq_lengths`.
pub fn confusion<T: GenomicInterval, P: GenomicInterval>(
    truth: &[T],
    predicted: &[P],
    seq_lengths: &HashMap<String, usize>,
) -> Result<ConfusionCounts> {
    let mut truth = group(truth, seq_lengths)?;
    let mut pred = group(predicted, seq_lengths)?;
    let mut total = ConfusionCounts::default();
    for (id, &len) in seq_lengths {
        let t = merge(truth.remove(id.as_str()).unwrap_or_default());
        let p = merge(pred.remove(id.as_str()).unwrap_or_default());
        let tp = intersection(&t, &p);
        let fn_ = covered(&t) - tp;
        let fp = covered(&p) - tp;
        total += ConfusionCounts {
            tp,
            fn_,
            fp,
            tn: len as u64 - tp - fn_ - fp,
        };
    }
    Ok(total)
}

/// `TP / (TP + FN)`.
pub fn sensitivity(c: &ConfusionCounts) -> Result<f64> {
    if c.tp + c.fn_ == 0 {
        return Err(Error::NoPositiveTruth);
    }
    Ok(c.tp as f64 / (c.tp + c.fn_) as f64)
}

/// `TP / (TP + FP)`, the specificity as defined by the original method
/// (elsewhere called precision).
pub fn specificity_paper(c: &ConfusionCounts) -> Result<f64> {
    if c.tp + c.fp == 0 {
        return Err(Error::NoPositivePredictions);
    }
    Ok(c.tp as f64 / (c.tp + c.fp) as f64)
}

/// `TN / (TN + FP)`, `None` when there are no negative bases.
pub fn specificity_standard(c: &ConfusionCounts) -> Option<f64> {
    (c.tn + c.fp > 0).then(|| c.tn as f64 / (c.tn + c.fp) as f64)
}

/// Confusion counts at every distinct SNR threshold, highest first, starting
/// with a `+∞` threshold at which nothing is predicted. At threshold `t` the
/// prediction is the union of regions with `snr >= t`.
pub fn threshold_sweep<T: GenomicInterval>(
    truth: &[T],
    scored: &[ScoredRegion],
    seq_lengths: &HashMap<String, usize>,
) -> Result<Vec<(f64, ConfusionCounts)>> {
    if let Some(bad) = scored.iter().find(|r| r.snr.is_nan()) {
        return Err(Error::InvalidParameter(format!(
            "NaN SNR for region {}:{}-{}",
            bad.seq_id, bad.region.start, bad.region.end
        )));
    }
    let truth_by_id = group(truth, seq_lengths)?;
    group(scored, seq_lengths)?;
    let mut pred_by_id: BTreeMap<&str, Vec<&ScoredRegion>> = BTreeMap::new();
    for r in scored {
        pred_by_id.entry(r.seq_id.as_str()).or_default().push(r);
    }

    // Each covered base is first predicted at the highest SNR among the
    // regions covering it. Collect those per-base levels as runs of
    // (level, is_truth, length).
    let mut runs: Vec<(f64, bool, u64)> = Vec::new();
    let mut base = ConfusionCounts::default();
    for (id, &len) in seq_lengths {
        let t = merge(truth_by_id.get(id.as_str()).cloned().unwrap_or_default());
        let truth_len = covered(&t);
        base.fn_ += truth_len;
        base.tn += len as u64 - truth_len;

        let Some(regions) = pred_by_id.get(id.as_str()) else {
            continue;
        };
        let mut level = vec![f64::NEG_INFINITY; len + 1];
        for r in regions {
            for l in &mut level[r.region.start..=r.region.end] {
                *l = l.max(r.snr);
            }
        }
        let mut is_truth = vec![false; len + 1];
        for &(s, e) in &t {
            is_truth[s..=e].iter_mut().for_each(|x| *x = true);
        }
        let mut pos = 1;
        while pos <= len {
            let (lv, tr) = (level[pos], is_truth[pos]);
            let mut end = pos;
            while end < len && level[end + 1] == lv && is_truth[end + 1] == tr {
                end += 1;
            }
            if lv > f64::NEG_INFINITY {
                runs.push((lv, tr, (end - pos + 1) as u64));
            }
            pos = end + 1;
        }
    }
    runs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut thresholds: Vec<f64> = scored.iter().map(|r| r.snr).collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();

    let mut out = Vec::with_capacity(thresholds.len() + 1);
    out.push((f64::INFINITY, base));
    let mut counts = base;
    let mut next = 0;
    for thr in thresholds {
        while next < runs.len() && runs[next].0 >= thr {
            let (_, tr, n) = runs[next];
            if tr {
                counts.tp += n;
                counts.fn_ -= n;
            } else {
                counts.fp += n;
                counts.tn -= n;
            }
            next += 1;
        }
        out.push((thr, counts));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convention {
    Paper,
    Standard,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Paper => "paper",
            Convention::Standard => "standard",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Convention::Paper),
            "standard" => Ok(Convention::Standard),
            other => Err(Error::InvalidParameter(format!(
                "unknown ROC convention {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub x: f64,
    pub y: f64,
    /// SNR threshold that produced the point; `±∞` for sentinels.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub convention: Convention,
}

fn by_xy(a: &RocPoint, b: &RocPoint) -> Ordering {
    a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y))
}

pub fn roc<T: GenomicInterval>(
    truth: &[T],
    scored: &[ScoredRegion],
    seq_lengths: &HashMap<String, usize>,
    convention: Convention,
) -> Result<RocCurve> {
    if scored.is_empty() {
        return Err(Error::InvalidParameter(
            "ROC needs at least one scored region".into(),
        ));
    }
    let mut points: Vec<RocPoint> = Vec::new();
    for (threshold, c) in threshold_sweep(truth, scored, seq_lengths)? {
        let y = sensitivity(&c)?;
        let x = match convention {
            Convention::Paper => match specificity_paper(&c) {
                Ok(sp) => 1.0 - sp,
                Err(_) => continue,
            },
            Convention::Standard => match specificity_standard(&c) {
                Some(sp) => 1.0 - sp,
                None => continue,
            },
        };
        if !points.iter().any(|p| p.x == x && p.y == y) {
            points.push(RocPoint { x, y, threshold });
        }
    }
    if convention == Convention::Standard {
        for (x, y, threshold) in [(0.0, 0.0, f64::INFINITY), (1.0, 1.0, f64::NEG_INFINITY)] {
            if !points.iter().any(|p| p.x == x && p.y == y) {
                points.push(RocPoint { x, y, threshold });
            }
        }
    }
    points.sort_by(by_xy);
    Ok(RocCurve { points, convention })
}

/// Trapezoidal area under the curve, points taken in `(x, y)` order.
pub fn auc(curve: &RocCurve) -> Result<f64> {
    if curve.points.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "AUC needs at least 2 points, got {}",
            curve.points.len()
        )));
    }
    let mut pts = curve.points.clone();
    pts.sort_by(by_xy);
    Ok(pts
        .windows(2)
        .map(|w| (w[1].x - w[0].x) * (w[0].y + w[1].y) / 2.0)
        .sum())
}
