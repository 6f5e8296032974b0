//! Linear soft-margin SVM over one-hot encoded boundary windows.
//!
//! Training minimises `λ/2·‖w‖² + (1/L)·Σ max(0, 1 − yᵢ(w·xᵢ + b))` with
//! deterministic stochastic subgradient steps of size `1/(λt)` (the Pegasos
//! schedule). The bias is not regularised. The returned model is the average
//! of all iterates, with its bias then replaced by the exact minimiser of the
//! objective over `b` for the averaged weights.

use std::fmt::{self, Write as _};

use crate::candidates::{end_window, start_window, BoundaryWindow, CandidateRegion, RegionKind, Side, WINDOW_LEN};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::seqio::{Annotation, Sequence};

/// Feature dimension: four indicator slots per window base.
pub const DIM: usize = 4 * WINDOW_LEN;

pub const DEFAULT_LAMBDA: f64 = 1e-3;
pub const DEFAULT_EPOCHS: usize = 100;
pub const DEFAULT_SEED: u64 = 42;

const MODEL_HEADER: &str = "linear-svm v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn value(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    /// Sign with `sign(0) = +1`.
    pub fn from_decision(v: f64) -> Label {
        if v >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Positive => "+1",
            Label::Negative => "-1",
        })
    }
}

/// A feature vector with an optional training label.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedWindow {
    pub x: Vec<f64>,
    pub label: Option<Label>,
}

impl EncodedWindow {
    pub fn with_label(mut self, label: Label) -> Self {
        self.label = Some(label);
        self
    }
}

/// Slot of a base inside its 4-vector: T, C, G, A map to
/// `(1,0,0,0)`, `(0,1,0,0)`, `(0,0,1,0)`, `(0,0,0,1)`.
fn one_hot_slot(b: u8) -> Option<usize> {
    match b.to_ascii_uppercase() {
        b'T' => Some(0),
        b'C' => Some(1),
        b'G' => Some(2),
        b'A' => Some(3),
        _ => None,
    }
}

pub fn encode_window(bases: &[u8]) -> Result<EncodedWindow> {
    if bases.len() != WINDOW_LEN {
        return Err(Error::InvalidSequence(format!(
            "window must have {WINDOW_LEN} bases, got {}",
            bases.len()
        )));
    }
    let mut x = vec![0.0; DIM];
    for (i, &b) in bases.iter().enumerate() {
        let slot = one_hot_slot(b).ok_or_else(|| {
            Error::InvalidSequence(format!(
                "invalid nucleotide {:?} at window position {}",
                b as char,
                i + 1
            ))
        })?;
        x[4 * i + slot] = 1.0;
    }
    Ok(EncodedWindow { x, label: None })
}

pub fn encode_boundary(window: &BoundaryWindow) -> EncodedWindow {
    encode_window(window.bases()).expect("boundary windows hold 40 validated bases")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    w: Vec<f64>,
    bias: f64,
    lambda: f64,
    epochs: usize,
    seed: u64,
}

impl SvmModel {
    pub fn new(w: Vec<f64>, bias: f64, lambda: f64, epochs: usize, seed: u64) -> Result<Self> {
        if w.len() != DIM {
            return Err(Error::Dimension {
                expected: DIM,
                got: w.len(),
            });
        }
        if !w.iter().all(|v| v.is_finite()) || !bias.is_finite() {
            return Err(Error::InvalidParameter("model entries must be finite".into()));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(SvmModel {
            w,
            bias,
            lambda,
            epochs,
            seed,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn epochs(&self) -> usize {
        self.epochs
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `w·x + b`.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.w.len() {
            return Err(Error::Dimension {
                expected: self.w.len(),
                got: x.len(),
            });
        }
        Ok(dot(&self.w, x) + self.bias)
    }

    /// Regularised hinge objective over labelled data.
    pub fn objective(&self, data: &[EncodedWindow]) -> Result<f64> {
        objective(&self.w, self.bias, self.lambda, data)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn objective(w: &[f64], bias: f64, lambda: f64, data: &[EncodedWindow]) -> Result<f64> {
    let mut loss = 0.0;
    for s in data {
        let y = s
            .label
            .ok_or_else(|| Error::InvalidParameter("unlabelled training example".into()))?
            .value();
        if s.x.len() != w.len() {
            return Err(Error::Dimension {
                expected: w.len(),
                got: s.x.len(),
            });
        }
        loss += (1.0 - y * (dot(w, &s.x) + bias)).max(0.0);
    }
    Ok(0.5 * lambda * dot(w, w) + loss / data.len() as f64)
}

/// Minimiser of `Σ max(0, 1 − yᵢ(sᵢ + b))` over `b`. Every breakpoint
/// `yᵢ − sᵢ` raises the slope by one, starting from `−P` (P positives), so the
/// minimum spans the P-th and (P+1)-th smallest breakpoints; the midpoint is
/// returned.
fn optimal_bias(scores: &[f64], labels: &[f64]) -> f64 {
    let mut bp: Vec<f64> = scores.iter().zip(labels).map(|(s, y)| y - s).collect();
    bp.sort_by(f64::total_cmp);
    let p = labels.iter().filter(|&&y| y > 0.0).count();
    0.5 * (bp[p - 1] + bp[p])
}

pub fn predict(model: &SvmModel, x: &EncodedWindow) -> Result<Label> {
    model.decision_value(&x.x).map(Label::from_decision)
}

/// Objective of the averaged iterate at the end of each epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub objective_per_epoch: Vec<f64>,
}

pub fn train(data: &[EncodedWindow], lambda: f64, epochs: usize, seed: u64) -> Result<SvmModel> {
    train_with_report(data, lambda, epochs, seed).map(|(m, _)| m)
}

pub fn train_with_report(
    data: &[EncodedWindow],
    lambda: f64,
    epochs: usize,
    seed: u64,
) -> Result<(SvmModel, TrainReport)> {
    if data.is_empty() {
        return Err(Error::InvalidParameter("training set is empty".into()));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    if epochs == 0 {
        return Err(Error::InvalidParameter("epochs must be at least 1".into()));
    }
    let mut labels = Vec::with_capacity(data.len());
    for s in data {
        if s.x.len() != DIM {
            return Err(Error::Dimension {
                expected: DIM,
                got: s.x.len(),
            });
        }
        let label = s
            .label
            .ok_or_else(|| Error::InvalidParameter("unlabelled training example".into()))?;
        labels.push(label.value());
    }
    if !(labels.contains(&1.0) && labels.contains(&-1.0)) {
        return Err(Error::SingleClass);
    }

    let mut rng = SeededRng::new(seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut w = vec![0.0; DIM];
    let mut b = 0.0;
    let mut avg_w = vec![0.0; DIM];
    let mut avg_b = 0.0;
    let mut t = 0u64;
    let mut history = Vec::with_capacity(epochs);

    for _ in 0..epochs {
        rng.shuffle(&mut order);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let (x, y) = (&data[i].x, labels[i]);
            let margin = y * (dot(&w, x) + b);
            let shrink = 1.0 - eta * lambda;
            w.iter_mut().for_each(|v| *v *= shrink);
            if margin < 1.0 {
                for (wj, xj) in w.iter_mut().zip(x) {
                    *wj += eta * y * xj;
                }
                b += eta * y;
            }
            let k = 1.0 / t as f64;
            for (a, v) in avg_w.iter_mut().zip(&w) {
                *a += (v - *a) * k;
            }
            avg_b += (b - avg_b) * k;
        }
        history.push(objective(&avg_w, avg_b, lambda, data)?);
    }

    let scores: Vec<f64> = data.iter().map(|s| dot(&avg_w, &s.x)).collect();
    let bias = optimal_bias(&scores, &labels);
    let model = SvmModel::new(avg_w, bias, lambda, epochs, seed)?;
    Ok((
        model,
        TrainReport {
            objective_per_epoch: history,
        },
    ))
}

/// Labels a boundary window: `+1` looks like an exon start, `-1` like an
/// intron start.
pub trait BoundaryClassifier {
    fn classify(&self, window: &BoundaryWindow) -> Label;
}

impl BoundaryClassifier for SvmModel {
    fn classify(&self, window: &BoundaryWindow) -> Label {
        let x = encode_boundary(window);
        Label::from_decision(dot(&self.w, &x.x) + self.bias)
    }
}

impl<F: Fn(&BoundaryWindow) -> Label> BoundaryClassifier for F {
    fn classify(&self, window: &BoundaryWindow) -> Label {
        self(window)
    }
}

/// Keeps exon-start windows classified `+1` and exon-end windows classified
/// `-1`, preserving input order.
pub fn filter_windows<C: BoundaryClassifier + ?Sized>(
    classifier: &C,
    windows: &[BoundaryWindow],
) -> (Vec<BoundaryWindow>, Vec<BoundaryWindow>) {
    let mut starts = Vec::new();
    let mut ends = Vec::new();
    for w in windows {
        match (w.side(), classifier.classify(w)) {
            (Side::ExonStart, Label::Positive) => starts.push(w.clone()),
            (Side::ExonEnd, Label::Negative) => ends.push(w.clone()),
            _ => {}
        }
    }
    (starts, ends)
}

/// Training examples from annotated exons: the window at each exon start is
/// `+1`, the window at the following intron start is `-1`. Windows that do
/// not fit inside the sequence are skipped.
pub fn labeled_windows(seqs: &[Sequence], annotations: &[Annotation]) -> Result<Vec<EncodedWindow>> {
    let mut out = Vec::new();
    for a in annotations {
        let seq = seqs
            .iter()
            .find(|s| s.id() == a.seq_id)
            .ok_or_else(|| Error::UnknownSequence(a.seq_id.clone()))?;
        if a.end > seq.len() {
            return Err(Error::InvalidParameter(format!(
                "annotation {}:{}-{} exceeds sequence length {}",
                a.seq_id,
                a.start,
                a.end,
                seq.len()
            )));
        }
        let region = CandidateRegion::new(a.start, a.end, RegionKind::Both);
        if let Some(w) = start_window(seq, &region) {
            out.push(encode_boundary(&w).with_label(Label::Positive));
        }
        if let Some(w) = end_window(seq, &region) {
            out.push(encode_boundary(&w).with_label(Label::Negative));
        }
    }
    Ok(out)
}

pub fn save_model(model: &SvmModel) -> Result<String> {
    if !model.w.iter().all(|v| v.is_finite()) || !model.bias.is_finite() {
        return Err(Error::InvalidParameter("model entries must be finite".into()));
    }
    let mut out = String::new();
    writeln!(out, "{MODEL_HEADER}").unwrap();
    writeln!(out, "dim {}", model.w.len()).unwrap();
    writeln!(
        out,
        "lambda {:?} epochs {} seed {}",
        model.lambda, model.epochs, model.seed
    )
    .unwrap();
    writeln!(out, "{:?}", model.bias).unwrap();
    for v in &model.w {
        writeln!(out, "{v:?}").unwrap();
    }
    Ok(out)
}

pub fn load_model(text: &str) -> Result<SvmModel> {
    let bad = |line: usize, msg: String| Error::ModelFormat { line, msg };
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r')).enumerate();
    let mut next = |what: &str| {
        lines
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| bad(0, format!("unexpected end of file, expected {what}")))
    };

    let (n, header) = next("header")?;
    if header.trim() != MODEL_HEADER {
        return Err(bad(n, format!("expected {MODEL_HEADER:?}, found {header:?}")));
    }

    let (n, dim_line) = next("dimension")?;
    let dim = match dim_line.split_whitespace().collect::<Vec<_>>()[..] {
        ["dim", v] => v
            .parse::<usize>()
            .map_err(|_| bad(n, format!("invalid dimension {v:?}")))?,
        _ => return Err(bad(n, format!("expected 'dim <n>', found {dim_line:?}"))),
    };
    if dim != DIM {
        return Err(bad(n, format!("dimension must be {DIM}, found {dim}")));
    }

    let (n, params) = next("parameters")?;
    let (lambda, epochs, seed) = match params.split_whitespace().collect::<Vec<_>>()[..] {
        ["lambda", l, "epochs", e, "seed", s] => (
            l.parse::<f64>()
                .map_err(|_| bad(n, format!("invalid lambda {l:?}")))?,
            e.parse::<usize>()
                .map_err(|_| bad(n, format!("invalid epochs {e:?}")))?,
            s.parse::<u64>()
                .map_err(|_| bad(n, format!("invalid seed {s:?}")))?,
        ),
        _ => {
            return Err(bad(
                n,
                format!("expected 'lambda <v> epochs <n> seed <s>', found {params:?}"),
            ))
        }
    };

    let mut number = |what: &str| -> Result<f64> {
        let (n, tok) = next(what)?;
        let v: f64 = tok
            .trim()
            .parse()
            .map_err(|_| bad(n, format!("invalid {what} {tok:?}")))?;
        if !v.is_finite() {
            return Err(bad(n, format!("{what} must be finite")));
        }
        Ok(v)
    };
    let bias = number("bias")?;
    let w = (0..DIM)
        .map(|_| number("weight"))
        .collect::<Result<Vec<_>>>()?;

    for (i, l) in lines {
        if !l.trim().is_empty() {
            return Err(bad(i + 1, "trailing content after weights".into()));
        }
    }
    SvmModel::new(w, bias, lambda, epochs, seed).map_err(|e| bad(3, e.to_string()))
}
