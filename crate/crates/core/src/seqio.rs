//! FASTA and TSV input/output.
//!
//! Coordinates are 1-based and inclusive everywhere outside of slice
//! indexing.

use std::io::{BufRead, Write};

use crate::candidates::{CandidateRegion, RegionKind};
use crate::error::{Error, Result};

/// A validated DNA sequence over `{A, C, G, T}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    id: String,
    bases: Vec<u8>,
}

impl Sequence {
    /// Builds a sequence, uppercasing `bases` and rejecting anything outside
    /// `{A, C, G, T}` as well as empty input.
    pub fn new(id: impl Into<String>, bases: impl Into<Vec<u8>>) -> Result<Self> {
        let id = id.into();
        let mut bases = bases.into();
        bases.make_ascii_uppercase();
        if bases.is_empty() {
            return Err(Error::InvalidSequence(format!("sequence '{id}' is empty")));
        }
        if let Some(pos) = bases.iter().position(|b| !is_nucleotide(*b)) {
            return Err(Error::InvalidSequence(format!(
                "sequence '{id}' has invalid nucleotide {:?} at position {}",
                bases[pos] as char,
                pos + 1
            )));
        }
        Ok(Sequence { id, bases })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn bases(&self) -> &[u8] {
        &self.bases
    }

    pub fn as_str(&self) -> &str {
        // Only ASCII nucleotides are ever stored.
        std::str::from_utf8(&self.bases).expect("nucleotides are ASCII")
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    /// Copies out the 1-based inclusive interval `[start, end]`, keeping the id.
    ///
    /// Panics if the interval is empty or out of range.
    pub fn subsequence(&self, start: usize, end: usize) -> Sequence {
        assert!(
            start >= 1 && start <= end && end <= self.len(),
            "interval [{start}, {end}] outside sequence of length {}",
            self.len()
        );
        Sequence {
            id: self.id.clone(),
            bases: self.bases[start - 1..end].to_vec(),
        }
    }
}

pub(crate) fn is_nucleotide(b: u8) -> bool {
    matches!(b, b'A' | b'C' | b'G' | b'T')
}

/// Ground-truth exon coordinates for one sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Annotation {
    pub seq_id: String,
    pub start: usize,
    pub end: usize,
}

impl Annotation {
    pub fn new(seq_id: impl Into<String>, start: usize, end: usize) -> Self {
        Annotation {
            seq_id: seq_id.into(),
            start,
            end,
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A candidate region together with its three-base-periodicity SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredRegion {
    pub seq_id: String,
    pub region: CandidateRegion,
    pub snr: f64,
}

/// Parses FASTA text. Sequence lines may be wrapped and lowercase; ids are
/// truncated at the first whitespace.
pub fn parse_fasta<R: BufRead>(mut reader: R) -> Result<Vec<Sequence>> {
    let mut records = Vec::new();
    let mut current: Option<(String, usize, Vec<u8>)> = None;
    let mut buf = Vec::new();
    let mut line_no = 0;

    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let line = buf.trim_ascii();

        if let Some(header) = line.strip_prefix(b">") {
            if let Some(rec) = current.take() {
                records.push(finish_record(rec)?);
            }
            let id = header
                .split(|b| b.is_ascii_whitespace())
                .next()
                .unwrap_or_default();
            if id.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "FASTA header without an id".into(),
                });
            }
            current = Some((String::from_utf8_lossy(id).into_owned(), line_no, Vec::new()));
            continue;
        }

        let Some((id, _, bases)) = current.as_mut() else {
            if line.is_empty() {
                continue;
            }
            return Err(Error::MissingHeader { line: line_no });
        };
        for &b in line.iter().filter(|b| !b.is_ascii_whitespace()) {
            let up = b.to_ascii_uppercase();
            if !is_nucleotide(up) {
                return Err(Error::InvalidBase {
                    record: id.clone(),
                    line: line_no,
                    byte: b as char,
                });
            }
            bases.push(up);
        }
    }

    if let Some(rec) = current.take() {
        records.push(finish_record(rec)?);
    }
    Ok(records)
}

fn finish_record((id, line, bases): (String, usize, Vec<u8>)) -> Result<Sequence> {
    if bases.is_empty() {
        return Err(Error::EmptyRecord { record: id, line });
    }
    Ok(Sequence { id, bases })
}

/// Writes sequences as FASTA with 60-column lines.
pub fn write_fasta<W: Write>(seqs: &[Sequence], mut sink: W) -> Result<()> {
    for seq in seqs {
        writeln!(sink, ">{}", seq.id)?;
        for chunk in seq.bases.chunks(60) {
            sink.write_all(chunk)?;
            sink.write_all(b"\n")?;
        }
    }
    sink.flush()?;
    Ok(())
}

fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(e) => Some(Err(Error::Io(e))),
            Ok(l) => {
                let l = l.trim_end_matches('\r');
                if l.trim().is_empty() || l.starts_with('#') {
                    None
                } else {
                    Some(Ok((i + 1, l.to_string())))
                }
            }
        })
}

fn parse_interval(line: usize, fields: &[&str]) -> Result<(String, usize, usize)> {
    let coord = |s: &str, what: &str| {
        s.trim().parse::<usize>().map_err(|_| Error::Parse {
            line,
            msg: format!("{what} coordinate {s:?} is not a non-negative integer"),
        })
    };
    let start = coord(fields[1], "start")?;
    let end = coord(fields[2], "end")?;
    if start < 1 {
        return Err(Error::Parse {
            line,
            msg: "start must be at least 1".into(),
        });
    }
    if end < start {
        return Err(Error::Parse {
            line,
            msg: format!("end {end} is before start {start}"),
        });
    }
    Ok((fields[0].to_string(), start, end))
}

/// Parses a `seq_id<TAB>start<TAB>end` annotation table. `#` lines and blank
/// lines are skipped.
pub fn parse_annotations<R: BufRead>(reader: R) -> Result<Vec<Annotation>> {
    let mut out = Vec::new();
    for item in data_lines(reader) {
        let (line, text) = item?;
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let (seq_id, start, end) = parse_interval(line, &fields)?;
        out.push(Annotation { seq_id, start, end });
    }
    Ok(out)
}

pub fn write_annotations<W: Write>(annotations: &[Annotation], mut sink: W) -> Result<()> {
    writeln!(sink, "#seq_id\tstart\tend")?;
    for a in annotations {
        writeln!(sink, "{}\t{}\t{}", a.seq_id, a.start, a.end)?;
    }
    sink.flush()?;
    Ok(())
}

/// Writes the prediction table: a tab-separated `#seq_id start end snr` header followed
/// by one line per region with the SNR at six decimals.
pub fn write_predictions<W: Write>(regions: &[ScoredRegion], mut sink: W) -> Result<()> {
    writeln!(sink, "#seq_id\tstart\tend\tsnr")?;
    for r in regions {
        writeln!(
            sink,
            "{}\t{}\t{}\t{:.6}",
            r.seq_id, r.region.start, r.region.end, r.snr
        )?;
    }
    sink.flush()?;
    Ok(())
}

/// Reads a table produced by [`write_predictions`].
pub fn parse_predictions<R: BufRead>(reader: R) -> Result<Vec<ScoredRegion>> {
    let mut out = Vec::new();
    for item in data_lines(reader) {
        let (line, text) = item?;
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        }
        let (seq_id, start, end) = parse_interval(line, &fields)?;
        let snr: f64 = fields[3].trim().parse().map_err(|_| Error::Parse {
            line,
            msg: format!("SNR {:?} is not a number", fields[3]),
        })?;
        out.push(ScoredRegion {
            seq_id,
            region: CandidateRegion::new(start, end, RegionKind::Both),
            snr,
        });
    }
    Ok(out)
}
