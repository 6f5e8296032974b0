use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use exonscan::candidates::{exon_length_stats, DEFAULT_MAX_LEN, DEFAULT_MIN_LEN};
use exonscan::eval::{auc, confusion, roc, sensitivity, specificity_paper, specificity_standard, Convention};
use exonscan::pipeline::{predict_all, scan, PipelineConfig, DEFAULT_R0, DEFAULT_SCAN_WINDOW};
use exonscan::seqio::{self, Annotation, ScoredRegion, Sequence};
use exonscan::spectral::{power_spectrum, voss_map, Verdict};
use exonscan::svm::{self, DEFAULT_EPOCHS, DEFAULT_LAMBDA, DEFAULT_SEED};
use exonscan::synth::{generate, SynthSpec};

#[derive(Parser, Debug)]
#[command(name = "exonscan", version, about = "Exon detection from three-base periodicity and GT-AG boundaries")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic corpus: <prefix>.fasta and <prefix>.tsv
    Synth(SynthArgs),
    /// Train the boundary SVM from annotated exons
    Train(TrainArgs),
    /// Score candidate exons and write every surviving region
    Predict(PredictArgs),
    /// Sliding-window SNR along each sequence
    Scan(ScanArgs),
    /// Full power spectrum of one sequence
    Spectrum(SpectrumArgs),
    /// Nucleotide-level evaluation and ROC curves
    Eval(EvalArgs),
    /// Exon length statistics
    Stats(StatsArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, value_name = "PREFIX")]
    out_prefix: PathBuf,
    /// key=value file, applied before the flags below
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_sequences: Option<usize>,
    #[arg(long)]
    exons_per_sequence: Option<usize>,
    #[arg(long)]
    exon_min: Option<usize>,
    #[arg(long)]
    exon_max: Option<usize>,
    #[arg(long)]
    intron_min: Option<usize>,
    #[arg(long)]
    intron_max: Option<usize>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long)]
    fasta: PathBuf,
    #[arg(long)]
    annot: PathBuf,
    #[arg(long)]
    out_model: PathBuf,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long, default_value_t = DEFAULT_EPOCHS)]
    epochs: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[arg(long)]
    fasta: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MIN_LEN)]
    min_len: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_LEN)]
    max_len: usize,
    #[arg(long, default_value_t = DEFAULT_R0)]
    r0: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    fasta: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SCAN_WINDOW)]
    window: usize,
    #[arg(long, default_value_t = 3)]
    step: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long)]
    fasta: PathBuf,
    #[arg(long)]
    seq_id: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    Paper,
    Standard,
    Both,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Ground-truth exon annotations
    #[arg(long)]
    truth: PathBuf,
    /// Scored regions as written by `predict`
    #[arg(long)]
    pred_scored: PathBuf,
    /// Sequences the regions refer to; supplies the lengths
    #[arg(long)]
    fasta: PathBuf,
    /// Threshold for the single-point summary
    #[arg(long, default_value_t = DEFAULT_R0)]
    r0: f64,
    #[arg(long, value_enum, default_value_t = ConventionArg::Both)]
    convention: ConventionArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long)]
    annot: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MIN_LEN)]
    lo: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_LEN)]
    hi: usize,
    /// Histogram TSV
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<exonscan::Error> for Failure {
    fn from(e: exonscan::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn data<T>(path: &Path, r: exonscan::Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> std::result::Result<BufReader<fs::File>, Failure> {
    fs::File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn read_fasta(path: &Path) -> std::result::Result<Vec<Sequence>, Failure> {
    data(path, seqio::parse_fasta(open(path)?))
}

fn read_annotations(path: &Path) -> std::result::Result<Vec<Annotation>, Failure> {
    data(path, seqio::parse_annotations(open(path)?))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Outcome {
    fs::write(path, bytes).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn run_synth(a: SynthArgs) -> Outcome {
    let mut spec = SynthSpec::default();
    if let Some(path) = &a.config {
        let text = fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
        data(path, spec.apply_config(&text))?;
    }
    if let Some(v) = a.seed {
        spec.seed = v;
    }
    if let Some(v) = a.n_sequences {
        spec.n_sequences = v;
    }
    if let Some(v) = a.exons_per_sequence {
        spec.exons_per_sequence = v;
    }
    if let Some(v) = a.exon_min {
        spec.exon_len.0 = v;
    }
    if let Some(v) = a.exon_max {
        spec.exon_len.1 = v;
    }
    if let Some(v) = a.intron_min {
        spec.intron_len.0 = v;
    }
    if let Some(v) = a.intron_max {
        spec.intron_len.1 = v;
    }
    spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;

    let (seqs, annotations) = generate(&spec)?;
    let mut fasta = Vec::new();
    seqio::write_fasta(&seqs, &mut fasta)?;
    let mut tsv = Vec::new();
    seqio::write_annotations(&annotations, &mut tsv)?;
    write(&with_ext(&a.out_prefix, "fasta"), fasta)?;
    write(&with_ext(&a.out_prefix, "tsv"), tsv)?;
    eprintln!("{} sequences, {} exons", seqs.len(), annotations.len());
    Ok(())
}

fn run_train(a: TrainArgs) -> Outcome {
    if !(a.lambda > 0.0 && a.lambda.is_finite()) {
        return Err(Failure::Usage(format!("--lambda must be positive, got {}", a.lambda)));
    }
    if a.epochs == 0 {
        return Err(Failure::Usage("--epochs must be at least 1".into()));
    }
    let seqs = read_fasta(&a.fasta)?;
    let annotations = read_annotations(&a.annot)?;
    let examples = svm::labeled_windows(&seqs, &annotations)?;
    let model = svm::train(&examples, a.lambda, a.epochs, a.seed)?;
    let correct = examples
        .iter()
        .filter(|x| svm::predict(&model, x).ok() == x.label)
        .count();
    write(&a.out_model, svm::save_model(&model)?)?;
    eprintln!(
        "{} windows, training accuracy {:.4}",
        examples.len(),
        correct as f64 / examples.len() as f64
    );
    Ok(())
}

fn run_predict(a: PredictArgs) -> Outcome {
    let cfg = PipelineConfig {
        min_len: a.min_len,
        max_len: a.max_len,
        r0: a.r0,
        ..PipelineConfig::default()
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let text = fs::read_to_string(&a.model).map_err(|e| Failure::Data(format!("{}: {e}", a.model.display())))?;
    let model = data(&a.model, svm::load_model(&text))?;
    let seqs = read_fasta(&a.fasta)?;
    let predictions = predict_all(&seqs, &model, &cfg)?;
    let scored: Vec<ScoredRegion> = predictions.iter().map(|p| p.scored()).collect();
    let mut out = Vec::new();
    seqio::write_predictions(&scored, &mut out)?;
    write(&a.out, out)?;
    let exons = predictions.iter().filter(|p| p.verdict == Verdict::Exon).count();
    eprintln!("{} regions, {} called exon at r0 {}", predictions.len(), exons, cfg.r0);
    Ok(())
}

fn run_scan(a: ScanArgs) -> Outcome {
    if a.window < 3 || a.window % 3 != 0 {
        return Err(Failure::Usage(format!(
            "--window must be a positive multiple of 3, got {}",
            a.window
        )));
    }
    if a.step == 0 {
        return Err(Failure::Usage("--step must be at least 1".into()));
    }
    let seqs = read_fasta(&a.fasta)?;
    let mut out = String::from("#seq_id\toffset\tsnr\n");
    for s in &seqs {
        for (offset, snr) in scan(s, a.window, a.step)? {
            writeln!(out, "{}\t{offset}\t{snr:.6}", s.id()).unwrap();
        }
    }
    write(&a.out, out)
}

fn run_spectrum(a: SpectrumArgs) -> Outcome {
    let seqs = read_fasta(&a.fasta)?;
    let seq = seqs
        .iter()
        .find(|s| s.id() == a.seq_id)
        .ok_or_else(|| Failure::Data(format!("{}: no sequence {:?}", a.fasta.display(), a.seq_id)))?;
    let spectrum = power_spectrum(&voss_map(seq));
    let mut out = String::from("#k\tpower\n");
    for (k, p) in spectrum.values().iter().enumerate() {
        writeln!(out, "{k}\t{p:.6}").unwrap();
    }
    write(&a.out, out)
}

fn fmt_rate(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| format!("{v:.6}"))
}

fn run_eval(a: EvalArgs) -> Outcome {
    if !(a.r0 >= 0.0 && a.r0.is_finite()) {
        return Err(Failure::Usage(format!("--r0 must be non-negative, got {}", a.r0)));
    }
    let truth = read_annotations(&a.truth)?;
    let scored = data(&a.pred_scored, seqio::parse_predictions(open(&a.pred_scored)?))?;
    let lengths: HashMap<String, usize> = read_fasta(&a.fasta)?
        .iter()
        .map(|s| (s.id().to_string(), s.len()))
        .collect();

    let called: Vec<ScoredRegion> = scored.iter().filter(|r| r.snr >= a.r0).cloned().collect();
    let c = confusion(&truth, &called, &lengths)?;
    println!("tp\t{}\nfp\t{}\nfn\t{}\ntn\t{}", c.tp, c.fp, c.fn_, c.tn);
    println!("sn\t{:.6}", sensitivity(&c)?);
    println!("sp_paper\t{}", fmt_rate(specificity_paper(&c).ok()));
    println!("sp_standard\t{}", fmt_rate(specificity_standard(&c)));

    let conventions: &[Convention] = match a.convention {
        ConventionArg::Paper => &[Convention::Paper],
        ConventionArg::Standard => &[Convention::Standard],
        ConventionArg::Both => &[Convention::Paper, Convention::Standard],
    };
    let mut out = String::from("#convention\tx\ty\tthreshold\n");
    for &conv in conventions {
        let curve = roc(&truth, &scored, &lengths, conv)?;
        for p in &curve.points {
            writeln!(out, "{conv}\t{:.6}\t{:.6}\t{}", p.x, p.y, p.threshold).unwrap();
        }
        match auc(&curve) {
            Ok(v) => println!("auc_{conv}\t{v:.6}"),
            Err(_) => println!("auc_{conv}\tNA"),
        }
    }
    write(&a.out, out)
}

fn run_stats(a: StatsArgs) -> Outcome {
    if a.lo > a.hi {
        return Err(Failure::Usage(format!("--lo {} exceeds --hi {}", a.lo, a.hi)));
    }
    let annotations = read_annotations(&a.annot)?;
    let stats = exon_length_stats(&annotations, a.lo, a.hi)?;
    println!("fraction\t{}", stats.fraction);
    if let Some(path) = &a.out {
        let mut out = String::from("#length\tcount\n");
        for (len, n) in &stats.histogram {
            writeln!(out, "{len}\t{n}").unwrap();
        }
        write(path, out)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Synth(a) => run_synth(a),
        Command::Train(a) => run_train(a),
        Command::Predict(a) => run_predict(a),
        Command::Scan(a) => run_scan(a),
        Command::Spectrum(a) => run_spectrum(a),
        Command::Eval(a) => run_eval(a),
        Command::Stats(a) => run_stats(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
