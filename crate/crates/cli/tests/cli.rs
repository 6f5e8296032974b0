use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn exonscan(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exonscan"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Training and test corpora plus a model, all under `dir`.
fn pipeline_inputs(dir: &Path) {
    ok(&exonscan(&["synth", "--out-prefix", "train", "--seed", "100", "--n-sequences", "20", "--exon-min", "120"], dir));
    ok(&exonscan(&["synth", "--out-prefix", "test", "--seed", "1", "--exon-min", "120"], dir));
    ok(&exonscan(&["train", "--fasta", "train.fasta", "--annot", "train.tsv", "--out-model", "model.txt"], dir));
}

#[test]
fn no_arguments_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = exonscan(&[], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn unknown_subcommand_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(exonscan(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(exonscan(&["stats", "--annot", "a.tsv", "--bogus"], dir.path()).status.code(), Some(1));
    assert_eq!(exonscan(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn stats_on_four_exons() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("a.tsv"),
        "#seq_id\tstart\tend\ns\t1\t10\ns\t101\t150\ns\t201\t300\ns\t401\t800\n",
    )
    .unwrap();
    let stdout = ok(&exonscan(&["stats", "--annot", "a.tsv", "--out", "h.tsv"], dir.path()));
    assert_eq!(stdout.trim(), "fraction\t0.5");
    let hist = fs::read_to_string(dir.path().join("h.tsv")).unwrap();
    assert_eq!(hist, "#length\tcount\n10\t1\n50\t1\n100\t1\n400\t1\n");
}

#[test]
fn predict_defaults_match_explicit_flags() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    pipeline_inputs(d);
    ok(&exonscan(&["predict", "--fasta", "test.fasta", "--model", "model.txt", "--out", "a.tsv"], d));
    ok(&exonscan(
        &[
            "predict", "--fasta", "test.fasta", "--model", "model.txt", "--min-len", "40", "--max-len", "300",
            "--r0", "2.0", "--out", "b.tsv",
        ],
        d,
    ));
    let a = fs::read(d.join("a.tsv")).unwrap();
    assert_eq!(a, fs::read(d.join("b.tsv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("#seq_id\tstart\tend\tsnr\n"));
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split('\t').collect();
        let len = f[2].parse::<usize>().unwrap() - f[1].parse::<usize>().unwrap() + 1;
        assert!((40..=300).contains(&len), "{line}");
    }
}

#[test]
fn outputs_are_deterministic() {
    let runs: Vec<Vec<Vec<u8>>> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let d = dir.path();
            pipeline_inputs(d);
            ok(&exonscan(&["predict", "--fasta", "test.fasta", "--model", "model.txt", "--out", "pred.tsv"], d));
            ok(&exonscan(&["scan", "--fasta", "test.fasta", "--out", "scan.tsv"], d));
            ok(&exonscan(&["spectrum", "--fasta", "test.fasta", "--seq-id", "synth1", "--out", "spec.tsv"], d));
            let summary = ok(&exonscan(
                &["eval", "--truth", "test.tsv", "--pred-scored", "pred.tsv", "--fasta", "test.fasta", "--out", "roc.tsv"],
                d,
            ));
            let mut files: Vec<Vec<u8>> = ["train.fasta", "test.tsv", "model.txt", "pred.tsv", "scan.tsv", "spec.tsv", "roc.tsv"]
                .iter()
                .map(|f| fs::read(d.join(f)).unwrap())
                .collect();
            files.push(summary.into_bytes());
            files
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn eval_reports_both_conventions() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    pipeline_inputs(d);
    let before = fs::read(d.join("test.tsv")).unwrap();
    ok(&exonscan(&["predict", "--fasta", "test.fasta", "--model", "model.txt", "--out", "pred.tsv"], d));
    let summary = ok(&exonscan(
        &["eval", "--truth", "test.tsv", "--pred-scored", "pred.tsv", "--fasta", "test.fasta", "--out", "roc.tsv"],
        d,
    ));
    assert!(summary.contains("auc_paper\t") && summary.contains("auc_standard\t"));
    let auc: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("auc_standard\t"))
        .unwrap()
        .parse()
        .unwrap();
    assert!(auc >= 0.9, "{summary}");
    let roc = fs::read_to_string(d.join("roc.tsv")).unwrap();
    assert!(roc.starts_with("#convention\tx\ty\tthreshold\n"));
    assert!(roc.lines().any(|l| l.starts_with("paper\t")));
    assert!(roc.lines().any(|l| l.starts_with("standard\t")));
    assert_eq!(before, fs::read(d.join("test.tsv")).unwrap());
}

#[test]
fn spectrum_and_scan_formats() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("s.fasta"), ">x\nATGATGATG\n").unwrap();
    ok(&exonscan(&["spectrum", "--fasta", "s.fasta", "--seq-id", "x", "--out", "p.tsv"], d));
    let p = fs::read_to_string(d.join("p.tsv")).unwrap();
    let lines: Vec<&str> = p.lines().collect();
    assert_eq!(lines[0], "#k\tpower");
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[1], "0\t27.000000");
    ok(&exonscan(&["scan", "--fasta", "s.fasta", "--window", "9", "--out", "w.tsv"], d));
    assert_eq!(fs::read_to_string(d.join("w.tsv")).unwrap(), "#seq_id\toffset\tsnr\nx\t1\t3.000000\n");
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.fasta"), ">x\nACGN\n").unwrap();
    let out = exonscan(&["scan", "--fasta", "bad.fasta", "--out", "w.tsv"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(!d.join("w.tsv").exists());
    let out = exonscan(&["stats", "--annot", "missing.tsv"], d);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_flags_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = exonscan(&["synth", "--out-prefix", "c", "--exon-min", "500", "--exon-max", "100"], d);
    assert_eq!(out.status.code(), Some(1));
    assert!(!d.join("c.fasta").exists() && !d.join("c.tsv").exists());
}
