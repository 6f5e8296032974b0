//! Acceptance suite. Prints one PASS/FAIL line per criterion; run with
//! `cargo test -p exonscan --test acceptance -- --nocapture` to see them.

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use exonscan::candidates::{candidate_regions, exon_length_stats, DEFAULT_MAX_LEN, DEFAULT_MIN_LEN};
use exonscan::eval::{auc, confusion, roc, sensitivity, specificity_paper, Convention, RocCurve, RocPoint};
use exonscan::pipeline::{predict_all, PipelineConfig};
use exonscan::seqio::{Annotation, ScoredRegion, Sequence};
use exonscan::spectral::{
    closed_form_peak, codon_position_counts, power_spectrum, snr, voss_map, Nucleotide, Verdict,
};
use exonscan::svm::{labeled_windows, predict, save_model, train, EncodedWindow, SvmModel, DEFAULT_EPOCHS, DEFAULT_LAMBDA};
use exonscan::synth::{generate, SynthSpec};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_sequence(rng: &mut Xoshiro256PlusPlus, len: usize) -> Sequence {
    let bases: Vec<u8> = (0..len).map(|_| b"ACGT"[(rng.next_u64() % 4) as usize]).collect();
    Sequence::new("r", bases).unwrap()
}

fn spectral_corpus() -> Vec<Sequence> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(2024);
    (0..1000)
        .map(|_| {
            let len = 3 * (1 + (rng.next_u64() % 100) as usize);
            random_sequence(&mut rng, len)
        })
        .collect()
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    ensure(elapsed < Duration::from_secs(limit_secs), || {
        format!("took {:.2}s, limit {limit_secs}s", elapsed.as_secs_f64())
    })
}

fn oracle_equivalence() -> Check {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for s in spectral_corpus() {
        let dft = power_spectrum(&voss_map(&s)).values()[s.len() / 3];
        let closed = closed_form_peak(&codon_position_counts(&s));
        worst = worst.max((dft - closed).abs());
    }
    ensure(worst <= 1e-6, || format!("max |closed - DFT| = {worst:e}"))?;
    within(t.elapsed(), 10)?;
    Ok(format!("1000 sequences, max error {worst:.1e}, {:.2}s", t.elapsed().as_secs_f64()))
}

fn parseval() -> Check {
    let mut worst = 0.0f64;
    for s in spectral_corpus() {
        let n = s.len() as f64;
        let total: f64 = power_spectrum(&voss_map(&s)).values().iter().sum();
        worst = worst.max((total - n * n).abs() / (n * n));
    }
    ensure(worst <= 1e-9, || format!("max relative error {worst:e}"))?;
    Ok(format!("1000 sequences, max relative error {worst:.1e}"))
}

fn table2() -> Check {
    let ind = voss_map(&Sequence::new("t", "ATGCTTAG").unwrap());
    let expected: [(Nucleotide, [u8; 8]); 4] = [
        (Nucleotide::A, [1, 0, 0, 0, 0, 0, 1, 0]),
        (Nucleotide::T, [0, 1, 0, 0, 1, 1, 0, 0]),
        (Nucleotide::G, [0, 0, 1, 0, 0, 0, 0, 1]),
        (Nucleotide::C, [0, 0, 0, 1, 0, 0, 0, 0]),
    ];
    for (b, row) in expected {
        ensure(ind.get(b) == row, || format!("{b:?} row {:?}, expected {row:?}", ind.get(b)))?;
    }
    Ok("indicator rows for ATGCTTAG match".into())
}

fn snr_rule() -> Check {
    let coding = snr(&Sequence::new("c", "ATGATGATG").unwrap()).map_err(|e| e.to_string())?;
    let flat = snr(&Sequence::new("f", "AAAAAAAAA").unwrap()).map_err(|e| e.to_string())?;
    ensure(coding == 3.0, || format!("ATGATGATG gave R = {coding}"))?;
    ensure(flat == 0.0, || format!("AAAAAAAAA gave R = {flat}"))?;
    ensure(Verdict::from_snr(coding, 2.0) == Verdict::Exon, || "ATGATGATG not exon".into())?;
    ensure(Verdict::from_snr(flat, 2.0) == Verdict::Intron, || "AAAAAAAAA not intron".into())?;
    Ok("R = 3.0 exon, R = 0.0 intron".into())
}

fn brute_force_candidates(bases: &[u8], min: usize, max: usize) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for i in 0..bases.len().saturating_sub(1) {
        if &bases[i..i + 2] != b"AG" {
            continue;
        }
        for j in 0..bases.len() - 1 {
            if &bases[j..j + 2] != b"GT" {
                continue;
            }
            // 1-based: AG at i+1, exon from i+3 to the base before GT at j+1.
            let (start, end) = (i + 3, j);
            if end >= start && (min..=max).contains(&(end - start + 1)) {
                out.insert((start, end));
            }
        }
    }
    out
}

fn candidate_oracle() -> Check {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(77);
    let t = Instant::now();
    let mut total = 0;
    for _ in 0..100 {
        let len = 1 + (rng.next_u64() % 2000) as usize;
        let s = random_sequence(&mut rng, len);
        let got: BTreeSet<(usize, usize)> = candidate_regions(&s, DEFAULT_MIN_LEN, DEFAULT_MAX_LEN)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|r| (r.start, r.end))
            .collect();
        let want = brute_force_candidates(s.bases(), DEFAULT_MIN_LEN, DEFAULT_MAX_LEN);
        ensure(got == want, || {
            format!("length {len}: {} regions, brute force {}", got.len(), want.len())
        })?;
        total += got.len();
    }
    within(t.elapsed(), 5)?;
    Ok(format!("100 sequences, {total} regions, {:.2}s", t.elapsed().as_secs_f64()))
}

fn accuracy(model: &SvmModel, data: &[EncodedWindow]) -> f64 {
    let ok = data.iter().filter(|x| predict(model, x).ok() == x.label).count();
    ok as f64 / data.len() as f64
}

fn svm_sanity() -> Check {
    let spec = SynthSpec {
        seed: 42,
        n_sequences: 67,
        ..SynthSpec::default()
    };
    let (seqs, annotations) = generate(&spec).map_err(|e| e.to_string())?;
    let windows = labeled_windows(&seqs, &annotations).map_err(|e| e.to_string())?;
    let (mut pos, mut neg): (Vec<_>, Vec<_>) = windows
        .into_iter()
        .partition(|w| w.label.map(|l| l.value()) == Some(1.0));
    ensure(pos.len() >= 200 && neg.len() >= 200, || {
        format!("corpus gave {} / {} windows", pos.len(), neg.len())
    })?;
    pos.truncate(200);
    neg.truncate(200);
    let data: Vec<EncodedWindow> = pos.into_iter().chain(neg).collect();

    let a = train(&data, DEFAULT_LAMBDA, DEFAULT_EPOCHS, 42).map_err(|e| e.to_string())?;
    let b = train(&data, DEFAULT_LAMBDA, DEFAULT_EPOCHS, 42).map_err(|e| e.to_string())?;
    let acc = accuracy(&a, &data);
    ensure(acc >= 0.95, || format!("training accuracy {acc:.4}"))?;
    let (fa, fb) = (save_model(&a).unwrap(), save_model(&b).unwrap());
    ensure(fa == fb, || "same seed gave different model files".into())?;
    Ok(format!("400 windows, accuracy {acc:.4} after {DEFAULT_EPOCHS} epochs, model files identical"))
}

fn planted_exon_recovery() -> Check {
    let t = Instant::now();
    let exon_len = (120, 300);
    let train_spec = SynthSpec {
        seed: 1000,
        n_sequences: 20,
        exon_len,
        ..SynthSpec::default()
    };
    let (tseqs, tann) = generate(&train_spec).map_err(|e| e.to_string())?;
    let model = train(
        &labeled_windows(&tseqs, &tann).map_err(|e| e.to_string())?,
        DEFAULT_LAMBDA,
        DEFAULT_EPOCHS,
        42,
    )
    .map_err(|e| e.to_string())?;

    let cfg = PipelineConfig::default();
    let (mut min_sn, mut min_auc) = (f64::INFINITY, f64::INFINITY);
    for seed in 1..=10 {
        let spec = SynthSpec {
            seed,
            exon_len,
            ..SynthSpec::default()
        };
        let (seqs, truth) = generate(&spec).map_err(|e| e.to_string())?;
        let lengths: HashMap<String, usize> = seqs.iter().map(|s| (s.id().to_string(), s.len())).collect();
        let predictions = predict_all(&seqs, &model, &cfg).map_err(|e| e.to_string())?;
        let scored: Vec<ScoredRegion> = predictions.iter().map(|p| p.scored()).collect();
        let called: Vec<ScoredRegion> = predictions
            .iter()
            .filter(|p| p.verdict == Verdict::Exon)
            .map(|p| p.scored())
            .collect();
        let c = confusion(&truth, &called, &lengths).map_err(|e| e.to_string())?;
        let sn = sensitivity(&c).map_err(|e| e.to_string())?;
        let curve = roc(&truth, &scored, &lengths, Convention::Standard).map_err(|e| e.to_string())?;
        let a = auc(&curve).map_err(|e| e.to_string())?;
        ensure(sn >= 0.8, || format!("seed {seed}: Sn {sn:.4}"))?;
        ensure(a >= 0.9, || format!("seed {seed}: standard AUC {a:.4}"))?;
        min_sn = min_sn.min(sn);
        min_auc = min_auc.min(a);
    }
    within(t.elapsed(), 60)?;
    Ok(format!(
        "seeds 1..10, min Sn {min_sn:.4}, min standard AUC {min_auc:.4}, {:.2}s",
        t.elapsed().as_secs_f64()
    ))
}

fn eval_hand_check() -> Check {
    let lengths: HashMap<String, usize> = [("s".to_string(), 20)].into_iter().collect();
    let c = confusion(&[Annotation::new("s", 6, 15)], &[Annotation::new("s", 1, 10)], &lengths)
        .map_err(|e| e.to_string())?;
    ensure((c.tp, c.fp, c.fn_, c.tn) == (5, 5, 5, 5), || format!("{c:?}"))?;
    let sn = sensitivity(&c).map_err(|e| e.to_string())?;
    let sp = specificity_paper(&c).map_err(|e| e.to_string())?;
    ensure(sn == 0.5 && sp == 0.5, || format!("Sn {sn}, Sp {sp}"))?;
    let curve = RocCurve {
        points: [(0.0, 0.0), (0.2, 0.8), (1.0, 1.0)]
            .iter()
            .map(|&(x, y)| RocPoint { x, y, threshold: 0.0 })
            .collect(),
        convention: Convention::Standard,
    };
    let a = auc(&curve).map_err(|e| e.to_string())?;
    // 0.2 and 0.8 are not binary fractions; allow the last-bit rounding.
    ensure((a - 0.8).abs() < 1e-12, || format!("AUC {a}"))?;
    Ok(format!("tp=fp=fn=tn=5, Sn=Sp=0.5, AUC {a:.2}"))
}

fn length_statistic() -> Check {
    let ann: Vec<Annotation> = [10, 50, 100, 400]
        .iter()
        .enumerate()
        .map(|(i, &len)| Annotation::new("s", 1000 * i + 1, 1000 * i + len))
        .collect();
    let f = exon_length_stats(&ann, 40, 300).map_err(|e| e.to_string())?.fraction;
    ensure(f == 0.5, || format!("fraction {f}"))?;
    for seed in 1..=10 {
        let spec = SynthSpec {
            seed,
            exon_len: (40, 300),
            ..SynthSpec::default()
        };
        let (_, truth) = generate(&spec).map_err(|e| e.to_string())?;
        let g = exon_length_stats(&truth, 40, 300).map_err(|e| e.to_string())?.fraction;
        ensure(g == 1.0, || format!("seed {seed}: fraction {g}"))?;
    }
    Ok("0.5 on [10,50,100,400]; 1.0 on 10 synth corpora".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("closed form equals DFT peak", oracle_equivalence),
        ("Parseval", parseval),
        ("indicator table", table2),
        ("SNR decision rule", snr_rule),
        ("candidate generator oracle", candidate_oracle),
        ("SVM sanity", svm_sanity),
        ("planted exon recovery", planted_exon_recovery),
        ("eval hand check", eval_hand_check),
        ("exon length statistic", length_statistic),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                println!("FAIL {} {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
