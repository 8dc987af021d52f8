//! Acceptance checks. Each criterion prints one PASS/FAIL line to stdout.
//!
//! Run with `cargo test -p qaflow --test acceptance -- --nocapture`
//! (the lines are written past the test harness capture either way).

use std::io::Write;
use std::process::Command;

use num_complex::Complex64;
use qaflow::gates::TruthTable;
use qaflow::linalg::{ComplexMatrix, ComplexVector};
use qaflow::measures::{
    entropy_record, holevo_accessible, renyi, shannon_full, tsallis, uncertainty_check, LogBase,
    ObservablePair,
};
use qaflow::report::{emit_plot_series, TraceDocument};
use qaflow::runner::{
    run, run_deutsch_jozsa, run_grover, run_shor_period, termination_scan, AlgorithmConfig,
    Verdict,
};
use qaflow::state::{basis_state, ProbabilityDistribution, QubitSubset, StateVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Criteria that cannot pass as written; see the project notes.
const KNOWN_UNATTAINABLE: &[usize] = &[5];

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Binary entropy, written out independently of the library.
fn h2(p: f64) -> f64 {
    [p, 1.0 - p]
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn criterion_1() -> Outcome {
    let cases = [
        ("case 1", vec![0; 8], [(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]),
        ("case 2", vec![1, 0, 1, 1, 0, 0, 0, 1], [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (1.0, 1.0)]),
    ];
    let mut worst = 0.0f64;
    for (_, outputs, expected) in &cases {
        let f = TruthTable::new(3, 1, outputs.clone()).unwrap();
        let r = run_deutsch_jozsa(&f).unwrap();
        let steps: Vec<_> = r.steps().map(|(_, s)| s).collect();
        if steps.len() != 4 {
            return outcome(false, "trace does not have four steps");
        }
        for (step, &(sh, vn)) in steps.iter().zip(expected) {
            for q in &step.per_qubit[..3] {
                worst = worst.max((q.shannon_bits - sh).abs()).max((q.von_neumann_bits - vn).abs());
            }
        }
    }
    outcome(worst <= 1e-9, format!("max deviation {worst:.2e} (tol 1e-9)"))
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    let mut worst = 0.0f64;
    for bits in 0..256usize {
        let ones = bits.count_ones();
        if !(ones == 0 || ones == 8 || ones == 4) {
            continue;
        }
        let f = TruthTable::from_fn(3, 1, |x| (bits >> x) & 1).unwrap();
        let r = run_deutsch_jozsa(&f).unwrap();
        let p000 = r.final_step().unwrap().distribution.probabilities()[0];
        let (truth, target) = if ones == 4 { (Verdict::Balanced, 0.0) } else { (Verdict::Constant, 1.0) };
        if r.verdict != truth {
            return outcome(false, format!("table {bits:08b} misclassified"));
        }
        worst = worst.max((p000 - target).abs());
        checked += 1;
    }
    outcome(
        checked == 72 && worst <= 1e-9,
        format!("{checked} functions (2 constant + 70 balanced), max |p(000) - ideal| {worst:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let f1 = TruthTable::new(3, 3, vec![1, 7, 1, 7, 1, 7, 1, 7]).unwrap();
    let f2 = TruthTable::new(3, 3, vec![0, 2, 4, 6, 0, 2, 4, 6]).unwrap();
    let triples = |f: &TruthTable| -> Vec<(f64, f64, f64)> {
        run_shor_period(f)
            .unwrap()
            .steps()
            .map(|(_, s)| (s.subset.shannon_bits, s.subset.von_neumann_bits, s.subset.intelligence))
            .collect()
    };
    let t1 = triples(&f1);
    let want1 = [(0.0, 0.0, 1.0), (3.0, 0.0, 0.0), (3.0, 1.0, 1.0 / 3.0), (1.0, 1.0, 1.0)];
    let ok1 = t1.len() == 4
        && t1.iter().zip(&want1).all(|(a, b)| {
            close(a.0, b.0, 1e-9) && close(a.1, b.1, 1e-9) && close(a.2, b.2, 1e-9)
        });
    let t2 = triples(&f2);
    let ok2 = t2.len() == 4
        && close(t2[2].1, 2.0, 1e-9)
        && close(t2[3].0, 2.0, 1e-9)
        && t2.iter().map(|t| t.2).zip([1.0, 0.0, 2.0 / 3.0, 1.0]).all(|(a, b)| close(a, b, 1e-9));
    let mut law_cases = 0;
    let mut law_ok = true;
    for n in 1..=4usize {
        let mut r = 1usize;
        while r <= 1 << n {
            let f = TruthTable::from_fn(n, n, |x| x % r).unwrap();
            let vn = run_shor_period(&f).unwrap().trace[0].steps[2].subset.von_neumann_bits;
            law_ok &= close(vn, (r as f64).log2(), 1e-9);
            law_cases += 1;
            r *= 2;
        }
    }
    outcome(
        ok1 && ok2 && law_ok,
        format!("f1 flow {ok1}, f2 flow {ok2}, vN = log2 r on {law_cases} (n, r) pairs {law_ok}"),
    )
}

fn criterion_4() -> Outcome {
    let one = run_grover(3, "001", 1).unwrap();
    let two = run_grover(3, "001", 2).unwrap();
    let p1 = &one.final_step().unwrap().distribution;
    let p2 = &two.final_step().unwrap().distribution;
    let sh1 = shannon_full(p1, LogBase::Bits);
    let sh2 = shannon_full(p2, LogBase::Bits);
    let want_sh1 = 5.0 - 25.0 / 16.0 * 5f64.log2();
    let want_sh2 = 7.0 - 121.0 / 64.0 * 11f64.log2();
    let pass = close(p1.probabilities()[1], 25.0 / 32.0, 1e-9)
        && close(sh1, want_sh1, 1e-9)
        && close(p2.probabilities()[1], 121.0 / 128.0, 1e-9)
        && close(sh2, want_sh2, 1e-9);
    outcome(
        pass,
        format!(
            "k=1 p={:.9} H={sh1:.6}; k=2 p={:.9} H={sh2:.6} (tol 1e-9)",
            p1.probabilities()[1],
            p2.probabilities()[1]
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut n3 = AlgorithmConfig::grover(3, "001");
    n3.max_iterations = 8;
    let r3 = termination_scan(&n3).unwrap();
    let k3_ok = r3.stop_iteration == 2;
    let r2 = termination_scan(&AlgorithmConfig::grover(2, "11")).unwrap();
    let final2 = &r2.scan[r2.stop_iteration];
    let n2_ok = r2.stop_iteration == 1 && close(final2.p_marked, 1.0, 1e-12) && final2.shannon_bits.abs() < 1e-12;
    let mut argmax_ok = true;
    for n in 2..=6usize {
        let config = AlgorithmConfig::grover(n, &"1".repeat(n));
        let stop = termination_scan(&config).unwrap().stop_iteration;
        let theta = 2f64.powf(-(n as f64) / 2.0).asin();
        let law = |k: usize| ((2 * k + 1) as f64 * theta).sin().powi(2);
        let mut best = 0;
        for k in 1..=config.max_iterations {
            if law(k) > law(best) + 1e-12 {
                best = k;
            }
        }
        argmax_ok &= stop == best;
    }
    let mut short = AlgorithmConfig::grover(3, "001");
    short.max_iterations = 5;
    let k_short = termination_scan(&short).unwrap().stop_iteration;
    outcome(
        k3_ok && n2_ok && argmax_ok,
        format!(
            "n=3 horizon 8 stops at k={} (wanted 2), horizon 5 gives k={k_short}; \
             n=2 k=1 exact {n2_ok}; argmax agreement n=2..6 {argmax_ok}",
            r3.stop_iteration
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    let mut points = 0;
    for n in 1..=6usize {
        let marked: String = (0..n).map(|i| if i % 2 == 0 { '1' } else { '0' }).collect();
        let target = usize::from_str_radix(&marked, 2).unwrap();
        let theta = 2f64.powf(-(n as f64) / 2.0).asin();
        let r = run_grover(n, &marked, 20).unwrap();
        let mut p = vec![r.trace[0].steps[1].distribution.probabilities()[target]];
        p.extend(r.trace.iter().map(|t| t.steps.last().unwrap().distribution.probabilities()[target]));
        for (k, pk) in p.iter().enumerate() {
            worst = worst.max((pk - ((2 * k + 1) as f64 * theta).sin().powi(2)).abs());
            points += 1;
        }
    }
    outcome(worst <= 1e-9, format!("{points} (n, k) points, max deviation {worst:.2e} (tol 1e-9)"))
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    for bits in 0..256usize {
        let f = TruthTable::from_fn(3, 1, |x| (bits >> x) & 1).unwrap();
        let r = run_deutsch_jozsa(&f).unwrap();
        let entangled = &r.trace[0].steps[2];
        for j in 0..3usize {
            let mask = 1usize << (2 - j);
            let sum: f64 = (0..8usize)
                .filter(|x| x & mask == 0)
                .map(|x| if ((bits >> x) & 1) == ((bits >> (x | mask)) & 1) { 1.0 } else { -1.0 })
                .sum();
            let alpha = sum / 4.0;
            let expected = h2((1.0 + alpha) / 2.0);
            worst = worst.max((entangled.per_qubit[j].von_neumann_bits - expected).abs());
        }
    }
    outcome(worst <= 1e-9, format!("256 tables x 3 qubits, max deviation {worst:.2e} (tol 1e-9)"))
}

fn random_state(rng: &mut StdRng, n: usize) -> StateVector {
    let data = (0..1 << n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    StateVector::normalized(n, ComplexVector::new(data).unwrap()).unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0008);
    let mut relation_ok = true;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=4);
        let s = random_state(&mut rng, n);
        let mask = rng.gen_range(1u32..(1 << n));
        let t = QubitSubset::new((1..=n).filter(|q| mask & (1 << (q - 1)) != 0).collect()).unwrap();
        let r = entropy_record(&s, &t).unwrap();
        relation_ok &= r.shannon_bits >= r.von_neumann_bits - 1e-9;
    }
    let mut identity_worst = 0.0f64;
    let mut limit_worst = 0.0f64;
    for _ in 0..50 {
        let raw: Vec<f64> = (0..6).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let p = ProbabilityDistribution::new(raw.iter().map(|x| x / total).collect()).unwrap();
        for q in [0.5, 2.0, 3.0] {
            let t = tsallis(&p, q).unwrap();
            let r = renyi(&p, q, LogBase::Nats).unwrap();
            identity_worst = identity_worst.max((r - (1.0 + (1.0 - q) * t).ln() / (1.0 - q)).abs());
        }
        let sh = shannon_full(&p, LogBase::Nats);
        for q in [1.0 - 1e-6, 1.0 + 1e-6] {
            limit_worst = limit_worst
                .max((renyi(&p, q, LogBase::Nats).unwrap() - sh).abs())
                .max((tsallis(&p, q).unwrap() - sh).abs());
        }
    }
    outcome(
        relation_ok && identity_worst <= 1e-4 && limit_worst <= 1e-4,
        format!(
            "Sh >= vN on 1000 draws {relation_ok}; Renyi-Tsallis identity {identity_worst:.1e}; q->1 limit {limit_worst:.1e} (tol 1e-4)"
        ),
    )
}

fn criterion_9() -> Outcome {
    let zero = basis_state(1, "0").unwrap().to_density();
    let one = basis_state(1, "1").unwrap().to_density();
    let half = ProbabilityDistribution::uniform(2).unwrap();
    let same = holevo_accessible(&[zero.clone(), zero.clone()], &half).unwrap();
    let orth = holevo_accessible(&[zero, one], &half).unwrap();
    outcome(
        same.abs() <= 1e-12 && (orth - 1.0).abs() <= 1e-12,
        format!("identical {same:.1e}, orthogonal {orth:.15} (tol 1e-12)"),
    )
}

fn random_hermitian(rng: &mut StdRng, order: usize) -> ComplexMatrix {
    let mut rows = vec![vec![c(0.0, 0.0); order]; order];
    for i in 0..order {
        rows[i][i] = c(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..order {
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            rows[i][j] = z;
            rows[j][i] = z.conj();
        }
    }
    ComplexMatrix::from_rows(rows).unwrap()
}

fn criterion_10() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0010);
    let mut min_slack = f64::INFINITY;
    for draw in 0..1000 {
        let n = if draw % 2 == 0 { 1 } else { 2 };
        let s = random_state(&mut rng, n);
        let a = random_hermitian(&mut rng, 1 << n);
        let b = random_hermitian(&mut rng, 1 << n);
        let report = uncertainty_check(&ObservablePair::new(a, b, s).unwrap()).unwrap();
        min_slack = min_slack.min(report.slack());
    }
    let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
    let y = ComplexMatrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]).unwrap();
    let ket0 = basis_state(1, "0").unwrap();
    let intelligent = uncertainty_check(&ObservablePair::new(x, y, ket0).unwrap()).unwrap().is_intelligent;
    outcome(
        min_slack >= -1e-9 && intelligent,
        format!("min slack over 1000 draws {min_slack:.2e} (>= -1e-9); |0>, sx, sy intelligent {intelligent}"),
    )
}

fn criterion_11() -> Outcome {
    let mut worst = 0.0f64;
    let mut structural = true;
    let f = TruthTable::new(3, 3, vec![1, 7, 1, 7, 1, 7, 1, 7]).unwrap();
    let mut configs = vec![
        AlgorithmConfig::new(qaflow::runner::Algorithm::Shor, 3, qaflow::runner::Oracle::Table(f)),
        AlgorithmConfig::grover(4, "1010"),
    ];
    configs[1].scan = true;
    for config in &configs {
        let doc = TraceDocument::from_run(config, &run(config).unwrap());
        let back = TraceDocument::from_json(&doc.to_json().unwrap()).unwrap();
        match doc.max_numeric_diff(&back) {
            Some(d) => worst = worst.max(d),
            None => structural = false,
        }
        structural &= emit_plot_series(&doc) == emit_plot_series(&back);
    }
    let args = ["run", "grover", "--n", "4", "--marked", "1010", "--scan", "--format", "csv"];
    let first = Command::new(env!("CARGO_BIN_EXE_qaflow")).args(args).output().unwrap();
    let second = Command::new(env!("CARGO_BIN_EXE_qaflow")).args(args).output().unwrap();
    let identical = first.status.success() && !first.stdout.is_empty() && first.stdout == second.stdout;
    outcome(
        structural && worst <= 1e-12 && identical,
        format!("round-trip max diff {worst:.1e} (tol 1e-12), structure {structural}; CSV byte-identical {identical}"),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [(usize, &str, Check); 11] = [
        (1, "Deutsch-Jozsa per-qubit entropy flow", criterion_1),
        (2, "Deutsch-Jozsa verdicts over all n=3 promise functions", criterion_2),
        (3, "Shor entropy flow and vN = log2 r", criterion_3),
        (4, "Grover iteration 1 and 2 probabilities and Shannon", criterion_4),
        (5, "Grover min-Shannon termination", criterion_5),
        (6, "Grover amplitude law, n <= 6, k <= 20", criterion_6),
        (7, "post-entanglement vN equals h2((1+alpha)/2)", criterion_7),
        (8, "measure relations", criterion_8),
        (9, "Holevo endpoints", criterion_9),
        (10, "Schrodinger-Robertson suite", criterion_10),
        (11, "trace round-trip and CSV determinism", criterion_11),
    ];
    let mut out = std::io::stdout();
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        let result = check();
        let status = if result.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status} [{id:>2}] {name}: {}", result.detail);
        if !result.pass {
            failed.push(id);
        }
    }
    let _ = writeln!(
        out,
        "acceptance: {}/{} passed; failing {:?}, documented as unattainable {:?}",
        11 - failed.len(),
        11,
        failed,
        KNOWN_UNATTAINABLE
    );
    assert_eq!(failed, KNOWN_UNATTAINABLE, "unexpected acceptance result");
}
