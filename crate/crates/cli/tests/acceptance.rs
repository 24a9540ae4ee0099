//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so every line prints.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use cmdesign::design::{
    icosahedral_lines, minimize_coherence, orthonormal_columns_padded, partial_dft_frame, project_to_utf,
    random_right_orthogonal, simplex_etf,
};
use cmdesign::detect::{simulate_detection, DetectionSetup};
use cmdesign::io::write_frame_string;
use cmdesign::metrics::{
    average_min_snr, average_min_snr_closed_k2, bound_sheet, coherence, frame_potential, lemma1_bounds,
    lemma2_bound, sum_coherence, theorem3_bounds, worst_case_min_snr,
};
use cmdesign::{DesignConfig, MeasurementMatrix};
use cmdesign_cli::sweep::{db, run_sweep, DesignSource, SweepMode, SweepSpec};
use num_complex::Complex64;

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn timed<F: FnOnce() -> (bool, String)>(limit: Option<Duration>, f: F) -> (bool, String) {
    let start = Instant::now();
    let (ok, detail) = f();
    let elapsed = start.elapsed();
    let in_time = limit.map_or(true, |l| elapsed <= l);
    let limit_note = limit.map(|l| format!(" (limit {}s)", l.as_secs())).unwrap_or_default();
    (ok && in_time, format!("{detail}; {:.2}s{limit_note}", elapsed.as_secs_f64()))
}

fn utf(m: usize, n: usize, seed: u64) -> MeasurementMatrix {
    let r = project_to_utf(&random_right_orthogonal(m, n, seed).unwrap(), &DesignConfig::default()).unwrap();
    assert!(r.converged, "projection failed for ({m},{n}) seed {seed}");
    r.matrix
}

/// UTFs from the projection and every analytic constructor that applies.
fn utf_set() -> Vec<(String, MeasurementMatrix)> {
    let mut out = Vec::new();
    for (m, n) in [(2, 3), (2, 4), (3, 6), (4, 8), (8, 50)] {
        out.push((format!("projected({m},{n})"), utf(m, n, 1)));
        let rows: Vec<usize> = (0..m).collect();
        out.push((format!("dft({m},{n})"), partial_dft_frame(m, n, &rows).unwrap()));
        if n == m + 1 {
            out.push((format!("simplex({m})"), simplex_etf(m)));
        }
        if (m, n) == (3, 6) {
            out.push(("icosahedral".into(), icosahedral_lines()));
        }
    }
    out
}

/// Tight frames, uniform or not.
fn tight_set() -> Vec<MeasurementMatrix> {
    let mut out = Vec::new();
    for (i, (m, n)) in [(2, 3), (2, 5), (3, 5), (3, 7), (4, 9), (5, 8), (2, 6), (6, 12)].iter().enumerate() {
        out.push(random_right_orthogonal(*m, *n, 100 + i as u64).unwrap());
    }
    for (m, n) in [(1, 4), (2, 3), (2, 4), (3, 7), (4, 6)] {
        out.push(orthonormal_columns_padded(m, n).unwrap());
    }
    for (m, n) in [(3, 8), (4, 10)] {
        out.push(utf(m, n, 7));
    }
    out.push(partial_dft_frame(3, 7, &[1, 2, 4]).unwrap());
    out.push(partial_dft_frame(2, 5, &[0, 3]).unwrap());
    out.push(simplex_etf(4));
    out.push(icosahedral_lines());
    out.push(MeasurementMatrix::identity(3));
    assert_eq!(out.len(), 20);
    out
}

fn criterion_1() -> (bool, String) {
    timed(Some(Duration::from_secs(1)), || {
        let mut worst: f64 = 0.0;
        for (_, c) in utf_set() {
            let ratio = c.rows() as f64 / c.cols() as f64;
            worst = worst.max((worst_case_min_snr(&c, 1).unwrap().value - ratio).abs());
        }
        (worst <= 1e-9, format!("max |value - m/N| = {worst:.2e}"))
    })
}

fn criterion_2() -> (bool, String) {
    let set = utf_set();
    timed(Some(Duration::from_secs(5)), || {
        let mut worst: f64 = 0.0;
        let mut name = String::new();
        for (label, c) in &set {
            let ratio = c.rows() as f64 / c.cols() as f64;
            let want = ratio * (1.0 - coherence(c).unwrap());
            let err = (worst_case_min_snr(c, 2).unwrap().value - want).abs();
            if err >= worst {
                worst = err;
                name = label.clone();
            }
        }
        (worst <= 1e-9, format!("max |value - (m/N)(1-mu)| = {worst:.2e} at {name}"))
    })
}

fn criterion_3() -> (bool, String) {
    timed(Some(Duration::from_secs(60)), || {
        let cfg = DesignConfig::default();
        let mut cases: Vec<(usize, usize, f64)> = [(2, 3), (3, 4), (3, 6)]
            .iter()
            .map(|&(m, n)| (m, n, bound_sheet(m, n).unwrap().welch_bound))
            .collect();
        for n in [4, 5, 6] {
            cases.push((2, n, (std::f64::consts::PI / n as f64).cos()));
        }
        let mut ok = cfg.restarts <= 50;
        let mut worst: f64 = 0.0;
        for (m, n, target) in cases {
            let r = minimize_coherence(m, n, &cfg).unwrap();
            let gap = (r.achieved_objective - target).abs();
            worst = worst.max(gap);
            ok &= gap <= 1e-3 && r.converged;
        }
        (ok, format!("max |mu - target| = {worst:.2e}, restarts {}", cfg.restarts))
    })
}

fn criterion_4() -> (bool, String) {
    timed(Some(Duration::from_secs(30)), || {
        let dims = [(3, 7), (3, 10), (4, 9), (4, 12), (5, 11), (5, 16), (6, 13), (6, 16), (7, 15), (8, 16)];
        let mut ok = true;
        let mut checks = 0;
        let mut margin = f64::INFINITY;
        for (i, &(m, n)) in dims.iter().cycle().take(20).enumerate() {
            let c = utf(m, n, 200 + i as u64);
            for k in [3, 4, 5] {
                let b = theorem3_bounds(&c, k).unwrap();
                let w = worst_case_min_snr(&c, k).unwrap().value;
                ok &= b.lower - 1e-9 <= w && w <= b.upper + 1e-9;
                margin = margin.min((w - b.lower).min(b.upper - w));
                checks += 1;
            }
        }
        (ok, format!("{checks} sandwiches, smallest margin {margin:.2e}"))
    })
}

fn criterion_5() -> (bool, String) {
    let mut worst: f64 = 0.0;
    for c in tight_set() {
        let ratio = c.rows() as f64 / c.cols() as f64;
        worst = worst.max((average_min_snr(&c, 1).unwrap() - ratio).abs());
    }
    (worst <= 1e-9, format!("20 tight frames, max |avg - m/N| = {worst:.2e}"))
}

fn criterion_6() -> (bool, String) {
    let mut worst: f64 = 0.0;
    for c in tight_set() {
        worst = worst.max((average_min_snr_closed_k2(&c) - average_min_snr(&c, 2).unwrap()).abs());
    }
    (worst <= 1e-10, format!("20 tight frames, max |closed - brute| = {worst:.2e}"))
}

fn sparse_utfs() -> Vec<MeasurementMatrix> {
    let mut out = Vec::new();
    for (m, n) in [(2, 8), (3, 16), (4, 32)] {
        for seed in 0..3 {
            out.push(utf(m, n, 300 + seed));
        }
    }
    out
}

fn criterion_7a() -> (bool, String) {
    let mut ok = true;
    let mut detail = Vec::new();
    for c in sparse_utfs() {
        let b = lemma1_bounds(&c).unwrap();
        ok &= b.applicable && b.sum_coherence <= b.upper + 1e-9;
        detail.push(format!("({},{}) {:.3}<={:.3}", c.rows(), c.cols(), b.sum_coherence, b.upper));
    }
    (ok, detail.join(" "))
}

fn criterion_7b() -> (bool, String) {
    let mut worst: f64 = 0.0;
    for c in tight_set().into_iter().chain(sparse_utfs()) {
        worst = worst.max((frame_potential(&c) - c.rows() as f64).abs());
    }
    (worst <= 1e-8, format!("max |FP - m| = {worst:.2e}"))
}

fn criterion_7c() -> (bool, String) {
    let mut ok = true;
    let mut detail = Vec::new();
    for c in sparse_utfs() {
        let b = lemma1_bounds(&c).unwrap();
        let holds = b.lower <= b.sum_coherence + 1e-9;
        ok &= holds;
        if !holds {
            detail.push(format!("({},{}) lower {:.3} > {:.3}", c.rows(), c.cols(), b.lower, sum_coherence(&c)));
        }
    }
    if detail.is_empty() {
        detail.push("lower <= sum-coherence on all frames".into());
    }
    (ok, detail.join(" "))
}

fn criterion_8() -> (bool, String) {
    let mut ok = true;
    let mut margin = f64::INFINITY;
    for c in sparse_utfs() {
        for k in [2, 3, 4] {
            let avg = average_min_snr(&c, k).unwrap();
            let bound = lemma2_bound(&c, k).unwrap();
            ok &= avg >= bound - 1e-9;
            margin = margin.min(avg - bound);
        }
    }
    (ok, format!("smallest avg - bound = {margin:.3e}"))
}

fn criterion_9() -> (bool, String) {
    timed(Some(Duration::from_secs(300)), || {
        let spec = SweepSpec {
            mode: SweepMode::VaryM,
            m: None,
            n: Some(50),
            k: Some(2),
            from: 10,
            to: 40,
            step: 10,
            baseline_trials: 100,
            design_source: DesignSource::Optimize,
            import_dir: None,
            config: DesignConfig::default(),
            allow_nonconverged: false,
            budget: cmdesign::metrics::DEFAULT_BUDGET,
        };
        let rows = match run_sweep(&spec) {
            Ok(r) => r,
            Err(e) => return (false, format!("sweep failed: {}", e.message)),
        };
        let mut ok = rows.len() == 4;
        let mut parts = Vec::new();
        for r in &rows {
            let (m, n) = (r.point.m as f64, r.point.n as f64);
            let closed = (m / n) * (1.0 - r.designed_coherence);
            let welch = (m / n) * (1.0 - ((n - m) / (m * (n - 1.0))).sqrt());
            let above = r.designed > r.baseline_mean;
            let curve = (r.designed - closed).abs() <= 1e-9;
            let reference = (r.reference - welch).abs() <= 1e-12 && r.designed <= r.reference + 1e-9;
            ok &= above && curve && reference;
            parts.push(format!(
                "m={} {:.2}dB vs {:.2}dB (ref {:.2}dB)",
                r.point.m,
                db(r.designed),
                db(r.baseline_mean),
                db(r.reference)
            ));
        }
        (ok, parts.join(", "))
    })
}

fn unit(n: usize, i: usize) -> Vec<Complex64> {
    (0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()
}

fn criterion_10() -> (bool, String) {
    timed(Some(Duration::from_secs(30)), || {
        let mb = simplex_etf(2);
        let ico = icosahedral_lines();
        let qr = partial_dft_frame(3, 7, &[1, 2, 4]).unwrap();
        let u48 = utf(4, 8, 5);
        let phase: Vec<Complex64> = (0..7)
            .map(|j| Complex64::from_polar(1.0 / 7f64.sqrt(), 0.9 * j as f64))
            .collect();
        let scenarios: Vec<(&str, MeasurementMatrix, Vec<Complex64>, f64, f64)> = vec![
            ("identity(4) e0", MeasurementMatrix::identity(4), unit(4, 0), 0.05, 1.0),
            ("nullspace [I2|0] e2", orthonormal_columns_padded(2, 3).unwrap(), unit(3, 2), 0.05, 1.0),
            ("nullspace [I3|0] e4", orthonormal_columns_padded(3, 5).unwrap(), unit(5, 4), 0.2, 1.0),
            ("mercedes-benz worst k=2", mb.clone(), worst_case_min_snr(&mb, 2).unwrap().signal.embed(3), 0.1, 1.0),
            ("mercedes-benz e1", mb, unit(3, 1), 0.01, 0.5),
            ("icosahedral worst k=3", ico.clone(), worst_case_min_snr(&ico, 3).unwrap().signal.embed(6), 0.05, 1.0),
            ("qr-dft(3,7) complex", qr.clone(), phase, 0.05, 2.0),
            ("qr-dft(3,7) e3", qr, unit(7, 3), 0.3, 1.0),
            ("utf(4,8) worst k=2", u48.clone(), worst_case_min_snr(&u48, 2).unwrap().signal.embed(8), 0.05, 1.0),
            ("utf(4,8) e5", u48, unit(8, 5), 0.001, 0.25),
        ];
        let mut ok = true;
        let mut bad = Vec::new();
        for (i, (name, matrix, signal, gamma, noise)) in scenarios.into_iter().enumerate() {
            let setup = DetectionSetup {
                matrix,
                signal,
                noise_power: noise,
                false_alarm_rate: gamma,
                trials: 100_000,
                seed: 1000 + i as u64,
            };
            let r = simulate_detection(&setup).unwrap();
            let pfa_ok = (r.empirical_pfa - gamma).abs() <= 4.0 * (gamma * (1.0 - gamma) / 1e5).sqrt();
            if !(r.consistent() && pfa_ok) {
                ok = false;
                bad.push(format!("{name}: pd {} vs {}", r.empirical_pd, r.theoretical_pd));
            }
        }
        let detail = if bad.is_empty() { "10 scenarios inside the 4-sigma Wilson interval".into() } else { bad.join("; ") };
        (ok, detail)
    })
}

fn run_bin(args: &[String]) -> (i32, Vec<u8>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_cmdesign")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout, out.stderr)
}

fn criterion_11() -> (bool, String) {
    let dir = std::env::temp_dir().join(format!("cmdesign-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let frame: PathBuf = dir.join("u.txt");
    std::fs::write(&frame, write_frame_string(&utf(3, 9, 11))).unwrap();
    let f = frame.to_str().unwrap().to_string();
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let commands: Vec<Vec<String>> = vec![
        s(&["design", "--m", "3", "--N", "7", "--restarts", "4", "--seed", "5"]),
        s(&["design", "--m", "2", "--N", "5", "--target", "sum_coherence", "--seed", "2"]),
        s(&["eval", &f, "--k", "1,2,3"]),
        s(&["eval", &f, "--k", "4", "--budget", "20", "--sample", "64", "--seed", "3"]),
        s(&["sweep", "--mode", "vary_m", "--N", "9", "--k", "2", "--from", "3", "--to", "6", "--step", "3",
            "--baseline-trials", "10", "--restarts", "2", "--seed", "8"]),
        s(&["detect", &f, "--gamma", "0.01,0.05,0.2", "--worst-signal", "2", "--trials", "30000", "--seed", "4"]),
        s(&["bounds", "--m", "4", "--N", "7"]),
    ];
    let mut ok = true;
    let mut failures = Vec::new();
    for cmd in &commands {
        let mut runs = Vec::new();
        for threads in ["1", "1", "4"] {
            let mut args = cmd.clone();
            args.extend(["--threads".to_string(), threads.to_string()]);
            runs.push(run_bin(&args));
        }
        let same = runs.iter().all(|r| r == &runs[0]) && runs[0].0 == 0 && !runs[0].1.is_empty();
        if !same {
            ok = false;
            failures.push(cmd[0].clone());
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    let detail = if failures.is_empty() {
        format!("{} commands byte-identical across reruns and --threads 1/4", commands.len())
    } else {
        format!("differing output: {}", failures.join(", "))
    };
    (ok, detail)
}

fn main() {
    let criteria: Vec<(&'static str, &'static str, fn() -> (bool, String))> = vec![
        ("1", "k=1 worst case equals m/N on uniform tight frames", criterion_1),
        ("2", "k=2 worst case equals (m/N)(1-mu)", criterion_2),
        ("3", "optimizer reaches Welch / cos(pi/N)", criterion_3),
        ("4", "k-sparse worst case inside theorem3_bounds", criterion_4),
        ("5", "k=1 average equals m/N on tight frames", criterion_5),
        ("6", "closed-form k=2 average equals enumeration", criterion_6),
        ("7a", "sum-coherence below lemma1 upper bound", criterion_7a),
        ("7b", "frame potential equals m on tight frames", criterion_7b),
        ("7c", "sum-coherence above lemma1 lower bound", criterion_7c),
        ("8", "k-sparse average above lemma2_bound", criterion_8),
        ("9", "designed beats random baseline at N=50, k=2", criterion_9),
        ("10", "Monte Carlo detection matches theory", criterion_10),
        ("11", "CLI output is deterministic", criterion_11),
    ];
    let mut outcomes = Vec::new();
    for (id, title, f) in criteria {
        let (pass, detail) = f();
        let o = Outcome { id, title, pass, detail };
        println!("criterion {:<3} {}: {} ({})", o.id, if o.pass { "PASS" } else { "FAIL" }, o.title, o.detail);
        outcomes.push(o);
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!(
        "acceptance: {} of {} criteria passed{}",
        outcomes.len() - failed.len(),
        outcomes.len(),
        if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
