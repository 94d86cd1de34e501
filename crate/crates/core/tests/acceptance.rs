//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use pqc::channel::{ChannelEnsemble, KrausChannel};
use pqc::cli::{cmd_sweep, compute_sweep, VALIDATE_TOL};
use pqc::config::LoadedConfig;
use pqc::linalg::{haar_random_pure_state, haar_random_unitary, sample_pure_state, ComplexMatrix, DensityMatrix};
use pqc::metrics::{trace_distance, CostLandscape, ExtensionIndex};
use pqc::minmax::cnot_mixture_family;
use pqc::noise::{
    amplitude_damping_kraus, build_cnot_variant, depolarizing_kraus, ideal_cnot_channel, noise_layer,
    single_qubit_noise, GateVariant, NoiseSpec,
};
use pqc::rng::stream_rng;
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

/// Full-rank mixed state: random convex combination of Haar pure states.
fn random_density(dim: usize, seed: u64) -> DensityMatrix {
    let mut rng = stream_rng(seed, 77);
    let weights: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (k, w) in weights.iter().enumerate() {
        let psi = haar_random_pure_state(dim, seed.wrapping_mul(1000).wrapping_add(k as u64)).unwrap();
        m = &m + &psi.to_density().matrix().scale_real(w / total);
    }
    DensityMatrix::new(m).unwrap()
}

fn channel_action_gap(a: &KrausChannel, apply_b: impl Fn(&DensityMatrix) -> DensityMatrix, seed: u64) -> f64 {
    (0..20)
        .map(|i| {
            let rho = random_density(a.dim(), seed + i);
            a.apply(&rho).unwrap().matrix().max_abs_diff(apply_b(&rho).matrix())
        })
        .fold(0.0, f64::max)
}

fn cptp_suite() -> Outcome {
    let spec = NoiseSpec::table1();
    let mut chans: Vec<(String, KrausChannel)> = Vec::new();
    for (i, q) in spec.qubits().iter().enumerate() {
        chans.push((format!("depol q{i}"), depolarizing_kraus(q.depolarizing).unwrap()));
        chans.push((format!("damp q{i}"), amplitude_damping_kraus(q.amplitude_damping).unwrap()));
        chans.push((format!("noise q{i}"), single_qubit_noise(*q, spec.order()).unwrap()));
    }
    chans.push(("layer".into(), noise_layer(&spec).unwrap()));
    for v in GateVariant::ALL {
        chans.push((format!("{v:?}"), build_cnot_variant(v, &spec).unwrap()));
    }
    let pc = cnot_mixture_family(&spec).unwrap();
    for i in 0..=100 {
        let w = i as f64 / 100.0;
        chans.push((format!("mixture {w}"), pc.build(&[w]).unwrap()));
    }
    let mut worst_tp: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    let mut failed = Vec::new();
    for (name, ch) in &chans {
        let r = ch.validate_cptp(VALIDATE_TOL);
        worst_tp = worst_tp.max(r.tp_residual);
        min_eig = min_eig.min(r.choi_min_eigenvalue);
        if !r.passed {
            failed.push(name.clone());
        }
    }
    outcome(
        failed.is_empty(),
        format!("{} channels, max |ΣK†K − I| = {worst_tp:.2e}, min Choi eigenvalue = {min_eig:.2e}, failed {failed:?}", chans.len()),
    )
}

fn noiseless_degeneracy() -> Outcome {
    let spec = NoiseSpec::noiseless(2);
    let ideal = ideal_cnot_channel().choi();
    let choi_gap = GateVariant::ALL
        .iter()
        .map(|&v| build_cnot_variant(v, &spec).unwrap().choi().frobenius_distance(&ideal))
        .fold(0.0, f64::max);
    let cfg = LoadedConfig::load(&configs().join("noiseless.json")).unwrap();
    let out = compute_sweep(&cfg, Some(101)).unwrap();
    let worst = out.curve.worst_cost.iter().copied().fold(0.0, f64::max);
    outcome(
        choi_gap <= 1e-10 && worst <= 1e-8,
        format!("max Choi distance {choi_gap:.2e} (<= 1e-10), max worst-case cost over 101 points {worst:.2e} (<= 1e-8)"),
    )
}

struct Sweep {
    grid: Vec<f64>,
    worst: Vec<f64>,
    mean: Vec<f64>,
    csv: Vec<u8>,
    summary: pqc::cli::SweepSummary,
    elapsed: Duration,
}

fn run_table1_sweep(dir: &Path, tag: &str) -> Sweep {
    let cfg = LoadedConfig::load(&configs().join("table1.json")).unwrap();
    let csv_path = dir.join(format!("{tag}.csv"));
    let t = Instant::now();
    let summary = cmd_sweep(&cfg, Some(101), &csv_path, &dir.join(format!("{tag}.json"))).unwrap();
    let elapsed = t.elapsed();
    let csv = std::fs::read(&csv_path).unwrap();
    let text = String::from_utf8(csv.clone()).unwrap();
    let rows: Vec<Vec<f64>> = text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    Sweep {
        grid: rows.iter().map(|r| r[0]).collect(),
        worst: rows.iter().map(|r| r[1]).collect(),
        mean: rows.iter().map(|r| r[2]).collect(),
        csv,
        summary,
        elapsed,
    }
}

fn mixture_gain(s: &Sweep) -> Outcome {
    let i = s.summary.argmin_index;
    let last = s.worst.len() - 1;
    let ends = s.worst[0].min(s.worst[last]);
    let interior = i != 0 && i != last;
    let gain = ends - s.worst[i];
    outcome(
        interior && gain > 1e-6 && s.elapsed < Duration::from_secs(120),
        format!(
            "w1* = {:.2}, C(w1*) = {:.6}, C(0) = {:.6}, C(1) = {:.6}, gain {gain:.3e} (> 1e-6), sweep took {:.1?} (< 120 s)",
            s.grid[i], s.worst[i], s.worst[0], s.worst[last], s.elapsed
        ),
    )
}

fn extension_claim(s: &Sweep) -> Outcome {
    let base = s.summary.per_m.iter().find(|e| e.extension.get() == 1).expect("m = 1 reported").cost;
    let mut excess: f64 = f64::NEG_INFINITY;
    let mut parts = vec![format!("m=1: {base:.6}")];
    for m in [2, 4] {
        let e = s.summary.per_m.iter().find(|e| e.extension.get() == m).expect("m reported");
        excess = excess.max(e.cost - base);
        parts.push(format!("m={m}: {:.6}", e.cost));
    }
    outcome(
        excess <= 1e-6,
        format!("at w1* = {:.2}: {}; max excess over m=1 {excess:.3e} (<= 1e-6)", s.summary.w1_star, parts.join(", ")),
    )
}

fn worst_case_certification(s: &Sweep) -> Outcome {
    const SAMPLES: usize = 100_000;
    let spec = NoiseSpec::table1();
    let pc = cnot_mixture_family(&spec).unwrap();
    let target = ideal_cnot_channel();
    let mut min_margin = f64::INFINITY;
    let mut route_gap: f64 = 0.0;
    for (i, (&w, &ascent)) in s.grid.iter().zip(&s.worst).enumerate() {
        let cand = pc.build(&[w]).unwrap();
        let land = CostLandscape::new(&target, &cand, ExtensionIndex::NONE).unwrap();
        let mut rng = stream_rng(0x5EED_0000 + i as u64, 3);
        let mut best: f64 = 0.0;
        for k in 0..SAMPLES {
            let eta = sample_pure_state(4, &mut rng);
            let c = land.cost_at_state(&eta).unwrap();
            best = best.max(c);
            if k < 5 {
                // direct route: apply both channels and take the trace distance
                let rho = eta.to_density();
                let direct = trace_distance(&target.apply(&rho).unwrap(), &cand.apply(&rho).unwrap()).unwrap();
                route_gap = route_gap.max((direct - c).abs());
            }
        }
        min_margin = min_margin.min(ascent - best);
    }
    outcome(
        min_margin >= -1e-4 && route_gap <= 1e-12,
        format!(
            "min over 101 points of (ascent − max over 1e5 Haar inputs) = {min_margin:.3e} (>= -1e-4); oracle route agreement {route_gap:.1e}"
        ),
    )
}

fn property_suites(s: &Sweep) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    let mut worst_axiom: f64 = 0.0;
    let mut triangle_ok = true;
    for i in 0..100 {
        let (a, b, c) = (random_density(4, 3 * i), random_density(4, 3 * i + 1), random_density(4, 3 * i + 2));
        let (ab, ba, bc, ac) = (
            trace_distance(&a, &b).unwrap(),
            trace_distance(&b, &a).unwrap(),
            trace_distance(&b, &c).unwrap(),
            trace_distance(&a, &c).unwrap(),
        );
        worst_axiom = worst_axiom.max(trace_distance(&a, &a).unwrap().abs()).max((ab - ba).abs());
        triangle_ok &= ac <= ab + bc + 1e-12 && (0.0..=1.0 + 1e-12).contains(&ab);
    }
    ok &= triangle_ok && worst_axiom <= 1e-12;
    notes.push(format!("metric axioms {}", if triangle_ok && worst_axiom <= 1e-12 { "ok" } else { "FAILED" }));

    let mut contraction: f64 = f64::NEG_INFINITY;
    for i in 0..50 {
        let ch = KrausChannel::random(4, 1 + (i as usize % 5), 500 + i).unwrap();
        let (a, b) = (random_density(4, 900 + 2 * i), random_density(4, 901 + 2 * i));
        let before = trace_distance(&a, &b).unwrap();
        let after = trace_distance(&ch.apply(&a).unwrap(), &ch.apply(&b).unwrap()).unwrap();
        contraction = contraction.max(after - before);
    }
    ok &= contraction <= 1e-12;
    notes.push(format!("contractivity max increase {contraction:.1e}"));

    let mean_gap = s.worst.iter().zip(&s.mean).map(|(w, m)| m - w).fold(f64::NEG_INFINITY, f64::max);
    ok &= mean_gap <= 1e-9;
    notes.push(format!("max (mean − worst) {mean_gap:.1e}"));

    let mut stine_gap: f64 = 0.0;
    let mut choi_gap: f64 = 0.0;
    for i in 0..5 {
        let ch = KrausChannel::random(4, 2 + i as usize, 40 + i).unwrap();
        let st = ch.to_stinespring().unwrap();
        let back = st.to_kraus();
        stine_gap = stine_gap
            .max(channel_action_gap(&ch, |r| back.apply(r).unwrap(), 10 * i))
            .max(channel_action_gap(&ch, |r| st.apply(r).unwrap(), 10 * i));
        let from_choi = KrausChannel::from_choi(&ch.choi(), 1e-10).unwrap();
        choi_gap = choi_gap.max(channel_action_gap(&ch, |r| from_choi.apply(r).unwrap(), 10 * i + 5));
    }
    ok &= stine_gap <= 1e-10 && choi_gap <= 1e-10;
    notes.push(format!("Stinespring round trip {stine_gap:.1e}, Choi round trip {choi_gap:.1e}"));

    let mut gauge_gap: f64 = 0.0;
    for i in 0..10 {
        let n = 3;
        let ch = KrausChannel::random(4, n, 70 + i).unwrap();
        let u = haar_random_unitary(n, 80 + i).unwrap();
        let mixed: Vec<ComplexMatrix> = (0..n)
            .map(|a| {
                (0..n).fold(ComplexMatrix::zeros(4, 4), |acc, b| {
                    let mut term = ch.operators()[b].clone();
                    term = term.scale(u[(a, b)]);
                    &acc + &term
                })
            })
            .collect();
        let w1 = ch.canonicalize().kraus_weights();
        let w2 = KrausChannel::new(mixed).unwrap().canonicalize().kraus_weights();
        let gap = if w1.len() == w2.len() {
            w1.iter().zip(&w2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        gauge_gap = gauge_gap.max(gap);
    }
    ok &= gauge_gap <= 1e-10;
    notes.push(format!("gauge invariance of canonical weights {gauge_gap:.1e}"));

    outcome(ok, notes.join("; "))
}

fn ensemble_convergence() -> Outcome {
    let unitaries: Vec<KrausChannel> =
        (0..4).map(|i| KrausChannel::unitary(haar_random_unitary(4, 300 + i).unwrap()).unwrap()).collect();
    let weights = [0.4, 0.3, 0.2, 0.1];
    let ens = ChannelEnsemble::new(weights.iter().copied().zip(unitaries).collect()).unwrap();
    let rho = random_density(4, 12345);
    let exact = ens.apply_exact(&rho).unwrap();
    let avg_dev = |m: usize| -> f64 {
        (0..50u64)
            .map(|seed| trace_distance(&ens.apply_sampled(&rho, m, seed).unwrap(), &exact).unwrap())
            .sum::<f64>()
            / 50.0
    };
    let (d100, d10k) = (avg_dev(100), avg_dev(10_000));
    let ratio = d100 / d10k;
    outcome(
        (5.0..=20.0).contains(&ratio),
        format!("mean deviation M=100: {d100:.4e}, M=10000: {d10k:.4e}, ratio {ratio:.2} (in [5, 20])"),
    )
}

fn determinism(a: &Sweep, b: &Sweep) -> Outcome {
    let same = a.csv == b.csv;
    outcome(same, format!("two cmd_sweep runs, {} bytes each, identical: {same}", a.csv.len()))
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |n: u32, name: &'static str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        println!(
            "criterion {n} [{}] {name}: {} ({:.1?})",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed()
        );
        results.push((n, name, o));
    };

    report(1, "CPTP validation", &|| {
        let t = Instant::now();
        let o = cptp_suite();
        let elapsed = t.elapsed();
        outcome(o.passed && elapsed < Duration::from_secs(1), format!("{}, {elapsed:.2?} (< 1 s)", o.detail))
    });
    report(2, "noiseless degeneracy", &|| {
        let t = Instant::now();
        let o = noiseless_degeneracy();
        let elapsed = t.elapsed();
        outcome(o.passed && elapsed < Duration::from_secs(10), format!("{}, {elapsed:.1?} (< 10 s)", o.detail))
    });
    let first = run_table1_sweep(dir.path(), "first");
    report(3, "asymmetric-noise mixture gain", &|| mixture_gain(&first));
    report(4, "extension costs not above m = 1", &|| extension_claim(&first));
    report(5, "worst-case certification", &|| worst_case_certification(&first));
    report(6, "metric and representation properties", &|| property_suites(&first));
    report(7, "Monte-Carlo ensemble convergence", &|| ensemble_convergence());
    let second = run_table1_sweep(dir.path(), "second");
    report(8, "sweep determinism", &|| determinism(&first, &second));

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.passed).map(|r| r.0).collect();
    println!("acceptance: {} of {} criteria passed", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
