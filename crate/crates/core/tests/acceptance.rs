//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are reported as FAIL without failing
//! the run; any other failure makes the process exit non-zero.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use warpbench::bench::{self, BandPolicy, ClassificationSuiteConfig, ExperimentReport, SuiteConfig, Weighting};
use warpbench::dtw::{AlignSpec, BandConstraint, Variant};
use warpbench::fitter::{self, FitReport, PeakRecord, SAParams, ScalingRecord, VariationProfile};
use warpbench::search::{self, Polyline3};
use warpbench::synthesis::{
    apply_step, compose_variation, generate_signal, scale_window_length_preserving, GeneratorSpec, GroundTruthMapping,
    VariationClass, VariationParams,
};
use warpbench::weightopt::WeightSearchConfig;
use warpbench::{metrics, seed, Series};

const KNOWN_FAILURES: &[u32] = &[7, 8];
const SEEDS: std::ops::Range<u64> = 0..10;

struct Outcome {
    id: u32,
    pass: bool,
}

fn report(id: u32, name: &str, pass: bool, detail: String) -> Outcome {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id:>2}: {name}: {detail}");
    Outcome { id, pass }
}

fn s(v: Vec<f64>) -> Series {
    Series::new(v).unwrap()
}

/// Exhaustive minimum over all monotone paths from (0,0) to (m-1,n-1). Each
/// path is summed from its last cell backwards, matching the order in which
/// the kernel accumulates, so floating-point results are comparable exactly.
fn enumerate_paths(a: &[f64], b: &[f64]) -> f64 {
    fn paths(
        m: usize,
        n: usize,
        i: usize,
        j: usize,
        prefix: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        prefix.push((i, j));
        if (i + 1, j + 1) == (m, n) {
            out.push(prefix.clone());
        }
        for (di, dj) in [(1, 0), (0, 1), (1, 1)] {
            if i + di < m && j + dj < n {
                paths(m, n, i + di, j + dj, prefix, out);
            }
        }
        prefix.pop();
    }
    let mut all = Vec::new();
    paths(a.len(), b.len(), 0, 0, &mut Vec::new(), &mut all);
    all.iter().map(|p| p.iter().rev().fold(0.0, |acc, &(i, j)| (a[i] - b[j]).abs() + acc)).fold(f64::INFINITY, f64::min)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = seed::rng(0xACCE);
    let mut mismatches = 0;
    for _ in 0..500 {
        let (m, n) = (rng.gen_range(2..=7), rng.gen_range(2..=7));
        let a: Vec<f64> = (0..m).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let cost = AlignSpec::new(Variant::Dtw).distance(&s(a.clone()), &s(b.clone())).unwrap();
        if cost != enumerate_paths(&a, &b) {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        1,
        "DTW cost equals exhaustive path enumeration",
        mismatches == 0 && elapsed < Duration::from_secs(10),
        format!("500 pairs, lengths 2..=7, tolerance 0, mismatches {mismatches}; runtime {elapsed:.2?} (limit 10 s)"),
    )
}

/// Linear interpolation of `m` at fractional position `p`.
fn lerp(m: &GroundTruthMapping, p: f64) -> f64 {
    let k = (p.floor() as usize).min(m.src_pos.len() - 1);
    let f = p - k as f64;
    if f == 0.0 {
        m.src_pos[k]
    } else {
        m.src_pos[k] * (1.0 - f) + m.src_pos[k + 1] * f
    }
}

fn criterion_2() -> Outcome {
    let mut rng = seed::rng(0xACCF);
    let mut length_failures = 0;
    for _ in 0..1000 {
        let len = rng.gen_range(20..400);
        let x = s((0..len).map(|_| rng.gen_range(0.0..100.0)).collect());
        let w = rng.gen_range(2..len / 3);
        let w0 = rng.gen_range(0..len - w);
        let sc = rng.gen_range(0.5..1.5);
        let (y, gt) = scale_window_length_preserving(&x, w0, w0 + w, sc).unwrap();
        if y.len() != len || gt.tgt_len() != len {
            length_failures += 1;
        }
    }

    let mut worst: f64 = 0.0;
    let mut value_mismatches = 0;
    for k in 0..200u64 {
        let x =
            generate_signal(&GeneratorSpec { length: 300, seed: seed::derive(k, &[0]), ..Default::default() }).unwrap();
        let pair =
            compose_variation(&x, VariationClass::ScaledMrgp, &VariationParams::default(), seed::derive(k, &[1]))
                .unwrap();
        let mut current = x.clone();
        let mut chain: Option<GroundTruthMapping> = None;
        for step in &pair.plan.steps {
            let (next, m) = apply_step(&current, step).unwrap();
            chain = Some(match chain {
                None => m,
                Some(prev) => GroundTruthMapping {
                    src_pos: m.src_pos.iter().map(|&p| lerp(&prev, p)).collect(),
                    src_len: prev.src_len,
                },
            });
            current = next;
        }
        let chain = chain.unwrap();
        if current.values() != pair.target.values() {
            value_mismatches += 1;
        }
        for (a, b) in chain.src_pos.iter().zip(&pair.ground_truth.src_pos) {
            worst = worst.max((a - b).abs());
        }
        if chain.src_pos.len() != pair.ground_truth.src_pos.len() {
            worst = f64::INFINITY;
        }
    }
    report(
        2,
        "deformation mappings",
        length_failures == 0 && worst <= 1e-9 && value_mismatches == 0,
        format!(
            "length-preserving scaling changed length in {length_failures}/1000 draws (tolerance 0); \
             composed vs sequential ground truth max deviation {worst:.3e} over 200 plans (tolerance 1e-9); \
             target mismatches {value_mismatches}"
        ),
    )
}

struct RoundTrip {
    report: FitReport,
    converged: bool,
    within_budget: bool,
    fitted_profile: VariationProfile,
    plan_profile: VariationProfile,
    elapsed: Duration,
}

fn round_trips() -> Vec<RoundTrip> {
    (0..20u64)
        .map(|k| {
            let x = generate_signal(&GeneratorSpec { length: 300, seed: seed::derive(k, &[0]), ..Default::default() })
                .unwrap();
            let pair =
                compose_variation(&x, VariationClass::ScaledRgp, &VariationParams::default(), seed::derive(k, &[1]))
                    .unwrap();
            let start = Instant::now();
            let (report, fitted) =
                fitter::fit(&x, &pair.target, 1.0, &SAParams { seed: k, ..Default::default() }).unwrap();
            let elapsed = start.elapsed();
            let distance = metrics::euclidean(&fitted, &pair.target).unwrap();
            let t = fitter::threshold(&pair.target, 1.0);
            RoundTrip {
                converged: distance < t,
                within_budget: report.peaks.len() <= 150,
                fitted_profile: fitter::quantify_effects(&report, &pair.target).unwrap(),
                plan_profile: fitter::plan_effects(&pair.plan, x.len(), &pair.target).unwrap(),
                report,
                elapsed,
            }
        })
        .collect()
}

fn criterion_3(runs: &[RoundTrip]) -> Outcome {
    let ok = runs.iter().filter(|r| r.converged && r.within_budget).count();
    let slowest = runs.iter().map(|r| r.elapsed).max().unwrap();
    let peaks = runs.iter().map(|r| r.report.peaks.len()).max().unwrap();
    report(
        3,
        "round-trip fit of ScaledRGP pairs",
        ok * 10 >= runs.len() * 9 && slowest < Duration::from_secs(120),
        format!(
            "{ok}/{} fits reach euclidean < T (x = 1) with <= 150 peaks (need >= 90%); \
             most peaks {peaks}; slowest fit {slowest:.2?} (limit 2 min)",
            runs.len()
        ),
    )
}

fn mean_of(r: &ExperimentReport, class: VariationClass, variant: Variant, weighting: Weighting) -> (f64, f64) {
    let a = r
        .aggregates
        .iter()
        .find(|a| (a.variation, a.variant, a.weighting, a.banded) == (class, variant, weighting, false))
        .unwrap_or_else(|| panic!("no aggregate for {class} {variant} {weighting:?}"));
    (a.mean_adm, a.mean_adt)
}

const WEIGHT_SAMPLES: usize = 20;

fn alignment_reports() -> (Vec<ExperimentReport>, Duration) {
    let start = Instant::now();
    let reports = SEEDS
        .map(|seed| {
            let cfg = SuiteConfig {
                pairs: 50,
                weight_search: WeightSearchConfig { k: WEIGHT_SAMPLES, ..Default::default() },
                fixed_g: Some(0.4),
                generator: GeneratorSpec { length: 500, ..Default::default() },
                seed,
                ..Default::default()
            };
            bench::run_alignment_suite(&cfg).unwrap()
        })
        .collect();
    (reports, start.elapsed())
}

fn criterion_4(reports: &[ExperimentReport], elapsed: Duration) -> Outcome {
    use Variant::*;
    use VariationClass::*;
    use Weighting::{Fixed, Optimized};
    let adt = |r, c, v, w| mean_of(r, c, v, w).1;
    let mut counts = [0usize; 4];
    for r in reports {
        let random = adt(r, Scaled, Wdtw, Fixed);
        counts[0] += usize::from(
            adt(r, Scaled, Dtw, Weighting::None) < random && adt(r, Scaled, Ddtw, Weighting::None) < random,
        );
        counts[1] += usize::from([Rgp, Mrgp].iter().all(|&c| {
            let dtw = adt(r, c, Dtw, Weighting::None);
            adt(r, c, Wdtw, Optimized) < dtw && adt(r, c, Wddtw, Optimized) < dtw
        }));
        counts[2] += usize::from(adt(r, ScaledMrgp, Wddtw, Optimized) < adt(r, ScaledMrgp, Dtw, Weighting::None));
        counts[3] += usize::from(VariationClass::ALL.iter().all(|&c| {
            let dtw = mean_of(r, c, Dtw, Weighting::None).0;
            r.aggregates.iter().filter(|a| a.variation == c).all(|a| dtw <= a.mean_adm)
        }));
    }
    let first = &reports[0];
    println!(
        "    seed 0 mean ADT: Scaled DTW {:.1} DDTW {:.1} WDTW(g=0.4) {:.1}; RGP DTW {:.1} WDTW* {:.1} WDDTW* {:.1}; \
         MRGP DTW {:.1} WDTW* {:.1} WDDTW* {:.1}; ScaledMRGP DTW {:.1} WDDTW* {:.1}",
        adt(first, Scaled, Dtw, Weighting::None),
        adt(first, Scaled, Ddtw, Weighting::None),
        adt(first, Scaled, Wdtw, Fixed),
        adt(first, Rgp, Dtw, Weighting::None),
        adt(first, Rgp, Wdtw, Optimized),
        adt(first, Rgp, Wddtw, Optimized),
        adt(first, Mrgp, Dtw, Weighting::None),
        adt(first, Mrgp, Wdtw, Optimized),
        adt(first, Mrgp, Wddtw, Optimized),
        adt(first, ScaledMrgp, Dtw, Weighting::None),
        adt(first, ScaledMrgp, Wddtw, Optimized),
    );
    report(
        4,
        "alignment orderings (length 500, 50 pairs/class, seeds 0-9)",
        counts.iter().all(|&c| c >= 8) && elapsed < Duration::from_secs(15 * 60),
        format!(
            "(a) {}/10 (b) {}/10 (c) {}/10 (d) {}/10 seeds (need >= 8 each); K = {WEIGHT_SAMPLES}; runtime {elapsed:.1?} (limit 15 min)",
            counts[0], counts[1], counts[2], counts[3]
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut improved = 0;
    let mut summary = Vec::new();
    let mut exact_checked = 0;
    let mut exact_failures = 0;
    for seed in SEEDS {
        let cfg = SuiteConfig {
            pairs: 50,
            classes: vec![VariationClass::Rgp],
            variants: vec![Variant::Dtw],
            fixed_g: None,
            band: BandPolicy::Oracle { slack: 2 },
            seed,
            ..Default::default()
        };
        let w = bench::run_windowing_suite(&cfg).unwrap();
        let delta = w.deltas[0].mean_adt_delta;
        improved += usize::from(delta < 0.0);
        summary.push(format!("{delta:.1}"));

        for pair in bench::make_batch(&cfg, VariationClass::Rgp).unwrap() {
            let spec = AlignSpec::new(Variant::Dtw);
            let free = spec.align(&pair.reference, &pair.target).unwrap();
            let (m, n) = (pair.reference.len(), pair.target.len());
            let slope = (m as f64 - 1.0) / (n as f64 - 1.0);
            let displacement = free.path.iter().map(|&(i, j)| (i as f64 - j as f64 * slope).abs()).fold(0.0, f64::max);
            let banded = spec
                .with_band(Some(BandConstraint::new(displacement.ceil() as usize)))
                .align(&pair.reference, &pair.target)
                .unwrap();
            exact_checked += 1;
            if banded.path != free.path || banded.cost.to_bits() != free.cost.to_bits() {
                exact_failures += 1;
            }
        }
    }
    report(
        5,
        "oracle band on unshifted RGP pairs",
        improved >= 8 && exact_failures == 0,
        format!(
            "banded DTW mean ADT below unbanded in {improved}/10 seeds (need >= 8; slack 2; deltas [{}]); \
             band >= path displacement reproduces unbanded path and cost bit-for-bit in {}/{exact_checked} pairs",
            summary.join(", "),
            exact_checked - exact_failures
        ),
    )
}

fn criterion_6(reports: &[ExperimentReport]) -> Outcome {
    let mut held = 0;
    let mut argmin_violations = 0;
    for r in reports {
        let opt = mean_of(r, VariationClass::Scaled, Variant::Wdtw, Weighting::Optimized).0;
        let random = mean_of(r, VariationClass::Scaled, Variant::Wdtw, Weighting::Fixed).0;
        held += usize::from(opt <= random);
        let search = r
            .weight_searches
            .iter()
            .find(|b| b.variation == VariationClass::Scaled && b.result.variant == Variant::Wdtw)
            .unwrap();
        argmin_violations += search.result.samples.iter().filter(|&&(_, v)| v < search.result.value).count();
    }
    report(
        6,
        "optimised g never loses to random g on Scaled WDTW ADM",
        held == reports.len() && argmin_violations == 0,
        format!(
            "optimised <= g = 0.4 in {held}/{} seeds (need all); sampled candidates beating the chosen g: {argmin_violations}",
            reports.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut held = 0;
    let mut sums = [0.0; 4];
    for seed in SEEDS {
        let mut cfg = ClassificationSuiteConfig::default();
        cfg.dataset.seed = seed;
        let r = bench::run_classification_suite(&cfg).unwrap();
        let [dtw, ddtw, wdtw, wddtw] =
            [Variant::Dtw, Variant::Ddtw, Variant::Wdtw, Variant::Wddtw].map(|v| r.accuracy(v).unwrap());
        held += usize::from(dtw >= wdtw && dtw >= wddtw && wdtw >= ddtw && wddtw >= ddtw);
        for (s, a) in sums.iter_mut().zip([dtw, wdtw, wddtw, ddtw]) {
            *s += a;
        }
    }
    let means = sums.map(|s| s / SEEDS.count() as f64 * 100.0);
    let reference_accuracy = [86.0, 73.0, 73.0, 55.0];
    let close = means.iter().zip(reference_accuracy).all(|(m, p)| (m - p).abs() <= 15.0);
    report(
        7,
        "1-NN accuracy ordering DTW >= WDTW, WDDTW >= DDTW",
        held * 2 > SEEDS.count(),
        format!(
            "ordering held in {held}/10 seeds (need a majority); mean accuracy DTW {:.1} WDTW {:.1} WDDTW {:.1} DDTW {:.1} \
             (reference 86/73/73/55, within 15 points: {close}, not gated); runtime {:.1?}",
            means[0],
            means[1],
            means[2],
            means[3],
            start.elapsed()
        ),
    )
}

fn ramp(len: usize, amplitude: f64) -> Series {
    s((0..len).map(|j| j as f64 * amplitude / (len - 1) as f64).collect())
}

fn fit_report(peaks: Vec<PeakRecord>, scaling: ScalingRecord) -> FitReport {
    FitReport { scaling, peaks, distance: 0.0, threshold: 1.0, converged: true, seed: 0, iterations: 0 }
}

fn criterion_8(runs: &[RoundTrip]) -> Outcome {
    let none = ScalingRecord { loc: 0, w: 100, s: 1.0 };
    let target = ramp(200, 100.0);
    let peak = |mag| {
        fitter::quantify_effects(&fit_report(vec![PeakRecord { loc: 50, width: 20, mag }], none), &target).unwrap()
    };
    let one = peak(10.0);
    let five = peak(-50.0);
    let below = peak(49.0);
    let grown =
        fitter::quantify_effects(&fit_report(vec![], ScalingRecord { loc: 0, w: 100, s: 1.1 }), &ramp(210, 100.0))
            .unwrap();
    let shrunk =
        fitter::quantify_effects(&fit_report(vec![], ScalingRecord { loc: 0, w: 100, s: 0.91 }), &ramp(191, 100.0))
            .unwrap();
    let worked = one.peak_effect == 1.0
        && !one.significant_peaks
        && five.peak_effect == 5.0
        && five.significant_peaks
        && !below.significant_peaks
        && (grown.scaling_effect - 5.0).abs() <= 1e-12
        && grown.significant_scaling
        && !shrunk.significant_scaling;

    let agree = runs
        .iter()
        .filter(|r| {
            r.fitted_profile.significant_peaks == r.plan_profile.significant_peaks
                && r.fitted_profile.significant_scaling == r.plan_profile.significant_scaling
        })
        .count();
    let scaling_agree =
        runs.iter().filter(|r| r.fitted_profile.significant_scaling == r.plan_profile.significant_scaling).count();
    report(
        8,
        "effect quantification",
        worked && agree * 10 >= runs.len() * 9,
        format!(
            "worked cases (1% peak exact, 5% boundaries exact, scaling within 1e-12): {worked}; \
             round-trip flags match the generating plan in {agree}/{} runs (need >= 90%; scaling flag alone {scaling_agree}/{})",
            runs.len(),
            runs.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    use std::f64::consts::PI;
    let rel = |v: f64, e: f64| (v - e).abs() / e.abs();
    let (r, c) = (3.0, 1.0);
    let circle = Polyline3::new(
        (0..200)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 200.0;
                [r * t.cos(), r * t.sin(), 0.0]
            })
            .collect(),
    )
    .unwrap();
    let helix = Polyline3::new(
        (0..200)
            .map(|k| {
                let t = 6.0 * PI * k as f64 / 200.0;
                [r * t.cos(), r * t.sin(), c * t]
            })
            .collect(),
    )
    .unwrap();
    let pc = search::curvature_torsion(&circle).unwrap();
    let ph = search::curvature_torsion(&helix).unwrap();
    let circle_k = pc.curvature.values().iter().map(|&k| rel(k, 1.0 / r)).fold(0.0, f64::max);
    let circle_t = pc.torsion.values().iter().map(|t| t.abs()).fold(0.0, f64::max);
    let denom = r * r + c * c;
    let helix_k = ph.curvature.values().iter().map(|&k| rel(k, r / denom)).fold(0.0, f64::max);
    let helix_t = ph.torsion.values().iter().map(|&t| rel(t, c / denom)).fold(0.0, f64::max);
    let hyp = search::combined_distance(3.0, 4.0);
    report(
        9,
        "curvature/torsion and combined distance",
        circle_k <= 0.02 && circle_t <= 1e-6 && helix_k <= 0.02 && helix_t <= 0.02 && hyp == 5.0,
        format!(
            "200 samples: circle curvature rel err {circle_k:.2e}, |torsion| {circle_t:.1e} (abs tol 1e-6); \
             helix curvature rel err {helix_k:.2e}, torsion rel err {helix_t:.2e} (tol 2%); combined(3, 4) = {hyp} (exact)"
        ),
    )
}

fn run_cli(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_warpbench"))
        .args(args)
        .env_remove("WARPBENCH_SEED")
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    std::fs::write(
        dir.path().join("line.csv"),
        (0..40).fold(String::from("line_id,x,y,z\n"), |acc, k| {
            let t = k as f64 * 0.3;
            acc + &format!("a,{},{},{}\n", t.cos(), t.sin(), 0.1 * t * t)
        }),
    )
    .unwrap();
    let (reference, pair, target) = (p("ref.json"), p("pair.json"), p("target.csv"));
    assert!(run_cli(&["generate", "--length", "200", "--seed", "3", "-o", &reference]));
    assert!(run_cli(&["deform", &reference, "--class", "scaled_mrgp", "--seed", "4", "-o", &pair]));
    let pair_data: warpbench::synthesis::SignalPairFile =
        serde_json::from_slice(&std::fs::read(&pair).unwrap()).unwrap();
    s(pair_data.target).write_csv(std::fs::File::create(&target).unwrap()).unwrap();

    let invocations: Vec<Vec<String>> = vec![
        vec!["generate", "--length", "300", "--seed", "8"],
        vec!["generate", "--length", "300", "--seed", "8", "--format", "csv"],
        vec!["deform", &reference, "--class", "scaled_rgp", "--seed", "5"],
        vec!["align", &pair, "--variant", "wddtw", "--g", "0.3", "--band", "30"],
        vec!["fit", &reference, &target, "--iterations", "60", "--seed", "2"],
        vec!["optimize-weights", &pair, "-K", "6", "--seed", "6"],
        vec![
            "classify",
            "--classes",
            "3",
            "--per-class",
            "6",
            "--length",
            "80",
            "--variant",
            "wdtw",
            "--g",
            "0.1",
            "--seed",
            "7",
        ],
        vec!["search", &p("line.csv"), &p("line.csv"), "--threshold", "1e6"],
        vec!["bench", "alignment", "--pairs", "2", "-K", "3", "--seed", "9", "--format", "csv"],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();

    let mut identical = 0;
    let mut failed = Vec::new();
    for (k, args) in invocations.iter().enumerate() {
        let outputs: Vec<Vec<u8>> = (0..2)
            .map(|run| {
                let out = p(&format!("out-{k}-{run}"));
                let mut full: Vec<&str> = args.iter().map(String::as_str).collect();
                full.extend(["-o", &out]);
                assert!(run_cli(&full), "{full:?} failed");
                std::fs::read(&out).unwrap()
            })
            .collect();
        if outputs[0] == outputs[1] && !outputs[0].is_empty() {
            identical += 1;
        } else {
            failed.push(args[0].clone());
        }
    }

    let bench_dirs: Vec<Vec<Vec<u8>>> = (0..2)
        .map(|run| {
            let out = p(&format!("bench-{run}"));
            assert!(run_cli(&["bench", "windowing", "--pairs", "2", "-K", "3", "--seed", "1", "--out-dir", &out]));
            ["report.json", "rows.csv", "bars.dat"]
                .iter()
                .map(|f| std::fs::read(Path::new(&out).join(f)).unwrap())
                .collect()
        })
        .collect();
    let dirs_identical = bench_dirs[0] == bench_dirs[1];
    if !dirs_identical {
        failed.push("bench --out-dir".into());
    }

    report(
        10,
        "repeated CLI invocations are byte-identical",
        failed.is_empty(),
        format!(
            "{identical}/{} single-file commands identical, bench output directory identical: {dirs_identical}{}",
            invocations.len(),
            if failed.is_empty() { String::new() } else { format!("; differing: {}", failed.join(", ")) }
        ),
    )
}

fn main() {
    let start = Instant::now();
    let mut outcomes = vec![criterion_1(), criterion_2()];
    let runs = round_trips();
    outcomes.push(criterion_3(&runs));
    let (reports, elapsed) = alignment_reports();
    outcomes.push(criterion_4(&reports, elapsed));
    outcomes.push(criterion_5());
    outcomes.push(criterion_6(&reports));
    outcomes.push(criterion_7());
    outcomes.push(criterion_8(&runs));
    outcomes.push(criterion_9());
    outcomes.push(criterion_10());

    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} criteria passed in {:.1?}", outcomes.len(), start.elapsed());
    let unexpected: Vec<u32> =
        outcomes.iter().filter(|o| !o.pass && !KNOWN_FAILURES.contains(&o.id)).map(|o| o.id).collect();
    for o in outcomes.iter().filter(|o| o.pass && KNOWN_FAILURES.contains(&o.id)) {
        println!("note: criterion {} is listed as a known failure but passed", o.id);
    }
    let known: Vec<u32> = outcomes.iter().filter(|o| !o.pass && KNOWN_FAILURES.contains(&o.id)).map(|o| o.id).collect();
    if !known.is_empty() {
        println!("known failures (see the decisions ledger): {known:?}");
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
