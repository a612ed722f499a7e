//! Acceptance gate. One test per published reference figure the toolkit is
//! expected to reproduce; each asserts its stated tolerance and prints the
//! measured-vs-target detail on failure. Reference values and tolerances are
//! frozen here on purpose — do not loosen them to make a run green.

use channel_mc::{frame_rng, McConfig};
use isa_compiler::{
    analyze_potentials, apply_merge_passes, compile_baseline, MergeScenario, Program,
};
use polar_core::{construct_5g, encode, transform_n, CodeSpec};
use rand::Rng;
use std::time::Instant;
use vm_decoder::{decode, Arith, QuantSpec};

fn pair(spec: &CodeSpec, pe: usize) -> (Program, Program) {
    let base = compile_baseline(spec, pe).unwrap();
    let merged = apply_merge_passes(&base);
    (base, merged)
}

fn within_pct(value: f64, target: f64, pct: f64) -> bool {
    (value - target).abs() <= target * pct / 100.0
}

#[test]
fn a1_baseline_latency_pc1024_512() {
    let t0 = Instant::now();
    let spec = construct_5g(1024, 512).unwrap();
    let prog = compile_baseline(&spec, 64).unwrap();
    let elapsed = t0.elapsed();

    let (steps, cycles) = (prog.steps(), prog.cycles());
    println!("steps {steps} (target 212 +/-3%), cycles {cycles} (target 268 +/-3%), {elapsed:?}");
    assert!(within_pct(steps as f64, 212.0, 3.0), "steps {steps} outside 212 +/-3%");
    assert!(within_pct(cycles as f64, 268.0, 3.0), "cycles {cycles} outside 268 +/-3%");
    assert!(elapsed.as_secs_f64() < 1.0, "compile took {elapsed:?}");
}

#[test]
fn a2_latency_vs_parallelism() {
    let spec = construct_5g(1024, 512).unwrap();
    for (pe, target) in [(16, 571), (32, 356), (64, 268), (128, 229), (256, 217)] {
        let cycles = compile_baseline(&spec, pe).unwrap().cycles();
        println!("pe={pe}: {cycles} cycles (target {target} +/-3%)");
        assert!(
            within_pct(cycles as f64, target as f64, 3.0),
            "pe={pe}: {cycles} cycles outside {target} +/-3%"
        );
    }
}

/// Merged-vs-baseline savings, N=1024, by rate and processor count.
/// Reference cells: (K, PE, operation reduction %, time-step reduction %).
const REFERENCE_SAVINGS: [(usize, usize, f64, f64); 9] = [
    (256, 32, 27.43, 15.14),
    (256, 64, 34.86, 26.87),
    (256, 128, 38.86, 35.42),
    (512, 32, 26.54, 15.56),
    (512, 64, 32.70, 25.75),
    (512, 128, 35.55, 32.47),
    (768, 32, 22.54, 12.42),
    (768, 64, 26.01, 19.91),
    (768, 128, 30.06, 27.23),
];

#[test]
fn a3_savings_by_rate_and_parallelism() {
    let mut bad = Vec::new();
    for (k, pe, ops_t, ts_t) in REFERENCE_SAVINGS {
        let spec = construct_5g(1024, k).unwrap();
        let (base, merged) = pair(&spec, pe);
        let ops = 100.0 * (base.steps() - merged.steps()) as f64 / base.steps() as f64;
        let ts = 100.0 * (base.cycles() - merged.cycles()) as f64 / base.cycles() as f64;
        let ops_ok = (ops - ops_t).abs() <= 2.0;
        let ts_ok = (ts - ts_t).abs() <= 2.0;
        println!(
            "K={k} pe={pe}: ops {ops:.2}% vs {ops_t}% [{}], steps {ts:.2}% vs {ts_t}% [{}]",
            if ops_ok { "ok" } else { "OFF" },
            if ts_ok { "ok" } else { "OFF" },
        );
        if !ops_ok {
            bad.push(format!("K={k} pe={pe} ops {ops:.2} vs {ops_t}"));
        }
        if !ts_ok {
            bad.push(format!("K={k} pe={pe} steps {ts:.2} vs {ts_t}"));
        }
    }
    assert!(bad.is_empty(), "cells outside +/-2pp: {bad:?}");
}

/// Reference merge-potential figures for PC(1024,512), expressed as saved
/// cycles over the reference baseline cycle counts per processor count.
const REFERENCE_BASELINE_CYCLES: [(usize, f64); 3] = [(32, 360.0), (64, 268.0), (128, 231.0)];

const REFERENCE_CHAIN_POTENTIALS: [(MergeScenario, [f64; 3]); 14] = [
    (MergeScenario::F2, [10.0, 17.0, 21.0]),
    (MergeScenario::F3, [2.0, 8.0, 14.0]),
    (MergeScenario::F4, [0.0, 0.0, 3.0]),
    (MergeScenario::G02, [3.0, 6.0, 7.0]),
    (MergeScenario::G03, [0.0, 2.0, 4.0]),
    (MergeScenario::C2, [7.0, 10.0, 13.0]),
    (MergeScenario::C3, [2.0, 6.0, 8.0]),
    (MergeScenario::C4, [0.0, 0.0, 3.0]),
    (MergeScenario::C02, [2.0, 7.0, 7.0]),
    (MergeScenario::C03, [2.0, 4.0, 4.0]),
    (MergeScenario::GF, [18.0, 23.0, 26.0]),
    (MergeScenario::FG0, [3.0, 5.0, 7.0]),
    (MergeScenario::CG, [7.0, 10.0, 12.0]),
    (MergeScenario::C0G, [4.0, 6.0, 7.0]),
];

/// Leaf-pattern potentials, single reference column at 64 processors.
const REFERENCE_LEAF_POTENTIALS: [(MergeScenario, f64); 7] = [
    (MergeScenario::RepRepSpc, 12.0),
    (MergeScenario::Rate0RepSpc, 4.0),
    (MergeScenario::RepSpcRate1, 1.0),
    (MergeScenario::RepRate1, 4.0),
    (MergeScenario::Rate0Ml, 4.0),
    (MergeScenario::MlRate1, 1.0),
    (MergeScenario::FRep, 10.0),
];

#[test]
fn a4_merge_potential_estimates() {
    let spec = construct_5g(1024, 512).unwrap();
    let progs: Vec<Program> = REFERENCE_BASELINE_CYCLES
        .iter()
        .map(|&(pe, _)| compile_baseline(&spec, pe).unwrap())
        .collect();
    let mut bad = Vec::new();

    for (scenario, counts) in REFERENCE_CHAIN_POTENTIALS {
        for (col, &(pe, base_cycles)) in REFERENCE_BASELINE_CYCLES.iter().enumerate() {
            let target = 100.0 * counts[col] / base_cycles;
            let got = analyze_potentials(&progs[col], scenario);
            let ok = (got - target).abs() <= 1.0;
            println!(
                "{} pe={pe}: {got:.2}% vs {target:.2}% [{}]",
                scenario.name(),
                if ok { "ok" } else { "OFF" }
            );
            if !ok {
                bad.push(format!("{} pe={pe}: {got:.2} vs {target:.2}", scenario.name()));
            }
        }
    }

    let p64 = &progs[1];
    for (scenario, count) in REFERENCE_LEAF_POTENTIALS {
        let target = 100.0 * count / 268.0;
        let got = analyze_potentials(p64, scenario);
        let ok = (got - target).abs() <= 1.0;
        println!(
            "{}: {got:.2}% vs {target:.2}% [{}]",
            scenario.name(),
            if ok { "ok" } else { "OFF" }
        );
        if !ok {
            bad.push(format!("{}: {got:.2} vs {target:.2}", scenario.name()));
        }
    }
    assert!(bad.is_empty(), "cells outside +/-1pp: {bad:?}");
}

#[test]
fn a5_memory_words_and_utilization() {
    assert_eq!(perf_model::words_baseline(10, 64), 12);
    assert_eq!(perf_model::words_proposed(10, 64), 8);
    let u_base = perf_model::utilization(10, 64, false);
    let u_packed = perf_model::utilization(10, 64, true);
    println!("utilization {u_base:.4}% -> {u_packed:.4}%");
    assert_eq!((u_base * 10.0).round() / 10.0, 66.4);
    assert_eq!((u_packed * 10.0).round() / 10.0, 99.6);
}

#[test]
fn a6_semi_parallel_overhead_ratio() {
    for (pe, target) in [(32, 7.5), (64, 3.8), (128, 1.9), (256, 0.97)] {
        let got = perf_model::theta_sp(1024, pe);
        println!("pe={pe}: {got:.3}% vs {target}%");
        assert!((got - target).abs() <= 0.2, "pe={pe}: {got:.3} vs {target} beyond 0.2pp");
    }
}

/// One random transmission: information bits first, then noise, both from the
/// frame's own stream.
fn random_frame(spec: &CodeSpec, seed: u64, frame: u64, ebno_db: f64) -> (Vec<u8>, Vec<f64>) {
    let mut rng = frame_rng(seed, frame);
    let info: Vec<u8> = (0..spec.info_len()).map(|_| rng.gen_range(0..2u8)).collect();
    let x = encode(spec, &info).unwrap();
    let llrs = channel_mc::awgn_llrs(&x, ebno_db, spec.rate(), &mut rng);
    (x, llrs)
}

#[test]
fn a7_equivalence_suite() {
    use rayon::prelude::*;
    let t0 = Instant::now();
    const FRAMES: u64 = 10_000;
    let grid = [0.0, 1.0, 2.0, 3.0, 4.0];

    // (a) merged == baseline under quantization, (b) real-valued VM == plain
    // successive cancellation, across code sizes and rates.
    let mut configs: Vec<(usize, usize, usize)> = vec![
        (64, 16, 8),
        (64, 32, 8),
        (64, 48, 8),
        (256, 64, 32),
        (256, 128, 32),
        (256, 192, 32),
        (1024, 512, 64),
        (1024, 512, 128),
    ];
    configs.dedup();
    for &(n, k, pe) in &configs {
        let spec = construct_5g(n, k).unwrap();
        let (base, merged) = pair(&spec, pe);
        let q = Arith::Fixed(QuantSpec::default());
        let mismatches: u64 = (0..FRAMES)
            .into_par_iter()
            .map(|f| {
                let ebno = grid[(f % grid.len() as u64) as usize];
                let (_, llrs) = random_frame(&spec, 0xA7, f, ebno);

                let qb = decode(&base, &llrs, q).unwrap();
                let qm = decode(&merged, &llrs, q).unwrap();
                if qb.x_hat != qm.x_hat || qb.u_hat != qm.u_hat {
                    return 1;
                }

                let rb = decode(&base, &llrs, Arith::Real).unwrap();
                let rm = decode(&merged, &llrs, Arith::Real).unwrap();
                let (u_sc, x_sc) = sc_reference::sc_decode(&spec, &llrs);
                u64::from(
                    rb.x_hat != x_sc || rm.x_hat != x_sc || rb.u_hat != u_sc || rm.u_hat != u_sc,
                )
            })
            .sum();
        println!("PC({n},{k}) pe={pe}: {FRAMES} frames, {mismatches} mismatches");
        assert_eq!(mismatches, 0, "PC({n},{k}) pe={pe}");
    }

    // (c) each leaf kernel against plain successive cancellation on a code
    // that is exactly its frozen pattern.
    type Kernel = fn(&[f64]) -> Vec<u8>;
    let kernels: Vec<(&str, usize, Vec<usize>, Kernel)> = vec![
        ("rep8", 8, (0..7).collect(), |a| fastssc_kernels::decode_rep(a).beta),
        ("rep16", 16, (0..15).collect(), |a| fastssc_kernels::decode_rep(a).beta),
        ("spc8", 8, vec![0], |a| fastssc_kernels::decode_spc(a).beta),
        ("spc16", 16, vec![0], |a| fastssc_kernels::decode_spc(a).beta),
        ("ml4", 4, vec![0, 1], |a| fastssc_kernels::decode_ml4(a).beta),
        ("repspc8", 8, vec![0, 1, 2, 4], |a| fastssc_kernels::decode_repspc(a).beta),
        ("rate1_8", 8, vec![], |a| {
            a.iter().map(|&v| sc_reference::hard_decision(v)).collect()
        }),
        ("rep_repspc16", 16, vec![0, 1, 2, 3, 4, 5, 6, 8, 9, 10, 12], |a| {
            fastssc_kernels::decode_rep_repspc(a).beta
        }),
        ("rep_rate1_16", 16, (0..7).collect(), |a| {
            fastssc_kernels::decode_rep_rate1(a).beta
        }),
        ("rate0_ml8", 8, vec![0, 1, 2, 3, 4, 5], |a| {
            fastssc_kernels::decode_rate0_ml(a).beta
        }),
    ];
    for (name, n, frozen, kernel) in kernels {
        let spec = CodeSpec::from_frozen(n, frozen).unwrap();
        let bad: u64 = (0..FRAMES)
            .into_par_iter()
            .map(|f| {
                let mut rng = frame_rng(0xBEEF, f);
                let alpha: Vec<f64> = (0..n).map(|_| rng.gen_range(-8.0..8.0)).collect();
                let (_, x_sc) = sc_reference::sc_decode(&spec, &alpha);
                u64::from(kernel(&alpha) != x_sc)
            })
            .sum();
        println!("kernel {name}: {FRAMES} draws, {bad} mismatches");
        assert_eq!(bad, 0, "kernel {name}");
    }

    let elapsed = t0.elapsed();
    println!("equivalence suite: {elapsed:?}");
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
}

#[test]
fn a8_error_rate_reproduction() {
    let t0 = Instant::now();
    let spec = construct_5g(1024, 512).unwrap();
    let (_, merged) = pair(&spec, 64);
    let grid = [2.3, 2.5, 2.7];
    let mc = |arith: Arith, ebno: f64| {
        let cfg = McConfig {
            min_frame_errors: u64::MAX,
            max_frames: 100_000,
            ..McConfig::new(ebno, 1)
        };
        channel_mc::montecarlo(&merged, arith, &cfg).unwrap()
    };

    let fixed: Vec<f64> = grid
        .iter()
        .map(|&e| mc(Arith::Fixed(QuantSpec::default()), e).fer)
        .collect();
    let real: Vec<f64> = grid.iter().map(|&e| mc(Arith::Real, e).fer).collect();
    println!("fixed FER {fixed:?}");
    println!("real  FER {real:?}");

    // frame error rate at 2.5 dB, quantized and floating point, +/-20%
    assert!(
        within_pct(fixed[1], 1.605e-2, 20.0),
        "quantized FER {:.4e} outside 1.605e-2 +/-20%",
        fixed[1]
    );
    assert!(
        within_pct(real[1], 1.537e-2, 20.0),
        "float FER {:.4e} outside 1.537e-2 +/-20%",
        real[1]
    );

    // quantization loss at FER 1e-2: log-linear interpolation of the
    // Eb/N0 where each curve crosses, difference at most 0.05 dB
    let cross = |fers: &[f64]| -> f64 {
        for i in 0..fers.len() - 1 {
            let (a, b) = (fers[i].log10(), fers[i + 1].log10());
            if (a - (-2.0)) * (b - (-2.0)) <= 0.0 {
                let t = (-2.0 - a) / (b - a);
                return grid[i] + t * (grid[i + 1] - grid[i]);
            }
        }
        panic!("FER curve {fers:?} does not cross 1e-2 inside the grid");
    };
    let loss = cross(&fixed) - cross(&real);
    println!("quantization loss at FER 1e-2: {loss:.4} dB");
    assert!(loss.abs() <= 0.05, "quantization loss {loss:.4} dB beyond 0.05 dB");

    let elapsed = t0.elapsed();
    println!("error-rate suite: {elapsed:?}");
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}");
}

#[test]
fn a9_module_invariants() {
    let mut rng = frame_rng(0x1A9, 0);

    // encoding transform is an involution
    for _ in 0..200 {
        let u: Vec<u8> = (0..256).map(|_| rng.gen_range(0..2u8)).collect();
        let mut v = u.clone();
        transform_n(&mut v);
        transform_n(&mut v);
        assert_eq!(u, v);
    }

    // single-parity-check kernel: even parity, least-reliable flip
    for _ in 0..2000 {
        let alpha: Vec<f64> = (0..16).map(|_| rng.gen_range(-6.0..6.0)).collect();
        let beta = fastssc_kernels::decode_spc(&alpha).beta;
        assert_eq!(beta.iter().fold(0, |a, b| a ^ b), 0);
        let hard: Vec<u8> = alpha.iter().map(|&v| sc_reference::hard_decision(v)).collect();
        if hard.iter().fold(0, |a, b| a ^ b) == 0 {
            assert_eq!(beta, hard);
        } else {
            let flipped: Vec<usize> =
                (0..16).filter(|&i| beta[i] != hard[i]).collect();
            let weakest = (0..16)
                .min_by(|&i, &j| alpha[i].abs().partial_cmp(&alpha[j].abs()).unwrap())
                .unwrap();
            assert_eq!(flipped, vec![weakest]);
        }
    }

    // repetition kernel: constant output matching the sign of the sum
    for _ in 0..2000 {
        let alpha: Vec<f64> = (0..8).map(|_| rng.gen_range(-6.0..6.0)).collect();
        let beta = fastssc_kernels::decode_rep(&alpha).beta;
        assert!(beta.iter().all(|&b| b == beta[0]));
        let s: f64 = alpha.iter().sum();
        assert_eq!(beta[0], u8::from(s < 0.0));
    }

    // decisions are invariant under positive scaling of the input
    let spec = construct_5g(128, 64).unwrap();
    for _ in 0..200 {
        let llrs: Vec<f64> = (0..128).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let scaled: Vec<f64> = llrs.iter().map(|v| v * 3.25).collect();
        assert_eq!(sc_reference::sc_decode(&spec, &llrs), sc_reference::sc_decode(&spec, &scaled));
        let a4: Vec<f64> = llrs[..4].to_vec();
        let s4: Vec<f64> = scaled[..4].to_vec();
        assert_eq!(fastssc_kernels::decode_ml4(&a4).beta, fastssc_kernels::decode_ml4(&s4).beta);
    }

    // compiler is deterministic
    let spec = construct_5g(1024, 512).unwrap();
    let (b1, m1) = pair(&spec, 64);
    let (b2, m2) = pair(&spec, 64);
    assert_eq!(b1, b2);
    assert_eq!(m1, m2);

    // Monte-Carlo replays exactly for a fixed seed
    let (_, small) = pair(&construct_5g(128, 64).unwrap(), 16);
    let cfg = McConfig {
        min_frame_errors: 50,
        max_frames: 20_000,
        ..McConfig::new(2.0, 42)
    };
    let r1 = channel_mc::montecarlo(&small, Arith::Fixed(QuantSpec::default()), &cfg).unwrap();
    let r2 = channel_mc::montecarlo(&small, Arith::Fixed(QuantSpec::default()), &cfg).unwrap();
    assert_eq!(r1, r2);
}
