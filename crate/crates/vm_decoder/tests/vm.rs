use isa_compiler::{apply_merge_passes, compile_baseline, Program};
use polar_core::{construct_5g, encode, CodeSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vm_decoder::{decode, quantize_channel, trace, Arith, MemWrite, QuantSpec};

fn q651() -> Arith {
    Arith::Fixed(QuantSpec::default())
}

fn noisy_llrs(rng: &mut ChaCha8Rng, x: &[u8], spread: f64) -> Vec<f64> {
    x.iter()
        .map(|&b| {
            let s = 1.0 - 2.0 * b as f64;
            s * rng.gen_range(0.2..spread) + rng.gen_range(-2.0..2.0)
        })
        .collect()
}

#[test]
fn channel_quantizer_examples() {
    let q = QuantSpec::default();
    assert_eq!(quantize_channel(3.26, &q), 3.5);
    assert_eq!(quantize_channel(-0.24, &q), 0.0);
    assert_eq!(quantize_channel(0.25, &q), 0.5);
    assert_eq!(quantize_channel(-0.25, &q), -0.5);
    assert_eq!(quantize_channel(100.0, &q), 7.5);
    assert_eq!(quantize_channel(-100.0, &q), -7.5);
    assert_eq!(q.max_internal(), 15.5);
}

#[test]
fn noiseless_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (n, k) in [(8, 5), (32, 20), (256, 120), (1024, 512)] {
        let spec = construct_5g(n, k).unwrap();
        let pe = (n / 4).max(4);
        let base = compile_baseline(&spec, pe).unwrap();
        let merged = apply_merge_passes(&base);
        let info: Vec<u8> = (0..k).map(|_| rng.gen_range(0..2)).collect();
        let x = encode(&spec, &info).unwrap();
        let mut u = x.clone();
        polar_core::transform_n(&mut u);
        let llrs: Vec<f64> = x.iter().map(|&b| if b == 0 { 4.0 } else { -4.0 }).collect();
        for prog in [&base, &merged] {
            for arith in [Arith::Real, q651()] {
                let out = decode(prog, &llrs, arith).unwrap();
                assert_eq!(out.x_hat, x);
                assert_eq!(out.u_hat, u);
            }
        }
    }
}

#[test]
fn real_arithmetic_matches_reference_decoder() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (n, k) in [(8, 5), (64, 21), (64, 43), (256, 128), (1024, 512)] {
        let spec = construct_5g(n, k).unwrap();
        let pe = (n / 8).max(4);
        let base = compile_baseline(&spec, pe).unwrap();
        let merged = apply_merge_passes(&base);
        for _ in 0..300 {
            let x: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            let llrs = noisy_llrs(&mut rng, &x, 3.0);
            let (u_ref, x_ref) = sc_reference_decode(&spec, &llrs);
            for prog in [&base, &merged] {
                let out = decode(prog, &llrs, Arith::Real).unwrap();
                assert_eq!(out.x_hat, x_ref, "n={n} k={k}");
                assert_eq!(out.u_hat, u_ref);
            }
        }
    }
}

fn sc_reference_decode(spec: &CodeSpec, llrs: &[f64]) -> (Vec<u8>, Vec<u8>) {
    sc_reference::sc_decode(spec, llrs)
}

#[test]
fn fixed_arithmetic_merged_equals_baseline() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (n, k) in [(64, 32), (256, 200), (1024, 512)] {
        let spec = construct_5g(n, k).unwrap();
        let pe = (n / 8).max(4);
        let base = compile_baseline(&spec, pe).unwrap();
        let merged = apply_merge_passes(&base);
        for _ in 0..300 {
            let x: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            // wide spread so channel saturation and internal clipping engage
            let llrs = noisy_llrs(&mut rng, &x, 12.0);
            let a = decode(&base, &llrs, q651()).unwrap();
            let b = decode(&merged, &llrs, q651()).unwrap();
            assert_eq!(a, b, "n={n} k={k}");
        }
    }
}

fn writes_shape(prog: &Program, llrs: &[f64]) {
    let (out, entries) = trace(prog, llrs, Arith::Real).unwrap();
    assert_eq!(out, decode(prog, llrs, Arith::Real).unwrap());
    let total: usize = entries.iter().map(|e| e.cycles).sum();
    assert_eq!(total, prog.cycles());
    for e in &entries {
        let alphas = e
            .writes
            .iter()
            .filter(|w| matches!(w, MemWrite::Alpha { .. }))
            .count();
        let betas = e.writes.len() - alphas;
        let (ea, eb) = match e.op {
            "F" | "G" | "G0" | "G02" | "FG0" => (1, 0),
            "F2" | "GF" => (2, 0),
            "RATE0" | "RATE1" | "REP" | "ML" | "REPSPC" | "C" | "C0" | "PR1" | "P01"
            | "PRSPC" | "P0SPC" | "C2" | "C3" | "C02" | "C03" | "FREP" | "REP_REPSPC"
            | "REP_RATE1" | "RATE0_ML" => (0, 1),
            other => panic!("unexpected op {other}"),
        };
        assert_eq!((alphas, betas), (ea, eb), "step {} op {}", e.step, e.op);
    }
}

#[test]
fn trace_shows_only_committed_writes() {
    let spec = construct_5g(1024, 512).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let llrs: Vec<f64> = (0..1024).map(|_| rng.gen_range(-6.0..6.0)).collect();
    // pe=64 exercises most merged forms, pe=128 adds triple combines
    let mut seen = std::collections::BTreeSet::new();
    for pe in [64usize, 128] {
        let base = compile_baseline(&spec, pe).unwrap();
        let merged = apply_merge_passes(&base);
        seen.extend(merged.instructions.iter().map(|i| i.opcode.name()));
        writes_shape(&base, &llrs);
        writes_shape(&merged, &llrs);
    }
    for needed in [
        "F2", "G02", "GF", "FG0", "C2", "C3", "C02", "C03", "FREP", "REP_REPSPC",
        "REP_RATE1", "RATE0_ML",
    ] {
        assert!(seen.contains(needed), "{needed} never executed");
    }
}

#[test]
fn rejects_wrong_input_length() {
    let spec = construct_5g(64, 32).unwrap();
    let p = compile_baseline(&spec, 8).unwrap();
    assert!(decode(&p, &[0.0; 32], Arith::Real).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_frozen_set_matches_reference(
        n_exp in 3u32..7,
        mask in prop::collection::vec(any::<bool>(), 64),
        seed in any::<u64>(),
    ) {
        let n = 1usize << n_exp;
        let frozen: Vec<usize> = (0..n).filter(|&i| mask[i]).collect();
        prop_assume!(frozen.len() < n);
        let spec = CodeSpec::from_frozen(n, frozen).unwrap();
        let base = compile_baseline(&spec, 4).unwrap();
        let merged = apply_merge_passes(&base);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let llrs: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let (u_ref, x_ref) = sc_reference::sc_decode(&spec, &llrs);
        for prog in [&base, &merged] {
            let out = decode(prog, &llrs, Arith::Real).unwrap();
            prop_assert_eq!(&out.u_hat, &u_ref);
            prop_assert_eq!(&out.x_hat, &x_ref);
        }
    }
}
