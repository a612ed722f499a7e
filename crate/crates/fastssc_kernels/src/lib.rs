//! Constant-form decoders for the prunable subtree patterns, plus the fused
//! right-child forms and the larger merged kernels. Each kernel is the closed
//! form of a short f/g/combine translation sequence and is tested bit-exact
//! against the reference SC walk on its leaf pattern.

use sc_reference::{combine, f_minsum, g, hard_decision};

/// Hard-decision output of a subtree decoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeResult {
    pub beta: Vec<u8>,
}

/// Right-child kind accepted by the fused parent forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RightKind {
    Rate1,
    Spc,
}

/// Left partial sums for a fused parent: either known-zero or an explicit
/// vector.
#[derive(Debug, Clone, Copy)]
pub enum BetaLeft<'a> {
    Zero,
    Bits(&'a [u8]),
}

/// All leaves repeat one information bit: decide by the sign of the LLR sum.
/// The sum is taken at full precision; ties (sum == 0) decide 0.
pub fn decode_rep(alpha: &[f64]) -> NodeResult {
    debug_assert!(alpha.len() >= 2);
    let sum: f64 = alpha.iter().sum();
    let bit = hard_decision(sum);
    NodeResult { beta: vec![bit; alpha.len()] }
}

/// Single-parity-check node, Wagner rule: hard-decide everything, then if the
/// parity fails flip the least reliable position (lowest index on ties).
pub fn decode_spc(alpha: &[f64]) -> NodeResult {
    debug_assert!(alpha.len() >= 2);
    let mut beta: Vec<u8> = alpha.iter().map(|&a| hard_decision(a)).collect();
    let parity = beta.iter().fold(0u8, |acc, &b| acc ^ b);
    let mut j = 0;
    let mut best = f64::INFINITY;
    for (i, &a) in alpha.iter().enumerate() {
        if a.abs() < best {
            best = a.abs();
            j = i;
        }
    }
    beta[j] ^= parity;
    NodeResult { beta }
}

/// FFII pattern: four candidate codewords, pick the max-correlation one.
/// Candidates are the GF(2) span of rows 3 and 4 of the size-4 transform;
/// ties keep the earliest candidate in this listing order.
pub const ML4_CANDIDATES: [[u8; 4]; 4] = [[0, 0, 0, 0], [1, 0, 1, 0], [1, 1, 1, 1], [0, 1, 0, 1]];

pub fn decode_ml4(alpha: &[f64]) -> NodeResult {
    assert_eq!(alpha.len(), 4, "ML kernel is fixed at four leaves");
    let mut best = f64::NEG_INFINITY;
    let mut pick = 0;
    for (c, cand) in ML4_CANDIDATES.iter().enumerate() {
        let corr: f64 = cand
            .iter()
            .zip(alpha)
            .map(|(&b, &a)| if b == 0 { a } else { -a })
            .sum();
        if corr > best {
            best = corr;
            pick = c;
        }
    }
    NodeResult { beta: ML4_CANDIDATES[pick].to_vec() }
}

/// Size-8 FFFIFIII node: Rep(4) on the left, SPC(4) on the right.
pub fn decode_repspc(alpha: &[f64]) -> NodeResult {
    assert_eq!(alpha.len(), 8, "RepSPC kernel is fixed at eight leaves");
    let (lo, hi) = alpha.split_at(4);
    let alpha_l: Vec<f64> = lo.iter().zip(hi).map(|(&a, &b)| f_minsum(a, b)).collect();
    let beta_l = decode_rep(&alpha_l);
    let alpha_r: Vec<f64> = lo
        .iter()
        .zip(hi)
        .zip(&beta_l.beta)
        .map(|((&a, &b), &bl)| g(a, b, bl))
        .collect();
    let beta_r = decode_spc(&alpha_r);
    NodeResult { beta: combine(&beta_l.beta, &beta_r.beta) }
}

/// Parent of Rep(N/2) and RepSPC(N/2=8): the F -> Rep -> G -> RepSPC -> C
/// sequence in one kernel.
pub fn decode_rep_repspc(alpha: &[f64]) -> NodeResult {
    assert_eq!(alpha.len(), 16, "Rep-RepSPC kernel is fixed at sixteen leaves");
    let (lo, hi) = alpha.split_at(8);
    let alpha_l: Vec<f64> = lo.iter().zip(hi).map(|(&a, &b)| f_minsum(a, b)).collect();
    let beta_l = decode_rep(&alpha_l);
    let alpha_r: Vec<f64> = lo
        .iter()
        .zip(hi)
        .zip(&beta_l.beta)
        .map(|((&a, &b), &bl)| g(a, b, bl))
        .collect();
    let beta_r = decode_repspc(&alpha_r);
    NodeResult { beta: combine(&beta_l.beta, &beta_r.beta) }
}

/// Parent of Rep(N/2) and Rate1(N/2): F -> Rep -> fused Rate-1 right half.
pub fn decode_rep_rate1(alpha: &[f64]) -> NodeResult {
    let n = alpha.len();
    assert!(n >= 4 && n.is_power_of_two(), "Rep-Rate1 kernel needs a power-of-two size >= 4");
    let (lo, hi) = alpha.split_at(n / 2);
    let alpha_l: Vec<f64> = lo.iter().zip(hi).map(|(&a, &b)| f_minsum(a, b)).collect();
    let beta_l = decode_rep(&alpha_l);
    fused_right_with(lo, hi, BetaLeft::Bits(&beta_l.beta), RightKind::Rate1)
}

/// Parent of Rate0(4) and ML(4): g with zero partial sums, ML, then the
/// all-zero-left combine (duplicate the right half).
pub fn decode_rate0_ml(alpha: &[f64]) -> NodeResult {
    assert_eq!(alpha.len(), 8, "Rate0-ML kernel is fixed at eight leaves");
    let (lo, hi) = alpha.split_at(4);
    let alpha_r: Vec<f64> = lo.iter().zip(hi).map(|(&a, &b)| g(a, b, 0)).collect();
    let beta_r = decode_ml4(&alpha_r);
    NodeResult { beta: combine(&vec![0; 4], &beta_r.beta) }
}

/// F plus the left Rep child in one go; returns only the left child's beta.
/// The parent's G and C remain separate instructions.
pub fn decode_f_rep(alpha: &[f64]) -> Vec<u8> {
    let n = alpha.len();
    assert!(
        matches!(n, 8 | 16 | 32),
        "F-Rep kernel covers parent sizes 8/16/32, got {n}"
    );
    let (lo, hi) = alpha.split_at(n / 2);
    let alpha_l: Vec<f64> = lo.iter().zip(hi).map(|(&a, &b)| f_minsum(a, b)).collect();
    decode_rep(&alpha_l).beta
}

/// Fused right-child decode at a parent: g with the given left partial sums
/// (or zero), decode the right child (Rate-1 hard decisions or SPC), combine.
/// Covers all four fused parent opcodes with the two parameters.
pub fn fused_right(alpha: &[f64], beta_l: BetaLeft, right: RightKind) -> NodeResult {
    let n = alpha.len();
    assert!(n >= 2 && n.is_power_of_two(), "fused parent needs a power-of-two size >= 2");
    let (lo, hi) = alpha.split_at(n / 2);
    fused_right_with(lo, hi, beta_l, right)
}

fn fused_right_with(lo: &[f64], hi: &[f64], beta_l: BetaLeft, right: RightKind) -> NodeResult {
    let half = lo.len();
    let alpha_r: Vec<f64> = match beta_l {
        BetaLeft::Zero => lo.iter().zip(hi).map(|(&a, &b)| g(a, b, 0)).collect(),
        BetaLeft::Bits(bits) => {
            assert_eq!(bits.len(), half, "left partial sums sized to the half");
            lo.iter().zip(hi).zip(bits).map(|((&a, &b), &bl)| g(a, b, bl)).collect()
        }
    };
    let beta_r = match right {
        RightKind::Rate1 => alpha_r.iter().map(|&a| hard_decision(a)).collect(),
        RightKind::Spc => decode_spc(&alpha_r).beta,
    };
    let beta_l_bits: Vec<u8> = match beta_l {
        BetaLeft::Zero => vec![0; half],
        BetaLeft::Bits(bits) => bits.to_vec(),
    };
    NodeResult { beta: combine(&beta_l_bits, &beta_r) }
}
