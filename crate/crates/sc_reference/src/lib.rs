//! Min-sum successive-cancellation decoding over real LLRs. Depth-first,
//! left-first tree walk; every fast kernel in this workspace is tested against
//! this implementation.

use polar_core::CodeSpec;

/// Left-child message: sign(a)sign(b) * min(|a|, |b|), with sign(0) = +1.
#[inline]
pub fn f_minsum(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) ^ (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs())
}

/// Right-child message: b + (1 - 2*beta_l) * a.
#[inline]
pub fn g(a: f64, b: f64, beta_l: u8) -> f64 {
    if beta_l == 0 {
        b + a
    } else {
        b - a
    }
}

/// (beta_l XOR beta_r) ++ beta_r.
pub fn combine(beta_l: &[u8], beta_r: &[u8]) -> Vec<u8> {
    assert_eq!(beta_l.len(), beta_r.len(), "combine on unequal halves");
    let mut out = Vec::with_capacity(2 * beta_l.len());
    out.extend(beta_l.iter().zip(beta_r).map(|(&l, &r)| l ^ r));
    out.extend_from_slice(beta_r);
    out
}

/// Leaf rule: frozen positions decide 0; info positions take the LLR sign
/// (alpha >= 0 decides 0).
#[inline]
pub fn hard_decision_leaf(alpha: f64, index: usize, spec: &CodeSpec) -> u8 {
    if spec.is_frozen(index) || alpha >= 0.0 {
        0
    } else {
        1
    }
}

#[inline]
pub fn hard_decision(alpha: f64) -> u8 {
    if alpha >= 0.0 {
        0
    } else {
        1
    }
}

/// Full SC decode. Returns (u_hat, x_hat); x_hat is the root beta and always
/// equals the transform of u_hat.
pub fn sc_decode(spec: &CodeSpec, channel_llrs: &[f64]) -> (Vec<u8>, Vec<u8>) {
    assert_eq!(channel_llrs.len(), spec.block_len());
    let mut u_hat = vec![0u8; spec.block_len()];
    let x_hat = walk(spec, channel_llrs, 0, &mut u_hat);
    (u_hat, x_hat)
}

fn walk(spec: &CodeSpec, alpha: &[f64], leaf_base: usize, u_hat: &mut [u8]) -> Vec<u8> {
    let size = alpha.len();
    if size == 1 {
        let bit = hard_decision_leaf(alpha[0], leaf_base, spec);
        u_hat[leaf_base] = bit;
        return vec![bit];
    }
    let half = size / 2;
    let alpha_l: Vec<f64> = (0..half).map(|i| f_minsum(alpha[i], alpha[i + half])).collect();
    let beta_l = walk(spec, &alpha_l, leaf_base, u_hat);
    let alpha_r: Vec<f64> = (0..half).map(|i| g(alpha[i], alpha[i + half], beta_l[i])).collect();
    let beta_r = walk(spec, &alpha_r, leaf_base + half, u_hat);
    combine(&beta_l, &beta_r)
}
