//! BPSK transmission over AWGN and Monte-Carlo error-rate measurement.
//! Every frame derives its own counter-mode RNG stream from (seed, frame
//! index), so results are bit-identical regardless of how many worker
//! threads the simulation runs on.

use isa_compiler::Program;
use polar_core::encode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use vm_decoder::Arith;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Decode(#[from] vm_decoder::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Noise variance of the equivalent discrete channel for BPSK with code
/// rate `rate` at `ebno_db` dB of Eb/N0.
pub fn noise_variance(ebno_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * 10f64.powf(ebno_db / 10.0))
}

/// Modulate a codeword (0 -> +1, 1 -> -1), add white Gaussian noise and
/// return the channel LLRs 2y/sigma^2.
pub fn awgn_llrs<R: Rng>(x: &[u8], ebno_db: f64, rate: f64, rng: &mut R) -> Vec<f64> {
    let var = noise_variance(ebno_db, rate);
    let sigma = var.sqrt();
    x.iter()
        .map(|&b| {
            let s = 1.0 - 2.0 * b as f64;
            let z: f64 = rng.sample(StandardNormal);
            2.0 * (s + sigma * z) / var
        })
        .collect()
}

/// The RNG stream for one simulated frame. Frame draws are independent of
/// any other frame's, so frames can be evaluated in any order.
pub fn frame_rng(seed: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame);
    rng
}

#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub ebno_db: f64,
    pub seed: u64,
    /// stop once this many frame errors have been seen (checked at chunk
    /// boundaries, so the frame count stays deterministic)
    pub min_frame_errors: u64,
    pub max_frames: u64,
    pub chunk: u64,
}

impl McConfig {
    pub fn new(ebno_db: f64, seed: u64) -> Self {
        McConfig {
            ebno_db,
            seed,
            min_frame_errors: 200,
            max_frames: 1_000_000,
            chunk: 4096,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimReport {
    pub ebno_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub fer: f64,
    pub ber: f64,
}

/// Draw information bits, encode, transmit, decode one frame; returns
/// (frame errored, information bit errors).
pub fn simulate_frame(
    prog: &Program,
    arith: Arith,
    ebno_db: f64,
    seed: u64,
    frame: u64,
) -> Result<(bool, u64)> {
    let spec = &prog.spec;
    let mut rng = frame_rng(seed, frame);
    let info: Vec<u8> = (0..spec.info_len()).map(|_| rng.gen_range(0..2u8)).collect();
    let x = encode(spec, &info).map_err(|e| Error::InvalidParameters(e.to_string()))?;
    let llrs = awgn_llrs(&x, ebno_db, spec.rate(), &mut rng);
    let out = vm_decoder::decode(prog, &llrs, arith)?;
    let frame_err = out.x_hat != x;
    let mut bit_errs = 0u64;
    let mut k = 0usize;
    for i in 0..spec.block_len() {
        if !spec.is_frozen(i) {
            if out.u_hat[i] != info[k] {
                bit_errs += 1;
            }
            k += 1;
        }
    }
    Ok((frame_err, bit_errs))
}

/// Measure FER/BER at one operating point. Frames are processed in fixed
/// chunks, in parallel within each chunk; the stop rule is evaluated only
/// between chunks.
pub fn montecarlo(prog: &Program, arith: Arith, cfg: &McConfig) -> Result<SimReport> {
    if cfg.max_frames == 0 || cfg.chunk == 0 {
        return Err(Error::InvalidParameters("empty simulation".into()));
    }
    let mut frames = 0u64;
    let mut frame_errors = 0u64;
    let mut bit_errors = 0u64;
    while frames < cfg.max_frames && frame_errors < cfg.min_frame_errors {
        let end = (frames + cfg.chunk).min(cfg.max_frames);
        let (fe, be) = (frames..end)
            .into_par_iter()
            .map(|f| {
                let (err, bits) = simulate_frame(prog, arith, cfg.ebno_db, cfg.seed, f)
                    .expect("frame simulation failed");
                (err as u64, bits)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        frame_errors += fe;
        bit_errors += be;
        frames = end;
    }
    Ok(SimReport {
        ebno_db: cfg.ebno_db,
        frames,
        frame_errors,
        bit_errors,
        fer: frame_errors as f64 / frames as f64,
        ber: bit_errors as f64 / (frames * prog.spec.info_len() as u64) as f64,
    })
}
