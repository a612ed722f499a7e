//! Executes compiled decoder programs against a memory model shaped like
//! the hardware: one live LLR buffer per tree stage, two per-stage bit banks
//! (left/right child), a read-only channel memory and a decided-codeword
//! memory. Instructions run in stream order; merged instructions execute
//! their constituent operations back to back, keeping intermediate results
//! out of the memories unless the instruction's storage rule says otherwise,
//! so a merged program is observably equivalent to its baseline expansion.

use isa_compiler::{Instruction, Opcode, Program};
use polar_core::NodeRef;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Fixed-point format: `qi` bits for stored internal LLRs, `qc` bits for
/// channel LLRs, `qf` fractional bits. Magnitudes saturate at
/// `2^(q-1) - 1` steps of `2^-qf` each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuantSpec {
    pub qi: u32,
    pub qc: u32,
    pub qf: u32,
}

impl Default for QuantSpec {
    fn default() -> Self {
        QuantSpec { qi: 6, qc: 5, qf: 1 }
    }
}

impl QuantSpec {
    pub fn step(&self) -> f64 {
        (2.0f64).powi(-(self.qf as i32))
    }

    /// Largest representable channel LLR magnitude.
    pub fn max_channel(&self) -> f64 {
        ((1u64 << (self.qc - 1)) - 1) as f64 * self.step()
    }

    /// Largest representable internal LLR magnitude.
    pub fn max_internal(&self) -> f64 {
        ((1u64 << (self.qi - 1)) - 1) as f64 * self.step()
    }

    pub fn validate(&self) -> Result<()> {
        if self.qi < 2 || self.qc < 2 || self.qi < self.qc || self.qf >= self.qc {
            return Err(Error::InvalidParameters(format!(
                "unusable quantization (qi={}, qc={}, qf={})",
                self.qi, self.qc, self.qf
            )));
        }
        Ok(())
    }
}

/// Round a channel LLR to the nearest step (ties away from zero) and
/// saturate to the channel range.
pub fn quantize_channel(x: f64, q: &QuantSpec) -> f64 {
    let steps = (x / q.step()).round();
    let max = ((1u64 << (q.qc - 1)) - 1) as f64;
    let v = steps.clamp(-max, max) * q.step();
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arith {
    Real,
    Fixed(QuantSpec),
}

impl Arith {
    fn saturate(&self, x: f64) -> f64 {
        match self {
            Arith::Real => x,
            Arith::Fixed(q) => x.clamp(-q.max_internal(), q.max_internal()),
        }
    }
}

/// Decoder memories. `alpha[s]` is the single live LLR buffer of stage `s`
/// (the channel memory stands in for stage n); `beta[side][s]` are the bit
/// banks written by left (0) and right (1) children at stage `s`.
#[derive(Debug, Clone)]
pub struct DecoderState {
    pub alpha: Vec<Vec<f64>>,
    pub beta: [Vec<Vec<u8>>; 2],
    pub channel: Vec<f64>,
    pub codeword: Vec<u8>,
}

impl DecoderState {
    fn new(n: u32, channel: Vec<f64>) -> Self {
        let alpha: Vec<Vec<f64>> = (0..n).map(|s| vec![0.0; 1 << s]).collect();
        let bank = |_| (0..n).map(|s| vec![0u8; 1 << s]).collect::<Vec<_>>();
        DecoderState {
            alpha,
            beta: [bank(0), bank(1)],
            codeword: vec![0; channel.len()],
            channel,
        }
    }
}

/// One committed memory write, as seen after an instruction retires.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MemWrite {
    Alpha { stage: u32, values: Vec<f64> },
    Beta { side: u8, stage: u32, bits: Vec<u8> },
    Codeword { bits: Vec<u8> },
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceEntry {
    pub step: usize,
    pub op: &'static str,
    pub stage: u32,
    pub node: usize,
    pub cycles: usize,
    pub writes: Vec<MemWrite>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutput {
    pub u_hat: Vec<u8>,
    pub x_hat: Vec<u8>,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Region {
    Alpha(u32),
    Beta(u8, u32),
}

enum Backup {
    Alpha(Vec<f64>),
    Beta(Vec<u8>),
}

struct Exec {
    st: DecoderState,
    n: u32,
    arith: Arith,
    record: bool,
    writes: Vec<(Region, MemWrite)>,
}

fn side_of(v: NodeRef) -> u8 {
    v.is_right_child() as u8
}

impl Exec {
    fn read_alpha(&self, v: NodeRef) -> Vec<f64> {
        if v.stage == self.n {
            self.st.channel.clone()
        } else {
            self.st.alpha[v.stage as usize].clone()
        }
    }

    fn write_alpha(&mut self, stage: u32, values: Vec<f64>) {
        debug_assert_eq!(values.len(), 1 << stage);
        if let Arith::Fixed(q) = self.arith {
            debug_assert!(values
                .iter()
                .all(|x| x.abs() <= q.max_internal() && (x / q.step()).fract() == 0.0));
        }
        if self.record {
            self.writes.push((
                Region::Alpha(stage),
                MemWrite::Alpha { stage, values: values.clone() },
            ));
        }
        self.st.alpha[stage as usize] = values;
    }

    fn write_beta(&mut self, v: NodeRef, bits: Vec<u8>) {
        debug_assert_eq!(bits.len(), v.size());
        if v.stage == self.n {
            if self.record {
                self.writes
                    .push((Region::Beta(0, v.stage), MemWrite::Codeword { bits: bits.clone() }));
            }
            self.st.codeword = bits;
        } else {
            let side = side_of(v);
            if self.record {
                self.writes.push((
                    Region::Beta(side, v.stage),
                    MemWrite::Beta { side, stage: v.stage, bits: bits.clone() },
                ));
            }
            self.st.beta[side as usize][v.stage as usize] = bits;
        }
    }

    fn beta_left(&self, stage: u32) -> &[u8] {
        &self.st.beta[0][stage as usize]
    }

    fn beta_right(&self, stage: u32) -> &[u8] {
        &self.st.beta[1][stage as usize]
    }

    /// The g row for a node's right child: pairwise over the node's LLRs
    /// with the left-child bits (all zero for g0), saturated in fixed mode.
    fn g_row(&self, alpha: &[f64], beta_l: Option<&[u8]>) -> Vec<f64> {
        let half = alpha.len() / 2;
        (0..half)
            .map(|i| {
                let u = beta_l.map_or(0, |b| b[i]);
                self.arith.saturate(sc_reference::g(alpha[i], alpha[i + half], u))
            })
            .collect()
    }

    fn f_row(alpha: &[f64]) -> Vec<f64> {
        let half = alpha.len() / 2;
        (0..half)
            .map(|i| sc_reference::f_minsum(alpha[i], alpha[i + half]))
            .collect()
    }

    /// Size-8 node with a repetition left half and a parity-check right
    /// half, evaluated in place from the node's LLRs.
    fn repspc(&self, alpha: &[f64]) -> Vec<u8> {
        let t = Self::f_row(alpha);
        let left = fastssc_kernels::decode_rep(&t).beta;
        let row = self.g_row(alpha, Some(&left));
        let right = fastssc_kernels::decode_spc(&row).beta;
        sc_reference::combine(&left, &right)
    }

    fn exec_one(&mut self, op: Opcode, v: NodeRef) {
        use Opcode::*;
        match op {
            F => {
                let a = self.read_alpha(v);
                self.write_alpha(v.stage - 1, Self::f_row(&a));
            }
            G => {
                let a = self.read_alpha(v);
                let row = self.g_row(&a, Some(self.beta_left(v.stage - 1)));
                self.write_alpha(v.stage - 1, row);
            }
            G0 => {
                let a = self.read_alpha(v);
                let row = self.g_row(&a, None);
                self.write_alpha(v.stage - 1, row);
            }
            C => {
                let bits = sc_reference::combine(
                    self.beta_left(v.stage - 1),
                    self.beta_right(v.stage - 1),
                );
                self.write_beta(v, bits);
            }
            C0 => {
                let r = self.beta_right(v.stage - 1);
                let bits = [r, r].concat();
                self.write_beta(v, bits);
            }
            PR1 => {
                let a = self.read_alpha(v);
                let bl = self.beta_left(v.stage - 1).to_vec();
                let row = self.g_row(&a, Some(&bl));
                let br: Vec<u8> = row.iter().map(|&x| sc_reference::hard_decision(x)).collect();
                self.write_beta(v, sc_reference::combine(&bl, &br));
            }
            P01 => {
                let a = self.read_alpha(v);
                let row = self.g_row(&a, None);
                let br: Vec<u8> = row.iter().map(|&x| sc_reference::hard_decision(x)).collect();
                self.write_beta(v, [br.clone(), br].concat());
            }
            PRSPC => {
                let a = self.read_alpha(v);
                let bl = self.beta_left(v.stage - 1).to_vec();
                let row = self.g_row(&a, Some(&bl));
                let br = fastssc_kernels::decode_spc(&row).beta;
                self.write_beta(v, sc_reference::combine(&bl, &br));
            }
            P0SPC => {
                let a = self.read_alpha(v);
                let row = self.g_row(&a, None);
                let br = fastssc_kernels::decode_spc(&row).beta;
                self.write_beta(v, [br.clone(), br].concat());
            }
            ML => {
                let a = self.read_alpha(v);
                self.write_beta(v, fastssc_kernels::decode_ml4(&a).beta);
            }
            REP => {
                let a = self.read_alpha(v);
                self.write_beta(v, fastssc_kernels::decode_rep(&a).beta);
            }
            REPSPC => {
                let a = self.read_alpha(v);
                let bits = self.repspc(&a);
                self.write_beta(v, bits);
            }
            RATE0 => {
                self.write_beta(v, vec![0u8; v.size()]);
            }
            RATE1 => {
                let a = self.read_alpha(v);
                let bits = a.iter().map(|&x| sc_reference::hard_decision(x)).collect();
                self.write_beta(v, bits);
            }
            _ => unreachable!("merged opcodes execute via expansion"),
        }
    }

    /// Memory region a baseline operation writes.
    fn target_region(&self, op: Opcode, v: NodeRef) -> Region {
        use Opcode::*;
        match op {
            F | G | G0 => Region::Alpha(v.stage - 1),
            _ => Region::Beta(side_of(v), v.stage),
        }
    }

    fn backup(&self, r: Region) -> Backup {
        match r {
            Region::Alpha(s) => Backup::Alpha(self.st.alpha[s as usize].clone()),
            Region::Beta(side, s) => Backup::Beta(self.st.beta[side as usize][s as usize].clone()),
        }
    }

    fn restore(&mut self, r: Region, b: Backup) {
        match (r, b) {
            (Region::Alpha(s), Backup::Alpha(v)) => self.st.alpha[s as usize] = v,
            (Region::Beta(side, s), Backup::Beta(v)) => {
                self.st.beta[side as usize][s as usize] = v
            }
            _ => unreachable!(),
        }
    }

    fn exec_instruction(&mut self, ins: &Instruction) {
        if !ins.opcode.is_merged() {
            self.exec_one(ins.opcode, ins.node);
            return;
        }
        let parts = ins.opcode.expansion(ins.node, &ins.sub_refs);
        // F2 and GF write their intermediate LLR vector through to memory;
        // all other merged forms keep everything but the final result in
        // wires, which the VM models by rolling the memories back.
        let keep_alpha = matches!(ins.opcode, Opcode::F2 | Opcode::GF);
        let last = parts.len() - 1;
        let mut saved: HashMap<Region, Backup> = HashMap::new();
        for (k, &(op, v)) in parts.iter().enumerate() {
            let region = self.target_region(op, v);
            let commit = k == last || (keep_alpha && matches!(region, Region::Alpha(_)));
            if !commit {
                let b = self.backup(region);
                saved.entry(region).or_insert(b);
            }
            self.exec_one(op, v);
        }
        if self.record {
            // a rolled-back region never reaches memory, so its recorded
            // writes vanish from the trace as well
            let writes = std::mem::take(&mut self.writes);
            self.writes = writes
                .into_iter()
                .filter(|(r, _)| !saved.contains_key(r))
                .collect();
        }
        for (r, b) in saved.drain() {
            self.restore(r, b);
        }
    }
}

fn prepare_channel(llrs: &[f64], arith: Arith) -> Vec<f64> {
    match arith {
        Arith::Real => llrs.to_vec(),
        Arith::Fixed(q) => llrs.iter().map(|&x| quantize_channel(x, &q)).collect(),
    }
}

fn run(prog: &Program, llrs: &[f64], arith: Arith, record: bool) -> Result<(Exec, Vec<TraceEntry>)> {
    if llrs.len() != prog.spec.block_len() {
        return Err(Error::InvalidParameters(format!(
            "expected {} channel LLRs, got {}",
            prog.spec.block_len(),
            llrs.len()
        )));
    }
    if let Arith::Fixed(q) = arith {
        q.validate()?;
    }
    let n = prog.spec.n();
    let mut ex = Exec {
        st: DecoderState::new(n, prepare_channel(llrs, arith)),
        n,
        arith,
        record,
        writes: Vec::new(),
    };
    let mut entries = Vec::new();
    for (step, ins) in prog.instructions.iter().enumerate() {
        ex.writes.clear();
        ex.exec_instruction(ins);
        if record {
            let committed: Vec<MemWrite> =
                std::mem::take(&mut ex.writes).into_iter().map(|(_, w)| w).collect();
            entries.push(TraceEntry {
                step,
                op: ins.opcode.name(),
                stage: ins.stage,
                node: ins.node.index,
                cycles: ins.cycles(prog.pe),
                writes: committed,
            });
        }
    }
    Ok((ex, entries))
}

fn finish(ex: Exec) -> DecodeOutput {
    let x_hat = ex.st.codeword;
    let mut u_hat = x_hat.clone();
    polar_core::transform_n(&mut u_hat);
    DecodeOutput { u_hat, x_hat }
}

/// Run a compiled program over the given channel LLRs.
pub fn decode(prog: &Program, llrs: &[f64], arith: Arith) -> Result<DecodeOutput> {
    let (ex, _) = run(prog, llrs, arith, false)?;
    Ok(finish(ex))
}

/// Run a compiled program and record every committed memory write.
pub fn trace(prog: &Program, llrs: &[f64], arith: Arith) -> Result<(DecodeOutput, Vec<TraceEntry>)> {
    let (ex, entries) = run(prog, llrs, arith, true)?;
    Ok((finish(ex), entries))
}
