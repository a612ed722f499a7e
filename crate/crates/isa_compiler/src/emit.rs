//! Baseline instruction emission: depth-first walk of the pruned decoder
//! tree, cutting recursion at recognizable node patterns and fusing
//! single-instruction parent handling where the child mix allows it.

use crate::{alpha_region, Error, Instruction, Opcode, Program, Result};
use polar_core::{classify, CodeSpec, NodeKind, NodeRef};

/// Size caps for pattern recognition. Repetition nodes wider than `rep_max`
/// and single-parity-check nodes wider than `spc_max` are decomposed instead
/// of being handled by a dedicated evaluator, keeping the evaluator datapath
/// narrow regardless of the PE count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecognizerCaps {
    pub rep_max: usize,
    pub spc_max: usize,
}

impl Default for RecognizerCaps {
    fn default() -> Self {
        RecognizerCaps {
            rep_max: 64,
            spc_max: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Recog {
    Rate0,
    Rate1,
    Rep,
    Spc,
    Ml,
    RepSpc,
    RateR,
}

fn recognize(spec: &CodeSpec, caps: &RecognizerCaps, v: NodeRef) -> Recog {
    match classify(spec, v) {
        NodeKind::Rate0 => Recog::Rate0,
        NodeKind::Rate1 => Recog::Rate1,
        NodeKind::Rep if v.size() <= caps.rep_max => Recog::Rep,
        NodeKind::Rep => Recog::RateR,
        NodeKind::Spc if v.size() <= caps.spc_max => Recog::Spc,
        NodeKind::Spc => Recog::RateR,
        NodeKind::Ml => Recog::Ml,
        NodeKind::RateR => {
            if v.stage == 3
                && classify(spec, v.left()) == NodeKind::Rep
                && classify(spec, v.right()) == NodeKind::Spc
            {
                Recog::RepSpc
            } else {
                Recog::RateR
            }
        }
    }
}

fn emit_node(spec: &CodeSpec, caps: &RecognizerCaps, v: NodeRef, out: &mut Vec<Instruction>) {
    match recognize(spec, caps, v) {
        Recog::Rate0 => out.push(Instruction::new(Opcode::RATE0, v)),
        Recog::Rate1 => out.push(Instruction::new(Opcode::RATE1, v)),
        Recog::Rep => out.push(Instruction::new(Opcode::REP, v)),
        Recog::Ml => out.push(Instruction::new(Opcode::ML, v)),
        Recog::RepSpc => out.push(Instruction::new(Opcode::REPSPC, v)),
        // SPC nodes have no standalone instruction: reached on the left they
        // decompose like any rate-R node, reached on the right the parent
        // fuses them into PRSPC / P0SPC.
        Recog::Spc | Recog::RateR => emit_internal(spec, caps, v, out),
    }
}

fn emit_internal(spec: &CodeSpec, caps: &RecognizerCaps, v: NodeRef, out: &mut Vec<Instruction>) {
    debug_assert!(v.stage >= 1);
    let l = v.left();
    let r = v.right();
    let kl = recognize(spec, caps, l);
    let kr = recognize(spec, caps, r);
    match (kl, kr) {
        (Recog::Rate0, Recog::Rate1) => out.push(Instruction::new(Opcode::P01, v)),
        (Recog::Rate0, Recog::Spc) => out.push(Instruction::new(Opcode::P0SPC, v)),
        (Recog::Rate0, _) => {
            out.push(Instruction::new(Opcode::G0, v));
            emit_node(spec, caps, r, out);
            out.push(Instruction::new(Opcode::C0, v));
        }
        (_, Recog::Rate1) => {
            out.push(Instruction::new(Opcode::F, v));
            emit_node(spec, caps, l, out);
            out.push(Instruction::new(Opcode::PR1, v));
        }
        (_, Recog::Spc) => {
            out.push(Instruction::new(Opcode::F, v));
            emit_node(spec, caps, l, out);
            out.push(Instruction::new(Opcode::PRSPC, v));
        }
        _ => {
            out.push(Instruction::new(Opcode::F, v));
            emit_node(spec, caps, l, out);
            out.push(Instruction::new(Opcode::G, v));
            emit_node(spec, caps, r, out);
            out.push(Instruction::new(Opcode::C, v));
        }
    }
}

pub(crate) fn assign_addresses(ins: &mut [Instruction], n: u32, pe: usize) {
    for i in ins.iter_mut() {
        let coords = if i.stage == n {
            (0, 0)
        } else {
            alpha_region(i.stage, pe)
        };
        i.alpha_addr = coords;
        i.beta_addr = coords;
    }
}

pub fn compile_baseline_with(spec: &CodeSpec, pe: usize, caps: &RecognizerCaps) -> Result<Program> {
    if !pe.is_power_of_two() || pe < 4 || pe > spec.block_len() / 2 {
        return Err(Error::InvalidParameters(format!(
            "pe must be a power of two in [4, N/2]; got pe={} for N={}",
            pe,
            spec.block_len()
        )));
    }
    let mut instructions = Vec::new();
    emit_node(spec, caps, spec.root(), &mut instructions);
    assign_addresses(&mut instructions, spec.n(), pe);
    Ok(Program {
        spec: spec.clone(),
        pe,
        instructions,
    })
}

/// Compile the decoder tree into the baseline (unmerged) instruction stream.
pub fn compile_baseline(spec: &CodeSpec, pe: usize) -> Result<Program> {
    compile_baseline_with(spec, pe, &RecognizerCaps::default())
}
