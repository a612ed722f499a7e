//! What-if analysis: for each merging scenario, the share of baseline
//! decoding cycles that would be saved if only that scenario were applied
//! greedily across the stream. Run on a baseline (unmerged) program.

use crate::merge::{chained, is, ChainDir};
use crate::{Instruction, Opcode, Program};

/// A single merging opportunity class. The chain scenarios come in the
/// widths 2..4 (f, combine) or 2..3 (g0), cross scenarios are adjacent
/// pairs, and the remaining entries are whole-subtree translations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MergeScenario {
    F2,
    F3,
    F4,
    G02,
    G03,
    C2,
    C3,
    C4,
    C02,
    C03,
    GF,
    FG0,
    CG,
    C0G,
    FRep,
    RepRepSpc,
    RepRate1,
    Rate0Ml,
    Rate0RepSpc,
    RepSpcRate1,
    MlRate1,
}

impl MergeScenario {
    pub const ALL: [MergeScenario; 21] = [
        MergeScenario::F2,
        MergeScenario::F3,
        MergeScenario::F4,
        MergeScenario::G02,
        MergeScenario::G03,
        MergeScenario::C2,
        MergeScenario::C3,
        MergeScenario::C4,
        MergeScenario::C02,
        MergeScenario::C03,
        MergeScenario::GF,
        MergeScenario::FG0,
        MergeScenario::CG,
        MergeScenario::C0G,
        MergeScenario::FRep,
        MergeScenario::RepRepSpc,
        MergeScenario::RepRate1,
        MergeScenario::Rate0Ml,
        MergeScenario::Rate0RepSpc,
        MergeScenario::RepSpcRate1,
        MergeScenario::MlRate1,
    ];

    pub fn name(self) -> &'static str {
        use MergeScenario::*;
        match self {
            F2 => "F2",
            F3 => "F3",
            F4 => "F4",
            G02 => "G02",
            G03 => "G03",
            C2 => "C2",
            C3 => "C3",
            C4 => "C4",
            C02 => "C02",
            C03 => "C03",
            GF => "GF",
            FG0 => "FG0",
            CG => "CG",
            C0G => "C0G",
            FRep => "FREP",
            RepRepSpc => "REP_REPSPC",
            RepRate1 => "REP_RATE1",
            Rate0Ml => "RATE0_ML",
            Rate0RepSpc => "RATE0_REPSPC",
            RepSpcRate1 => "REPSPC_RATE1",
            MlRate1 => "ML_RATE1",
        }
    }
}

impl std::fmt::Display for MergeScenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MergeScenario {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MergeScenario::ALL
            .iter()
            .copied()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| crate::Error::InvalidParameters(format!("unknown merge scenario: {s}")))
    }
}

fn chain_save(ins: &[Instruction], kind: Opcode, dir: ChainDir, k: usize, pe: usize) -> usize {
    let mut saved = 0;
    let mut i = 0;
    while i < ins.len() {
        if is(&ins[i], kind, pe) {
            let mut j = i;
            while j + 1 < ins.len() && is(&ins[j + 1], kind, pe) && chained(&ins[j], &ins[j + 1], dir)
            {
                j += 1;
            }
            saved += ((j - i + 1) / k) * (k - 1);
            i = j + 1;
        } else {
            i += 1;
        }
    }
    saved
}

fn pair_save(ins: &[Instruction], pred: impl Fn(&Instruction, &Instruction) -> bool) -> usize {
    let mut saved = 0;
    let mut i = 0;
    while i + 1 < ins.len() {
        if pred(&ins[i], &ins[i + 1]) {
            saved += 1;
            i += 2;
        } else {
            i += 1;
        }
    }
    saved
}

fn seq_save(
    ins: &[Instruction],
    width: usize,
    gain: usize,
    pred: impl Fn(&[Instruction]) -> bool,
) -> usize {
    let mut saved = 0;
    let mut i = 0;
    while i + width <= ins.len() {
        if pred(&ins[i..i + width]) {
            saved += gain;
            i += width;
        } else {
            i += 1;
        }
    }
    saved
}

fn saved_cycles(p: &Program, s: MergeScenario) -> usize {
    use ChainDir::*;
    use MergeScenario as M;
    use Opcode as O;
    let ins = &p.instructions;
    let pe = p.pe;
    match s {
        M::F2 => chain_save(ins, O::F, DownLeft, 2, pe),
        M::F3 => chain_save(ins, O::F, DownLeft, 3, pe),
        M::F4 => chain_save(ins, O::F, DownLeft, 4, pe),
        M::G02 => chain_save(ins, O::G0, DownRight, 2, pe),
        M::G03 => chain_save(ins, O::G0, DownRight, 3, pe),
        M::C2 => chain_save(ins, O::C, Up, 2, pe),
        M::C3 => chain_save(ins, O::C, Up, 3, pe),
        M::C4 => chain_save(ins, O::C, Up, 4, pe),
        M::C02 => chain_save(ins, O::C0, Up, 2, pe),
        M::C03 => chain_save(ins, O::C0, Up, 3, pe),
        M::GF => pair_save(ins, |a, b| {
            is(a, O::G, pe) && is(b, O::F, pe) && b.node == a.node.right()
        }),
        M::FG0 => pair_save(ins, |a, b| {
            is(a, O::F, pe) && is(b, O::G0, pe) && b.node == a.node.left()
        }),
        M::CG => pair_save(ins, |a, b| {
            is(a, O::C, pe) && is(b, O::G, pe) && a.node == b.node.left()
        }),
        M::C0G => pair_save(ins, |a, b| {
            is(a, O::C0, pe) && is(b, O::G, pe) && a.node == b.node.left()
        }),
        M::FRep => pair_save(ins, |a, b| {
            is(a, O::F, pe)
                && matches!(a.node.size(), 8 | 16 | 32)
                && b.opcode == O::REP
                && b.node == a.node.left()
        }),
        M::RepRepSpc => seq_save(ins, 5, 4, |w| {
            is(&w[0], O::F, pe)
                && w[0].node.size() == 16
                && w[1].opcode == O::REP
                && w[1].node == w[0].node.left()
                && w[2].opcode == O::G
                && w[2].node == w[0].node
                && w[3].opcode == O::REPSPC
                && w[3].node == w[0].node.right()
                && w[4].opcode == O::C
                && w[4].node == w[0].node
        }),
        M::RepRate1 => seq_save(ins, 3, 2, |w| {
            is(&w[0], O::F, pe)
                && w[0].node.size() == 8
                && w[1].opcode == O::REP
                && w[1].node == w[0].node.left()
                && w[2].opcode == O::PR1
                && w[2].node == w[0].node
        }),
        M::Rate0Ml => seq_save(ins, 3, 2, |w| {
            is(&w[0], O::G0, pe)
                && w[0].node.size() == 8
                && w[1].opcode == O::ML
                && w[1].node == w[0].node.right()
                && w[2].opcode == O::C0
                && w[2].node == w[0].node
        }),
        M::Rate0RepSpc => seq_save(ins, 3, 2, |w| {
            is(&w[0], O::G0, pe)
                && w[0].node.size() == 16
                && w[1].opcode == O::REPSPC
                && w[1].node == w[0].node.right()
                && w[2].opcode == O::C0
                && w[2].node == w[0].node
        }),
        M::RepSpcRate1 => seq_save(ins, 3, 2, |w| {
            is(&w[0], O::F, pe)
                && w[0].node.size() == 16
                && w[1].opcode == O::REPSPC
                && w[1].node == w[0].node.left()
                && w[2].opcode == O::PR1
                && w[2].node == w[0].node
        }),
        M::MlRate1 => seq_save(ins, 3, 2, |w| {
            is(&w[0], O::F, pe)
                && w[0].node.size() == 8
                && w[1].opcode == O::ML
                && w[1].node == w[0].node.left()
                && w[2].opcode == O::PR1
                && w[2].node == w[0].node
        }),
    }
}

/// Percentage of the program's total cycle count that scenario `s` alone
/// would save. Meaningful on baseline programs; merged opcodes simply never
/// match, and the `low` guard keeps every count to within-PE-word nodes.
pub fn analyze_potentials(p: &Program, s: MergeScenario) -> f64 {
    100.0 * saved_cycles(p, s) as f64 / p.cycles() as f64
}
