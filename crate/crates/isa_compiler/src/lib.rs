//! Compiles a polar code's pruned decoder tree into a linear instruction
//! stream for a semi-parallel decoder with `pe` processing elements, then
//! optionally rewrites the stream with merged instructions that collapse
//! short-node sequences into single-cycle operations.

use polar_core::{CodeSpec, NodeRef};
use serde::{Deserialize, Serialize};

mod emit;
mod listing;
mod merge;
mod potentials;

pub use emit::{compile_baseline, compile_baseline_with, RecognizerCaps};
pub use listing::{read_program, write_program};
pub use merge::apply_merge_passes;
pub use potentials::{analyze_potentials, MergeScenario};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("malformed listing: {0}")]
    MalformedListing(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Code(#[from] polar_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Instruction set: baseline tree operations plus merged forms.
///
/// The `P*` opcodes fuse the right-child g computation, the right child's
/// decision, and the parent combine into one operation. Merged opcodes
/// (`F2` onward) are introduced by [`apply_merge_passes`] and never by the
/// baseline compiler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Opcode {
    F,
    G,
    G0,
    C,
    C0,
    PR1,
    P01,
    PRSPC,
    P0SPC,
    ML,
    REP,
    REPSPC,
    RATE0,
    RATE1,
    // merged: same-kind chains
    F2,
    G02,
    C2,
    C3,
    C02,
    C03,
    // merged: cross-kind pairs
    GF,
    FG0,
    FREP,
    // merged: subtree translations
    #[serde(rename = "REP_REPSPC")]
    RepRepSpc,
    #[serde(rename = "REP_RATE1")]
    RepRate1,
    #[serde(rename = "RATE0_ML")]
    Rate0Ml,
}

impl Opcode {
    pub fn is_merged(self) -> bool {
        use Opcode::*;
        matches!(
            self,
            F2 | G02 | C2 | C3 | C02 | C03 | GF | FG0 | FREP | RepRepSpc | RepRate1 | Rate0Ml
        )
    }

    pub fn name(self) -> &'static str {
        use Opcode::*;
        match self {
            F => "F",
            G => "G",
            G0 => "G0",
            C => "C",
            C0 => "C0",
            PR1 => "PR1",
            P01 => "P01",
            PRSPC => "PRSPC",
            P0SPC => "P0SPC",
            ML => "ML",
            REP => "REP",
            REPSPC => "REPSPC",
            RATE0 => "RATE0",
            RATE1 => "RATE1",
            F2 => "F2",
            G02 => "G02",
            C2 => "C2",
            C3 => "C3",
            C02 => "C02",
            C03 => "C03",
            GF => "GF",
            FG0 => "FG0",
            FREP => "FREP",
            RepRepSpc => "REP_REPSPC",
            RepRate1 => "REP_RATE1",
            Rate0Ml => "RATE0_ML",
        }
    }

    /// Constituent baseline operations of a merged opcode, given its
    /// `sub_refs`. Unmerged opcodes expand to themselves.
    pub fn expansion(self, node: NodeRef, sub_refs: &[NodeRef]) -> Vec<(Opcode, NodeRef)> {
        use Opcode::*;
        let seq: &[Opcode] = match self {
            F2 => &[F, F],
            G02 => &[G0, G0],
            C2 => &[C, C],
            C3 => &[C, C, C],
            C02 => &[C0, C0],
            C03 => &[C0, C0, C0],
            GF => &[G, F],
            FG0 => &[F, G0],
            FREP => &[F, REP],
            RepRepSpc => &[F, REP, G, REPSPC, C],
            RepRate1 => &[F, REP, PR1],
            Rate0Ml => &[G0, ML, C0],
            _ => return vec![(self, node)],
        };
        debug_assert_eq!(seq.len(), sub_refs.len());
        seq.iter().copied().zip(sub_refs.iter().copied()).collect()
    }
}

impl std::fmt::Display for Opcode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One decoder operation. `node` is the tree node whose output the operation
/// ultimately produces; merged instructions keep the full constituent node
/// list in `sub_refs` (empty for unmerged instructions).
///
/// `alpha_addr` / `beta_addr` are the (word, offset) coordinates where the
/// governing node's LLR and bit regions live in the packed stage memories
/// (both are (0, 0) at the root, whose data sits in the dedicated channel
/// and decided-codeword memories).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instruction {
    pub opcode: Opcode,
    pub stage: u32,
    pub node: NodeRef,
    pub sub_refs: Vec<NodeRef>,
    pub alpha_addr: (u32, u32),
    pub beta_addr: (u32, u32),
}

impl Instruction {
    pub fn new(opcode: Opcode, node: NodeRef) -> Self {
        Instruction {
            opcode,
            stage: node.stage,
            node,
            sub_refs: Vec::new(),
            alpha_addr: (0, 0),
            beta_addr: (0, 0),
        }
    }

    pub fn merged(opcode: Opcode, node: NodeRef, sub_refs: Vec<NodeRef>) -> Self {
        Instruction {
            opcode,
            stage: node.stage,
            node,
            sub_refs,
            alpha_addr: (0, 0),
            beta_addr: (0, 0),
        }
    }

    /// Clock cycles on a semi-parallel datapath with `pe` processing
    /// elements. LLR-domain tree operations stream `2^(stage-1)` element
    /// pairs through the PEs; leaf evaluators and every merged instruction
    /// complete in one cycle.
    pub fn cycles(&self, pe: usize) -> usize {
        use Opcode::*;
        let size = self.node.size();
        match self.opcode {
            F | G | G0 | C | C0 | PR1 | P01 | PRSPC | P0SPC => (size / (2 * pe)).max(1),
            ML | REP | REPSPC => 1,
            RATE0 | RATE1 => size.div_ceil(2 * pe).max(1),
            _ => 1,
        }
    }
}

/// A compiled instruction stream together with the code and datapath width
/// it was compiled for.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub spec: CodeSpec,
    pub pe: usize,
    pub instructions: Vec<Instruction>,
}

impl Program {
    pub fn steps(&self) -> usize {
        self.instructions.len()
    }

    pub fn cycles(&self) -> usize {
        self.instructions.iter().map(|i| i.cycles(self.pe)).sum()
    }

    /// Opcode histogram, keyed by opcode name.
    pub fn histogram(&self) -> std::collections::BTreeMap<&'static str, usize> {
        let mut h = std::collections::BTreeMap::new();
        for i in &self.instructions {
            *h.entry(i.opcode.name()).or_insert(0) += 1;
        }
        h
    }
}

/// Summary counters for a compiled program.
#[derive(Debug, Clone, Serialize)]
pub struct ProgramStats {
    pub steps: usize,
    pub cycles: usize,
    pub histogram: std::collections::BTreeMap<String, usize>,
}

pub fn program_stats(p: &Program) -> ProgramStats {
    ProgramStats {
        steps: p.steps(),
        cycles: p.cycles(),
        histogram: p
            .histogram()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
    }
}

/// (word, offset) coordinate of the stage-`stage` LLR region in the packed
/// per-stage memory for a length-`2^n` code. Stages at or below the PE
/// boundary share word 0, packed back to back; wider stages occupy whole
/// words above them.
pub(crate) fn alpha_region(stage: u32, pe: usize) -> (u32, u32) {
    let lg = pe.trailing_zeros();
    if stage <= lg {
        (0, 2 * pe as u32 - (1u32 << (stage + 1)))
    } else {
        let mut word = 1u32;
        for t in lg + 1..stage {
            word += ((1usize << t) / (2 * pe)).max(1) as u32;
        }
        (word, 0)
    }
}
