//! Cost models for a semi-parallel decoder: per-program latency, LLR memory
//! footprint under the conventional per-stage word allocation versus the
//! packed allocation that shares one word among all narrow stages, and the
//! silicon share such a decoder spends on its semi-parallel adders.

use isa_compiler::{Instruction, Program};
use serde::Serialize;
use std::collections::BTreeMap;

/// Clock cycles one instruction occupies with `pe` processing elements.
pub fn cycles_of(ins: &Instruction, pe: usize) -> usize {
    ins.cycles(pe)
}

#[derive(Debug, Clone, Serialize)]
pub struct LatencyReport {
    pub steps: usize,
    pub cycles: usize,
    /// opcode name -> (instruction count, total cycles)
    pub by_opcode: BTreeMap<String, (usize, usize)>,
}

pub fn latency(p: &Program) -> LatencyReport {
    let mut by_opcode: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for i in &p.instructions {
        let e = by_opcode.entry(i.opcode.name().to_string()).or_insert((0, 0));
        e.0 += 1;
        e.1 += i.cycles(p.pe);
    }
    LatencyReport {
        steps: p.steps(),
        cycles: p.cycles(),
        by_opcode,
    }
}

fn stage_words(stage: u32, pe: usize) -> usize {
    ((1usize << stage) / (2 * pe)).max(1)
}

/// Memory words (of 2*pe LLRs each) when every stage from 2 up to n-1 gets
/// its own word allocation, narrow stages rounding up to a full word.
pub fn words_baseline(n: u32, pe: usize) -> usize {
    (2..n).map(|s| stage_words(s, pe)).sum()
}

/// Memory words when all stages narrow than the PE word share one packed
/// word; stages above the PE boundary are unchanged.
pub fn words_proposed(n: u32, pe: usize) -> usize {
    let lg = pe.trailing_zeros().max(2);
    (lg..n).map(|s| stage_words(s, pe)).sum()
}

/// Fraction (percent) of allocated LLR slots that stage data actually uses:
/// sum of stage sizes 2^2 .. 2^(n-1) over the allocated capacity.
pub fn utilization(n: u32, pe: usize, packed: bool) -> f64 {
    let used: usize = (2..n).map(|s| 1usize << s).sum();
    let words = if packed {
        words_proposed(n, pe)
    } else {
        words_baseline(n, pe)
    };
    100.0 * used as f64 / (words * 2 * pe) as f64
}

/// Share (percent) of the decoder's processing-element adders sitting in the
/// semi-parallel (stage-sequencing) part rather than the PE word itself:
/// log2(N) adder stages against 4*pe PE adders plus the log2(N/(4*pe))
/// sequencing levels.
pub fn theta_sp(block_len: usize, pe: usize) -> f64 {
    let lgn = (block_len.trailing_zeros()) as f64;
    let seq = ((block_len as f64) / (4.0 * pe as f64)).log2();
    100.0 * lgn / (4.0 * pe as f64 + seq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StageRegion {
    pub stage: u32,
    pub word: usize,
    pub offset: usize,
    pub len: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MemoryLayout {
    pub words: usize,
    pub word_len: usize,
    pub regions: Vec<StageRegion>,
}

/// One word run per stage, stages 2..n-1 in ascending order.
pub fn layout_baseline(n: u32, pe: usize) -> MemoryLayout {
    let mut regions = Vec::new();
    let mut word = 0usize;
    for stage in 2..n {
        let w = stage_words(stage, pe);
        regions.push(StageRegion {
            stage,
            word,
            offset: 0,
            len: 1usize << stage,
        });
        word += w;
    }
    MemoryLayout {
        words: word,
        word_len: 2 * pe,
        regions,
    }
}

/// Packed layout: stages at or below the PE boundary share word 0 back to
/// back (stage s at offset 2*pe - 2^(s+1)), wider stages follow sequentially.
pub fn layout_proposed(n: u32, pe: usize) -> MemoryLayout {
    let lg = pe.trailing_zeros().max(2);
    let mut regions = Vec::new();
    for stage in 2..=lg.min(n - 1) {
        regions.push(StageRegion {
            stage,
            word: 0,
            offset: 2 * pe - (1usize << (stage + 1)),
            len: 1usize << stage,
        });
    }
    let mut word = 1usize;
    for stage in lg + 1..n {
        regions.push(StageRegion {
            stage,
            word,
            offset: 0,
            len: 1usize << stage,
        });
        word += stage_words(stage, pe);
    }
    MemoryLayout {
        words: word.max(1),
        word_len: 2 * pe,
        regions,
    }
}
