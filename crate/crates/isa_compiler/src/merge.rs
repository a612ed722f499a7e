//! Instruction merging. Three passes over the baseline stream, in a fixed
//! order: (1) whole-subtree translations, (2) cross-kind pairs, (3)
//! same-kind chains. Every merged instruction replaces operations whose
//! node fits within one PE word (size <= pe), so the rewritten stream
//! executes each merged instruction in a single cycle.

use crate::emit::assign_addresses;
use crate::{Instruction, Opcode, Program};
use polar_core::NodeRef;

pub(crate) fn low(i: &Instruction, pe: usize) -> bool {
    i.node.size() <= pe
}

pub(crate) fn is(i: &Instruction, op: Opcode, pe: usize) -> bool {
    i.opcode == op && low(i, pe)
}

/// Pass 1a: collapse fixed instruction shapes that decode an entire small
/// subtree (repetition + inner special) into one instruction.
fn pass_translations(prog: Vec<Instruction>, pe: usize) -> Vec<Instruction> {
    let mut out = Vec::with_capacity(prog.len());
    let mut i = 0;
    while i < prog.len() {
        // F, REP, G, REPSPC, C around one size-16 node
        if i + 4 < prog.len() {
            let (a, b, c, d, e) = (&prog[i], &prog[i + 1], &prog[i + 2], &prog[i + 3], &prog[i + 4]);
            if is(a, Opcode::F, pe)
                && a.node.size() == 16
                && b.opcode == Opcode::REP
                && b.node == a.node.left()
                && c.opcode == Opcode::G
                && c.node == a.node
                && d.opcode == Opcode::REPSPC
                && d.node == a.node.right()
                && e.opcode == Opcode::C
                && e.node == a.node
            {
                let v = a.node;
                out.push(Instruction::merged(
                    Opcode::RepRepSpc,
                    v,
                    vec![v, v.left(), v, v.right(), v],
                ));
                i += 5;
                continue;
            }
        }
        if i + 2 < prog.len() {
            let (a, b, c) = (&prog[i], &prog[i + 1], &prog[i + 2]);
            // F, REP, PR1 around one size-8 node
            if is(a, Opcode::F, pe)
                && a.node.size() == 8
                && b.opcode == Opcode::REP
                && b.node == a.node.left()
                && c.opcode == Opcode::PR1
                && c.node == a.node
            {
                let v = a.node;
                out.push(Instruction::merged(Opcode::RepRate1, v, vec![v, v.left(), v]));
                i += 3;
                continue;
            }
            // G0, ML, C0 around one size-8 node
            if is(a, Opcode::G0, pe)
                && a.node.size() == 8
                && b.opcode == Opcode::ML
                && b.node == a.node.right()
                && c.opcode == Opcode::C0
                && c.node == a.node
            {
                let v = a.node;
                out.push(Instruction::merged(Opcode::Rate0Ml, v, vec![v, v.right(), v]));
                i += 3;
                continue;
            }
        }
        out.push(prog[i].clone());
        i += 1;
    }
    out
}

/// Pass 1b: fold a repetition evaluation into the f operation feeding it.
fn pass_f_rep(prog: Vec<Instruction>, pe: usize) -> Vec<Instruction> {
    let mut out = Vec::with_capacity(prog.len());
    let mut i = 0;
    while i < prog.len() {
        if i + 1 < prog.len() {
            let (a, b) = (&prog[i], &prog[i + 1]);
            if is(a, Opcode::F, pe)
                && matches!(a.node.size(), 8 | 16 | 32)
                && b.opcode == Opcode::REP
                && b.node == a.node.left()
            {
                out.push(Instruction::merged(
                    Opcode::FREP,
                    a.node,
                    vec![a.node, a.node.left()],
                ));
                i += 2;
                continue;
            }
        }
        out.push(prog[i].clone());
        i += 1;
    }
    out
}

/// Pass 2: cross-kind pairs. A g followed by the f of its right child, and
/// an f followed by the g0 of its left child.
fn pass_cross(prog: Vec<Instruction>, pe: usize) -> Vec<Instruction> {
    let mut out = Vec::with_capacity(prog.len());
    let mut i = 0;
    while i < prog.len() {
        if i + 1 < prog.len() {
            let (a, b) = (&prog[i], &prog[i + 1]);
            if is(a, Opcode::G, pe) && is(b, Opcode::F, pe) && b.node == a.node.right() {
                out.push(Instruction::merged(Opcode::GF, a.node, vec![a.node, b.node]));
                i += 2;
                continue;
            }
            if is(a, Opcode::F, pe) && is(b, Opcode::G0, pe) && b.node == a.node.left() {
                out.push(Instruction::merged(Opcode::FG0, a.node, vec![a.node, b.node]));
                i += 2;
                continue;
            }
        }
        out.push(prog[i].clone());
        i += 1;
    }
    out
}

/// Stream adjacency for same-kind chains: f descends through left children,
/// g0 through right children, while combine chains ascend (each next
/// instruction's node is the parent, reached from its right child).
#[derive(Clone, Copy)]
pub(crate) enum ChainDir {
    DownLeft,
    DownRight,
    Up,
}

pub(crate) fn chained(prev: &Instruction, next: &Instruction, dir: ChainDir) -> bool {
    match dir {
        ChainDir::DownLeft => next.node == prev.node.left(),
        ChainDir::DownRight => next.node == prev.node.right(),
        ChainDir::Up => prev.node == next.node.right(),
    }
}

/// Replace a run of chained same-kind instructions. Descending runs pair
/// from the tail (deepest pair first, an odd head stays single); ascending
/// combine runs group head-first in threes, with a pair as remainder.
fn rewrite_run(run: &[Instruction], op2: Opcode, op3: Option<Opcode>, out: &mut Vec<Instruction>) {
    if let Some(op3) = op3 {
        let mut k = 0;
        while run.len() - k >= 3 {
            let subs: Vec<NodeRef> = run[k..k + 3].iter().map(|x| x.node).collect();
            out.push(Instruction::merged(op3, subs[2], subs));
            k += 3;
        }
        match run.len() - k {
            2 => {
                let subs = vec![run[k].node, run[k + 1].node];
                out.push(Instruction::merged(op2, subs[1], subs));
            }
            1 => out.push(run[k].clone()),
            _ => {}
        }
    } else {
        // tail pairing == head pairing once an odd head element is skipped
        let mut k = run.len() % 2;
        if k == 1 {
            out.push(run[0].clone());
        }
        while k + 1 < run.len() {
            let subs = vec![run[k].node, run[k + 1].node];
            out.push(Instruction::merged(op2, subs[0], subs));
            k += 2;
        }
    }
}

fn pass_chain(
    prog: Vec<Instruction>,
    kind: Opcode,
    dir: ChainDir,
    op2: Opcode,
    op3: Option<Opcode>,
    pe: usize,
) -> Vec<Instruction> {
    let mut out = Vec::with_capacity(prog.len());
    let mut i = 0;
    while i < prog.len() {
        if is(&prog[i], kind, pe) {
            let mut j = i;
            while j + 1 < prog.len()
                && is(&prog[j + 1], kind, pe)
                && chained(&prog[j], &prog[j + 1], dir)
            {
                j += 1;
            }
            if j > i {
                rewrite_run(&prog[i..=j], op2, op3, &mut out);
            } else {
                out.push(prog[i].clone());
            }
            i = j + 1;
        } else {
            out.push(prog[i].clone());
            i += 1;
        }
    }
    out
}

/// Rewrite a baseline program with merged instructions.
///
/// Already-merged streams pass through unchanged apart from a fresh scan
/// (merged opcodes never re-match), so the rewrite is idempotent.
pub fn apply_merge_passes(p: &Program) -> Program {
    let pe = p.pe;
    let mut ins = p.instructions.clone();
    ins = pass_translations(ins, pe);
    ins = pass_f_rep(ins, pe);
    ins = pass_cross(ins, pe);
    ins = pass_chain(ins, Opcode::F, ChainDir::DownLeft, Opcode::F2, None, pe);
    ins = pass_chain(ins, Opcode::G0, ChainDir::DownRight, Opcode::G02, None, pe);
    ins = pass_chain(ins, Opcode::C, ChainDir::Up, Opcode::C2, Some(Opcode::C3), pe);
    ins = pass_chain(ins, Opcode::C0, ChainDir::Up, Opcode::C02, Some(Opcode::C03), pe);
    assign_addresses(&mut ins, p.spec.n(), pe);
    Program {
        spec: p.spec.clone(),
        pe,
        instructions: ins,
    }
}
