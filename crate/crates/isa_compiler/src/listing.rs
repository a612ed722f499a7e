//! JSONL program listings. The first line carries the code and datapath
//! parameters; each following line is one instruction with a stable field
//! order, so listings diff cleanly across compiler changes.

use crate::emit::assign_addresses;
use crate::{Error, Instruction, Opcode, Program, Result};
use polar_core::{CodeSpec, NodeRef};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    code: CodeLine,
    pe: usize,
}

#[derive(Serialize, Deserialize)]
struct CodeLine {
    block_len: usize,
    info_len: usize,
    frozen: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct InstructionLine {
    step: usize,
    op: Opcode,
    stage: u32,
    node: usize,
    subs: Vec<(u32, usize)>,
    cycles: usize,
}

pub fn write_program<W: Write>(p: &Program, mut w: W) -> Result<()> {
    let header = HeaderLine {
        code: CodeLine {
            block_len: p.spec.block_len(),
            info_len: p.spec.info_len(),
            frozen: p.spec.frozen_set().to_vec(),
        },
        pe: p.pe,
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for (step, ins) in p.instructions.iter().enumerate() {
        let line = InstructionLine {
            step,
            op: ins.opcode,
            stage: ins.stage,
            node: ins.node.index,
            subs: ins.sub_refs.iter().map(|r| (r.stage, r.index)).collect(),
            cycles: ins.cycles(p.pe),
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_program<R: BufRead>(r: R) -> Result<Program> {
    let mut lines = r.lines();
    let header: HeaderLine = match lines.next() {
        Some(l) => serde_json::from_str(&l?)?,
        None => return Err(Error::MalformedListing("empty listing".into())),
    };
    let spec = CodeSpec::from_frozen(header.code.block_len, header.code.frozen.clone())?;
    if !header.pe.is_power_of_two() || header.pe < 4 || header.pe > spec.block_len() / 2 {
        return Err(Error::MalformedListing(format!("bad pe {}", header.pe)));
    }
    if spec.info_len() != header.code.info_len {
        return Err(Error::MalformedListing(format!(
            "header info_len {} does not match frozen set (implies {})",
            header.code.info_len,
            spec.info_len()
        )));
    }
    let mut instructions = Vec::new();
    for (idx, l) in lines.enumerate() {
        let l = l?;
        if l.trim().is_empty() {
            continue;
        }
        let line: InstructionLine =
            serde_json::from_str(&l).map_err(|e| Error::MalformedListing(format!("line {}: {e}", idx + 2)))?;
        let node = NodeRef {
            stage: line.stage,
            index: line.node,
        };
        if node.span().end > spec.block_len() {
            return Err(Error::MalformedListing(format!(
                "line {}: node out of range",
                idx + 2
            )));
        }
        let subs: Vec<NodeRef> = line
            .subs
            .iter()
            .map(|&(stage, index)| NodeRef { stage, index })
            .collect();
        let ins = if subs.is_empty() {
            Instruction::new(line.op, node)
        } else {
            Instruction::merged(line.op, node, subs)
        };
        instructions.push(ins);
    }
    assign_addresses(&mut instructions, spec.n(), header.pe);
    Ok(Program {
        spec,
        pe: header.pe,
        instructions,
    })
}
