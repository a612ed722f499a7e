//! Polar code specification: 5G reliability construction, GF(2) encoding and
//! node-pattern classification over the decoder tree.

use std::ops::Range;
use std::sync::OnceLock;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("unsupported length {0}: bundled reliability sequence covers N <= 1024")]
    UnsupportedLength(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Universal reliability sequence for N up to 1024, least reliable first.
const SEQUENCE_TXT: &str = include_str!("../data/reliability_5g_1024.txt");

fn sequence() -> &'static [u16] {
    static SEQ: OnceLock<Vec<u16>> = OnceLock::new();
    SEQ.get_or_init(|| {
        let v: Vec<u16> = SEQUENCE_TXT
            .lines()
            .map(|l| l.trim().parse().expect("bundled sequence is well-formed"))
            .collect();
        assert_eq!(v.len(), 1024);
        v
    })
}

/// Code parameters plus the frozen index set; fixes the shape of the decoder tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    n: u32,
    block_len: usize,
    info_len: usize,
    frozen_set: Vec<usize>,
    frozen_mask: Vec<bool>,
}

impl CodeSpec {
    pub fn from_frozen(block_len: usize, frozen_set: Vec<usize>) -> Result<Self> {
        if !block_len.is_power_of_two() || block_len < 2 {
            return Err(Error::InvalidParameters(format!(
                "block length {block_len} is not a power of two >= 2"
            )));
        }
        let mut frozen_set = frozen_set;
        frozen_set.sort_unstable();
        frozen_set.dedup();
        if frozen_set.len() >= block_len {
            return Err(Error::InvalidParameters("no information positions left".into()));
        }
        if let Some(&bad) = frozen_set.iter().find(|&&i| i >= block_len) {
            return Err(Error::InvalidParameters(format!(
                "frozen index {bad} out of range for N={block_len}"
            )));
        }
        let mut frozen_mask = vec![false; block_len];
        for &i in &frozen_set {
            frozen_mask[i] = true;
        }
        Ok(CodeSpec {
            n: block_len.trailing_zeros(),
            info_len: block_len - frozen_set.len(),
            block_len,
            frozen_set,
            frozen_mask,
        })
    }

    /// Tree depth (N = 2^n).
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn info_len(&self) -> usize {
        self.info_len
    }

    pub fn rate(&self) -> f64 {
        self.info_len as f64 / self.block_len as f64
    }

    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen_set
    }

    pub fn is_frozen(&self, leaf: usize) -> bool {
        self.frozen_mask[leaf]
    }

    pub fn root(&self) -> NodeRef {
        NodeRef { stage: self.n, index: 0 }
    }
}

/// Leaf-pattern class of a subtree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Rate0,
    Rate1,
    Rep,
    Spc,
    Ml,
    RateR,
}

/// Position of a node in the tree: `stage` is the subtree depth (leaves at 0),
/// `index` counts nodes left to right within the stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeRef {
    pub stage: u32,
    pub index: usize,
}

impl NodeRef {
    pub fn size(&self) -> usize {
        1 << self.stage
    }

    /// Leaf interval covered by this node.
    pub fn span(&self) -> Range<usize> {
        let lo = self.index << self.stage;
        lo..lo + self.size()
    }

    pub fn left(&self) -> NodeRef {
        debug_assert!(self.stage > 0);
        NodeRef { stage: self.stage - 1, index: 2 * self.index }
    }

    pub fn right(&self) -> NodeRef {
        debug_assert!(self.stage > 0);
        NodeRef { stage: self.stage - 1, index: 2 * self.index + 1 }
    }

    pub fn is_right_child(&self) -> bool {
        self.index % 2 == 1
    }

    pub fn parent(&self) -> NodeRef {
        NodeRef { stage: self.stage + 1, index: self.index / 2 }
    }
}

/// Frozen set from the bundled universal reliability sequence: restrict to
/// [0, N), take the N-K least reliable.
pub fn construct_5g(block_len: usize, info_len: usize) -> Result<CodeSpec> {
    if block_len > 1024 {
        return Err(Error::UnsupportedLength(block_len));
    }
    if !block_len.is_power_of_two() || block_len < 2 {
        return Err(Error::InvalidParameters(format!(
            "block length {block_len} is not a power of two >= 2"
        )));
    }
    if info_len == 0 || info_len > block_len {
        return Err(Error::InvalidParameters(format!(
            "K={info_len} out of range for N={block_len}"
        )));
    }
    let frozen: Vec<usize> = sequence()
        .iter()
        .map(|&i| i as usize)
        .filter(|&i| i < block_len)
        .take(block_len - info_len)
        .collect();
    CodeSpec::from_frozen(block_len, frozen)
}

/// In-place GF(2) polar transform (butterfly form of the generator-matrix
/// multiply). Self-inverse.
pub fn transform_n(bits: &mut [u8]) {
    debug_assert!(bits.len().is_power_of_two());
    let mut h = 1;
    while h < bits.len() {
        let mut start = 0;
        while start < bits.len() {
            for i in start..start + h {
                bits[i] ^= bits[i + h];
            }
            start += 2 * h;
        }
        h *= 2;
    }
}

/// Place info bits at non-frozen positions (frozen = 0) and apply the transform.
pub fn encode(spec: &CodeSpec, info_bits: &[u8]) -> Result<Vec<u8>> {
    if info_bits.len() != spec.info_len() {
        return Err(Error::InvalidParameters(format!(
            "expected {} info bits, got {}",
            spec.info_len(),
            info_bits.len()
        )));
    }
    let mut u = vec![0u8; spec.block_len()];
    let mut next = info_bits.iter();
    for (i, slot) in u.iter_mut().enumerate() {
        if !spec.is_frozen(i) {
            *slot = *next.next().unwrap() & 1;
        }
    }
    transform_n(&mut u);
    Ok(u)
}

/// Classify a node by the frozen/info pattern of its leaf span.
pub fn classify(spec: &CodeSpec, node: NodeRef) -> NodeKind {
    let span = node.span();
    debug_assert!(span.end <= spec.block_len());
    let size = node.size();
    let frozen_count = span.clone().filter(|&i| spec.is_frozen(i)).count();

    if frozen_count == size {
        return NodeKind::Rate0;
    }
    if frozen_count == 0 {
        return NodeKind::Rate1;
    }
    // FF..FI: single info bit in the last position.
    if frozen_count == size - 1 && !spec.is_frozen(span.end - 1) {
        return NodeKind::Rep;
    }
    // FI..II: single frozen bit in the first position (needs >= 2 leaves).
    if frozen_count == 1 && spec.is_frozen(span.start) && node.stage >= 1 {
        return NodeKind::Spc;
    }
    // FFII, only at stage 2 (size 4); Rep and Spc take precedence by the above.
    if node.stage == 2
        && spec.is_frozen(span.start)
        && spec.is_frozen(span.start + 1)
        && !spec.is_frozen(span.start + 2)
        && !spec.is_frozen(span.start + 3)
    {
        return NodeKind::Ml;
    }
    NodeKind::RateR
}
