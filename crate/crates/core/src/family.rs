//! Uniform set families: blocks, validation and the basic incidence
//! statistics (degrees, pairwise intersections).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Vertex identifier. Valid ids are `>= 1`.
pub type Vertex = u32;

/// A block: a strictly increasing list of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Block(Vec<Vertex>);

impl Block {
    /// Builds a block from vertices in any order. Fails on a repeated
    /// vertex or a zero id.
    pub fn new(mut vertices: Vec<Vertex>) -> Result<Block> {
        vertices.sort_unstable();
        if let Some(&0) = vertices.first() {
            return Err(Error::InvalidFamily(vec![Violation::InvalidVertex { block: 0 }]));
        }
        if let Some(w) = vertices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidFamily(vec![Violation::RepeatedVertex {
                block: 0,
                vertex: w[0],
            }]));
        }
        Ok(Block(vertices))
    }

    pub(crate) fn from_sorted(vertices: Vec<Vertex>) -> Block {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Block(vertices)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn intersection_size(&self, other: &Block) -> usize {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    pub fn intersects(&self, other: &Block) -> bool {
        self.intersection_size(other) > 0
    }

    /// True when `set` (sorted or not) meets this block.
    pub fn is_hit_by(&self, set: &[Vertex]) -> bool {
        set.iter().any(|&v| self.contains(v))
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// A rule broken by a candidate family. Block indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Violation {
    ZeroUniformity,
    InvalidVertex { block: usize },
    RepeatedVertex { block: usize, vertex: Vertex },
    Uniformity { block: usize, expected: usize, found: usize },
    DuplicateBlock { first: usize, second: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroUniformity => write!(f, "uniformity k must be positive"),
            Violation::InvalidVertex { block } => {
                write!(f, "block {block}: vertex ids must be >= 1")
            }
            Violation::RepeatedVertex { block, vertex } => {
                write!(f, "block {block}: vertex {vertex} repeated")
            }
            Violation::Uniformity {
                block,
                expected,
                found,
            } => write!(f, "block {block}: has {found} vertices, expected {expected}"),
            Violation::DuplicateBlock { first, second } => {
                write!(f, "block {second}: duplicates block {first}")
            }
        }
    }
}

/// Checks raw block data against the family invariants: positive `k`,
/// positive ids, no repeated vertex inside a block, every block of size
/// `k`, no two equal blocks. Returns every violation found.
pub fn validate(k: usize, blocks: &[Vec<Vertex>]) -> Vec<Violation> {
    let mut out = Vec::new();
    if k == 0 {
        out.push(Violation::ZeroUniformity);
    }
    let mut seen: HashMap<Vec<Vertex>, usize> = HashMap::new();
    for (i, raw) in blocks.iter().enumerate() {
        let mut b = raw.clone();
        b.sort_unstable();
        if b.contains(&0) {
            out.push(Violation::InvalidVertex { block: i });
        }
        if let Some(w) = b.windows(2).find(|w| w[0] == w[1]) {
            out.push(Violation::RepeatedVertex {
                block: i,
                vertex: w[0],
            });
        }
        if raw.len() != k {
            out.push(Violation::Uniformity {
                block: i,
                expected: k,
                found: raw.len(),
            });
        }
        match seen.get(&b) {
            Some(&first) => out.push(Violation::DuplicateBlock { first, second: i }),
            None => {
                seen.insert(b, i);
            }
        }
    }
    out
}

/// An ordered list of distinct `k`-element blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetFamily {
    k: usize,
    blocks: Vec<Block>,
    comment: Option<String>,
}

impl SetFamily {
    /// Builds a family, sorting each block. All invariants are checked.
    pub fn new(k: usize, blocks: Vec<Vec<Vertex>>) -> Result<SetFamily> {
        let violations = validate(k, &blocks);
        if !violations.is_empty() {
            return Err(Error::InvalidFamily(violations));
        }
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                Block(b)
            })
            .collect();
        Ok(SetFamily {
            k,
            blocks,
            comment: None,
        })
    }

    /// The empty `k`-family.
    pub fn empty(k: usize) -> Result<SetFamily> {
        SetFamily::new(k, Vec::new())
    }

    pub(crate) fn from_parts_unchecked(k: usize, blocks: Vec<Block>) -> SetFamily {
        SetFamily {
            k,
            blocks,
            comment: None,
        }
    }

    pub fn with_comment(mut self, comment: impl Into<String>) -> SetFamily {
        self.comment = Some(comment.into());
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn comment(&self) -> Option<&str> {
        self.comment.as_deref()
    }

    /// Blocks as plain vectors.
    pub fn block_lists(&self) -> Vec<Vec<Vertex>> {
        self.blocks.iter().map(|b| b.0.clone()).collect()
    }

    /// Sorted union of all blocks.
    pub fn vertex_set(&self) -> Vec<Vertex> {
        let mut vs: Vec<Vertex> = self.blocks.iter().flat_map(|b| b.0.iter().copied()).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_set().len()
    }

    /// Re-checks all invariants. Always empty for a constructed family.
    pub fn validate(&self) -> Vec<Violation> {
        validate(self.k, &self.block_lists())
    }

    /// True iff every two blocks share a vertex. Families with fewer than
    /// two blocks are intersecting.
    pub fn is_intersecting(&self) -> bool {
        self.blocks
            .iter()
            .enumerate()
            .all(|(i, a)| self.blocks[i + 1..].iter().all(|b| a.intersects(b)))
    }

    pub fn degrees(&self) -> DegreeProfile {
        let mut map = BTreeMap::new();
        for b in &self.blocks {
            for &v in &b.0 {
                *map.entry(v).or_insert(0) += 1;
            }
        }
        DegreeProfile(map)
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().max()
    }

    /// Symmetric matrix of `|B_i ∩ B_j|`; the diagonal holds `k`.
    pub fn pairwise_intersections(&self) -> Vec<Vec<usize>> {
        let n = self.blocks.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.blocks[i].intersection_size(&self.blocks[j]))
                    .collect()
            })
            .collect()
    }

    /// Sorted multiset of off-diagonal intersection sizes (each unordered
    /// pair counted once).
    pub fn intersection_multiset(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, a) in self.blocks.iter().enumerate() {
            for b in &self.blocks[i + 1..] {
                out.push(a.intersection_size(b));
            }
        }
        out.sort_unstable();
        out
    }

    /// True iff `set` meets every block.
    pub fn is_covered_by(&self, set: &[Vertex]) -> bool {
        self.blocks.iter().all(|b| b.is_hit_by(set))
    }

    /// The family formed by the first `n` blocks.
    pub fn prefix(&self, n: usize) -> SetFamily {
        SetFamily {
            k: self.k,
            blocks: self.blocks[..n.min(self.blocks.len())].to_vec(),
            comment: None,
        }
    }

    /// Family with the blocks whose indices satisfy `keep`.
    pub fn filter_blocks(&self, mut keep: impl FnMut(usize, &Block) -> bool) -> SetFamily {
        SetFamily {
            k: self.k,
            blocks: self
                .blocks
                .iter()
                .enumerate()
                .filter(|(i, b)| keep(*i, b))
                .map(|(_, b)| b.clone())
                .collect(),
            comment: None,
        }
    }

    /// Appends a block. Fails if the result would break an invariant.
    pub fn push(&mut self, vertices: Vec<Vertex>) -> Result<()> {
        let mut all = self.block_lists();
        all.push(vertices);
        let violations = validate(self.k, &all);
        if !violations.is_empty() {
            return Err(Error::InvalidFamily(violations));
        }
        let mut b = all.pop().expect("just pushed");
        b.sort_unstable();
        self.blocks.push(Block(b));
        Ok(())
    }

    /// Applies a vertex relabeling. `map` must be injective on the vertex
    /// set and send every vertex to a positive id.
    pub fn relabel(&self, map: impl Fn(Vertex) -> Vertex) -> SetFamily {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let mut v: Vec<Vertex> = b.0.iter().map(|&x| map(x)).collect();
                v.sort_unstable();
                Block(v)
            })
            .collect();
        SetFamily {
            k: self.k,
            blocks,
            comment: self.comment.clone(),
        }
    }

    /// Order-preserving relabeling of the vertex set onto `1..=n`.
    pub fn normalized(&self) -> SetFamily {
        let vs = self.vertex_set();
        let index: HashMap<Vertex, Vertex> = vs
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as Vertex + 1))
            .collect();
        self.relabel(|v| index[&v])
    }

    /// Same blocks, independent of order.
    pub fn same_blocks_as(&self, other: &SetFamily) -> bool {
        if self.k != other.k || self.len() != other.len() {
            return false;
        }
        let mut a = self.blocks.clone();
        let mut b = other.blocks.clone();
        a.sort();
        b.sort();
        a == b
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for SetFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let fields = if self.comment.is_some() { 3 } else { 2 };
        let mut s = serializer.serialize_struct("SetFamily", fields)?;
        s.serialize_field("k", &self.k)?;
        s.serialize_field("blocks", &self.blocks.iter().map(|b| &b.0).collect::<Vec<_>>())?;
        if let Some(c) = &self.comment {
            s.serialize_field("comment", c)?;
        }
        s.end()
    }
}

/// Vertex degrees: number of blocks containing each vertex.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct DegreeProfile(BTreeMap<Vertex, usize>);

impl DegreeProfile {
    pub fn get(&self, v: Vertex) -> usize {
        self.0.get(&v).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, usize)> + '_ {
        self.0.iter().map(|(&v, &d)| (v, d))
    }

    pub fn vertex_count(&self) -> usize {
        self.0.len()
    }

    /// Sum of all degrees; equals `k * len` for a `k`-family.
    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn max(&self) -> usize {
        self.0.values().copied().max().unwrap_or(0)
    }

    pub fn min(&self) -> usize {
        self.0.values().copied().min().unwrap_or(0)
    }

    pub fn all_equal_to(&self, d: usize) -> bool {
        self.0.values().all(|&x| x == d)
    }

    /// Sorted list of degrees.
    pub fn multiset(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.0.values().copied().collect();
        v.sort_unstable();
        v
    }

    /// degree -> number of vertices with that degree.
    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for &d in self.0.values() {
            *h.entry(d).or_insert(0) += 1;
        }
        h
    }
}
