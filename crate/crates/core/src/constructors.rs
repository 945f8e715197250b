//! Deterministic builders for the families studied here: the degree-2
//! family `M_k`, its one-factorization into disjoint transversals, the
//! recursive degree-3 family on `2^m - 1` points per block, and the
//! 9-block 4-family with transversal number 4.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{SetFamily, Vertex};

/// Lines of the Fano plane.
pub const FANO_LINES: [[Vertex; 3]; 7] = [
    [1, 2, 3],
    [1, 4, 5],
    [1, 6, 7],
    [2, 4, 6],
    [2, 5, 7],
    [3, 4, 7],
    [3, 5, 6],
];

/// Blocks of the intersecting 4-family of length 9 with `τ = 4`.
pub const EXAMPLE_BLOCKS: [[Vertex; 4]; 9] = [
    [1, 2, 3, 4],
    [1, 5, 6, 7],
    [2, 5, 8, 9],
    [3, 6, 8, 10],
    [4, 7, 9, 10],
    [1, 8, 9, 11],
    [2, 6, 7, 11],
    [3, 4, 5, 11],
    [1, 2, 5, 10],
];

/// A vertex set that meets every block of `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransversalSet {
    vertices: Vec<Vertex>,
    #[serde(skip)]
    target: Arc<SetFamily>,
}

impl TransversalSet {
    /// Fails unless `vertices` covers `target`.
    pub fn new(mut vertices: Vec<Vertex>, target: Arc<SetFamily>) -> Result<TransversalSet> {
        vertices.sort_unstable();
        vertices.dedup();
        if !target.is_covered_by(&vertices) {
            return Err(Error::InvalidParameter(format!(
                "{vertices:?} does not cover the target family"
            )));
        }
        Ok(TransversalSet { vertices, target })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn target(&self) -> &SetFamily {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_disjoint_from(&self, other: &TransversalSet) -> bool {
        !self.vertices.iter().any(|v| other.vertices.binary_search(v).is_ok())
    }
}

/// Builds `M_k`: `k + 1` blocks where every two blocks meet in exactly one
/// vertex and every vertex lies in exactly two blocks.
///
/// Block `m + 1` takes, from each earlier block, its smallest vertex that
/// is so far in only that block, then `k - m` fresh labels in increasing
/// order. Vertices end up labeled `1..=k(k+1)/2`.
pub fn build_mk(k: usize) -> Result<SetFamily> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("M_k needs k >= 2, got {k}")));
    }
    let nverts = k * (k + 1) / 2;
    let mut degree = vec![0usize; nverts + 1];
    let mut blocks: Vec<Vec<Vertex>> = Vec::with_capacity(k + 1);
    let mut next: Vertex = 1;

    for m in 0..=k {
        let mut block = Vec::with_capacity(k);
        for earlier in &blocks {
            let v = *earlier
                .iter()
                .find(|&&v| degree[v as usize] == 1)
                .expect("earlier block keeps a degree-1 vertex until the last step");
            block.push(v);
        }
        for _ in m..k {
            block.push(next);
            next += 1;
        }
        for &v in &block {
            degree[v as usize] += 1;
        }
        blocks.push(block);
    }

    Ok(SetFamily::new(k, blocks)?.with_comment(format!("M_{k}")))
}

/// Block-index pairs `(i, j)` with `1 <= i < j <= k + 1` for each round
/// of the circle-method 1-factorization of the complete graph on `k + 1`
/// nodes. `k` must be odd.
pub fn round_robin_rounds(k: usize) -> Vec<Vec<(usize, usize)>> {
    (0..k)
        .map(|r| {
            let mut round = vec![(r + 1, k + 1)];
            for i in 1..=(k - 1) / 2 {
                let a = (r + i) % k + 1;
                let b = (r + k - i) % k + 1;
                round.push((a.min(b), a.max(b)));
            }
            round.sort_unstable();
            round
        })
        .collect()
}

/// The vertex shared by blocks `i` and `j` (1-based) of `M_k`.
fn shared_vertex(mk: &SetFamily, i: usize, j: usize) -> Vertex {
    let (a, b) = (&mk.blocks()[i - 1], &mk.blocks()[j - 1]);
    *a.vertices()
        .iter()
        .find(|&&v| b.contains(v))
        .expect("blocks of M_k pairwise intersect")
}

/// `k` pairwise disjoint transversals of `M_k`, `k` odd.
///
/// Each vertex of `M_k` is identified with the pair of blocks containing
/// it, so a perfect matching on the block indices is a transversal of size
/// `(k + 1) / 2`; the rounds of a round-robin schedule are such matchings
/// and use every pair exactly once.
pub fn build_one_factorization(k: usize) -> Result<Vec<TransversalSet>> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "one-factorization needs odd k >= 3, got {k}"
        )));
    }
    let mk = Arc::new(build_mk(k)?);
    round_robin_rounds(k)
        .into_iter()
        .map(|round| {
            let vertices = round
                .iter()
                .map(|&(i, j)| shared_vertex(&mk, i, j))
                .collect();
            TransversalSet::new(vertices, Arc::clone(&mk))
        })
        .collect()
}

pub fn fano_plane() -> SetFamily {
    SetFamily::new(3, FANO_LINES.iter().map(|l| l.to_vec()).collect())
        .expect("Fano lines are a valid family")
        .with_comment("Fano plane")
}

/// A `k`-uniform intersecting family with `k = 2^m - 1`, `2k + 1` blocks
/// and every vertex of degree 3.
///
/// `m = 2` is the Fano plane. For larger `m`, take `M_k` and its `k`
/// disjoint transversals `T_i`, and the family for `m - 1` (which has `k`
/// blocks `B_i` of size `(k - 1) / 2`) relabeled onto fresh vertices; the
/// result is `M_k` followed by the blocks `T_i ∪ B_i`.
pub fn build_degree3_family(m: u32) -> Result<SetFamily> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("degree-3 family needs m >= 2, got {m}")));
    }
    if m > 16 {
        return Err(Error::InvalidParameter(format!("m = {m} is too large")));
    }
    if m == 2 {
        return Ok(fano_plane().with_comment("degree-3 family, m=2 (Fano plane)"));
    }
    let k = (1usize << m) - 1;
    let offset = (k * (k + 1) / 2) as Vertex;
    let mk = build_mk(k)?;
    let transversals = build_one_factorization(k)?;
    let inner = build_degree3_family(m - 1)?;
    debug_assert_eq!(inner.len(), k);

    let mut blocks = mk.block_lists();
    for (t, b) in transversals.iter().zip(inner.blocks()) {
        let mut block = t.vertices().to_vec();
        block.extend(b.vertices().iter().map(|&v| v + offset));
        blocks.push(block);
    }
    Ok(SetFamily::new(k, blocks)?.with_comment(format!("degree-3 family, m={m}")))
}

/// The 9-block intersecting 4-family with transversal number 4; its first
/// five blocks are `M_4`.
pub fn paper_example_family() -> SetFamily {
    SetFamily::new(4, EXAMPLE_BLOCKS.iter().map(|b| b.to_vec()).collect())
        .expect("example blocks are a valid family")
        .with_comment("intersecting 4-family, 9 blocks, tau 4")
}
