//! Exact transversal numbers (minimum hitting sets) by depth-first branch
//! and bound, plus cover enumeration.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{SetFamily, Vertex};

/// Result of an exact transversal computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransversalResult {
    pub tau: usize,
    /// Lexicographically smallest minimum cover.
    pub witness: Vec<Vertex>,
    /// `⌈len / max_degree⌉`.
    pub degree_lower_bound: usize,
    pub search_nodes: u64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolverOptions {
    /// Abort with [`Error::BudgetExceeded`] after this many search nodes.
    pub node_budget: Option<u64>,
}

/// `⌈len / max_degree⌉`, the bound every cover must meet since a vertex
/// hits at most `max_degree` blocks.
pub fn degree_lower_bound(f: &SetFamily) -> usize {
    match f.max_degree() {
        0 => 0,
        d => f.len().div_ceil(d),
    }
}

struct Search {
    ids: Vec<Vertex>,
    blocks: Vec<Vec<usize>>,
    incidence: Vec<Vec<usize>>,
    hits: Vec<u32>,
    uncovered: usize,
    excluded: Vec<bool>,
    chosen: Vec<usize>,
    nodes: u64,
    budget: Option<u64>,
}

impl Search {
    fn new(f: &SetFamily, budget: Option<u64>) -> Search {
        let ids = f.vertex_set();
        let index = |v: Vertex| ids.binary_search(&v).expect("vertex in vertex set");
        let blocks: Vec<Vec<usize>> = f
            .blocks()
            .iter()
            .map(|b| b.vertices().iter().map(|&v| index(v)).collect())
            .collect();
        let mut incidence = vec![Vec::new(); ids.len()];
        for (bi, b) in blocks.iter().enumerate() {
            for &v in b {
                incidence[v].push(bi);
            }
        }
        Search {
            excluded: vec![false; ids.len()],
            hits: vec![0; blocks.len()],
            uncovered: blocks.len(),
            chosen: Vec::new(),
            nodes: 0,
            budget,
            ids,
            blocks,
            incidence,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        match self.budget {
            Some(b) if self.nodes > b => Err(Error::BudgetExceeded {
                budget: b,
                explored: self.nodes,
            }),
            _ => Ok(()),
        }
    }

    fn choose(&mut self, v: usize) {
        self.chosen.push(v);
        for &b in &self.incidence[v] {
            if self.hits[b] == 0 {
                self.uncovered -= 1;
            }
            self.hits[b] += 1;
        }
    }

    fn unchoose(&mut self) {
        let v = self.chosen.pop().expect("nonempty");
        for &b in &self.incidence[v] {
            self.hits[b] -= 1;
            if self.hits[b] == 0 {
                self.uncovered += 1;
            }
        }
    }

    fn available(&self, v: usize) -> bool {
        !self.excluded[v] && !self.chosen.contains(&v)
    }

    /// Largest number of uncovered blocks a single available vertex hits.
    fn max_gain(&self) -> usize {
        let mut best = 0;
        for (v, inc) in self.incidence.iter().enumerate() {
            if self.available(v) {
                let g = inc.iter().filter(|&&b| self.hits[b] == 0).count();
                best = best.max(g);
            }
        }
        best
    }

    /// Lower bound on the number of extra vertices needed, or `None` when
    /// the uncovered blocks cannot be covered at all.
    fn extra_needed(&self) -> Option<usize> {
        if self.uncovered == 0 {
            return Some(0);
        }
        match self.max_gain() {
            0 => None,
            g => Some(self.uncovered.div_ceil(g)),
        }
    }

    /// Uncovered block with the fewest available vertices; ties go to the
    /// lowest index.
    fn branch_block(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for (bi, b) in self.blocks.iter().enumerate() {
            if self.hits[bi] > 0 {
                continue;
            }
            let free = b.iter().filter(|&&v| self.available(v)).count();
            if best.is_none_or(|(_, f)| free < f) {
                best = Some((bi, free));
            }
        }
        best.map(|(bi, _)| bi)
    }

    /// Minimization: improves `best` in place.
    fn minimize(&mut self, best: &mut Vec<usize>) -> Result<()> {
        self.tick()?;
        if self.uncovered == 0 {
            if self.chosen.len() < best.len() {
                *best = self.chosen.clone();
            }
            return Ok(());
        }
        let Some(extra) = self.extra_needed() else {
            return Ok(());
        };
        if self.chosen.len() + extra >= best.len() {
            return Ok(());
        }
        let Some(bi) = self.branch_block() else {
            return Ok(());
        };
        let candidates: Vec<usize> = self.blocks[bi]
            .iter()
            .copied()
            .filter(|&v| self.available(v))
            .collect();
        let mut excluded_here = Vec::new();
        let mut result = Ok(());
        for v in candidates {
            self.choose(v);
            result = self.minimize(best);
            self.unchoose();
            if result.is_err() {
                break;
            }
            self.excluded[v] = true;
            excluded_here.push(v);
        }
        for v in excluded_here {
            self.excluded[v] = false;
        }
        result
    }

    /// Decision: can the uncovered blocks be hit with at most `budget`
    /// more available vertices?
    fn feasible(&mut self, budget: usize) -> Result<bool> {
        self.tick()?;
        if self.uncovered == 0 {
            return Ok(true);
        }
        match self.extra_needed() {
            Some(extra) if extra <= budget => {}
            _ => return Ok(false),
        }
        let Some(bi) = self.branch_block() else {
            return Ok(false);
        };
        let candidates: Vec<usize> = self.blocks[bi]
            .iter()
            .copied()
            .filter(|&v| self.available(v))
            .collect();
        let mut excluded_here = Vec::new();
        let mut found = Ok(false);
        for v in candidates {
            self.choose(v);
            found = self.feasible(budget - 1);
            self.unchoose();
            if !matches!(found, Ok(false)) {
                break;
            }
            self.excluded[v] = true;
            excluded_here.push(v);
        }
        for v in excluded_here {
            self.excluded[v] = false;
        }
        found
    }

    /// Builds the lexicographically smallest cover of size `tau`, one
    /// position at a time, checking completability of each prefix.
    fn lex_smallest_cover(&mut self, tau: usize) -> Result<Vec<usize>> {
        let n = self.ids.len();
        let mut floor = 0;
        for pos in 0..tau {
            let mut picked = None;
            for v in floor..n {
                self.choose(v);
                for w in 0..=v {
                    self.excluded[w] = true;
                }
                let ok = self.feasible(tau - pos - 1);
                for w in 0..=v {
                    self.excluded[w] = false;
                }
                if ok? {
                    picked = Some(v);
                    break;
                }
                self.unchoose();
            }
            let v = picked.expect("a cover of size tau exists");
            floor = v + 1;
        }
        Ok(self.chosen.clone())
    }
}

/// Greedy cover: repeatedly take the vertex hitting the most uncovered
/// blocks (smallest id on ties). Returned sorted.
pub fn greedy_cover(f: &SetFamily) -> Vec<Vertex> {
    let mut s = Search::new(f, None);
    while s.uncovered > 0 {
        let mut best: Option<(usize, usize)> = None;
        for (v, inc) in s.incidence.iter().enumerate() {
            if s.chosen.contains(&v) {
                continue;
            }
            let g = inc.iter().filter(|&&b| s.hits[b] == 0).count();
            if g > 0 && best.is_none_or(|(_, bg)| g > bg) {
                best = Some((v, g));
            }
        }
        let (v, _) = best.expect("blocks are nonempty");
        s.choose(v);
    }
    let mut out: Vec<Vertex> = s.chosen.iter().map(|&v| s.ids[v]).collect();
    out.sort_unstable();
    out
}

pub fn exact_tau(f: &SetFamily) -> Result<TransversalResult> {
    exact_tau_with(f, SolverOptions::default())
}

/// Exact transversal number with the lexicographically smallest minimum
/// cover as witness.
pub fn exact_tau_with(f: &SetFamily, opts: SolverOptions) -> Result<TransversalResult> {
    let lower = degree_lower_bound(f);
    if f.is_empty() {
        return Ok(TransversalResult {
            tau: 0,
            witness: Vec::new(),
            degree_lower_bound: 0,
            search_nodes: 0,
        });
    }
    let mut s = Search::new(f, opts.node_budget);
    let greedy = greedy_cover(f);
    // Upper bound: one more than the greedy size, so the search itself
    // reaches an optimum and the incumbent is always a real cover.
    let mut best: Vec<usize> = (0..=greedy.len()).collect();
    s.minimize(&mut best)?;
    let tau = best.len();
    let witness = s.lex_smallest_cover(tau)?;
    Ok(TransversalResult {
        tau,
        witness: witness.iter().map(|&v| s.ids[v]).collect(),
        degree_lower_bound: lower,
        search_nodes: s.nodes,
    })
}

/// All covers of exactly `t` vertices drawn from the vertex set, in
/// lexicographic order. Covers need not be minimal.
pub fn enumerate_covers_of_size(f: &SetFamily, t: usize) -> Vec<Vec<Vertex>> {
    let mut s = Search::new(f, None);
    let mut out = Vec::new();
    if t <= s.ids.len() {
        covers_from(&mut s, 0, t, &mut out);
    }
    out
}

fn covers_from(s: &mut Search, start: usize, remaining: usize, out: &mut Vec<Vec<Vertex>>) {
    if remaining == 0 {
        if s.uncovered == 0 {
            out.push(s.chosen.iter().map(|&v| s.ids[v]).collect());
        }
        return;
    }
    let n = s.ids.len();
    if n - start < remaining {
        return;
    }
    if s.uncovered > 0 {
        // every uncovered block needs a vertex at index >= start
        let reachable = s
            .blocks
            .iter()
            .enumerate()
            .all(|(bi, b)| s.hits[bi] > 0 || *b.last().expect("nonempty block") >= start);
        if !reachable {
            return;
        }
        let gain = (start..n)
            .map(|v| s.incidence[v].iter().filter(|&&b| s.hits[b] == 0).count())
            .max()
            .unwrap_or(0);
        if s.uncovered > remaining * gain {
            return;
        }
    }
    for v in start..n {
        s.choose(v);
        covers_from(s, v + 1, remaining - 1, out);
        s.unchoose();
    }
}

/// Every minimum cover, in lexicographic order.
pub fn enumerate_min_transversals(f: &SetFamily) -> Result<Vec<Vec<Vertex>>> {
    let tau = exact_tau(f)?.tau;
    Ok(enumerate_covers_of_size(f, tau))
}

/// The `τ`-uniform family whose blocks are all minimum covers of `f`.
pub fn transversal_family(f: &SetFamily) -> Result<SetFamily> {
    if f.is_empty() {
        return Err(Error::InvalidParameter(
            "the transversal family of an empty family is undefined".into(),
        ));
    }
    let tau = exact_tau(f)?.tau;
    let blocks = enumerate_covers_of_size(f, tau);
    SetFamily::new(tau, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{build_mk, fano_plane, paper_example_family};

    fn fam(k: usize, blocks: &[&[Vertex]]) -> SetFamily {
        SetFamily::new(k, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    /// Smallest cover by scanning subsets in increasing size.
    fn brute_tau(f: &SetFamily) -> usize {
        let vs = f.vertex_set();
        for t in 0..=vs.len() {
            if subsets(&vs, t).iter().any(|s| f.is_covered_by(s)) {
                return t;
            }
        }
        unreachable!()
    }

    fn subsets(vs: &[Vertex], t: usize) -> Vec<Vec<Vertex>> {
        if t == 0 {
            return vec![vec![]];
        }
        if vs.len() < t {
            return vec![];
        }
        let mut out: Vec<Vec<Vertex>> = subsets(&vs[1..], t - 1)
            .into_iter()
            .map(|mut s| {
                s.insert(0, vs[0]);
                s
            })
            .collect();
        out.extend(subsets(&vs[1..], t));
        out
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(greedy_cover(&fam(3, &[&[1, 2, 3]])), vec![1]);
        let tri = build_mk(2).unwrap();
        let g = greedy_cover(&tri);
        assert_eq!(g.len(), 2);
        assert!(tri.is_covered_by(&g));
        let ex = paper_example_family();
        let g = greedy_cover(&ex);
        assert!(g.len() <= 5);
        assert!(ex.is_covered_by(&g));
    }

    #[test]
    fn tau_examples() {
        assert_eq!(exact_tau(&build_mk(4).unwrap()).unwrap().tau, 3);
        assert_eq!(exact_tau(&paper_example_family()).unwrap().tau, 4);
        let fano = fano_plane();
        assert_eq!(exact_tau(&fano).unwrap().tau, 3);
        assert_eq!(brute_tau(&fano), 3);
    }

    #[test]
    fn empty_family_has_tau_zero() {
        let r = exact_tau(&SetFamily::empty(3).unwrap()).unwrap();
        assert_eq!((r.tau, r.witness.len(), r.degree_lower_bound), (0, 0, 0));
    }

    #[test]
    fn witness_is_lexicographically_smallest() {
        for f in [build_mk(4).unwrap(), fano_plane(), paper_example_family()] {
            let r = exact_tau(&f).unwrap();
            let all = enumerate_covers_of_size(&f, r.tau);
            assert_eq!(r.witness, all[0]);
        }
    }

    #[test]
    fn budget_is_an_error() {
        let f = build_mk(8).unwrap();
        let err = exact_tau_with(&f, SolverOptions { node_budget: Some(1) }).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn covers_of_size_examples() {
        let tri = build_mk(2).unwrap();
        assert_eq!(
            enumerate_covers_of_size(&tri, 2),
            vec![vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert!(enumerate_covers_of_size(&build_mk(4).unwrap(), 2).is_empty());
        assert_eq!(
            enumerate_covers_of_size(&fam(2, &[&[1, 2]]), 1),
            vec![vec![1], vec![2]]
        );
    }

    #[test]
    fn covers_of_size_match_brute_force() {
        for f in [build_mk(4).unwrap(), fano_plane(), paper_example_family()] {
            let vs = f.vertex_set();
            for t in 0..=5 {
                let expected: Vec<Vec<Vertex>> =
                    subsets(&vs, t).into_iter().filter(|s| f.is_covered_by(s)).collect();
                let mut got = enumerate_covers_of_size(&f, t);
                got.sort();
                assert_eq!(got, expected, "t={t}");
            }
        }
    }

    #[test]
    fn min_transversals_examples() {
        let m3 = enumerate_min_transversals(&build_mk(3).unwrap()).unwrap();
        assert_eq!(m3.len(), 3);
        assert!(m3.iter().all(|t| t.len() == 2));
        let mut all: Vec<Vertex> = m3.concat();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 6, "pairwise disjoint");

        let m5 = enumerate_min_transversals(&build_mk(5).unwrap()).unwrap();
        assert_eq!(m5.len(), 15);
        assert!(m5.iter().all(|t| t.len() == 3));

        let fano = fano_plane();
        let lines = enumerate_min_transversals(&fano).unwrap();
        assert_eq!(lines, fano.block_lists().into_iter().collect::<std::collections::BTreeSet<_>>().into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn transversal_family_examples() {
        let t3 = transversal_family(&build_mk(3).unwrap()).unwrap();
        assert_eq!((t3.k(), t3.len()), (2, 3));
        assert_eq!(exact_tau(&t3).unwrap().tau, 3);

        let t5 = transversal_family(&build_mk(5).unwrap()).unwrap();
        assert_eq!((t5.k(), t5.len()), (3, 15));
        assert_eq!(exact_tau(&t5).unwrap().tau, 5);
        // each block of M_5 meets every perfect-matching transversal
        let m5 = build_mk(5).unwrap();
        for b in m5.blocks() {
            assert!(t5.is_covered_by(b.vertices()));
        }

        let single = transversal_family(&fam(2, &[&[1, 2]])).unwrap();
        assert_eq!(single.block_lists(), vec![vec![1], vec![2]]);
        assert_eq!(exact_tau(&single).unwrap().tau, 2);

        assert!(transversal_family(&SetFamily::empty(2).unwrap()).is_err());
    }

    #[test]
    fn mk_tau_formula() {
        for k in 2..=12 {
            let r = exact_tau(&build_mk(k).unwrap()).unwrap();
            assert_eq!(r.tau, (k + 1).div_ceil(2), "k={k}");
        }
    }
}
