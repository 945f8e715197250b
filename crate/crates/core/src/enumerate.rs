//! Isomorph-free generation of small uniform families, and the claim
//! checks built on it: intersecting 4-families of length at most 4, the
//! uniqueness of `M_k` among degree-2 families, the absence of
//! transversal number 3 among short intersecting 3-families, and the
//! structured search over 8-block 4-families that extend `M_4`.
//!
//! Generation is level by level. Every family on `b + 1` blocks that
//! satisfies the hereditary constraints (intersecting, vertex budget,
//! degree cap, fixed pairwise intersection) arises by adding one block to
//! such a family on `b` blocks, so extending one canonical representative
//! per class and keeping each child's canonical form once yields exactly
//! one representative per class. Degree lower bounds and transversal
//! filters only make sense on finished families and are applied last.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::constructors::{build_mk, fano_plane};
use crate::error::{Error, Result};
use crate::family::{SetFamily, Vertex};
use crate::iso::{canonical_form, is_isomorphic};
use crate::solver::{enumerate_covers_of_size, exact_tau_with, SolverOptions};

/// Solver node cap applied to each class; generous for desk-scale
/// families, but keeps a runaway instance from hanging a search.
pub const CLASS_SOLVER_BUDGET: u64 = 50_000_000;

/// Inclusive bounds on the transversal number.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TauFilter {
    pub min: Option<usize>,
    pub max: Option<usize>,
}

impl TauFilter {
    pub fn exactly(t: usize) -> TauFilter {
        TauFilter {
            min: Some(t),
            max: Some(t),
        }
    }

    pub fn at_least(t: usize) -> TauFilter {
        TauFilter {
            min: Some(t),
            max: None,
        }
    }

    pub fn accepts(&self, tau: usize) -> bool {
        self.min.is_none_or(|m| tau >= m) && self.max.is_none_or(|m| tau <= m)
    }

    pub fn is_trivial(&self) -> bool {
        self.min.is_none() && self.max.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerationConstraints {
    pub k: usize,
    pub min_blocks: usize,
    pub max_blocks: usize,
    pub max_vertices: Option<usize>,
    pub intersecting: bool,
    pub min_degree: Option<usize>,
    pub max_degree: Option<usize>,
    pub exact_pairwise_intersection: Option<usize>,
    pub tau_filter: TauFilter,
    /// Cap on the number of candidate extensions examined.
    pub node_budget: Option<u64>,
}

impl EnumerationConstraints {
    /// `k`-uniform families with `1..=max_blocks` blocks, no other
    /// restriction.
    pub fn new(k: usize, max_blocks: usize) -> EnumerationConstraints {
        EnumerationConstraints {
            k,
            min_blocks: 1,
            max_blocks,
            max_vertices: None,
            intersecting: false,
            min_degree: None,
            max_degree: None,
            exact_pairwise_intersection: None,
            tau_filter: TauFilter::default(),
            node_budget: None,
        }
    }

    pub fn exactly(k: usize, blocks: usize) -> EnumerationConstraints {
        EnumerationConstraints {
            min_blocks: blocks,
            ..EnumerationConstraints::new(k, blocks)
        }
    }

    pub fn intersecting(mut self) -> Self {
        self.intersecting = true;
        self
    }

    pub fn max_vertices(mut self, n: usize) -> Self {
        self.max_vertices = Some(n);
        self
    }

    pub fn degrees(mut self, min: Option<usize>, max: Option<usize>) -> Self {
        self.min_degree = min;
        self.max_degree = max;
        self
    }

    pub fn pairwise(mut self, s: usize) -> Self {
        self.exact_pairwise_intersection = Some(s);
        self
    }

    pub fn tau(mut self, filter: TauFilter) -> Self {
        self.tau_filter = filter;
        self
    }

    pub fn budget(mut self, nodes: u64) -> Self {
        self.node_budget = Some(nodes);
        self
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.k == 0 {
            return bad("k must be positive");
        }
        if self.max_blocks == 0 {
            return bad("max_blocks must be at least 1");
        }
        if self.min_blocks > self.max_blocks {
            return bad("min_blocks exceeds max_blocks");
        }
        if self.max_vertices.is_some_and(|n| n < self.k) {
            return bad("max_vertices must be at least k");
        }
        if let (Some(lo), Some(hi)) = (self.min_degree, self.max_degree) {
            if lo > hi {
                return bad("min_degree exceeds max_degree");
            }
        }
        if self.exact_pairwise_intersection.is_some_and(|s| s > self.k) {
            return bad("pairwise intersection cannot exceed k");
        }
        Ok(())
    }

    /// Constraints that survive deleting a block; used while extending.
    fn hereditary_ok(&self, f: &SetFamily) -> bool {
        if self.max_vertices.is_some_and(|n| f.vertex_count() > n) {
            return false;
        }
        if self.intersecting && !f.is_intersecting() {
            return false;
        }
        if self.max_degree.is_some_and(|d| f.max_degree() > d) {
            return false;
        }
        if let Some(s) = self.exact_pairwise_intersection {
            if f.intersection_multiset().iter().any(|&x| x != s) {
                return false;
            }
        }
        true
    }

    /// Full check of a finished family whose transversal number is `tau`.
    pub fn accepts(&self, f: &SetFamily, tau: usize) -> bool {
        f.k() == self.k
            && f.validate().is_empty()
            && (self.min_blocks..=self.max_blocks).contains(&f.len())
            && self.hereditary_ok(f)
            && self.min_degree.is_none_or(|d| f.degrees().min() >= d)
            && self.tau_filter.accepts(tau)
    }
}

/// One isomorphism class in a report.
#[derive(Debug, Clone, Serialize)]
pub struct ClassRecord {
    pub length: usize,
    pub vertices: usize,
    pub tau: usize,
    pub degree_histogram: BTreeMap<usize, usize>,
    pub family: SetFamily,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LevelStats {
    pub blocks: usize,
    /// Classes satisfying the hereditary constraints at this length.
    pub classes: usize,
    pub candidates: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub constraints: EnumerationConstraints,
    pub class_count: usize,
    pub classes: Vec<ClassRecord>,
    pub levels: Vec<LevelStats>,
    pub candidates_examined: u64,
    pub solver_nodes: u64,
}

impl SearchReport {
    pub fn max_tau(&self) -> Option<usize> {
        self.classes.iter().map(|c| c.tau).max()
    }

    /// tau -> number of classes.
    pub fn tau_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for c in &self.classes {
            *h.entry(c.tau).or_insert(0) += 1;
        }
        h
    }
}

type Canon = Vec<Vec<Vertex>>;

fn canon_key(f: &SetFamily) -> Canon {
    canonical_form(f).into_blocks()
}

/// Children of one canonical parent, as canonical keys, plus the number of
/// candidate blocks examined.
fn extend(parent: &SetFamily, c: &EnumerationConstraints) -> (Vec<Canon>, u64) {
    let n = parent.vertex_count();
    let k = c.k;
    let room = c.max_vertices.map_or(k, |m| m.saturating_sub(n).min(k));
    let min_shared = k - room;
    let min_shared = if c.intersecting && !parent.is_empty() {
        min_shared.max(1)
    } else {
        min_shared
    };
    let degrees = parent.degrees();
    let mut out = Vec::new();
    let mut examined = 0u64;
    for shared in min_shared..=k.min(n) {
        for subset in (1..=n as Vertex).combinations(shared) {
            examined += 1;
            if let Some(cap) = c.max_degree {
                if subset.iter().any(|&v| degrees.get(v) + 1 > cap) {
                    continue;
                }
            }
            let mut ok = true;
            for b in parent.blocks() {
                let meet = subset.iter().filter(|&&v| b.contains(v)).count();
                if (c.intersecting && meet == 0)
                    || c.exact_pairwise_intersection.is_some_and(|s| meet != s)
                    || meet == k
                {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let mut block = subset;
            block.extend((n as Vertex + 1)..=(n + k - shared) as Vertex);
            let mut child = parent.clone();
            child.push(block).expect("distinct block of size k");
            debug_assert!(c.hereditary_ok(&child));
            out.push(canon_key(&child));
        }
    }
    (out, examined)
}

fn family_of(k: usize, key: &Canon) -> SetFamily {
    SetFamily::new(k, key.clone()).expect("canonical keys are valid families")
}

/// One representative per isomorphism class of families meeting `c`,
/// ordered by length and then canonical block list.
pub fn enumerate_families(c: &EnumerationConstraints) -> Result<SearchReport> {
    c.check()?;
    let k = c.k;
    let mut level: Vec<Canon> = vec![Vec::new()];
    let mut levels = Vec::new();
    let mut examined = 0u64;
    let mut finished: Vec<SetFamily> = Vec::new();

    for blocks in 1..=c.max_blocks {
        let parents: Vec<SetFamily> = level.iter().map(|key| family_of(k, key)).collect();
        let results: Vec<(Vec<Canon>, u64)> = parents.par_iter().map(|p| extend(p, c)).collect();
        let mut next = BTreeSet::new();
        let mut candidates = 0u64;
        for (children, n) in results {
            candidates += n;
            next.extend(children);
        }
        examined += candidates;
        levels.push(LevelStats {
            blocks,
            classes: next.len(),
            candidates,
        });
        if let Some(budget) = c.node_budget {
            if examined > budget {
                return Err(Error::BudgetExceeded {
                    budget,
                    explored: examined,
                });
            }
        }
        level = next.into_iter().collect();
        if blocks >= c.min_blocks {
            finished.extend(level.iter().map(|key| family_of(k, key)));
        }
        if level.is_empty() {
            break;
        }
    }

    let solved: Vec<Result<(SetFamily, usize, u64)>> = finished
        .into_par_iter()
        .map(|f| {
            let r = exact_tau_with(
                &f,
                SolverOptions {
                    node_budget: Some(CLASS_SOLVER_BUDGET),
                },
            )?;
            Ok((f, r.tau, r.search_nodes))
        })
        .collect();

    let mut classes = Vec::new();
    let mut solver_nodes = 0;
    for item in solved {
        let (f, tau, nodes) = item?;
        solver_nodes += nodes;
        if c.min_degree.is_some_and(|d| f.degrees().min() < d) || !c.tau_filter.accepts(tau) {
            continue;
        }
        if !c.accepts(&f, tau) {
            return Err(Error::Internal(format!("emitted family {f} violates its constraints")));
        }
        classes.push(ClassRecord {
            length: f.len(),
            vertices: f.vertex_count(),
            tau,
            degree_histogram: f.degrees().histogram(),
            family: f,
        });
    }

    Ok(SearchReport {
        constraints: c.clone(),
        class_count: classes.len(),
        classes,
        levels,
        candidates_examined: examined,
        solver_nodes,
    })
}

/// Every intersecting 4-family with at most four blocks has `τ <= 2`.
#[derive(Debug, Clone, Serialize)]
pub struct Length4Verdict {
    pub passed: bool,
    pub class_count: usize,
    pub classes_by_length: BTreeMap<usize, usize>,
    pub max_tau: usize,
    pub tau_histogram: BTreeMap<usize, usize>,
}

pub fn verify_length4_claim() -> Result<Length4Verdict> {
    let report = enumerate_families(&EnumerationConstraints::new(4, 4).intersecting())?;
    let mut by_length = BTreeMap::new();
    for c in &report.classes {
        *by_length.entry(c.length).or_insert(0) += 1;
    }
    let max_tau = report.max_tau().unwrap_or(0);
    Ok(Length4Verdict {
        passed: max_tau <= 2 && report.class_count > 0,
        class_count: report.class_count,
        classes_by_length: by_length,
        max_tau,
        tau_histogram: report.tau_histogram(),
    })
}

/// Intersecting `k`-families of length `k + 1`, all degrees 2 and
/// `τ = ⌈(k+1)/2⌉` form a single class, that of `M_k`.
#[derive(Debug, Clone, Serialize)]
pub struct UniquenessVerdict {
    pub passed: bool,
    pub k: usize,
    pub class_count: usize,
    pub isomorphic_to_mk: bool,
    pub pairwise_intersections_all_one: bool,
    pub representatives: Vec<SetFamily>,
}

pub fn verify_mk_uniqueness(k: usize) -> Result<UniquenessVerdict> {
    if !(3..=4).contains(&k) {
        return Err(Error::InvalidParameter(format!("uniqueness check supports k = 3 or 4, got {k}")));
    }
    let c = EnumerationConstraints::exactly(k, k + 1)
        .intersecting()
        .degrees(Some(2), Some(2))
        .tau(TauFilter::exactly((k + 1).div_ceil(2)));
    let report = enumerate_families(&c)?;
    let mk = build_mk(k)?;
    let reps: Vec<SetFamily> = report.classes.iter().map(|c| c.family.clone()).collect();
    let isomorphic = reps.len() == 1 && is_isomorphic(&reps[0], &mk);
    let pairwise_one = reps
        .iter()
        .all(|f| f.intersection_multiset().iter().all(|&s| s == 1));
    Ok(UniquenessVerdict {
        passed: reps.len() == 1 && isomorphic && pairwise_one,
        k,
        class_count: reps.len(),
        isomorphic_to_mk: isomorphic,
        pairwise_intersections_all_one: pairwise_one,
        representatives: reps,
    })
}

/// No intersecting 3-family with at most five blocks has `τ = 3`, and a
/// 6-block one does.
#[derive(Debug, Clone, Serialize)]
pub struct Q3Verdict {
    pub passed: bool,
    pub class_count: usize,
    pub classes_with_tau3: usize,
    pub max_tau: usize,
    pub witness: SetFamily,
    pub witness_length: usize,
    pub witness_intersecting: bool,
    pub witness_tau: usize,
    pub fano_tau: usize,
    /// `τ` of the Fano plane with line `i` removed, for each `i`.
    pub fano_minus_line_taus: Vec<usize>,
}

/// The Fano plane without its last line.
pub fn default_q3_witness() -> SetFamily {
    let fano = fano_plane();
    fano.prefix(fano.len() - 1)
        .with_comment("Fano plane minus one line: intersecting 3-family, 6 blocks, tau 3")
}

pub fn verify_q3_lower_bound(witness: Option<&SetFamily>) -> Result<Q3Verdict> {
    let report = enumerate_families(&EnumerationConstraints::new(3, 5).intersecting())?;
    let tau3 = report.classes.iter().filter(|c| c.tau >= 3).count();
    let witness = witness.cloned().unwrap_or_else(default_q3_witness);
    let opts = SolverOptions {
        node_budget: Some(CLASS_SOLVER_BUDGET),
    };
    let witness_tau = exact_tau_with(&witness, opts)?.tau;
    let fano = fano_plane();
    let fano_tau = exact_tau_with(&fano, opts)?.tau;
    let minus: Vec<usize> = (0..fano.len())
        .map(|i| exact_tau_with(&fano.filter_blocks(|j, _| j != i), opts).map(|r| r.tau))
        .collect::<Result<_>>()?;
    let witness_ok = witness.k() == 3
        && witness.len() == 6
        && witness.is_intersecting()
        && witness_tau == 3;
    Ok(Q3Verdict {
        passed: tau3 == 0 && report.class_count > 0 && witness_ok,
        class_count: report.class_count,
        classes_with_tau3: tau3,
        max_tau: report.max_tau().unwrap_or(0),
        witness_length: witness.len(),
        witness_intersecting: witness.is_intersecting(),
        witness_tau,
        witness,
        fano_tau,
        fano_minus_line_taus: minus,
    })
}

/// Pair-counting facts checked on every candidate.
#[derive(Debug, Clone, Serialize)]
pub struct PairCounting {
    pub total_pairs: usize,
    /// `C(4, 2) * 8`
    pub occurring_bound: usize,
    pub max_occurring: usize,
    pub min_unused: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseSearchVerdict {
    pub passed: bool,
    pub assumptions: Vec<String>,
    pub cover_count: usize,
    pub covers: Vec<Vec<Vertex>>,
    pub old_triples_examined: usize,
    pub old_triples_covering: usize,
    pub old_triples_match_cover_list: bool,
    pub fresh_triples_examined: usize,
    pub fresh_triples_covering: usize,
    pub candidates_expected: usize,
    pub candidates_examined: usize,
    pub all_candidates_intersecting: bool,
    pub max_tau: usize,
    pub tau_histogram: BTreeMap<usize, usize>,
    pub candidates_with_degree4_vertex: usize,
    pub pair_counting: PairCounting,
    pub solver_nodes: u64,
}

fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Distinct unordered vertex pairs lying together in some block.
fn occurring_pairs(f: &SetFamily) -> usize {
    let mut pairs = BTreeSet::new();
    for b in f.blocks() {
        for p in b.vertices().iter().combinations(2) {
            pairs.insert((*p[0], *p[1]));
        }
    }
    pairs.len()
}

/// The case analysis behind "no intersecting 4-family of length 8 has
/// `τ = 4`", under its two reductions: a vertex `x` of degree exactly 3
/// exists, and the five blocks avoiding `x` form `M_4`. The three blocks
/// through `x` must then be `x` plus a 3-cover of `M_4`; every choice of
/// three distinct such covers is solved exactly.
pub fn q4_case_search() -> Result<CaseSearchVerdict> {
    let mk = build_mk(4)?;
    let old: Vec<Vertex> = mk.vertex_set();
    let x = *old.last().expect("M_4 has vertices") + 1;
    let covers = enumerate_covers_of_size(&mk, 3);

    // (ii) blocks through x: only 3-covers of M_4 qualify
    let old_triples: Vec<Vec<Vertex>> = old.iter().copied().combinations(3).collect();
    let old_covering: Vec<Vec<Vertex>> =
        old_triples.iter().filter(|t| mk.is_covered_by(t)).cloned().collect();
    let fresh: Vec<Vertex> = (x + 1..=x + 3).collect();
    let mut fresh_examined = 0;
    let mut fresh_covering = 0;
    for j in 1..=3 {
        for olds in old.iter().copied().combinations(3 - j) {
            let mut t = olds;
            t.extend(&fresh[..j]);
            fresh_examined += 1;
            if mk.is_covered_by(&t) {
                fresh_covering += 1;
            }
        }
    }

    // (iii) all choices of three distinct covers
    let opts = SolverOptions {
        node_budget: Some(CLASS_SOLVER_BUDGET),
    };
    let triples: Vec<Vec<usize>> = (0..covers.len()).combinations(3).collect();
    #[allow(clippy::type_complexity)]
    let results: Vec<Result<(usize, bool, usize, bool, u64)>> = triples
        .par_iter()
        .map(|idx| {
            let mut f = mk.clone();
            for &i in idx {
                let mut b = covers[i].clone();
                b.push(x);
                f.push(b)?;
            }
            let r = exact_tau_with(&f, opts)?;
            let pairs = occurring_pairs(&f);
            Ok((r.tau, f.is_intersecting(), pairs, f.max_degree() >= 4, r.search_nodes))
        })
        .collect();

    let total_pairs = binomial(old.len() + 1, 2);
    let occurring_bound = binomial(4, 2) * 8;
    let mut tau_histogram = BTreeMap::new();
    let mut all_intersecting = true;
    let mut max_occurring = 0;
    let mut degree4 = 0;
    let mut solver_nodes = 0;
    for r in results {
        let (tau, intersecting, pairs, has_deg4, nodes) = r?;
        *tau_histogram.entry(tau).or_insert(0) += 1;
        all_intersecting &= intersecting;
        max_occurring = max_occurring.max(pairs);
        degree4 += usize::from(has_deg4);
        solver_nodes += nodes;
    }
    let examined: usize = tau_histogram.values().sum();
    let max_tau = tau_histogram.keys().copied().max().unwrap_or(0);
    let min_unused = total_pairs - max_occurring;
    let pair_counting = PairCounting {
        total_pairs,
        occurring_bound,
        max_occurring,
        min_unused,
        holds: max_occurring <= occurring_bound && min_unused >= total_pairs - occurring_bound,
    };
    let expected = binomial(covers.len(), 3);
    let matches = old_covering == covers;
    Ok(CaseSearchVerdict {
        passed: max_tau <= 3
            && examined == expected
            && all_intersecting
            && matches
            && fresh_covering == 0
            && pair_counting.holds,
        assumptions: vec![
            "a minimal intersecting 4-family with tau 4 has a vertex x of degree exactly 3 (T5-length4)".into(),
            "the five blocks avoiding x form M_4 up to relabeling (C2-uniqueness, k=4)".into(),
        ],
        cover_count: covers.len(),
        covers,
        old_triples_examined: old_triples.len(),
        old_triples_covering: old_covering.len(),
        old_triples_match_cover_list: matches,
        fresh_triples_examined: fresh_examined,
        fresh_triples_covering: fresh_covering,
        candidates_expected: expected,
        candidates_examined: examined,
        all_candidates_intersecting: all_intersecting,
        max_tau,
        tau_histogram,
        candidates_with_degree4_vertex: degree4,
        pair_counting,
        solver_nodes,
    })
}
