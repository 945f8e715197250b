//! Canonical labeling of set families by individualization and
//! refinement.
//!
//! A family is viewed as its vertex/block incidence structure. Colors on
//! vertices and blocks are refined until stable (each element is recolored
//! by its old color and the multiset of neighbor colors); when the vertex
//! coloring is not discrete, the first non-singleton vertex cell is split
//! by individualizing each of its vertices in turn. Every leaf of that
//! search tree gives a labeling; the canonical leaf minimizes the pair
//! (sequence of node invariants along its path, relabeled block list), and
//! subtrees whose invariant sequence is already larger than the best
//! leaf's are cut. Automorphisms found at equal
//! leaves prune the tree in two ways: jumping back to the branching point,
//! and skipping children in the orbit of an already explored sibling under
//! the automorphisms that fix the current prefix.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::family::{Block, SetFamily, Vertex};

/// Relabeling-invariant representative of a family.
#[derive(Debug, Clone, Serialize)]
pub struct CanonicalForm {
    k: usize,
    canonical_blocks: Vec<Vec<Vertex>>,
    /// original vertex -> canonical label
    certificate: BTreeMap<Vertex, Vertex>,
}

impl PartialEq for CanonicalForm {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.canonical_blocks == other.canonical_blocks
    }
}

impl Eq for CanonicalForm {}

impl std::hash::Hash for CanonicalForm {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.k.hash(state);
        self.canonical_blocks.hash(state);
    }
}

impl CanonicalForm {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Sorted list of sorted blocks over labels `1..=n`.
    pub fn canonical_blocks(&self) -> &[Vec<Vertex>] {
        &self.canonical_blocks
    }

    pub fn certificate(&self) -> &BTreeMap<Vertex, Vertex> {
        &self.certificate
    }

    /// The canonical representative as a family.
    pub fn to_family(&self) -> SetFamily {
        SetFamily::from_parts_unchecked(
            self.k,
            self.canonical_blocks
                .iter()
                .map(|b| Block::from_sorted(b.clone()))
                .collect(),
        )
    }

    /// Key for ordering and hashing classes: the canonical block list.
    pub fn into_blocks(self) -> Vec<Vec<Vertex>> {
        self.canonical_blocks
    }
}

struct Incidence {
    ids: Vec<Vertex>,
    blocks: Vec<Vec<usize>>,
    vblocks: Vec<Vec<usize>>,
}

impl Incidence {
    fn new(f: &SetFamily) -> Incidence {
        let ids = f.vertex_set();
        let blocks: Vec<Vec<usize>> = f
            .blocks()
            .iter()
            .map(|b| {
                b.vertices()
                    .iter()
                    .map(|v| ids.binary_search(v).expect("vertex in set"))
                    .collect()
            })
            .collect();
        let mut vblocks = vec![Vec::new(); ids.len()];
        for (bi, b) in blocks.iter().enumerate() {
            for &v in b {
                vblocks[v].push(bi);
            }
        }
        Incidence {
            ids,
            blocks,
            vblocks,
        }
    }
}

/// Replaces each signature by its rank among the distinct signatures.
/// Returns the number of distinct values.
fn rank_signatures(sigs: Vec<Vec<u32>>, out: &mut [u32]) -> usize {
    let mut order: Vec<usize> = (0..sigs.len()).collect();
    order.sort_by(|&a, &b| sigs[a].cmp(&sigs[b]));
    let mut rank = 0u32;
    for (pos, &i) in order.iter().enumerate() {
        if pos > 0 && sigs[order[pos - 1]] != sigs[i] {
            rank += 1;
        }
        out[i] = rank;
    }
    if sigs.is_empty() {
        0
    } else {
        rank as usize + 1
    }
}

fn count_distinct(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

/// Refines vertex and block colors to a stable coloring. The first
/// component of every signature is the old color, so cells only split and
/// keep their relative order.
fn refine(inc: &Incidence, vcol: &mut [u32], bcol: &mut [u32]) {
    let mut nv = count_distinct(vcol);
    let mut nb = count_distinct(bcol);
    loop {
        let bsigs = inc
            .blocks
            .iter()
            .enumerate()
            .map(|(bi, b)| {
                let mut s: Vec<u32> = b.iter().map(|&v| vcol[v]).collect();
                s.sort_unstable();
                s.insert(0, bcol[bi]);
                s
            })
            .collect();
        let nb2 = rank_signatures(bsigs, bcol);
        let vsigs = inc
            .vblocks
            .iter()
            .enumerate()
            .map(|(v, bs)| {
                let mut s: Vec<u32> = bs.iter().map(|&b| bcol[b]).collect();
                s.sort_unstable();
                s.insert(0, vcol[v]);
                s
            })
            .collect();
        let nv2 = rank_signatures(vsigs, vcol);
        if nv2 == nv && nb2 == nb {
            return;
        }
        nv = nv2;
        nb = nb2;
    }
}

fn individualize(vcol: &[u32], w: usize) -> Vec<u32> {
    let sigs: Vec<Vec<u32>> = vcol
        .iter()
        .enumerate()
        .map(|(v, &c)| vec![c, u32::from(v != w)])
        .collect();
    let mut out = vec![0; vcol.len()];
    rank_signatures(sigs, &mut out);
    out
}

struct Leaf {
    seq: Vec<usize>,
    traces: Vec<Vec<u32>>,
    labeling: Vec<u32>,
    form: Vec<u32>,
}

struct Search<'a> {
    inc: &'a Incidence,
    k: usize,
    best: Option<Leaf>,
    seen: HashMap<Vec<u32>, Leaf>,
    /// node invariants along the current path
    path: Vec<Vec<u32>>,
    automorphisms: Vec<Vec<usize>>,
    leaves: u64,
}

fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Quotient matrix of a stable coloring: for every cell (vertex cells
/// then block cells, in color order) its size and the sorted colors of
/// one member's neighbors. Invariant under relabeling.
fn node_invariant(inc: &Incidence, vcol: &[u32], bcol: &[u32]) -> Vec<u32> {
    fn cells(colors: &[u32]) -> Vec<(usize, u32)> {
        let ncells = colors.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut rep = vec![usize::MAX; ncells];
        let mut size = vec![0u32; ncells];
        for (i, &c) in colors.iter().enumerate() {
            if rep[c as usize] == usize::MAX {
                rep[c as usize] = i;
            }
            size[c as usize] += 1;
        }
        rep.into_iter().zip(size).collect()
    }
    let mut out = Vec::new();
    for (v, size) in cells(vcol) {
        let mut nb: Vec<u32> = inc.vblocks[v].iter().map(|&b| bcol[b]).collect();
        nb.sort_unstable();
        out.push(size);
        out.extend(nb);
        out.push(u32::MAX);
    }
    for (b, size) in cells(bcol) {
        let mut nb: Vec<u32> = inc.blocks[b].iter().map(|&v| vcol[v]).collect();
        nb.sort_unstable();
        out.push(size);
        out.extend(nb);
        out.push(u32::MAX);
    }
    out
}

impl Search<'_> {
    /// Relabeled blocks, each sorted, list sorted, flattened. All blocks
    /// have length `k`, so comparing flattened vectors is comparing lists.
    fn form(&self, labeling: &[u32]) -> Vec<u32> {
        let mut blocks: Vec<Vec<u32>> = self
            .inc
            .blocks
            .iter()
            .map(|b| {
                let mut x: Vec<u32> = b.iter().map(|&v| labeling[v]).collect();
                x.sort_unstable();
                x
            })
            .collect();
        blocks.sort_unstable();
        let mut flat = Vec::with_capacity(blocks.len() * self.k);
        for b in blocks {
            flat.extend(b);
        }
        flat
    }

    /// Permutation sending `from`'s labeling onto `to`'s: maps each vertex
    /// `v` to the vertex that `to` labels with `from`'s label of `v`.
    fn automorphism(from: &Leaf, to: &[u32]) -> Vec<usize> {
        let mut inverse = vec![0usize; to.len()];
        for (v, &l) in to.iter().enumerate() {
            inverse[l as usize] = v;
        }
        from.labeling.iter().map(|&l| inverse[l as usize]).collect()
    }

    fn record(&mut self, gamma: Vec<usize>) {
        if gamma.iter().enumerate().any(|(i, &g)| i != g) {
            self.automorphisms.push(gamma);
        }
    }

    fn leaf(&mut self, labeling: Vec<u32>, seq: &[usize]) -> Option<usize> {
        self.leaves += 1;
        let form = self.form(&labeling);
        if let Some(earlier) = self.seen.get(&form) {
            // equal forms: the two leaves differ by an automorphism that
            // fixes their common prefix, so the rest of this subtree
            // mirrors one already explored
            let gamma = Self::automorphism(earlier, &labeling);
            let level = common_prefix(seq, &earlier.seq);
            self.record(gamma);
            return Some(level);
        }
        let leaf = Leaf {
            seq: seq.to_vec(),
            traces: self.path.clone(),
            labeling,
            form,
        };
        let better = self
            .best
            .as_ref()
            .is_none_or(|b| (&leaf.traces, &leaf.form) < (&b.traces, &b.form));
        if better {
            self.best = Some(Leaf {
                seq: leaf.seq.clone(),
                traces: leaf.traces.clone(),
                labeling: leaf.labeling.clone(),
                form: leaf.form.clone(),
            });
        }
        self.seen.insert(leaf.form.clone(), leaf);
        None
    }

    /// Orbit representatives: `w` is skipped when some automorphism fixing
    /// `seq` pointwise relates it to an already tried vertex.
    fn same_orbit_as_tried(&self, seq: &[usize], tried: &[usize], w: usize) -> bool {
        let n = self.inc.ids.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut any = false;
        for g in &self.automorphisms {
            if seq.iter().all(|&v| g[v] == v) {
                any = true;
                for (i, &gi) in g.iter().enumerate() {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, gi));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
        if !any {
            return false;
        }
        let rw = find(&mut parent, w);
        tried.iter().any(|&t| find(&mut parent, t) == rw)
    }

    fn descend(&mut self, vcol: Vec<u32>, bcol: Vec<u32>, seq: &mut Vec<usize>) -> Option<usize> {
        let (mut vcol, mut bcol) = (vcol, bcol);
        refine(self.inc, &mut vcol, &mut bcol);
        self.path.push(node_invariant(self.inc, &vcol, &bcol));
        let result = self.expand(vcol, bcol, seq);
        self.path.pop();
        result
    }

    fn expand(&mut self, vcol: Vec<u32>, bcol: Vec<u32>, seq: &mut Vec<usize>) -> Option<usize> {
        if let Some(best) = &self.best {
            let d = self.path.len();
            if self.path[..] > best.traces[..d.min(best.traces.len())] {
                return None;
            }
        }
        let n = vcol.len();
        let mut size = vec![0usize; n];
        for &c in &vcol {
            size[c as usize] += 1;
        }
        let Some(target) = (0..n).filter(|&c| size[c] > 1).min_by_key(|&c| size[c]) else {
            return self.leaf(vcol, seq);
        };
        let depth = seq.len();
        let cell: Vec<usize> = (0..n).filter(|&v| vcol[v] as usize == target).collect();
        let mut tried = Vec::new();
        for w in cell {
            if self.same_orbit_as_tried(seq, &tried, w) {
                continue;
            }
            tried.push(w);
            seq.push(w);
            let jump = self.descend(individualize(&vcol, w), bcol.clone(), seq);
            seq.pop();
            if let Some(level) = jump {
                if level < depth {
                    return Some(level);
                }
            }
        }
        None
    }
}

/// Canonical form of `f`: invariant under vertex relabeling and block
/// reordering; equal for two families iff they are isomorphic.
pub fn canonical_form(f: &SetFamily) -> CanonicalForm {
    canonical_form_with_stats(f).0
}

/// As [`canonical_form`], also returning the number of search-tree
/// leaves visited.
pub fn canonical_form_with_stats(f: &SetFamily) -> (CanonicalForm, u64) {
    let inc = Incidence::new(f);
    let n = inc.ids.len();
    if n == 0 {
        return (
            CanonicalForm {
                k: f.k(),
                canonical_blocks: Vec::new(),
                certificate: BTreeMap::new(),
            },
            0,
        );
    }
    let mut search = Search {
        inc: &inc,
        k: f.k(),
        best: None,
        seen: HashMap::new(),
        path: Vec::new(),
        automorphisms: Vec::new(),
        leaves: 0,
    };
    search.descend(vec![0; n], vec![0; inc.blocks.len()], &mut Vec::new());
    let best = search.best.take().expect("at least one leaf");
    let canonical_blocks = best
        .form
        .chunks(f.k())
        .map(|c| c.iter().map(|&l| l + 1).collect())
        .collect();
    let certificate = inc
        .ids
        .iter()
        .zip(&best.labeling)
        .map(|(&v, &l)| (v, l + 1))
        .collect();
    (
        CanonicalForm {
            k: f.k(),
            canonical_blocks,
            certificate,
        },
        search.leaves,
    )
}

/// Cheap isomorphism invariants: `k`, length, vertex count, degree
/// multiset, pairwise-intersection multiset.
pub fn quick_invariants(f: &SetFamily) -> (usize, usize, usize, Vec<usize>, Vec<usize>) {
    (
        f.k(),
        f.len(),
        f.vertex_count(),
        f.degrees().multiset(),
        f.intersection_multiset(),
    )
}

pub fn is_isomorphic(a: &SetFamily, b: &SetFamily) -> bool {
    isomorphism(a, b).is_some()
}

/// A vertex bijection carrying the blocks of `a` onto those of `b`.
pub fn isomorphism(a: &SetFamily, b: &SetFamily) -> Option<BTreeMap<Vertex, Vertex>> {
    if quick_invariants(a) != quick_invariants(b) {
        return None;
    }
    let ca = canonical_form(a);
    let cb = canonical_form(b);
    if ca != cb {
        return None;
    }
    let from_canon: BTreeMap<Vertex, Vertex> = cb.certificate.iter().map(|(&v, &l)| (l, v)).collect();
    Some(
        ca.certificate
            .iter()
            .map(|(&v, l)| (v, from_canon[l]))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{build_degree3_family, build_mk, fano_plane, paper_example_family};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fam(k: usize, blocks: &[&[Vertex]]) -> SetFamily {
        SetFamily::new(k, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    fn shuffled(f: &SetFamily, rng: &mut ChaCha8Rng) -> SetFamily {
        let vs = f.vertex_set();
        let mut targets: Vec<Vertex> = (1..=vs.len() as Vertex).map(|x| x * 3 + 1).collect();
        targets.shuffle(rng);
        let map: BTreeMap<Vertex, Vertex> = vs.into_iter().zip(targets).collect();
        let g = f.relabel(|v| map[&v]);
        let mut blocks = g.block_lists();
        blocks.shuffle(rng);
        SetFamily::new(g.k(), blocks).unwrap()
    }

    /// Brute force over all bijections of the vertex sets.
    fn brute_isomorphic(a: &SetFamily, b: &SetFamily) -> bool {
        if a.k() != b.k() || a.len() != b.len() {
            return false;
        }
        let va = a.vertex_set();
        let vb = b.vertex_set();
        if va.len() != vb.len() {
            return false;
        }
        let mut target = b.block_lists();
        target.sort();
        let mut perm: Vec<usize> = (0..vb.len()).collect();
        loop {
            let map: BTreeMap<Vertex, Vertex> =
                va.iter().zip(&perm).map(|(&x, &i)| (x, vb[i])).collect();
            let mut img = a.relabel(|v| map[&v]).block_lists();
            img.sort();
            if img == target {
                return true;
            }
            if !next_permutation(&mut perm) {
                return false;
            }
        }
    }

    fn next_permutation(p: &mut [usize]) -> bool {
        if p.len() < 2 {
            return false;
        }
        let Some(i) = (0..p.len() - 1).rev().find(|&i| p[i] < p[i + 1]) else {
            return false;
        };
        let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
        true
    }

    #[test]
    fn relabeling_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in [
            build_mk(4).unwrap(),
            build_mk(6).unwrap(),
            fano_plane(),
            paper_example_family(),
            build_degree3_family(3).unwrap(),
        ] {
            let c = canonical_form(&f);
            for _ in 0..30 {
                assert_eq!(canonical_form(&shuffled(&f, &mut rng)), c);
            }
        }
    }

    #[test]
    fn certificate_replays() {
        for f in [build_mk(5).unwrap(), fano_plane(), paper_example_family()] {
            let c = canonical_form(&f);
            let mut img = f.relabel(|v| c.certificate()[&v]).block_lists();
            img.sort();
            assert_eq!(img, c.canonical_blocks());
        }
    }

    #[test]
    fn example_prefix_is_m4() {
        let ex = paper_example_family();
        assert_eq!(canonical_form(&ex.prefix(5)), canonical_form(&build_mk(4).unwrap()));
    }

    #[test]
    fn fano_differs_from_m3_plus_three_blocks() {
        // M_3 on 6 vertices plus three blocks through a new vertex 7
        let other = fam(
            3,
            &[&[1, 2, 3], &[1, 4, 5], &[2, 4, 6], &[3, 5, 6], &[1, 6, 7], &[2, 5, 7], &[3, 4, 7]],
        );
        assert!(other.is_intersecting());
        // that is in fact a Fano plane; perturb one block to change degrees
        let perturbed = fam(
            3,
            &[&[1, 2, 3], &[1, 4, 5], &[2, 4, 6], &[3, 5, 6], &[1, 6, 7], &[2, 5, 7], &[1, 2, 6]],
        );
        assert!(perturbed.is_intersecting());
        assert_ne!(perturbed.degrees().multiset(), fano_plane().degrees().multiset());
        assert_ne!(canonical_form(&perturbed), canonical_form(&fano_plane()));
        assert!(is_isomorphic(&other, &fano_plane()));
    }

    #[test]
    fn isomorphic_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m3 = build_mk(3).unwrap();
        assert!(is_isomorphic(&m3, &shuffled(&m3, &mut rng)));
        let fano4 = fano_plane().prefix(4);
        assert_ne!(m3.degrees().multiset(), fano4.degrees().multiset());
        assert!(!is_isomorphic(&m3, &fano4));
        let d3 = build_degree3_family(2).unwrap();
        assert!(is_isomorphic(&d3, &shuffled(&fano_plane(), &mut rng)));
    }

    #[test]
    fn isomorphism_maps_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = paper_example_family();
        let b = shuffled(&a, &mut rng);
        let map = isomorphism(&a, &b).unwrap();
        assert!(a.relabel(|v| map[&v]).same_blocks_as(&b));
    }

    #[test]
    fn empty_family() {
        let e = SetFamily::empty(3).unwrap();
        assert!(canonical_form(&e).canonical_blocks().is_empty());
        assert!(is_isomorphic(&e, &e));
        assert!(!is_isomorphic(&e, &SetFamily::empty(2).unwrap()));
    }

    #[test]
    fn agrees_with_brute_force_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        use rand::Rng;
        let mut agreed_true = 0;
        for _ in 0..300 {
            let k = rng.gen_range(1..=3);
            let n: Vertex = rng.gen_range(k as Vertex..=6);
            let m = rng.gen_range(1..=4usize).min(binom(n as u64, k as u64) as usize);
            let random = |rng: &mut ChaCha8Rng| {
                let mut blocks: Vec<Vec<Vertex>> = Vec::new();
                while blocks.len() < m {
                    let mut all: Vec<Vertex> = (1..=n).collect();
                    all.shuffle(rng);
                    let mut b = all[..k].to_vec();
                    b.sort();
                    if !blocks.contains(&b) {
                        blocks.push(b);
                    }
                }
                SetFamily::new(k, blocks).unwrap()
            };
            let a = random(&mut rng);
            let b = if rng.gen_bool(0.5) { shuffled(&a, &mut rng) } else { random(&mut rng) };
            let fast = is_isomorphic(&a, &b);
            assert_eq!(fast, brute_isomorphic(&a, &b), "{a} vs {b}");
            agreed_true += usize::from(fast);
        }
        assert!(agreed_true > 100);
    }

    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn large_symmetric_families_are_fast() {
        let (_, leaves) = canonical_form_with_stats(&build_mk(12).unwrap());
        assert!(leaves <= 100, "leaves={leaves}");
        let (_, leaves) = canonical_form_with_stats(&build_degree3_family(3).unwrap());
        assert!(leaves <= 100, "leaves={leaves}");
    }
}
