//! Exact counts of mutually orthogonal k-tuples and of pattern copies inside a
//! vertex subset.
//!
//! The fast path enumerates k-cliques by recursive candidate-set intersection
//! on the bit rows, visiting vertices in ascending index order, and multiplies
//! by `k!`. [`count_ordered_tuples_oracle`] is the unpruned reference.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::bits::BitRow;
use crate::error::{Error, Result};
use crate::graph::OrthoGraph;
use crate::linear::FqVector;

/// Default cap on `m^k` for the oracle.
pub const DEFAULT_ORACLE_WORK: u128 = 1 << 28;

/// Pattern graphs with more vertices than this are rejected.
pub const MAX_PATTERN_VERTICES: usize = 8;

/// A small simple graph `H` with its invariants cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternGraph {
    s: usize,
    edges: Vec<(usize, usize)>,
    max_degree: usize,
    aut_count: u64,
}

impl PatternGraph {
    pub fn new(s: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidPattern("at least one vertex is required".into()));
        }
        if s > MAX_PATTERN_VERTICES {
            return Err(Error::PatternTooLarge(s));
        }
        let mut seen = BTreeSet::new();
        for &(a, b) in edges {
            if a >= s || b >= s {
                return Err(Error::InvalidPattern(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidPattern(format!("loop at {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidPattern(format!("repeated edge ({a},{b})")));
            }
        }
        let edges: Vec<(usize, usize)> = seen.into_iter().collect();
        let mut deg = vec![0usize; s];
        for &(a, b) in &edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        let mut h = PatternGraph {
            s,
            edges,
            max_degree: deg.into_iter().max().unwrap_or(0),
            aut_count: 0,
        };
        h.aut_count = automorphism_count(&h)?;
        Ok(h)
    }

    /// The complete graph `K_k`.
    pub fn complete(k: usize) -> Result<Self> {
        let edges: Vec<_> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
        PatternGraph::new(k, &edges)
    }

    /// The path on `s` vertices.
    pub fn path(s: usize) -> Result<Self> {
        let edges: Vec<_> = (1..s).map(|i| (i - 1, i)).collect();
        PatternGraph::new(s, &edges)
    }

    pub fn cycle(s: usize) -> Result<Self> {
        if s < 3 {
            return Err(Error::InvalidPattern("a cycle needs at least 3 vertices".into()));
        }
        let edges: Vec<_> = (0..s).map(|i| (i, (i + 1) % s)).collect();
        PatternGraph::new(s, &edges)
    }

    /// Parses `K3`, `P3`, `C4` style names.
    pub fn from_name(name: &str) -> Result<Self> {
        let bad = || Error::InvalidPattern(format!("unknown pattern {name:?}"));
        let (kind, size) = name.split_at(1);
        let size: usize = size.parse().map_err(|_| bad())?;
        match kind {
            "K" | "k" => PatternGraph::complete(size),
            "P" | "p" => PatternGraph::path(size),
            "C" | "c" => PatternGraph::cycle(size),
            _ => Err(bad()),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.s
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn aut_count(&self) -> u64 {
        self.aut_count
    }

    fn adjacency_masks(&self) -> Vec<u16> {
        let mut masks = vec![0u16; self.s];
        for &(a, b) in &self.edges {
            masks[a] |= 1 << b;
            masks[b] |= 1 << a;
        }
        masks
    }

    /// Vertex order for backtracking: each next vertex has the most already
    /// placed neighbours, ties broken by degree then index.
    fn search_order(&self) -> Vec<usize> {
        let masks = self.adjacency_masks();
        let mut placed = 0u16;
        let mut order = Vec::with_capacity(self.s);
        for _ in 0..self.s {
            let next = (0..self.s)
                .filter(|&v| placed & (1 << v) == 0)
                .max_by_key(|&v| {
                    (
                        (masks[v] & placed).count_ones(),
                        masks[v].count_ones(),
                        std::cmp::Reverse(v),
                    )
                })
                .expect("unplaced vertex remains");
            placed |= 1 << next;
            order.push(next);
        }
        order
    }
}

/// Number of vertex permutations of `h` that preserve its edge set, by
/// exhaustive enumeration.
pub fn automorphism_count(h: &PatternGraph) -> Result<u64> {
    if h.s > MAX_PATTERN_VERTICES {
        return Err(Error::PatternTooLarge(h.s));
    }
    let masks = h.adjacency_masks();
    let mut perm: Vec<usize> = (0..h.s).collect();
    let mut count = 0u64;
    permute(&mut perm, 0, &mut |p| {
        if h.edges.iter().all(|&(a, b)| masks[p[a]] & (1 << p[b]) != 0) {
            count += 1;
        }
    });
    Ok(count)
}

fn permute(perm: &mut [usize], start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == perm.len() {
        visit(perm);
        return;
    }
    for i in start..perm.len() {
        perm.swap(start, i);
        permute(perm, start + 1, visit);
        perm.swap(start, i);
    }
}

/// A set `U` of vertices of one graph.
#[derive(Clone, Debug)]
pub struct VertexSubset<'g> {
    graph: &'g OrthoGraph,
    members: BitRow,
}

impl<'g> VertexSubset<'g> {
    pub fn empty(graph: &'g OrthoGraph) -> Self {
        VertexSubset { graph, members: BitRow::zeros(graph.n()) }
    }

    pub fn full(graph: &'g OrthoGraph) -> Self {
        VertexSubset { graph, members: BitRow::ones(graph.n()) }
    }

    pub fn from_indices(graph: &'g OrthoGraph, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = VertexSubset::empty(graph);
        for i in indices {
            s.insert(i)?;
        }
        Ok(s)
    }

    /// Rejects the zero vector and anything that is not a vertex of `graph`.
    pub fn from_vectors<'a>(graph: &'g OrthoGraph, vectors: impl IntoIterator<Item = &'a FqVector>) -> Result<Self> {
        let mut s = VertexSubset::empty(graph);
        for v in vectors {
            if v.is_zero() {
                return Err(Error::ZeroVector);
            }
            let i = graph.index_of(v).ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
            s.members.set(i);
        }
        Ok(s)
    }

    /// Parses newline-separated vector serializations; blank lines are skipped.
    pub fn parse(graph: &'g OrthoGraph, text: &str) -> Result<Self> {
        let vectors = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| FqVector::parse(graph.field().clone(), l))
            .collect::<Result<Vec<_>>>()?;
        for v in &vectors {
            if v.dim() != graph.d() {
                return Err(Error::DimensionMismatch(v.dim(), graph.d()));
            }
        }
        VertexSubset::from_vectors(graph, &vectors)
    }

    pub fn from_members(graph: &'g OrthoGraph, members: BitRow) -> Result<Self> {
        if members.len() != graph.n() {
            return Err(Error::DimensionMismatch(members.len(), graph.n()));
        }
        Ok(VertexSubset { graph, members })
    }

    pub fn insert(&mut self, i: usize) -> Result<()> {
        if i >= self.graph.n() {
            return Err(Error::VertexOutOfRange { index: i, n: self.graph.n() });
        }
        self.members.set(i);
        Ok(())
    }

    pub fn graph(&self) -> &'g OrthoGraph {
        self.graph
    }

    pub fn members(&self) -> &BitRow {
        &self.members
    }

    pub fn m(&self) -> usize {
        self.members.count_ones() as usize
    }

    pub fn indices(&self) -> Vec<usize> {
        self.members.iter_ones().collect()
    }
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Ordered k-tuples of distinct, pairwise adjacent members by brute force over
/// all `m^k` index tuples. Fails if `m^k` exceeds `work_bound`.
pub fn count_ordered_tuples_oracle_with_bound(subset: &VertexSubset, k: usize, work_bound: u128) -> Result<u128> {
    if k == 0 {
        return Err(Error::InvalidParameters("k must be at least 1".into()));
    }
    let members = subset.indices();
    let m = members.len();
    let work = (m as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if work > work_bound {
        return Err(Error::WorkBoundExceeded { work, bound: work_bound });
    }
    if m == 0 {
        return Ok(0);
    }
    let g = subset.graph();
    let mut idx = vec![0usize; k];
    let mut count = 0u128;
    loop {
        let tuple = idx.iter().map(|&t| members[t]);
        let mut ok = true;
        for (a, x) in tuple.clone().enumerate() {
            for y in tuple.clone().skip(a + 1) {
                if x == y || !g.adjacent(x, y) {
                    ok = false;
                }
            }
        }
        if ok {
            count += 1;
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(count);
            }
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

pub fn count_ordered_tuples_oracle(subset: &VertexSubset, k: usize) -> Result<u128> {
    count_ordered_tuples_oracle_with_bound(subset, k, DEFAULT_ORACLE_WORK)
}

/// Number of k-cliques among the members, loops ignored.
pub fn count_cliques(subset: &VertexSubset, k: usize) -> Result<u128> {
    if k == 0 {
        return Err(Error::InvalidParameters("k must be at least 1".into()));
    }
    let members = subset.members();
    if k == 1 {
        return Ok(members.count_ones() as u128);
    }
    let rows = subset.graph().rows();
    let n = members.len();
    let total = subset
        .indices()
        .into_par_iter()
        .map(|v| {
            // levels[0] holds the candidates after choosing v
            let mut levels: Vec<BitRow> = (0..k - 1).map(|_| BitRow::zeros(n)).collect();
            levels[0].assign_and(members, &rows[v]);
            levels[0].clear_through(v);
            extend_cliques(rows, &mut levels, k - 1)
        })
        .sum();
    Ok(total)
}

/// Counts ways to pick `remaining` more vertices from `levels[0]`, each
/// adjacent to all previously picked ones.
fn extend_cliques(rows: &[BitRow], levels: &mut [BitRow], remaining: usize) -> u128 {
    let (cur, rest) = levels.split_first_mut().expect("one level per remaining vertex");
    if remaining == 1 {
        return cur.count_ones() as u128;
    }
    if cur.count_ones() < remaining as u64 {
        return 0;
    }
    let mut total = 0u128;
    for v in cur.iter_ones() {
        rest[0].assign_and(cur, &rows[v]);
        rest[0].clear_through(v);
        total += extend_cliques(rows, rest, remaining - 1);
    }
    total
}

/// `lambda_k` of the subset: `k!` times the number of k-cliques.
pub fn count_ordered_tuples(subset: &VertexSubset, k: usize) -> Result<u128> {
    let cliques = count_cliques(subset, k)?;
    cliques
        .checked_mul(factorial(k))
        .ok_or_else(|| Error::InvalidParameters("count overflows 128 bits".into()))
}

/// Not-necessarily-induced copies of `h` in the subset: injective
/// edge-preserving maps divided by `|Aut(h)|`.
pub fn count_copies(subset: &VertexSubset, h: &PatternGraph) -> Result<u128> {
    let maps = count_embeddings(subset, h);
    let aut = h.aut_count() as u128;
    debug_assert_eq!(maps % aut, 0, "embedding count not divisible by |Aut(H)|");
    Ok(maps / aut)
}

/// Injective maps from `V(h)` into the subset sending edges to adjacent pairs.
pub fn count_embeddings(subset: &VertexSubset, h: &PatternGraph) -> u128 {
    let order = h.search_order();
    let masks = h.adjacency_masks();
    // for each position, the earlier positions it must be adjacent to
    let back: Vec<Vec<usize>> = order
        .iter()
        .enumerate()
        .map(|(t, &v)| (0..t).filter(|&u| masks[v] & (1 << order[u]) != 0).collect())
        .collect();
    let n = subset.graph().n();
    let ctx = EmbedCtx {
        rows: subset.graph().rows(),
        members: subset.members(),
        back: &back,
    };
    subset
        .indices()
        .into_par_iter()
        .map(|first| {
            let mut image = vec![0usize; h.s];
            image[0] = first;
            let mut used = BitRow::zeros(n);
            used.set(first);
            let mut scratch: Vec<BitRow> = (0..h.s).map(|_| BitRow::zeros(n)).collect();
            ctx.extend(1, &mut image, &mut used, &mut scratch)
        })
        .sum()
}

struct EmbedCtx<'a> {
    rows: &'a [BitRow],
    members: &'a BitRow,
    back: &'a [Vec<usize>],
}

impl EmbedCtx<'_> {
    fn extend(&self, pos: usize, image: &mut [usize], used: &mut BitRow, scratch: &mut [BitRow]) -> u128 {
        if pos == image.len() {
            return 1;
        }
        let (cand, rest) = scratch.split_first_mut().expect("scratch per position");
        cand.clone_from(self.members);
        for &u in &self.back[pos] {
            cand.and_with(&self.rows[image[u]]);
        }
        cand.and_not_with(used);
        if pos + 1 == image.len() {
            return cand.count_ones() as u128;
        }
        let mut total = 0;
        for v in cand.iter_ones() {
            image[pos] = v;
            used.set(v);
            total += self.extend(pos + 1, image, used, rest);
            used.clear(v);
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_affine_graph, build_projective_graph};

    #[test]
    fn automorphism_examples() {
        assert_eq!(PatternGraph::complete(3).unwrap().aut_count(), 6);
        assert_eq!(PatternGraph::path(3).unwrap().aut_count(), 2);
        assert_eq!(PatternGraph::complete(4).unwrap().aut_count(), 24);
        assert_eq!(PatternGraph::cycle(5).unwrap().aut_count(), 10);
        assert_eq!(PatternGraph::complete(1).unwrap().aut_count(), 1);
        assert_eq!(PatternGraph::new(4, &[]).unwrap().aut_count(), 24);
    }

    #[test]
    fn pattern_invariants() {
        let p4 = PatternGraph::path(4).unwrap();
        assert_eq!((p4.vertex_count(), p4.edge_count(), p4.max_degree()), (4, 3, 2));
        for h in [PatternGraph::complete(5).unwrap(), PatternGraph::cycle(6).unwrap(), p4] {
            assert_eq!(factorial(h.vertex_count()) % h.aut_count() as u128, 0);
        }
        assert_eq!(PatternGraph::from_name("K3").unwrap(), PatternGraph::complete(3).unwrap());
        assert_eq!(PatternGraph::from_name("P3").unwrap(), PatternGraph::path(3).unwrap());
        assert!(PatternGraph::from_name("X3").is_err());
    }

    #[test]
    fn pattern_errors() {
        assert_eq!(PatternGraph::complete(9).unwrap_err(), Error::PatternTooLarge(9));
        assert!(PatternGraph::new(3, &[(0, 0)]).is_err());
        assert!(PatternGraph::new(3, &[(0, 1), (1, 0)]).is_err());
        assert!(PatternGraph::new(3, &[(0, 3)]).is_err());
        assert!(PatternGraph::new(0, &[]).is_err());
    }

    #[test]
    fn oracle_examples() {
        let g = build_affine_graph(3, 3).unwrap();
        let full = VertexSubset::full(&g);
        assert_eq!(count_ordered_tuples_oracle(&full, 1).unwrap(), 26);
        // 26 * 8 neighbours, minus the 8 self-orthogonal vectors counted in their own rows
        assert_eq!(g.loops().count_ones(), 8);
        assert_eq!(count_ordered_tuples_oracle(&full, 2).unwrap(), 200);
        let f = g.field().clone();
        let basis: Vec<FqVector> = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
            .iter()
            .map(|c| FqVector::from_indices(f.clone(), c).unwrap())
            .collect();
        let e = VertexSubset::from_vectors(&g, &basis).unwrap();
        assert_eq!(count_ordered_tuples_oracle(&e, 3).unwrap(), 6);
        assert!(matches!(
            count_ordered_tuples_oracle_with_bound(&full, 3, 1000),
            Err(Error::WorkBoundExceeded { .. })
        ));
    }

    #[test]
    fn fast_path_examples() {
        let g = build_affine_graph(3, 3).unwrap();
        let full = VertexSubset::full(&g);
        assert_eq!(count_ordered_tuples(&full, 2).unwrap(), 200);
        assert_eq!(count_ordered_tuples(&full, 1).unwrap(), 26);
        let small = VertexSubset::from_indices(&g, [0, 5]).unwrap();
        assert_eq!(count_ordered_tuples(&small, 3).unwrap(), 0);
        assert!(count_ordered_tuples(&full, 0).is_err());
    }

    #[test]
    fn copies_examples() {
        let g = build_affine_graph(3, 3).unwrap();
        let full = VertexSubset::full(&g);
        assert_eq!(count_copies(&full, &PatternGraph::complete(2).unwrap()).unwrap(), 100);
        let empty = VertexSubset::empty(&g);
        for h in ["K1", "K3", "P3", "C4"] {
            assert_eq!(count_copies(&empty, &PatternGraph::from_name(h).unwrap()).unwrap(), 0);
        }
        for k in 1..=4 {
            let copies = count_copies(&full, &PatternGraph::complete(k).unwrap()).unwrap();
            assert_eq!(copies * factorial(k), count_ordered_tuples(&full, k).unwrap());
        }
    }

    #[test]
    fn subset_errors() {
        let g = build_affine_graph(3, 3).unwrap();
        assert_eq!(VertexSubset::parse(&g, "0,0,0\n").unwrap_err(), Error::ZeroVector);
        assert!(matches!(VertexSubset::parse(&g, "1,0\n"), Err(Error::DimensionMismatch(2, 3))));
        assert!(matches!(VertexSubset::from_indices(&g, [26]), Err(Error::VertexOutOfRange { .. })));
        let p = build_projective_graph(3, 3).unwrap();
        // (2,0,0) is a multiple of a representative, not a representative
        assert!(matches!(VertexSubset::parse(&p, "2,0,0"), Err(Error::UnknownVertex(_))));
        let s = VertexSubset::parse(&g, "1,0,0\n\n0,1,0\n1,0,0\n").unwrap();
        assert_eq!(s.m(), 2);
    }

    #[test]
    fn loops_never_contribute() {
        let g = build_affine_graph(3, 3).unwrap();
        let bare = g.without_diagonal();
        let (a, b) = (VertexSubset::full(&g), VertexSubset::full(&bare));
        for k in 1..=4 {
            assert_eq!(count_ordered_tuples(&a, k).unwrap(), count_ordered_tuples(&b, k).unwrap());
        }
        for h in ["P3", "C4", "K3"] {
            let h = PatternGraph::from_name(h).unwrap();
            assert_eq!(count_copies(&a, &h).unwrap(), count_copies(&b, &h).unwrap());
        }
    }
}
