//! Spanning trees and the map `h` from a graph complex to the special
//! complex with one more color.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::canon::CanonicalClass;
use crate::complex::{constrained_differential, differential_matrix, BasisSlice, Constraints};
use crate::error::{Error, Result};
use crate::graph::{color_mask, graph_degree, ColoredGraph};
use crate::homology::{slice_chain, ChainComplex};
use crate::linalg::SparseRationalMatrix;
use crate::sign::{Parity, Sign};
use crate::skeleton::{DottedEdge, SkeletonGraph, SkeletonVector, SolidEdge};
use crate::special::{quotient_project, sgc_differential, SpecialComplex, SpecialFamily, SpecialPiece};
use crate::vector::GraphVector;

/// A spanning tree as a sorted list of edge indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpanningTree(Vec<usize>);

impl SpanningTree {
    /// Checks that `edges` span `g` without cycles.
    pub fn new(g: &ColoredGraph, mut edges: Vec<usize>) -> Result<SpanningTree> {
        edges.sort_unstable();
        edges.dedup();
        let v = g.vertex_count();
        if edges.len() + 1 != v {
            return Err(Error::NotSpanningTree(format!("{} edges for {v} vertices", edges.len())));
        }
        let mut uf = UnionFind::new(v);
        for &a in &edges {
            let e = g.edges().get(a).ok_or(Error::EdgeOutOfRange { edge: a, count: g.edge_count() })?;
            if !uf.union(e.tail as usize, e.head as usize) {
                return Err(Error::NotSpanningTree(format!("edge {} closes a cycle", a + 1)));
            }
        }
        Ok(SpanningTree(edges))
    }

    pub fn edges(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, a: usize) -> bool {
        self.0.binary_search(&a).is_ok()
    }
}

#[derive(Clone)]
struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    /// Joins the classes of `a` and `b`; false if they were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// All spanning trees of a connected graph, in lexicographic order of their
/// edge lists. Parallel edges give distinct trees.
pub fn spanning_trees(g: &ColoredGraph) -> Result<Vec<SpanningTree>> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let pairs: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.tail as usize, e.head as usize)).collect();
    let v = g.vertex_count();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(v.saturating_sub(1));

    // include edge `i` when it joins two components; skip it only when the
    // remaining edges can still connect everything
    fn rec(
        v: usize,
        pairs: &[(usize, usize)],
        i: usize,
        uf: UnionFind,
        chosen: &mut Vec<usize>,
        out: &mut Vec<SpanningTree>,
    ) {
        if chosen.len() + 1 == v {
            out.push(SpanningTree(chosen.clone()));
            return;
        }
        if i == pairs.len() {
            return;
        }
        let (a, b) = pairs[i];
        let mut with = uf.clone();
        if with.union(a, b) {
            chosen.push(i);
            rec(v, pairs, i + 1, with, chosen, out);
            chosen.pop();
        }
        let mut rest = uf.clone();
        let mut joins = 0;
        for &(a, b) in &pairs[i + 1..] {
            joins += rest.union(a, b) as usize;
        }
        if chosen.len() + joins + 1 >= v {
            rec(v, pairs, i + 1, uf, chosen, out);
        }
    }

    if v <= 1 {
        return Ok(vec![SpanningTree(Vec::new())]);
    }
    rec(v, &pairs, 0, UnionFind::new(v), &mut chosen, &mut out);
    Ok(out)
}

/// One term `h_{x, tau}(g)` before weighting by the valence of `x`.
#[derive(Clone, Debug)]
pub struct HTerm {
    pub source: ColoredGraph,
    pub x: usize,
    pub tree: SpanningTree,
    /// Number of tree edges oriented away from `x` against their intrinsic
    /// orientation.
    pub reversed: usize,
    /// The skeleton graph in the labeling induced by `g`, and its sign.
    pub raw: SkeletonGraph,
    pub sign: Sign,
    pub image: CanonicalClass<SkeletonGraph>,
}

/// Builds `h_{x, tau}(g)`. Tree edges become solid edges with the new color
/// pointing away from `x`; the other edges become dotted edges with their
/// intrinsic orientation. `p` is the parity of the source complex.
///
/// Labels: `x` becomes 0 and every other vertex is ranked by the label of
/// its incoming tree edge; the solid edge into a vertex is placed by that
/// vertex's label after moving `x` to 0; dotted edges keep the order of
/// their labels.
pub fn h_x_tau(g: &ColoredGraph, x: usize, tree: &SpanningTree, p: Parity) -> Result<HTerm> {
    let (v, k) = (g.vertex_count(), g.colors());
    if x >= v {
        return Err(Error::VertexOutOfRange { vertex: x, count: v });
    }
    let tree = SpanningTree::new(g, tree.edges().to_vec())?;
    // incoming tree edge of every vertex but the root
    let mut incoming: Vec<Option<usize>> = vec![None; v];
    let mut seen = vec![false; v];
    seen[x] = true;
    let mut stack = vec![x];
    while let Some(u) = stack.pop() {
        for &a in tree.edges() {
            let e = g.edges()[a];
            if e.touches(u) {
                let w = e.other_end(u);
                if !seen[w] {
                    seen[w] = true;
                    incoming[w] = Some(a);
                    stack.push(w);
                }
            }
        }
    }
    // vertex key: 0 for the root, 1 + label index of the incoming edge
    let key = |u: usize| incoming[u].map_or(0, |a| a + 1);
    let mut order: Vec<usize> = (0..v).collect();
    order.sort_by_key(|&u| key(u));
    let mut rank = vec![0usize; v];
    for (r, &u) in order.iter().enumerate() {
        rank[u] = r;
    }
    let moved = |u: usize| match u.cmp(&x) {
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Less => u + 1,
        std::cmp::Ordering::Greater => u,
    };
    let mut heads: Vec<usize> = (0..v).filter(|&u| u != x).collect();
    heads.sort_by_key(|&u| moved(u));
    let mut reversed = 0;
    let solid: Vec<SolidEdge> = heads
        .iter()
        .map(|&u| {
            let e = g.edges()[incoming[u].expect("tree spans the graph")];
            if e.head as usize == u {
                SolidEdge::new(rank[e.tail as usize], rank[u], e.colors, true)
            } else {
                reversed += 1;
                SolidEdge::new(rank[e.head as usize], rank[u], !e.colors & color_mask(k), true)
            }
        })
        .collect();
    let dotted: Vec<DottedEdge> = (0..g.edge_count())
        .filter(|&a| !tree.contains(a))
        .map(|a| {
            let e = g.edges()[a];
            DottedEdge::new(rank[e.tail as usize], rank[e.head as usize], e.colors)
        })
        .collect();
    let sign = match p {
        // target vertices are odd: shuffle skeleton labels before middle labels
        Parity::Even => {
            let middle: Vec<usize> = (0..g.edge_count()).filter(|&a| !tree.contains(a)).map(|a| a + 1).collect();
            let inversions: usize = (0..v).map(|u| middle.iter().filter(|&&m| m < key(u)).count()).sum();
            Sign::pow(inversions)
        }
        // source vertices are odd: moving x to 0 is a cycle of length x + 1
        Parity::Odd => Sign::pow(x + reversed),
    };
    let raw = SkeletonGraph::new(v, k, solid, dotted)?;
    let image = match raw.canonicalize(p.flip()) {
        CanonicalClass::Zero => CanonicalClass::Zero,
        CanonicalClass::Class { rep, sign: s } => CanonicalClass::Class { rep, sign: s * sign },
    };
    Ok(HTerm { source: g.clone(), x, tree, reversed, raw, sign, image })
}

/// `h(g)` in the special complex with all quotients left out: the sum over
/// roots `x` weighted by `valence(x) - 2` and over spanning trees.
pub fn h_unprojected(g: &ColoredGraph, p: Parity) -> Result<SkeletonVector> {
    let trees = spanning_trees(g)?;
    let mut out = SkeletonVector::new();
    for x in 0..g.vertex_count() {
        let weight = g.valence(x)? as i64 - 2;
        if weight == 0 {
            continue;
        }
        let w = BigRational::from_integer(weight.into());
        for t in &trees {
            out.add_class(h_x_tau(g, x, t, p)?.image, &w);
        }
    }
    Ok(out)
}

/// `h(g)` in the target complex: for even `p` the image is pushed through
/// the tadpole and multiple-edge quotient.
pub fn h(g: &ColoredGraph, p: Parity) -> Result<SkeletonVector> {
    let raw = h_unprojected(g, p)?;
    if p.is_odd() {
        return Ok(raw);
    }
    let mut out = SkeletonVector::new();
    for (sg, c) in raw.iter() {
        out.add_class(quotient_project(sg, p.flip()), c);
    }
    Ok(out)
}

/// Both sides of `d h(g) = h(d g)`, natively and after expansion.
#[derive(Clone, Debug)]
pub struct ChainMapReport {
    pub lhs: SkeletonVector,
    pub rhs: SkeletonVector,
    pub expanded_lhs: GraphVector,
    pub expanded_rhs: GraphVector,
    pub expanded_direct: GraphVector,
}

impl ChainMapReport {
    pub fn native_ok(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn expanded_ok(&self) -> bool {
        self.expanded_lhs == self.expanded_rhs && self.expanded_lhs == self.expanded_direct
    }

    pub fn passed(&self) -> bool {
        self.native_ok() && self.expanded_ok()
    }
}

fn expand(v: &SkeletonVector, p: Parity) -> GraphVector {
    let mut out = v.map_linear(|g| g.expand_dotted(p));
    out.retain(|h| !h.has_passing_vertex());
    out
}

/// Evaluates both sides of the chain-map identity for `g` in the graph
/// complex with parity `p`. The native check runs in the target family; the
/// expanded check runs in the special complex before quotients, compared
/// with the differential of the full complex with one more color.
pub fn verify_chain_map(g: &ColoredGraph, p: Parity) -> Result<ChainMapReport> {
    let target = p.flip();
    let family = SpecialFamily::target(target);
    let dg = constrained_differential(g, p, Constraints::gc());
    let lhs = h(g, p)?.map_linear(|s| family.differential(s, target));
    let mut rhs = SkeletonVector::new();
    for (t, c) in dg.iter() {
        rhs.add_scaled(&h(t, p)?, c);
    }
    let raw = h_unprojected(g, p)?;
    let expanded_lhs = expand(&raw.map_linear(|s| sgc_differential(s, target)), target);
    let mut raw_rhs = SkeletonVector::new();
    for (t, c) in dg.iter() {
        raw_rhs.add_scaled(&h_unprojected(t, p)?, c);
    }
    let expanded_rhs = expand(&raw_rhs, target);
    let expanded_direct = expand(&raw, target).map_linear(|e| constrained_differential(e, target, Constraints::gc()));
    Ok(ChainMapReport { lhs, rhs, expanded_lhs, expanded_rhs, expanded_direct })
}

/// Structural checks on every term `h_{x, tau}(g)`: the skeleton keeps the
/// vertex and edge counts, the expansion has `e + 1` vertices and
/// `2e - v + 1` edges, degrees agree, and no color has a cycle.
pub fn check_h_invariants(g: &ColoredGraph, n: i64) -> std::result::Result<(), String> {
    let p = Parity::of(n);
    let (v, e) = (g.vertex_count(), g.edge_count());
    let trees = spanning_trees(g).map_err(|err| err.to_string())?;
    for x in 0..v {
        for t in &trees {
            let term = h_x_tau(g, x, t, p).map_err(|err| err.to_string())?;
            let sg = &term.raw;
            if sg.vertex_count() != v || sg.edge_count() != e {
                return Err(format!("skeleton size changed for root {x}"));
            }
            let (ev, ee) = (sg.expanded_vertex_count(), sg.expanded_edge_count());
            if ev != e + 1 || ee != 2 * e + 1 - v {
                return Err(format!("expanded size ({ev}, {ee}) for source ({v}, {e})"));
            }
            if graph_degree(ev, ee, n + 1) != graph_degree(v, e, n) {
                return Err("degree changed".into());
            }
            if ee as i64 - ev as i64 != g.loop_number() {
                return Err("loop number changed".into());
            }
            let expanded = sg.expand_dotted(p.flip());
            if expanded.keys().any(|h| !h.is_acyclic_in_all_colors()) {
                return Err(format!("colored cycle in the image for root {x}"));
            }
        }
    }
    Ok(())
}

/// Matrix of `h` from a graph complex slice to a piece of the special
/// complex. Every image term must lie in `dst`.
pub fn induced_matrix(src: &BasisSlice, dst: &SpecialPiece) -> Result<SparseRationalMatrix> {
    let p = src.params.parity();
    let columns = src
        .basis
        .par_iter()
        .map(|g| {
            h(g, p)?
                .iter()
                .map(|(sg, c)| {
                    dst.index_of(sg).map(|i| (i, c.clone())).ok_or_else(|| Error::BasisClosure {
                        term: sg.to_string(),
                        slice: format!("special piece with {} expanded vertices", dst.expanded_vertices),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SparseRationalMatrix::from_columns(dst.basis.len(), columns)
}

/// One degree of the homology comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiIsoRow {
    pub degree: i64,
    /// Vertex count of the source slice, if it lies in the window.
    pub v: Option<usize>,
    pub source_dim: usize,
    pub target_dim: usize,
    /// Rank of the map induced on homology.
    pub induced_rank: usize,
}

impl QuasiIsoRow {
    pub fn ok(&self) -> bool {
        self.source_dim == self.target_dim && self.induced_rank == self.source_dim
    }
}

#[derive(Clone, Debug)]
pub struct QuasiIsoReport {
    pub b: i64,
    pub k: usize,
    pub n: i64,
    pub rows: Vec<QuasiIsoRow>,
}

impl QuasiIsoReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(QuasiIsoRow::ok)
    }
}

/// Compares the homology of the graph complex at loop number `b` (source
/// vertex counts up to `v_max`) with that of the special complex, and
/// computes the rank of the map `h` induces on homology in every degree.
pub fn quasi_iso_check(b: i64, k: usize, n: i64, v_max: usize) -> Result<QuasiIsoReport> {
    let p = Parity::of(n);
    let constraints = Constraints::gc();
    // one extra slice above the window keeps the top homology exact
    let chain = slice_chain(b, k, n, constraints, 1, v_max + 1)?;
    let maps = chain.windows(2).map(|w| differential_matrix(&w[0], &w[1])).collect::<Result<Vec<_>>>()?;
    let source = ChainComplex::new(chain.iter().map(BasisSlice::len).collect(), maps)?;
    let source_h = source.homology();
    let skeleton_max = if k == 0 { (2 * b).max(1) as usize } else { v_max + 1 };
    let target = SpecialComplex::build(b, k, n + 1, SpecialFamily::target(p.flip()), skeleton_max)?;
    let target_h = target.complex.homology();

    let mut rows: BTreeMap<i64, QuasiIsoRow> = BTreeMap::new();
    for (j, piece) in target.pieces.iter().enumerate() {
        let v = piece.expanded_vertices as i64 - b - 1;
        if v > v_max as i64 {
            continue;
        }
        rows.insert(
            piece.degree,
            QuasiIsoRow { degree: piece.degree, v: None, source_dim: 0, target_dim: target_h[j], induced_rank: 0 },
        );
    }
    for (i, slice) in chain.iter().enumerate() {
        let v = slice.params.v;
        if v > v_max {
            continue;
        }
        let expanded = slice.params.e + 1;
        let j = target.piece_at(expanded);
        let target_dim = j.map_or(0, |j| target_h[j]);
        let induced_rank = match j {
            Some(j) if source_h[i] > 0 => {
                let m = induced_matrix(slice, &target.pieces[j])?;
                let cycles = if i + 1 < chain.len() {
                    kernel_matrix(&source.maps[i])
                } else {
                    SparseRationalMatrix::identity(slice.len())
                };
                let images = m.mul(&cycles)?;
                let boundaries = if j > 0 {
                    target.complex.maps[j - 1].clone()
                } else {
                    SparseRationalMatrix::zero(target.pieces[j].basis.len(), 0)
                };
                images.hcat(&boundaries)?.rank() - boundaries.rank()
            }
            _ => 0,
        };
        rows.insert(slice.degree, QuasiIsoRow { degree: slice.degree, v: Some(v), source_dim: source_h[i], target_dim, induced_rank });
    }
    Ok(QuasiIsoReport { b, k, n, rows: rows.into_values().collect() })
}

fn kernel_matrix(m: &SparseRationalMatrix) -> SparseRationalMatrix {
    let basis = m.kernel_basis();
    let columns = basis
        .into_iter()
        .map(|col| col.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
        .collect();
    SparseRationalMatrix::from_columns(m.cols(), columns).expect("kernel vectors have the column count")
}
