//! The special complex: differential, quotients, bases and the total complex.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::canon::CanonicalClass;
use crate::enumerate::{acyclic_orientations, multigraphs, simple_pairs, ShapeFilter};
use crate::error::{Error, Result};
use crate::graph::{color_mask, graph_degree};
use crate::homology::ChainComplex;
use crate::linalg::SparseRationalMatrix;
use crate::sign::{Parity, Sign};
use crate::skeleton::{DottedEdge, SkeletonGraph, SkeletonVector, SolidEdge};

/// Contracts solid edge `t` (0-based). The head is merged into the tail
/// after moving it, and `t`, to the last positions of the expanded labeling.
pub fn contract_solid(sg: &SkeletonGraph, t: usize, p: Parity) -> Result<SkeletonVector> {
    let (v, k) = (sg.vertex_count(), sg.colors());
    let (s_count, d_count) = (sg.solid().len(), sg.dotted().len());
    let te = *sg.solid().get(t).ok_or(Error::EdgeOutOfRange { edge: t, count: s_count })?;
    let (x, y) = (te.tail as usize, te.head as usize);
    let map = |u: u8| {
        let u = if u as usize == y { x } else { u as usize };
        (if u > y { u - 1 } else { u }) as u8
    };
    let mut solid = Vec::with_capacity(s_count - 1);
    for (a, e) in sg.solid().iter().enumerate() {
        if a == t {
            continue;
        }
        let r = SolidEdge { tail: map(e.tail), head: map(e.head), ..*e };
        if r.tail == r.head {
            return Ok(SkeletonVector::new());
        }
        solid.push(r);
    }
    let dotted: Vec<DottedEdge> = sg.dotted().iter().map(|e| DottedEdge { tail: map(e.tail), head: map(e.head), ..*e }).collect();
    if k > 0 && dotted.iter().any(|e| e.is_tadpole()) {
        return Ok(SkeletonVector::new());
    }
    let h = SkeletonGraph::from_parts(v - 1, k, solid, dotted);
    if h.cyclic_color().is_some() {
        return Ok(SkeletonVector::new());
    }
    let sign = match p {
        Parity::Odd => Sign::pow(v - 1 - y + d_count),
        Parity::Even => Sign::pow(s_count - 1 - t),
    };
    let mut out = SkeletonVector::new();
    out.add_class(h.canonicalize(p), &sign.to_rational());
    Ok(out)
}

/// Turns each dotted edge into a solid one in both directions of the last
/// color: `dotted -> solid - (-1)^p reversed solid`. The new solid edge goes
/// last among solid edges; the remaining dotted edges keep their order.
pub fn delta0(sg: &SkeletonGraph, p: Parity) -> SkeletonVector {
    let (v, k) = (sg.vertex_count(), sg.colors());
    let d_count = sg.dotted().len();
    let mut out = SkeletonVector::new();
    for (j, e) in sg.dotted().iter().enumerate() {
        if e.is_tadpole() {
            continue;
        }
        let eps = match p {
            Parity::Odd => Sign::pow(d_count - 1 - j),
            Parity::Even => Sign::Plus,
        };
        let mut dotted = sg.dotted().to_vec();
        dotted.remove(j);
        let forward = SolidEdge { tail: e.tail, head: e.head, colors: e.colors, last: true };
        let backward = SolidEdge { tail: e.head, head: e.tail, colors: !e.colors & color_mask(k), last: true };
        for (edge, sign) in [(forward, eps), (backward, eps * -p.sign())] {
            let mut solid = sg.solid().to_vec();
            solid.push(edge);
            let h = SkeletonGraph::from_parts(v, k, solid, dotted.clone());
            if h.cyclic_color().is_none() {
                out.add_class(h.canonicalize(p), &sign.to_rational());
            }
        }
    }
    out
}

/// Sum of all solid contractions plus `delta0`.
pub fn sgc_differential(sg: &SkeletonGraph, p: Parity) -> SkeletonVector {
    let mut out = delta0(sg, p);
    let one = BigRational::one();
    for t in 0..sg.solid().len() {
        out.add_scaled(&contract_solid(sg, t, p).expect("solid edge index in range"), &one);
    }
    out
}

/// Projection onto the special complex proper: for odd parity graphs with a
/// tadpole or a multiple edge vanish; for even parity this is the identity.
pub fn quotient_project(sg: &SkeletonGraph, p: Parity) -> CanonicalClass<SkeletonGraph> {
    if p.is_odd() && (sg.has_tadpole() || sg.has_multiple_edge()) {
        return CanonicalClass::Zero;
    }
    sg.canonicalize(p)
}

/// Bases spanning the special complex and the pieces used to study its
/// tadpoles and multiple edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpecialFamily {
    /// The special complex before any quotient.
    Full,
    /// Sub-complex of graphs with a tadpole.
    Tadpole,
    /// Quotient by the tadpole sub-complex.
    NoTadpole,
    /// Sub-complex of the tadpole quotient spanned by graphs with a multiple
    /// edge.
    MultiEdge,
    /// Quotient by tadpoles and multiple edges.
    Quotient,
}

impl SpecialFamily {
    /// The target complex of the spanning-tree map for parity `p`.
    pub fn target(p: Parity) -> SpecialFamily {
        match p {
            Parity::Even => SpecialFamily::Full,
            Parity::Odd => SpecialFamily::Quotient,
        }
    }

    pub fn admits(self, sg: &SkeletonGraph) -> bool {
        match self {
            SpecialFamily::Full => true,
            SpecialFamily::Tadpole => sg.has_tadpole(),
            SpecialFamily::NoTadpole => !sg.has_tadpole(),
            SpecialFamily::MultiEdge => !sg.has_tadpole() && sg.has_multiple_edge(),
            SpecialFamily::Quotient => !sg.has_tadpole() && !sg.has_multiple_edge(),
        }
    }

    /// Whether a differential term is killed by the quotient this family
    /// lives in.
    fn projects_out(self, sg: &SkeletonGraph) -> bool {
        match self {
            SpecialFamily::Full | SpecialFamily::Tadpole => false,
            SpecialFamily::NoTadpole | SpecialFamily::MultiEdge => sg.has_tadpole(),
            SpecialFamily::Quotient => sg.has_tadpole() || sg.has_multiple_edge(),
        }
    }

    /// Differential within this family.
    pub fn differential(self, sg: &SkeletonGraph, p: Parity) -> SkeletonVector {
        let mut d = sgc_differential(sg, p);
        d.retain(|h| !self.projects_out(h));
        d
    }
}

impl fmt::Display for SpecialFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpecialFamily::Full => "full",
            SpecialFamily::Tadpole => "tadpole",
            SpecialFamily::NoTadpole => "no_tadpole",
            SpecialFamily::MultiEdge => "multi_edge",
            SpecialFamily::Quotient => "quotient",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SkeletonParams {
    /// Skeleton vertices.
    pub v: usize,
    /// Skeleton edges of both kinds.
    pub e: usize,
    /// Dotted edges among them.
    pub dotted: usize,
    /// Colors shared by both edge kinds.
    pub k: usize,
    pub parity: Parity,
    pub family: SpecialFamily,
}

/// Canonical basis of one `(v, e, dotted)` slice, sorted.
pub fn enumerate_skeleton_basis(params: &SkeletonParams) -> Result<Vec<SkeletonGraph>> {
    let SkeletonParams { v, e, dotted: d, k, parity, family } = *params;
    if k + 1 > crate::graph::MAX_COLORS {
        return Err(Error::TooManyColors(k + 1));
    }
    if d > e {
        return Ok(Vec::new());
    }
    let filter = ShapeFilter {
        v,
        e,
        allow_loops: k == 0,
        connected: true,
        min_valence: if k == 0 { 3 } else { 2 },
        max_valence: None,
    };
    let shapes = multigraphs(&filter);
    let mut basis: Vec<SkeletonGraph> = shapes
        .par_iter()
        .flat_map_iter(|shape| {
            let mut found = Vec::new();
            for kinds in subsets(e, d) {
                if shape.iter().enumerate().any(|(i, (a, b))| a == b && kinds >> i & 1 == 0) {
                    continue;
                }
                for g in skeleton_colorings(v, k, shape, kinds) {
                    if g.in_special_span() && family.admits(&g) {
                        if let Some((rep, _)) = g.canonicalize(parity).into_parts() {
                            found.push(rep);
                        }
                    }
                }
            }
            found
        })
        .collect();
    basis.par_sort_unstable();
    basis.dedup();
    Ok(basis)
}

fn subsets(n: usize, size: usize) -> impl Iterator<Item = u32> {
    (0u32..(1 << n)).filter(move |m| m.count_ones() as usize == size)
}

/// All graphs over `shape` with dotted positions `kinds`: acyclic
/// orientations for the shared colors over all edges and for the last color
/// over solid edges. Solid edges follow the last color; dotted arrows point
/// from the lower to the higher vertex.
fn skeleton_colorings(v: usize, k: usize, shape: &[(u8, u8)], kinds: u32) -> Vec<SkeletonGraph> {
    if k > 0 && shape.iter().any(|(a, b)| a == b) {
        return Vec::new();
    }
    let all_pairs = simple_pairs(shape);
    let solid_shape: Vec<(u8, u8)> =
        shape.iter().enumerate().filter(|(i, _)| kinds >> i & 1 == 0).map(|(_, &p)| p).collect();
    let solid_pairs = simple_pairs(&solid_shape);
    let shared = acyclic_orientations(v, &all_pairs);
    let lasts = acyclic_orientations(v, &solid_pairs);
    let mut out = Vec::new();
    let mut choice = vec![0usize; k];
    loop {
        let along = |a: u8, b: u8| -> u8 {
            let i = all_pairs.binary_search(&(a, b)).expect("pair of the shape");
            (0..k).fold(0u8, |acc, c| acc | (((shared[choice[c]] >> i) & 1) as u8) << c)
        };
        for &last in &lasts {
            let mut solid = Vec::new();
            let mut dotted = Vec::new();
            for (i, &(a, b)) in shape.iter().enumerate() {
                if kinds >> i & 1 == 1 {
                    let colors = if a == b { 0 } else { along(a, b) };
                    dotted.push(DottedEdge { tail: a, head: b, colors });
                } else {
                    let j = solid_pairs.binary_search(&(a, b)).expect("solid pair");
                    let colors = along(a, b);
                    if last >> j & 1 == 1 {
                        solid.push(SolidEdge { tail: a, head: b, colors, last: true });
                    } else {
                        solid.push(SolidEdge { tail: b, head: a, colors: !colors & color_mask(k), last: true });
                    }
                }
            }
            out.push(SkeletonGraph::from_parts(v, k, solid, dotted));
        }
        let mut c = 0;
        loop {
            if c == k {
                return out;
            }
            choice[c] += 1;
            if choice[c] < shared.len() {
                break;
            }
            choice[c] = 0;
            c += 1;
        }
    }
}

/// One graded piece of the total complex at fixed loop number: all slices
/// with `v + dotted` equal to the expanded vertex count.
#[derive(Clone, Debug)]
pub struct SpecialPiece {
    pub expanded_vertices: usize,
    pub degree: i64,
    /// `(skeleton vertices, dotted edges)` of each block, in basis order.
    pub blocks: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    pub basis: Vec<SkeletonGraph>,
}

impl SpecialPiece {
    fn new(expanded_vertices: usize, degree: i64, blocks: Vec<(usize, usize, Vec<SkeletonGraph>)>) -> SpecialPiece {
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        offsets.push(0);
        let mut basis = Vec::new();
        let mut keys = Vec::new();
        for (v, d, g) in blocks {
            keys.push((v, d));
            basis.extend(g);
            offsets.push(basis.len());
        }
        SpecialPiece { expanded_vertices, degree, blocks: keys, offsets, basis }
    }

    /// Position of `sg` in the basis; each block is sorted.
    pub fn index_of(&self, sg: &SkeletonGraph) -> Option<usize> {
        let i = self.blocks.iter().position(|&(v, d)| sg.vertex_count() == v && sg.dotted().len() == d)?;
        let (lo, hi) = (self.offsets[i], self.offsets[i + 1]);
        self.basis[lo..hi].binary_search(sg).ok().map(|j| lo + j)
    }
}

/// The special complex at fixed loop number, graded by expanded vertex
/// count, with its differential.
#[derive(Clone, Debug)]
pub struct SpecialComplex {
    pub b: i64,
    pub k: usize,
    /// Parity of the special complex itself.
    pub parity: Parity,
    pub n: i64,
    pub family: SpecialFamily,
    /// Ordered by decreasing expanded vertex count.
    pub pieces: Vec<SpecialPiece>,
    pub complex: ChainComplex,
}

/// Degree of an expanded graph with `vertices` vertices and loop number `b`.
pub fn expanded_degree(vertices: usize, b: i64, n: i64) -> i64 {
    graph_degree(vertices, (vertices as i64 + b) as usize, n)
}

impl SpecialComplex {
    /// Builds the complex for skeleton vertex counts `1..=v_max`. `n` is the
    /// degree parameter of the special complex.
    pub fn build(b: i64, k: usize, n: i64, family: SpecialFamily, v_max: usize) -> Result<SpecialComplex> {
        let parity = Parity::of(n);
        let mut by_expanded: BTreeMap<usize, Vec<(usize, usize, Vec<SkeletonGraph>)>> = BTreeMap::new();
        for v in 1..=v_max {
            let e = v as i64 + b;
            if e < 0 {
                continue;
            }
            let e = e as usize;
            for d in 0..=e {
                let basis = enumerate_skeleton_basis(&SkeletonParams { v, e, dotted: d, k, parity, family })?;
                by_expanded.entry(v + d).or_default().push((v, d, basis));
            }
        }
        let pieces: Vec<SpecialPiece> = by_expanded
            .into_iter()
            .rev()
            .map(|(vv, blocks)| SpecialPiece::new(vv, expanded_degree(vv, b, n), blocks))
            .collect();
        let maps = pieces
            .windows(2)
            .map(|w| special_matrix(&w[0], &w[1], family, parity))
            .collect::<Result<Vec<_>>>()?;
        let complex = ChainComplex::new(pieces.iter().map(|p| p.basis.len()).collect(), maps)?;
        Ok(SpecialComplex { b, k, parity, n, family, pieces, complex })
    }

    pub fn piece_at(&self, expanded_vertices: usize) -> Option<usize> {
        self.pieces.iter().position(|p| p.expanded_vertices == expanded_vertices)
    }
}

/// Matrix of the family differential between consecutive pieces.
pub fn special_matrix(src: &SpecialPiece, dst: &SpecialPiece, family: SpecialFamily, p: Parity) -> Result<SparseRationalMatrix> {
    if dst.expanded_vertices + 1 != src.expanded_vertices {
        return Err(Error::DimensionMismatch(format!(
            "pieces with {} and {} expanded vertices are not consecutive",
            src.expanded_vertices, dst.expanded_vertices
        )));
    }
    let columns = src
        .basis
        .par_iter()
        .map(|g| {
            family
                .differential(g, p)
                .iter()
                .map(|(h, c)| {
                    dst.index_of(h).map(|i| (i, c.clone())).ok_or_else(|| Error::BasisClosure {
                        term: format!("{h}"),
                        slice: format!("{family} with {} expanded vertices", dst.expanded_vertices),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SparseRationalMatrix::from_columns(dst.basis.len(), columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{constrained_differential, Constraints};
    use crate::graph::{ColoredGraph, Edge};
    use crate::vector::GraphVector;

    fn expanded_differential(sg: &SkeletonGraph, p: Parity) -> GraphVector {
        sg.expand_dotted(p).map_linear(|g| constrained_differential(g, p, Constraints::gc()))
    }

    /// Expansion followed by the projection to the full complex, which
    /// drops graphs with a passing vertex.
    fn expanded(v: &SkeletonVector, p: Parity) -> GraphVector {
        let mut out = v.map_linear(|g| g.expand_dotted(p));
        out.retain(|h| !h.has_passing_vertex());
        out
    }

    #[test]
    fn no_dotted_means_no_delta0() {
        let g = SkeletonGraph::new(2, 0, vec![SolidEdge::new(0, 1, 0, true); 3], vec![]).unwrap();
        assert!(delta0(&g, Parity::Odd).is_empty());
    }

    #[test]
    fn dotted_tadpole_has_no_delta0() {
        let g = SkeletonGraph::new(2, 0, vec![SolidEdge::new(0, 1, 0, true); 3], vec![DottedEdge::new(0, 0, 0)]).unwrap();
        assert!(delta0(&g, Parity::Even).is_empty());
        assert!(delta0(&g, Parity::Odd).is_empty());
    }

    #[test]
    fn symmetric_delta0_terms_cancel() {
        // swapping 0 and 1 maps the two new solid edges onto each other
        let g = SkeletonGraph::new(
            3,
            0,
            vec![SolidEdge::new(0, 2, 0, true), SolidEdge::new(1, 2, 0, true), SolidEdge::new(0, 2, 0, true), SolidEdge::new(1, 2, 0, true)],
            vec![DottedEdge::new(0, 1, 0)],
        )
        .unwrap();
        assert!(delta0(&g, Parity::Odd).is_empty());
    }

    #[test]
    fn crossed_edge_is_closed() {
        // the symmetric combination of the two length-2 strings has zero
        // differential, the antisymmetric one is the dotted edge
        for p in [Parity::Even, Parity::Odd] {
            let g = SkeletonGraph::new(
                2,
                0,
                vec![SolidEdge::new(0, 1, 0, true), SolidEdge::new(0, 1, 0, true)],
                vec![DottedEdge::new(0, 1, 0)],
            )
            .unwrap();
            let edges = |last_in: bool| {
                let (a, b) = if last_in { ((0, 2), (1, 2)) } else { ((2, 0), (2, 1)) };
                vec![Edge::new(0, 1, 1), Edge::new(0, 1, 1), Edge::new(a.0, a.1, 1), Edge::new(b.0, b.1, 1)]
            };
            let a_only = ColoredGraph::new(3, 1, edges(true)).unwrap();
            let b_only = ColoredGraph::new(3, 1, edges(false)).unwrap();
            let half = BigRational::new(1.into(), 2.into());
            let mut crossed = GraphVector::new();
            crossed.add_class(a_only.canonicalize(p), &half);
            crossed.add_class(b_only.canonicalize(p), &half);
            let mut dotted = GraphVector::new();
            dotted.add_class(a_only.canonicalize(p), &half);
            dotted.add_class(b_only.canonicalize(p), &-half.clone());
            assert_eq!(dotted, g.expand_dotted(p));
            let d = crossed.map_linear(|h| constrained_differential(h, p, Constraints::gc()));
            assert!(d.is_empty(), "{p}: {d}");
        }
    }

    #[test]
    fn expansion_commutes_with_differentials() {
        for k in [0usize, 1] {
            for p in [Parity::Even, Parity::Odd] {
                for b in 0..=3i64 {
                    for v in 1..=4usize {
                        let e = v as i64 + b;
                        if !(1..=6).contains(&e) {
                            continue;
                        }
                        for d in 0..=e as usize {
                            let params = SkeletonParams { v, e: e as usize, dotted: d, k, parity: p, family: SpecialFamily::Full };
                            for g in enumerate_skeleton_basis(&params).unwrap() {
                                let lhs = expanded(&sgc_differential(&g, p), p);
                                let rhs = expanded_differential(&g, p);
                                assert_eq!(lhs, rhs, "k={k} {p} graph\n{g}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn source_sink_merge_leaves_the_special_graphs() {
        // 1 is a source and 2 a sink in the shared color; contracting 2 -> 1
        // gives a vertex passing in that color next to a dotted edge
        let p = Parity::Even;
        let g = SkeletonGraph::new(
            4,
            1,
            vec![SolidEdge::new(0, 1, 0, true), SolidEdge::new(2, 1, 0, true), SolidEdge::new(3, 0, 1, true)],
            vec![DottedEdge::new(0, 3, 0), DottedEdge::new(2, 3, 0)],
        )
        .unwrap();
        assert!(g.is_special());
        let d = sgc_differential(&g, p);
        let outside: Vec<&SkeletonGraph> = d.keys().filter(|h| !h.is_special()).collect();
        assert_eq!(outside.len(), 1);
        assert!(outside[0].in_special_span());
        // its expansion has a skeleton edge of length 3 in the full complex
        let e = expanded(&SkeletonVector::single(outside[0].clone(), BigRational::one()), p);
        assert!(e.keys().any(|h| matches!(crate::skeleton::extract_skeleton(h), Err(Error::SkeletonEdgeTooLong(3)))));
        assert_eq!(expanded(&d, p), expanded_differential(&g, p));
    }

    #[test]
    fn special_differential_squares_to_zero() {
        for p in [Parity::Even, Parity::Odd] {
            for family in [SpecialFamily::Full, SpecialFamily::Tadpole, SpecialFamily::NoTadpole, SpecialFamily::MultiEdge, SpecialFamily::Quotient] {
                for b in 1..=2 {
                    let c = SpecialComplex::build(b, 0, if p.is_even() { 2 } else { 3 }, family, 2 * b as usize).unwrap();
                    assert!(c.complex.square_zero_failures().is_empty(), "{p} {family} b={b}");
                    let c = SpecialComplex::build(b - 1, 1, if p.is_even() { 2 } else { 3 }, family, 4).unwrap();
                    assert!(c.complex.square_zero_failures().is_empty(), "k=1 {p} {family} b={}", b - 1);
                }
            }
        }
    }

    #[test]
    fn quotient_examples() {
        let tad = SkeletonGraph::new(
            2,
            0,
            vec![SolidEdge::new(0, 1, 0, true)],
            vec![DottedEdge::new(0, 0, 0), DottedEdge::new(1, 1, 0)],
        )
        .unwrap();
        assert!(quotient_project(&tad, Parity::Odd).is_zero());
        let multi = SkeletonGraph::new(
            2,
            0,
            vec![SolidEdge::new(0, 1, 0, true), SolidEdge::new(0, 1, 0, true)],
            vec![DottedEdge::new(0, 1, 0)],
        )
        .unwrap();
        assert!(quotient_project(&multi, Parity::Odd).is_zero());
        let k4 = SkeletonGraph::new(
            4,
            0,
            vec![
                SolidEdge::new(0, 1, 0, true),
                SolidEdge::new(0, 2, 0, true),
                SolidEdge::new(0, 3, 0, true),
                SolidEdge::new(1, 2, 0, true),
                SolidEdge::new(1, 3, 0, true),
                SolidEdge::new(2, 3, 0, true),
            ],
            vec![],
        )
        .unwrap();
        assert_eq!(quotient_project(&k4, Parity::Odd), k4.canonicalize(Parity::Odd));
    }
}

