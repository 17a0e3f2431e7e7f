//! Graded basis slices, the differential and its matrices.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::enumerate::{acyclic_orientations, multigraphs, simple_pairs, ShapeFilter};
use crate::error::{Error, Result};
use crate::graph::{graph_degree, ColoredGraph, Edge};
use crate::linalg::SparseRationalMatrix;
use crate::sign::{Parity, Sign};
use crate::vector::GraphVector;

pub const MAX_VERTICES: usize = 8;
pub const MAX_EDGES: usize = 12;
pub const MAX_COLORS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    Connected,
    MinValence2,
    NoPassing,
    MinValence3Somewhere,
    Only2Valent,
}

impl Constraint {
    pub const ALL: [Constraint; 5] = [
        Constraint::Connected,
        Constraint::MinValence2,
        Constraint::NoPassing,
        Constraint::MinValence3Somewhere,
        Constraint::Only2Valent,
    ];

    fn bit(self) -> u8 {
        1 << (self as u8)
    }

    pub fn name(self) -> &'static str {
        match self {
            Constraint::Connected => "connected",
            Constraint::MinValence2 => "min_valence_2",
            Constraint::NoPassing => "no_passing",
            Constraint::MinValence3Somewhere => "min_valence_3_somewhere",
            Constraint::Only2Valent => "only_2_valent",
        }
    }
}

/// A set of basis filters selecting a sub-complex or quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Constraints(u8);

impl Constraints {
    pub fn empty() -> Constraints {
        Constraints(0)
    }

    /// Connected graphs: the full complex.
    pub fn full() -> Constraints {
        Constraints::empty().with(Constraint::Connected)
    }

    /// Connected graphs with all vertices at least 2-valent.
    pub fn min2() -> Constraints {
        Constraints::full().with(Constraint::MinValence2)
    }

    /// The graph complex proper: at least 2-valent, some vertex at least
    /// 3-valent, no passing vertices.
    pub fn gc() -> Constraints {
        Constraints::min2().with(Constraint::MinValence3Somewhere).with(Constraint::NoPassing)
    }

    pub fn with(self, c: Constraint) -> Constraints {
        Constraints(self.0 | c.bit())
    }

    pub fn contains(self, c: Constraint) -> bool {
        self.0 & c.bit() != 0
    }

    pub fn iter(self) -> impl Iterator<Item = Constraint> {
        Constraint::ALL.into_iter().filter(move |&c| self.contains(c))
    }

    pub fn validate(self) -> Result<()> {
        if self.contains(Constraint::Only2Valent) && self.contains(Constraint::MinValence3Somewhere) {
            return Err(Error::InconsistentConstraints(
                "only_2_valent excludes min_valence_3_somewhere".into(),
            ));
        }
        Ok(())
    }

    /// Whether `g` belongs to the basis selected by these constraints.
    pub fn admits(self, g: &ColoredGraph) -> bool {
        let val = g.valences();
        (!self.contains(Constraint::Connected) || g.is_connected())
            && (!self.contains(Constraint::MinValence2) || val.iter().all(|&d| d >= 2))
            && (!self.contains(Constraint::Only2Valent) || val.iter().all(|&d| d == 2))
            && (!self.contains(Constraint::MinValence3Somewhere) || val.iter().any(|&d| d >= 3))
            && (!self.contains(Constraint::NoPassing) || !g.has_passing_vertex())
    }
}

impl fmt::Display for Constraints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(Constraint::name).collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for Constraints {
    type Err = Error;

    /// Accepts a preset (`full`, `min2`, `gc`) or a comma separated list of
    /// constraint names.
    fn from_str(s: &str) -> Result<Constraints> {
        match s.trim() {
            "full" => return Ok(Constraints::full()),
            "min2" => return Ok(Constraints::min2()),
            "gc" => return Ok(Constraints::gc()),
            "" | "none" => return Ok(Constraints::empty()),
            _ => {}
        }
        let mut out = Constraints::empty();
        for part in s.split(',').map(str::trim) {
            let c = Constraint::ALL
                .into_iter()
                .find(|c| c.name() == part)
                .ok_or_else(|| Error::Parse(format!("unknown constraint `{part}`")))?;
            out = out.with(c);
        }
        out.validate()?;
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SliceParams {
    pub v: usize,
    pub e: usize,
    pub k: usize,
    pub n: i64,
    pub constraints: Constraints,
}

impl SliceParams {
    pub fn new(v: usize, e: usize, k: usize, n: i64, constraints: Constraints) -> SliceParams {
        SliceParams { v, e, k, n, constraints }
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.n)
    }

    pub fn degree(&self) -> i64 {
        graph_degree(self.v, self.e, self.n)
    }

    pub fn loop_number(&self) -> i64 {
        self.e as i64 - self.v as i64
    }

    /// Parameters of the slice the differential maps into.
    pub fn target(&self) -> Option<SliceParams> {
        (self.v >= 2 && self.e >= 1).then(|| SliceParams { v: self.v - 1, e: self.e - 1, ..*self })
    }

    /// Checks consistency and the enumeration bounds (skipped when `force`).
    pub fn check(&self, force: bool) -> Result<()> {
        self.constraints.validate()?;
        if self.k > crate::graph::MAX_COLORS {
            return Err(Error::TooManyColors(self.k));
        }
        if !force && (self.v > MAX_VERTICES || self.e > MAX_EDGES || self.k > MAX_COLORS) {
            return Err(Error::BoundsExceeded(format!(
                "v={}, e={}, k={} (limits v<={MAX_VERTICES}, e<={MAX_EDGES}, k<={MAX_COLORS})",
                self.v, self.e, self.k
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SliceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v={} e={} k={} n={} [{}]", self.v, self.e, self.k, self.n, self.constraints)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisSlice {
    pub params: SliceParams,
    /// Canonical representatives, sorted.
    pub basis: Vec<ColoredGraph>,
    pub degree: i64,
}

impl BasisSlice {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn index_of(&self, g: &ColoredGraph) -> Option<usize> {
        self.basis.binary_search(g).ok()
    }

    pub fn empty(params: SliceParams) -> BasisSlice {
        BasisSlice { params, basis: Vec::new(), degree: params.degree() }
    }
}

/// Colored graphs over one underlying multigraph: every combination of
/// acyclic orientations, one per color. Intrinsic orientations point from the
/// lower to the higher vertex.
pub(crate) fn colorings(v: usize, k: usize, shape: &[(u8, u8)]) -> Vec<ColoredGraph> {
    let pairs = simple_pairs(shape);
    let orientations = acyclic_orientations(v, &pairs);
    let mut out = Vec::new();
    let mut choice = vec![0usize; k];
    loop {
        let edges = shape
            .iter()
            .map(|&(a, b)| {
                let i = pairs.binary_search(&(a, b)).expect("pair of the shape");
                let colors = (0..k).fold(0u8, |acc, c| acc | (((orientations[choice[c]] >> i) & 1) as u8) << c);
                Edge { tail: a, head: b, colors }
            })
            .collect();
        out.push(ColoredGraph::from_parts(v, k, edges));
        // odometer over the k-fold product
        let mut c = 0;
        loop {
            if c == k {
                return out;
            }
            choice[c] += 1;
            if choice[c] < orientations.len() {
                break;
            }
            choice[c] = 0;
            c += 1;
        }
    }
}

pub fn enumerate_basis(params: &SliceParams) -> Result<BasisSlice> {
    params.constraints.validate()?;
    if params.k > crate::graph::MAX_COLORS {
        return Err(Error::TooManyColors(params.k));
    }
    let c = params.constraints;
    let filter = ShapeFilter {
        v: params.v,
        e: params.e,
        allow_loops: false,
        connected: c.contains(Constraint::Connected),
        min_valence: if c.contains(Constraint::MinValence2) || c.contains(Constraint::Only2Valent) { 2 } else { 0 },
        max_valence: c.contains(Constraint::Only2Valent).then_some(2),
    };
    let p = params.parity();
    let shapes = multigraphs(&filter);
    let mut basis: Vec<ColoredGraph> = shapes
        .par_iter()
        .flat_map_iter(|shape| {
            colorings(params.v, params.k, shape)
                .into_iter()
                .filter(|g| c.admits(g))
                .filter_map(|g| g.canonicalize(p).into_parts().map(|(rep, _)| rep))
                .collect::<Vec<_>>()
        })
        .collect();
    basis.par_sort_unstable();
    basis.dedup();
    Ok(BasisSlice { params: *params, basis, degree: params.degree() })
}

/// Vertex relabeling after contracting `t = (x -> y)`: the head `y` is merged
/// into `x` and every later vertex moves down by one.
fn merge_map(v: usize, x: usize, y: usize) -> Vec<usize> {
    (0..v)
        .map(|u| {
            let u = if u == y { x } else { u };
            if u > y {
                u - 1
            } else {
                u
            }
        })
        .collect()
}

/// Contracts edge `t` (0-based index). Before merging, the head of `t` is
/// moved to the last vertex position and `t` to the last edge position; the
/// sign of that permutation is recorded according to the parity.
pub fn contract_edge(g: &ColoredGraph, t: usize, p: Parity) -> Result<GraphVector> {
    let (v, e, k) = (g.vertex_count(), g.edge_count(), g.colors());
    let te = *g.edges().get(t).ok_or(Error::EdgeOutOfRange { edge: t, count: e })?;
    let (x, y) = (te.tail as usize, te.head as usize);
    let map = merge_map(v, x, y);
    let mut edges = Vec::with_capacity(e - 1);
    for (a, ed) in g.edges().iter().enumerate() {
        if a == t {
            continue;
        }
        let (nt, nh) = (map[ed.tail as usize], map[ed.head as usize]);
        if nt == nh {
            return Ok(GraphVector::new());
        }
        edges.push(Edge { tail: nt as u8, head: nh as u8, colors: ed.colors });
    }
    let h = ColoredGraph::from_parts(v - 1, k, edges);
    if !h.is_acyclic_in_all_colors() {
        return Ok(GraphVector::new());
    }
    let sign = match p {
        Parity::Odd => Sign::pow(v - 1 - y),
        Parity::Even => Sign::pow(e - 1 - t),
    };
    let mut out = GraphVector::new();
    out.add_class(h.canonicalize(p), &sign.to_rational());
    Ok(out)
}

/// Deletes the 1-valent vertex `x` with its edge, after turning the edge
/// towards `x` and moving both to the last positions.
pub fn delete_one_valent(g: &ColoredGraph, x: usize, p: Parity) -> Result<GraphVector> {
    let (v, e, k) = (g.vertex_count(), g.edge_count(), g.colors());
    let val = g.valence(x)?;
    if val != 1 {
        return Err(Error::NotOneValent { vertex: x, valence: val });
    }
    let a = g.edges().iter().position(|ed| ed.touches(x)).expect("1-valent vertex has an edge");
    let mut sign = Sign::Plus;
    if p.is_odd() {
        if g.edges()[a].head as usize != x {
            sign *= Sign::Minus;
        }
        sign *= Sign::pow(v - 1 - x);
    } else {
        sign *= Sign::pow(e - 1 - a);
    }
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(b, _)| b != a)
        .map(|(_, ed)| {
            let shift = |u: u8| if u as usize > x { u - 1 } else { u };
            Edge { tail: shift(ed.tail), head: shift(ed.head), colors: ed.colors }
        })
        .collect();
    let h = ColoredGraph::from_parts(v - 1, k, edges);
    let mut out = GraphVector::new();
    out.add_class(h.canonicalize(p), &sign.to_rational());
    Ok(out)
}

/// `sum_t c_t(g) - sum_{x 1-valent} d_x(g)`.
pub fn differential(g: &ColoredGraph, p: Parity) -> GraphVector {
    let mut out = GraphVector::new();
    let one = BigRational::one();
    for t in 0..g.edge_count() {
        out.add_scaled(&contract_edge(g, t, p).expect("edge index in range"), &one);
    }
    for x in 0..g.vertex_count() {
        if g.valence_unchecked(x) == 1 {
            out.add_scaled(&delete_one_valent(g, x, p).expect("1-valent vertex"), &-one.clone());
        }
    }
    out
}

/// Differential restricted to a constraint set: terms with passing vertices
/// are dropped when the set describes the no-passing quotient.
pub fn constrained_differential(g: &ColoredGraph, p: Parity, constraints: Constraints) -> GraphVector {
    let mut d = differential(g, p);
    if constraints.contains(Constraint::NoPassing) {
        d.retain(|h| !h.has_passing_vertex());
    }
    d
}

/// Matrix of the differential from `src` into `dst` (columns indexed by the
/// source basis).
pub fn differential_matrix(src: &BasisSlice, dst: &BasisSlice) -> Result<SparseRationalMatrix> {
    let sp = src.params;
    if dst.params != (SliceParams { v: sp.v.wrapping_sub(1), e: sp.e.wrapping_sub(1), ..sp }) {
        return Err(Error::DimensionMismatch(format!("differential from [{}] cannot land in [{}]", sp, dst.params)));
    }
    let p = sp.parity();
    let columns: Vec<Vec<(usize, BigRational)>> = src
        .basis
        .par_iter()
        .map(|g| {
            constrained_differential(g, p, sp.constraints).coordinates(&dst.basis).map_err(|term| Error::BasisClosure {
                term: format!("{term}"),
                slice: format!("{}", dst.params),
            })
        })
        .collect::<Result<_>>()?;
    SparseRationalMatrix::from_columns(dst.len(), columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn tri() -> ColoredGraph {
        ColoredGraph::from_pairs(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn k4() -> ColoredGraph {
        ColoredGraph::from_pairs(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    /// Independent enumerator: every multiset of ordered vertex pairs with
    /// every color-sign assignment.
    fn brute_force_basis(params: &SliceParams) -> Vec<ColoredGraph> {
        let (v, e, k) = (params.v, params.e, params.k);
        let mut records: Vec<Edge> = Vec::new();
        for t in 0..v {
            for h in 0..v {
                if t != h {
                    for colors in 0..(1u8 << k) {
                        records.push(Edge::new(t, h, colors));
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        let mut idx = vec![0usize; e];
        fn rec(
            records: &[Edge],
            idx: &mut Vec<usize>,
            pos: usize,
            start: usize,
            params: &SliceParams,
            out: &mut BTreeSet<ColoredGraph>,
        ) {
            if pos == idx.len() {
                let edges = idx.iter().map(|&i| records[i]).collect();
                if let Ok(g) = ColoredGraph::new(params.v, params.k, edges) {
                    if params.constraints.admits(&g) {
                        if let Some((rep, _)) = g.canonicalize(params.parity()).into_parts() {
                            out.insert(rep);
                        }
                    }
                }
                return;
            }
            for i in start..records.len() {
                idx[pos] = i;
                rec(records, idx, pos + 1, i, params, out);
            }
        }
        rec(&records, &mut idx, 0, 0, params, &mut out);
        out.into_iter().collect()
    }

    #[test]
    fn basis_examples() {
        let point = enumerate_basis(&SliceParams::new(1, 0, 0, 2, Constraints::full())).unwrap();
        assert_eq!(point.basis, vec![ColoredGraph::point(0)]);
        let double = enumerate_basis(&SliceParams::new(2, 2, 0, 2, Constraints::full())).unwrap();
        assert!(double.is_empty());
        let gc = enumerate_basis(&SliceParams::new(4, 6, 0, 2, Constraints::gc())).unwrap();
        let rep = k4().canonicalize(Parity::Even).into_parts().unwrap().0;
        assert!(gc.index_of(&rep).is_some());
        assert_eq!(gc.degree, 3 * 2 - 6);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let cases = [
            (4, 6, 0, 2, Constraints::gc()),
            (4, 6, 0, 3, Constraints::gc()),
            (3, 3, 0, 2, Constraints::full()),
            (3, 4, 0, 3, Constraints::full()),
            (3, 3, 1, 2, Constraints::full()),
            (3, 3, 1, 3, Constraints::min2()),
            (3, 4, 1, 3, Constraints::gc()),
            (2, 3, 1, 3, Constraints::gc()),
            (4, 3, 1, 2, Constraints::full()),
            (3, 2, 2, 3, Constraints::full()),
        ];
        for (v, e, k, n, c) in cases {
            let params = SliceParams::new(v, e, k, n, c);
            assert_eq!(enumerate_basis(&params).unwrap().basis, brute_force_basis(&params), "{params}");
        }
    }

    #[test]
    fn contraction_examples() {
        let edge = ColoredGraph::from_pairs(2, &[(0, 1)]).unwrap();
        for p in [Parity::Even, Parity::Odd] {
            let c = contract_edge(&edge, 0, p).unwrap();
            assert_eq!(c.coeff(&ColoredGraph::point(0)), BigRational::one());
        }
        assert!(contract_edge(&tri(), 0, Parity::Even).unwrap().is_empty());
        let double = ColoredGraph::from_pairs(2, &[(0, 1), (0, 1)]).unwrap();
        assert!(contract_edge(&double, 0, Parity::Odd).unwrap().is_empty());
        assert!(contract_edge(&edge, 1, Parity::Odd).is_err());
    }

    #[test]
    fn contraction_into_colored_cycle_vanishes() {
        // color: 0->1, 0->2, 2->1; merging 0 and 1 turns 0->2->1 into a cycle
        let g = ColoredGraph::new(3, 1, vec![Edge::new(0, 1, 1), Edge::new(0, 2, 1), Edge::new(2, 1, 1)]).unwrap();
        assert!(contract_edge(&g, 0, Parity::Odd).unwrap().is_empty());
        assert!(!contract_edge(&g, 1, Parity::Odd).unwrap().is_empty());
    }

    #[test]
    fn deletion_examples() {
        let edge = ColoredGraph::from_pairs(2, &[(0, 1)]).unwrap();
        let pt = ColoredGraph::point(0);
        // head deletion needs no flip and no relabeling
        assert_eq!(delete_one_valent(&edge, 1, Parity::Odd).unwrap().coeff(&pt), BigRational::one());
        assert_eq!(delete_one_valent(&edge, 1, Parity::Even).unwrap().coeff(&pt), BigRational::one());
        // tail deletion: one flip and one vertex transposition cancel
        assert_eq!(delete_one_valent(&edge, 0, Parity::Odd).unwrap().coeff(&pt), BigRational::one());
        assert_eq!(delete_one_valent(&edge, 0, Parity::Even).unwrap().coeff(&pt), BigRational::one());
        assert!(matches!(delete_one_valent(&tri(), 0, Parity::Odd), Err(Error::NotOneValent { .. })));
    }

    #[test]
    fn hair_on_triangle_deletes_to_triangle() {
        // triangle 0,1,2 with the hair 2 -> 3 as the last edge
        let g = ColoredGraph::from_pairs(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let d = delete_one_valent(&g, 3, Parity::Odd).unwrap();
        let (rep, s) = tri().canonicalize(Parity::Odd).into_parts().unwrap();
        assert_eq!(d.coeff(&rep), s.to_rational());
        // for even n the triangle is zero
        assert!(delete_one_valent(&g, 3, Parity::Even).unwrap().is_empty());
    }

    #[test]
    fn differential_examples() {
        assert!(differential(&ColoredGraph::point(0), Parity::Even).is_empty());
        assert!(differential(&tri(), Parity::Even).is_empty());
        assert!(differential(&k4(), Parity::Even).is_empty());
        let edge = ColoredGraph::from_pairs(2, &[(0, 1)]).unwrap();
        for p in [Parity::Even, Parity::Odd] {
            assert_eq!(differential(&edge, p).coeff(&ColoredGraph::point(0)), -BigRational::one());
        }
    }

    #[test]
    fn differential_squares_to_zero_on_small_slices() {
        for n in [2, 3] {
            for k in [0, 1] {
                for c in [Constraints::full(), Constraints::gc(), Constraints::min2()] {
                    for v in 3..=4 {
                        for e in (v - 1)..=(v + 2) {
                            let a = enumerate_basis(&SliceParams::new(v, e, k, n, c)).unwrap();
                            let b = enumerate_basis(&SliceParams::new(v - 1, e - 1, k, n, c)).unwrap();
                            let z = enumerate_basis(&SliceParams::new(v - 2, e - 2, k, n, c)).unwrap();
                            let d1 = differential_matrix(&a, &b).unwrap();
                            let d2 = differential_matrix(&b, &z).unwrap();
                            assert!(d2.mul(&d1).unwrap().is_zero(), "v={v} e={e} k={k} n={n} {c}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn k4_column_is_zero() {
        let src = BasisSlice {
            params: SliceParams::new(4, 6, 0, 2, Constraints::gc()),
            basis: vec![k4().canonicalize(Parity::Even).into_parts().unwrap().0],
            degree: 0,
        };
        let dst = enumerate_basis(&SliceParams::new(3, 5, 0, 2, Constraints::gc())).unwrap();
        assert!(differential_matrix(&src, &dst).unwrap().is_zero());
    }

    #[test]
    fn constraint_parsing() {
        assert_eq!("gc".parse::<Constraints>().unwrap(), Constraints::gc());
        assert_eq!("connected,min_valence_2".parse::<Constraints>().unwrap(), Constraints::min2());
        assert!("only_2_valent,min_valence_3_somewhere".parse::<Constraints>().is_err());
        assert!("bogus".parse::<Constraints>().is_err());
        assert_eq!(Constraints::gc().to_string().parse::<Constraints>().unwrap(), Constraints::gc());
    }

    #[test]
    fn bounds_are_enforced() {
        let big = SliceParams::new(9, 12, 0, 2, Constraints::gc());
        assert!(matches!(big.check(false), Err(Error::BoundsExceeded(_))));
        assert!(big.check(true).is_ok());
    }
}
