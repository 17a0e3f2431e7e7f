//! Graphs with solid and dotted edges.
//!
//! A solid edge is a single edge carrying all `k + 1` colors. A dotted edge
//! stands for half the difference of the two length-2 strings through a
//! middle vertex that is a sink or a source in color `k + 1`; it carries the
//! colors `c <= k` and an arrow.
//!
//! Expanded labeling: skeleton vertices `0..v`, then one middle vertex per
//! dotted edge in list order. Solid edges come first, then one consecutive
//! pair per dotted edge, the lower one at the arrow's tail.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::canon::{refine, search_min, sort_with_sign, has_adjacent_duplicates, CanonicalClass};
use crate::error::{Error, Result};
use crate::graph::{color_mask, is_acyclic, is_connected, ColoredGraph, Edge};
use crate::sign::{permutation_sign, Parity, Sign};
use crate::vector::{GraphVector, LinComb};

/// A solid edge; `colors` bit `c` and `last` tell whether color `c + 1`
/// (respectively `k + 1`) agrees with the intrinsic orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolidEdge {
    pub tail: u8,
    pub head: u8,
    pub colors: u8,
    pub last: bool,
}

/// A dotted edge; `colors` bit `c` tells whether color `c + 1` runs along the
/// arrow from `tail` to `head`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DottedEdge {
    pub tail: u8,
    pub head: u8,
    pub colors: u8,
}

impl SolidEdge {
    pub fn new(tail: usize, head: usize, colors: u8, last: bool) -> SolidEdge {
        SolidEdge { tail: tail as u8, head: head as u8, colors, last }
    }

    fn flipped(self, k: usize) -> SolidEdge {
        SolidEdge { tail: self.head, head: self.tail, colors: !self.colors & color_mask(k), last: !self.last }
    }

    /// Direction of color `c` (0-based, `c == k` is the last color).
    fn arrow(self, c: usize, k: usize) -> (usize, usize) {
        let agrees = if c == k { self.last } else { self.colors >> c & 1 == 1 };
        if agrees {
            (self.tail as usize, self.head as usize)
        } else {
            (self.head as usize, self.tail as usize)
        }
    }
}

impl DottedEdge {
    pub fn new(tail: usize, head: usize, colors: u8) -> DottedEdge {
        DottedEdge { tail: tail as u8, head: head as u8, colors }
    }

    fn reversed(self, k: usize) -> DottedEdge {
        DottedEdge { tail: self.head, head: self.tail, colors: !self.colors & color_mask(k) }
    }

    fn arrow(self, c: usize) -> (usize, usize) {
        if self.colors >> c & 1 == 1 {
            (self.tail as usize, self.head as usize)
        } else {
            (self.head as usize, self.tail as usize)
        }
    }

    pub fn is_tadpole(self) -> bool {
        self.tail == self.head
    }
}

/// A graph of the special complex. `k` counts the colors shared by both edge
/// kinds; solid edges carry one more.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkeletonGraph {
    v: usize,
    k: usize,
    solid: Vec<SolidEdge>,
    dotted: Vec<DottedEdge>,
}

pub type SkeletonVector = LinComb<SkeletonGraph>;

impl SkeletonGraph {
    /// Validates indices, tadpoles and acyclicity.
    pub fn new(v: usize, k: usize, solid: Vec<SolidEdge>, dotted: Vec<DottedEdge>) -> Result<SkeletonGraph> {
        if k + 1 > crate::graph::MAX_COLORS {
            return Err(Error::TooManyColors(k + 1));
        }
        for (a, e) in solid.iter().enumerate() {
            for x in [e.tail, e.head] {
                if x as usize >= v {
                    return Err(Error::VertexOutOfRange { vertex: x as usize, count: v });
                }
            }
            if e.tail == e.head {
                return Err(Error::Tadpole { edge: a });
            }
        }
        for e in &dotted {
            for x in [e.tail, e.head] {
                if x as usize >= v {
                    return Err(Error::VertexOutOfRange { vertex: x as usize, count: v });
                }
            }
            if e.is_tadpole() && k > 0 {
                return Err(Error::InvalidSkeleton("dotted tadpole with colors".into()));
            }
        }
        let g = SkeletonGraph { v, k, solid, dotted };
        if let Some(c) = g.cyclic_color() {
            return Err(Error::ColoredCycle { color: c + 1 });
        }
        Ok(g)
    }

    pub(crate) fn from_parts(v: usize, k: usize, solid: Vec<SolidEdge>, dotted: Vec<DottedEdge>) -> SkeletonGraph {
        SkeletonGraph { v, k, solid, dotted }
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    /// Number of colors on dotted edges; solid edges carry one more.
    pub fn colors(&self) -> usize {
        self.k
    }

    pub fn solid(&self) -> &[SolidEdge] {
        &self.solid
    }

    pub fn dotted(&self) -> &[DottedEdge] {
        &self.dotted
    }

    /// Skeleton edges of both kinds.
    pub fn edge_count(&self) -> usize {
        self.solid.len() + self.dotted.len()
    }

    pub fn loop_number(&self) -> i64 {
        self.edge_count() as i64 - self.v as i64
    }

    /// Vertex count of the expanded picture.
    pub fn expanded_vertex_count(&self) -> usize {
        self.v + self.dotted.len()
    }

    pub fn expanded_edge_count(&self) -> usize {
        self.solid.len() + 2 * self.dotted.len()
    }

    /// First color (0-based) with a directed cycle. Dotted edges take part in
    /// colors `c < k` only; a dotted tadpole is a cycle in those colors.
    pub(crate) fn cyclic_color(&self) -> Option<usize> {
        (0..=self.k).find(|&c| {
            let solid = self.solid.iter().map(|e| e.arrow(c, self.k));
            if c == self.k {
                !is_acyclic(self.v, solid)
            } else {
                !is_acyclic(self.v, solid.chain(self.dotted.iter().map(|e| e.arrow(c))))
            }
        })
    }

    pub fn is_connected(&self) -> bool {
        let pairs = self
            .solid
            .iter()
            .map(|e| (e.tail as usize, e.head as usize))
            .chain(self.dotted.iter().map(|e| (e.tail as usize, e.head as usize)));
        is_connected(self.v, pairs)
    }

    pub fn valences(&self) -> Vec<usize> {
        let mut d = vec![0; self.v];
        for (t, h) in self.pairs() {
            d[t] += 1;
            d[h] += 1;
        }
        d
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.solid
            .iter()
            .map(|e| (e.tail as usize, e.head as usize))
            .chain(self.dotted.iter().map(|e| (e.tail as usize, e.head as usize)))
    }

    /// Whether `x` is 2-valent with one incoming and one outgoing edge in
    /// color `c < k`.
    pub(crate) fn passing_in_color(&self, x: usize, c: usize) -> bool {
        let arrows = self
            .solid
            .iter()
            .map(|e| e.arrow(c, self.k))
            .chain(self.dotted.iter().map(|e| e.arrow(c)));
        let (mut out, mut inc) = (0, 0);
        for (a, b) in arrows {
            out += (a == x) as usize;
            inc += (b == x) as usize;
        }
        out == 1 && inc == 1
    }

    /// Membership in the span closed under the differential. For `k = 0`
    /// this is `is_special`; for `k > 0` a contraction can merge a source and
    /// a sink into a 2-valent vertex passing in every shared color, so such
    /// vertices are admitted as well.
    pub fn in_special_span(&self) -> bool {
        if self.k == 0 {
            return self.is_special();
        }
        let val = self.valences();
        self.is_connected()
            && val.iter().any(|&d| d >= 3)
            && val.iter().all(|&d| d >= 2)
            && self.solid.iter().all(|e| e.tail != e.head)
            && self.dotted.iter().all(|e| !e.is_tadpole())
            && self.cyclic_color().is_none()
    }

    /// Membership in the special complex: connected, every vertex at least
    /// 3-valent or 2-valent and not passing in some shared color, and at least
    /// one vertex at least 3-valent.
    pub fn is_special(&self) -> bool {
        let val = self.valences();
        self.is_connected()
            && val.iter().any(|&d| d >= 3)
            && (0..self.v).all(|x| val[x] >= 3 || (val[x] == 2 && (0..self.k).any(|c| !self.passing_in_color(x, c))))
            && self.solid.iter().all(|e| e.tail != e.head)
            && (self.k == 0 || self.dotted.iter().all(|e| !e.is_tadpole()))
            && self.cyclic_color().is_none()
    }

    pub fn has_tadpole(&self) -> bool {
        self.pairs().any(|(t, h)| t == h)
    }

    /// Two or more edges of any kinds joining one pair of distinct vertices.
    pub fn has_multiple_edge(&self) -> bool {
        let mut p: Vec<(usize, usize)> = self.pairs().filter(|(t, h)| t != h).map(|(t, h)| (t.min(h), t.max(h))).collect();
        p.sort_unstable();
        has_adjacent_duplicates(&p)
    }

    fn normalized(&self) -> (Vec<SolidEdge>, Vec<DottedEdge>) {
        let s = self.solid.iter().map(|&e| if e.last { e } else { e.flipped(self.k) }).collect();
        let d = self.dotted.iter().map(|&e| if e.tail > e.head { e.reversed(self.k) } else { e }).collect();
        (s, d)
    }

    fn adjacency(&self) -> (Vec<u64>, Vec<Vec<(usize, u32)>>) {
        let mut loops = vec![0u64; self.v];
        let mut adj = vec![Vec::new(); self.v];
        let k = self.k;
        for e in &self.solid {
            // tag: bit c set when color c points away from the vertex
            let mut out_of_tail = e.colors as u32;
            if e.last {
                out_of_tail |= 1 << k;
            }
            let out_of_head = !out_of_tail & ((1 << (k + 1)) - 1);
            adj[e.tail as usize].push((e.head as usize, out_of_tail));
            adj[e.head as usize].push((e.tail as usize, out_of_head));
        }
        for e in &self.dotted {
            if e.is_tadpole() {
                loops[e.tail as usize] += 1;
                continue;
            }
            let out_of_tail = e.colors as u32 | 1 << 8;
            let out_of_head = (!e.colors as u32 & color_mask(k) as u32) | 1 << 8;
            adj[e.tail as usize].push((e.head as usize, out_of_tail));
            adj[e.head as usize].push((e.tail as usize, out_of_head));
        }
        (loops, adj)
    }

    /// Canonical representative with sign, or `Zero`. Sign rules for parity
    /// `p` of the complex: for `p` even solid edges are odd and dotted arrows
    /// are odd; for `p` odd vertices, solid orientations and dotted edges are
    /// odd.
    pub fn canonicalize(&self, p: Parity) -> CanonicalClass<SkeletonGraph> {
        let (mut s, mut d) = self.normalized();
        s.sort_unstable();
        d.sort_unstable();
        let vanishes = match p {
            Parity::Even => has_adjacent_duplicates(&s) || self.dotted.iter().any(|e| e.is_tadpole()),
            Parity::Odd => has_adjacent_duplicates(&d),
        };
        if vanishes {
            return CanonicalClass::Zero;
        }
        self.search(p, true)
    }

    /// Isomorphism-class representative ignoring signs.
    pub fn unsigned_canonical_form(&self) -> SkeletonGraph {
        self.search(Parity::Even, false).into_parts().expect("unsigned search never vanishes").0
    }

    fn search(&self, p: Parity, track_sign: bool) -> CanonicalClass<SkeletonGraph> {
        let k = self.k;
        let (loops, adj) = self.adjacency();
        let class = refine(&loops, &adj);
        let result = search_min(&class, track_sign, |perm| {
            let mut flips = 0;
            let mut solid: Vec<SolidEdge> = self
                .solid
                .iter()
                .map(|e| {
                    let r = SolidEdge { tail: perm[e.tail as usize] as u8, head: perm[e.head as usize] as u8, ..*e };
                    if r.last {
                        r
                    } else {
                        flips += 1;
                        r.flipped(k)
                    }
                })
                .collect();
            let mut reversals = 0;
            let mut dotted: Vec<DottedEdge> = self
                .dotted
                .iter()
                .map(|e| {
                    let r = DottedEdge { tail: perm[e.tail as usize] as u8, head: perm[e.head as usize] as u8, ..*e };
                    if r.tail > r.head {
                        reversals += 1;
                        r.reversed(k)
                    } else {
                        r
                    }
                })
                .collect();
            let sign = match p {
                Parity::Even => {
                    let s = sort_with_sign(&mut solid);
                    dotted.sort_unstable();
                    s * Sign::pow(reversals)
                }
                Parity::Odd => {
                    solid.sort_unstable();
                    let s = sort_with_sign(&mut dotted);
                    permutation_sign(perm) * Sign::pow(flips) * s
                }
            };
            ((solid, dotted), sign)
        });
        match result {
            CanonicalClass::Zero => CanonicalClass::Zero,
            CanonicalClass::Class { rep: (solid, dotted), sign } => {
                CanonicalClass::Class { rep: SkeletonGraph { v: self.v, k, solid, dotted }, sign }
            }
        }
    }

    /// The linear combination of ordinary graphs with `k + 1` colors that
    /// this graph stands for, canonicalized under parity `p`.
    pub fn expand_dotted(&self, p: Parity) -> GraphVector {
        let (v, k) = (self.v, self.k);
        let last = 1u8 << k;
        let mask = color_mask(k);
        let d = self.dotted.len();
        let base: Vec<Edge> =
            self.solid.iter().map(|e| Edge { tail: e.tail, head: e.head, colors: e.colors | if e.last { last } else { 0 } }).collect();
        let coeff = BigRational::new(BigInt::from(1), BigInt::from(1u64) << d);
        let mut out = GraphVector::new();
        for choice in 0u32..(1 << d) {
            let mut edges = base.clone();
            for (j, e) in self.dotted.iter().enumerate() {
                let z = (v + j) as u8;
                let (c, cbar) = (e.colors, !e.colors & mask);
                if choice >> j & 1 == 0 {
                    // both edges into the middle vertex in the last color
                    edges.push(Edge { tail: e.tail, head: z, colors: c | last });
                    edges.push(Edge { tail: e.head, head: z, colors: cbar | last });
                } else {
                    // both edges out of the middle vertex in the last color
                    edges.push(Edge { tail: z, head: e.tail, colors: cbar | last });
                    edges.push(Edge { tail: z, head: e.head, colors: c | last });
                }
            }
            let g = ColoredGraph::from_parts(v + d, k + 1, edges);
            let sign = Sign::pow(choice.count_ones() as usize);
            out.add_class(g.canonicalize(p), &(sign.to_rational() * &coeff));
        }
        out
    }
}

/// Skeleton of an ordinary graph with at least one color: maximal strings
/// through weakly passing vertices become skeleton edges. Strings of length 1
/// become solid edges, strings of length 2 dotted edges whose arrow starts at
/// the end carrying the lower edge label.
pub fn extract_skeleton(g: &ColoredGraph) -> Result<SkeletonGraph> {
    let kk = g.colors();
    if kk == 0 {
        return Err(Error::ColorOutOfRange { color: 1, count: 0 });
    }
    let k = kk - 1;
    let v = g.vertex_count();
    let weak: Vec<bool> = (0..v).map(|x| g.is_weakly_passing(x).unwrap_or(false)).collect();
    let skeleton: Vec<usize> = (0..v).filter(|&x| !weak[x]).collect();
    if skeleton.is_empty() {
        return Err(Error::NoSkeletonVertex);
    }
    let index = |x: usize| skeleton.binary_search(&x).expect("skeleton vertex") as u8;
    let edges = g.edges();
    let mut used = vec![false; edges.len()];
    let mut solid: Vec<(usize, SolidEdge)> = Vec::new();
    let mut dotted: Vec<(usize, DottedEdge)> = Vec::new();
    for &s in &skeleton {
        for a in 0..edges.len() {
            if used[a] || !edges[a].touches(s) {
                continue;
            }
            let mut path = vec![a];
            used[a] = true;
            let mut cur = edges[a].other_end(s);
            while weak[cur] {
                let last = *path.last().expect("nonempty path");
                let next = (0..edges.len())
                    .find(|&b| b != last && !used[b] && edges[b].touches(cur))
                    .ok_or_else(|| Error::InvalidSkeleton("string ends in a weakly passing vertex".into()))?;
                used[next] = true;
                path.push(next);
                cur = edges[next].other_end(cur);
            }
            match path.len() {
                1 => {
                    let e = edges[a];
                    solid.push((
                        a,
                        SolidEdge {
                            tail: index(e.tail as usize),
                            head: index(e.head as usize),
                            colors: e.colors & color_mask(k),
                            last: e.colors >> k & 1 == 1,
                        },
                    ));
                }
                2 => {
                    let (a1, a2) = (path[0], path[1]);
                    let (tail_edge, tail, head) = if a1 < a2 { (a1, s, cur) } else { (a2, cur, s) };
                    let z = edges[tail_edge].other_end(tail);
                    let colors = (0..k).fold(0u8, |acc, c| {
                        let (from, to) = edges[tail_edge].color_arrow(c);
                        acc | (((from == tail && to == z) as u8) << c)
                    });
                    dotted.push((a1.min(a2), DottedEdge { tail: index(tail), head: index(head), colors }));
                }
                len => return Err(Error::SkeletonEdgeTooLong(len)),
            }
        }
    }
    if used.iter().any(|u| !u) {
        return Err(Error::InvalidSkeleton("closed string without skeleton vertices".into()));
    }
    solid.sort_unstable();
    dotted.sort_unstable();
    Ok(SkeletonGraph {
        v: skeleton.len(),
        k,
        solid: solid.into_iter().map(|x| x.1).collect(),
        dotted: dotted.into_iter().map(|x| x.1).collect(),
    })
}

impl fmt::Display for SkeletonGraph {
    /// Header `v k`, then `s t h signs` per solid edge (last sign is color
    /// `k + 1`) and `d t h signs` per dotted edge.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let signs = |bits: u8, n: usize| (0..n).map(|c| if bits >> c & 1 == 1 { '+' } else { '-' }).collect::<String>();
        write!(f, "{} {}", self.v, self.k)?;
        for e in &self.solid {
            let bits = e.colors | if e.last { 1 << self.k } else { 0 };
            write!(f, "\ns {} {} {}", e.tail, e.head, signs(bits, self.k + 1))?;
        }
        for e in &self.dotted {
            write!(f, "\nd {} {} {}", e.tail, e.head, signs(e.colors, self.k))?;
        }
        Ok(())
    }
}
