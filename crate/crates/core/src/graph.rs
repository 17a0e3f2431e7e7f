//! Labeled k-oriented graphs and the signed action of
//! `S_v x (S_e ⋉ S_2^e)` on them.
//!
//! Vertices are `0..v`. Edges are stored in label order; edge label `a`
//! (1-based in the text format) is `edges[a - 1]`. Each edge carries a color
//! mask: bit `c` set means the orientation of color `c + 1` agrees with the
//! intrinsic orientation `tail -> head`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sign::{is_permutation, permutation_sign, Parity, Sign};

pub const MAX_COLORS: usize = 7;

pub(crate) fn color_mask(k: usize) -> u8 {
    ((1u16 << k) - 1) as u8
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub tail: u8,
    pub head: u8,
    pub colors: u8,
}

impl Edge {
    pub fn new(tail: usize, head: usize, colors: u8) -> Edge {
        Edge {
            tail: tail as u8,
            head: head as u8,
            colors,
        }
    }

    /// Reverses the intrinsic orientation, keeping every colored orientation
    /// fixed relative to the vertices.
    pub fn flipped(self, k: usize) -> Edge {
        Edge {
            tail: self.head,
            head: self.tail,
            colors: !self.colors & color_mask(k),
        }
    }

    /// `(from, to)` of the orientation in color `c` (0-based).
    pub fn color_arrow(self, c: usize) -> (usize, usize) {
        if self.colors >> c & 1 == 1 {
            (self.tail as usize, self.head as usize)
        } else {
            (self.head as usize, self.tail as usize)
        }
    }

    pub fn touches(self, x: usize) -> bool {
        self.tail as usize == x || self.head as usize == x
    }

    pub fn other_end(self, x: usize) -> usize {
        if self.tail as usize == x {
            self.head as usize
        } else {
            self.tail as usize
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredGraph {
    v: usize,
    k: usize,
    edges: Vec<Edge>,
}

impl ColoredGraph {
    /// Builds a graph and checks the tadpole, index and acyclicity invariants.
    pub fn new(v: usize, k: usize, edges: Vec<Edge>) -> Result<ColoredGraph> {
        if k > MAX_COLORS {
            return Err(Error::TooManyColors(k));
        }
        let mask = color_mask(k);
        for (i, e) in edges.iter().enumerate() {
            for end in [e.tail as usize, e.head as usize] {
                if end >= v {
                    return Err(Error::VertexOutOfRange { vertex: end, count: v });
                }
            }
            if e.tail == e.head {
                return Err(Error::Tadpole { edge: i + 1 });
            }
            if e.colors & !mask != 0 {
                return Err(Error::ColorOutOfRange {
                    color: (8 - e.colors.leading_zeros()) as usize,
                    count: k,
                });
            }
        }
        let g = ColoredGraph { v, k, edges };
        for c in 1..=k {
            if !g.is_acyclic_in_color(c)? {
                return Err(Error::ColoredCycle { color: c });
            }
        }
        Ok(g)
    }

    pub(crate) fn from_parts(v: usize, k: usize, edges: Vec<Edge>) -> ColoredGraph {
        ColoredGraph { v, k, edges }
    }

    /// Graph without colors from a list of `(tail, head)` pairs.
    pub fn from_pairs(v: usize, pairs: &[(usize, usize)]) -> Result<ColoredGraph> {
        let edges = pairs.iter().map(|&(t, h)| Edge::new(t, h, 0)).collect();
        ColoredGraph::new(v, 0, edges)
    }

    /// The one-vertex graph.
    pub fn point(k: usize) -> ColoredGraph {
        ColoredGraph { v: 1, k, edges: Vec::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn colors(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Loop number `e - v`.
    pub fn loop_number(&self) -> i64 {
        self.edges.len() as i64 - self.v as i64
    }

    /// Degree `(v - 1) n + (1 - n) e`.
    pub fn degree(&self, n: i64) -> i64 {
        graph_degree(self.v, self.edges.len(), n)
    }

    fn check_vertex(&self, x: usize) -> Result<()> {
        if x >= self.v {
            Err(Error::VertexOutOfRange { vertex: x, count: self.v })
        } else {
            Ok(())
        }
    }

    /// Whether the orientation of color `c` (1-based) has no directed cycle.
    pub fn is_acyclic_in_color(&self, c: usize) -> Result<bool> {
        if c == 0 || c > self.k {
            return Err(Error::ColorOutOfRange { color: c, count: self.k });
        }
        let arcs = self.edges.iter().map(|e| e.color_arrow(c - 1));
        Ok(is_acyclic(self.v, arcs))
    }

    pub fn is_acyclic_in_all_colors(&self) -> bool {
        (1..=self.k).all(|c| self.is_acyclic_in_color(c).unwrap_or(false))
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self.v, self.edges.iter().map(|e| (e.tail as usize, e.head as usize)))
    }

    pub fn valence(&self, x: usize) -> Result<usize> {
        self.check_vertex(x)?;
        Ok(self.valence_unchecked(x))
    }

    pub(crate) fn valence_unchecked(&self, x: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.tail as usize == x) as usize + (e.head as usize == x) as usize)
            .sum()
    }

    pub fn valences(&self) -> Vec<usize> {
        let mut val = vec![0; self.v];
        for e in &self.edges {
            val[e.tail as usize] += 1;
            val[e.head as usize] += 1;
        }
        val
    }

    /// Out-degree of `x` in the orientation of color `c` (0-based).
    fn color_out_degree(&self, x: usize, c: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| e.touches(x) && e.color_arrow(c).0 == x)
            .count()
    }

    fn passing_in_color(&self, x: usize, c: usize) -> bool {
        self.color_out_degree(x, c) == 1
    }

    /// A 2-valent vertex with in-degree 1 and out-degree 1 in every color.
    pub fn is_passing(&self, x: usize) -> Result<bool> {
        self.check_vertex(x)?;
        Ok(self.valence_unchecked(x) == 2 && (0..self.k).all(|c| self.passing_in_color(x, c)))
    }

    /// A 2-valent vertex passing in every color but the last and not passing
    /// in the last one.
    pub fn is_weakly_passing(&self, x: usize) -> Result<bool> {
        self.check_vertex(x)?;
        if self.k == 0 {
            return Err(Error::ColorOutOfRange { color: 1, count: 0 });
        }
        let last = self.k - 1;
        Ok(self.valence_unchecked(x) == 2
            && (0..last).all(|c| self.passing_in_color(x, c))
            && !self.passing_in_color(x, last))
    }

    pub fn has_passing_vertex(&self) -> bool {
        (0..self.v).any(|x| self.is_passing(x).unwrap_or(false))
    }

    /// Applies a group element; returns the image and the sign relating the
    /// two in the coinvariants (`[image] = sign * [self]`).
    pub fn act(&self, g: &GroupElement, p: Parity) -> Result<(ColoredGraph, Sign)> {
        if g.vertex_perm.len() != self.v || g.edge_perm.len() != self.edges.len() || g.flips.len() != self.edges.len() {
            return Err(Error::DimensionMismatch(format!(
                "group element ({}, {}) for graph ({}, {})",
                g.vertex_perm.len(),
                g.edge_perm.len(),
                self.v,
                self.edges.len()
            )));
        }
        let mut edges = vec![Edge::new(0, 0, 0); self.edges.len()];
        for (a, e) in self.edges.iter().enumerate() {
            let mut moved = Edge::new(g.vertex_perm[e.tail as usize], g.vertex_perm[e.head as usize], e.colors);
            if g.flips[a] {
                moved = moved.flipped(self.k);
            }
            edges[g.edge_perm[a]] = moved;
        }
        Ok((ColoredGraph { v: self.v, k: self.k, edges }, g.sign(p)))
    }
}

pub fn graph_degree(v: usize, e: usize, n: i64) -> i64 {
    (v as i64 - 1) * n + (1 - n) * e as i64
}

pub(crate) fn is_acyclic(v: usize, arcs: impl Iterator<Item = (usize, usize)>) -> bool {
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); v];
    let mut indeg = vec![0usize; v];
    for (a, b) in arcs {
        if a == b {
            return false;
        }
        out[a].push(b);
        indeg[b] += 1;
    }
    let mut stack: Vec<usize> = (0..v).filter(|&x| indeg[x] == 0).collect();
    let mut seen = 0;
    while let Some(x) = stack.pop() {
        seen += 1;
        for &y in &out[x] {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                stack.push(y);
            }
        }
    }
    seen == v
}

pub(crate) fn is_connected(v: usize, pairs: impl Iterator<Item = (usize, usize)>) -> bool {
    if v == 0 {
        return false;
    }
    let mut parent: Vec<usize> = (0..v).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut comps = v;
    for (a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    comps == 1
}

/// An element of `S_v x (S_e ⋉ S_2^e)`: vertex `x` goes to `vertex_perm[x]`,
/// edge index `a` goes to `edge_perm[a]`, and `flips[a]` reverses edge `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub vertex_perm: Vec<usize>,
    pub edge_perm: Vec<usize>,
    pub flips: Vec<bool>,
}

impl GroupElement {
    pub fn new(vertex_perm: Vec<usize>, edge_perm: Vec<usize>, flips: Vec<bool>) -> Result<GroupElement> {
        if !is_permutation(&vertex_perm) || !is_permutation(&edge_perm) {
            return Err(Error::DimensionMismatch("not a permutation".into()));
        }
        if flips.len() != edge_perm.len() {
            return Err(Error::DimensionMismatch("flip vector length".into()));
        }
        Ok(GroupElement { vertex_perm, edge_perm, flips })
    }

    pub fn identity(v: usize, e: usize) -> GroupElement {
        GroupElement {
            vertex_perm: (0..v).collect(),
            edge_perm: (0..e).collect(),
            flips: vec![false; e],
        }
    }

    /// `sgn_e` for even `n`; `sgn_v * sgn_2^e` for odd `n`.
    pub fn sign(&self, p: Parity) -> Sign {
        match p {
            Parity::Even => permutation_sign(&self.edge_perm),
            Parity::Odd => {
                permutation_sign(&self.vertex_perm) * Sign::pow(self.flips.iter().filter(|&&f| f).count())
            }
        }
    }
}

/// Debug text format: a header line `v k`, then one line per edge
/// `a: t h s_1...s_k` with `a` the 1-based edge label.
impl fmt::Display for ColoredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.v, self.k)?;
        for (i, e) in self.edges.iter().enumerate() {
            write!(f, "{}: {} {}", i + 1, e.tail, e.head)?;
            if self.k > 0 {
                f.write_str(" ")?;
                for c in 0..self.k {
                    f.write_str(if e.colors >> c & 1 == 1 { "+" } else { "-" })?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for ColoredGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<ColoredGraph> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let mut it = header.split_whitespace();
        let parse_num = |t: Option<&str>, what: &str| -> Result<usize> {
            t.ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .parse()
                .map_err(|_| Error::Parse(format!("bad {what}")))
        };
        let v = parse_num(it.next(), "vertex count")?;
        let k = parse_num(it.next(), "color count")?;
        let mut edges = Vec::new();
        for (i, line) in lines.enumerate() {
            let (label, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("missing ':' in {line:?}")))?;
            if label.trim().parse::<usize>().ok() != Some(i + 1) {
                return Err(Error::Parse(format!("edge label out of order in {line:?}")));
            }
            let mut parts = rest.split_whitespace();
            let t = parse_num(parts.next(), "tail")?;
            let h = parse_num(parts.next(), "head")?;
            let signs = parts.next().unwrap_or("");
            if signs.chars().count() != k {
                return Err(Error::Parse(format!("expected {k} color signs in {line:?}")));
            }
            let mut colors = 0u8;
            for (c, ch) in signs.chars().enumerate() {
                match ch {
                    '+' => colors |= 1 << c,
                    '-' => {}
                    _ => return Err(Error::Parse(format!("bad color sign {ch:?}"))),
                }
            }
            edges.push(Edge::new(t, h, colors));
        }
        ColoredGraph::new(v, k, edges)
    }
}
