//! Enumeration of underlying multigraphs and acyclic orientations.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::canon::{refine, search_min};
use crate::graph::is_acyclic;
use crate::sign::Sign;

/// An undirected multigraph as a sorted list of `(lo, hi)` pairs with
/// `lo <= hi` (`lo == hi` only when loops are allowed).
pub(crate) type Multigraph = Vec<(u8, u8)>;

#[derive(Clone, Copy, Debug)]
pub(crate) struct ShapeFilter {
    pub v: usize,
    pub e: usize,
    pub allow_loops: bool,
    pub connected: bool,
    pub min_valence: usize,
    pub max_valence: Option<usize>,
}

fn degrees(v: usize, g: &[(u8, u8)]) -> Vec<usize> {
    let mut d = vec![0; v];
    for &(a, b) in g {
        d[a as usize] += 1;
        d[b as usize] += 1;
    }
    d
}

fn components(v: usize, g: &[(u8, u8)]) -> usize {
    let mut parent: Vec<usize> = (0..v).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut count = v;
    for &(a, b) in g {
        let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
        if ra != rb {
            parent[ra] = rb;
            count -= 1;
        }
    }
    count
}

impl ShapeFilter {
    /// Whether `g` (with `g.len()` edges) can still be completed to an
    /// admissible graph with `self.e` edges.
    fn viable(&self, g: &[(u8, u8)]) -> bool {
        let remaining = self.e - g.len();
        let deg = degrees(self.v, g);
        if let Some(max) = self.max_valence {
            if deg.iter().any(|&d| d > max) {
                return false;
            }
        }
        let deficit: usize = deg.iter().map(|&d| self.min_valence.saturating_sub(d)).sum();
        if deficit > 2 * remaining {
            return false;
        }
        if self.connected && self.v > 0 && components(self.v, g) - 1 > remaining {
            return false;
        }
        true
    }
}

/// Isomorphism-class representative of an uncolored multigraph.
pub(crate) fn canonical_multigraph(v: usize, g: &[(u8, u8)]) -> Multigraph {
    let mut adj = vec![Vec::new(); v];
    let mut loops = vec![0u64; v];
    for &(a, b) in g {
        if a == b {
            loops[a as usize] += 1;
        } else {
            adj[a as usize].push((b as usize, 0));
            adj[b as usize].push((a as usize, 0));
        }
    }
    let class = refine(&loops, &adj);
    search_min(&class, false, |perm| {
        let mut recs: Vec<(u8, u8)> = g
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a as usize] as u8, perm[b as usize] as u8);
                (x.min(y), x.max(y))
            })
            .collect();
        recs.sort_unstable();
        (recs, Sign::Plus)
    })
    .into_parts()
    .expect("unsigned search never vanishes")
    .0
}

/// All multigraphs admitted by `filter`, one per isomorphism class, sorted.
pub(crate) fn multigraphs(filter: &ShapeFilter) -> Vec<Multigraph> {
    let v = filter.v;
    let pairs: Vec<(u8, u8)> = (0..v)
        .flat_map(|a| (a..v).map(move |b| (a as u8, b as u8)))
        .filter(|(a, b)| filter.allow_loops || a != b)
        .collect();
    let mut level: Vec<Multigraph> = if filter.viable(&[]) { vec![Vec::new()] } else { Vec::new() };
    for _ in 0..filter.e {
        let next: BTreeSet<Multigraph> = level
            .par_iter()
            .flat_map_iter(|g| {
                pairs.iter().filter_map(move |&p| {
                    let mut h = g.clone();
                    h.push(p);
                    h.sort_unstable();
                    filter.viable(&h).then(|| canonical_multigraph(v, &h))
                })
            })
            .collect();
        level = next.into_iter().collect();
    }
    level
        .into_iter()
        .filter(|g| {
            let deg = degrees(v, g);
            deg.iter().all(|&d| d >= filter.min_valence && filter.max_valence.is_none_or(|m| d <= m))
                && (!filter.connected || components(v, g) <= 1)
        })
        .collect()
}

/// Acyclic orientations of the simple graph on `pairs` (each `lo < hi`),
/// as bit masks: bit `i` set means pair `i` points from `lo` to `hi`.
pub(crate) fn acyclic_orientations(v: usize, pairs: &[(u8, u8)]) -> Vec<u32> {
    let mut out = Vec::new();
    let mut mask = 0u32;
    fn rec(v: usize, pairs: &[(u8, u8)], i: usize, mask: &mut u32, out: &mut Vec<u32>) {
        let arcs = || {
            pairs[..i].iter().enumerate().map(|(j, &(a, b))| {
                if *mask >> j & 1 == 1 {
                    (a as usize, b as usize)
                } else {
                    (b as usize, a as usize)
                }
            })
        };
        if !is_acyclic(v, arcs()) {
            return;
        }
        if i == pairs.len() {
            out.push(*mask);
            return;
        }
        *mask |= 1 << i;
        rec(v, pairs, i + 1, mask, out);
        *mask &= !(1 << i);
        rec(v, pairs, i + 1, mask, out);
    }
    rec(v, pairs, 0, &mut mask, &mut out);
    out
}

/// Distinct pairs of a multigraph, excluding loops.
pub(crate) fn simple_pairs(g: &[(u8, u8)]) -> Vec<(u8, u8)> {
    let mut p: Vec<(u8, u8)> = g.iter().copied().filter(|(a, b)| a != b).collect();
    p.dedup();
    p
}
