//! Canonical forms under the signed group action.
//!
//! A canonical representative is the lexicographically least normalized
//! relabeling over all vertex permutations that respect an isomorphism-
//! invariant ordered partition of the vertices. Edge order and intrinsic
//! orientations are normalized deterministically per relabeling, so the edge
//! group never has to be enumerated.


use crate::graph::{ColoredGraph, Edge};
use crate::sign::{permutation_sign, Parity, Sign};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonicalClass<G> {
    /// The class vanishes: some automorphism acts by `-1`.
    Zero,
    /// `input = sign * rep` in the coinvariants.
    Class { rep: G, sign: Sign },
}

impl<G> CanonicalClass<G> {
    pub fn is_zero(&self) -> bool {
        matches!(self, CanonicalClass::Zero)
    }

    pub fn rep(&self) -> Option<&G> {
        match self {
            CanonicalClass::Zero => None,
            CanonicalClass::Class { rep, .. } => Some(rep),
        }
    }

    pub fn sign(&self) -> Option<Sign> {
        match self {
            CanonicalClass::Zero => None,
            CanonicalClass::Class { sign, .. } => Some(*sign),
        }
    }

    pub fn into_parts(self) -> Option<(G, Sign)> {
        match self {
            CanonicalClass::Zero => None,
            CanonicalClass::Class { rep, sign } => Some((rep, sign)),
        }
    }
}

/// Equitable refinement of a vertex coloring. `adj[x]` lists `(neighbor, tag)`
/// where the tag describes the edge as seen from `x`. Returns a class index per
/// vertex; classes are numbered in an isomorphism-invariant order.
pub(crate) fn refine(initial: &[u64], adj: &[Vec<(usize, u32)>]) -> Vec<usize> {
    let n = initial.len();
    let mut class = rank(initial.iter().map(|&c| (c, Vec::<(usize, u32)>::new())).collect());
    let mut count = distinct(&class);
    loop {
        let sigs: Vec<(u64, Vec<(usize, u32)>)> = (0..n)
            .map(|x| {
                let mut nb: Vec<(usize, u32)> = adj[x].iter().map(|&(y, t)| (class[y], t)).collect();
                nb.sort_unstable();
                (class[x] as u64, nb)
            })
            .collect();
        let next = rank(sigs);
        let next_count = distinct(&next);
        class = next;
        if next_count == count {
            return class;
        }
        count = next_count;
    }
}

fn rank<S: Ord + Clone>(sigs: Vec<S>) -> Vec<usize> {
    let mut sorted = sigs.clone();
    sorted.sort();
    sorted.dedup();
    sigs.iter().map(|s| sorted.binary_search(s).unwrap()).collect()
}

fn distinct(class: &[usize]) -> usize {
    class.iter().max().map_or(0, |m| m + 1)
}

/// Calls `f(perm)` for every permutation (`perm[x]` = new label of `x`) that
/// sends class `i` onto the `i`-th block of consecutive labels.
pub(crate) fn for_each_class_permutation(class: &[usize], mut f: impl FnMut(&[usize])) {
    let m = distinct(class);
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (x, &c) in class.iter().enumerate() {
        cells[c].push(x);
    }
    let mut starts = Vec::with_capacity(m);
    let mut acc = 0;
    for cell in &cells {
        starts.push(acc);
        acc += cell.len();
    }
    let mut perm = vec![0; class.len()];
    fn rec(cells: &mut [Vec<usize>], starts: &[usize], i: usize, perm: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if i == cells.len() {
            f(perm);
            return;
        }
        let len = cells[i].len();
        permute(cells, starts, i, 0, len, perm, f);
    }
    fn permute(
        cells: &mut [Vec<usize>],
        starts: &[usize],
        i: usize,
        j: usize,
        len: usize,
        perm: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if j == len {
            for (pos, &x) in cells[i].iter().enumerate() {
                perm[x] = starts[i] + pos;
            }
            rec(cells, starts, i + 1, perm, f);
            return;
        }
        for s in j..len {
            cells[i].swap(j, s);
            permute(cells, starts, i, j + 1, len, perm, f);
            cells[i].swap(j, s);
        }
    }
    rec(&mut cells, &starts, 0, &mut perm, &mut f);
}

/// Minimizes `eval(perm)` over class-respecting permutations. With
/// `track_sign`, the result is `Zero` when the minimum is reached with both
/// signs.
pub(crate) fn search_min<K: Ord>(
    class: &[usize],
    track_sign: bool,
    mut eval: impl FnMut(&[usize]) -> (K, Sign),
) -> CanonicalClass<K> {
    let mut best: Option<(K, Sign, bool)> = None;
    for_each_class_permutation(class, |perm| {
        let (key, sign) = eval(perm);
        match &mut best {
            None => best = Some((key, sign, false)),
            Some((bk, bs, conflict)) => match key.cmp(bk) {
                std::cmp::Ordering::Less => best = Some((key, sign, false)),
                std::cmp::Ordering::Equal => {
                    if track_sign && sign != *bs {
                        *conflict = true;
                    }
                }
                std::cmp::Ordering::Greater => {}
            },
        }
    });
    match best {
        None => CanonicalClass::Zero,
        Some((_, _, true)) => CanonicalClass::Zero,
        Some((key, sign, false)) => CanonicalClass::Class { rep: key, sign },
    }
}

/// Sorts `items` and returns the sign of the sorting permutation.
pub(crate) fn sort_with_sign<T: Ord + Copy>(items: &mut [T]) -> Sign {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    idx.sort_by(|&a, &b| items[a].cmp(&items[b]).then(a.cmp(&b)));
    let sign = permutation_sign(&idx);
    let sorted: Vec<T> = idx.iter().map(|&i| items[i]).collect();
    items.copy_from_slice(&sorted);
    sign
}

pub(crate) fn has_adjacent_duplicates<T: PartialEq>(sorted: &[T]) -> bool {
    sorted.windows(2).any(|w| w[0] == w[1])
}

fn normalized(e: Edge, k: usize) -> (Edge, bool) {
    if e.tail > e.head {
        (e.flipped(k), true)
    } else {
        (e, false)
    }
}

fn colored_adjacency(g: &ColoredGraph) -> Vec<Vec<(usize, u32)>> {
    let mut adj = vec![Vec::new(); g.vertex_count()];
    for e in g.edges() {
        let (t, h) = (e.tail as usize, e.head as usize);
        // tag bit c: color c points away from the vertex
        let out_of_tail = e.colors as u32;
        let out_of_head = !e.colors as u32 & ((1 << g.colors()) - 1);
        adj[t].push((h, out_of_tail));
        adj[h].push((t, out_of_head));
    }
    adj
}

impl ColoredGraph {
    /// Canonical representative and sign, or `Zero` for a graph with an odd
    /// automorphism.
    pub fn canonicalize(&self, p: Parity) -> CanonicalClass<ColoredGraph> {
        let k = self.colors();
        if p.is_even() {
            let mut recs: Vec<Edge> = self.edges().iter().map(|&e| normalized(e, k).0).collect();
            recs.sort_unstable();
            if has_adjacent_duplicates(&recs) {
                return CanonicalClass::Zero;
            }
        }
        let class = refine(&vec![0; self.vertex_count()], &colored_adjacency(self));
        let result = search_min(&class, true, |perm| {
            let mut flips = 0;
            let mut recs: Vec<Edge> = self
                .edges()
                .iter()
                .map(|e| {
                    let (n, f) = normalized(Edge { tail: perm[e.tail as usize] as u8, head: perm[e.head as usize] as u8, colors: e.colors }, k);
                    flips += f as usize;
                    n
                })
                .collect();
            let sign = match p {
                Parity::Even => sort_with_sign(&mut recs),
                Parity::Odd => {
                    recs.sort_unstable();
                    permutation_sign(perm) * Sign::pow(flips)
                }
            };
            (recs, sign)
        });
        match result {
            CanonicalClass::Zero => CanonicalClass::Zero,
            CanonicalClass::Class { rep, sign } => CanonicalClass::Class {
                rep: ColoredGraph::from_parts(self.vertex_count(), k, rep),
                sign,
            },
        }
    }

    /// Isomorphism-class representative ignoring all signs.
    pub fn unsigned_canonical_form(&self) -> ColoredGraph {
        let k = self.colors();
        let class = refine(&vec![0; self.vertex_count()], &colored_adjacency(self));
        let result = search_min(&class, false, |perm| {
            let mut recs: Vec<Edge> = self
                .edges()
                .iter()
                .map(|e| normalized(Edge { tail: perm[e.tail as usize] as u8, head: perm[e.head as usize] as u8, colors: e.colors }, k).0)
                .collect();
            recs.sort_unstable();
            (recs, Sign::Plus)
        });
        let rep = result.into_parts().expect("unsigned search never vanishes").0;
        ColoredGraph::from_parts(self.vertex_count(), k, rep)
    }
}
