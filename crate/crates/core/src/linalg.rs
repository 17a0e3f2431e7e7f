//! Exact sparse linear algebra over the rationals.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Modulus of the fast rank path (the Mersenne prime 2^61 - 1).
pub const RANK_PRIME: u64 = (1 << 61) - 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseRationalMatrix {
    rows: usize,
    cols: usize,
    /// Sorted by `(row, col)`, no zero values, no repeated positions.
    entries: Vec<(usize, usize, BigRational)>,
}

impl SparseRationalMatrix {
    pub fn zero(rows: usize, cols: usize) -> SparseRationalMatrix {
        SparseRationalMatrix { rows, cols, entries: Vec::new() }
    }

    /// Builds a matrix from `(row, col, value)` triples; values at repeated
    /// positions are summed.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, BigRational)>,
    ) -> Result<SparseRationalMatrix> {
        let mut acc: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
        for (r, c, x) in entries {
            if r >= rows || c >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({r}, {c}) outside a {rows}x{cols} matrix"
                )));
            }
            *acc.entry((r, c)).or_insert_with(BigRational::zero) += x;
        }
        let entries = acc.into_iter().filter(|(_, x)| !x.is_zero()).map(|((r, c), x)| (r, c, x)).collect();
        Ok(SparseRationalMatrix { rows, cols, entries })
    }

    /// Builds a matrix column by column.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, BigRational)>>) -> Result<SparseRationalMatrix> {
        let cols = columns.len();
        let triples = columns
            .into_iter()
            .enumerate()
            .flat_map(|(c, col)| col.into_iter().map(move |(r, x)| (r, c, x)));
        SparseRationalMatrix::from_entries(rows, cols, triples)
    }

    pub fn from_dense(dense: &[Vec<BigRational>], cols: usize) -> Result<SparseRationalMatrix> {
        let triples = dense
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, x)| (r, c, x.clone())));
        SparseRationalMatrix::from_entries(dense.len(), cols, triples)
    }

    pub fn identity(size: usize) -> SparseRationalMatrix {
        SparseRationalMatrix {
            rows: size,
            cols: size,
            entries: (0..size).map(|i| (i, i, BigRational::one())).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, BigRational)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> BigRational {
        match self.entries.binary_search_by(|(er, ec, _)| (*er, *ec).cmp(&(r, c))) {
            Ok(i) => self.entries[i].2.clone(),
            Err(_) => BigRational::zero(),
        }
    }

    pub fn transpose(&self) -> SparseRationalMatrix {
        let mut entries: Vec<_> = self.entries.iter().map(|(r, c, x)| (*c, *r, x.clone())).collect();
        entries.sort_by_key(|a| (a.0, a.1));
        SparseRationalMatrix { rows: self.cols, cols: self.rows, entries }
    }

    pub fn to_dense(&self) -> Vec<Vec<BigRational>> {
        let mut out = vec![vec![BigRational::zero(); self.cols]; self.rows];
        for (r, c, x) in &self.entries {
            out[*r][*c] = x.clone();
        }
        out
    }

    /// Column `c` as sparse `(row, value)` pairs.
    pub fn column(&self, c: usize) -> Vec<(usize, BigRational)> {
        self.entries.iter().filter(|e| e.1 == c).map(|(r, _, x)| (*r, x.clone())).collect()
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &SparseRationalMatrix) -> Result<SparseRationalMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut rhs_rows: Vec<Vec<(usize, &BigRational)>> = vec![Vec::new(); rhs.rows];
        for (r, c, x) in &rhs.entries {
            rhs_rows[*r].push((*c, x));
        }
        let mut acc: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
        for (i, j, a) in &self.entries {
            for (c, b) in &rhs_rows[*j] {
                *acc.entry((*i, *c)).or_insert_with(BigRational::zero) += a * *b;
            }
        }
        let entries = acc.into_iter().filter(|(_, x)| !x.is_zero()).map(|((r, c), x)| (r, c, x)).collect();
        Ok(SparseRationalMatrix { rows: self.rows, cols: rhs.cols, entries })
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hcat(&self, rhs: &SparseRationalMatrix) -> Result<SparseRationalMatrix> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch(format!("row counts {} and {} differ", self.rows, rhs.rows)));
        }
        let shifted = rhs.entries.iter().map(|(r, c, x)| (*r, c + self.cols, x.clone()));
        SparseRationalMatrix::from_entries(self.rows, self.cols + rhs.cols, self.entries.iter().cloned().chain(shifted))
    }

    /// Exact rank by fraction-free sparse elimination.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); self.rows];
        // clear denominators row by row; this does not change the rank
        let mut by_row: Vec<Vec<(usize, &BigRational)>> = vec![Vec::new(); self.rows];
        for (r, c, x) in &self.entries {
            by_row[*r].push((*c, x));
        }
        for (r, entries) in by_row.into_iter().enumerate() {
            let lcm = entries.iter().fold(BigInt::one(), |l, (_, x)| l.lcm(x.denom()));
            rows[r] = entries.into_iter().map(|(c, x)| (c, x.numer() * (&lcm / x.denom()))).collect();
            normalize_content(&mut rows[r]);
        }
        eliminate(rows, self.cols, IntegerOps)
    }

    /// Rank modulo `prime`; `None` if some denominator vanishes modulo it.
    /// Never exceeds the exact rank.
    pub fn rank_mod_prime(&self, prime: u64) -> Option<usize> {
        let mut rows: Vec<Vec<(usize, u64)>> = vec![Vec::new(); self.rows];
        for (r, c, x) in &self.entries {
            let num = reduce(x.numer(), prime);
            let den = reduce(x.denom(), prime);
            if den == 0 {
                return None;
            }
            let val = mul_mod(num, inv_mod(den, prime), prime);
            if val != 0 {
                rows[*r].push((*c, val));
            }
        }
        Some(eliminate(rows, self.cols, ModOps(prime)))
    }

    /// Basis of the right kernel `{x : self * x = 0}` by dense reduced row
    /// echelon form.
    pub fn kernel_basis(&self) -> Vec<Vec<BigRational>> {
        let mut dense = self.to_dense();
        let pivots = rref(&mut dense, self.cols);
        let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivot_set.contains(c)) {
            let mut v = vec![BigRational::zero(); self.cols];
            v[free] = BigRational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -dense[i][free].clone();
            }
            basis.push(v);
        }
        basis
    }
}

/// Reduces `m` in place to reduced row echelon form; returns pivot columns.
pub fn rref(m: &mut [Vec<BigRational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][c].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r != row && !other[c].is_zero() {
                let f = other[c].clone();
                for (x, y) in other.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    pivots
}

trait Ops {
    type V: Clone;
    /// `a * row - b * pivot` for pivot column values `a` (of the pivot) and
    /// `b` (of the row).
    fn combine(&self, row: &[(usize, Self::V)], pivot: &[(usize, Self::V)], col: usize) -> Vec<(usize, Self::V)>;
}

struct IntegerOps;

impl Ops for IntegerOps {
    type V = BigInt;

    fn combine(&self, row: &[(usize, BigInt)], pivot: &[(usize, BigInt)], col: usize) -> Vec<(usize, BigInt)> {
        let a = &pivot.iter().find(|e| e.0 == col).expect("pivot column").1;
        let b = &row.iter().find(|e| e.0 == col).expect("row column").1;
        let g = a.gcd(b);
        let (a, b) = (a / &g, b / &g);
        let mut out = merge(row, pivot, |x| x * &a, |y| -(y * &b), |v| v.is_zero());
        normalize_content(&mut out);
        out
    }
}

struct ModOps(u64);

impl Ops for ModOps {
    type V = u64;

    fn combine(&self, row: &[(usize, u64)], pivot: &[(usize, u64)], col: usize) -> Vec<(usize, u64)> {
        let p = self.0;
        let a = pivot.iter().find(|e| e.0 == col).expect("pivot column").1;
        let b = row.iter().find(|e| e.0 == col).expect("row column").1;
        // row - (b / a) * pivot
        let f = mul_mod(b, inv_mod(a, p), p);
        let mut out = merge(row, pivot, |x| *x, |y| (p - mul_mod(*y, f, p)) % p, |v| *v % p == 0);
        for (_, v) in out.iter_mut() {
            *v %= p;
        }
        out
    }
}

/// Merges two sorted sparse rows as `fx(row) + fy(pivot)`.
fn merge<V: Clone + std::ops::Add<Output = V>>(
    row: &[(usize, V)],
    pivot: &[(usize, V)],
    fx: impl Fn(&V) -> V,
    fy: impl Fn(&V) -> V,
    is_zero: impl Fn(&V) -> bool,
) -> Vec<(usize, V)> {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let take = match (row.get(i), pivot.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Greater,
        };
        let (c, v) = match take {
            std::cmp::Ordering::Less => {
                i += 1;
                (row[i - 1].0, fx(&row[i - 1].1))
            }
            std::cmp::Ordering::Greater => {
                j += 1;
                (pivot[j - 1].0, fy(&pivot[j - 1].1))
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
                (row[i - 1].0, fx(&row[i - 1].1) + fy(&pivot[j - 1].1))
            }
        };
        if !is_zero(&v) {
            out.push((c, v));
        }
    }
    out
}

/// Sparse Gaussian elimination with a short-row pivot rule. Rows must be
/// sorted by column.
fn eliminate<O: Ops>(mut rows: Vec<Vec<(usize, O::V)>>, cols: usize, ops: O) -> usize
where
    O::V: std::ops::Add<Output = O::V>,
{
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); cols];
    let mut active: BTreeSet<usize> = BTreeSet::new();
    for (r, row) in rows.iter().enumerate() {
        if !row.is_empty() {
            active.insert(r);
            for (c, _) in row {
                col_rows[*c].insert(r);
            }
        }
    }
    let mut rank = 0;
    while let Some(&pr) = active.iter().min_by_key(|&&r| (rows[r].len(), r)) {
        active.remove(&pr);
        let pivot = std::mem::take(&mut rows[pr]);
        let pc = pivot.iter().map(|e| e.0).min_by_key(|&c| (col_rows[c].len(), c)).expect("active row is nonempty");
        for (c, _) in &pivot {
            col_rows[*c].remove(&pr);
        }
        rank += 1;
        let targets: Vec<usize> = col_rows[pc].iter().copied().collect();
        for r in targets {
            let new = ops.combine(&rows[r], &pivot, pc);
            for (c, _) in &rows[r] {
                col_rows[*c].remove(&r);
            }
            for (c, _) in &new {
                col_rows[*c].insert(r);
            }
            if new.is_empty() {
                active.remove(&r);
            }
            rows[r] = new;
        }
    }
    rank
}

fn normalize_content(row: &mut [(usize, BigInt)]) {
    let g = row.iter().fold(BigInt::zero(), |g, (_, x)| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for (_, x) in row.iter_mut() {
            *x /= &g;
        }
    }
}

fn reduce(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2)
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    /// Textbook dense elimination used as an oracle.
    fn dense_rank(m: &[Vec<BigRational>], cols: usize) -> usize {
        let mut a = m.to_vec();
        let mut rank = 0;
        for c in 0..cols {
            if let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) {
                a.swap(rank, p);
                for r in rank + 1..a.len() {
                    let f = &a[r][c] / &a[rank][c];
                    for j in 0..cols {
                        let t = &f * &a[rank][j];
                        a[r][j] -= t;
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn trivial_ranks() {
        assert_eq!(SparseRationalMatrix::zero(3, 4).rank(), 0);
        assert_eq!(SparseRationalMatrix::identity(3).rank(), 3);
        assert_eq!(SparseRationalMatrix::zero(0, 0).rank(), 0);
    }

    #[test]
    fn random_ranks_match_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let rows = rng.gen_range(0..8);
            let cols = rng.gen_range(0..8);
            // low-rank products make rank deficiency common
            let inner = rng.gen_range(0..5);
            let a: Vec<Vec<BigRational>> =
                (0..rows).map(|_| (0..inner).map(|_| q(rng.gen_range(-2..3))).collect()).collect();
            let b: Vec<Vec<BigRational>> = (0..inner)
                .map(|_| {
                    (0..cols)
                        .map(|_| BigRational::new(BigInt::from(rng.gen_range(-3..4)), BigInt::from(rng.gen_range(1..4))))
                        .collect()
                })
                .collect();
            let am = SparseRationalMatrix::from_dense(&a, inner).unwrap();
            let bm = SparseRationalMatrix::from_dense(&b, cols).unwrap();
            let m = am.mul(&bm).unwrap();
            let expected = dense_rank(&m.to_dense(), cols);
            assert_eq!(m.rank(), expected);
            assert_eq!(m.transpose().rank(), expected);
            assert_eq!(m.rank_mod_prime(RANK_PRIME), Some(expected));
            let kernel = m.kernel_basis();
            assert_eq!(kernel.len(), cols - expected);
            for v in kernel {
                let vm = SparseRationalMatrix::from_dense(&v.iter().map(|x| vec![x.clone()]).collect::<Vec<_>>(), 1)
                    .unwrap();
                assert!(m.mul(&vm).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn repeated_entries_are_summed() {
        let m = SparseRationalMatrix::from_entries(2, 2, vec![(0, 0, q(1)), (0, 0, q(-1)), (1, 1, q(2))]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 1), q(2));
        assert!(SparseRationalMatrix::from_entries(1, 1, vec![(1, 0, q(1))]).is_err());
    }

    #[test]
    fn product_dimension_check() {
        let a = SparseRationalMatrix::zero(2, 3);
        assert!(a.mul(&SparseRationalMatrix::zero(2, 2)).is_err());
        assert_eq!(a.mul(&SparseRationalMatrix::zero(3, 5)).unwrap().cols(), 5);
    }

    #[test]
    fn hcat_shifts_columns() {
        let a = SparseRationalMatrix::identity(2);
        let c = a.hcat(&a).unwrap();
        assert_eq!(c.cols(), 4);
        assert_eq!(c.get(1, 3), q(1));
        assert_eq!(c.rank(), 2);
    }
}
