//! Chain complexes of basis slices and their homology.

use rayon::prelude::*;

use crate::complex::{differential_matrix, enumerate_basis, BasisSlice, Constraints, SliceParams};
use crate::error::{Error, Result};
use crate::linalg::SparseRationalMatrix;

/// A finite chain complex: `maps[i]` sends piece `i` to piece `i + 1`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub dims: Vec<usize>,
    pub maps: Vec<SparseRationalMatrix>,
}

impl ChainComplex {
    pub fn new(dims: Vec<usize>, maps: Vec<SparseRationalMatrix>) -> Result<ChainComplex> {
        if !dims.is_empty() && maps.len() + 1 != dims.len() {
            return Err(Error::DimensionMismatch(format!("{} pieces need {} maps, got {}", dims.len(), dims.len() - 1, maps.len())));
        }
        for (i, m) in maps.iter().enumerate() {
            if m.cols() != dims[i] || m.rows() != dims[i + 1] {
                return Err(Error::DimensionMismatch(format!(
                    "map {i} is {}x{} between pieces of sizes {} and {}",
                    m.rows(),
                    m.cols(),
                    dims[i],
                    dims[i + 1]
                )));
            }
        }
        Ok(ChainComplex { dims, maps })
    }

    /// Indices `i` with `maps[i + 1] * maps[i] != 0`.
    pub fn square_zero_failures(&self) -> Vec<usize> {
        (0..self.maps.len().saturating_sub(1))
            .filter(|&i| !self.maps[i + 1].mul(&self.maps[i]).expect("composable maps").is_zero())
            .collect()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.maps.par_iter().map(SparseRationalMatrix::rank).collect()
    }

    /// `dim H_i = dim_i - rank(out of i) - rank(into i)`.
    pub fn homology(&self) -> Vec<usize> {
        let ranks = self.ranks();
        (0..self.dims.len())
            .map(|i| {
                let out = ranks.get(i).copied().unwrap_or(0);
                let inc = if i == 0 { 0 } else { ranks[i - 1] };
                self.dims[i] - out - inc
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomologyRow {
    pub v: usize,
    pub e: usize,
    pub b: i64,
    pub degree: i64,
    pub dim: usize,
}

/// Homology of a chain of slices ordered by decreasing `v`, each mapping to
/// the next. The ends are treated as boundaries of the complex.
pub fn homology_dims(chain: &[BasisSlice]) -> Result<Vec<HomologyRow>> {
    for w in chain.windows(2) {
        let p = w[0].params;
        if w[1].params != (SliceParams { v: p.v.wrapping_sub(1), e: p.e.wrapping_sub(1), ..p }) {
            return Err(Error::DimensionMismatch(format!("[{}] is not followed by its target, got [{}]", p, w[1].params)));
        }
    }
    let maps = chain.windows(2).map(|w| differential_matrix(&w[0], &w[1])).collect::<Result<Vec<_>>>()?;
    let complex = ChainComplex::new(chain.iter().map(BasisSlice::len).collect(), maps)?;
    Ok(chain
        .iter()
        .zip(complex.homology())
        .map(|(s, dim)| HomologyRow { v: s.params.v, e: s.params.e, b: s.params.loop_number(), degree: s.degree, dim })
        .collect())
}

/// Slices `(v, v + b)` for `v` from `v_hi` down to `v_lo` (skipping `v < 1`
/// and negative edge counts).
pub fn slice_chain(b: i64, k: usize, n: i64, constraints: Constraints, v_lo: usize, v_hi: usize) -> Result<Vec<BasisSlice>> {
    let params: Vec<SliceParams> = (v_lo.max(1)..=v_hi)
        .rev()
        .filter(|&v| v as i64 + b >= 0)
        .map(|v| SliceParams::new(v, (v as i64 + b) as usize, k, n, constraints))
        .collect();
    params.iter().map(enumerate_basis).collect()
}

/// Homology at `v_lo..=v_hi` for fixed loop number. Neighboring slices are
/// included in the computation so the reported values are exact even when
/// the complex continues beyond the window.
pub fn graph_homology(b: i64, k: usize, n: i64, constraints: Constraints, v_lo: usize, v_hi: usize) -> Result<Vec<HomologyRow>> {
    let chain = slice_chain(b, k, n, constraints, v_lo.saturating_sub(1), v_hi + 1)?;
    Ok(homology_dims(&chain)?.into_iter().filter(|r| r.v >= v_lo && r.v <= v_hi).rev().collect())
}
