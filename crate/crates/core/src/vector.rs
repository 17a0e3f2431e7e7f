//! Finite formal linear combinations with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::canon::CanonicalClass;
use crate::graph::ColoredGraph;
use crate::sign::Sign;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinComb<K: Ord> {
    terms: BTreeMap<K, BigRational>,
}

pub type GraphVector = LinComb<ColoredGraph>;

impl<K: Ord> Default for LinComb<K> {
    fn default() -> Self {
        LinComb { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(key: K, coeff: BigRational) -> Self {
        let mut v = Self::new();
        v.add_term(key, coeff);
        v
    }

    pub fn add_term(&mut self, key: K, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    /// Adds `coeff * class`; a `Zero` class contributes nothing.
    pub fn add_class(&mut self, class: CanonicalClass<K>, coeff: &BigRational) {
        if let Some((rep, sign)) = class.into_parts() {
            self.add_term(rep, signed(coeff, sign));
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &LinComb<K>, factor: &BigRational) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c * factor);
        }
    }

    pub fn scaled(&self, factor: &BigRational) -> Self {
        let mut out = Self::new();
        out.add_scaled(self, factor);
        out
    }

    pub fn coeff(&self, key: &K) -> BigRational {
        self.terms.get(key).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &BigRational)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    /// Coordinates in a sorted basis, or the first key missing from it.
    pub fn coordinates(&self, basis: &[K]) -> std::result::Result<Vec<(usize, BigRational)>, K> {
        self.terms
            .iter()
            .map(|(k, c)| basis.binary_search(k).map(|i| (i, c.clone())).map_err(|_| k.clone()))
            .collect()
    }

    /// Keeps only the terms satisfying `keep`.
    pub fn retain(&mut self, mut keep: impl FnMut(&K) -> bool) {
        self.terms.retain(|k, _| keep(k));
    }

    /// Applies a linear map given on basis elements.
    pub fn map_linear<L: Ord + Clone>(&self, mut f: impl FnMut(&K) -> LinComb<L>) -> LinComb<L> {
        let mut out = LinComb::new();
        for (k, c) in &self.terms {
            out.add_scaled(&f(k), c);
        }
        out
    }
}

impl<K: Ord + Clone> FromIterator<(K, BigRational)> for LinComb<K> {
    fn from_iter<I: IntoIterator<Item = (K, BigRational)>>(iter: I) -> Self {
        let mut v = LinComb::new();
        for (k, c) in iter {
            v.add_term(k, c);
        }
        v
    }
}

impl<K: Ord + Clone> std::ops::Sub for &LinComb<K> {
    type Output = LinComb<K>;
    fn sub(self, rhs: &LinComb<K>) -> LinComb<K> {
        let mut out = self.clone();
        out.add_scaled(rhs, &-BigRational::one());
        out
    }
}

impl<K: Ord + Clone> std::ops::Add for &LinComb<K> {
    type Output = LinComb<K>;
    fn add(self, rhs: &LinComb<K>) -> LinComb<K> {
        let mut out = self.clone();
        out.add_scaled(rhs, &BigRational::one());
        out
    }
}

impl<K: Ord + fmt::Display> fmt::Display for LinComb<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, c) in &self.terms {
            writeln!(f, "[{c}]")?;
            writeln!(f, "{k}")?;
        }
        Ok(())
    }
}

pub(crate) fn signed(coeff: &BigRational, sign: Sign) -> BigRational {
    match sign {
        Sign::Plus => coeff.clone(),
        Sign::Minus => -coeff.clone(),
    }
}
