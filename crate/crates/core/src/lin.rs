//! Sparse linear combinations over an ordered key type.

use crate::scalar::{Coeff, Scalar};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub struct Lin<K: Ord + Clone, C: Coeff = Scalar> {
    terms: BTreeMap<K, C>,
}

impl<K: Ord + Clone, C: Coeff> Default for Lin<K, C> {
    fn default() -> Self {
        Lin { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone, C: Coeff> Lin<K, C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(k: K, c: C) -> Self {
        let mut l = Self::zero();
        l.add_term(k, c);
        l
    }

    pub fn basis(k: K) -> Self {
        Self::term(k, C::one())
    }

    pub fn add_term(&mut self, k: K, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&k);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &C) {
        for (k, v) in other.terms.iter() {
            self.add_term(k.clone(), v.clone() * c.clone());
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (k, v) in other.terms.iter() {
            self.add_term(k.clone(), v.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &Self) {
        for (k, v) in other.terms.iter() {
            self.add_term(k.clone(), -v.clone());
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-C::one()))
    }

    pub fn sum(a: &Self, b: &Self) -> Self {
        let mut out = a.clone();
        out.add_assign(b);
        out
    }

    pub fn diff(a: &Self, b: &Self) -> Self {
        let mut out = a.clone();
        out.sub_assign(b);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: &K) -> C {
        self.terms.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &C)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> K2) -> Lin<K2, C> {
        let mut out = Lin::zero();
        for (k, v) in self.iter() {
            out.add_term(f(k), v.clone());
        }
        out
    }

    /// Applies a linear map given on keys.
    pub fn apply<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> Lin<K2, C>) -> Lin<K2, C> {
        let mut out = Lin::zero();
        for (k, v) in self.iter() {
            out.add_scaled(&f(k), v);
        }
        out
    }

    pub fn filter(&self, mut keep: impl FnMut(&K) -> bool) -> Self {
        let mut out = Self::zero();
        for (k, v) in self.iter() {
            if keep(k) {
                out.add_term(k.clone(), v.clone());
            }
        }
        out
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }
}

impl<K: Ord + Clone> Lin<K, Scalar> {
    pub fn to_f64(&self) -> Lin<K, f64> {
        let mut out = Lin::zero();
        for (k, v) in self.iter() {
            out.add_term(k.clone(), crate::scalar::to_f64(v));
        }
        out
    }
}

impl<K: Ord + Clone, C: Coeff> FromIterator<(K, C)> for Lin<K, C> {
    fn from_iter<I: IntoIterator<Item = (K, C)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (k, c) in iter {
            out.add_term(k, c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    #[test]
    fn cancellation_removes_terms() {
        let mut a: Lin<u32> = Lin::term(1, qi(2));
        a.add_term(1, qi(-2));
        assert!(a.is_zero());
        a.add_term(3, qi(0));
        assert!(a.is_zero());
    }

    #[test]
    fn apply_is_linear() {
        let a: Lin<u32> = [(1, qi(2)), (2, qi(3))].into_iter().collect();
        let b = a.apply(|k| Lin::term(k % 2, qi(1)));
        assert_eq!(b.coeff(&1), qi(2));
        assert_eq!(b.coeff(&0), qi(3));
    }
}
