//! Multivariate polynomials with exact rational coefficients.

use crate::scalar::{qi, to_f64, Scalar};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, Scalar>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Scalar::one());
        p
    }

    pub fn monomial(exps: Vec<u32>, c: Scalar) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        let mut p = Poly::zero(self.nvars);
        for (e, v) in &self.terms {
            p.add_term(e.clone(), v * c);
        }
        p
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut p = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::constant(self.nvars, Scalar::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut p = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                p.add_term(e2, c * qi(e[i] as i64));
            }
        }
        p
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = to_f64(c);
                for (xi, &k) in x.iter().zip(e) {
                    v *= xi.powi(k as i32);
                }
                v
            })
            .sum()
    }

    pub fn eval_exact(&self, x: &[Scalar]) -> Scalar {
        let mut total = Scalar::zero();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    v *= xi;
                }
            }
            total += v;
        }
        total
    }

    /// Substitutes `x_i = subs[i]` (polynomials in a common new variable set).
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        let nv = subs.first().map(|s| s.nvars).unwrap_or(0);
        let mut out = Poly::zero(nv);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(nv, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&subs[i].pow(k));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Affine polynomial `b + sum_j a_j y_j` in `nvars` variables.
    pub fn affine(a: &[Scalar], b: &Scalar) -> Poly {
        let n = a.len();
        let mut p = Poly::constant(n, b.clone());
        for (j, aj) in a.iter().enumerate() {
            p = p.add(&Poly::var(n, j).scale(aj));
        }
        p
    }

    /// Antiderivative in variable `i` evaluated between `lo` and `hi`, both
    /// polynomials in the same variables (the result no longer depends on
    /// variable `i` unless the bounds do).
    pub fn integrate_between(&self, i: usize, lo: &Poly, hi: &Poly) -> Poly {
        let mut anti = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[i] += 1;
            let den = qi(e2[i] as i64);
            anti.add_term(e2, c / den);
        }
        let mut subs_hi: Vec<Poly> = (0..self.nvars).map(|j| Poly::var(self.nvars, j)).collect();
        let mut subs_lo = subs_hi.clone();
        subs_hi[i] = hi.clone();
        subs_lo[i] = lo.clone();
        anti.compose(&subs_hi).add(&anti.compose(&subs_lo).scale(&qi(-1)))
    }

    /// Exact integral over `{1 >= t_1 >= ... >= t_k >= 0}` (all variables).
    pub fn integrate_ordered_simplex(&self) -> Scalar {
        let k = self.nvars;
        let mut p = self.clone();
        for i in (0..k).rev() {
            let lo = Poly::zero(k);
            let hi = if i == 0 { Poly::constant(k, Scalar::one()) } else { Poly::var(k, i - 1) };
            p = p.integrate_between(i, &lo, &hi);
        }
        p.terms.values().cloned().fold(Scalar::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn simplex_volumes() {
        // vol of ordered k-simplex is 1/k!
        assert_eq!(Poly::constant(1, qi(1)).integrate_ordered_simplex(), qi(1));
        assert_eq!(Poly::constant(2, qi(1)).integrate_ordered_simplex(), q(1, 2));
        assert_eq!(Poly::constant(3, qi(1)).integrate_ordered_simplex(), q(1, 6));
        // int_{1>=t1>=t2>=0} t2 = 1/6
        assert_eq!(Poly::var(2, 1).integrate_ordered_simplex(), q(1, 6));
    }

    #[test]
    fn compose_and_derivative() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.mul(&x).add(&y);
        let d = p.derivative(0);
        assert_eq!(d.eval(&[3.0, 0.0]), 6.0);
        let sub = p.compose(&[Poly::var(1, 0), Poly::constant(1, qi(2))]);
        assert_eq!(sub.eval_exact(&[qi(3)]), qi(11));
    }
}
