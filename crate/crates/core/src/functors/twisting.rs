//! Twisting cochains `C -> A` and the coalgebra maps into the completed bar
//! construction they correspond to.

use super::bar::{BarCoalgebra, BarSeries, FinDga};
use super::DgCoalgebra;
use crate::error::{Error, Result};
use crate::graded::Word;
use crate::lin::Lin;
use crate::scalar::{qi, sign};
use std::collections::BTreeMap;

/// Degree +1 map from the reduced part of `C` into the augmentation ideal
/// of `A`, given on basis keys.
pub struct TwistingCochain<'a, C: DgCoalgebra> {
    pub c: &'a C,
    pub a: &'a FinDga,
    values: BTreeMap<C::Key, Lin<usize>>,
}

impl<'a, C: DgCoalgebra> TwistingCochain<'a, C> {
    /// Accepts only cochains of degree +1 (no Maurer-Cartan check).
    pub fn new_unchecked(c: &'a C, a: &'a FinDga, values: Vec<(C::Key, Lin<usize>)>) -> Result<Self> {
        for (k, v) in &values {
            if v.keys().any(|o| a.degree(*o) != c.degree(k) + 1) {
                return Err(Error::Structure(format!("value on {:?} is not of degree +1", k)));
            }
        }
        let values = values.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(TwistingCochain { c, a, values })
    }

    /// Rejects cochains whose convolution residual is nonzero up to `weight`.
    pub fn new(c: &'a C, a: &'a FinDga, values: Vec<(C::Key, Lin<usize>)>, weight: u32) -> Result<Self> {
        let t = Self::new_unchecked(c, a, values)?;
        for k in c.basis_up_to(weight) {
            let r = t.residual(&k);
            if !r.is_zero() {
                return Err(Error::Structure(format!(
                    "not a twisting cochain: residual on {:?} is {:?}",
                    k, r
                )));
            }
        }
        Ok(t)
    }

    pub fn value(&self, k: &C::Key) -> Lin<usize> {
        self.values.get(k).cloned().unwrap_or_default()
    }

    pub fn value_lin(&self, x: &Lin<C::Key>) -> Lin<usize> {
        x.apply(|k| self.value(k))
    }

    /// `d_A f(c) + f(d_C c) + sum (-1)^{|c_1|} f(c_1) f(c_2)`.
    pub fn residual(&self, k: &C::Key) -> Lin<usize> {
        let mut out = self.a.d(&self.value(k));
        out.add_assign(&self.value_lin(&self.c.differential(k)));
        for ((c1, c2), coef) in self.c.reduced_coproduct(k).iter() {
            let p = self.a.mul(&self.value(c1), &self.value(c2));
            out.add_scaled(&p, &(coef.clone() * qi(sign(self.c.degree(c1)))));
        }
        out
    }

    /// Iterated reduced coproduct into `n` factors.
    fn iterated(&self, k: &C::Key, n: usize) -> Lin<Vec<C::Key>> {
        if n == 1 {
            return Lin::basis(vec![k.clone()]);
        }
        let mut out = Lin::zero();
        for ((c1, c2), coef) in self.c.reduced_coproduct(k).iter() {
            for (rest, cr) in self.iterated(c2, n - 1).iter() {
                let mut w = vec![c1.clone()];
                w.extend(rest.iter().cloned());
                out.add_term(w, coef.clone() * cr.clone());
            }
        }
        out
    }

    /// `f^(c) = sum_{n >= 1} (-1)^n (sf)^{(x)n} Delta^{(n-1)}(c)` truncated
    /// at word length `cap` (the co-unit term vanishes on the reduced part).
    pub fn lift(&self, k: &C::Key, cap: u32) -> BarSeries {
        let mut terms = Lin::zero();
        for n in 1..=cap as usize {
            let parts = self.iterated(k, n);
            if parts.is_zero() {
                break;
            }
            for (w, coef) in parts.iter() {
                let mut acc: Lin<Word> = Lin::basis(vec![]);
                for ci in w {
                    let v = self.value(ci);
                    let mut next = Lin::zero();
                    for (prefix, cp) in acc.iter() {
                        for (x, cx) in v.iter() {
                            let mut nw = prefix.clone();
                            nw.push(*x);
                            next.add_term(nw, cp.clone() * cx.clone());
                        }
                    }
                    acc = next;
                }
                terms.add_scaled(&acc, &(coef.clone() * qi(sign(n as i64))));
            }
        }
        BarSeries { cap, terms }
    }

    pub fn lift_lin(&self, x: &Lin<C::Key>, cap: u32) -> BarSeries {
        let mut terms = Lin::zero();
        for (k, c) in x.iter() {
            terms.add_scaled(&self.lift(k, cap).terms, c);
        }
        BarSeries { cap, terms }
    }

    /// Failures of the lift to be a map of dg coalgebras, up to `weight`:
    /// compatibility with the reduced coproducts and with the differentials.
    pub fn lift_defect(&self, weight: u32, cap: u32) -> Option<(C::Key, String)> {
        let bar = BarCoalgebra::new(self.a);
        for k in self.c.basis_up_to(weight) {
            let fk = self.lift(&k, cap);
            // Delta_B f^ = (f^ (x) f^) Delta_C
            let lhs = fk.terms.apply(|w| bar.reduced_coproduct(w).filter(|(a, b)| a.len() + b.len() <= cap as usize));
            let mut rhs: Lin<(Word, Word)> = Lin::zero();
            for ((c1, c2), coef) in self.c.reduced_coproduct(&k).iter() {
                let l = self.lift(c1, cap);
                let r = self.lift(c2, cap);
                for (u, cu) in l.terms.iter() {
                    for (v, cv) in r.terms.iter() {
                        if u.len() + v.len() <= cap as usize {
                            rhs.add_term((u.clone(), v.clone()), coef.clone() * cu.clone() * cv.clone());
                        }
                    }
                }
            }
            if lhs != rhs {
                return Some((k, "coproduct".into()));
            }
            // d_B f^ = f^ d_C, compared below the truncation length
            let dl = fk.terms.apply(|w| bar.d_word(w)).filter(|w| w.len() < cap as usize);
            let dr = self.lift_lin(&self.c.differential(&k), cap).terms.filter(|w| w.len() < cap as usize);
            if dl != dr {
                return Some((k, "differential".into()));
            }
        }
        None
    }
}

/// `F -> -s^{-1} pi_1 F`: the twisting cochain of a coalgebra map into the
/// completed bar construction, given on basis keys.
pub fn morphism_to_twisting<K: Ord + Clone>(images: &BTreeMap<K, BarSeries>) -> Vec<(K, Lin<usize>)> {
    images
        .iter()
        .map(|(k, f)| {
            let mut v = Lin::zero();
            for (w, c) in f.component(1).iter() {
                v.add_term(w[0], -c.clone());
            }
            (k.clone(), v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functors::FinCoalgebra;
    use crate::graded::GradedSpace;

    fn three_dim() -> FinCoalgebra {
        let space = GradedSpace::new(
            "c",
            vec![("a".into(), -1, 1), ("b".into(), -1, 1), ("c".into(), -2, 2)],
        )
        .unwrap();
        FinCoalgebra::new(space, vec![(2, Lin::basis((0, 1)))], vec![]).unwrap()
    }

    #[test]
    fn zero_cochain_lifts_to_zero() {
        let c = three_dim();
        let a = FinDga::upper_triangular_2();
        let t = TwistingCochain::new(&c, &a, vec![], 4).unwrap();
        for k in 0..3 {
            assert!(t.lift(&k, 4).terms.is_zero());
            assert!(t.residual(&k).is_zero());
        }
    }

    #[test]
    fn primitive_series_terminates() {
        let space = GradedSpace::from_degrees("c", &[("c", 0)]);
        let c = FinCoalgebra::new(space, vec![], vec![]).unwrap();
        let a = FinDga::new(GradedSpace::from_degrees("a", &[("a", 1)]), vec![], vec![]).unwrap();
        let t = TwistingCochain::new(&c, &a, vec![(0, Lin::basis(0))], 3).unwrap();
        assert_eq!(t.lift(&0, 5).terms, Lin::term(vec![0], qi(-1)));
    }

    #[test]
    fn lift_is_a_coalgebra_map_and_round_trips() {
        let c = three_dim();
        let a = FinDga::upper_triangular_2();
        let t = TwistingCochain::new(&c, &a, vec![(0, Lin::basis(0)), (1, Lin::basis(1))], 4).unwrap();
        assert!(t.lift_defect(4, 4).is_none());
        assert_eq!(t.lift(&2, 4).terms, Lin::term(vec![0, 1], qi(1)));
        let images: BTreeMap<usize, BarSeries> = (0..3).map(|k| (k, t.lift(&k, 4))).collect();
        let back = morphism_to_twisting(&images);
        for (k, v) in &back {
            assert_eq!(*v, t.value(k));
        }
        let t2 = TwistingCochain::new(&c, &a, back, 4).unwrap();
        for k in 0..3 {
            assert_eq!(t2.lift(&k, 4), images[&k]);
        }
    }

    #[test]
    fn non_mc_cochain_is_rejected() {
        // c primitive of degree 0 in C, value x with dx = y in A: residual y
        let space = GradedSpace::from_degrees("c", &[("c", 0)]);
        let c = FinCoalgebra::new(space, vec![], vec![]).unwrap();
        let a = FinDga::new(GradedSpace::from_degrees("a", &[("x", 1), ("y", 2)]), vec![], vec![(0, Lin::basis(1))]).unwrap();
        assert!(TwistingCochain::new(&c, &a, vec![(0, Lin::basis(0))], 2).is_err());
    }
}
