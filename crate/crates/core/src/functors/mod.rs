//! The functor stack: Chevalley-Eilenberg coalgebras, cobar and bar
//! constructions, strictification with its canonical maps, and twisting
//! cochains.

pub mod bar;
pub mod strict;
pub mod twisting;

use crate::error::{Error, Result};
use crate::graded::{GradedSpace, Word};
use crate::lin::Lin;
use crate::linfty::SymmetricStructure;
use crate::scalar::{qi, sign, Coeff};
use std::collections::BTreeMap;
use std::fmt::Debug;

pub use bar::{BarCoalgebra, FinDga};
pub use strict::{eta_morphism_defect, rho_chain_defect, tau_generator, UInfinity};
pub use twisting::TwistingCochain;

/// Co-augmented dg coalgebra described on the reduced part.
pub trait DgCoalgebra {
    type Key: Ord + Clone + Debug;
    fn degree(&self, k: &Self::Key) -> i64;
    /// Filtration weight; at least 1 on the reduced part.
    fn weight(&self, k: &Self::Key) -> u32;
    fn reduced_coproduct(&self, k: &Self::Key) -> Lin<(Self::Key, Self::Key)>;
    fn differential(&self, k: &Self::Key) -> Lin<Self::Key>;
    /// Reduced basis keys up to the given weight (for checks).
    fn basis_up_to(&self, weight: u32) -> Vec<Self::Key>;

    fn differential_lin(&self, x: &Lin<Self::Key>) -> Lin<Self::Key> {
        x.apply(|k| self.differential(k))
    }

    /// `d^2 = 0`, coassociativity of the reduced coproduct and the coderivation
    /// property, on every basis key up to `weight`.
    fn check(&self, weight: u32) -> Result<()> {
        for k in self.basis_up_to(weight) {
            if !self.differential_lin(&self.differential(&k)).is_zero() {
                return Err(Error::Structure(format!("d^2 != 0 on {:?}", k)));
            }
            let dk = self.reduced_coproduct(&k);
            let mut left: Lin<(Self::Key, Self::Key, Self::Key)> = Lin::zero();
            let mut right: Lin<(Self::Key, Self::Key, Self::Key)> = Lin::zero();
            for ((a, b), c) in dk.iter() {
                for ((a1, a2), c2) in self.reduced_coproduct(a).iter() {
                    left.add_term((a1.clone(), a2.clone(), b.clone()), c.clone() * c2.clone());
                }
                for ((b1, b2), c2) in self.reduced_coproduct(b).iter() {
                    right.add_term((a.clone(), b1.clone(), b2.clone()), c.clone() * c2.clone());
                }
            }
            if left != right {
                return Err(Error::Structure(format!("coproduct not coassociative on {:?}", k)));
            }
            // Delta d = (d (x) 1 + 1 (x) d) Delta on the reduced part
            let lhs = self.differential(&k).apply(|x| self.reduced_coproduct(x));
            let mut rhs = Lin::zero();
            for ((a, b), c) in dk.iter() {
                for (da, ca) in self.differential(a).iter() {
                    rhs.add_term((da.clone(), b.clone()), c.clone() * ca.clone());
                }
                let s = qi(sign(self.degree(a)));
                for (db, cb) in self.differential(b).iter() {
                    rhs.add_term((a.clone(), db.clone()), c.clone() * cb.clone() * s.clone());
                }
            }
            if lhs != rhs {
                return Err(Error::Structure(format!("differential is not a coderivation on {:?}", k)));
            }
        }
        Ok(())
    }
}

/// `CE(g) = S(sg)` with the coderivation induced by the structure maps.
/// Keys are nonempty sorted words.
pub struct ChevalleyEilenberg<'a, S: SymmetricStructure> {
    pub g: &'a S,
    /// Keys available for enumeration in checks.
    pub generators: Vec<S::Key>,
}

impl<'a, S: SymmetricStructure> ChevalleyEilenberg<'a, S> {
    pub fn new(g: &'a S, generators: Vec<S::Key>) -> Self {
        ChevalleyEilenberg { g, generators }
    }
}

impl<'a, S: SymmetricStructure> DgCoalgebra for ChevalleyEilenberg<'a, S> {
    type Key = Vec<S::Key>;
    fn degree(&self, k: &Self::Key) -> i64 {
        k.iter().map(|x| self.g.sdeg(x)).sum()
    }
    fn weight(&self, k: &Self::Key) -> u32 {
        k.iter().map(|x| self.g.key_weight(x)).sum()
    }
    fn reduced_coproduct(&self, k: &Self::Key) -> Lin<(Self::Key, Self::Key)> {
        let mut out = Lin::zero();
        for (a, b, s) in crate::graded::unshuffles(k, |x| self.g.sdeg(x)) {
            if !a.is_empty() && !b.is_empty() {
                out.add_term((a, b), qi(s));
            }
        }
        out
    }
    fn differential(&self, k: &Self::Key) -> Lin<Self::Key> {
        self.g.coderivation_on(&Lin::basis(k.clone()))
    }
    fn basis_up_to(&self, weight: u32) -> Vec<Self::Key> {
        let mut out = Vec::new();
        for len in 1..=weight as usize {
            for w in crate::graded::multisets(&self.generators, len) {
                if self.weight(&w) <= weight && self.g.normalize_word(&w).is_some() {
                    out.push(w);
                }
            }
        }
        out
    }
}

/// Chevalley-Eilenberg coalgebra of a finite L-infinity algebra.
pub fn chevalley_eilenberg(g: &crate::linfty::LInftyAlgebra) -> ChevalleyEilenberg<'_, crate::linfty::LInftyAlgebra> {
    ChevalleyEilenberg::new(g, (0..g.dim()).collect())
}

/// Reduced dg coalgebra given by tables on a finite basis.
#[derive(Clone, Debug)]
pub struct FinCoalgebra {
    pub space: GradedSpace,
    coproduct: BTreeMap<usize, Lin<(usize, usize)>>,
    differential: BTreeMap<usize, Lin<usize>>,
}

impl FinCoalgebra {
    pub fn new(
        space: GradedSpace,
        coproduct: Vec<(usize, Lin<(usize, usize)>)>,
        differential: Vec<(usize, Lin<usize>)>,
    ) -> Result<Self> {
        let c = FinCoalgebra {
            space,
            coproduct: coproduct.into_iter().collect(),
            differential: differential.into_iter().collect(),
        };
        for k in 0..c.space.dim() {
            if c.space.weight(k) == 0 {
                return Err(Error::Structure("reduced basis elements need weight >= 1".into()));
            }
            for ((a, b), _) in c.reduced_coproduct(&k).iter() {
                if c.space.degree(*a) + c.space.degree(*b) != c.space.degree(k) {
                    return Err(Error::Structure(format!("coproduct of {} has the wrong degree", k)));
                }
                if c.space.weight(*a) + c.space.weight(*b) < c.space.weight(k) {
                    return Err(Error::Structure(format!("coproduct of {} violates the filtration", k)));
                }
            }
        }
        c.check(u32::MAX)?;
        Ok(c)
    }
}

impl DgCoalgebra for FinCoalgebra {
    type Key = usize;
    fn degree(&self, k: &usize) -> i64 {
        self.space.degree(*k)
    }
    fn weight(&self, k: &usize) -> u32 {
        self.space.weight(*k)
    }
    fn reduced_coproduct(&self, k: &usize) -> Lin<(usize, usize)> {
        self.coproduct.get(k).cloned().unwrap_or_default()
    }
    fn differential(&self, k: &usize) -> Lin<usize> {
        self.differential.get(k).cloned().unwrap_or_default()
    }
    fn basis_up_to(&self, weight: u32) -> Vec<usize> {
        (0..self.space.dim()).filter(|&k| self.space.weight(k) <= weight).collect()
    }
}

/// Cobar construction `T(uC)` truncated by the filtration weight of the
/// generators. Elements are combinations of words of reduced keys; the
/// generator `u x` has degree `|x| + 1`.
pub struct Cobar<'a, C: DgCoalgebra> {
    pub c: &'a C,
    pub cap: Option<u32>,
}

pub type CobarElem<K, F = crate::scalar::Scalar> = Lin<Vec<K>, F>;

impl<'a, C: DgCoalgebra> Cobar<'a, C> {
    pub fn new(c: &'a C, cap: Option<u32>) -> Self {
        Cobar { c, cap }
    }

    pub fn gen_degree(&self, k: &C::Key) -> i64 {
        self.c.degree(k) + 1
    }

    pub fn word_degree(&self, w: &[C::Key]) -> i64 {
        w.iter().map(|k| self.gen_degree(k)).sum()
    }

    pub fn word_weight(&self, w: &[C::Key]) -> u32 {
        w.iter().map(|k| self.c.weight(k)).sum()
    }

    fn keep(&self, w: &[C::Key]) -> bool {
        self.cap.is_none_or(|n| self.word_weight(w) <= n)
    }

    pub fn mul<F: Coeff>(&self, a: &CobarElem<C::Key, F>, b: &CobarElem<C::Key, F>) -> CobarElem<C::Key, F> {
        let mut out = Lin::zero();
        for (u, x) in a.iter() {
            for (v, y) in b.iter() {
                let mut w = u.clone();
                w.extend_from_slice(v);
                if self.keep(&w) {
                    out.add_term(w, x.clone() * y.clone());
                }
            }
        }
        out
    }

    /// `delta(u x) = u dx - sum_i (-1)^{|x_i|} u x_i (x) u y_i`.
    pub fn d_generator(&self, k: &C::Key) -> CobarElem<C::Key> {
        let mut out = Lin::zero();
        for (dk, c) in self.c.differential(k).iter() {
            out.add_term(vec![dk.clone()], c.clone());
        }
        for ((a, b), c) in self.c.reduced_coproduct(k).iter() {
            out.add_term(vec![a.clone(), b.clone()], -c.clone() * qi(sign(self.c.degree(a))));
        }
        out
    }

    /// Derivation extension of `d_generator`.
    pub fn d<F: Coeff>(&self, x: &CobarElem<C::Key, F>) -> CobarElem<C::Key, F> {
        let mut out = Lin::zero();
        for (w, c) in x.iter() {
            let mut e = 0;
            for (pos, k) in w.iter().enumerate() {
                for (m, cm) in self.d_generator(k).iter() {
                    let mut nw = w[..pos].to_vec();
                    nw.extend(m.iter().cloned());
                    nw.extend_from_slice(&w[pos + 1..]);
                    if self.keep(&nw) {
                        out.add_term(nw, c.clone() * F::from_scalar(cm) * F::from_i64(sign(e)));
                    }
                }
                e += self.gen_degree(k);
            }
        }
        out
    }

    /// Graded commutator.
    pub fn commutator<F: Coeff>(&self, a: &CobarElem<C::Key, F>, b: &CobarElem<C::Key, F>) -> CobarElem<C::Key, F> {
        let mut out = Lin::zero();
        for (u, x) in a.iter() {
            for (v, y) in b.iter() {
                let s = -crate::graded::swap_sign(self.word_degree(u), self.word_degree(v));
                let mut w = u.clone();
                w.extend_from_slice(v);
                if self.keep(&w) {
                    out.add_term(w, x.clone() * y.clone());
                }
                let mut w2 = v.clone();
                w2.extend_from_slice(u);
                if self.keep(&w2) {
                    out.add_term(w2, x.clone() * y.clone() * F::from_i64(s));
                }
            }
        }
        out
    }

    /// First generator (up to weight) on which `delta^2` does not vanish.
    pub fn square_defect(&self, weight: u32) -> Option<(C::Key, CobarElem<C::Key>)> {
        for k in self.c.basis_up_to(weight) {
            let r = self.d(&self.d_generator(&k));
            if !r.is_zero() {
                return Some((k, r));
            }
        }
        None
    }
}

/// Words of generators of total weight `<= n` (for exhaustive checks).
pub fn cobar_words<K: Clone>(gens: &[K], weight: impl Fn(&K) -> u32, n: u32) -> Vec<Vec<K>> {
    let mut out: Vec<Vec<K>> = vec![vec![]];
    let mut frontier: Vec<(Vec<K>, u32)> = vec![(vec![], 0)];
    while let Some((w, wt)) = frontier.pop() {
        for g in gens {
            let nw = wt + weight(g);
            if nw <= n {
                let mut v = w.clone();
                v.push(g.clone());
                out.push(v.clone());
                frontier.push((v, nw));
            }
        }
    }
    out
}

pub type CeKey = Word;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linfty::LInftyAlgebra;

    fn aff() -> LInftyAlgebra {
        let space = GradedSpace::from_degrees("aff", &[("e", 0), ("f", 0)]);
        LInftyAlgebra::from_brackets(space, vec![(vec![0, 1], Lin::basis(1))], false).unwrap()
    }

    #[test]
    fn ce_is_a_dg_coalgebra() {
        let g = aff();
        let ce = chevalley_eilenberg(&g);
        ce.check(3).unwrap();
    }

    #[test]
    fn cobar_of_ce_squares_to_zero() {
        let g = aff();
        let ce = chevalley_eilenberg(&g);
        let om = Cobar::new(&ce, Some(4));
        assert!(om.square_defect(4).is_none());
        // words of weight <= 4
        for w in cobar_words(&ce.basis_up_to(4), |k| ce.weight(k), 4) {
            let x: CobarElem<Word> = Lin::basis(w);
            assert!(om.d(&om.d(&x)).is_zero());
        }
    }

    #[test]
    fn primitive_generator_has_only_linear_term() {
        let g = LInftyAlgebra::abelian(GradedSpace::from_degrees("a", &[("x", 1)]));
        let ce = chevalley_eilenberg(&g);
        let om = Cobar::new(&ce, None);
        assert!(om.d_generator(&vec![0]).is_zero());
        // sx of degree 0: d u(sx sx) = -u(sx) u(sx) times the unshuffle count
        let d2 = om.d_generator(&vec![0, 0]);
        assert_eq!(d2, Lin::term(vec![vec![0], vec![0]], qi(-2)));
    }
}
