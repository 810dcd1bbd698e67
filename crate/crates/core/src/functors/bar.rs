//! Augmented dg algebras given by tables and their bar constructions.

use super::DgCoalgebra;
use crate::error::{Error, Result};
use crate::graded::{GradedSpace, Word};
use crate::lin::Lin;
use crate::scalar::{qi, sign};
use std::collections::BTreeMap;

/// Augmented dg algebra `A = k 1 + A_bar`, given by tables on a basis of
/// the augmentation ideal `A_bar`. The unit is implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct FinDga {
    pub space: GradedSpace,
    product: BTreeMap<(usize, usize), Lin<usize>>,
    differential: BTreeMap<usize, Lin<usize>>,
}

impl FinDga {
    pub fn new(
        space: GradedSpace,
        products: Vec<((usize, usize), Lin<usize>)>,
        differential: Vec<(usize, Lin<usize>)>,
    ) -> Result<Self> {
        let a = FinDga {
            space,
            product: products.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
            differential: differential.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        };
        a.check()?;
        Ok(a)
    }

    pub fn ground() -> Self {
        FinDga::new(GradedSpace::from_degrees("k", &[]), vec![], vec![]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.space.degree(i)
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> Lin<usize> {
        self.product.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn mul(&self, a: &Lin<usize>, b: &Lin<usize>) -> Lin<usize> {
        let mut out = Lin::zero();
        for (x, cx) in a.iter() {
            for (y, cy) in b.iter() {
                out.add_scaled(&self.mul_basis(*x, *y), &(cx.clone() * cy.clone()));
            }
        }
        out
    }

    pub fn d_basis(&self, i: usize) -> Lin<usize> {
        self.differential.get(&i).cloned().unwrap_or_default()
    }

    pub fn d(&self, a: &Lin<usize>) -> Lin<usize> {
        a.apply(|i| self.d_basis(*i))
    }

    /// Degrees, associativity, Leibniz and `d^2 = 0`.
    pub fn check(&self) -> Result<()> {
        let n = self.dim();
        for ((i, j), v) in &self.product {
            if v.keys().any(|o| self.degree(*o) != self.degree(*i) + self.degree(*j)) {
                return Err(Error::Structure(format!("product ({}, {}) has the wrong degree", i, j)));
            }
        }
        for (i, v) in &self.differential {
            if v.keys().any(|o| self.degree(*o) != self.degree(*i) + 1) {
                return Err(Error::Structure(format!("differential of {} has the wrong degree", i)));
            }
        }
        for i in 0..n {
            if !self.d(&self.d_basis(i)).is_zero() {
                return Err(Error::Structure(format!("d^2 != 0 on {}", self.space.label(i))));
            }
            for j in 0..n {
                let ab = self.mul_basis(i, j);
                let mut rhs = self.mul(&self.d_basis(i), &Lin::basis(j));
                rhs.add_scaled(&self.mul(&Lin::basis(i), &self.d_basis(j)), &qi(sign(self.degree(i))));
                if self.d(&ab) != rhs {
                    return Err(Error::Structure(format!("Leibniz fails on ({}, {})", i, j)));
                }
                for k in 0..n {
                    let l = self.mul(&ab, &Lin::basis(k));
                    let r = self.mul(&Lin::basis(i), &self.mul_basis(j, k));
                    if l != r {
                        return Err(Error::Structure(format!("not associative on ({}, {}, {})", i, j, k)));
                    }
                }
            }
        }
        Ok(())
    }

    /// `2 x 2` upper triangular matrices augmented by the `e11` entry;
    /// the ideal has basis `e22, e12`.
    pub fn upper_triangular_2() -> Self {
        let space = GradedSpace::from_degrees("ut2", &[("e22", 0), ("e12", 0)]);
        FinDga::new(
            space,
            vec![((0, 0), Lin::basis(0)), ((1, 0), Lin::basis(1))],
            vec![],
        )
        .unwrap()
    }
}

/// Bar construction: the tensor coalgebra on `s A_bar` (with `|sa| = |a| - 1`)
/// and the two-term differential. Keys are nonempty words of ideal basis
/// indices; the filtration weight is the word length.
pub struct BarCoalgebra<'a> {
    pub a: &'a FinDga,
}

impl<'a> BarCoalgebra<'a> {
    pub fn new(a: &'a FinDga) -> Self {
        BarCoalgebra { a }
    }

    fn sdeg(&self, i: usize) -> i64 {
        self.a.degree(i) - 1
    }

    /// Bar differential on a word (the empty word is the co-unit and closed).
    pub fn d_word(&self, w: &[usize]) -> Lin<Word> {
        let mut out = Lin::zero();
        let mut n = 0;
        for (i, &x) in w.iter().enumerate() {
            for (y, c) in self.a.d_basis(x).iter() {
                let mut nw = w.to_vec();
                nw[i] = *y;
                out.add_term(nw, -c.clone() * qi(sign(n)));
            }
            if i >= 1 {
                for (y, c) in self.a.mul_basis(w[i - 1], x).iter() {
                    let mut nw = w[..i - 1].to_vec();
                    nw.push(*y);
                    nw.extend_from_slice(&w[i + 1..]);
                    out.add_term(nw, c.clone() * qi(sign(n)));
                }
            }
            n += self.sdeg(x);
        }
        out
    }
}

impl<'a> DgCoalgebra for BarCoalgebra<'a> {
    type Key = Word;
    fn degree(&self, k: &Word) -> i64 {
        k.iter().map(|&i| self.sdeg(i)).sum()
    }
    fn weight(&self, k: &Word) -> u32 {
        k.len() as u32
    }
    fn reduced_coproduct(&self, k: &Word) -> Lin<(Word, Word)> {
        (1..k.len()).map(|i| ((k[..i].to_vec(), k[i..].to_vec()), qi(1))).collect()
    }
    fn differential(&self, k: &Word) -> Lin<Word> {
        self.d_word(k)
    }
    fn basis_up_to(&self, weight: u32) -> Vec<Word> {
        let gens: Vec<usize> = (0..self.a.dim()).collect();
        super::cobar_words(&gens, |_| 1, weight).into_iter().filter(|w| !w.is_empty()).collect()
    }
}

/// Element of the completed bar construction truncated at word length `cap`.
/// The empty word carries the co-unit component.
#[derive(Clone, Debug, PartialEq)]
pub struct BarSeries {
    pub cap: u32,
    pub terms: Lin<Word>,
}

impl BarSeries {
    /// Tensor-length `k` component.
    pub fn component(&self, k: usize) -> Lin<Word> {
        self.terms.filter(|w| w.len() == k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_bar_is_counit_only() {
        let k = FinDga::ground();
        let b = BarCoalgebra::new(&k);
        assert!(b.basis_up_to(4).is_empty());
    }

    #[test]
    fn square_zero_odd_generator() {
        let a = FinDga::new(GradedSpace::from_degrees("e", &[("a", 1)]), vec![], vec![]).unwrap();
        let b = BarCoalgebra::new(&a);
        assert!(b.d_word(&[0]).is_zero());
        assert!(b.d_word(&[0, 0]).is_zero());
    }

    #[test]
    fn upper_triangular_bar_squares_to_zero() {
        let a = FinDga::upper_triangular_2();
        let b = BarCoalgebra::new(&a);
        for w in b.basis_up_to(3) {
            let dd = b.d_word(&w).apply(|v| b.d_word(v));
            assert!(dd.is_zero(), "{:?}", w);
        }
        b.check(3).unwrap();
        // d(s e22 s e22) = s(e22 e22) with n_2 = |s e22| = -1
        assert_eq!(b.d_word(&[0, 0]), Lin::term(vec![0], qi(-1)));
    }

    #[test]
    fn inconsistent_leibniz_is_rejected() {
        let space = GradedSpace::from_degrees("a", &[("x", 0), ("y", 1), ("xy", 1)]);
        let a = FinDga::new(
            space,
            vec![((0, 1), Lin::basis(2)), ((1, 0), Lin::basis(2))],
            vec![(0, Lin::basis(1))],
        );
        // d(x x) = 2 xy while x x = 0
        assert!(a.is_err());
    }

    #[test]
    fn square_zero_with_differential() {
        let space = GradedSpace::from_degrees("a", &[("x", 0), ("y", 1)]);
        let a = FinDga::new(space, vec![], vec![(0, Lin::basis(1))]).unwrap();
        let b = BarCoalgebra::new(&a);
        b.check(4).unwrap();
        assert_eq!(b.d_word(&[1, 0]), Lin::term(vec![1, 1], qi(-1)));
    }
}
