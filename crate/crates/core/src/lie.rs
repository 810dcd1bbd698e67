//! Strict differential graded Lie algebras and their universal enveloping
//! algebras in PBW normal form.

use crate::error::{Error, Result};
use crate::graded::{swap_sign, GradedSpace, Word};
use crate::lin::Lin;
use crate::linalg::{self, Matrix};
use crate::linfty::LInftyAlgebra;
use crate::scalar::{q, qi, sign, Coeff, Scalar};
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub struct DgLie {
    pub space: GradedSpace,
    pub filtered: bool,
    bracket: BTreeMap<(usize, usize), Lin<usize>>,
    diff: BTreeMap<usize, Lin<usize>>,
}

impl DgLie {
    /// Brackets may be given for one order of each pair; the other order is
    /// filled by graded antisymmetry. Checks Jacobi, `d^2 = 0` and that `d`
    /// is a derivation.
    pub fn new(
        space: GradedSpace,
        brackets: Vec<((usize, usize), Lin<usize>)>,
        diff: Vec<(usize, Lin<usize>)>,
        filtered: bool,
    ) -> Result<Self> {
        let mut bracket = BTreeMap::new();
        for ((i, j), v) in brackets {
            let s = -swap_sign(space.degree(i), space.degree(j));
            if let Some(old) = bracket.get(&(j, i)) {
                if *old != v.scale(&qi(s)) {
                    return Err(Error::Structure(format!("bracket table not antisymmetric on ({}, {})", i, j)));
                }
            }
            bracket.insert((j, i), v.scale(&qi(s)));
            bracket.insert((i, j), v);
        }
        bracket.retain(|_, v| !v.is_zero());
        let g = DgLie {
            space,
            filtered,
            bracket,
            diff: diff.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        };
        g.check()?;
        Ok(g)
    }

    pub fn abelian(space: GradedSpace) -> Self {
        DgLie { space, filtered: false, bracket: BTreeMap::new(), diff: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.space.degree(i)
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> Lin<usize> {
        self.bracket.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn bracket(&self, x: &Lin<usize>, y: &Lin<usize>) -> Lin<usize> {
        let mut out = Lin::zero();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                out.add_scaled(&self.bracket_basis(*i, *j), &(a.clone() * b.clone()));
            }
        }
        out
    }

    pub fn d_basis(&self, i: usize) -> Lin<usize> {
        self.diff.get(&i).cloned().unwrap_or_default()
    }

    pub fn d(&self, x: &Lin<usize>) -> Lin<usize> {
        x.apply(|i| self.d_basis(*i))
    }

    pub fn has_differential(&self) -> bool {
        !self.diff.is_empty()
    }

    fn check(&self) -> Result<()> {
        let n = self.dim();
        for ((i, j), v) in &self.bracket {
            for (o, _) in v.iter() {
                if self.degree(*o) != self.degree(*i) + self.degree(*j) {
                    return Err(Error::Structure(format!("bracket ({}, {}) has the wrong degree", i, j)));
                }
                if self.filtered && self.space.weight(*o) < self.space.weight(*i) + self.space.weight(*j) {
                    return Err(Error::Structure(format!("bracket ({}, {}) lowers weight", i, j)));
                }
            }
        }
        for (i, v) in &self.diff {
            for (o, _) in v.iter() {
                if self.degree(*o) != self.degree(*i) + 1 {
                    return Err(Error::Structure(format!("d({}) has the wrong degree", i)));
                }
            }
        }
        for i in 0..n {
            if !self.d(&self.d_basis(i)).is_zero() {
                return Err(Error::Structure(format!("d^2 != 0 on {}", self.space.label(i))));
            }
            for j in 0..n {
                let (x, y) = (Lin::basis(i), Lin::basis(j));
                let lhs = self.d(&self.bracket(&x, &y));
                let mut rhs = self.bracket(&self.d(&x), &y);
                rhs.add_scaled(&self.bracket(&x, &self.d(&y)), &qi(sign(self.degree(i))));
                if lhs != rhs {
                    return Err(Error::Structure(format!("d is not a derivation on ({}, {})", i, j)));
                }
                for k in 0..n {
                    let z = Lin::basis(k);
                    let a = self.bracket(&x, &self.bracket(&y, &z));
                    let b = self.bracket(&self.bracket(&x, &y), &z);
                    let c = self.bracket(&y, &self.bracket(&x, &z));
                    let mut r = a;
                    r.sub_assign(&b);
                    r.add_scaled(&c, &qi(-swap_sign(self.degree(i), self.degree(j))));
                    if !r.is_zero() {
                        return Err(Error::Structure(format!(
                            "Jacobi identity fails on ({}, {}, {})",
                            self.space.label(i),
                            self.space.label(j),
                            self.space.label(k)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The same algebra as an L-infinity algebra: `l_1 = d`, `l_2 = [,]`.
    pub fn to_linfty(&self) -> LInftyAlgebra {
        let mut entries: Vec<(Word, Lin<usize>)> = Vec::new();
        for (i, v) in &self.diff {
            entries.push((vec![*i], v.clone()));
        }
        for ((i, j), v) in &self.bracket {
            if i <= j {
                entries.push((vec![*i, *j], v.clone()));
            }
        }
        LInftyAlgebra::from_brackets(self.space.clone(), entries, self.filtered)
            .expect("a dg Lie algebra is an L-infinity algebra")
    }

    /// `g^{(+) n}` with labels `x.k` (slot `k` counted from 1); slot-major order.
    pub fn direct_sum(&self, n: usize) -> DgLie {
        let d = self.dim();
        let mut elems = Vec::new();
        for k in 0..n {
            for b in &self.space.basis {
                elems.push((format!("{}.{}", b.label, k + 1), b.degree, b.weight));
            }
        }
        let space = GradedSpace::new(&format!("{}^{}", self.space.name, n), elems).unwrap();
        let mut bracket = BTreeMap::new();
        let mut diff = BTreeMap::new();
        for k in 0..n {
            for ((i, j), v) in &self.bracket {
                bracket.insert((k * d + i, k * d + j), v.map_keys(|o| k * d + o));
            }
            for (i, v) in &self.diff {
                diff.insert(k * d + i, v.map_keys(|o| k * d + o));
            }
        }
        DgLie { space, filtered: self.filtered, bracket, diff }
    }

    /// `sl_2` with basis ordered `f, h, e`: `[h,e] = 2e`, `[h,f] = -2f`, `[e,f] = h`.
    pub fn sl2() -> DgLie {
        let space = GradedSpace::from_degrees("sl2", &[("f", 0), ("h", 0), ("e", 0)]);
        let (f, h, e) = (0, 1, 2);
        DgLie::new(
            space,
            vec![
                ((h, e), Lin::term(e, qi(2))),
                ((h, f), Lin::term(f, qi(-2))),
                ((e, f), Lin::basis(h)),
            ],
            vec![],
            false,
        )
        .unwrap()
    }

    /// Strictly upper triangular `n x n` matrices with the lower central
    /// weight `j - i` on `e_ij`.
    pub fn upper_triangular(n: usize) -> DgLie {
        let mut idx = BTreeMap::new();
        let mut elems = Vec::new();
        for gap in 1..n {
            for i in 1..=(n - gap) {
                let j = i + gap;
                idx.insert((i, j), elems.len());
                elems.push((format!("e{}{}", i, j), 0, gap as u32));
            }
        }
        let space = GradedSpace::new(&format!("n{}", n), elems).unwrap();
        let mut brackets = Vec::new();
        for (&(i, j), &a) in &idx {
            for (&(k, l), &b) in &idx {
                if a >= b {
                    continue;
                }
                let mut v = Lin::zero();
                if j == k {
                    v.add_term(idx[&(i, l)], qi(1));
                }
                if l == i {
                    v.add_term(idx[&(k, j)], qi(-1));
                }
                brackets.push(((a, b), v));
            }
        }
        DgLie::new(space, brackets, vec![], true).unwrap()
    }

    /// Free nilpotent Lie algebra of the given depth on `gens` degree-0
    /// generators, with a basis of left-normed Lyndon brackets and weight =
    /// bracket length.
    pub fn free_nilpotent(gens: usize, depth: usize) -> DgLie {
        let lyndon = lyndon_words(gens, depth);
        let deg = vec![0i64; gens];
        let tensors: Vec<Lin<Word>> = lyndon.iter().map(|w| lyndon_bracket(w, &deg)).collect();
        let names = ["a", "b", "c", "d"];
        let elems = lyndon
            .iter()
            .map(|w| {
                let l: String = w.iter().map(|&i| names.get(i).copied().unwrap_or("z")).collect();
                (l, 0, w.len() as u32)
            })
            .collect();
        let space = GradedSpace::new(&format!("free{}_{}", gens, depth), elems).unwrap();
        // coordinates of a homogeneous Lie polynomial in the Lyndon basis
        let solve = |v: &Lin<Word>| -> Lin<usize> {
            let len = match v.keys().next() {
                Some(w) => w.len(),
                None => return Lin::zero(),
            };
            let cols: Vec<usize> = (0..lyndon.len()).filter(|&c| lyndon[c].len() == len).collect();
            let mut rows: Vec<Word> = Vec::new();
            for c in &cols {
                for w in tensors[*c].keys().chain(v.keys()) {
                    if !rows.contains(w) {
                        rows.push(w.clone());
                    }
                }
            }
            let m: Matrix = rows.iter().map(|r| cols.iter().map(|&c| tensors[c].coeff(r)).collect()).collect();
            let b: Vec<Scalar> = rows.iter().map(|r| v.coeff(r)).collect();
            let x = linalg::solve(&m, &b).expect("Lie polynomial lies in the span of the basis");
            cols.iter().zip(x).filter(|(_, c)| !Zero::is_zero(c)).map(|(i, c)| (*i, c)).collect()
        };
        let mut brackets = Vec::new();
        for i in 0..lyndon.len() {
            for j in i + 1..lyndon.len() {
                if lyndon[i].len() + lyndon[j].len() > depth {
                    continue;
                }
                let t = crate::graded::free_lie_bracket(&tensors[i], &tensors[j], &deg);
                brackets.push(((i, j), solve(&t)));
            }
        }
        DgLie::new(space, brackets, vec![], true).unwrap()
    }
}

/// Lyndon words over `0..k` of length `<= n`, ordered by length then
/// lexicographically.
pub fn lyndon_words(k: usize, n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut w: Word = vec![0];
    while !w.is_empty() {
        if w.len() <= n {
            out.push(w.clone());
        }
        let m = w.len();
        while w.len() < n {
            let c = w[w.len() - m];
            w.push(c);
        }
        while let Some(&last) = w.last() {
            if last == k - 1 {
                w.pop();
            } else {
                break;
            }
        }
        if let Some(last) = w.last_mut() {
            *last += 1;
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// Standard bracketing of a Lyndon word, expanded in the tensor algebra.
pub fn lyndon_bracket(w: &[usize], deg: &[i64]) -> Lin<Word> {
    if w.len() == 1 {
        return Lin::basis(w.to_vec());
    }
    // split at the longest proper Lyndon suffix
    let mut split = 1;
    for s in 1..w.len() {
        if is_lyndon(&w[s..]) {
            split = s;
            break;
        }
    }
    crate::graded::free_lie_bracket(&lyndon_bracket(&w[..split], deg), &lyndon_bracket(&w[split..], deg), deg)
}

fn is_lyndon(w: &[usize]) -> bool {
    (1..w.len()).all(|i| w[i..] > *w)
}

/// PBW key: (accumulated weight, normally ordered word).
pub type PbwKey = (u32, Word);
pub type UElem<C = Scalar> = Lin<PbwKey, C>;

/// Universal enveloping algebra with PBW normal forms relative to the
/// order (degree, basis position).
#[derive(Clone, Debug)]
pub struct Enveloping {
    pub lie: DgLie,
    rank: Vec<usize>,
}

impl Enveloping {
    pub fn new(lie: DgLie) -> Self {
        let mut order: Vec<usize> = (0..lie.dim()).collect();
        order.sort_by_key(|&i| (lie.degree(i), i));
        let mut rank = vec![0; lie.dim()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        Enveloping { lie, rank }
    }

    pub fn unit<C: Coeff>(&self) -> UElem<C> {
        Lin::basis((0, vec![]))
    }

    pub fn gen<C: Coeff>(&self, i: usize) -> UElem<C> {
        Lin::basis((self.lie.space.weight(i), vec![i]))
    }

    pub fn from_lie<C: Coeff>(&self, x: &Lin<usize>) -> UElem<C> {
        x.iter().map(|(i, c)| ((self.lie.space.weight(*i), vec![*i]), C::from_scalar(c))).collect()
    }

    pub fn word_degree(&self, w: &[usize]) -> i64 {
        w.iter().map(|&i| self.lie.degree(i)).sum()
    }

    /// Rewrites to PBW normal form, dropping terms of weight above `cap`.
    pub fn normalize<C: Coeff>(&self, x: &UElem<C>, cap: Option<u32>) -> UElem<C> {
        let mut out = Lin::zero();
        let mut current = x.clone();
        while !current.is_zero() {
            let mut next: UElem<C> = Lin::zero();
            for ((wt, w), c) in current.iter() {
                if cap.is_some_and(|n| *wt > n) {
                    continue;
                }
                let pos = (0..w.len().saturating_sub(1)).find(|&j| {
                    let (a, b) = (w[j], w[j + 1]);
                    self.rank[a] > self.rank[b] || (a == b && self.lie.degree(a) % 2 != 0)
                });
                let j = match pos {
                    None => {
                        out.add_term((*wt, w.clone()), c.clone());
                        continue;
                    }
                    Some(j) => j,
                };
                let (a, b) = (w[j], w[j + 1]);
                let br = self.lie.bracket_basis(a, b);
                if a == b {
                    // odd square: x^2 = (1/2)[x, x]
                    for (z, cz) in br.iter() {
                        let mut nw = w[..j].to_vec();
                        nw.push(*z);
                        nw.extend_from_slice(&w[j + 2..]);
                        next.add_term((*wt, nw), c.clone() * C::from_scalar(&(cz.clone() * q(1, 2))));
                    }
                    continue;
                }
                let mut sw = w.clone();
                sw.swap(j, j + 1);
                let s = swap_sign(self.lie.degree(a), self.lie.degree(b));
                next.add_term((*wt, sw), c.clone() * C::from_i64(s));
                for (z, cz) in br.iter() {
                    let mut nw = w[..j].to_vec();
                    nw.push(*z);
                    nw.extend_from_slice(&w[j + 2..]);
                    next.add_term((*wt, nw), c.clone() * C::from_scalar(cz));
                }
            }
            current = next;
        }
        out
    }

    pub fn mul<C: Coeff>(&self, a: &UElem<C>, b: &UElem<C>, cap: Option<u32>) -> UElem<C> {
        let mut raw = Lin::zero();
        for ((wa, u), x) in a.iter() {
            for ((wb, v), y) in b.iter() {
                if cap.is_some_and(|n| wa + wb > n) {
                    continue;
                }
                let mut w = u.clone();
                w.extend_from_slice(v);
                raw.add_term((wa + wb, w), x.clone() * y.clone());
            }
        }
        self.normalize(&raw, cap)
    }

    /// Graded commutator of homogeneous elements.
    pub fn commutator<C: Coeff>(&self, a: &UElem<C>, b: &UElem<C>, cap: Option<u32>) -> UElem<C> {
        let mut out = Lin::zero();
        for ((wa, u), x) in a.iter() {
            for ((wb, v), y) in b.iter() {
                let ea = Lin::term((*wa, u.clone()), x.clone());
                let eb = Lin::term((*wb, v.clone()), y.clone());
                out.add_assign(&self.mul(&ea, &eb, cap));
                let s = -swap_sign(self.word_degree(u), self.word_degree(v));
                out.add_scaled(&self.mul(&eb, &ea, cap), &C::from_i64(s));
            }
        }
        out
    }

    /// Differential `d_U`, extended from `d` as a derivation.
    pub fn d<C: Coeff>(&self, x: &UElem<C>) -> UElem<C> {
        let mut raw = Lin::zero();
        for ((wt, w), c) in x.iter() {
            let mut e = 0;
            for (pos, &i) in w.iter().enumerate() {
                for (z, cz) in self.lie.d_basis(i).iter() {
                    let mut nw = w[..pos].to_vec();
                    nw.push(*z);
                    nw.extend_from_slice(&w[pos + 1..]);
                    raw.add_term((*wt, nw), c.clone() * C::from_scalar(cz) * C::from_i64(sign(e)));
                }
                e += self.lie.degree(i);
            }
        }
        self.normalize(&raw, None)
    }

    /// Drops the weight bookkeeping.
    pub fn forget_weight<C: Coeff>(x: &UElem<C>) -> Lin<Word, C> {
        let mut out = Lin::zero();
        for ((_, w), c) in x.iter() {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    /// Truncation to weight `<= n`.
    pub fn truncate<C: Coeff>(x: &UElem<C>, n: u32) -> UElem<C> {
        x.filter(|(w, _)| *w <= n)
    }

    /// Algebra map induced by a linear map on generators (`images[i]` is the
    /// image of generator `i` in `target`).
    pub fn map_words<C: Coeff>(&self, target: &Enveloping, images: &[UElem<C>], x: &UElem<C>, cap: Option<u32>) -> UElem<C> {
        let mut out = Lin::zero();
        for ((_, w), c) in x.iter() {
            let mut acc: UElem<C> = target.unit();
            for &i in w {
                acc = target.mul(&acc, &images[i], cap);
            }
            out.add_scaled(&acc, c);
        }
        out
    }
}

/// Dense matrix representation of a Lie algebra: basis index -> matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RepMatrix {
    pub dim: usize,
    pub mats: Vec<Matrix>,
}

impl RepMatrix {
    /// Checks `rho([x,y]) = [rho x, rho y]` exactly (degree-0 algebras).
    pub fn check(&self, g: &DgLie) -> Result<()> {
        for i in 0..g.dim() {
            for j in 0..g.dim() {
                let lhs = self.image(&g.bracket_basis(i, j));
                let a = linalg::matmul(&self.mats[i], &self.mats[j]);
                let b = linalg::matmul(&self.mats[j], &self.mats[i]);
                let s = qi(swap_sign(g.degree(i), g.degree(j)));
                let rhs: Matrix = a
                    .iter()
                    .zip(&b)
                    .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - &s * y).collect())
                    .collect();
                if lhs != rhs {
                    return Err(Error::Structure(format!("representation fails on ({}, {})", i, j)));
                }
            }
        }
        Ok(())
    }

    pub fn image(&self, x: &Lin<usize>) -> Matrix {
        let mut m = linalg::zeros(self.dim, self.dim);
        for (i, c) in x.iter() {
            for r in 0..self.dim {
                for s in 0..self.dim {
                    m[r][s] += c * &self.mats[*i][r][s];
                }
            }
        }
        m
    }

    /// Standard 2-dimensional representation of `sl_2` (basis `f, h, e`).
    pub fn sl2_standard() -> RepMatrix {
        let z = || qi(0);
        let f = vec![vec![z(), z()], vec![qi(1), z()]];
        let h = vec![vec![qi(1), z()], vec![z(), qi(-1)]];
        let e = vec![vec![z(), qi(1)], vec![z(), z()]];
        RepMatrix { dim: 2, mats: vec![f, h, e] }
    }

    /// Trivial one-dimensional representation.
    pub fn trivial(g: &DgLie) -> RepMatrix {
        RepMatrix { dim: 1, mats: vec![vec![vec![qi(0)]]; g.dim()] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_rewriting_step() {
        let u = Enveloping::new(DgLie::sl2());
        let ef = u.mul::<Scalar>(&u.gen(2), &u.gen(0), None);
        let mut expect: UElem = Lin::zero();
        expect.add_term((2, vec![0, 2]), qi(1));
        expect.add_term((2, vec![1]), qi(1));
        assert_eq!(ef, expect);
    }

    #[test]
    fn associativity_in_pbw() {
        let u = Enveloping::new(DgLie::sl2());
        let (e, f, h) = (u.gen::<Scalar>(2), u.gen::<Scalar>(0), u.gen::<Scalar>(1));
        let a = u.mul(&u.mul(&e, &f, None), &h, None);
        let b = u.mul(&e, &u.mul(&f, &h, None), None);
        assert_eq!(a, b);
        let ee = u.mul(&e, &e, None);
        let l = u.mul(&u.mul(&ee, &f, None), &f, None);
        let r = u.mul(&ee, &u.mul(&f, &f, None), None);
        assert_eq!(l, r);
    }

    #[test]
    fn odd_square_and_leibniz() {
        // x odd of degree 1 with [x,x] = 2y, y even of degree 2, dx = 0 ...
        let space = GradedSpace::from_degrees("g", &[("x", 1), ("y", 2), ("z", 1)]);
        let g = DgLie::new(space, vec![((0, 0), Lin::term(1, qi(2)))], vec![(2, Lin::basis(1))], false);
        // d z = y must satisfy d[x,x] = 0 = [dx,x] - [x,dx]
        let g = g.unwrap();
        let u = Enveloping::new(g);
        let x = u.gen::<Scalar>(0);
        let xx = u.mul(&x, &x, None);
        assert_eq!(Enveloping::forget_weight(&xx), Lin::basis(vec![1]));
        let z = u.gen::<Scalar>(2);
        let zx = u.mul(&z, &x, None);
        let lhs = u.d(&zx);
        let mut rhs = u.mul(&u.d(&z), &x, None);
        rhs.add_scaled(&u.mul(&z, &u.d(&x), None), &qi(-1));
        assert_eq!(Enveloping::forget_weight(&lhs), Enveloping::forget_weight(&rhs));
    }

    #[test]
    fn lyndon_counts() {
        // Witt formula for two letters: 2, 1, 2, 3, 6
        let w = lyndon_words(2, 5);
        let counts: Vec<usize> = (1..=5).map(|n| w.iter().filter(|x| x.len() == n).count()).collect();
        assert_eq!(counts, vec![2, 1, 2, 3, 6]);
        let g = DgLie::free_nilpotent(2, 4);
        assert_eq!(g.dim(), 8);
    }

    #[test]
    fn upper_triangular_brackets() {
        let g = DgLie::upper_triangular(3);
        assert_eq!(g.bracket_basis(0, 1), Lin::basis(2));
        assert_eq!(g.space.weight(2), 2);
        RepMatrix::sl2_standard().check(&DgLie::sl2()).unwrap();
    }
}
