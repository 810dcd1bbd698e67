//! Graded vector spaces with labeled bases, Koszul signs, and the tensor and
//! symmetric (co)algebra operations on words of basis indices.

use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::scalar::{factorial, qi, Coeff};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElem {
    pub label: String,
    pub degree: i64,
    #[serde(default = "default_weight")]
    pub weight: u32,
}

fn default_weight() -> u32 {
    1
}

/// A finite graded basis. Indices into `basis` are the internal labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedSpace {
    pub name: String,
    pub basis: Vec<BasisElem>,
}

impl GradedSpace {
    pub fn new(name: &str, elems: Vec<(String, i64, u32)>) -> Result<Self> {
        let basis: Vec<BasisElem> = elems
            .into_iter()
            .map(|(label, degree, weight)| BasisElem { label, degree, weight })
            .collect();
        let mut seen = std::collections::BTreeSet::new();
        for b in &basis {
            if !seen.insert(b.label.clone()) {
                return Err(Error::Argument(format!("duplicate label {}", b.label)));
            }
        }
        Ok(GradedSpace { name: name.to_string(), basis })
    }

    /// Space with unit weights from `(label, degree)` pairs.
    pub fn from_degrees(name: &str, elems: &[(&str, i64)]) -> Self {
        Self::new(name, elems.iter().map(|(l, d)| (l.to_string(), *d, 1)).collect())
            .expect("labels must be unique")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.basis[i].weight
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].label
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.label == label)
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.basis.iter().map(|b| b.degree).collect()
    }

    /// The same basis with every degree shifted by `shift` (`-1` for the
    /// suspension, `+1` for the desuspension, since (sV)^k = V^{k+1}).
    pub fn shifted(&self, name: &str, shift: i64) -> GradedSpace {
        GradedSpace {
            name: name.to_string(),
            basis: self
                .basis
                .iter()
                .map(|b| BasisElem { label: b.label.clone(), degree: b.degree + shift, weight: b.weight })
                .collect(),
        }
    }

    pub fn suspension(&self) -> GradedSpace {
        let mut s = self.shifted(&format!("s{}", self.name), -1);
        for b in &mut s.basis {
            b.label = format!("s{}", b.label);
        }
        s
    }

    pub fn desuspension(&self) -> GradedSpace {
        let mut s = self.shifted(&format!("u{}", self.name), 1);
        for b in &mut s.basis {
            b.label = format!("u{}", b.label);
        }
        s
    }
}

pub type Word = Vec<usize>;

pub fn is_odd(d: i64) -> bool {
    d.rem_euclid(2) == 1
}

/// Sign of swapping two adjacent factors of the given degrees.
pub fn swap_sign(a: i64, b: i64) -> i64 {
    if is_odd(a) && is_odd(b) {
        -1
    } else {
        1
    }
}

/// Koszul sign of `sigma` acting on a word whose factors have `degrees`.
/// `perm` is 1-based: the output word is `x_{perm(1)} ... x_{perm(n)}`.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> Result<i64> {
    let n = perm.len();
    if degrees.len() != n {
        return Err(Error::Argument(format!(
            "permutation of length {} but {} degrees",
            n,
            degrees.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p == 0 || p > n || seen[p - 1] {
            return Err(Error::Argument("not a permutation of 1..n".into()));
        }
        seen[p - 1] = true;
    }
    Ok(koszul_sign_0(&perm.iter().map(|p| p - 1).collect::<Vec<_>>(), degrees))
}

/// Koszul sign for a 0-based permutation; no validation.
pub fn koszul_sign_0(perm: &[usize], degrees: &[i64]) -> i64 {
    let mut s = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                s *= swap_sign(degrees[perm[i]], degrees[perm[j]]);
            }
        }
    }
    s
}

/// Sign of sorting `items` (stable) with Koszul rule; returns the sorted
/// items and the sign.
pub fn koszul_sort<T: Ord + Clone>(items: &[T], deg: impl Fn(&T) -> i64) -> (Vec<T>, i64) {
    let mut v: Vec<T> = items.to_vec();
    let mut s = 1;
    // insertion sort, tracking adjacent swaps
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            s *= swap_sign(deg(&v[j - 1]), deg(&v[j]));
            v.swap(j - 1, j);
            j -= 1;
        }
    }
    (v, s)
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn word_degree(w: &[usize], deg: &[i64]) -> i64 {
    w.iter().map(|&i| deg[i]).sum()
}

/// Symmetrization `(1/n!) sum_sigma koszul(sigma) sigma.word`.
pub fn sym_project(word: &[usize], deg: &[i64]) -> Lin<Word> {
    let n = word.len();
    let wdeg: Vec<i64> = word.iter().map(|&i| deg[i]).collect();
    let mut out = Lin::zero();
    let inv = qi(1) / factorial(n);
    for p in permutations(n) {
        let s = koszul_sign_0(&p, &wdeg);
        let w: Word = p.iter().map(|&j| word[j]).collect();
        out.add_term(w, inv.clone() * qi(s));
    }
    out
}

pub fn sym_project_lin(x: &Lin<Word>, deg: &[i64]) -> Lin<Word> {
    x.apply(|w| sym_project(w, deg))
}

/// Deconcatenation coproduct on a single word.
pub fn deconcatenate(word: &[usize]) -> Vec<(Word, Word)> {
    (0..=word.len()).map(|k| (word[..k].to_vec(), word[k..].to_vec())).collect()
}

pub fn deconcatenate_lin(x: &Lin<Word>) -> Lin<(Word, Word)> {
    let mut out = Lin::zero();
    for (w, c) in x.iter() {
        for pair in deconcatenate(w) {
            out.add_term(pair, c.clone());
        }
    }
    out
}

/// Normal form of a monomial in the free graded-commutative algebra: sorts
/// the factors with the Koszul sign, or `None` if an odd factor repeats.
pub fn sym_normalize<T: Ord + Clone>(word: &[T], deg: impl Fn(&T) -> i64) -> Option<(Vec<T>, i64)> {
    let (sorted, s) = koszul_sort(word, &deg);
    for w in sorted.windows(2) {
        if w[0] == w[1] && is_odd(deg(&w[0])) {
            return None;
        }
    }
    Some((sorted, s))
}

/// All splittings of a word into a subword on a position subset and its
/// complement, with the Koszul sign of bringing the subset to the front.
pub fn unshuffles<T: Clone>(word: &[T], deg: impl Fn(&T) -> i64) -> Vec<(Vec<T>, Vec<T>, i64)> {
    let n = word.len();
    let wdeg: Vec<i64> = word.iter().map(&deg).collect();
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0u64..(1u64 << n) {
        let mut perm = Vec::with_capacity(n);
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..n {
            if mask & (1 << i) != 0 {
                perm.push(i);
                a.push(word[i].clone());
            }
        }
        for i in 0..n {
            if mask & (1 << i) == 0 {
                perm.push(i);
                b.push(word[i].clone());
            }
        }
        out.push((a, b, koszul_sign_0(&perm, &wdeg)));
    }
    out
}

/// Product of two monomials in the free graded-commutative algebra.
pub fn sym_mul<T: Ord + Clone>(a: &[T], b: &[T], deg: impl Fn(&T) -> i64) -> Option<(Vec<T>, i64)> {
    let mut w = a.to_vec();
    w.extend_from_slice(b);
    sym_normalize(&w, deg)
}

/// Nondecreasing words of length `k` over `support` (sorted, deduplicated).
pub fn multisets<T: Clone>(support: &[T], k: usize) -> Vec<Vec<T>> {
    fn rec<T: Clone>(s: &[T], start: usize, k: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..s.len() {
            cur.push(s[i].clone());
            rec(s, i, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(support, 0, k, &mut Vec::new(), &mut out);
    out
}

/// Multiplicities of the runs in a sorted word, e.g. `[0,0,2] -> [2,1]`.
pub fn run_lengths<T: PartialEq>(word: &[T]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for (i, x) in word.iter().enumerate() {
        if i > 0 && word[i - 1] == *x {
            *out.last_mut().unwrap() += 1;
        } else {
            out.push(1);
        }
    }
    out
}

/// Concatenation product in the tensor algebra.
pub fn tensor_mul<C: Coeff>(a: &Lin<Word, C>, b: &Lin<Word, C>) -> Lin<Word, C> {
    let mut out = Lin::zero();
    for (u, x) in a.iter() {
        for (v, y) in b.iter() {
            let mut w = u.clone();
            w.extend_from_slice(v);
            out.add_term(w, x.clone() * y.clone());
        }
    }
    out
}

/// Splits an element of the tensor algebra into homogeneous components.
pub fn homogeneous_parts<C: Coeff>(x: &Lin<Word, C>, deg: &[i64]) -> Vec<(i64, Lin<Word, C>)> {
    let mut parts: std::collections::BTreeMap<i64, Lin<Word, C>> = Default::default();
    for (w, c) in x.iter() {
        parts.entry(word_degree(w, deg)).or_default().add_term(w.clone(), c.clone());
    }
    parts.into_iter().collect()
}

/// Graded commutator `[u,v] = u v - (-1)^{|u||v|} v u`, extended bilinearly
/// over homogeneous components.
pub fn free_lie_bracket<C: Coeff>(u: &Lin<Word, C>, v: &Lin<Word, C>, deg: &[i64]) -> Lin<Word, C> {
    let mut out = Lin::zero();
    for (du, pu) in homogeneous_parts(u, deg) {
        for (dv, pv) in homogeneous_parts(v, deg) {
            out.add_assign(&tensor_mul(&pu, &pv));
            let s = C::from_i64(-swap_sign(du, dv));
            out.add_scaled(&tensor_mul(&pv, &pu), &s);
        }
    }
    out
}

pub fn generator<C: Coeff>(i: usize) -> Lin<Word, C> {
    Lin::basis(vec![i])
}

/// Graded Jacobi residual `[x,[y,z]] - [[x,y],z] - (-1)^{|x||y|}[y,[x,z]]`.
pub fn jacobi_residual(x: &Lin<Word>, y: &Lin<Word>, z: &Lin<Word>, deg: &[i64]) -> Lin<Word> {
    let dx = homogeneous_parts(x, deg).first().map(|p| p.0).unwrap_or(0);
    let dy = homogeneous_parts(y, deg).first().map(|p| p.0).unwrap_or(0);
    let a = free_lie_bracket(x, &free_lie_bracket(y, z, deg), deg);
    let b = free_lie_bracket(&free_lie_bracket(x, y, deg), z, deg);
    let c = free_lie_bracket(y, &free_lie_bracket(x, z, deg), deg).scale(&qi(swap_sign(dx, dy)));
    let mut r = a;
    r.sub_assign(&b);
    r.sub_assign(&c);
    r
}

/// Applies a linear map of the form `x -> x (x) 1`-style on pairs of words:
/// `(Delta (x) id) Delta` on a word, as triples.
pub fn coassociativity_defect(word: &[usize]) -> Lin<(Word, Word, Word)> {
    let mut left: Lin<(Word, Word, Word)> = Lin::zero();
    for (a, b) in deconcatenate(word) {
        for (a1, a2) in deconcatenate(&a) {
            left.add_term((a1, a2, b.clone()), qi(1));
        }
    }
    let mut right: Lin<(Word, Word, Word)> = Lin::zero();
    for (a, b) in deconcatenate(word) {
        for (b1, b2) in deconcatenate(&b) {
            right.add_term((a.clone(), b1, b2), qi(1));
        }
    }
    Lin::diff(&left, &right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Scalar};

    /// Independent oracle: sign by bubble sort on the permuted word.
    fn bubble_sign(perm: &[usize], deg: &[i64]) -> i64 {
        let mut w: Vec<usize> = perm.to_vec();
        let mut s = 1;
        let n = w.len();
        for i in 0..n {
            for j in 0..n - 1 - i {
                if w[j] > w[j + 1] {
                    s *= swap_sign(deg[w[j]], deg[w[j + 1]]);
                    w.swap(j, j + 1);
                }
            }
        }
        s
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[1, 2], &[3, 5]).unwrap(), 1);
        assert_eq!(koszul_sign(&[2, 1], &[1, 1]).unwrap(), -1);
        // x2 x3 x1 from degrees (1,2,1): x1 passes x2 and x3, total 1*3 odd
        assert_eq!(koszul_sign(&[2, 3, 1], &[1, 2, 1]).unwrap(), -1);
        assert!(koszul_sign(&[1, 2], &[1]).is_err());
        assert!(koszul_sign(&[1, 1], &[1, 1]).is_err());
    }

    #[test]
    fn koszul_matches_bubble_oracle() {
        let deg = [1, 2, 1, 3, 0];
        for p in permutations(5) {
            assert_eq!(koszul_sign_0(&p, &deg), bubble_sign(&p, &deg));
        }
    }

    #[test]
    fn sym_project_examples() {
        let deg = [0, 2, 1, 1];
        assert_eq!(sym_project(&[0], &deg), Lin::basis(vec![0]));
        let even = sym_project(&[0, 1], &deg);
        assert_eq!(even.coeff(&vec![0, 1]), q(1, 2));
        assert_eq!(even.coeff(&vec![1, 0]), q(1, 2));
        let odd = sym_project(&[2, 3], &deg);
        assert_eq!(odd.coeff(&vec![2, 3]), q(1, 2));
        assert_eq!(odd.coeff(&vec![3, 2]), q(-1, 2));
        assert_eq!(sym_project(&[], &deg), Lin::basis(vec![]));
    }

    #[test]
    fn deconcatenate_examples() {
        assert_eq!(deconcatenate(&[]), vec![(vec![], vec![])]);
        assert_eq!(deconcatenate(&[7]), vec![(vec![], vec![7]), (vec![7], vec![])]);
        assert_eq!(
            deconcatenate(&[1, 2]),
            vec![(vec![], vec![1, 2]), (vec![1], vec![2]), (vec![1, 2], vec![])]
        );
    }

    #[test]
    fn coassociative_up_to_length_4() {
        for n in 0..=4 {
            let w: Vec<usize> = (0..n).collect();
            assert!(coassociativity_defect(&w).is_zero());
        }
    }

    #[test]
    fn bracket_examples() {
        let deg = [0, 1, 1, 2];
        let x = generator::<Scalar>(0);
        assert!(free_lie_bracket(&x, &x, &deg).is_zero());
        let y = generator::<Scalar>(1);
        let z = generator::<Scalar>(2);
        let b = free_lie_bracket(&y, &z, &deg);
        assert_eq!(b.coeff(&vec![1, 2]), qi(1));
        assert_eq!(b.coeff(&vec![2, 1]), qi(1));
    }

    #[test]
    fn jacobi_on_generators() {
        let deg = [0, 1, 1, 2, -1];
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    let r = jacobi_residual(&generator(a), &generator(b), &generator(c), &deg);
                    assert!(r.is_zero(), "jacobi fails on {a} {b} {c}");
                }
            }
        }
    }
}
