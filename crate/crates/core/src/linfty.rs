//! L-infinity algebras stored as coderivations of the symmetric coalgebra on
//! the suspension, together with Maurer-Cartan residuals, lower central
//! filtrations, tensor products with commutative dg algebras and
//! morphisms.
//!
//! Internally every structure map is `q_k : S^k(sg) -> sg` of degree +1 on
//! sorted words of basis indices, where the suspended degree of `x` is
//! `|x| - 1`. The bracket form is related by
//! `l_k(x_1..x_k) = (-1)^{sum_i (k-i)(|x_i|-1)} q_k(sx_1..sx_k)`.

use crate::error::{Error, Result};
use crate::graded::{is_odd, multisets, run_lengths, sym_mul, sym_normalize, unshuffles, GradedSpace, Word};
use crate::lin::Lin;
use crate::linalg::{rank, Matrix};
use crate::scalar::{factorial, qi, sign, Scalar};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt::Debug;

/// Arity cap `K` and weight cap `N` for truncated series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub arity: usize,
    pub weight: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { arity: 6, weight: 8 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LInftyAlgebra {
    pub space: GradedSpace,
    /// When set, basis weights form a filtration respected by every `q_k`.
    pub filtered: bool,
    q: BTreeMap<Word, Lin<usize>>,
}

/// Bracket-form sign `(-1)^{sum_i (k-i) sdeg(x_i)}` (1-based `i`).
pub fn decalage_sign(sdegs: &[i64]) -> i64 {
    let k = sdegs.len() as i64;
    sign(sdegs.iter().enumerate().map(|(i, d)| (k - 1 - i as i64) * d).sum())
}

impl LInftyAlgebra {
    pub fn abelian(space: GradedSpace) -> Self {
        LInftyAlgebra { space, filtered: false, q: BTreeMap::new() }
    }

    /// Builds from coderivation entries `q(sx_{i_1} ... sx_{i_k}) = value`;
    /// words may be in any order and are normalized with their Koszul sign.
    pub fn from_coderivation(space: GradedSpace, entries: Vec<(Word, Lin<usize>)>, filtered: bool) -> Result<Self> {
        let mut alg = LInftyAlgebra { space, filtered, q: BTreeMap::new() };
        for (w, v) in entries {
            alg.insert_q(&w, v)?;
        }
        alg.validate()?;
        Ok(alg)
    }

    /// Builds from bracket-form entries `l_k(x_{i_1}, ..., x_{i_k}) = value`.
    pub fn from_brackets(space: GradedSpace, entries: Vec<(Word, Lin<usize>)>, filtered: bool) -> Result<Self> {
        let sd: Vec<i64> = space.degrees().iter().map(|d| d - 1).collect();
        let conv = entries
            .into_iter()
            .map(|(w, v)| {
                let s = decalage_sign(&w.iter().map(|&i| sd[i]).collect::<Vec<_>>());
                let val = v.scale(&qi(s));
                (w, val)
            })
            .collect();
        Self::from_coderivation(space, conv, filtered)
    }

    fn insert_q(&mut self, w: &[usize], v: Lin<usize>) -> Result<()> {
        for &i in w {
            if i >= self.space.dim() {
                return Err(Error::Argument(format!("index {} outside basis", i)));
            }
        }
        if w.is_empty() {
            return Err(Error::Argument("structure maps start at arity 1".into()));
        }
        let sd = self.sdegs();
        let (sorted, s) = match sym_normalize(w, |i| sd[*i]) {
            Some(x) => x,
            None => {
                if v.is_zero() {
                    return Ok(());
                }
                return Err(Error::Structure(format!("value on a vanishing symmetric word {:?}", w)));
            }
        };
        let val = v.scale(&qi(s));
        if let Some(old) = self.q.get(&sorted) {
            if *old != val {
                return Err(Error::Structure(format!("inconsistent entries for word {:?}", sorted)));
            }
            return Ok(());
        }
        if !val.is_zero() {
            self.q.insert(sorted, val);
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let sd = self.sdegs();
        for (w, v) in &self.q {
            let din: i64 = w.iter().map(|&i| sd[i]).sum();
            for (o, _) in v.iter() {
                if sd[*o] != din + 1 {
                    return Err(Error::Structure(format!(
                        "structure map on {:?} is not of degree +1 (output {})",
                        w,
                        self.space.label(*o)
                    )));
                }
            }
        }
        if self.filtered {
            for i in 0..self.space.dim() {
                if self.space.weight(i) == 0 {
                    return Err(Error::Structure(format!(
                        "filtration weight of {} must be at least 1",
                        self.space.label(i)
                    )));
                }
            }
            for (w, v) in &self.q {
                let win: u32 = w.iter().map(|&i| self.space.weight(i)).sum();
                for (o, _) in v.iter() {
                    if self.space.weight(*o) < win {
                        return Err(Error::Structure(format!(
                            "structure map on {:?} lowers filtration weight",
                            w
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn sdeg(&self, i: usize) -> i64 {
        self.space.degree(i) - 1
    }

    pub fn sdegs(&self) -> Vec<i64> {
        self.space.degrees().iter().map(|d| d - 1).collect()
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.space.weight(i)
    }

    pub fn max_arity(&self) -> usize {
        self.q.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn table(&self) -> &BTreeMap<Word, Lin<usize>> {
        &self.q
    }

    /// `q` on a word in any order.
    pub fn q_word(&self, w: &[usize]) -> Lin<usize> {
        let sd = self.sdegs();
        match sym_normalize(w, |i| sd[*i]) {
            Some((sorted, s)) => match self.q.get(&sorted) {
                Some(v) => v.scale(&qi(s)),
                None => Lin::zero(),
            },
            None => Lin::zero(),
        }
    }

    /// Bracket form `l_k` on basis indices.
    pub fn bracket_basis(&self, xs: &[usize]) -> Lin<usize> {
        let sd: Vec<i64> = xs.iter().map(|&i| self.sdeg(i)).collect();
        self.q_word(xs).scale(&qi(decalage_sign(&sd)))
    }

    /// Bracket form `l_k` extended multilinearly to homogeneous elements.
    pub fn bracket(&self, xs: &[Lin<usize>]) -> Lin<usize> {
        let mut out = Lin::zero();
        fn rec(alg: &LInftyAlgebra, xs: &[Lin<usize>], cur: &mut Vec<usize>, c: Scalar, out: &mut Lin<usize>) {
            if cur.len() == xs.len() {
                out.add_scaled(&alg.bracket_basis(cur), &c);
                return;
            }
            for (i, ci) in xs[cur.len()].iter() {
                cur.push(*i);
                rec(alg, xs, cur, c.clone() * ci.clone(), out);
                cur.pop();
            }
        }
        rec(self, xs, &mut Vec::new(), qi(1), &mut out);
        out
    }

    /// Coderivation `Q` on sorted words of `S(sg)`.
    pub fn coderivation(&self, x: &Lin<Word>) -> Lin<Word> {
        let sd = self.sdegs();
        let mut out = Lin::zero();
        for (w, c) in x.iter() {
            for (a, b, s) in unshuffles(w, |i| sd[*i]) {
                if a.is_empty() {
                    continue;
                }
                let qa = match self.q.get(&a) {
                    Some(v) => v,
                    None => continue,
                };
                for (o, co) in qa.iter() {
                    if let Some((m, s2)) = sym_mul(&[*o], &b, |i| sd[*i]) {
                        out.add_term(m, c.clone() * co.clone() * qi(s * s2));
                    }
                }
            }
        }
        out
    }

    /// Nonvanishing sorted words of `S^k(sg)` for `1 <= k <= max_len`.
    pub fn symmetric_words(&self, max_len: usize) -> Vec<Word> {
        let sd = self.sdegs();
        let all: Vec<usize> = (0..self.dim()).collect();
        let mut out = Vec::new();
        for k in 1..=max_len {
            for w in multisets(&all, k) {
                if sym_normalize(&w, |i| sd[*i]).is_some() {
                    out.push(w);
                }
            }
        }
        out
    }

    /// First word (up to length `max_len`) on which `Q^2` does not vanish,
    /// with the value found there.
    pub fn jacobi_defect(&self, max_len: usize) -> Option<(Word, Lin<Word>)> {
        for w in self.symmetric_words(max_len) {
            let r = self.coderivation(&self.coderivation(&Lin::basis(w.clone())));
            if !r.is_zero() {
                return Some((w, r));
            }
        }
        None
    }

    pub fn check_jacobi(&self, max_len: usize) -> Result<()> {
        match self.jacobi_defect(max_len) {
            None => Ok(()),
            Some((w, r)) => {
                let labels: Vec<&str> = w.iter().map(|&i| self.space.label(i)).collect();
                Err(Error::Structure(format!(
                    "generalized Jacobi identity fails on word ({}): {} nonzero terms",
                    labels.join(" "),
                    r.len()
                )))
            }
        }
    }

    /// `sum_k (1/k!) l_k(alpha, ..., alpha)`, with multisets of total weight
    /// above `caps.weight` dropped when the algebra is filtered.
    pub fn mc_residual(&self, alpha: &Lin<usize>, caps: Caps) -> Result<Lin<usize>> {
        for (i, _) in alpha.iter() {
            if self.space.degree(*i) != 1 {
                return Err(Error::Argument(format!(
                    "Maurer-Cartan candidate has a component {} of degree {}",
                    self.space.label(*i),
                    self.space.degree(*i)
                )));
            }
        }
        if !self.filtered && self.max_arity() > caps.arity {
            return Err(Error::Config(format!(
                "structure maps of arity {} exceed the cap {} and no filtration is declared",
                self.max_arity(),
                caps.arity
            )));
        }
        Ok(self.exponential_image(alpha, caps, |w| self.q_word(w)))
    }

    /// `sum_M prod c^m / prod m! f(M)` over multisets `M` from the support of
    /// `alpha` (all of suspended degree 0).
    pub(crate) fn exponential_image(&self, alpha: &Lin<usize>, caps: Caps, f: impl Fn(&[usize]) -> Lin<usize>) -> Lin<usize> {
        let support: Vec<usize> = alpha.keys().copied().collect();
        let mut out = Lin::zero();
        for k in 1..=caps.arity {
            for m in multisets(&support, k) {
                let w: u32 = m.iter().map(|&i| self.weight(i)).sum();
                if self.filtered && w > caps.weight {
                    continue;
                }
                let mut c = qi(1);
                for &i in &m {
                    c *= alpha.coeff(&i);
                }
                for r in run_lengths(&m) {
                    c /= factorial(r);
                }
                let v = f(&m);
                out.add_scaled(&v, &c);
            }
        }
        if self.filtered {
            out = out.filter(|i| self.weight(*i) <= caps.weight);
        }
        out
    }

    /// Lower central filtration weights computed to `depth`; `u32::MAX`
    /// marks basis vectors still inside `F_{depth+1}`.
    pub fn lower_central_weights(&self, depth: u32) -> Vec<u32> {
        let n = self.dim();
        let unit = |i: usize| -> Vec<Scalar> {
            let mut v = vec![Scalar::zero(); n];
            v[i] = qi(1);
            v
        };
        let mut levels: Vec<Vec<Vec<Scalar>>> = vec![Vec::new(), (0..n).map(unit).collect()];
        let maxk = self.max_arity().max(1);
        for k in 2..=(depth as usize + 1) {
            let mut span: Vec<Vec<Scalar>> = Vec::new();
            for j in 2..=maxk.min(k) {
                for parts in compositions(k, j) {
                    let mut choice = Vec::new();
                    self.expand_brackets(&levels, &parts, &mut choice, &mut span);
                }
            }
            // closure under the differential
            let mut frontier = span.clone();
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for v in &frontier {
                    let img = self.apply_q1(v);
                    if img.iter().any(|x| !x.is_zero()) && !in_span(&span, &img) {
                        span.push(img.clone());
                        next.push(img);
                    }
                }
                frontier = next;
            }
            levels.push(reduce_span(span, n));
        }
        (0..n)
            .map(|i| {
                let e = unit(i);
                let mut w = 1;
                for k in 2..=(depth as usize + 1) {
                    if in_span(&levels[k], &e) {
                        w = if k == depth as usize + 1 { u32::MAX } else { k as u32 };
                    } else {
                        break;
                    }
                }
                w
            })
            .collect()
    }

    fn apply_q1(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.dim()];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, co) in self.q_word(&[i]).iter() {
                out[*o] += c.clone() * co.clone();
            }
        }
        out
    }

    fn expand_brackets(&self, levels: &[Vec<Vec<Scalar>>], parts: &[usize], choice: &mut Vec<Vec<Scalar>>, out: &mut Vec<Vec<Scalar>>) {
        if choice.len() == parts.len() {
            let xs: Vec<Lin<usize>> = choice
                .iter()
                .map(|v| v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect())
                .collect();
            let r = self.bracket(&xs);
            if !r.is_zero() {
                let mut v = vec![Scalar::zero(); self.dim()];
                for (i, c) in r.iter() {
                    v[*i] = c.clone();
                }
                if !in_span(out, &v) {
                    out.push(v);
                }
            }
            return;
        }
        let l = parts[choice.len()];
        for v in &levels[l] {
            choice.push(v.clone());
            self.expand_brackets(levels, parts, choice, out);
            choice.pop();
        }
    }

    /// Copy with basis weights replaced and the filtration flag set.
    pub fn with_weights(&self, weights: &[u32]) -> Result<Self> {
        let mut space = self.space.clone();
        for (b, w) in space.basis.iter_mut().zip(weights) {
            b.weight = *w;
        }
        let alg = LInftyAlgebra { space, filtered: true, q: self.q.clone() };
        alg.validate()?;
        Ok(alg)
    }

    /// Smallest weights with `weight(q_k output) >= sum of input weights`,
    /// or `None` when the structure maps are not nilpotent.
    pub fn filtration_weights(&self) -> Option<Vec<u32>> {
        let n = self.dim();
        let mut w = vec![1u32; n];
        for _ in 0..=n {
            let mut changed = false;
            for (word, v) in &self.q {
                let total: u32 = word.iter().map(|&i| w[i]).sum();
                for (z, _) in v.iter() {
                    if w[*z] < total {
                        w[*z] = total;
                        changed = true;
                    }
                }
            }
            if !changed {
                return Some(w);
            }
        }
        None
    }

    /// Replaces one structure constant; used for negative controls.
    pub fn with_entry(&self, w: &[usize], v: Lin<usize>) -> Self {
        let mut alg = self.clone();
        let sd = self.sdegs();
        if let Some((sorted, s)) = sym_normalize(w, |i| sd[*i]) {
            let val = v.scale(&qi(s));
            if val.is_zero() {
                alg.q.remove(&sorted);
            } else {
                alg.q.insert(sorted, val);
            }
        }
        alg
    }
}

/// Anything presented by structure maps on a symmetric coalgebra of
/// suspended keys. Used generically by the Chevalley-Eilenberg functor.
pub trait SymmetricStructure {
    type Key: Ord + Clone + Debug;
    /// Degree of the suspended key.
    fn sdeg(&self, k: &Self::Key) -> i64;
    fn key_weight(&self, k: &Self::Key) -> u32;
    /// `q` on a word of keys in any order.
    fn q_on(&self, word: &[Self::Key]) -> Lin<Self::Key>;

    fn normalize_word(&self, w: &[Self::Key]) -> Option<(Vec<Self::Key>, i64)> {
        sym_normalize(w, |k| self.sdeg(k))
    }

    /// `Q(w) = sum_{I nonempty} eps(I,J) q(w_I) w_J`.
    fn coderivation_on(&self, x: &Lin<Vec<Self::Key>>) -> Lin<Vec<Self::Key>> {
        let mut out = Lin::zero();
        for (w, c) in x.iter() {
            for (a, b, s) in unshuffles(w, |k| self.sdeg(k)) {
                if a.is_empty() {
                    continue;
                }
                let qa = self.q_on(&a);
                for (o, co) in qa.iter() {
                    if let Some((m, s2)) = sym_mul(std::slice::from_ref(o), &b, |k| self.sdeg(k)) {
                        out.add_term(m, c.clone() * co.clone() * qi(s * s2));
                    }
                }
            }
        }
        out
    }
}

impl SymmetricStructure for LInftyAlgebra {
    type Key = usize;
    fn sdeg(&self, k: &usize) -> i64 {
        self.space.degree(*k) - 1
    }
    fn key_weight(&self, k: &usize) -> u32 {
        self.space.weight(*k)
    }
    fn q_on(&self, word: &[usize]) -> Lin<usize> {
        self.q_word(word)
    }
    fn coderivation_on(&self, x: &Lin<Word>) -> Lin<Word> {
        self.coderivation(x)
    }
}

/// `g (x) A` for an arbitrary coefficient algebra, keyed by pairs.
pub struct TensorStructure<'a, A: Cdga> {
    pub g: &'a LInftyAlgebra,
    pub a: &'a A,
}

impl<'a, A: Cdga> SymmetricStructure for TensorStructure<'a, A> {
    type Key = (usize, A::Key);
    fn sdeg(&self, k: &Self::Key) -> i64 {
        self.g.sdeg(k.0) + self.a.degree(&k.1)
    }
    fn key_weight(&self, k: &Self::Key) -> u32 {
        self.g.weight(k.0)
    }
    fn q_on(&self, word: &[Self::Key]) -> Lin<Self::Key> {
        tensor_q(self.g, self.a, word)
    }
}

/// Ordered compositions of `k` into `j` positive parts.
pub fn compositions(k: usize, j: usize) -> Vec<Vec<usize>> {
    if j == 0 {
        return if k == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=k.saturating_sub(j - 1) {
        for mut rest in compositions(k - first, j - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn in_span(rows: &[Vec<Scalar>], v: &[Scalar]) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return true;
    }
    let mut m: Matrix = rows.to_vec();
    let r0 = rank(&m);
    m.push(v.to_vec());
    rank(&m) == r0
}

fn reduce_span(rows: Vec<Vec<Scalar>>, n: usize) -> Vec<Vec<Scalar>> {
    let mut m: Matrix = rows;
    if m.is_empty() {
        return m;
    }
    let piv = crate::linalg::rref(&mut m);
    m.truncate(piv.len());
    m.retain(|r| r.len() == n);
    m
}

/// Commutative dg algebra interface used for coefficients.
pub trait Cdga {
    type Key: Ord + Clone + Debug;
    fn degree(&self, a: &Self::Key) -> i64;
    fn mul(&self, a: &Self::Key, b: &Self::Key) -> Lin<Self::Key>;
    fn d(&self, a: &Self::Key) -> Lin<Self::Key>;
    fn unit(&self) -> Self::Key;

    fn mul_lin(&self, a: &Lin<Self::Key>, b: &Lin<Self::Key>) -> Lin<Self::Key> {
        let mut out = Lin::zero();
        for (x, cx) in a.iter() {
            for (y, cy) in b.iter() {
                out.add_scaled(&self.mul(x, y), &(cx.clone() * cy.clone()));
            }
        }
        out
    }

    fn d_lin(&self, a: &Lin<Self::Key>) -> Lin<Self::Key> {
        a.apply(|k| self.d(k))
    }
}

/// Finite-dimensional commutative dg algebra given by tables.
#[derive(Clone, Debug, PartialEq)]
pub struct CdgaPresentation {
    pub space: GradedSpace,
    pub unit: usize,
    product: BTreeMap<(usize, usize), Lin<usize>>,
    differential: BTreeMap<usize, Lin<usize>>,
}

impl CdgaPresentation {
    /// Products may be given for one order only; the other is filled in by
    /// graded commutativity. Products with the unit are implicit.
    pub fn new(
        space: GradedSpace,
        unit: usize,
        products: Vec<((usize, usize), Lin<usize>)>,
        differential: Vec<(usize, Lin<usize>)>,
    ) -> Result<Self> {
        let mut product = BTreeMap::new();
        for ((i, j), v) in products {
            let s = if is_odd(space.degree(i)) && is_odd(space.degree(j)) { -1 } else { 1 };
            product.insert((i, j), v.clone());
            product.entry((j, i)).or_insert_with(|| v.scale(&qi(s)));
        }
        let a = CdgaPresentation {
            space,
            unit,
            product,
            differential: differential.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        };
        a.check()?;
        Ok(a)
    }

    /// The ground field.
    pub fn ground() -> Self {
        CdgaPresentation::new(GradedSpace::from_degrees("k", &[("1", 0)]), 0, vec![], vec![]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Verifies graded commutativity, associativity, Leibniz and `d^2 = 0`.
    pub fn check(&self) -> Result<()> {
        let n = self.dim();
        let deg = |i: usize| self.space.degree(i);
        for ((i, j), v) in &self.product {
            for (o, _) in v.iter() {
                if deg(*o) != deg(*i) + deg(*j) {
                    return Err(Error::Structure(format!("product {} {} has wrong degree", i, j)));
                }
            }
        }
        for (i, v) in &self.differential {
            for (o, _) in v.iter() {
                if deg(*o) != deg(*i) + 1 {
                    return Err(Error::Structure(format!("differential of {} has wrong degree", i)));
                }
            }
        }
        if !self.d(&self.unit).is_zero() {
            return Err(Error::Structure("unit is not closed".into()));
        }
        for i in 0..n {
            if !self.d_lin(&self.d(&i)).is_zero() {
                return Err(Error::Structure(format!("d^2 != 0 on {}", self.space.label(i))));
            }
            for j in 0..n {
                let ab = self.mul(&i, &j);
                let ba = self.mul(&j, &i).scale(&qi(sign(deg(i) * deg(j))));
                if ab != ba {
                    return Err(Error::Structure(format!("not graded commutative on ({}, {})", i, j)));
                }
                let lhs = self.d_lin(&ab);
                let mut rhs = self.mul_lin(&self.d(&i), &Lin::basis(j));
                rhs.add_scaled(&self.mul_lin(&Lin::basis(i), &self.d(&j)), &qi(sign(deg(i))));
                if lhs != rhs {
                    return Err(Error::Structure(format!("Leibniz fails on ({}, {})", i, j)));
                }
                for k in 0..n {
                    let l = self.mul_lin(&ab, &Lin::basis(k));
                    let r = self.mul_lin(&Lin::basis(i), &self.mul(&j, &k));
                    if l != r {
                        return Err(Error::Structure(format!("not associative on ({}, {}, {})", i, j, k)));
                    }
                }
            }
        }
        Ok(())
    }
}

impl Cdga for CdgaPresentation {
    type Key = usize;
    fn degree(&self, a: &usize) -> i64 {
        self.space.degree(*a)
    }
    fn mul(&self, a: &usize, b: &usize) -> Lin<usize> {
        if *a == self.unit {
            return Lin::basis(*b);
        }
        if *b == self.unit {
            return Lin::basis(*a);
        }
        self.product.get(&(*a, *b)).cloned().unwrap_or_default()
    }
    fn d(&self, a: &usize) -> Lin<usize> {
        self.differential.get(a).cloned().unwrap_or_default()
    }
    fn unit(&self) -> usize {
        self.unit
    }
}

/// Polynomial differential forms on `R^dim` with rational coefficients;
/// keys are `(exponents, increasing dx indices)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyForms {
    pub dim: usize,
}

pub type PolyFormKey = (Vec<u32>, Vec<usize>);

impl Cdga for PolyForms {
    type Key = PolyFormKey;
    fn degree(&self, a: &PolyFormKey) -> i64 {
        a.1.len() as i64
    }
    fn mul(&self, a: &PolyFormKey, b: &PolyFormKey) -> Lin<PolyFormKey> {
        let s = crate::forms::merge_sign(&a.1, &b.1);
        if s == 0 {
            return Lin::zero();
        }
        let e: Vec<u32> = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
        let mut idx: Vec<usize> = a.1.iter().chain(&b.1).copied().collect();
        idx.sort();
        Lin::term((e, idx), qi(s))
    }
    fn d(&self, a: &PolyFormKey) -> Lin<PolyFormKey> {
        let mut out = Lin::zero();
        for i in 0..self.dim {
            if a.0[i] == 0 {
                continue;
            }
            let s = crate::forms::merge_sign(&[i], &a.1);
            if s == 0 {
                continue;
            }
            let mut e = a.0.clone();
            e[i] -= 1;
            let mut idx = a.1.clone();
            idx.push(i);
            idx.sort();
            out.add_term((e, idx), qi(s * a.0[i] as i64));
        }
        out
    }
    fn unit(&self) -> PolyFormKey {
        (vec![0; self.dim], vec![])
    }
}

impl PolyForms {
    pub fn from_form(&self, f: &crate::forms::CoordinateForm) -> Option<Lin<PolyFormKey>> {
        match &f.data {
            crate::forms::FormData::Poly(m) => {
                let mut out = Lin::zero();
                for (idx, p) in m {
                    for (e, c) in &p.terms {
                        out.add_term((e.clone(), idx.clone()), c.clone());
                    }
                }
                Some(out)
            }
            _ => None,
        }
    }

    pub fn to_form(&self, x: &Lin<PolyFormKey>, degree: usize) -> crate::forms::CoordinateForm {
        let terms = x
            .iter()
            .map(|((e, idx), c)| (idx.clone(), crate::poly::Poly::monomial(e.clone(), c.clone())))
            .collect();
        crate::forms::CoordinateForm::poly(self.dim, degree, terms)
    }
}

/// Structure map of `g (x) A` on a word of `(basis index, coefficient key)`
/// pairs: the suspended form of
/// `[x (x) a] = [x] (x) a + (-1)^{|x|+1} x (x) da` and
/// `q(s x_1 (x) a_1, ...) = (-1)^{sum_{i<j} |a_i|(|x_j|+1)} q(sx_1..sx_k) (x) a_1...a_k`.
pub fn tensor_q<A: Cdga>(g: &LInftyAlgebra, a: &A, word: &[(usize, A::Key)]) -> Lin<(usize, A::Key)> {
    let mut out = Lin::zero();
    let xs: Vec<usize> = word.iter().map(|p| p.0).collect();
    let mut e = 0;
    for i in 0..word.len() {
        for j in i + 1..word.len() {
            e += a.degree(&word[i].1) * g.sdeg(word[j].0);
        }
    }
    let qx = g.q_word(&xs);
    if !qx.is_zero() {
        let mut prod = Lin::basis(a.unit());
        for (_, k) in word {
            prod = a.mul_lin(&prod, &Lin::basis(k.clone()));
        }
        for (x, cx) in qx.iter() {
            for (k, ck) in prod.iter() {
                out.add_term((*x, k.clone()), cx.clone() * ck.clone() * qi(sign(e)));
            }
        }
    }
    if word.len() == 1 {
        let (x, k) = &word[0];
        let s = qi(sign(g.sdeg(*x)));
        for (k2, c) in a.d(k).iter() {
            out.add_term((*x, k2.clone()), c.clone() * s.clone());
        }
    }
    out
}

/// Degree of `x (x) a`.
pub fn tensor_degree<A: Cdga>(g: &LInftyAlgebra, a: &A, key: &(usize, A::Key)) -> i64 {
    g.space.degree(key.0) + a.degree(&key.1)
}

/// `sum_M prod c^m / prod m! q(M)` for a degree-1 element of `g (x) A`,
/// truncated by the weight of the `g` factors.
pub fn tensor_mc_residual<A: Cdga>(
    g: &LInftyAlgebra,
    a: &A,
    alpha: &Lin<(usize, A::Key)>,
    caps: Caps,
) -> Result<Lin<(usize, A::Key)>> {
    for (k, _) in alpha.iter() {
        if tensor_degree(g, a, k) != 1 {
            return Err(Error::Argument("Maurer-Cartan candidate is not of degree 1".into()));
        }
    }
    let support: Vec<(usize, A::Key)> = alpha.keys().cloned().collect();
    let idx: Vec<usize> = (0..support.len()).collect();
    let mut out = Lin::zero();
    let top = caps.arity.max(1);
    for k in 1..=top {
        for m in multisets(&idx, k) {
            let w: u32 = m.iter().map(|&i| g.weight(support[i].0)).sum();
            if g.filtered && w > caps.weight {
                continue;
            }
            let mut c = qi(1);
            for &i in &m {
                c *= alpha.coeff(&support[i]);
            }
            for r in run_lengths(&m) {
                c /= factorial(r);
            }
            let word: Vec<(usize, A::Key)> = m.iter().map(|&i| support[i].clone()).collect();
            out.add_scaled(&tensor_q(g, a, &word), &c);
        }
    }
    if g.filtered {
        out = out.filter(|k| g.weight(k.0) <= caps.weight);
    }
    Ok(out)
}

/// The L-infinity algebra `g (x) A` for a finite presentation of `A`.
/// Basis index of `x_i (x) a_j` is `i * dim(A) + j`.
pub fn tensor_with_cdga(g: &LInftyAlgebra, a: &CdgaPresentation) -> Result<LInftyAlgebra> {
    let na = a.dim();
    let mut elems = Vec::new();
    for i in 0..g.dim() {
        for j in 0..na {
            let label = if j == a.unit {
                g.space.label(i).to_string()
            } else {
                format!("{}*{}", g.space.label(i), a.space.label(j))
            };
            elems.push((label, g.space.degree(i) + a.space.degree(j), g.weight(i)));
        }
    }
    let space = GradedSpace::new(&format!("{}*{}", g.space.name, a.space.name), elems)?;
    let sd: Vec<i64> = space.degrees().iter().map(|d| d - 1).collect();
    let all: Vec<usize> = (0..space.dim()).collect();
    let mut entries = Vec::new();
    for k in 1..=g.max_arity().max(1) {
        for w in multisets(&all, k) {
            if sym_normalize(&w, |i| sd[*i]).is_none() {
                continue;
            }
            let word: Vec<(usize, usize)> = w.iter().map(|&t| (t / na, t % na)).collect();
            let v = tensor_q(g, a, &word);
            if !v.is_zero() {
                entries.push((w, v.map_keys(|(x, y)| x * na + y)));
            }
        }
    }
    LInftyAlgebra::from_coderivation(space, entries, g.filtered)
}

/// L-infinity morphism given by components `phi_k : S^k(sg) -> sh` of
/// degree 0 on sorted words.
#[derive(Clone, Debug)]
pub struct LInftyMorphism {
    pub source: LInftyAlgebra,
    pub target: LInftyAlgebra,
    pub filtered: bool,
    comps: BTreeMap<Word, Lin<usize>>,
}

impl LInftyMorphism {
    pub fn new(source: LInftyAlgebra, target: LInftyAlgebra, entries: Vec<(Word, Lin<usize>)>, filtered: bool) -> Result<Self> {
        let sd = source.sdegs();
        let td = target.sdegs();
        let mut comps = BTreeMap::new();
        for (w, v) in entries {
            let (sorted, s) = match sym_normalize(&w, |i| sd[*i]) {
                Some(x) => x,
                None => continue,
            };
            let din: i64 = sorted.iter().map(|&i| sd[i]).sum();
            for (o, _) in v.iter() {
                if td[*o] != din {
                    return Err(Error::Structure(format!("component on {:?} is not of degree 0", w)));
                }
                if filtered {
                    let win: u32 = sorted.iter().map(|&i| source.weight(i)).sum();
                    if target.weight(*o) < win {
                        return Err(Error::Structure(format!("component on {:?} lowers weight", w)));
                    }
                }
            }
            let val = v.scale(&qi(s));
            if !val.is_zero() {
                comps.insert(sorted, val);
            }
        }
        Ok(LInftyMorphism { source, target, filtered, comps })
    }

    pub fn identity(g: &LInftyAlgebra) -> Self {
        let entries = (0..g.dim()).map(|i| (vec![i], Lin::basis(i))).collect();
        Self::new(g.clone(), g.clone(), entries, g.filtered).unwrap()
    }

    pub fn is_strict(&self) -> bool {
        self.comps.keys().all(|w| w.len() == 1)
    }

    pub fn component(&self, w: &[usize]) -> Lin<usize> {
        let sd = self.source.sdegs();
        match sym_normalize(w, |i| sd[*i]) {
            Some((sorted, s)) => self.comps.get(&sorted).map(|v| v.scale(&qi(s))).unwrap_or_default(),
            None => Lin::zero(),
        }
    }

    /// Induced coalgebra map `S(sg) -> S(sh)` on a sorted word.
    pub fn coalgebra_map(&self, w: &[usize]) -> Lin<Word> {
        if w.is_empty() {
            return Lin::basis(vec![]);
        }
        let sd = self.source.sdegs();
        let td = self.target.sdegs();
        let mut out = Lin::zero();
        for (a, b, s) in unshuffles(&w[1..], |i| sd[*i]) {
            let mut block = vec![w[0]];
            block.extend_from_slice(&a);
            let head = self.component(&block);
            if head.is_zero() {
                continue;
            }
            let tail = self.coalgebra_map(&b);
            for (h, ch) in head.iter() {
                for (t, ct) in tail.iter() {
                    if let Some((m, s2)) = sym_mul(&[*h], t, |i| td[*i]) {
                        out.add_term(m, ch.clone() * ct.clone() * qi(s * s2));
                    }
                }
            }
        }
        out
    }

    /// First source word on which `Q_h F - F Q_g` does not vanish.
    pub fn equation_defect(&self, max_len: usize) -> Option<(Word, Lin<Word>)> {
        for w in self.source.symmetric_words(max_len) {
            let fw = self.coalgebra_map(&w);
            let lhs = self.target.coderivation(&fw);
            let qw = self.source.coderivation(&Lin::basis(w.clone()));
            let rhs = qw.apply(|v| self.coalgebra_map(v));
            let r = Lin::diff(&lhs, &rhs);
            if !r.is_zero() {
                return Some((w, r));
            }
        }
        None
    }

    /// `phi_*(alpha) = sum_k (1/k!) phi_k(alpha, ..., alpha)`.
    pub fn pushforward_mc(&self, alpha: &Lin<usize>, caps: Caps) -> Result<Lin<usize>> {
        let r = self.source.mc_residual(alpha, caps)?;
        if !r.is_zero() {
            return Err(Error::Argument("pushforward requires a Maurer-Cartan element".into()));
        }
        let top = self.comps.keys().map(|w| w.len()).max().unwrap_or(0);
        if !self.filtered && top > caps.arity {
            return Err(Error::Config("non-filtered morphism with components above the arity cap".into()));
        }
        let mut out = self.source.exponential_image(alpha, caps, |w| self.component(w));
        if self.filtered {
            out = out.filter(|i| self.target.weight(*i) <= caps.weight);
        }
        Ok(out)
    }

    /// Composition of strict morphisms.
    pub fn compose_strict(&self, after: &LInftyMorphism) -> Result<LInftyMorphism> {
        if !self.is_strict() || !after.is_strict() {
            return Err(Error::Capability("only strict morphisms compose here".into()));
        }
        let entries = (0..self.source.dim())
            .map(|i| (vec![i], self.component(&[i]).apply(|j| after.component(&[*j]))))
            .collect();
        LInftyMorphism::new(
            self.source.clone(),
            after.target.clone(),
            entries,
            self.filtered && after.filtered,
        )
    }
}

/// Sullivan model: free graded-commutative algebra on `generators` with a
/// differential given by polynomial words.
#[derive(Clone, Debug)]
pub struct SullivanModel {
    pub generators: GradedSpace,
    pub differential: BTreeMap<usize, Lin<Word>>,
    pub simply_connected: bool,
    /// Optional image of each generator as a form on a chart.
    pub realization: Option<Vec<crate::forms::CoordinateForm>>,
}

impl SullivanModel {
    pub fn new(generators: GradedSpace, differential: Vec<(usize, Lin<Word>)>, simply_connected: bool) -> Result<Self> {
        let deg = generators.degrees();
        let mut map = BTreeMap::new();
        for (v, dv) in differential {
            let mut norm = Lin::zero();
            for (w, c) in dv.iter() {
                if w.is_empty() {
                    return Err(Error::Structure("differential has a constant term".into()));
                }
                let wd: i64 = w.iter().map(|&i| deg[i]).sum();
                if wd != deg[v] + 1 {
                    return Err(Error::Structure(format!(
                        "d({}) contains a word of degree {}",
                        generators.label(v),
                        wd
                    )));
                }
                if let Some((s, sg)) = sym_normalize(w, |i| deg[*i]) {
                    norm.add_term(s, c.clone() * qi(sg));
                }
            }
            if !norm.is_zero() {
                map.insert(v, norm);
            }
        }
        if simply_connected && deg.iter().any(|&d| d < 2) {
            return Err(Error::Structure("simply connected model with a generator of degree < 2".into()));
        }
        let m = SullivanModel { generators, differential: map, simply_connected, realization: None };
        for v in 0..m.generators.dim() {
            let dd = m.d(&m.d(&Lin::basis(vec![v])));
            if !dd.is_zero() {
                return Err(Error::Structure(format!("d^2 != 0 on {}", m.generators.label(v))));
            }
        }
        Ok(m)
    }

    pub fn with_realization(mut self, forms: Vec<crate::forms::CoordinateForm>) -> Result<Self> {
        if forms.len() != self.generators.dim() {
            return Err(Error::Argument("one form per generator required".into()));
        }
        for (i, f) in forms.iter().enumerate() {
            if f.degree as i64 != self.generators.degree(i) {
                return Err(Error::Argument(format!("form for {} has the wrong degree", self.generators.label(i))));
            }
        }
        self.realization = Some(forms);
        Ok(self)
    }

    /// Derivation extension of the differential to polynomial words.
    pub fn d(&self, x: &Lin<Word>) -> Lin<Word> {
        let deg = self.generators.degrees();
        let mut out = Lin::zero();
        for (w, c) in x.iter() {
            let mut e = 0;
            for (pos, &v) in w.iter().enumerate() {
                if let Some(dv) = self.differential.get(&v) {
                    for (m, cm) in dv.iter() {
                        let mut nw = w[..pos].to_vec();
                        nw.extend_from_slice(m);
                        nw.extend_from_slice(&w[pos + 1..]);
                        if let Some((s, sg)) = sym_normalize(&nw, |i| deg[*i]) {
                            out.add_term(s, c.clone() * cm.clone() * qi(sign(e) * sg));
                        }
                    }
                }
                e += deg[v];
            }
        }
        out
    }

    /// Dual L-infinity algebra: `x_v` of degree `1 - |v|`, with
    /// `q_n(sx_{v_1}...sx_{v_n}) = sum_v (-1)^{o(o+1)/2} (prod of multiplicities!) c(v, M) sx_v`
    /// for `dv = sum_M c(v, M) v^M`, where `o` counts odd letters of `M`.
    /// The sign makes `sum_v x_v (x) phi(v)` flat for every dga map `phi`.
    /// Without simple connectivity the weights are the smallest filtration
    /// compatible with the structure maps, when one exists.
    pub fn to_linfty(&self) -> Result<LInftyAlgebra> {
        let elems = self
            .generators
            .basis
            .iter()
            .map(|b| {
                let w = if self.simply_connected { (b.degree - 1).max(1) as u32 } else { 1 };
                (format!("{}^", b.label), 1 - b.degree, w)
            })
            .collect();
        let space = GradedSpace::new(&format!("{}^", self.generators.name), elems)?;
        let mut table: BTreeMap<Word, Lin<usize>> = BTreeMap::new();
        for (v, dv) in &self.differential {
            for (m, c) in dv.iter() {
                let mut f = Scalar::one();
                for r in run_lengths(m) {
                    f *= factorial(r);
                }
                let odd = m.iter().filter(|&&i| is_odd(self.generators.degree(i))).count() as i64;
                f *= qi(sign(odd * (odd + 1) / 2));
                table.entry(m.clone()).or_default().add_term(*v, c.clone() * f);
            }
        }
        let alg = LInftyAlgebra::from_coderivation(space, table.into_iter().collect(), self.simply_connected)?;
        if self.simply_connected {
            return Ok(alg);
        }
        match alg.filtration_weights() {
            Some(w) => alg.with_weights(&w),
            None => Ok(alg),
        }
    }

    /// The connection `sum_v x_v (x) phi(v)` when a realization is present.
    pub fn connection_terms(&self) -> Option<Vec<(usize, crate::forms::CoordinateForm)>> {
        self.realization.as_ref().map(|fs| fs.iter().cloned().enumerate().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    pub(crate) fn upper_triangular() -> LInftyAlgebra {
        let space = GradedSpace::new(
            "n3",
            vec![("e12".into(), 0, 1), ("e23".into(), 0, 1), ("e13".into(), 0, 2)],
        )
        .unwrap();
        LInftyAlgebra::from_brackets(space, vec![(vec![0, 1], Lin::basis(2))], true).unwrap()
    }

    #[test]
    fn bracket_round_trip_and_antisymmetry() {
        let g = upper_triangular();
        assert_eq!(g.bracket_basis(&[0, 1]), Lin::basis(2));
        assert_eq!(g.bracket_basis(&[1, 0]), Lin::basis(2).neg());
        assert!(g.check_jacobi(4).is_ok());
    }

    #[test]
    fn two_dim_lie_ce_differential() {
        let space = GradedSpace::from_degrees("aff", &[("e", 0), ("f", 0)]);
        let g = LInftyAlgebra::from_brackets(space, vec![(vec![0, 1], Lin::basis(1))], false).unwrap();
        // Q(se sf) = q2(se, sf) = (-1)^{sdeg e} l2(e, f) = -sf
        let r = g.coderivation(&Lin::basis(vec![0, 1]));
        assert_eq!(r, Lin::term(vec![1], qi(-1)));
        assert!(g.check_jacobi(3).is_ok());
    }

    #[test]
    fn lower_central() {
        let g = upper_triangular();
        assert_eq!(g.lower_central_weights(3), vec![1, 1, 2]);
        let ab = LInftyAlgebra::abelian(GradedSpace::from_degrees("a", &[("x", 0), ("y", 0)]));
        assert_eq!(ab.lower_central_weights(3), vec![1, 1]);
    }

    #[test]
    fn sullivan_sphere() {
        let v = GradedSpace::from_degrees("S2", &[("e2", 2), ("e3", 3)]);
        let m = SullivanModel::new(v, vec![(1, Lin::basis(vec![0, 0]))], true).unwrap();
        let g = m.to_linfty().unwrap();
        assert_eq!(g.space.degrees(), vec![-1, -2]);
        assert_eq!(g.q_word(&[0, 0]), Lin::term(1, qi(2)));
        assert_eq!(g.bracket_basis(&[0, 0]), Lin::term(1, qi(2)));
        assert!(g.check_jacobi(4).is_ok());
    }

    #[test]
    fn tensor_unit_keeps_brackets() {
        let g = upper_triangular();
        let t = tensor_with_cdga(&g, &CdgaPresentation::ground()).unwrap();
        assert_eq!(t.table(), g.table());
    }

    #[test]
    fn tensor_linear_sign() {
        // x of degree 0, a of degree 0 with da = b: [x (x) a] = -x (x) b
        let g = LInftyAlgebra::abelian(GradedSpace::from_degrees("g", &[("x", 0)]));
        let a = CdgaPresentation::new(
            GradedSpace::from_degrees("A", &[("1", 0), ("a", 0), ("b", 1)]),
            0,
            vec![((1, 1), Lin::zero()), ((1, 2), Lin::zero()), ((2, 2), Lin::zero())],
            vec![(1, Lin::basis(2))],
        )
        .unwrap();
        let t = tensor_with_cdga(&g, &a).unwrap();
        assert_eq!(t.bracket_basis(&[1]), Lin::term(2, qi(-1)));
    }

    #[test]
    fn mc_residual_scales() {
        let g = upper_triangular();
        let alpha = Lin::term(0, q(1, 2));
        let space = GradedSpace::from_degrees("h", &[("a", 1), ("b", 1), ("c", 2)]);
        let h = LInftyAlgebra::from_brackets(space, vec![(vec![0, 1], Lin::basis(2))], false).unwrap();
        assert!(g.mc_residual(&alpha, Caps::default()).is_err());
        let r = h.mc_residual(&Lin::sum(&Lin::basis(0), &Lin::basis(1)), Caps::default()).unwrap();
        // (1/2)(l2(a,b) + l2(b,a)) with odd a, b: l2 symmetric so the value is c
        assert_eq!(r, Lin::basis(2));
    }
}
