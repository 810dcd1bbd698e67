//! Differential forms on a single coordinate chart, either with exact
//! polynomial coefficients or given by a pointwise evaluation callback.

use crate::poly::Poly;
use crate::scalar::{qi, to_f64, Scalar};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Dense component values in the order of [`subsets`].
pub type ComponentFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub enum FormData {
    Poly(BTreeMap<Vec<usize>, Poly>),
    Func { eval: ComponentFn, closed: bool },
}

#[derive(Clone)]
pub struct CoordinateForm {
    pub dim: usize,
    pub degree: usize,
    pub data: FormData,
}

impl fmt::Debug for CoordinateForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.data {
            FormData::Poly(t) => write!(f, "Form(dim {}, deg {}, {:?})", self.dim, self.degree, t),
            FormData::Func { closed, .. } => {
                write!(f, "Form(dim {}, deg {}, callback, closed={})", self.dim, self.degree, closed)
            }
        }
    }
}

/// Increasing `p`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, p, &mut Vec::new(), &mut out);
    out
}

/// Sign of the shuffle sorting the concatenation `a ++ b` of disjoint
/// increasing index lists, or 0 if they overlap.
pub fn merge_sign(a: &[usize], b: &[usize]) -> i64 {
    let mut inv = 0;
    for x in a {
        for y in b {
            if x == y {
                return 0;
            }
            if x > y {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

fn merged(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort();
    v
}

/// Determinant of a small dense matrix (f64).
pub fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 1.0;
    }
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for j in c..n {
                a[i][j] -= f * a[c][j];
            }
        }
    }
    d
}

pub fn det_exact(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    if n == 0 {
        return qi(1);
    }
    let mut total = Scalar::zero();
    for p in crate::graded::permutations(n) {
        let degs = vec![1; n];
        let s = crate::graded::koszul_sign_0(&p, &degs);
        let mut prod = qi(s);
        for (i, &j) in p.iter().enumerate() {
            prod *= &m[i][j];
        }
        total += prod;
    }
    total
}

/// Determinant of a square matrix of polynomials in `nvars` variables.
pub fn det_poly(m: &[Vec<Poly>], nvars: usize) -> Poly {
    let n = m.len();
    let mut total = Poly::zero(nvars);
    if n == 0 {
        return Poly::constant(nvars, qi(1));
    }
    for p in crate::graded::permutations(n) {
        let s = crate::graded::koszul_sign_0(&p, &vec![1; n]);
        let mut prod = Poly::constant(nvars, qi(s));
        for (i, &j) in p.iter().enumerate() {
            if m[i][j].is_zero() {
                prod = Poly::zero(nvars);
                break;
            }
            prod = prod.mul(&m[i][j]);
        }
        total = total.add(&prod);
    }
    total
}

impl CoordinateForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        CoordinateForm { dim, degree, data: FormData::Poly(BTreeMap::new()) }
    }

    pub fn function(f: Poly) -> Self {
        Self::poly(f.nvars, 0, vec![(vec![], f)])
    }

    /// Polynomial form from `(increasing index set, coefficient)` terms.
    pub fn poly(dim: usize, degree: usize, terms: Vec<(Vec<usize>, Poly)>) -> Self {
        let mut map: BTreeMap<Vec<usize>, Poly> = BTreeMap::new();
        for (idx, c) in terms {
            assert_eq!(idx.len(), degree, "index set size must equal degree");
            assert!(idx.windows(2).all(|w| w[0] < w[1]), "index sets must be increasing");
            let e = map.entry(idx.clone()).or_insert_with(|| Poly::zero(dim));
            *e = e.add(&c);
            if e.is_zero() {
                map.remove(&idx);
            }
        }
        CoordinateForm { dim, degree, data: FormData::Poly(map) }
    }

    /// Constant-coefficient `dx_i`.
    pub fn dx(dim: usize, i: usize) -> Self {
        Self::poly(dim, 1, vec![(vec![i], Poly::constant(dim, qi(1)))])
    }

    pub fn from_fn(dim: usize, degree: usize, closed: bool, eval: ComponentFn) -> Self {
        CoordinateForm { dim, degree, data: FormData::Func { eval, closed } }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.data, FormData::Poly(m) if m.is_empty())
    }

    pub fn is_poly(&self) -> bool {
        matches!(self.data, FormData::Poly(_))
    }

    pub fn components_at(&self, x: &[f64]) -> Vec<f64> {
        match &self.data {
            FormData::Poly(m) => subsets(self.dim, self.degree)
                .iter()
                .map(|s| m.get(s).map(|p| p.eval(x)).unwrap_or(0.0))
                .collect(),
            FormData::Func { eval, .. } => eval(x),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        match &self.data {
            FormData::Poly(m) => CoordinateForm {
                dim: self.dim,
                degree: self.degree,
                data: FormData::Poly(
                    m.iter().map(|(k, p)| (k.clone(), p.scale(c))).filter(|(_, p)| !p.is_zero()).collect(),
                ),
            },
            FormData::Func { eval, closed } => {
                let e = eval.clone();
                let cf = to_f64(c);
                Self::from_fn(self.dim, self.degree, *closed, Arc::new(move |x| e(x).into_iter().map(|v| v * cf).collect()))
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.degree, o.degree);
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        match (&self.data, &o.data) {
            (FormData::Poly(a), FormData::Poly(b)) => {
                let terms: Vec<(Vec<usize>, Poly)> =
                    a.iter().chain(b.iter()).map(|(k, p)| (k.clone(), p.clone())).collect();
                Self::poly(self.dim, self.degree, terms)
            }
            _ => {
                let (f, g) = (self.clone(), o.clone());
                let closed = f.is_closed_flag() && g.is_closed_flag();
                Self::from_fn(
                    self.dim,
                    self.degree,
                    closed,
                    Arc::new(move |x| {
                        f.components_at(x).into_iter().zip(g.components_at(x)).map(|(a, b)| a + b).collect()
                    }),
                )
            }
        }
    }

    fn is_closed_flag(&self) -> bool {
        match &self.data {
            FormData::Poly(_) => self.d().is_zero(),
            FormData::Func { closed, .. } => *closed,
        }
    }

    pub fn wedge(&self, o: &Self) -> Self {
        let deg = self.degree + o.degree;
        if self.is_zero() || o.is_zero() || deg > self.dim {
            return Self::zero(self.dim, deg);
        }
        match (&self.data, &o.data) {
            (FormData::Poly(a), FormData::Poly(b)) => {
                let mut terms = Vec::new();
                for (i, p) in a {
                    for (j, r) in b {
                        let s = merge_sign(i, j);
                        if s != 0 {
                            terms.push((merged(i, j), p.mul(r).scale(&qi(s))));
                        }
                    }
                }
                Self::poly(self.dim, deg, terms)
            }
            _ => {
                let (f, g) = (self.clone(), o.clone());
                let (dim, p, q) = (self.dim, self.degree, o.degree);
                let si = subsets(dim, p);
                let sj = subsets(dim, q);
                let sk = subsets(dim, deg);
                let closed = f.is_closed_flag() && g.is_closed_flag();
                Self::from_fn(
                    dim,
                    deg,
                    closed,
                    Arc::new(move |x| {
                        let a = f.components_at(x);
                        let b = g.components_at(x);
                        let mut out = vec![0.0; sk.len()];
                        for (ia, i) in si.iter().enumerate() {
                            if a[ia] == 0.0 {
                                continue;
                            }
                            for (jb, j) in sj.iter().enumerate() {
                                let s = merge_sign(i, j);
                                if s != 0 {
                                    let m = merged(i, j);
                                    let pos = sk.iter().position(|t| *t == m).unwrap();
                                    out[pos] += s as f64 * a[ia] * b[jb];
                                }
                            }
                        }
                        out
                    }),
                )
            }
        }
    }

    /// Exterior derivative: exact for polynomial forms, zero for callbacks
    /// flagged closed, central finite differences otherwise.
    pub fn d(&self) -> Self {
        let deg = self.degree + 1;
        if deg > self.dim {
            return Self::zero(self.dim, deg);
        }
        match &self.data {
            FormData::Poly(m) => {
                let mut terms = Vec::new();
                for (idx, p) in m {
                    for i in 0..self.dim {
                        let s = merge_sign(&[i], idx);
                        if s != 0 {
                            terms.push((merged(&[i], idx), p.derivative(i).scale(&qi(s))));
                        }
                    }
                }
                Self::poly(self.dim, deg, terms)
            }
            FormData::Func { closed: true, .. } => Self::zero(self.dim, deg),
            FormData::Func { eval, .. } => {
                let e = eval.clone();
                let dim = self.dim;
                let si = subsets(dim, self.degree);
                let sk = subsets(dim, deg);
                Self::from_fn(
                    dim,
                    deg,
                    true,
                    Arc::new(move |x| {
                        let h = 1e-5;
                        let mut out = vec![0.0; sk.len()];
                        for i in 0..dim {
                            let mut xp = x.to_vec();
                            let mut xm = x.to_vec();
                            xp[i] += h;
                            xm[i] -= h;
                            let (fp, fm) = (e(&xp), e(&xm));
                            for (ia, idx) in si.iter().enumerate() {
                                let s = merge_sign(&[i], idx);
                                if s != 0 {
                                    let m = merged(&[i], idx);
                                    let pos = sk.iter().position(|t| *t == m).unwrap();
                                    out[pos] += s as f64 * (fp[ia] - fm[ia]) / (2.0 * h);
                                }
                            }
                        }
                        out
                    }),
                )
            }
        }
    }

    /// Pullback along the affine map `y = a x + b` from `R^{a[0].len()}` to
    /// this chart.
    pub fn pullback_affine(&self, a: &[Vec<Scalar>], b: &[Scalar]) -> Self {
        let new_dim = a.first().map(|r| r.len()).unwrap_or(0);
        let p = self.degree;
        if p > new_dim {
            return Self::zero(new_dim, p);
        }
        let targets = subsets(new_dim, p);
        match &self.data {
            FormData::Poly(m) => {
                let subs: Vec<Poly> = a.iter().zip(b).map(|(row, bi)| Poly::affine(row, bi)).collect();
                let mut terms = Vec::new();
                for (idx, coef) in m {
                    let c = coef.compose(&subs);
                    for t in &targets {
                        let minor: Vec<Vec<Scalar>> =
                            idx.iter().map(|&i| t.iter().map(|&j| a[i][j].clone()).collect()).collect();
                        let dt = det_exact(&minor);
                        if !dt.is_zero() {
                            terms.push((t.clone(), c.scale(&dt)));
                        }
                    }
                }
                Self::poly(new_dim, p, terms)
            }
            FormData::Func { eval, closed } => {
                let e = eval.clone();
                let af: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(to_f64).collect()).collect();
                let bf: Vec<f64> = b.iter().map(to_f64).collect();
                let src = subsets(self.dim, p);
                let dets: Vec<Vec<f64>> = src
                    .iter()
                    .map(|idx| {
                        targets
                            .iter()
                            .map(|t| det(&idx.iter().map(|&i| t.iter().map(|&j| af[i][j]).collect()).collect::<Vec<_>>()))
                            .collect()
                    })
                    .collect();
                Self::from_fn(
                    new_dim,
                    p,
                    *closed,
                    Arc::new(move |x| {
                        let y: Vec<f64> = af
                            .iter()
                            .zip(&bf)
                            .map(|(row, bi)| bi + row.iter().zip(x).map(|(r, xi)| r * xi).sum::<f64>())
                            .collect();
                        let c = e(&y);
                        let mut out = vec![0.0; dets.first().map(|d| d.len()).unwrap_or(0)];
                        for (ia, row) in dets.iter().enumerate() {
                            for (jt, dv) in row.iter().enumerate() {
                                out[jt] += c[ia] * dv;
                            }
                        }
                        out
                    }),
                )
            }
        }
    }

    /// Pullback of a polynomial form along a polynomial map (one component
    /// per chart coordinate, all in the same variables).
    pub fn pullback_poly(&self, map: &[Poly]) -> Option<Self> {
        let terms_in = match &self.data {
            FormData::Poly(m) => m,
            FormData::Func { .. } => return None,
        };
        let new_dim = map.first().map(|p| p.nvars).unwrap_or(0);
        let p = self.degree;
        if p > new_dim {
            return Some(Self::zero(new_dim, p));
        }
        let jac: Vec<Vec<Poly>> = map.iter().map(|f| (0..new_dim).map(|j| f.derivative(j)).collect()).collect();
        let mut terms = Vec::new();
        for (idx, coef) in terms_in {
            let c = if coef.nvars == 0 { Poly::constant(new_dim, coef.terms.values().next().cloned().unwrap_or_default()) } else { coef.compose(map) };
            if c.is_zero() {
                continue;
            }
            for t in subsets(new_dim, p) {
                let minor: Vec<Vec<Poly>> = idx.iter().map(|&i| t.iter().map(|&j| jac[i][j].clone()).collect()).collect();
                let dt = det_poly(&minor, new_dim);
                if !dt.is_zero() {
                    terms.push((t, c.mul(&dt)));
                }
            }
        }
        Some(Self::poly(new_dim, p, terms))
    }

    /// Coefficient of `dx_0 ^ ... ^ dx_{dim-1}` of a polynomial top form.
    pub fn top_coefficient(&self) -> Option<Poly> {
        match &self.data {
            FormData::Poly(m) if self.degree == self.dim => {
                let all: Vec<usize> = (0..self.dim).collect();
                Some(m.get(&all).cloned().unwrap_or_else(|| Poly::zero(self.dim)))
            }
            _ => None,
        }
    }

    /// Value of the pullback along a map with Jacobian `jac` (rows: chart
    /// coordinates, columns: parameter directions listed in `dirs`), i.e. the
    /// coefficient of `d(dirs[0]) ^ ... ^ d(dirs[p-1])`.
    pub fn pulled_component(&self, comps: &[f64], jac: &[Vec<f64>], dirs: &[usize]) -> f64 {
        let p = self.degree;
        debug_assert_eq!(dirs.len(), p);
        if p == 0 {
            return comps[0];
        }
        let mut total = 0.0;
        for (ia, idx) in subsets(self.dim, p).iter().enumerate() {
            if comps[ia] == 0.0 {
                continue;
            }
            let minor: Vec<Vec<f64>> = idx.iter().map(|&i| dirs.iter().map(|&j| jac[i][j]).collect()).collect();
            total += comps[ia] * det(&minor);
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_antisymmetric_and_d_squared() {
        let x = Poly::var(3, 0);
        let y = Poly::var(3, 1);
        let a = CoordinateForm::poly(3, 1, vec![(vec![0], y.clone()), (vec![2], x.mul(&y))]);
        let b = CoordinateForm::poly(3, 1, vec![(vec![1], x.clone())]);
        let ab = a.wedge(&b);
        let ba = b.wedge(&a);
        let pt = [0.3, -0.7, 1.1];
        for (u, v) in ab.components_at(&pt).iter().zip(ba.components_at(&pt)) {
            assert!((u + v).abs() < 1e-14);
        }
        assert!(a.d().d().is_zero());
    }

    #[test]
    fn callback_matches_poly() {
        let x = Poly::var(2, 0);
        let p = CoordinateForm::poly(2, 1, vec![(vec![1], x.mul(&x))]);
        let pc = p.clone();
        let f = CoordinateForm::from_fn(2, 1, false, Arc::new(move |z| pc.components_at(z)));
        let dp = p.d().components_at(&[0.4, 0.2]);
        let df = f.d().components_at(&[0.4, 0.2]);
        assert!((dp[0] - df[0]).abs() < 1e-8);
        let w1 = p.wedge(&CoordinateForm::dx(2, 0)).components_at(&[0.5, 0.0]);
        let w2 = f.wedge(&CoordinateForm::dx(2, 0)).components_at(&[0.5, 0.0]);
        assert!((w1[0] - w2[0]).abs() < 1e-14);
    }

    #[test]
    fn affine_pullback_of_area_form() {
        let vol = CoordinateForm::poly(2, 2, vec![(vec![0, 1], Poly::constant(2, qi(1)))]);
        let a = vec![vec![qi(2), qi(0)], vec![qi(0), qi(3)]];
        let pb = vol.pullback_affine(&a, &[qi(0), qi(0)]);
        assert_eq!(pb.components_at(&[0.0, 0.0]), vec![6.0]);
    }
}
