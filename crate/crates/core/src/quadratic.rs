//! Quadratic dg Lie algebras, the Casimir identities, the representations
//! of `t_d(n)` they induce, and Knizhnik-Zamolodchikov connections.

use crate::error::{Error, Result};
use crate::forms::CoordinateForm;
use crate::graded::{swap_sign, GradedSpace, Word};
use crate::graphs::td::{TdPresentation, TdRelation};
use crate::holonomy::{ode_transport_path, path_series, OdeSpec, PathAlgebra};
use crate::lie::{DgLie, Enveloping, RepMatrix};
use crate::lin::Lin;
use crate::linalg::{self, Matrix};
use crate::quadrature::QuadSpec;
use crate::scalar::{q, qi, sign, to_f64, Scalar};
use crate::simplex::SingularSimplex;
pub use num_complex::Complex64;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Element of `U(g)^{(x) n}`: one PBW word per tensor slot.
pub type TensorElem = Lin<Vec<Word>>;

/// Finite-dimensional dg Lie algebra with a nondegenerate graded symmetric
/// invariant pairing of degree `D` (nonzero only on total degree `-D`).
#[derive(Clone, Debug)]
pub struct QuadraticDgla {
    pub lie: DgLie,
    pub kappa: Matrix,
    pub degree: i64,
    env: Enveloping,
    omega: Lin<(usize, usize)>,
}

impl QuadraticDgla {
    pub fn new(lie: DgLie, kappa: Matrix, degree: i64) -> Result<Self> {
        let n = lie.dim();
        if kappa.len() != n || kappa.iter().any(|r| r.len() != n) {
            return Err(Error::Argument(format!("pairing must be a {} x {} matrix", n, n)));
        }
        let deg = |i: usize| lie.degree(i);
        for i in 0..n {
            for j in 0..n {
                if kappa[i][j].is_zero() {
                    continue;
                }
                if deg(i) + deg(j) != -degree {
                    return Err(Error::Structure(format!(
                        "pairing of {} and {} is not of degree {}",
                        lie.space.label(i),
                        lie.space.label(j),
                        degree
                    )));
                }
                if kappa[j][i] != &kappa[i][j] * qi(swap_sign(deg(i), deg(j))) {
                    return Err(Error::Structure(format!(
                        "pairing is not graded symmetric on ({}, {})",
                        lie.space.label(i),
                        lie.space.label(j)
                    )));
                }
            }
        }
        let inv = linalg::inverse(&kappa).ok_or_else(|| Error::Structure("pairing is degenerate".into()))?;
        let pair = |x: &Lin<usize>, y: &Lin<usize>| -> Scalar {
            let mut s = qi(0);
            for (i, a) in x.iter() {
                for (j, b) in y.iter() {
                    s += a * b * &kappa[*i][*j];
                }
            }
            s
        };
        for a in 0..n {
            for b in 0..n {
                let (xa, xb) = (Lin::basis(a), Lin::basis(b));
                // kappa(d a, b) + (-1)^{|a|} kappa(a, d b) = 0
                if pair(&lie.d(&xa), &xb) != -pair(&xa, &lie.d(&xb)) * qi(sign(deg(a))) {
                    return Err(Error::Structure(format!(
                        "pairing is not compatible with d on ({}, {})",
                        lie.space.label(a),
                        lie.space.label(b)
                    )));
                }
                for c in 0..n {
                    let xc = Lin::basis(c);
                    let lhs = pair(&lie.bracket(&xa, &xb), &xc);
                    let rhs = -pair(&xb, &lie.bracket(&xa, &xc)) * qi(swap_sign(deg(a), deg(b)));
                    if lhs != rhs {
                        return Err(Error::Structure(format!(
                            "pairing is not invariant on ({}, {}, {})",
                            lie.space.label(a),
                            lie.space.label(b),
                            lie.space.label(c)
                        )));
                    }
                }
            }
        }
        // Omega = sum_mu (-1)^{|I_mu|} I_mu (x) I~_mu with kappa(I_nu, I~_mu) = delta
        let mut omega = Lin::zero();
        for mu in 0..n {
            for b in 0..n {
                if !inv[b][mu].is_zero() {
                    omega.add_term((mu, b), inv[b][mu].clone() * qi(sign(deg(mu))));
                }
            }
        }
        let env = Enveloping::new(lie.clone());
        Ok(QuadraticDgla { lie, kappa, degree, env, omega })
    }

    /// Killing form `tr(ad x ad y)` of an ungraded Lie algebra.
    pub fn killing(lie: &DgLie) -> Result<Self> {
        let n = lie.dim();
        if (0..n).any(|i| lie.degree(i) != 0) {
            return Err(Error::Argument("the Killing form needs an ungraded Lie algebra".into()));
        }
        let ad: Vec<Matrix> = (0..n)
            .map(|x| {
                let mut m = linalg::zeros(n, n);
                for y in 0..n {
                    for (z, c) in lie.bracket_basis(x, y).iter() {
                        m[*z][y] = c.clone();
                    }
                }
                m
            })
            .collect();
        Self::new(lie.clone(), trace_pairing(&ad), 0)
    }

    /// Trace form `tr(rho(x) rho(y))` of a representation.
    pub fn trace_form(lie: &DgLie, rep: &RepMatrix) -> Result<Self> {
        rep.check(lie)?;
        if (0..lie.dim()).any(|i| lie.degree(i) != 0) {
            return Err(Error::Argument("the trace form needs an ungraded Lie algebra".into()));
        }
        Self::new(lie.clone(), trace_pairing(&rep.mats), 0)
    }

    /// The same algebra with the pairing multiplied by `lambda`.
    pub fn scaled(&self, lambda: &Scalar) -> Result<Self> {
        let k = self.kappa.iter().map(|r| r.iter().map(|x| x * lambda).collect()).collect();
        Self::new(self.lie.clone(), k, self.degree)
    }

    pub fn dim(&self) -> usize {
        self.lie.dim()
    }

    pub fn enveloping(&self) -> &Enveloping {
        &self.env
    }

    /// `Omega` as coefficients on `e_a (x) e_b`: the element corresponding to
    /// the identity, `sum (-1)^{|I|} I (x) I~` over a basis and its dual
    /// (`kappa(I, I~) = 1`). The sign makes `Omega` invariant when `g` has
    /// odd elements; for odd `D` it makes `Omega` graded antisymmetric.
    pub fn omega(&self) -> &Lin<(usize, usize)> {
        &self.omega
    }

    /// `d Omega`, computed with the Koszul rule on `g (x) g`.
    pub fn d_omega(&self) -> Lin<(usize, usize)> {
        let mut out = Lin::zero();
        for ((a, b), c) in self.omega.iter() {
            for (z, cz) in self.lie.d_basis(*a).iter() {
                out.add_term((*z, *b), c * cz);
            }
            for (z, cz) in self.lie.d_basis(*b).iter() {
                out.add_term((*a, *z), c * cz * qi(sign(self.lie.degree(*a))));
            }
        }
        out
    }

    /// `ad_x(Omega)` for every basis element `x`, concatenated.
    pub fn omega_invariance_defect(&self) -> Lin<(usize, usize, usize)> {
        let mut out = Lin::zero();
        for x in 0..self.dim() {
            let dx = self.lie.degree(x);
            for ((a, b), c) in self.omega.iter() {
                for (z, cz) in self.lie.bracket_basis(x, *a).iter() {
                    out.add_term((x, *z, *b), c * cz);
                }
                for (z, cz) in self.lie.bracket_basis(x, *b).iter() {
                    out.add_term((x, *a, *z), c * cz * qi(swap_sign(dx, self.lie.degree(*a))));
                }
            }
        }
        out
    }

    fn word_degree(&self, w: &[usize]) -> i64 {
        self.env.word_degree(w)
    }

    /// Product of PBW words in `U(g)`.
    pub fn umul(&self, a: &[usize], b: &[usize]) -> Lin<Word> {
        let x: Lin<(u32, Word)> = Lin::basis((0, a.to_vec()));
        let y: Lin<(u32, Word)> = Lin::basis((0, b.to_vec()));
        Enveloping::forget_weight(&self.env.mul(&x, &y, None))
    }

    fn umul_lin(&self, a: &Lin<Word>, b: &Lin<Word>) -> Lin<Word> {
        let mut out = Lin::zero();
        for (u, x) in a.iter() {
            for (v, y) in b.iter() {
                out.add_scaled(&self.umul(u, v), &(x * y));
            }
        }
        out
    }

    /// Casimir element: the image of `Omega` in `U(g)`.
    pub fn casimir(&self) -> Lin<Word> {
        let mut out = Lin::zero();
        for ((a, b), c) in self.omega.iter() {
            out.add_scaled(&self.umul(&[*a], &[*b]), c);
        }
        out
    }

    /// Graded commutators `[C, x]` for every generator, concatenated by
    /// generator index.
    pub fn casimir_centrality_defect(&self) -> Lin<(usize, Word)> {
        let c = self.casimir();
        let mut out = Lin::zero();
        for x in 0..self.dim() {
            let gx = Lin::basis(vec![x]);
            let mut r = self.umul_lin(&c, &gx);
            let s = -swap_sign(-self.degree, self.lie.degree(x));
            r.add_scaled(&self.umul_lin(&gx, &c), &qi(s));
            for (w, v) in r.iter() {
                out.add_term((x, w.clone()), v.clone());
            }
        }
        out
    }

    /// `d_U C`.
    pub fn d_casimir(&self) -> Lin<Word> {
        let c: Lin<(u32, Word)> = self.casimir().map_keys(|w| (0, w.clone()));
        Enveloping::forget_weight(&self.env.d(&c))
    }

    /// `U(g)^{(x) n}`.
    pub fn tensor_power(&self, n: usize) -> TensorPower<'_> {
        TensorPower { g: self, n }
    }

    /// `Omega - (1/2)(Delta(C) - 1 (x) C - C (x) 1)` in `U(g) (x) U(g)`.
    pub fn coproduct_defect(&self) -> TensorElem {
        let t = self.tensor_power(2);
        let c = self.casimir();
        let mut rhs = t.coproduct(&c);
        for (w, x) in c.iter() {
            rhs.add_term(vec![vec![], w.clone()], -x.clone());
            rhs.add_term(vec![w.clone(), vec![]], -x.clone());
        }
        let mut out = t.lambda(1, 2, &self.omega);
        out.add_scaled(&rhs, &q(-1, 2));
        out
    }

    /// `[Omega^12, Omega^23 + Omega^13]` in `U(g)^{(x) 3}`.
    pub fn drinfeld_defect(&self) -> TensorElem {
        let t = self.tensor_power(3);
        let o12 = t.lambda(1, 2, &self.omega);
        let s = Lin::sum(&t.lambda(2, 3, &self.omega), &t.lambda(1, 3, &self.omega));
        t.commutator(&o12, &s)
    }

    /// `phi-hat_n`: images `lambda^{ij}(Omega)` of the generators `t_ij`,
    /// `i < j`, for `d = D + 2`.
    pub fn phi_hat(&self, n: usize) -> Vec<((usize, usize), TensorElem)> {
        let td = TdPresentation::new(self.degree + 2, n);
        assert_eq!(td.generator_degree(), -self.degree, "t_ij and Omega must have the same degree");
        let t = self.tensor_power(n);
        td.pairs().into_iter().map(|(i, j)| ((i, j), t.lambda(i, j, &self.omega))).collect()
    }

    /// Values of the `t_d(n)` relations under `phi-hat_n`.
    pub fn phi_hat_relations(&self, n: usize) -> Vec<(TdRelation, TensorElem)> {
        let td = TdPresentation::new(self.degree + 2, n);
        let images: BTreeMap<(usize, usize), TensorElem> = self.phi_hat(n).into_iter().collect();
        let t = self.tensor_power(n);
        td.evaluate(
            &|p| images[&p].clone(),
            &|x, s| x.scale(&qi(s)),
            &|x, y| Lin::sum(x, y),
            &|x, y| t.commutator(x, y),
        )
    }

    /// `phi_n(t_ij)` on `V_1 (x) ... (x) V_n` for `i < j`.
    pub fn phi_matrices(&self, reps: &[RepMatrix]) -> Result<Vec<((usize, usize), Matrix)>> {
        if (0..self.dim()).any(|i| self.lie.degree(i) != 0) {
            return Err(Error::Argument("matrix representations need an ungraded Lie algebra".into()));
        }
        for r in reps {
            if r.mats.len() != self.dim() {
                return Err(Error::Argument("representation has the wrong number of matrices".into()));
            }
            r.check(&self.lie)?;
        }
        let td = TdPresentation::new(self.degree + 2, reps.len());
        let dims: Vec<usize> = reps.iter().map(|r| r.dim).collect();
        let total: usize = dims.iter().product();
        let mut out = Vec::new();
        for (i, j) in td.pairs() {
            let mut m = linalg::zeros(total, total);
            for ((a, b), c) in self.omega.iter() {
                let factors: Vec<Matrix> = (1..=reps.len())
                    .map(|s| {
                        if s == i {
                            reps[s - 1].mats[*a].clone()
                        } else if s == j {
                            reps[s - 1].mats[*b].clone()
                        } else {
                            linalg::identity(dims[s - 1])
                        }
                    })
                    .collect();
                let k = kron_all(&factors);
                for r in 0..total {
                    for s in 0..total {
                        if !k[r][s].is_zero() {
                            m[r][s] += c * &k[r][s];
                        }
                    }
                }
            }
            out.push(((i, j), m));
        }
        Ok(out)
    }

    /// Values of the `t_2(n)` relations on the matrices `phi_n(t_ij)`.
    pub fn phi_relations(&self, reps: &[RepMatrix]) -> Result<Vec<(TdRelation, Matrix)>> {
        let mats: BTreeMap<(usize, usize), Matrix> = self.phi_matrices(reps)?.into_iter().collect();
        let td = TdPresentation::new(self.degree + 2, reps.len());
        Ok(td.evaluate(
            &|p| mats[&p].clone(),
            &|x, s| x.iter().map(|r| r.iter().map(|v| v * qi(s)).collect()).collect(),
            &mat_add,
            &|x, y| mat_commutator(x, y),
        ))
    }
}

fn trace_pairing(mats: &[Matrix]) -> Matrix {
    let n = mats.len();
    let mut k = linalg::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let p = linalg::matmul(&mats[i], &mats[j]);
            k[i][j] = (0..p.len()).map(|r| p[r][r].clone()).fold(qi(0), |a, b| a + b);
        }
    }
    k
}

fn mat_add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

pub fn mat_commutator(a: &Matrix, b: &Matrix) -> Matrix {
    let ab = linalg::matmul(a, b);
    let ba = linalg::matmul(b, a);
    ab.iter().zip(&ba).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

/// Largest absolute entry.
pub fn mat_max_abs(a: &Matrix) -> f64 {
    a.iter().flatten().map(|x| to_f64(x).abs()).fold(0.0, f64::max)
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, ca) = (a.len(), a.first().map_or(0, |r| r.len()));
    let (rb, cb) = (b.len(), b.first().map_or(0, |r| r.len()));
    let mut out = linalg::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            if a[i][j].is_zero() {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = &a[i][j] * &b[k][l];
                }
            }
        }
    }
    out
}

fn kron_all(factors: &[Matrix]) -> Matrix {
    let mut out = vec![vec![qi(1)]];
    for f in factors {
        out = kron(&out, f);
    }
    out
}

/// `U(g)^{(x) n}` with the Koszul sign rule
/// `(a (x) b)(c (x) e) = (-1)^{|b||c|} ac (x) be`.
pub struct TensorPower<'a> {
    g: &'a QuadraticDgla,
    pub n: usize,
}

impl<'a> TensorPower<'a> {
    fn degree(&self, key: &[Word]) -> i64 {
        key.iter().map(|w| self.g.word_degree(w)).sum()
    }

    pub fn unit(&self) -> TensorElem {
        Lin::basis(vec![vec![]; self.n])
    }

    pub fn mul(&self, a: &TensorElem, b: &TensorElem) -> TensorElem {
        let mut out = Lin::zero();
        for (u, x) in a.iter() {
            for (v, y) in b.iter() {
                let mut e = 0;
                for i in 0..self.n {
                    for j in 0..i {
                        e += self.g.word_degree(&u[i]) * self.g.word_degree(&v[j]);
                    }
                }
                let mut acc: TensorElem = Lin::term(vec![], x * y * qi(sign(e)));
                for i in 0..self.n {
                    let slot = self.g.umul(&u[i], &v[i]);
                    let mut next = Lin::zero();
                    for (k, c) in acc.iter() {
                        for (w, d) in slot.iter() {
                            let mut nk = k.clone();
                            nk.push(w.clone());
                            next.add_term(nk, c * d);
                        }
                    }
                    acc = next;
                }
                out.add_assign(&acc);
            }
        }
        out
    }

    /// Graded commutator, expanded over homogeneous terms.
    pub fn commutator(&self, a: &TensorElem, b: &TensorElem) -> TensorElem {
        let mut out = Lin::zero();
        for (u, x) in a.iter() {
            for (v, y) in b.iter() {
                let ea = Lin::term(u.clone(), x.clone());
                let eb = Lin::term(v.clone(), y.clone());
                out.add_assign(&self.mul(&ea, &eb));
                let s = -swap_sign(self.degree(u), self.degree(v));
                out.add_scaled(&self.mul(&eb, &ea), &qi(s));
            }
        }
        out
    }

    /// `lambda^{ij}`: puts the two tensor factors in slots `i` and `j`
    /// (1-based, `i < j`).
    pub fn lambda(&self, i: usize, j: usize, x: &Lin<(usize, usize)>) -> TensorElem {
        assert!(i < j && j <= self.n);
        let mut out = Lin::zero();
        for ((a, b), c) in x.iter() {
            let mut k = vec![vec![]; self.n];
            k[i - 1] = vec![*a];
            k[j - 1] = vec![*b];
            out.add_term(k, c.clone());
        }
        out
    }

    /// The coproduct `U(g) -> U(g) (x) U(g)` (requires `n = 2`).
    pub fn coproduct(&self, x: &Lin<Word>) -> TensorElem {
        assert_eq!(self.n, 2);
        let mut out = Lin::zero();
        for (w, c) in x.iter() {
            let mut acc = self.unit();
            for &gen in w {
                let mut dg = Lin::zero();
                dg.add_term(vec![vec![gen], vec![]], qi(1));
                dg.add_term(vec![vec![], vec![gen]], qi(1));
                acc = self.mul(&acc, &dg);
            }
            out.add_scaled(&acc, c);
        }
        out
    }
}

/// Graded algebra `H^-(M)` (degrees `<= 0`) of a closed oriented manifold
/// with its Poincare pairing of degree `dim`.
#[derive(Clone, Debug)]
pub struct PoincareAlgebra {
    pub space: GradedSpace,
    /// Products of basis elements; basis element 0 is the unit.
    pub product: BTreeMap<(usize, usize), Lin<usize>>,
    pub pairing: Matrix,
    pub dim: i64,
}

impl PoincareAlgebra {
    pub fn point() -> Self {
        PoincareAlgebra {
            space: GradedSpace::from_degrees("pt", &[("1", 0)]),
            product: [((0, 0), Lin::basis(0))].into_iter().collect(),
            pairing: vec![vec![qi(1)]],
            dim: 0,
        }
    }

    /// `S^k` with fundamental class `v` of degree `-k`.
    pub fn sphere(k: i64) -> Self {
        let mut product = BTreeMap::new();
        product.insert((0, 0), Lin::basis(0));
        product.insert((0, 1), Lin::basis(1));
        product.insert((1, 0), Lin::basis(1));
        PoincareAlgebra {
            space: GradedSpace::from_degrees(&format!("S{}", k), &[("1", 0), ("v", -k)]),
            product,
            pairing: vec![vec![qi(0), qi(1)], vec![qi(1), qi(0)]],
            dim: k,
        }
    }

    /// Cohomology of the product manifold.
    pub fn tensor(&self, o: &PoincareAlgebra) -> Self {
        let (n, m) = (self.space.dim(), o.space.dim());
        let idx = |a: usize, b: usize| a * m + b;
        let mut elems = Vec::new();
        for a in 0..n {
            for b in 0..m {
                let label = format!("{}.{}", self.space.label(a), o.space.label(b));
                elems.push((label, self.space.degree(a) + o.space.degree(b), 1));
            }
        }
        let space = GradedSpace::new(&format!("{}x{}", self.space.name, o.space.name), elems).unwrap();
        let mut product = BTreeMap::new();
        let mut pairing = linalg::zeros(n * m, n * m);
        for a in 0..n {
            for b in 0..m {
                for c in 0..n {
                    for e in 0..m {
                        // (a (x) b)(c (x) e) = (-1)^{|b||c|} ac (x) be
                        let s = qi(swap_sign(o.space.degree(b), self.space.degree(c)));
                        let mut v = Lin::zero();
                        if let (Some(x), Some(y)) = (self.product.get(&(a, c)), o.product.get(&(b, e))) {
                            for (i, ci) in x.iter() {
                                for (j, cj) in y.iter() {
                                    v.add_term(idx(*i, *j), ci * cj * &s);
                                }
                            }
                        }
                        if !v.is_zero() {
                            product.insert((idx(a, b), idx(c, e)), v);
                        }
                        pairing[idx(a, b)][idx(c, e)] = &self.pairing[a][c] * &o.pairing[b][e] * &s;
                    }
                }
            }
        }
        PoincareAlgebra { space, product, pairing, dim: self.dim + o.dim }
    }

    fn mul(&self, a: usize, b: usize) -> Lin<usize> {
        self.product.get(&(a, b)).cloned().unwrap_or_default()
    }
}

/// `g (x) H^-(M)` with `[a (x) eta, b (x) w] = (-1)^{|eta||b|} [a, b] (x) eta w`
/// and `kappa(a (x) eta, b (x) w) = (-1)^{|eta||b|} kappa(a, b) mu(eta, w)`.
pub fn poincare_tensor(g: &QuadraticDgla, h: &PoincareAlgebra) -> Result<QuadraticDgla> {
    let (n, m) = (g.dim(), h.space.dim());
    let idx = |a: usize, e: usize| a * m + e;
    let mut elems = Vec::new();
    for a in 0..n {
        for e in 0..m {
            let label = if m == 1 {
                g.lie.space.label(a).to_string()
            } else {
                format!("{}.{}", g.lie.space.label(a), h.space.label(e))
            };
            elems.push((label, g.lie.degree(a) + h.space.degree(e), 1));
        }
    }
    let space = GradedSpace::new(&format!("{}x{}", g.lie.space.name, h.space.name), elems)?;
    let mut brackets = Vec::new();
    let mut diff = Vec::new();
    let mut kappa = linalg::zeros(n * m, n * m);
    for a in 0..n {
        for e in 0..m {
            let mut dv = Lin::zero();
            for (z, c) in g.lie.d_basis(a).iter() {
                dv.add_term(idx(*z, e), c.clone());
            }
            diff.push((idx(a, e), dv));
            for b in 0..n {
                for w in 0..m {
                    let s = qi(swap_sign(h.space.degree(e), g.lie.degree(b)));
                    let mut v = Lin::zero();
                    let prod = h.mul(e, w);
                    for (z, c) in g.lie.bracket_basis(a, b).iter() {
                        for (p, cp) in prod.iter() {
                            v.add_term(idx(*z, *p), c * cp * &s);
                        }
                    }
                    brackets.push(((idx(a, e), idx(b, w)), v));
                    kappa[idx(a, e)][idx(b, w)] = &g.kappa[a][b] * &h.pairing[e][w] * &s;
                }
            }
        }
    }
    let lie = DgLie::new(space, brackets, diff, false)?;
    QuadraticDgla::new(lie, kappa, g.degree + h.dim)
}

/// Dense complex square matrices, row-major.
#[derive(Clone, Copy, Debug)]
pub struct ComplexMatrices {
    pub dim: usize,
}

impl ComplexMatrices {
    pub fn from_rational(&self, m: &Matrix) -> Vec<Complex64> {
        m.iter().flatten().map(|x| Complex64::new(to_f64(x), 0.0)).collect()
    }

    pub fn identity(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::zero(); self.dim * self.dim];
        for i in 0..self.dim {
            out[i * self.dim + i] = Complex64::new(1.0, 0.0);
        }
        out
    }

    /// `exp(a)` by its Taylor series, summed until the terms vanish.
    pub fn exp(&self, a: &[Complex64]) -> Vec<Complex64> {
        let mut term = self.identity();
        let mut total = term.clone();
        for k in 1..200 {
            term = self.mul(&term, &a.to_vec()).into_iter().map(|z| z / k as f64).collect();
            total = total.iter().zip(&term).map(|(x, y)| x + y).collect();
            if self.norm(&term) < 1e-18 {
                break;
            }
        }
        total
    }
}

impl PathAlgebra for ComplexMatrices {
    type Elem = Vec<Complex64>;
    fn one(&self) -> Self::Elem {
        self.identity()
    }
    fn zero(&self) -> Self::Elem {
        vec![Complex64::zero(); self.dim * self.dim]
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = self.dim;
        let mut out = vec![Complex64::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let x = a[i * n + k];
                if x == Complex64::zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += x * b[k * n + j];
                }
            }
        }
        out
    }
    fn combine(&self, terms: &[(f64, &Self::Elem)]) -> Self::Elem {
        let mut out = self.zero();
        for (c, x) in terms {
            if *c == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(x.iter()) {
                *o += v * c;
            }
        }
        out
    }
    fn norm(&self, a: &Self::Elem) -> f64 {
        a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `End(V)`-valued connection `sum_p M_p (x) (re_p + i im_p)` on a chart.
#[derive(Clone, Debug)]
pub struct EndConnection {
    pub n: usize,
    pub chart_dim: usize,
    pub fibre_dim: usize,
    pub mats: Vec<Matrix>,
    pub re: Vec<CoordinateForm>,
    pub im: Vec<CoordinateForm>,
    /// Pairs `(i, j)` whose diagonal `z_i = z_j` the chart must avoid.
    pub diagonals: Vec<(usize, usize)>,
}

/// `d log |z_i - z_j|` and `d arg(z_i - z_j)` on `R^{2n}` with coordinates
/// `(x_1, y_1, ..., x_n, y_n)`, as closed callback forms.
pub fn dlog_parts(n: usize, i: usize, j: usize) -> (CoordinateForm, CoordinateForm) {
    let (a, b) = (i - 1, j - 1);
    let rel = move |p: &[f64]| {
        let u = p[2 * a] - p[2 * b];
        let v = p[2 * a + 1] - p[2 * b + 1];
        (u, v, u * u + v * v)
    };
    let re = move |p: &[f64]| {
        let (u, v, r2) = rel(p);
        let mut c = vec![0.0; 2 * n];
        c[2 * a] = u / r2;
        c[2 * b] = -u / r2;
        c[2 * a + 1] = v / r2;
        c[2 * b + 1] = -v / r2;
        c
    };
    let im = move |p: &[f64]| {
        let (u, v, r2) = rel(p);
        let mut c = vec![0.0; 2 * n];
        c[2 * a] = -v / r2;
        c[2 * b] = v / r2;
        c[2 * a + 1] = u / r2;
        c[2 * b + 1] = -u / r2;
        c
    };
    (CoordinateForm::from_fn(2 * n, 1, true, Arc::new(re)), CoordinateForm::from_fn(2 * n, 1, true, Arc::new(im)))
}

/// `sum_{i<j} phi_n(t_ij) dlog(z_i - z_j)` on `Conf_2(n)`.
pub fn kz_connection(g: &QuadraticDgla, reps: &[RepMatrix]) -> Result<EndConnection> {
    if g.degree != 0 {
        return Err(Error::Argument("KZ connections need a quadratic Lie algebra of degree 0".into()));
    }
    let n = reps.len();
    let phi = g.phi_matrices(reps)?;
    let fibre_dim = reps.iter().map(|r| r.dim).product();
    let mut mats = Vec::new();
    let mut re = Vec::new();
    let mut im = Vec::new();
    let mut diagonals = Vec::new();
    for ((i, j), m) in phi {
        let (r, a) = dlog_parts(n, i, j);
        mats.push(m);
        re.push(r);
        im.push(a);
        diagonals.push((i, j));
    }
    Ok(EndConnection { n, chart_dim: 2 * n, fibre_dim, mats, re, im, diagonals })
}

impl EndConnection {
    pub fn algebra(&self) -> ComplexMatrices {
        ComplexMatrices { dim: self.fibre_dim }
    }

    /// Smallest `|z_i - z_j|` over the recorded diagonals.
    pub fn diagonal_distance(&self, p: &[f64]) -> f64 {
        self.diagonals
            .iter()
            .map(|&(i, j)| {
                let u = p[2 * (i - 1)] - p[2 * (j - 1)];
                let v = p[2 * (i - 1) + 1] - p[2 * (j - 1) + 1];
                (u * u + v * v).sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.chart_dim {
            return Err(Error::Argument(format!("point of dimension {} on a chart of dimension {}", p.len(), self.chart_dim)));
        }
        if self.diagonal_distance(p) < 1e-12 {
            return Err(Error::Argument("point lies on a diagonal z_i = z_j".into()));
        }
        Ok(())
    }

    /// Components `A_m` of the connection at `p`, one matrix per chart
    /// direction.
    pub fn components(&self, p: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        self.check_point(p)?;
        let alg = self.algebra();
        let mut out = vec![alg.zero(); self.chart_dim];
        for (k, m) in self.mats.iter().enumerate() {
            let mc = alg.from_rational(m);
            let (r, a) = (self.re[k].components_at(p), self.im[k].components_at(p));
            for (dir, o) in out.iter_mut().enumerate() {
                let z = Complex64::new(r[dir], a[dir]);
                if z != Complex64::zero() {
                    for (x, y) in o.iter_mut().zip(&mc) {
                        *x += y * z;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Largest entry of the curvature `d alpha + alpha ^ alpha` at `p`.
    pub fn curvature_at(&self, p: &[f64]) -> Result<f64> {
        let a = self.components(p)?;
        let alg = self.algebra();
        let dim = self.chart_dim;
        let mut dpart = vec![vec![alg.zero(); dim]; dim];
        for (k, m) in self.mats.iter().enumerate() {
            let mc = alg.from_rational(m);
            let (dr, di) = (self.re[k].d().components_at(p), self.im[k].d().components_at(p));
            for (s, idx) in crate::forms::subsets(dim, 2).iter().enumerate() {
                let z = Complex64::new(dr.get(s).copied().unwrap_or(0.0), di.get(s).copied().unwrap_or(0.0));
                if z != Complex64::zero() {
                    for (x, y) in dpart[idx[0]][idx[1]].iter_mut().zip(&mc) {
                        *x += y * z;
                    }
                }
            }
        }
        let mut worst: f64 = 0.0;
        for m in 0..dim {
            for l in m + 1..dim {
                let ml = alg.mul(&a[m], &a[l]);
                let lm = alg.mul(&a[l], &a[m]);
                let f = alg.combine(&[(1.0, &dpart[m][l]), (1.0, &ml), (-1.0, &lm)]);
                worst = worst.max(alg.norm(&f));
            }
        }
        Ok(worst)
    }

    /// Largest curvature entry over `count` seeded random points of
    /// `[-1, 1]^{2n}` at distance at least `margin` from the diagonals.
    pub fn flatness_sample(&self, count: usize, seed: u64, margin: f64) -> Result<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        let mut taken = 0;
        while taken < count {
            let p: Vec<f64> = (0..self.chart_dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if self.diagonal_distance(&p) < margin {
                continue;
            }
            worst = worst.max(self.curvature_at(&p)?);
            taken += 1;
        }
        Ok(worst)
    }

    /// Coefficient of the pullback along a path at parameter `t`.
    pub fn along(&self, sigma: &SingularSimplex, t: f64) -> Vec<Complex64> {
        let alg = self.algebra();
        let x = sigma.eval(&[t]);
        let jac = sigma.jacobian(&[t]);
        let mut out = alg.zero();
        for (k, m) in self.mats.iter().enumerate() {
            let r = self.re[k].pulled_component(&self.re[k].components_at(&x), &jac, &[0]);
            let a = self.im[k].pulled_component(&self.im[k].components_at(&x), &jac, &[0]);
            let z = Complex64::new(r, a);
            for (o, v) in out.iter_mut().zip(alg.from_rational(m)) {
                *o += v * z;
            }
        }
        out
    }
}

/// Piecewise path in `Conf_2(n)`; pieces are 1-simplices in `R^{2n}`.
#[derive(Clone, Debug)]
pub struct BraidPath {
    pub pieces: Vec<SingularSimplex>,
}

impl BraidPath {
    pub fn new(pieces: Vec<SingularSimplex>) -> Result<Self> {
        for w in pieces.windows(2) {
            let (a, b) = (w[0].vertex(1), w[1].vertex(0));
            if a.iter().zip(&b).any(|(x, y)| (x - y).abs() > 1e-12) {
                return Err(Error::Argument("consecutive path pieces do not meet".into()));
            }
        }
        if pieces.iter().any(|p| p.dim() != 1) {
            return Err(Error::Argument("path pieces must be 1-simplices".into()));
        }
        Ok(BraidPath { pieces })
    }

    /// Piecewise-linear path through configurations `(z_1, ..., z_n)`,
    /// each point given as `(re, im)` pairs.
    pub fn through(configs: &[Vec<(Scalar, Scalar)>]) -> Result<Self> {
        let flat = |c: &Vec<(Scalar, Scalar)>| -> Vec<Scalar> {
            c.iter().flat_map(|(x, y)| [x.clone(), y.clone()]).collect()
        };
        let pieces = configs
            .windows(2)
            .map(|w| SingularSimplex::affine(vec![flat(&w[0]), flat(&w[1])]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pieces)
    }

    /// `z_i` and `z_j` turn about their midpoint by `turns` full turns
    /// (counterclockwise for positive values); other points stay fixed.
    /// `reparam` maps `[0, 1]` onto itself and is applied to the angle.
    pub fn rotation(base: &[(f64, f64)], i: usize, j: usize, turns: f64, reparam: Option<(f64, f64)>) -> Self {
        let n = base.len();
        let (a, b) = (i - 1, j - 1);
        let c = ((base[a].0 + base[b].0) / 2.0, (base[a].1 + base[b].1) / 2.0);
        let (hx, hy) = ((base[a].0 - base[b].0) / 2.0, (base[a].1 - base[b].1) / 2.0);
        let base_v: Vec<(f64, f64)> = base.to_vec();
        // reparam (p, q): s(t) = p t + q t^2 with p + q = 1
        let (p, qq) = reparam.unwrap_or((1.0, 0.0));
        let angle = move |t: f64| 2.0 * std::f64::consts::PI * turns * (p * t + qq * t * t);
        let dangle = move |t: f64| 2.0 * std::f64::consts::PI * turns * (p + 2.0 * qq * t);
        let bv = base_v.clone();
        let eval = move |t: &[f64]| -> Vec<f64> {
            let th = angle(t[0]);
            let (cs, sn) = (th.cos(), th.sin());
            let mut out = Vec::with_capacity(2 * n);
            for (k, z) in bv.iter().enumerate() {
                if k == a || k == b {
                    let s = if k == a { 1.0 } else { -1.0 };
                    out.push(c.0 + s * (cs * hx - sn * hy));
                    out.push(c.1 + s * (sn * hx + cs * hy));
                } else {
                    out.push(z.0);
                    out.push(z.1);
                }
            }
            out
        };
        let jac = move |t: &[f64]| -> Vec<Vec<f64>> {
            let th = angle(t[0]);
            let w = dangle(t[0]);
            let (cs, sn) = (th.cos(), th.sin());
            let mut out = vec![vec![0.0]; 2 * n];
            for (k, s) in [(a, 1.0), (b, -1.0)] {
                out[2 * k][0] = s * w * (-sn * hx - cs * hy);
                out[2 * k + 1][0] = s * w * (cs * hx - sn * hy);
            }
            out
        };
        let name = format!("rot:{:?}:{}:{}:{}:{}:{}", base_v, i, j, turns, p, qq);
        BraidPath { pieces: vec![SingularSimplex::callback(1, 2 * n, &name, Arc::new(eval), Arc::new(jac))] }
    }

    /// The same path traversed backwards.
    pub fn reversed(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .rev()
            .map(|p| p.reparametrize(&[vec![qi(1)], vec![qi(0)]]))
            .collect();
        BraidPath { pieces }
    }

    pub fn then(&self, o: &BraidPath) -> Result<Self> {
        let mut pieces = self.pieces.clone();
        pieces.extend(o.pieces.iter().cloned());
        Self::new(pieces)
    }
}

/// Transport matrices of a connection along a braid path: the truncated
/// Chen series (`terms` iterated integrals per piece) and the ODE solution.
pub struct BraidTransport {
    pub series: Vec<Complex64>,
    pub ode: Vec<Complex64>,
}

impl BraidTransport {
    pub fn delta(&self) -> f64 {
        self.series.iter().zip(&self.ode).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Holonomy of `alpha` along `path`, as the product of the piece transports
/// in path order.
pub fn braid_holonomy(alpha: &EndConnection, path: &BraidPath, terms: usize, spec: &QuadSpec, ode: &OdeSpec) -> Result<BraidTransport> {
    let alg = alpha.algebra();
    let mut series = alg.one();
    let mut ode_v = alg.one();
    for piece in &path.pieces {
        for t in [0.0, 0.5, 1.0] {
            alpha.check_point(&piece.eval(&[t]))?;
        }
        let coeff = |t: f64| alpha.along(piece, t);
        let s = path_series(&alg, &coeff, terms, spec)?;
        let o = ode_transport_path(&alg, &coeff, ode)?;
        series = alg.mul(&series, &s);
        ode_v = alg.mul(&ode_v, &o);
    }
    Ok(BraidTransport { series, ode: ode_v })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2_killing() -> QuadraticDgla {
        QuadraticDgla::killing(&DgLie::sl2()).unwrap()
    }

    #[test]
    fn killing_form_and_omega_of_sl2() {
        let g = sl2_killing();
        // basis f, h, e: kappa(e, f) = 4, kappa(h, h) = 8
        assert_eq!(g.kappa[2][0], qi(4));
        assert_eq!(g.kappa[1][1], qi(8));
        let mut want = Lin::zero();
        want.add_term((0, 2), q(1, 4));
        want.add_term((2, 0), q(1, 4));
        want.add_term((1, 1), q(1, 8));
        assert_eq!(g.omega(), &want);
        assert!(g.omega_invariance_defect().is_zero());
        assert!(g.d_omega().is_zero());
    }

    #[test]
    fn one_dimensional_abelian() {
        let lie = DgLie::abelian(GradedSpace::from_degrees("x", &[("x", 0)]));
        let g = QuadraticDgla::new(lie, vec![vec![qi(3)]], 0).unwrap();
        assert_eq!(g.omega(), &Lin::term((0, 0), q(1, 3)));
        assert!(g.coproduct_defect().is_zero());
        assert!(g.drinfeld_defect().is_zero());
    }

    #[test]
    fn casimir_identities_for_sl2() {
        let g = sl2_killing();
        assert!(g.casimir_centrality_defect().is_zero());
        assert!(g.d_casimir().is_zero());
        assert!(g.coproduct_defect().is_zero());
        assert!(g.drinfeld_defect().is_zero());
        let g3 = g.scaled(&qi(3)).unwrap();
        assert!(g3.coproduct_defect().is_zero());
        assert_eq!(g3.casimir(), g.casimir().scale(&q(1, 3)));
    }

    #[test]
    fn rejects_bad_pairings() {
        let lie = DgLie::sl2();
        let mut k = sl2_killing().kappa;
        k[1][1] = qi(0);
        k[0][2] = qi(0);
        k[2][0] = qi(0);
        assert!(QuadraticDgla::new(lie.clone(), k, 0).is_err());
        // not invariant
        let diag = vec![vec![qi(1), qi(0), qi(0)], vec![qi(0), qi(1), qi(0)], vec![qi(0), qi(0), qi(1)]];
        assert!(QuadraticDgla::new(lie, diag, 0).is_err());
    }

    #[test]
    fn differential_compatibility_sign() {
        // a (deg -1), b (deg 0), da = b, paired in total degree -1 (D = 1)
        let space = GradedSpace::from_degrees("ab", &[("a", -1), ("b", 0)]);
        let lie = DgLie::new(space, vec![], vec![(0, Lin::basis(1))], false).unwrap();
        let k = vec![vec![qi(0), qi(1)], vec![qi(1), qi(0)]];
        let g = QuadraticDgla::new(lie, k, 1).unwrap();
        assert!(g.d_omega().is_zero());
        assert!(g.d_casimir().is_zero());
        // degrees 0, 1 with da = b: kappa(da, a) = kappa(a, da) = 1 violates the rule
        let space = GradedSpace::from_degrees("ab", &[("a", 0), ("b", 1)]);
        let lie = DgLie::new(space, vec![], vec![(0, Lin::basis(1))], false).unwrap();
        let k = vec![vec![qi(0), qi(1)], vec![qi(1), qi(0)]];
        assert!(QuadraticDgla::new(lie, k, -1).is_err());
    }

    #[test]
    fn phi_hat_relations_hold() {
        let g = sl2_killing();
        assert_eq!(g.phi_hat(2).len(), 1);
        assert!(g.phi_hat_relations(3).iter().all(|(_, v)| v.is_zero()));
        let rel4 = g.phi_hat_relations(4);
        assert!(rel4.iter().any(|(r, _)| matches!(r, TdRelation::Commute(..))));
        assert!(rel4.iter().all(|(_, v)| v.is_zero()));
    }

    #[test]
    fn tensor_power_is_associative_with_signs() {
        let h = poincare_tensor(&sl2_killing(), &PoincareAlgebra::sphere(1)).unwrap();
        let t = h.tensor_power(2);
        // odd generators f.v (index 1), e.v (index 5)
        let x: TensorElem = Lin::basis(vec![vec![1], vec![5]]);
        let y: TensorElem = Lin::basis(vec![vec![5], vec![]]);
        let z: TensorElem = Lin::basis(vec![vec![2], vec![1]]);
        assert_eq!(t.mul(&t.mul(&x, &y), &z), t.mul(&x, &t.mul(&y, &z)));
    }

    #[test]
    fn matrix_representation_and_eigenvalues() {
        let g = sl2_killing();
        let std = RepMatrix::sl2_standard();
        let m = g.phi_matrices(&[std.clone(), std.clone()]).unwrap();
        let o = &m[0].1;
        // Omega = (P - 1/2) / 4 on C^2 (x) C^2 with P the flip
        for r in 0..4 {
            for c in 0..4 {
                let flip = if (r / 2, r % 2) == (c % 2, c / 2) { qi(1) } else { qi(0) };
                let id = if r == c { q(1, 2) } else { qi(0) };
                assert_eq!(o[r][c], (flip - id) * q(1, 4));
            }
        }
        let triv = RepMatrix::trivial(&DgLie::sl2());
        let z = g.phi_matrices(&[triv.clone(), triv.clone(), triv]).unwrap();
        assert!(z.iter().all(|(_, m)| mat_max_abs(m) == 0.0));
        let rel = g.phi_relations(&[std.clone(), std.clone(), std]).unwrap();
        assert!(rel.iter().all(|(_, m)| mat_max_abs(m) == 0.0));
    }

    #[test]
    fn poincare_tensor_of_sphere() {
        let g = sl2_killing();
        let pt = poincare_tensor(&g, &PoincareAlgebra::point()).unwrap();
        assert_eq!(pt.kappa, g.kappa);
        let s2 = poincare_tensor(&g, &PoincareAlgebra::sphere(2)).unwrap();
        assert_eq!(s2.dim(), 6);
        assert_eq!(s2.degree, 2);
        assert!(s2.drinfeld_defect().is_zero());
        assert!(s2.coproduct_defect().is_zero());
    }

    #[test]
    fn poincare_bracket_sign_on_odd_factors() {
        let s1 = PoincareAlgebra::sphere(1);
        let g1 = poincare_tensor(&sl2_killing(), &s1).unwrap();
        let g2 = poincare_tensor(&g1, &s1).unwrap();
        assert_eq!(g2.degree, 2);
        let idx = |l: &str| g2.lie.space.index(l).unwrap();
        // [(e.1).v, (f.v).1] = (-1)^{|v||f.v|} [e.1, f.v].v = -(h.v).v
        let br = g2.lie.bracket_basis(idx("e.1.v"), idx("f.v.1"));
        assert_eq!(br, Lin::term(idx("h.v.v"), qi(-1)));
        for g in [&g1, &g2] {
            assert!(g.omega_invariance_defect().is_zero());
            assert!(g.casimir_centrality_defect().is_zero());
            assert!(g.drinfeld_defect().is_zero());
            assert!(g.phi_hat_relations(3).iter().all(|(_, v)| v.is_zero()));
        }
        assert!(g2.coproduct_defect().is_zero());
        // odd D: Omega is graded antisymmetric, so Delta(C) - 1 (x) C - C (x) 1 = 0
        let flipped: Lin<(usize, usize)> = g1
            .omega()
            .iter()
            .map(|((a, b), c)| ((*b, *a), c * qi(swap_sign(g1.lie.degree(*a), g1.lie.degree(*b)))))
            .collect();
        assert_eq!(flipped, g1.omega().neg());
        assert!(!g1.coproduct_defect().is_zero());
    }

    #[test]
    fn dlog_parts_are_closed() {
        let (re, im) = dlog_parts(2, 1, 2);
        let p = [0.3, -0.2, -0.4, 0.5];
        let h = 1e-6;
        for f in [&re, &im] {
            for a in 0..4 {
                for b in a + 1..4 {
                    let mut pp = p;
                    pp[a] += h;
                    let mut pm = p;
                    pm[a] -= h;
                    let dab = (f.components_at(&pp)[b] - f.components_at(&pm)[b]) / (2.0 * h);
                    let mut pp = p;
                    pp[b] += h;
                    let mut pm = p;
                    pm[b] -= h;
                    let dba = (f.components_at(&pp)[a] - f.components_at(&pm)[a]) / (2.0 * h);
                    assert!((dab - dba).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn kz_flatness_and_diagonal_rejection() {
        let g = sl2_killing();
        let std = RepMatrix::sl2_standard();
        let kz = kz_connection(&g, &[std.clone(), std.clone(), std]).unwrap();
        assert!(kz.flatness_sample(20, 3, 1e-2).unwrap() <= 1e-10);
        assert!(kz.components(&[0.0, 0.0, 0.0, 0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn full_twist_is_an_exponential() {
        let g = sl2_killing();
        let std = RepMatrix::sl2_standard();
        let kz = kz_connection(&g, &[std.clone(), std]).unwrap();
        let path = BraidPath::rotation(&[(0.5, 0.0), (-0.5, 0.0)], 1, 2, 1.0, None);
        let tr = braid_holonomy(&kz, &path, 40, &QuadSpec::default(), &OdeSpec::default()).unwrap();
        let alg = kz.algebra();
        let m = alg.from_rational(&kz.mats[0]);
        let arg: Vec<Complex64> = m.iter().map(|z| z * Complex64::new(0.0, -2.0 * std::f64::consts::PI)).collect();
        let want = alg.exp(&arg);
        assert!(alg.norm(&alg.combine(&[(1.0, &tr.ode), (-1.0, &want)])) < 1e-8);
        assert!(tr.delta() < 1e-8);
    }

    #[test]
    fn constant_path_and_inverse_loop() {
        let g = sl2_killing();
        let std = RepMatrix::sl2_standard();
        let kz = kz_connection(&g, &[std.clone(), std.clone(), std]).unwrap();
        let alg = kz.algebra();
        let base = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
        let still = BraidPath::rotation(&base, 1, 2, 0.0, None);
        let t = braid_holonomy(&kz, &still, 6, &QuadSpec::default(), &OdeSpec::default()).unwrap();
        assert!(alg.norm(&alg.combine(&[(1.0, &t.series), (-1.0, &alg.identity())])) < 1e-14);
        let swap = BraidPath::rotation(&base, 1, 2, 0.5, None);
        let back = swap.reversed();
        let there = braid_holonomy(&kz, &swap, 30, &QuadSpec::default(), &OdeSpec::default()).unwrap();
        let home = braid_holonomy(&kz, &back, 30, &QuadSpec::default(), &OdeSpec::default()).unwrap();
        let prod = alg.mul(&there.ode, &home.ode);
        assert!(alg.norm(&alg.combine(&[(1.0, &prod), (-1.0, &alg.identity())])) < 1e-6);
        let both = braid_holonomy(&kz, &swap.then(&back).unwrap(), 30, &QuadSpec::default(), &OdeSpec::default()).unwrap();
        assert!(alg.norm(&alg.combine(&[(1.0, &both.ode), (-1.0, &prod)])) < 1e-8);
    }
}
