//! Holonomy of connections with values in L-infinity algebras.
//!
//! A connection `alpha` in `g (x) Omega(chart)` is strictified to an element
//! `beta` of `U-infinity(g) (x) Omega` and pushed forward along the iterated
//! integral morphism to a twisting cochain `h` with values in
//! `U-infinity(g)` (or in `U(g)` for strict `g`). Values are reported as
//! `1 + h(sigma)`; Maurer-Cartan checks use `h` itself.
//!
//! Orientation: on a path the value is the parallel transport of the reversed
//! path, i.e. the solution at `t = 1` of `H' = A(1 - t)^rev H`, `H(0) = 1`.

use crate::chen::psi;
use crate::error::{Error, Result};
use crate::forms::CoordinateForm;
use crate::functors::{CobarElem, UInfinity};
use crate::graded::{sym_normalize, Word};
use crate::lie::{DgLie, Enveloping, PbwKey, UElem};
use crate::lin::Lin;
use crate::linfty::{Caps, LInftyAlgebra, SullivanModel};
use crate::quadrature::{gauss_legendre_unit, QuadSpec};
use crate::scalar::{factorial, qi, sign, Scalar};
use crate::simplex::SingularSimplex;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::sync::{Arc, RwLock};

/// Degree-1 element `sum x_i (x) a_i` of `g (x) Omega(chart)`.
#[derive(Clone, Debug)]
pub struct Connection {
    pub algebra: LInftyAlgebra,
    /// Present when `g` is a strict dg Lie algebra.
    pub lie: Option<DgLie>,
    pub terms: Vec<(usize, CoordinateForm)>,
    pub chart_dim: usize,
    /// Points used to test flatness of non-polynomial connections.
    pub samples: Vec<Vec<f64>>,
}

/// Ordered tuples over `0..n` of length `1..=max_len` whose every prefix
/// passes `keep`.
pub(crate) fn tuples(n: usize, max_len: usize, keep: &dyn Fn(&[usize]) -> bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![vec![]];
    while let Some(t) = stack.pop() {
        if t.len() == max_len {
            continue;
        }
        for i in 0..n {
            let mut next = t.clone();
            next.push(i);
            if keep(&next) {
                out.push(next.clone());
                stack.push(next);
            }
        }
    }
    out.sort();
    out
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, CoordinateForm>, k: K, f: CoordinateForm) {
    match map.remove(&k) {
        Some(old) => {
            let s = old.add(&f);
            map.insert(k, s);
        }
        None => {
            map.insert(k, f);
        }
    }
}

impl Connection {
    pub fn new(algebra: LInftyAlgebra, terms: Vec<(usize, CoordinateForm)>, chart_dim: usize) -> Result<Self> {
        for (x, a) in &terms {
            if *x >= algebra.dim() {
                return Err(Error::Argument(format!("connection term refers to basis index {}", x)));
            }
            if a.dim != chart_dim {
                return Err(Error::Argument(format!("form on R^{} in a connection on R^{}", a.dim, chart_dim)));
            }
            if algebra.space.degree(*x) + a.degree as i64 != 1 {
                return Err(Error::Argument(format!(
                    "term {} (x) ({}-form) has total degree {}",
                    algebra.space.label(*x),
                    a.degree,
                    algebra.space.degree(*x) + a.degree as i64
                )));
            }
        }
        Ok(Connection { algebra, lie: None, terms, chart_dim, samples: Vec::new() })
    }

    /// Connection over a strict dg Lie algebra.
    pub fn strict(lie: &DgLie, terms: Vec<(usize, CoordinateForm)>, chart_dim: usize) -> Result<Self> {
        let mut c = Connection::new(lie.to_linfty(), terms, chart_dim)?;
        c.lie = Some(lie.clone());
        Ok(c)
    }

    /// `alpha_phi = sum_v x_v (x) phi(v)` for a realized Sullivan model.
    pub fn from_sullivan(model: &SullivanModel) -> Result<Self> {
        let terms = model
            .connection_terms()
            .ok_or_else(|| Error::Argument("the Sullivan model has no realization".into()))?;
        let dim = terms.first().map(|t| t.1.dim).unwrap_or(0);
        Connection::new(model.to_linfty()?, terms, dim)
    }

    pub fn with_samples(mut self, samples: Vec<Vec<f64>>) -> Self {
        self.samples = samples;
        self
    }

    pub fn is_poly(&self) -> bool {
        self.terms.iter().all(|(_, a)| a.is_poly())
    }

    fn weight(&self, t: &[usize]) -> u32 {
        t.iter().map(|&i| self.algebra.weight(self.terms[i].0)).sum()
    }

    fn form_degree(&self, t: &[usize]) -> usize {
        t.iter().map(|&i| self.terms[i].1.degree).sum()
    }

    /// Components of `sum_k (1/k!) q_k(s alpha, ..., s alpha)` per basis
    /// index; zero exactly when `alpha` is flat.
    pub fn curvature(&self, caps: Caps) -> BTreeMap<usize, CoordinateForm> {
        let g = &self.algebra;
        let mut out = BTreeMap::new();
        for (x, a) in &self.terms {
            if a.degree < self.chart_dim && !(g.filtered && g.weight(*x) > caps.weight) {
                accumulate(&mut out, *x, a.d().scale(&qi(sign(g.sdeg(*x)))));
            }
        }
        let arity = g.max_arity().min(caps.arity.max(1));
        let keep = |t: &[usize]| {
            (!g.filtered || self.weight(t) <= caps.weight) && self.form_degree(t) < self.chart_dim + 1
        };
        for t in tuples(self.terms.len(), arity, &keep) {
            let xs: Vec<usize> = t.iter().map(|&i| self.terms[i].0).collect();
            let qx = g.q_word(&xs);
            if qx.is_zero() {
                continue;
            }
            let mut e = 0;
            for p in 0..t.len() {
                for q in p + 1..t.len() {
                    e += self.terms[t[p]].1.degree as i64 * g.sdeg(xs[q]);
                }
            }
            let mut form = self.terms[t[0]].1.clone();
            for &i in &t[1..] {
                form = form.wedge(&self.terms[i].1);
            }
            if form.is_zero() {
                continue;
            }
            let c = qi(sign(e)) / factorial(t.len());
            for (z, cz) in qx.iter() {
                if g.filtered && g.weight(*z) > caps.weight {
                    continue;
                }
                accumulate(&mut out, *z, form.scale(&(c.clone() * cz.clone())));
            }
        }
        out.into_iter().filter(|(_, f)| !f.is_zero()).collect()
    }

    /// Largest curvature component: exact zero test for polynomial data,
    /// otherwise the maximum over the sample points.
    pub fn flatness_residual(&self, caps: Caps) -> Result<f64> {
        let curv = self.curvature(caps);
        if curv.is_empty() {
            return Ok(0.0);
        }
        let mut pts = self.samples.clone();
        if curv.values().all(|f| f.is_poly()) {
            if pts.is_empty() {
                pts = default_samples(self.chart_dim);
            }
        } else if pts.is_empty() {
            return Err(Error::Argument("flatness of a non-polynomial connection needs sample points".into()));
        }
        let mut worst: f64 = 0.0;
        for f in curv.values() {
            for p in &pts {
                for v in f.components_at(p) {
                    worst = worst.max(v.abs());
                }
            }
            if f.is_poly() && worst == 0.0 {
                // nonzero polynomial that vanishes on the samples
                worst = f64::MIN_POSITIVE;
            }
        }
        Ok(worst)
    }

    /// `f^* alpha` for the affine map `f(y) = a y + b` from `R^{source_dim}`.
    pub fn pullback_affine(&self, a: &[Vec<Scalar>], b: &[Scalar]) -> Connection {
        let terms = self.terms.iter().map(|(x, f)| (*x, f.pullback_affine(a, b))).collect();
        let source_dim = a.first().map(|r| r.len()).unwrap_or(0);
        Connection {
            algebra: self.algebra.clone(),
            lie: self.lie.clone(),
            terms,
            chart_dim: source_dim,
            samples: Vec::new(),
        }
    }

    /// `tau(iota(eta_*(alpha)))`: coefficient forms of the generators
    /// `u(sx_1 .. sx_k)` of `U-infinity(g)`, up to the weight.
    pub fn strictified(&self, weight: u32) -> Vec<(Word, CoordinateForm)> {
        let g = &self.algebra;
        let dim = self.chart_dim;
        let keep = |t: &[usize]| self.weight(t) <= weight && self.form_degree(t) <= dim;
        let mut out: BTreeMap<Word, CoordinateForm> = BTreeMap::new();
        for t in tuples(self.terms.len(), weight as usize, &keep) {
            let xs: Vec<usize> = t.iter().map(|&i| self.terms[i].0).collect();
            let (sorted, s) = match sym_normalize(&xs, |i| g.sdeg(*i)) {
                Some(v) => v,
                None => continue,
            };
            let mut e = 0;
            for p in 0..t.len() {
                for q in p + 1..t.len() {
                    e += self.terms[t[p]].1.degree as i64 * (g.space.degree(xs[q]) + 1);
                }
            }
            let mut form = self.terms[t[0]].1.clone();
            for &i in &t[1..] {
                form = form.wedge(&self.terms[i].1);
            }
            if form.is_zero() {
                continue;
            }
            let c = qi(sign(e) * s) / factorial(t.len());
            accumulate(&mut out, sorted, form.scale(&c));
        }
        out.into_iter().filter(|(_, f)| !f.is_zero()).collect()
    }
}

fn default_samples(dim: usize) -> Vec<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    (0..16).map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}

/// A letter of the pushforward: a generator of the target algebra paired
/// with its coefficient form.
#[derive(Clone, Debug)]
pub struct Letter<L> {
    pub key: L,
    /// Degree of the generator in the target algebra.
    pub degree: i64,
    pub weight: u32,
    pub form: CoordinateForm,
}

/// Target dg algebra of a holonomy cochain, with real coefficients.
pub trait Target: Send + Sync {
    type Letter: Ord + Clone + Debug + Send + Sync;
    type Key: Ord + Clone + Debug + Send + Sync;
    /// Product of the letters, truncated at the weight cap.
    fn word(&self, w: &[Self::Letter]) -> Lin<Self::Key, f64>;
    fn mul(&self, a: &Lin<Self::Key, f64>, b: &Lin<Self::Key, f64>) -> Lin<Self::Key, f64>;
    fn d(&self, a: &Lin<Self::Key, f64>) -> Lin<Self::Key, f64>;
    fn unit(&self) -> Lin<Self::Key, f64>;
}

/// `U-infinity(g)` as the cobar construction on `CE(g)`, truncated by weight.
pub struct CobarTarget {
    pub g: LInftyAlgebra,
    pub cap: u32,
}

impl Target for CobarTarget {
    type Letter = Word;
    type Key = Vec<Word>;
    fn word(&self, w: &[Word]) -> Lin<Vec<Word>, f64> {
        let wt: u32 = w.iter().flatten().map(|&i| self.g.weight(i)).sum();
        if wt > self.cap {
            return Lin::zero();
        }
        Lin::term(w.to_vec(), 1.0)
    }
    fn mul(&self, a: &Lin<Vec<Word>, f64>, b: &Lin<Vec<Word>, f64>) -> Lin<Vec<Word>, f64> {
        let u = UInfinity::new(&self.g, vec![], Some(self.cap));
        let om = u.cobar();
        om.mul(a, b)
    }
    fn d(&self, a: &Lin<Vec<Word>, f64>) -> Lin<Vec<Word>, f64> {
        let u = UInfinity::new(&self.g, vec![], Some(self.cap));
        let om = u.cobar();
        om.d(a)
    }
    fn unit(&self) -> Lin<Vec<Word>, f64> {
        Lin::term(vec![], 1.0)
    }
}

/// `U(g)` in PBW normal form, truncated by weight.
pub struct PbwTarget {
    pub env: Enveloping,
    pub cap: u32,
}

impl Target for PbwTarget {
    type Letter = usize;
    type Key = PbwKey;
    fn word(&self, w: &[usize]) -> UElem<f64> {
        let wt: u32 = w.iter().map(|&i| self.env.lie.space.weight(i)).sum();
        if wt > self.cap {
            return Lin::zero();
        }
        self.env.normalize(&Lin::term((wt, w.to_vec()), 1.0), Some(self.cap))
    }
    fn mul(&self, a: &UElem<f64>, b: &UElem<f64>) -> UElem<f64> {
        self.env.mul(a, b, Some(self.cap))
    }
    fn d(&self, a: &UElem<f64>) -> UElem<f64> {
        self.env.d(a)
    }
    fn unit(&self) -> UElem<f64> {
        self.env.unit()
    }
}

/// Algebras in which path-ordered integrals are accumulated.
pub trait PathAlgebra: Sync {
    type Elem: Clone + Send + Sync;
    fn one(&self) -> Self::Elem;
    fn zero(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn combine(&self, terms: &[(f64, &Self::Elem)]) -> Self::Elem;
    /// Largest absolute coefficient.
    fn norm(&self, a: &Self::Elem) -> f64;
}

fn lin_combine<K: Ord + Clone>(terms: &[(f64, &Lin<K, f64>)]) -> Lin<K, f64> {
    let mut out = Lin::zero();
    for (c, x) in terms {
        if *c != 0.0 {
            out.add_scaled(x, c);
        }
    }
    out
}

impl PathAlgebra for PbwTarget {
    type Elem = UElem<f64>;
    fn one(&self) -> UElem<f64> {
        self.env.unit()
    }
    fn zero(&self) -> UElem<f64> {
        Lin::zero()
    }
    fn mul(&self, a: &UElem<f64>, b: &UElem<f64>) -> UElem<f64> {
        self.env.mul(a, b, Some(self.cap))
    }
    fn combine(&self, terms: &[(f64, &UElem<f64>)]) -> UElem<f64> {
        lin_combine(terms)
    }
    fn norm(&self, a: &UElem<f64>) -> f64 {
        a.max_abs()
    }
}

/// Free associative algebra on weighted letters `0..n`, truncated by weight.
pub struct FreeWords {
    pub weights: Vec<u32>,
    pub cap: u32,
}

impl PathAlgebra for FreeWords {
    type Elem = Lin<Vec<usize>, f64>;
    fn one(&self) -> Self::Elem {
        Lin::term(vec![], 1.0)
    }
    fn zero(&self) -> Self::Elem {
        Lin::zero()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = Lin::zero();
        for (u, x) in a.iter() {
            let wu: u32 = u.iter().map(|&i| self.weights[i]).sum();
            for (v, y) in b.iter() {
                let wv: u32 = v.iter().map(|&i| self.weights[i]).sum();
                if wu + wv > self.cap {
                    continue;
                }
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_term(w, x * y);
            }
        }
        out
    }
    fn combine(&self, terms: &[(f64, &Self::Elem)]) -> Self::Elem {
        lin_combine(terms)
    }
    fn norm(&self, a: &Self::Elem) -> f64 {
        a.max_abs()
    }
}

fn lagrange(nodes: &[f64], j: usize, x: f64) -> f64 {
    let mut v = 1.0;
    for (m, xm) in nodes.iter().enumerate() {
        if m != j {
            v *= (x - xm) / (nodes[j] - xm);
        }
    }
    v
}

/// `sum_{n <= n_max} (-1)^n int_{0 <= s_1 <= ... <= s_n <= 1} A(s_1) ... A(s_n)`
/// by Picard iteration on composite Gauss-Legendre panels, refined until two
/// levels agree. This is `1 + sum_n psi_n(A, ..., A)` on a path.
pub fn path_series<P: PathAlgebra>(
    alg: &P,
    coeff: &(dyn Fn(f64) -> P::Elem + Sync),
    n_max: usize,
    spec: &QuadSpec,
) -> Result<P::Elem> {
    spec.validate()?;
    let rule = gauss_legendre_unit(spec.order)?;
    let nodes: Vec<f64> = rule.iter().map(|p| p.0).collect();
    let p = nodes.len();
    // s[i][j] = int_0^{x_i} l_j
    let s: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&xi| (0..p).map(|j| rule.iter().map(|(y, w)| xi * w * lagrange(&nodes, j, xi * y)).sum()).collect())
        .collect();
    let mut prev: Option<P::Elem> = None;
    let mut last = f64::INFINITY;
    for level in 0..=spec.max_level + 2 {
        let panels = 1usize << level;
        let h = 1.0 / panels as f64;
        let a: Vec<Vec<P::Elem>> = (0..panels)
            .into_par_iter()
            .map(|m| nodes.iter().map(|x| coeff((m as f64 + x) * h)).collect())
            .collect();
        let mut q: Vec<Vec<P::Elem>> = vec![vec![alg.one(); p]; panels];
        let mut total = alg.one();
        for _ in 0..n_max {
            let mut start = alg.zero();
            let mut next = Vec::with_capacity(panels);
            for m in 0..panels {
                let qa: Vec<P::Elem> = (0..p).map(|j| alg.mul(&q[m][j], &a[m][j])).collect();
                let mut col = Vec::with_capacity(p);
                for row in &s {
                    let mut terms: Vec<(f64, &P::Elem)> = vec![(1.0, &start)];
                    for j in 0..p {
                        terms.push((-h * row[j], &qa[j]));
                    }
                    col.push(alg.combine(&terms));
                }
                let mut terms: Vec<(f64, &P::Elem)> = vec![(1.0, &start)];
                for j in 0..p {
                    terms.push((-h * rule[j].1, &qa[j]));
                }
                start = alg.combine(&terms);
                next.push(col);
            }
            total = alg.combine(&[(1.0, &total), (1.0, &start)]);
            q = next;
        }
        if let Some(pv) = &prev {
            let diff = alg.norm(&alg.combine(&[(1.0, &total), (-1.0, pv)]));
            last = diff;
            if diff <= spec.tol * alg.norm(&total).max(1.0) {
                return Ok(total);
            }
        }
        prev = Some(total);
    }
    Err(Error::Numeric { message: "path-ordered series did not converge".into(), estimate: last })
}

/// Step control for [`ode_transport_path`].
#[derive(Clone, Debug, PartialEq)]
pub struct OdeSpec {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeSpec {
    fn default() -> Self {
        OdeSpec { rtol: 1e-11, atol: 1e-13, h_min: 1e-12, max_steps: 200_000 }
    }
}

/// Solves `H' = B(t) H`, `H(0) = 1` on `[0, 1]` with the Dormand-Prince
/// 5(4) pair, where `B(t) = -A(1 - t)` is the coefficient along the
/// reversed path. Returns `H(1)`.
pub fn ode_transport_path<P: PathAlgebra>(
    alg: &P,
    coeff: &dyn Fn(f64) -> P::Elem,
    ode: &OdeSpec,
) -> Result<P::Elem> {
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] =
        [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];
    let rhs = |t: f64, y: &P::Elem| -> P::Elem {
        let b = coeff(1.0 - t);
        alg.combine(&[(-1.0, &alg.mul(&b, y))])
    };
    let mut t = 0.0;
    let mut y = alg.one();
    let mut h: f64 = 0.01;
    let mut steps = 0;
    while t < 1.0 {
        if steps > ode.max_steps {
            return Err(Error::Numeric { message: "too many ODE steps".into(), estimate: 1.0 - t });
        }
        steps += 1;
        h = h.min(1.0 - t);
        let mut k: Vec<P::Elem> = Vec::with_capacity(7);
        for stage in 0..7 {
            let mut terms: Vec<(f64, &P::Elem)> = vec![(1.0, &y)];
            for (j, kj) in k.iter().enumerate() {
                if A[stage][j] != 0.0 {
                    terms.push((h * A[stage][j], kj));
                }
            }
            let ys = alg.combine(&terms);
            k.push(rhs(t + C[stage] * h, &ys));
        }
        let mut t5: Vec<(f64, &P::Elem)> = vec![(1.0, &y)];
        let mut terr: Vec<(f64, &P::Elem)> = Vec::new();
        for j in 0..7 {
            t5.push((h * B5[j], &k[j]));
            terr.push((h * (B5[j] - B4[j]), &k[j]));
        }
        let y5 = alg.combine(&t5);
        let err = alg.norm(&alg.combine(&terr));
        let scale = ode.atol + ode.rtol * alg.norm(&y5).max(alg.norm(&y));
        let ratio = err / scale;
        if ratio <= 1.0 {
            t += h;
            y = y5;
        }
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < ode.h_min && t < 1.0 {
            return Err(Error::Numeric { message: "ODE step size underflow".into(), estimate: h });
        }
    }
    Ok(y)
}

/// Sign of the term `u_1 ... u_n psi_n(b_1, ..., b_n)` of the pushforward
/// of `sum u_j (x) b_j`: the Koszul sign `(-1)^{sum_{p<q} (|b_p| - 1)|u_q|}`
/// of moving the suspended forms past the algebra letters.
pub fn pushforward_sign(udeg: &[i64], fdeg: &[i64]) -> i64 {
    let mut e = 0;
    for q in 0..udeg.len() {
        for p in 0..q {
            e += (fdeg[p] - 1) * udeg[q];
        }
    }
    sign(e)
}

type Raw = Vec<(Vec<usize>, f64)>;

/// Twisting cochain `h` on singular simplices of a chart with values in a
/// target algebra, with a per-simplex cache keyed by the simplex content.
pub struct HolonomyCochain<T: Target> {
    pub target: T,
    pub letters: Vec<Letter<T::Letter>>,
    pub cap: u32,
    pub spec: QuadSpec,
    raw: RwLock<HashMap<String, Arc<Raw>>>,
}

impl<T: Target> HolonomyCochain<T> {
    pub fn new(target: T, letters: Vec<Letter<T::Letter>>, cap: u32, spec: QuadSpec) -> Self {
        HolonomyCochain { target, letters, cap, spec, raw: RwLock::new(HashMap::new()) }
    }

    fn all_poly(&self) -> bool {
        self.letters.iter().all(|l| l.form.is_poly())
    }

    /// Unsigned terms `(letter indices, psi_n value)` on a simplex.
    fn raw_terms(&self, sigma: &SingularSimplex) -> Result<Arc<Raw>> {
        let key = sigma.key();
        if let Some(v) = self.raw.read().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let k = sigma.dim() as i64;
        let letters = &self.letters;
        let cap = self.cap;
        let keep = |t: &[usize]| t.iter().map(|&i| letters[i].weight).sum::<u32>() <= cap;
        let words: Vec<Vec<usize>> = tuples(letters.len(), cap as usize, &keep)
            .into_iter()
            .filter(|t| t.iter().map(|&i| letters[i].form.degree as i64 - 1).sum::<i64>() == k - 1)
            .collect();
        let raw: Raw = if k == 1 && !(sigma.is_polynomial() && self.all_poly()) {
            self.path_terms(sigma, &words)?
        } else {
            let vals: Vec<Result<f64>> = words
                .par_iter()
                .map(|t| {
                    let forms: Vec<&CoordinateForm> = t.iter().map(|&i| &letters[i].form).collect();
                    psi(&forms, sigma, &self.spec)
                })
                .collect();
            let mut out = Vec::new();
            for (t, v) in words.into_iter().zip(vals) {
                let v = v?;
                if v != 0.0 {
                    out.push((t, v));
                }
            }
            out
        };
        let raw = Arc::new(raw);
        self.raw.write().unwrap().entry(key).or_insert_with(|| raw.clone());
        Ok(raw)
    }

    /// Iterated integrals of all words of 1-form letters along a path at once.
    fn path_terms(&self, sigma: &SingularSimplex, words: &[Vec<usize>]) -> Result<Raw> {
        let ones: Vec<usize> = (0..self.letters.len()).filter(|&i| self.letters[i].form.degree == 1).collect();
        let alg = FreeWords { weights: ones.iter().map(|&i| self.letters[i].weight).collect(), cap: self.cap };
        let coeff = |t: f64| -> Lin<Vec<usize>, f64> {
            let x = sigma.eval(&[t]);
            let jac = sigma.jacobian(&[t]);
            let mut out = Lin::zero();
            for (pos, &i) in ones.iter().enumerate() {
                let f = &self.letters[i].form;
                let v = f.pulled_component(&f.components_at(&x), &jac, &[0]);
                if v != 0.0 {
                    out.add_term(vec![pos], v);
                }
            }
            out
        };
        let series = path_series(&alg, &coeff, self.cap as usize, &self.spec)?;
        let mut out = Vec::new();
        for t in words {
            if t.iter().any(|i| self.letters[*i].form.degree != 1) {
                continue;
            }
            let w: Vec<usize> = t.iter().map(|i| ones.iter().position(|j| j == i).unwrap()).collect();
            let v = series.coeff(&w);
            if v != 0.0 {
                out.push((t.clone(), v));
            }
        }
        Ok(out)
    }

    /// `h(sigma)`.
    pub fn value(&self, sigma: &SingularSimplex) -> Result<Lin<T::Key, f64>> {
        let raw = self.raw_terms(sigma)?;
        let mut out = Lin::zero();
        for (t, v) in raw.iter() {
            let ud: Vec<i64> = t.iter().map(|&i| self.letters[i].degree).collect();
            let fd: Vec<i64> = t.iter().map(|&i| self.letters[i].form.degree as i64).collect();
            let s = pushforward_sign(&ud, &fd) as f64;
            let w: Vec<T::Letter> = t.iter().map(|&i| self.letters[i].key.clone()).collect();
            out.add_scaled(&self.target.word(&w), &(s * v));
        }
        Ok(out)
    }

    /// `1 + h(sigma)`.
    pub fn transport(&self, sigma: &SingularSimplex) -> Result<Lin<T::Key, f64>> {
        Ok(Lin::sum(&self.target.unit(), &self.value(sigma)?))
    }

    /// The twisting-cochain equation on `sigma`:
    /// `d_U h(sigma) + (-1)^k sum_i (-1)^i h(d_i sigma)
    ///  + sum_{p+q=k} (-1)^{p(1-q)} h(front_p sigma) h(back_q sigma)`,
    /// as the largest absolute coefficient.
    pub fn mc_residual(&self, sigma: &SingularSimplex) -> Result<f64> {
        Ok(self.mc_residual_elem(sigma)?.max_abs())
    }

    pub fn mc_residual_elem(&self, sigma: &SingularSimplex) -> Result<Lin<T::Key, f64>> {
        let k = sigma.dim();
        let mut r = self.target.d(&self.value(sigma)?);
        if k > 0 {
            for i in 0..=k {
                let c = (sign(k as i64) * sign(i as i64)) as f64;
                r.add_scaled(&self.value(&sigma.face(i))?, &c);
            }
        }
        for p in 0..=k {
            let q = k - p;
            let c = sign(p as i64 * (1 - q as i64)) as f64;
            let prod = self.target.mul(&self.value(&sigma.front(p))?, &self.value(&sigma.back(q))?);
            r.add_scaled(&prod, &c);
        }
        Ok(r)
    }

    /// Number of simplices with stored values.
    pub fn cached(&self) -> usize {
        self.raw.read().unwrap().len()
    }
}

fn check_flat(alpha: &Connection, cap: u32, allow_non_flat: bool) -> Result<()> {
    if allow_non_flat {
        return Ok(());
    }
    let r = alpha.flatness_residual(Caps { arity: alpha.algebra.max_arity().max(1), weight: cap })?;
    if r > 1e-9 {
        return Err(Error::Argument(format!("connection is not flat (curvature {:.3e})", r)));
    }
    Ok(())
}

impl HolonomyCochain<CobarTarget> {
    /// `hol-infinity` of a connection, values in `U-infinity(g)`.
    pub fn infinity(alpha: &Connection, cap: u32, spec: QuadSpec, allow_non_flat: bool) -> Result<Self> {
        check_flat(alpha, cap, allow_non_flat)?;
        let g = &alpha.algebra;
        let letters = alpha
            .strictified(cap)
            .into_iter()
            .map(|(w, form)| Letter {
                degree: w.iter().map(|&i| g.sdeg(i)).sum::<i64>() + 1,
                weight: w.iter().map(|&i| g.weight(i)).sum(),
                key: w,
                form,
            })
            .collect();
        Ok(HolonomyCochain::new(CobarTarget { g: g.clone(), cap }, letters, cap, spec))
    }
}

impl HolonomyCochain<PbwTarget> {
    /// `hol` of a connection over a strict dg Lie algebra, values in `U(g)`.
    pub fn strict(alpha: &Connection, cap: u32, spec: QuadSpec, allow_non_flat: bool) -> Result<Self> {
        let lie = alpha.lie.clone().ok_or_else(|| Error::Argument("connection is not over a strict Lie algebra".into()))?;
        check_flat(alpha, cap, allow_non_flat)?;
        let letters = alpha
            .terms
            .iter()
            .map(|(x, form)| Letter { key: *x, degree: lie.degree(*x), weight: lie.space.weight(*x), form: form.clone() })
            .collect();
        Ok(HolonomyCochain::new(PbwTarget { env: Enveloping::new(lie), cap }, letters, cap, spec))
    }
}

/// `1 + h(sigma)` for `hol-infinity`.
pub fn hol_infinity(alpha: &Connection, sigma: &SingularSimplex, cap: u32, spec: &QuadSpec) -> Result<CobarElem<Word, f64>> {
    HolonomyCochain::infinity(alpha, cap, spec.clone(), false)?.transport(sigma)
}

/// `1 + h(sigma)` for the strict holonomy in `U(g)`.
pub fn hol_dgla(alpha: &Connection, sigma: &SingularSimplex, cap: u32, spec: &QuadSpec) -> Result<UElem<f64>> {
    HolonomyCochain::strict(alpha, cap, spec.clone(), false)?.transport(sigma)
}

/// `U(rho)(hol-infinity) - hol` in PBW coordinates, largest coefficient.
pub fn compatibility_check(alpha: &Connection, sigma: &SingularSimplex, cap: u32, spec: &QuadSpec) -> Result<f64> {
    let lie = alpha.lie.clone().ok_or_else(|| Error::Argument("connection is not over a strict Lie algebra".into()))?;
    let env = Enveloping::new(lie);
    let a = crate::functors::strict::u_rho(&env, &hol_infinity(alpha, sigma, cap, spec)?, Some(cap));
    let b = hol_dgla(alpha, sigma, cap, spec)?;
    Ok(Enveloping::forget_weight(&Lin::diff(&a, &b)).max_abs())
}

/// `hol-infinity_{f^* alpha}(sigma) - hol-infinity_alpha(f o sigma)` for an
/// affine chart map `f(y) = a y + b`.
pub fn naturality_check(
    alpha: &Connection,
    a: &[Vec<Scalar>],
    b: &[Scalar],
    sigma: &SingularSimplex,
    cap: u32,
    spec: &QuadSpec,
) -> Result<f64> {
    let pulled = alpha.pullback_affine(a, b);
    let lhs = hol_infinity(&pulled, sigma, cap, spec)?;
    let rhs = hol_infinity(alpha, &sigma.post_compose(a.to_vec(), b.to_vec()), cap, spec)?;
    Ok(Lin::diff(&lhs, &rhs).max_abs())
}

/// Parallel transport in `U(g)` along a path by the ODE, for a connection of
/// 1-forms over a strict Lie algebra.
pub fn ode_transport(alpha: &Connection, sigma: &SingularSimplex, cap: u32, ode: &OdeSpec) -> Result<UElem<f64>> {
    let lie = alpha.lie.clone().ok_or_else(|| Error::Argument("connection is not over a strict Lie algebra".into()))?;
    if sigma.dim() != 1 {
        return Err(Error::Argument("parallel transport needs a path".into()));
    }
    let alg = PbwTarget { env: Enveloping::new(lie), cap };
    let coeff = |t: f64| -> UElem<f64> {
        let x = sigma.eval(&[t]);
        let jac = sigma.jacobian(&[t]);
        let mut out = Lin::zero();
        for (i, f) in &alpha.terms {
            if f.degree != 1 {
                continue;
            }
            let v = f.pulled_component(&f.components_at(&x), &jac, &[0]);
            out.add_scaled(&alg.env.gen(*i), &v);
        }
        out
    };
    ode_transport_path(&alg, &coeff, ode)
}

/// Finite set of simplices closed under faces.
#[derive(Clone, Debug, Default)]
pub struct SimplicialData {
    pub simplices: BTreeMap<String, SingularSimplex>,
    pub faces: BTreeMap<String, Vec<String>>,
}

impl SimplicialData {
    pub fn closure(top: &[SingularSimplex]) -> Self {
        let mut data = SimplicialData::default();
        let mut stack: Vec<SingularSimplex> = top.to_vec();
        while let Some(s) = stack.pop() {
            let key = s.key();
            if data.simplices.contains_key(&key) {
                continue;
            }
            let mut fk = Vec::new();
            if s.dim() > 0 {
                for i in 0..=s.dim() {
                    let f = s.face(i);
                    fk.push(f.key());
                    stack.push(f);
                }
            }
            data.faces.insert(key.clone(), fk);
            data.simplices.insert(key, s);
        }
        data
    }

    pub fn contains(&self, sigma: &SingularSimplex) -> bool {
        self.simplices.contains_key(&sigma.key())
    }

    /// `d d = 0` on every stored simplex, as formal sums of keys.
    pub fn boundary_squared_vanishes(&self) -> bool {
        for fs in self.faces.values() {
            let mut acc: BTreeMap<&str, i64> = BTreeMap::new();
            for (i, f) in fs.iter().enumerate() {
                for (j, ff) in self.faces[f].iter().enumerate() {
                    *acc.entry(ff.as_str()).or_default() += sign((i + j) as i64);
                }
            }
            if acc.values().any(|&c| c != 0) {
                return false;
            }
        }
        true
    }
}

/// Maurer-Cartan residual of `h` on `sigma`, requiring every face, front and
/// back face of `sigma` to be stored in `data`.
pub fn mc_check_on_simplex<T: Target>(h: &HolonomyCochain<T>, sigma: &SingularSimplex, data: &SimplicialData) -> Result<f64> {
    let k = sigma.dim();
    let mut needed = vec![sigma.clone()];
    for i in 0..=k {
        if k > 0 {
            needed.push(sigma.face(i));
        }
        needed.push(sigma.front(i));
        needed.push(sigma.back(i));
    }
    for s in &needed {
        if !data.contains(s) {
            return Err(Error::Argument(format!("simplex data lacks the face {}", s.key())));
        }
    }
    h.mc_residual(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::GradedSpace;
    use crate::poly::Poly;
    use crate::scalar::{q, to_f64};

    fn spec() -> QuadSpec {
        QuadSpec::default()
    }

    fn path(a: Scalar, b: Scalar) -> SingularSimplex {
        SingularSimplex::affine(vec![vec![a], vec![b]]).unwrap()
    }

    fn n3_flat() -> Connection {
        let x = Poly::var(2, 0);
        let c = CoordinateForm::poly(2, 1, vec![(vec![1], x)]);
        let n3 = DgLie::upper_triangular(3);
        Connection::strict(&n3, vec![(0, CoordinateForm::dx(2, 0)), (1, CoordinateForm::dx(2, 1)), (2, c)], 2).unwrap()
    }

    fn free_path_connection() -> Connection {
        let t = Poly::var(1, 0);
        let a = CoordinateForm::poly(1, 1, vec![(vec![0], Poly::constant(1, qi(1)).add(&t))]);
        let b = CoordinateForm::poly(1, 1, vec![(vec![0], t.mul(&t).scale(&qi(3)))]);
        Connection::strict(&DgLie::free_nilpotent(2, 3), vec![(0, a), (1, b)], 1).unwrap()
    }

    fn sphere() -> Connection {
        let v = GradedSpace::from_degrees("S2", &[("e2", 2), ("e3", 3)]);
        let vol = CoordinateForm::poly(2, 2, vec![(vec![0, 1], Poly::constant(2, qi(1)))]);
        let m = SullivanModel::new(v, vec![(1, Lin::basis(vec![0, 0]))], true)
            .unwrap()
            .with_realization(vec![vol, CoordinateForm::zero(2, 3)])
            .unwrap();
        Connection::from_sullivan(&m).unwrap()
    }

    fn triangle() -> SingularSimplex {
        SingularSimplex::affine(vec![vec![qi(0), qi(0)], vec![qi(1), q(1, 2)], vec![q(3, 10), qi(1)]]).unwrap()
    }

    #[test]
    fn zero_connection_gives_unit() {
        let alpha = Connection::strict(&DgLie::upper_triangular(3), vec![], 2).unwrap();
        let v = hol_infinity(&alpha, &triangle(), 3, &spec()).unwrap();
        assert_eq!(v, Lin::term(vec![], 1.0));
        let u = hol_dgla(&alpha, &triangle().face(0), 3, &spec()).unwrap();
        assert_eq!(u, Lin::term((0, vec![]), 1.0));
    }

    #[test]
    fn abelian_path_is_minus_the_integral() {
        let g = LInftyAlgebra::abelian(GradedSpace::from_degrees("a", &[("x", 0)]));
        let t = Poly::var(1, 0);
        let a = CoordinateForm::poly(1, 1, vec![(vec![0], Poly::constant(1, qi(1)).add(&t))]);
        let alpha = Connection::new(g, vec![(0, a)], 1).unwrap();
        let v = hol_infinity(&alpha, &path(q(-1, 2), qi(1)), 1, &spec()).unwrap();
        // int_{-1/2}^{1} (1 + x) dx = 15/8
        assert!((v.coeff(&vec![vec![0]]) + 15.0 / 8.0).abs() < 1e-14);
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn constant_nilpotent_generator_exponentiates() {
        let xi = DgLie::free_nilpotent(1, 1);
        let alpha = Connection::strict(&xi, vec![(0, CoordinateForm::dx(1, 0))], 1).unwrap();
        let sigma = path(qi(0), q(3, 2));
        let h = hol_dgla(&alpha, &sigma, 5, &QuadSpec { max_n: 5, ..spec() }).unwrap();
        assert!(matches!(hol_dgla(&alpha, &sigma, 5, &spec()), Err(Error::Capability(_))));
        let o = ode_transport(&alpha, &sigma, 5, &OdeSpec::default()).unwrap();
        let mut fact = 1.0;
        for n in 0..=5u32 {
            if n > 0 {
                fact *= n as f64;
            }
            let want = (-1.5f64).powi(n as i32) / fact;
            let key = (n, vec![0; n as usize]);
            assert!((h.coeff(&key) - want).abs() < 1e-13, "n = {}", n);
            assert!((o.coeff(&key) - want).abs() < 1e-11, "n = {}", n);
        }
    }

    #[test]
    fn ode_and_chen_series_agree() {
        let alpha = free_path_connection();
        let sigma = path(q(-1, 2), qi(1));
        let h = hol_dgla(&alpha, &sigma, 3, &spec()).unwrap();
        let o = ode_transport(&alpha, &sigma, 3, &OdeSpec::default()).unwrap();
        assert!(Lin::diff(&h, &o).max_abs() < 1e-8);
        assert!(ode_transport(&alpha, &triangle(), 3, &OdeSpec::default()).is_err());
    }

    #[test]
    fn picard_series_matches_exact_integration() {
        let alpha = free_path_connection();
        let sigma = path(q(-1, 2), qi(1));
        let exact = hol_dgla(&alpha, &sigma, 3, &spec()).unwrap();
        let terms = alpha
            .terms
            .iter()
            .map(|(x, f)| {
                let g = f.clone();
                (*x, CoordinateForm::from_fn(1, 1, false, Arc::new(move |p: &[f64]| g.components_at(p))))
            })
            .collect();
        let opaque = Connection::strict(&DgLie::free_nilpotent(2, 3), terms, 1).unwrap();
        let h = HolonomyCochain::strict(&opaque, 3, spec(), true).unwrap();
        assert!(Lin::diff(&h.transport(&sigma).unwrap(), &exact).max_abs() < 1e-12);
    }

    #[test]
    fn chen_multiplicativity_on_concatenated_paths() {
        let alpha = free_path_connection();
        let h = HolonomyCochain::strict(&alpha, 3, spec(), false).unwrap();
        let (a, b, c) = (q(-1, 2), q(1, 5), qi(1));
        let whole = h.transport(&path(a.clone(), c.clone())).unwrap();
        let first = h.transport(&path(a, b.clone())).unwrap();
        let second = h.transport(&path(b, c)).unwrap();
        let prod = Target::mul(&h.target, &first, &second);
        assert!(Lin::diff(&whole, &prod).max_abs() < 1e-12);
    }

    #[test]
    fn truncation_is_coherent() {
        let alpha = n3_flat();
        let hi = hol_dgla(&alpha, &triangle().face(2), 2, &spec()).unwrap();
        let lo = hol_dgla(&alpha, &triangle().face(2), 1, &spec()).unwrap();
        assert!(Lin::diff(&Enveloping::truncate(&hi, 1), &lo).max_abs() < 1e-15);
        let hi = hol_infinity(&alpha, &triangle(), 3, &spec()).unwrap();
        let lo = hol_infinity(&alpha, &triangle(), 2, &spec()).unwrap();
        let g = &alpha.algebra;
        let cut = hi.filter(|w| w.iter().flatten().map(|&i| g.weight(i)).sum::<u32>() <= 2);
        assert!(Lin::diff(&cut, &lo).max_abs() < 1e-15);
    }

    #[test]
    fn strict_and_infinity_holonomies_are_compatible() {
        let alpha = n3_flat();
        assert!(compatibility_check(&alpha, &triangle(), 3, &spec()).unwrap() < 1e-9);
        assert!(compatibility_check(&alpha, &triangle().face(1), 3, &spec()).unwrap() < 1e-9);
        let alpha = free_path_connection();
        assert!(compatibility_check(&alpha, &path(q(-1, 2), qi(1)), 3, &spec()).unwrap() < 1e-9);
    }

    #[test]
    fn naturality_under_affine_maps() {
        let alpha = n3_flat();
        let id = vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]];
        assert_eq!(naturality_check(&alpha, &id, &[qi(0), qi(0)], &triangle(), 3, &spec()).unwrap(), 0.0);
        let a = vec![vec![qi(2), qi(1)], vec![qi(0), qi(1)]];
        assert!(naturality_check(&alpha, &a, &[qi(1), qi(0)], &triangle(), 3, &spec()).unwrap() < 1e-9);
        // a surjection R^2 -> R^1 reparameterizing a path
        let alpha = free_path_connection();
        let a = vec![vec![qi(2), q(-1, 3)]];
        let sigma = SingularSimplex::affine(vec![vec![qi(0), qi(0)], vec![q(1, 4), q(1, 2)]]).unwrap();
        assert!(naturality_check(&alpha, &a, &[q(-1, 3)], &sigma, 3, &spec()).unwrap() < 1e-9);
        // collapse to a point: both sides are the unit
        let a = vec![vec![qi(0)]];
        let pulled = alpha.pullback_affine(&a, &[q(1, 2)]);
        let v = hol_infinity(&pulled, &path(qi(0), qi(1)), 3, &spec()).unwrap();
        assert_eq!(v, Lin::term(vec![], 1.0));
        assert_eq!(naturality_check(&alpha, &a, &[q(1, 2)], &path(qi(0), qi(1)), 3, &spec()).unwrap(), 0.0);
    }

    #[test]
    fn sphere_twisting_cochain_on_simplices() {
        let alpha = sphere();
        assert_eq!(alpha.flatness_residual(Caps { arity: 2, weight: 4 }).unwrap(), 0.0);
        let h = HolonomyCochain::infinity(&alpha, 2, spec(), false).unwrap();
        let tri = triangle();
        let tet = SingularSimplex::affine(vec![
            vec![qi(0), qi(0)],
            vec![qi(1), q(1, 2)],
            vec![q(3, 10), qi(1)],
            vec![q(-1, 2), q(1, 3)],
        ])
        .unwrap();
        let data = SimplicialData::closure(std::slice::from_ref(&tet));
        assert!(data.boundary_squared_vanishes());
        for s in [tet.front(0), tet.front(1), tri.clone(), tet.clone()] {
            let r = mc_check_on_simplex(&h, &s, &SimplicialData::closure(&[s.clone(), tet.clone()])).unwrap();
            assert!(r <= 1e-6, "dim {} residual {}", s.dim(), r);
        }
        // weight-one part of the value on a triangle is psi_1(vol) = signed area
        let area = to_f64(&crate::forms::det_exact(&[vec![qi(1), q(3, 10)], vec![q(1, 2), qi(1)]])) / 2.0;
        assert!((h.value(&tri).unwrap().coeff(&vec![vec![0]]) - area).abs() < 1e-14);
        assert!(h.cached() > 0);
    }

    #[test]
    fn strict_cochain_on_a_triangle() {
        let h = HolonomyCochain::strict(&n3_flat(), 3, spec(), false).unwrap();
        let tri = triangle();
        let data = SimplicialData::closure(std::slice::from_ref(&tri));
        assert!(mc_check_on_simplex(&h, &tri, &data).unwrap() < 1e-12);
        let v = mc_check_on_simplex(&h, &tri.front(0), &data).unwrap();
        assert_eq!(v, 0.0);
        let edge_only = SimplicialData::closure(&[tri.face(0)]);
        assert!(matches!(mc_check_on_simplex(&h, &tri, &edge_only), Err(Error::Argument(_))));
    }

    #[test]
    fn non_flat_connections_need_the_override() {
        let n3 = DgLie::upper_triangular(3);
        let alpha =
            Connection::strict(&n3, vec![(0, CoordinateForm::dx(2, 0)), (1, CoordinateForm::dx(2, 1))], 2).unwrap();
        assert!(alpha.flatness_residual(Caps { arity: 2, weight: 3 }).unwrap() > 0.5);
        assert!(HolonomyCochain::strict(&alpha, 3, spec(), false).is_err());
        let h = HolonomyCochain::strict(&alpha, 3, spec(), true).unwrap();
        assert!(h.mc_residual(&triangle()).unwrap() > 1e-3);
    }

    #[test]
    fn degree_mismatch_is_rejected() {
        let g = LInftyAlgebra::abelian(GradedSpace::from_degrees("a", &[("x", 0)]));
        let vol = CoordinateForm::poly(2, 2, vec![(vec![0, 1], Poly::constant(2, qi(1)))]);
        assert!(Connection::new(g, vec![(0, vol)], 2).is_err());
    }

    #[test]
    fn pushforward_sign_rule() {
        assert_eq!(pushforward_sign(&[0, 0], &[1, 1]), 1);
        // odd letter after a 2-form
        assert_eq!(pushforward_sign(&[-1, -1], &[2, 2]), -1);
        assert_eq!(pushforward_sign(&[0, -1], &[1, 2]), 1);
    }
}
