//! Iterated integrals of differential forms over singular simplices:
//! Igusa's cube-to-simplex maps and the components `psi_n` of the
//! A-infinity de Rham map `(sOmega)^{(x)n} -> sC`.
//!
//! `psi_n(sa_1 .. sa_n)(sigma)` for a `k`-simplex integrates
//! `a_1 x ... x a_n` pulled back along
//! `(x, s_1 >= ... >= s_n) -> (sigma(Theta(x)(s_1)), ..., sigma(Theta(x)(s_n)))`
//! over `I^{k-1} x Delta_n`. On the segment `j` of the path (between the
//! breakpoints `(k-j-1)/k` and `(k-j)/k`) we substitute
//! `z = ((k-j) - k s) x_{j+1}`, which makes all the maxima in `pi_k`
//! piecewise linear along hyperplanes; the domain then splits into order
//! chambers `{0 <= v_{o_1} <= ... <= v_{o_m} <= 1}` on which the integrand
//! is smooth (polynomial for polynomial data).

use crate::error::{Error, Result};
use crate::forms::{merge_sign, subsets, CoordinateForm};
use crate::poly::Poly;
use crate::quadrature::{integrate_ordered_simplex, QuadSpec};
use crate::scalar::{qi, sign, to_f64, Scalar};
use crate::simplex::SingularSimplex;
use num_traits::Zero;
use rayon::prelude::*;

/// `pi_k(x)_i = max(x_i, ..., x_k)`.
pub fn igusa_pi(x: &[f64]) -> Result<Vec<f64>> {
    if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::Argument("igusa_pi expects a point of the unit cube".into()));
    }
    let mut t = x.to_vec();
    for i in (0..x.len().saturating_sub(1)).rev() {
        t[i] = t[i].max(t[i + 1]);
    }
    Ok(t)
}

/// The piecewise linear path `lambda_(k)(x)(s)` in `I^k` through
/// `x_1 e_1 + ... + x_j e_j` at `s = (k - j)/k` (with `x_k = 1`).
pub fn igusa_lambda(k: usize, x: &[f64], s: f64) -> Vec<f64> {
    assert_eq!(x.len() + 1, k, "lambda_(k) takes a point of I^(k-1)");
    let mut full = x.to_vec();
    full.push(1.0);
    let s = s.clamp(0.0, 1.0);
    // segment j: s in [(k-j-1)/k, (k-j)/k]
    let pos = (k as f64) * (1.0 - s);
    let j = (pos.floor() as usize).min(k - 1);
    let mu = pos - j as f64;
    let mut y = vec![0.0; k];
    y[..j].copy_from_slice(&full[..j]);
    y[j] = mu * full[j];
    y
}

/// `Theta_(k)(x)(s) = pi_k(lambda_(k)(x)(s))`.
pub fn igusa_theta(k: usize, x: &[f64], s: f64) -> Result<Vec<f64>> {
    igusa_pi(&igusa_lambda(k, x, s))
}

/// Adjoint `Theta_k : I^k -> Delta_k`, with the path time as last coordinate.
pub fn theta_adjoint(k: usize, p: &[f64]) -> Result<Vec<f64>> {
    if p.len() != k || k == 0 {
        return Err(Error::Argument("theta_adjoint expects a point of I^k with k >= 1".into()));
    }
    igusa_theta(k, &p[..k - 1], p[k - 1])
}

/// `(-1)^{sum_i [a_i](count - i)}` for suspended degrees `[a_i]`.
pub fn chen_sign(sdegs: &[i64], count: usize) -> i64 {
    let e: i64 = sdegs.iter().enumerate().map(|(i, d)| d * (count as i64 - (i as i64 + 1))).sum();
    sign(e)
}

/// One smoothness chamber of the unfolded domain.
#[derive(Clone, Debug)]
struct Cell {
    /// Variable indices from smallest to largest value.
    order: Vec<usize>,
    /// Per form, per simplex coordinate: the variable giving `t_l` (None: 0).
    select: Vec<Vec<Option<usize>>>,
}

fn nondecreasing(n: usize, top: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in nondecreasing(n - 1, top) {
        let lo = rest.last().copied().unwrap_or(0);
        for j in lo..top {
            let mut v = rest.clone();
            v.push(j);
            out.push(v);
        }
    }
    out
}

fn linear_extensions(m: usize, less: &[(usize, usize)]) -> Vec<Vec<usize>> {
    fn rec(m: usize, less: &[(usize, usize)], cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for v in 0..m {
            if used[v] {
                continue;
            }
            // every variable required below v must already be placed
            if less.iter().any(|&(a, b)| b == v && !used[a]) {
                continue;
            }
            used[v] = true;
            cur.push(v);
            rec(m, less, cur, used, out);
            cur.pop();
            used[v] = false;
        }
    }
    let mut out = Vec::new();
    rec(m, less, &mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

/// Chambers for `k`-simplices and `n` forms. Variables: `x_1..x_{k-1}` are
/// `0..k-1`, `z_i` is `k - 1 + i`.
fn cells(k: usize, n: usize) -> Vec<Cell> {
    let m = k - 1 + n;
    let mut out = Vec::new();
    for seg in nondecreasing(n, k) {
        let mut less = Vec::new();
        for i in 0..n {
            if seg[i] < k - 1 {
                less.push((k - 1 + i, seg[i]));
            }
            if i + 1 < n && seg[i] == seg[i + 1] {
                less.push((k - 1 + i, k + i));
            }
        }
        for order in linear_extensions(m, &less) {
            let mut rank = vec![0; m];
            for (r, &v) in order.iter().enumerate() {
                rank[v] = r;
            }
            let select = (0..n)
                .map(|i| {
                    let j = seg[i];
                    (0..k)
                        .map(|l| {
                            if l > j {
                                return None;
                            }
                            let mut best = k - 1 + i;
                            for xv in l..j {
                                if rank[xv] > rank[best] {
                                    best = xv;
                                }
                            }
                            Some(best)
                        })
                        .collect()
                })
                .collect();
            out.push(Cell { order, select });
        }
    }
    out
}

fn degree_match(forms: &[&CoordinateForm], k: usize) -> bool {
    let total: usize = forms.iter().map(|f| f.degree).sum();
    let n = forms.len();
    if n >= 2 && forms.iter().any(|f| f.degree == 0) {
        return false;
    }
    total + 1 == k + n
}

fn check_caps(forms: &[&CoordinateForm], sigma: &SingularSimplex, spec: &QuadSpec) -> Result<()> {
    if forms.is_empty() {
        return Err(Error::Argument("psi needs at least one form".into()));
    }
    if sigma.dim() > spec.max_k || forms.len() > spec.max_n {
        return Err(Error::Capability(format!(
            "iterated integral with k = {}, n = {} exceeds the configured maxima k <= {}, n <= {}",
            sigma.dim(),
            forms.len(),
            spec.max_k,
            spec.max_n
        )));
    }
    if forms.iter().any(|f| f.dim != sigma.ambient()) {
        return Err(Error::Argument("form and simplex live on different charts".into()));
    }
    Ok(())
}

/// Overall sign: Chen's sign, fibre-first orientation and the orientation
/// reversal of each substitution `s_i -> z_i`.
fn overall_sign(forms: &[&CoordinateForm], k: usize) -> i64 {
    let n = forms.len();
    let sd: Vec<i64> = forms.iter().map(|f| f.degree as i64 - 1).collect();
    chen_sign(&sd, n) * sign((k * n) as i64)
}

fn psi_one_exact(a: &CoordinateForm, sigma: &SingularSimplex) -> Option<Scalar> {
    let k = sigma.dim();
    let p = sigma.as_poly()?;
    if k == 0 {
        if a.degree != 0 {
            return Some(Scalar::zero());
        }
        return Some(a.pullback_poly(&p)?.top_coefficient()?.eval_exact(&[]));
    }
    if a.degree != k {
        return Some(Scalar::zero());
    }
    let top = a.pullback_poly(&p)?.top_coefficient()?;
    Some(top.integrate_ordered_simplex() * qi(sign(k as i64)))
}

fn psi_one_numeric(a: &CoordinateForm, sigma: &SingularSimplex, spec: &QuadSpec) -> Result<f64> {
    let k = sigma.dim();
    if k == 0 {
        if a.degree != 0 {
            return Ok(0.0);
        }
        return Ok(a.components_at(&sigma.eval(&[]))[0]);
    }
    if a.degree != k {
        return Ok(0.0);
    }
    let dirs: Vec<usize> = (0..k).collect();
    let f = |w: &[f64]| {
        // t_1 >= ... >= t_k from w_1 <= ... <= w_k
        let t: Vec<f64> = w.iter().rev().copied().collect();
        let y = sigma.eval(&t);
        let j = sigma.jacobian(&t);
        a.pulled_component(&a.components_at(&y), &j, &dirs)
    };
    Ok(integrate_ordered_simplex(&f, k, spec)? * sign(k as i64) as f64)
}

/// Substitution turning the chamber into `{1 >= t_1 >= ... >= t_m >= 0}`.
fn chamber_substitution(order: &[usize]) -> Vec<Poly> {
    let m = order.len();
    let mut subs = vec![Poly::zero(m); m];
    for (l, &v) in order.iter().enumerate() {
        subs[v] = Poly::var(m, m - 1 - l);
    }
    subs
}

fn unfolded_exact(forms: &[&CoordinateForm], sigma: &SingularSimplex) -> Option<Scalar> {
    let k = sigma.dim();
    let n = forms.len();
    let m = k - 1 + n;
    let sp = sigma.as_poly()?;
    let mut total = Scalar::zero();
    for cell in cells(k, n) {
        let mut acc: Option<CoordinateForm> = None;
        for (i, f) in forms.iter().enumerate() {
            let t: Vec<Poly> = cell.select[i]
                .iter()
                .map(|s| match s {
                    Some(v) => Poly::var(m, *v),
                    None => Poly::zero(m),
                })
                .collect();
            let g: Vec<Poly> = sp.iter().map(|c| c.compose(&t)).collect();
            let pb = f.pullback_poly(&g)?;
            acc = Some(match acc {
                None => pb,
                Some(a) => a.wedge(&pb),
            });
            if acc.as_ref().is_some_and(|a| a.is_zero()) {
                break;
            }
        }
        let acc = acc?;
        if acc.is_zero() {
            continue;
        }
        let top = acc.top_coefficient()?;
        if top.is_zero() {
            continue;
        }
        total += top.compose(&chamber_substitution(&cell.order)).integrate_ordered_simplex();
    }
    Some(total)
}

/// Top coefficient of `f_1 ^ ... ^ f_n` from dense component vectors.
fn wedge_top(factors: &[(Vec<Vec<usize>>, Vec<f64>)], m: usize) -> f64 {
    fn rec(factors: &[(Vec<Vec<usize>>, Vec<f64>)], used: &[usize], acc: f64, out: &mut f64) {
        match factors.split_first() {
            None => *out += acc,
            Some(((sets, vals), rest)) => {
                for (s, v) in sets.iter().zip(vals) {
                    if *v == 0.0 {
                        continue;
                    }
                    let sg = merge_sign(used, s);
                    if sg == 0 {
                        continue;
                    }
                    let mut u: Vec<usize> = used.iter().chain(s).copied().collect();
                    u.sort();
                    rec(rest, &u, acc * v * sg as f64, out);
                }
            }
        }
    }
    let mut out = 0.0;
    let _ = m;
    rec(factors, &[], 1.0, &mut out);
    out
}

fn unfolded_numeric(forms: &[&CoordinateForm], sigma: &SingularSimplex, spec: &QuadSpec) -> Result<f64> {
    let k = sigma.dim();
    let n = forms.len();
    let m = k - 1 + n;
    let all = cells(k, n);
    let parts: Vec<Result<f64>> = all
        .par_iter()
        .map(|cell| {
            // variables each factor depends on, in increasing order
            let supports: Vec<Vec<usize>> = cell
                .select
                .iter()
                .map(|sel| {
                    let mut v: Vec<usize> = sel.iter().flatten().copied().collect();
                    v.sort();
                    v.dedup();
                    v
                })
                .collect();
            if forms.iter().zip(&supports).any(|(f, s)| f.degree > s.len()) {
                return Ok(0.0);
            }
            let local_sets: Vec<Vec<Vec<usize>>> =
                forms.iter().zip(&supports).map(|(f, s)| subsets(s.len(), f.degree)).collect();
            let integrand = |w: &[f64]| {
                let mut v = vec![0.0; m];
                for (l, &var) in cell.order.iter().enumerate() {
                    v[var] = w[l];
                }
                let mut factors = Vec::with_capacity(n);
                for (i, f) in forms.iter().enumerate() {
                    let t: Vec<f64> = cell.select[i].iter().map(|s| s.map_or(0.0, |x| v[x])).collect();
                    let y = sigma.eval(&t);
                    let js = sigma.jacobian(&t);
                    // Jacobian of the factor with respect to its support variables
                    let sup = &supports[i];
                    let jac: Vec<Vec<f64>> = js
                        .iter()
                        .map(|row| {
                            sup.iter()
                                .map(|&var| {
                                    cell.select[i]
                                        .iter()
                                        .enumerate()
                                        .filter(|(_, s)| **s == Some(var))
                                        .map(|(l, _)| row[l])
                                        .sum()
                                })
                                .collect()
                        })
                        .collect();
                    let comps = f.components_at(&y);
                    let sets: Vec<Vec<usize>> =
                        local_sets[i].iter().map(|ls| ls.iter().map(|&a| sup[a]).collect()).collect();
                    let vals: Vec<f64> =
                        local_sets[i].iter().map(|ls| f.pulled_component(&comps, &jac, ls)).collect();
                    factors.push((sets, vals));
                }
                wedge_top(&factors, m)
            };
            integrate_ordered_simplex(&integrand, m, spec)
        })
        .collect();
    let mut total = 0.0;
    for p in parts {
        total += p?;
    }
    Ok(total)
}

/// `psi_n(sa_1 .. sa_n)(sigma)` exactly, for polynomial forms and maps.
pub fn psi_exact(forms: &[&CoordinateForm], sigma: &SingularSimplex, spec: &QuadSpec) -> Result<Scalar> {
    check_caps(forms, sigma, spec)?;
    let not_poly = || Error::Capability("exact iterated integrals need polynomial forms and maps".into());
    if forms.len() == 1 {
        return psi_one_exact(forms[0], sigma).ok_or_else(not_poly);
    }
    let k = sigma.dim();
    if k == 0 || !degree_match(forms, k) || forms.iter().any(|f| f.is_zero()) {
        return Ok(Scalar::zero());
    }
    let v = unfolded_exact(forms, sigma).ok_or_else(not_poly)?;
    Ok(v * qi(overall_sign(forms, k)))
}

/// `psi_n(sa_1 .. sa_n)(sigma)`, exact when possible, by quadrature otherwise.
pub fn psi(forms: &[&CoordinateForm], sigma: &SingularSimplex, spec: &QuadSpec) -> Result<f64> {
    check_caps(forms, sigma, spec)?;
    if sigma.is_polynomial() && forms.iter().all(|f| f.is_poly()) {
        return psi_exact(forms, sigma, spec).map(|v| to_f64(&v));
    }
    if forms.len() == 1 {
        return psi_one_numeric(forms[0], sigma, spec);
    }
    let k = sigma.dim();
    if k == 0 || !degree_match(forms, k) || forms.iter().any(|f| f.is_zero()) {
        return Ok(0.0);
    }
    Ok(unfolded_numeric(forms, sigma, spec)? * overall_sign(forms, k) as f64)
}

/// `(S o C)(sa_1 .. sa_n)(sigma)` through the unfolded integral for any `n`
/// (for `n = 1` this agrees with `psi_1` except on functions).
pub fn chen_integral(forms: &[&CoordinateForm], sigma: &SingularSimplex, spec: &QuadSpec) -> Result<f64> {
    check_caps(forms, sigma, spec)?;
    let k = sigma.dim();
    if k == 0 || forms.iter().any(|f| f.degree == 0) || !degree_match(forms, k) {
        return Ok(0.0);
    }
    Ok(unfolded_numeric(forms, sigma, spec)? * overall_sign(forms, k) as f64)
}

/// Coboundary `(delta c)(sigma) = sum_i (-1)^i c(d_i sigma)`.
pub fn coboundary(c: &dyn Fn(&SingularSimplex) -> Result<f64>, sigma: &SingularSimplex) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..=sigma.dim() {
        total += sign(i as i64) as f64 * c(&sigma.face(i))?;
    }
    Ok(total)
}

/// Instance of the A-infinity relation in arity two on a simplex, for the
/// bar conventions `b_1(sx) = -s(m_1 x)`, `b_2(sx, sy) = (-1)^{|x|} s(xy)`:
/// `(-1)^{|a|} psi_1(a b) + psi_2(da, b) + (-1)^{|a|-1} psi_2(a, db)
///  + delta psi_2(a, b) - (-1)^{|a|} psi_1(a) cup psi_1(b)`.
pub fn a_infinity_residual(a: &CoordinateForm, b: &CoordinateForm, sigma: &SingularSimplex, spec: &QuadSpec) -> Result<f64> {
    a_infinity_terms(a, b, sigma, spec, true)
}

/// The same relation without the `psi_2` terms, which is the failure of
/// `psi_1` to be multiplicative.
pub fn cup_defect_without_psi2(a: &CoordinateForm, b: &CoordinateForm, sigma: &SingularSimplex, spec: &QuadSpec) -> Result<f64> {
    a_infinity_terms(a, b, sigma, spec, false)
}

fn a_infinity_terms(a: &CoordinateForm, b: &CoordinateForm, sigma: &SingularSimplex, spec: &QuadSpec, with_psi2: bool) -> Result<f64> {
    let e = sign(a.degree as i64) as f64;
    let k = sigma.dim();
    let mut r = e * psi(&[&a.wedge(b)], sigma, spec)?;
    if a.degree + b.degree == k {
        let p = a.degree;
        let front = psi(&[a], &sigma.front(p), spec)?;
        let back = psi(&[b], &sigma.back(k - p), spec)?;
        r -= e * front * back;
    }
    if with_psi2 {
        let da = a.d();
        let db = b.d();
        r += psi(&[&da, b], sigma, spec)?;
        r -= e * psi(&[a, &db], sigma, spec)?;
        r += coboundary(&|s: &SingularSimplex| psi(&[a, b], s, spec), sigma)?;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        crate::scalar::q(n, d)
    }

    #[test]
    fn pi_examples() {
        assert_eq!(igusa_pi(&[0.3, 0.7]).unwrap(), vec![0.7, 0.7]);
        assert_eq!(igusa_pi(&[0.9, 0.5, 0.1]).unwrap(), vec![0.9, 0.5, 0.1]);
        assert_eq!(igusa_pi(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert!(igusa_pi(&[1.5]).is_err());
    }

    #[test]
    fn lambda_breakpoints() {
        assert_eq!(igusa_lambda(1, &[], 0.0), vec![1.0]);
        assert_eq!(igusa_lambda(1, &[], 1.0), vec![0.0]);
        assert_eq!(igusa_lambda(1, &[], 0.25), vec![0.75]);
        assert_eq!(igusa_lambda(2, &[0.4], 0.5), vec![0.4, 0.0]);
        let x = [0.2, 0.9];
        let close = |a: Vec<f64>, b: [f64; 3]| a.iter().zip(b).all(|(u, v)| (u - v).abs() < 1e-12);
        assert!(close(igusa_lambda(3, &x, 0.0), [0.2, 0.9, 1.0]));
        assert!(close(igusa_lambda(3, &x, 1.0 / 3.0), [0.2, 0.9, 0.0]));
        assert!(close(igusa_lambda(3, &x, 2.0 / 3.0), [0.2, 0.0, 0.0]));
        assert!(close(igusa_lambda(3, &x, 1.0), [0.0, 0.0, 0.0]));
    }

    #[test]
    fn theta_endpoints() {
        assert_eq!(igusa_theta(2, &[0.3], 0.0).unwrap(), vec![1.0, 1.0]);
        assert_eq!(igusa_theta(2, &[0.3], 1.0).unwrap(), vec![0.0, 0.0]);
        assert_eq!(theta_adjoint(2, &[1.0, 0.5]).unwrap(), vec![1.0, 0.0]);
        for i in 0..=10 {
            let t = igusa_theta(2, &[1.0], i as f64 / 10.0).unwrap();
            assert!(t[0] >= t[1]);
        }
    }

    #[test]
    fn chen_sign_examples() {
        assert_eq!(chen_sign(&[3], 1), 1);
        assert_eq!(chen_sign(&[1, 0], 2), -1);
        assert_eq!(chen_sign(&[1, 1, 1], 3), -1);
    }

    #[test]
    fn cell_counts() {
        // k = 1: a single chamber z_1 <= ... <= z_n
        assert_eq!(cells(1, 3).len(), 1);
        // k = 2, n = 1: segment 0 (z <= x) and segment 1 (two orders)
        assert_eq!(cells(2, 1).len(), 3);
    }

    #[test]
    fn psi_one_examples() {
        let spec = QuadSpec::default();
        let t = Poly::var(1, 0);
        let a = CoordinateForm::poly(1, 1, vec![(vec![0], t)]);
        let s = SingularSimplex::standard(1);
        assert_eq!(psi_exact(&[&a], &s, &spec).unwrap(), q(-1, 2));
        let f = CoordinateForm::function(Poly::var(1, 0).add(&Poly::constant(1, qi(2))));
        let p = SingularSimplex::affine(vec![vec![qi(3)]]).unwrap();
        assert_eq!(psi_exact(&[&f], &p, &spec).unwrap(), qi(5));
        assert_eq!(psi_exact(&[&f], &s, &spec).unwrap(), qi(0));
    }

    #[test]
    fn psi_one_agrees_with_unfolded_integral() {
        let spec = QuadSpec::default();
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let a = CoordinateForm::poly(2, 2, vec![(vec![0, 1], x.mul(&y).add(&Poly::constant(2, qi(1))))]);
        let tri = SingularSimplex::affine(vec![vec![qi(0), qi(0)], vec![qi(1), qi(0)], vec![qi(1), qi(2)]]).unwrap();
        let v1 = psi(&[&a], &tri, &spec).unwrap();
        let v2 = chen_integral(&[&a], &tri, &spec).unwrap();
        assert!((v1 - v2).abs() < 1e-12, "{} {}", v1, v2);
        let b = CoordinateForm::poly(2, 1, vec![(vec![0], y.clone()), (vec![1], x.mul(&x))]);
        let seg = tri.face(1);
        let w1 = psi(&[&b], &seg, &spec).unwrap();
        let w2 = chen_integral(&[&b], &seg, &spec).unwrap();
        assert!((w1 - w2).abs() < 1e-12, "{} {}", w1, w2);
    }

    #[test]
    fn iterated_dx_dx_is_one_half() {
        let spec = QuadSpec::default();
        let dx = CoordinateForm::dx(1, 0);
        let s = SingularSimplex::standard(1);
        let v = psi_exact(&[&dx, &dx], &s, &spec).unwrap();
        assert_eq!(v.clone() * v, q(1, 4));
    }

    #[test]
    fn exact_and_numeric_paths_agree() {
        let spec = QuadSpec::default();
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let a = CoordinateForm::poly(2, 1, vec![(vec![0], y.clone()), (vec![1], x.clone())]);
        let b = CoordinateForm::poly(2, 2, vec![(vec![0, 1], x.mul(&y).add(&Poly::constant(2, qi(2))))]);
        let tri = SingularSimplex::affine(vec![vec![qi(0), qi(0)], vec![qi(2), qi(1)], vec![qi(1), qi(3)]]).unwrap();
        let exact = to_f64(&psi_exact(&[&a, &b], &tri, &spec).unwrap());
        let numeric = unfolded_numeric(&[&a, &b], &tri, &spec).unwrap() * overall_sign(&[&a, &b], 2) as f64;
        assert!((exact - numeric).abs() < 1e-10, "{} {}", exact, numeric);
    }

    #[test]
    fn zero_and_mismatched_forms_vanish() {
        let spec = QuadSpec::default();
        let dx = CoordinateForm::dx(2, 0);
        let z = CoordinateForm::zero(2, 1);
        let tri = SingularSimplex::standard(2);
        assert_eq!(psi(&[&dx, &z], &tri.face(0), &spec).unwrap(), 0.0);
        assert_eq!(psi(&[&dx, &dx], &tri, &spec).unwrap(), 0.0);
        let big = QuadSpec { max_n: 1, ..spec };
        assert!(matches!(psi(&[&dx, &dx], &tri, &big), Err(Error::Capability(_))));
    }
}
