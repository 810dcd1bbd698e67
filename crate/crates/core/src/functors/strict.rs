//! `U-infinity(g) = cobar(CE(g))`, the strictification map `eta`, the
//! projection `rho` for strict algebras and the comparison `tau` for
//! coefficient extensions.

use super::{ChevalleyEilenberg, Cobar, CobarElem, DgCoalgebra};
use crate::graded::{sym_normalize, unshuffles, Word};
use crate::lie::{DgLie, Enveloping, UElem};
use crate::lin::Lin;
use crate::linfty::{Cdga, LInftyAlgebra, SymmetricStructure, TensorStructure};
use crate::scalar::{qi, sign, Coeff};

/// `U-infinity(g)` realized as the cobar construction on `CE(g)`.
pub struct UInfinity<'a, S: SymmetricStructure> {
    pub ce: ChevalleyEilenberg<'a, S>,
    pub cap: Option<u32>,
}

impl<'a, S: SymmetricStructure> UInfinity<'a, S> {
    pub fn new(g: &'a S, generators: Vec<S::Key>, cap: Option<u32>) -> Self {
        UInfinity { ce: ChevalleyEilenberg::new(g, generators), cap }
    }

    pub fn cobar(&self) -> Cobar<'_, ChevalleyEilenberg<'a, S>> {
        Cobar::new(&self.ce, self.cap)
    }

    /// The generator `u(w)` for a symmetric word, in normal order.
    pub fn generator(&self, w: &[S::Key]) -> CobarElem<Vec<S::Key>> {
        match self.ce.g.normalize_word(w) {
            Some((sorted, s)) => Lin::term(vec![sorted], qi(s)),
            None => Lin::zero(),
        }
    }

    /// Component of `eta` on a word: the single generator `u(sx_1 ... sx_k)`.
    pub fn eta(&self, w: &[S::Key]) -> CobarElem<Vec<S::Key>> {
        self.generator(w)
    }

    /// `eta` applied to a combination of symmetric words.
    pub fn eta_lin(&self, x: &Lin<Vec<S::Key>>) -> CobarElem<Vec<S::Key>> {
        x.apply(|w| self.eta(w))
    }

    /// Left side minus right side of the L-infinity morphism equation for
    /// `eta` on one word:
    /// `q_1(eta w) + sum_{I contains w_1, J nonempty} eps q_2(eta w_I, eta w_J) - eta(Q w)`,
    /// with `q_2(sy, sz) = (-1)^{|y|-1} [y, z]` for the strict target.
    pub fn eta_defect_on(&self, w: &[S::Key]) -> CobarElem<Vec<S::Key>> {
        let om = self.cobar();
        let g = self.ce.g;
        let mut out = om.d(&self.eta(w));
        for (a, b, s) in unshuffles(&w[1..], |k| g.sdeg(k)) {
            let mut first = vec![w[0].clone()];
            first.extend(a);
            if b.is_empty() {
                continue;
            }
            let y = self.eta(&first);
            let z = self.eta(&b);
            let dy: i64 = first.iter().map(|k| g.sdeg(k)).sum();
            out.add_scaled(&om.commutator(&y, &z), &qi(s * sign(dy)));
        }
        let qw = g.coderivation_on(&Lin::basis(w.to_vec()));
        out.sub_assign(&self.eta_lin(&qw));
        out
    }
}

/// First word (up to the given weight) on which `eta` fails the morphism
/// equation.
pub fn eta_morphism_defect(g: &LInftyAlgebra, weight: u32) -> Option<(Word, CobarElem<Word>)> {
    let u = UInfinity::new(g, (0..g.dim()).collect(), None);
    for w in u.ce.basis_up_to(weight) {
        let r = u.eta_defect_on(&w);
        if !r.is_zero() {
            return Some((w, r));
        }
    }
    None
}

/// `U(rho)`: sends `u(sx)` to `x` and longer generators to 0, extended
/// multiplicatively into PBW normal form.
pub fn u_rho<C: Coeff>(env: &Enveloping, x: &CobarElem<Word, C>, cap: Option<u32>) -> UElem<C> {
    let mut out = Lin::zero();
    for (w, c) in x.iter() {
        if w.iter().any(|k| k.len() != 1) {
            continue;
        }
        let flat: Vec<usize> = w.iter().map(|k| k[0]).collect();
        let wt: u32 = flat.iter().map(|&i| env.lie.space.weight(i)).sum();
        if cap.is_some_and(|n| wt > n) {
            continue;
        }
        let raw = Lin::term((wt, flat), c.clone());
        out.add_assign(&env.normalize(&raw, cap));
    }
    out
}

/// `rho` on `S(h)`, as a map of Lie algebras into `h`: only length-one
/// words contribute.
pub fn rho(x: &CobarElem<Word>) -> Lin<usize> {
    let mut out = Lin::zero();
    for (w, c) in x.iter() {
        if w.len() == 1 && w[0].len() == 1 {
            out.add_term(w[0][0], c.clone());
        }
    }
    out
}

/// First generator of `U-infinity(h)` (up to the weight) on which `U(rho)`
/// does not commute with the differentials.
pub fn rho_chain_defect(h: &DgLie, weight: u32) -> Option<(Word, Lin<Word>)> {
    let g = h.to_linfty();
    let u = UInfinity::new(&g, (0..g.dim()).collect(), None);
    let om = u.cobar();
    let env = Enveloping::new(h.clone());
    for w in u.ce.basis_up_to(weight) {
        let x = u.generator(&w);
        let lhs = u_rho(&env, &om.d(&x), None);
        let rhs = env.d(&u_rho(&env, &x, None));
        let r = Enveloping::forget_weight(&Lin::diff(&lhs, &rhs));
        if !r.is_zero() {
            return Some((w, r));
        }
    }
    None
}

/// Elements of `U-infinity(g) (x) A`: pairs (cobar word, coefficient key).
pub type TensorUElem<K> = Lin<(Vec<Word>, K)>;

fn cobar_word_degree(g: &LInftyAlgebra, w: &[Word]) -> i64 {
    w.iter().map(|k| k.iter().map(|&i| g.sdeg(i)).sum::<i64>() + 1).sum()
}

/// `tau` on one generator `u((sx_1 (x) a_1) ... (sx_k (x) a_k))`:
/// `(-1)^{sum_{i<j} |a_i|(|x_j|+1)} u(sx_1 ... sx_k) (x) a_1 ... a_k`.
pub fn tau_generator<A: Cdga>(g: &LInftyAlgebra, a: &A, key: &[(usize, A::Key)]) -> TensorUElem<A::Key> {
    let mut e = 0;
    for i in 0..key.len() {
        for j in i + 1..key.len() {
            e += a.degree(&key[i].1) * (g.space.degree(key[j].0) + 1);
        }
    }
    let xs: Vec<usize> = key.iter().map(|p| p.0).collect();
    let (sorted, s) = match sym_normalize(&xs, |i| g.sdeg(*i)) {
        Some(v) => v,
        None => return Lin::zero(),
    };
    let mut prod = Lin::basis(a.unit());
    for (_, k) in key {
        prod = a.mul_lin(&prod, &Lin::basis(k.clone()));
    }
    prod.iter()
        .map(|(k, c)| ((vec![sorted.clone()], k.clone()), c.clone() * qi(sign(e) * s)))
        .collect()
}

/// Product in `U-infinity(g) (x) A`: `(u (x) a)(v (x) b) = (-1)^{|a||v|} uv (x) ab`.
pub fn tensor_u_mul<A: Cdga>(
    g: &LInftyAlgebra,
    a: &A,
    x: &TensorUElem<A::Key>,
    y: &TensorUElem<A::Key>,
) -> TensorUElem<A::Key> {
    let mut out = Lin::zero();
    for ((u, p), c1) in x.iter() {
        for ((v, r), c2) in y.iter() {
            let s = sign(a.degree(p) * cobar_word_degree(g, v));
            let mut w = u.clone();
            w.extend(v.iter().cloned());
            for (k, c3) in a.mul(p, r).iter() {
                out.add_term((w.clone(), k.clone()), c1.clone() * c2.clone() * c3.clone() * qi(s));
            }
        }
    }
    out
}

/// Differential on `U-infinity(g) (x) A`: `d(u (x) a) = du (x) a + (-1)^{|u|+1} u (x) da`,
/// the same sign rule as for the coefficient extension `g (x) A`.
pub fn tensor_u_d<A: Cdga>(g: &LInftyAlgebra, a: &A, x: &TensorUElem<A::Key>) -> TensorUElem<A::Key> {
    let u = UInfinity::new(g, vec![], None);
    let om = u.cobar();
    let mut out = Lin::zero();
    for ((w, k), c) in x.iter() {
        for (dw, cw) in om.d::<crate::scalar::Scalar>(&Lin::basis(w.clone())).iter() {
            out.add_term((dw.clone(), k.clone()), c.clone() * cw.clone());
        }
        let s = qi(-sign(cobar_word_degree(g, w)));
        for (dk, ck) in a.d(k).iter() {
            out.add_term((w.clone(), dk.clone()), c.clone() * ck.clone() * s.clone());
        }
    }
    out
}

/// `tau` extended multiplicatively to words of generators.
pub fn tau<A: Cdga>(g: &LInftyAlgebra, a: &A, x: &CobarElem<Vec<(usize, A::Key)>>) -> TensorUElem<A::Key> {
    let mut out = Lin::zero();
    for (w, c) in x.iter() {
        let mut acc: TensorUElem<A::Key> = Lin::basis((vec![], a.unit()));
        for k in w {
            acc = tensor_u_mul(g, a, &acc, &tau_generator(g, a, k));
        }
        out.add_scaled(&acc, c);
    }
    out
}

/// `tau(d x) - d tau(x)` on a generator `u(key)` of `U-infinity(g (x) A)`.
pub fn tau_chain_defect<A: Cdga>(g: &LInftyAlgebra, a: &A, key: &[(usize, A::Key)]) -> TensorUElem<A::Key> {
    let ts = TensorStructure { g, a };
    let src = UInfinity::new(&ts, vec![], None);
    let x = src.generator(key);
    let lhs = tau(g, a, &src.cobar().d(&x));
    let rhs = tensor_u_d(g, a, &tau(g, a, &x));
    Lin::diff(&lhs, &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::GradedSpace;
    use crate::linfty::{CdgaPresentation, PolyForms, SullivanModel};

    fn aff() -> LInftyAlgebra {
        let space = GradedSpace::from_degrees("aff", &[("e", 0), ("f", 0)]);
        LInftyAlgebra::from_brackets(space, vec![(vec![0, 1], Lin::basis(1))], false).unwrap()
    }

    fn s2() -> LInftyAlgebra {
        let v = GradedSpace::from_degrees("s2", &[("e2", 2), ("e3", 3)]);
        SullivanModel::new(v, vec![(1, Lin::basis(vec![0, 0]))], true)
            .unwrap()
            .to_linfty()
            .unwrap()
    }

    #[test]
    fn eta_is_a_morphism() {
        assert!(eta_morphism_defect(&aff(), 4).is_none());
        assert!(eta_morphism_defect(&s2(), 6).is_none());
        let ut = DgLie::upper_triangular(3).to_linfty();
        assert!(eta_morphism_defect(&ut, 3).is_none());
    }

    #[test]
    fn eta_defect_detects_a_wrong_sign() {
        let g = aff();
        let u = UInfinity::new(&g, vec![0, 1], None);
        let w = vec![0, 1];
        // flipping the bracket term breaks the equation
        let mut r = u.eta_defect_on(&w);
        assert!(r.is_zero());
        let (a, b) = (u.eta(&[0]), u.eta(&[1]));
        r.add_scaled(&u.cobar().commutator(&a, &b), &qi(2));
        assert!(!r.is_zero());
    }

    #[test]
    fn rho_inverts_eta_on_generators() {
        let h = DgLie::sl2();
        let g = h.to_linfty();
        let u = UInfinity::new(&g, (0..3).collect(), None);
        for i in 0..3 {
            assert_eq!(rho(&u.eta(&[i])), Lin::basis(i));
        }
    }

    #[test]
    fn u_rho_is_a_chain_map() {
        let r = rho_chain_defect(&DgLie::sl2(), 3);
        assert!(r.is_none(), "{:?}", r);
        assert!(rho_chain_defect(&DgLie::upper_triangular(3), 3).is_none());
    }

    #[test]
    fn u_rho_is_multiplicative() {
        let h = DgLie::sl2();
        let env = Enveloping::new(h);
        let x: CobarElem<Word> = Lin::term(vec![vec![2], vec![0]], qi(3));
        let y: CobarElem<Word> = Lin::term(vec![vec![1], vec![2]], qi(-1));
        let xy = {
            let mut w = vec![vec![2], vec![0]];
            w.extend(vec![vec![1], vec![2]]);
            Lin::term(w, qi(-3))
        };
        let lhs = u_rho(&env, &xy, None);
        let rhs = env.mul(&u_rho(&env, &x, None), &u_rho(&env, &y, None), None);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn tau_on_unit_coefficients_relabels() {
        let g = aff();
        let a = CdgaPresentation::ground();
        let t = tau_generator(&g, &a, &[(1, 0)]);
        assert_eq!(t, Lin::basis((vec![vec![1]], 0)));
    }

    #[test]
    fn tau_is_a_chain_map_for_finite_coefficients() {
        // A = k[t]/(t^2) with t of degree 1, d = 0
        let a = CdgaPresentation::new(
            GradedSpace::from_degrees("a", &[("1", 0), ("t", 1)]),
            0,
            vec![],
            vec![],
        )
        .unwrap();
        let g = aff();
        for key in [vec![(0, 1)], vec![(0, 0), (1, 1)], vec![(0, 1), (1, 1)], vec![(0, 1), (0, 1), (1, 0)]] {
            assert!(tau_chain_defect(&g, &a, &key).is_zero(), "{:?}", key);
        }
    }

    #[test]
    fn tau_is_a_chain_map_for_s2_with_forms() {
        let g = s2();
        let a = PolyForms { dim: 2 };
        let x: (Vec<u32>, Vec<usize>) = (vec![1, 0], vec![1]);
        let y: (Vec<u32>, Vec<usize>) = (vec![0, 2], vec![]);
        let z: (Vec<u32>, Vec<usize>) = (vec![1, 1], vec![0, 1]);
        let keys = vec![
            vec![(0, y.clone())],
            vec![(0, x.clone()), (0, y.clone())],
            vec![(0, x.clone()), (0, x.clone())],
            vec![(0, y.clone()), (1, x.clone())],
            vec![(0, z.clone()), (0, x.clone())],
            vec![(0, x.clone()), (0, y.clone()), (0, x.clone())],
        ];
        for key in keys {
            assert!(tau_chain_defect(&g, &a, &key).is_zero(), "{:?}", key);
        }
    }
}
