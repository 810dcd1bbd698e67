use holonomy_core::chen::{a_infinity_residual, igusa_pi, psi};
use holonomy_core::fixtures;
use holonomy_core::forms::CoordinateForm;
use holonomy_core::graded::{
    coassociativity_defect, free_lie_bracket, homogeneous_parts, jacobi_residual, koszul_sign_0, permutations,
    sym_project, sym_project_lin, GradedSpace,
};
use holonomy_core::holonomy::{compatibility_check, naturality_check, HolonomyCochain, OdeSpec, PathAlgebra};
use holonomy_core::lin::Lin;
use holonomy_core::linfty::{Caps, LInftyAlgebra, LInftyMorphism};
use holonomy_core::poly::Poly;
use holonomy_core::quadratic::{braid_holonomy, BraidPath};
use holonomy_core::quadrature::QuadSpec;
use holonomy_core::scalar::{q, qi, to_f64, Scalar};
use holonomy_core::simplex::SingularSimplex;
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn nonzero_rat() -> impl Strategy<Value = Scalar> {
    (1i64..=5, 1i64..=3, any::<bool>()).prop_map(|(n, d, neg)| q(if neg { -n } else { n }, d))
}

const DEG: [i64; 5] = [0, 1, 1, 2, -1];

// first homogeneous part of a random combination of short words
fn homogeneous() -> impl Strategy<Value = Lin<Vec<usize>>> {
    prop::collection::vec((prop::collection::vec(0usize..5, 1..3), rat()), 1..4).prop_map(|terms| {
        let x: Lin<Vec<usize>> = terms.into_iter().collect();
        homogeneous_parts(&x, &DEG).into_iter().next().map(|p| p.1).unwrap_or_default()
    })
}

fn point2() -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec(rat(), 2)
}

fn affine_triangle() -> impl Strategy<Value = SingularSimplex> {
    prop::collection::vec(point2(), 3).prop_map(|v| SingularSimplex::affine(v).unwrap())
}

fn poly2() -> impl Strategy<Value = Poly> {
    prop::collection::vec(((0u32..3, 0u32..3), rat()), 1..4).prop_map(|terms| {
        let mut p = Poly::zero(2);
        for ((i, j), c) in terms {
            p.add_term(vec![i, j], c);
        }
        p
    })
}

fn one_form2() -> impl Strategy<Value = CoordinateForm> {
    (poly2(), poly2()).prop_map(|(a, b)| CoordinateForm::poly(2, 1, vec![(vec![0], a), (vec![1], b)]))
}

fn small_spec() -> QuadSpec {
    QuadSpec { order: 8, ..QuadSpec::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sym_project_is_idempotent(word in prop::collection::vec(0usize..5, 0..5)) {
        let once = sym_project(&word, &DEG);
        prop_assert_eq!(sym_project_lin(&once, &DEG), once);
    }

    #[test]
    fn deconcatenation_is_coassociative(word in prop::collection::vec(0usize..9, 0..5)) {
        prop_assert!(coassociativity_defect(&word).is_zero());
    }

    #[test]
    fn koszul_sign_is_multiplicative(
        degs in prop::collection::vec(-2i64..3, 4),
        a in 0usize..24,
        b in 0usize..24,
    ) {
        // (sigma tau) acting on x: first tau, then sigma on the permuted degrees
        let perms = permutations(4);
        let (s, t) = (&perms[a], &perms[b]);
        let st: Vec<usize> = s.iter().map(|&i| t[i]).collect();
        let moved: Vec<i64> = t.iter().map(|&i| degs[i]).collect();
        prop_assert_eq!(koszul_sign_0(&st, &degs), koszul_sign_0(t, &degs) * koszul_sign_0(s, &moved));
    }

    #[test]
    fn free_bracket_satisfies_jacobi(x in homogeneous(), y in homogeneous(), z in homogeneous()) {
        prop_assert!(jacobi_residual(&x, &y, &z, &DEG).is_zero());
    }

    #[test]
    fn free_bracket_is_graded_antisymmetric(x in homogeneous(), y in homogeneous()) {
        let dx = homogeneous_parts(&x, &DEG).first().map(|p| p.0).unwrap_or(0);
        let dy = homogeneous_parts(&y, &DEG).first().map(|p| p.0).unwrap_or(0);
        let s = if dx.rem_euclid(2) == 1 && dy.rem_euclid(2) == 1 { qi(1) } else { qi(-1) };
        let lhs = free_lie_bracket(&x, &y, &DEG);
        let rhs = free_lie_bracket(&y, &x, &DEG).scale(&s);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn igusa_pi_lands_in_the_simplex(x in prop::collection::vec(0.0f64..=1.0, 1..6)) {
        let t = igusa_pi(&x).unwrap();
        prop_assert!(t[0] <= 1.0 && *t.last().unwrap() >= 0.0);
        prop_assert!(t.windows(2).all(|w| w[0] >= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn psi_is_multilinear(a1 in one_form2(), a2 in one_form2(), b in one_form2(), l in rat(), m in rat(), tri in affine_triangle()) {
        let spec = small_spec();
        let path = tri.face(0);
        let mix = a1.scale(&l).add(&a2.scale(&m));
        let lhs = psi(&[&mix, &b], &path, &spec).unwrap();
        let v1 = psi(&[&a1, &b], &path, &spec).unwrap();
        let v2 = psi(&[&a2, &b], &path, &spec).unwrap();
        let rhs = to_f64(&l) * v1 + to_f64(&m) * v2;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn psi_is_natural_under_affine_maps(
        a in one_form2(),
        b in one_form2(),
        m in prop::collection::vec(rat(), 4),
        shift in point2(),
        tri in affine_triangle(),
    ) {
        let spec = small_spec();
        let mat = vec![vec![m[0].clone(), m[1].clone()], vec![m[2].clone(), m[3].clone()]];
        let (pa, pb) = (a.pullback_affine(&mat, &shift), b.pullback_affine(&mat, &shift));
        let moved = tri.post_compose(mat.clone(), shift.clone());
        for sigma in [tri.face(2), tri.clone()] {
            let moved_sigma = if sigma.dim() == 2 { moved.clone() } else { moved.face(2) };
            let lhs = psi(&[&pa, &pb], &sigma, &spec).unwrap();
            let rhs = psi(&[&a, &b], &moved_sigma, &spec).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()), "{} vs {}", lhs, rhs);
        }
    }

    #[test]
    fn a_infinity_relation_on_affine_triangles(a in one_form2(), b in one_form2(), tri in affine_triangle()) {
        prop_assert!(a_infinity_residual(&a, &b, &tri, &small_spec()).unwrap() <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn flat_connection_gives_maurer_cartan_on_random_simplices(tri in affine_triangle()) {
        let alpha = fixtures::heisenberg_connection();
        let h = HolonomyCochain::infinity(&alpha, 3, QuadSpec::default(), false).unwrap();
        prop_assert!(h.mc_residual(&tri).unwrap() <= 1e-8);
        prop_assert!(h.mc_residual(&tri.face(1)).unwrap() <= 1e-8);
        prop_assert!(compatibility_check(&alpha, &tri, 3, &QuadSpec::default()).unwrap() <= 1e-8);
    }

    #[test]
    fn holonomy_is_natural_under_affine_maps(m in prop::collection::vec(rat(), 4), shift in point2(), tri in affine_triangle()) {
        let alpha = fixtures::heisenberg_connection();
        let mat = vec![vec![m[0].clone(), m[1].clone()], vec![m[2].clone(), m[3].clone()]];
        prop_assert!(naturality_check(&alpha, &mat, &shift, &tri, 3, &QuadSpec::default()).unwrap() <= 1e-9);
    }

    #[test]
    fn kz_curvature_vanishes_at_random_points(p in prop::collection::vec(-2.0f64..2.0, 6)) {
        let kz = fixtures::sl2_kz(3);
        prop_assume!(kz.diagonal_distance(&p) > 1e-2);
        prop_assert!(kz.curvature_at(&p).unwrap() <= 1e-10);
    }

    #[test]
    fn braid_holonomy_is_multiplicative(jitter in prop::collection::vec((-1i64..=1, -1i64..=1), 9)) {
        // three configurations near (0, 1, i), each point moved by at most 1/5
        let base = [(0i64, 0i64), (1, 0), (0, 1)];
        let configs: Vec<Vec<(Scalar, Scalar)>> = jitter
            .chunks(3)
            .map(|c| {
                c.iter()
                    .zip(base)
                    .map(|(&(dx, dy), (x, y))| (qi(x) + q(dx, 5), qi(y) + q(dy, 5)))
                    .collect()
            })
            .collect();
        let kz = fixtures::sl2_kz(3);
        let alg = kz.algebra();
        let spec = QuadSpec::default();
        let ode = OdeSpec::default();
        let first = BraidPath::through(&configs[..2]).unwrap();
        let second = BraidPath::through(&configs[1..]).unwrap();
        let whole = braid_holonomy(&kz, &first.then(&second).unwrap(), 8, &spec, &ode).unwrap();
        let a = braid_holonomy(&kz, &first, 8, &spec, &ode).unwrap();
        let b = braid_holonomy(&kz, &second, 8, &spec, &ode).unwrap();
        let prod = alg.mul(&a.ode, &b.ode);
        prop_assert!(alg.norm(&alg.combine(&[(1.0, &whole.ode), (-1.0, &prod)])) <= 1e-6);
    }

    #[test]
    fn pushforward_along_composites(
        s in nonzero_rat(), t in nonzero_rat(), u in nonzero_rat(), v in nonzero_rat(), x in rat(), w in rat(),
    ) {
        // a, b odd with [a, b] = c; d odd and central of weight 2
        let space = GradedSpace::new(
            "h",
            vec![("a".into(), 1, 1), ("b".into(), 1, 1), ("c".into(), 2, 2), ("d".into(), 1, 2)],
        )
        .unwrap();
        let h = LInftyAlgebra::from_brackets(space, vec![(vec![0, 1], Lin::basis(2))], true).unwrap();
        let scaling = |s: &Scalar, t: &Scalar| {
            let entries = vec![
                (vec![0], Lin::term(0, s.clone())),
                (vec![1], Lin::term(1, t.clone())),
                (vec![2], Lin::term(2, s.clone() * t.clone())),
                (vec![3], Lin::term(3, t.clone())),
            ];
            LInftyMorphism::new(h.clone(), h.clone(), entries, true).unwrap()
        };
        let (phi, psi) = (scaling(&s, &t), scaling(&u, &v));
        prop_assert!(phi.equation_defect(3).is_none());
        let caps = Caps::default();
        let alpha = Lin::sum(&Lin::term(0, x), &Lin::term(3, w));
        prop_assert!(h.mc_residual(&alpha, caps).unwrap().is_zero());
        let composite = phi.compose_strict(&psi).unwrap();
        let direct = composite.pushforward_mc(&alpha, caps).unwrap();
        let staged = psi.pushforward_mc(&phi.pushforward_mc(&alpha, caps).unwrap(), caps).unwrap();
        prop_assert_eq!(direct, staged);
    }
}
