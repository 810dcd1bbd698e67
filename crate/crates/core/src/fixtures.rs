//! Small standard inputs shared by the self test, the command line tool and
//! the benchmarks.

use crate::forms::CoordinateForm;
use crate::functors::{FinCoalgebra, FinDga};
use crate::graded::GradedSpace;
use crate::holonomy::Connection;
use crate::lie::{DgLie, RepMatrix};
use crate::lin::Lin;
use crate::linfty::{LInftyAlgebra, SullivanModel};
use crate::poly::Poly;
use crate::quadratic::{kz_connection, EndConnection, QuadraticDgla};
use crate::scalar::{q, qi, Scalar};
use crate::simplex::SingularSimplex;

/// Two-dimensional non-abelian Lie algebra `[e, f] = f`.
pub fn affine_line() -> LInftyAlgebra {
    let space = GradedSpace::from_degrees("aff", &[("e", 0), ("f", 0)]);
    LInftyAlgebra::from_brackets(space, vec![(vec![0, 1], Lin::basis(1))], false).expect("aff is a Lie algebra")
}

/// Minimal model of `S^2`: `e2` closed, `d e3 = e2^2`.
pub fn sphere_model() -> SullivanModel {
    let v = GradedSpace::from_degrees("S2", &[("e2", 2), ("e3", 3)]);
    SullivanModel::new(v, vec![(1, Lin::basis(vec![0, 0]))], true).expect("d^2 = 0")
}

/// The `S^2` model realized on a chart of `R^2`: `e2` goes to `dx dy`.
pub fn sphere_connection() -> Connection {
    let vol = CoordinateForm::poly(2, 2, vec![(vec![0, 1], Poly::constant(2, qi(1)))]);
    let m = sphere_model().with_realization(vec![vol, CoordinateForm::zero(2, 3)]).expect("realization is closed");
    Connection::from_sullivan(&m).expect("flat")
}

/// Flat connection `dx e12 + dy e23 + x dy e13` over `n_3` on `R^2`.
pub fn heisenberg_connection() -> Connection {
    let x = Poly::var(2, 0);
    let c = CoordinateForm::poly(2, 1, vec![(vec![1], x)]);
    let n3 = DgLie::upper_triangular(3);
    Connection::strict(&n3, vec![(0, CoordinateForm::dx(2, 0)), (1, CoordinateForm::dx(2, 1)), (2, c)], 2)
        .expect("flat")
}

/// `(1 + t) dt x_1 + 3 t^2 dt x_2` over the free nilpotent Lie algebra of
/// depth 3 on two generators, on `R^1`.
pub fn free_path_connection() -> Connection {
    let t = Poly::var(1, 0);
    let a = CoordinateForm::poly(1, 1, vec![(vec![0], Poly::constant(1, qi(1)).add(&t))]);
    let b = CoordinateForm::poly(1, 1, vec![(vec![0], t.mul(&t).scale(&qi(3)))]);
    Connection::strict(&DgLie::free_nilpotent(2, 3), vec![(0, a), (1, b)], 1).expect("1-forms on a line are flat")
}

pub fn segment(a: Scalar, b: Scalar) -> SingularSimplex {
    SingularSimplex::affine(vec![vec![a], vec![b]]).expect("affine segment")
}

pub fn triangle() -> SingularSimplex {
    SingularSimplex::affine(vec![vec![qi(0), qi(0)], vec![qi(1), q(1, 2)], vec![q(3, 10), qi(1)]]).expect("triangle")
}

pub fn tetrahedron() -> SingularSimplex {
    SingularSimplex::affine(vec![
        vec![qi(0), qi(0)],
        vec![qi(1), q(1, 2)],
        vec![q(3, 10), qi(1)],
        vec![q(-1, 2), q(1, 3)],
    ])
    .expect("degenerate affine 3-simplex in the plane")
}

pub fn sl2_killing() -> QuadraticDgla {
    QuadraticDgla::killing(&DgLie::sl2()).expect("Killing form of sl2")
}

/// KZ connection for `sl_2` with `n` copies of the standard representation.
pub fn sl2_kz(n: usize) -> EndConnection {
    let std = RepMatrix::sl2_standard();
    kz_connection(&sl2_killing(), &vec![std; n]).expect("standard representations")
}

/// Coalgebra on `a, b` (degree -1, weight 1) and `c` (degree -2, weight 2)
/// with reduced coproduct `c -> a (x) b`.
pub fn three_dim_coalgebra() -> FinCoalgebra {
    let space = GradedSpace::new("c", vec![("a".into(), -1, 1), ("b".into(), -1, 1), ("c".into(), -2, 2)])
        .expect("distinct labels");
    FinCoalgebra::new(space, vec![(2, Lin::basis((0, 1)))], vec![]).expect("coassociative")
}

pub fn upper_triangular_2() -> FinDga {
    FinDga::upper_triangular_2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linfty::Caps;

    #[test]
    fn fixtures_are_flat() {
        let caps = Caps { arity: 3, weight: 4 };
        for c in [sphere_connection(), heisenberg_connection(), free_path_connection()] {
            assert_eq!(c.flatness_residual(caps).unwrap(), 0.0);
        }
        assert_eq!(tetrahedron().dim(), 3);
        assert!(affine_line().check_jacobi(3).is_ok());
    }
}
