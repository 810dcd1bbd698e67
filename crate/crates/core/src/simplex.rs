//! Smooth singular simplices on a coordinate chart.
//!
//! The standard simplex is `{1 >= t_1 >= ... >= t_k >= 0}` with vertices
//! `v_j = (1, .., 1, 0, .., 0)` (`j` ones). A simplex is a base map on some
//! `Delta_K` (or `R^K`), precomposed with the affine map sending the standard
//! vertices to a list of points and optionally postcomposed with an affine
//! map of the chart.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{format_scalar, qi, to_f64, Scalar};
use std::fmt;
use std::sync::Arc;

pub type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
/// Jacobian callback: rows are chart coordinates, columns parameters.
pub type JacFn = Arc<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>;

#[derive(Clone)]
pub enum BaseMap {
    Identity(usize),
    Poly(Vec<Poly>),
    Callback { source: usize, target: usize, eval: MapFn, jac: JacFn, name: String },
}

impl BaseMap {
    fn source_dim(&self) -> usize {
        match self {
            BaseMap::Identity(n) => *n,
            BaseMap::Poly(p) => p.first().map(|x| x.nvars).unwrap_or(0),
            BaseMap::Callback { source, .. } => *source,
        }
    }

    fn target_dim(&self) -> usize {
        match self {
            BaseMap::Identity(n) => *n,
            BaseMap::Poly(p) => p.len(),
            BaseMap::Callback { target, .. } => *target,
        }
    }

    fn key(&self) -> String {
        match self {
            BaseMap::Identity(n) => format!("id{}", n),
            BaseMap::Poly(p) => format!("poly{:?}", p.iter().map(|x| &x.terms).collect::<Vec<_>>()),
            BaseMap::Callback { name, .. } => format!("fn:{}", name),
        }
    }
}

#[derive(Clone)]
pub struct SingularSimplex {
    base: Arc<BaseMap>,
    /// Images of the standard vertices in the base domain.
    pre: Vec<Vec<Scalar>>,
    post: Option<(Vec<Vec<Scalar>>, Vec<Scalar>)>,
}

impl fmt::Debug for SingularSimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Simplex({})", self.key())
    }
}

/// Vertex `v_j` of the standard `k`-simplex.
pub fn standard_vertex(k: usize, j: usize) -> Vec<Scalar> {
    (0..k).map(|i| if i < j { qi(1) } else { qi(0) }).collect()
}

fn standard_vertices(k: usize) -> Vec<Vec<Scalar>> {
    (0..=k).map(|j| standard_vertex(k, j)).collect()
}

impl SingularSimplex {
    /// Affine simplex with the given vertices `p_0, ..., p_k` in the chart.
    pub fn affine(vertices: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = vertices.first().map(|v| v.len()).ok_or_else(|| Error::Argument("simplex needs a vertex".into()))?;
        if vertices.iter().any(|v| v.len() != n) {
            return Err(Error::Argument("vertices of different dimensions".into()));
        }
        Ok(SingularSimplex { base: Arc::new(BaseMap::Identity(n)), pre: vertices, post: None })
    }

    pub fn affine_f64(vertices: &[Vec<f64>]) -> Result<Self> {
        let mut exact = Vec::new();
        for v in vertices {
            let mut p = Vec::new();
            for x in v {
                p.push(Scalar::from_float(*x).ok_or_else(|| Error::Argument("non-finite vertex".into()))?);
            }
            exact.push(p);
        }
        Self::affine(exact)
    }

    /// Identity of the standard `k`-simplex (chart `R^k`).
    pub fn standard(k: usize) -> Self {
        SingularSimplex { base: Arc::new(BaseMap::Identity(k)), pre: standard_vertices(k), post: None }
    }

    /// Polynomial map from the standard `k`-simplex.
    pub fn polynomial(map: Vec<Poly>) -> Result<Self> {
        let k = map.first().map(|p| p.nvars).unwrap_or(0);
        if map.iter().any(|p| p.nvars != k) {
            return Err(Error::Argument("polynomial components in different variables".into()));
        }
        Ok(SingularSimplex { base: Arc::new(BaseMap::Poly(map)), pre: standard_vertices(k), post: None })
    }

    /// Smooth map from the standard `k`-simplex given by callbacks. `name`
    /// identifies the map for caching.
    pub fn callback(k: usize, target: usize, name: &str, eval: MapFn, jac: JacFn) -> Self {
        SingularSimplex {
            base: Arc::new(BaseMap::Callback { source: k, target, eval, jac, name: name.to_string() }),
            pre: standard_vertices(k),
            post: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.pre.len() - 1
    }

    pub fn ambient(&self) -> usize {
        match &self.post {
            Some((a, _)) => a.len(),
            None => self.base.target_dim(),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        !matches!(*self.base, BaseMap::Callback { .. })
    }

    fn with_pre(&self, pre: Vec<Vec<Scalar>>) -> Self {
        SingularSimplex { base: self.base.clone(), pre, post: self.post.clone() }
    }

    /// Face opposite to vertex `i`.
    pub fn face(&self, i: usize) -> Self {
        let mut pre = self.pre.clone();
        pre.remove(i);
        self.with_pre(pre)
    }

    /// Front `p`-face (vertices `0..=p`).
    pub fn front(&self, p: usize) -> Self {
        self.with_pre(self.pre[..=p].to_vec())
    }

    /// Back `q`-face (last `q + 1` vertices).
    pub fn back(&self, q: usize) -> Self {
        let k = self.dim();
        self.with_pre(self.pre[k - q..].to_vec())
    }

    /// The simplex precomposed with the affine self-map of the standard
    /// simplex sending its vertices to the given points of `Delta_k`.
    pub fn reparametrize(&self, points: &[Vec<Scalar>]) -> Self {
        let pre = points.iter().map(|p| self.pre_point_exact(p)).collect();
        self.with_pre(pre)
    }

    /// `f o sigma` for an affine chart map `y -> a y + b`.
    pub fn post_compose(&self, a: Vec<Vec<Scalar>>, b: Vec<Scalar>) -> Self {
        let post = match &self.post {
            None => (a, b),
            Some((a0, b0)) => {
                let a2 = crate::linalg::matmul(&a, a0);
                let b2 = a
                    .iter()
                    .zip(&b)
                    .map(|(row, bi)| bi.clone() + row.iter().zip(b0).map(|(x, y)| x * y).sum::<Scalar>())
                    .collect();
                (a2, b2)
            }
        };
        SingularSimplex { base: self.base.clone(), pre: self.pre.clone(), post: Some(post) }
    }

    /// Content key: equal keys mean equal maps.
    pub fn key(&self) -> String {
        let pts: Vec<String> = self
            .pre
            .iter()
            .map(|p| p.iter().map(format_scalar).collect::<Vec<_>>().join(","))
            .collect();
        let post = match &self.post {
            None => String::new(),
            Some((a, b)) => format!(
                "|{:?}+{:?}",
                a.iter().map(|r| r.iter().map(format_scalar).collect::<Vec<_>>()).collect::<Vec<_>>(),
                b.iter().map(format_scalar).collect::<Vec<_>>()
            ),
        };
        format!("{}[{}]{}", self.base.key(), pts.join(";"), post)
    }

    fn pre_point_exact(&self, t: &[Scalar]) -> Vec<Scalar> {
        let mut out = self.pre[0].clone();
        for (l, tl) in t.iter().enumerate() {
            for c in 0..out.len() {
                out[c] += tl * (&self.pre[l + 1][c] - &self.pre[l][c]);
            }
        }
        out
    }

    fn pre_point(&self, t: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.pre[0].iter().map(to_f64).collect();
        for (l, tl) in t.iter().enumerate() {
            for (c, o) in out.iter_mut().enumerate() {
                *o += tl * to_f64(&(&self.pre[l + 1][c] - &self.pre[l][c]));
            }
        }
        out
    }

    fn pre_jac(&self) -> Vec<Vec<f64>> {
        let n = self.base.source_dim();
        let k = self.dim();
        (0..n)
            .map(|c| (0..k).map(|l| to_f64(&(&self.pre[l + 1][c] - &self.pre[l][c]))).collect())
            .collect()
    }

    fn apply_post(&self, y: Vec<f64>) -> Vec<f64> {
        match &self.post {
            None => y,
            Some((a, b)) => a
                .iter()
                .zip(b)
                .map(|(row, bi)| to_f64(bi) + row.iter().zip(&y).map(|(r, x)| to_f64(r) * x).sum::<f64>())
                .collect(),
        }
    }

    /// Point of the chart at `t` in the standard simplex.
    pub fn eval(&self, t: &[f64]) -> Vec<f64> {
        let u = self.pre_point(t);
        let y = match &*self.base {
            BaseMap::Identity(_) => u,
            BaseMap::Poly(p) => p.iter().map(|c| c.eval(&u)).collect(),
            BaseMap::Callback { eval, .. } => eval(&u),
        };
        self.apply_post(y)
    }

    /// Jacobian at `t` (rows: chart coordinates, columns: `t_1..t_k`).
    pub fn jacobian(&self, t: &[f64]) -> Vec<Vec<f64>> {
        let u = self.pre_point(t);
        let jb: Vec<Vec<f64>> = match &*self.base {
            BaseMap::Identity(n) => (0..*n).map(|i| (0..*n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect(),
            BaseMap::Poly(p) => p.iter().map(|c| (0..u.len()).map(|j| c.derivative(j).eval(&u)).collect()).collect(),
            BaseMap::Callback { jac, .. } => jac(&u),
        };
        let jp = self.pre_jac();
        let k = self.dim();
        let mut j: Vec<Vec<f64>> = jb
            .iter()
            .map(|row| (0..k).map(|l| row.iter().zip(&jp).map(|(a, b)| a * b[l]).sum()).collect())
            .collect();
        if let Some((a, _)) = &self.post {
            j = a
                .iter()
                .map(|row| (0..k).map(|l| row.iter().zip(&j).map(|(x, r)| to_f64(x) * r[l]).sum()).collect())
                .collect();
        }
        j
    }

    /// Exact polynomial components in `t_1..t_k`, if the map is polynomial.
    pub fn as_poly(&self) -> Option<Vec<Poly>> {
        let k = self.dim();
        let n = self.base.source_dim();
        let pre: Vec<Poly> = (0..n)
            .map(|c| {
                let mut p = Poly::constant(k, self.pre[0][c].clone());
                for l in 0..k {
                    let mut e = vec![0; k];
                    e[l] = 1;
                    p.add_term(e, &self.pre[l + 1][c] - &self.pre[l][c]);
                }
                p
            })
            .collect();
        let y: Vec<Poly> = match &*self.base {
            BaseMap::Identity(_) => pre,
            BaseMap::Poly(m) => m.iter().map(|c| c.compose(&pre)).collect(),
            BaseMap::Callback { .. } => return None,
        };
        Some(match &self.post {
            None => y,
            Some((a, b)) => a
                .iter()
                .zip(b)
                .map(|(row, bi)| {
                    let mut p = Poly::constant(k, bi.clone());
                    for (r, yc) in row.iter().zip(&y) {
                        p = p.add(&yc.scale(r));
                    }
                    p
                })
                .collect(),
        })
    }

    /// Chart point of vertex `j`.
    pub fn vertex(&self, j: usize) -> Vec<f64> {
        self.eval(&standard_vertex(self.dim(), j).iter().map(to_f64).collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> SingularSimplex {
        SingularSimplex::affine(vec![vec![qi(0), qi(0)], vec![qi(2), qi(0)], vec![qi(2), qi(3)]]).unwrap()
    }

    #[test]
    fn affine_vertices_and_faces() {
        let s = tri();
        assert_eq!(s.vertex(0), vec![0.0, 0.0]);
        assert_eq!(s.vertex(1), vec![2.0, 0.0]);
        assert_eq!(s.vertex(2), vec![2.0, 3.0]);
        let f = s.face(1);
        assert_eq!(f.dim(), 1);
        assert_eq!(f.vertex(0), vec![0.0, 0.0]);
        assert_eq!(f.vertex(1), vec![2.0, 3.0]);
        assert_eq!(s.front(1).vertex(1), vec![2.0, 0.0]);
        assert_eq!(s.back(1).vertex(0), vec![2.0, 0.0]);
    }

    #[test]
    fn faces_of_polynomial_maps_compose() {
        let t1 = Poly::var(2, 0);
        let t2 = Poly::var(2, 1);
        let s = SingularSimplex::polynomial(vec![t1.mul(&t1), t2.clone()]).unwrap();
        // face 0 runs from v_1 = (1,0) to v_2 = (1,1)
        let f = s.face(0);
        assert_eq!(f.eval(&[0.5]), vec![1.0, 0.5]);
        let p = f.as_poly().unwrap();
        assert_eq!(p[1].eval(&[0.25]), 0.25);
        assert_eq!(f.key(), s.face(0).key());
        assert_ne!(f.key(), s.face(1).key());
    }

    #[test]
    fn jacobian_matches_polynomial_derivative() {
        let s = tri().post_compose(vec![vec![qi(1), qi(1)], vec![qi(0), qi(2)]], vec![qi(1), qi(0)]);
        let j = s.jacobian(&[0.3, 0.1]);
        // sigma(t) = (2 t1, 3 t2) then (x + y + 1, 2 y)
        assert_eq!(j, vec![vec![2.0, 3.0], vec![0.0, 6.0]]);
        let p = s.as_poly().unwrap();
        assert_eq!(p[0].eval(&[0.5, 0.5]), 1.0 + 1.0 + 1.5);
    }
}
