//! Internally connected graphs `CG_d(n)`, their L-infinity structure, the
//! map from `t_d(n)` into its cohomology and the formal connection
//! `sum_Gamma I(Gamma) (x) Gamma`.
//!
//! `Graphs_d(n)` is free graded commutative on the internally connected
//! classes, counting a lone edge between two externals as internally
//! connected. The brackets are read off the dual of the differential.

use super::complex::{enumerate_block, GraphBounds};
use super::td::{TdPresentation, TdRelation};
use super::{canonical, differential, AdmissibleGraph};
use crate::error::{Error, Result};
use crate::graded::{GradedSpace, Word};
use crate::lin::Lin;
use crate::linalg::{rank, zeros};
use crate::linfty::{LInftyAlgebra, SullivanModel};
use crate::scalar::{qi, Scalar};
use serde::Serialize;
use std::collections::HashMap;

fn internal_components(g: &AdmissibleGraph) -> Vec<Vec<usize>> {
    let n = g.n;
    let mut parent: Vec<usize> = (0..=g.vertices()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(a, b) in &g.edges {
        if a > n && b > n {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut root_of: HashMap<usize, usize> = HashMap::new();
    for v in n + 1..=g.vertices() {
        let r = find(&mut parent, v);
        let idx = *root_of.entry(r).or_insert_with(|| {
            comps.push(Vec::new());
            comps.len() - 1
        });
        comps[idx].push(v);
    }
    comps
}

/// Nonempty and connected once the externals are removed; a single edge
/// between two externals also counts.
pub fn is_internally_connected(g: &AdmissibleGraph) -> bool {
    if g.m == 0 {
        return g.k() == 1;
    }
    let n = g.n;
    !g.edges.iter().any(|&(a, b)| a <= n && b <= n) && internal_components(g).len() == 1
}

/// Factors `F_1, .., F_r` (canonical, internally connected) and a sign with
/// `[g] = sign * F_1 ... F_r`; `None` for the zero class.
pub fn connected_factors(d: i64, g: &AdmissibleGraph) -> Option<(Vec<AdmissibleGraph>, i64)> {
    let n = g.n;
    let mut raw: Vec<AdmissibleGraph> = Vec::new();
    for comp in internal_components(g) {
        let rename = |v: usize| if v > n { comp.iter().position(|&c| c == v).unwrap() + n + 1 } else { v };
        let edges = g
            .edges
            .iter()
            .filter(|&&(a, b)| comp.contains(&a) || comp.contains(&b))
            .map(|&(a, b)| (rename(a), rename(b)))
            .collect();
        raw.push(AdmissibleGraph { n, m: comp.len(), edges });
    }
    for &(a, b) in &g.edges {
        if a <= n && b <= n {
            raw.push(AdmissibleGraph::edge(n, a, b));
        }
    }
    let mut concat = AdmissibleGraph::empty(n);
    let mut s = 1;
    let mut factors = Vec::new();
    for f in &raw {
        let shift = concat.m;
        concat.edges.extend(f.edges.iter().map(|&(a, b)| {
            let sh = |v: usize| if v > n { v + shift } else { v };
            (sh(a), sh(b))
        }));
        concat.m += f.m;
        let c = canonical(f, d);
        if c.zero {
            return None;
        }
        s *= c.sign;
        factors.push(c.graph);
    }
    let whole = canonical(g, d);
    let glued = canonical(&concat, d);
    if whole.zero || glued.zero {
        return None;
    }
    debug_assert_eq!(whole.graph, glued.graph);
    Some((factors, s * whole.sign * glued.sign))
}

/// `CG_d(n)` within bounds: the Sullivan algebra it generates and the dual
/// L-infinity algebra (`x_Gamma` of degree `1 + d m - (d - 1) k`).
#[derive(Clone, Debug)]
pub struct CgAlgebra {
    pub d: i64,
    pub n: usize,
    pub bounds: GraphBounds,
    pub classes: Vec<AdmissibleGraph>,
    pub model: SullivanModel,
    pub linfty: LInftyAlgebra,
    index: HashMap<AdmissibleGraph, usize>,
}

pub fn cg_basis_and_brackets(d: i64, n: usize, bounds: GraphBounds) -> Result<CgAlgebra> {
    let mut classes = Vec::new();
    for m in 0..=bounds.max_m {
        for k in 1..=bounds.max_k {
            if !bounds.contains(m as i64, k as i64) {
                continue;
            }
            classes.extend(enumerate_block(d, n, m, k).into_iter().filter(is_internally_connected));
        }
    }
    classes.sort_by_key(|g| (g.order(), g.degree(d), g.m, g.edges.clone()));
    let index: HashMap<AdmissibleGraph, usize> = classes.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
    let space = GradedSpace::new(
        &format!("Graphs_{}({})", d, n),
        classes.iter().map(|g| (g.label(), g.degree(d), g.order().max(1) as u32)).collect(),
    )?;
    let mut diff = Vec::new();
    for (v, g) in classes.iter().enumerate() {
        let mut dv: Lin<Word> = Lin::zero();
        for (h, c) in differential(d, g).terms.iter() {
            let (fs, s) = connected_factors(d, h)
                .ok_or_else(|| Error::Structure(format!("zero class {} in a boundary", h.label())))?;
            let word: Option<Word> = fs.iter().map(|f| index.get(f).copied()).collect();
            let word = word.ok_or_else(|| Error::Structure(format!("factor of {} outside bounds", h.label())))?;
            dv.add_term(word, c.clone() * qi(s));
        }
        diff.push((v, dv));
    }
    let model = SullivanModel::new(space, diff, false)?;
    let linfty = model.to_linfty()?;
    for (i, g) in classes.iter().enumerate() {
        let want = 1 + d * g.m as i64 - (d - 1) * g.k() as i64;
        if linfty.space.degree(i) != want {
            return Err(Error::Structure(format!("class {} has degree {} instead of {}", g.label(), linfty.space.degree(i), want)));
        }
    }
    Ok(CgAlgebra { d, n, bounds, classes, model, linfty, index })
}

impl CgAlgebra {
    pub fn dim(&self) -> usize {
        self.classes.len()
    }

    /// `x_Gamma` as a combination of basis elements (canonical sign).
    pub fn element(&self, g: &AdmissibleGraph) -> Option<Lin<usize>> {
        let c = canonical(g, self.d);
        if c.zero {
            return Some(Lin::zero());
        }
        self.index.get(&c.graph).map(|&i| Lin::term(i, qi(c.sign)))
    }

    /// Single-edge class standing for `t_ij`.
    pub fn t(&self, i: usize, j: usize) -> Lin<usize> {
        self.element(&AdmissibleGraph::edge(self.n, i, j)).expect("single edges are always enumerated")
    }

    fn l1_image(&self, degree: i64) -> Vec<Lin<usize>> {
        (0..self.dim())
            .filter(|&i| self.linfty.space.degree(i) == degree)
            .map(|i| self.linfty.bracket_basis(&[i]))
            .collect()
    }

    fn matrix(&self, cols: &[Lin<usize>]) -> Vec<Vec<Scalar>> {
        let mut m = zeros(self.dim(), cols.len());
        for (c, v) in cols.iter().enumerate() {
            for (i, x) in v.iter() {
                m[*i][c] = x.clone();
            }
        }
        m
    }

    /// Whether a homogeneous element of degree `degree` is `l_1`-exact.
    pub fn is_exact(&self, x: &Lin<usize>, degree: i64) -> bool {
        if x.is_zero() {
            return true;
        }
        let mut cols = self.l1_image(degree - 1);
        let r = rank(&self.matrix(&cols));
        cols.push(x.clone());
        rank(&self.matrix(&cols)) == r
    }

    /// Rank of the span of `xs` modulo `l_1`-exact elements of `degree`.
    pub fn rank_mod_exact(&self, xs: &[Lin<usize>], degree: i64) -> usize {
        let mut cols = self.l1_image(degree - 1);
        let r = rank(&self.matrix(&cols));
        cols.extend(xs.iter().cloned());
        rank(&self.matrix(&cols)) - r
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiRelationCheck {
    pub relation: TdRelation,
    pub chain_level_zero: bool,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiReport {
    pub d: i64,
    pub n: usize,
    pub bounds: GraphBounds,
    pub cg_dimension: usize,
    pub generators: usize,
    pub images_closed: bool,
    pub images_nonzero: bool,
    pub independent: bool,
    pub relations: Vec<PhiRelationCheck>,
    pub ok: bool,
}

/// Sends `t_ij` to the single-edge class and checks the defining
/// relations of `t_d(n)` in `H(CG_d(n))`.
pub fn phi_to_cohomology(d: i64, n: usize, bounds: GraphBounds) -> Result<PhiReport> {
    let cg = cg_basis_and_brackets(d, n, bounds)?;
    let pres = TdPresentation::new(d, n);
    let deg = pres.generator_degree();
    let images: Vec<Lin<usize>> = pres.pairs().iter().map(|&(i, j)| cg.t(i, j)).collect();
    let images_closed = images.iter().all(|x| cg.linfty.bracket(std::slice::from_ref(x)).is_zero());
    let images_nonzero = images.iter().all(|x| !x.is_zero() && cg.rank_mod_exact(std::slice::from_ref(x), deg) == 1);
    let independent = cg.rank_mod_exact(&images, deg) == images.len();
    let values = pres.evaluate(
        &|(i, j)| cg.t(i, j),
        &|x, s| x.scale(&qi(s)),
        &|a, b| Lin::sum(a, b),
        &|a, b| cg.linfty.bracket(&[a.clone(), b.clone()]),
    );
    let relations: Vec<PhiRelationCheck> = values
        .into_iter()
        .map(|(relation, v)| PhiRelationCheck { relation, chain_level_zero: v.is_zero(), exact: cg.is_exact(&v, 2 * deg + 1) })
        .collect();
    let ok = images_closed && images_nonzero && independent && relations.iter().all(|r| r.exact);
    Ok(PhiReport {
        d,
        n,
        bounds,
        cg_dimension: cg.dim(),
        generators: images.len(),
        images_closed,
        images_nonzero,
        independent,
        relations,
        ok,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SwCoefficient {
    /// Pullback of the unit-volume form on `S^{d-1}` along `x_to - x_from`.
    SphereVolume { from: usize, to: usize, sphere_dim: i64 },
    /// The configuration space integral `I(Gamma)`, kept symbolic.
    Integral(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct SwTerm {
    pub graph: AdmissibleGraph,
    pub form_degree: i64,
    pub cg_degree: i64,
    pub coefficient: SwCoefficient,
}

#[derive(Clone, Debug, Serialize)]
pub struct SwConnection {
    pub d: i64,
    pub n: usize,
    pub bounds: GraphBounds,
    pub terms: Vec<SwTerm>,
}

/// `sum I(Gamma) (x) Gamma` over the internally connected classes within
/// bounds; every term has total degree 1.
pub fn sw_connection(d: i64, n: usize, bounds: GraphBounds) -> Result<SwConnection> {
    let cg = cg_basis_and_brackets(d, n, bounds)?;
    let terms = cg
        .classes
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let coefficient = if g.m == 0 {
                let (a, b) = g.edges[0];
                SwCoefficient::SphereVolume { from: a, to: b, sphere_dim: d - 1 }
            } else {
                SwCoefficient::Integral(format!("I({})", g.label()))
            };
            SwTerm { graph: g.clone(), form_degree: g.degree(d), cg_degree: cg.linfty.space.degree(i), coefficient }
        })
        .collect();
    Ok(SwConnection { d, n, bounds, terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connectivity() {
        let tri = AdmissibleGraph::star(3, &[1, 2, 3]);
        assert!(is_internally_connected(&tri));
        assert!(is_internally_connected(&AdmissibleGraph::edge(3, 1, 2)));
        assert!(!is_internally_connected(&AdmissibleGraph::empty(3)));
        let two = AdmissibleGraph { n: 3, m: 2, edges: vec![(1, 4), (2, 4), (3, 4), (1, 5), (2, 5), (3, 5)] };
        assert!(!is_internally_connected(&two));
        // the tripod has odd degree 2d - 3, so its square vanishes
        assert!(connected_factors(2, &two).is_none());
        assert!(connected_factors(3, &two).is_none());
        let mixed = AdmissibleGraph { n: 3, m: 1, edges: vec![(1, 4), (2, 4), (3, 4), (1, 2)] };
        assert!(!is_internally_connected(&mixed));
        assert_eq!(connected_factors(2, &mixed).unwrap().0.len(), 2);
    }

    #[test]
    fn factors_multiply_back() {
        let g = AdmissibleGraph { n: 3, m: 1, edges: vec![(2, 3), (1, 4), (4, 2), (3, 4), (1, 2)] };
        for d in [2, 3] {
            let (fs, s) = connected_factors(d, &g).unwrap();
            let mut prod = super::super::GraphVector::from_graph(d, &AdmissibleGraph::empty(3)).unwrap();
            for f in &fs {
                prod = prod.product(&super::super::GraphVector::from_graph(d, f).unwrap());
            }
            assert_eq!(prod.scale(&qi(s)), super::super::GraphVector::from_graph(d, &g).unwrap());
        }
    }

    #[test]
    fn sw_terms() {
        let sw = sw_connection(2, 2, GraphBounds::new(1, 3)).unwrap();
        assert_eq!(sw.terms.len(), 1);
        assert_eq!(sw.terms[0].coefficient, SwCoefficient::SphereVolume { from: 1, to: 2, sphere_dim: 1 });
        assert!(sw_connection(2, 3, GraphBounds::new(0, 0)).unwrap().terms.is_empty());
        let b = GraphBounds::new(1, 3);
        let sw = sw_connection(2, 3, b).unwrap();
        let count = crate::graphs::enumerate_graphs(2, 3, b, None)
            .iter()
            .filter(|c| is_internally_connected(&c.graph))
            .count();
        assert_eq!(sw.terms.len(), count);
        assert!(sw.terms.iter().all(|t| t.form_degree + t.cg_degree == 1));
    }

    #[test]
    fn phi_small_cases() {
        let r = phi_to_cohomology(2, 2, GraphBounds::new(1, 3)).unwrap();
        assert!(r.ok && r.relations.is_empty() && r.images_nonzero);
        for d in [2, 3] {
            let r = phi_to_cohomology(d, 3, GraphBounds::enclosing(d, 0, 2 * (d - 1), 2)).unwrap();
            assert!(r.ok, "{:?}", r);
        }
    }
}
