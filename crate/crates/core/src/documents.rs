//! JSON documents for algebras, forms, simplices, representations and braid
//! paths. Exact rationals are written as `"p/q"` strings; integers may also
//! be given as JSON numbers.

use crate::error::{Error, Result};
use crate::forms::CoordinateForm;
use crate::functors::{FinCoalgebra, FinDga};
use crate::graded::{GradedSpace, Word};
use crate::holonomy::Connection;
use crate::lie::{DgLie, RepMatrix};
use crate::lin::Lin;
use crate::linalg::Matrix;
use crate::linfty::{LInftyAlgebra, SullivanModel};
use crate::poly::Poly;
use crate::quadratic::BraidPath;
use crate::scalar::{format_scalar, parse_scalar, Scalar};
use crate::simplex::SingularSimplex;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarDoc {
    Int(i64),
    Text(String),
}

impl ScalarDoc {
    pub fn parse(&self) -> Result<Scalar> {
        match self {
            ScalarDoc::Int(n) => Ok(crate::scalar::qi(*n)),
            ScalarDoc::Text(s) => parse_scalar(s).ok_or_else(|| Error::Input(format!("not a rational number: {:?}", s))),
        }
    }

    pub fn from_scalar(x: &Scalar) -> Self {
        ScalarDoc::Text(format_scalar(x))
    }
}

/// Label to coefficient.
pub type CoeffTable = BTreeMap<String, ScalarDoc>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisDoc {
    pub label: String,
    pub degree: i64,
    #[serde(default = "one")]
    pub weight: u32,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryDoc {
    pub inputs: Vec<String>,
    pub output: CoeffTable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BracketForm {
    /// `l_k` on `g`.
    #[default]
    Brackets,
    /// `q_k` on the suspension.
    Coderivation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LInftyDoc {
    #[serde(default)]
    pub name: String,
    pub basis: Vec<BasisDoc>,
    #[serde(default)]
    pub form: BracketForm,
    #[serde(default)]
    pub entries: Vec<EntryDoc>,
    #[serde(default)]
    pub filtered: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieDoc {
    #[serde(default)]
    pub name: String,
    pub basis: Vec<BasisDoc>,
    /// Binary entries; the opposite order follows from antisymmetry.
    #[serde(default)]
    pub brackets: Vec<EntryDoc>,
    /// Unary entries.
    #[serde(default)]
    pub differential: Vec<EntryDoc>,
    #[serde(default)]
    pub filtered: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordTermDoc {
    pub word: Vec<String>,
    pub coeff: ScalarDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SullivanDoc {
    #[serde(default)]
    pub name: String,
    pub generators: Vec<BasisDoc>,
    #[serde(default)]
    pub differential: BTreeMap<String, Vec<WordTermDoc>>,
    #[serde(default = "yes")]
    pub simply_connected: bool,
    /// One form per generator, in generator order.
    #[serde(default)]
    pub realization: Option<Vec<FormDoc>>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialDoc {
    pub exp: Vec<u32>,
    pub coeff: ScalarDoc,
}

pub type PolyDoc = Vec<MonomialDoc>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormTermDoc {
    /// Increasing coordinate indices of `dx_{i_1} ... dx_{i_p}`.
    pub dirs: Vec<usize>,
    pub poly: PolyDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormDoc {
    pub dim: usize,
    pub degree: usize,
    #[serde(default)]
    pub terms: Vec<FormTermDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraDoc {
    Lie(LieDoc),
    Linfty(LInftyDoc),
    Sullivan(SullivanDoc),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionTermDoc {
    pub element: String,
    pub form: FormDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionDoc {
    pub algebra: AlgebraDoc,
    pub chart_dim: usize,
    /// Not used for Sullivan models, which carry their realization.
    #[serde(default)]
    pub terms: Vec<ConnectionTermDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexDoc {
    /// Affine simplex through these points.
    #[serde(default)]
    pub vertices: Option<Vec<Vec<ScalarDoc>>>,
    /// Polynomial map from the standard simplex, one polynomial per
    /// coordinate in the barycentric-free variables `t_1 .. t_k`.
    #[serde(default)]
    pub map: Option<Vec<PolyDoc>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplicesDoc {
    pub simplices: Vec<SimplexDoc>,
    /// Weight cap; the command line caps win when given.
    #[serde(default)]
    pub cap: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RepDoc {
    Named(String),
    Table { dim: usize, matrices: BTreeMap<String, Vec<Vec<ScalarDoc>>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairingDoc {
    Named(String),
    Matrix(Vec<Vec<ScalarDoc>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopDoc {
    /// Piecewise linear through configurations of `(re, im)` points.
    Configs(Vec<Vec<(ScalarDoc, ScalarDoc)>>),
    /// Polynomial tracks: each piece lists `2n` polynomials in one variable.
    Pieces(Vec<Vec<PolyDoc>>),
    /// `z_i`, `z_j` turn about their midpoint.
    Rotation { base: Vec<(f64, f64)>, i: usize, j: usize, turns: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KzDoc {
    /// Defaults to `sl_2`.
    #[serde(default)]
    pub lie: Option<LieDoc>,
    #[serde(default = "killing")]
    pub pairing: PairingDoc,
    pub reps: Vec<RepDoc>,
    #[serde(rename = "loop")]
    pub path: LoopDoc,
    #[serde(default = "six")]
    pub terms: usize,
    #[serde(default = "hundred")]
    pub samples: usize,
    #[serde(default = "margin")]
    pub margin: f64,
}

fn killing() -> PairingDoc {
    PairingDoc::Named("killing".into())
}

fn six() -> usize {
    6
}

fn hundred() -> usize {
    100
}

fn margin() -> f64 {
    1e-2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoproductTermDoc {
    pub left: String,
    pub right: String,
    pub coeff: ScalarDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DgaDoc {
    pub basis: Vec<BasisDoc>,
    #[serde(default)]
    pub products: Vec<EntryDoc>,
    #[serde(default)]
    pub differential: Vec<EntryDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoalgebraDoc {
    pub basis: Vec<BasisDoc>,
    #[serde(default)]
    pub coproduct: BTreeMap<String, Vec<CoproductTermDoc>>,
    #[serde(default)]
    pub differential: Vec<EntryDoc>,
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))
}

fn space(name: &str, basis: &[BasisDoc]) -> Result<GradedSpace> {
    GradedSpace::new(name, basis.iter().map(|b| (b.label.clone(), b.degree, b.weight)).collect())
        .map_err(|e| Error::Input(e.to_string()))
}

fn index(space: &GradedSpace, label: &str) -> Result<usize> {
    space.index(label).ok_or_else(|| Error::Input(format!("unknown basis label {:?}", label)))
}

fn lin(space: &GradedSpace, table: &CoeffTable) -> Result<Lin<usize>> {
    let mut out = Lin::zero();
    for (l, c) in table {
        out.add_term(index(space, l)?, c.parse()?);
    }
    Ok(out)
}

fn entries(space: &GradedSpace, es: &[EntryDoc], arity: Option<usize>) -> Result<Vec<(Word, Lin<usize>)>> {
    es.iter()
        .map(|e| {
            if let Some(a) = arity {
                if e.inputs.len() != a {
                    return Err(Error::Input(format!("entry {:?} needs {} inputs", e.inputs, a)));
                }
            }
            let w = e.inputs.iter().map(|l| index(space, l)).collect::<Result<Word>>()?;
            Ok((w, lin(space, &e.output)?))
        })
        .collect()
}

fn table_doc(space: &GradedSpace, x: &Lin<usize>) -> CoeffTable {
    x.iter().map(|(i, c)| (space.label(*i).to_string(), ScalarDoc::from_scalar(c))).collect()
}

fn basis_doc(space: &GradedSpace) -> Vec<BasisDoc> {
    (0..space.dim())
        .map(|i| BasisDoc { label: space.label(i).to_string(), degree: space.degree(i), weight: space.weight(i) })
        .collect()
}

pub fn poly_from_doc(nvars: usize, p: &PolyDoc) -> Result<Poly> {
    let mut out = Poly::zero(nvars);
    for m in p {
        if m.exp.len() != nvars {
            return Err(Error::Input(format!("monomial {:?} in {} variables expected", m.exp, nvars)));
        }
        out.add_term(m.exp.clone(), m.coeff.parse()?);
    }
    Ok(out)
}

pub fn poly_to_doc(p: &Poly) -> PolyDoc {
    p.terms.iter().map(|(e, c)| MonomialDoc { exp: e.clone(), coeff: ScalarDoc::from_scalar(c) }).collect()
}

impl LInftyDoc {
    pub fn build(&self) -> Result<LInftyAlgebra> {
        let s = space(&self.name, &self.basis)?;
        let es = entries(&s, &self.entries, None)?;
        match self.form {
            BracketForm::Brackets => LInftyAlgebra::from_brackets(s, es, self.filtered),
            BracketForm::Coderivation => LInftyAlgebra::from_coderivation(s, es, self.filtered),
        }
    }

    /// Exports the coderivation table.
    pub fn from_algebra(g: &LInftyAlgebra) -> Self {
        LInftyDoc {
            name: g.space.name.clone(),
            basis: basis_doc(&g.space),
            form: BracketForm::Coderivation,
            entries: g
                .table()
                .iter()
                .map(|(w, v)| EntryDoc {
                    inputs: w.iter().map(|&i| g.space.label(i).to_string()).collect(),
                    output: table_doc(&g.space, v),
                })
                .collect(),
            filtered: g.filtered,
        }
    }
}

impl LieDoc {
    pub fn build(&self) -> Result<DgLie> {
        let s = space(&self.name, &self.basis)?;
        let br = entries(&s, &self.brackets, Some(2))?.into_iter().map(|(w, v)| ((w[0], w[1]), v)).collect();
        let d = entries(&s, &self.differential, Some(1))?.into_iter().map(|(w, v)| (w[0], v)).collect();
        DgLie::new(s, br, d, self.filtered)
    }

    pub fn from_lie(g: &DgLie) -> Self {
        let s = &g.space;
        let mut brackets = Vec::new();
        let mut differential = Vec::new();
        for i in 0..g.dim() {
            for j in i..g.dim() {
                let v = g.bracket_basis(i, j);
                if !v.is_zero() {
                    brackets.push(EntryDoc { inputs: vec![s.label(i).into(), s.label(j).into()], output: table_doc(s, &v) });
                }
            }
            let v = g.d_basis(i);
            if !v.is_zero() {
                differential.push(EntryDoc { inputs: vec![s.label(i).into()], output: table_doc(s, &v) });
            }
        }
        LieDoc { name: s.name.clone(), basis: basis_doc(s), brackets, differential, filtered: g.filtered }
    }
}

impl FormDoc {
    pub fn build(&self) -> Result<CoordinateForm> {
        let mut terms = Vec::new();
        for t in &self.terms {
            if t.dirs.len() != self.degree || !t.dirs.windows(2).all(|w| w[0] < w[1]) || t.dirs.iter().any(|&i| i >= self.dim) {
                return Err(Error::Input(format!("form directions {:?} must be {} increasing indices below {}", t.dirs, self.degree, self.dim)));
            }
            terms.push((t.dirs.clone(), poly_from_doc(self.dim, &t.poly)?));
        }
        Ok(CoordinateForm::poly(self.dim, self.degree, terms))
    }
}

impl SullivanDoc {
    pub fn build(&self) -> Result<SullivanModel> {
        let s = space(&self.name, &self.generators)?;
        let mut diff = Vec::new();
        for (g, terms) in &self.differential {
            let mut v = Lin::zero();
            for t in terms {
                let w = t.word.iter().map(|l| index(&s, l)).collect::<Result<Word>>()?;
                v.add_term(w, t.coeff.parse()?);
            }
            diff.push((index(&s, g)?, v));
        }
        let m = SullivanModel::new(s, diff, self.simply_connected)?;
        match &self.realization {
            None => Ok(m),
            Some(forms) => m.with_realization(forms.iter().map(|f| f.build()).collect::<Result<Vec<_>>>()?),
        }
    }
}

impl ConnectionDoc {
    pub fn build(&self) -> Result<Connection> {
        let terms = |space: &GradedSpace| -> Result<Vec<(usize, CoordinateForm)>> {
            self.terms
                .iter()
                .map(|t| {
                    let f = t.form.build()?;
                    if f.dim != self.chart_dim {
                        return Err(Error::Input(format!("form for {} lives on R^{}, chart is R^{}", t.element, f.dim, self.chart_dim)));
                    }
                    Ok((index(space, &t.element)?, f))
                })
                .collect()
        };
        match &self.algebra {
            AlgebraDoc::Lie(l) => {
                let g = l.build()?;
                Connection::strict(&g, terms(&g.space)?, self.chart_dim)
            }
            AlgebraDoc::Linfty(l) => {
                let g = l.build()?;
                let t = terms(&g.space)?;
                Connection::new(g, t, self.chart_dim)
            }
            AlgebraDoc::Sullivan(s) => {
                if !self.terms.is_empty() {
                    return Err(Error::Input("a Sullivan connection takes its forms from the realization".into()));
                }
                let m = s.build()?;
                if m.realization.is_none() {
                    return Err(Error::Input("the Sullivan model needs a realization".into()));
                }
                Connection::from_sullivan(&m)
            }
        }
    }
}

impl SimplexDoc {
    pub fn build(&self) -> Result<SingularSimplex> {
        match (&self.vertices, &self.map) {
            (Some(vs), None) => {
                let pts = vs.iter().map(|v| v.iter().map(|c| c.parse()).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
                SingularSimplex::affine(pts).map_err(|e| Error::Input(e.to_string()))
            }
            (None, Some(map)) => {
                let nvars = map.iter().flat_map(|p| p.iter().map(|m| m.exp.len())).next().unwrap_or(0);
                let polys = map.iter().map(|p| poly_from_doc(nvars, p)).collect::<Result<Vec<_>>>()?;
                SingularSimplex::polynomial(polys).map_err(|e| Error::Input(e.to_string()))
            }
            _ => Err(Error::Input("a simplex needs exactly one of \"vertices\" and \"map\"".into())),
        }
    }
}

impl RepDoc {
    pub fn build(&self, g: &DgLie) -> Result<RepMatrix> {
        let rep = match self {
            RepDoc::Named(n) => match n.as_str() {
                "sl2-standard" => RepMatrix::sl2_standard(),
                "trivial" => RepMatrix::trivial(g),
                _ => return Err(Error::Input(format!("unknown representation {:?}", n))),
            },
            RepDoc::Table { dim, matrices } => {
                let mut mats = Vec::new();
                for i in 0..g.dim() {
                    let m = matrices
                        .get(g.space.label(i))
                        .ok_or_else(|| Error::Input(format!("no matrix for {}", g.space.label(i))))?;
                    mats.push(square(m, *dim)?);
                }
                RepMatrix { dim: *dim, mats }
            }
        };
        if rep.mats.len() != g.dim() {
            return Err(Error::Input("representation does not match the Lie algebra".into()));
        }
        rep.check(g).map_err(|e| Error::Input(e.to_string()))?;
        Ok(rep)
    }
}

pub fn square(m: &[Vec<ScalarDoc>], n: usize) -> Result<Matrix> {
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::Input(format!("expected a {}x{} matrix", n, n)));
    }
    m.iter().map(|r| r.iter().map(|c| c.parse()).collect()).collect()
}

impl LoopDoc {
    pub fn build(&self) -> Result<BraidPath> {
        let r = match self {
            LoopDoc::Configs(cs) => {
                let configs = cs
                    .iter()
                    .map(|c| c.iter().map(|(x, y)| Ok((x.parse()?, y.parse()?))).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                BraidPath::through(&configs)
            }
            LoopDoc::Pieces(ps) => {
                let pieces = ps
                    .iter()
                    .map(|p| {
                        let polys = p.iter().map(|c| poly_from_doc(1, c)).collect::<Result<Vec<_>>>()?;
                        SingularSimplex::polynomial(polys)
                    })
                    .collect::<Result<Vec<_>>>()?;
                BraidPath::new(pieces)
            }
            LoopDoc::Rotation { base, i, j, turns } => {
                if *i == 0 || *j == 0 || *i > base.len() || *j > base.len() || i == j {
                    return Err(Error::Input("rotation indices must be distinct points of the base".into()));
                }
                Ok(BraidPath::rotation(base, *i, *j, *turns, None))
            }
        };
        r.map_err(|e| Error::Input(e.to_string()))
    }
}

impl DgaDoc {
    pub fn build(&self) -> Result<FinDga> {
        let s = space("dga", &self.basis)?;
        let p = entries(&s, &self.products, Some(2))?.into_iter().map(|(w, v)| ((w[0], w[1]), v)).collect();
        let d = entries(&s, &self.differential, Some(1))?.into_iter().map(|(w, v)| (w[0], v)).collect();
        FinDga::new(s, p, d)
    }
}

impl CoalgebraDoc {
    pub fn build(&self) -> Result<FinCoalgebra> {
        let s = space("coalgebra", &self.basis)?;
        let mut cop = Vec::new();
        for (k, terms) in &self.coproduct {
            let mut v = Lin::zero();
            for t in terms {
                v.add_term((index(&s, &t.left)?, index(&s, &t.right)?), t.coeff.parse()?);
            }
            cop.push((index(&s, k)?, v));
        }
        let d = entries(&s, &self.differential, Some(1))?.into_iter().map(|(w, v)| (w[0], v)).collect();
        FinCoalgebra::new(s, cop, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::functors::DgCoalgebra;
    use crate::scalar::{q, qi};

    #[test]
    fn scalars_parse_both_ways() {
        let x: Vec<ScalarDoc> = parse_json(r#"[3, "-1/2", " 4 / 6 "]"#).unwrap();
        let v: Vec<Scalar> = x.iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(v, vec![qi(3), q(-1, 2), q(2, 3)]);
        assert!(ScalarDoc::Text("1/0".into()).parse().is_err());
        assert_eq!(serde_json::to_string(&ScalarDoc::from_scalar(&q(-2, 6))).unwrap(), "\"-1/3\"");
    }

    #[test]
    fn linfty_round_trip() {
        let g = fixtures::sphere_model().to_linfty().unwrap();
        let doc = LInftyDoc::from_algebra(&g);
        let text = serde_json::to_string(&doc).unwrap();
        let back = parse_json::<LInftyDoc>(&text).unwrap().build().unwrap();
        assert_eq!(back, g);
        let aff = r#"{"basis": [{"label": "e", "degree": 0}, {"label": "f", "degree": 0}],
                     "entries": [{"inputs": ["e", "f"], "output": {"f": 1}}]}"#;
        assert_eq!(parse_json::<LInftyDoc>(aff).unwrap().build().unwrap().table(), fixtures::affine_line().table());
    }

    #[test]
    fn lie_round_trip_and_errors() {
        let g = DgLie::upper_triangular(3);
        let back = LieDoc::from_lie(&g).build().unwrap();
        assert_eq!(back.to_linfty(), g.to_linfty());
        let bad = r#"{"basis": [{"label": "x", "degree": 0}], "brackets": [{"inputs": ["x", "y"], "output": {}}]}"#;
        let e = parse_json::<LieDoc>(bad).unwrap().build().unwrap_err();
        assert!(e.to_string().contains("unknown basis label"));
        assert!(matches!(parse_json::<LieDoc>("{"), Err(Error::Input(_))));
    }

    #[test]
    fn sphere_connection_from_a_document() {
        let text = r#"{
            "algebra": {"sullivan": {
                "name": "S2",
                "generators": [{"label": "e2", "degree": 2}, {"label": "e3", "degree": 3}],
                "differential": {"e3": [{"word": ["e2", "e2"], "coeff": 1}]},
                "realization": [
                    {"dim": 2, "degree": 2, "terms": [{"dirs": [0, 1], "poly": [{"exp": [0, 0], "coeff": 1}]}]},
                    {"dim": 2, "degree": 3}
                ]}},
            "chart_dim": 2
        }"#;
        let c = parse_json::<ConnectionDoc>(text).unwrap().build().unwrap();
        assert_eq!(c.algebra, fixtures::sphere_connection().algebra);
    }

    #[test]
    fn simplices_and_loops() {
        let s: SimplexDoc = parse_json(r#"{"vertices": [["0", "0"], ["1", "1/2"], ["3/10", "1"]]}"#).unwrap();
        assert_eq!(s.build().unwrap().key(), fixtures::triangle().key());
        let p: SimplexDoc = parse_json(r#"{"map": [[{"exp": [2], "coeff": 1}], [{"exp": [1], "coeff": "-1"}]]}"#).unwrap();
        assert_eq!(p.build().unwrap().dim(), 1);
        let both: SimplexDoc = parse_json(r#"{"vertices": [["0"]], "map": []}"#).unwrap();
        assert!(both.build().is_err());
        let l: LoopDoc = parse_json(r#"{"configs": [[["0", "0"], ["1", "0"]], [["0", "1"], ["1", "0"]]]}"#).unwrap();
        assert_eq!(l.build().unwrap().pieces.len(), 1);
        let r: LoopDoc = parse_json(r#"{"rotation": {"base": [[0, 0], [1, 0]], "i": 1, "j": 2, "turns": 1}}"#).unwrap();
        assert!(r.build().is_ok());
        let bad: LoopDoc = parse_json(r#"{"rotation": {"base": [[0, 0]], "i": 1, "j": 2, "turns": 1}}"#).unwrap();
        assert!(bad.build().is_err());
    }

    #[test]
    fn representations_are_checked() {
        let sl2 = DgLie::sl2();
        assert_eq!(RepDoc::Named("sl2-standard".into()).build(&sl2).unwrap(), RepMatrix::sl2_standard());
        let wrong: RepDoc = parse_json(
            r#"{"dim": 1, "matrices": {"f": [[1]], "h": [[1]], "e": [[1]]}}"#,
        )
        .unwrap();
        assert!(wrong.build(&sl2).is_err());
    }

    #[test]
    fn finite_algebras_and_coalgebras() {
        let a: DgaDoc = parse_json(
            r#"{"basis": [{"label": "e22", "degree": 0}, {"label": "e12", "degree": 0}],
                "products": [{"inputs": ["e22", "e22"], "output": {"e22": 1}},
                             {"inputs": ["e12", "e22"], "output": {"e12": 1}}]}"#,
        )
        .unwrap();
        assert!(a.build().is_ok());
        let c: CoalgebraDoc = parse_json(
            r#"{"basis": [{"label": "a", "degree": -1}, {"label": "b", "degree": -1}, {"label": "c", "degree": -2, "weight": 2}],
                "coproduct": {"c": [{"left": "a", "right": "b", "coeff": 1}]}}"#,
        )
        .unwrap();
        let c = c.build().unwrap();
        assert_eq!(c.reduced_coproduct(&2), fixtures::three_dim_coalgebra().reduced_coproduct(&2));
    }
}
