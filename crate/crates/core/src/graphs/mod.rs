//! Admissible graphs, the graph complex and internally connected graphs.
//!
//! Vertices are numbered from 1: externals `1..=n`, internals
//! `n+1..=n+m`. A graph is read as the monomial
//! `v_1 ... v_m e_1 ... e_k` with internal vertices of degree `-d` and
//! edges of degree `d - 1`; an edge `a -> b` equals `(-1)^d` times `b -> a`.

pub mod arnold;
pub mod cg;
pub mod complex;
pub mod td;

pub use arnold::arnold_dimensions;
pub use cg::{cg_basis_and_brackets, phi_to_cohomology, sw_connection, CgAlgebra, PhiReport, SwConnection};
pub use complex::{cohomology_ranks, enumerate_block, enumerate_graphs, CohomologyTable, GraphBounds};
pub use td::{TdPresentation, TdRelation};

use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::scalar::{qi, sign, Scalar};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AdmissibleGraph {
    pub n: usize,
    pub m: usize,
    /// Oriented edges `(from, to)`; the position is the edge label.
    pub edges: Vec<(usize, usize)>,
}

/// A violated admissibility condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EndpointOutOfRange { edge: usize, vertex: usize },
    SimpleLoop { edge: usize },
    LowValence { vertex: usize, valence: usize },
    NotConnectedToExternal { vertex: usize },
    NoExternalVertices,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EndpointOutOfRange { edge, vertex } => {
                write!(f, "edge {} has endpoint {} outside the vertex set", edge + 1, vertex)
            }
            Violation::SimpleLoop { edge } => write!(f, "edge {} is a simple loop", edge + 1),
            Violation::LowValence { vertex, valence } => {
                write!(f, "internal vertex {} has valency {} < 3", vertex, valence)
            }
            Violation::NotConnectedToExternal { vertex } => {
                write!(f, "vertex {} has no path to an external vertex", vertex)
            }
            Violation::NoExternalVertices => write!(f, "only the empty graph has no external vertices"),
        }
    }
}

impl AdmissibleGraph {
    pub fn new(n: usize, m: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let g = AdmissibleGraph { n, m, edges };
        match g.violation() {
            None => Ok(g),
            Some(v) => Err(Error::Input(format!("inadmissible graph: {}", v))),
        }
    }

    pub fn empty(n: usize) -> Self {
        AdmissibleGraph { n, m: 0, edges: Vec::new() }
    }

    /// Edge `i -> j` between two externals.
    pub fn edge(n: usize, i: usize, j: usize) -> Self {
        AdmissibleGraph { n, m: 0, edges: vec![(i, j)] }
    }

    /// One internal vertex joined to each listed external.
    pub fn star(n: usize, legs: &[usize]) -> Self {
        AdmissibleGraph { n, m: 1, edges: legs.iter().map(|&a| (a, n + 1)).collect() }
    }

    pub fn k(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> usize {
        self.n + self.m
    }

    pub fn is_internal(&self, v: usize) -> bool {
        v > self.n
    }

    /// `(d - 1) k - d m`.
    pub fn degree(&self, d: i64) -> i64 {
        (d - 1) * self.k() as i64 - d * self.m as i64
    }

    /// Edges minus internal vertices; preserved by the differential and
    /// additive under products.
    pub fn order(&self) -> i64 {
        self.k() as i64 - self.m as i64
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum()
    }

    pub fn violation(&self) -> Option<Violation> {
        let nv = self.vertices();
        if self.n == 0 && (self.m > 0 || !self.edges.is_empty()) {
            return Some(Violation::NoExternalVertices);
        }
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            for v in [a, b] {
                if v == 0 || v > nv {
                    return Some(Violation::EndpointOutOfRange { edge: i, vertex: v });
                }
            }
            if a == b {
                return Some(Violation::SimpleLoop { edge: i });
            }
        }
        for v in self.n + 1..=nv {
            let val = self.valence(v);
            if val < 3 {
                return Some(Violation::LowValence { vertex: v, valence: val });
            }
        }
        let mut seen = vec![false; nv + 1];
        let mut stack: Vec<usize> = (1..=self.n).collect();
        for &v in &stack {
            seen[v] = true;
        }
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                let w = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        (self.n + 1..=nv).find(|&v| !seen[v]).map(|vertex| Violation::NotConnectedToExternal { vertex })
    }

    pub fn is_admissible(&self) -> bool {
        self.violation().is_none()
    }

    /// Sign-canonical class in `Graphs_d(n)`.
    pub fn canonicalize(&self, d: i64) -> Result<GraphClass> {
        if let Some(v) = self.violation() {
            return Err(Error::Input(format!("inadmissible graph: {}", v)));
        }
        Ok(canonical(self, d))
    }

    /// Graph with internal vertex `v` renamed to `perm[v - n - 1] + n + 1`,
    /// edges placed by `edge_perm` and the edges in `flips` reversed,
    /// together with the sign `Gamma = s * result`.
    pub fn relabeled(&self, d: i64, perm: &[usize], edge_perm: &[usize], flips: &[bool]) -> (AdmissibleGraph, i64) {
        let n = self.n;
        let f = |v: usize| if v > n { perm[v - n - 1] + n + 1 } else { v };
        let mut edges = vec![(0, 0); self.k()];
        let mut s = sign(d * parity(perm) + (d - 1) * parity(edge_perm));
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            let (a, b) = if flips[i] {
                s *= sign(d);
                (b, a)
            } else {
                (a, b)
            };
            edges[edge_perm[i]] = (f(a), f(b));
        }
        (AdmissibleGraph { n, m: self.m, edges }, s)
    }

    /// One line `d n m k` followed by one `u v` line per edge.
    pub fn to_text(&self, d: i64) -> String {
        let mut s = format!("{} {} {} {}\n", d, self.n, self.m, self.k());
        for (a, b) in &self.edges {
            s.push_str(&format!("{} {}\n", a, b));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<(i64, AdmissibleGraph)> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Input("empty graph document".into()))?;
        let h: Vec<i64> = parse_ints(header)?;
        if h.len() != 4 || h[1] < 0 || h[2] < 0 || h[3] < 0 {
            return Err(Error::Input(format!("bad header `{}`, expected `d n m k`", header)));
        }
        let mut edges = Vec::new();
        for l in lines {
            let e = parse_ints(l)?;
            if e.len() != 2 || e[0] < 1 || e[1] < 1 {
                return Err(Error::Input(format!("bad edge line `{}`", l)));
            }
            edges.push((e[0] as usize, e[1] as usize));
        }
        if edges.len() != h[3] as usize {
            return Err(Error::Input(format!("header announces {} edges, found {}", h[3], edges.len())));
        }
        let g = AdmissibleGraph::new(h[1] as usize, h[2] as usize, edges)?;
        Ok((h[0], g))
    }

    /// Compact label `m:a>b,c>d`.
    pub fn label(&self) -> String {
        let e: Vec<String> = self.edges.iter().map(|(a, b)| format!("{}>{}", a, b)).collect();
        format!("{}:{}", self.m, e.join(","))
    }
}

fn parse_ints(line: &str) -> Result<Vec<i64>> {
    line.split_whitespace()
        .map(|t| t.parse::<i64>().map_err(|_| Error::Input(format!("not an integer: `{}`", t))))
        .collect()
}

/// Parity (0 or 1) of a permutation of `0..len`.
fn parity(perm: &[usize]) -> i64 {
    let mut seen = vec![false; perm.len()];
    let mut p = 0;
    for i in 0..perm.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        p += len - 1;
    }
    (p % 2) as i64
}

/// Canonical representative with `Gamma = sign * graph`; `zero` when an
/// automorphism acts by `-1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphClass {
    pub graph: AdmissibleGraph,
    pub sign: i64,
    pub zero: bool,
}

fn canonical(g: &AdmissibleGraph, d: i64) -> GraphClass {
    let n = g.n;
    // internal vertices are ordered by an invariant; only orders compatible
    // with it are searched
    let key = |v: usize| {
        let mut ext: Vec<usize> = Vec::new();
        for &(a, b) in &g.edges {
            if a == v && b <= n {
                ext.push(b);
            }
            if b == v && a <= n {
                ext.push(a);
            }
        }
        ext.sort();
        (g.valence(v), ext)
    };
    let mut internal: Vec<(_, usize)> = (n + 1..=n + g.m).map(|v| (key(v), v)).collect();
    internal.sort();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, (kv, _)) in internal.iter().enumerate() {
        if i > 0 && internal[i - 1].0 == *kv {
            blocks.last_mut().unwrap().push(i);
        } else {
            blocks.push(vec![i]);
        }
    }
    let base: Vec<usize> = internal.iter().map(|(_, v)| *v).collect();
    let mut best: Option<(Vec<(usize, usize)>, i64)> = None;
    let mut zero = false;
    let mut order = base.clone();
    for_each_block_order(&blocks, &base, &mut order, 0, &mut |order: &[usize]| {
        // order[new position] = old vertex
        let mut perm = vec![0; g.m];
        for (pos, &v) in order.iter().enumerate() {
            perm[v - n - 1] = pos;
        }
        let f = |v: usize| if v > n { perm[v - n - 1] + n + 1 } else { v };
        let mut s = sign(d * parity(&perm));
        let mut mapped: Vec<((usize, usize), usize)> = Vec::with_capacity(g.k());
        for (i, &(a, b)) in g.edges.iter().enumerate() {
            let (x, y) = (f(a), f(b));
            if x > y {
                s *= sign(d);
                mapped.push(((y, x), i));
            } else {
                mapped.push(((x, y), i));
            }
        }
        mapped.sort();
        let edge_perm: Vec<usize> = {
            let mut p = vec![0; mapped.len()];
            for (pos, (_, i)) in mapped.iter().enumerate() {
                p[*i] = pos;
            }
            p
        };
        s *= sign((d - 1) * parity(&edge_perm));
        let edges: Vec<(usize, usize)> = mapped.into_iter().map(|(e, _)| e).collect();
        match &best {
            Some((b, bs)) if *b == edges => {
                if *bs != s {
                    zero = true;
                }
            }
            Some((b, _)) if *b < edges => {}
            _ => {
                best = Some((edges, s));
                zero = false;
            }
        }
    });
    let (edges, s) = best.unwrap_or((Vec::new(), 1));
    if d % 2 == 0 && edges.windows(2).any(|w| w[0] == w[1]) {
        zero = true;
    }
    GraphClass { graph: AdmissibleGraph { n, m: g.m, edges }, sign: if zero { 0 } else { s }, zero }
}

fn for_each_block_order(
    blocks: &[Vec<usize>],
    base: &[usize],
    order: &mut Vec<usize>,
    b: usize,
    f: &mut dyn FnMut(&[usize]),
) {
    if b == blocks.len() {
        f(order);
        return;
    }
    let block = &blocks[b];
    for p in crate::graded::permutations(block.len()) {
        for (slot, &src) in block.iter().zip(p.iter()) {
            order[*slot] = base[block[src]];
        }
        for_each_block_order(blocks, base, order, b + 1, f);
    }
}

/// Finite linear combination of canonical classes of one `Graphs_d(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphVector {
    pub d: i64,
    pub n: usize,
    pub terms: Lin<AdmissibleGraph>,
}

impl GraphVector {
    pub fn zero(d: i64, n: usize) -> Self {
        GraphVector { d, n, terms: Lin::zero() }
    }

    pub fn from_graph(d: i64, g: &AdmissibleGraph) -> Result<Self> {
        let c = g.canonicalize(d)?;
        let mut v = Self::zero(d, g.n);
        v.add_class(&c, &qi(1));
        Ok(v)
    }

    fn add_class(&mut self, c: &GraphClass, coeff: &Scalar) {
        if !c.zero {
            self.terms.add_term(c.graph.clone(), coeff.clone() * qi(c.sign));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        GraphVector { d: self.d, n: self.n, terms: Lin::sum(&self.terms, &other.terms) }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        GraphVector { d: self.d, n: self.n, terms: self.terms.scale(c) }
    }

    pub fn differential(&self) -> Self {
        let mut out = Self::zero(self.d, self.n);
        for (g, c) in self.terms.iter() {
            out.terms.add_scaled(&differential(self.d, g).terms, c);
        }
        out
    }

    pub fn product(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.d, self.n);
        for (a, ca) in self.terms.iter() {
            for (b, cb) in other.terms.iter() {
                out.terms.add_scaled(&product(self.d, a, b).terms, &(ca.clone() * cb.clone()));
            }
        }
        out
    }

    /// Components by degree `(d - 1) k - d m`.
    pub fn homogeneous_parts(&self) -> Vec<(i64, GraphVector)> {
        let mut parts: std::collections::BTreeMap<i64, GraphVector> = Default::default();
        for (g, c) in self.terms.iter() {
            parts
                .entry(g.degree(self.d))
                .or_insert_with(|| Self::zero(self.d, self.n))
                .terms
                .add_term(g.clone(), c.clone());
        }
        parts.into_iter().collect()
    }
}

/// Disjoint union with externals identified; the edges and internal
/// vertices of `a` come first.
pub fn product(d: i64, a: &AdmissibleGraph, b: &AdmissibleGraph) -> GraphVector {
    assert_eq!(a.n, b.n, "product of graphs with different external vertex counts");
    let n = a.n;
    let shift = |v: usize| if v > n { v + a.m } else { v };
    let mut edges = a.edges.clone();
    edges.extend(b.edges.iter().map(|&(x, y)| (shift(x), shift(y))));
    let g = AdmissibleGraph { n, m: a.m + b.m, edges };
    let mut out = GraphVector::zero(d, n);
    out.add_class(&canonical(&g, d), &qi(1));
    out
}

/// Sum over edges with an internal endpoint of the contracted graph.
///
/// Edge `e_i = a -> b` with `b` removed (the internal endpoint, or the
/// larger one when both are internal) contributes
/// `(-1)^{(d-1) i + d j}` times the graph with `b` merged into `a`, where
/// `i` is the 0-based edge position and `j` the 0-based internal index of
/// `b`. An edge pointing away from `b` is reversed first.
pub fn differential(d: i64, g: &AdmissibleGraph) -> GraphVector {
    let n = g.n;
    let mut out = GraphVector::zero(d, n);
    for (i, &(a, b)) in g.edges.iter().enumerate() {
        if a <= n && b <= n {
            continue;
        }
        let (keep, gone, flip) = if b > n && (a <= n || a < b) { (a, b, false) } else { (b, a, true) };
        let j = (gone - n - 1) as i64;
        let mut s = sign((d - 1) * i as i64 + d * j);
        if flip {
            s *= sign(d);
        }
        let re = |v: usize| {
            let v = if v == gone { keep } else { v };
            if v > gone {
                v - 1
            } else {
                v
            }
        };
        let edges: Vec<(usize, usize)> =
            g.edges.iter().enumerate().filter(|(l, _)| *l != i).map(|(_, &(x, y))| (re(x), re(y))).collect();
        if edges.iter().any(|(x, y)| x == y) {
            continue;
        }
        let h = AdmissibleGraph { n, m: g.m - 1, edges };
        if !h.is_admissible() {
            continue;
        }
        out.add_class(&canonical(&h, d), &qi(s));
    }
    out
}
