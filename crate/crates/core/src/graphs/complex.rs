//! Enumeration of graph classes and exact cohomology of `Graphs_d(n)`.
//!
//! The differential preserves the order `k - m`, so the complex splits into
//! finite blocks indexed by (order, degree). For order `e` and degree `p`
//! the block has `m = (d - 1) e - p` and `k = m + e`.

use super::{differential, AdmissibleGraph, GraphClass};
use crate::linalg::{rank, zeros};
use crate::scalar::Scalar;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GraphBounds {
    pub max_m: usize,
    pub max_k: usize,
    /// Optional cap on `k - m`.
    pub max_order: Option<i64>,
}

impl GraphBounds {
    pub fn new(max_m: usize, max_k: usize) -> Self {
        GraphBounds { max_m, max_k, max_order: None }
    }

    pub fn contains(&self, m: i64, k: i64) -> bool {
        m >= 0
            && k >= 0
            && m <= self.max_m as i64
            && k <= self.max_k as i64
            && self.max_order.is_none_or(|e| k - m <= e)
    }

    /// Smallest bounds enclosing every block of order `<= max_order` in
    /// degrees `lo..=hi` together with the blocks one degree below.
    pub fn enclosing(d: i64, lo: i64, hi: i64, max_order: i64) -> Self {
        let mut b = GraphBounds { max_m: 0, max_k: 0, max_order: Some(max_order) };
        for p in lo - 1..=hi {
            for e in 0..=max_order {
                let m = (d - 1) * e - p;
                if m >= 0 {
                    b.max_m = b.max_m.max(m as usize);
                    b.max_k = b.max_k.max((m + e) as usize);
                }
            }
        }
        b
    }
}

/// Canonical nonzero classes with exactly `m` internal vertices and `k`
/// edges, sorted.
pub fn enumerate_block(d: i64, n: usize, m: usize, k: usize) -> Vec<AdmissibleGraph> {
    if n == 0 {
        return if m == 0 && k == 0 { vec![AdmissibleGraph::empty(0)] } else { Vec::new() };
    }
    if 2 * k < 3 * m {
        return Vec::new();
    }
    let nv = n + m;
    let mut pairs = Vec::new();
    for u in 1..=nv {
        for v in u + 1..=nv {
            pairs.push((u, v));
        }
    }
    let repeats = d % 2 != 0;
    let mut raw: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut cur = Vec::with_capacity(k);
    let mut val = vec![0usize; nv + 1];
    let search = Search { pairs: &pairs, n, k, repeats };
    search.choose(0, &mut cur, &mut val, &mut raw);
    let mut out: Vec<AdmissibleGraph> = raw
        .into_par_iter()
        .filter_map(|edges| {
            let g = AdmissibleGraph { n, m, edges };
            // some representative lists internal vertices by decreasing valence
            let val: Vec<usize> = (n + 1..=nv).map(|v| g.valence(v)).collect();
            if val.windows(2).any(|w| w[0] < w[1]) || !g.is_admissible() {
                return None;
            }
            let c = g.canonicalize(d).ok()?;
            if c.zero {
                None
            } else {
                Some(c.graph)
            }
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

struct Search<'a> {
    pairs: &'a [(usize, usize)],
    n: usize,
    k: usize,
    repeats: bool,
}

impl Search<'_> {
    fn choose(&self, start: usize, cur: &mut Vec<(usize, usize)>, val: &mut [usize], out: &mut Vec<Vec<(usize, usize)>>) {
        // every internal vertex still needs valency 3 from the remaining edges
        let missing: usize = val[self.n + 1..].iter().map(|&v| 3usize.saturating_sub(v)).sum();
        if missing > 2 * (self.k - cur.len()) {
            return;
        }
        if cur.len() == self.k {
            out.push(cur.clone());
            return;
        }
        for i in start..self.pairs.len() {
            let (a, b) = self.pairs[i];
            cur.push((a, b));
            val[a] += 1;
            val[b] += 1;
            self.choose(if self.repeats { i } else { i + 1 }, cur, val, out);
            val[a] -= 1;
            val[b] -= 1;
            cur.pop();
        }
    }
}

/// All nonzero classes within the bounds, optionally restricted to a
/// degree window; ordered by (degree, m, k, edges).
pub fn enumerate_graphs(d: i64, n: usize, bounds: GraphBounds, window: Option<(i64, i64)>) -> Vec<GraphClass> {
    let mut out = Vec::new();
    for m in 0..=bounds.max_m {
        for k in 0..=bounds.max_k {
            let deg = (d - 1) * k as i64 - d * m as i64;
            if !bounds.contains(m as i64, k as i64) {
                continue;
            }
            if let Some((lo, hi)) = window {
                if deg < lo || deg > hi {
                    continue;
                }
            }
            out.extend(enumerate_block(d, n, m, k));
        }
    }
    out.sort_by_key(|g| (g.degree(d), g.m, g.k(), g.edges.clone()));
    out.into_iter().map(|graph| GraphClass { graph, sign: 1, zero: false }).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct RankBlock {
    pub degree: i64,
    pub order: i64,
    pub m: usize,
    pub k: usize,
    pub dim: usize,
    /// Rank of the differential leaving the block.
    pub rank_out: usize,
    /// Rank of the differential arriving from degree `degree - 1`.
    pub rank_in: usize,
    pub betti: usize,
    pub saturated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyTable {
    pub d: i64,
    pub n: usize,
    pub bounds: GraphBounds,
    /// Total rank per degree, summed over the enclosed orders.
    pub ranks: BTreeMap<i64, usize>,
    pub blocks: Vec<RankBlock>,
    pub warnings: Vec<String>,
}

impl CohomologyTable {
    pub fn nonzero(&self) -> BTreeMap<i64, usize> {
        self.ranks.iter().filter(|(_, r)| **r > 0).map(|(p, r)| (*p, *r)).collect()
    }

    pub fn saturated(&self) -> bool {
        self.warnings.is_empty()
    }
}

struct Blocks {
    d: i64,
    n: usize,
    cache: HashMap<(usize, usize), Vec<AdmissibleGraph>>,
}

impl Blocks {
    fn get(&mut self, m: i64, k: i64) -> Vec<AdmissibleGraph> {
        if m < 0 || k < 0 {
            return Vec::new();
        }
        let (d, n) = (self.d, self.n);
        self.cache.entry((m as usize, k as usize)).or_insert_with(|| enumerate_block(d, n, m as usize, k as usize)).clone()
    }
}

/// Matrix of the differential from `src` to `dst` (rows `dst`).
pub fn differential_matrix(d: i64, src: &[AdmissibleGraph], dst: &[AdmissibleGraph]) -> Vec<Vec<Scalar>> {
    let index: HashMap<&AdmissibleGraph, usize> = dst.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut mat = zeros(dst.len(), src.len());
    for (c, g) in src.iter().enumerate() {
        for (h, v) in differential(d, g).terms.iter() {
            let r = *index.get(h).expect("differential leaves the enumerated block");
            mat[r][c] = v.clone();
        }
    }
    mat
}

fn rank_between(d: i64, src: &[AdmissibleGraph], dst: &[AdmissibleGraph]) -> usize {
    if src.is_empty() || dst.is_empty() {
        return 0;
    }
    rank(&differential_matrix(d, src, dst))
}

/// Exact ranks of `H^p(Graphs_d(n))` for `lo <= p <= hi`, summed over every
/// block inside the bounds. A block whose incoming neighbour falls outside
/// the bounds is reported in `warnings`.
pub fn cohomology_ranks(d: i64, n: usize, lo: i64, hi: i64, bounds: GraphBounds) -> CohomologyTable {
    let mut blocks = Blocks { d, n, cache: HashMap::new() };
    let mut table = CohomologyTable { d, n, bounds, ranks: BTreeMap::new(), blocks: Vec::new(), warnings: Vec::new() };
    let inside = |m: i64, k: i64| m <= bounds.max_m as i64 && k <= bounds.max_k as i64;
    let max_e = bounds.max_order.unwrap_or(i64::MAX);
    for p in lo..=hi {
        table.ranks.insert(p, 0);
        for e in 0.. {
            let m = (d - 1) * e - p;
            let k = m + e;
            if m < 0 {
                continue;
            }
            if !inside(m, k) || e > max_e {
                break;
            }
            let here = blocks.get(m, k);
            if here.is_empty() {
                continue;
            }
            let saturated = inside(m + 1, k + 1);
            if !saturated {
                table.warnings.push(format!(
                    "window not saturated: degree {} order {} needs graphs with m = {}, k = {} outside bounds (m <= {}, k <= {})",
                    p,
                    e,
                    m + 1,
                    k + 1,
                    bounds.max_m,
                    bounds.max_k
                ));
            }
            let below = if saturated { blocks.get(m + 1, k + 1) } else { Vec::new() };
            let above = blocks.get(m - 1, k - 1);
            let rank_out = rank_between(d, &here, &above);
            let rank_in = rank_between(d, &below, &here);
            let betti = here.len() - rank_out - rank_in;
            *table.ranks.get_mut(&p).unwrap() += betti;
            table.blocks.push(RankBlock {
                degree: p,
                order: e,
                m: m as usize,
                k: k as usize,
                dim: here.len(),
                rank_out,
                rank_in,
                betti,
                saturated,
            });
        }
    }
    table
}
