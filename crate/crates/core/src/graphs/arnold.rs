//! Dimensions of the Arnold algebra, used as an independent check on the
//! graph cohomology ranks.

use crate::linalg::rank;
use crate::scalar::{qi, sign, Scalar};
use num_traits::Zero;
use std::collections::BTreeMap;

/// Dimensions of the graded commutative algebra on `w_ij` (`i < j`, degree
/// `d - 1`) modulo `w_ij w_jk + w_jk w_ki + w_ki w_ij` (with
/// `w_ji = (-1)^d w_ij`), and optionally `w_ij^2`, up to word length `top`.
pub fn arnold_dimensions(d: i64, n: usize, top: usize, squares: bool) -> Vec<usize> {
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    let odd = (d - 1) % 2 != 0;
    // monomials: sorted index lists (strictly increasing if odd)
    fn monomials(p: usize, len: usize, odd: bool) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &out {
                let start = w.last().map(|&l| if odd { l + 1 } else { l }).unwrap_or(0);
                for i in start..p {
                    let mut v = w.clone();
                    v.push(i);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }
    let normal = |w: &[usize]| -> Option<(Vec<usize>, i64)> {
        let mut v = w.to_vec();
        let mut s = 1;
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                if odd {
                    s = -s;
                }
                j -= 1;
            }
        }
        if odd && v.windows(2).any(|x| x[0] == x[1]) {
            return None;
        }
        Some((v, s))
    };
    let w = |i: usize, j: usize| -> (usize, i64) {
        if i < j {
            (pairs.iter().position(|&p| p == (i, j)).unwrap(), 1)
        } else {
            (pairs.iter().position(|&p| p == (j, i)).unwrap(), sign(d))
        }
    };
    let mut relations: Vec<Vec<(usize, usize, i64)>> = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                if i < j && j < k {
                    let terms = [(w(i, j), w(j, k)), (w(j, k), w(k, i)), (w(k, i), w(i, j))];
                    relations.push(terms.iter().map(|((a, sa), (b, sb))| (*a, *b, sa * sb)).collect());
                }
            }
        }
    }
    if squares && !odd {
        for a in 0..pairs.len() {
            relations.push(vec![(a, a, 1)]);
        }
    }
    let mut dims = Vec::new();
    for len in 0..=top {
        let basis = monomials(pairs.len(), len, odd);
        let index: BTreeMap<Vec<usize>, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        if len >= 2 {
            for rel in &relations {
                for rest in monomials(pairs.len(), len - 2, odd) {
                    let mut row = vec![Scalar::zero(); basis.len()];
                    for &(a, b, s) in rel {
                        let mut word = vec![a, b];
                        word.extend(&rest);
                        if let Some((m, s2)) = normal(&word) {
                            row[index[&m]] += qi(s * s2);
                        }
                    }
                    rows.push(row);
                }
            }
        }
        dims.push(basis.len() - if rows.is_empty() { 0 } else { rank(&rows) });
    }
    dims
}

