//! The Drinfeld-Kohno Lie algebras `t_d(n)` by generators and relations.

use serde::Serialize;

/// One defining relation of `t_d(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TdRelation {
    /// `[t_a, t_b] = 0` for four distinct indices.
    Commute((usize, usize), (usize, usize)),
    /// `[t_ij, t_ik + t_jk] = 0` for three distinct indices.
    Infinitesimal { i: usize, j: usize, k: usize },
}

/// Generators `t_ij` (`1 <= i != j <= n`) of degree `2 - d` with
/// `t_ij = (-1)^d t_ji`.
#[derive(Clone, Debug, Serialize)]
pub struct TdPresentation {
    pub d: i64,
    pub n: usize,
    pub relations: Vec<TdRelation>,
}

impl TdPresentation {
    pub fn new(d: i64, n: usize) -> Self {
        let pairs = Self::pairs_of(n);
        let mut relations = Vec::new();
        for (a, &p) in pairs.iter().enumerate() {
            for &r in &pairs[a + 1..] {
                if p.0 != r.0 && p.0 != r.1 && p.1 != r.0 && p.1 != r.1 {
                    relations.push(TdRelation::Commute(p, r));
                }
            }
        }
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    if i != j && j != k && i != k {
                        relations.push(TdRelation::Infinitesimal { i, j, k });
                    }
                }
            }
        }
        TdPresentation { d, n, relations }
    }

    fn pairs_of(n: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                out.push((i, j));
            }
        }
        out
    }

    /// Generators `t_ij` with `i < j`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        Self::pairs_of(self.n)
    }

    pub fn generator_degree(&self) -> i64 {
        2 - self.d
    }

    /// `t_ij = sign * t_{min, max}`.
    pub fn orient(&self, i: usize, j: usize) -> (i64, (usize, usize)) {
        if i < j {
            (1, (i, j))
        } else if self.d % 2 == 0 {
            (1, (j, i))
        } else {
            (-1, (j, i))
        }
    }

    /// Evaluates every relation through images of the generators and a
    /// graded bracket; returns the relation together with its value.
    pub fn evaluate<X: Clone>(
        &self,
        image: &dyn Fn((usize, usize)) -> X,
        scale: &dyn Fn(&X, i64) -> X,
        add: &dyn Fn(&X, &X) -> X,
        bracket: &dyn Fn(&X, &X) -> X,
    ) -> Vec<(TdRelation, X)> {
        let t = |i: usize, j: usize| {
            let (s, p) = self.orient(i, j);
            scale(&image(p), s)
        };
        self.relations
            .iter()
            .map(|r| {
                let v = match r {
                    TdRelation::Commute(a, b) => bracket(&image(*a), &image(*b)),
                    TdRelation::Infinitesimal { i, j, k } => bracket(&t(*i, *j), &add(&t(*i, *k), &t(*j, *k))),
                };
                (r.clone(), v)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_counts() {
        assert!(TdPresentation::new(2, 2).relations.is_empty());
        // n = 3: no commuting pairs, 6 ordered triples
        assert_eq!(TdPresentation::new(2, 3).relations.len(), 6);
        // n = 4: 3 commuting pairs, 24 ordered triples
        assert_eq!(TdPresentation::new(3, 4).relations.len(), 27);
        assert_eq!(TdPresentation::new(3, 2).orient(2, 1), (-1, (1, 2)));
        assert_eq!(TdPresentation::new(2, 2).orient(2, 1), (1, (1, 2)));
    }
}
