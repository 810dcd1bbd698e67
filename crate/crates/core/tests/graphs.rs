use holonomy_core::graphs::{
    arnold_dimensions, cohomology_ranks, differential, enumerate_block, enumerate_graphs, phi_to_cohomology, product, AdmissibleGraph,
    GraphBounds, GraphVector,
};
use holonomy_core::scalar::{qi, sign};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn all_classes(d: i64, n: usize, max_m: usize, max_k: usize) -> Vec<AdmissibleGraph> {
    enumerate_graphs(d, n, GraphBounds::new(max_m, max_k), None).into_iter().map(|c| c.graph).collect()
}

#[test]
fn differential_squares_to_zero() {
    for d in [2, 3] {
        for n in 1..=3 {
            for g in all_classes(d, n, 2, 5) {
                let dd = differential(d, &g).differential();
                assert!(dd.is_zero(), "d = {}, {}", d, g.label());
            }
        }
    }
}

#[test]
fn leibniz_rule() {
    for d in [2, 3] {
        for n in 2..=3 {
            let classes = all_classes(d, n, 2, 5);
            for a in &classes {
                for b in &classes {
                    if a.m + b.m > 2 || a.k() + b.k() > 5 {
                        continue;
                    }
                    let va = GraphVector::from_graph(d, a).unwrap();
                    let vb = GraphVector::from_graph(d, b).unwrap();
                    let lhs = product(d, a, b).differential();
                    let rhs = va.differential().product(&vb).add(&va.product(&vb.differential()).scale(&qi(sign(a.degree(d)))));
                    assert_eq!(lhs, rhs, "d = {}: {} * {}", d, a.label(), b.label());
                }
            }
        }
    }
}

#[test]
fn graded_commutativity() {
    for d in [2, 3, 4] {
        let classes = all_classes(d, 3, 1, 4);
        for a in &classes {
            for b in &classes {
                let s = sign(a.degree(d) * b.degree(d));
                assert_eq!(product(d, a, b), product(d, b, a).scale(&qi(s)));
            }
        }
    }
}

#[test]
fn arnold_oracle_itself() {
    assert_eq!(arnold_dimensions(2, 3, 3, false), vec![1, 3, 2, 0]);
    assert_eq!(arnold_dimensions(2, 2, 2, false), vec![1, 1, 0]);
    assert_eq!(arnold_dimensions(2, 4, 4, false), vec![1, 6, 11, 6, 0]);
    // even generators need w_ij^2 = 0 as well; without it S^2 would get a
    // class in degree 4
    assert_eq!(arnold_dimensions(3, 2, 2, false), vec![1, 1, 1]);
    assert_eq!(arnold_dimensions(3, 2, 2, true), vec![1, 1, 0]);
    assert_eq!(arnold_dimensions(3, 3, 2, false), vec![1, 3, 5]);
}

#[test]
fn ranks_match_the_arnold_presentation() {
    for (d, n) in [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3)] {
        let top = (n - 1) as i64;
        let hi = n as i64 * (d - 1);
        let bounds = GraphBounds::enclosing(d, 0, hi, top);
        let t = cohomology_ranks(d, n, 0, hi, bounds);
        assert!(t.saturated(), "{:?}", t.warnings);
        let want = arnold_dimensions(d, n, n, true);
        let mut expect = BTreeMap::new();
        for (j, w) in want.iter().enumerate() {
            if *w > 0 {
                expect.insert(j as i64 * (d - 1), *w);
            }
        }
        assert_eq!(t.nonzero(), expect, "d = {}, n = {}", d, n);
    }
}

#[test]
fn enumeration_snapshot() {
    let b = GraphBounds::new(1, 3);
    let list = enumerate_graphs(2, 3, b, Some((i64::MIN, 2)));
    let labels: Vec<String> = list.iter().map(|c| c.graph.label()).collect();
    assert_eq!(
        labels,
        vec![
            "0:",
            "0:1>2",
            "0:1>3",
            "0:2>3",
            "1:1>4,2>4,3>4",
            "0:1>2,1>3",
            "0:1>2,2>3",
            "0:1>3,2>3",
        ]
    );
    // blocks are duplicate free and closed under the differential
    for (m, k) in [(1, 3), (1, 4), (2, 5)] {
        let here = enumerate_block(3, 3, m, k);
        let below = enumerate_block(3, 3, m - 1, k - 1);
        for g in &here {
            for (h, _) in differential(3, g).terms.iter() {
                assert!(below.contains(h));
            }
        }
    }
}

#[test]
fn phi_relations_hold_in_cohomology() {
    for d in [2, 3] {
        let r = phi_to_cohomology(d, 3, GraphBounds::enclosing(d, 0, 2 * (d - 1), 2)).unwrap();
        assert!(r.ok, "{:?}", r);
        assert_eq!(r.generators, 3);
        assert_eq!(r.relations.len(), 6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabeling_round_trips(idx in 0usize..40, seed in any::<u64>(), d in 2i64..5) {
        let classes = all_classes(d, 3, 2, 5);
        let g = &classes[idx % classes.len()];
        let mut perm: Vec<usize> = (0..g.m).collect();
        let mut ep: Vec<usize> = (0..g.k()).collect();
        let mut s = seed;
        let mut next = || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) as usize };
        for i in (1..perm.len()).rev() { let j = next() % (i + 1); perm.swap(i, j); }
        for i in (1..ep.len()).rev() { let j = next() % (i + 1); ep.swap(i, j); }
        let flips: Vec<bool> = (0..g.k()).map(|_| next() % 2 == 1).collect();
        let (h, sg) = g.relabeled(d, &perm, &ep, &flips);
        let c = h.canonicalize(d).unwrap();
        prop_assert_eq!(&c.graph, g);
        prop_assert_eq!(c.sign * sg, 1);
        // the differential commutes with relabeling
        prop_assert_eq!(differential(d, &h).scale(&qi(sg)), differential(d, g));
    }
}

#[test]
fn higher_orders_add_no_cohomology() {
    for (d, n, order) in [(2, 2, 3), (2, 3, 3), (3, 2, 3)] {
        let b = GraphBounds::enclosing(d, 0, 3 * (d - 1), order);
        let t = cohomology_ranks(d, n, 0, 3 * (d - 1), b);
        assert!(t.saturated());
        assert!(t.blocks.iter().any(|b| b.order >= n as i64 && b.dim > 0));
        for blk in &t.blocks {
            if blk.order >= n as i64 {
                assert_eq!(blk.betti, 0, "d = {}, n = {}: {:?}", d, n, blk);
            }
        }
    }
}
