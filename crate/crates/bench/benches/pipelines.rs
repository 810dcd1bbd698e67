use criterion::{criterion_group, criterion_main, Criterion};
use holonomy_core::fixtures;
use holonomy_core::graphs::{cohomology_ranks, GraphBounds};
use holonomy_core::holonomy::{hol_dgla, hol_infinity, HolonomyCochain, OdeSpec};
use holonomy_core::quadratic::{braid_holonomy, BraidPath};
use holonomy_core::quadrature::QuadSpec;
use holonomy_core::scalar::q;
use holonomy_core::selftest::{run_criterion, small_kz_loop, SelftestConfig};
use std::hint::black_box;

fn graph_ranks(c: &mut Criterion) {
    let mut g = c.benchmark_group("graph_ranks");
    g.sample_size(10);
    for (d, n) in [(2, 2), (2, 3), (3, 3)] {
        let hi = n as i64 * (d - 1);
        let bounds = GraphBounds::enclosing(d, 0, hi, n as i64 - 1);
        g.bench_function(format!("d{}_n{}", d, n), |b| b.iter(|| cohomology_ranks(d, n, 0, hi, black_box(bounds))));
    }
    g.finish();
}

fn holonomies(c: &mut Criterion) {
    let spec = QuadSpec::default();
    let mut g = c.benchmark_group("holonomy");
    g.sample_size(10);
    let heis = fixtures::heisenberg_connection();
    let tri = fixtures::triangle();
    g.bench_function("strict_triangle_n3", |b| b.iter(|| hol_dgla(&heis, black_box(&tri), 3, &spec).unwrap()));
    g.bench_function("infinity_triangle_n3", |b| b.iter(|| hol_infinity(&heis, black_box(&tri), 3, &spec).unwrap()));
    let sphere = fixtures::sphere_connection();
    let tet = fixtures::tetrahedron();
    g.bench_function("sphere_mc_tetrahedron", |b| {
        b.iter(|| {
            let h = HolonomyCochain::infinity(&sphere, 2, spec.clone(), false).unwrap();
            h.mc_residual(black_box(&tet)).unwrap()
        })
    });
    g.finish();
}

fn kz_transport(c: &mut Criterion) {
    let kz = fixtures::sl2_kz(3);
    let spec = QuadSpec::default();
    let ode = OdeSpec::default();
    let half_twist = BraidPath::rotation(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)], 1, 2, 0.5, None);
    let small = small_kz_loop(q(1, 20)).unwrap();
    let mut g = c.benchmark_group("kz");
    g.sample_size(10);
    g.bench_function("half_twist_terms12", |b| b.iter(|| braid_holonomy(&kz, black_box(&half_twist), 12, &spec, &ode).unwrap()));
    g.bench_function("small_loop_terms6", |b| b.iter(|| braid_holonomy(&kz, black_box(&small), 6, &spec, &ode).unwrap()));
    g.finish();
}

fn selftest_criteria(c: &mut Criterion) {
    let cfg = SelftestConfig::default();
    let mut g = c.benchmark_group("selftest");
    g.sample_size(10);
    for crit in [2u32, 8, 10] {
        g.bench_function(format!("criterion_{}", crit), |b| b.iter(|| run_criterion(black_box(&cfg), crit)));
    }
    g.finish();
}

criterion_group!(benches, graph_ranks, holonomies, kz_transport, selftest_criteria);
criterion_main!(benches);
