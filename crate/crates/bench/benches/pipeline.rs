use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tqd_bench::{dataset, group, objects};
use tqd_core::cohomology::orbit_representatives;
use tqd_core::db::HARD_MAX_ORDER;
use tqd_core::equivalence::{canonical_key, st_equivalent};
use tqd_core::modular::{s_matrix_abelian, s_matrix_direct, s_matrix_galois, t_matrix};

fn cohomology(c: &mut Criterion) {
    let mut g = c.benchmark_group("cohomology");
    for spec in ["C2xC2xC2", "D4", "Q8", "C3xC3"] {
        let grp = group(spec);
        g.bench_function(spec, |b| b.iter(|| orbit_representatives(&grp, HARD_MAX_ORDER).unwrap()));
    }
    g.finish();
}

fn s_matrix(c: &mut Criterion) {
    let mut g = c.benchmark_group("s_matrix");
    g.sample_size(10);
    for (spec, index) in [("S3", 1), ("D4", 3), ("Q8", 1), ("C4xC2", 2)] {
        let objs = objects(spec, index);
        let t = t_matrix(&objs);
        let id = format!("{spec}/{index}");
        g.bench_with_input(BenchmarkId::new("direct", &id), &objs, |b, o| b.iter(|| s_matrix_direct(o)));
        g.bench_with_input(BenchmarkId::new("galois", &id), &objs, |b, o| b.iter(|| s_matrix_galois(o, &t, 0).unwrap()));
        if objs.group().is_abelian() {
            g.bench_with_input(BenchmarkId::new("abelian", &id), &objs, |b, o| b.iter(|| s_matrix_abelian(o).unwrap()));
        }
    }
    g.finish();
}

fn equivalence(c: &mut Criterion) {
    let mut g = c.benchmark_group("equivalence");
    for (spec, index) in [("D4", 3), ("C4xC2", 0)] {
        let md = dataset(spec, index);
        let id = format!("{spec}/{index}");
        g.bench_with_input(BenchmarkId::new("canonical_key", &id), &md, |b, m| b.iter(|| canonical_key(&m.s, &m.t)));
        g.bench_with_input(BenchmarkId::new("self_search", &id), &md, |b, m| {
            b.iter(|| st_equivalent(&m.s, &m.t, &m.s, &m.t).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, cohomology, s_matrix, equivalence);
criterion_main!(benches);
