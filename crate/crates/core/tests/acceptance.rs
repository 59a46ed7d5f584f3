//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Every check is exact (cyclotomic equality); the only tolerances are the
//! wall-clock limits printed next to each line.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tqd_core::db::{self, Database, GenerateOptions};
use tqd_core::equivalence::{classify, EquivClassReport};
use tqd_core::group::catalog;
use tqd_core::modular::{
    fusion_rules, s_matrix_abelian, s_matrix_direct, s_matrix_galois, simple_objects, t_matrix, verify_modular,
    ModularData, Strategy,
};
use tqd_core::{Cocycle3, Cyclotomic};

const MAX_ORDER: usize = 8;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, ok_detail: String) -> Outcome {
    match failures.first() {
        None => Outcome { passed: true, detail: ok_detail },
        Some(first) => Outcome { passed: false, detail: format!("{} problem(s), first: {first}", failures.len()) },
    }
}

fn within(label: &str, took: Duration, limit: Duration, failures: &mut Vec<String>) {
    if took > limit {
        failures.push(format!("{label} took {took:.2?}, limit {limit:?}"));
    }
}

/// Orbit representatives of one order, verified, with the time it took.
fn order_data(n: usize) -> (Vec<ModularData>, Duration) {
    let start = Instant::now();
    let mut out = Vec::new();
    for name in catalog(n).expect("catalog order") {
        let g = db::load_group(name, false).unwrap();
        let (_, orbits) = db::group_orbits(&g, false).unwrap();
        for o in orbits {
            out.push(db::generate_one(&o.cocycle, o.representative.clone(), Strategy::Auto, 0).unwrap());
        }
    }
    (out, start.elapsed())
}

fn class_table_row(
    report: &EquivClassReport,
    n: usize,
    ranks: &[usize],
    datasets: &[usize],
    st: &[usize],
    t: &[usize],
    failures: &mut Vec<String>,
) -> String {
    let Some(row) = report.order(n) else {
        failures.push(format!("order {n} missing from the report"));
        return String::new();
    };
    let got = |f: fn(&tqd_core::equivalence::RankRow) -> usize| row.ranks.iter().map(f).collect::<Vec<_>>();
    let got_ranks = got(|r| r.rank);
    let got_datasets = got(|r| r.orbit_count);
    let got_st = got(|r| r.st_count);
    let got_t = got(|r| r.t_count);
    for (what, g, want) in [
        ("ranks", &got_ranks, ranks),
        ("datasets", &got_datasets, datasets),
        ("(S,T)-classes", &got_st, st),
        ("T-classes", &got_t, t),
    ] {
        if g.as_slice() != want {
            failures.push(format!("order {n} {what}: got {g:?}, expected {want:?}"));
        }
    }
    format!("order {n}: ranks {got_ranks:?}, datasets {got_datasets:?}, (S,T) {got_st:?}, T {got_t:?}")
}

fn criterion_1() -> Outcome {
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let database = Database::new(dir.path());
    database.generate_all(2, &GenerateOptions::default()).unwrap();
    let data: Vec<ModularData> = database.load_all().unwrap().into_iter().filter(|d| d.order == 2).collect();
    let report = classify(&data, false);
    let took = start.elapsed();
    if data.len() != 2 || data.iter().any(|d| d.rank != 4) {
        failures.push(format!("expected 2 datasets of rank 4, got {:?}", data.iter().map(|d| d.rank).collect::<Vec<_>>()));
    }
    let detail = class_table_row(&report, 2, &[4], &[2], &[2], &[2], &mut failures);
    within("order 2", took, Duration::from_secs(1), &mut failures);
    outcome(failures, format!("{detail} in {took:.2?}"))
}

fn criterion_2(by_order: &BTreeMap<usize, (Vec<ModularData>, Duration)>) -> Outcome {
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for p in [3, 5, 7] {
        let (data, gen_time) = &by_order[&p];
        let start = Instant::now();
        let report = classify(data, false);
        let took = *gen_time + start.elapsed();
        class_table_row(&report, p, &[p * p], &[3], &[3], &[3], &mut failures);
        within(&format!("order {p}"), took, Duration::from_secs(10), &mut failures);
        details.push(format!("{p}: {took:.2?}"));
    }
    outcome(failures, format!("rank p^2, 3/3/3 for p = 3, 5, 7 ({})", details.join(", ")))
}

fn timed_row(
    by_order: &BTreeMap<usize, (Vec<ModularData>, Duration)>,
    n: usize,
    limit: Duration,
    row: (&[usize], &[usize], &[usize], &[usize]),
) -> Outcome {
    let mut failures = Vec::new();
    let (data, gen_time) = &by_order[&n];
    let start = Instant::now();
    let report = classify(data, false);
    let took = *gen_time + start.elapsed();
    let detail = class_table_row(&report, n, row.0, row.1, row.2, row.3, &mut failures);
    within(&format!("order {n}"), took, limit, &mut failures);
    outcome(failures, format!("{detail} in {took:.2?}"))
}

fn criterion_5(by_order: &BTreeMap<usize, (Vec<ModularData>, Duration)>, all: &EquivClassReport) -> Outcome {
    let mut o = timed_row(by_order, 8, Duration::from_secs(3600), (&[22, 64], &[25, 22], &[20, 18], &[16, 17]));
    // T alone and (S,T) agree below order 8 and first differ at 8.
    let first_divergence = all
        .orders
        .iter()
        .find(|row| row.ranks.iter().any(|r| r.st_count != r.t_count))
        .map(|row| row.order);
    if first_divergence != Some(8) {
        o.passed = false;
        o.detail = format!("{}; T and (S,T) first diverge at {first_divergence:?}, expected 8", o.detail);
    } else {
        o.detail.push_str("; T and (S,T) first diverge at order 8");
    }
    o
}

fn criterion_6(all: &EquivClassReport) -> Outcome {
    let expected: [(usize, usize, usize, usize); 7] =
        [(2, 1, 2, 2), (3, 1, 3, 3), (4, 2, 8, 7), (5, 1, 3, 3), (6, 2, 12, 12), (7, 1, 3, 3), (8, 5, 47, 38)];
    let mut failures = Vec::new();
    for (n, groups, upper, lower) in expected {
        match all.order(n) {
            None => failures.push(format!("order {n} missing")),
            Some(row) => {
                let got = (row.groups, row.upper_bound(), row.lower_bound());
                if got != (groups, upper, lower) {
                    failures.push(format!("order {n}: got {got:?}, expected {:?}", (groups, upper, lower)));
                }
            }
        }
    }
    outcome(failures, "groups, upper and lower bounds match for orders 2..8".into())
}

fn criterion_7(data: &[ModularData]) -> Outcome {
    let mut failures = Vec::new();
    let one = Cyclotomic::one();
    for md in data {
        let report = verify_modular(md);
        for c in report.checks.iter().filter(|c| !c.passed) {
            failures.push(format!("{}: {} at {}", md.id(), c.name, c.witness.as_deref().unwrap_or("?")));
        }
        if md.t[0] != one {
            failures.push(format!("{}: T[0] != 1", md.id()));
        }
        let dims: u64 = md.dims().iter().map(|d| d * d).sum();
        if dims != (md.order * md.order) as u64 {
            failures.push(format!("{}: sum of dim^2 is {dims}", md.id()));
        }
        if let Err(e) = fusion_rules(&md.s) {
            failures.push(format!("{}: {e}", md.id()));
        }
    }
    outcome(failures, format!("{} datasets, every axiom exact", data.len()))
}

fn instances(max_order: usize) -> Vec<(String, Cocycle3)> {
    let mut out = Vec::new();
    for n in 1..=max_order {
        for name in catalog(n).unwrap() {
            let g = db::load_group(name, false).unwrap();
            let (_, orbits) = db::group_orbits(&g, false).unwrap();
            out.extend(orbits.into_iter().map(|o| (format!("{name} {:?}", o.representative), o.cocycle)));
        }
    }
    out
}

/// Exponent mod L of each identity, zero when it holds.
fn identities(omega: &Cocycle3, g: usize, h: usize, x: usize, y: usize) -> [u64; 3] {
    let grp = omega.group();
    let l = omega.l();
    let xi = grp.inv(x);
    let th = |a, b, c| omega.theta_exp(a, b, c);
    let ga = |a, b, c| omega.gamma_exp(a, b, c);
    // θ_g(x,y) θ_g(xy,z) = θ_g(x,yz) θ_{x⁻¹gx}(y,z), with z = h
    let centre = (th(g, x, y) + th(g, grp.mul(x, y), h) + 2 * l - th(g, x, grp.mul(y, h)) - th(grp.conj(xi, g), y, h)) % l;
    let gx = grp.conj(xi, g);
    let hx = grp.conj(xi, h);
    let relation = (th(g, x, y) + th(h, x, y) + ga(x, g, h) + ga(y, gx, hx) + 2 * l
        - th(grp.mul(g, h), x, y)
        - ga(grp.mul(x, y), g, h))
        % l;
    // γ_x(g,h) γ_x(gh,k) ω(x⁻¹gx, x⁻¹hx, x⁻¹kx) = γ_x(h,k) γ_x(g,hk) ω(g,h,k), with k = y
    let kx = grp.conj(xi, y);
    let gamma = (ga(x, g, h) + ga(x, grp.mul(g, h), y) + omega.value(gx, hx, kx) + 3 * l
        - ga(x, h, y)
        - ga(x, g, grp.mul(h, y))
        - omega.value(g, h, y))
        % l;
    [centre, relation, gamma]
}

const IDENTITY_NAMES: [&str; 3] = ["2-cocycle on the centralizer", "theta/gamma relation", "gamma identity"];

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let mut counts = [0usize; 4];
    let all = instances(MAX_ORDER);

    for (id, omega) in &all {
        let n = omega.group().order();
        let objects = simple_objects(omega).unwrap();

        if omega.group().is_abelian() {
            counts[0] += 1;
            if s_matrix_abelian(&objects).unwrap() != s_matrix_direct(&objects) {
                failures.push(format!("{id}: abelian S differs from direct S"));
            }
        }
        if n <= 6 {
            let direct = s_matrix_direct(&objects);
            let t = t_matrix(&objects);
            for seed in 0..10 {
                counts[1] += 1;
                if s_matrix_galois(&objects, &t, seed).unwrap() != direct {
                    failures.push(format!("{id}: Galois S differs from direct S with seed {seed}"));
                }
            }
        }

        let mut check = |g, h, x, y| {
            counts[2] += 1;
            for (k, e) in identities(omega, g, h, x, y).into_iter().enumerate() {
                if e != 0 {
                    failures.push(format!("{id}: {} fails at {:?}", IDENTITY_NAMES[k], (g, h, x, y)));
                }
            }
        };
        if n <= 4 {
            for g in 0..n {
                for h in 0..n {
                    for x in 0..n {
                        for y in 0..n {
                            check(g, h, x, y);
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..1000 {
                check(rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
            }
        }

        for obj in objects.list() {
            counts[3] += 1;
            let domain = obj.centralizer.as_group();
            if let Err(e) = obj.character.check_twisted_conjugate(domain, &obj.theta) {
                failures.push(format!("{id}: {e}"));
            }
            if let Err(e) = obj.character.check_inverse(domain, &obj.theta) {
                failures.push(format!("{id}: {e}"));
            }
        }
    }
    outcome(
        failures,
        format!(
            "{} abelian S comparisons, {} Galois runs, {} identity tuples, {} projective characters",
            counts[0], counts[1], counts[2], counts[3]
        ),
    )
}

fn criterion_9(data: &[ModularData]) -> Outcome {
    let mut failures = Vec::new();
    let mut trivial_rank = BTreeMap::new();
    for md in data.iter().filter(|d| d.class_vector.iter().all(|&c| c == 0)) {
        trivial_rank.insert(md.group.clone(), md.rank);
        let g = db::load_group(&md.group, false).unwrap();
        if g.is_abelian() && md.rank != md.order * md.order {
            failures.push(format!("{}: trivial rank {} != |G|^2", md.group, md.rank));
        }
    }
    for md in data {
        match trivial_rank.get(&md.group) {
            None => failures.push(format!("{}: no trivial-cocycle dataset", md.group)),
            Some(&r) if md.rank > r => failures.push(format!("{} exceeds trivial rank {r}", md.id())),
            _ => {}
        }
    }
    outcome(failures, format!("{} groups, {} datasets", trivial_rank.len(), data.len()))
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    results.push((1, "order 2 row", criterion_1()));

    let by_order: BTreeMap<usize, (Vec<ModularData>, Duration)> = (1..=MAX_ORDER).map(|n| (n, order_data(n))).collect();
    let all_data: Vec<ModularData> = by_order.values().flat_map(|(d, _)| d.iter().cloned()).collect();
    let all = classify(&all_data, false);

    results.push((2, "prime order rows 3, 5, 7", criterion_2(&by_order)));
    results.push((3, "order 4 row", timed_row(&by_order, 4, Duration::from_secs(60), (&[16], &[8], &[7], &[7]))));
    results.push((
        4,
        "order 6 row",
        timed_row(&by_order, 6, Duration::from_secs(300), (&[8, 36], &[6, 6], &[6, 6], &[6, 6])),
    ));
    results.push((5, "order 8 row", criterion_5(&by_order, &all)));
    results.push((6, "Morita bounds, orders 2..8", criterion_6(&all)));
    results.push((7, "modular axioms on every dataset", criterion_7(&all_data)));
    results.push((8, "oracle equivalences and cocycle identities", criterion_8()));
    results.push((9, "rank facts", criterion_9(&all_data)));

    let mut failed = 0;
    for (k, name, o) in &results {
        println!("criterion {k} [{}] {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
