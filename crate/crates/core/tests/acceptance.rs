//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::path::{Path, PathBuf};
use std::time::Instant;

use qdist::bench::{generate, improvement_pct, CircuitKind, Method, Prepared};
use qdist::circuit::{emit_qasm, parse_qasm, Circuit, GateKind};
use qdist::distribution::{plan_distribution, QpuEnvironment};
use qdist::grouping::GroupingPolicy;
use qdist::hypergraph::{build_hypergraph, cut_cost, Hypergraph};
use qdist::oracle::{brute_force_mincut, simulate};
use qdist::partition::{bipartition, fm_pass_with_stats, initial_partition, partition, Mode, PartitionConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn fixtures() -> Vec<(String, Circuit)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .expect("fixture dir")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "qasm"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let text = std::fs::read_to_string(&p).unwrap();
            let c = parse_qasm(&text).unwrap_or_else(|e| panic!("{name}: {e}")).with_name(&name);
            (name, c)
        })
        .collect()
}

fn balanced2() -> PartitionConfig {
    PartitionConfig::balanced(2)
}

// Mean ebits of seeded random partitions, computed straight from cut_cost.
fn random_mean_ebits(h: &Hypergraph, config: &PartitionConfig, samples: u64) -> f64 {
    let mut total = 0u64;
    for s in 0..samples {
        let a = initial_partition(h, &config.clone().seed(s)).unwrap();
        total += cut_cost(h, &a, config.blocks).unwrap().ebits;
    }
    total as f64 / samples as f64
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [8, 16] {
        let p = Prepared::new(generate(CircuitKind::Qft, n, 0).unwrap(), &GroupingPolicy::default()).unwrap();
        let fm = p.run(Method::FmGrouped, &balanced2()).unwrap().cut.ebits as f64;
        let plain = random_mean_ebits(&p.plain, &balanced2(), 1000);
        let same = random_mean_ebits(&p.grouped, &balanced2(), 1000);
        let ratio = fm / plain;
        ok &= ratio <= 0.5;
        parts.push(format!(
            "qft{n}: fm {fm} vs random {plain:.2} ({:.1}% of it; same-graph random {same:.2}, {:.1}%)",
            100.0 * ratio,
            100.0 * fm / same
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 5.0;
    outcome(ok, format!("{}; {secs:.2}s", parts.join("; ")))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [10, 50, 100] {
        let p = Prepared::new(generate(CircuitKind::Ghz, n, 0).unwrap(), &GroupingPolicy::default()).unwrap();
        let fm = p.run(Method::FmGrouped, &balanced2()).unwrap().cut.ebits as f64;
        let random = random_mean_ebits(&p.plain, &balanced2(), 1000);
        let pct = improvement_pct(random, fm).unwrap();
        ok &= pct >= 46.0;
        parts.push(format!("ghz{n}: {fm} vs {random:.2} = {pct:.1}%"));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 2.0;
    outcome(ok, format!("{}; {secs:.2}s", parts.join("; ")))
}

fn random_hypergraph(seed: u64) -> Hypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..=12);
    let m = rng.gen_range(1..=20);
    let edges: Vec<Vec<usize>> = (0..m)
        .map(|_| {
            let size = rng.gen_range(2..=4.min(n));
            rand::seq::index::sample(&mut rng, n, size).into_vec()
        })
        .collect();
    Hypergraph::from_edges(&vec![1; n], &edges).unwrap()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let config = balanced2().restarts(16);
    let mut ghz_ok = true;
    for n in 4..=12 {
        let c = generate(CircuitKind::Ghz, n, 0).unwrap();
        let h = build_hypergraph(&c, None).unwrap();
        let fm = bipartition(&h, &config).unwrap().cut.lambda_minus_one;
        ghz_ok &= fm == brute_force_mincut(&h, &config).unwrap().cost;
    }
    let (mut equal, mut below, mut within) = (0, 0, 0);
    let trials = 200;
    for seed in 0..trials {
        let h = random_hypergraph(seed);
        let fm = bipartition(&h, &config.clone().seed(seed)).unwrap().cut.lambda_minus_one;
        let opt = brute_force_mincut(&h, &config).unwrap().cost;
        equal += (fm == opt) as u32;
        below += (fm < opt) as u32;
        within += (2 * fm <= 3 * opt) as u32;
    }
    let secs = start.elapsed().as_secs_f64();
    let share = f64::from(equal) / trials as f64;
    let ok = ghz_ok && share >= 0.8 && below == 0 && within == trials as u32 && secs < 60.0;
    outcome(
        ok,
        format!(
            "ghz4..12 optimal: {ghz_ok}; random: {equal}/{trials} optimal, {within}/{trials} within 1.5x, {below} below oracle; {secs:.2}s"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, c) in fixtures() {
        let p = Prepared::new(c, &GroupingPolicy::default()).unwrap();
        let g = p.run(Method::FmGrouped, &balanced2()).unwrap().cut.ebits;
        let u = p.run(Method::Fm, &balanced2()).unwrap().cut.ebits;
        ok &= g <= u;
        parts.push(format!("{name} ({g},{u})"));
    }
    let p = Prepared::new(generate(CircuitKind::Qft, 4, 0).unwrap(), &GroupingPolicy::default()).unwrap();
    let pair = (
        p.run(Method::FmGrouped, &balanced2()).unwrap().cut.ebits,
        p.run(Method::Fm, &balanced2()).unwrap().cut.ebits,
    );
    ok &= pair == (4, 8);
    outcome(ok, format!("{}; generated qft4 {pair:?}", parts.join(" ")))
}

fn criterion_5() -> Outcome {
    let mut runs = 0;
    let mut failures = Vec::new();
    let mut circuits = fixtures();
    circuits.push(("qft6".into(), generate(CircuitKind::Qft, 6, 0).unwrap()));
    circuits.push(("random8".into(), generate(CircuitKind::RandomLayered, 8, 3).unwrap()));
    for (name, c) in &circuits {
        let p = Prepared::new(c.clone(), &GroupingPolicy::default()).unwrap();
        let n = c.width();
        for k in 2..=3.min(n) {
            for method in [Method::Random, Method::RandomGrouped, Method::Fm, Method::FmGrouped] {
                for (mode, epsilon) in [(Mode::RecursiveBisect, 0.0), (Mode::DirectKway, 0.25)] {
                    let config = PartitionConfig::balanced(k).mode(mode).epsilon(epsilon).seed(7);
                    let r = p.run(method, &config).unwrap();
                    runs += 1;
                    let cap = (n as f64 / k as f64).ceil() * (1.0 + epsilon);
                    let ops: usize = r.per_block.iter().map(|b| b.ops).sum();
                    let comm: u64 = r.per_block.iter().map(|b| b.comm_qubits).sum();
                    let data_ok = r.per_block.iter().all(|b| b.data_qubits as f64 <= cap + 1e-9);
                    let env = QpuEnvironment::balanced(k, cap.floor() as u64);
                    let plan = plan_distribution(c, p.groups(method.grouped()), &r, &env).unwrap();
                    let s = plan.summary();
                    let plan_ok = s.qpus.iter().map(|q| q.o).sum::<usize>() == c.size()
                        && s.qpus.iter().map(|q| q.e as u64).sum::<u64>() == r.cut.ebits
                        && s.qpus.len() == k;
                    let ok = ops == c.size()
                        && comm == 2 * r.cut.lambda_minus_one
                        && r.per_block.len() == k
                        && data_ok
                        && plan_ok;
                    if !ok {
                        failures.push(format!("{name} k={k} {} {mode:?}", method.name()));
                    }
                }
            }
        }
    }
    outcome(failures.is_empty(), format!("{runs} runs, failures: {failures:?}"))
}

fn criterion_6() -> Outcome {
    let c = generate(CircuitKind::Ghz, 10, 0).unwrap();
    let h = build_hypergraph(&c, None).unwrap();
    let samples = 10_000u64;
    let mut total = 0u64;
    for s in 0..samples {
        let a = initial_partition(&h, &balanced2().seed(s)).unwrap();
        total += cut_cost(&h, &a, 2).unwrap().cut_edges;
    }
    let mean = total as f64 / samples as f64;
    outcome((mean - 5.0).abs() <= 0.3, format!("mean cut edges {mean:.3} over {samples} seeds"))
}

fn without_measurements(c: &Circuit) -> Circuit {
    let mut out = Circuit::new(c.name.clone());
    for r in c.qregs() {
        out.add_qreg(&r.name, r.size).unwrap();
    }
    for g in c.gates().iter().filter(|g| g.kind != GateKind::Measure) {
        out.push(g.kind, &g.params, &g.qubits).unwrap();
    }
    out
}

fn criterion_7() -> Outcome {
    let mut worst = 1.0f64;
    let mut checked = Vec::new();
    for (name, c) in fixtures().into_iter().filter(|(_, c)| c.width() <= 10) {
        let back = parse_qasm(&emit_qasm(&c)).unwrap();
        let a = simulate(&without_measurements(&c)).unwrap();
        let b = simulate(&without_measurements(&back)).unwrap();
        let f = qdist::oracle::overlap(&a, &b).unwrap().powi(2);
        worst = worst.min(f);
        checked.push(name);
    }
    outcome(
        worst >= 1.0 - 1e-9 && !checked.is_empty(),
        format!("{} fixtures, worst fidelity {worst:.12}", checked.len()),
    )
}

fn fit_loglog(points: &[(f64, f64)]) -> (f64, f64) {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, sxy * sxy / (sxx * syy))
}

fn criterion_8() -> Outcome {
    let seeds = 20;
    let mut points = Vec::new();
    for n in [16, 32, 64, 128] {
        let c = generate(CircuitKind::Ghz, n, 0).unwrap();
        let h = build_hypergraph(&c, None).unwrap();
        let mut updates = 0u64;
        for s in 0..seeds {
            let config = balanced2().seed(s);
            let start = initial_partition(&h, &config).unwrap();
            updates += fm_pass_with_stats(&h, &start, &config).unwrap().2.gain_updates;
        }
        points.push((h.pin_count() as f64, updates as f64 / seeds as f64));
    }
    let (slope, r2) = fit_loglog(&points);
    let c = generate(CircuitKind::Ghz, 100, 0).unwrap();
    let h = build_hypergraph(&c, None).unwrap();
    let start = Instant::now();
    partition(&h, &balanced2()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let ok = (slope - 1.0).abs() <= 0.15 && r2 >= 0.95 && secs < 1.0;
    let pts: Vec<String> = points.iter().map(|(p, u)| format!("{p}:{u:.0}")).collect();
    outcome(ok, format!("slope {slope:.3}, R2 {r2:.4} (pins:updates {}); ghz100 {secs:.3}s", pts.join(" ")))
}

fn main() {
    let criteria: [(&str, Check); 8] = [
        ("grouped FM on QFT(8/16) at most half of random", criterion_1),
        ("GHZ(10/50/100) improvement at least 46%", criterion_2),
        ("FM matches brute-force min-cut", criterion_3),
        ("grouping never costs more ebits", criterion_4),
        ("accounting laws", criterion_5),
        ("random baseline calibration", criterion_6),
        ("parse/emit round trip", criterion_7),
        ("linear gain updates per pass", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {tag}: {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
