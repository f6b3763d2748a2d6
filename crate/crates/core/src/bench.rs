//! Benchmark circuits and the random-versus-FM experiment runner.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{parse_qasm, Circuit, GateKind, Qubit};
use crate::distribution::attach_accounting;
use crate::error::{Error, Result};
use crate::grouping::{find_groups, GateGroup, GroupingPolicy};
use crate::hypergraph::{build_hypergraph, Hypergraph};
use crate::partition::{partition, random_partition, Mode, PartitionConfig, PartitionResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitKind {
    Ghz,
    Qft,
    RandomLayered,
}

/// Generates a benchmark circuit on `n ≥ 2` qubits. `seed` only matters for
/// [`CircuitKind::RandomLayered`].
pub fn generate(kind: CircuitKind, n: usize, seed: u64) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::Config(format!("benchmark circuits need at least 2 qubits, got {n}")));
    }
    let c = match kind {
        CircuitKind::Ghz => {
            let mut c = Circuit::with_qubits(format!("ghz{n}"), n);
            c.h(0);
            for i in 0..n - 1 {
                c.cx(i, i + 1);
            }
            c
        }
        CircuitKind::Qft => {
            let mut c = Circuit::with_qubits(format!("qft{n}"), n);
            for i in 0..n {
                c.h(i);
                for j in i + 1..n {
                    c.cp(PI / f64::powi(2.0, (j - i) as i32), j, i);
                }
            }
            c
        }
        CircuitKind::RandomLayered => random_layered(n, n, seed)?,
    };
    Ok(c)
}

/// `layers` layers over `n` qubits: qubits are paired at random, each pair
/// becomes a CX with probability 0.5 and otherwise both qubits get a random
/// single-qubit gate.
fn random_layered(n: usize, layers: usize, seed: u64) -> Result<Circuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::with_qubits(format!("random{n}_s{seed}"), n);
    let singles = [GateKind::H, GateKind::X, GateKind::S, GateKind::T, GateKind::RZ];
    let mut qubits: Vec<usize> = (0..n).collect();
    for _ in 0..layers {
        qubits.shuffle(&mut rng);
        for pair in qubits.chunks(2) {
            if pair.len() == 2 && rng.gen_bool(0.5) {
                c.cx(pair[0], pair[1]);
                continue;
            }
            for &q in pair {
                let kind = *singles.choose(&mut rng).unwrap();
                let params = if kind == GateKind::RZ {
                    vec![rng.gen_range(-PI..PI)]
                } else {
                    vec![]
                };
                c.push(kind, &params, &[Qubit(q)])?;
            }
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Seeded random balanced assignment of the plain hypergraph.
    Random,
    /// Seeded random assignment of the grouped hypergraph, grouping
    /// vertices next to their controls.
    RandomGrouped,
    Fm,
    FmGrouped,
}

impl Method {
    pub fn grouped(self) -> bool {
        matches!(self, Method::RandomGrouped | Method::FmGrouped)
    }

    pub fn is_random(self) -> bool {
        matches!(self, Method::Random | Method::RandomGrouped)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::RandomGrouped => "random_grouped",
            Method::Fm => "fm",
            Method::FmGrouped => "fm_grouped",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRange {
    pub from: u64,
    /// Inclusive.
    pub to: u64,
}

fn default_restarts() -> usize {
    8
}

fn default_baseline_seeds() -> u64 {
    1000
}

fn default_mode() -> Mode {
    Mode::RecursiveBisect
}

/// Experiment description, read from JSON.
///
/// Circuits are either generator shorthands (`ghz:10`, `qft:8`,
/// `random_layered:8` or `random_layered:8:3` with a seed) or paths to
/// OpenQASM files, relative to the spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub circuits: Vec<String>,
    pub methods: Vec<Method>,
    pub parts: Vec<usize>,
    /// Capacity profiles; a profile applies to the `k` equal to its length.
    /// Without profiles every `k` is split evenly.
    #[serde(default)]
    pub capacities: Option<Vec<Vec<u64>>>,
    pub seeds: SeedRange,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    /// Seeds averaged for the random baseline of each comparison.
    #[serde(default = "default_baseline_seeds")]
    pub baseline_seeds: u64,
    #[serde(default)]
    pub epsilon: f64,
    /// Algorithm behind the FM methods.
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default)]
    pub grouping: GroupingPolicy,
}

impl SuiteSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SuiteSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.circuits.is_empty() || self.methods.is_empty() || self.parts.is_empty() {
            return Err(Error::Suite("circuits, methods and parts must be non-empty".into()));
        }
        if self.seeds.to < self.seeds.from {
            return Err(Error::Suite(format!("empty seed range {}..={}", self.seeds.from, self.seeds.to)));
        }
        if self.baseline_seeds == 0 || self.restarts == 0 {
            return Err(Error::Suite("baseline_seeds and restarts must be positive".into()));
        }
        if self.mode == Mode::Random {
            return Err(Error::Suite("mode selects the FM algorithm; use the random methods instead".into()));
        }
        Ok(())
    }
}

/// One CSV row; field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub circuit: String,
    pub n: usize,
    pub size: usize,
    pub depth: usize,
    pub method: Method,
    pub k: usize,
    /// `;`-joined capacities, empty for an even split.
    pub capacities: String,
    pub seed: u64,
    pub cut_edges: u64,
    pub ebits: u64,
    /// `;`-joined r_i, `-` where a block runs no gates.
    pub r: String,
    pub runtime_ms: f64,
}

/// Comparison of one method against the random baselines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub circuit: String,
    pub k: usize,
    pub capacities: String,
    pub method: Method,
    /// Mean ebits of the method over the seed range.
    pub ebits: f64,
    /// Mean random ebits on the same hypergraph as the method.
    pub random_same_graph: f64,
    pub improvement_same_graph_pct: Option<f64>,
    /// Mean random ebits on the plain (ungrouped) hypergraph.
    pub random_plain: f64,
    pub improvement_vs_plain_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub rows: Vec<BenchRow>,
    pub improvements: Vec<Improvement>,
}

/// `100 (baseline − value) / baseline`, `None` for a zero baseline.
pub fn improvement_pct(baseline: f64, value: f64) -> Option<f64> {
    (baseline > 0.0).then(|| 100.0 * (baseline - value) / baseline)
}

/// Resolves a circuit entry of a suite spec.
pub fn load_circuit(entry: &str, base: &Path) -> Result<Circuit> {
    let parts: Vec<&str> = entry.split(':').collect();
    let kind = match parts[0] {
        "ghz" => Some(CircuitKind::Ghz),
        "qft" => Some(CircuitKind::Qft),
        "random_layered" => Some(CircuitKind::RandomLayered),
        _ => None,
    };
    if let (Some(kind), 2..=3) = (kind, parts.len()) {
        let num = |s: &str| s.parse::<u64>().map_err(|_| Error::Suite(format!("bad number `{s}` in `{entry}`")));
        let n = num(parts[1])? as usize;
        let seed = parts.get(2).map(|s| num(s)).transpose()?.unwrap_or(0);
        return generate(kind, n, seed);
    }
    let path: PathBuf = base.join(entry);
    let text = std::fs::read_to_string(&path)?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("circuit")
        .to_string();
    Ok(parse_qasm(&text)?.with_name(name))
}

/// A circuit with its plain and grouped hypergraphs.
pub struct Prepared {
    pub circuit: Circuit,
    pub groups: Vec<GateGroup>,
    pub plain: Hypergraph,
    pub grouped: Hypergraph,
}

impl Prepared {
    pub fn new(circuit: Circuit, policy: &GroupingPolicy) -> Result<Self> {
        let groups = find_groups(&circuit, policy);
        let plain = build_hypergraph(&circuit, None)?;
        let grouped = build_hypergraph(&circuit, Some(&groups))?;
        Ok(Prepared {
            circuit,
            groups,
            plain,
            grouped,
        })
    }

    pub fn graph(&self, grouped: bool) -> &Hypergraph {
        if grouped {
            &self.grouped
        } else {
            &self.plain
        }
    }

    pub fn groups(&self, grouped: bool) -> Option<&[GateGroup]> {
        grouped.then_some(&self.groups[..])
    }

    /// Partitions with `method`, and fills in the per-block accounting.
    pub fn run(&self, method: Method, config: &PartitionConfig) -> Result<PartitionResult> {
        let grouped = method.grouped();
        let h = self.graph(grouped);
        let mut r = if method.is_random() {
            random_partition(h, config)?
        } else {
            partition(h, config)?
        };
        attach_accounting(&self.circuit, self.groups(grouped), &mut r)?;
        Ok(r)
    }

    /// Mean random ebits over `samples` consecutive seeds from `from`.
    pub fn random_mean(&self, grouped: bool, config: &PartitionConfig, from: u64, samples: u64) -> Result<f64> {
        let h = self.graph(grouped);
        let mut total = 0u64;
        for s in from..from + samples {
            total += random_partition(h, &config.clone().seed(s))?.cut.ebits;
        }
        Ok(total as f64 / samples as f64)
    }
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

/// Runs every (circuit, k, capacity profile, method, seed) combination.
///
/// Missing circuit files are skipped with a warning, or fail the run when
/// `strict` is set. Rows come out in spec order.
pub fn run_suite(spec: &SuiteSpec, base: &Path, strict: bool) -> Result<SuiteReport> {
    spec.validate()?;
    let mut rows = Vec::new();
    let mut improvements = Vec::new();
    for entry in &spec.circuits {
        let circuit = match load_circuit(entry, base) {
            Ok(c) => c,
            Err(Error::Io(e)) if !strict => {
                log::warn!("skipping `{entry}`: {e}");
                continue;
            }
            Err(e) => return Err(e),
        };
        let metrics = circuit.metrics();
        let prepared = Prepared::new(circuit, &spec.grouping)?;
        for &k in &spec.parts {
            let profiles: Vec<Option<Vec<u64>>> = match &spec.capacities {
                None => vec![None],
                Some(ps) => ps.iter().filter(|p| p.len() == k).cloned().map(Some).collect(),
            };
            for caps in profiles {
                let base_config = match &caps {
                    Some(c) => PartitionConfig::with_capacities(c.clone()),
                    None => PartitionConfig::balanced(k),
                }
                .epsilon(spec.epsilon)
                .restarts(spec.restarts);
                let cap_text = caps.as_ref().map(join).unwrap_or_default();
                let mut baselines: [Option<f64>; 2] = [None, None];
                for &method in &spec.methods {
                    let mut sum = 0u64;
                    let mut count = 0u64;
                    for seed in spec.seeds.from..=spec.seeds.to {
                        let mode = if method.is_random() { Mode::Random } else { spec.mode };
                        let config = base_config.clone().seed(seed).mode(mode);
                        let start = Instant::now();
                        let r = prepared.run(method, &config)?;
                        let ms = start.elapsed().as_secs_f64() * 1e3;
                        sum += r.cut.ebits;
                        count += 1;
                        rows.push(BenchRow {
                            circuit: prepared.circuit.name.clone(),
                            n: metrics.width,
                            size: metrics.size,
                            depth: metrics.depth,
                            method,
                            k,
                            capacities: cap_text.clone(),
                            seed,
                            cut_edges: r.cut.cut_edges,
                            ebits: r.cut.ebits,
                            r: join(r.per_block.iter().map(|b| match b.ratio {
                                Some(x) => x.to_string(),
                                None => "-".into(),
                            })),
                            runtime_ms: (ms * 1e3).round() / 1e3,
                        });
                    }
                    if method.is_random() {
                        continue;
                    }
                    let mut baseline = |grouped: bool| -> Result<f64> {
                        let slot = &mut baselines[grouped as usize];
                        if slot.is_none() {
                            *slot = Some(prepared.random_mean(grouped, &base_config, spec.seeds.from, spec.baseline_seeds)?);
                        }
                        Ok(slot.unwrap())
                    };
                    let ebits = sum as f64 / count as f64;
                    let same = baseline(method.grouped())?;
                    let plain = baseline(false)?;
                    improvements.push(Improvement {
                        circuit: prepared.circuit.name.clone(),
                        k,
                        capacities: cap_text.clone(),
                        method,
                        ebits,
                        random_same_graph: same,
                        improvement_same_graph_pct: improvement_pct(same, ebits),
                        random_plain: plain,
                        improvement_vs_plain_pct: improvement_pct(plain, ebits),
                    });
                }
            }
        }
    }
    Ok(SuiteReport { rows, improvements })
}

/// Writes rows as CSV with a header line.
pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::compute_metrics;

    fn spec(circuits: &[&str], methods: &[Method]) -> SuiteSpec {
        SuiteSpec {
            circuits: circuits.iter().map(|s| s.to_string()).collect(),
            methods: methods.to_vec(),
            parts: vec![2],
            capacities: None,
            seeds: SeedRange { from: 0, to: 1 },
            restarts: 4,
            baseline_seeds: 200,
            epsilon: 0.0,
            mode: Mode::RecursiveBisect,
            grouping: GroupingPolicy::default(),
        }
    }

    #[test]
    fn generators() {
        let g = generate(CircuitKind::Ghz, 10, 0).unwrap();
        let m = compute_metrics(&g);
        assert_eq!((m.width, m.size), (10, 10));
        assert_eq!(g.count_kind(GateKind::CX), 9);

        let q = generate(CircuitKind::Qft, 4, 0).unwrap();
        assert_eq!(q.count_kind(GateKind::CP), 6);
        assert_eq!(q.count_kind(GateKind::H), 4);
        let first_cp = &q.gates()[1];
        assert_eq!((first_cp.control(), first_cp.target()), (Qubit(1), Qubit(0)));
        assert_eq!(first_cp.params, vec![PI / 2.0]);

        let a = generate(CircuitKind::RandomLayered, 6, 9).unwrap();
        let b = generate(CircuitKind::RandomLayered, 6, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate(CircuitKind::RandomLayered, 6, 10).unwrap());
        assert_eq!(a.depth(), 6);
        assert!(generate(CircuitKind::Ghz, 1, 0).is_err());
    }

    #[test]
    fn shorthand_entries() {
        let base = Path::new(".");
        assert_eq!(load_circuit("qft:5", base).unwrap().name, "qft5");
        assert_eq!(load_circuit("random_layered:4:2", base).unwrap().name, "random4_s2");
        assert!(matches!(load_circuit("qft:x", base), Err(Error::Suite(_))));
        assert!(matches!(load_circuit("missing.qasm", base), Err(Error::Io(_))));
    }

    #[test]
    fn ghz10_improvement() {
        let report = run_suite(&spec(&["ghz:10"], &[Method::Random, Method::Fm]), Path::new("."), false).unwrap();
        assert_eq!(report.rows.len(), 4);
        let imp = &report.improvements[0];
        assert_eq!(imp.ebits, 2.0);
        // the exact random expectation is 10 ebits
        assert!((imp.random_plain - 10.0).abs() < 1.0, "{}", imp.random_plain);
        assert!(imp.improvement_same_graph_pct.unwrap() > 75.0);
    }

    #[test]
    fn edgeless_has_no_improvement() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("idle.qasm"), "OPENQASM 2.0;\nqreg q[4];\nh q;\n").unwrap();
        let report = run_suite(&spec(&["idle.qasm"], &[Method::Fm, Method::FmGrouped]), dir.path(), false).unwrap();
        assert!(report.rows.iter().all(|r| r.ebits == 0));
        assert!(report.improvements.iter().all(|i| i.improvement_same_graph_pct.is_none()));
    }

    #[test]
    fn missing_files_skip_unless_strict() {
        let s = spec(&["nope.qasm", "ghz:4"], &[Method::Fm]);
        let report = run_suite(&s, Path::new("."), false).unwrap();
        assert!(report.rows.iter().all(|r| r.circuit == "ghz4"));
        assert!(run_suite(&s, Path::new("."), true).is_err());
    }

    #[test]
    fn grouping_lowers_qft8_ebits() {
        let s = spec(&["qft:8"], &[Method::Fm, Method::FmGrouped]);
        let report = run_suite(&s, Path::new("."), false).unwrap();
        let ebits = |m: Method| report.improvements.iter().find(|i| i.method == m).unwrap().ebits;
        assert!(ebits(Method::FmGrouped) < ebits(Method::Fm));
    }

    #[test]
    fn csv_is_deterministic_apart_from_runtime() {
        let s = spec(&["qft:6", "random_layered:6:1"], &[Method::Random, Method::FmGrouped]);
        let strip = |rows: Vec<BenchRow>| {
            let rows: Vec<BenchRow> = rows.into_iter().map(|r| BenchRow { runtime_ms: 0.0, ..r }).collect();
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf).unwrap();
            String::from_utf8(buf).unwrap()
        };
        let a = strip(run_suite(&s, Path::new("."), false).unwrap().rows);
        let b = strip(run_suite(&s, Path::new("."), false).unwrap().rows);
        assert_eq!(a, b);
        assert!(a.starts_with("circuit,n,size,depth,method,k,capacities,seed,cut_edges,ebits,r,runtime_ms\n"));
        assert!(a.contains(",fm_grouped,2,,0,"));
    }

    #[test]
    fn spec_json() {
        let s = SuiteSpec::from_json(
            r#"{"circuits":["ghz:10"],"methods":["random","fm"],"parts":[2],
                "capacities":[[6,4]],"seeds":{"from":0,"to":2}}"#,
        )
        .unwrap();
        assert_eq!(s.restarts, 8);
        assert_eq!(s.baseline_seeds, 1000);
        assert!(SuiteSpec::from_json(r#"{"circuits":[],"methods":["fm"],"parts":[2],"seeds":{"from":0,"to":0}}"#).is_err());
        assert!(SuiteSpec::from_json(r#"{"circuits":["ghz:4"],"methods":["fm"],"parts":[2],"seeds":{"from":3,"to":0}}"#).is_err());
    }
}
