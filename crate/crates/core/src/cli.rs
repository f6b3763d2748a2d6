//! The `qdist` command line.
//!
//! Exit codes: 0 on success, 1 on usage and input errors, 2 when the
//! capacities cannot hold the circuit.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{improvement_pct, run_suite, write_csv, SuiteSpec};
use crate::circuit::{parse_qasm, Circuit};
use crate::distribution::{
    attach_accounting, feasibility_check, plan_distribution, write_subcircuits, CommModel, Feasibility,
    QpuEnvironment,
};
use crate::error::{Error, Result};
use crate::grouping::{find_groups, find_groups_segmented, segment_by_depth, GroupingPolicy};
use crate::hypergraph::{build_hypergraph, export_hmetis};
use crate::partition::{partition, random_partition, Mode, PartitionConfig};

#[derive(Debug, Parser)]
#[command(name = "qdist", version, about = "Partition quantum circuits across QPUs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Fm,
    Kway,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CommArg {
    PerChannel,
    SingleLink,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print width, size and depth.
    Stats { file: PathBuf },
    /// Partition a circuit over K QPUs.
    Partition {
        file: PathBuf,
        #[arg(long)]
        parts: usize,
        /// Per-QPU qubit capacities, comma separated.
        #[arg(long, value_delimiter = ',')]
        capacities: Option<Vec<u64>>,
        #[arg(long, value_enum, default_value = "fm")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "on")]
        grouping: Switch,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Keep gate groups inside depth windows of this many layers.
        #[arg(long)]
        segment_depth: Option<usize>,
        /// Write per-QPU subcircuits and a plan summary into this directory.
        #[arg(long)]
        emit: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Also compare against the mean of this many random partitions.
        #[arg(long)]
        baseline: Option<u64>,
        #[arg(long, value_enum, default_value = "per-channel")]
        comm_model: CommArg,
    },
    /// Write the circuit's hypergraph in hMETIS format.
    Hmetis {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "on")]
        grouping: Switch,
    },
    /// Run an experiment suite and write one CSV row per run.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Fail on missing circuit files instead of skipping them.
        #[arg(long)]
        strict: bool,
        /// Write the improvement summary as JSON here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Debug, Serialize)]
struct BlockJson {
    data: u64,
    e: u64,
    o: usize,
    r: Option<f64>,
}

#[derive(Debug, Serialize)]
struct PartitionJson {
    circuit: String,
    n: usize,
    method: &'static str,
    k: usize,
    cut_edges: u64,
    ebits: u64,
    blocks: Vec<BlockJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    improvement_pct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    feasibility: Option<Feasibility>,
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("circuit");
    Ok(parse_qasm(&text)?.with_name(name))
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Infeasible(_) => 2,
                _ => 1,
            }
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Stats { file } => {
            let c = read_circuit(&file)?;
            writeln!(out, "{}", c.metrics())?;
        }
        Command::Hmetis { file, out: path, grouping } => {
            let c = read_circuit(&file)?;
            let groups = (grouping == Switch::On).then(|| find_groups(&c, &GroupingPolicy::default()));
            let h = build_hypergraph(&c, groups.as_deref())?;
            std::fs::write(&path, export_hmetis(&h))?;
            writeln!(out, "wrote {} ({} edges, {} vertices)", path.display(), h.edge_count(), h.vertex_count())?;
        }
        Command::Bench {
            suite,
            out: path,
            strict,
            summary,
        } => {
            let spec = SuiteSpec::from_json(&std::fs::read_to_string(&suite)?)?;
            let base = suite.parent().unwrap_or(Path::new("."));
            let report = run_suite(&spec, base, strict)?;
            write_csv(&report.rows, std::fs::File::create(&path)?)?;
            for i in &report.improvements {
                let pct = |p: Option<f64>| p.map_or("n/a".to_string(), |p| format!("{p:.1}%"));
                writeln!(
                    out,
                    "{} k={} {}: {:.2} ebits, random {:.2} ({}), plain random {:.2} ({})",
                    i.circuit,
                    i.k,
                    i.method.name(),
                    i.ebits,
                    i.random_same_graph,
                    pct(i.improvement_same_graph_pct),
                    i.random_plain,
                    pct(i.improvement_vs_plain_pct),
                )?;
            }
            if let Some(s) = summary {
                std::fs::write(s, serde_json::to_string_pretty(&report.improvements)?)?;
            }
            writeln!(out, "wrote {} rows to {}", report.rows.len(), path.display())?;
        }
        Command::Partition {
            file,
            parts,
            capacities,
            method,
            grouping,
            epsilon,
            seed,
            restarts,
            segment_depth,
            emit,
            json,
            baseline,
            comm_model,
        } => {
            let c = read_circuit(&file)?;
            let mut config = match &capacities {
                Some(caps) => {
                    if caps.len() != parts {
                        return Err(Error::Config(format!("{} capacities for {parts} parts", caps.len())));
                    }
                    PartitionConfig::with_capacities(caps.clone())
                }
                None => PartitionConfig::balanced(parts),
            };
            config = config.epsilon(epsilon).seed(seed).restarts(restarts).mode(match method {
                MethodArg::Fm => Mode::RecursiveBisect,
                MethodArg::Kway => Mode::DirectKway,
                MethodArg::Random => Mode::Random,
            });
            config.validate()?;
            if let Some(caps) = &capacities {
                QpuEnvironment::new(caps).validate(c.width())?;
            }

            let policy = GroupingPolicy::default();
            let groups = match (grouping, segment_depth) {
                (Switch::Off, _) => None,
                (Switch::On, None) => Some(find_groups(&c, &policy)),
                (Switch::On, Some(w)) => Some(find_groups_segmented(&c, &segment_by_depth(&c, w)?, &policy)),
            };
            let h = build_hypergraph(&c, groups.as_deref())?;
            let mut result = partition(&h, &config)?;
            attach_accounting(&c, groups.as_deref(), &mut result)?;

            // random baseline on the same hypergraph
            let improvement = match baseline {
                Some(samples) if samples > 0 => {
                    let mut total = 0;
                    for s in seed..seed + samples {
                        total += random_partition(&h, &config.clone().seed(s))?.cut.ebits;
                    }
                    improvement_pct(total as f64 / samples as f64, result.cut.ebits as f64)
                }
                _ => None,
            };

            let env = match &capacities {
                Some(caps) => QpuEnvironment::new(caps),
                None => QpuEnvironment::balanced(parts, c.width().div_ceil(parts) as u64),
            };
            let model = match comm_model {
                CommArg::PerChannel => CommModel::PerChannel,
                CommArg::SingleLink => CommModel::SingleLink,
            };
            let plan = plan_distribution(&c, groups.as_deref(), &result, &env)?;
            let feasibility = capacities.as_ref().map(|_| feasibility_check(&plan, &env, model));
            if let Some(dir) = &emit {
                let paths = write_subcircuits(&plan, dir)?;
                let summary = dir.join(format!("{}.plan.json", c.name));
                std::fs::write(&summary, serde_json::to_string_pretty(&plan.summary())?)?;
                log::info!("wrote {} subcircuits and {}", paths.len(), summary.display());
            }

            let method_name = match method {
                MethodArg::Fm => "fm",
                MethodArg::Kway => "kway",
                MethodArg::Random => "random",
            };
            if json {
                let report = PartitionJson {
                    circuit: c.name.clone(),
                    n: c.width(),
                    method: method_name,
                    k: parts,
                    cut_edges: result.cut.cut_edges,
                    ebits: result.cut.ebits,
                    blocks: result
                        .per_block
                        .iter()
                        .map(|b| BlockJson {
                            data: b.data_qubits,
                            e: b.comm_qubits,
                            o: b.ops,
                            r: b.ratio,
                        })
                        .collect(),
                    improvement_pct: improvement,
                    feasibility,
                };
                writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            } else {
                writeln!(out, "{}: {}", c.name, c.metrics())?;
                writeln!(
                    out,
                    "method={method_name} k={parts} grouping={} cut_edges={} ebits={}",
                    if groups.is_some() { "on" } else { "off" },
                    result.cut.cut_edges,
                    result.cut.ebits
                )?;
                for (i, b) in result.per_block.iter().enumerate() {
                    let r = b.ratio.map_or("-".to_string(), |r| r.to_string());
                    writeln!(out, "qpu {i}: data={} e={} o={} r={r}", b.data_qubits, b.comm_qubits, b.ops)?;
                }
                if let Some(p) = improvement {
                    writeln!(out, "improvement over random: {p:.1}%")?;
                }
                if let Some(f) = &feasibility {
                    writeln!(out, "fits with communication qubits: {}", if f.feasible { "yes" } else { "no" })?;
                }
            }
        }
    }
    Ok(())
}
