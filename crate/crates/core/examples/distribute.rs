//! Turn a partition into per-QPU programs with cat-entangler channels and
//! write them to a directory (default: a temporary one).

use qdist::bench::{generate, CircuitKind};
use qdist::distribution::{feasibility_check, plan_distribution, write_subcircuits, CommModel, QpuEnvironment};
use qdist::grouping::{find_groups, GroupingPolicy};
use qdist::hypergraph::build_hypergraph;
use qdist::partition::{partition, PartitionConfig};

fn main() -> qdist::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("qdist-distribute"));
    std::fs::create_dir_all(&dir)?;

    let c = generate(CircuitKind::Qft, 6, 0)?;
    let groups = find_groups(&c, &GroupingPolicy::default());
    let h = build_hypergraph(&c, Some(&groups))?;
    let env = QpuEnvironment::new(&[5, 5]);
    let r = partition(&h, &PartitionConfig::with_capacities(vec![3, 3]))?;
    let plan = plan_distribution(&c, Some(&groups), &r, &env)?;

    for ch in &plan.channels {
        println!("channel {}: qpu {} -> qpu {} sharing q{}", ch.id, ch.sender, ch.receiver, ch.shared.index());
    }
    for q in plan.summary().qpus {
        println!("qpu {}: data={} e={} o={} r={:?}", q.id, q.data, q.e, q.o, q.r);
    }
    for model in [CommModel::PerChannel, CommModel::SingleLink] {
        println!("{model:?} fits: {}", feasibility_check(&plan, &env, model).feasible);
    }
    for path in write_subcircuits(&plan, &dir)? {
        println!("wrote {}", path.display());
    }
    let first = std::fs::read_to_string(dir.join(format!("{}.0.qasm", c.name)))?;
    print!("{first}");
    Ok(())
}
