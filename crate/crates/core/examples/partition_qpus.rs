//! Partition a QFT over three QPUs of unequal size with each algorithm and
//! compare against random assignment.

use qdist::bench::{generate, CircuitKind};
use qdist::distribution::attach_accounting;
use qdist::grouping::{find_groups, GroupingPolicy};
use qdist::hypergraph::build_hypergraph;
use qdist::partition::{partition, random_partition, Mode, PartitionConfig};

fn main() -> qdist::Result<()> {
    let c = generate(CircuitKind::Qft, 10, 0)?;
    let groups = find_groups(&c, &GroupingPolicy::default());
    let h = build_hypergraph(&c, Some(&groups))?;
    let base = PartitionConfig::with_capacities(vec![5, 3, 2]).restarts(8).seed(1);

    let mut random = 0;
    for s in 0..200 {
        random += random_partition(&h, &base.clone().seed(s))?.cut.ebits;
    }
    println!("random mean: {:.2} ebits", random as f64 / 200.0);

    for mode in [Mode::RecursiveBisect, Mode::DirectKway] {
        let mut r = partition(&h, &base.clone().mode(mode))?;
        attach_accounting(&c, Some(&groups), &mut r)?;
        println!("{mode:?}: {} ebits, loads {:?}", r.cut.ebits, r.loads());
        for (i, b) in r.per_block.iter().enumerate() {
            println!("  qpu {i}: data={} e={} o={} r={:?}", b.data_qubits, b.comm_qubits, b.ops, b.ratio);
        }
    }
    Ok(())
}
