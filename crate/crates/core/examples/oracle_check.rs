//! Compare FM against the exhaustive min-cut on small random hypergraphs,
//! then check a circuit against its emitted text with the simulator.

use qdist::bench::{generate, CircuitKind};
use qdist::circuit::{emit_qasm, parse_qasm};
use qdist::hypergraph::Hypergraph;
use qdist::oracle::{brute_force_mincut, overlap, simulate};
use qdist::partition::{bipartition, PartitionConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> qdist::Result<()> {
    let config = PartitionConfig::balanced(2).restarts(16);
    let mut optimal = 0;
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(4..=10);
        let edges: Vec<Vec<usize>> = (0..rng.gen_range(3..=15))
            .map(|_| rand::seq::index::sample(&mut rng, n, 2).into_vec())
            .collect();
        let h = Hypergraph::from_edges(&vec![1; n], &edges)?;
        let fm = bipartition(&h, &config)?.cut.lambda_minus_one;
        let best = brute_force_mincut(&h, &config)?.cost;
        optimal += usize::from(fm == best);
        if fm != best {
            println!("seed {seed}: fm {fm}, optimum {best}");
        }
    }
    println!("fm optimal on {optimal}/50");

    let c = generate(CircuitKind::RandomLayered, 8, 42)?;
    let back = parse_qasm(&emit_qasm(&c))?;
    let f = overlap(&simulate(&c)?, &simulate(&back)?)?.powi(2);
    println!("round-trip fidelity {f:.12}");
    Ok(())
}
