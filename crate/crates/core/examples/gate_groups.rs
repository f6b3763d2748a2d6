//! Find same-control runs of two-qubit gates in a QFT and show how each
//! group collapses into one hyperedge.

use qdist::bench::{generate, CircuitKind};
use qdist::grouping::{find_groups, find_groups_segmented, segment_by_depth, GroupingPolicy};
use qdist::hypergraph::build_hypergraph;

fn main() -> qdist::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let c = generate(CircuitKind::Qft, n, 0)?;
    let policy = GroupingPolicy::default();
    let groups = find_groups(&c, &policy);
    for g in &groups {
        let targets: Vec<usize> = g.targets.iter().map(|q| q.index()).collect();
        println!(
            "group {}: control q{} gates {:?} targets {:?}{}",
            g.id,
            g.control.index(),
            g.members,
            targets,
            if g.reuse { " (reuse)" } else { "" }
        );
    }
    let plain = build_hypergraph(&c, None)?;
    let grouped = build_hypergraph(&c, Some(&groups))?;
    println!("plain:   {} edges, {} pins", plain.edge_count(), plain.pin_count());
    println!("grouped: {} edges, {} pins", grouped.edge_count(), grouped.pin_count());

    // groups may not cross depth windows
    let windows = segment_by_depth(&c, 4)?;
    let segmented = find_groups_segmented(&c, &windows, &policy);
    println!("{} windows of 4 layers: {} groups", windows.len(), segmented.len());
    Ok(())
}
