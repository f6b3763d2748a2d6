//! Build the grouped hypergraph of a circuit and print it in hMETIS format.

use qdist::circuit::parse_qasm;
use qdist::grouping::{find_groups, GroupingPolicy};
use qdist::hypergraph::{build_hypergraph, export_hmetis, import_hmetis, VertexKind};

const PROGRAM: &str = "OPENQASM 2.0;
qreg q[5];
h q[0];
cx q[0],q[1];
cx q[0],q[2];
cz q[0],q[3];
cx q[3],q[4];
";

fn main() -> qdist::Result<()> {
    let c = parse_qasm(PROGRAM)?;
    let groups = find_groups(&c, &GroupingPolicy::default());
    let h = build_hypergraph(&c, Some(&groups))?;
    for v in h.vertices() {
        match v.kind {
            VertexKind::Qubit(q) => println!("vertex {}: qubit {}", v.id, q.index()),
            VertexKind::Grouping { group, .. } => {
                println!("vertex {}: group {group} anchored at {:?}", v.id, h.anchor(v.id))
            }
        }
    }
    for e in h.edges() {
        println!("edge {}: pins {:?} ({:?})", e.id, e.pins, e.origin);
    }
    let text = export_hmetis(&h);
    print!("{text}");
    let back = import_hmetis(&text)?;
    assert_eq!(back.pin_count(), h.pin_count());
    Ok(())
}
