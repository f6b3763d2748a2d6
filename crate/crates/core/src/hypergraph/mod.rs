//! Hypergraph model of a circuit: qubits are vertices, non-local gates (or
//! whole gate groups) are hyperedges.

mod hmetis;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Qubit};
use crate::error::{Error, Result};
use crate::grouping::GateGroup;

pub use hmetis::{export_hmetis, import_hmetis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexKind {
    Qubit(Qubit),
    /// Auxiliary vertex of a reuse group, anchored to the group's control
    /// vertex when known.
    Grouping { group: usize, anchor: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    pub kind: VertexKind,
    pub weight: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeOrigin {
    Gate(usize),
    Group(usize),
    /// Read from an external file.
    External,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperedge {
    pub id: usize,
    pub pins: Vec<usize>,
    pub weight: u64,
    pub origin: EdgeOrigin,
    /// Vertex whose state is shared when the edge is cut (the control).
    pub home: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    vertices: Vec<Vertex>,
    edges: Vec<Hyperedge>,
    #[serde(skip)]
    incidence: Vec<Vec<usize>>,
}

/// Cost of an assignment under the connectivity metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CutReport {
    pub cut_edges: u64,
    pub lambda_minus_one: u64,
    pub ebits: u64,
}

impl Hypergraph {
    /// Builds a hypergraph from vertex weights and edge pin lists. Every
    /// vertex is a plain qubit vertex; edges get unit weight.
    pub fn from_edges(weights: &[u64], edges: &[Vec<usize>]) -> Result<Self> {
        let vertices = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| Vertex {
                id: i,
                kind: VertexKind::Qubit(Qubit(i)),
                weight: w,
            })
            .collect();
        let edges = edges
            .iter()
            .enumerate()
            .map(|(i, pins)| Hyperedge {
                id: i,
                pins: pins.clone(),
                weight: 1,
                origin: EdgeOrigin::External,
                home: pins.first().copied().unwrap_or(0),
            })
            .collect();
        Hypergraph::from_parts(vertices, edges)
    }

    /// Assembles a hypergraph, checking ids and pins.
    pub fn from_parts(vertices: Vec<Vertex>, edges: Vec<Hyperedge>) -> Result<Self> {
        for (i, v) in vertices.iter().enumerate() {
            if v.id != i {
                return Err(Error::Config(format!("vertex ids must be dense, found {} at {i}", v.id)));
            }
        }
        let n = vertices.len();
        let mut incidence = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            if e.id != i {
                return Err(Error::Config(format!("edge ids must be dense, found {} at {i}", e.id)));
            }
            if e.pins.len() < 2 {
                return Err(Error::Config(format!("edge {i} has fewer than two pins")));
            }
            if e.weight == 0 {
                return Err(Error::Config(format!("edge {i} has zero weight")));
            }
            for (j, &p) in e.pins.iter().enumerate() {
                if p >= n {
                    return Err(Error::Config(format!("edge {i} pin {p} out of range")));
                }
                if e.pins[..j].contains(&p) {
                    return Err(Error::Config(format!("edge {i} repeats pin {p}")));
                }
                incidence[p].push(i);
            }
            if !e.pins.contains(&e.home) {
                return Err(Error::Config(format!("edge {i} home {} is not a pin", e.home)));
            }
        }
        Ok(Hypergraph {
            vertices,
            edges,
            incidence,
        })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Ids of the edges incident to `v`.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    pub fn pin_count(&self) -> usize {
        self.edges.iter().map(|e| e.pins.len()).sum()
    }

    pub fn weight(&self, v: usize) -> u64 {
        self.vertices[v].weight
    }

    pub fn total_weight(&self) -> u64 {
        self.vertices.iter().map(|v| v.weight).sum()
    }

    /// Anchor vertex of a grouping vertex, if any.
    pub fn anchor(&self, v: usize) -> Option<usize> {
        match self.vertices[v].kind {
            VertexKind::Grouping { anchor, .. } => anchor,
            VertexKind::Qubit(_) => None,
        }
    }

    pub fn grouping_vertex_count(&self) -> usize {
        self.vertices
            .iter()
            .filter(|v| matches!(v.kind, VertexKind::Grouping { .. }))
            .count()
    }

    /// Largest total incident edge weight over all vertices.
    pub fn max_weighted_degree(&self) -> u64 {
        self.incidence
            .iter()
            .map(|es| es.iter().map(|&e| self.edges[e].weight).sum::<u64>())
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("hypergraph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Hypergraph = serde_json::from_str(text)?;
        Hypergraph::from_parts(raw.vertices, raw.edges)
    }
}

/// Translates a circuit into its hypergraph.
///
/// One weight-1 vertex per qubit (ids follow the flat qubit order). Without
/// groups every CX/CZ/CP gate becomes a 2-pin edge and every CCX/CCZ a
/// 3-pin edge. With groups, each reuse group adds a weight-0 grouping vertex
/// (ids after the qubits, in group order) and a single edge
/// `{grouping vertex, control, targets...}` that replaces its members'
/// edges; other groups keep per-gate edges. Edges appear in the order of
/// their first gate.
pub fn build_hypergraph(circuit: &Circuit, groups: Option<&[GateGroup]>) -> Result<Hypergraph> {
    let n = circuit.width();
    let mut vertices: Vec<Vertex> = (0..n)
        .map(|i| Vertex {
            id: i,
            kind: VertexKind::Qubit(Qubit(i)),
            weight: 1,
        })
        .collect();

    // gate seq -> (group index, is first member)
    let mut owner: Vec<Option<(usize, bool)>> = vec![None; circuit.gates().len()];
    let mut group_vertex = Vec::new();
    for (gi, g) in groups.unwrap_or(&[]).iter().enumerate() {
        for (k, &seq) in g.members.iter().enumerate() {
            let valid = circuit
                .gate(seq)
                .is_some_and(|gate| gate.kind.is_controlled_pair() && gate.control() == g.control);
            if !valid || owner[seq].is_some() {
                return Err(Error::UnknownGroupGate { group: g.id, seq });
            }
            owner[seq] = Some((gi, k == 0));
        }
        if g.reuse {
            let id = vertices.len();
            vertices.push(Vertex {
                id,
                kind: VertexKind::Grouping {
                    group: g.id,
                    anchor: Some(g.control.0),
                },
                weight: 0,
            });
            group_vertex.push(Some(id));
        } else {
            group_vertex.push(None);
        }
    }

    let mut edges = Vec::new();
    for gate in circuit.gates() {
        if !gate.kind.is_nonlocal() {
            continue;
        }
        let (pins, origin) = match owner[gate.seq] {
            Some((gi, first)) => match group_vertex[gi] {
                Some(gv) => {
                    if !first {
                        continue;
                    }
                    let g = &groups.unwrap()[gi];
                    let mut pins = vec![gv, g.control.0];
                    pins.extend(g.targets.iter().map(|q| q.0));
                    (pins, EdgeOrigin::Group(g.id))
                }
                None => (gate.qubits.iter().map(|q| q.0).collect(), EdgeOrigin::Gate(gate.seq)),
            },
            None => (gate.qubits.iter().map(|q| q.0).collect(), EdgeOrigin::Gate(gate.seq)),
        };
        let home = match origin {
            EdgeOrigin::Group(_) => pins[1],
            _ => pins[0],
        };
        edges.push(Hyperedge {
            id: edges.len(),
            pins,
            weight: 1,
            origin,
            home,
        });
    }
    Hypergraph::from_parts(vertices, edges)
}

/// Evaluates an assignment of vertices to `blocks` blocks.
///
/// `lambda_minus_one` sums, over edges, the number of blocks an edge spans
/// minus one (times the edge weight); each extra block needs one
/// entangler/disentangler pair, and each pair consumes two ebits.
pub fn cut_cost(h: &Hypergraph, assignment: &[usize], blocks: usize) -> Result<CutReport> {
    if assignment.len() < h.vertex_count() {
        return Err(Error::Unassigned(assignment.len()));
    }
    if let Some((v, &b)) = assignment.iter().enumerate().find(|(_, &b)| b >= blocks) {
        return Err(Error::BlockOutOfRange { vertex: v, block: b, blocks });
    }
    let mut seen = vec![usize::MAX; blocks];
    let mut report = CutReport::default();
    for e in h.edges() {
        let mut spanned = 0u64;
        for &p in &e.pins {
            let b = assignment[p];
            if seen[b] != e.id {
                seen[b] = e.id;
                spanned += 1;
            }
        }
        if spanned > 1 {
            report.cut_edges += e.weight;
            report.lambda_minus_one += (spanned - 1) * e.weight;
        }
    }
    report.ebits = 2 * report.lambda_minus_one;
    Ok(report)
}

/// Block that executes a cut edge. A group runs where its control lives;
/// any other edge runs in the block holding most of its weighted pins,
/// ties going to the block of the last such pin (the gate target).
pub fn hub_block(h: &Hypergraph, edge: &Hyperedge, assignment: &[usize]) -> usize {
    if let EdgeOrigin::Group(_) = edge.origin {
        return assignment[edge.home];
    }
    let weighted: Vec<usize> = edge.pins.iter().copied().filter(|&p| h.weight(p) > 0).collect();
    let pins = if weighted.is_empty() { edge.pins.clone() } else { weighted };
    let mut best = (0usize, assignment[*pins.last().unwrap()]);
    let mut counted: Vec<usize> = Vec::new();
    for &p in pins.iter().rev() {
        let b = assignment[p];
        if counted.contains(&b) {
            continue;
        }
        counted.push(b);
        let n = pins.iter().filter(|&&q| assignment[q] == b).count();
        if n > best.0 {
            best = (n, b);
        }
    }
    best.1
}

/// Communication qubits per block: every cut edge opens one channel from
/// its hub to each other block it spans, and a channel occupies one
/// communication qubit at both ends. The total is `2 (λ−1)`.
pub fn comm_qubits(h: &Hypergraph, assignment: &[usize], blocks: usize) -> Result<Vec<u64>> {
    cut_cost(h, assignment, blocks)?;
    let mut comm = vec![0u64; blocks];
    for e in h.edges() {
        let hub = hub_block(h, e, assignment);
        let mut spanned: Vec<usize> = e.pins.iter().map(|&p| assignment[p]).collect();
        spanned.sort_unstable();
        spanned.dedup();
        for b in spanned.into_iter().filter(|&b| b != hub) {
            comm[hub] += e.weight;
            comm[b] += e.weight;
        }
    }
    Ok(comm)
}
