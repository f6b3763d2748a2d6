//! Turning a partition into per-QPU subcircuits linked by communication
//! channels.
//!
//! Every cut hyperedge opens one channel per extra block it spans. A channel
//! shares one qubit from its sender block with its receiver block:
//! `cat_entangler` runs on the sender, the receiver uses its half of the
//! ebit pair in place of the shared qubit and closes the channel with
//! `cat_disentangler`. For a gate group the control is shared with every
//! block holding targets, and the channel closes after the last member. A
//! single gate runs in its hub block (see [`hub_block`]) and borrows its
//! remote operands.
//!
//! A channel occupies one communication qubit at each end, so the qubits
//! add up to `2 (λ−1)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::circuit::{emit_qasm, Circuit, GateKind, Qubit, QubitRef};
use crate::error::{Error, Result};
use crate::grouping::GateGroup;
use crate::hypergraph::{build_hypergraph, hub_block, EdgeOrigin};
use crate::partition::{round6, PartitionResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qpu {
    pub id: usize,
    /// Physical qubits, data and communication together.
    pub capacity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QpuEnvironment {
    pub qpus: Vec<Qpu>,
}

impl QpuEnvironment {
    pub fn new(capacities: &[u64]) -> Self {
        QpuEnvironment {
            qpus: capacities
                .iter()
                .enumerate()
                .map(|(id, &capacity)| Qpu { id, capacity })
                .collect(),
        }
    }

    pub fn balanced(k: usize, capacity: u64) -> Self {
        Self::new(&vec![capacity; k])
    }

    pub fn k(&self) -> usize {
        self.qpus.len()
    }

    /// S, the total number of physical qubits.
    pub fn total(&self) -> u64 {
        self.qpus.iter().map(|q| q.capacity).sum()
    }

    pub fn capacities(&self) -> Vec<u64> {
        self.qpus.iter().map(|q| q.capacity).collect()
    }

    /// Checks k ≥ 2, q_i ≥ 1 and S ≥ n.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k() < 2 {
            return Err(Error::Config(format!("need at least 2 QPUs, got {}", self.k())));
        }
        if let Some(q) = self.qpus.iter().find(|q| q.capacity == 0) {
            return Err(Error::Infeasible(format!("QPU {} has no qubits", q.id)));
        }
        if self.total() < n as u64 {
            return Err(Error::Infeasible(format!(
                "S = {} physical qubits for n = {n} circuit qubits",
                self.total()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Channel {
    pub id: usize,
    pub origin: EdgeOrigin,
    /// Block whose qubit is shared (hosts `cat_entangler`).
    pub sender: usize,
    /// Block borrowing the qubit (hosts `cat_disentangler`).
    pub receiver: usize,
    pub shared: Qubit,
    pub sender_ebit: usize,
    pub receiver_ebit: usize,
}

/// Operand of a subcircuit instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Slot {
    /// Index into the QPU's data qubits.
    Data(usize),
    Ebit(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Instr {
    Gate {
        kind: GateKind,
        params: Vec<f64>,
        slots: Vec<Slot>,
        clbit: Option<usize>,
        /// Original gate this executes; `None` for basis changes added
        /// around a shared target.
        seq: Option<usize>,
    },
    Entangle { channel: usize, data: usize, ebit: usize },
    Disentangle { channel: usize, ebit: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpuPlan {
    pub id: usize,
    pub capacity: Option<u64>,
    /// Original qubits placed here; position = local index.
    pub data: Vec<Qubit>,
    /// e_i.
    pub comm_qubits: usize,
    /// o_i, original gates executed here.
    pub ops: usize,
    pub ratio: Option<f64>,
    pub instrs: Vec<Instr>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionPlan {
    pub circuit: Circuit,
    pub qpus: Vec<QpuPlan>,
    pub channels: Vec<Channel>,
    /// Block executing each original gate; `None` for barriers.
    pub executed_on: Vec<Option<usize>>,
    pub ebits_total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpuSummary {
    pub id: usize,
    pub data: usize,
    pub e: usize,
    pub o: usize,
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub qpus: Vec<QpuSummary>,
    pub channels: usize,
    pub ebits_total: usize,
}

struct Builder<'a> {
    block: &'a [usize],
    local: Vec<usize>,
    qpus: Vec<QpuPlan>,
    channels: Vec<Channel>,
}

impl Builder<'_> {
    fn data(&self, q: Qubit) -> Slot {
        Slot::Data(self.local[q.0])
    }

    fn open(&mut self, origin: EdgeOrigin, sender: usize, receiver: usize, shared: Qubit) -> usize {
        let id = self.channels.len();
        let sender_ebit = self.qpus[sender].comm_qubits;
        let receiver_ebit = self.qpus[receiver].comm_qubits;
        self.qpus[sender].comm_qubits += 1;
        self.qpus[receiver].comm_qubits += 1;
        self.channels.push(Channel {
            id,
            origin,
            sender,
            receiver,
            shared,
            sender_ebit,
            receiver_ebit,
        });
        let data = self.local[shared.0];
        self.qpus[sender].instrs.push(Instr::Entangle {
            channel: id,
            data,
            ebit: sender_ebit,
        });
        id
    }

    fn close(&mut self, channel: usize) {
        let c = self.channels[channel];
        self.qpus[c.receiver].instrs.push(Instr::Disentangle {
            channel,
            ebit: c.receiver_ebit,
        });
    }

    fn run(&mut self, b: usize, kind: GateKind, params: &[f64], slots: Vec<Slot>, clbit: Option<usize>, seq: Option<usize>) {
        if seq.is_some() {
            self.qpus[b].ops += 1;
        }
        self.qpus[b].instrs.push(Instr::Gate {
            kind,
            params: params.to_vec(),
            slots,
            clbit,
            seq,
        });
    }
}

/// Builds the distribution of `circuit` for a partition of the hypergraph
/// built from `circuit` and `groups`. Block `b` runs on QPU `b`.
pub fn plan_distribution(
    circuit: &Circuit,
    groups: Option<&[GateGroup]>,
    result: &PartitionResult,
    env: &QpuEnvironment,
) -> Result<DistributionPlan> {
    if result.blocks_used != env.k() {
        return Err(Error::BlockCountMismatch {
            expected: env.k(),
            got: result.blocks_used,
        });
    }
    let mut plan = build_plan(circuit, groups, result)?;
    for (q, e) in plan.qpus.iter_mut().zip(&env.qpus) {
        q.capacity = Some(e.capacity);
    }
    Ok(plan)
}

/// Fills in o_i and r_i of `result` from the distribution of `circuit`.
pub fn attach_accounting(circuit: &Circuit, groups: Option<&[GateGroup]>, result: &mut PartitionResult) -> Result<()> {
    let plan = build_plan(circuit, groups, result)?;
    let ops: Vec<usize> = plan.qpus.iter().map(|q| q.ops).collect();
    result.attach_operations(&ops);
    Ok(())
}

fn build_plan(circuit: &Circuit, groups: Option<&[GateGroup]>, result: &PartitionResult) -> Result<DistributionPlan> {
    let h = build_hypergraph(circuit, groups)?;
    let k = result.blocks_used;
    let assignment = &result.assignment;
    if assignment.len() != h.vertex_count() {
        return Err(Error::DimensionMismatch(assignment.len(), h.vertex_count()));
    }
    if let Some((v, &b)) = assignment.iter().enumerate().find(|(_, &b)| b >= k) {
        return Err(Error::BlockOutOfRange { vertex: v, block: b, blocks: k });
    }

    let n = circuit.width();
    let mut local = vec![0; n];
    let mut qpus: Vec<QpuPlan> = (0..k)
        .map(|id| QpuPlan {
            id,
            capacity: None,
            data: Vec::new(),
            comm_qubits: 0,
            ops: 0,
            ratio: None,
            instrs: Vec::new(),
        })
        .collect();
    for q in 0..n {
        local[q] = qpus[assignment[q]].data.len();
        qpus[assignment[q]].data.push(Qubit(q));
    }

    let groups = groups.unwrap_or(&[]);
    let mut edge_of_gate = vec![None; circuit.gates().len()];
    let mut edge_of_group = BTreeMap::new();
    for e in h.edges() {
        match e.origin {
            EdgeOrigin::Gate(seq) => edge_of_gate[seq] = Some(e.id),
            EdgeOrigin::Group(g) => {
                edge_of_group.insert(g, e.id);
            }
            EdgeOrigin::External => {}
        }
    }
    let mut group_of_gate = vec![None; circuit.gates().len()];
    for (gi, g) in groups.iter().enumerate() {
        if edge_of_group.contains_key(&g.id) {
            for &m in &g.members {
                group_of_gate[m] = Some(gi);
            }
        }
    }

    let mut b = Builder {
        block: &assignment[..n],
        local,
        qpus,
        channels: Vec::new(),
    };
    let mut executed_on = vec![None; circuit.gates().len()];
    // channels of the open group on each control, keyed by receiver block
    let mut open: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();

    for gate in circuit.gates() {
        let seq = gate.seq;
        if gate.kind == GateKind::Barrier {
            for blk in 0..k {
                let slots: Vec<Slot> = gate
                    .qubits
                    .iter()
                    .filter(|q| b.block[q.0] == blk)
                    .map(|&q| b.data(q))
                    .collect();
                if !slots.is_empty() {
                    b.run(blk, GateKind::Barrier, &[], slots, None, None);
                }
            }
            continue;
        }

        if let Some(gi) = group_of_gate[seq] {
            let g = &groups[gi];
            let edge = &h.edges()[edge_of_group[&g.id]];
            let home = b.block[g.control.0];
            if seq == g.members[0] {
                let mut remote: Vec<usize> = edge.pins.iter().map(|&p| assignment[p]).filter(|&x| x != home).collect();
                remote.sort_unstable();
                remote.dedup();
                let mut chans = BTreeMap::new();
                for r in remote {
                    chans.insert(r, b.open(EdgeOrigin::Group(g.id), home, r, g.control));
                }
                open.insert(gi, chans);
            }
            let tb = b.block[gate.target().0];
            let control = if tb == home {
                b.data(g.control)
            } else {
                Slot::Ebit(b.channels[open[&gi][&tb]].receiver_ebit)
            };
            let slots = vec![control, b.data(gate.target())];
            b.run(tb, gate.kind, &gate.params, slots, None, Some(seq));
            executed_on[seq] = Some(tb);
            if seq == *g.members.last().unwrap() {
                for (_, c) in open.remove(&gi).unwrap() {
                    b.close(c);
                }
            }
            continue;
        }

        let blocks: Vec<usize> = gate.qubits.iter().map(|q| b.block[q.0]).collect();
        if blocks.iter().all(|&x| x == blocks[0]) {
            let slots = gate.qubits.iter().map(|&q| b.data(q)).collect();
            b.run(blocks[0], gate.kind, &gate.params, slots, gate.clbit, Some(seq));
            executed_on[seq] = Some(blocks[0]);
            continue;
        }

        let edge = &h.edges()[edge_of_gate[seq].expect("split gate without an edge")];
        let hub = hub_block(&h, edge, assignment);
        let mut kind = gate.kind;
        let mut slots = Vec::with_capacity(gate.qubits.len());
        let mut opened = Vec::new();
        let mut flipped = None;
        for &q in &gate.qubits {
            let qb = b.block[q.0];
            if qb == hub {
                slots.push(b.data(q));
                continue;
            }
            // a shared copy can only act as a control; turn a remote
            // Toffoli target into a CCZ operand by a basis change
            if kind == GateKind::CCX && q == gate.target() {
                kind = GateKind::CCZ;
                b.run(qb, GateKind::H, &[], vec![b.data(q)], None, None);
                flipped = Some((qb, q));
            }
            let c = b.open(EdgeOrigin::Gate(seq), qb, hub, q);
            slots.push(Slot::Ebit(b.channels[c].receiver_ebit));
            opened.push(c);
        }
        b.run(hub, kind, &gate.params, slots, None, Some(seq));
        executed_on[seq] = Some(hub);
        for c in opened {
            b.close(c);
        }
        if let Some((qb, q)) = flipped {
            b.run(qb, GateKind::H, &[], vec![b.data(q)], None, None);
        }
    }

    let mut qpus = b.qpus;
    for q in &mut qpus {
        q.ratio = (q.ops > 0).then(|| round6(q.comm_qubits as f64 / q.ops as f64));
    }
    let ebits_total = qpus.iter().map(|q| q.comm_qubits).sum();
    Ok(DistributionPlan {
        circuit: circuit.clone(),
        qpus,
        channels: b.channels,
        executed_on,
        ebits_total,
    })
}

impl DistributionPlan {
    pub fn summary(&self) -> PlanSummary {
        PlanSummary {
            qpus: self
                .qpus
                .iter()
                .map(|q| QpuSummary {
                    id: q.id,
                    data: q.data.len(),
                    e: q.comm_qubits,
                    o: q.ops,
                    r: q.ratio,
                })
                .collect(),
            channels: self.channels.len(),
            ebits_total: self.ebits_total,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommModel {
    /// One communication qubit per channel endpoint.
    #[default]
    PerChannel,
    /// One communication qubit per QPU that takes part in any channel.
    SingleLink,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QpuLoad {
    pub id: usize,
    pub data: u64,
    pub comm: u64,
    pub capacity: u64,
    pub fits: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub per_qpu: Vec<QpuLoad>,
}

/// Checks data + communication qubits against each QPU's capacity.
pub fn feasibility_check(plan: &DistributionPlan, env: &QpuEnvironment, model: CommModel) -> Feasibility {
    let per_qpu: Vec<QpuLoad> = plan
        .qpus
        .iter()
        .zip(&env.qpus)
        .map(|(p, q)| {
            let data = p.data.len() as u64;
            let comm = match model {
                CommModel::PerChannel => p.comm_qubits as u64,
                CommModel::SingleLink => (p.comm_qubits > 0) as u64,
            };
            QpuLoad {
                id: q.id,
                data,
                comm,
                capacity: q.capacity,
                fits: data + comm <= q.capacity,
            }
        })
        .collect();
    Feasibility {
        feasible: per_qpu.iter().all(|l| l.fits),
        per_qpu,
    }
}

/// Builds the subcircuit of one QPU together with comment lines keyed by
/// the index of the gate they precede.
fn subcircuit(plan: &DistributionPlan, qpu: &QpuPlan) -> Result<(Circuit, Vec<(usize, String)>, &'static str)> {
    let src = &plan.circuit;
    let taken = |name: &str| src.cregs().iter().any(|r| r.name == name);
    let data_reg = if taken("q") { "qd" } else { "q" };
    let mut c = Circuit::new(format!("{}.{}", src.name, qpu.id));
    let entangler = c.declare_opaque("cat_entangler", 2)?;
    let disentangler = c.declare_opaque("cat_disentangler", 1)?;
    let d = qpu.data.len();
    if d > 0 {
        c.add_qreg(data_reg, d)?;
    }
    if qpu.comm_qubits > 0 {
        c.add_qreg(if taken("ebit") { "ebit_" } else { "ebit" }, qpu.comm_qubits)?;
    }
    for r in src.cregs() {
        c.add_creg(&r.name, r.size)?;
    }
    let q = |s: Slot| match s {
        Slot::Data(i) => Qubit(i),
        Slot::Ebit(i) => Qubit(d + i),
    };
    let mut notes = Vec::new();
    for instr in &qpu.instrs {
        match instr {
            Instr::Gate {
                kind,
                params,
                slots,
                clbit,
                ..
            } => {
                let qs: Vec<Qubit> = slots.iter().map(|&s| q(s)).collect();
                match clbit {
                    Some(cb) => c.measure(qs[0], *cb)?,
                    None => c.push(*kind, params, &qs)?,
                };
            }
            Instr::Entangle { channel, data, ebit } => {
                notes.push((c.gates().len(), format!("channel {channel}")));
                c.push(GateKind::Opaque(entangler), &[], &[Qubit(*data), Qubit(d + ebit)])?;
            }
            Instr::Disentangle { channel, ebit } => {
                notes.push((c.gates().len(), format!("channel {channel}")));
                c.push(GateKind::Opaque(disentangler), &[], &[Qubit(d + ebit)])?;
            }
        }
    }
    Ok((c, notes, data_reg))
}

/// OpenQASM text of every QPU's subcircuit, in QPU order.
pub fn emit_subcircuits(plan: &DistributionPlan) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::with_capacity(plan.qpus.len());
    for qpu in &plan.qpus {
        let (c, notes, data_reg) = subcircuit(plan, qpu)?;
        let text = emit_qasm(&c);
        let lines: Vec<&str> = text.lines().collect();
        let header = 2 + c.opaques().len() + c.qregs().len() + c.cregs().len();
        let decls = 2 + c.opaques().len() + c.qregs().len();
        let mut s = String::new();
        for line in &lines[..decls] {
            writeln!(s, "{line}").unwrap();
        }
        for (i, g) in qpu.data.iter().enumerate() {
            let QubitRef { register, index } = plan.circuit.qubit_ref(*g);
            writeln!(s, "// {data_reg}[{i}] = {register}[{index}]").unwrap();
        }
        for line in &lines[decls..header] {
            writeln!(s, "{line}").unwrap();
        }
        let mut notes = notes.into_iter().peekable();
        for (i, line) in lines[header..].iter().enumerate() {
            while let Some((_, note)) = notes.next_if(|(at, _)| *at == i) {
                writeln!(s, "// {note}").unwrap();
            }
            writeln!(s, "{line}").unwrap();
        }
        out.push((qpu.id, s));
    }
    Ok(out)
}

/// Writes `<circuit>.<qpu>.qasm` files into `dir` and returns their paths.
pub fn write_subcircuits(plan: &DistributionPlan, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (id, text) in emit_subcircuits(plan)? {
        let path = dir.join(format!("{}.{id}.qasm", plan.circuit.name));
        std::fs::write(&path, text)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::circuit::parse_qasm;
    use crate::grouping::{find_groups, GroupingPolicy};
    use crate::hypergraph::{cut_cost, Hypergraph};
    use crate::partition::FmStats;

    fn ghz4() -> Circuit {
        let mut c = Circuit::with_qubits("ghz4", 4);
        c.h(0).cx(0, 1).cx(1, 2).cx(2, 3);
        c
    }

    fn qft4() -> Circuit {
        let mut c = Circuit::with_qubits("qft4", 4);
        for i in 0..4 {
            c.h(i);
            for j in i + 1..4 {
                c.cp(PI / f64::powi(2.0, (j - i) as i32), j, i);
            }
        }
        c
    }

    fn result_for(h: &Hypergraph, assignment: Vec<usize>, k: usize) -> PartitionResult {
        PartitionResult::from_assignment(h, assignment, k, 0, 0, FmStats::default()).unwrap()
    }

    fn count(text: &str, needle: &str) -> usize {
        text.lines().filter(|l| l.starts_with(needle)).count()
    }

    #[test]
    fn ghz4_split_in_halves() {
        let c = ghz4();
        let h = build_hypergraph(&c, None).unwrap();
        let r = result_for(&h, vec![0, 0, 1, 1], 2);
        let env = QpuEnvironment::balanced(2, 3);
        let plan = plan_distribution(&c, None, &r, &env).unwrap();
        assert_eq!(plan.channels.len(), 1);
        let ch = plan.channels[0];
        assert_eq!((ch.sender, ch.receiver, ch.shared), (0, 1, Qubit(1)));
        let s = plan.summary();
        assert_eq!(s.ebits_total, 2);
        assert_eq!((s.qpus[0].e, s.qpus[1].e), (1, 1));
        assert_eq!((s.qpus[0].o, s.qpus[1].o), (2, 2));
        assert_eq!(s.qpus[0].r, Some(0.5));

        let files = emit_subcircuits(&plan).unwrap();
        assert_eq!(count(&files[0].1, "cat_entangler"), 1);
        assert_eq!(count(&files[1].1, "cat_disentangler"), 1);
        for (_, text) in &files {
            assert!(text.contains("// channel 0\n"));
            let back = parse_qasm(text).unwrap();
            assert_eq!(back.opaques().len(), 2);
        }
        assert!(files[1].1.contains("cx ebit[0],q[0];"));
        assert!(files[1].1.contains("// q[1] = q[3]"));

        assert!(feasibility_check(&plan, &env, CommModel::PerChannel).feasible);
        let tight = QpuEnvironment::balanced(2, 2);
        let f = feasibility_check(&plan, &tight, CommModel::PerChannel);
        assert!(!f.feasible);
        assert_eq!((f.per_qpu[0].data, f.per_qpu[0].comm), (2, 1));
    }

    #[test]
    fn uncut_plan_has_no_channels() {
        let mut c = Circuit::with_qubits("pairs", 4);
        c.h(0).cx(0, 1).cz(2, 3);
        let h = build_hypergraph(&c, None).unwrap();
        let r = result_for(&h, vec![0, 0, 1, 1], 2);
        let env = QpuEnvironment::new(&[2, 2]);
        let plan = plan_distribution(&c, None, &r, &env).unwrap();
        assert!(plan.channels.is_empty());
        assert!(feasibility_check(&plan, &env, CommModel::PerChannel).feasible);
        let mut seqs: Vec<usize> = plan
            .qpus
            .iter()
            .flat_map(|q| &q.instrs)
            .filter_map(|i| match i {
                Instr::Gate { seq, .. } => *seq,
                _ => None,
            })
            .collect();
        seqs.sort();
        assert_eq!(seqs, vec![0, 1, 2]);
        for (_, text) in emit_subcircuits(&plan).unwrap() {
            assert!(!text.contains("cat_entangler q") && !text.contains("cat_disentangler e"));
            parse_qasm(&text).unwrap();
        }
    }

    #[test]
    fn qft4_grouped_channels() {
        let c = qft4();
        let groups = find_groups(&c, &GroupingPolicy::default());
        let h = build_hypergraph(&c, Some(&groups)).unwrap();
        let mut a = vec![0, 0, 1, 1];
        for v in &h.vertices()[4..] {
            a.push(a[h.anchor(v.id).unwrap()]);
        }
        let r = result_for(&h, a, 2);
        let plan = plan_distribution(&c, Some(&groups), &r, &QpuEnvironment::balanced(2, 4)).unwrap();
        assert_eq!(plan.channels.len(), 2);
        assert_eq!(plan.ebits_total as u64, r.cut.ebits);
        let o: usize = plan.qpus.iter().map(|q| q.ops).sum();
        assert_eq!(o, 10);
        for (q, b) in plan.qpus.iter().zip(&r.per_block) {
            assert_eq!(q.comm_qubits as u64, b.comm_qubits);
        }
        // each group opens its channel before its first member and closes
        // it after its last one
        let text = &emit_subcircuits(&plan).unwrap()[0].1;
        let first = text.find("\ncat_disentangler ").unwrap();
        assert!(first > text.find("\ncp(").unwrap());
        assert!(text.rfind("\ncat_disentangler ").unwrap() > text.rfind("\ncp(").unwrap());
    }

    #[test]
    fn remote_toffoli_target_uses_ccz() {
        let mut c = Circuit::with_qubits("tof", 3);
        c.push(GateKind::CCX, &[], &[Qubit(0), Qubit(1), Qubit(2)]).unwrap();
        let h = build_hypergraph(&c, None).unwrap();
        let r = result_for(&h, vec![0, 0, 1], 2);
        let plan = plan_distribution(&c, None, &r, &QpuEnvironment::balanced(2, 3)).unwrap();
        assert_eq!(plan.channels.len(), 1);
        assert_eq!(plan.executed_on[0], Some(0));
        let files = emit_subcircuits(&plan).unwrap();
        assert!(files[0].1.contains("ccz q[0],q[1],ebit[0];"));
        assert_eq!(count(&files[1].1, "h q[0];"), 2);
        assert_eq!(plan.qpus.iter().map(|q| q.ops).sum::<usize>(), 1);
    }

    #[test]
    fn three_way_gate_and_measurements() {
        let mut c = Circuit::with_qubits("mix", 3);
        c.add_creg("c", 3).unwrap();
        c.push(GateKind::CCZ, &[], &[Qubit(0), Qubit(1), Qubit(2)]).unwrap();
        c.push(GateKind::Barrier, &[], &[Qubit(0), Qubit(1), Qubit(2)]).unwrap();
        for i in 0..3 {
            c.measure(Qubit(i), i).unwrap();
        }
        let h = build_hypergraph(&c, None).unwrap();
        let r = result_for(&h, vec![0, 1, 2], 3);
        let plan = plan_distribution(&c, None, &r, &QpuEnvironment::balanced(3, 3)).unwrap();
        assert_eq!(plan.channels.len() as u64, cut_cost(&h, &r.assignment, 3).unwrap().lambda_minus_one);
        assert_eq!(plan.qpus.iter().map(|q| q.ops).sum::<usize>(), c.size());
        for (_, text) in emit_subcircuits(&plan).unwrap() {
            let back = parse_qasm(&text).unwrap();
            assert_eq!(back.count_kind(GateKind::Measure), 1);
            assert_eq!(back.count_kind(GateKind::Barrier), 1);
        }
    }

    #[test]
    fn mismatched_inputs() {
        let c = ghz4();
        let h = build_hypergraph(&c, None).unwrap();
        let r = result_for(&h, vec![0, 0, 1, 1], 2);
        assert!(matches!(
            plan_distribution(&c, None, &r, &QpuEnvironment::balanced(3, 2)),
            Err(Error::BlockCountMismatch { expected: 3, got: 2 })
        ));
        assert!(QpuEnvironment::new(&[1, 1]).validate(4).is_err());
        assert!(QpuEnvironment::new(&[2, 2]).validate(4).is_ok());
    }

    #[test]
    fn single_link_needs_one_qubit() {
        let c = ghz4();
        let h = build_hypergraph(&c, None).unwrap();
        let r = result_for(&h, vec![0, 1, 0, 1], 2);
        let plan = plan_distribution(&c, None, &r, &QpuEnvironment::balanced(2, 3)).unwrap();
        assert_eq!(plan.channels.len(), 3);
        let env = QpuEnvironment::balanced(2, 3);
        assert!(!feasibility_check(&plan, &env, CommModel::PerChannel).feasible);
        assert!(feasibility_check(&plan, &env, CommModel::SingleLink).feasible);
    }

    #[test]
    fn files_are_written() {
        let c = ghz4();
        let h = build_hypergraph(&c, None).unwrap();
        let r = result_for(&h, vec![0, 0, 1, 1], 2);
        let plan = plan_distribution(&c, None, &r, &QpuEnvironment::balanced(2, 3)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = write_subcircuits(&plan, dir.path()).unwrap();
        assert_eq!(paths[1].file_name().unwrap(), "ghz4.1.qasm");
        assert!(paths.iter().all(|p| p.exists()));
    }
}
