//! Detection of controlled-gate runs that can share one ebit pair, and
//! depth-window segmentation of deep circuits.
//!
//! A group is a maximal run of CX/CZ/CP gates anchored on one control qubit
//! with nothing else touching that control in between. When the control's
//! state is shared with a remote QPU once, every member gate can use the
//! same shared copy, so a cut group costs one entangler/disentangler pair.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind, Qubit};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GroupingPolicy {
    /// Groups smaller than this are split back into singletons. Values
    /// below 1 are treated as 1.
    pub min_group_size: usize,
    /// CP gates only join a group whose CP members carry the same angle.
    pub require_equal_angles: bool,
    /// CX, CZ and CP may share a group.
    pub mix_kinds: bool,
    /// A gate touching a current target of an open group closes it.
    pub strict_targets: bool,
}

impl Default for GroupingPolicy {
    fn default() -> Self {
        GroupingPolicy {
            min_group_size: 2,
            require_equal_angles: false,
            mix_kinds: true,
            strict_targets: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateGroup {
    pub id: usize,
    pub control: Qubit,
    /// Sequence numbers of the member gates, in circuit order.
    pub members: Vec<usize>,
    pub targets: BTreeSet<Qubit>,
    pub kinds: BTreeSet<GateKindTag>,
    /// Whether the group gets its own grouping vertex (size ≥ policy minimum).
    pub reuse: bool,
}

/// Kinds that may appear inside a group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GateKindTag {
    CX,
    CZ,
    CP,
}

impl GateKindTag {
    fn of(kind: GateKind) -> Option<Self> {
        match kind {
            GateKind::CX => Some(GateKindTag::CX),
            GateKind::CZ => Some(GateKindTag::CZ),
            GateKind::CP => Some(GateKindTag::CP),
            _ => None,
        }
    }
}

impl GateGroup {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Run being accumulated for one control qubit.
struct OpenRun {
    members: Vec<usize>,
    targets: BTreeSet<Qubit>,
    kinds: BTreeSet<GateKindTag>,
    angle: Option<f64>,
}

impl OpenRun {
    fn start(g: &Gate, tag: GateKindTag) -> Self {
        OpenRun {
            members: vec![g.seq],
            targets: BTreeSet::from([g.target()]),
            kinds: BTreeSet::from([tag]),
            angle: (tag == GateKindTag::CP).then(|| g.params[0]),
        }
    }

    fn accepts(&self, g: &Gate, tag: GateKindTag, policy: &GroupingPolicy) -> bool {
        if !policy.mix_kinds && !self.kinds.contains(&tag) {
            return false;
        }
        if policy.require_equal_angles && tag == GateKindTag::CP {
            if let Some(a) = self.angle {
                return a == g.params[0];
            }
        }
        true
    }

    fn add(&mut self, g: &Gate, tag: GateKindTag) {
        self.members.push(g.seq);
        self.targets.insert(g.target());
        self.kinds.insert(tag);
        if tag == GateKindTag::CP && self.angle.is_none() {
            self.angle = Some(g.params[0]);
        }
    }
}

struct Grouper<'a> {
    policy: &'a GroupingPolicy,
    open: Vec<Option<OpenRun>>,
    closed: Vec<(Qubit, OpenRun)>,
}

impl Grouper<'_> {
    fn close(&mut self, q: Qubit) {
        if let Some(run) = self.open[q.0].take() {
            self.closed.push((q, run));
        }
    }

    fn visit(&mut self, g: &Gate) {
        if self.policy.strict_targets {
            for q in &g.qubits {
                let hit: Vec<Qubit> = self
                    .open
                    .iter()
                    .enumerate()
                    .filter(|(c, run)| {
                        *c != g.qubits[0].0
                            && run.as_ref().is_some_and(|r| r.targets.contains(q))
                    })
                    .map(|(c, _)| Qubit(c))
                    .collect();
                for c in hit {
                    self.close(c);
                }
            }
        }
        match GateKindTag::of(g.kind) {
            Some(tag) => {
                let (control, target) = (g.control(), g.target());
                self.close(target);
                match &mut self.open[control.0] {
                    Some(run) if run.accepts(g, tag, self.policy) => run.add(g, tag),
                    _ => {
                        self.close(control);
                        self.open[control.0] = Some(OpenRun::start(g, tag));
                    }
                }
            }
            None => {
                for q in &g.qubits {
                    self.close(*q);
                }
            }
        }
    }

    fn finish(mut self) -> Vec<(Qubit, OpenRun)> {
        for q in 0..self.open.len() {
            self.close(Qubit(q));
        }
        self.closed
    }
}

fn group_gates<'a>(
    width: usize,
    gates: impl Iterator<Item = &'a Gate>,
    policy: &GroupingPolicy,
) -> Vec<(Qubit, OpenRun)> {
    let mut grouper = Grouper {
        policy,
        open: (0..width).map(|_| None).collect(),
        closed: Vec::new(),
    };
    for g in gates {
        grouper.visit(g);
    }
    grouper.finish()
}

fn into_groups(runs: Vec<(Qubit, OpenRun)>, circuit: &Circuit, policy: &GroupingPolicy) -> Vec<GateGroup> {
    let min = policy.min_group_size.max(1);
    let mut groups = Vec::new();
    for (control, run) in runs {
        if run.members.len() >= min {
            groups.push(GateGroup {
                id: 0,
                control,
                members: run.members,
                targets: run.targets,
                kinds: run.kinds,
                reuse: true,
            });
        } else {
            for seq in run.members {
                let g = &circuit.gates()[seq];
                groups.push(GateGroup {
                    id: 0,
                    control,
                    members: vec![seq],
                    targets: BTreeSet::from([g.target()]),
                    kinds: BTreeSet::from([GateKindTag::of(g.kind).unwrap()]),
                    reuse: min <= 1,
                });
            }
        }
    }
    groups.sort_by_key(|g| g.members[0]);
    for (i, g) in groups.iter_mut().enumerate() {
        g.id = i;
    }
    groups
}

/// Finds the grouping of every CX/CZ/CP gate of `circuit`.
///
/// Each such gate lands in exactly one group; groups are ordered by their
/// first member and numbered densely. CZ and CP are anchored on their first
/// operand. CCX/CCZ never join groups but do break runs on their wires.
pub fn find_groups(circuit: &Circuit, policy: &GroupingPolicy) -> Vec<GateGroup> {
    let runs = group_gates(circuit.width(), circuit.gates().iter(), policy);
    into_groups(runs, circuit, policy)
}

/// Like [`find_groups`], but no group crosses a segment boundary.
pub fn find_groups_segmented(
    circuit: &Circuit,
    segments: &[Segment],
    policy: &GroupingPolicy,
) -> Vec<GateGroup> {
    let mut runs = Vec::new();
    for seg in segments {
        let gates = seg.gates.iter().map(|&s| &circuit.gates()[s]);
        runs.extend(group_gates(circuit.width(), gates, policy));
    }
    into_groups(runs, circuit, policy)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub index: usize,
    /// Half-open range of 0-based depth layers.
    pub layers: std::ops::Range<usize>,
    /// Sequence numbers of the segment's gates, in circuit order.
    pub gates: Vec<usize>,
}

/// Splits the ASAP layering into windows of `window` layers.
///
/// Gates keep their circuit order inside a segment. Since a gate may sit in
/// an earlier layer than a gate that precedes it on other wires, the
/// concatenation of segments is a reordering that preserves the gate order
/// on every individual qubit.
pub fn segment_by_depth(circuit: &Circuit, window: usize) -> Result<Vec<Segment>> {
    if window == 0 {
        return Err(Error::InvalidWindow);
    }
    let depth = circuit.depth();
    let count = depth.div_ceil(window).max(1);
    let mut segments: Vec<Segment> = (0..count)
        .map(|i| Segment {
            index: i,
            layers: i * window..((i + 1) * window).min(depth),
            gates: Vec::new(),
        })
        .collect();
    for (g, layer) in circuit.gates().iter().zip(circuit.layers()) {
        // barriers report the layer they follow; gates are 1-based
        let zero_based = layer.saturating_sub(1);
        segments[zero_based / window].gates.push(g.seq);
    }
    Ok(segments)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn ghz(n: usize) -> Circuit {
        let mut c = Circuit::with_qubits("ghz", n);
        c.h(0);
        for i in 0..n - 1 {
            c.cx(i, i + 1);
        }
        c
    }

    fn qft(n: usize) -> Circuit {
        let mut c = Circuit::with_qubits("qft", n);
        for i in 0..n {
            c.h(i);
            for j in i + 1..n {
                c.cp(PI / f64::powi(2.0, (j - i) as i32), j, i);
            }
        }
        c
    }

    #[test]
    fn contiguous_same_control() {
        let mut c = Circuit::with_qubits("c", 4);
        c.cx(0, 1).cx(0, 2).h(3);
        let groups = find_groups(&c, &GroupingPolicy::default());
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].control, Qubit(0));
        assert_eq!(groups[0].members, vec![0, 1]);
        assert_eq!(groups[0].targets, BTreeSet::from([Qubit(1), Qubit(2)]));
        assert!(groups[0].reuse);
    }

    #[test]
    fn gate_on_control_breaks_run() {
        let mut c = Circuit::with_qubits("c", 3);
        c.cx(0, 1).h(0).cx(0, 2);
        let groups = find_groups(&c, &GroupingPolicy::default());
        assert_eq!(groups.len(), 2);
        assert!(groups.iter().all(|g| g.len() == 1 && !g.reuse));
    }

    #[test]
    fn using_control_as_target_breaks_run() {
        let mut c = Circuit::with_qubits("c", 3);
        c.cx(0, 1).cx(2, 0).cx(0, 1);
        let groups = find_groups(&c, &GroupingPolicy::default());
        assert_eq!(groups.len(), 3);
    }

    #[test]
    fn target_side_gates_do_not_break_by_default() {
        let mut c = Circuit::with_qubits("c", 3);
        c.cx(0, 1).h(1).cx(0, 2);
        let groups = find_groups(&c, &GroupingPolicy::default());
        assert_eq!(groups.len(), 1);

        let strict = GroupingPolicy {
            strict_targets: true,
            ..Default::default()
        };
        assert_eq!(find_groups(&c, &strict).len(), 2);
    }

    #[test]
    fn qft4_groups() {
        let c = qft(4);
        let groups = find_groups(&c, &GroupingPolicy::default());
        // control q1 has a single CP, q2 two, q3 three
        let mut by_control: Vec<(usize, usize, bool)> =
            groups.iter().map(|g| (g.control.0, g.len(), g.reuse)).collect();
        by_control.sort();
        assert_eq!(by_control, vec![(1, 1, false), (2, 2, true), (3, 3, true)]);

        let every = GroupingPolicy {
            min_group_size: 1,
            ..Default::default()
        };
        let groups = find_groups(&c, &every);
        assert_eq!(groups.len(), 3);
        assert!(groups.iter().all(|g| g.reuse));
    }

    #[test]
    fn angle_and_kind_policies() {
        let mut c = Circuit::with_qubits("c", 3);
        c.cp(PI / 2.0, 0, 1).cp(PI / 4.0, 0, 2).cx(0, 1);
        assert_eq!(find_groups(&c, &GroupingPolicy::default()).len(), 1);
        let equal = GroupingPolicy {
            require_equal_angles: true,
            ..Default::default()
        };
        let groups = find_groups(&c, &equal);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[1].members, vec![1, 2]);
        let pure = GroupingPolicy {
            mix_kinds: false,
            ..Default::default()
        };
        let groups = find_groups(&c, &pure);
        assert_eq!(groups.iter().map(|g| g.len()).collect::<Vec<_>>(), vec![2, 1]);
    }

    #[test]
    fn three_qubit_gates_stay_out() {
        let mut c = Circuit::with_qubits("c", 3);
        c.cx(0, 1);
        c.push(GateKind::CCX, &[], &[Qubit(0), Qubit(1), Qubit(2)]).unwrap();
        c.cx(0, 2);
        let groups = find_groups(&c, &GroupingPolicy::default());
        assert_eq!(groups.len(), 2);
        assert!(groups.iter().all(|g| !g.members.contains(&1)));
    }

    #[test]
    fn min_size_three_splits_pairs() {
        let mut c = Circuit::with_qubits("c", 4);
        c.cx(0, 1).cx(0, 2).h(0).cx(0, 1).cx(0, 2).cx(0, 3);
        let policy = GroupingPolicy {
            min_group_size: 3,
            ..Default::default()
        };
        let groups = find_groups(&c, &policy);
        let sizes: Vec<_> = groups.iter().map(|g| (g.len(), g.reuse)).collect();
        assert_eq!(sizes, vec![(1, false), (1, false), (3, true)]);
        let ids: Vec<_> = groups.iter().map(|g| g.id).collect();
        assert_eq!(ids, vec![0, 1, 2]);
    }

    #[test]
    fn ghz4_window_two() {
        let segs = segment_by_depth(&ghz(4), 2).unwrap();
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].layers, 0..2);
        assert_eq!(segs[0].gates, vec![0, 1]);
        assert_eq!(segs[1].layers, 2..4);
        assert_eq!(segs[1].gates, vec![2, 3]);
    }

    #[test]
    fn wide_window_single_segment() {
        let c = qft(5);
        let segs = segment_by_depth(&c, c.depth() + 3).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].gates.len(), c.gates().len());
        assert_eq!(segment_by_depth(&Circuit::with_qubits("e", 2), 1).unwrap().len(), 1);
    }

    #[test]
    fn depth_ten_window_four() {
        let segs = segment_by_depth(&ghz(10), 4).unwrap();
        let widths: Vec<_> = segs.iter().map(|s| s.layers.len()).collect();
        assert_eq!(widths, vec![4, 4, 2]);
        assert!(segment_by_depth(&ghz(3), 0).is_err());
    }

    #[test]
    fn groups_respect_segments() {
        let mut c = Circuit::with_qubits("c", 4);
        c.cx(0, 1).cx(0, 2).cx(0, 3);
        assert_eq!(find_groups(&c, &GroupingPolicy::default()).len(), 1);
        let segs = segment_by_depth(&c, 2).unwrap();
        let groups = find_groups_segmented(&c, &segs, &GroupingPolicy::default());
        let sizes: Vec<_> = groups.iter().map(|g| g.len()).collect();
        assert_eq!(sizes, vec![2, 1]);
    }
}
