//! k-way partitioning by recursive bisection.
//!
//! Each node splits its block range in two contiguous halves of nearly equal
//! target weight and bisects its vertices accordingly. Edges reaching
//! outside the node are kept: their outside pins collapse into one weight-0
//! terminal fixed in a third block, so cutting them away from the terminal
//! still costs.

use std::ops::Range;

use super::engine::{Engine, Problem};
use super::{restart_start, BlockLimits, FmStats, PartitionConfig, PartitionResult};
use crate::error::Result;
use crate::hypergraph::{Hyperedge, Hypergraph, Vertex, VertexKind};

struct Run<'a> {
    h: &'a Hypergraph,
    limits: BlockLimits,
    config: &'a PartitionConfig,
    assignment: Vec<usize>,
    stats: FmStats,
    passes: usize,
}

/// Restriction of `h` to `members`, plus a terminal for cut-off edges.
/// Returns the sub-hypergraph and the terminal's local id if there is one.
fn restrict(h: &Hypergraph, members: &[usize]) -> Result<(Hypergraph, Option<usize>)> {
    let mut local = vec![usize::MAX; h.vertex_count()];
    for (i, &v) in members.iter().enumerate() {
        local[v] = i;
    }
    let terminal = members.len();
    let mut used_terminal = false;
    let mut edges = Vec::new();
    for e in h.edges() {
        let mut pins: Vec<usize> = e.pins.iter().map(|&p| local[p]).filter(|&p| p != usize::MAX).collect();
        if pins.is_empty() {
            continue;
        }
        if pins.len() < e.pins.len() {
            pins.push(terminal);
            used_terminal = true;
        }
        if pins.len() < 2 {
            continue;
        }
        let home = match local[e.home] {
            usize::MAX => pins[0],
            l => l,
        };
        edges.push(Hyperedge {
            id: edges.len(),
            pins,
            weight: e.weight,
            origin: e.origin,
            home,
        });
    }
    let mut vertices: Vec<Vertex> = members
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let src = &h.vertices()[v];
            let kind = match src.kind {
                VertexKind::Grouping { group, anchor } => VertexKind::Grouping {
                    group,
                    anchor: anchor.map(|a| local[a]).filter(|&a| a != usize::MAX),
                },
                k => k,
            };
            Vertex {
                id: i,
                kind,
                weight: src.weight,
            }
        })
        .collect();
    if used_terminal {
        vertices.push(Vertex {
            id: terminal,
            kind: VertexKind::Grouping {
                group: usize::MAX,
                anchor: None,
            },
            weight: 0,
        });
    }
    Ok((Hypergraph::from_parts(vertices, edges)?, used_terminal.then_some(terminal)))
}

/// Split point of `range` that best balances the summed targets.
fn split(target: &[f64], range: &Range<usize>) -> usize {
    let total: f64 = target[range.clone()].iter().sum();
    (range.start + 1..range.end)
        .min_by(|&a, &b| {
            let da = (2.0 * target[range.start..a].iter().sum::<f64>() - total).abs();
            let db = (2.0 * target[range.start..b].iter().sum::<f64>() - total).abs();
            da.partial_cmp(&db).unwrap().then(a.cmp(&b))
        })
        .unwrap()
}

impl Run<'_> {
    fn node(&mut self, members: Vec<usize>, blocks: Range<usize>) -> Result<()> {
        if blocks.len() == 1 {
            for v in members {
                self.assignment[v] = blocks.start;
            }
            return Ok(());
        }
        let mid = split(&self.limits.target, &blocks);
        let (left, right) = (blocks.start..mid, mid..blocks.end);
        let side = |r: &Range<usize>| {
            (
                self.limits.target[r.clone()].iter().sum::<f64>(),
                self.limits.max[r.clone()].iter().sum::<u64>(),
                r.len() as u64,
            )
        };
        let (lt, lm, lc) = side(&left);
        let (rt, rm, rc) = side(&right);
        let sub_limits = BlockLimits {
            target: vec![lt, rt],
            max: vec![lm, rm],
            min_count: vec![lc, rc],
        };

        let (sub, terminal) = restrict(self.h, &members)?;
        let fixed: Vec<usize> = terminal.into_iter().collect();
        let problem = Problem::new(&sub, &sub_limits, Some(&fixed));
        let mut preset = vec![None; sub.vertex_count()];
        if let Some(t) = terminal {
            preset[t] = Some(2);
        }

        let mut best: Option<(u64, f64, Vec<usize>)> = None;
        for r in 0..self.config.restarts {
            let seed = self.config.seed.wrapping_add(r as u64);
            let start = restart_start(&sub, &sub_limits, seed, r, &preset)?;
            let mut engine = Engine::new(&problem, start);
            let mut passes = 0;
            while passes < self.config.max_passes {
                passes += 1;
                if !engine.pass() {
                    break;
                }
            }
            engine.settle_weightless();
            self.passes += passes;
            self.stats += engine.stats;
            let cost = engine.cost();
            let part = engine.into_assignment();
            let mut loads = [0u64; 2];
            for (v, &b) in part.iter().enumerate() {
                if b < 2 {
                    loads[b] += sub.weight(v);
                }
            }
            let dev = sub_limits.deviation(&loads);
            if best.as_ref().is_none_or(|(c, d, _)| cost < *c || (cost == *c && dev < *d)) {
                best = Some((cost, dev, part));
            }
        }
        let part = best.expect("at least one restart").2;
        let (mut lv, mut rv) = (Vec::new(), Vec::new());
        for (i, &v) in members.iter().enumerate() {
            if part[i] == 0 {
                lv.push(v);
            } else {
                rv.push(v);
            }
        }
        self.node(lv, left)?;
        self.node(rv, right)
    }
}

/// k-way partition by recursive bisection, each bisection refined by FM
/// with restarts. Weight-0 vertices are finally moved wherever that lowers
/// the global cost.
pub fn recursive_kway(h: &Hypergraph, config: &PartitionConfig) -> Result<PartitionResult> {
    let limits = BlockLimits::new(h, config)?;
    let k = limits.blocks();
    let mut run = Run {
        h,
        limits,
        config,
        assignment: vec![0; h.vertex_count()],
        stats: FmStats::default(),
        passes: 0,
    };
    run.node((0..h.vertex_count()).collect(), 0..k)?;

    let problem = Problem::new(h, &run.limits, None);
    let mut engine = Engine::new(&problem, run.assignment);
    engine.settle_weightless();
    PartitionResult::from_assignment(h, engine.into_assignment(), k, run.passes, config.seed, run.stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_balances_targets() {
        assert_eq!(split(&[1.0, 1.0, 1.0, 1.0], &(0..4)), 2);
        assert_eq!(split(&[1.0, 1.0, 1.0], &(0..3)), 1);
        assert_eq!(split(&[3.0, 1.0, 1.0, 1.0], &(0..4)), 1);
        assert_eq!(split(&[3.0, 1.0, 1.0, 1.0], &(1..4)), 2);
    }

    #[test]
    fn restriction_adds_terminal() {
        let h = Hypergraph::from_edges(&[1, 1, 1, 1], &[vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        let (sub, t) = restrict(&h, &[0, 1]).unwrap();
        assert_eq!(t, Some(2));
        assert_eq!(sub.vertex_count(), 3);
        let pins: Vec<_> = sub.edges().iter().map(|e| e.pins.clone()).collect();
        assert_eq!(pins, vec![vec![0, 1], vec![1, 2]]);

        let (sub, t) = restrict(&h, &[0, 3]).unwrap();
        assert_eq!(t, Some(2));
        // {0,1} and {2,3} each keep one member plus the terminal
        assert_eq!(sub.edge_count(), 2);
    }
}
