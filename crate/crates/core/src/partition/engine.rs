use super::buckets::GainBuckets;
use super::{BlockLimits, FmStats};
use crate::hypergraph::Hypergraph;

/// A refinement instance: `movable` real blocks, optionally followed by one
/// phantom block that only holds fixed vertices (the terminals standing in
/// for the rest of the hypergraph during recursive bisection).
pub(crate) struct Problem<'a> {
    pub h: &'a Hypergraph,
    pub movable: usize,
    pub blocks: usize,
    pub max: Vec<u64>,
    pub min_count: Vec<u64>,
    pub fixed: Vec<bool>,
    /// Overload a block may carry between moves of one pass.
    pub slack: u64,
}

impl<'a> Problem<'a> {
    /// `fixed` lists vertices pinned to the phantom block.
    pub fn new(h: &'a Hypergraph, limits: &BlockLimits, fixed: Option<&[usize]>) -> Self {
        let movable = limits.blocks();
        let mut is_fixed = vec![false; h.vertex_count()];
        let mut blocks = movable;
        if let Some(fixed) = fixed.filter(|f| !f.is_empty()) {
            for &v in fixed {
                is_fixed[v] = true;
            }
            blocks += 1;
        }
        let slack = (0..h.vertex_count())
            .filter(|&v| !is_fixed[v])
            .map(|v| h.weight(v))
            .max()
            .unwrap_or(0);
        Problem {
            h,
            movable,
            blocks,
            max: limits.max.clone(),
            min_count: limits.min_count.clone(),
            fixed: is_fixed,
            slack,
        }
    }

    #[cfg(test)]
    pub fn phantom(&self) -> Option<usize> {
        (self.blocks > self.movable).then_some(self.movable)
    }
}

pub(crate) struct Engine<'p, 'a> {
    p: &'p Problem<'a>,
    part: Vec<usize>,
    load: Vec<u64>,
    count: Vec<u64>,
    /// Pins of edge `e` in block `b` at `e * blocks + b`.
    phi: Vec<u32>,
    cost: u64,
    pub stats: FmStats,
}

impl<'p, 'a> Engine<'p, 'a> {
    pub fn new(p: &'p Problem<'a>, part: Vec<usize>) -> Self {
        let h = p.h;
        let mut load = vec![0u64; p.blocks];
        let mut count = vec![0u64; p.blocks];
        for (v, &b) in part.iter().enumerate() {
            load[b] += h.weight(v);
            count[b] += (h.weight(v) > 0) as u64;
        }
        let mut phi = vec![0u32; h.edge_count() * p.blocks];
        let mut cost = 0;
        for e in h.edges() {
            let row = &mut phi[e.id * p.blocks..(e.id + 1) * p.blocks];
            for &pin in &e.pins {
                row[part[pin]] += 1;
            }
            let spanned = row.iter().filter(|&&c| c > 0).count() as u64;
            cost += (spanned - 1) * e.weight;
        }
        Engine {
            p,
            part,
            load,
            count,
            phi,
            cost,
            stats: FmStats::default(),
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.part
    }

    pub fn into_assignment(self) -> Vec<usize> {
        self.part
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    fn block_ok(&self, b: usize) -> bool {
        self.load[b] <= self.p.max[b] && self.count[b] >= self.p.min_count[b]
    }

    fn feasible(&self) -> bool {
        (0..self.p.movable).all(|b| self.block_ok(b))
    }

    fn gain_of(&self, v: usize, t: usize) -> i64 {
        let s = self.part[v];
        let nb = self.p.blocks;
        self.p
            .h
            .incident(v)
            .iter()
            .map(|&e| {
                let w = self.p.h.edges()[e].weight as i64;
                let leaves = (self.phi[e * nb + s] == 1) as i64;
                let enters = (self.phi[e * nb + t] == 0) as i64;
                w * (leaves - enters)
            })
            .sum()
    }

    /// Moves `v` to `t`, keeping loads, pin counts and cost current.
    fn relocate(&mut self, v: usize, t: usize) {
        let s = self.part[v];
        let nb = self.p.blocks;
        let w = self.p.h.weight(v);
        for &e in self.p.h.incident(v) {
            let ew = self.p.h.edges()[e].weight;
            let (si, ti) = (e * nb + s, e * nb + t);
            if self.phi[si] == 1 {
                self.cost -= ew;
            }
            if self.phi[ti] == 0 {
                self.cost += ew;
            }
            self.phi[si] -= 1;
            self.phi[ti] += 1;
        }
        self.load[s] -= w;
        self.load[t] += w;
        if w > 0 {
            self.count[s] -= 1;
            self.count[t] += 1;
        }
        self.part[v] = t;
    }

    /// One pass: every free vertex is moved at most once, always taking the
    /// best admissible move, then the pass is rolled back to its cheapest
    /// feasible prefix (earliest on ties). Returns whether the cost dropped.
    pub fn pass(&mut self) -> bool {
        let p = self.p;
        let h = p.h;
        let k = p.movable;
        let nb = p.blocks;
        let n = h.vertex_count();
        self.stats.passes += 1;

        let max_gain = h.max_weighted_degree().max(1) as i64;
        let mut buckets = GainBuckets::new(k, n * k, max_gain);
        let mut locked = p.fixed.clone();
        for v in 0..n {
            if locked[v] {
                continue;
            }
            for t in (0..k).filter(|&t| t != self.part[v]) {
                buckets.insert(v * k + t, t, self.gain_of(v, t));
                self.stats.gain_inits += 1;
            }
        }

        let start = self.cost;
        let start_feasible = self.feasible();
        let mut best = (start, 0usize);
        let mut moves: Vec<(usize, usize)> = Vec::new();

        loop {
            let mut choice: Option<(usize, i64, u64)> = None;
            for t in 0..k {
                let room = (p.max[t] + p.slack).saturating_sub(self.load[t]);
                let part = &self.part;
                let count = &self.count;
                let found = buckets.best_where(t, |slot| {
                    let v = slot / k;
                    let w = h.weight(v);
                    let s = part[v];
                    w <= room && (w == 0 || count[s] > p.min_count[s])
                });
                if let Some((slot, g)) = found {
                    let stamp = buckets.stamp(slot);
                    let better = match choice {
                        None => true,
                        Some((_, bg, bs)) => g > bg || (g == bg && stamp < bs),
                    };
                    if better {
                        choice = Some((slot, g, stamp));
                    }
                }
            }
            let Some((slot, g, _)) = choice else { break };
            let (v, t) = (slot / k, slot % k);
            let s = self.part[v];

            for x in (0..k).filter(|&x| x != s) {
                buckets.remove(v * k + x);
            }
            locked[v] = true;

            for &e in h.incident(v) {
                let edge = &h.edges()[e];
                let w = edge.weight as i64;
                let pre_s = self.phi[e * nb + s];
                let pre_t = self.phi[e * nb + t];
                if pre_t > 1 && pre_s > 2 {
                    continue;
                }
                for &u in &edge.pins {
                    if u == v || locked[u] {
                        continue;
                    }
                    let bu = self.part[u];
                    if pre_t == 0 {
                        buckets.adjust(u * k + t, w);
                        self.stats.gain_updates += 1;
                    }
                    if pre_t == 1 && bu == t {
                        for x in (0..k).filter(|&x| x != t) {
                            buckets.adjust(u * k + x, -w);
                            self.stats.gain_updates += 1;
                        }
                    }
                    if pre_s == 1 {
                        buckets.adjust(u * k + s, -w);
                        self.stats.gain_updates += 1;
                    }
                    if pre_s == 2 && bu == s {
                        for x in (0..k).filter(|&x| x != s) {
                            buckets.adjust(u * k + x, w);
                            self.stats.gain_updates += 1;
                        }
                    }
                }
            }

            let before = self.cost;
            self.relocate(v, t);
            debug_assert_eq!(before as i64 - g, self.cost as i64);
            self.stats.moves += 1;
            moves.push((v, s));
            if self.feasible() && (self.cost < best.0 || !start_feasible && best.1 == 0) {
                best = (self.cost, moves.len());
            }
        }

        for &(v, s) in moves[best.1..].iter().rev() {
            self.relocate(v, s);
        }
        self.cost < start
    }

    /// Moves weight-0 vertices to the block that lowers the cost most, as
    /// long as some move strictly helps.
    pub fn settle_weightless(&mut self) {
        let h = self.p.h;
        loop {
            let mut changed = false;
            for v in 0..h.vertex_count() {
                if h.weight(v) != 0 || self.p.fixed[v] {
                    continue;
                }
                let s = self.part[v];
                let best = (0..self.p.movable)
                    .filter(|&t| t != s)
                    .map(|t| (self.gain_of(v, t), t))
                    .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
                if let Some((g, t)) = best {
                    if g > 0 {
                        self.relocate(v, t);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
}
