//! Fiduccia–Mattheyses partitioning under per-block capacities.
//!
//! All modes share one refinement engine driven by gain buckets and the
//! connectivity (λ−1) metric. Block capacities bound the weight of qubit
//! vertices only; grouping vertices weigh nothing and follow their control.

mod buckets;
mod engine;
mod recursive;

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{comm_qubits, cut_cost, CutReport, Hypergraph};

pub use buckets::GainBuckets;
use engine::{Engine, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    RecursiveBisect,
    DirectKway,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PartitionConfig {
    pub blocks: usize,
    /// Per-block capacity in data qubits; `None` splits evenly.
    pub capacities: Option<Vec<u64>>,
    /// Allowed fractional overload of a block.
    pub epsilon: f64,
    pub restarts: usize,
    pub seed: u64,
    pub mode: Mode,
    pub max_passes: usize,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            blocks: 2,
            capacities: None,
            epsilon: 0.0,
            restarts: 1,
            seed: 0,
            mode: Mode::RecursiveBisect,
            max_passes: 32,
        }
    }
}

impl PartitionConfig {
    /// Even split over `blocks` blocks.
    pub fn balanced(blocks: usize) -> Self {
        PartitionConfig {
            blocks,
            ..Default::default()
        }
    }

    pub fn with_capacities(capacities: Vec<u64>) -> Self {
        PartitionConfig {
            blocks: capacities.len(),
            capacities: Some(capacities),
            ..Default::default()
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks < 2 {
            return Err(Error::Config(format!("need at least 2 blocks, got {}", self.blocks)));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::Config(format!("epsilon {} outside [0, 1)", self.epsilon)));
        }
        if self.restarts == 0 || self.max_passes == 0 {
            return Err(Error::Config("restarts and max_passes must be positive".into()));
        }
        if let Some(c) = &self.capacities {
            if c.len() != self.blocks {
                return Err(Error::Config(format!(
                    "{} capacities given for {} blocks",
                    c.len(),
                    self.blocks
                )));
            }
        }
        Ok(())
    }
}

/// Weight bounds per block derived from a config and a hypergraph.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockLimits {
    /// Ideal load; used only to rank equally cheap results.
    pub target: Vec<f64>,
    /// Largest admissible load, `floor((1 + ε) · capacity)`, where a balanced
    /// capacity is `ceil(n / k)`.
    pub max: Vec<u64>,
    /// Fewest weighted vertices a block may hold.
    pub min_count: Vec<u64>,
}

impl BlockLimits {
    pub fn new(h: &Hypergraph, config: &PartitionConfig) -> Result<Self> {
        config.validate()?;
        let k = config.blocks;
        let n = h.total_weight();
        let weighted = h.vertices().iter().filter(|v| v.weight > 0).count();
        if weighted < k {
            return Err(Error::Infeasible(format!(
                "{k} blocks but only {weighted} qubit vertices"
            )));
        }
        let scale = 1.0 + config.epsilon;
        let ceil = |x: f64| (x - 1e-9).ceil().max(0.0) as u64;
        let floor = |x: f64| (x + 1e-9).floor().max(0.0) as u64;
        let (target, max) = match &config.capacities {
            Some(caps) => {
                let total: u64 = caps.iter().sum();
                if total < n {
                    return Err(Error::Infeasible(format!(
                        "total capacity {total} below the {n} qubits to place"
                    )));
                }
                if let Some(i) = caps.iter().position(|&c| c == 0) {
                    return Err(Error::Infeasible(format!("block {i} has zero capacity")));
                }
                let target = caps.iter().map(|&c| n as f64 * c as f64 / total as f64).collect();
                let max = caps.iter().map(|&c| floor(c as f64 * scale)).collect();
                (target, max)
            }
            None => {
                let share = n as f64 / k as f64;
                (vec![share; k], vec![floor(ceil(share) as f64 * scale); k])
            }
        };
        Ok(BlockLimits {
            target,
            max,
            min_count: vec![1; k],
        })
    }

    pub fn blocks(&self) -> usize {
        self.max.len()
    }

    /// Σ |load − target| over blocks.
    pub fn deviation(&self, loads: &[u64]) -> f64 {
        loads
            .iter()
            .zip(&self.target)
            .map(|(&l, &t)| (l as f64 - t).abs())
            .sum()
    }
}

/// Counters collected by the refinement engine.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FmStats {
    pub passes: u64,
    pub moves: u64,
    /// Bucket entries computed from scratch at the start of a pass.
    pub gain_inits: u64,
    /// Incremental gain adjustments made while moving vertices.
    pub gain_updates: u64,
}

impl std::ops::AddAssign for FmStats {
    fn add_assign(&mut self, o: FmStats) {
        self.passes += o.passes;
        self.moves += o.moves;
        self.gain_inits += o.gain_inits;
        self.gain_updates += o.gain_updates;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub data_qubits: u64,
    /// Communication qubits (ebits) this block hosts.
    pub comm_qubits: u64,
    /// Gates executed on this block; zero until operations are attached.
    pub ops: usize,
    /// `comm_qubits / ops` rounded to 6 decimals, `None` when `ops == 0`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub assignment: Vec<usize>,
    pub blocks_used: usize,
    pub cut: CutReport,
    pub per_block: Vec<BlockReport>,
    pub passes_run: usize,
    pub seed_used: u64,
    pub stats: FmStats,
}

pub(crate) fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

impl PartitionResult {
    pub(crate) fn from_assignment(
        h: &Hypergraph,
        assignment: Vec<usize>,
        blocks: usize,
        passes_run: usize,
        seed_used: u64,
        stats: FmStats,
    ) -> Result<Self> {
        let cut = cut_cost(h, &assignment, blocks)?;
        let comm = comm_qubits(h, &assignment, blocks)?;
        let mut data = vec![0u64; blocks];
        for (v, &b) in assignment.iter().enumerate() {
            data[b] += h.weight(v);
        }
        let per_block = data
            .into_iter()
            .zip(comm)
            .map(|(d, e)| BlockReport {
                data_qubits: d,
                comm_qubits: e,
                ops: 0,
                ratio: None,
            })
            .collect();
        Ok(PartitionResult {
            blocks_used: blocks,
            assignment,
            cut,
            per_block,
            passes_run,
            seed_used,
            stats,
        })
    }

    /// Records per-block gate counts and derives `r = e / o`.
    pub fn attach_operations(&mut self, ops: &[usize]) {
        for (b, &o) in self.per_block.iter_mut().zip(ops) {
            b.ops = o;
            b.ratio = (o > 0).then(|| round6(b.comm_qubits as f64 / o as f64));
        }
    }

    pub fn loads(&self) -> Vec<u64> {
        self.per_block.iter().map(|b| b.data_qubits).collect()
    }
}

/// Deals weighted vertices to blocks: a shuffled order fills every block's
/// minimum first, then each vertex goes to the block with the most room.
/// Weight-0 vertices follow their anchor (block 0 without one). Vertices
/// with a `preset` block keep it.
pub(crate) fn deal(
    h: &Hypergraph,
    max: &[u64],
    min_count: &[u64],
    seed: u64,
    preset: &[Option<usize>],
) -> Result<Vec<usize>> {
    let k = max.len();
    let n = h.vertex_count();
    let mut part = vec![usize::MAX; n];
    let mut order = Vec::new();
    for v in 0..n {
        match preset.get(v).copied().flatten() {
            Some(b) => part[v] = b,
            None if h.weight(v) > 0 => order.push(v),
            None => {}
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut load = vec![0u64; k];
    let mut rest = order.into_iter();
    let mut place = |v: usize, b: usize, load: &mut Vec<u64>| -> Result<()> {
        if load[b] + h.weight(v) > max[b] {
            return Err(Error::Infeasible(format!("vertex {v} does not fit in block {b}")));
        }
        load[b] += h.weight(v);
        part[v] = b;
        Ok(())
    };
    for b in 0..k {
        for _ in 0..min_count[b] {
            let v = rest
                .next()
                .ok_or_else(|| Error::Infeasible("too few qubit vertices for the blocks".into()))?;
            place(v, b, &mut load)?;
        }
    }
    for v in rest {
        let b = (0..k)
            .max_by(|&a, &b| (max[a] - load[a]).cmp(&(max[b] - load[b])).then(b.cmp(&a)))
            .unwrap();
        place(v, b, &mut load)?;
    }
    follow_anchors(h, &mut part, k);
    Ok(part)
}

fn follow_anchors(h: &Hypergraph, part: &mut [usize], k: usize) {
    for v in 0..part.len() {
        if part[v] == usize::MAX {
            part[v] = h
                .anchor(v)
                .map(|a| part[a])
                .filter(|&b| b < k)
                .unwrap_or(0);
        }
    }
}

/// Grows blocks as connected regions: weighted vertices are ordered by a
/// breadth-first walk from a seeded random vertex and the order is cut into
/// consecutive runs sized by each block's share of the free capacity.
/// Preset vertices keep their block and are not walked through. Falls back
/// to [`deal`] when the runs cannot meet the minimum counts.
pub(crate) fn grow(
    h: &Hypergraph,
    max: &[u64],
    min_count: &[u64],
    seed: u64,
    preset: &[Option<usize>],
) -> Result<Vec<usize>> {
    let k = max.len();
    let n = h.vertex_count();
    let fixed = |v: usize| preset.get(v).copied().flatten();
    let mut part = vec![usize::MAX; n];
    let mut load = vec![0u64; k];
    for v in 0..n {
        if let Some(b) = fixed(v) {
            part[v] = b;
            if b < k {
                load[b] += h.weight(v);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<usize> = (0..n).filter(|&v| fixed(v).is_none()).collect();
    starts.shuffle(&mut rng);
    let mut seen = vec![false; n];
    let mut edge_seen = vec![false; h.edge_count()];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    for s in starts {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            if h.weight(v) > 0 {
                order.push(v);
            }
            for &e in h.incident(v) {
                if std::mem::replace(&mut edge_seen[e], true) {
                    continue;
                }
                for &u in &h.edges()[e].pins {
                    if !seen[u] && fixed(u).is_none() {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
    }

    let weight: u64 = order.iter().map(|&v| h.weight(v)).sum();
    let room: Vec<u64> = (0..k).map(|b| max[b].saturating_sub(load[b])).collect();
    let total_room: u64 = room.iter().sum();
    if total_room < weight {
        return deal(h, max, min_count, seed, preset);
    }
    let mut quota: Vec<u64> = room.iter().map(|&r| weight * r / total_room.max(1)).collect();
    let mut short = weight - quota.iter().sum::<u64>();
    for b in 0..k {
        if short > 0 && quota[b] < room[b] {
            quota[b] += 1;
            short -= 1;
        }
    }

    let mut count = vec![0u64; k];
    let mut added = vec![0u64; k];
    let mut b = 0;
    for v in order {
        let w = h.weight(v);
        while b + 1 < k && added[b] + w > quota[b] {
            b += 1;
        }
        let dest = if load[b] + w <= max[b] {
            b
        } else {
            match (0..k).find(|&c| load[c] + w <= max[c]) {
                Some(c) => c,
                None => return deal(h, max, min_count, seed, preset),
            }
        };
        part[v] = dest;
        load[dest] += w;
        added[dest] += w;
        count[dest] += 1;
    }
    if (0..k).any(|b| count[b] < min_count[b]) {
        return deal(h, max, min_count, seed, preset);
    }
    follow_anchors(h, &mut part, k);
    Ok(part)
}

/// Starting assignment for restart `r`: even restarts grow connected
/// regions, odd ones deal at random.
pub(crate) fn restart_start(
    h: &Hypergraph,
    limits: &BlockLimits,
    seed: u64,
    r: usize,
    preset: &[Option<usize>],
) -> Result<Vec<usize>> {
    if r.is_multiple_of(2) {
        grow(h, &limits.max, &limits.min_count, seed, preset)
    } else {
        deal(h, &limits.max, &limits.min_count, seed, preset)
    }
}

/// Seeded starting assignment that respects the block capacities.
pub fn initial_partition(h: &Hypergraph, config: &PartitionConfig) -> Result<Vec<usize>> {
    let limits = BlockLimits::new(h, config)?;
    deal(h, &limits.max, &limits.min_count, config.seed, &[])
}

/// Reduction in λ−1 obtained by moving `vertex` to `target`, computed
/// directly from the assignment.
pub fn gain(h: &Hypergraph, assignment: &[usize], vertex: usize, target: usize) -> i64 {
    let from = assignment[vertex];
    if from == target {
        return 0;
    }
    let mut total = 0i64;
    for &e in h.incident(vertex) {
        let edge = &h.edges()[e];
        let others_in = |b: usize| edge.pins.iter().filter(|&&p| p != vertex && assignment[p] == b).count();
        let leaves_empty = others_in(from) == 0;
        let enters_new = others_in(target) == 0;
        total += edge.weight as i64 * (leaves_empty as i64 - enters_new as i64);
    }
    total
}

fn check_assignment(h: &Hypergraph, assignment: &[usize], blocks: usize) -> Result<()> {
    if assignment.len() != h.vertex_count() {
        return Err(Error::Unassigned(assignment.len().min(h.vertex_count())));
    }
    if let Some((v, &b)) = assignment.iter().enumerate().find(|(_, &b)| b >= blocks) {
        return Err(Error::BlockOutOfRange { vertex: v, block: b, blocks });
    }
    Ok(())
}

/// One FM pass from `assignment`; returns the rolled-back assignment and
/// whether it is cheaper than the input.
pub fn fm_pass(h: &Hypergraph, assignment: &[usize], config: &PartitionConfig) -> Result<(Vec<usize>, bool)> {
    fm_pass_with_stats(h, assignment, config).map(|(a, improved, _)| (a, improved))
}

pub fn fm_pass_with_stats(
    h: &Hypergraph,
    assignment: &[usize],
    config: &PartitionConfig,
) -> Result<(Vec<usize>, bool, FmStats)> {
    let limits = BlockLimits::new(h, config)?;
    check_assignment(h, assignment, limits.blocks())?;
    let problem = Problem::new(h, &limits, None);
    let mut engine = Engine::new(&problem, assignment.to_vec());
    let improved = engine.pass();
    Ok((engine.assignment().to_vec(), improved, engine.stats))
}

fn fm_restarts(h: &Hypergraph, config: &PartitionConfig) -> Result<PartitionResult> {
    let limits = BlockLimits::new(h, config)?;
    let problem = Problem::new(h, &limits, None);
    let mut best: Option<(u64, f64, PartitionResult)> = None;
    for r in 0..config.restarts {
        let seed = config.seed.wrapping_add(r as u64);
        let start = restart_start(h, &limits, seed, r, &[])?;
        let mut engine = Engine::new(&problem, start);
        let mut passes = 0;
        while passes < config.max_passes {
            passes += 1;
            if !engine.pass() {
                break;
            }
        }
        engine.settle_weightless();
        let stats = engine.stats;
        let result = PartitionResult::from_assignment(
            h,
            engine.into_assignment(),
            limits.blocks(),
            passes,
            seed,
            stats,
        )?;
        let dev = limits.deviation(&result.loads());
        let better = match &best {
            None => true,
            Some((cost, d, _)) => {
                result.cut.lambda_minus_one < *cost
                    || (result.cut.lambda_minus_one == *cost && dev < *d)
            }
        };
        if better {
            best = Some((result.cut.lambda_minus_one, dev, result));
        }
    }
    Ok(best.expect("at least one restart").2)
}

/// Two-way FM with restarts on consecutive seeds; the cheapest result wins,
/// then the most balanced, then the earliest seed.
pub fn bipartition(h: &Hypergraph, config: &PartitionConfig) -> Result<PartitionResult> {
    if config.blocks != 2 {
        return Err(Error::Config(format!("bipartition needs 2 blocks, got {}", config.blocks)));
    }
    fm_restarts(h, config)
}

/// k-way FM where every free vertex competes with every feasible
/// destination block.
pub fn direct_kway(h: &Hypergraph, config: &PartitionConfig) -> Result<PartitionResult> {
    fm_restarts(h, config)
}

pub use recursive::recursive_kway;

/// One seeded capacity-respecting assignment with no refinement.
pub fn random_partition(h: &Hypergraph, config: &PartitionConfig) -> Result<PartitionResult> {
    let assignment = initial_partition(h, config)?;
    PartitionResult::from_assignment(h, assignment, config.blocks, 0, config.seed, FmStats::default())
}

/// Runs the algorithm selected by `config.mode`.
pub fn partition(h: &Hypergraph, config: &PartitionConfig) -> Result<PartitionResult> {
    match config.mode {
        Mode::RecursiveBisect if config.blocks == 2 => bipartition(h, config),
        Mode::RecursiveBisect => recursive_kway(h, config),
        Mode::DirectKway => direct_kway(h, config),
        Mode::Random => random_partition(h, config),
    }
}
