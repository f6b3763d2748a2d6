//! Exhaustive and simulation-based reference implementations, for checking
//! the heuristics on small instances.

use num_complex::Complex64;

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::partition::{BlockLimits, PartitionConfig};

pub const MAX_ORACLE_QUBITS: usize = 14;
pub const MAX_ORACLE_BLOCKS: usize = 4;
/// Up to this many vertices in total, weight-0 vertices are enumerated too.
pub const MAX_EXACT_VERTICES: usize = 20;
pub const MAX_SIM_QUBITS: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCut {
    /// Optimal λ−1.
    pub cost: u64,
    pub assignment: Vec<usize>,
    /// Whether weight-0 vertices were enumerated rather than placed greedily.
    pub exact: bool,
}

struct Search<'a> {
    h: &'a Hypergraph,
    k: usize,
    order: Vec<usize>,
    /// How many entries of `order` are enumerated; the rest are placed greedily.
    enumerated: usize,
    max: Vec<u64>,
    symmetric: bool,
    masks: Vec<u8>,
    load: Vec<u64>,
    count: Vec<u64>,
    part: Vec<usize>,
    cost: u64,
    best: Option<(u64, Vec<usize>)>,
}

impl Search<'_> {
    fn place(&mut self, v: usize, b: usize) -> Vec<(usize, u8)> {
        let bit = 1u8 << b;
        let mut undo = Vec::new();
        for &e in self.h.incident(v) {
            let m = self.masks[e];
            if m & bit == 0 {
                if m != 0 {
                    self.cost += self.h.edges()[e].weight;
                }
                undo.push((e, m));
                self.masks[e] = m | bit;
            }
        }
        self.load[b] += self.h.weight(v);
        self.count[b] += (self.h.weight(v) > 0) as u64;
        self.part[v] = b;
        undo
    }

    fn unplace(&mut self, v: usize, b: usize, undo: Vec<(usize, u8)>) {
        for (e, m) in undo.into_iter().rev() {
            if m != 0 {
                self.cost -= self.h.edges()[e].weight;
            }
            self.masks[e] = m;
        }
        self.load[b] -= self.h.weight(v);
        self.count[b] -= (self.h.weight(v) > 0) as u64;
    }

    fn added_cost(&self, v: usize, b: usize) -> u64 {
        let bit = 1u8 << b;
        self.h
            .incident(v)
            .iter()
            .filter(|&&e| self.masks[e] != 0 && self.masks[e] & bit == 0)
            .map(|&e| self.h.edges()[e].weight)
            .sum()
    }

    fn dfs(&mut self, depth: usize, used: usize) {
        if self.best.as_ref().is_some_and(|(c, _)| self.cost >= *c) {
            return;
        }
        if depth == self.enumerated {
            if self.count.contains(&0) {
                return;
            }
            let mut undo = Vec::new();
            for v in self.order[depth..].to_vec() {
                let b = (0..self.k).min_by_key(|&b| (self.added_cost(v, b), b)).unwrap();
                undo.push((v, b, self.place(v, b)));
            }
            if self.best.as_ref().is_none_or(|(c, _)| self.cost < *c) {
                self.best = Some((self.cost, self.part.clone()));
            }
            for (v, b, u) in undo.into_iter().rev() {
                self.unplace(v, b, u);
            }
            return;
        }
        let v = self.order[depth];
        let weighted = self.h.weight(v) > 0;
        // blocks are interchangeable when they share one limit
        let limit = if self.symmetric && weighted { (used + 1).min(self.k) } else { self.k };
        for b in 0..limit {
            if self.load[b] + self.h.weight(v) > self.max[b] {
                continue;
            }
            let undo = self.place(v, b);
            let next_used = if weighted { used.max(b + 1) } else { used };
            self.dfs(depth + 1, next_used);
            self.unplace(v, b, undo);
        }
    }
}

/// Minimum λ−1 over every assignment with each block holding at least one
/// qubit vertex and at most its maximum load, together with a witness.
///
/// Qubit vertices are always enumerated. Weight-0 vertices are enumerated
/// too when the hypergraph has at most [`MAX_EXACT_VERTICES`] vertices, and
/// otherwise each goes greedily to the block that adds least cost.
pub fn brute_force_mincut(h: &Hypergraph, config: &PartitionConfig) -> Result<MinCut> {
    let limits = BlockLimits::new(h, config)?;
    let k = limits.blocks();
    let weighted: Vec<usize> = (0..h.vertex_count()).filter(|&v| h.weight(v) > 0).collect();
    if weighted.len() > MAX_ORACLE_QUBITS {
        return Err(Error::TooLarge(format!(
            "{} qubit vertices (limit {MAX_ORACLE_QUBITS})",
            weighted.len()
        )));
    }
    if k > MAX_ORACLE_BLOCKS {
        return Err(Error::TooLarge(format!("{k} blocks (limit {MAX_ORACLE_BLOCKS})")));
    }
    let exact = h.vertex_count() <= MAX_EXACT_VERTICES;
    let mut order = weighted.clone();
    order.extend((0..h.vertex_count()).filter(|&v| h.weight(v) == 0));
    let mut search = Search {
        h,
        k,
        enumerated: if exact { order.len() } else { weighted.len() },
        order,
        symmetric: limits.max.iter().all(|&m| m == limits.max[0]),
        max: limits.max,
        masks: vec![0; h.edge_count()],
        load: vec![0; k],
        count: vec![0; k],
        part: vec![0; h.vertex_count()],
        cost: 0,
        best: None,
    };
    search.dfs(0, 0);
    let (cost, assignment) = search
        .best
        .ok_or_else(|| Error::Infeasible("no assignment satisfies the block limits".into()))?;
    Ok(MinCut { cost, assignment, exact })
}

/// Dense state of `n` qubits; qubit `i` is bit `i` of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Statevector { n, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::Simulation(format!("{} amplitudes is not a power of two", amps.len())));
        }
        Ok(Statevector {
            n: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Applies `m` to `target` on the basis states where all `controls` are 1.
    fn apply(&mut self, m: [[Complex64; 2]; 2], controls: &[usize], target: usize) {
        let cmask: usize = controls.iter().map(|&c| 1 << c).sum();
        let tbit = 1 << target;
        for i in 0..self.amps.len() {
            if i & tbit != 0 || i & cmask != cmask {
                continue;
            }
            let j = i | tbit;
            let (a, b) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0][0] * a + m[0][1] * b;
            self.amps[j] = m[1][0] * a + m[1][1] * b;
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn matrix(kind: GateKind, params: &[f64]) -> Option<[[Complex64; 2]; 2]> {
    use std::f64::consts::FRAC_1_SQRT_2 as R;
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let phase = |t: f64| Complex64::from_polar(1.0, t);
    Some(match kind {
        GateKind::H => [[c(R, 0.0), c(R, 0.0)], [c(R, 0.0), c(-R, 0.0)]],
        GateKind::X | GateKind::CX | GateKind::CCX => [[zero, one], [one, zero]],
        GateKind::Y => [[zero, c(0.0, -1.0)], [c(0.0, 1.0), zero]],
        GateKind::Z | GateKind::CZ | GateKind::CCZ => [[one, zero], [zero, -one]],
        GateKind::S => [[one, zero], [zero, c(0.0, 1.0)]],
        GateKind::T => [[one, zero], [zero, phase(std::f64::consts::FRAC_PI_4)]],
        GateKind::CP => [[one, zero], [zero, phase(params[0])]],
        GateKind::RX => {
            let (s, co) = (params[0] / 2.0).sin_cos();
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        GateKind::RY => {
            let (s, co) = (params[0] / 2.0).sin_cos();
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        }
        GateKind::RZ => [[phase(-params[0] / 2.0), zero], [zero, phase(params[0] / 2.0)]],
        GateKind::Measure | GateKind::Barrier | GateKind::Opaque(_) => return None,
    })
}

/// Runs `circuit` on |0…0⟩. Barriers are skipped; measurements and opaque
/// gates are rejected.
pub fn simulate(circuit: &Circuit) -> Result<Statevector> {
    let n = circuit.width();
    if n > MAX_SIM_QUBITS {
        return Err(Error::TooLarge(format!("{n} qubits (simulation limit {MAX_SIM_QUBITS})")));
    }
    let mut state = Statevector::zero(n);
    for g in circuit.gates() {
        if g.kind == GateKind::Barrier {
            continue;
        }
        let m = matrix(g.kind, &g.params)
            .ok_or_else(|| Error::Simulation(format!("gate {} ({}) has no unitary", g.seq, g.kind.mnemonic())))?;
        let (controls, target) = g.qubits.split_at(g.qubits.len() - 1);
        let controls: Vec<usize> = controls.iter().map(|q| q.0).collect();
        state.apply(m, &controls, target[0].0);
    }
    Ok(state)
}

/// |⟨a|b⟩|.
pub fn overlap(a: &Statevector, b: &Statevector) -> Result<f64> {
    if a.amps.len() != b.amps.len() {
        return Err(Error::DimensionMismatch(a.amps.len(), b.amps.len()));
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm())
}

/// Equal up to global phase: |⟨a|b⟩| ≥ 1 − tol.
pub fn equivalent(a: &Statevector, b: &Statevector, tol: f64) -> Result<bool> {
    Ok(overlap(a, b)? >= 1.0 - tol)
}
