//! Quantum circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered list of [`Gate`]s over named quantum
//! registers. Qubits are addressed internally by a flat [`Qubit`] index
//! (registers laid out in declaration order); [`QubitRef`] recovers the
//! `register[index]` form used in OpenQASM text.

mod emit;
mod parse;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use emit::emit_qasm;
pub use parse::{parse_qasm, ParseError, ParseErrorKind};

/// Flat qubit index into a circuit's quantum registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Qubit(pub usize);

impl Qubit {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

/// Qubit addressed by register name and offset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QubitRef {
    pub register: String,
    pub index: usize,
}

impl fmt::Display for QubitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.register, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub size: usize,
    /// Flat index of the register's first bit.
    pub offset: usize,
}

/// Declaration of an opaque gate (used for communication primitives).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpaqueDecl {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    T,
    RX,
    RY,
    RZ,
    CX,
    CZ,
    CP,
    CCX,
    CCZ,
    Measure,
    Barrier,
    /// Call of the circuit's `n`-th opaque declaration.
    Opaque(usize),
}

impl GateKind {
    /// Number of qubit operands, `None` for variadic kinds.
    pub fn arity(self) -> Option<usize> {
        use GateKind::*;
        match self {
            H | X | Y | Z | S | T | RX | RY | RZ | Measure => Some(1),
            CX | CZ | CP => Some(2),
            CCX | CCZ => Some(3),
            Barrier | Opaque(_) => None,
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::CP => 1,
            _ => 0,
        }
    }

    /// Single-control two-qubit gates (the kinds eligible for grouping).
    pub fn is_controlled_pair(self) -> bool {
        matches!(self, GateKind::CX | GateKind::CZ | GateKind::CP)
    }

    /// Gates that become hyperedges when their qubits are split.
    pub fn is_nonlocal(self) -> bool {
        matches!(
            self,
            GateKind::CX | GateKind::CZ | GateKind::CP | GateKind::CCX | GateKind::CCZ
        )
    }

    /// OpenQASM mnemonic. Opaque calls are named by their declaration.
    pub fn mnemonic(self) -> &'static str {
        use GateKind::*;
        match self {
            H => "h",
            X => "x",
            Y => "y",
            Z => "z",
            S => "s",
            T => "t",
            RX => "rx",
            RY => "ry",
            RZ => "rz",
            CX => "cx",
            CZ => "cz",
            CP => "cp",
            CCX => "ccx",
            CCZ => "ccz",
            Measure => "measure",
            Barrier => "barrier",
            Opaque(_) => "opaque",
        }
    }

    pub(crate) fn from_mnemonic(name: &str) -> Option<GateKind> {
        use GateKind::*;
        Some(match name {
            "h" => H,
            "x" => X,
            "y" => Y,
            "z" => Z,
            "s" => S,
            "t" => T,
            "rx" => RX,
            "ry" => RY,
            "rz" => RZ,
            "cx" | "CX" => CX,
            "cz" => CZ,
            "cp" | "cu1" => CP,
            "ccx" => CCX,
            "ccz" => CCZ,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub params: Vec<f64>,
    /// Controls first, target last.
    pub qubits: Vec<Qubit>,
    /// Classical destination of a measurement.
    pub clbit: Option<usize>,
    /// Position in the circuit's gate list.
    pub seq: usize,
}

impl Gate {
    pub fn control(&self) -> Qubit {
        self.qubits[0]
    }

    pub fn target(&self) -> Qubit {
        *self.qubits.last().expect("gate without operands")
    }
}

/// Width, size and depth of a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub width: usize,
    pub size: usize,
    pub depth: usize,
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "width={} size={} depth={}", self.width, self.size, self.depth)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub name: String,
    qregs: Vec<Register>,
    cregs: Vec<Register>,
    opaques: Vec<OpaqueDecl>,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(name: impl Into<String>) -> Self {
        Circuit {
            name: name.into(),
            qregs: Vec::new(),
            cregs: Vec::new(),
            opaques: Vec::new(),
            gates: Vec::new(),
        }
    }

    /// Convenience constructor with a single quantum register `q[n]`.
    pub fn with_qubits(name: impl Into<String>, n: usize) -> Self {
        let mut c = Circuit::new(name);
        c.add_qreg("q", n).expect("fresh circuit has no registers");
        c
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn register_name_taken(&self, name: &str) -> bool {
        self.qregs.iter().chain(&self.cregs).any(|r| r.name == name)
    }

    /// Declares a quantum register and returns the flat index of its first qubit.
    pub fn add_qreg(&mut self, name: &str, size: usize) -> Result<Qubit> {
        if self.register_name_taken(name) {
            return Err(Error::DuplicateRegister(name.to_string()));
        }
        let offset = self.width();
        self.qregs.push(Register {
            name: name.to_string(),
            size,
            offset,
        });
        Ok(Qubit(offset))
    }

    pub fn add_creg(&mut self, name: &str, size: usize) -> Result<usize> {
        if self.register_name_taken(name) {
            return Err(Error::DuplicateRegister(name.to_string()));
        }
        let offset = self.cregs.iter().map(|r| r.size).sum();
        self.cregs.push(Register {
            name: name.to_string(),
            size,
            offset,
        });
        Ok(offset)
    }

    pub fn declare_opaque(&mut self, name: &str, arity: usize) -> Result<usize> {
        if self.opaques.iter().any(|o| o.name == name) || GateKind::from_mnemonic(name).is_some()
        {
            return Err(Error::InvalidGate(format!("gate `{name}` already defined")));
        }
        self.opaques.push(OpaqueDecl {
            name: name.to_string(),
            arity,
        });
        Ok(self.opaques.len() - 1)
    }

    pub fn qregs(&self) -> &[Register] {
        &self.qregs
    }

    pub fn cregs(&self) -> &[Register] {
        &self.cregs
    }

    pub fn opaques(&self) -> &[OpaqueDecl] {
        &self.opaques
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, seq: usize) -> Option<&Gate> {
        self.gates.get(seq)
    }

    pub fn clbit_count(&self) -> usize {
        self.cregs.iter().map(|r| r.size).sum()
    }

    pub fn qubits(&self) -> impl Iterator<Item = Qubit> {
        (0..self.width()).map(Qubit)
    }

    pub fn qubit_ref(&self, q: Qubit) -> QubitRef {
        let reg = self
            .qregs
            .iter()
            .find(|r| q.0 >= r.offset && q.0 < r.offset + r.size)
            .expect("qubit outside declared registers");
        QubitRef {
            register: reg.name.clone(),
            index: q.0 - reg.offset,
        }
    }

    pub fn resolve(&self, r: &QubitRef) -> Result<Qubit> {
        let reg = self
            .qregs
            .iter()
            .find(|reg| reg.name == r.register)
            .ok_or_else(|| Error::UnknownRegister(r.register.clone()))?;
        if r.index >= reg.size {
            return Err(Error::QubitOutOfRange {
                register: r.register.clone(),
                index: r.index,
                size: reg.size,
            });
        }
        Ok(Qubit(reg.offset + r.index))
    }

    /// Appends a gate after validating arity, parameters and operands.
    /// Returns the gate's sequence number.
    pub fn push(&mut self, kind: GateKind, params: &[f64], qubits: &[Qubit]) -> Result<usize> {
        self.push_gate(kind, params.to_vec(), qubits.to_vec(), None)
    }

    pub fn measure(&mut self, q: Qubit, clbit: usize) -> Result<usize> {
        self.push_gate(GateKind::Measure, Vec::new(), vec![q], Some(clbit))
    }

    pub(crate) fn push_gate(
        &mut self,
        kind: GateKind,
        params: Vec<f64>,
        qubits: Vec<Qubit>,
        clbit: Option<usize>,
    ) -> Result<usize> {
        let arity = match kind {
            GateKind::Opaque(i) => Some(
                self.opaques
                    .get(i)
                    .ok_or_else(|| Error::InvalidGate(format!("undeclared opaque gate #{i}")))?
                    .arity,
            ),
            k => k.arity(),
        };
        match arity {
            Some(a) if qubits.len() != a => {
                return Err(Error::InvalidGate(format!(
                    "{} expects {a} operand(s), got {}",
                    kind.mnemonic(),
                    qubits.len()
                )))
            }
            None if qubits.is_empty() => {
                return Err(Error::InvalidGate(format!("{} without operands", kind.mnemonic())))
            }
            _ => {}
        }
        if params.len() != kind.param_count() {
            return Err(Error::InvalidGate(format!(
                "{} expects {} parameter(s), got {}",
                kind.mnemonic(),
                kind.param_count(),
                params.len()
            )));
        }
        let width = self.width();
        for (i, q) in qubits.iter().enumerate() {
            if q.0 >= width {
                return Err(Error::InvalidGate(format!("qubit {q} outside circuit of width {width}")));
            }
            if qubits[..i].contains(q) {
                return Err(Error::InvalidGate(format!(
                    "{} uses qubit {} twice",
                    kind.mnemonic(),
                    self.qubit_ref(*q)
                )));
            }
        }
        match (kind, clbit) {
            (GateKind::Measure, Some(c)) if c < self.clbit_count() => {}
            (GateKind::Measure, _) => {
                return Err(Error::InvalidGate("measure needs a classical bit".into()))
            }
            (_, Some(_)) => return Err(Error::InvalidGate("only measure writes a classical bit".into())),
            _ => {}
        }
        let seq = self.gates.len();
        self.gates.push(Gate {
            kind,
            params,
            qubits,
            clbit,
            seq,
        });
        Ok(seq)
    }

    pub fn h(&mut self, q: usize) -> &mut Self {
        self.push(GateKind::H, &[], &[Qubit(q)]).expect("invalid h");
        self
    }

    pub fn cx(&mut self, control: usize, target: usize) -> &mut Self {
        self.push(GateKind::CX, &[], &[Qubit(control), Qubit(target)])
            .expect("invalid cx");
        self
    }

    pub fn cz(&mut self, a: usize, b: usize) -> &mut Self {
        self.push(GateKind::CZ, &[], &[Qubit(a), Qubit(b)]).expect("invalid cz");
        self
    }

    pub fn cp(&mut self, theta: f64, control: usize, target: usize) -> &mut Self {
        self.push(GateKind::CP, &[theta], &[Qubit(control), Qubit(target)])
            .expect("invalid cp");
        self
    }

    pub fn width(&self) -> usize {
        self.qregs.iter().map(|r| r.size).sum()
    }

    /// Gate count, barriers excluded.
    pub fn size(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| g.kind != GateKind::Barrier)
            .count()
    }

    /// ASAP layer of every gate (1-based). A barrier takes the maximum
    /// layer of its operands without adding a step, so it synchronizes
    /// its wires but never counts toward depth.
    pub fn layers(&self) -> Vec<usize> {
        let mut wire = vec![0usize; self.width()];
        let mut out = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let prev = g.qubits.iter().map(|q| wire[q.0]).max().unwrap_or(0);
            let layer = if g.kind == GateKind::Barrier { prev } else { prev + 1 };
            for q in &g.qubits {
                wire[q.0] = layer;
            }
            out.push(layer);
        }
        out
    }

    pub fn depth(&self) -> usize {
        self.layers().into_iter().max().unwrap_or(0)
    }

    pub fn metrics(&self) -> Metrics {
        compute_metrics(self)
    }

    pub fn count_kind(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }
}

/// Width (qubits), size (gates, barriers excluded) and depth (ASAP time steps).
pub fn compute_metrics(circuit: &Circuit) -> Metrics {
    Metrics {
        width: circuit.width(),
        size: circuit.size(),
        depth: circuit.depth(),
    }
}
