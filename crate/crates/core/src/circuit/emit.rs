use std::fmt::Write;

use super::{Circuit, GateKind};

/// Renders a circuit as OpenQASM 2.0.
///
/// Angles are written with Rust's shortest round-trip float formatting, so
/// re-parsing reproduces every parameter bit for bit.
pub fn emit_qasm(circuit: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    for o in circuit.opaques() {
        let args: Vec<String> = (0..o.arity).map(|i| format!("a{i}")).collect();
        writeln!(out, "opaque {} {};", o.name, args.join(",")).unwrap();
    }
    for r in circuit.qregs() {
        writeln!(out, "qreg {}[{}];", r.name, r.size).unwrap();
    }
    for r in circuit.cregs() {
        writeln!(out, "creg {}[{}];", r.name, r.size).unwrap();
    }
    for g in circuit.gates() {
        let operands: Vec<String> = g
            .qubits
            .iter()
            .map(|q| circuit.qubit_ref(*q).to_string())
            .collect();
        let operands = operands.join(",");
        match g.kind {
            GateKind::Measure => {
                let c = g.clbit.expect("measure without clbit");
                let reg = circuit
                    .cregs()
                    .iter()
                    .find(|r| c >= r.offset && c < r.offset + r.size)
                    .expect("clbit outside classical registers");
                writeln!(out, "measure {operands} -> {}[{}];", reg.name, c - reg.offset).unwrap();
            }
            GateKind::Opaque(i) => {
                writeln!(out, "{} {operands};", circuit.opaques()[i].name).unwrap();
            }
            kind if g.params.is_empty() => {
                writeln!(out, "{} {operands};", kind.mnemonic()).unwrap();
            }
            kind => {
                let params: Vec<String> = g.params.iter().map(|p| format!("{p:?}")).collect();
                writeln!(out, "{}({}) {operands};", kind.mnemonic(), params.join(",")).unwrap();
            }
        }
    }
    out
}
