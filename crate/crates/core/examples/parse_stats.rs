//! Parse an OpenQASM 2 program, print its metrics and emit it back.

use qdist::circuit::{emit_qasm, parse_qasm};

const PROGRAM: &str = r#"OPENQASM 2.0;
include "qelib1.inc";
qreg a[2];
qreg b[2];
creg c[2];
h a[0];
cx a[0],a[1];
cx a[0],b[0];
ccx a[1],b[0],b[1];
barrier a,b;
measure a -> c;
"#;

fn main() -> qdist::Result<()> {
    let text = std::env::args()
        .nth(1)
        .map(std::fs::read_to_string)
        .transpose()?;
    let source = text.as_deref().unwrap_or(PROGRAM);
    let circuit = match parse_qasm(source) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    println!("{}", circuit.metrics());
    for g in circuit.gates() {
        let names: Vec<String> = g.qubits.iter().map(|&q| circuit.qubit_ref(q).to_string()).collect();
        println!("{:>3}  {:<8} {}", g.seq, g.kind.mnemonic(), names.join(","));
    }
    print!("{}", emit_qasm(&circuit));
    Ok(())
}
