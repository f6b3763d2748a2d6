use std::f64::consts::FRAC_1_SQRT_2;

use proptest::prelude::*;
use qdist::bench::{generate, CircuitKind};
use qdist::circuit::{emit_qasm, parse_qasm};
use qdist::oracle::{equivalent, simulate};

#[test]
fn ghz_state_has_two_equal_amplitudes() {
    for n in 2..=8 {
        let s = simulate(&generate(CircuitKind::Ghz, n, 0).unwrap()).unwrap();
        let amps = s.amplitudes();
        assert!((amps[0].re - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((amps[(1 << n) - 1].re - FRAC_1_SQRT_2).abs() < 1e-12);
        let rest: f64 = amps[1..(1 << n) - 1].iter().map(|a| a.norm_sqr()).sum();
        assert!(rest < 1e-24);
    }
}

#[test]
fn qft_of_zero_is_uniform() {
    let n = 5;
    let s = simulate(&generate(CircuitKind::Qft, n, 0).unwrap()).unwrap();
    let expected = 1.0 / f64::from(1u32 << n).sqrt();
    for a in s.amplitudes() {
        assert!((a.norm() - expected).abs() < 1e-12);
    }
}

#[test]
fn emitted_text_is_stable() {
    let c = generate(CircuitKind::Qft, 4, 0).unwrap();
    let once = emit_qasm(&c);
    assert_eq!(emit_qasm(&parse_qasm(&once).unwrap()), once);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip_preserves_the_state(n in 2usize..8, seed in 0u64..10_000) {
        let c = generate(CircuitKind::RandomLayered, n, seed).unwrap();
        let back = parse_qasm(&emit_qasm(&c)).unwrap();
        prop_assert_eq!(back.gates().len(), c.gates().len());
        let (a, b) = (simulate(&c).unwrap(), simulate(&back).unwrap());
        prop_assert!(equivalent(&a, &b, 1e-9).unwrap());
    }
}
