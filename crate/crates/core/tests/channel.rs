use qtv_core::channel::*;
use qtv_core::statefile::{parse_state, write_state};
use qtv_core::{StateVector, Tolerances};

#[test]
fn reconstructed_channel_has_32_equal_kets() {
    let r = reconstruct_channel().unwrap();
    let ch = &r.channel;
    assert_eq!(ch.n_qubits(), 7);
    assert!((ch.norm() - 1.0).abs() < 1e-12);
    let support = ch.support(1e-12);
    assert_eq!(support.len(), 32);
    let m = 1.0 / 32f64.sqrt();
    assert!(support
        .iter()
        .all(|(_, a)| (a.norm() - m).abs() <= 1e-12 && a.im == 0.0));
}

#[test]
fn discrepancies_cite_printed_prefix_violations() {
    let r = reconstruct_channel().unwrap();
    assert!(!r.discrepancies.is_empty());
    let cited: Vec<String> = r
        .discrepancies
        .iter()
        .filter(|d| d.kind == DiscrepancyKind::PrefixViolation)
        .map(|d| format!("{} {}", d.state, d.printed))
        .collect();
    for want in [
        "E010 +|0001001⟩",
        "E010 +|0001100⟩",
        "G111 -|0000110⟩",
        "G111 -|0001000⟩",
    ] {
        assert!(
            cited.iter().any(|c| c == want),
            "{want} missing from {cited:?}"
        );
    }
    assert!(r.discrepancies.iter().all(|d| d.line > 0));
}

#[test]
fn corrupted_listing_still_votes_to_the_same_channel() {
    let clean = xwz_channel().unwrap();
    let text = CHANNEL_FAMILY_DATA.replacen("A000 = |0000000⟩ +", "A000 = |0000000⟩ -", 1);
    let r = reconstruct_from(&text).unwrap();
    assert!(r.channel.max_abs_diff(&clean).unwrap() < 1e-15);
    assert!(r
        .discrepancies
        .iter()
        .any(|d| d.state == "A000" && d.kind == DiscrepancyKind::Sign));
}

#[test]
fn channel_state_file_round_trip() {
    let ch = xwz_channel().unwrap();
    let text = write_state(&ch, 1e-14);
    assert_eq!(text.lines().count(), 32);
    let back: StateVector = parse_state(&text).unwrap();
    assert!(back.max_abs_diff(&ch).unwrap() < 1e-15);
}

#[test]
fn channel_preparation_circuit() {
    let ch = xwz_channel().unwrap();
    let c = synth_prep_circuit(&ch).unwrap();
    assert!(c.gate_count() <= 512, "{} gates", c.gate_count());
    let out: StateVector = simulate(&c).unwrap();
    assert!(out.fidelity(&ch).unwrap() >= 1.0 - Tolerances::default().fidelity);
    let reparsed: CircuitDescription = c.to_string().parse().unwrap();
    assert_eq!(reparsed, c);
}

#[test]
fn ghz_six_qubit_product_cut() {
    let g = ghz(GhzIndex::new(0).unwrap());
    let s = g.tensor(&g).unwrap();
    let c = qtv_core::entanglement::cut_entropy(&s, &[1], &Tolerances::default()).unwrap();
    assert!((c.entropy - 1.0).abs() < 1e-9);
}
