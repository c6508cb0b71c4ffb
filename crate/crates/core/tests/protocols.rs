use qtv_core::channel::DiscrepancyKind;
use qtv_core::engine::*;
use qtv_core::protocols::*;
use qtv_core::{StateVector, Tolerances};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn assert_verified(spec: &ProtocolSpec, trials: usize) -> VerificationReport {
    let r = verify(spec, trials, 7, &tol()).unwrap();
    assert!(r.pass, "{} failed: {:?}", spec.id, r.outcomes);
    for o in &r.outcomes {
        if o.status != OutcomeStatus::ZeroProbability {
            assert!(o.fidelity.unwrap() >= 1.0 - 1e-9, "{:?}", o);
        }
    }
    r
}

#[test]
fn embedded_data_checksum() {
    assert_eq!(
        data_checksum(),
        "ac7cc0992c4af149b48ed1b626b7e9a2567a592da73fb591a55bb833b26a4bd0"
    );
}

#[test]
fn teleport1_printed_shape() {
    let b = basis_teleport1().unwrap();
    assert_eq!(b.labels(), ["ξ+", "ξ-", "ν+", "ν-"]);
    for e in b.elements() {
        assert!((e.raw_norm - 4.0).abs() < 1e-12);
        // 16 GHZ-product terms, 2 nonzero amplitudes each
        assert_eq!(e.probe.support(1e-12).len(), 32);
    }
    let x = b.element("ξ+").unwrap();
    let y = b.element("ξ-").unwrap();
    assert!(x.probe.inner(&y.probe).unwrap().norm() < 1e-10);
}

#[test]
fn teleport1_derived_reproduces_printed_labels() {
    let d = basis_teleport1_derived().unwrap();
    assert_eq!(d.labels(), ["ξ+", "ν+", "ν-", "ξ-"]);
    assert!(check_orthonormal(&d, &tol()).orthonormal);
    let p = basis_teleport1().unwrap();
    for e in d.elements() {
        let f = e
            .probe
            .fidelity(&p.element(&e.label).unwrap().probe)
            .unwrap();
        assert!((f - 0.875 * 0.875).abs() < 1e-12, "{} {f}", e.label);
    }
}

#[test]
fn teleport1_verifies_and_printed_coverage_is_pinned() {
    let spec = spec_teleport1().unwrap();
    assert_eq!(spec.receiver_qubits().unwrap(), [7]);
    let r = assert_verified(&spec, 100);
    assert_eq!(r.outcomes.len(), 4);
    assert!((r.coverage_min - 1.0).abs() < 1e-12);
    let p = verify(&spec_teleport1_printed().unwrap(), 20, 7, &tol()).unwrap();
    assert!(!p.pass);
    assert!((p.coverage_min - 0.78125).abs() < 1e-12);
    assert!((p.coverage_max - 0.78125).abs() < 1e-12);
}

#[test]
fn teleport1_sign_typos_located() {
    let d = teleport1_term_diffs().unwrap();
    let got: Vec<(&str, &str, i8)> = d
        .iter()
        .map(|t| (t.element.as_str(), t.term.as_str(), t.printed))
        .collect();
    assert_eq!(
        got,
        [
            ("ξ+", "|1001⟩|GHZ1⟩", -1),
            ("ξ-", "|1001⟩|GHZ1⟩", 1),
            ("ν+", "|0001⟩|GHZ1⟩", -1),
            ("ν-", "|0001⟩|GHZ1⟩", 1),
        ]
    );
    assert!(d[0].anchor.starts_with("teleport1.txt:"));
}

#[test]
fn teleport2_partition_and_table() {
    let spec = spec_teleport2().unwrap();
    assert_eq!(spec.partition.role("alice").unwrap(), [2, 3, 4, 5, 6]);
    assert_eq!(spec.partition.role("bob").unwrap(), [7, 8]);
    let t = paper_table_teleport2().unwrap();
    assert_eq!(t.rows.len(), 16);
    assert_eq!(t.malformed, 4);
    assert!(t.rows[..4].iter().all(|r| !r.well_formed));
    let non_pauli: Vec<&str> = t
        .rows
        .iter()
        .filter(|r| r.note.as_deref() == Some("not a Pauli image of the input"))
        .map(|r| r.row.as_str())
        .collect();
    assert_eq!(non_pauli, ["R13", "R14", "R15", "R16"]);
    assert_eq!(
        t.table
            .get("α|00⟩+μ|10⟩+γ|01⟩+β|11⟩")
            .unwrap()
            .table_notation(),
        "I⊗I"
    );
    assert_eq!(
        t.table
            .get("α|11⟩-μ|01⟩-γ|10⟩+β|00⟩")
            .unwrap()
            .table_notation(),
        "iσ2⊗iσ2"
    );
}

#[test]
fn teleport2_derived_table_classifies_every_printed_row() {
    let r = assert_verified(&spec_teleport2().unwrap(), 100);
    assert_eq!(r.outcomes.len(), 16);
    let printed = paper_table_teleport2().unwrap();
    let count = |s: DiffStatus| r.diffs.iter().filter(|d| d.status == s).count();
    // every printed key shows up with a status
    for key in printed.table.rows.keys() {
        assert!(r.diffs.iter().any(|d| &d.key == key));
    }
    assert_eq!(count(DiffStatus::Match), 4);
    assert_eq!(count(DiffStatus::Mismatch), 12);
    assert_eq!(count(DiffStatus::Missing), 8);
    let swapped: Vec<&str> = r
        .diffs
        .iter()
        .filter(|d| d.status == DiffStatus::Mismatch && d.note.is_none())
        .map(|d| d.key.as_str())
        .collect();
    assert_eq!(swapped.len(), 4);
}

#[test]
fn teleport2_expansion_repeats_a_group() {
    let rows = expansion_report().unwrap();
    assert_eq!(rows.len(), 16);
    for r in &rows[..12] {
        assert!(r.consistent, "{}", r.group);
        assert!(r.repeats.is_none());
    }
    for (r, first) in rows[12..].iter().zip(["G09", "G10", "G11", "G12"]) {
        assert!(!r.consistent);
        assert_eq!(r.repeats.as_deref(), Some(first));
    }
}

#[test]
fn teleport2_component_overlaps() {
    let rep = teleport2_component_report().unwrap();
    let ov = |k: &str| rep.iter().find(|m| m.label == k).unwrap().overlap;
    for k in ["A00", "C01", "C10"] {
        assert!((ov(k) - 0.5).abs() < 1e-12, "{k}");
    }
    for k in ["A11", "B11", "C00", "D10"] {
        assert!((ov(k) - 0.75).abs() < 1e-12, "{k}");
    }
    let exact = rep
        .iter()
        .filter(|m| m.status == MatchStatus::Match)
        .count();
    assert_eq!(exact, 9);
}

#[test]
fn appendix1_family_report() {
    let a = appendix1_family().unwrap();
    assert_eq!(a.count, 64);
    assert!(a.raw_norms.iter().all(|n| (n - 2.0).abs() < 1e-12));
    // A block: first eight states, pairwise orthogonal
    for i in 0..8 {
        for j in 0..8 {
            if i != j {
                assert!(a.overlaps[i][j] < 1e-10);
            }
        }
    }
    let prefix: Vec<(&str, &str)> = a
        .discrepancies
        .iter()
        .filter(|d| d.kind == DiscrepancyKind::PrefixViolation)
        .map(|d| (d.state.as_str(), d.printed.as_str()))
        .collect();
    assert!(prefix.contains(&("E010", "+|0001001⟩")));
    assert!(prefix.contains(&("E010", "+|0001100⟩")));
    assert!(prefix.contains(&("G111", "-|0000110⟩")));
    assert!(prefix.contains(&("G111", "-|0001000⟩")));
    let flagged: Vec<&str> = a.flagged.iter().map(|m| m.label.as_str()).collect();
    assert_eq!(flagged, ["E010", "G111"]);
}

#[test]
fn teleport3_basis_is_the_pauli_frame() {
    let d = basis_teleport3_derived().unwrap();
    assert_eq!(d.len(), 64);
    assert!(check_orthonormal(&d, &tol()).orthonormal);
    assert!(d.labels()[0].starts_with("A000+B001+C010"));
    let ch = qtv_core::channel::xwz_channel().unwrap();
    let frame = pauli_frame_vectors(&ch, &[4, 5, 6]).unwrap();
    for (e, (_, v)) in d.elements().iter().zip(&frame) {
        assert!((e.probe.fidelity(v).unwrap() - v.norm_sqr()).abs() < 1e-12);
    }
    let p = basis_teleport3_printed().unwrap();
    assert!(!check_orthonormal(&p, &tol()).orthonormal);
}

#[test]
fn teleport3_verifies() {
    let spec = spec_teleport3().unwrap();
    assert_eq!(spec.receiver_qubits().unwrap(), [7, 8, 9]);
    let r = assert_verified(&spec, 50);
    assert_eq!(r.outcomes.len(), 64);
    assert!(r
        .outcomes
        .iter()
        .all(|o| o.correction.as_ref().unwrap().matches('⊗').count() == 2));
}

#[test]
fn appendix2_identity_holds() {
    let basis_input = StateVector::basis(3, 0).unwrap();
    assert!(appendix2_check(&[basis_input]).unwrap() <= 1e-9);
    let draws: Vec<StateVector> = (0..10).map(|t| trial_input(3, 7, t).unwrap()).collect();
    assert!(appendix2_check(&draws).unwrap() <= 1e-9);
    let label = basis_teleport3_derived().unwrap().labels()[0].to_string();
    let dropped = appendix2_check_with(&draws, &Appendix2Options { drop: Some(label) }).unwrap();
    assert!(dropped > 0.1, "{dropped}");
}

#[test]
fn appendix2_rejects_unknown_outcome() {
    let opts = Appendix2Options {
        drop: Some("nope".into()),
    };
    assert!(appendix2_check_with(&[StateVector::basis(3, 0).unwrap()], &opts).is_err());
}

#[test]
fn operator_table_sigma2_is_phase_only() {
    let r = operator_table_report().unwrap();
    assert_eq!(r.len(), 7);
    for c in &r {
        if c.name == "σ2" {
            assert_eq!(c.status, OperatorStatus::PhaseOnly);
            assert_eq!(c.phase.as_deref(), Some("-1"));
        } else {
            assert_eq!(c.status, OperatorStatus::Match, "{}", c.name);
        }
    }
}

#[test]
fn qss_derived_protocols_verify() {
    for spec in [spec_qss1(), spec_qss2(), spec_qss3()] {
        let spec = spec.unwrap();
        assert_eq!(spec.receiver_qubits().unwrap(), [7]);
        assert_verified(&spec, 50);
    }
}

#[test]
fn qss_partitions() {
    let s1 = spec_qss1().unwrap();
    assert_eq!(s1.partition.role("bob").unwrap(), [2, 3, 4, 5, 6]);
    let s2 = spec_qss2().unwrap();
    assert_eq!(s2.partition.role("alice").unwrap(), [1, 2]);
    let s3 = spec_qss3().unwrap();
    assert_eq!(s3.partition.role("alice").unwrap(), [1, 2, 3, 4]);
    assert_eq!(s3.partition.role("bob").unwrap(), [5, 6]);
}

#[test]
fn qss3_c_table_matches_up_to_phase() {
    let r = verify(&spec_qss3().unwrap(), 10, 7, &tol()).unwrap();
    let rows: Vec<&TableDiff> = r.diffs.iter().filter(|d| d.printed.is_some()).collect();
    assert_eq!(rows.len(), 4);
    let printed: Vec<&str> = rows.iter().map(|d| d.printed.as_deref().unwrap()).collect();
    assert_eq!(printed, ["I", "σ3", "σ1", "iσ2"]);
    assert!(rows
        .iter()
        .all(|d| matches!(d.status, DiffStatus::Match | DiffStatus::PhaseOnly)));
}

#[test]
fn bc_reading_search() {
    let rep = bc_ordering_search().unwrap();
    assert_eq!(rep.candidates.len(), 48);
    assert!(rep.candidates.iter().all(|c| !c.bell_correctable));
    assert!(rep.candidates.iter().all(|c| c.max_overlap < 1e-12));
    let hits: Vec<&BcCandidate> = rep.candidates.iter().filter(|c| c.c_table_match).collect();
    assert_eq!(hits.len(), 2);
    assert!(hits.iter().all(|c| c.ordering == BcOrdering::Literal));
    assert!(rep.adopted.c_table_match);
    assert_eq!(
        rep.decompositions[0].1,
        ["I⊗I⊗I", "σ1⊗I⊗σ1", "σ2⊗σ2⊗σ3", "σ3⊗σ2⊗σ2"]
    );
    assert_eq!(
        rep.decompositions[7].1,
        ["I⊗σ2⊗I", "σ1⊗σ2⊗σ1", "σ2⊗I⊗σ3", "σ3⊗I⊗σ2"]
    );
}

#[test]
fn qss_printed_families_classified() {
    let rep = qss_family_report().unwrap();
    assert_eq!(rep.len(), 4 + 4 + 8 + 4);
    assert!(rep.iter().all(|m| !m.anchor.is_empty()));
    let get = |l: &str| rep.iter().find(|m| m.label == l).unwrap();
    let a = get("qss1 A+");
    assert!((a.raw_norm - 15f64.sqrt()).abs() < 1e-12);
    assert!((a.overlap - 0.968).abs() < 1e-3);
    assert_eq!(a.status, MatchStatus::Flagged);
    let b = get("qss1 B+");
    assert!(b.note.as_deref().unwrap().contains("|00000⟩"));
    for l in ["qss2 X+", "qss2 X-", "qss2 Y+", "qss2 Y-"] {
        assert_eq!(get(l).status, MatchStatus::Flagged);
    }
    for i in 1..=4 {
        let m = get(&format!("qss3 B{i}"));
        assert_eq!(m.status, MatchStatus::Match);
        assert!((m.raw_norm - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }
}

#[test]
fn printed_qss_runs_are_reported_not_fatal() {
    for spec in [
        spec_qss1_printed(),
        spec_qss2_printed(),
        spec_qss3_printed(),
    ] {
        let r = verify(&spec.unwrap(), 5, 7, &tol()).unwrap();
        assert!(!r.pass);
    }
}
