use std::collections::BTreeMap;

use qtv_core::channel::{bell, BellConvention, BellIndex};
use qtv_core::engine::*;
use qtv_core::{Error, LocalOperatorWord, StateVector, Tolerances};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn textbook() -> ProtocolSpec {
    let partition =
        QubitPartition::new([("unknown", vec![0]), ("alice", vec![1]), ("bob", vec![2])]).unwrap();
    let stage = Stage::fixed(
        "alice",
        MeasurementBasis::bell(vec![0, 1], &BellConvention::default()).unwrap(),
    );
    ProtocolSpec::new(
        "textbook",
        bell(BellIndex::PhiPlus),
        partition,
        vec![stage],
        "bob",
    )
    .unwrap()
}

fn w(s: &str) -> LocalOperatorWord {
    s.parse().unwrap()
}

#[test]
fn bell_basis_on_bell_state() {
    let recs = enumerate_outcomes(
        &bell(BellIndex::PhiPlus),
        &MeasurementBasis::bell(vec![0, 1], &BellConvention::default()).unwrap(),
        &tol(),
    )
    .unwrap();
    let probs: Vec<f64> = recs.iter().map(|r| r.probability).collect();
    assert!((probs[0] - 1.0).abs() < 1e-12);
    assert!(probs[1..].iter().all(|p| *p < 1e-14));
    assert!(recs[1].is_zero());
}

#[test]
fn complete_basis_coverage_is_one() {
    let s = StateVector::random(4, 11).unwrap();
    let b = MeasurementBasis::computational("z", vec![1, 3]).unwrap();
    let total: f64 = enumerate_outcomes(&s, &b, &tol())
        .unwrap()
        .iter()
        .map(|r| r.probability)
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn textbook_table() {
    let t = derive_correction_table(&textbook(), &default_probes(1, 3).unwrap(), &tol()).unwrap();
    let letters: Vec<(String, String)> = t
        .rows
        .iter()
        .map(|(k, v)| (k.clone(), v.with_phase(qtv_core::Phase::One).to_string()))
        .collect();
    assert_eq!(
        letters,
        vec![
            ("Φ+".to_string(), "I".to_string()),
            ("Φ-".to_string(), "σ3".to_string()),
            ("Ψ+".to_string(), "σ1".to_string()),
            ("Ψ-".to_string(), "σ2".to_string()),
        ]
    );
}

#[test]
fn textbook_verifies() {
    let r = verify(&textbook(), 20, 1, &tol()).unwrap();
    assert!(r.pass, "{r:#?}");
    assert!(r.min_fidelity().unwrap() > 1.0 - 1e-9);
    assert!((r.coverage - 1.0).abs() < 1e-12);
    let r0 = run_protocol(&textbook(), &StateVector::from_bits("0").unwrap(), &tol()).unwrap();
    assert!(r0.pass);
}

#[test]
fn single_probe_rejected() {
    let probes = vec![StateVector::from_bits("0").unwrap()];
    assert!(matches!(
        derive_correction_table(&textbook(), &probes, &tol()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn probe_sets_agree() {
    let a = derive_correction_table(&textbook(), &default_probes(1, 1).unwrap(), &tol()).unwrap();
    let probes = vec![
        StateVector::random(1, 100).unwrap(),
        StateVector::random(1, 200).unwrap(),
    ];
    let b = derive_correction_table(&textbook(), &probes, &tol()).unwrap();
    assert!(a.letter_equal(&b));
}

#[test]
fn overlapping_roles_rejected() {
    assert!(QubitPartition::new([("unknown", vec![0]), ("bob", vec![0])]).is_err());
    assert!(QubitPartition::new([("unknown", vec![0]), ("bob", vec![2])]).is_err());
}

#[test]
fn stage_outside_role_rejected() {
    let partition =
        QubitPartition::new([("unknown", vec![0]), ("alice", vec![1]), ("bob", vec![2])]).unwrap();
    let stage = Stage::fixed(
        "alice",
        MeasurementBasis::bell(vec![1, 2], &BellConvention::default()).unwrap(),
    );
    assert!(ProtocolSpec::new(
        "bad",
        bell(BellIndex::PhiPlus),
        partition,
        vec![stage],
        "bob"
    )
    .is_err());
}

#[test]
fn wrong_input_arity_rejected() {
    let s = StateVector::random(2, 1).unwrap();
    assert!(run_protocol(&textbook(), &s, &tol()).is_err());
}

#[test]
fn intermediate_basis_recovers_bell() {
    let partition =
        QubitPartition::new([("unknown", vec![0]), ("alice", vec![1]), ("bob", vec![2])]).unwrap();
    let spec =
        ProtocolSpec::new("share", bell(BellIndex::PhiPlus), partition, vec![], "bob").unwrap();
    let iso = protocol_isometry(&spec, &[], &tol()).unwrap();
    assert!(!iso.input_dependent);
    let (sb, map) = derive_intermediate_basis(&iso, 2, &tol()).unwrap();
    assert_eq!(sb.basis.len(), 4);
    assert!((sb.coverage - 1.0).abs() < 1e-12);
    assert!(check_orthonormal(&sb.basis, &tol()).orthonormal);
    let words: Vec<String> = map.values().map(|w| w.to_string()).collect();
    assert_eq!(words, vec!["I", "σ1", "σ2", "σ3"]);
    // each element is a Bell state up to phase
    for e in sb.basis.elements() {
        let best = BellIndex::ALL
            .iter()
            .map(|&b| bell(b).fidelity(&e.probe).unwrap())
            .fold(0.0, f64::max);
        assert!((best - 1.0).abs() < 1e-9);
    }
}

#[test]
fn identity_channel_isometry() {
    let partition = QubitPartition::new([("unknown", vec![0]), ("bob", vec![1])]).unwrap();
    let spec = ProtocolSpec::new(
        "id",
        StateVector::from_bits("0").unwrap(),
        partition,
        vec![],
        "bob",
    )
    .unwrap();
    let iso = protocol_isometry(&spec, &[], &tol()).unwrap();
    assert!(iso.gram_defect < 1e-15);
    let psi = StateVector::random(1, 4).unwrap();
    let out = iso.apply(&psi).unwrap();
    assert!(
        (out.fidelity(&psi.tensor(&StateVector::from_bits("0").unwrap()).unwrap())
            .unwrap()
            - 1.0)
            .abs()
            < 1e-12
    );
}

#[test]
fn input_dependent_isometry_reported() {
    // project the input onto |0>-heavy probe: column norms differ
    let partition =
        QubitPartition::new([("unknown", vec![0]), ("alice", vec![1]), ("bob", vec![2])]).unwrap();
    let probe = StateVector::from_real(2, &[0.8, 0.0, 0.0, 0.6]).unwrap();
    let basis = MeasurementBasis::new("skew", vec![0, 1], vec![("s".into(), probe)]).unwrap();
    let spec = ProtocolSpec::new(
        "skew",
        bell(BellIndex::PhiPlus),
        partition,
        vec![Stage::fixed("alice", basis)],
        "bob",
    )
    .unwrap();
    let iso = protocol_isometry(&spec, &["s".to_string()], &tol()).unwrap();
    assert!(iso.input_dependent);
    assert!((iso.column_norms[0] - iso.column_norms[1]).abs() > 1e-3);
}

#[test]
fn per_outcome_missing_key_is_unlisted() {
    let ch = bell(BellIndex::PhiPlus)
        .tensor(&StateVector::from_bits("0").unwrap())
        .unwrap();
    // relay measures only after Φ+; other Alice outcomes are unlisted
    let spec = ProtocolSpec::new(
        "partial",
        ch,
        QubitPartition::new([
            ("unknown", vec![0]),
            ("alice", vec![1]),
            ("relay", vec![3]),
            ("bob", vec![2]),
        ])
        .unwrap(),
        vec![
            Stage::fixed(
                "alice",
                MeasurementBasis::bell(vec![0, 1], &BellConvention::default()).unwrap(),
            ),
            Stage::per_outcome("relay", {
                let mut m = BTreeMap::new();
                m.insert(
                    vec!["Φ+".to_string()],
                    MeasurementBasis::computational("z", vec![3]).unwrap(),
                );
                m
            }),
        ],
        "bob",
    )
    .unwrap();
    let recs = outcome_paths(&spec, &StateVector::random(1, 2).unwrap(), &tol()).unwrap();
    assert_eq!(recs.len(), 2);
    let cov: f64 = recs.iter().map(|r| r.probability).sum();
    assert!((cov - 0.25).abs() < 1e-12);
    let r = verify(&spec.with_expected_coverage(0.25), 5, 9, &tol()).unwrap();
    assert!(r.pass, "{r:#?}");
}

#[test]
fn supplied_wrong_correction_fails() {
    let mut t = CorrectionTable::default();
    for k in ["Φ+", "Φ-", "Ψ+", "Ψ-"] {
        t.insert(k, w("I")).unwrap();
    }
    let r = verify(&textbook().with_corrections(t), 5, 2, &tol()).unwrap();
    assert!(!r.pass);
    assert_eq!(
        r.outcomes
            .iter()
            .filter(|o| o.status == OutcomeStatus::LowFidelity)
            .count(),
        3
    );
}

#[test]
fn report_json_shape() {
    let r = verify(&textbook(), 3, 5, &tol()).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["protocol", "coverage", "outcomes", "diffs", "pass"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let row = &v["outcomes"][0];
    for key in ["labels", "probability", "correction", "fidelity", "status"] {
        assert!(row.get(key).is_some(), "{key}");
    }
}

#[test]
fn pauli_solver_double_flip() {
    // got = a|11> - m|01> - g|10> + b|00>, want = a|00> + m|10> + g|01> + b|11>
    let (a, m, g, b) = (0.5, -0.7, -0.3, 0.1);
    let want = StateVector::from_real(2, &[a, g, m, b])
        .unwrap()
        .normalized()
        .unwrap();
    let got = StateVector::from_real(2, &[b, -m, -g, a])
        .unwrap()
        .normalized()
        .unwrap();
    let sol = solve_pauli_correction(&got, &want, 1e-9).unwrap().unwrap();
    assert!(sol.same_letters(&w("σ2⊗σ2")));
    assert!(word_fidelity(&got, &want, &sol).unwrap() > 1.0 - 1e-12);
}

#[test]
fn frame_vectors_of_bell_pair() {
    let v = pauli_frame_vectors(&bell(BellIndex::PhiPlus), &[1]).unwrap();
    assert_eq!(v.len(), 4);
    for (_, s) in &v {
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
