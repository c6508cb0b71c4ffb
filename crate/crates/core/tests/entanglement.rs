use proptest::prelude::*;
use qtv_core::channel::xwz_channel;
use qtv_core::entanglement::*;
use qtv_core::{StateVector, Tolerances};

#[test]
fn channel_cut_entropies() {
    let tol = Tolerances::default();
    let ch = xwz_channel().unwrap();
    let cuts = bipartition_report(&ch, &tol).unwrap();
    assert_eq!(cuts.len(), 7 + 21 + 35);
    for c in cuts.iter().filter(|c| c.subset.len() == 1) {
        assert!((c.entropy - 1.0).abs() <= 1e-9);
    }
    let s = entanglement_summary(&cuts);
    let two = &s.0[&2];
    let three = &s.0[&3];
    // regression constants from the full sweep
    assert!((two.min - 2.0).abs() < 1e-9);
    assert_eq!(two.maximally_mixed_count, 21);
    assert!((three.min - 2.0).abs() < 1e-9);
    assert!((three.max - 3.0).abs() < 1e-9);
    assert!((three.mean - 102.0 / 35.0).abs() < 1e-9);
    assert_eq!(three.maximally_mixed_count, 32);
    let low: Vec<String> = cuts
        .iter()
        .filter(|c| c.subset.len() == 3 && !c.maximally_mixed)
        .map(|c| subset_label(&c.subset))
        .collect();
    assert_eq!(low.len(), 3);
}

#[test]
fn two_routes_agree_on_the_channel() {
    let tol = Tolerances::default();
    let ch = xwz_channel().unwrap();
    for c in bipartition_report(&ch, &tol).unwrap() {
        assert!(entropy_cross_check(&ch, &c.subset, &tol).unwrap() < 1e-9);
    }
}

#[test]
fn summary_json_shape() {
    let tol = Tolerances::default();
    let s = entanglement_summary(
        &bipartition_report(&StateVector::basis(4, 3).unwrap(), &tol).unwrap(),
    );
    let v = serde_json::to_value(&s).unwrap();
    assert_eq!(v["1"]["max"], 0.0);
    assert_eq!(v["2"]["cuts"], 6);
    assert!(v["2"].get("maximally_mixed_count").is_some());
}

#[test]
fn oversized_state_rejected() {
    let s = StateVector::basis(13, 0).unwrap();
    assert!(bipartition_report(&s, &Tolerances::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn schmidt_symmetry(n in 2usize..7, seed in any::<u64>(), mask in 1u32..64) {
        let tol = Tolerances::default();
        let s = StateVector::random(n, seed).unwrap();
        let a: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        prop_assume!(!a.is_empty() && a.len() < n);
        let b: Vec<usize> = (0..n).filter(|q| !a.contains(q)).collect();
        let ea = cut_entropy(&s, &a, &tol).unwrap().entropy;
        let eb = cut_entropy(&s, &b, &tol).unwrap().entropy;
        prop_assert!((ea - eb).abs() < 1e-9);
        prop_assert!(ea <= a.len().min(b.len()) as f64 + 1e-9);
        prop_assert!(ea >= 0.0);
    }
}
