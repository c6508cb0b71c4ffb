use serde::Serialize;

use super::{anchor, data, FamilyMatch, PaperDatum};
use crate::channel::{reconstruct_channel, xwz_channel, Discrepancy};
use crate::engine::{conditioned_components, corrections_for, real_pauli_words, MeasurementBasis};
use crate::ket::KetExpr;
use crate::linalg::C64;
use crate::{Error, Result, StateVector, Tolerances};

const FAMILY_FILE: &str = "channel_family.txt";
const LETTERS: [char; 8] = ['A', 'B', 'C', 'D', 'E', 'F', 'G', 'H'];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Appendix1Report {
    #[serde(skip)]
    pub states: Vec<PaperDatum>,
    /// `|<i|j>|` between normalized printed states, in file order.
    #[serde(skip)]
    pub overlaps: Vec<Vec<f64>>,
    pub count: usize,
    pub raw_norms: Vec<f64>,
    pub max_overlap: f64,
    pub worst_pair: (String, String),
    /// Largest overlap between states of the same letter block.
    pub max_overlap_within_block: f64,
    pub discrepancies: Vec<Discrepancy>,
    /// Printed states that differ from their channel-derived counterpart.
    pub flagged: Vec<FamilyMatch>,
}

/// Corrected state for key `Lyyy`: `|x⟩ ⊗ eta_y` on (input, channel 1-4),
/// scaled to the printed ±1 amplitudes.
fn corrected_state(key: &str) -> Result<StateVector> {
    let bad = || Error::Precondition(format!("bad family key {key:?}"));
    let mut cs = key.chars();
    let x = cs
        .next()
        .and_then(|l| LETTERS.iter().position(|c| *c == l))
        .ok_or_else(bad)?;
    let y = usize::from_str_radix(cs.as_str(), 2).map_err(|_| bad())?;
    let etas = conditioned_components(&xwz_channel()?, &[4, 5, 6])?;
    let eta = &etas[y];
    let scale = 1.0 / eta.amps().iter().map(|a| a.norm()).fold(0.0, f64::max);
    StateVector::basis(3, x)?.tensor(&eta.scaled(C64::new(scale, 0.0)))
}

/// The 64 printed states with pairwise overlaps, vote discrepancies and a
/// comparison with the channel-derived states.
pub fn appendix1_family() -> Result<Appendix1Report> {
    let entries = data(FAMILY_FILE)?;
    let mut states = Vec::with_capacity(entries.len());
    let mut flagged = Vec::new();
    for e in &entries {
        let v = KetExpr::parse(&e.value)?.plain()?;
        let a = anchor(FAMILY_FILE, e);
        let d = corrected_state(&e.key)?;
        let ov = v.normalized()?.inner(&d.normalized()?)?.norm();
        let m = FamilyMatch::single(e.key.clone(), a.clone(), v.norm(), e.key.clone(), ov);
        if m.status == super::MatchStatus::Flagged {
            flagged.push(m);
        }
        states.push(PaperDatum::new(a, &e.value, &v));
    }
    let n = states.len();
    let mut overlaps = vec![vec![0.0; n]; n];
    let mut max_overlap = 0.0;
    let mut worst_pair = (String::new(), String::new());
    let mut max_within = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let (Some(a), Some(b)) = (&states[i].normalized, &states[j].normalized) else {
                continue;
            };
            let ov = a.inner(b)?.norm();
            overlaps[i][j] = ov;
            if j > i {
                if ov > max_overlap {
                    max_overlap = ov;
                    worst_pair = (entries[i].key.clone(), entries[j].key.clone());
                }
                if entries[i].key[..1] == entries[j].key[..1] {
                    max_within = max_within.max(ov);
                }
            }
        }
    }
    Ok(Appendix1Report {
        count: n,
        raw_norms: states.iter().map(|s| s.raw_norm).collect(),
        states,
        overlaps,
        max_overlap,
        worst_pair,
        max_overlap_within_block: max_within,
        discrepancies: reconstruct_channel()?.discrepancies,
        flagged,
    })
}

/// `sum_x P_{yx} L(x)_y` for every real three-qubit Pauli word, labeled like
/// `A000+B001-C010...` (first sign normalized away).
fn teleport3_basis(
    name: &str,
    state: &dyn Fn(&str) -> Result<StateVector>,
) -> Result<MeasurementBasis> {
    let mut els = Vec::new();
    for w in real_pauli_words(3) {
        let p = w.matrix::<f64>();
        let mut acc: Option<StateVector> = None;
        let mut label = String::new();
        let mut first_sign = 0.0;
        for (x, letter) in LETTERS.iter().enumerate() {
            let Some(y) = (0..8).find(|&y| p[y][x].norm() > 0.5) else {
                continue;
            };
            let c = p[y][x].re;
            if first_sign == 0.0 {
                first_sign = c.signum();
            }
            let s = c * first_sign;
            if !label.is_empty() || s < 0.0 {
                label.push(if s < 0.0 { '-' } else { '+' });
            }
            label.push_str(&format!("{letter}{y:03b}"));
            let key = format!("{letter}{y:03b}");
            let v = state(&key)?.scaled(C64::new(s, 0.0));
            acc = Some(match acc {
                Some(a) => a.axpy(C64::new(1.0, 0.0), &v)?,
                None => v,
            });
        }
        let v = acc.ok_or_else(|| Error::Precondition(format!("{w} has no support")))?;
        els.push((label, v));
    }
    MeasurementBasis::new(name, (0..7).collect(), els)
}

/// Three-qubit basis built from the channel-derived family states.
pub fn basis_teleport3_derived() -> Result<MeasurementBasis> {
    teleport3_basis("teleport3 derived", &corrected_state)
}

/// Same combinations over the printed family states.
pub fn basis_teleport3_printed() -> Result<MeasurementBasis> {
    let entries = data(FAMILY_FILE)?;
    teleport3_basis("teleport3 printed", &|key| {
        let e = entries
            .iter()
            .find(|e| e.key == key)
            .ok_or_else(|| Error::Precondition(format!("no family state {key}")))?;
        KetExpr::parse(&e.value)?.plain()
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Appendix2Options {
    /// Outcome label left out of the sum, to show the identity needs every
    /// term.
    pub drop: Option<String>,
}

/// Largest L2 distance between `(sum_x c_x|x>) ⊗ channel` and its
/// re-expansion `sum_m |m> ⊗ W_m^† W_m (<m| ⊗ I)` over the derived basis
/// and its solved corrections, across `inputs`.
pub fn appendix2_check(inputs: &[StateVector]) -> Result<f64> {
    appendix2_check_with(inputs, &Appendix2Options::default())
}

pub fn appendix2_check_with(inputs: &[StateVector], opts: &Appendix2Options) -> Result<f64> {
    let spec = super::spec_teleport3()?;
    let tol = Tolerances::default();
    let table = corrections_for(&spec, &tol)?;
    let basis = spec.stages[0]
        .basis_for(&[])
        .ok_or_else(|| Error::Spec("teleport3 stage is not fixed".into()))?;
    if let Some(d) = &opts.drop {
        if basis.element(d).is_none() {
            return Err(Error::Precondition(format!("no outcome {d:?}")));
        }
    }
    let alice: Vec<usize> = (0..7).collect();
    let mut worst: f64 = 0.0;
    for c in inputs {
        if c.n_qubits() != 3 {
            return Err(Error::Dimension(c.n_qubits(), 3));
        }
        let lhs = c.tensor(&spec.channel)?;
        let mut rhs = StateVector::zeros(lhs.n_qubits())?;
        for e in basis.elements() {
            if opts.drop.as_deref() == Some(e.label.as_str()) {
                continue;
            }
            let bob = lhs.contract(&e.probe, &alice)?;
            let w = table
                .get(&e.label)
                .ok_or_else(|| Error::Spec(format!("no correction for {}", e.label)))?;
            let t = [0, 1, 2];
            let undone = bob.apply_word(w, &t)?.apply_word(&w.adjoint(), &t)?;
            rhs = rhs.axpy(C64::new(1.0, 0.0), &e.probe.tensor(&undone)?)?;
        }
        let diff = lhs.axpy(C64::new(-1.0, 0.0), &rhs)?;
        worst = worst.max(diff.norm());
    }
    Ok(worst)
}
