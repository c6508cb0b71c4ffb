//! Bipartite entanglement across every cut of a pure state.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::density::reduced_density;
use crate::linalg::CMatrix;
use crate::state::check_targets;
use crate::{Error, Result, StateVector, Tolerances};

/// Largest register [`bipartition_report`] accepts.
pub const MAX_BIPARTITION_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutEntropy {
    pub subset: Vec<usize>,
    /// Von Neumann entropy of the subset, in bits.
    pub entropy: f64,
    pub schmidt_rank: usize,
    pub maximally_mixed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutStats {
    pub cuts: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    pub maximally_mixed_count: usize,
}

/// Entropy statistics keyed by subset size.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct EntanglementSummary(pub BTreeMap<usize, CutStats>);

/// `psi` reshaped to `2^|subset| x 2^rest`.
fn cut_matrix(state: &StateVector, subset: &[usize]) -> Result<CMatrix> {
    let n = state.n_qubits();
    check_targets(subset, n)?;
    let rest: Vec<usize> = (0..n).filter(|q| !subset.contains(q)).collect();
    let bit = |i: usize, q: usize| (i >> (n - 1 - q)) & 1;
    let mut m = CMatrix::zeros(1 << subset.len(), 1 << rest.len());
    for (i, a) in state.amps().iter().enumerate() {
        let r = subset.iter().fold(0, |acc, &q| (acc << 1) | bit(i, q));
        let c = rest.iter().fold(0, |acc, &q| (acc << 1) | bit(i, q));
        m[(r, c)] = *a;
    }
    Ok(m)
}

/// Squared Schmidt coefficients across `subset | rest`, descending.
pub fn schmidt_coefficients(state: &StateVector, subset: &[usize]) -> Result<Vec<f64>> {
    let m = cut_matrix(state, subset)?;
    let mut p: Vec<f64> = m.singular_values().iter().map(|s| s * s).collect();
    p.sort_by(|a, b| b.total_cmp(a));
    Ok(p)
}

pub fn cut_entropy(state: &StateVector, subset: &[usize], tol: &Tolerances) -> Result<CutEntropy> {
    let norm = state.norm();
    if (norm - 1.0).abs() > tol.orthonormality {
        return Err(Error::NotNormalized(norm));
    }
    let p = schmidt_coefficients(state, subset)?;
    let kept: Vec<f64> = p
        .iter()
        .copied()
        .filter(|&l| l >= tol.eigenvalue_floor)
        .collect();
    let entropy = kept.iter().map(|l| -l * l.log2()).sum::<f64>().max(0.0);
    let d = 1usize << subset.len();
    let flat = 1.0 / d as f64;
    let maximally_mixed = p.len() >= d && p[..d].iter().all(|l| (l - flat).abs() <= tol.rank);
    Ok(CutEntropy {
        subset: subset.to_vec(),
        entropy,
        schmidt_rank: p.iter().filter(|&&l| l > tol.rank).count(),
        maximally_mixed,
    })
}

/// `|S_schmidt - S_density|` for one cut; the two routes share no code
/// beyond the state itself.
pub fn entropy_cross_check(state: &StateVector, subset: &[usize], tol: &Tolerances) -> Result<f64> {
    let a = cut_entropy(state, subset, tol)?.entropy;
    let b = reduced_density(state, subset)?.entropy_bits(tol)?;
    Ok((a - b).abs())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for q in start..n {
            cur.push(q);
            go(q + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Entropy of every subset of size `1..=n/2`, by size then lexicographically.
pub fn bipartition_report(state: &StateVector, tol: &Tolerances) -> Result<Vec<CutEntropy>> {
    let n = state.n_qubits();
    if n > MAX_BIPARTITION_QUBITS {
        return Err(Error::Capacity {
            requested: n,
            max: MAX_BIPARTITION_QUBITS,
        });
    }
    (1..=n / 2)
        .flat_map(|k| combinations(n, k))
        .map(|s| cut_entropy(state, &s, tol))
        .collect()
}

pub fn entanglement_summary(cuts: &[CutEntropy]) -> EntanglementSummary {
    let mut by: BTreeMap<usize, Vec<&CutEntropy>> = BTreeMap::new();
    for c in cuts {
        by.entry(c.subset.len()).or_default().push(c);
    }
    EntanglementSummary(
        by.into_iter()
            .map(|(k, cs)| {
                let es: Vec<f64> = cs.iter().map(|c| c.entropy).collect();
                let stats = CutStats {
                    cuts: cs.len(),
                    min: es.iter().copied().fold(f64::INFINITY, f64::min),
                    mean: es.iter().sum::<f64>() / es.len() as f64,
                    max: es.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    maximally_mixed_count: cs.iter().filter(|c| c.maximally_mixed).count(),
                };
                (k, stats)
            })
            .collect(),
    )
}

/// Subset written as its qubit list, e.g. `{0,3,5}`.
pub fn subset_label(subset: &[usize]) -> String {
    let parts: Vec<String> = subset.iter().map(usize::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{bell, BellIndex};

    #[test]
    fn bell_pair_is_one_bit() {
        let tol = Tolerances::default();
        let c = cut_entropy(&bell(BellIndex::PsiMinus), &[0], &tol).unwrap();
        assert!((c.entropy - 1.0).abs() < 1e-12);
        assert!(c.maximally_mixed);
        assert_eq!(c.schmidt_rank, 2);
    }

    #[test]
    fn product_state_is_zero() {
        let s = StateVector::basis(3, 0b101).unwrap();
        let r = bipartition_report(&s, &Tolerances::default()).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|c| c.entropy == 0.0 && c.schmidt_rank == 1));
    }

    #[test]
    fn cut_order_is_lexicographic() {
        let s = StateVector::basis(4, 0).unwrap();
        let subsets: Vec<Vec<usize>> = bipartition_report(&s, &Tolerances::default())
            .unwrap()
            .into_iter()
            .map(|c| c.subset)
            .collect();
        assert_eq!(subsets.len(), 4 + 6);
        assert_eq!(subsets[0], vec![0]);
        assert_eq!(subsets[4], vec![0, 1]);
        assert_eq!(subsets[9], vec![2, 3]);
    }

    #[test]
    fn unnormalized_rejected() {
        let s = StateVector::from_real(1, &[1.0, 1.0]).unwrap();
        assert!(cut_entropy(&s, &[0], &Tolerances::default()).is_err());
    }

    #[test]
    fn label_format() {
        assert_eq!(subset_label(&[0, 3]), "{0,3}");
    }
}
