use std::collections::BTreeMap;

use super::basis::MeasurementBasis;
use super::protocol::{local_positions, ProtocolSpec};
use crate::config::Tolerances;
use crate::linalg::{nullspace, split_right_space, CMatrix, CVector, C64};
use crate::{Error, LocalOperatorWord, Result, StateVector};

/// Linear map from the unknown input to the parties still holding qubits
/// after a conditioned prefix of stages.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    /// `2^n_out x 2^n_in`, columns are images of computational inputs.
    pub matrix: CMatrix,
    pub n_in: usize,
    pub n_out: usize,
    /// Global qubits of the output, ascending.
    pub out_qubits: Vec<usize>,
    /// Column norms before rescaling.
    pub column_norms: Vec<f64>,
    /// Largest deviation of `M^† M / mean` from the identity.
    pub gram_defect: f64,
    pub input_dependent: bool,
}

impl Isometry {
    pub fn apply(&self, input: &StateVector) -> Result<StateVector> {
        if input.n_qubits() != self.n_in {
            return Err(Error::Dimension(input.n_qubits(), self.n_in));
        }
        let v = &self.matrix * CVector::from_column_slice(input.amps());
        StateVector::new(self.n_out, v.iter().copied().collect())
    }
}

/// The map `psi -> residual` along the outcome path `conditioned` (labels for
/// the first `conditioned.len()` stages), rescaled by the mean column norm.
pub fn protocol_isometry(
    spec: &ProtocolSpec,
    conditioned: &[String],
    tol: &Tolerances,
) -> Result<Isometry> {
    spec.validate()?;
    if conditioned.len() > spec.stages.len() {
        return Err(Error::Spec(format!(
            "{} labels for {} stages",
            conditioned.len(),
            spec.stages.len()
        )));
    }
    let u = spec.unknown_arity();
    let mut cols = Vec::with_capacity(1 << u);
    let mut out_qubits = Vec::new();
    for x in 0..1usize << u {
        let mut state = StateVector::basis(u, x)?.tensor(&spec.channel)?;
        let mut remaining: Vec<usize> = (0..state.n_qubits()).collect();
        for (depth, label) in conditioned.iter().enumerate() {
            let stage = &spec.stages[depth];
            let basis = stage.basis_for(&conditioned[..depth]).ok_or_else(|| {
                Error::Spec(format!("path {:?} is not listed", &conditioned[..=depth]))
            })?;
            let e = basis.element(label).ok_or_else(|| {
                Error::Spec(format!("basis {} has no element {label:?}", basis.name()))
            })?;
            let local = local_positions(&remaining, basis.subset())?;
            state = state.contract(&e.probe, &local)?;
            remaining.retain(|q| !basis.subset().contains(q));
        }
        cols.push(CVector::from_column_slice(state.amps()));
        out_qubits = remaining;
    }
    let m = CMatrix::from_columns(&cols);
    let column_norms: Vec<f64> = cols.iter().map(|c| c.norm()).collect();
    let mean_sq = column_norms.iter().map(|n| n * n).sum::<f64>() / cols.len() as f64;
    if mean_sq < tol.zero_probability {
        return Err(Error::ZeroProbability(conditioned.to_vec()));
    }
    let gram = m.adjoint() * &m / C64::new(mean_sq, 0.0);
    let mut gram_defect: f64 = 0.0;
    for r in 0..gram.nrows() {
        for c in 0..gram.ncols() {
            let want = if r == c { 1.0 } else { 0.0 };
            gram_defect = gram_defect.max((gram[(r, c)] - want).norm());
        }
    }
    Ok(Isometry {
        matrix: m / C64::new(mean_sq.sqrt(), 0.0),
        n_in: u,
        n_out: out_qubits.len(),
        out_qubits,
        column_norms,
        gram_defect,
        input_dependent: gram_defect > tol.rank,
    })
}

/// Basis on the first `k` output qubits of an isometry whose elements steer
/// the remaining qubits to prescribed operators.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringBasis {
    pub basis: MeasurementBasis,
    /// Element label → label of the target it realizes.
    pub targets: BTreeMap<String, String>,
    /// Rank of the intermediate party's reachable space.
    pub rank: usize,
    /// Mean outcome probability captured by the basis, over computational
    /// inputs.
    pub coverage: f64,
    /// Targets with no solution.
    pub unreachable: Vec<String>,
}

/// For each `(label, T)` finds every `b` on the first `k` output qubits with
/// `(<b| ⊗ I) K ∝ T`, then orthonormalizes across targets in the order given.
pub fn derive_steering_basis(
    iso: &Isometry,
    k: usize,
    targets: &[(String, CMatrix)],
    tol: &Tolerances,
) -> Result<SteeringBasis> {
    if k == 0 || k >= iso.n_out {
        return Err(Error::Precondition(format!(
            "intermediate arity {k} must lie in 1..{}",
            iso.n_out
        )));
    }
    let rc = iso.n_out - k;
    let (dj, dc, dx) = (1usize << k, 1usize << rc, 1usize << iso.n_in);
    let mut a = CMatrix::zeros(dc * dx, dj);
    for j in 0..dj {
        for c in 0..dc {
            for x in 0..dx {
                a[(c * dx + x, j)] = iso.matrix[(j * dc + c, x)];
            }
        }
    }
    let (row, _) = split_right_space(&a, tol.rank);
    if row.is_empty() {
        return Err(Error::Precondition(
            "isometry is zero on the intermediate party".into(),
        ));
    }
    let r = CMatrix::from_columns(&row);
    let ar = &a * &r;
    let mut raw: Vec<(String, CVector)> = Vec::new();
    let mut unreachable = Vec::new();
    for (label, t) in targets {
        if t.shape() != (dc, dx) {
            return Err(Error::Precondition(format!(
                "target {label} is {:?}, expected {:?}",
                t.shape(),
                (dc, dx)
            )));
        }
        let mut tv = CVector::zeros(dc * dx);
        for c in 0..dc {
            for x in 0..dx {
                tv[c * dx + x] = t[(c, x)];
            }
        }
        let tn = tv.norm();
        if tn == 0.0 {
            return Err(Error::Precondition(format!("target {label} is zero")));
        }
        let that = tv / C64::new(tn, 0.0);
        let proj = CMatrix::identity(dc * dx, dc * dx) - &that * that.adjoint();
        let sols = nullspace(&(proj * &ar), tol.rank);
        if sols.is_empty() {
            unreachable.push(label.clone());
        }
        let many = sols.len() > 1;
        for (i, c) in sols.iter().enumerate() {
            let b = (&r * c).map(|z| z.conj());
            let name = if many {
                format!("{label}#{}", i + 1)
            } else {
                label.clone()
            };
            raw.push((name, b));
        }
    }
    // Gram-Schmidt in target order, labels kept with their vectors
    let mut kept: Vec<(String, CVector)> = Vec::new();
    for (label, v) in raw {
        let mut w = v;
        for (_, q) in &kept {
            let c = q.dotc(&w);
            w -= q * c;
        }
        let n = w.norm();
        if n > tol.rank {
            kept.push((label, w / C64::new(n, 0.0)));
        }
    }
    let subset = iso.out_qubits[..k].to_vec();
    let mut coverage = 0.0;
    let mut elements = Vec::with_capacity(kept.len());
    let mut target_map = BTreeMap::new();
    for (label, b) in &kept {
        let u = b.map(|z| z.conj());
        coverage += (&a * &u).norm_squared() / dx as f64;
        let base = label.split('#').next().unwrap_or(label).to_string();
        target_map.insert(label.clone(), base);
        elements.push((
            label.clone(),
            StateVector::new(k, b.iter().copied().collect())?,
        ));
    }
    if elements.is_empty() {
        return Err(Error::Precondition("no target is reachable".into()));
    }
    Ok(SteeringBasis {
        basis: MeasurementBasis::new("derived", subset, elements)?,
        targets: target_map,
        rank: row.len(),
        coverage,
        unreachable,
    })
}

/// Word matrix as an nalgebra matrix.
pub fn word_matrix(w: &LocalOperatorWord) -> CMatrix {
    let m = w.matrix::<f64>();
    let d = m.len();
    CMatrix::from_fn(d, d, |r, c| m[r][c])
}

/// Steering basis whose targets are the receiver-side Pauli words; each
/// element maps to the word it leaves on the receiver.
pub fn derive_intermediate_basis(
    iso: &Isometry,
    k: usize,
    tol: &Tolerances,
) -> Result<(SteeringBasis, BTreeMap<String, LocalOperatorWord>)> {
    let rc = iso.n_out.saturating_sub(k);
    if rc != iso.n_in {
        return Err(Error::Precondition(format!(
            "receiver keeps {rc} qubits but the input has {}",
            iso.n_in
        )));
    }
    let words = LocalOperatorWord::pauli_words(rc);
    let targets: Vec<(String, CMatrix)> = words
        .iter()
        .map(|w| (w.to_string(), word_matrix(w)))
        .collect();
    let sb = derive_steering_basis(iso, k, &targets, tol)?;
    let by_label: BTreeMap<String, &LocalOperatorWord> =
        words.iter().map(|w| (w.to_string(), w)).collect();
    let map = sb
        .targets
        .iter()
        .filter_map(|(el, t)| by_label.get(t).map(|w| (el.clone(), (*w).clone())))
        .collect();
    Ok((sb, map))
}
