use serde::Serialize;

use crate::channel::{ghz_family, BellConvention, BellIndex};
use crate::config::Tolerances;
use crate::state::format_bits;
use crate::{Error, Result, StateVector};

#[derive(Debug, Clone, PartialEq)]
pub struct BasisElement {
    pub label: String,
    /// Normalized probe.
    pub probe: StateVector,
    /// Norm of the vector as supplied, before normalization.
    pub raw_norm: f64,
}

/// Labeled family of probes on an ordered qubit subset.
///
/// Probes are normalized on construction; the raw norms are kept so reports
/// can show the constant that was applied. Orthogonality is not enforced
/// here, see [`check_orthonormal`].
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    name: String,
    subset: Vec<usize>,
    elements: Vec<BasisElement>,
}

impl MeasurementBasis {
    pub fn new(
        name: impl Into<String>,
        subset: Vec<usize>,
        elements: Vec<(String, StateVector)>,
    ) -> Result<Self> {
        let name = name.into();
        if elements.is_empty() {
            return Err(Error::Spec(format!("basis {name} is empty")));
        }
        let mut out = Vec::with_capacity(elements.len());
        for (label, v) in elements {
            if v.n_qubits() != subset.len() {
                return Err(Error::Spec(format!(
                    "basis {name}: element {label} has {} qubits, subset has {}",
                    v.n_qubits(),
                    subset.len()
                )));
            }
            if out.iter().any(|e: &BasisElement| e.label == label) {
                return Err(Error::Spec(format!(
                    "basis {name}: duplicate label {label}"
                )));
            }
            let raw_norm = v.norm();
            let probe = v.normalized().map_err(|_| {
                Error::Spec(format!("basis {name}: element {label} is the zero vector"))
            })?;
            out.push(BasisElement {
                label,
                probe,
                raw_norm,
            });
        }
        Ok(Self {
            name,
            subset,
            elements: out,
        })
    }

    pub fn computational(name: impl Into<String>, subset: Vec<usize>) -> Result<Self> {
        let n = subset.len();
        let els = (0..1usize << n)
            .map(|i| Ok((format_bits(i, n), StateVector::basis(n, i)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, subset, els)
    }

    pub fn ghz(subset: Vec<usize>) -> Result<Self> {
        let els = ghz_family()
            .into_iter()
            .enumerate()
            .map(|(i, s)| (format!("GHZ{i}"), s))
            .collect();
        Self::new("GHZ", subset, els)
    }

    /// Bell basis labeled through `conv`.
    pub fn bell(subset: Vec<usize>, conv: &BellConvention) -> Result<Self> {
        let els = BellIndex::ALL
            .iter()
            .map(|&l| (l.symbol().to_string(), conv.state(l)))
            .collect();
        Self::new("Bell", subset, els)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// One element per dimension of the subset's space.
    pub fn complete(&self) -> bool {
        self.elements.len() == 1usize << self.subset.len()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.elements.iter().map(|e| e.label.as_str()).collect()
    }

    pub fn element(&self, label: &str) -> Option<&BasisElement> {
        self.elements.iter().find(|e| e.label == label)
    }

    /// Same probes on another subset of equal size.
    pub fn on_subset(&self, subset: Vec<usize>) -> Result<Self> {
        if subset.len() != self.subset.len() {
            return Err(Error::Dimension(subset.len(), self.subset.len()));
        }
        Ok(Self {
            subset,
            ..self.clone()
        })
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormRecord {
    pub label: String,
    pub raw_norm: f64,
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisReport {
    pub name: String,
    pub size: usize,
    pub dimension: usize,
    pub norms: Vec<NormRecord>,
    pub max_off_diagonal: f64,
    pub worst_pair: Option<(String, String)>,
    /// `max |(sum_k |k><k| - I)_ij|`, only when the family claims completeness.
    pub completeness_defect: Option<f64>,
    pub orthonormal: bool,
}

/// Pairwise overlaps and completeness of a family; defects are reported,
/// never raised.
pub fn check_orthonormal(basis: &MeasurementBasis, tol: &Tolerances) -> BasisReport {
    let els = basis.elements();
    let mut max_off = 0.0;
    let mut worst = None;
    for i in 0..els.len() {
        for j in i + 1..els.len() {
            let ip = els[i]
                .probe
                .inner(&els[j].probe)
                .map(|z| z.norm())
                .unwrap_or(f64::INFINITY);
            if ip > max_off {
                max_off = ip;
                worst = Some((els[i].label.clone(), els[j].label.clone()));
            }
        }
    }
    let completeness_defect = basis.complete().then(|| {
        let d = 1usize << basis.subset().len();
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in 0..d {
                let mut s = num_complex::Complex::new(0.0, 0.0);
                for e in els {
                    s += e.probe.amp(r) * e.probe.amp(c).conj();
                }
                if r == c {
                    s -= 1.0;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    });
    BasisReport {
        name: basis.name().to_string(),
        size: els.len(),
        dimension: 1usize << basis.subset().len(),
        norms: els
            .iter()
            .map(|e| NormRecord {
                label: e.label.clone(),
                raw_norm: e.raw_norm,
                constant: 1.0 / e.raw_norm,
            })
            .collect(),
        max_off_diagonal: max_off,
        worst_pair: worst,
        completeness_defect,
        orthonormal: max_off <= tol.orthonormality,
    }
}
