//! State preparation by two-level (column-zeroing) decomposition.
//!
//! Working from the last qubit upward, each pair of amplitudes that differ
//! only in qubit `q` (with every later qubit already zero) is merged into the
//! `q = 0` slot by a rotation conditioned on the earlier qubits. The result
//! maps the target to `|0...0>` up to phase; reversing and inverting the
//! gate list gives a preparation circuit.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::Serialize;

use crate::config::Tolerances;
use crate::scalar::Real;
use crate::state::{self, bit};
use crate::{Error, Result, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GateKind {
    /// `[[cos t/2, -sin t/2], [sin t/2, cos t/2]]`
    Ry,
    /// `diag(e^{-i t/2}, e^{i t/2})`
    Rz,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub kind: GateKind,
    pub angle: f64,
    pub target: usize,
    /// `(qubit, value)` pairs the gate is conditioned on.
    pub controls: Vec<(usize, bool)>,
}

impl Gate {
    pub fn matrix<T: Real>(&self) -> [[Complex<T>; 2]; 2] {
        let h = T::lit(self.angle / 2.0);
        let z = Complex::new(T::zero(), T::zero());
        match self.kind {
            GateKind::Ry => {
                let (s, c) = (
                    Complex::new(h.sin(), T::zero()),
                    Complex::new(h.cos(), T::zero()),
                );
                [[c, -s], [s, c]]
            }
            GateKind::Rz => [
                [Complex::new(h.cos(), -h.sin()), z],
                [z, Complex::new(h.cos(), h.sin())],
            ],
        }
    }

    pub fn inverse(&self) -> Gate {
        Gate {
            angle: -self.angle,
            ..self.clone()
        }
    }

    fn name(&self) -> &'static str {
        match (self.kind, self.controls.is_empty()) {
            (GateKind::Ry, true) => "ry",
            (GateKind::Ry, false) => "mcry",
            (GateKind::Rz, true) => "rz",
            (GateKind::Rz, false) => "mcrz",
        }
    }
}

/// `<gate> <angle> <target>[;<control>=<value>,...]`
impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?} {}", self.name(), self.angle, self.target)?;
        if !self.controls.is_empty() {
            let cs: Vec<String> = self
                .controls
                .iter()
                .map(|(q, v)| format!("{q}={}", u8::from(*v)))
                .collect();
            write!(f, ";{}", cs.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 0,
            msg: format!("bad gate line {s:?}"),
        };
        let fields: Vec<&str> = s.split_whitespace().collect();
        let [name, angle, targets] = fields[..] else {
            return Err(bad());
        };
        let (kind, controlled) = match name {
            "ry" => (GateKind::Ry, false),
            "mcry" => (GateKind::Ry, true),
            "rz" => (GateKind::Rz, false),
            "mcrz" => (GateKind::Rz, true),
            _ => return Err(bad()),
        };
        let angle: f64 = angle.parse().map_err(|_| bad())?;
        let (t, cs) = match targets.split_once(';') {
            Some((t, cs)) => (t, Some(cs)),
            None => (targets, None),
        };
        let target = t.parse().map_err(|_| bad())?;
        let mut controls = Vec::new();
        if let Some(cs) = cs {
            for c in cs.split(',') {
                let (q, v) = c.split_once('=').ok_or_else(bad)?;
                let v = match v {
                    "0" => false,
                    "1" => true,
                    _ => return Err(bad()),
                };
                controls.push((q.parse().map_err(|_| bad())?, v));
            }
        }
        if controlled == controls.is_empty() {
            return Err(bad());
        }
        Ok(Gate {
            kind,
            angle,
            target,
            controls,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitDescription {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl CircuitDescription {
    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }
}

impl fmt::Display for CircuitDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# qubits {}", self.n_qubits)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for CircuitDescription {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut n_qubits = None;
        let mut gates = Vec::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix("# qubits") {
                n_qubits = rest.trim().parse().ok();
                continue;
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            gates.push(line.parse::<Gate>().map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { line: i + 1, msg },
                e => e,
            })?);
        }
        let n_qubits = n_qubits.ok_or(Error::Parse {
            line: 0,
            msg: "missing `# qubits <n>` header".into(),
        })?;
        Ok(Self { n_qubits, gates })
    }
}

/// Runs `circuit` on `|0...0>`.
pub fn simulate<T: Real>(circuit: &CircuitDescription) -> Result<state::StateVector<T>> {
    let mut s = state::StateVector::<T>::basis(circuit.n_qubits, 0)?;
    for g in &circuit.gates {
        s.apply_single(&g.matrix::<T>(), g.target, &g.controls)?;
    }
    Ok(s)
}

const ANGLE_EPS: f64 = 1e-14;

/// Synthesizes a circuit preparing `target` from `|0...0>` up to global
/// phase, and checks it by simulation.
pub fn synth_prep_circuit(target: &StateVector) -> Result<CircuitDescription> {
    let tol = Tolerances::default();
    if !target.is_normalized(tol.orthonormality) {
        return Err(Error::NotNormalized(target.norm_sqr()));
    }
    let n = target.n_qubits();
    let mut work = target.clone();
    let mut undo = Vec::new();
    for q in (0..n).rev() {
        let stride = 1usize << (n - 1 - q);
        // indices with qubit q = 0 and every later qubit 0
        for p in 0..(1usize << q) {
            let i0 = p << (n - q);
            let (a, b) = (work.amp(i0), work.amp(i0 | stride));
            let (ra, rb) = (a.norm(), b.norm());
            if rb <= ANGLE_EPS {
                continue;
            }
            let controls: Vec<(usize, bool)> = (0..q).map(|c| (c, bit(i0, c, n) == 1)).collect();
            if ra > ANGLE_EPS {
                let phi = a.arg() - b.arg();
                if phi.abs() > ANGLE_EPS {
                    let g = Gate {
                        kind: GateKind::Rz,
                        angle: phi,
                        target: q,
                        controls: controls.clone(),
                    };
                    work.apply_single(&g.matrix::<f64>(), q, &g.controls)?;
                    undo.push(g);
                }
            }
            let g = Gate {
                kind: GateKind::Ry,
                angle: -2.0 * rb.atan2(ra),
                target: q,
                controls,
            };
            work.apply_single(&g.matrix::<f64>(), q, &g.controls)?;
            undo.push(g);
        }
    }
    let circuit = CircuitDescription {
        n_qubits: n,
        gates: undo.iter().rev().map(Gate::inverse).collect(),
    };
    let f = simulate::<f64>(&circuit)?.fidelity(target)?;
    if f < 1.0 - tol.fidelity {
        return Err(Error::Precondition(format!(
            "synthesized circuit reaches fidelity {f}, below 1 - {}",
            tol.fidelity
        )));
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{bell, xwz_channel, BellIndex};

    #[test]
    fn zero_state_needs_no_gates() {
        let c = synth_prep_circuit(&StateVector::from_bits("0").unwrap()).unwrap();
        assert_eq!(c.gate_count(), 0);
    }

    #[test]
    fn bell_preparation() {
        let target = bell(BellIndex::PhiPlus);
        let c = synth_prep_circuit(&target).unwrap();
        let f = simulate::<f64>(&c).unwrap().fidelity(&target).unwrap();
        assert!((f - 1.0).abs() < 1e-9);
    }

    #[test]
    fn channel_within_budget() {
        let ch = xwz_channel().unwrap();
        let c = synth_prep_circuit(&ch).unwrap();
        assert!(c.gate_count() <= 512);
        assert!(simulate::<f64>(&c).unwrap().fidelity(&ch).unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn text_round_trip() {
        let target = StateVector::random(3, 5).unwrap();
        let c = synth_prep_circuit(&target).unwrap();
        let back: CircuitDescription = c.to_string().parse().unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn gate_line_format() {
        let g: Gate = "mcry 0.5 2;0=1,1=0".parse().unwrap();
        assert_eq!(g.controls, vec![(0, true), (1, false)]);
        assert_eq!(g.to_string(), "mcry 0.5 2;0=1,1=0");
        assert!("ry 0.5 2;0=1".parse::<Gate>().is_err());
        assert!("cx 0 1".parse::<Gate>().is_err());
    }

    #[test]
    fn complex_target() {
        let target =
            StateVector::new(1, vec![Complex::new(0.6, 0.0), Complex::new(0.0, 0.8)]).unwrap();
        let c = synth_prep_circuit(&target).unwrap();
        assert!(simulate::<f64>(&c).unwrap().fidelity(&target).unwrap() > 1.0 - 1e-12);
    }
}
