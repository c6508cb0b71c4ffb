//! Measurement bases read off a channel's Bob-conditioned components.
//!
//! Write the channel as `sum_y eta_y ⊗ |y>` with `y` on Bob's qubits. When
//! the `eta_y` are orthogonal with equal norms, the vector
//! `m_P = sum_{x,y} P_{yx} |x> ⊗ eta_y` projects `psi ⊗ channel` onto a Bob
//! residual proportional to `P psi`, so Pauli words give a teleportation
//! basis directly.

use num_complex::Complex;

use crate::operator::{Letter, Phase};
use crate::{Error, LocalOperatorWord, Result, StateVector};

/// Bob-conditioned components `eta_y`, unnormalized, on the channel qubits
/// not in `bob` (ascending).
pub fn conditioned_components(channel: &StateVector, bob: &[usize]) -> Result<Vec<StateVector>> {
    (0..1usize << bob.len())
        .map(|y| channel.contract(&StateVector::basis(bob.len(), y)?, bob))
        .collect()
}

/// Pauli word with the phase that makes its matrix real (`iσ2` for each σ2).
pub fn real_pauli_words(k: usize) -> Vec<LocalOperatorWord> {
    LocalOperatorWord::pauli_words(k)
        .into_iter()
        .map(|w| {
            let n_y = w.letters.iter().filter(|l| **l == Letter::Y).count();
            w.with_phase(Phase::from_power((n_y % 4) as u8))
        })
        .collect()
}

/// `m_P` for every real Pauli word on `bob.len()` qubits, unnormalized.
/// Qubit order: the unknown input first, then the non-Bob channel qubits.
pub fn pauli_frame_vectors(
    channel: &StateVector,
    bob: &[usize],
) -> Result<Vec<(LocalOperatorWord, StateVector)>> {
    let k = bob.len();
    if k == 0 || k >= channel.n_qubits() {
        return Err(Error::Precondition(format!(
            "Bob must hold between 1 and {} channel qubits",
            channel.n_qubits() - 1
        )));
    }
    let etas = conditioned_components(channel, bob)?;
    let m = etas[0].n_qubits();
    let width = k + m;
    real_pauli_words(k)
        .into_iter()
        .map(|w| {
            let p = w.matrix::<f64>();
            let mut amps = vec![Complex::new(0.0, 0.0); 1usize << width];
            for (x, _) in p.iter().enumerate() {
                for (y, eta) in etas.iter().enumerate() {
                    let c = p[y][x];
                    if c.norm() == 0.0 {
                        continue;
                    }
                    for (j, a) in eta.amps().iter().enumerate() {
                        amps[(x << m) | j] += c * a;
                    }
                }
            }
            Ok((w, StateVector::new(width, amps)?))
        })
        .collect()
}
