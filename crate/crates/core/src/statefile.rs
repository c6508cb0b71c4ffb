//! Plain-text state files.
//!
//! One line per nonzero amplitude, `<bitstring> <re> <im>`. `#` starts a
//! comment. The bitstring length fixes the qubit count.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_complex::Complex;

use crate::scalar::Real;
use crate::state::{format_bits, parse_bits, StateVector};
use crate::{Error, Result};

pub fn parse_state<T: Real>(text: &str) -> Result<StateVector<T>> {
    let mut n_qubits = None;
    let mut seen = BTreeSet::new();
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(format!("expected `<bits> <re> <im>`, got {line:?}")));
        }
        let bits = fields[0];
        let idx = parse_bits(bits).map_err(|_| err(format!("bad bitstring {bits:?}")))?;
        match n_qubits {
            None => n_qubits = Some(bits.len()),
            Some(n) if n != bits.len() => {
                return Err(err(format!(
                    "bitstring {bits:?} has length {}, expected {n}",
                    bits.len()
                )))
            }
            _ => {}
        }
        if !seen.insert(idx) {
            return Err(err(format!("duplicate bitstring {bits}")));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| err(format!("bad number {s:?}")))
        };
        entries.push((idx, num(fields[1])?, num(fields[2])?));
    }
    let n = n_qubits.ok_or(Error::Parse {
        line: 0,
        msg: "no amplitudes".into(),
    })?;
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 1usize << n];
    for (idx, re, im) in entries {
        amps[idx] = Complex::new(T::lit(re), T::lit(im));
    }
    StateVector::new(n, amps)
}

/// Writes every amplitude with modulus above `eps`, in index order, using
/// shortest round-trip float formatting.
pub fn write_state<T: Real>(state: &StateVector<T>, eps: f64) -> String {
    let mut out = String::new();
    let n = state.n_qubits();
    for (i, a) in state.amps().iter().enumerate() {
        if a.norm().to_f64_lossy() <= eps {
            continue;
        }
        let _ = writeln!(
            out,
            "{} {} {}",
            format_bits(i, n),
            fmt_real(a.re.to_f64_lossy()),
            fmt_real(a.im.to_f64_lossy())
        );
    }
    out
}

fn fmt_real(x: f64) -> String {
    // avoid "-0"
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = StateVector::<f64>::random(3, 11).unwrap();
        let back: StateVector<f64> = parse_state(&write_state(&s, 0.0)).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# bell\n00 0.7071067811865476 0\n\n11 0.7071067811865476 0 # tail\n";
        let s: StateVector<f64> = parse_state(text).unwrap();
        assert_eq!(s.n_qubits(), 2);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn duplicates_rejected() {
        let e = parse_state::<f64>("0 1 0\n0 0 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn mixed_lengths_rejected() {
        assert!(parse_state::<f64>("0 1 0\n01 0 1\n").is_err());
    }

    #[test]
    fn empty_rejected() {
        assert!(parse_state::<f64>("# nothing\n").is_err());
    }
}
