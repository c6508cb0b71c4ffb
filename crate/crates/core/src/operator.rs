//! Local operator words: a tensor product of single-qubit letters times a
//! global phase from {+1, -1, +i, -i}.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Real;
use crate::{Error, Result};

/// Single-qubit operator letter.
///
/// Declaration order is the search order for Pauli corrections
/// (`I < σ1 < σ2 < σ3`), followed by the non-unitary letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    I,
    /// σ1, Pauli X.
    X,
    /// σ2, Pauli Y, stored as `[[0, -i], [i, 0]]`.
    Y,
    /// σ3, Pauli Z.
    Z,
    /// Projection onto the first component, `[[1, 0], [0, 0]]`.
    P1,
    /// Projection onto the second component, `[[0, 0], [0, 1]]`.
    P2,
    /// Flip and projection of the first component, `[[0, 1], [0, 0]]`.
    F1,
    /// Flip and projection of the second component, `[[0, 0], [1, 0]]`.
    F2,
}

impl Letter {
    pub const PAULIS: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];
    pub const ALL: [Letter; 8] = [
        Letter::I,
        Letter::X,
        Letter::Y,
        Letter::Z,
        Letter::P1,
        Letter::P2,
        Letter::F1,
        Letter::F2,
    ];

    pub fn is_unitary(self) -> bool {
        matches!(self, Letter::I | Letter::X | Letter::Y | Letter::Z)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Letter::I => "I",
            Letter::X => "σ1",
            Letter::Y => "σ2",
            Letter::Z => "σ3",
            Letter::P1 => "P1",
            Letter::P2 => "P2",
            Letter::F1 => "F1",
            Letter::F2 => "F2",
        }
    }

    /// Row-major 2x2 matrix.
    pub fn matrix<T: Real>(self) -> [[Complex<T>; 2]; 2] {
        let z = Complex::new(T::zero(), T::zero());
        let o = Complex::new(T::one(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        match self {
            Letter::I => [[o, z], [z, o]],
            Letter::X => [[z, o], [o, z]],
            Letter::Y => [[z, -i], [i, z]],
            Letter::Z => [[o, z], [z, -o]],
            Letter::P1 => [[o, z], [z, z]],
            Letter::P2 => [[z, z], [z, o]],
            Letter::F1 => [[z, o], [z, z]],
            Letter::F2 => [[z, z], [o, z]],
        }
    }

    pub fn adjoint(self) -> Letter {
        match self {
            Letter::F1 => Letter::F2,
            Letter::F2 => Letter::F1,
            other => other,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "I" | "1" => Letter::I,
            "σ1" | "σx" | "X" | "sigma1" => Letter::X,
            "σ2" | "σy" | "Y" | "sigma2" => Letter::Y,
            "σ3" | "σz" | "Z" | "sigma3" => Letter::Z,
            "P1" => Letter::P1,
            "P2" => Letter::P2,
            "F1" => Letter::F1,
            "F2" => Letter::F2,
            other => return Err(Error::Word(format!("unknown letter {other:?}"))),
        })
    }
}

/// A power of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Phase {
    #[default]
    One,
    I,
    MinusOne,
    MinusI,
}

impl Phase {
    pub const ALL: [Phase; 4] = [Phase::One, Phase::I, Phase::MinusOne, Phase::MinusI];

    fn power(self) -> u8 {
        match self {
            Phase::One => 0,
            Phase::I => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn from_power(p: u8) -> Phase {
        match p % 4 {
            0 => Phase::One,
            1 => Phase::I,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn conj(self) -> Phase {
        Phase::from_power(4 - self.power())
    }

    pub fn to_complex<T: Real>(self) -> Complex<T> {
        let (o, z) = (T::one(), T::zero());
        match self {
            Phase::One => Complex::new(o, z),
            Phase::I => Complex::new(z, o),
            Phase::MinusOne => Complex::new(-o, z),
            Phase::MinusI => Complex::new(z, -o),
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            Phase::One => "",
            Phase::I => "i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        }
    }
}

/// Tensor product of letters, one per target qubit, times a global phase.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalOperatorWord {
    pub letters: Vec<Letter>,
    pub phase: Phase,
}

impl LocalOperatorWord {
    pub fn new(letters: Vec<Letter>, phase: Phase) -> Self {
        Self { letters, phase }
    }

    pub fn identity(k: usize) -> Self {
        Self::new(vec![Letter::I; k], Phase::One)
    }

    pub fn single(letter: Letter) -> Self {
        Self::new(vec![letter], Phase::One)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// True when every letter is I, σ1, σ2 or σ3.
    pub fn is_unitary(&self) -> bool {
        self.letters.iter().all(|l| l.is_unitary())
    }

    pub fn adjoint(&self) -> Self {
        Self::new(
            self.letters.iter().map(|l| l.adjoint()).collect(),
            self.phase.conj(),
        )
    }

    pub fn with_phase(&self, phase: Phase) -> Self {
        Self::new(self.letters.clone(), phase)
    }

    pub fn same_letters(&self, other: &Self) -> bool {
        self.letters == other.letters
    }

    /// All `4^k` Pauli words with phase +1, in lexicographic letter order.
    pub fn pauli_words(k: usize) -> Vec<LocalOperatorWord> {
        let mut out = Vec::with_capacity(1 << (2 * k));
        for code in 0..(1usize << (2 * k)) {
            let letters = (0..k)
                .map(|pos| Letter::PAULIS[(code >> (2 * (k - 1 - pos))) & 3])
                .collect();
            out.push(Self::new(letters, Phase::One));
        }
        out
    }

    /// Full `2^k x 2^k` matrix, row-major, big-endian in letter order.
    pub fn matrix<T: Real>(&self) -> Vec<Vec<Complex<T>>> {
        let k = self.letters.len();
        let dim = 1usize << k;
        let mats: Vec<_> = self.letters.iter().map(|l| l.matrix::<T>()).collect();
        let ph = self.phase.to_complex::<T>();
        let mut m = vec![vec![Complex::new(T::zero(), T::zero()); dim]; dim];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                let mut v = ph;
                for (pos, mat) in mats.iter().enumerate() {
                    let shift = k - 1 - pos;
                    v = v * mat[(r >> shift) & 1][(c >> shift) & 1];
                }
                *cell = v;
            }
        }
        m
    }

    /// Notation with each σ2 written as `iσ2`, as printed tables do.
    ///
    /// The residual phase after distributing `i` over the σ2 letters is kept
    /// as a prefix.
    pub fn table_notation(&self) -> String {
        let n_y = self.letters.iter().filter(|l| **l == Letter::Y).count() as u8;
        let rest = self.phase * Phase::from_power(4 - (n_y % 4));
        let body: Vec<String> = self
            .letters
            .iter()
            .map(|l| match l {
                Letter::Y => "iσ2".to_string(),
                other => other.symbol().to_string(),
            })
            .collect();
        format!("{}{}", rest.prefix(), body.join("⊗"))
    }
}

impl fmt::Display for LocalOperatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<&str> = self.letters.iter().map(|l| l.symbol()).collect();
        write!(f, "{}{}", self.phase.prefix(), body.join("⊗"))
    }
}

impl FromStr for LocalOperatorWord {
    type Err = Error;

    /// Accepts `σ3⊗σ1`, `iσ2⊗iσ2`, `-σ2⊗σ2`, `I`; factors split on `⊗`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Word("empty word".into()));
        }
        let mut phase = Phase::One;
        let mut letters = Vec::new();
        for factor in s.split('⊗') {
            let mut rest = factor.trim();
            loop {
                if let Some(r) = rest.strip_prefix('-') {
                    phase = phase * Phase::MinusOne;
                    rest = r;
                } else if let Some(r) = rest.strip_prefix('+') {
                    rest = r;
                } else if rest.len() > 1 && rest.starts_with('i') {
                    phase = phase * Phase::I;
                    rest = &rest[1..];
                } else {
                    break;
                }
            }
            letters.push(rest.parse::<Letter>()?);
        }
        Ok(Self::new(letters, phase))
    }
}

impl Serialize for LocalOperatorWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LocalOperatorWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;

    // i^a * i^b = i^(a+b)
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, other: Phase) -> Phase {
        Phase::from_power(self.power() + other.power())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_printed_forms() {
        let w: LocalOperatorWord = "iσ2⊗iσ2".parse().unwrap();
        assert_eq!(w.letters, vec![Letter::Y, Letter::Y]);
        assert_eq!(w.phase, Phase::MinusOne);
        assert_eq!(w.to_string(), "-σ2⊗σ2");
        assert_eq!(w.table_notation(), "iσ2⊗iσ2");

        let w: LocalOperatorWord = "σ3⊗σ1".parse().unwrap();
        assert_eq!(w.table_notation(), "σ3⊗σ1");
        assert!("I⊗Q".parse::<LocalOperatorWord>().is_err());
    }

    #[test]
    fn i_sigma2_is_real() {
        let w: LocalOperatorWord = "iσ2".parse().unwrap();
        let m = w.matrix::<f64>();
        assert_eq!(m[0][1], Complex::new(1.0, 0.0));
        assert_eq!(m[1][0], Complex::new(-1.0, 0.0));
    }

    #[test]
    fn pauli_words_are_lexicographic() {
        let ws = LocalOperatorWord::pauli_words(2);
        assert_eq!(ws.len(), 16);
        assert_eq!(ws[0].to_string(), "I⊗I");
        assert_eq!(ws[1].to_string(), "I⊗σ1");
        assert_eq!(ws[4].to_string(), "σ1⊗I");
        assert_eq!(ws[15].to_string(), "σ3⊗σ3");
    }

    #[test]
    fn unitarity_flag() {
        assert!("σ1⊗σ3".parse::<LocalOperatorWord>().unwrap().is_unitary());
        assert!(!"P2⊗I".parse::<LocalOperatorWord>().unwrap().is_unitary());
        assert_eq!(Letter::F1.adjoint(), Letter::F2);
    }

    #[test]
    fn phase_algebra() {
        assert_eq!(Phase::I * Phase::I, Phase::MinusOne);
        assert_eq!(Phase::MinusI.conj(), Phase::I);
        for p in Phase::ALL {
            assert_eq!(p * p.conj(), Phase::One);
        }
    }
}
