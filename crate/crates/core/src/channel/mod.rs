//! Named states: the GHZ and Bell families and the seven-qubit channel.

mod reconstruct;
mod synth;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, StateVector};

pub use reconstruct::{
    reconstruct_channel, reconstruct_from, xwz_channel, BlockVote, ChannelReconstruction,
    Discrepancy, DiscrepancyKind, CHANNEL_FAMILY_DATA,
};
pub use synth::{simulate, synth_prep_circuit, CircuitDescription, Gate, GateKind};

/// Index into the eight-member GHZ family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GhzIndex(u8);

impl GhzIndex {
    pub const ALL: [GhzIndex; 8] = [
        GhzIndex(0),
        GhzIndex(1),
        GhzIndex(2),
        GhzIndex(3),
        GhzIndex(4),
        GhzIndex(5),
        GhzIndex(6),
        GhzIndex(7),
    ];

    pub fn new(i: u8) -> Result<Self> {
        if i < 8 {
            Ok(Self(i))
        } else {
            Err(Error::Precondition(format!(
                "GHZ index {i} out of range 0..8"
            )))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// The computational ket pair `(x, not x)`; even indices add, odd subtract.
    pub fn kets(self) -> (usize, usize, f64) {
        let (a, b) = [
            (0b000, 0b111),
            (0b001, 0b110),
            (0b010, 0b101),
            (0b100, 0b011),
        ][(self.0 / 2) as usize];
        (a, b, if self.0.is_multiple_of(2) { 1.0 } else { -1.0 })
    }
}

/// `(|x> +- |x'>)/sqrt2` with pairs 000/111, 001/110, 010/101, 100/011.
pub fn ghz(i: GhzIndex) -> StateVector {
    let (a, b, s) = i.kets();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = [0.0; 8];
    v[a] = h;
    v[b] = s * h;
    StateVector::from_real(3, &v)
        .expect("3-qubit state")
        .with_label(format!("GHZ{}", i.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BellIndex {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellIndex {
    pub const ALL: [BellIndex; 4] = [
        BellIndex::PhiPlus,
        BellIndex::PhiMinus,
        BellIndex::PsiPlus,
        BellIndex::PsiMinus,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BellIndex::PhiPlus => "Φ+",
            BellIndex::PhiMinus => "Φ-",
            BellIndex::PsiPlus => "Ψ+",
            BellIndex::PsiMinus => "Ψ-",
        }
    }
}

impl fmt::Display for BellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for BellIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.replace('−', "-").replace('_', "");
        Ok(match t.as_str() {
            "Φ+" | "Phi+" => BellIndex::PhiPlus,
            "Φ-" | "Phi-" => BellIndex::PhiMinus,
            "Ψ+" | "Psi+" => BellIndex::PsiPlus,
            "Ψ-" | "Psi-" => BellIndex::PsiMinus,
            _ => return Err(Error::Precondition(format!("unknown Bell label {s:?}"))),
        })
    }
}

/// Phi+- = (|00> +- |11>)/sqrt2, Psi+- = (|01> +- |10>)/sqrt2.
pub fn bell(i: BellIndex) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = match i {
        BellIndex::PhiPlus => [h, 0.0, 0.0, h],
        BellIndex::PhiMinus => [h, 0.0, 0.0, -h],
        BellIndex::PsiPlus => [0.0, h, h, 0.0],
        BellIndex::PsiMinus => [0.0, h, -h, 0.0],
    };
    StateVector::from_real(2, &v)
        .expect("2-qubit state")
        .with_label(i.symbol())
}

/// Assignment of Bell labels to states: label `l` denotes `bell(map[l])`.
///
/// The symbols appear in printed expansions without a definition, so
/// callers that need to can search over all 24 relabelings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BellConvention {
    map: [BellIndex; 4],
}

impl Default for BellConvention {
    fn default() -> Self {
        Self {
            map: BellIndex::ALL,
        }
    }
}

impl BellConvention {
    pub fn new(map: [BellIndex; 4]) -> Result<Self> {
        for (i, a) in map.iter().enumerate() {
            if map[..i].contains(a) {
                return Err(Error::Precondition(
                    "Bell relabeling must be a permutation".into(),
                ));
            }
        }
        Ok(Self { map })
    }

    /// All 24 relabelings, identity first.
    pub fn all() -> Vec<BellConvention> {
        let mut out = Vec::with_capacity(24);
        let base = BellIndex::ALL;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        if let Ok(conv) = Self::new([base[a], base[b], base[c], base[d]]) {
                            out.push(conv);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn resolve(&self, label: BellIndex) -> BellIndex {
        self.map[label as usize]
    }

    pub fn state(&self, label: BellIndex) -> StateVector {
        bell(self.resolve(label))
    }

    pub fn is_standard(&self) -> bool {
        self.map == BellIndex::ALL
    }
}

impl fmt::Display for BellConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = BellIndex::ALL
            .iter()
            .map(|l| format!("{}→{}", l, self.resolve(*l)))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// The eight GHZ states as a complete 3-qubit family.
pub fn ghz_family() -> Vec<StateVector> {
    GhzIndex::ALL.iter().map(|&i| ghz(i)).collect()
}

pub fn bell_family() -> Vec<StateVector> {
    BellIndex::ALL.iter().map(|&i| bell(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_listed_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let g0 = ghz(GhzIndex::new(0).unwrap());
        assert_eq!(g0.amp(0).re, h);
        assert_eq!(g0.amp(7).re, h);
        let g5 = ghz(GhzIndex::new(5).unwrap());
        assert_eq!(g5.amp(0b010).re, h);
        assert_eq!(g5.amp(0b101).re, -h);
        assert!(GhzIndex::new(8).is_err());
    }

    #[test]
    fn ghz_orthonormal() {
        let fam = ghz_family();
        for (i, a) in fam.iter().enumerate() {
            for (j, b) in fam.iter().enumerate() {
                let ip = a.inner(b).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip.re - want).abs() < 1e-15 && ip.im == 0.0);
            }
        }
    }

    #[test]
    fn bell_states() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = bell(BellIndex::PsiMinus);
        assert_eq!(m.amp(1).re, h);
        assert_eq!(m.amp(2).re, -h);
        let fam = bell_family();
        for (i, a) in fam.iter().enumerate() {
            for (j, b) in fam.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b).unwrap().re - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn conventions() {
        let all = BellConvention::all();
        assert_eq!(all.len(), 24);
        assert!(all[0].is_standard());
        assert!(BellConvention::new([BellIndex::PhiPlus; 4]).is_err());
        assert_eq!("Ψ_−".parse::<BellIndex>().unwrap(), BellIndex::PsiMinus);
    }
}
