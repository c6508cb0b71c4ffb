//! Majority-vote reconstruction of the seven-qubit channel from the
//! 64-state measurement listing.
//!
//! State `L_y` of block `L` (prefix `m(L)`, the letter's index as three bits)
//! should equal `|m(L)> ⊗ chi_y`, where the channel is `sum_y chi_y ⊗ |y>`.
//! Stripping the prefix from every printed ket therefore lets each block
//! propose the whole channel on its own; eight blocks vote.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex;
use serde::Serialize;

use crate::datafile::entries;
use crate::state::parse_bits;
use crate::{Error, Result, StateVector};

/// The embedded listing, byte-for-byte as transcribed.
pub const CHANNEL_FAMILY_DATA: &str = include_str!("../../data/channel_family.txt");

const BLOCKS: [char; 8] = ['A', 'B', 'C', 'D', 'E', 'F', 'G', 'H'];
const QUORUM: usize = 5;

/// Votes cast for one 7-bit channel ket (four channel bits then three
/// receiver bits).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockVote {
    pub ket: String,
    /// Sign proposed by each block, `0` where the block omits the ket.
    pub signs: [i8; 8],
    pub consensus: i8,
}

impl BlockVote {
    pub fn agreeing(&self) -> usize {
        self.signs.iter().filter(|&&s| s == self.consensus).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscrepancyKind {
    /// Printed ket's leading bits differ from the block prefix.
    PrefixViolation,
    /// Block disagrees with the majority sign.
    Sign,
    /// Block lists a ket the majority omits.
    Extra,
    /// Block omits a majority ket.
    Missing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    /// Printed state, e.g. `E010`.
    pub state: String,
    /// Line in [`CHANNEL_FAMILY_DATA`].
    pub line: usize,
    pub kind: DiscrepancyKind,
    pub expected: String,
    pub printed: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelReconstruction {
    pub channel: StateVector,
    pub block_votes: Vec<BlockVote>,
    pub discrepancies: Vec<Discrepancy>,
}

fn signed(sign: i8, bits: &str) -> String {
    format!("{}|{bits}⟩", if sign < 0 { '-' } else { '+' })
}

struct Proposal {
    state: String,
    line: usize,
    sign: i8,
    printed_bits: String,
}

/// Runs the vote over [`CHANNEL_FAMILY_DATA`].
pub fn reconstruct_channel() -> Result<ChannelReconstruction> {
    reconstruct_from(CHANNEL_FAMILY_DATA)
}

/// Runs the vote over a listing in the same format; exposed for tests that
/// feed corrupted copies.
pub fn reconstruct_from(text: &str) -> Result<ChannelReconstruction> {
    let rec = |m: String| Error::Reconstruction(m);
    let mut discrepancies = Vec::new();
    // (channel ket, block index) -> proposal
    let mut proposals: BTreeMap<String, [Option<Proposal>; 8]> = BTreeMap::new();

    for e in entries(text)? {
        let mut chars = e.key.chars();
        let letter = chars
            .next()
            .ok_or_else(|| rec(format!("empty key at line {}", e.line)))?;
        let block = BLOCKS
            .iter()
            .position(|&b| b == letter)
            .ok_or_else(|| rec(format!("unknown block {letter:?} at line {}", e.line)))?;
        let y: String = chars.collect();
        if y.len() != 3 || parse_bits(&y).is_err() {
            return Err(rec(format!("bad state key {:?} at line {}", e.key, e.line)));
        }
        let prefix = format!("{block:03b}");
        for (sign, bits) in
            signed_kets(&e.value).map_err(|m| rec(format!("line {}: {m}", e.line)))?
        {
            if bits.len() != 7 {
                return Err(rec(format!("line {}: ket {bits} is not 7 bits", e.line)));
            }
            if bits[..3] != prefix {
                discrepancies.push(Discrepancy {
                    state: e.key.clone(),
                    line: e.line,
                    kind: DiscrepancyKind::PrefixViolation,
                    expected: signed(sign, &format!("{prefix}{}", &bits[3..])),
                    printed: signed(sign, &bits),
                });
            }
            let ket = format!("{}{y}", &bits[3..]);
            let slot = &mut proposals.entry(ket.clone()).or_default()[block];
            if slot.is_some() {
                return Err(rec(format!(
                    "line {}: block {letter} lists {ket} twice",
                    e.line
                )));
            }
            *slot = Some(Proposal {
                state: e.key.clone(),
                line: e.line,
                sign,
                printed_bits: bits,
            });
        }
    }

    let mut votes = Vec::new();
    let mut amps = vec![Complex::new(0.0, 0.0); 128];
    for (ket, props) in &proposals {
        let mut signs = [0i8; 8];
        for (b, p) in props.iter().enumerate() {
            if let Some(p) = p {
                signs[b] = p.sign;
            }
        }
        let plus = signs.iter().filter(|&&s| s > 0).count();
        let minus = signs.iter().filter(|&&s| s < 0).count();
        let absent = 8 - plus - minus;
        let consensus = if plus >= QUORUM {
            1
        } else if minus >= QUORUM {
            -1
        } else if absent >= QUORUM {
            0
        } else {
            return Err(rec(format!(
                "no {QUORUM}-of-8 agreement on |{ket}⟩ (+{plus} -{minus} absent {absent})"
            )));
        };
        for (b, p) in props.iter().enumerate() {
            match p {
                Some(p) if consensus == 0 => discrepancies.push(Discrepancy {
                    state: p.state.clone(),
                    line: p.line,
                    kind: DiscrepancyKind::Extra,
                    expected: String::new(),
                    printed: signed(p.sign, &p.printed_bits),
                }),
                Some(p) if p.sign != consensus => discrepancies.push(Discrepancy {
                    state: p.state.clone(),
                    line: p.line,
                    kind: DiscrepancyKind::Sign,
                    expected: signed(consensus, &p.printed_bits),
                    printed: signed(p.sign, &p.printed_bits),
                }),
                None if consensus != 0 => discrepancies.push(Discrepancy {
                    state: format!("{}{}", BLOCKS[b], &ket[4..]),
                    line: 0,
                    kind: DiscrepancyKind::Missing,
                    expected: signed(consensus, &format!("{b:03b}{}", &ket[..4])),
                    printed: String::new(),
                }),
                _ => {}
            }
        }
        if consensus != 0 {
            amps[parse_bits(ket)?] = Complex::new(f64::from(consensus), 0.0);
        }
        votes.push(BlockVote {
            ket: ket.clone(),
            signs,
            consensus,
        });
    }

    let support = amps.iter().filter(|a| a.re != 0.0).count();
    if support != 32 {
        return Err(rec(format!(
            "majority channel has {support} kets, expected 32"
        )));
    }
    let scale = Complex::new(1.0 / 32f64.sqrt(), 0.0);
    let channel = StateVector::new(7, amps)?.scaled(scale).with_label("Γ7");
    discrepancies.sort_by(|a, b| (a.line, &a.printed).cmp(&(b.line, &b.printed)));
    Ok(ChannelReconstruction {
        channel,
        block_votes: votes,
        discrepancies,
    })
}

/// `±|bits⟩` terms of a listing line.
fn signed_kets(value: &str) -> std::result::Result<Vec<(i8, String)>, String> {
    let mut out = Vec::new();
    let mut sign = 1i8;
    let mut rest = value.trim();
    while !rest.is_empty() {
        let c = rest.chars().next().unwrap_or(' ');
        match c {
            '+' => rest = rest[1..].trim_start(),
            '-' => {
                sign = -sign;
                rest = rest[1..].trim_start();
            }
            '|' => {
                let end = rest.find('⟩').ok_or("unterminated ket")?;
                out.push((sign, rest[1..end].to_string()));
                sign = 1;
                rest = rest[end + '⟩'.len_utf8()..].trim_start();
            }
            _ => return Err(format!("unexpected {c:?}")),
        }
    }
    Ok(out)
}

/// The reconstructed channel, computed once.
pub fn xwz_channel() -> Result<StateVector> {
    static CHANNEL: OnceLock<Result<StateVector>> = OnceLock::new();
    CHANNEL
        .get_or_init(|| reconstruct_channel().map(|r| r.channel))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirty_two_equal_kets() {
        let r = reconstruct_channel().unwrap();
        let h = 1.0 / 32f64.sqrt();
        let nz: Vec<_> = r.channel.amps().iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(nz.len(), 32);
        assert!(nz.iter().all(|a| (a.norm() - h).abs() < 1e-12));
        assert!((r.channel.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn first_line_gives_block_a_kets() {
        let r = reconstruct_channel().unwrap();
        let h = 1.0 / 32f64.sqrt();
        // A000 stripped: |0000>|000> + |0101>|000> - |1011>|000> + |1110>|000>
        for (bits, s) in [
            ("0000000", 1.0),
            ("0101000", 1.0),
            ("1011000", -1.0),
            ("1110000", 1.0),
        ] {
            assert_eq!(r.channel.amp(parse_bits(bits).unwrap()).re, s * h);
        }
    }

    #[test]
    fn blocks_a_and_b_agree_on_first_ket() {
        let r = reconstruct_channel().unwrap();
        let v = r.block_votes.iter().find(|v| v.ket == "0000000").unwrap();
        assert_eq!(v.signs[0], 1);
        assert_eq!(v.signs[1], 1);
    }

    #[test]
    fn printed_prefix_violations_found() {
        let r = reconstruct_channel().unwrap();
        let got: Vec<(&str, &str)> = r
            .discrepancies
            .iter()
            .map(|d| (d.state.as_str(), d.printed.as_str()))
            .collect();
        assert_eq!(
            got,
            vec![
                ("E010", "+|0001001⟩"),
                ("E010", "+|0001100⟩"),
                ("G111", "-|0000110⟩"),
                ("G111", "-|0001000⟩"),
            ]
        );
        assert!(r
            .discrepancies
            .iter()
            .all(|d| d.kind == DiscrepancyKind::PrefixViolation));
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            reconstruct_channel().unwrap(),
            reconstruct_channel().unwrap()
        );
        assert_eq!(
            xwz_channel().unwrap(),
            reconstruct_channel().unwrap().channel
        );
    }

    #[test]
    fn single_sign_typo_is_outvoted() {
        let text = CHANNEL_FAMILY_DATA.replacen("B000 = |0010000⟩ +", "B000 = -|0010000⟩ +", 1);
        let r = reconstruct_from(&text).unwrap();
        assert_eq!(r.channel, reconstruct_channel().unwrap().channel);
        assert!(r
            .discrepancies
            .iter()
            .any(|d| d.kind == DiscrepancyKind::Sign && d.state == "B000"));
    }

    #[test]
    fn four_way_split_fails_loudly() {
        let mut text = CHANNEL_FAMILY_DATA.to_string();
        for b in ['A', 'B', 'C', 'D'] {
            let pre = format!("{b}000 = |{:03b}0000⟩", b as u8 - b'A');
            text = text.replacen(&pre, &format!("{b}000 = -|{:03b}0000⟩", b as u8 - b'A'), 1);
        }
        assert!(matches!(
            reconstruct_from(&text),
            Err(Error::Reconstruction(_))
        ));
    }
}
