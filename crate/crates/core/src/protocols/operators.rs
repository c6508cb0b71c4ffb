use serde::Serialize;

use super::{anchor, data};
use crate::linalg::C64;
use crate::operator::Letter;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorStatus {
    Match,
    /// Equal up to a global phase.
    PhaseOnly,
    Mismatch,
}

/// A printed local operator against the library matrix of the same name.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorCheck {
    pub name: String,
    pub anchor: String,
    pub printed: [[String; 2]; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<String>,
    pub status: OperatorStatus,
}

fn parse_entry(s: &str) -> Result<C64> {
    let bad = || Error::Parse {
        line: 0,
        msg: format!("bad matrix entry {s:?}"),
    };
    let (neg, body) = match s.strip_prefix(['-', '−']) {
        Some(b) => (true, b),
        None => (false, s),
    };
    let z = match body {
        "i" => C64::new(0.0, 1.0),
        _ => C64::new(body.parse::<f64>().map_err(|_| bad())?, 0.0),
    };
    Ok(if neg { -z } else { z })
}

fn fmt_phase(z: C64) -> String {
    match (z.re.round() as i32, z.im.round() as i32) {
        (1, 0) => "1".into(),
        (-1, 0) => "-1".into(),
        (0, 1) => "i".into(),
        (0, -1) => "-i".into(),
        _ => format!("{z}"),
    }
}

/// Each printed operator compared with the library, up to a global phase.
pub fn operator_table_report() -> Result<Vec<OperatorCheck>> {
    let mut out = Vec::new();
    for e in data("operators.txt")? {
        let letter: Letter = e.key.parse()?;
        let want = letter.matrix::<f64>();
        let rows: Vec<Vec<&str>> = e
            .value
            .split(';')
            .map(|r| r.split_whitespace().collect())
            .collect();
        if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
            return Err(Error::Parse {
                line: e.line,
                msg: format!("{} is not 2x2", e.key),
            });
        }
        let mut got = [[C64::new(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                got[r][c] = parse_entry(rows[r][c])?;
            }
        }
        // phase from the first nonzero library entry
        let mut phase = None;
        for r in 0..2 {
            for c in 0..2 {
                if phase.is_none() && want[r][c].norm() > 0.0 {
                    phase = Some(got[r][c] / want[r][c]);
                }
            }
        }
        let ph = phase.unwrap_or(C64::new(1.0, 0.0));
        let consistent = ph.norm() > 0.0
            && (0..2).all(|r| (0..2).all(|c| (got[r][c] - ph * want[r][c]).norm() < 1e-12));
        let status = match consistent {
            true if (ph - C64::new(1.0, 0.0)).norm() < 1e-12 => OperatorStatus::Match,
            true => OperatorStatus::PhaseOnly,
            false => OperatorStatus::Mismatch,
        };
        out.push(OperatorCheck {
            name: e.key.clone(),
            anchor: anchor("operators.txt", &e),
            printed: [
                [rows[0][0].to_string(), rows[0][1].to_string()],
                [rows[1][0].to_string(), rows[1][1].to_string()],
            ],
            phase: (status == OperatorStatus::PhaseOnly).then(|| fmt_phase(ph)),
            status,
        });
    }
    Ok(out)
}
