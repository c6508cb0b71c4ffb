//! Reader for the embedded `key = value` transcription files.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    /// 1-based line in the source file.
    pub line: usize,
}

impl Entry {
    /// Splits the value on `;` into trimmed fields.
    pub fn fields(&self) -> Vec<&str> {
        self.value.split(';').map(str::trim).collect()
    }
}

pub fn entries(text: &str) -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(Error::Parse {
            line: i + 1,
            msg: "expected `key = value`".into(),
        })?;
        let key = k.trim().to_string();
        if out.iter().any(|e| e.key == key) {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("duplicate key {key}"),
            });
        }
        out.push(Entry {
            key,
            value: v.trim().to_string(),
            line: i + 1,
        });
    }
    Ok(out)
}

pub fn lookup<'a>(entries: &'a [Entry], key: &str) -> Result<&'a Entry> {
    entries
        .iter()
        .find(|e| e.key == key)
        .ok_or_else(|| Error::Precondition(format!("no entry {key:?}")))
}
