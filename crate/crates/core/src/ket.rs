//! A small ket-expression language for transcribing printed expansions.
//!
//! ```text
//! expr   := term*
//! term   := sign* scale? coeff? (factor+ | "(" expr ")")
//! sign   := "+" | "-" | "−" | "±" | "∓"
//! scale  := atom ("/" atom)?          atom := digits | "√" digits
//! coeff  := α β μ γ | a..h
//! factor := "|" body ("⟩" | ">")      body := bits | "GHZ" digit | Φ+ Φ- Ψ+ Ψ-
//! ```
//!
//! Adjacent factors are tensored. `±`/`∓` make the expression a template
//! with two branches; [`PmBranch`] picks one at evaluation time.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex;

use crate::channel::{ghz, BellConvention, BellIndex, GhzIndex};
use crate::state::format_bits;
use crate::{Error, Result, StateVector};

type C64 = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmBranch {
    Plus,
    Minus,
}

impl PmBranch {
    pub const BOTH: [PmBranch; 2] = [PmBranch::Plus, PmBranch::Minus];

    pub fn suffix(self) -> &'static str {
        match self {
            PmBranch::Plus => "+",
            PmBranch::Minus => "-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    Plus,
    Minus,
    PlusMinus,
    MinusPlus,
}

impl Sign {
    fn value(self, pm: PmBranch) -> f64 {
        match (self, pm) {
            (Sign::Plus, _)
            | (Sign::PlusMinus, PmBranch::Plus)
            | (Sign::MinusPlus, PmBranch::Minus) => 1.0,
            _ => -1.0,
        }
    }

    fn compose(self, other: Sign) -> Sign {
        use Sign::*;
        match (self, other) {
            (Plus, s) | (s, Plus) => s,
            (Minus, Minus) => Plus,
            (Minus, PlusMinus) | (PlusMinus, Minus) => MinusPlus,
            (Minus, MinusPlus) | (MinusPlus, Minus) => PlusMinus,
            // a doubled template sign is not something printed data uses
            _ => PlusMinus,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Factor {
    Bits(String),
    Ghz(GhzIndex),
    Bell(BellIndex),
}

impl Factor {
    fn qubits(&self) -> usize {
        match self {
            Factor::Bits(b) => b.len(),
            Factor::Ghz(_) => 3,
            Factor::Bell(_) => 2,
        }
    }

    fn amps(&self, bell: &BellConvention) -> Vec<C64> {
        match self {
            Factor::Bits(b) => {
                let idx = usize::from_str_radix(b, 2).expect("validated bits");
                let mut v = vec![C64::new(0.0, 0.0); 1 << b.len()];
                v[idx] = C64::new(1.0, 0.0);
                v
            }
            Factor::Ghz(g) => ghz(*g).into_amps(),
            Factor::Bell(l) => bell.state(*l).into_amps(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Body {
    Product(Vec<Factor>),
    Group(Vec<Term>),
}

#[derive(Debug, Clone, PartialEq)]
struct Term {
    sign: Sign,
    scale: f64,
    coeff: Option<String>,
    body: Body,
}

/// Parsed ket expression; keeps the source text for reports.
#[derive(Debug, Clone, PartialEq)]
pub struct KetExpr {
    source: String,
    terms: Vec<Term>,
    n_qubits: usize,
}

/// Evaluated expression: one vector per coefficient symbol (`""` for none).
#[derive(Debug, Clone, PartialEq)]
pub struct KetValue {
    pub n_qubits: usize,
    pub parts: BTreeMap<String, Vec<C64>>,
}

const COEFFS: [&str; 12] = ["α", "β", "μ", "γ", "a", "b", "c", "d", "e", "f", "g", "h"];

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: 0,
            msg: format!("{} at char {} of {:?}", msg.into(), self.pos, self.src),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn sum(&mut self, nested: bool) -> Result<Vec<Term>> {
        let mut terms = Vec::new();
        loop {
            match self.peek() {
                None if nested => return Err(self.err("unclosed group")),
                None => return Ok(terms),
                Some(')') if nested => {
                    self.pos += 1;
                    return Ok(terms);
                }
                Some(')') => return Err(self.err("unbalanced `)`")),
                _ => terms.push(self.term()?),
            }
        }
    }

    fn term(&mut self) -> Result<Term> {
        let mut sign = Sign::Plus;
        while let Some(c) = self.peek() {
            let s = match c {
                '+' => Sign::Plus,
                '-' | '−' => Sign::Minus,
                '±' => Sign::PlusMinus,
                '∓' => Sign::MinusPlus,
                _ => break,
            };
            self.pos += 1;
            sign = sign.compose(s);
        }
        let scale = self.scale()?;
        let coeff = self.coeff();
        let body = match self.peek() {
            Some('(') => {
                self.pos += 1;
                Body::Group(self.sum(true)?)
            }
            Some('|') => {
                let mut fs = Vec::new();
                while self.peek() == Some('|') {
                    fs.push(self.factor()?);
                }
                Body::Product(fs)
            }
            _ => return Err(self.err("expected `|` or `(`")),
        };
        Ok(Term {
            sign,
            scale,
            coeff,
            body,
        })
    }

    fn atom(&mut self) -> Result<Option<f64>> {
        let root = if self.peek() == Some('√') {
            self.pos += 1;
            true
        } else {
            false
        };
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return if root {
                Err(self.err("expected digits after `√`"))
            } else {
                Ok(None)
            };
        }
        let v: f64 = self.chars[start..self.pos]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|_| self.err("bad number"))?;
        Ok(Some(if root { v.sqrt() } else { v }))
    }

    fn scale(&mut self) -> Result<f64> {
        let Some(num) = self.atom()? else {
            return Ok(1.0);
        };
        if self.peek() == Some('/') {
            self.pos += 1;
            let den = self
                .atom()?
                .ok_or_else(|| self.err("expected denominator"))?;
            return Ok(num / den);
        }
        Ok(num)
    }

    fn coeff(&mut self) -> Option<String> {
        let c = self.peek()?;
        let s = c.to_string();
        if COEFFS.contains(&s.as_str()) {
            self.pos += 1;
            Some(s)
        } else {
            None
        }
    }

    fn factor(&mut self) -> Result<Factor> {
        self.bump(); // '|'
        let start = self.pos;
        while self.pos < self.chars.len() && !matches!(self.chars[self.pos], '⟩' | '>') {
            self.pos += 1;
        }
        if self.pos >= self.chars.len() {
            return Err(self.err("unterminated ket"));
        }
        let body: String = self.chars[start..self.pos]
            .iter()
            .filter(|c| !c.is_whitespace())
            .collect();
        self.pos += 1;
        if !body.is_empty() && body.chars().all(|c| c == '0' || c == '1') {
            return Ok(Factor::Bits(body));
        }
        if let Some(d) = body.strip_prefix("GHZ") {
            let i: u8 = d
                .parse()
                .map_err(|_| self.err(format!("bad GHZ index {d:?}")))?;
            return Ok(Factor::Ghz(GhzIndex::new(i)?));
        }
        body.parse::<BellIndex>()
            .map(Factor::Bell)
            .map_err(|_| self.err(format!("unknown ket {body:?}")))
    }
}

fn term_qubits(t: &Term) -> Result<usize> {
    match &t.body {
        Body::Product(fs) => Ok(fs.iter().map(Factor::qubits).sum()),
        Body::Group(ts) => group_qubits(ts),
    }
}

fn group_qubits(ts: &[Term]) -> Result<usize> {
    let mut n = None;
    for t in ts {
        let k = term_qubits(t)?;
        match n {
            None => n = Some(k),
            Some(m) if m != k => {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("mixed term widths {m} and {k}"),
                })
            }
            _ => {}
        }
    }
    n.ok_or(Error::Parse {
        line: 0,
        msg: "empty expression".into(),
    })
}

fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

impl KetExpr {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser {
            chars: src.chars().collect(),
            pos: 0,
            src,
        };
        let terms = p.sum(false)?;
        let n_qubits = group_qubits(&terms)?;
        Ok(Self {
            source: src.trim().to_string(),
            terms,
            n_qubits,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// True when the expression contains `±` or `∓`.
    pub fn has_pm(&self) -> bool {
        fn walk(ts: &[Term]) -> bool {
            ts.iter().any(|t| {
                matches!(t.sign, Sign::PlusMinus | Sign::MinusPlus)
                    || matches!(&t.body, Body::Group(g) if walk(g))
            })
        }
        walk(&self.terms)
    }

    /// Number of printed product terms, counting inside groups.
    pub fn term_count(&self) -> usize {
        fn walk(ts: &[Term]) -> usize {
            ts.iter()
                .map(|t| match &t.body {
                    Body::Product(_) => 1,
                    Body::Group(g) => walk(g),
                })
                .sum()
        }
        walk(&self.terms)
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn walk(ts: &[Term], out: &mut BTreeSet<String>) {
            for t in ts {
                if let Some(c) = &t.coeff {
                    out.insert(c.clone());
                }
                if let Body::Group(g) = &t.body {
                    walk(g, out);
                }
            }
        }
        walk(&self.terms, &mut out);
        out
    }

    /// Computational kets that appear more than once for the same symbol
    /// among pure-bitstring terms, as `(symbol, bits)`.
    pub fn repeated_kets(&self) -> Vec<(String, String)> {
        let mut seen = BTreeMap::<(String, String), usize>::new();
        fn walk(ts: &[Term], outer: Option<&String>, seen: &mut BTreeMap<(String, String), usize>) {
            for t in ts {
                let sym = t.coeff.as_ref().or(outer);
                match &t.body {
                    Body::Product(fs) => {
                        if fs.iter().all(|f| matches!(f, Factor::Bits(_))) {
                            let bits: String = fs
                                .iter()
                                .map(|f| match f {
                                    Factor::Bits(b) => b.as_str(),
                                    _ => "",
                                })
                                .collect();
                            *seen
                                .entry((sym.cloned().unwrap_or_default(), bits))
                                .or_default() += 1;
                        }
                    }
                    Body::Group(g) => walk(g, sym, seen),
                }
            }
        }
        walk(&self.terms, None, &mut seen);
        seen.into_iter()
            .filter(|(_, n)| *n > 1)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn evaluate(&self, pm: PmBranch, bell: &BellConvention) -> Result<KetValue> {
        let mut parts = BTreeMap::new();
        let dim = 1usize << self.n_qubits;
        fn walk(
            ts: &[Term],
            factor: f64,
            outer: Option<&String>,
            pm: PmBranch,
            bell: &BellConvention,
            dim: usize,
            parts: &mut BTreeMap<String, Vec<C64>>,
        ) -> Result<()> {
            for t in ts {
                let f = factor * t.scale * t.sign.value(pm);
                let sym = match (t.coeff.as_ref(), outer) {
                    (Some(_), Some(_)) => {
                        return Err(Error::Parse {
                            line: 0,
                            msg: "nested coefficient symbols".into(),
                        })
                    }
                    (a, b) => a.or(b),
                };
                match &t.body {
                    Body::Group(g) => walk(g, f, sym, pm, bell, dim, parts)?,
                    Body::Product(fs) => {
                        let v = fs
                            .iter()
                            .fold(vec![C64::new(1.0, 0.0)], |acc, x| kron(&acc, &x.amps(bell)));
                        let slot = parts
                            .entry(sym.cloned().unwrap_or_default())
                            .or_insert_with(|| vec![C64::new(0.0, 0.0); dim]);
                        for (s, a) in slot.iter_mut().zip(v) {
                            *s += a * f;
                        }
                    }
                }
            }
            Ok(())
        }
        walk(&self.terms, 1.0, None, pm, bell, dim, &mut parts)?;
        Ok(KetValue {
            n_qubits: self.n_qubits,
            parts,
        })
    }

    /// Evaluates a symbol-free expression (taking the `+` branch of any
    /// template) with the standard Bell labels.
    pub fn plain(&self) -> Result<StateVector> {
        self.evaluate(PmBranch::Plus, &BellConvention::default())?
            .plain()
    }
}

impl fmt::Display for KetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl KetValue {
    pub fn symbols(&self) -> Vec<&str> {
        self.parts.keys().map(String::as_str).collect()
    }

    /// Vector multiplying `symbol` (zero vector if the symbol is absent).
    pub fn part(&self, symbol: &str) -> Result<StateVector> {
        let amps = self
            .parts
            .get(symbol)
            .cloned()
            .unwrap_or_else(|| vec![C64::new(0.0, 0.0); 1 << self.n_qubits]);
        StateVector::new(self.n_qubits, amps)
    }

    /// The whole value when it carries no coefficient symbols.
    pub fn plain(&self) -> Result<StateVector> {
        if self.parts.keys().any(|k| !k.is_empty()) {
            return Err(Error::Precondition(format!(
                "expression carries coefficient symbols {:?}",
                self.symbols()
            )));
        }
        self.part("")
    }
}

/// Formats a real vector as a signed ket sum such as `|00⟩-|11⟩`, for
/// vectors whose nonzero entries share one magnitude.
pub fn format_signed_kets(state: &StateVector, eps: f64) -> String {
    let mut out = String::new();
    for (bits, a) in state.support(eps) {
        let neg = a.re < 0.0;
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push(if neg { '-' } else { '+' });
        }
        out.push('|');
        out.push_str(&bits);
        out.push('⟩');
    }
    out
}

/// `|bits⟩` for a basis index.
pub fn ket(index: usize, n: usize) -> String {
    format!("|{}⟩", format_bits(index, n))
}
