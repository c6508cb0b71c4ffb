//! Dense state vectors.
//!
//! Qubit 0 is the most significant bit of the basis index, so the ket
//! `|b0 b1 ... b(n-1)>` sits at index `b0*2^(n-1) + ... + b(n-1)`. Printed
//! kets therefore transcribe left to right without reordering.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{max_qubits, Tolerances};
use crate::operator::LocalOperatorWord;
use crate::scalar::{czero, Real};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
    label: Option<String>,
    placeholder: bool,
}

/// Outcome of projecting part of a state onto a probe.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection<T: Real> {
    pub probability: T,
    /// Normalized post-measurement state on the complement qubits, or a
    /// flagged placeholder when `probability` is below the zero threshold.
    pub residual: StateVector<T>,
}

impl<T: Real> Projection<T> {
    pub fn is_zero(&self) -> bool {
        self.residual.is_placeholder()
    }
}

#[inline]
pub(crate) fn bit(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

pub(crate) fn check_targets(targets: &[usize], n: usize) -> Result<()> {
    let err = |reason| Error::Targets {
        targets: targets.to_vec(),
        n_qubits: n,
        reason,
    };
    if targets.iter().any(|&t| t >= n) {
        return Err(err("out of range"));
    }
    for (i, t) in targets.iter().enumerate() {
        if targets[..i].contains(t) {
            return Err(err("duplicate target"));
        }
    }
    Ok(())
}

/// Gathers the bits of `index` at `qubits` into a compact integer, first
/// listed qubit most significant.
#[inline]
pub(crate) fn gather(index: usize, qubits: &[usize], n: usize) -> usize {
    qubits
        .iter()
        .fold(0usize, |acc, &q| (acc << 1) | bit(index, q, n))
}

impl<T: Real> StateVector<T> {
    pub fn new(n_qubits: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Precondition(
                "a state needs at least one qubit".into(),
            ));
        }
        let max = max_qubits();
        if n_qubits > max {
            return Err(Error::Capacity {
                requested: n_qubits,
                max,
            });
        }
        if amps.len() != 1usize << n_qubits {
            return Err(Error::Length {
                n_qubits,
                got: amps.len(),
            });
        }
        if let Some(i) = amps
            .iter()
            .position(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            n_qubits,
            amps,
            label: None,
            placeholder: false,
        })
    }

    pub fn from_real(n_qubits: usize, amps: &[f64]) -> Result<Self> {
        Self::new(
            n_qubits,
            amps.iter()
                .map(|&x| Complex::new(T::lit(x), T::zero()))
                .collect(),
        )
    }

    pub fn zeros(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, vec![czero(); 1usize << n_qubits])
    }

    /// Computational basis ket with the given index.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zeros(n_qubits)?;
        if index >= s.amps.len() {
            return Err(Error::Precondition(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        s.amps[index] = Complex::new(T::one(), T::zero());
        Ok(s)
    }

    /// Ket from a bitstring such as `"0101"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let idx = parse_bits(bits)?;
        Self::basis(bits.len(), idx)
    }

    /// 0-qubit scalar marker, used when a projection consumes every qubit.
    pub fn scalar(value: Complex<T>) -> Self {
        Self {
            n_qubits: 0,
            amps: vec![value],
            label: None,
            placeholder: false,
        }
    }

    fn placeholder_on(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            amps: vec![czero(); 1usize << n_qubits],
            label: None,
            placeholder: true,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> Complex<T> {
        self.amps[index]
    }

    pub fn into_amps(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// True for the flagged zero-probability placeholder.
    pub fn is_placeholder(&self) -> bool {
        self.placeholder
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - T::one()).abs() <= T::lit(tol)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= T::lit(1e-300) {
            return Err(Error::Precondition("cannot normalize a zero vector".into()));
        }
        Ok(self.scaled(Complex::new(T::one() / n, T::zero())))
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| *a * c).collect(),
            label: self.label.clone(),
            placeholder: self.placeholder,
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: Complex<T>, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| *a + c * *b)
                .collect(),
            label: self.label.clone(),
            placeholder: false,
        })
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension(self.n_qubits, other.n_qubits));
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.same_dim(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(czero(), |acc, (a, b)| acc + a.conj() * *b))
    }

    /// `|<a|b>|^2`; both inputs are expected to be normalized.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Largest per-amplitude distance.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.same_dim(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), |m, x| if x > m { x } else { m }))
    }

    /// Tensor product; `self`'s qubits come first.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.n_qubits + other.n_qubits;
        let max = max_qubits();
        if n > max {
            return Err(Error::Capacity { requested: n, max });
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(*a * *b);
            }
        }
        Ok(Self {
            n_qubits: n,
            amps,
            label: None,
            placeholder: false,
        })
    }

    /// Applies a 2x2 matrix to `target`, restricted to basis states whose
    /// `controls` qubits carry the given values.
    pub fn apply_single(
        &mut self,
        m: &[[Complex<T>; 2]; 2],
        target: usize,
        controls: &[(usize, bool)],
    ) -> Result<()> {
        let n = self.n_qubits;
        let mut all: Vec<usize> = controls.iter().map(|c| c.0).collect();
        all.push(target);
        check_targets(&all, n)?;
        let stride = 1usize << (n - 1 - target);
        for i in 0..self.amps.len() {
            if i & stride != 0 {
                continue;
            }
            if !controls.iter().all(|&(q, v)| (bit(i, q, n) == 1) == v) {
                continue;
            }
            let j = i | stride;
            let (a0, a1) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(())
    }

    /// Applies `word` to `targets` (one letter per target, in order).
    pub fn apply_word(&self, word: &LocalOperatorWord, targets: &[usize]) -> Result<Self> {
        if targets.len() != word.len() {
            return Err(Error::Targets {
                targets: targets.to_vec(),
                n_qubits: self.n_qubits,
                reason: "target count differs from word length",
            });
        }
        check_targets(targets, self.n_qubits)?;
        let mut out = self.clone();
        out.placeholder = false;
        for (letter, &t) in word.letters.iter().zip(targets) {
            out.apply_single(&letter.matrix::<T>(), t, &[])?;
        }
        let ph = word.phase.to_complex::<T>();
        for a in &mut out.amps {
            *a = *a * ph;
        }
        Ok(out)
    }

    /// Contracts `subset` against `<probe|` without normalizing.
    ///
    /// The result lives on the complement qubits in their original order;
    /// when the complement is empty it is a 0-qubit scalar marker.
    pub fn contract(&self, probe: &Self, subset: &[usize]) -> Result<Self> {
        let n = self.n_qubits;
        check_targets(subset, n)?;
        if probe.n_qubits != subset.len() {
            return Err(Error::Dimension(probe.n_qubits, subset.len()));
        }
        let rest: Vec<usize> = (0..n).filter(|q| !subset.contains(q)).collect();
        let mut out = vec![czero::<T>(); 1usize << rest.len()];
        for (i, a) in self.amps.iter().enumerate() {
            if a.re == T::zero() && a.im == T::zero() {
                continue;
            }
            let j = gather(i, subset, n);
            let c = gather(i, &rest, n);
            out[c] = out[c] + probe.amps[j].conj() * *a;
        }
        if rest.is_empty() {
            return Ok(Self::scalar(out[0]));
        }
        Ok(Self {
            n_qubits: rest.len(),
            amps: out,
            label: None,
            placeholder: false,
        })
    }

    /// Projects `subset` onto `probe` with default tolerances.
    pub fn project_subset(&self, probe: &Self, subset: &[usize]) -> Result<Projection<T>> {
        self.project_subset_with(probe, subset, &Tolerances::default())
    }

    pub fn project_subset_with(
        &self,
        probe: &Self,
        subset: &[usize],
        tol: &Tolerances,
    ) -> Result<Projection<T>> {
        if !probe.is_normalized(tol.orthonormality) {
            return Err(Error::NotNormalized(probe.norm_sqr().to_f64_lossy()));
        }
        let raw = self.contract(probe, subset)?;
        let probability = raw.norm_sqr();
        if probability < T::lit(tol.zero_probability) {
            let residual = if raw.n_qubits == 0 {
                let mut s = Self::scalar(czero());
                s.placeholder = true;
                s
            } else {
                Self::placeholder_on(raw.n_qubits)
            };
            return Ok(Projection {
                probability,
                residual,
            });
        }
        let scale = Complex::new(T::one() / probability.sqrt(), T::zero());
        Ok(Projection {
            probability,
            residual: raw.scaled(scale),
        })
    }

    /// Reorders qubits: qubit `k` of the result is qubit `order[k]` of `self`.
    pub fn reorder(&self, order: &[usize]) -> Result<Self> {
        let n = self.n_qubits;
        if order.len() != n {
            return Err(Error::Dimension(order.len(), n));
        }
        check_targets(order, n)?;
        let mut amps = vec![czero::<T>(); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            amps[gather(i, order, n)] = *a;
        }
        Ok(Self {
            n_qubits: n,
            amps,
            label: self.label.clone(),
            placeholder: self.placeholder,
        })
    }

    /// Seeded random pure state: i.i.d. standard-normal real and imaginary
    /// parts, then normalized. Identical seeds give bit-identical output.
    pub fn random(n_qubits: usize, seed: u64) -> Result<Self> {
        let max = max_qubits();
        if n_qubits == 0 || n_qubits > max {
            return Err(Error::Capacity {
                requested: n_qubits,
                max,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps: Vec<Complex<T>> = (0..1usize << n_qubits)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex::new(T::lit(re), T::lit(im))
            })
            .collect();
        Self::new(n_qubits, amps)?.normalized()
    }

    /// Nonzero amplitudes as `(bitstring, amplitude)` pairs.
    pub fn support(&self, eps: f64) -> Vec<(String, Complex<T>)> {
        let eps = T::lit(eps);
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > eps)
            .map(|(i, a)| (format_bits(i, self.n_qubits), *a))
            .collect()
    }
}

/// Free-function form of [`StateVector::tensor`].
pub fn tensor<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<StateVector<T>> {
    a.tensor(b)
}

/// Free-function form of [`StateVector::random`].
pub fn random_state<T: Real>(n_qubits: usize, seed: u64) -> Result<StateVector<T>> {
    StateVector::random(n_qubits, seed)
}

pub fn format_bits(index: usize, n: usize) -> String {
    (0..n)
        .map(|q| if bit(index, q, n) == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bits(bits: &str) -> Result<usize> {
    if bits.is_empty() || bits.len() > usize::BITS as usize - 1 {
        return Err(Error::Parse {
            line: 0,
            msg: format!("bad bitstring {bits:?}"),
        });
    }
    bits.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::Parse {
            line: 0,
            msg: format!("bad bitstring {bits:?}"),
        }),
    })
}
