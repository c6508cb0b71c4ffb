//! Density matrices, partial traces and von Neumann entropy.

use num_complex::Complex;

use crate::config::Tolerances;
use crate::scalar::{czero, Real};
use crate::state::{check_targets, gather, StateVector};
use crate::{Error, Result};

/// Row-major `2^n x 2^n` complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    n_qubits: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(n_qubits: usize, data: Vec<Complex<T>>) -> Result<Self> {
        let d = 1usize << n_qubits;
        if data.len() != d * d {
            return Err(Error::Length {
                n_qubits: 2 * n_qubits,
                got: data.len(),
            });
        }
        Ok(Self { n_qubits, data })
    }

    /// `|psi><psi|`.
    pub fn pure(state: &StateVector<T>) -> Self {
        let a = state.amps();
        let d = a.len();
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                data.push(a[i] * a[j].conj());
            }
        }
        Self {
            n_qubits: state.n_qubits(),
            data,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim() + j]
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim()).fold(czero(), |acc, i| acc + self.get(i, i))
    }

    pub fn purity(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_defect(&self) -> T {
        let d = self.dim();
        let mut worst = T::zero();
        for i in 0..d {
            for j in i..d {
                let e = (self.get(i, j) - self.get(j, i).conj()).norm();
                if e > worst {
                    worst = e;
                }
            }
        }
        worst
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        let defect = self.hermiticity_defect();
        if defect > T::lit(1e-10) {
            return Err(Error::NotHermitian(defect.to_f64_lossy()));
        }
        Ok(hermitian_eigenvalues(&self.data, self.dim()))
    }

    /// Von Neumann entropy in bits; eigenvalues below the floor are dropped.
    pub fn entropy_bits(&self, tol: &Tolerances) -> Result<T> {
        let floor = T::lit(tol.eigenvalue_floor);
        let s = self
            .eigenvalues()?
            .into_iter()
            .filter(|&l| l >= floor)
            .map(|l| -l * l.log2())
            .sum::<T>();
        Ok(if s < T::zero() { T::zero() } else { s })
    }

    /// True when every eigenvalue is within `tol` of `1/dim`.
    pub fn is_maximally_mixed(&self, tol: f64) -> Result<bool> {
        let target = T::one() / T::lit(self.dim() as f64);
        Ok(self
            .eigenvalues()?
            .iter()
            .all(|&l| (l - target).abs() <= T::lit(tol)))
    }
}

/// Reduced density matrix on `keep` (in the listed order), tracing out the
/// rest.
pub fn reduced_density<T: Real>(
    state: &StateVector<T>,
    keep: &[usize],
) -> Result<DensityMatrix<T>> {
    let n = state.n_qubits();
    check_targets(keep, n)?;
    let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let dk = 1usize << keep.len();
    let dr = 1usize << rest.len();
    // psi as a dk x dr matrix, rho = M M^dagger
    let mut m = vec![czero::<T>(); dk * dr];
    for (i, a) in state.amps().iter().enumerate() {
        m[gather(i, keep, n) * dr + gather(i, &rest, n)] = *a;
    }
    let mut data = vec![czero::<T>(); dk * dk];
    for i in 0..dk {
        for j in i..dk {
            let v = (0..dr).fold(czero::<T>(), |acc, r| {
                acc + m[i * dr + r] * m[j * dr + r].conj()
            });
            data[i * dk + j] = v;
            data[j * dk + i] = v.conj();
        }
    }
    DensityMatrix::new(keep.len(), data)
}

/// Eigenvalues of a Hermitian matrix via the real symmetric embedding
/// `[[Re, -Im], [Im, Re]]`, which doubles each eigenvalue's multiplicity.
fn hermitian_eigenvalues<T: Real>(h: &[Complex<T>], d: usize) -> Vec<T> {
    let m = 2 * d;
    let mut a = vec![T::zero(); m * m];
    for i in 0..d {
        for j in 0..d {
            let z = h[i * d + j];
            a[i * m + j] = z.re;
            a[(i + d) * m + (j + d)] = z.re;
            a[i * m + (j + d)] = -z.im;
            a[(i + d) * m + j] = z.im;
        }
    }
    let mut ev = jacobi_symmetric(a, m);
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev.chunks(2).map(|p| (p[0] + p[1]) / T::lit(2.0)).collect()
}

/// Cyclic Jacobi rotation for a real symmetric matrix. Returns the diagonal.
fn jacobi_symmetric<T: Real>(mut a: Vec<T>, m: usize) -> Vec<T> {
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let off: T = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * m + j] * a[i * m + j])
            .sum();
        let diag: T = (0..m).map(|i| a[i * m + i] * a[i * m + i]).sum();
        if off <= eps * eps * (diag + off) || off == T::zero() {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..m).map(|i| a[i * m + i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = StateVector<f64>;

    fn ghz3() -> S {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![0.0; 8];
        v[0] = h;
        v[7] = h;
        S::from_real(3, &v).unwrap()
    }

    #[test]
    fn product_state_has_zero_entropy() {
        let s = S::from_bits("010").unwrap();
        let r = reduced_density(&s, &[0]).unwrap();
        assert!(r.entropy_bits(&Tolerances::default()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ghz_single_qubit_is_one_bit() {
        for q in 0..3 {
            let r = reduced_density(&ghz3(), &[q]).unwrap();
            let e = r.entropy_bits(&Tolerances::default()).unwrap();
            assert!((e - 1.0).abs() < 1e-12);
            assert!(r.is_maximally_mixed(1e-12).unwrap());
        }
    }

    #[test]
    fn complex_hermitian_eigenvalues() {
        // |+i> on one qubit: pure, eigenvalues {0, 1}
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = S::new(1, vec![Complex::new(h, 0.0), Complex::new(0.0, h)]).unwrap();
        let ev = DensityMatrix::pure(&s).eigenvalues().unwrap();
        assert!(ev[0].abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let z = Complex::new(0.0, 0.0);
        let o = Complex::new(1.0, 0.0);
        let m = DensityMatrix::<f64>::new(1, vec![o, o, z, z]).unwrap();
        assert!(matches!(
            m.entropy_bits(&Tolerances::default()),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn trace_is_one() {
        let s = S::random(4, 3).unwrap();
        let r = reduced_density(&s, &[3, 1]).unwrap();
        assert!((r.trace().re - 1.0).abs() < 1e-12);
        assert!(r.trace().im.abs() < 1e-15);
    }
}
