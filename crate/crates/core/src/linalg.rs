//! Dense complex linear algebra on `nalgebra`, pinned to `f64`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Right singular vectors of `m`, split by `sigma > tol`: `(row space,
/// nullspace)`, each as a list of orthonormal column vectors.
pub fn split_right_space(m: &CMatrix, tol: f64) -> (Vec<CVector>, Vec<CVector>) {
    let cols = m.ncols();
    // pad so the thin SVD returns all `cols` right vectors
    let padded = if m.nrows() < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let mut row = Vec::new();
    let mut null = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        let v: CVector = v_t.row(i).transpose().map(|z| z.conj());
        if *s > tol {
            row.push(v);
        } else {
            null.push(v);
        }
    }
    (row, null)
}

pub fn nullspace(m: &CMatrix, tol: f64) -> Vec<CVector> {
    split_right_space(m, tol).1
}

pub fn rank(m: &CMatrix, tol: f64) -> usize {
    m.singular_values().iter().filter(|s| **s > tol).count()
}

/// Modified Gram-Schmidt; vectors whose remainder falls below `tol` are
/// dropped.
pub fn gram_schmidt(vectors: &[CVector], tol: f64) -> Vec<CVector> {
    let mut out: Vec<CVector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for u in &out {
            let c = u.dotc(&w);
            w -= u * c;
        }
        let n = w.norm();
        if n > tol {
            out.push(w / C64::new(n, 0.0));
        }
    }
    out
}

/// Columns as a matrix.
pub fn from_columns(cols: &[CVector]) -> CMatrix {
    CMatrix::from_columns(cols)
}
