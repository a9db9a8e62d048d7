//! Dense symmetric eigensolves with a reproducible ordering and sign convention.
//!
//! The decomposition itself goes through LAPACK: nalgebra's QR iteration loses
//! several digits on matrices with degenerate eigenvalues, which circulant
//! chains always have.

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};

/// Eigenpairs sorted by ascending eigenvalue; eigenvectors are the columns of
/// `vectors`, each with its first non-negligible component nonnegative.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn symmetric_eigen(m: &DMatrix<f64>) -> Eigen {
    let n = m.nrows();
    if n == 0 {
        return Eigen { values: vec![], vectors: DMatrix::zeros(0, 0) };
    }
    let sym = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (m[(i, j)] + m[(j, i)]));
    let (eigenvalues, eigenvectors) = sym.eigh(UPLO::Lower).expect("symmetric eigensolve on a finite matrix");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
    let values = order.iter().map(|&i| eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = DVector::from_iterator(n, eigenvectors.column(src).iter().copied());
        fix_sign(&mut col);
        vectors.set_column(dst, &col);
    }
    Eigen { values, vectors }
}

/// Flip `v` so its first component above roundoff is nonnegative.
pub fn fix_sign(v: &mut DVector<f64>) {
    let scale = v.amax();
    if scale == 0.0 {
        return;
    }
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-10 * scale) {
        if *first < 0.0 {
            v.neg_mut();
        }
    }
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, &x| a.max(x.abs()))
}

/// Largest absolute deviation from symmetry.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}
