//! Small dense helpers: the sinc kernel, real-matrix/complex-vector products,
//! and spectrally truncated solves.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::spectral::C64;

/// `sin(x)/x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `m · v` for a real matrix and complex vector.
pub(crate) fn mul_real(m: &DMatrix<f64>, v: &[C64]) -> Vec<C64> {
    debug_assert_eq!(m.ncols(), v.len());
    let mut out = vec![C64::new(0.0, 0.0); m.nrows()];
    for (j, &vj) in v.iter().enumerate() {
        if vj.re == 0.0 && vj.im == 0.0 {
            continue;
        }
        for (o, &a) in out.iter_mut().zip(m.column(j).iter()) {
            *o += vj * a;
        }
    }
    out
}

/// `mᵀ · v` for a real matrix and complex vector.
pub(crate) fn mul_real_transpose(m: &DMatrix<f64>, v: &[C64]) -> Vec<C64> {
    debug_assert_eq!(m.nrows(), v.len());
    m.column_iter()
        .map(|col| col.iter().zip(v).map(|(&a, &b)| b * a).sum())
        .collect()
}

/// Thin singular value decomposition `A = U diag(s) Vᵀ`, singular values
/// sorted in decreasing order.
#[derive(Debug, Clone)]
pub(crate) struct ThinSvd {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub v: DMatrix<f64>,
}

impl ThinSvd {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = a.shape();
        let svd = a.svd(true, true);
        let u = svd.u.ok_or_else(|| Error::Factorization("SVD did not return U".into()))?;
        let v_t = svd.v_t.ok_or_else(|| Error::Factorization("SVD did not return V".into()))?;
        let k = rows.min(cols);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let s = order.iter().map(|&i| svd.singular_values[i]).collect();
        let u = DMatrix::from_fn(rows, k, |r, c| u[(r, order[c])]);
        let v = DMatrix::from_fn(cols, k, |r, c| v_t[(order[c], r)]);
        Ok(Self { u, s, v })
    }

    /// Number of singular values with `s_i² > threshold`.
    pub fn rank_above(&self, threshold: f64) -> usize {
        self.s.iter().take_while(|&&s| s * s > threshold).count()
    }
}

/// Least-squares solution of `G k = b` for a symmetric positive
/// semidefinite `G`, dropping eigen-directions with eigenvalue `<= cutoff`.
///
/// Returns the solution and the number of dropped directions.
pub(crate) fn solve_psd_truncated(g: &DMatrix<f64>, b: &[f64], cutoff: f64) -> (Vec<f64>, usize) {
    let eig = SymmetricEigen::new(g.clone());
    let n = b.len();
    let mut k = vec![0.0; n];
    let mut dropped = 0;
    for (i, &mu) in eig.eigenvalues.iter().enumerate() {
        if mu <= cutoff {
            dropped += 1;
            continue;
        }
        let v = eig.eigenvectors.column(i);
        let coeff = v.iter().zip(b).map(|(a, b)| a * b).sum::<f64>() / mu;
        for (kj, &vj) in k.iter_mut().zip(v.iter()) {
            *kj += coeff * vj;
        }
    }
    (k, dropped)
}
