//! Leading eigenpairs of symmetric matrices and row normalization.

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Rows with Euclidean norm below this are treated as degenerate.
pub const DEGENERATE_ROW_NORM: f64 = 1e-12;

/// The `K` eigenpairs of largest magnitude, optionally with the
/// row-normalized eigenvector matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEmbedding {
    /// Signed eigenvalues ordered by decreasing magnitude.
    pub eigenvalues: Vec<f64>,
    /// `n x K` matrix of orthonormal eigenvectors, column `k` paired with `eigenvalues[k]`.
    pub u_hat: DMatrix<f64>,
    /// Row-normalized `u_hat`, present after [`SpectralEmbedding::row_normalized`].
    pub u_star: Option<DMatrix<f64>>,
    /// Rows whose norm fell below [`DEGENERATE_ROW_NORM`] during normalization.
    pub degenerate_rows: Vec<usize>,
}

impl SpectralEmbedding {
    pub fn n(&self) -> usize {
        self.u_hat.nrows()
    }

    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Fills `u_star` and `degenerate_rows` from `u_hat`.
    pub fn row_normalized(mut self) -> Self {
        let (u_star, degenerate) = row_normalize(&self.u_hat);
        self.u_star = Some(u_star);
        self.degenerate_rows = degenerate;
        self
    }
}

/// Orders eigenvalues by magnitude, positive before negative on ties, then by position.
fn magnitude_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        let (x, y) = (values[a], values[b]);
        y.abs()
            .partial_cmp(&x.abs())
            .unwrap_or(Ordering::Equal)
            .then_with(|| y.partial_cmp(&x).unwrap_or(Ordering::Equal))
            .then(a.cmp(&b))
    });
    idx
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn full_decomposition(m: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let n = m.nrows();
    let max_iter = 100 * n.max(10);
    SymmetricEigen::try_new(symmetrize(m), f64::EPSILON, max_iter)
        .ok_or(Error::ConvergenceFailure(max_iter))
}

/// The `k` eigenpairs of `m` with the largest `|lambda|`.
///
/// `m` is symmetrized as `(m + m') / 2` before decomposition. Each returned
/// eigenvector is signed so that its entry of largest absolute value is
/// positive, with ties resolved by the lowest row index.
pub fn leading_eigs(m: &DMatrix<f64>, k: usize) -> Result<SpectralEmbedding> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let eig = full_decomposition(m)?;
    let values = eig.eigenvalues.as_slice();
    let order = magnitude_order(values);

    let mut eigenvalues = Vec::with_capacity(k);
    let mut u_hat = DMatrix::zeros(n, k);
    for (col, &src) in order.iter().take(k).enumerate() {
        eigenvalues.push(values[src]);
        let v = eig.eigenvectors.column(src);
        let mut pivot = 0;
        for i in 1..n {
            if v[i].abs() > v[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        u_hat.column_mut(col).copy_from(&(v * sign));
    }
    Ok(SpectralEmbedding {
        eigenvalues,
        u_hat,
        u_star: None,
        degenerate_rows: Vec::new(),
    })
}

/// All eigenvalues of a symmetric matrix, ordered by decreasing magnitude.
pub fn eigenvalues_by_magnitude(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues need a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let values = symmetrize(m).symmetric_eigenvalues();
    let values = values.as_slice();
    Ok(magnitude_order(values).into_iter().map(|i| values[i]).collect())
}

/// Spectral norm of a symmetric matrix, the largest `|lambda|`.
pub fn symmetric_spectral_norm(m: &DMatrix<f64>) -> Result<f64> {
    Ok(eigenvalues_by_magnitude(m)?.first().map_or(0.0, |v| v.abs()))
}

/// Divides each row by its Euclidean norm.
///
/// Rows with norm below [`DEGENERATE_ROW_NORM`] become the constant vector
/// `1/sqrt(K)` and their indices are returned.
pub fn row_normalize(u: &DMatrix<f64>) -> (DMatrix<f64>, Vec<usize>) {
    let (n, k) = u.shape();
    let mut out = u.clone();
    let mut degenerate = Vec::new();
    let fallback = 1.0 / (k.max(1) as f64).sqrt();
    for i in 0..n {
        let norm = u.row(i).norm();
        if norm >= DEGENERATE_ROW_NORM {
            for j in 0..k {
                out[(i, j)] = u[(i, j)] / norm;
            }
        } else {
            for j in 0..k {
                out[(i, j)] = fallback;
            }
            degenerate.push(i);
        }
    }
    (out, degenerate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_magnitude_order() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -2.0, 1.0]));
        let e = leading_eigs(&m, 2).unwrap();
        assert!((e.eigenvalues[0] - 3.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] + 2.0).abs() < 1e-14);
        assert!((e.u_hat[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((e.u_hat[(1, 1)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_leading_pair() {
        let e = leading_eigs(&DMatrix::identity(5, 5), 1).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((e.u_hat.column(0).norm() - 1.0).abs() < 1e-12);
        let max = e.u_hat.column(0).iter().fold(0.0f64, |m, v| if v.abs() > m.abs() { *v } else { m });
        assert!(max > 0.0);
    }

    #[test]
    fn positive_wins_magnitude_tie() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-2.0, 1.0, 2.0]));
        let e = leading_eigs(&m, 2).unwrap();
        assert_eq!(e.eigenvalues, vec![2.0, -2.0]);
    }

    #[test]
    fn k_out_of_range() {
        let m = DMatrix::identity(3, 3);
        assert!(matches!(leading_eigs(&m, 0), Err(Error::KOutOfRange { .. })));
        assert!(matches!(leading_eigs(&m, 4), Err(Error::KOutOfRange { .. })));
    }

    #[test]
    fn three_four_five() {
        let (u, d) = row_normalize(&DMatrix::from_row_slice(1, 2, &[3.0, 4.0]));
        assert!((u[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((u[(0, 1)] - 0.8).abs() < 1e-15);
        assert!(d.is_empty());
    }

    #[test]
    fn zero_row_falls_back_to_uniform() {
        let mut u = DMatrix::from_element(3, 4, 1.0);
        u.row_mut(1).fill(0.0);
        let (out, d) = row_normalize(&u);
        assert_eq!(d, vec![1]);
        for j in 0..4 {
            assert_eq!(out[(1, j)], 0.5);
        }
    }

    #[test]
    fn spectral_norm_of_signed_diagonal() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -5.0, 2.0]));
        assert!((symmetric_spectral_norm(&m).unwrap() - 5.0).abs() < 1e-14);
    }
}
