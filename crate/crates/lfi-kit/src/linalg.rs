//! Small dense symmetric-positive-definite solves via Cholesky.
//!
//! The kernel matrices and pooled covariances in this crate top out around
//! a few dozen rows, so a plain `Vec`-backed factorization is all we need.

use crate::num::Scalar;

/// Lower-triangular Cholesky factor of an SPD matrix, row-major.
#[derive(Debug, Clone)]
pub struct Cholesky<F> {
    lower: Vec<F>,
    dim: usize,
}

impl<F: Scalar> Cholesky<F> {
    /// Factor `a` (row-major, `dim`×`dim`, symmetric). Returns `None` when a
    /// non-positive pivot shows up, i.e. the matrix is not numerically SPD.
    pub fn factor(a: &[F], dim: usize) -> Option<Self> {
        assert_eq!(a.len(), dim * dim);
        let mut l = vec![F::zero(); dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                let mut sum = a[i * dim + j];
                for k in 0..j {
                    sum = sum - l[i * dim + k] * l[j * dim + k];
                }
                if i == j {
                    if sum <= F::zero() || !sum.is_finite() {
                        return None;
                    }
                    l[i * dim + j] = sum.sqrt();
                } else {
                    l[i * dim + j] = sum / l[j * dim + j];
                }
            }
        }
        Some(Self { lower: l, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diag(&self) -> impl Iterator<Item = F> + '_ {
        (0..self.dim).map(move |i| self.lower[i * self.dim + i])
    }

    /// Solve L z = b (forward substitution).
    #[allow(clippy::needless_range_loop)]
    pub fn solve_lower(&self, b: &[F]) -> Vec<F> {
        let n = self.dim;
        let mut z = vec![F::zero(); n];
        for i in 0..n {
            let mut sum = b[i];
            for k in 0..i {
                sum = sum - self.lower[i * n + k] * z[k];
            }
            z[i] = sum / self.lower[i * n + i];
        }
        z
    }

    /// Solve Lᵀ x = z (back substitution).
    #[allow(clippy::needless_range_loop)]
    pub fn solve_upper(&self, z: &[F]) -> Vec<F> {
        let n = self.dim;
        let mut x = vec![F::zero(); n];
        for i in (0..n).rev() {
            let mut sum = z[i];
            for k in (i + 1)..n {
                sum = sum - self.lower[k * n + i] * x[k];
            }
            x[i] = sum / self.lower[i * n + i];
        }
        x
    }

    /// Solve (L Lᵀ) x = b.
    pub fn solve(&self, b: &[F]) -> Vec<F> {
        self.solve_upper(&self.solve_lower(b))
    }

    /// Reconstruct L Lᵀ (row-major); used by invariant checks.
    pub fn reconstruct(&self) -> Vec<F> {
        let n = self.dim;
        let mut a = vec![F::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut sum = F::zero();
                for k in 0..n {
                    sum = sum + self.lower[i * n + k] * self.lower[j * n + k];
                }
                a[i * n + j] = sum;
            }
        }
        a
    }
}
