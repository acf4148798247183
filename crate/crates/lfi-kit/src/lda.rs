//! Two-class linear discriminant analysis, fit from scratch.
//!
//! Decision rule: class 1 iff wᵀx + b > 0, with w = (S_pooled + λI)⁻¹(μ₁ − μ₀)
//! and b placing the threshold at the midpoint of the projected class means
//! (equal priors, balanced classes). Exact zero scores resolve to class 0.

use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::num::Scalar;

/// Balanced two-class training set: class 0 rows stacked over class 1 rows.
#[derive(Debug, Clone)]
pub struct LabeledSet<F> {
    features: Vec<F>,
    labels: Vec<u8>,
    rows: usize,
    cols: usize,
}

impl<F: Scalar> LabeledSet<F> {
    /// Stack `class0` over `class1`; both must have the same shape.
    pub fn stacked(class0: &[Vec<F>], class1: &[Vec<F>]) -> Result<Self> {
        if class0.len() != class1.len() {
            return Err(Error::DimensionMismatch {
                context: "class sizes must balance",
                expected: class0.len(),
                got: class1.len(),
            });
        }
        if class0.is_empty() {
            return Err(Error::SampleTooSmall { n: 0, min: 2 });
        }
        let cols = class0[0].len();
        let mut features = Vec::with_capacity(2 * class0.len() * cols);
        let mut labels = Vec::with_capacity(2 * class0.len());
        for row in class0 {
            features.extend_from_slice(row);
            labels.push(0);
        }
        for row in class1 {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "feature width",
                    expected: cols,
                    got: row.len(),
                });
            }
            features.extend_from_slice(row);
            labels.push(1);
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        Ok(Self {
            features,
            labels,
            rows: 2 * class0.len(),
            cols,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.features[i * self.cols..(i + 1) * self.cols]
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }
}

/// Fitted LDA classifier.
#[derive(Debug, Clone)]
pub struct LdaModel<F> {
    pub weights: Vec<F>,
    pub intercept: F,
    pub lambda: F,
}

impl<F: Scalar> LdaModel<F> {
    pub fn score(&self, x: &[F]) -> F {
        let dot: F = self.weights.iter().zip(x).map(|(&w, &xi)| w * xi).sum();
        dot + self.intercept
    }

    /// Class 1 iff score > 0; ties go to class 0.
    pub fn predict(&self, x: &[F]) -> u8 {
        if self.score(x) > F::zero() {
            1
        } else {
            0
        }
    }
}

/// Default ridge term: 1e-6 · trace(S_pooled) / m.
pub fn default_lambda<F: Scalar>(pooled_trace: F, cols: usize) -> F {
    F::from_f64_lossy(1e-6) * pooled_trace / F::from_usize(cols).unwrap()
}

/// Fit two-class LDA. `lambda = None` applies the trace-scaled default ridge.
pub fn fit_lda<F: Scalar>(data: &LabeledSet<F>, lambda: Option<F>) -> Result<LdaModel<F>> {
    let m = data.cols();
    let per_class = data.rows() / 2;
    if per_class < 2 {
        return Err(Error::SampleTooSmall {
            n: per_class,
            min: 2,
        });
    }

    let mut mu = [vec![F::zero(); m], vec![F::zero(); m]];
    for i in 0..data.rows() {
        let c = data.label(i) as usize;
        for (acc, &x) in mu[c].iter_mut().zip(data.row(i)) {
            *acc = *acc + x;
        }
    }
    let count = F::from_usize(per_class).unwrap();
    for class_mean in mu.iter_mut() {
        for v in class_mean.iter_mut() {
            *v = *v / count;
        }
    }

    // pooled within-class covariance, row-major m×m; the per-class scatters
    // are accumulated separately and combined with one commutative addition
    // so a class swap reproduces the identical matrix bit for bit
    let mut scatter = [vec![F::zero(); m * m], vec![F::zero(); m * m]];
    for i in 0..data.rows() {
        let c = data.label(i) as usize;
        let row = data.row(i);
        for a in 0..m {
            let da = row[a] - mu[c][a];
            for b in 0..=a {
                let db = row[b] - mu[c][b];
                scatter[c][a * m + b] = scatter[c][a * m + b] + da * db;
            }
        }
    }
    let dof = F::from_usize(data.rows() - 2).unwrap();
    let mut pooled = vec![F::zero(); m * m];
    for a in 0..m {
        for b in 0..=a {
            let v = (scatter[0][a * m + b] + scatter[1][a * m + b]) / dof;
            pooled[a * m + b] = v;
            pooled[b * m + a] = v;
        }
    }

    let trace: F = (0..m).map(|a| pooled[a * m + a]).sum();
    let lambda = lambda.unwrap_or_else(|| default_lambda(trace, m));
    if lambda < F::zero() {
        return Err(Error::InvalidConfig("lambda must be nonnegative".into()));
    }
    let mut regularized = pooled;
    for a in 0..m {
        regularized[a * m + a] = regularized[a * m + a] + lambda;
    }

    let chol = match Cholesky::factor(&regularized, m) {
        Some(c) => c,
        None if lambda == F::zero() => return Err(Error::SingularCovariance),
        None => {
            return Err(Error::FactorizationFailed {
                max_jitter: lambda.to_f64_lossy(),
            })
        }
    };

    let mean_diff: Vec<F> = (0..m).map(|a| mu[1][a] - mu[0][a]).collect();
    if mean_diff.iter().all(|d| *d == F::zero()) {
        // identical class means: no discriminative direction exists
        return Err(Error::SingularCovariance);
    }
    let weights = chol.solve(&mean_diff);
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::NonFinite("LDA weights"));
    }

    // threshold at the midpoint of the projected class means
    let half = F::from_f64_lossy(0.5);
    let midpoint: F = weights
        .iter()
        .zip(0..m)
        .map(|(&w, a)| w * (mu[0][a] + mu[1][a]) * half)
        .sum();
    Ok(LdaModel {
        weights,
        intercept: -midpoint,
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::Scalar;
    use crate::seed::RngSeed;
    use crate::sim::{simulate_gaussian, ParameterPoint};

    fn gaussian_rows(theta: f64, n: usize, stream: u64) -> Vec<Vec<f64>> {
        let data = simulate_gaussian(
            &ParameterPoint::scalar(theta).unwrap(),
            n,
            RngSeed::new(101, stream),
        )
        .unwrap();
        data.values().iter().map(|&v| vec![v]).collect()
    }

    // Equal-variance LDA threshold sits at the midpoint of the class means.
    // Oracle: brute-force scan over thresholds maximizing training accuracy.
    #[test]
    fn threshold_matches_grid_oracle() {
        let class0 = gaussian_rows(0.0, 5000, 1);
        let class1 = gaussian_rows(6.0, 5000, 2);
        let set = LabeledSet::stacked(&class0, &class1).unwrap();
        let model = fit_lda(&set, None).unwrap();
        // decision boundary: w·x + b = 0  =>  x = -b/w
        let boundary = -model.intercept / model.weights[0];
        assert!((boundary - 3.0).abs() < 0.1, "boundary {boundary}");

        let mut best = (0usize, f64::NAN);
        let mut t = -1.0;
        while t <= 7.0 {
            let correct = class0.iter().filter(|r| r[0] <= t).count()
                + class1.iter().filter(|r| r[0] > t).count();
            if correct > best.0 {
                best = (correct, t);
            }
            t += 0.01;
        }
        assert!((boundary - best.1).abs() < 0.15, "oracle {} lda {boundary}", best.1);
    }

    #[test]
    fn weight_sign_follows_mean_difference() {
        let class0 = gaussian_rows(0.0, 2000, 3);
        let class1 = gaussian_rows(1.0, 2000, 4);
        let set = LabeledSet::stacked(&class0, &class1).unwrap();
        let model = fit_lda(&set, None).unwrap();
        assert!(model.weights[0] > 0.0);
    }

    #[test]
    fn identical_classes_fail_to_fit() {
        let rows = gaussian_rows(0.0, 100, 5);
        let set = LabeledSet::stacked(&rows, &rows).unwrap();
        assert!(fit_lda(&set, None).is_err());
    }

    #[test]
    fn singular_covariance_without_ridge_errors() {
        // constant feature: zero pooled covariance
        let class0 = vec![vec![1.0f64]; 10];
        let class1 = vec![vec![2.0f64]; 10];
        let set = LabeledSet::stacked(&class0, &class1).unwrap();
        let err = fit_lda(&set, Some(0.0)).unwrap_err();
        assert!(err.to_string().contains("lambda"), "{err}");
        // ridge rescues it
        assert!(fit_lda(&set, Some(1e-6)).is_ok());
    }

    #[test]
    fn tie_resolves_to_class_zero() {
        let model = LdaModel {
            weights: vec![1.0f64],
            intercept: -1.0,
            lambda: 0.0,
        };
        assert_eq!(model.predict(&[1.0]), 0);
        assert_eq!(model.predict(&[1.0 + 1e-9]), 1);
    }

    #[test]
    fn rejects_unbalanced_classes() {
        let class0 = gaussian_rows(0.0, 10, 6);
        let class1 = gaussian_rows(1.0, 12, 7);
        assert!(LabeledSet::stacked(&class0, &class1).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let class0: Vec<Vec<f32>> = (0..50).map(|i| vec![(i as f32) * 0.01]).collect();
        let class1: Vec<Vec<f32>> = (0..50).map(|i| vec![1.0 + (i as f32) * 0.01]).collect();
        let set = LabeledSet::stacked(&class0, &class1).unwrap();
        let model = fit_lda(&set, None).unwrap();
        assert!(model.weights[0].is_finite());
        let _ = <f32 as Scalar>::from_f64_lossy(0.5);
    }
}
