//! Scalar statistics helpers shared across modules.

use crate::num::Scalar;

pub fn mean<F: Scalar>(xs: &[F]) -> F {
    let n = F::from_usize(xs.len()).unwrap();
    xs.iter().copied().sum::<F>() / n
}

/// Unbiased sample variance.
pub fn variance<F: Scalar>(xs: &[F]) -> F {
    let m = mean(xs);
    let n = F::from_usize(xs.len() - 1).unwrap();
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<F>() / n
}

pub fn std_dev<F: Scalar>(xs: &[F]) -> F {
    variance(xs).sqrt()
}

/// Linear-interpolation quantile of an unsorted slice, q in [0, 1].
pub fn quantile<F: Scalar>(xs: &[F], q: f64) -> F {
    assert!(!xs.is_empty());
    let mut sorted: Vec<F> = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = F::from_f64_lossy(pos - lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Standard normal CDF via the Abramowitz–Stegun 7.1.26 erf approximation
/// (|error| < 1.5e-7, plenty for acceptance factors and oracle columns).
pub fn normal_cdf<F: Scalar>(x: F) -> F {
    let x = x.to_f64_lossy();
    F::from_f64_lossy(0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2)))
}

fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}
