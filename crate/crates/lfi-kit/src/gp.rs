//! Gaussian-process regression over acquisition history: the surrogate model
//! of θ ↦ Δθ, with squared-exponential kernel, constant prior mean, and
//! homoscedastic observation noise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::num::Scalar;
use crate::sim::ParameterPoint;

/// Kernel hyperparameters plus the constant prior mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelHyper<F> {
    pub signal_variance: F,
    pub lengthscales: Vec<F>,
    pub noise_variance: F,
    pub prior_mean: F,
}

impl<F: Scalar> KernelHyper<F> {
    pub fn validate(&self) -> Result<()> {
        if self.signal_variance <= F::zero()
            || self.lengthscales.iter().any(|&l| l <= F::zero())
            || self.noise_variance < F::zero()
        {
            return Err(Error::InvalidConfig(
                "kernel hyperparameters must satisfy signal > 0, lengthscale > 0, noise >= 0"
                    .into(),
            ));
        }
        Ok(())
    }

    /// Pre-tuning defaults for a discrepancy surrogate over `bounds`:
    /// signal sd 0.05, lengthscale a tenth of the box width per coordinate,
    /// prior mean at chance level 0.5.
    pub fn defaults_for(bounds: &[(F, F)]) -> Self {
        let tenth = F::from_f64_lossy(0.1);
        Self {
            signal_variance: F::from_f64_lossy(0.05 * 0.05),
            lengthscales: bounds.iter().map(|&(lo, hi)| (hi - lo) * tenth).collect(),
            noise_variance: F::from_f64_lossy(0.05 * 0.05),
            prior_mean: F::from_f64_lossy(0.5),
        }
    }
}

/// Squared-exponential kernel: σf²·exp(−½·Σ (xᵢ−yᵢ)²/ℓᵢ²).
pub fn kernel<F: Scalar>(x: &ParameterPoint<F>, y: &ParameterPoint<F>, hyper: &KernelHyper<F>) -> F {
    assert_eq!(x.dim(), y.dim());
    assert_eq!(x.dim(), hyper.lengthscales.len());
    let half = F::from_f64_lossy(0.5);
    let mut quad = F::zero();
    for ((&xi, &yi), &l) in x.coords().iter().zip(y.coords()).zip(&hyper.lengthscales) {
        let d = (xi - yi) / l;
        quad = quad + d * d;
    }
    hyper.signal_variance * (-half * quad).exp()
}

/// Fitted GP: training pairs, hyperparameters, and the Cholesky factor of
/// K + σn²I. Immutable after fit; refit to add points.
#[derive(Debug, Clone)]
pub struct GpModel<F> {
    inputs: Vec<ParameterPoint<F>>,
    targets: Vec<F>,
    hyper: KernelHyper<F>,
    chol: Cholesky<F>,
    /// (K + σn²I)⁻¹ (targets − prior_mean)
    alpha: Vec<F>,
    /// extra diagonal term the jitter ladder had to add (0 when clean)
    jitter: F,
}

const JITTER_START: f64 = 1e-10;
const JITTER_MAX: f64 = 1e-4;

pub fn gp_fit<F: Scalar>(
    inputs: &[ParameterPoint<F>],
    targets: &[F],
    hyper: &KernelHyper<F>,
) -> Result<GpModel<F>> {
    hyper.validate()?;
    if inputs.is_empty() || inputs.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            context: "GP training pairs",
            expected: inputs.len().max(1),
            got: targets.len(),
        });
    }
    if targets.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("GP targets"));
    }
    let k = inputs.len();
    let mut gram = vec![F::zero(); k * k];
    for i in 0..k {
        for j in 0..=i {
            let v = kernel(&inputs[i], &inputs[j], hyper);
            gram[i * k + j] = v;
            gram[j * k + i] = v;
        }
    }
    for i in 0..k {
        gram[i * k + i] = gram[i * k + i] + hyper.noise_variance;
    }

    let mut jitter = 0.0f64;
    let chol = loop {
        let mut m = gram.clone();
        if jitter > 0.0 {
            let j = F::from_f64_lossy(jitter);
            for i in 0..k {
                m[i * k + i] = m[i * k + i] + j;
            }
        }
        match Cholesky::factor(&m, k) {
            Some(c) => break c,
            None => {
                jitter = if jitter == 0.0 {
                    JITTER_START
                } else {
                    jitter * 10.0
                };
                if jitter > JITTER_MAX {
                    return Err(Error::FactorizationFailed {
                        max_jitter: JITTER_MAX,
                    });
                }
            }
        }
    };

    let residual: Vec<F> = targets.iter().map(|&t| t - hyper.prior_mean).collect();
    let alpha = chol.solve(&residual);
    Ok(GpModel {
        inputs: inputs.to_vec(),
        targets: targets.to_vec(),
        hyper: hyper.clone(),
        chol,
        alpha,
        jitter: F::from_f64_lossy(jitter),
    })
}

/// Posterior mean and variance at one test point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorStats<F> {
    pub mean: F,
    pub variance: F,
}

impl<F: Scalar> GpModel<F> {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn inputs(&self) -> &[ParameterPoint<F>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[F] {
        &self.targets
    }

    pub fn hyper(&self) -> &KernelHyper<F> {
        &self.hyper
    }

    pub fn jitter(&self) -> F {
        self.jitter
    }

    pub fn predict(&self, theta: &ParameterPoint<F>) -> PosteriorStats<F> {
        let ks: Vec<F> = self
            .inputs
            .iter()
            .map(|x| kernel(theta, x, &self.hyper))
            .collect();
        let mean = self.hyper.prior_mean
            + ks.iter().zip(&self.alpha).map(|(&k, &a)| k * a).sum::<F>();
        let v = self.chol.solve_lower(&ks);
        let explained: F = v.iter().map(|&x| x * x).sum();
        let variance = (kernel(theta, theta, &self.hyper) - explained).max(F::zero());
        PosteriorStats { mean, variance }
    }

    /// log p(targets | inputs, hyper) = −½rᵀα − Σ log Lᵢᵢ − (K/2)·log 2π.
    pub fn log_marginal_likelihood(&self) -> F {
        let half = F::from_f64_lossy(0.5);
        let residual: Vec<F> = self
            .targets
            .iter()
            .map(|&t| t - self.hyper.prior_mean)
            .collect();
        let quad: F = residual.iter().zip(&self.alpha).map(|(&r, &a)| r * a).sum();
        let logdet: F = self.chol.diag().map(|d| d.ln()).sum();
        let tau = F::from_f64_lossy((2.0 * std::f64::consts::PI).ln());
        -half * quad - logdet - half * F::from_usize(self.len()).unwrap() * tau
    }
}

/// Log-scale search box for hyperparameter selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperSearchBounds<F> {
    pub signal_variance: (F, F),
    pub lengthscale: (F, F),
    pub noise_variance: (F, F),
}

impl<F: Scalar> HyperSearchBounds<F> {
    /// Defaults scaled to the parameter box: lengthscale between a hundredth
    /// and the full box width, variances spanning the discrepancy scale.
    pub fn defaults_for(bounds: &[(F, F)]) -> Self {
        let width = bounds
            .iter()
            .map(|&(lo, hi)| hi - lo)
            .fold(F::zero(), F::max);
        Self {
            signal_variance: (F::from_f64_lossy(1e-6), F::one()),
            lengthscale: (width * F::from_f64_lossy(0.01), width),
            noise_variance: (F::from_f64_lossy(1e-8), F::from_f64_lossy(0.25)),
        }
    }
}

const GRID_POINTS: usize = 7;
const REFINE_SWEEPS: usize = 4;
const REFINE_ROUNDS: usize = 45;

/// Maximize the evidence over (σf², ℓ, σn²) on a log-scale grid refined by
/// per-coordinate bracket shrinking. Deterministic. The prior mean is set to
/// the target mean. Below K = 3 the defaults are returned unchanged.
pub fn optimize_hyperparams<F: Scalar>(
    inputs: &[ParameterPoint<F>],
    targets: &[F],
    search: &HyperSearchBounds<F>,
    defaults: &KernelHyper<F>,
) -> KernelHyper<F> {
    if inputs.len() < 3 {
        return defaults.clone();
    }
    let dim = inputs[0].dim();
    let prior_mean =
        targets.iter().copied().sum::<F>() / F::from_usize(targets.len()).unwrap();

    let evidence = |params: &[f64; 3]| -> f64 {
        let hyper = KernelHyper {
            signal_variance: F::from_f64_lossy(params[0]),
            lengthscales: vec![F::from_f64_lossy(params[1]); dim],
            noise_variance: F::from_f64_lossy(params[2]),
            prior_mean,
        };
        match gp_fit(inputs, targets, &hyper) {
            Ok(model) => {
                let l = model.log_marginal_likelihood().to_f64_lossy();
                if l.is_finite() {
                    l
                } else {
                    f64::NEG_INFINITY
                }
            }
            Err(_) => f64::NEG_INFINITY,
        }
    };

    let boxes = [
        (
            search.signal_variance.0.to_f64_lossy(),
            search.signal_variance.1.to_f64_lossy(),
        ),
        (
            search.lengthscale.0.to_f64_lossy(),
            search.lengthscale.1.to_f64_lossy(),
        ),
        (
            search.noise_variance.0.to_f64_lossy(),
            search.noise_variance.1.to_f64_lossy(),
        ),
    ];

    // coarse log-scale grid
    let axis = |lo: f64, hi: f64, points: usize| -> Vec<f64> {
        let (llo, lhi) = (lo.ln(), hi.ln());
        (0..points)
            .map(|i| (llo + (lhi - llo) * i as f64 / (points - 1) as f64).exp())
            .collect()
    };
    let grids: Vec<Vec<f64>> = boxes.iter().map(|&(lo, hi)| axis(lo, hi, GRID_POINTS)).collect();
    let mut best = [grids[0][0], grids[1][0], grids[2][0]];
    let mut best_val = f64::NEG_INFINITY;
    for &s in &grids[0] {
        for &l in &grids[1] {
            for &n in &grids[2] {
                let v = evidence(&[s, l, n]);
                if v > best_val {
                    best_val = v;
                    best = [s, l, n];
                }
            }
        }
    }
    if best_val == f64::NEG_INFINITY {
        return defaults.clone();
    }

    // per-coordinate refinement: shrink a log-space bracket around the best
    // grid point until the bracket is negligible
    let coarse_step: Vec<f64> = boxes
        .iter()
        .map(|&(lo, hi)| (hi.ln() - lo.ln()) / (GRID_POINTS - 1) as f64)
        .collect();
    for _ in 0..REFINE_SWEEPS {
        for c in 0..3 {
            let (lo, hi) = boxes[c];
            let mut center = best[c].ln();
            let mut halfwidth = coarse_step[c];
            for _ in 0..REFINE_ROUNDS {
                let lo_b = (center - halfwidth).max(lo.ln());
                let hi_b = (center + halfwidth).min(hi.ln());
                let mut local_best = (center, best_val);
                for i in 0..=8 {
                    let cand = lo_b + (hi_b - lo_b) * i as f64 / 8.0;
                    let mut p = best;
                    p[c] = cand.exp();
                    let v = evidence(&p);
                    if v > local_best.1 {
                        local_best = (cand, v);
                    }
                }
                center = local_best.0;
                best_val = local_best.1;
                halfwidth *= 0.5;
            }
            best[c] = center.exp().clamp(lo, hi);
        }
    }

    KernelHyper {
        signal_variance: F::from_f64_lossy(best[0]),
        lengthscales: vec![F::from_f64_lossy(best[1]); dim],
        noise_variance: F::from_f64_lossy(best[2]),
        prior_mean,
    }
}
