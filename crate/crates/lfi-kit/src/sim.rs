//! Simulator contract and the Gaussian mean-inference toy model.
//!
//! A simulator is a pure function of (parameter, sample size, seed): equal
//! inputs produce bit-identical datasets, which is what makes every number
//! downstream replayable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::seed::RngSeed;

/// A point in the d-dimensional parameter space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterPoint<F> {
    coords: Vec<F>,
}

impl<F: Scalar> ParameterPoint<F> {
    pub fn new(coords: Vec<F>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("parameter coordinates"));
        }
        Ok(Self { coords })
    }

    /// Convenience constructor for the d=1 case.
    pub fn scalar(theta: F) -> Result<Self> {
        Self::new(vec![theta])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[F] {
        &self.coords
    }

    /// The single coordinate of a 1-d point.
    pub fn as_scalar(&self) -> F {
        assert_eq!(self.coords.len(), 1, "as_scalar on non-scalar point");
        self.coords[0]
    }
}

/// An n×m matrix of observed or simulated samples, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet<F> {
    values: Vec<F>,
    rows: usize,
    cols: usize,
}

impl<F: Scalar> DataSet<F> {
    pub fn from_rows(values: Vec<F>, rows: usize, cols: usize) -> Result<Self> {
        if rows < 2 {
            return Err(Error::SampleTooSmall { n: rows, min: 2 });
        }
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "dataset storage length",
                expected: rows * cols,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dataset entries"));
        }
        Ok(Self { values, rows, cols })
    }

    /// Single-column dataset from a vector of draws.
    pub fn column(values: Vec<F>) -> Result<Self> {
        let rows = values.len();
        Self::from_rows(values, rows, 1)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }
}

/// Dimension, search box, and default sample size for a simulator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulatorSpec<F> {
    pub dim: usize,
    pub bounds: Vec<(F, F)>,
    pub sample_size: usize,
}

impl<F: Scalar> SimulatorSpec<F> {
    // negated comparison is deliberate: it also rejects NaN bounds
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(bounds: Vec<(F, F)>, sample_size: usize) -> Result<Self> {
        if bounds.is_empty() || sample_size == 0 {
            return Err(Error::InvalidConfig(
                "simulator spec needs at least one bounded coordinate and a positive sample size"
                    .into(),
            ));
        }
        for &(lo, hi) in &bounds {
            if !(lo < hi) {
                return Err(Error::InvalidConfig(format!(
                    "bound [{lo}, {hi}] is not a proper interval"
                )));
            }
        }
        Ok(Self {
            dim: bounds.len(),
            bounds,
            sample_size,
        })
    }

    pub fn contains(&self, theta: &ParameterPoint<F>) -> bool {
        theta.dim() == self.dim
            && theta
                .coords()
                .iter()
                .zip(&self.bounds)
                .all(|(&c, &(lo, hi))| c >= lo && c <= hi)
    }
}

/// Forward model: parameters in, seeded dataset out.
pub trait Simulator<F: Scalar>: Sync {
    fn spec(&self) -> &SimulatorSpec<F>;

    fn simulate(&self, theta: &ParameterPoint<F>, n: usize, seed: RngSeed) -> Result<DataSet<F>>;
}

/// The toy model: n i.i.d. draws from Normal(mean = θ, variance = 1).
#[derive(Debug, Clone)]
pub struct GaussianMeanSimulator<F> {
    spec: SimulatorSpec<F>,
}

impl<F: Scalar> GaussianMeanSimulator<F> {
    pub fn new(lo: F, hi: F, sample_size: usize) -> Result<Self> {
        Ok(Self {
            spec: SimulatorSpec::new(vec![(lo, hi)], sample_size)?,
        })
    }
}

impl<F: Scalar> Simulator<F> for GaussianMeanSimulator<F> {
    fn spec(&self) -> &SimulatorSpec<F> {
        &self.spec
    }

    fn simulate(&self, theta: &ParameterPoint<F>, n: usize, seed: RngSeed) -> Result<DataSet<F>> {
        simulate_gaussian(theta, n, seed)
    }
}

/// n i.i.d. draws from Normal(mean = θ, variance = 1), fully seeded.
pub fn simulate_gaussian<F: Scalar>(
    theta: &ParameterPoint<F>,
    n: usize,
    seed: RngSeed,
) -> Result<DataSet<F>> {
    if theta.dim() != 1 {
        return Err(Error::DimensionMismatch {
            context: "gaussian simulator parameter",
            expected: 1,
            got: theta.dim(),
        });
    }
    if n < 2 {
        return Err(Error::SampleTooSmall { n, min: 2 });
    }
    let mu = theta.as_scalar();
    let mut rng = seed.rng();
    let values: Vec<F> = (0..n).map(|_| mu + F::sample_standard_normal(&mut rng)).collect();
    DataSet::column(values)
}

/// The fixed observed dataset: the toy model at the true mean θ⁰ = 0.
pub fn observed_data<F: Scalar>(n: usize, seed: RngSeed) -> Result<DataSet<F>> {
    simulate_gaussian(&ParameterPoint::scalar(F::zero())?, n, seed)
}
