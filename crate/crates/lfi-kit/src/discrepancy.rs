//! Classifier-based discrepancy: the cross-validated accuracy of an LDA
//! classifier trained to tell observed from simulated data. Chance level
//! (0.5) means the two datasets are indistinguishable.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::lda::{fit_lda, LabeledSet};
use crate::num::Scalar;
use crate::seed::RngSeed;
use crate::sim::{DataSet, ParameterPoint, Simulator};

/// Cross-validated discriminability between two datasets, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyValue<F> {
    pub value: F,
    pub n_folds: usize,
    pub eval_seed: RngSeed,
}

/// Stratified fold assignment: a seeded permutation of each class's indices,
/// split into k nearly-equal chunks so every fold keeps the 50/50 balance.
/// One permutation shared by both classes keeps the assignment symmetric
/// under a class swap, which the label-swap invariant relies on.
fn stratified_folds(n: usize, n_folds: usize, seed: RngSeed) -> Vec<Vec<usize>> {
    let mut rng = seed.rng();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    let mut folds = vec![Vec::new(); n_folds];
    for (pos, &i) in idx.iter().enumerate() {
        folds[pos % n_folds].push(i);
    }
    folds
}

/// Mean held-out accuracy of LDA over stratified k-fold CV.
///
/// `lambda = None` uses the trace-scaled default ridge per fold. A fold whose
/// classes have exactly identical means (no discriminative direction) scores
/// chance level.
pub fn discriminability<F: Scalar>(
    obs: &DataSet<F>,
    sim: &DataSet<F>,
    n_folds: usize,
    lambda: Option<F>,
    seed: RngSeed,
) -> Result<DiscrepancyValue<F>> {
    if obs.cols() != sim.cols() {
        return Err(Error::DimensionMismatch {
            context: "observed vs simulated columns",
            expected: obs.cols(),
            got: sim.cols(),
        });
    }
    if obs.rows() != sim.rows() {
        return Err(Error::DimensionMismatch {
            context: "class balance (observed vs simulated rows)",
            expected: obs.rows(),
            got: sim.rows(),
        });
    }
    if n_folds < 2 {
        return Err(Error::InvalidConfig("n_folds must be at least 2".into()));
    }
    let n = obs.rows();
    if n < n_folds {
        return Err(Error::SampleTooSmall { n, min: n_folds });
    }

    let folds = stratified_folds(n, n_folds, seed);
    let half = F::from_f64_lossy(0.5);
    let mut fold_acc = Vec::with_capacity(n_folds);
    for f in 0..n_folds {
        let test = &folds[f];
        let train_obs: Vec<Vec<F>> = folds
            .iter()
            .enumerate()
            .filter(|(g, _)| *g != f)
            .flat_map(|(_, fold)| fold.iter().map(|&i| obs.row(i).to_vec()))
            .collect();
        let train_sim: Vec<Vec<F>> = folds
            .iter()
            .enumerate()
            .filter(|(g, _)| *g != f)
            .flat_map(|(_, fold)| fold.iter().map(|&i| sim.row(i).to_vec()))
            .collect();
        let set = LabeledSet::stacked(&train_obs, &train_sim)?;

        let acc = match fit_lda(&set, lambda) {
            Ok(model) => {
                let correct = test
                    .iter()
                    .filter(|&&i| model.predict(obs.row(i)) == 0)
                    .count()
                    + test
                        .iter()
                        .filter(|&&i| model.predict(sim.row(i)) == 1)
                        .count();
                F::from_usize(correct).unwrap() / F::from_usize(2 * test.len()).unwrap()
            }
            Err(Error::SingularCovariance) => half,
            Err(e) => return Err(e),
        };
        fold_acc.push(acc);
    }

    let value = fold_acc.iter().copied().sum::<F>() / F::from_usize(n_folds).unwrap();
    Ok(DiscrepancyValue {
        value,
        n_folds,
        eval_seed: seed,
    })
}

/// One stochastic realization of Δθ: simulate at θ with a stream derived from
/// `seed`, then measure discriminability against the fixed observed data.
pub fn delta_theta<F: Scalar, S: Simulator<F> + ?Sized>(
    theta: &ParameterPoint<F>,
    simulator: &S,
    obs: &DataSet<F>,
    n: usize,
    n_folds: usize,
    lambda: Option<F>,
    seed: RngSeed,
) -> Result<DiscrepancyValue<F>> {
    let sim_seed = seed.child(0);
    let cv_seed = seed.child(1);
    let simulated = simulator.simulate(theta, n, sim_seed)?;
    let mut d = discriminability(obs, &simulated, n_folds, lambda, cv_seed)?;
    d.eval_seed = seed;
    Ok(d)
}
