//! Likelihood-free inference toolkit.
//!
//! Two ingredients, both usable on their own:
//!
//! * a **classifier-based discrepancy**: how well a linear discriminant
//!   classifier can tell observed data from data simulated at parameter θ,
//!   estimated by stratified cross-validation. Chance level (0.5) means the
//!   simulator at θ is indistinguishable from the data source.
//! * a **GP-surrogate acquisition loop** that models the discrepancy as a
//!   function of θ and spends simulator calls where its minimum is likely to
//!   be, instead of rejection-sampling the prior.
//!
//! The crate ships a Gaussian mean-inference toy model, classic rejection
//! ABC for comparison, and a CLI harness (`lfi-kit`) that runs the standard
//! experiments and writes replayable CSV/JSON outputs.
//!
//! All numerics are generic over the [`num::Scalar`] floating-point type;
//! the `*64` aliases below pin the f64 instantiations the CLI uses.
//!
//! ```
//! use lfi_kit::{delta_theta, observed_data, GaussianMeanSimulator, ParameterPoint, RngSeed};
//!
//! let seed = RngSeed::root(7);
//! let sim = GaussianMeanSimulator::new(-10.0, 10.0, 50).unwrap();
//! let obs = observed_data::<f64>(50, seed.child(10)).unwrap();
//! let theta = ParameterPoint::scalar(1.5).unwrap();
//! let d = delta_theta(&theta, &sim, &obs, 50, 5, None, seed.child(1)).unwrap();
//! assert!((0.0..=1.0).contains(&d.value));
//! ```

pub mod abc;
pub mod bo;
pub mod discrepancy;
pub mod error;
pub mod gp;
pub mod harness;
pub mod lda;
pub mod linalg;
pub mod num;
pub mod seed;
pub mod sim;
pub mod stats;

pub use abc::{abc_rejection, AbcConfig, PriorSpec, SampleSet};
pub use bo::{acquire_next, approx_posterior, bolfi_run, AcquisitionConfig, BolfiConfig, BoTrace};
pub use discrepancy::{delta_theta, discriminability, DiscrepancyValue};
pub use error::{Error, Result};
pub use gp::{gp_fit, kernel, optimize_hyperparams, GpModel, KernelHyper, PosteriorStats};
pub use lda::{fit_lda, LabeledSet, LdaModel};
pub use num::Scalar;
pub use seed::RngSeed;
pub use sim::{
    observed_data, simulate_gaussian, DataSet, GaussianMeanSimulator, ParameterPoint, Simulator,
    SimulatorSpec,
};

/// f64 instantiations, the types the CLI harness works with.
pub type ParameterPoint64 = sim::ParameterPoint<f64>;
pub type DataSet64 = sim::DataSet<f64>;
pub type DiscrepancyValue64 = discrepancy::DiscrepancyValue<f64>;
pub type GpModel64 = gp::GpModel<f64>;
pub type KernelHyper64 = gp::KernelHyper<f64>;
pub type SampleSet64 = abc::SampleSet<f64>;
pub type BoTrace64 = bo::BoTrace<f64>;
