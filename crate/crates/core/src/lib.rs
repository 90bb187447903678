//! Univariate statistical depth transforms, depth-induced total variation
//! divergences and Lipschitz-variational TVD estimators.

pub mod depth;
pub mod distributions;
pub mod divergence;
pub mod error;
pub mod experiments;
pub mod io;
pub mod laws;
pub mod lvtvd;
pub mod quadrature;

pub use depth::{DepthKind, DepthSample, KernelSpec, Reference};
pub use distributions::{ContinuousDistribution, SortedSample};
pub use divergence::{InducedDivergenceResult, QuadratureConfig};
pub use error::{Error, Result};
pub use experiments::{ExperimentConfig, ExperimentReport};
pub use laws::CrossDepthLaw;
