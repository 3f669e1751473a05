//! Randomized ball partitions of finite-dimensional normed spaces, cone-measure Monte Carlo,
//! separation-modulus bounds and a partition-of-unity Lipschitz extension operator.
//!
//! Stochastic results are [`MonteCarloEstimate`]s and are reproducible from `(inputs, seed, trials)`
//! regardless of the number of worker threads.

pub mod cli;
pub mod error;
pub mod estimate;
pub mod extension;
pub mod geometry;
pub mod optimize;
pub mod partition;
pub mod rng;
pub mod sepmod;
pub mod space;
pub mod special;

pub use error::{Error, Result};
pub use estimate::MonteCarloEstimate;
pub use space::{Exponent, Kind, NormedSpace, SpaceDescriptor};
