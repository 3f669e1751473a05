//! Separation-modulus bounds, companion spaces and dimension sweeps.

pub mod bounds;
pub mod companion;
pub mod sweep;

pub use bounds::{
    evr_constant, evr_constant_limit, sep_lower_evr, sep_lower_evr_estimate, sep_upper_two_norm,
    sep_upper_two_norm_rotated, SepLower, SepUpper,
};
pub use companion::{companion_space, Companion, CompanionRule};
pub use sweep::{slopes, sweep, ExponentSpec, Family, Quantity, SweepConfig, SweepRecord};
