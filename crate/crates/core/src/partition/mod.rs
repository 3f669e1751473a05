//! Randomized iterative ball partitions on a finite window, their exact and Monte Carlo
//! separation and padding probabilities, products, and discrete Loomis–Whitney checks.

pub mod lw;
pub mod probs;
pub mod sample;

pub use lw::{
    deterministic_partition_bound_check, directed_boundaries, exhaustive_grid_check, grid, loomis_whitney_boundary,
    random_subset, set_partitions, ExhaustiveResult, GridPoint, LwCheck, PartitionBoundCheck,
};
pub use probs::{
    combined_delta, overlap_fraction, padding_prob_exact, padding_prob_mc, product_partition, schmuckenschlager_bracket,
    separation_bracket, separation_from_overlap, separation_prob_exact, separation_prob_mc, separation_prob_mc_with,
    separation_profile, split_delta, Bracket, PaddingEstimate,
};
pub use sample::{sample_partition, sample_partition_with, Carver, PartitionSample, Proposal, Window};
