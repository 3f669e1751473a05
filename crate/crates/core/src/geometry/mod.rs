//! Volumes, cone-measure sampling, surface areas, the polar projection body norm ψ,
//! projections, cone volumes and mean width.

pub mod psi;
pub mod sampling;
pub mod surface;
pub mod volume;
pub mod width;

pub use psi::{
    cone_volume, hyperplane_projection_volume, max_cone_fraction, maxproj, psi, psi_closed_form, psi_mc,
    sharp_cone_bound, ConeVolume, DirectionalMax, PsiModel,
};
pub use sampling::{
    cone_expectation, cone_sample, hit_and_run_sample, uniform_ball_sample, BallSampler, ConeSample, ConeSampler,
    GradientSamples, HitAndRunResult, WeightedPoint,
};
pub use surface::{gradient_second_moment, iq, iq_closed_form, surface_ratio};
pub use volume::{orlicz_volume_asymptotic, volume_any, volume_exact, volume_mc};
pub use width::{cauchy_surface_identity_check, cube_ball_iq_scan, intersect_construction, mean_width_dual, CauchyCheck, IntersectReport};
