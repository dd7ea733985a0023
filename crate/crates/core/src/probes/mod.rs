//! Experiments that measure the quantities appearing in the estimates.

pub mod bilinear;
pub mod bounds;
pub mod data;
pub mod drift;
pub mod growth;
pub mod report;
pub mod scaling;
pub mod schedule;
pub mod strichartz;

pub use bilinear::{bilinear_norm, bilinear_probe, bilinear_sweep};
pub use bounds::bilinear_bound;
pub use data::{random_annulus_data, AnnulusDataSpec, SmoothData};
pub use drift::{almost_conservation_experiment, dmod_drift_experiment, DriftConfig};
pub use growth::sobolev_growth_experiment;
pub use report::{fit_loglog, BoundComparison, Fit, ProbeReport};
pub use scaling::scaling_check;
pub use schedule::{imethod_schedule, Schedule};
pub use strichartz::strichartz_probe;

/// Mixes a base seed with task coordinates (splitmix64 finaliser), so
/// every task draws from its own reproducible stream.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    let mix = |mut z: u64| {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    parts.iter().fold(mix(seed), |acc, &p| mix(acc ^ p))
}
