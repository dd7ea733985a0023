//! The scaling symmetry `u -> u^lambda` of the cubic equation in three
//! dimensions, checked on matched lattices.

use crate::dynamics::{evolve_with, rescale, EvolutionConfig};
use crate::error::{Error, Result};
use crate::grid::SpectralField;
use crate::scalar::Real;

/// `||(u(t))^lambda - v(lambda^2 t)|| / ||u0||` where `v` solves with data
/// `u0^lambda` and steps `lambda^2 dt` on the rescaled lattice.
pub fn scaling_check<T: Real>(u0: &SpectralField<T>, lambda: T, t: T, dt: T, dealias: bool) -> Result<T> {
    if u0.grid().dimension() != 3 {
        return Err(Error::UnsupportedDimension(u0.grid().dimension()));
    }
    let norm = u0.l2_norm();
    if norm == T::zero() {
        return Err(Error::InvalidParameter("zero data".into()));
    }
    let steps = (t / dt).round().to_usize().ok_or_else(|| Error::InvalidParameter(format!("t = {t}")))?;
    let run = |f: &SpectralField<T>, step: T| {
        let cfg = EvolutionConfig::new(step, step * T::from_count(steps))
            .with_stride(steps.max(1))
            .with_dealias(dealias);
        evolve_with(f, &cfg, |_, _| Ok(()))
    };
    let l2 = lambda * lambda;
    let direct = rescale(&run(u0, dt)?, lambda)?;
    let scaled = run(&rescale(u0, lambda)?, l2 * dt)?;
    Ok(direct.sub(&scaled)?.l2_norm() / norm)
}
