//! `H^2` growth against the envelope `A + (1 + t)^(1 + delta)`.

use std::time::Instant;

use super::report::{fit_loglog, ProbeReport, Value};
use crate::dynamics::{evolve_with, EvolutionConfig};
use crate::error::{Error, Result};
use crate::functionals::{energy, mass, sobolev_norm};
use crate::grid::SpectralField;
use crate::scalar::Real;

pub const COLUMNS: [&str; 6] = ["t", "h1", "h2", "envelope_ratio", "mass", "energy"];

pub const GROWTH_FIT: &str = "h2_growth";

/// `A + (1 + t)^(1 + delta)`.
pub fn envelope(a: f64, t: f64, delta: f64) -> f64 {
    a + (1.0 + t).powf(1.0 + delta)
}

/// Evolves `u0` over `[0, T]` and tabulates `R(t) = ||u(t)||_{H^2} / envelope`
/// with `A = ||u0||_{H^2}`.
///
/// Reports `sup_ratio`, the time it is attained, whether that time lies in
/// the first half of the run, and the slope of `ln ||u||_{H^2}` against
/// `ln(1 + t)`.
pub fn sobolev_growth_experiment<T: Real>(
    u0: &SpectralField<T>,
    cfg: &EvolutionConfig<T>,
    delta: f64,
) -> Result<ProbeReport> {
    let start = Instant::now();
    if u0.grid().dimension() != 3 {
        return Err(Error::UnsupportedDimension(u0.grid().dimension()));
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta}")));
    }
    let a = sobolev_norm(u0, T::lit(2.0)).as_f64();
    let mut report = ProbeReport::new("growth", u0.grid().to_string(), &COLUMNS);
    evolve_with(u0, cfg, |t, f| {
        let t = t.as_f64();
        let h2 = sobolev_norm(f, T::lit(2.0)).as_f64();
        report.push_row(vec![
            Some(t),
            Some(sobolev_norm(f, T::one()).as_f64()),
            Some(h2),
            Some(h2 / envelope(a, t, delta)),
            Some(mass(f).as_f64()),
            Some(energy(f).as_f64()),
        ]);
        Ok(())
    })?;

    let times = report.column("t");
    let ratios = report.column("envelope_ratio");
    let (k, sup) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, r)| if r > best.1 { (k, r) } else { best });
    let t_end = times[times.len() - 1];
    let shifted: Vec<f64> = times.iter().map(|t| 1.0 + t).collect();
    if shifted.len() >= 2 {
        report.fits.push(fit_loglog(GROWTH_FIT, &shifted, &report.column("h2"))?);
    }
    report
        .param("a", a)
        .param("delta", delta)
        .param("dt", cfg.dt.as_f64())
        .param("t_end", t_end)
        .param("dealias", Value::Text(if cfg.dealias { "on" } else { "off" }.into()))
        .param("sup_ratio", sup)
        .param("sup_time", times[k])
        .param("sup_early", Value::Text((times[k] <= 0.5 * t_end).to_string()));
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
