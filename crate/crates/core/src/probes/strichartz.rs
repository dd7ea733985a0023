//! Linear Strichartz ratios `||e^{itD}u||_{L^p_{t,x}} / ||u||_2` for data on
//! a frequency shell, at the three exponents used by the local theory.

use std::time::Instant;

use rayon::prelude::*;

use super::bilinear::check_resolves;
use super::data::{random_annulus_data, AnnulusDataSpec};
use super::derive_seed;
use super::report::{fit_loglog, ProbeReport};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, SpectralField};
use crate::multipliers::free_propagate;
use crate::scalar::Real;

/// `(p, label, reference slope)`; the references are the X^{alpha(p)}
/// indices without their epsilon loss.
pub const EXPONENTS: [(f64, &str, f64); 3] = [
    (10.0 / 3.0, "10/3", 0.0),
    (30.0 / 7.0, "30/7", 1.0 / 3.0),
    (7.5, "15/2", 5.0 / 6.0),
];

pub const COLUMNS: [&str; 5] = ["n", "trial", "ratio_10_3", "ratio_30_7", "ratio_15_2"];

/// Phase advance of the fastest shell mode per time sample.
pub const PHASE_PER_SAMPLE: f64 = 0.4;

pub fn slope_name(label: &str) -> String {
    format!("strichartz_slope_p={label}")
}

/// `||e^{itD}u||_{L^p([0,T] x M)}` for each `p`, by the trapezoid rule with
/// `steps` intervals. Samples are streamed, not stored.
pub fn free_lp_norms<T: Real>(u: &SpectralField<T>, t_end: f64, steps: usize, ps: &[f64]) -> Result<Vec<f64>> {
    if steps == 0 || !(t_end > 0.0) {
        return Err(Error::InvalidParameter(format!("T = {t_end} with {steps} steps")));
    }
    let dt = t_end / steps as f64;
    let h = u.grid().cell_volume().as_f64();
    let mut acc = vec![0.0; ps.len()];
    for k in 0..=steps {
        let weight = if k == 0 || k == steps { 0.5 } else { 1.0 };
        let field = free_propagate(u, T::lit(k as f64 * dt)).to_spatial();
        for (a, &p) in acc.iter_mut().zip(ps) {
            let sum: f64 = field.values().iter().map(|v| v.norm().as_f64().powf(p)).sum();
            *a += weight * dt * h * sum;
        }
    }
    Ok(acc.iter().zip(ps).map(|(a, p)| a.powf(p.recip())).collect())
}

/// Number of time intervals on `[0, T]` for data at frequency `n`.
pub fn sample_count(n: f64, t_end: f64) -> usize {
    let dt = PHASE_PER_SAMPLE / (n * n);
    (t_end / dt).ceil().max(1.0) as usize
}

/// One row per `(N, trial)`; one log-log fit of the mean ratio against `N`
/// per exponent.
pub fn strichartz_probe<T: Real>(
    grid: &GridSpec<T>,
    n_list: &[f64],
    t_end: f64,
    trials: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let start = Instant::now();
    if n_list.is_empty() || trials == 0 {
        return Err(Error::InvalidParameter("empty sweep".into()));
    }
    for &n in n_list {
        check_resolves(grid, n)?;
    }
    let ps: Vec<f64> = EXPONENTS.iter().map(|e| e.0).collect();
    let tasks: Vec<(f64, usize)> = n_list
        .iter()
        .flat_map(|&n| (0..trials).map(move |k| (n, k)))
        .collect();
    let ratios: Vec<Vec<f64>> = tasks
        .par_iter()
        .map(|&(n, k)| {
            let u = random_annulus_data(grid, AnnulusDataSpec { n, seed: derive_seed(seed, &[n.to_bits(), k as u64]) })?;
            free_lp_norms(&u, t_end, sample_count(n, t_end), &ps)
        })
        .collect::<Result<_>>()?;

    let mut report = ProbeReport::new("strichartz", grid.to_string(), &COLUMNS);
    report.param("t", t_end).param("trials", trials as f64);
    for (_, label, reference) in EXPONENTS {
        report.param(&format!("reference_slope_p={label}"), reference);
    }
    report.seed = Some(seed);
    let mut means = vec![vec![0.0; n_list.len()]; ps.len()];
    for (row, (&(n, k), r)) in tasks.iter().zip(&ratios).enumerate() {
        report.push_row(vec![Some(n), Some(k as f64), Some(r[0]), Some(r[1]), Some(r[2])]);
        for (m, &v) in means.iter_mut().zip(r) {
            m[row / trials] += v / trials as f64;
        }
    }
    if n_list.len() >= 2 {
        for ((_, label, _), m) in EXPONENTS.iter().zip(&means) {
            report.fits.push(fit_loglog(&slope_name(label), n_list, m)?);
        }
    }
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn plane_wave_ratios_are_explicit() {
        let g: GridSpec<f64> = GridSpec::torus(&[2.0, 3.0, 4.0], &[8, 8, 8]).unwrap();
        let u = SpectralField::delta(&g, &[1, 2, -1], Complex::new(0.3, 0.4)).unwrap();
        let norm = u.l2_norm();
        let t = 0.7;
        let got = free_lp_norms(&u, t, 7, &ps()).unwrap();
        // |u| = norm / sqrt(vol) everywhere and for all t
        for (g_p, p) in got.iter().zip(ps()) {
            let want = norm * t.powf(1.0 / p) * g.volume().powf(1.0 / p - 0.5);
            assert!((g_p - want).abs() < 1e-13 * want, "p = {p}");
        }
    }

    fn ps() -> Vec<f64> {
        EXPONENTS.iter().map(|e| e.0).collect()
    }

    #[test]
    fn probe_shape_and_fits() {
        let g: GridSpec<f64> = GridSpec::torus(&[std::f64::consts::TAU; 3], &[16, 16, 16]).unwrap();
        let r = strichartz_probe(&g, &[2.0, 4.0], 0.2, 2, 3).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert_eq!(r.fits.len(), 3);
        for c in &COLUMNS[2..] {
            assert!(r.column(c).iter().all(|v| v.is_finite() && *v > 0.0));
        }
        assert!(matches!(
            strichartz_probe(&g, &[8.0], 0.2, 1, 3),
            Err(Error::UnderResolved { .. })
        ));
    }
}
