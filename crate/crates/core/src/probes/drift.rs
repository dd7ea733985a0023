//! Drift of modified energies along one nonlinear evolution.
//!
//! The multipliers only enter the diagnostics, so a single trajectory
//! serves every `N` (and every `s`): each recorded state is hit with
//! `I_{N,s}` or `D_N` and its energy compared with the value at `t = 0`.

use std::time::Instant;

use num_traits::Zero;

use super::report::{fit_loglog, Fit, ProbeReport};
use crate::dynamics::{evolve_with, EvolutionConfig};
use crate::error::{Error, Result};
use crate::functionals::{energy, modified_energy_d, modified_energy_i};
use crate::grid::SpectralField;
use crate::multipliers::{apply_d, project_band, project_leq};
use crate::scalar::Real;

pub const COLUMNS: [&str; 5] = ["n", "s", "t_loc", "dt", "drift_sup"];

/// Largest `N` relative to the per-axis lattice maximum.
pub const MAX_N_FRACTION: f64 = 0.25;

/// Exponent of the space-time norm in the surrogate sum.
pub const SURROGATE_EXPONENT: f64 = 10.0 / 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct DriftConfig {
    pub n_list: Vec<f64>,
    pub t_loc: f64,
    pub dt: f64,
    pub record_stride: usize,
    pub dealias: bool,
}

impl DriftConfig {
    fn validate<T: Real>(&self, u0: &SpectralField<T>) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::InvalidParameter("empty N list".into()));
        }
        if self.n_list.iter().any(|&n| !(n >= 1.0)) {
            return Err(Error::InvalidParameter("every N must be at least 1".into()));
        }
        let dyadic = self
            .n_list
            .windows(2)
            .all(|w| (w[1] / w[0] - 2.0).abs() < 1e-12);
        if !dyadic {
            return Err(Error::InvalidParameter(format!("N list {:?} is not dyadic", self.n_list)));
        }
        let largest = self.n_list[self.n_list.len() - 1];
        let available = u0.grid().min_nyquist().as_f64();
        if largest > MAX_N_FRACTION * available {
            return Err(Error::UnderResolved { required: largest / MAX_N_FRACTION, available });
        }
        Ok(())
    }

    fn evolution<T: Real>(&self) -> EvolutionConfig<T> {
        EvolutionConfig::new(T::lit(self.dt), T::lit(self.t_loc))
            .with_stride(self.record_stride)
            .with_dealias(self.dealias)
    }
}

/// Runs `u0` once and returns `sup_t |F_k(u(t)) - F_k(u(0))|` for every
/// functional `F_k`, plus the plain energy drift.
fn sup_drifts<T: Real>(
    u0: &SpectralField<T>,
    cfg: &DriftConfig,
    functionals: &[&(dyn Fn(&SpectralField<T>) -> Result<T> + Sync)],
) -> Result<(Vec<f64>, f64)> {
    let mut initial: Option<(Vec<T>, T)> = None;
    let mut sup = vec![0.0f64; functionals.len()];
    let mut energy_sup = 0.0f64;
    evolve_with(u0, &cfg.evolution(), |_, f| {
        let values: Vec<T> = functionals.iter().map(|g| g(f)).collect::<Result<_>>()?;
        let e = energy(f);
        match &initial {
            None => initial = Some((values, e)),
            Some((v0, e0)) => {
                for ((s, v), v0) in sup.iter_mut().zip(&values).zip(v0) {
                    *s = s.max((*v - *v0).abs().as_f64());
                }
                energy_sup = energy_sup.max((e - *e0).abs().as_f64());
            }
        }
        Ok(())
    })?;
    Ok((sup, energy_sup))
}

fn drift_fit(name: &str, n: &[f64], drift: &[f64]) -> Result<Fit> {
    if drift.iter().all(|d| d.is_zero()) {
        // conserved to the last bit: no N-dependence
        return Ok(Fit {
            name: name.to_string(),
            slope: 0.0,
            intercept: f64::NEG_INFINITY,
            r_squared: 1.0,
            residuals: vec![0.0; n.len()],
        });
    }
    fit_loglog(name, n, drift)
}

fn base_report<T: Real>(experiment: &str, u0: &SpectralField<T>, cfg: &DriftConfig) -> ProbeReport {
    let mut report = ProbeReport::new(experiment, u0.grid().to_string(), &COLUMNS);
    report
        .param("t_loc", cfg.t_loc)
        .param("dt", cfg.dt)
        .param("record_stride", cfg.record_stride as f64)
        .param("dealias", if cfg.dealias { "on" } else { "off" });
    report
}

/// Name of the fit for regularity `s`.
pub fn slope_name(s: f64) -> String {
    format!("drift_slope_s={s}")
}

/// Drift of `E(I_{N,s} u)` over `[0, t_loc]` for every `N` in the list and
/// every `s` in `s_list`, with one log-log fit per `s`.
pub fn almost_conservation_experiment<T: Real>(
    u0: &SpectralField<T>,
    s_list: &[f64],
    cfg: &DriftConfig,
) -> Result<ProbeReport> {
    let start = Instant::now();
    cfg.validate(u0)?;
    if s_list.is_empty() {
        return Err(Error::InvalidParameter("empty s list".into()));
    }
    for &s in s_list {
        if !(s > 5.0 / 6.0 && s <= 1.0) {
            return Err(Error::DomainError(format!("s = {s} outside (5/6, 1]")));
        }
    }
    let pairs: Vec<(f64, f64)> = s_list
        .iter()
        .flat_map(|&s| cfg.n_list.iter().map(move |&n| (s, n)))
        .collect();
    let closures: Vec<Box<dyn Fn(&SpectralField<T>) -> Result<T> + Sync>> = pairs
        .iter()
        .map(|&(s, n)| {
            Box::new(move |f: &SpectralField<T>| modified_energy_i(f, T::lit(n), T::lit(s)))
                as Box<dyn Fn(&SpectralField<T>) -> Result<T> + Sync>
        })
        .collect();
    let refs: Vec<&(dyn Fn(&SpectralField<T>) -> Result<T> + Sync)> =
        closures.iter().map(|b| b.as_ref()).collect();
    let (drifts, energy_drift) = sup_drifts(u0, cfg, &refs)?;

    let mut report = base_report("almost_i", u0, cfg);
    report.param("energy_drift_sup", energy_drift);
    for (&(s, n), &d) in pairs.iter().zip(&drifts) {
        report.push_row(vec![Some(n), Some(s), Some(cfg.t_loc), Some(cfg.dt), Some(d)]);
    }
    for (k, &s) in s_list.iter().enumerate() {
        let m = cfg.n_list.len();
        let fit = drift_fit(&slope_name(s), &cfg.n_list, &drifts[k * m..(k + 1) * m])?;
        report.fits.push(fit);
    }
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Dyadic pieces `P_{<=1}, P_2, P_4, ...` up to the lattice maximum.
pub fn dyadic_scales<T: Real>(u: &SpectralField<T>) -> Vec<f64> {
    let top = u.grid().max_xi().as_f64();
    let mut scales = vec![1.0];
    let mut m = 2.0;
    while m / 2.0 <= top {
        scales.push(m);
        m *= 2.0;
    }
    scales
}

fn dyadic_piece<T: Real>(u: &SpectralField<T>, m: f64) -> Result<SpectralField<T>> {
    if m <= 1.0 {
        project_leq(u, T::one())
    } else {
        project_band(u, T::lit(m))
    }
}

/// Accumulates `int ||P_M D_N u||_{10/3}^{10/3} dt` per scale by the
/// trapezoid rule and turns it into the surrogate
/// `sum_M min(1, M/N) ||P_M D_N u||_{L^{10/3}_{t,x}}`.
#[derive(Clone, Debug)]
pub struct SurrogateSum {
    n: f64,
    scales: Vec<f64>,
    integrals: Vec<f64>,
    last: Option<(f64, Vec<f64>)>,
}

impl SurrogateSum {
    pub fn new(n: f64, scales: Vec<f64>) -> Self {
        let integrals = vec![0.0; scales.len()];
        Self { n, scales, integrals, last: None }
    }

    /// Adds the sample `u(t)`; samples must arrive in increasing `t`.
    pub fn push<T: Real>(&mut self, t: f64, u: &SpectralField<T>) -> Result<()> {
        let du = apply_d(u, T::lit(self.n))?;
        let p = T::lit(SURROGATE_EXPONENT);
        let values: Vec<f64> = self
            .scales
            .iter()
            .map(|&m| Ok(dyadic_piece(&du, m)?.to_spatial().lq_norm(p).powf(p).as_f64()))
            .collect::<Result<_>>()?;
        if let Some((t0, prev)) = &self.last {
            let h = t - t0;
            for ((acc, a), b) in self.integrals.iter_mut().zip(prev).zip(&values) {
                *acc += 0.5 * h * (a + b);
            }
        }
        self.last = Some((t, values));
        Ok(())
    }

    /// `(M, min(1, M/N) ||P_M D u||_{L^{10/3}_{t,x}})` per scale.
    pub fn terms(&self) -> Vec<(f64, f64)> {
        self.scales
            .iter()
            .zip(&self.integrals)
            .map(|(&m, &i)| (m, (m / self.n).min(1.0) * i.powf(1.0 / SURROGATE_EXPONENT)))
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.terms().iter().map(|(_, v)| v).sum()
    }
}

/// Drift of `E(D_N u)` over `[0, t_loc]` for every `N`, its log-log fit,
/// and the surrogate right-hand side per `N`.
pub fn dmod_drift_experiment<T: Real>(u0: &SpectralField<T>, cfg: &DriftConfig) -> Result<ProbeReport> {
    let start = Instant::now();
    cfg.validate(u0)?;
    let scales = dyadic_scales(u0);
    let mut surrogates: Vec<SurrogateSum> =
        cfg.n_list.iter().map(|&n| SurrogateSum::new(n, scales.clone())).collect();
    let mut initial: Option<Vec<T>> = None;
    let mut sup = vec![0.0f64; cfg.n_list.len()];
    let mut e_initial = None;
    let mut energy_sup = 0.0f64;
    evolve_with(u0, &cfg.evolution(), |t, f| {
        let values: Vec<T> = cfg
            .n_list
            .iter()
            .map(|&n| modified_energy_d(f, T::lit(n)))
            .collect::<Result<_>>()?;
        for s in surrogates.iter_mut() {
            s.push(t.as_f64(), f)?;
        }
        let e = energy(f);
        match &initial {
            None => {
                initial = Some(values);
                e_initial = Some(e);
            }
            Some(v0) => {
                for ((s, v), v0) in sup.iter_mut().zip(&values).zip(v0) {
                    *s = s.max((*v - *v0).abs().as_f64());
                }
                let e0 = e_initial.expect("set with initial");
                energy_sup = energy_sup.max((e - e0).abs().as_f64());
            }
        }
        Ok(())
    })?;

    let mut report = base_report("almost_d", u0, cfg);
    report.columns.push("surrogate".into());
    report.param("energy_drift_sup", energy_sup);
    for ((&n, &d), sur) in cfg.n_list.iter().zip(&sup).zip(&surrogates) {
        report.push_row(vec![
            Some(n),
            None,
            Some(cfg.t_loc),
            Some(cfg.dt),
            Some(d),
            Some(sur.total()),
        ]);
    }
    report.fits.push(drift_fit("drift_slope_d", &cfg.n_list, &sup)?);
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
