//! Conserved quantities, Sobolev and modified energies, space-time norms.
//!
//! Quadratic quantities are evaluated in frequency space, which is exact
//! under the lattice Plancherel identity. The quartic term is integrated on
//! the 2x padded grid, where `|u|^4` of a lattice trigonometric polynomial
//! is resolved without aliasing.

use num_complex::Complex;
use num_traits::Zero;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::grid::SpectralField;
use crate::multipliers::{apply_d, apply_i, bracket, smooth_step};
use crate::scalar::Real;

/// Default time regularity of the restriction norm.
pub const DEFAULT_B: f64 = 0.6;

/// Guard on `dt * xi_max^2` for [`xsb_norm`].
pub const MAX_PHASE_PER_SAMPLE: f64 = 0.5;

pub fn mass<T: Real>(f: &SpectralField<T>) -> T {
    f.mass()
}

/// `1/2 int |grad u|^2`.
pub fn kinetic<T: Real>(f: &SpectralField<T>) -> T {
    f.weighted_mass(|k2| k2) / T::lit(2.0)
}

/// `int |u|^4`, exact for lattice data.
pub fn quartic<T: Real>(f: &SpectralField<T>) -> T {
    let fine = f.pad().to_spatial();
    let h = fine.grid().cell_volume();
    h * fine.values().iter().fold(T::zero(), |acc, v| {
        let m = v.norm_sqr();
        acc + m * m
    })
}

/// `int 1/2 |grad u|^2 + 1/4 |u|^4`.
pub fn energy<T: Real>(f: &SpectralField<T>) -> T {
    kinetic(f) + quartic(f) / T::lit(4.0)
}

/// `Im int conj(u) grad u`, one entry per direction.
pub fn momentum<T: Real>(f: &SpectralField<T>) -> Vec<T> {
    let g = f.grid();
    let w = g.frequency_weight();
    let mut p = vec![T::zero(); g.dimension()];
    let mut xi = vec![T::zero(); g.dimension()];
    for (i, c) in f.coeffs().iter().enumerate() {
        let m = c.norm_sqr();
        if m.is_zero() {
            continue;
        }
        g.wavevector_into(i, &mut xi);
        for (pa, &x) in p.iter_mut().zip(&xi) {
            *pa = *pa + x * m;
        }
    }
    p.into_iter().map(|v| v * w).collect()
}

/// `||<xi>^s u_hat||`.
pub fn sobolev_norm<T: Real>(f: &SpectralField<T>, s: T) -> T {
    f.weighted_mass(|k2| bracket(k2).powf(T::lit(2.0) * s)).sqrt()
}

/// `E(Iu)` with the smooth I-multiplier at level `n`, regularity `s`.
pub fn modified_energy_i<T: Real>(f: &SpectralField<T>, n: T, s: T) -> Result<T> {
    Ok(energy(&apply_i(f, n, s)?))
}

/// `E(Du)` with the smoothing multiplier at level `n`.
pub fn modified_energy_d<T: Real>(f: &SpectralField<T>, n: T) -> Result<T> {
    Ok(energy(&apply_d(f, n)?))
}

/// Which modified energies to include in a [`DiagnosticsRecord`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DiagnosticsSpec<T> {
    /// `(N, s)` for `E(Iu)`.
    pub i: Option<(T, T)>,
    /// `N` for `E(Du)`.
    pub d: Option<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsRecord<T> {
    pub t: T,
    pub mass: T,
    pub energy: T,
    pub momentum: Vec<T>,
    pub h1: T,
    pub h2: T,
    pub e_i: Option<T>,
    pub e_d: Option<T>,
}

impl<T: Real> DiagnosticsRecord<T> {
    pub fn is_finite(&self) -> bool {
        [self.t, self.mass, self.energy, self.h1, self.h2]
            .iter()
            .chain(&self.momentum)
            .chain(self.e_i.iter())
            .chain(self.e_d.iter())
            .all(|v| v.is_finite())
    }
}

pub fn diagnostics<T: Real>(
    t: T,
    f: &SpectralField<T>,
    spec: &DiagnosticsSpec<T>,
) -> Result<DiagnosticsRecord<T>> {
    let record = DiagnosticsRecord {
        t,
        mass: mass(f),
        energy: energy(f),
        momentum: momentum(f),
        h1: sobolev_norm(f, T::one()),
        h2: sobolev_norm(f, T::lit(2.0)),
        e_i: spec.i.map(|(n, s)| modified_energy_i(f, n, s)).transpose()?,
        e_d: spec.d.map(|n| modified_energy_d(f, n)).transpose()?,
    };
    if !record.is_finite() {
        return Err(Error::NonFinite { t: t.as_f64() });
    }
    Ok(record)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowShape {
    /// Vanishes on the outer sixteenths, ramps up smoothly, equals 1 on the
    /// middle half.
    Smooth,
    /// `chi = 1` on the whole window.
    Flat,
}

/// Time window `[t0, t1]` with cutoff `chi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowSpec<T> {
    pub t0: T,
    pub t1: T,
    pub shape: WindowShape,
}

impl<T: Real> WindowSpec<T> {
    pub fn new(t0: T, t1: T) -> Result<Self> {
        Self::with_shape(t0, t1, WindowShape::Smooth)
    }

    pub fn flat(t0: T, t1: T) -> Result<Self> {
        Self::with_shape(t0, t1, WindowShape::Flat)
    }

    fn with_shape(t0: T, t1: T, shape: WindowShape) -> Result<Self> {
        if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
            return Err(Error::InvalidParameter(format!("window [{t0}, {t1}]")));
        }
        Ok(Self { t0, t1, shape })
    }

    pub fn width(&self) -> T {
        self.t1 - self.t0
    }

    pub fn chi(&self, t: T) -> T {
        if t < self.t0 || t > self.t1 {
            return T::zero();
        }
        match self.shape {
            WindowShape::Flat => T::one(),
            WindowShape::Smooth => {
                let w = self.width();
                let edge = (t - self.t0).min(self.t1 - t) / w;
                // 0 up to w/16, 1 from w/4 on
                let (a, b) = (T::lit(1.0 / 16.0), T::lit(0.25));
                smooth_step((edge - a) / (b - a))
            }
        }
    }
}

/// Sample indices covering `[t0, t1]` exactly.
fn window_indices<T: Real>(times: &[T], w: &WindowSpec<T>) -> Result<(usize, usize)> {
    let err = || Error::WindowNotCovered { t0: w.t0.as_f64(), t1: w.t1.as_f64() };
    if times.len() < 2 {
        return Err(err());
    }
    let dt = times[1] - times[0];
    let locate = |t: T| {
        let k = ((t - times[0]) / dt).round();
        let k = k.to_i64().filter(|&k| k >= 0 && (k as usize) < times.len())?;
        let k = k as usize;
        ((times[k] - t).abs() <= T::lit(1e-6) * dt).then_some(k)
    };
    match (locate(w.t0), locate(w.t1)) {
        (Some(a), Some(b)) if b > a => Ok((a, b)),
        _ => Err(err()),
    }
}

/// `(int ||u(t)||_{L^q}^p dt)^(1/p)` by the trapezoid rule over the
/// samples; `p = inf` takes the maximum.
pub fn spacetime_norm<T: Real>(traj: &Trajectory<T>, p: T, q: T) -> Result<T> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if !(p >= T::one() && q >= T::one()) {
        return Err(Error::InvalidParameter(format!("exponents p = {p}, q = {q}")));
    }
    let norms: Vec<T> = traj.snapshots().iter().map(|f| f.to_spatial().lq_norm(q)).collect();
    if p.is_infinite() {
        return Ok(norms.into_iter().fold(T::zero(), T::max));
    }
    let dt = traj
        .spacing()
        .ok_or_else(|| Error::InvalidParameter("time integral needs two samples".into()))?;
    let powered: Vec<T> = norms.iter().map(|n| n.powf(p)).collect();
    let last = powered.len() - 1;
    let inner = powered[1..last].iter().fold(T::zero(), |a, &b| a + b);
    let integral = dt * (inner + (powered[0] + powered[last]) / T::lit(2.0));
    Ok(integral.powf(p.recip()))
}

/// `|| <xi>^s <tau>^b V ||` for `V` the windowed time Fourier transform of
/// the interaction-picture field `e^{it|xi|^2} u_hat(t)`.
///
/// Time frequencies are `tau = 2 pi j / (t1 - t0)`. The endpoint samples are
/// merged (trapezoid rule on the periodised window), so with `b = 0` the
/// result obeys Parseval in `t` exactly.
pub fn xsb_norm<T: Real>(traj: &Trajectory<T>, s: T, b: T, w: &WindowSpec<T>) -> Result<T> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let (k0, k1) = window_indices(traj.times(), w)?;
    let dt = traj.spacing().expect("two samples");
    let grid = traj.grid();
    let kmax = grid.max_xi();
    let product = dt * kmax * kmax;
    if product > T::lit(MAX_PHASE_PER_SAMPLE) {
        return Err(Error::InsufficientSampling { dt: dt.as_f64(), product: product.as_f64() });
    }
    let count = k1 - k0;
    let times = &traj.times()[k0..=k1];
    let snaps = &traj.snapshots()[k0..=k1];
    let chi: Vec<T> = times.iter().map(|&t| w.chi(t)).collect();
    let two_pi = T::lit(std::f64::consts::TAU);
    let tau_weight: Vec<T> = (0..count)
        .map(|j| {
            let m = if 2 * j > count { j as i64 - count as i64 } else { j as i64 };
            let tau = two_pi * T::lit(m as f64) / w.width();
            bracket(tau * tau).powf(T::lit(2.0) * b)
        })
        .collect();
    let fft = FftPlanner::new().plan_fft_forward(count);
    let mut line = vec![Complex::zero(); count];
    let mut scratch = vec![Complex::zero(); fft.get_inplace_scratch_len()];
    let mut total = T::zero();
    for (i, &k2) in grid.xi_norm_sq().iter().enumerate() {
        if grid.is_nyquist(i) {
            continue;
        }
        let v = |j: usize| snaps[j].coeffs()[i] * Complex::from_polar(chi[j], times[j] * k2);
        // periodised trapezoid: the two endpoint samples share slot 0
        line[0] = (v(0) + v(count)) / T::lit(2.0);
        for (j, slot) in line.iter_mut().enumerate().skip(1) {
            *slot = v(j);
        }
        let any = line.iter().any(|c| !c.is_zero());
        if !any {
            continue;
        }
        fft.process_with_scratch(&mut line, &mut scratch);
        let sum = line
            .iter()
            .zip(&tau_weight)
            .fold(T::zero(), |acc, (v, &tw)| acc + tw * v.norm_sqr());
        total = total + bracket(k2).powf(T::lit(2.0) * s) * sum;
    }
    // V = dt * DFT; Parseval in t carries 1/(t1 - t0); space carries w
    let norm_sq = grid.frequency_weight() * dt * dt / w.width() * total;
    Ok(norm_sq.sqrt())
}
