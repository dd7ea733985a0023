//! Discretized product geometry `R^n x T^(d-n)`, its frequency lattice and
//! the normalized spectral transforms.
//!
//! Every direction is realized as a periodic axis; truncated-Euclidean
//! directions differ only in how the boundary-mass monitor treats them.
//!
//! Normalization: the forward transform carries the cell volume
//! `h = prod(period_i / M_i)`,
//!
//! ```text
//! u_hat(xi) = h * sum_x u(x) exp(-i x.xi)
//! ```
//!
//! and the inverse carries the frequency weight `w = prod(1 / period_i)`,
//! so that `h * sum |u|^2 == w * sum |u_hat|^2` holds exactly. Under this
//! convention the spectral coefficients approximate the continuum Fourier
//! transform and do not depend on the resolution, which makes zero padding
//! and truncation plain copies.
//!
//! The Nyquist plane (`m = M_i / 2` along any axis) is zero in every
//! spectral field.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fft::{LatticeFft, Sign};
use crate::scalar::Real;

/// Smallest mode count accepted by the dynamics module.
pub const MIN_DYNAMICS_MODES: usize = 8;

/// Width of the outer shell (fraction of the box length, both ends together)
/// watched by [`boundary_mass_fraction`].
pub const BOUNDARY_SHELL: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DirectionKind {
    Torus,
    EuclideanTruncated,
}

/// One axis of the product space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction<T> {
    pub kind: DirectionKind,
    /// Torus period, or the box length approximating a Euclidean line.
    pub period: T,
}

impl<T: Real> Direction<T> {
    pub fn torus(period: T) -> Self {
        Self { kind: DirectionKind::Torus, period }
    }

    pub fn euclidean(length: T) -> Self {
        Self { kind: DirectionKind::EuclideanTruncated, period: length }
    }

    pub fn is_torus(&self) -> bool {
        self.kind == DirectionKind::Torus
    }
}

struct Inner<T: Real> {
    directions: Vec<Direction<T>>,
    modes: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
    /// Angular wavenumbers per axis in FFT order.
    wavenumbers: Vec<Vec<T>>,
    cell_volume: T,
    frequency_weight: T,
    fft: OnceLock<LatticeFft<T>>,
    xi_norm_sq: OnceLock<Vec<T>>,
    padded: OnceLock<GridSpec<T>>,
    pad_map: OnceLock<Vec<usize>>,
    negation: OnceLock<Vec<usize>>,
}

/// Validated lattice geometry. Cheap to clone; transform plans and lattice
/// tables are built lazily and shared between clones.
#[derive(Clone)]
pub struct GridSpec<T: Real> {
    inner: Arc<Inner<T>>,
}

/// Builds a grid after checking that `d` matches the direction and mode lists.
pub fn build_grid<T: Real>(
    d: usize,
    directions: Vec<Direction<T>>,
    modes: Vec<usize>,
) -> Result<GridSpec<T>> {
    if !(2..=4).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    for got in [directions.len(), modes.len()] {
        if got != d {
            return Err(Error::DimensionMismatch { expected: d, got });
        }
    }
    GridSpec::new(directions, modes)
}

impl<T: Real> GridSpec<T> {
    pub fn new(directions: Vec<Direction<T>>, modes: Vec<usize>) -> Result<Self> {
        let d = directions.len();
        if !(2..=4).contains(&d) {
            return Err(Error::UnsupportedDimension(d));
        }
        if modes.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: modes.len() });
        }
        for (axis, (dir, &m)) in directions.iter().zip(&modes).enumerate() {
            if !(dir.period > T::zero() && dir.period.is_finite()) {
                return Err(Error::NonPositivePeriod { axis });
            }
            if m == 0 {
                return Err(Error::ZeroModeCount { axis });
            }
            if m % 2 == 1 {
                return Err(Error::OddModeCount { axis, modes: m });
            }
        }
        let mut strides = vec![1; d];
        for axis in (0..d - 1).rev() {
            strides[axis] = strides[axis + 1] * modes[axis + 1];
        }
        let len = modes.iter().product();
        let two_pi = T::PI() + T::PI();
        let wavenumbers = directions
            .iter()
            .zip(&modes)
            .map(|(dir, &m)| {
                (0..m)
                    .map(|j| T::lit(signed_mode(j, m) as f64) * two_pi / dir.period)
                    .collect()
            })
            .collect();
        let cell_volume = directions
            .iter()
            .zip(&modes)
            .fold(T::one(), |acc, (dir, &m)| acc * dir.period / T::from_count(m));
        let frequency_weight = directions
            .iter()
            .fold(T::one(), |acc, dir| acc / dir.period);
        Ok(Self {
            inner: Arc::new(Inner {
                directions,
                modes,
                strides,
                len,
                wavenumbers,
                cell_volume,
                frequency_weight,
                fft: OnceLock::new(),
                xi_norm_sq: OnceLock::new(),
                padded: OnceLock::new(),
                pad_map: OnceLock::new(),
                negation: OnceLock::new(),
            }),
        })
    }

    /// `d`-dimensional torus with the given periods.
    pub fn torus(periods: &[T], modes: &[usize]) -> Result<Self> {
        Self::new(
            periods.iter().map(|&p| Direction::torus(p)).collect(),
            modes.to_vec(),
        )
    }

    pub fn dimension(&self) -> usize {
        self.inner.directions.len()
    }

    pub fn directions(&self) -> &[Direction<T>] {
        &self.inner.directions
    }

    pub fn modes(&self) -> &[usize] {
        &self.inner.modes
    }

    pub fn strides(&self) -> &[usize] {
        &self.inner.strides
    }

    /// Number of lattice points.
    pub fn len(&self) -> usize {
        self.inner.len
    }

    pub fn is_empty(&self) -> bool {
        self.inner.len == 0
    }

    /// Spatial cell volume `h`.
    pub fn cell_volume(&self) -> T {
        self.inner.cell_volume
    }

    /// Frequency cell weight `w`.
    pub fn frequency_weight(&self) -> T {
        self.inner.frequency_weight
    }

    pub fn volume(&self) -> T {
        self.inner
            .directions
            .iter()
            .fold(T::one(), |acc, d| acc * d.period)
    }

    /// Angular wavenumbers of `axis` in FFT order.
    pub fn wavenumbers(&self, axis: usize) -> &[T] {
        &self.inner.wavenumbers[axis]
    }

    /// Nyquist frequency `pi M / period` of `axis`; retained wavenumbers are
    /// strictly smaller in modulus.
    pub fn nyquist(&self, axis: usize) -> T {
        T::PI() * T::from_count(self.inner.modes[axis]) / self.inner.directions[axis].period
    }

    /// Smallest per-axis Nyquist frequency.
    pub fn min_nyquist(&self) -> T {
        (0..self.dimension())
            .map(|a| self.nyquist(a))
            .fold(T::infinity(), T::min)
    }

    /// Largest `|xi|` over retained lattice points.
    pub fn max_xi(&self) -> T {
        self.xi_norm_sq()
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.is_nyquist(*i))
            .fold(T::zero(), |acc, (_, &v)| acc.max(v))
            .sqrt()
    }

    pub fn has_euclidean(&self) -> bool {
        self.inner.directions.iter().any(|d| !d.is_torus())
    }

    /// Smallest torus period, `None` for a purely Euclidean grid.
    pub fn min_torus_period(&self) -> Option<T> {
        self.inner
            .directions
            .iter()
            .filter(|d| d.is_torus())
            .map(|d| d.period)
            .reduce(T::min)
    }

    /// Signed mode number of index `j` along `axis`; the Nyquist index maps
    /// to `+M/2`.
    pub fn mode_number(&self, axis: usize, j: usize) -> i64 {
        signed_mode(j, self.inner.modes[axis])
    }

    /// Index along `axis` of flat lattice index `flat`.
    #[inline]
    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.inner.strides[axis]) % self.inner.modes[axis]
    }

    /// Signed mode vector of a flat index.
    pub fn mode_vector(&self, flat: usize) -> Vec<i64> {
        (0..self.dimension())
            .map(|a| self.mode_number(a, self.axis_index(flat, a)))
            .collect()
    }

    /// Flat index of a signed mode vector, `None` when outside the lattice.
    pub fn flat_index(&self, mode: &[i64]) -> Option<usize> {
        if mode.len() != self.dimension() {
            return None;
        }
        let mut flat = 0;
        for (axis, &m) in mode.iter().enumerate() {
            let n = self.inner.modes[axis] as i64;
            if m <= -n / 2 || m > n / 2 {
                return None;
            }
            flat += (m.rem_euclid(n) as usize) * self.inner.strides[axis];
        }
        Some(flat)
    }

    #[inline]
    pub fn is_nyquist(&self, flat: usize) -> bool {
        (0..self.dimension()).any(|a| 2 * self.axis_index(flat, a) == self.inner.modes[a])
    }

    /// Writes the angular wavevector of `flat` into `xi`.
    #[inline]
    pub fn wavevector_into(&self, flat: usize, xi: &mut [T]) {
        for (axis, x) in xi.iter_mut().enumerate() {
            *x = self.inner.wavenumbers[axis][self.axis_index(flat, axis)];
        }
    }

    pub fn wavevector(&self, flat: usize) -> Vec<T> {
        let mut xi = vec![T::zero(); self.dimension()];
        self.wavevector_into(flat, &mut xi);
        xi
    }

    /// Spatial coordinates of lattice point `flat`, origin at the box corner.
    pub fn position(&self, flat: usize) -> Vec<T> {
        (0..self.dimension())
            .map(|a| {
                let dir = &self.inner.directions[a];
                T::from_count(self.axis_index(flat, a)) * dir.period
                    / T::from_count(self.inner.modes[a])
            })
            .collect()
    }

    /// `|xi|^2` for every flat index.
    pub fn xi_norm_sq(&self) -> &[T] {
        self.inner.xi_norm_sq.get_or_init(|| {
            let mut xi = vec![T::zero(); self.dimension()];
            (0..self.len())
                .map(|flat| {
                    self.wavevector_into(flat, &mut xi);
                    xi.iter().fold(T::zero(), |acc, &x| acc + x * x)
                })
                .collect()
        })
    }

    /// Flat index of `-xi` for every flat index.
    pub fn negation_map(&self) -> &[usize] {
        self.inner.negation.get_or_init(|| {
            (0..self.len())
                .map(|flat| {
                    (0..self.dimension()).fold(0, |acc, a| {
                        let n = self.inner.modes[a];
                        let j = self.axis_index(flat, a);
                        acc + ((n - j) % n) * self.inner.strides[a]
                    })
                })
                .collect()
        })
    }

    /// Same periods, twice the modes per direction.
    pub fn padded(&self) -> &GridSpec<T> {
        self.inner.padded.get_or_init(|| {
            GridSpec::new(
                self.inner.directions.clone(),
                self.inner.modes.iter().map(|m| 2 * m).collect(),
            )
            .expect("doubling a valid grid stays valid")
        })
    }

    /// Flat index on [`Self::padded`] of every flat index of this grid.
    pub(crate) fn pad_map(&self) -> &[usize] {
        self.inner.pad_map.get_or_init(|| {
            let fine = self.padded();
            (0..self.len())
                .map(|flat| {
                    (0..self.dimension()).fold(0, |acc, a| {
                        let n = self.inner.modes[a];
                        let j = self.axis_index(flat, a);
                        let jf = if 2 * j < n { j } else { j + n };
                        acc + jf * fine.strides()[a]
                    })
                })
                .collect()
        })
    }

    /// Grid of the rescaled manifold: every period multiplied by `lambda`.
    pub fn rescaled(&self, lambda: T) -> Result<Self> {
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("scaling factor {lambda}")));
        }
        Self::new(
            self.inner
                .directions
                .iter()
                .map(|d| Direction { kind: d.kind, period: d.period * lambda })
                .collect(),
            self.inner.modes.clone(),
        )
    }

    /// Checks the dynamics preconditions: `d = 3`, every `M_i >= 8`.
    pub fn check_dynamics(&self) -> Result<()> {
        if self.dimension() != 3 {
            return Err(Error::UnsupportedDimension(self.dimension()));
        }
        if let Some(m) = self.inner.modes.iter().find(|&&m| m < MIN_DYNAMICS_MODES) {
            return Err(Error::InvalidParameter(format!(
                "mode count {m} below {MIN_DYNAMICS_MODES}"
            )));
        }
        Ok(())
    }

    pub(crate) fn fft(&self) -> &LatticeFft<T> {
        self.inner
            .fft
            .get_or_init(|| LatticeFft::new(&self.inner.modes, &self.inner.strides))
    }

    pub(crate) fn ensure_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

impl<T: Real> PartialEq for GridSpec<T> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.directions == other.inner.directions
                && self.inner.modes == other.inner.modes)
    }
}

/// Canonical one-line description written into every output header.
impl<T: Real> fmt::Display for GridSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} directions=[", self.dimension())?;
        for (i, d) in self.inner.directions.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            let kind = match d.kind {
                DirectionKind::Torus => "torus",
                DirectionKind::EuclideanTruncated => "euclidean",
            };
            write!(f, "{kind}:{:?}", d.period.as_f64())?;
        }
        f.write_str("] modes=[")?;
        for (i, m) in self.inner.modes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("]")
    }
}

impl<T: Real> fmt::Debug for GridSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GridSpec({self})")
    }
}

#[inline]
fn signed_mode(j: usize, m: usize) -> i64 {
    if 2 * j <= m {
        j as i64
    } else {
        j as i64 - m as i64
    }
}

/// Complex amplitudes at the lattice points, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialField<T: Real> {
    grid: GridSpec<T>,
    values: Vec<Complex<T>>,
}

/// Complex amplitudes at the lattice frequencies, FFT order. The Nyquist
/// plane is always zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField<T: Real> {
    grid: GridSpec<T>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> SpatialField<T> {
    pub fn new(grid: &GridSpec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn zeros(grid: &GridSpec<T>) -> Self {
        Self { grid: grid.clone(), values: vec![Complex::zero(); grid.len()] }
    }

    pub fn constant(grid: &GridSpec<T>, c: Complex<T>) -> Self {
        Self { grid: grid.clone(), values: vec![c; grid.len()] }
    }

    /// Samples `f` at the lattice points.
    pub fn from_fn(grid: &GridSpec<T>, mut f: impl FnMut(&[T]) -> Complex<T>) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.position(i))).collect();
        Self { grid: grid.clone(), values }
    }

    /// `amplitude * exp(i x . xi(mode))` for a lattice mode vector.
    pub fn plane_wave(grid: &GridSpec<T>, mode: &[i64], amplitude: Complex<T>) -> Result<Self> {
        let flat = grid
            .flat_index(mode)
            .ok_or_else(|| Error::InvalidParameter(format!("mode {mode:?} outside lattice")))?;
        let xi = grid.wavevector(flat);
        Ok(Self::from_fn(grid, |x| {
            let phase = x.iter().zip(&xi).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
            amplitude * Complex::from_polar(T::one(), phase)
        }))
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    /// Forward transform with the cell-volume normalization.
    pub fn to_spectral(&self) -> SpectralField<T> {
        let mut coeffs = self.values.clone();
        self.grid.fft().process(&mut coeffs, Sign::Forward);
        let h = self.grid.cell_volume();
        for c in coeffs.iter_mut() {
            *c = c.scale(h);
        }
        SpectralField::from_raw(&self.grid, coeffs)
    }

    /// Discrete mass `h * sum |u|^2`.
    pub fn mass(&self) -> T {
        self.grid.cell_volume() * sum_norm_sqr(&self.values)
    }

    pub fn l2_norm(&self) -> T {
        self.mass().sqrt()
    }

    /// `(h * sum |u|^q)^(1/q)`; `q = inf` gives the max modulus.
    pub fn lq_norm(&self, q: T) -> T {
        if q.is_infinite() {
            return self.max_abs();
        }
        let sum = self.values.iter().fold(T::zero(), |acc, v| acc + v.norm().powf(q));
        (self.grid.cell_volume() * sum).powf(q.recip())
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, v| acc.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn conj(&self) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| v.conj()).collect() }
    }

    pub fn scale(&self, a: Complex<T>) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| v * a).collect() }
    }

    /// `self - other`, both on the same grid.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    /// `h * sum conj(self) * other`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.grid.ensure_same(&other.grid)?;
        let s = self
            .values
            .iter()
            .zip(&other.values)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b);
        Ok(s.scale(self.grid.cell_volume()))
    }
}

impl<T: Real> SpectralField<T> {
    /// Takes ownership of `coeffs`, zeroing the Nyquist plane.
    pub fn new(grid: &GridSpec<T>, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: coeffs.len() });
        }
        Ok(Self::from_raw(grid, coeffs))
    }

    pub(crate) fn from_raw(grid: &GridSpec<T>, mut coeffs: Vec<Complex<T>>) -> Self {
        zero_nyquist(grid, &mut coeffs);
        Self { grid: grid.clone(), coeffs }
    }

    pub fn zeros(grid: &GridSpec<T>) -> Self {
        Self { grid: grid.clone(), coeffs: vec![Complex::zero(); grid.len()] }
    }

    /// Single coefficient `c` at a lattice mode.
    pub fn delta(grid: &GridSpec<T>, mode: &[i64], c: Complex<T>) -> Result<Self> {
        let flat = grid
            .flat_index(mode)
            .ok_or_else(|| Error::InvalidParameter(format!("mode {mode:?} outside lattice")))?;
        let mut f = Self::zeros(grid);
        f.modify(|cs| cs[flat] = c);
        Ok(f)
    }

    /// Coefficients from a function of the wavevector.
    pub fn from_fn(grid: &GridSpec<T>, mut f: impl FnMut(&[T]) -> Complex<T>) -> Self {
        let mut xi = vec![T::zero(); grid.dimension()];
        let coeffs = (0..grid.len())
            .map(|i| {
                grid.wavevector_into(i, &mut xi);
                f(&xi)
            })
            .collect();
        Self::from_raw(grid, coeffs)
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    /// Mutates the coefficients, then re-zeroes the Nyquist plane.
    pub fn modify(&mut self, f: impl FnOnce(&mut [Complex<T>])) {
        f(&mut self.coeffs);
        zero_nyquist(&self.grid, &mut self.coeffs);
    }

    /// Inverse transform with the frequency-weight normalization.
    pub fn to_spatial(&self) -> SpatialField<T> {
        let mut values = self.coeffs.clone();
        self.grid.fft().process(&mut values, Sign::Inverse);
        let w = self.grid.frequency_weight();
        for v in values.iter_mut() {
            *v = v.scale(w);
        }
        SpatialField { grid: self.grid.clone(), values }
    }

    /// `w * sum |u_hat|^2`, equal to the spatial mass.
    pub fn mass(&self) -> T {
        self.grid.frequency_weight() * sum_norm_sqr(&self.coeffs)
    }

    pub fn l2_norm(&self) -> T {
        self.mass().sqrt()
    }

    /// `w * sum f(xi) |u_hat(xi)|^2` with `f` evaluated on `|xi|^2`.
    pub fn weighted_mass(&self, f: impl Fn(T) -> T) -> T {
        let w = self.grid.frequency_weight();
        let s = self
            .coeffs
            .iter()
            .zip(self.grid.xi_norm_sq())
            .fold(T::zero(), |acc, (c, &k2)| acc + f(k2) * c.norm_sqr());
        w * s
    }

    /// Spectrum of the complex-conjugate field: `conj(u_hat(-xi))`.
    pub fn conj(&self) -> Self {
        let neg = self.grid.negation_map();
        let coeffs = neg.iter().map(|&j| self.coeffs[j].conj()).collect();
        Self::from_raw(&self.grid, coeffs)
    }

    pub fn scale(&self, a: Complex<T>) -> Self {
        Self { grid: self.grid.clone(), coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    /// `w * sum conj(self) * other`, the spectral form of the `L^2` pairing.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.grid.ensure_same(&other.grid)?;
        let s = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b);
        Ok(s.scale(self.grid.frequency_weight()))
    }

    /// Embeds the coefficients into the 2x zero-padded lattice.
    pub fn pad(&self) -> SpectralField<T> {
        let fine = self.grid.padded();
        let mut coeffs = vec![Complex::zero(); fine.len()];
        for (&j, c) in self.grid.pad_map().iter().zip(&self.coeffs) {
            coeffs[j] = *c;
        }
        SpectralField { grid: fine.clone(), coeffs }
    }

    /// Restricts a field on `coarse.padded()` back onto `coarse`.
    pub fn truncate_to(&self, coarse: &GridSpec<T>) -> Result<SpectralField<T>> {
        self.grid.ensure_same(coarse.padded())?;
        let coeffs = coarse.pad_map().iter().map(|&j| self.coeffs[j]).collect();
        Ok(SpectralField::from_raw(coarse, coeffs))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

fn zero_nyquist<T: Real>(grid: &GridSpec<T>, coeffs: &mut [Complex<T>]) {
    let d = grid.dimension();
    for axis in 0..d {
        let n = grid.modes()[axis];
        let stride = grid.strides()[axis];
        let block = n * stride;
        let offset = (n / 2) * stride;
        for start in (0..coeffs.len()).step_by(block) {
            for c in &mut coeffs[start + offset..start + offset + stride] {
                *c = Complex::zero();
            }
        }
    }
}

fn sum_norm_sqr<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
}

/// Fraction of the discrete mass lying in the outer shell of the box along
/// any truncated-Euclidean direction. A point is in the shell when its
/// distance from the box centre exceeds `(1 - BOUNDARY_SHELL) / 2` of the
/// box length.
pub fn boundary_mass_fraction<T: Real>(f: &SpatialField<T>) -> Result<T> {
    let grid = f.grid();
    let euclid: Vec<usize> = (0..grid.dimension())
        .filter(|&a| !grid.directions()[a].is_torus())
        .collect();
    if euclid.is_empty() {
        return Err(Error::NoEuclideanDirection);
    }
    let half_inner = T::lit((1.0 - BOUNDARY_SHELL) / 2.0);
    let in_shell: Vec<Vec<bool>> = euclid
        .iter()
        .map(|&a| {
            let m = grid.modes()[a];
            (0..m)
                .map(|j| {
                    let frac = T::from_count(j) / T::from_count(m) - T::lit(0.5);
                    frac.abs() >= half_inner
                })
                .collect()
        })
        .collect();
    let (mut shell, mut total) = (T::zero(), T::zero());
    for (flat, v) in f.values().iter().enumerate() {
        let p = v.norm_sqr();
        total = total + p;
        if euclid
            .iter()
            .zip(&in_shell)
            .any(|(&a, mask)| mask[grid.axis_index(flat, a)])
        {
            shell = shell + p;
        }
    }
    if total == T::zero() {
        return Ok(T::zero());
    }
    Ok(shell / total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_torus(m: usize) -> GridSpec<f64> {
        GridSpec::torus(&[1.0, 1.0, 1.0], &[m, m, m]).unwrap()
    }

    #[test]
    fn build_grid_examples() {
        let g = build_grid(3, vec![Direction::torus(1.0); 3], vec![32, 32, 32]).unwrap();
        assert_eq!(g.len(), 32 * 32 * 32);
        let g: GridSpec<f64> = build_grid(
            3,
            vec![Direction::euclidean(16.0), Direction::torus(1.0), Direction::torus(1.0)],
            vec![128, 32, 32],
        )
        .unwrap();
        assert!(g.has_euclidean());
        assert_eq!(g.min_torus_period(), Some(1.0));
        assert!((g.cell_volume() - 16.0 / 128.0 / 32.0 / 32.0).abs() < 1e-18);
    }

    #[test]
    fn build_grid_rejections() {
        let dirs = vec![Direction::torus(1.0); 3];
        assert_eq!(
            build_grid(3, dirs.clone(), vec![31, 32, 32]).unwrap_err(),
            Error::OddModeCount { axis: 0, modes: 31 }
        );
        assert_eq!(
            build_grid(3, vec![Direction::torus(1.0), Direction::torus(-1.0), Direction::torus(1.0)], vec![8, 8, 8])
                .unwrap_err(),
            Error::NonPositivePeriod { axis: 1 }
        );
        assert_eq!(
            build_grid(5, vec![Direction::torus(1.0); 5], vec![8; 5]).unwrap_err(),
            Error::UnsupportedDimension(5)
        );
        assert!(matches!(
            build_grid(3, dirs, vec![8, 8]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lattice_indexing() {
        let g = GridSpec::torus(&[1.0, 2.0], &[8, 4]).unwrap();
        assert_eq!(g.mode_number(0, 3), 3);
        assert_eq!(g.mode_number(0, 4), 4);
        assert_eq!(g.mode_number(0, 5), -3);
        for flat in 0..g.len() {
            if g.is_nyquist(flat) {
                continue;
            }
            let m = g.mode_vector(flat);
            assert_eq!(g.flat_index(&m), Some(flat));
            let neg: Vec<i64> = m.iter().map(|x| -x).collect();
            assert_eq!(g.flat_index(&neg), Some(g.negation_map()[flat]));
        }
        assert_eq!(g.flat_index(&[-4, 0]), None);
        let xi = g.wavevector(g.flat_index(&[1, -1]).unwrap());
        assert!((xi[0] - 2.0 * std::f64::consts::PI).abs() < 1e-15);
        assert!((xi[1] + std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn constant_field_is_zero_frequency_delta() {
        let g = unit_torus(16);
        let c = Complex::new(0.7, -0.2);
        let spec = SpatialField::constant(&g, c).to_spectral();
        let zero = g.flat_index(&[0, 0, 0]).unwrap();
        for (i, v) in spec.coeffs().iter().enumerate() {
            let expect = if i == zero { c } else { Complex::zero() };
            assert!((v - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_is_single_coefficient() {
        let g = GridSpec::torus(&[1.0, 1.3, 0.7], &[8, 16, 8]).unwrap();
        let mode = [2, -5, 3];
        let f = SpatialField::plane_wave(&g, &mode, Complex::new(1.0, 0.0)).unwrap();
        let spec = f.to_spectral();
        let at = g.flat_index(&mode).unwrap();
        for (i, v) in spec.coeffs().iter().enumerate() {
            let expect = if i == at { g.volume() } else { 0.0 };
            assert!((v - Complex::new(expect, 0.0)).norm() < 1e-12, "{i}: {v}");
        }
        let back = SpectralField::delta(&g, &mode, Complex::new(g.volume(), 0.0))
            .unwrap()
            .to_spatial();
        assert!(back.sub(&f).unwrap().l2_norm() < 1e-12);
    }

    #[test]
    fn delta_at_zero_is_constant() {
        let g = unit_torus(8);
        let c = Complex::new(-1.5, 2.0);
        let f = SpectralField::delta(&g, &[0, 0, 0], c).unwrap().to_spatial();
        assert!(f.values().iter().all(|v| (v - c).norm() < 1e-13));
    }

    #[test]
    fn nyquist_is_zeroed() {
        let g = GridSpec::torus(&[1.0, 1.0, 1.0], &[4, 4, 4]).unwrap();
        let f = SpectralField::new(&g, vec![Complex::new(1.0, 1.0); g.len()]).unwrap();
        for (i, c) in f.coeffs().iter().enumerate() {
            assert_eq!(g.is_nyquist(i), c.norm() == 0.0);
        }
        // 3^3 retained points out of 4^3
        assert_eq!(f.coeffs().iter().filter(|c| c.norm() > 0.0).count(), 27);
    }

    #[test]
    fn pad_then_truncate_is_identity() {
        let g: GridSpec<f64> = GridSpec::torus(&[1.0, 2.0, 3.0], &[8, 4, 6]).unwrap();
        let f = SpectralField::from_fn(&g, |xi| Complex::new(xi[0], xi[1] - xi[2]));
        let padded = f.pad();
        assert!((padded.mass() - f.mass()).abs() < 1e-12 * f.mass());
        assert_eq!(padded.truncate_to(&g).unwrap(), f);
        // padding does not move the continuum samples
        let coarse = f.to_spatial();
        let fine = padded.to_spatial();
        for flat in 0..g.len() {
            let m: Vec<usize> = (0..3).map(|a| 2 * g.axis_index(flat, a)).collect();
            let ff = m[0] * fine.grid().strides()[0] + m[1] * fine.grid().strides()[1] + m[2];
            assert!((coarse.values()[flat] - fine.values()[ff]).norm() < 1e-12);
        }
    }

    #[test]
    fn boundary_mass_examples() {
        let g: GridSpec<f64> = GridSpec::new(
            vec![Direction::euclidean(16.0), Direction::torus(1.0), Direction::torus(1.0)],
            vec![128, 8, 8],
        )
        .unwrap();
        let constant = SpatialField::constant(&g, Complex::new(1.0, 0.0));
        let frac = boundary_mass_fraction(&constant).unwrap();
        assert!((frac - 13.0 / 128.0).abs() < 1e-14, "{frac}");

        let width = 16.0 / 20.0;
        let bump = SpatialField::from_fn(&g, |x| {
            Complex::new((-(x[0] - 8.0).powi(2) / (2.0 * width * width)).exp(), 0.0)
        });
        assert!(boundary_mass_fraction(&bump).unwrap() < 1e-10);

        assert_eq!(
            boundary_mass_fraction(&SpatialField::zeros(&unit_torus(8))).unwrap_err(),
            Error::NoEuclideanDirection
        );
    }

    #[test]
    fn display_is_stable() {
        let g = GridSpec::new(
            vec![Direction::euclidean(8.0), Direction::torus(1.0), Direction::torus(0.5)],
            vec![16, 8, 8],
        )
        .unwrap();
        assert_eq!(
            g.to_string(),
            "d=3 directions=[euclidean:8.0,torus:1.0,torus:0.5] modes=[16,8,8]"
        );
    }
}
