//! Time stepping for `i u_t + Delta u = |u|^2 u` by Strang splitting.
//!
//! Both sub-flows are exact: the linear flow is diagonal in frequency
//! (`exp(-i t |xi|^2)`) and the nonlinear flow `i u_t = |u|^2 u` is
//! diagonal in space (`u -> u exp(-i |u|^2 t)`, since `|u|` is constant
//! along it). One step is `L(dt/2) N(dt) L(dt/2)`.
//!
//! With `dealias` on, the nonlinear sub-flow is evaluated on the 2x
//! zero-padded lattice and truncated back, so that the cubic interaction
//! does not wrap spurious frequencies onto the retained modes.

use std::io::{self, Write};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{boundary_mass_fraction, GridSpec, SpatialField, SpectralField};
use crate::scalar::Real;

/// Default boundary-mass abort threshold.
pub const DEFAULT_BOUNDARY_MASS_THRESHOLD: f64 = 1e-6;

/// Phase budget per step at the top lattice frequency for [`default_dt`].
pub const DEFAULT_PHASE_PER_STEP: f64 = 0.1;

/// `dt = 0.1 / xi_max^2`: at most 0.1 rad of linear phase per step.
pub fn default_dt<T: Real>(grid: &GridSpec<T>) -> T {
    let k = grid.max_xi();
    T::lit(DEFAULT_PHASE_PER_STEP) / (k * k)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolutionConfig<T> {
    pub dt: T,
    pub t_end: T,
    pub record_stride: usize,
    pub dealias: bool,
    pub boundary_mass_threshold: T,
}

impl<T: Real> EvolutionConfig<T> {
    /// Records every step, dealiasing on, default boundary threshold.
    pub fn new(dt: T, t_end: T) -> Self {
        Self {
            dt,
            t_end,
            record_stride: 1,
            dealias: true,
            boundary_mass_threshold: T::lit(DEFAULT_BOUNDARY_MASS_THRESHOLD),
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    /// Number of steps; `t_end` must be an integer multiple of `dt` and of
    /// the recording interval.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step {}", self.dt)));
        }
        if !(self.t_end >= self.dt) {
            return Err(Error::InvalidParameter(format!(
                "t_end = {} shorter than dt = {}",
                self.t_end, self.dt
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParameter("record stride 0".into()));
        }
        let ratio = self.t_end / self.dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > T::lit(1e-6) * steps {
            return Err(Error::InvalidParameter(format!(
                "t_end = {} is not a multiple of dt = {}",
                self.t_end, self.dt
            )));
        }
        let steps = steps.to_usize().expect("finite step count");
        if steps % self.record_stride != 0 {
            return Err(Error::InvalidParameter(format!(
                "{steps} steps not divisible by record stride {}",
                self.record_stride
            )));
        }
        Ok(steps)
    }
}

/// Uniformly sampled fields of one run.
#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    grid: GridSpec<T>,
    times: Vec<T>,
    snapshots: Vec<SpectralField<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(grid: &GridSpec<T>) -> Self {
        Self { grid: grid.clone(), times: Vec::new(), snapshots: Vec::new() }
    }

    /// Builds a trajectory from samples, checking grid and uniform spacing.
    pub fn from_samples(
        grid: &GridSpec<T>,
        times: Vec<T>,
        snapshots: Vec<SpectralField<T>>,
    ) -> Result<Self> {
        if times.len() != snapshots.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), got: snapshots.len() });
        }
        let mut traj = Self::new(grid);
        for (t, s) in times.into_iter().zip(snapshots) {
            traj.push(t, s)?;
        }
        Ok(traj)
    }

    pub fn push(&mut self, t: T, field: SpectralField<T>) -> Result<()> {
        self.grid.ensure_same(field.grid())?;
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::InvalidParameter("times must increase".into()));
            }
            if self.times.len() >= 2 {
                let h = self.times[1] - self.times[0];
                if ((t - last) - h).abs() > T::lit(1e-9) * h.max(T::one()) {
                    return Err(Error::InvalidParameter("non-uniform sampling".into()));
                }
            }
        }
        self.times.push(t);
        self.snapshots.push(field);
        Ok(())
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn snapshots(&self) -> &[SpectralField<T>] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Sample spacing; `None` for fewer than two samples.
    pub fn spacing(&self) -> Option<T> {
        (self.times.len() >= 2).then(|| self.times[1] - self.times[0])
    }

    pub fn last(&self) -> Option<&SpectralField<T>> {
        self.snapshots.last()
    }

    /// Applies `f` to every snapshot.
    pub fn map(&self, f: impl Fn(&SpectralField<T>) -> SpectralField<T>) -> Self {
        Self {
            grid: self.grid.clone(),
            times: self.times.clone(),
            snapshots: self.snapshots.iter().map(f).collect(),
        }
    }
}

/// Free evolution `e^{it Delta} u0` sampled at `t_k = k * dt`, `k = 0..=steps`.
pub fn free_trajectory<T: Real>(u0: &SpectralField<T>, dt: T, steps: usize) -> Trajectory<T> {
    let grid = u0.grid();
    let mut traj = Trajectory::new(grid);
    for k in 0..=steps {
        let t = T::from_count(k) * dt;
        traj.push(t, crate::multipliers::free_propagate(u0, t))
            .expect("uniform free samples");
    }
    traj
}

/// `|f|^2 f`, alias-free when `dealias` is on.
pub fn cubic_term<T: Real>(f: &SpectralField<T>, dealias: bool) -> SpectralField<T> {
    let cube = |u: &mut SpatialField<T>| {
        u.values_mut().par_iter_mut().for_each(|v| *v = *v * v.norm_sqr());
    };
    if dealias {
        let mut fine = f.pad().to_spatial();
        cube(&mut fine);
        fine.to_spectral()
            .truncate_to(f.grid())
            .expect("padded grid of f")
    } else {
        let mut u = f.to_spatial();
        cube(&mut u);
        u.to_spectral()
    }
}

/// Exact flow of `i u_t = |u|^2 u` over `dt`: `u exp(-i |u|^2 dt)` pointwise.
pub fn nonlinear_step<T: Real>(f: &SpatialField<T>, dt: T) -> SpatialField<T> {
    let mut out = f.clone();
    rotate(out.values_mut(), dt);
    out
}

/// In-place nonlinear rotation; returns `false` if any value is non-finite.
fn rotate<T: Real>(values: &mut [Complex<T>], dt: T) -> bool {
    values
        .par_iter_mut()
        .map(|v| {
            let (s, c) = (-v.norm_sqr() * dt).sin_cos();
            *v = *v * Complex::new(c, s);
            v.re.is_finite() && v.im.is_finite()
        })
        .reduce(|| true, |a, b| a && b)
}

/// One Strang step on the native lattice: `L(dt/2) N(dt) L(dt/2)`.
pub fn strang_step<T: Real>(f: &SpectralField<T>, dt: T) -> SpectralField<T> {
    let mut state = f.clone();
    Stepper::new(f.grid(), dt, false).step(&mut state, T::zero()).ok();
    state
}

/// Precomputed Strang stepper for a fixed grid and time step.
pub struct Stepper<T: Real> {
    grid: GridSpec<T>,
    dt: T,
    dealias: bool,
    half_phase: Vec<Complex<T>>,
}

impl<T: Real> Stepper<T> {
    pub fn new(grid: &GridSpec<T>, dt: T, dealias: bool) -> Self {
        let half = dt / T::lit(2.0);
        let half_phase = grid
            .xi_norm_sq()
            .iter()
            .map(|&k2| Complex::from_polar(T::one(), -half * k2))
            .collect();
        Self { grid: grid.clone(), dt, dealias, half_phase }
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    fn half_linear(&self, coeffs: &mut SpectralField<T>) {
        coeffs.modify(|c| {
            c.par_iter_mut()
                .zip(self.half_phase.par_iter())
                .for_each(|(c, p)| *c = *c * p);
        });
    }

    /// Advances `state` by one step; `t` is only used in error reports.
    pub fn step(&self, state: &mut SpectralField<T>, t: T) -> Result<()> {
        self.half_linear(state);
        let finite;
        if self.dealias {
            let mut fine = state.pad().to_spatial();
            finite = rotate(fine.values_mut(), self.dt);
            *state = fine.to_spectral().truncate_to(&self.grid)?;
        } else {
            let mut u = state.to_spatial();
            finite = rotate(u.values_mut(), self.dt);
            *state = u.to_spectral();
        }
        if !finite {
            return Err(Error::NonFinite { t: t.as_f64() });
        }
        self.half_linear(state);
        Ok(())
    }
}

fn check_boundary<T: Real>(f: &SpectralField<T>, t: T, threshold: T) -> Result<()> {
    if !f.grid().has_euclidean() {
        return Ok(());
    }
    let fraction = boundary_mass_fraction(&f.to_spatial())?;
    if fraction > threshold {
        return Err(Error::BoundaryMassExceeded {
            t: t.as_f64(),
            fraction: fraction.as_f64(),
            threshold: threshold.as_f64(),
        });
    }
    Ok(())
}

/// Evolves `u0` and hands every recorded snapshot (including `t = 0`) to
/// `sink`. Returns the final state.
pub fn evolve_with<T: Real>(
    u0: &SpectralField<T>,
    cfg: &EvolutionConfig<T>,
    mut sink: impl FnMut(T, &SpectralField<T>) -> Result<()>,
) -> Result<SpectralField<T>> {
    let grid = u0.grid();
    grid.check_dynamics()?;
    let steps = cfg.steps()?;
    if !u0.is_finite() {
        return Err(Error::NonFinite { t: 0.0 });
    }
    check_boundary(u0, T::zero(), cfg.boundary_mass_threshold)?;
    let stepper = Stepper::new(grid, cfg.dt, cfg.dealias);
    let mut state = u0.clone();
    sink(T::zero(), &state)?;
    for k in 1..=steps {
        let t = T::from_count(k) * cfg.dt;
        stepper.step(&mut state, t)?;
        if k % cfg.record_stride == 0 {
            check_boundary(&state, t, cfg.boundary_mass_threshold)?;
            sink(t, &state)?;
        }
    }
    Ok(state)
}

/// Evolves `u0` and collects the recorded snapshots.
pub fn evolve<T: Real>(u0: &SpectralField<T>, cfg: &EvolutionConfig<T>) -> Result<Trajectory<T>> {
    let mut traj = Trajectory::new(u0.grid());
    evolve_with(u0, cfg, |t, f| traj.push(t, f.clone()))?;
    Ok(traj)
}

/// `u^lambda(x) = u(x / lambda) / lambda` on the grid with every period
/// multiplied by `lambda`. Coefficients keep their lattice index and pick up
/// `lambda^(d-1)` from the cell volume.
pub fn rescale<T: Real>(f: &SpectralField<T>, lambda: T) -> Result<SpectralField<T>> {
    let grid = f.grid().rescaled(lambda)?;
    let d = f.grid().dimension() as i32;
    let factor = lambda.powi(d - 1);
    SpectralField::new(&grid, f.coeffs().iter().map(|c| c.scale(factor)).collect())
}

/// Streams snapshots into a binary file.
///
/// Layout: a text header of `key value` lines terminated by `end\n`
/// (`format`, `grid`, `dt`, `stride`, `endian`, `layout`), followed by one
/// record per snapshot: the time as a little-endian `f64`, then the real and
/// imaginary parts of every spatial value as little-endian `f64`, in
/// row-major lattice order.
pub struct SnapshotWriter<W: Write> {
    out: W,
    len: usize,
}

impl<W: Write> SnapshotWriter<W> {
    pub fn new<T: Real>(mut out: W, grid: &GridSpec<T>, dt: T, stride: usize) -> io::Result<Self> {
        writeln!(out, "format wgnls-snapshot-1")?;
        writeln!(out, "grid {grid}")?;
        writeln!(out, "dt {:?}", dt.as_f64())?;
        writeln!(out, "stride {stride}")?;
        writeln!(out, "endian little")?;
        writeln!(out, "layout t:f64 (re:f64 im:f64)*{}", grid.len())?;
        writeln!(out, "end")?;
        Ok(Self { out, len: grid.len() })
    }

    pub fn write<T: Real>(&mut self, t: T, field: &SpatialField<T>) -> io::Result<()> {
        if field.values().len() != self.len {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, "grid size mismatch"));
        }
        let mut buf = Vec::with_capacity(8 * (1 + 2 * self.len));
        buf.extend_from_slice(&t.as_f64().to_le_bytes());
        for v in field.values() {
            buf.extend_from_slice(&v.re.as_f64().to_le_bytes());
            buf.extend_from_slice(&v.im.as_f64().to_le_bytes());
        }
        self.out.write_all(&buf)
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// Maximum pointwise deviation between two spatial fields.
pub fn max_deviation<T: Real>(a: &SpatialField<T>, b: &SpatialField<T>) -> Result<T> {
    a.grid().ensure_same(b.grid())?;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .fold(T::zero(), |acc, (x, y)| acc.max((x - y).norm())))
}

/// Relative `L^2` distance `||a - b|| / ||b||` (absolute when `b = 0`).
pub fn relative_error<T: Real>(a: &SpectralField<T>, b: &SpectralField<T>) -> Result<T> {
    let diff = a.sub(b)?.l2_norm();
    let norm = b.l2_norm();
    Ok(if norm.is_zero() { diff } else { diff / norm })
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use num_traits::Zero;

    use super::*;
    use crate::grid::Direction;
    use crate::multipliers::free_propagate;
    use crate::testutil::random_spectrum;

    fn torus(m: usize, p: f64) -> GridSpec<f64> {
        GridSpec::torus(&[p, p, p], &[m, m, m]).unwrap()
    }

    /// Coefficients of `|u|^2 u` by direct convolution in frequency space.
    fn brute_force_cubic(f: &SpectralField<f64>) -> SpectralField<f64> {
        let g = f.grid();
        let w = g.frequency_weight();
        let support: Vec<(Vec<i64>, Complex<f64>)> = (0..g.len())
            .filter(|&i| f.coeffs()[i].norm() > 0.0)
            .map(|i| (g.mode_vector(i), f.coeffs()[i]))
            .collect();
        // |u|^2: sum over a - b = eta of u(a) conj(u(b))
        let mut density: HashMap<Vec<i64>, Complex<f64>> = HashMap::new();
        for (a, ua) in &support {
            for (b, ub) in &support {
                let eta: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                *density.entry(eta).or_default() += ua * ub.conj() * w;
            }
        }
        let mut out = SpectralField::zeros(g);
        out.modify(|c| {
            for (eta, d) in &density {
                for (m, um) in &support {
                    let zeta: Vec<i64> = eta.iter().zip(m).map(|(x, y)| x + y).collect();
                    if let Some(j) = g.flat_index(&zeta) {
                        c[j] += d * um * w;
                    }
                }
            }
        });
        out
    }

    fn band_limited(g: &GridSpec<f64>, top: i64, seed: u64) -> SpectralField<f64> {
        let base = random_spectrum(g, seed);
        let mut f = base.clone();
        f.modify(|c| {
            for (i, v) in c.iter_mut().enumerate() {
                if g.mode_vector(i).iter().any(|m| m.abs() > top) {
                    *v = Complex::zero();
                }
            }
        });
        f
    }

    #[test]
    fn cubic_term_constant_and_plane_wave() {
        let g = torus(8, 1.0);
        let c = Complex::new(0.6, -0.8);
        let u = SpatialField::constant(&g, c).to_spectral();
        let out = cubic_term(&u, true).to_spatial();
        let expect = c * c.norm_sqr();
        assert!(out.values().iter().all(|v| (v - expect).norm() < 1e-13));

        let a = Complex::new(0.3, 0.4);
        let wave = SpectralField::delta(&g, &[3, -2, 1], a).unwrap();
        let out = cubic_term(&wave, true);
        let expect = wave.scale(Complex::from(a.norm_sqr() * g.frequency_weight().powi(2)));
        assert!(relative_error(&out, &expect).unwrap() < 1e-13);
    }

    #[test]
    fn dealiased_cubic_matches_triple_convolution() {
        let g = torus(16, 1.0);
        let f = band_limited(&g, 4, 21);
        let oracle = brute_force_cubic(&f);
        let padded = cubic_term(&f, true);
        assert!(relative_error(&padded, &oracle).unwrap() < 1e-12);
        // without padding the wrapped modes contaminate the result
        let aliased = cubic_term(&f, false);
        assert!(relative_error(&aliased, &oracle).unwrap() > 1e-6);
    }

    #[test]
    fn nonlinear_step_examples() {
        let g = torus(8, 1.0);
        let f = random_spectrum(&g, 4).to_spatial();
        assert_eq!(nonlinear_step(&f, 0.0), f);
        let c = Complex::new(1.2, 0.5);
        let out = nonlinear_step(&SpatialField::constant(&g, c), 0.3);
        let expect = c * Complex::from_polar(1.0, -c.norm_sqr() * 0.3);
        assert!(out.values().iter().all(|v| (v - expect).norm() < 1e-15));
        let big = f.scale(Complex::from(40.0));
        let out = nonlinear_step(&big, 0.7);
        for (a, b) in out.values().iter().zip(big.values()) {
            assert!((a.norm() - b.norm()).abs() <= 1e-15 * b.norm().max(1.0));
        }
    }

    #[test]
    fn strang_step_examples() {
        let g = torus(16, 2.0 * std::f64::consts::PI);
        let dt = 1e-2;
        let tiny = random_spectrum(&g, 8).scale(Complex::from(1e-8));
        let linear = free_propagate(&tiny, dt);
        assert!(relative_error(&strang_step(&tiny, dt), &linear).unwrap() < 1e-14);

        let c = Complex::new(0.8, 0.6);
        let u = SpatialField::constant(&g, c).to_spectral();
        let out = strang_step(&u, dt).to_spatial();
        let expect = c * Complex::from_polar(1.0, -dt);
        assert!(out.values().iter().all(|v| (v - expect).norm() < 1e-12));
    }

    #[test]
    fn strang_is_time_reversible() {
        let g = torus(16, 2.0 * std::f64::consts::PI);
        // band-limited so the projections onto the lattice are negligible
        let u = band_limited(&g, 2, 9).scale(Complex::from(30.0));
        for dealias in [false, true] {
            let fwd = Stepper::new(&g, 1e-3, dealias);
            let back = Stepper::new(&g, -1e-3, dealias);
            let mut state = u.clone();
            fwd.step(&mut state, 0.0).unwrap();
            back.step(&mut state, 0.0).unwrap();
            let err = relative_error(&state, &u).unwrap();
            assert!(err < 1e-8, "dealias={dealias}: {err}");
        }
    }

    #[test]
    fn evolve_constant_solution() {
        let g = torus(8, 1.0);
        let u0 = SpatialField::constant(&g, Complex::new(1.0, 0.0)).to_spectral();
        let cfg = EvolutionConfig::new(1e-3, 1.0).with_stride(100);
        let traj = evolve(&u0, &cfg).unwrap();
        assert_eq!(traj.len(), 11);
        let last = traj.last().unwrap().to_spatial();
        let expect = SpatialField::constant(&g, Complex::from_polar(1.0, -1.0));
        assert!(max_deviation(&last, &expect).unwrap() < 1e-12);
        assert!((traj.spacing().unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn evolve_small_data_is_free() {
        let g = torus(16, 2.0 * std::f64::consts::PI);
        let u0 = random_spectrum(&g, 2).scale(Complex::from(1e-8));
        let cfg = EvolutionConfig::new(1e-3, 0.2).with_stride(200);
        let last = evolve(&u0, &cfg).unwrap().last().unwrap().clone();
        assert!(relative_error(&last, &free_propagate(&u0, 0.2)).unwrap() < 1e-12);
    }

    #[test]
    fn evolve_rejects_bad_configs() {
        let g = torus(8, 1.0);
        let u0 = SpectralField::zeros(&g);
        let cfg = EvolutionConfig::new(0.3, 1.0);
        assert!(matches!(evolve(&u0, &cfg), Err(Error::InvalidParameter(_))));
        let cfg = EvolutionConfig::new(0.1, 1.0).with_stride(3);
        assert!(matches!(evolve(&u0, &cfg), Err(Error::InvalidParameter(_))));
        let flat = GridSpec::torus(&[1.0, 1.0], &[8, 8]).unwrap();
        assert_eq!(
            evolve(&SpectralField::zeros(&flat), &EvolutionConfig::new(0.1, 1.0)).unwrap_err(),
            Error::UnsupportedDimension(2)
        );
    }

    #[test]
    fn evolve_detects_non_finite() {
        let g = torus(8, 1.0);
        let mut u0 = SpectralField::zeros(&g);
        u0.modify(|c| c[1] = Complex::new(f64::NAN, 0.0));
        assert!(matches!(
            evolve(&u0, &EvolutionConfig::new(0.1, 1.0)),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn evolve_aborts_on_boundary_mass() {
        let g = GridSpec::new(
            vec![Direction::euclidean(8.0), Direction::torus(1.0), Direction::torus(1.0)],
            vec![32, 8, 8],
        )
        .unwrap();
        // a packet centred at x = 4 moving right with speed 2 * 6 reaches the shell quickly
        let u0 = SpatialField::from_fn(&g, |x| {
            let env = (-(x[0] - 4.0f64).powi(2) / 0.5).exp();
            Complex::from_polar(env, 6.0 * x[0])
        })
        .to_spectral();
        let cfg = EvolutionConfig::new(1e-2, 1.0).with_stride(10);
        assert!(matches!(evolve(&u0, &cfg), Err(Error::BoundaryMassExceeded { .. })));
    }

    #[test]
    fn rescale_examples() {
        let g = torus(8, 1.0);
        let u = random_spectrum(&g, 5);
        let same = rescale(&u, 1.0).unwrap();
        assert_eq!(same, u);
        let lambda = 2.5;
        let v = rescale(&u, lambda).unwrap();
        assert!((v.mass() - lambda * u.mass()).abs() < 1e-12 * u.mass());
        let kinetic = |f: &SpectralField<f64>| f.weighted_mass(|k2| k2);
        assert!((kinetic(&v) - kinetic(&u) / lambda).abs() < 1e-12 * kinetic(&u));
        // spatial rule: values on the stretched lattice are u / lambda
        let (su, sv) = (u.to_spatial(), v.to_spatial());
        for (a, b) in su.values().iter().zip(sv.values()) {
            assert!((a / lambda - b).norm() < 1e-13);
        }
    }

    #[test]
    fn snapshot_file_layout() {
        let g = torus(8, 1.0);
        let f = random_spectrum(&g, 1).to_spatial();
        let mut w = SnapshotWriter::new(Vec::new(), &g, 0.01, 5).unwrap();
        w.write(0.0, &f).unwrap();
        w.write(0.05, &f).unwrap();
        let bytes = w.into_inner();
        let text_end = bytes.windows(4).position(|x| x == b"end\n").unwrap() + 4;
        let header = std::str::from_utf8(&bytes[..text_end]).unwrap();
        assert!(header.contains("grid d=3 directions=[torus:1.0,torus:1.0,torus:1.0] modes=[8,8,8]"));
        let record = 8 * (1 + 2 * 512);
        assert_eq!(bytes.len() - text_end, 2 * record);
        let t1 = f64::from_le_bytes(bytes[text_end + record..text_end + record + 8].try_into().unwrap());
        assert_eq!(t1, 0.05);
        let re0 = f64::from_le_bytes(bytes[text_end + 8..text_end + 16].try_into().unwrap());
        assert_eq!(re0, f.values()[0].re);
    }
}
