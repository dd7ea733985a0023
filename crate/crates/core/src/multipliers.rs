//! Frequency-diagonal operators: Littlewood–Paley cutoffs, the I- and
//! D-multipliers, Bessel potentials, derivatives and the free propagator.
//!
//! Littlewood–Paley cutoffs use the per-coordinate product `eta^d(xi / N)`,
//! while the I- and D-symbols are radial in the Euclidean norm `|xi|`.

use std::io::{self, Write};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SpectralField};
use crate::scalar::Real;

/// Threshold for [`check_ibasic`].
pub const IBASIC_THRESHOLD: f64 = 4.0;

/// Upper constant of the smoothing sandwich `1 <= m <xi>^(1-s) <= C N^(1-s)`.
pub const SMOOTHING_CONSTANT: f64 = 3.0;

/// Smooth step on `[0, 1]` built from `psi(x) = exp(-1/x)`:
/// `psi(x) / (psi(x) + psi(1 - x))`, which is 0 for `x <= 0`, 1 for `x >= 1`
/// and `C^inf` in between.
pub fn smooth_step<T: Real>(x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    if x >= T::one() {
        return T::one();
    }
    let psi = |y: T| (-y.recip()).exp();
    let a = psi(x);
    a / (a + psi(T::one() - x))
}

/// Even cutoff: 1 on `|r| <= 1`, 0 on `|r| >= 2`, `1 - smooth_step(|r| - 1)`
/// in between.
pub fn eta1<T: Real>(r: T) -> T {
    T::one() - smooth_step(r.abs() - T::one())
}

/// `eta^d(xi / n) = prod_i eta1(xi_i / n)`.
pub fn eta_product<T: Real>(xi: &[T], n: T) -> T {
    xi.iter().fold(T::one(), |acc, &x| acc * eta1(x / n))
}

/// Log-space cubic Hermite blend used on `(N, 2N)`.
///
/// Returns `log(symbol)` at ratio `r = |xi| / N` for a symbol equal to 1
/// below `N` and to `r^slope` above `2N`; value and first derivative (in
/// `log r`) match both tails, and the blend is monotone.
fn log_blend<T: Real>(r: T, slope: T) -> T {
    let h = T::LN_2();
    let t = r.ln() / h;
    let two = T::lit(2.0);
    slope * h * (two * t * t - t * t * t)
}

/// I-operator symbol `m(|xi|)`: 1 for `|xi| <= N`, `(N/|xi|)^(1-s)` for
/// `|xi| >= 2N`. No validation; see [`ISymbol::new`].
pub fn i_symbol<T: Real>(xi_norm: T, n: T, s: T) -> T {
    let r = xi_norm / n;
    if r <= T::one() {
        T::one()
    } else if r >= T::lit(2.0) {
        r.powf(s - T::one())
    } else {
        log_blend(r, s - T::one()).exp()
    }
}

/// D-operator symbol: 1 for `|xi| <= N`, `|xi|/N` for `|xi| >= 2N`.
pub fn d_symbol<T: Real>(xi_norm: T, n: T) -> T {
    let r = xi_norm / n;
    if r <= T::one() {
        T::one()
    } else if r >= T::lit(2.0) {
        r
    } else {
        log_blend(r, T::one()).exp()
    }
}

/// Japanese bracket `<xi> = (1 + |xi|^2)^(1/2)` from `|xi|^2`.
#[inline]
pub fn bracket<T: Real>(xi_norm_sq: T) -> T {
    (T::one() + xi_norm_sq).sqrt()
}

/// A multiplier applied diagonally in frequency.
pub trait Symbol<T: Real>: Sync {
    fn name(&self) -> &'static str;

    fn params(&self) -> Vec<(&'static str, f64)>;

    /// Real symbols commute with complex conjugation of fields.
    fn is_real(&self) -> bool {
        true
    }

    /// Value at wavevector `xi`; `xi_norm_sq` is `|xi|^2`.
    fn eval(&self, xi: &[T], xi_norm_sq: T) -> Complex<T>;
}

/// Multiplies every coefficient of `f` by `symbol`.
pub fn apply<T: Real, S: Symbol<T> + ?Sized>(f: &SpectralField<T>, symbol: &S) -> SpectralField<T> {
    let grid = f.grid();
    let norms = grid.xi_norm_sq();
    let d = grid.dimension();
    let coeffs: Vec<Complex<T>> = f
        .coeffs()
        .par_iter()
        .enumerate()
        .map_init(
            || vec![T::zero(); d],
            |xi, (flat, c)| {
                grid.wavevector_into(flat, xi);
                c * symbol.eval(xi, norms[flat])
            },
        )
        .collect();
    SpectralField::new(grid, coeffs).expect("same lattice")
}

/// `P_{<=N}`: product cutoff `eta^d(xi / N)`.
#[derive(Clone, Copy, Debug)]
pub struct LowPass<T> {
    pub n: T,
}

impl<T: Real> Symbol<T> for LowPass<T> {
    fn name(&self) -> &'static str {
        "low_pass"
    }
    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("N", self.n.as_f64())]
    }
    fn eval(&self, xi: &[T], _: T) -> Complex<T> {
        Complex::from(eta_product(xi, self.n))
    }
}

/// `P_N = P_{<=N} - P_{<=N/2}`.
#[derive(Clone, Copy, Debug)]
pub struct BandPass<T> {
    pub n: T,
}

impl<T: Real> Symbol<T> for BandPass<T> {
    fn name(&self) -> &'static str {
        "band_pass"
    }
    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("N", self.n.as_f64())]
    }
    fn eval(&self, xi: &[T], _: T) -> Complex<T> {
        let half = self.n / T::lit(2.0);
        Complex::from(eta_product(xi, self.n) - eta_product(xi, half))
    }
}

/// The I-operator symbol `m(|xi|)` with parameters `N >= 1`, `s in [1/2, 1]`.
#[derive(Clone, Copy, Debug)]
pub struct ISymbol<T> {
    n: T,
    s: T,
}

impl<T: Real> ISymbol<T> {
    pub fn new(n: T, s: T) -> Result<Self> {
        if !(n >= T::one()) {
            return Err(Error::InvalidParameter(format!("I-operator needs N >= 1, got {n}")));
        }
        if !(s >= T::lit(0.5) && s <= T::one()) {
            return Err(Error::InvalidParameter(format!("I-operator needs s in [1/2, 1], got {s}")));
        }
        Ok(Self { n, s })
    }

    pub fn value(&self, xi_norm: T) -> T {
        i_symbol(xi_norm, self.n, self.s)
    }
}

impl<T: Real> Symbol<T> for ISymbol<T> {
    fn name(&self) -> &'static str {
        "i_operator"
    }
    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("N", self.n.as_f64()), ("s", self.s.as_f64())]
    }
    fn eval(&self, _: &[T], xi_norm_sq: T) -> Complex<T> {
        Complex::from(self.value(xi_norm_sq.sqrt()))
    }
}

/// The D-operator symbol with parameter `N >= 1`.
#[derive(Clone, Copy, Debug)]
pub struct DSymbol<T> {
    n: T,
}

impl<T: Real> DSymbol<T> {
    pub fn new(n: T) -> Result<Self> {
        if !(n >= T::one()) {
            return Err(Error::InvalidParameter(format!("D-operator needs N >= 1, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn value(&self, xi_norm: T) -> T {
        d_symbol(xi_norm, self.n)
    }
}

impl<T: Real> Symbol<T> for DSymbol<T> {
    fn name(&self) -> &'static str {
        "d_operator"
    }
    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("N", self.n.as_f64())]
    }
    fn eval(&self, _: &[T], xi_norm_sq: T) -> Complex<T> {
        Complex::from(self.value(xi_norm_sq.sqrt()))
    }
}

/// `exp(-i t |xi|^2)`, the symbol of `e^{it Delta}`.
#[derive(Clone, Copy, Debug)]
pub struct Propagator<T> {
    pub t: T,
}

impl<T: Real> Symbol<T> for Propagator<T> {
    fn name(&self) -> &'static str {
        "free_propagator"
    }
    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("t", self.t.as_f64())]
    }
    fn is_real(&self) -> bool {
        false
    }
    fn eval(&self, _: &[T], xi_norm_sq: T) -> Complex<T> {
        Complex::from_polar(T::one(), -self.t * xi_norm_sq)
    }
}

/// `<xi>^s`.
#[derive(Clone, Copy, Debug)]
pub struct BesselPotential<T> {
    pub s: T,
}

impl<T: Real> Symbol<T> for BesselPotential<T> {
    fn name(&self) -> &'static str {
        "bessel_potential"
    }
    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("s", self.s.as_f64())]
    }
    fn eval(&self, _: &[T], xi_norm_sq: T) -> Complex<T> {
        Complex::from((T::one() + xi_norm_sq).powf(self.s / T::lit(2.0)))
    }
}

/// `i xi_axis`, the symbol of the partial derivative along `axis`.
#[derive(Clone, Copy, Debug)]
pub struct Derivative {
    pub axis: usize,
}

impl<T: Real> Symbol<T> for Derivative {
    fn name(&self) -> &'static str {
        "derivative"
    }
    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("axis", self.axis as f64)]
    }
    fn is_real(&self) -> bool {
        false
    }
    fn eval(&self, xi: &[T], _: T) -> Complex<T> {
        Complex::new(T::zero(), xi[self.axis])
    }
}

fn check_positive<T: Real>(n: T) -> Result<()> {
    if n > T::zero() && n.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("cutoff scale must be positive, got {n}")))
    }
}

pub fn project_leq<T: Real>(f: &SpectralField<T>, n: T) -> Result<SpectralField<T>> {
    check_positive(n)?;
    Ok(apply(f, &LowPass { n }))
}

pub fn project_band<T: Real>(f: &SpectralField<T>, n: T) -> Result<SpectralField<T>> {
    check_positive(n)?;
    Ok(apply(f, &BandPass { n }))
}

pub fn apply_i<T: Real>(f: &SpectralField<T>, n: T, s: T) -> Result<SpectralField<T>> {
    Ok(apply(f, &ISymbol::new(n, s)?))
}

pub fn apply_d<T: Real>(f: &SpectralField<T>, n: T) -> Result<SpectralField<T>> {
    Ok(apply(f, &DSymbol::new(n)?))
}

pub fn free_propagate<T: Real>(f: &SpectralField<T>, t: T) -> SpectralField<T> {
    apply(f, &Propagator { t })
}

pub fn bessel_power<T: Real>(f: &SpectralField<T>, s: T) -> SpectralField<T> {
    apply(f, &BesselPotential { s })
}

/// One field per direction: `i xi_j u_hat`.
pub fn gradient<T: Real>(f: &SpectralField<T>) -> Vec<SpectralField<T>> {
    (0..f.grid().dimension())
        .map(|axis| apply(f, &Derivative { axis }))
        .collect()
}

/// Outcome of [`check_ibasic`].
#[derive(Clone, Debug, PartialEq)]
pub struct IBasicReport {
    pub max_ratio: f64,
    pub threshold: f64,
    pub passed: bool,
    /// Number of lattice frequencies with `|xi| >= N`.
    pub points: usize,
}

/// Maximizes `N^alpha / (m(|xi|) |xi|^alpha)` over retained lattice
/// frequencies with `|xi| >= N`.
pub fn check_ibasic<T: Real>(grid: &GridSpec<T>, n: T, s: T, alpha: T) -> Result<IBasicReport> {
    let symbol = ISymbol::new(n, s)?;
    if alpha < T::one() - s {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} below 1 - s")));
    }
    let mut max_ratio = T::zero();
    let mut points = 0;
    for (flat, &k2) in grid.xi_norm_sq().iter().enumerate() {
        let k = k2.sqrt();
        if k < n || grid.is_nyquist(flat) {
            continue;
        }
        points += 1;
        let ratio = (n / k).powf(alpha) / symbol.value(k);
        max_ratio = max_ratio.max(ratio);
    }
    if points == 0 {
        return Err(Error::EmptyRange { n: n.as_f64() });
    }
    let max_ratio = max_ratio.as_f64();
    Ok(IBasicReport {
        max_ratio,
        threshold: IBASIC_THRESHOLD,
        passed: max_ratio <= IBASIC_THRESHOLD,
        points,
    })
}

/// Extremes of `m(|xi|) <xi>^(1-s)` over the lattice, to be compared with
/// `1 <= . <= SMOOTHING_CONSTANT * N^(1-s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothingBounds {
    pub min: f64,
    pub max: f64,
    pub upper_bound: f64,
}

impl SmoothingBounds {
    pub fn holds(&self) -> bool {
        self.min >= 1.0 && self.max <= self.upper_bound
    }
}

pub fn smoothing_bounds<T: Real>(grid: &GridSpec<T>, n: T, s: T) -> Result<SmoothingBounds> {
    let symbol = ISymbol::new(n, s)?;
    let exponent = T::one() - s;
    let (min, max) = grid
        .xi_norm_sq()
        .iter()
        .enumerate()
        .filter(|(flat, _)| !grid.is_nyquist(*flat))
        .map(|(_, &k2)| symbol.value(k2.sqrt()) * bracket(k2).powf(exponent))
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)));
    Ok(SmoothingBounds {
        min: min.as_f64(),
        max: max.as_f64(),
        upper_bound: SMOOTHING_CONSTANT * n.as_f64().powf(exponent.as_f64()),
    })
}

/// Writes one line per retained lattice frequency: the wavevector components
/// followed by the real and imaginary parts of the symbol.
pub fn write_symbol_table<T: Real, S: Symbol<T> + ?Sized, W: Write>(
    grid: &GridSpec<T>,
    symbol: &S,
    mut out: W,
) -> io::Result<()> {
    write!(out, "# symbol={}", symbol.name())?;
    for (k, v) in symbol.params() {
        write!(out, " {k}={v:?}")?;
    }
    writeln!(out, " grid={grid}")?;
    let norms = grid.xi_norm_sq();
    let mut xi = vec![T::zero(); grid.dimension()];
    for flat in 0..grid.len() {
        if grid.is_nyquist(flat) {
            continue;
        }
        grid.wavevector_into(flat, &mut xi);
        let v = symbol.eval(&xi, norms[flat]);
        for x in &xi {
            write!(out, "{:.16e} ", x.as_f64())?;
        }
        writeln!(out, "{:.16e} {:.16e}", v.re.as_f64(), v.im.as_f64())?;
    }
    Ok(())
}
