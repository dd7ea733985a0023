//! Bilinear interaction of free waves at separated frequencies.
//!
//! For free solutions the space-time norm `||e^{itD}u e^{itD}v||_{L^2([0,T] x M)}`
//! is a finite exponential sum. Grouping frequency pairs by their sum `zeta`,
//!
//! `int_0^T ||uv||^2 dt = w^3 sum_zeta sum_{p,q} a_p conj(a_q) K(w_p - w_q)`
//!
//! with `a_p = u_hat(xi1) v_hat(xi2)`, `w_p = |xi1|^2 + |xi2|^2` and
//! `K(w) = int_0^T e^{-itw} dt`. This is evaluated exactly; no product is
//! formed on a lattice, so nothing aliases. [`bilinear_norm_quadrature`]
//! computes the same quantity by sampling in time.

use std::time::Instant;

use num_complex::Complex;
use rayon::prelude::*;

use super::bounds::{bilinear_bound, n2_sqrt_bound};
use super::data::{random_annulus_data, AnnulusDataSpec};
use super::report::{BoundComparison, ProbeReport};
use super::derive_seed;
use crate::dynamics::free_trajectory;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, SpectralField};
use crate::scalar::Real;

/// Largest tolerated measured/bound ratio in sweeps.
pub const BOUND_TOLERANCE: f64 = 4.0;
/// Largest tolerated growth of the mean ratio/bound between consecutive N1.
pub const TREND_TOLERANCE: f64 = 2.0;
/// Default time horizon, inside `0 < T < 1`.
pub const DEFAULT_T: f64 = 0.99;

pub const COLUMNS: [&str; 10] = [
    "d",
    "lambda",
    "n1",
    "n2",
    "trial",
    "ratio",
    "bound_d3",
    "bound_n2sqrt",
    "ratio_over_d3",
    "ratio_over_n2sqrt",
];

/// `int_0^T e^{-itw} dt`.
fn kernel(w: f64, t: f64) -> Complex<f64> {
    let half = 0.5 * w * t;
    let amp = if half.abs() < 1e-8 { t } else { half.sin() / (0.5 * w) };
    Complex::from_polar(amp, -half)
}

struct Term {
    key: [i64; 4],
    a: Complex<f64>,
    omega: f64,
}

fn support<T: Real>(f: &SpectralField<T>) -> Vec<([i64; 4], Complex<f64>, f64)> {
    let g = f.grid();
    f.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.re != T::zero() || c.im != T::zero())
        .map(|(i, c)| {
            let mut key = [0i64; 4];
            for (k, m) in key.iter_mut().zip(g.mode_vector(i)) {
                *k = m;
            }
            (key, Complex::new(c.re.as_f64(), c.im.as_f64()), g.xi_norm_sq()[i].as_f64())
        })
        .collect()
}

/// `||e^{itD}u e^{itD}v||_{L^2_{t,x}([0,T] x M)}`, exact.
pub fn bilinear_norm<T: Real>(u: &SpectralField<T>, v: &SpectralField<T>, t_end: f64) -> Result<f64> {
    u.grid().ensure_same(v.grid())?;
    if !(t_end > 0.0) {
        return Err(Error::InvalidParameter(format!("time horizon {t_end}")));
    }
    let w = u.grid().frequency_weight().as_f64();
    let (su, sv) = (support(u), support(v));
    let mut terms: Vec<Term> = Vec::with_capacity(su.len() * sv.len());
    for (k1, a1, w1) in &su {
        for (k2, a2, w2) in &sv {
            let mut key = [0i64; 4];
            for j in 0..4 {
                key[j] = k1[j] + k2[j];
            }
            terms.push(Term { key, a: a1 * a2, omega: w1 + w2 });
        }
    }
    terms.sort_unstable_by(|x, y| x.key.cmp(&y.key).then(x.omega.total_cmp(&y.omega)));
    let mut total = 0.0;
    for group in terms.chunk_by(|x, y| x.key == y.key) {
        for p in group {
            total += p.a.norm_sqr() * t_end;
            for q in group {
                if std::ptr::eq(p, q) {
                    continue;
                }
                total += (p.a * q.a.conj() * kernel(p.omega - q.omega, t_end)).re;
            }
        }
    }
    Ok((w * w * w * total.max(0.0)).sqrt())
}

/// The same norm by trapezoidal sampling in time with step `dt`; products
/// are formed on the 2x padded lattice, where they are alias-free.
pub fn bilinear_norm_quadrature<T: Real>(
    u: &SpectralField<T>,
    v: &SpectralField<T>,
    t_end: T,
    steps: usize,
) -> Result<T> {
    u.grid().ensure_same(v.grid())?;
    if steps == 0 {
        return Err(Error::InvalidParameter("zero time steps".into()));
    }
    let dt = t_end / T::from_count(steps);
    let (tu, tv) = (free_trajectory(u, dt, steps), free_trajectory(v, dt, steps));
    let samples: Vec<T> = tu
        .snapshots()
        .iter()
        .zip(tv.snapshots())
        .map(|(a, b)| {
            let (pa, pb) = (a.pad().to_spatial(), b.pad().to_spatial());
            let h = pa.grid().cell_volume();
            h * pa
                .values()
                .iter()
                .zip(pb.values())
                .fold(T::zero(), |acc, (x, y)| acc + (x * y).norm_sqr())
        })
        .collect();
    let inner = samples[1..steps].iter().fold(T::zero(), |a, &b| a + b);
    let integral = dt * (inner + (samples[0] + samples[steps]) / T::lit(2.0));
    Ok(integral.sqrt())
}

/// Compact period entering the bounds; `inf` without compact directions.
pub fn grid_lambda<T: Real>(grid: &GridSpec<T>) -> f64 {
    grid.min_torus_period().map_or(f64::INFINITY, |p| p.as_f64())
}

/// Fails with `UnderResolved` unless every axis reaches frequency `2n`.
pub fn check_resolves<T: Real>(grid: &GridSpec<T>, n: f64) -> Result<()> {
    let available = grid.min_nyquist().as_f64();
    if available < 2.0 * n {
        return Err(Error::UnderResolved { required: 2.0 * n, available });
    }
    Ok(())
}

/// One row per trial for fixed `(N1, N2)`.
pub fn bilinear_probe<T: Real>(
    grid: &GridSpec<T>,
    n1: f64,
    n2: f64,
    t_end: f64,
    trials: usize,
    seed: u64,
) -> Result<ProbeReport> {
    bilinear_sweep(grid, &[n1], n2, t_end, trials, seed)
}

/// Bilinear ratios for every `N1` in `n1_list` at fixed `N2`, with the
/// bound comparisons used for acceptance.
pub fn bilinear_sweep<T: Real>(
    grid: &GridSpec<T>,
    n1_list: &[f64],
    n2: f64,
    t_end: f64,
    trials: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let start = Instant::now();
    if n1_list.is_empty() || trials == 0 {
        return Err(Error::InvalidParameter("empty sweep".into()));
    }
    if !(t_end > 0.0) {
        return Err(Error::InvalidParameter(format!("time horizon {t_end}")));
    }
    let d = grid.dimension();
    let lambda = grid_lambda(grid);
    for &n1 in n1_list {
        bilinear_bound(3, lambda, n1, n2, 0.0)?;
        check_resolves(grid, n1)?;
    }
    let tasks: Vec<(f64, usize)> = n1_list
        .iter()
        .flat_map(|&n1| (0..trials).map(move |k| (n1, k)))
        .collect();
    let ratios: Vec<f64> = tasks
        .par_iter()
        .map(|&(n1, k)| {
            let su = derive_seed(seed, &[n1.to_bits(), k as u64, 1]);
            let sv = derive_seed(seed, &[n2.to_bits(), k as u64, 2]);
            let u = random_annulus_data(grid, AnnulusDataSpec { n: n1, seed: su })?;
            let v = random_annulus_data(grid, AnnulusDataSpec { n: n2, seed: sv })?;
            // both are normalised, so the norm is the ratio
            bilinear_norm(&u, &v, t_end)
        })
        .collect::<Result<_>>()?;

    let mut report = ProbeReport::new("bilinear", grid.to_string(), &COLUMNS);
    report
        .param("n2", n2)
        .param("t", t_end)
        .param("trials", trials as f64)
        .param("lambda", lambda)
        .param("eps", 0.0);
    report.seed = Some(seed);
    let mut worst_d3: f64 = 0.0;
    let mut worst_sqrt: f64 = 0.0;
    let mut means = Vec::new();
    for (&(n1, k), &ratio) in tasks.iter().zip(&ratios) {
        let b3 = bilinear_bound(3, lambda, n1, n2, 0.0)?;
        let bs = n2_sqrt_bound(n2);
        worst_d3 = worst_d3.max(ratio / b3);
        worst_sqrt = worst_sqrt.max(ratio / bs);
        report.push_row(vec![
            Some(d as f64),
            Some(lambda),
            Some(n1),
            Some(n2),
            Some(k as f64),
            Some(ratio),
            Some(b3),
            Some(bs),
            Some(ratio / b3),
            Some(ratio / bs),
        ]);
        if k == 0 {
            means.push(0.0);
        }
        *means.last_mut().expect("pushed") += ratio / b3 / trials as f64;
    }
    let trend = means.windows(2).map(|w| w[1] / w[0]).fold(1.0, f64::max);
    report.comparisons = vec![
        BoundComparison {
            bound: "bound_d3".into(),
            max_ratio: worst_d3,
            tolerance: BOUND_TOLERANCE,
            within: worst_d3 <= BOUND_TOLERANCE,
        },
        BoundComparison {
            bound: "bound_n2sqrt".into(),
            max_ratio: worst_sqrt,
            tolerance: BOUND_TOLERANCE,
            within: worst_sqrt <= BOUND_TOLERANCE,
        },
        BoundComparison {
            bound: "n1_trend".into(),
            max_ratio: trend,
            tolerance: TREND_TOLERANCE,
            within: trend <= TREND_TOLERANCE,
        },
    ];
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Direction;
    use crate::testutil::random_spectrum;

    #[test]
    fn kernel_matches_direct_integral() {
        for w in [0.0, 1e-12, 0.3, -5.0, 40.0] {
            let t: f64 = 0.7;
            let n = 20_000;
            let h = t / n as f64;
            let mut acc = Complex::new(0.0, 0.0);
            for k in 0..=n {
                let weight = if k == 0 || k == n { 0.5 } else { 1.0 };
                acc += Complex::from_polar(weight * h, -w * k as f64 * h);
            }
            assert!((kernel(w, t) - acc).norm() < 1e-6, "w = {w}");
        }
    }

    #[test]
    fn single_plane_wave_closed_form() {
        let g: GridSpec<f64> = GridSpec::torus(&[1.5, 2.0, 2.5], &[8, 8, 8]).unwrap();
        let c = Complex::new(0.0, 1.0 / g.frequency_weight() / g.volume().sqrt());
        let u = SpectralField::delta(&g, &[1, -2, 3], c).unwrap();
        assert!((u.l2_norm() - 1.0).abs() < 1e-14);
        let t = 0.99;
        // |u|^2 = 1/vol pointwise, so ||u^2||_{L^2_{t,x}} = (T / vol)^(1/2)
        let got = bilinear_norm(&u, &u, t).unwrap();
        assert!((got - (t / g.volume()).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn exact_matches_quadrature() {
        let g = GridSpec::new(
            vec![Direction::euclidean(6.0), Direction::torus(2.0), Direction::torus(2.0)],
            vec![8, 8, 8],
        )
        .unwrap();
        let u = random_spectrum(&g, 1);
        let v = random_spectrum(&g, 2);
        let exact = bilinear_norm(&u, &v, 0.5).unwrap();
        let steps = 4000;
        let quad: f64 = bilinear_norm_quadrature(&u, &v, 0.5, steps).unwrap();
        assert!((exact - quad).abs() < 1e-6 * exact, "{exact} vs {quad}");
    }

    #[test]
    fn probe_rows_and_resolution() {
        let g = GridSpec::torus(&[std::f64::consts::PI; 3], &[16, 16, 16]).unwrap();
        let r = bilinear_probe(&g, 8.0, 4.0, DEFAULT_T, 3, 5).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert_eq!(r.columns, COLUMNS);
        assert!(r.column("ratio").iter().all(|v| v.is_finite() && *v > 0.0));
        let bound = bilinear_bound(3, std::f64::consts::PI, 8.0, 4.0, 0.0).unwrap();
        assert!(r.column("bound_d3").iter().all(|b| *b == bound));
        assert!(matches!(
            bilinear_probe(&g, 16.0, 4.0, DEFAULT_T, 1, 5),
            Err(Error::UnderResolved { .. })
        ));
        assert!(bilinear_probe(&g, 4.0, 8.0, DEFAULT_T, 1, 5).is_err());
    }

    #[test]
    fn probe_is_deterministic() {
        let g = GridSpec::torus(&[std::f64::consts::PI; 3], &[16, 16, 16]).unwrap();
        let a = bilinear_sweep(&g, &[4.0, 8.0], 4.0, DEFAULT_T, 2, 9).unwrap();
        let b = bilinear_sweep(&g, &[4.0, 8.0], 4.0, DEFAULT_T, 2, 9).unwrap();
        assert_eq!(a.rows, b.rows);
    }
}
