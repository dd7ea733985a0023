//! Seeded initial data.
//!
//! Every random coefficient is drawn from its own ChaCha8 stream, selected
//! by the flat lattice index, so a field depends only on `(seed, grid)` and
//! not on traversal order or worker count.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SpectralField};
use crate::multipliers::bracket;
use crate::scalar::Real;

fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Standard complex Gaussian (independent unit normals in both parts).
pub fn gaussian_coefficient(seed: u64, index: usize) -> Complex<f64> {
    let mut rng = stream(seed, index);
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniformly distributed unit phase.
pub fn random_phase(seed: u64, index: usize) -> Complex<f64> {
    let theta: f64 = stream(seed, index).gen_range(0.0..std::f64::consts::TAU);
    Complex::from_polar(1.0, theta)
}

/// Gaussian data on the shell `N/2 < |xi| <= N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusDataSpec {
    pub n: f64,
    pub seed: u64,
}

/// Independent Gaussian coefficients on the shell, zero elsewhere, unit `L^2`.
pub fn random_annulus_data<T: Real>(grid: &GridSpec<T>, spec: AnnulusDataSpec) -> Result<SpectralField<T>> {
    if !(spec.n > 0.0) {
        return Err(Error::InvalidParameter(format!("shell radius {}", spec.n)));
    }
    let (lo, hi) = ((spec.n / 2.0).powi(2), spec.n * spec.n);
    let coeffs: Vec<Complex<T>> = grid
        .xi_norm_sq()
        .iter()
        .enumerate()
        .map(|(i, &k2)| {
            let k2 = k2.as_f64();
            if k2 > lo && k2 <= hi && !grid.is_nyquist(i) {
                let c = gaussian_coefficient(spec.seed, i);
                Complex::new(T::lit(c.re), T::lit(c.im))
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
        .collect();
    let f = SpectralField::new(grid, coeffs)?;
    let norm = f.l2_norm();
    if norm == T::zero() {
        return Err(Error::EmptyShell { n: spec.n });
    }
    Ok(f.scale(Complex::from(norm.recip())))
}

/// Deterministic smooth data: `<xi>^-decay` times a seeded phase on
/// `|xi| <= cutoff`, scaled to root-mean-square modulus `rms`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothData {
    pub decay: f64,
    pub cutoff: f64,
    pub rms: f64,
    pub seed: u64,
}

impl SmoothData {
    /// Coefficient decay `s + 3/2 + 0.01`: just inside `H^s` in three
    /// dimensions.
    pub fn for_regularity(s: f64, cutoff: f64, rms: f64, seed: u64) -> Self {
        Self { decay: s + 1.51, cutoff, rms, seed }
    }

    pub fn build<T: Real>(&self, grid: &GridSpec<T>) -> Result<SpectralField<T>> {
        if !(self.rms >= 0.0) || !(self.cutoff >= 0.0) {
            return Err(Error::InvalidParameter(format!("smooth data {self:?}")));
        }
        let cut2 = self.cutoff * self.cutoff;
        let coeffs: Vec<Complex<T>> = grid
            .xi_norm_sq()
            .iter()
            .enumerate()
            .map(|(i, &k2)| {
                let k2 = k2.as_f64();
                if k2 <= cut2 && !grid.is_nyquist(i) {
                    let c = random_phase(self.seed, i) * bracket(k2).powf(-self.decay);
                    Complex::new(T::lit(c.re), T::lit(c.im))
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
            .collect();
        let f = SpectralField::new(grid, coeffs)?;
        let target = T::lit(self.rms) * grid.volume().sqrt();
        Ok(f.scale(Complex::from(target / f.l2_norm())))
    }
}

/// Multiplies `f` so that its `H^s` norm equals `target`.
pub fn scale_to_sobolev<T: Real>(f: &SpectralField<T>, s: T, target: T) -> Result<SpectralField<T>> {
    let norm = crate::functionals::sobolev_norm(f, s);
    if norm == T::zero() {
        return Err(Error::InvalidParameter("cannot rescale the zero field".into()));
    }
    Ok(f.scale(Complex::from(target / norm)))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn two_pi_torus(m: usize) -> GridSpec<f64> {
        GridSpec::torus(&[std::f64::consts::TAU; 3], &[m, m, m]).unwrap()
    }

    #[test]
    fn annulus_support_and_norm() {
        let g = two_pi_torus(32);
        let f = random_annulus_data(&g, AnnulusDataSpec { n: 4.0, seed: 7 }).unwrap();
        let mut count = 0;
        for (c, &k2) in f.coeffs().iter().zip(g.xi_norm_sq()) {
            let inside = k2 > 4.0 && k2 <= 16.0;
            assert_eq!(c.norm() > 0.0, inside);
            count += inside as usize;
        }
        // integer points with 2 < |m| <= 4
        let oracle = (-4i64..=4)
            .flat_map(|a| (-4i64..=4).flat_map(move |b| (-4i64..=4).map(move |c| a * a + b * b + c * c)))
            .filter(|&r| r > 4 && r <= 16)
            .count();
        assert_eq!(count, oracle);
        assert!((f.l2_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn annulus_rejects_empty_shells() {
        let unit = GridSpec::torus(&[1.0; 3], &[32, 32, 32]).unwrap();
        assert_eq!(
            random_annulus_data(&unit, AnnulusDataSpec { n: 4.0, seed: 1 }).unwrap_err(),
            Error::EmptyShell { n: 4.0 }
        );
        let g = two_pi_torus(16);
        assert!(matches!(
            random_annulus_data(&g, AnnulusDataSpec { n: 100.0, seed: 1 }),
            Err(Error::EmptyShell { .. })
        ));
    }

    #[test]
    fn smooth_data_profile() {
        let g = two_pi_torus(16);
        let spec = SmoothData::for_regularity(0.85, 5.0, 0.5, 3);
        let f = spec.build(&g).unwrap();
        assert!((f.l2_norm() - 0.5 * g.volume().sqrt()).abs() < 1e-12);
        let i0 = g.flat_index(&[0, 0, 0]).unwrap();
        let i1 = g.flat_index(&[1, 0, 0]).unwrap();
        let ratio = f.coeffs()[i1].norm() / f.coeffs()[i0].norm();
        assert!((ratio - 2f64.powf(-2.36 / 2.0)).abs() < 1e-12);
        let outside = g.flat_index(&[6, 0, 0]).unwrap();
        assert_eq!(f.coeffs()[outside].norm(), 0.0);
    }

    #[test]
    fn scale_to_sobolev_hits_target() {
        let g = two_pi_torus(16);
        let f = SmoothData::for_regularity(1.0, 6.0, 1.0, 1).build(&g).unwrap();
        let h = scale_to_sobolev(&f, 2.0, 4.0).unwrap();
        assert!((crate::functionals::sobolev_norm(&h, 2.0) - 4.0).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn annulus_data_is_shell_supported_normalized_and_reproducible(
            seed in any::<u64>(),
            n in 2.5f64..8.0,
        ) {
            let g = two_pi_torus(16);
            let f = random_annulus_data(&g, AnnulusDataSpec { n, seed }).unwrap();
            for (c, &k2) in f.coeffs().iter().zip(g.xi_norm_sq()) {
                if c.norm() > 0.0 {
                    prop_assert!(k2 > n * n / 4.0 && k2 <= n * n);
                }
            }
            prop_assert!((f.l2_norm() - 1.0).abs() < 1e-12);
            let again = random_annulus_data(&g, AnnulusDataSpec { n, seed }).unwrap();
            prop_assert!(f.coeffs().iter().zip(again.coeffs()).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
        }

        #[test]
        fn coefficients_do_not_depend_on_draw_order(seed in any::<u64>(), i in 0usize..5000, j in 0usize..5000) {
            let forward = (gaussian_coefficient(seed, i), gaussian_coefficient(seed, j));
            let backward = (gaussian_coefficient(seed, j), gaussian_coefficient(seed, i));
            prop_assert_eq!(forward.0, backward.1);
            prop_assert_eq!(forward.1, backward.0);
        }
    }
}
