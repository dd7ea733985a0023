//! Seeded random fields for unit tests.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{GridSpec, SpectralField};

/// Random coefficients with a Gaussian envelope, normalized to unit mass.
pub(crate) fn random_spectrum(grid: &GridSpec<f64>, seed: u64) -> SpectralField<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = grid.max_xi() / 3.0;
    let f = SpectralField::from_fn(grid, |xi| {
        let k2: f64 = xi.iter().map(|x| x * x).sum();
        let env = (-k2 / (2.0 * scale * scale)).exp();
        Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * env
    });
    let norm = f.l2_norm();
    f.scale(Complex::from(1.0 / norm))
}
