use num_complex::Complex;
use num_rational::Ratio;
use proptest::prelude::*;

use wgnls::dynamics::{rescale, strang_step};
use wgnls::multipliers::{d_symbol, free_propagate, i_symbol};
use wgnls::probes::fit_loglog;
use wgnls::probes::schedule::{energy_exponent, lambda_exponent, time_exponent};
use wgnls::{Grid, Spectrum};

fn grid_strategy() -> impl Strategy<Value = Grid> {
    (
        prop::collection::vec(prop::sample::select(vec![4usize, 6, 8]), 3),
        prop::collection::vec(0.5f64..8.0, 3),
    )
        .prop_map(|(modes, periods)| Grid::torus(&periods, &modes).unwrap())
}

/// Grid plus coefficients drawn from `[-1, 1]^2`, one pair per lattice point.
fn field_strategy() -> impl Strategy<Value = Spectrum> {
    grid_strategy().prop_flat_map(|g| {
        let n = g.len();
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(move |c| {
            let coeffs = c.into_iter().map(|(re, im)| Complex::new(re, im)).collect();
            Spectrum::new(&g, coeffs).unwrap()
        })
    })
}

fn rel_diff(a: &Spectrum, b: &Spectrum) -> f64 {
    a.sub(b).unwrap().l2_norm() / a.l2_norm().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transforms_invert_and_preserve_mass(f in field_strategy()) {
        let u = f.to_spatial();
        prop_assert!(rel_diff(&f, &u.to_spectral()) < 1e-13);
        prop_assert!((u.mass() - f.mass()).abs() <= 1e-12 * f.mass());
    }

    #[test]
    fn free_flow_is_a_unitary_group(f in field_strategy(), t in -3.0f64..3.0, s in -3.0f64..3.0) {
        let st = free_propagate(&free_propagate(&f, s), t);
        prop_assert!(rel_diff(&free_propagate(&f, s + t), &st) < 1e-12);
        prop_assert!((st.mass() - f.mass()).abs() <= 1e-12 * f.mass());
        prop_assert!(rel_diff(&f, &free_propagate(&free_propagate(&f, t), -t)) < 1e-12);
    }

    #[test]
    fn split_step_never_gains_mass(f in field_strategy(), dt in 1e-4f64..1e-1) {
        // both substeps preserve mass; zeroing the Nyquist plane can only remove it
        let g = strang_step(&f, dt);
        prop_assert!(g.mass() <= f.mass() * (1.0 + 1e-12));
    }

    #[test]
    fn rescaling_multiplies_mass_by_lambda(f in field_strategy(), lambda in 0.25f64..4.0) {
        // |u(x/l)/l|^2 over l^3 times the volume: l^(3-2)
        let g = rescale(&f, lambda).unwrap();
        prop_assert!((g.mass() - lambda * f.mass()).abs() <= 1e-12 * lambda * f.mass());
    }

    #[test]
    fn i_symbol_is_monotone_and_bracketed(
        n in 1.0f64..64.0,
        s in 0.5f64..1.0,
        r1 in 0.0f64..6.0,
        r2 in 0.0f64..6.0,
    ) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let (a, b) = (i_symbol(lo * n, n, s), i_symbol(hi * n, n, s));
        prop_assert!(b <= a + 1e-15);
        prop_assert!(a <= 1.0);
        // between (N/|xi|)^(1-s) and 1
        if hi > 1.0 {
            prop_assert!(b >= hi.powf(s - 1.0) - 1e-15);
        } else {
            prop_assert_eq!(b, 1.0);
        }
    }

    #[test]
    fn d_symbol_inverts_the_s0_i_symbol(n in 1.0f64..64.0, r in 0.0f64..6.0) {
        let d = d_symbol(r * n, n);
        prop_assert!(d >= 1.0);
        prop_assert!((d * i_symbol(r * n, n, 0.0) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn schedule_exponents_compose(q in 7i64..200, frac in 0.0f64..1.0) {
        // s = p/q ranging over (5/6, 1]
        let lo = 5 * q / 6 + 1;
        let p = lo + ((q - lo) as f64 * frac).round() as i64;
        let s = Ratio::new(p, q);
        prop_assume!(s > Ratio::new(5, 6));
        let (a, b) = (lambda_exponent(s), time_exponent(s));
        prop_assert!(b > Ratio::from_integer(0));
        prop_assert_eq!(energy_exponent(s), Some(a / b));
    }

    #[test]
    fn loglog_fit_recovers_power_laws(k in -4.0f64..4.0, c in 1e-6f64..1e6) {
        let x = [4.0, 8.0, 16.0, 32.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| c * v.powf(k)).collect();
        let fit = fit_loglog("p", &x, &y).unwrap();
        prop_assert!((fit.slope - k).abs() < 1e-10);
        prop_assert!(fit.r_squared > 1.0 - 1e-10);
    }
}

#[test]
fn schedule_has_no_global_bound_below_threshold() {
    for s in [Ratio::new(3, 5), Ratio::new(4, 5), Ratio::new(5, 6)] {
        assert!(time_exponent(s) <= Ratio::from_integer(0));
        assert_eq!(energy_exponent(s), None);
    }
}
