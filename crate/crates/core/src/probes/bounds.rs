//! Closed-form bilinear bounds.

use crate::error::{Error, Result};

/// `N2^eps * D(lambda, N1, N2)` for total dimension `d`.
///
/// `d = 3` uses `lambda^-1/2 + N2 N1^-1/2`; `d = 2` and `d = 4` use the
/// square-root forms. `lambda = inf` (no compact direction) drops the
/// `1/lambda` terms.
pub fn bilinear_bound(d: usize, lambda: f64, n1: f64, n2: f64, eps: f64) -> Result<f64> {
    if !(n2 >= 1.0) || !(n1 >= 1.0) {
        return Err(Error::InvalidParameter(format!("frequencies N1 = {n1}, N2 = {n2} below 1")));
    }
    if n2 > n1 {
        return Err(Error::InvalidParameter(format!("N2 = {n2} exceeds N1 = {n1}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda}")));
    }
    let loss = n2.powf(eps);
    let core = match d {
        2 => (lambda.recip() + n2 / n1).sqrt(),
        3 => lambda.recip().sqrt() + n2 / n1.sqrt(),
        4 => (n2 / lambda + n2.powi(3) / n1).sqrt(),
        _ => return Err(Error::UnsupportedDimension(d)),
    };
    Ok(loss * core)
}

/// The `N2^1/2` bound shared by the unscaled torus and product-space
/// estimates.
pub fn n2_sqrt_bound(n2: f64) -> f64 {
    n2.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        assert!((bilinear_bound(3, 1.0, 16.0, 4.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((bilinear_bound(2, 4.0, 16.0, 4.0, 0.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((bilinear_bound(4, 2.0, 8.0, 2.0, 0.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let with_loss = bilinear_bound(3, 1.0, 16.0, 4.0, 0.5).unwrap();
        assert!((with_loss - 4.0).abs() < 1e-14);
        let euclid = bilinear_bound(3, f64::INFINITY, 16.0, 4.0, 0.0).unwrap();
        assert!((euclid - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bound_rejections() {
        assert!(bilinear_bound(3, 1.0, 4.0, 8.0, 0.0).is_err());
        assert!(bilinear_bound(3, 0.0, 8.0, 4.0, 0.0).is_err());
        assert_eq!(bilinear_bound(5, 1.0, 8.0, 4.0, 0.0), Err(Error::UnsupportedDimension(5)));
    }

    #[test]
    fn bound_decreases_in_n1() {
        for d in 2..=4 {
            let mut prev = f64::INFINITY;
            for k in 2..8 {
                let b = bilinear_bound(d, 2.0, 2f64.powi(k), 4.0, 0.0).unwrap();
                assert!(b < prev);
                prev = b;
            }
        }
    }
}
