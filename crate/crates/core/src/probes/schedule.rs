//! Parameter schedule of the I-method global argument, in exact arithmetic.
//!
//! With scaling `lambda ~ N^a` chosen so that `E(I u_lambda(0)) <= 1`, the
//! local increment `N^-1` lets the rescaled solution run until
//! `N * delta`, i.e. unscaled time `T ~ N^b`, and undoing the scaling gives
//! `E(Iu)(T) <~ T^c`, where
//!
//! `a = 2(1-s)/(2s-1)`, `b = (6s-5)/(2s-1)`, `c = 2(1-s)/(6s-5)`.
//!
//! `b` vanishes at `s = 5/6`; below that the argument gives no global bound.

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub type Exponent = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Schedule {
    pub s: (i64, i64),
    pub n: f64,
    pub lambda_exponent: (i64, i64),
    pub time_exponent: (i64, i64),
    /// `None` when the time exponent is not positive.
    pub energy_exponent: Option<(i64, i64)>,
    pub sub_threshold: bool,
    pub lambda: f64,
    pub time: f64,
}

fn pair(r: Exponent) -> (i64, i64) {
    (*r.numer(), *r.denom())
}

impl Schedule {
    pub fn lambda_exponent(&self) -> Exponent {
        Ratio::new(self.lambda_exponent.0, self.lambda_exponent.1)
    }

    pub fn time_exponent(&self) -> Exponent {
        Ratio::new(self.time_exponent.0, self.time_exponent.1)
    }

    pub fn energy_exponent(&self) -> Option<Exponent> {
        self.energy_exponent.map(|(a, b)| Ratio::new(a, b))
    }

    /// Fails with `SubThreshold` unless the schedule yields a global bound.
    pub fn require_global(&self) -> Result<&Self> {
        if self.sub_threshold {
            return Err(Error::SubThreshold { s: self.s.0 as f64 / self.s.1 as f64 });
        }
        Ok(self)
    }
}

pub fn lambda_exponent(s: Exponent) -> Exponent {
    let two = Ratio::from_integer(2);
    two * (Ratio::one() - s) / (two * s - Ratio::one())
}

pub fn time_exponent(s: Exponent) -> Exponent {
    (Ratio::from_integer(6) * s - Ratio::from_integer(5)) / (Ratio::from_integer(2) * s - Ratio::one())
}

pub fn energy_exponent(s: Exponent) -> Option<Exponent> {
    let denom = Ratio::from_integer(6) * s - Ratio::from_integer(5);
    (denom > Ratio::zero()).then(|| Ratio::from_integer(2) * (Ratio::one() - s) / denom)
}

/// Exponents and values `lambda = N^a`, `T = N^b` for `s` in `(1/2, 1]`.
pub fn imethod_schedule(s: Exponent, n: f64) -> Result<Schedule> {
    let half = Ratio::new(1, 2);
    if s <= half || s > Ratio::one() {
        return Err(Error::DomainError(format!("s = {s} outside (1/2, 1]")));
    }
    if !(n >= 1.0 && n.is_finite()) {
        return Err(Error::InvalidParameter(format!("N = {n}")));
    }
    let a = lambda_exponent(s);
    let b = time_exponent(s);
    let c = energy_exponent(s);
    let pow = |e: Exponent| n.powf(e.to_f64().expect("small rational"));
    Ok(Schedule {
        s: pair(s),
        n,
        lambda_exponent: pair(a),
        time_exponent: pair(b),
        energy_exponent: c.map(pair),
        sub_threshold: !b.is_positive(),
        lambda: pow(a),
        time: pow(b),
    })
}

/// Parses `p/q`, an integer, or a terminating decimal into an exact ratio.
pub fn parse_exponent(text: &str) -> Result<Exponent> {
    let bad = || Error::InvalidParameter(format!("not a rational number: {text:?}"));
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(p, q));
    }
    let (negative, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || frac.len() > 15 {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let scale = 10i64.pow(frac.len() as u32);
    let int_part: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let frac_part: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let value = int_part
        .checked_mul(scale)
        .and_then(|v| v.checked_add(frac_part))
        .ok_or_else(bad)?;
    let r = Ratio::new(value, scale);
    Ok(if negative { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Exponent {
        Ratio::new(p, q)
    }

    #[test]
    fn threshold_and_endpoint() {
        let at = imethod_schedule(r(5, 6), 8.0).unwrap();
        assert!(at.sub_threshold);
        assert_eq!(at.time_exponent(), r(0, 1));
        assert_eq!(at.energy_exponent(), None);
        assert!(matches!(at.require_global(), Err(Error::SubThreshold { .. })));

        let one = imethod_schedule(r(1, 1), 8.0).unwrap();
        assert_eq!(
            (one.lambda_exponent(), one.time_exponent(), one.energy_exponent()),
            (r(0, 1), r(1, 1), Some(r(0, 1)))
        );
        assert_eq!(one.lambda, 1.0);
        assert_eq!(one.time, 8.0);
    }

    #[test]
    fn eleven_twelfths() {
        let sch = imethod_schedule(r(11, 12), 32.0).unwrap();
        assert_eq!(sch.lambda_exponent(), r(1, 5));
        assert_eq!(sch.time_exponent(), r(3, 5));
        // 2 (1/12) / (1/2)
        assert_eq!(sch.energy_exponent(), Some(r(1, 3)));
        assert!((sch.lambda - 2.0).abs() < 1e-12);
        assert!((sch.time - 8.0).abs() < 1e-12);
    }

    #[test]
    fn energy_exponent_matches_undoing_the_scaling() {
        // E(Iu)(T) ~ lambda in three dimensions, and T = N^b, lambda = N^a
        for (p, q) in [(7, 8), (9, 10), (11, 12), (19, 20), (1, 1)] {
            let s = r(p, q);
            assert_eq!(energy_exponent(s), Some(lambda_exponent(s) / time_exponent(s)));
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(imethod_schedule(r(1, 2), 4.0), Err(Error::DomainError(_))));
        assert!(matches!(imethod_schedule(r(11, 10), 4.0), Err(Error::DomainError(_))));
        assert!(imethod_schedule(r(4, 5), 4.0).unwrap().sub_threshold);
        assert!(imethod_schedule(r(9, 10), 0.5).is_err());
    }

    #[test]
    fn parses_exact_rationals() {
        assert_eq!(parse_exponent("11/12").unwrap(), r(11, 12));
        assert_eq!(parse_exponent("0.85").unwrap(), r(17, 20));
        assert_eq!(parse_exponent("1").unwrap(), r(1, 1));
        assert_eq!(parse_exponent("-0.5").unwrap(), r(-1, 2));
        assert_eq!(parse_exponent(".25").unwrap(), r(1, 4));
        for bad in ["", "1/0", "abc", "1.2.3", "1e3", "."] {
            assert!(parse_exponent(bad).is_err(), "{bad}");
        }
    }
}
