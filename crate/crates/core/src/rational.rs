//! Exact rationals for measures and diameters.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Reduced fraction with a positive denominator.
pub type ExactRational = BigRational;

/// `q^e` for any integer exponent.
pub fn q_pow(q: u32, e: i64) -> ExactRational {
    let base = BigInt::from(q).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        ExactRational::from_integer(base)
    } else {
        ExactRational::new(BigInt::one(), base)
    }
}

pub fn from_biguint(n: BigUint) -> ExactRational {
    ExactRational::from_integer(BigInt::from(n))
}

pub fn to_f64(r: &ExactRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() && (v != 0.0 || r.is_zero()) {
            return v;
        }
    }
    // Fall back to a log-domain ratio for extreme magnitudes.
    let num = r.numer().magnitude().bits() as f64;
    let den = r.denom().bits() as f64;
    let sign = if r.numer() < &BigInt::zero() { -1.0 } else { 1.0 };
    sign * 2f64.powf(num - den)
}

/// Wire form used in JSON output: numerator and denominator as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalRepr {
    pub num: String,
    pub den: String,
}

impl From<&ExactRational> for RationalRepr {
    fn from(r: &ExactRational) -> Self {
        Self {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

impl RationalRepr {
    pub fn parse(&self) -> Option<ExactRational> {
        let num: BigInt = self.num.parse().ok()?;
        let den: BigInt = self.den.parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(ExactRational::new(num, den))
    }
}

/// Parse `a`, `a/b` or a finite decimal like `0.25` into an exact rational.
pub fn parse_rational(s: &str) -> Option<ExactRational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let num: BigInt = a.trim().parse().ok()?;
        let den: BigInt = b.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(ExactRational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int_val: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_val: BigInt = frac.parse().ok()?;
        let magnitude = ExactRational::new(
            int_val.magnitude().clone().into(),
            BigInt::one(),
        ) + ExactRational::new(frac_val, scale);
        return Some(if negative { -magnitude } else { magnitude });
    }
    let n: BigInt = s.parse().ok()?;
    Some(ExactRational::from_integer(n))
}
