//! Continued-fraction expansions, convergents and their identities.
//!
//! # Certification
//!
//! A truncated series `x` known to `N` fractional coefficients pins down the
//! first `n` partial quotients exactly when `2 * sum_{i<=n} deg A_i <= N`.
//! The order-`n` cylinder containing `x` is a disc of diameter
//! `q^{-2 sum deg A_i - 1}`, so every series agreeing with `x` on `N`
//! coefficients (distance `<= q^{-N-1}`) lies in the same cylinder once
//! `N + 1 >= 2 sum deg A_i + 1`.
//!
//! Equivalently, the Gauss-map iterate `T^n(x)` keeps `N - 2 sum_{i<=n} deg A_i`
//! determined coefficients; `expand_truncated` runs the Euclidean algorithm
//! on the truncation and carries exactly that bookkeeping, while
//! `expand_by_gauss_map` iterates `T` on the series itself.

use serde::Serialize;
use thiserror::Error;

use crate::laurent::{LaurentError, LaurentSeries, Valuation};
use crate::poly::{Poly, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfError {
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("input is not in the valuation ideal: deg numerator {num} >= deg denominator {den}")]
    NotInIdeal { num: usize, den: usize },
    #[error("expansion certified for {certified} quotients, {needed} required")]
    InsufficientCertification { needed: usize, certified: usize },
    #[error("identity {identity:?} fails at n = {n}")]
    IdentityFailed { identity: Identity, n: usize },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The four convergent identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Identity {
    /// `gcd(P_n, Q_n) = 1`
    Coprime,
    /// `Q_n P_{n-1} - P_n Q_{n-1} = (-1)^n`
    Determinant,
    /// `|Q_n| = prod |A_i|`
    DenominatorNorm,
    /// `|x - P_n/Q_n| = 1/(|Q_n| |Q_{n+1}|) = 1/(|A_{n+1}| |Q_n|^2)`
    ApproximationError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Rational input: the Euclidean algorithm ran to completion.
    Exhausted,
    /// The next iterate vanishes on every determined coefficient.
    ZeroUpToPrecision,
    /// The last quotient could not be fully determined.
    PrecisionExhausted,
    /// Caller's quotient limit reached.
    Limit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfExpansion {
    pub quotients: Vec<Poly>,
    /// Number of leading quotients guaranteed correct.
    pub certified: usize,
    /// Rational input fully expanded.
    pub terminated: bool,
    pub stop: StopReason,
}

impl CfExpansion {
    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.quotients
            .iter()
            .map(|a| a.deg().expect("partial quotients are nonzero"))
            .collect()
    }

    /// Degrees of the certified prefix only.
    pub fn certified_degrees(&self) -> Vec<usize> {
        self.degrees()[..self.certified].to_vec()
    }

    pub fn convergents(&self) -> Vec<Convergent> {
        convergents(&self.quotients)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub index: usize,
    pub p: Poly,
    pub q: Poly,
}

/// Expansion of the rational `num/den` in I by the Euclidean algorithm.
pub fn expand_rational(num: &Poly, den: &Poly) -> Result<CfExpansion, CfError> {
    let den_deg = den.deg().ok_or(CfError::ZeroDenominator)?;
    if let Some(d) = num.deg() {
        if d >= den_deg {
            return Err(CfError::NotInIdeal { num: d, den: den_deg });
        }
    }
    let (mut a, mut b) = (num.clone(), den.clone());
    let mut quotients = Vec::new();
    while !a.is_zero() {
        let (quot, rem) = b.checked_divrem(&a)?;
        quotients.push(quot);
        b = a;
        a = rem;
    }
    Ok(CfExpansion {
        certified: quotients.len(),
        quotients,
        terminated: true,
        stop: StopReason::Exhausted,
    })
}

/// Expansion of a truncated series in I, at most `limit` quotients.
///
/// Quotients past `certified` are provisional: the last one may have been
/// computed from a truncation that does not determine it. Its degree is
/// always correct.
pub fn expand_truncated(x: &LaurentSeries, limit: Option<usize>) -> Result<CfExpansion, CfError> {
    ensure_ideal(x)?;
    let field = x.field();
    let n = x.precision();
    // x = sum c_i z^{-i} = num / z^N
    let num = Poly::from_coeffs(field, (0..n).map(|j| x.frac_coeffs()[n - 1 - j]).collect());
    let den = Poly::monomial(field, 1, n);
    let (mut a, mut b) = (num, den);
    let mut remaining = n as i64;
    let mut quotients = Vec::new();
    let mut certified = 0;
    let limit = limit.unwrap_or(usize::MAX);
    let stop = loop {
        if quotients.len() >= limit {
            break StopReason::Limit;
        }
        let Some(deg_a) = a.deg() else {
            break StopReason::ZeroUpToPrecision;
        };
        let valuation = (b.deg().expect("nonzero") - deg_a) as i64;
        if valuation > remaining {
            break StopReason::ZeroUpToPrecision;
        }
        let (quot, rem) = b.checked_divrem(&a)?;
        quotients.push(quot);
        remaining -= 2 * valuation;
        if remaining < 0 {
            break StopReason::PrecisionExhausted;
        }
        certified += 1;
        b = a;
        a = rem;
    };
    Ok(CfExpansion {
        quotients,
        certified,
        terminated: false,
        stop,
    })
}

fn ensure_ideal(x: &LaurentSeries) -> Result<(), CfError> {
    match x.int_part().deg() {
        Some(d) => Err(CfError::NotInIdeal { num: d, den: 0 }),
        None => Ok(()),
    }
}

/// The same expansion computed by iterating the Gauss map on the series.
pub fn expand_by_gauss_map(x: &LaurentSeries, limit: Option<usize>) -> Result<CfExpansion, CfError> {
    ensure_ideal(x)?;
    let limit = limit.unwrap_or(usize::MAX);
    let mut current = x.clone();
    let mut quotients = Vec::new();
    let mut certified = 0;
    let stop = loop {
        if quotients.len() >= limit {
            break StopReason::Limit;
        }
        let v = match current.norm() {
            Valuation::Finite(v) => v,
            Valuation::ZeroUpTo(_) => break StopReason::ZeroUpToPrecision,
        };
        match current.reciprocal() {
            Ok(r) => {
                let (a, t) = r.split();
                quotients.push(a);
                certified += 1;
                current = t;
            }
            Err(LaurentError::InsufficientPrecision { .. }) => {
                let padded = current.pad_to(2 * v as usize);
                quotients.push(padded.reciprocal()?.split().0);
                break StopReason::PrecisionExhausted;
            }
            Err(e) => return Err(e.into()),
        }
    };
    Ok(CfExpansion {
        quotients,
        certified,
        terminated: false,
        stop,
    })
}

/// Convergents `P_n/Q_n` for `n = 1..=len`, seeded with
/// `P_{-1} = 1, P_0 = 0, Q_{-1} = 0, Q_0 = 1`.
pub fn convergents(quotients: &[Poly]) -> Vec<Convergent> {
    let Some(first) = quotients.first() else {
        return Vec::new();
    };
    let field = first.field();
    let (mut p_prev, mut p) = (Poly::one(field), Poly::zero(field));
    let (mut q_prev, mut q) = (Poly::zero(field), Poly::one(field));
    let mut out = Vec::with_capacity(quotients.len());
    for (i, a) in quotients.iter().enumerate() {
        let p_next = &(a * &p) + &p_prev;
        let q_next = &(a * &q) + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push(Convergent {
            index: i + 1,
            p: p.clone(),
            q: q.clone(),
        });
    }
    out
}

/// `P_n/Q_n` for the whole expansion; `0/1` when it is empty.
pub fn reconstruct(quotients: &[Poly], field: crate::field::FieldSpec) -> (Poly, Poly) {
    match convergents(quotients).pop() {
        Some(c) => (c.p, c.q),
        None => (Poly::zero(field), Poly::one(field)),
    }
}

/// The number being expanded: an exact rational or a truncated series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Rational { num: Poly, den: Poly },
    Series(LaurentSeries),
}

impl Target {
    pub fn expansion(&self) -> Result<CfExpansion, CfError> {
        match self {
            Target::Rational { num, den } => expand_rational(num, den),
            Target::Series(x) => expand_truncated(x, None),
        }
    }

    /// `log_q |Q x - P|`, `None` when it is exactly zero.
    pub fn log_residual(&self, p: &Poly, q: &Poly) -> Result<Option<i64>, CfError> {
        match self {
            Target::Rational { num, den } => {
                let r = &(q * num) - &(p * den);
                Ok(r.deg().map(|d| d as i64 - den.deg().unwrap_or(0) as i64))
            }
            Target::Series(x) => {
                let deg_q = q.deg().unwrap_or(0);
                let scaled = LaurentSeries::from_poly(q.clone(), x.precision() + deg_q)
                    .mul(x)?
                    .sub(&LaurentSeries::from_poly(p.clone(), x.precision()))?;
                match scaled.norm() {
                    Valuation::Finite(v) => Ok(Some(-v)),
                    Valuation::ZeroUpTo(n) => Err(CfError::InsufficientCertification {
                        needed: n + 1,
                        certified: n,
                    }),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    /// Identities were checked for every `m` in `1..=checked`.
    pub checked: usize,
    /// Orders at which the approximation identity was checked.
    pub error_identity_orders: usize,
}

/// Verify the four convergent identities for every order `1..=n`.
pub fn check_identities(target: &Target, n: usize) -> Result<IdentityReport, CfError> {
    let cf = target.expansion()?;
    let exact = cf.terminated;
    let available = if exact { cf.len() } else { cf.certified.saturating_sub(1) };
    if n > available {
        return Err(CfError::InsufficientCertification {
            needed: if exact { n } else { n + 1 },
            certified: cf.certified,
        });
    }
    let conv = cf.convergents();
    let degrees = cf.degrees();
    let field = cf
        .quotients
        .first()
        .map(|a| a.field())
        .ok_or(CfError::InsufficientCertification { needed: n, certified: 0 })?;
    let mut error_orders = 0;
    for m in 1..=n {
        let cur = &conv[m - 1];
        let fail = |identity| CfError::IdentityFailed { identity, n: m };
        if cur.p.checked_gcd(&cur.q)? != Poly::one(field) {
            return Err(fail(Identity::Coprime));
        }
        let (p_prev, q_prev) = if m == 1 {
            (Poly::zero(field), Poly::one(field))
        } else {
            (conv[m - 2].p.clone(), conv[m - 2].q.clone())
        };
        let det = &(&cur.q * &p_prev) - &(&cur.p * &q_prev);
        if det != Poly::constant(field, field.sign(m)) {
            return Err(fail(Identity::Determinant));
        }
        let sum: usize = degrees[..m].iter().sum();
        if cur.q.deg() != Some(sum) {
            return Err(fail(Identity::DenominatorNorm));
        }
        let log_err = target
            .log_residual(&cur.p, &cur.q)?
            .map(|r| r - sum as i64);
        if m < cf.len() {
            let via_next = -(sum as i64) - conv[m].q.deg().unwrap_or(0) as i64;
            let via_quotient = -(degrees[m] as i64) - 2 * sum as i64;
            if log_err != Some(via_next) || via_next != via_quotient {
                return Err(fail(Identity::ApproximationError));
            }
            error_orders += 1;
        } else if exact && log_err.is_some() {
            return Err(fail(Identity::ApproximationError));
        }
    }
    Ok(IdentityReport {
        checked: n,
        error_identity_orders: error_orders,
    })
}

/// `log_q` of the ratio of consecutive approximation errors,
/// `deg A_n + deg A_{n+1}`, cross-checked against the two error norms.
pub fn relative_error_log(target: &Target, n: usize) -> Result<i64, CfError> {
    let cf = target.expansion()?;
    let have = if cf.terminated { cf.len() } else { cf.certified };
    if n == 0 || n + 1 > have {
        return Err(CfError::InsufficientCertification {
            needed: n + 1,
            certified: have,
        });
    }
    let degrees = cf.degrees();
    let claimed = (degrees[n - 1] + degrees[n]) as i64;
    let conv = cf.convergents();
    let field = conv[0].p.field();
    let (p_prev, q_prev) = if n == 1 {
        (Poly::zero(field), Poly::one(field))
    } else {
        (conv[n - 2].p.clone(), conv[n - 2].q.clone())
    };
    let log_err = |p: &Poly, q: &Poly| -> Result<i64, CfError> {
        let r = target
            .log_residual(p, q)?
            .ok_or(CfError::IdentityFailed {
                identity: Identity::ApproximationError,
                n,
            })?;
        Ok(r - q.deg().unwrap_or(0) as i64)
    };
    let measured = log_err(&p_prev, &q_prev)? - log_err(&conv[n - 1].p, &conv[n - 1].q)?;
    if measured != claimed {
        return Err(CfError::IdentityFailed {
            identity: Identity::ApproximationError,
            n,
        });
    }
    Ok(claimed)
}
