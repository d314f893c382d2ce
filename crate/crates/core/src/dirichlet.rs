//! Dirichlet approximation in `F_q((z^{-1}))`.
//!
//! `x` is `phi`-improvable when `|Qx - P| <= phi(t)`, `|Q| < t` has a
//! nonzero solution for all large `t`. For irrational `x` this is
//! equivalent to `phi(q^{S_n}) >= q^{-S_n}` for all large `n`, where
//! `S_n = sum_{i<=n} deg A_i(x)`. Verdicts here cover a finite range of `n`
//! only. The integer part of `x` never enters the criterion, so everything
//! works with `{x}` and adds `[x]` back where a witness needs it.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::contfrac::{convergents, expand_rational, CfError, Target};
use crate::field::FieldSpec;
use crate::laurent::LaurentSeries;
use crate::poly::{Poly, PolyError};
use crate::rational::{q_pow, ExactRational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DirichletError {
    #[error("t = q^{0} must exceed 1")]
    TNotAboveOne(ExactRational),
    #[error("phi is undefined at q^m for m in {0:?}")]
    Undefined(Vec<usize>),
    #[error("phi must be non-increasing; phi(q^{m}) < phi(q^{next})", next = .m + 1)]
    Increasing { m: i64 },
    #[error("phi must be positive: {0}")]
    NonPositive(String),
    #[error("the expansion is known to {available} quotients, range needs {needed}")]
    Uncertified { needed: usize, available: usize },
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `phi`, evaluated only at powers of `q`.
#[derive(Debug, Clone, PartialEq)]
pub enum ApproxFunction {
    /// `phi(t) = c t^{-tau}`
    PowerLaw { c: ExactRational, tau: ExactRational },
    /// `phi(q^m)` for the listed `m`.
    Table(BTreeMap<i64, ExactRational>),
}

impl ApproxFunction {
    /// `phi(t) = 1/t`
    pub fn inverse() -> Self {
        Self::scaled_inverse(ExactRational::one())
    }

    /// `phi(t) = c/t`
    pub fn scaled_inverse(c: ExactRational) -> Self {
        ApproxFunction::PowerLaw {
            c,
            tau: ExactRational::one(),
        }
    }

    pub fn power_law(c: ExactRational, tau: ExactRational) -> Result<Self, DirichletError> {
        if !c.is_positive() {
            return Err(DirichletError::NonPositive(format!("c = {c}")));
        }
        if tau.is_negative() {
            return Err(DirichletError::Increasing { m: 0 });
        }
        Ok(ApproxFunction::PowerLaw { c, tau })
    }

    pub fn table(values: BTreeMap<i64, ExactRational>) -> Result<Self, DirichletError> {
        for (m, v) in &values {
            if !v.is_positive() {
                return Err(DirichletError::NonPositive(format!("phi(q^{m}) = {v}")));
            }
        }
        let entries: Vec<_> = values.iter().collect();
        for w in entries.windows(2) {
            if w[1].1 > w[0].1 {
                return Err(DirichletError::Increasing { m: *w[0].0 });
            }
        }
        Ok(ApproxFunction::Table(values))
    }

    /// `phi(t) -> 0` as `t -> inf`; unknown for tables.
    pub fn tends_to_zero(&self) -> Option<bool> {
        match self {
            ApproxFunction::PowerLaw { tau, .. } => Some(tau.is_positive()),
            ApproxFunction::Table(_) => None,
        }
    }

    /// Whether `phi(q^m) >= q^{-m}`, decided exactly. For `phi = c t^{-tau}`
    /// with `tau = a/b` this is `c^b q^{m(b-a)} >= 1`.
    pub fn criterion(&self, q: u32, m: usize) -> Option<bool> {
        match self {
            ApproxFunction::PowerLaw { c, tau } => {
                let a = tau.numer();
                let b = tau.denom();
                let b_small: i32 = b.try_into().ok()?;
                let shift: i64 = (b - a).try_into().ok()?;
                let lhs = c.pow(b_small) * q_pow(q, shift * m as i64);
                Some(lhs >= ExactRational::one())
            }
            ApproxFunction::Table(values) => {
                let v = values.get(&(m as i64))?;
                Some(*v >= q_pow(q, -(m as i64)))
            }
        }
    }
}

/// `||x|| = min_P |x - P| = |{x}|`; zero when `{x}` vanishes to the known
/// precision.
pub fn dist_to_lattice(x: &LaurentSeries) -> ExactRational {
    let (_, frac) = x.split();
    frac.norm().norm(x.field().q())
}

/// `||num/den||`, exact.
pub fn dist_to_lattice_rational(num: &Poly, den: &Poly) -> Result<ExactRational, DirichletError> {
    let (_, rem) = num.checked_divrem(den)?;
    Ok(match rem.deg() {
        None => ExactRational::zero(),
        Some(d) => q_pow(num.field().q(), d as i64 - den.deg().unwrap_or(0) as i64),
    })
}

/// `x = [x] + {x}` with `{x}` as an expansion target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Number {
    pub int_part: Poly,
    pub frac: Target,
}

impl Number {
    pub fn rational(num: &Poly, den: &Poly) -> Result<Self, DirichletError> {
        if den.is_zero() {
            return Err(CfError::ZeroDenominator.into());
        }
        let (int_part, rem) = num.checked_divrem(den)?;
        let g = rem.checked_gcd(den)?;
        let (num, _) = rem.checked_divrem(&g)?;
        let (den, _) = den.checked_divrem(&g)?;
        Ok(Self {
            int_part,
            frac: Target::Rational { num, den },
        })
    }

    pub fn series(x: &LaurentSeries) -> Self {
        let (int_part, frac) = x.split();
        Self {
            int_part,
            frac: Target::Series(frac),
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.int_part.field()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "ser_poly")]
    pub p: Poly,
    #[serde(serialize_with = "ser_poly")]
    pub q: Poly,
    /// Convergent index; 0 is `(P_0, Q_0) = (0, 1)`.
    pub index: usize,
    /// `log_q |Q|`
    pub q_log_norm: usize,
    /// `log_q |Qx - P|`, `None` when `Qx = P`.
    pub residual_log_norm: Option<i64>,
}

fn ser_poly<S: serde::Serializer>(p: &Poly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

/// A nonzero `(P, Q)` with `|Qx - P| <= 1/t` and `|Q| < t`, `t = q^tau`.
///
/// The convergent `(P_n, Q_n)` with `|Q_n| < t <= |Q_{n+1}|` works, since
/// `|Q_n x - P_n| = 1/|Q_{n+1}|`. When `x = A/B` and `t > |B|` the pair is
/// `(A, B)` itself.
pub fn dirichlet_witness(x: &Number, tau: &ExactRational) -> Result<Witness, DirichletError> {
    if !tau.is_positive() {
        return Err(DirichletError::TNotAboveOne(tau.clone()));
    }
    let field = x.field();
    let cf = x.frac.expansion()?;
    let conv = convergents(&cf.quotients);
    let degree = |n: usize| -> ExactRational {
        let d = if n == 0 { 0 } else { conv[n - 1].q.deg().unwrap_or(0) };
        ExactRational::from_integer(d.into())
    };
    let available = if cf.terminated { cf.len() } else { cf.certified };
    // largest n with deg Q_n < tau
    let mut n = 0;
    while n < available && degree(n + 1) < *tau {
        n += 1;
    }
    if !cf.terminated && n >= available {
        return Err(DirichletError::Uncertified {
            needed: n + 1,
            available,
        });
    }
    let (p, q) = if n == 0 {
        (Poly::zero(field), Poly::one(field))
    } else {
        (conv[n - 1].p.clone(), conv[n - 1].q.clone())
    };
    // Q x - (P + Q [x]) = Q {x} - P
    let residual_log_norm = x.frac.log_residual(&p, &q)?;
    let p = &p + &(&q * &x.int_part);
    Ok(Witness {
        q_log_norm: q.deg().unwrap_or(0),
        p,
        q,
        index: n,
        residual_log_norm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionRow {
    pub n: usize,
    /// `S_n = sum_{i<=n} deg A_i`
    pub degree_sum: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    /// The checked range of `n`; nothing is claimed beyond it.
    pub range: (usize, usize),
    pub holds: bool,
    pub first_failure: Option<usize>,
    pub rows: Vec<CriterionRow>,
}

/// Check `phi(q^{S_n}) >= q^{-S_n}` for every `n` in `range`.
pub fn is_improvable(x: &Number, phi: &ApproxFunction, range: RangeInclusive<usize>) -> Result<Verdict, DirichletError> {
    let (lo, hi) = (*range.start(), *range.end());
    let cf = x.frac.expansion()?;
    let available = if cf.terminated { cf.len() } else { cf.certified };
    if hi > available {
        return Err(DirichletError::Uncertified { needed: hi, available });
    }
    let q = x.field().q();
    let degrees = cf.degrees();
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for n in lo.max(1)..=hi {
        let s: usize = degrees[..n].iter().sum();
        match phi.criterion(q, s) {
            Some(holds) => rows.push(CriterionRow {
                n,
                degree_sum: s,
                holds,
            }),
            None => missing.push(s),
        }
    }
    if !missing.is_empty() {
        missing.dedup();
        return Err(DirichletError::Undefined(missing));
    }
    let first_failure = rows.iter().find(|r| !r.holds).map(|r| r.n);
    Ok(Verdict {
        range: (lo, hi),
        holds: first_failure.is_none(),
        first_failure,
        rows,
    })
}

/// A series known to `precision` coefficients whose certified quotients are
/// all `z`: the truncation of `[z, z, ..., z]` with enough terms.
pub fn counterexample_series(field: FieldSpec, precision: usize) -> LaurentSeries {
    let quotients = vec![Poly::z(field); precision / 2 + 1];
    let last = convergents(&quotients).pop().expect("nonempty");
    LaurentSeries::from_rational(&last.p, &last.q, precision).expect("deg P < deg Q")
}

/// `phi(q^m) = q^{-m}/2` on `m = 0..=max`; fails the criterion at every `m`.
pub fn half_inverse_table(q: u32, max: usize) -> ApproxFunction {
    let half = ExactRational::new(1.into(), 2.into());
    let values = (0..=max as i64).map(|m| (m, q_pow(q, -m) * &half)).collect();
    ApproxFunction::table(values).expect("positive, decreasing")
}

/// `||Q_{n-1} x|| = 1/|Q_n|` for the rational `num/den`, `n = 1..=len`.
pub fn lattice_distance_identity(num: &Poly, den: &Poly) -> Result<bool, DirichletError> {
    let cf = expand_rational(num, den)?;
    let conv = convergents(&cf.quotients);
    let field = num.field();
    let mut prev_q = Poly::one(field);
    for c in &conv {
        let lhs = dist_to_lattice_rational(&(&prev_q * num), den)?;
        let rhs = q_pow(field.q(), -(c.q.deg().unwrap_or(0) as i64));
        if lhs != rhs {
            return Ok(false);
        }
        prev_q = c.q.clone();
    }
    Ok(true)
}
