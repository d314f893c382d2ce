//! Truncated formal Laurent series in F_q((z^-1)).
//!
//! A series `x = sum_{n >= v} c_n z^{-n}` is stored as its polynomial part
//! (every coefficient with `n <= 0`, exact) and the fractional coefficients
//! `c_1..c_N`. `N` is the precision: coefficients past `N` are unknown, and
//! every operation reports the largest index its output fully determines.
//!
//! Precision rules, with `v_x` the valuation of the known part of `x`:
//!
//! * `x + y` is determined up to `min(N_x, N_y)`.
//! * `x * y` is determined up to `min(v_x + N_y, N_x + v_y, N_x + N_y + 1)`,
//!   since the unknown tail of each factor is `O(z^{-(N+1)})`.
//! * `1/x`: writing `x = z^{-v} u` with `u` a unit whose first `N - v + 1`
//!   coefficients are known, long division determines the same number of
//!   coefficients of `1/u`, so `1/x = z^{v} / u` is determined up to index
//!   `N - 2v`.

use std::fmt;

use thiserror::Error;

use crate::field::FieldSpec;
use crate::poly::{Poly, PolyError};
use crate::rational::{q_pow, ExactRational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("series is zero up to precision {0}; it has no reciprocal")]
    ZeroDivisor(usize),
    #[error("input precision determines no coefficient of the result (needed index {needed} >= 0)")]
    InsufficientPrecision { needed: i64 },
    #[error("series is not in the valuation ideal (integer part {0})")]
    NotInIdeal(String),
    #[error("field mismatch: F_{left} vs F_{right}")]
    FieldMismatch { left: u32, right: u32 },
    #[error("cannot parse series {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Valuation `v` of a series, `|x| = q^{-v}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    /// Every known coefficient vanishes; the series is `O(z^{-(N+1)})`.
    ZeroUpTo(usize),
}

impl Valuation {
    /// `log_q |x|`, i.e. `-v`.
    pub fn log_norm(&self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(-v),
            Valuation::ZeroUpTo(_) => None,
        }
    }

    /// Exact norm `q^{-v}`; zero-up-to-precision reports 0.
    pub fn norm(&self, q: u32) -> ExactRational {
        match self {
            Valuation::Finite(v) => q_pow(q, -v),
            Valuation::ZeroUpTo(_) => ExactRational::from_integer(0.into()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Valuation::ZeroUpTo(_))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    field: FieldSpec,
    int_part: Poly,
    frac: Vec<u32>,
}

impl LaurentSeries {
    pub fn new(int_part: Poly, frac: Vec<u32>) -> Self {
        let field = int_part.field();
        let q = field.q();
        Self {
            field,
            int_part,
            frac: frac.into_iter().map(|c| c % q).collect(),
        }
    }

    /// An element of I given by `c_1..c_N`.
    pub fn from_frac(field: FieldSpec, frac: Vec<u32>) -> Self {
        Self::new(Poly::zero(field), frac)
    }

    pub fn zero(field: FieldSpec, precision: usize) -> Self {
        Self::from_frac(field, vec![0; precision])
    }

    /// A polynomial viewed as a series known to `precision` fractional places.
    pub fn from_poly(p: Poly, precision: usize) -> Self {
        Self::new(p, vec![0; precision])
    }

    /// The expansion of `num/den` to `precision` fractional coefficients.
    pub fn from_rational(num: &Poly, den: &Poly, precision: usize) -> Result<Self, LaurentError> {
        let (int_part, rem) = num.checked_divrem(den)?;
        let (digits, _) = rem.shift(precision).checked_divrem(den)?;
        let frac = (1..=precision).map(|n| digits.coeff(precision - n)).collect();
        Ok(Self::new(int_part, frac))
    }

    /// Build from a dense window: `coeffs[j]` is the coefficient of
    /// `z^{-(start + j)}`; indices past `precision` are dropped.
    fn from_window(field: FieldSpec, start: i64, coeffs: &[u32], precision: usize) -> Self {
        let at = |n: i64| -> u32 {
            let j = n - start;
            if j >= 0 && (j as usize) < coeffs.len() {
                coeffs[j as usize]
            } else {
                0
            }
        };
        let int_len = if start <= 0 { (-start) as usize + 1 } else { 0 };
        let int_coeffs = (0..int_len).map(|d| at(-(d as i64))).collect();
        let frac = (1..=precision as i64).map(at).collect();
        Self {
            field,
            int_part: Poly::from_coeffs(field, int_coeffs),
            frac,
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn precision(&self) -> usize {
        self.frac.len()
    }

    pub fn int_part(&self) -> &Poly {
        &self.int_part
    }

    pub fn frac_coeffs(&self) -> &[u32] {
        &self.frac
    }

    pub fn in_ideal(&self) -> bool {
        self.int_part.is_zero()
    }

    /// Coefficient of `z^{-n}`; `None` past the precision.
    pub fn coeff(&self, n: i64) -> Option<u32> {
        if n <= 0 {
            Some(self.int_part.coeff((-n) as usize))
        } else if (n as usize) <= self.frac.len() {
            Some(self.frac[n as usize - 1])
        } else {
            None
        }
    }

    pub fn norm(&self) -> Valuation {
        if let Some(d) = self.int_part.deg() {
            return Valuation::Finite(-(d as i64));
        }
        match self.frac.iter().position(|&c| c != 0) {
            Some(i) => Valuation::Finite(i as i64 + 1),
            None => Valuation::ZeroUpTo(self.frac.len()),
        }
    }

    /// `([x], {x})`.
    pub fn split(&self) -> (Poly, LaurentSeries) {
        (
            self.int_part.clone(),
            Self::from_frac(self.field, self.frac.clone()),
        )
    }

    /// Drop coefficients past `precision` (no-op if already coarser).
    pub fn truncate(&self, precision: usize) -> Self {
        let mut out = self.clone();
        out.frac.truncate(precision);
        out
    }

    /// Append zero coefficients: treats the known truncation as exact.
    pub fn pad_to(&self, precision: usize) -> Self {
        let mut out = self.clone();
        if out.frac.len() < precision {
            out.frac.resize(precision, 0);
        }
        out
    }

    fn check_field(&self, other: &Self) -> Result<(), LaurentError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(LaurentError::FieldMismatch {
                left: self.field.q(),
                right: other.field.q(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_field(other)?;
        let f = self.field;
        let n = self.precision().min(other.precision());
        let frac = (0..n).map(|i| f.add(self.frac[i], other.frac[i])).collect();
        Ok(Self {
            field: f,
            int_part: self.int_part.checked_add(&other.int_part)?,
            frac,
        })
    }

    pub fn neg(&self) -> Self {
        let f = self.field;
        Self {
            field: f,
            int_part: -&self.int_part,
            frac: self.frac.iter().map(|&c| f.neg(c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LaurentError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_field(other)?;
        let f = self.field;
        let nx = self.precision() as i64;
        let ny = other.precision() as i64;
        let mut bound = nx + ny + 1;
        let vx = self.norm();
        let vy = other.norm();
        if let Valuation::Finite(v) = vx {
            bound = bound.min(v + ny);
        }
        if let Valuation::Finite(v) = vy {
            bound = bound.min(nx + v);
        }
        if bound < 0 {
            return Err(LaurentError::InsufficientPrecision { needed: -bound });
        }
        let (sx, wx) = self.window();
        let (sy, wy) = other.window();
        let start = sx + sy;
        let len = (bound - start + 1).max(0) as usize;
        let q = f.q() as u64;
        let mut acc = vec![0u64; len];
        for (i, &a) in wx.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in wy.iter().enumerate() {
                let k = i + j;
                if k >= len {
                    break;
                }
                acc[k] = (acc[k] + a as u64 * b as u64) % q;
            }
        }
        let coeffs: Vec<u32> = acc.into_iter().map(|c| c as u32).collect();
        Ok(Self::from_window(f, start, &coeffs, bound as usize))
    }

    /// Dense coefficients from the top of the integer part down to `N`.
    fn window(&self) -> (i64, Vec<u32>) {
        let top = self.int_part.deg().unwrap_or(0);
        let mut w: Vec<u32> = (0..=top).rev().map(|d| self.int_part.coeff(d)).collect();
        w.extend_from_slice(&self.frac);
        (-(top as i64), w)
    }

    pub fn reciprocal(&self) -> Result<Self, LaurentError> {
        let v = match self.norm() {
            Valuation::Finite(v) => v,
            Valuation::ZeroUpTo(n) => return Err(LaurentError::ZeroDivisor(n)),
        };
        let n = self.precision() as i64;
        let out_precision = n - 2 * v;
        if out_precision < 0 {
            return Err(LaurentError::InsufficientPrecision {
                needed: -out_precision,
            });
        }
        let f = self.field;
        // u_i is the coefficient of z^{-(v+i)}; known for v + i <= n.
        let known = (n - v + 1) as usize;
        let unit: Vec<u32> = (0..known)
            .map(|i| self.coeff(v + i as i64).unwrap_or(0))
            .collect();
        let lead_inv = f.inv(unit[0]).expect("leading coefficient is nonzero");
        let minus_lead_inv = f.neg(lead_inv);
        let mut inv = vec![0u32; known];
        inv[0] = lead_inv;
        for i in 1..known {
            let mut s = 0u32;
            for j in 1..=i {
                if unit[j] != 0 {
                    s = f.add(s, f.mul(unit[j], inv[i - j]));
                }
            }
            inv[i] = f.mul(minus_lead_inv, s);
        }
        // 1/x = sum_i inv_i z^{v - i}, i.e. index i - v.
        Ok(Self::from_window(f, -v, &inv, out_precision as usize))
    }

    /// The Gauss map `T(x) = 1/x - [1/x]` on I, with `T(0) = 0`.
    ///
    /// A series that is zero up to its precision maps to zero at the same
    /// precision.
    pub fn gauss_map(&self) -> Result<Self, LaurentError> {
        if !self.in_ideal() {
            return Err(LaurentError::NotInIdeal(self.int_part.to_string()));
        }
        if self.norm().is_zero() {
            return Ok(self.clone());
        }
        let (_, frac) = self.reciprocal()?.split();
        Ok(frac)
    }

    pub fn parse(field: FieldSpec, input: &str) -> Result<Self, LaurentError> {
        let err = |reason: String| LaurentError::Parse {
            input: input.to_string(),
            reason,
        };
        let mut int_part = None;
        let mut frac = None;
        for piece in input.split(';') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            let (key, value) = piece
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got {piece:?}")))?;
            match key.trim() {
                "int" => int_part = Some(Poly::parse(field, value)?),
                "frac" => {
                    let value = value.trim();
                    let coeffs = if value.is_empty() {
                        Vec::new()
                    } else {
                        value
                            .split(',')
                            .map(|c| {
                                let c = c.trim();
                                match c.parse::<u32>() {
                                    Ok(v) if v < field.q() => Ok(v),
                                    _ => Err(err(format!("bad coefficient {c:?}"))),
                                }
                            })
                            .collect::<Result<Vec<_>, _>>()?
                    };
                    frac = Some(coeffs);
                }
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        let frac = frac.ok_or_else(|| err("missing frac=".into()))?;
        let int_part = int_part.unwrap_or_else(|| Poly::zero(field));
        Ok(Self::new(int_part, frac))
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "int={}; frac=", self.int_part)?;
        for (i, c) in self.frac.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Laurent[F_{}]({})", self.field.q(), self)
    }
}
