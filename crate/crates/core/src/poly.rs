//! Polynomials over F_q in canonical ascending-coefficient form.
//!
//! Text form is symbolic: `z^2+1`, `2*z^3+z+2`, `2z`. Terms may appear in any
//! order and repeated powers are summed. The printer emits descending powers
//! with `*` between a non-unit coefficient and `z`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use thiserror::Error;

use crate::field::FieldSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("field mismatch: F_{left} vs F_{right}")]
    FieldMismatch { left: u32, right: u32 },
    #[error("degree must be at least 1, got {0}")]
    DegreeTooSmall(i64),
    #[error("cannot parse polynomial {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// Degree of a polynomial. The zero polynomial has degree `NegInfinity`,
/// which orders below every finite degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// A polynomial in F_q[z]. `coeffs[i]` is the coefficient of `z^i`; there is
/// never a trailing zero, so the zero polynomial has an empty vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: FieldSpec,
    coeffs: Vec<u32>,
}

impl Poly {
    /// Build from ascending coefficients, reducing each value mod q.
    pub fn from_coeffs(field: FieldSpec, coeffs: Vec<u32>) -> Self {
        let q = field.q();
        let mut p = Self {
            field,
            coeffs: coeffs.into_iter().map(|c| c % q).collect(),
        };
        p.normalize();
        p
    }

    pub fn zero(field: FieldSpec) -> Self {
        Self {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: FieldSpec) -> Self {
        Self::constant(field, 1)
    }

    pub fn constant(field: FieldSpec, c: u32) -> Self {
        Self::from_coeffs(field, vec![c])
    }

    /// `c * z^n`.
    pub fn monomial(field: FieldSpec, c: u32, n: usize) -> Self {
        let mut coeffs = vec![0; n + 1];
        coeffs[n] = c;
        Self::from_coeffs(field, coeffs)
    }

    /// The polynomial `z`.
    pub fn z(field: FieldSpec) -> Self {
        Self::monomial(field, 1, 1)
    }

    fn normalize(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    /// Degree of a nonzero polynomial, `None` for zero.
    pub fn deg(&self) -> Option<usize> {
        self.degree().finite()
    }

    pub fn leading_coeff(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff() == 1
    }

    /// Scale to leading coefficient 1; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.field.inv(self.leading_coeff()) {
            Some(inv) => self.scale(inv),
            None => self.clone(),
        }
    }

    pub fn scale(&self, c: u32) -> Self {
        let f = self.field;
        Self::from_coeffs(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Multiply by `z^n`.
    pub fn shift(&self, n: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; n];
        coeffs.extend_from_slice(&self.coeffs);
        Self {
            field: self.field,
            coeffs,
        }
    }

    fn same_field(&self, other: &Self) -> Result<(), PolyError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(PolyError::FieldMismatch {
                left: self.field.q(),
                right: other.field.q(),
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.same_field(other)?;
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| f.add(self.coeff(i), other.coeff(i)))
            .collect();
        Ok(Self::from_coeffs(f, coeffs))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.same_field(other)?;
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| f.sub(self.coeff(i), other.coeff(i)))
            .collect();
        Ok(Self::from_coeffs(f, coeffs))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.same_field(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.field));
        }
        let f = self.field;
        let q = f.q() as u64;
        let mut acc = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u64 * b as u64) % q;
            }
        }
        Ok(Self::from_coeffs(f, acc.into_iter().map(|c| c as u32).collect()))
    }

    /// Euclidean division: returns `(quotient, remainder)` with
    /// `deg remainder < deg divisor`.
    pub fn checked_divrem(&self, divisor: &Self) -> Result<(Self, Self), PolyError> {
        self.same_field(divisor)?;
        let f = self.field;
        let d = divisor.deg().ok_or(PolyError::DivisionByZero)?;
        let lead_inv = f
            .inv(divisor.leading_coeff())
            .ok_or(PolyError::DivisionByZero)?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return Ok((Self::zero(f), self.clone()));
        }
        let mut quot = vec![0u32; rem.len() - d];
        for top in (d..rem.len()).rev() {
            let c = rem[top];
            if c == 0 {
                continue;
            }
            let factor = f.mul(c, lead_inv);
            quot[top - d] = factor;
            let base = top - d;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[base + j] = f.sub(rem[base + j], f.mul(factor, b));
            }
        }
        rem.truncate(d);
        Ok((Self::from_coeffs(f, quot), Self::from_coeffs(f, rem)))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn checked_gcd(&self, other: &Self) -> Result<Self, PolyError> {
        self.same_field(other)?;
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.checked_divrem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    /// Parse the symbolic text form over the given field.
    pub fn parse(field: FieldSpec, input: &str) -> Result<Self, PolyError> {
        let err = |reason: &str| PolyError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        let mut coeffs: Vec<u32> = Vec::new();
        for term in compact.split('+') {
            if term.is_empty() {
                return Err(err("empty term"));
            }
            let (coef, power) = parse_term(term, field).map_err(|r| err(&r))?;
            if coeffs.len() <= power {
                coeffs.resize(power + 1, 0);
            }
            coeffs[power] = field.add(coeffs[power], coef);
        }
        Ok(Self::from_coeffs(field, coeffs))
    }
}

fn parse_term(term: &str, field: FieldSpec) -> Result<(u32, usize), String> {
    let parse_coef = |s: &str| -> Result<u32, String> {
        let v: u64 = s
            .parse()
            .map_err(|_| format!("bad coefficient {s:?}"))?;
        if v >= field.q() as u64 {
            return Err(format!("coefficient {v} outside 0..{}", field.q()));
        }
        Ok(v as u32)
    };
    match term.find('z') {
        None => Ok((parse_coef(term)?, 0)),
        Some(pos) => {
            let head = term[..pos].strip_suffix('*').unwrap_or(&term[..pos]);
            if term[..pos].ends_with('*') && head.is_empty() {
                return Err("dangling '*'".into());
            }
            let coef = if head.is_empty() { 1 } else { parse_coef(head)? };
            let tail = &term[pos + 1..];
            let power = if tail.is_empty() {
                1
            } else {
                let e = tail
                    .strip_prefix('^')
                    .ok_or_else(|| format!("unexpected {tail:?} after z"))?;
                e.parse::<usize>()
                    .map_err(|_| format!("bad exponent {e:?}"))?
            };
            Ok((coef, power))
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "z")?,
                (1, c) => write!(f, "{c}*z")?,
                (i, 1) => write!(f, "z^{i}")?,
                (i, c) => write!(f, "{c}*z^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[F_{}]({})", self.field.q(), self)
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by degree, then by coefficients from the top down.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.field
            .q()
            .cmp(&other.field.q())
            .then(self.coeffs.len().cmp(&other.coeffs.len()))
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

// Operator impls panic on mismatched fields; use the `checked_*` methods when
// operands come from untrusted sources.
impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.checked_add(rhs).expect("polynomial field mismatch")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.checked_sub(rhs).expect("polynomial field mismatch")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs).expect("polynomial field mismatch")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let f = self.field;
        Poly::from_coeffs(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }
}

/// Number of polynomials of exact degree `degree`: `(q-1) q^degree`.
pub fn count_polys(field: FieldSpec, degree: usize) -> BigUint {
    BigUint::from(field.q() - 1) * BigUint::from(field.q()).pow(degree as u32)
}

/// Every polynomial of exact degree `degree` over `field`, each exactly once.
pub fn enumerate_polys(field: FieldSpec, degree: i64) -> Result<PolyIter, PolyError> {
    if degree < 1 {
        return Err(PolyError::DegreeTooSmall(degree));
    }
    let d = degree as usize;
    let mut digits = vec![0u32; d + 1];
    digits[d] = 1;
    Ok(PolyIter {
        field,
        digits: Some(digits),
    })
}

/// Mixed-radix counter over coefficient vectors with a nonzero leading digit.
#[derive(Debug, Clone)]
pub struct PolyIter {
    field: FieldSpec,
    digits: Option<Vec<u32>>,
}

impl Iterator for PolyIter {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        let digits = self.digits.as_mut()?;
        let out = Poly {
            field: self.field,
            coeffs: digits.clone(),
        };
        let q = self.field.q();
        let top = digits.len() - 1;
        let mut i = 0;
        loop {
            if i == top {
                digits[i] += 1;
                if digits[i] == q {
                    self.digits = None;
                }
                break;
            }
            digits[i] += 1;
            if digits[i] < q {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn f(q: u64) -> FieldSpec {
        FieldSpec::new(q).unwrap()
    }

    fn p(q: u64, s: &str) -> Poly {
        Poly::parse(f(q), s).unwrap()
    }

    #[test]
    fn frobenius_square_over_f2() {
        let x = p(2, "z+1");
        assert_eq!(&x * &x, p(2, "z^2+1"));
    }

    #[test]
    fn long_division_by_hand() {
        let (quot, rem) = p(2, "z^2+1").checked_divrem(&p(2, "z")).unwrap();
        assert_eq!(quot, p(2, "z"));
        assert_eq!(rem, p(2, "1"));
    }

    #[test]
    fn gcd_over_f3() {
        assert_eq!(p(3, "z^2+2").checked_gcd(&p(3, "z+1")).unwrap(), p(3, "z+1"));
        assert_eq!(p(3, "z^2+1").checked_gcd(&p(3, "z+1")).unwrap(), p(3, "1"));
        // gcd is monic even for non-monic inputs
        assert_eq!(
            p(3, "2*z^2+1").checked_gcd(&p(3, "2z+2")).unwrap(),
            p(3, "z+1")
        );
    }

    #[test]
    fn division_by_zero_and_mismatch() {
        assert_eq!(
            p(2, "z").checked_divrem(&Poly::zero(f(2))),
            Err(PolyError::DivisionByZero)
        );
        assert_eq!(
            p(2, "z").checked_add(&p(3, "z")),
            Err(PolyError::FieldMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn zero_degree_marker() {
        let zero = Poly::zero(f(5));
        assert_eq!(zero.degree(), Degree::NegInfinity);
        assert!(Degree::NegInfinity < Degree::Finite(0));
        assert_eq!((&zero * &p(5, "z^3")).degree(), Degree::NegInfinity);
    }

    #[test]
    fn enumeration_small_cases() {
        let deg1: Vec<Poly> = enumerate_polys(f(2), 1).unwrap().collect();
        assert_eq!(deg1, vec![p(2, "z"), p(2, "z+1")]);
        assert_eq!(enumerate_polys(f(2), 2).unwrap().count(), 4);
        assert_eq!(enumerate_polys(f(3), 2).unwrap().count(), 18);
        assert_eq!(
            enumerate_polys(f(2), 0).unwrap_err(),
            PolyError::DegreeTooSmall(0)
        );
    }

    #[test]
    fn enumeration_counts_and_distinctness() {
        for q in [2u64, 3, 5] {
            let max_d = if q == 5 { 5 } else { 6 };
            for d in 1..=max_d {
                let all: Vec<Poly> = enumerate_polys(f(q), d).unwrap().collect();
                assert_eq!(BigUint::from(all.len()), count_polys(f(q), d as usize));
                assert!(all.iter().all(|a| a.deg() == Some(d as usize)));
                let set: HashSet<_> = all.into_iter().collect();
                assert_eq!(BigUint::from(set.len()), count_polys(f(q), d as usize));
            }
        }
    }

    #[test]
    fn text_form() {
        let a = p(3, " 2 * z^3 + z + 2 ");
        assert_eq!(a.to_string(), "2*z^3+z+2");
        assert_eq!(p(3, "1+z^2").to_string(), "z^2+1");
        assert_eq!(p(3, "2z").to_string(), "2*z");
        assert_eq!(p(2, "z+z").to_string(), "0");
        assert!(Poly::parse(f(3), "3*z").is_err());
        assert!(Poly::parse(f(3), "z^").is_err());
        assert!(Poly::parse(f(3), "z++1").is_err());
        assert!(Poly::parse(f(3), "*z").is_err());
        assert!(Poly::parse(f(3), "").is_err());
    }

    fn arb_poly(q: u32) -> impl Strategy<Value = Poly> {
        prop::collection::vec(0..q, 0..12)
            .prop_map(move |c| Poly::from_coeffs(FieldSpec::new(q as u64).unwrap(), c))
    }

    fn arb_pair() -> impl Strategy<Value = (Poly, Poly)> {
        prop_oneof![Just(2u32), Just(3u32), Just(5u32)]
            .prop_flat_map(|q| (arb_poly(q), arb_poly(q)))
    }

    proptest! {
        #[test]
        fn degree_laws((a, b) in arb_pair()) {
            if let (Some(da), Some(db)) = (a.deg(), b.deg()) {
                prop_assert_eq!((&a * &b).deg(), Some(da + db));
            }
            prop_assert!((&a + &b).degree() <= a.degree().max(b.degree()));
        }

        #[test]
        fn divrem_roundtrip((a, b) in arb_pair()) {
            prop_assume!(!b.is_zero());
            let (quot, rem) = a.checked_divrem(&b).unwrap();
            prop_assert!(rem.degree() < b.degree());
            prop_assert_eq!(&(&quot * &b) + &rem, a);
        }

        #[test]
        fn gcd_divides_both((a, b) in arb_pair()) {
            let g = a.checked_gcd(&b).unwrap();
            if !g.is_zero() {
                prop_assert!(g.is_monic());
                prop_assert!(a.checked_divrem(&g).unwrap().1.is_zero());
                prop_assert!(b.checked_divrem(&g).unwrap().1.is_zero());
            }
        }

        #[test]
        fn text_roundtrip(a in prop_oneof![arb_poly(2), arb_poly(3), arb_poly(7)]) {
            let back = Poly::parse(a.field(), &a.to_string()).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
