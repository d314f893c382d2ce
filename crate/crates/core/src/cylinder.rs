//! Cylinder geometry and degree-sum combinatorics, all in exact rationals.

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::field::FieldSpec;
use crate::poly::Poly;
use crate::rational::{from_biguint, q_pow, to_f64, ExactRational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CylinderError {
    #[error("partial quotient degrees must be >= 1, got {0}")]
    ZeroDegree(usize),
    #[error("explicit quotients disagree with the degree list at position {0}")]
    QuotientMismatch(usize),
    #[error("k must be >= 1")]
    ZeroLength,
}

/// The order-n cylinder `I(A_1, ..., A_n)`. Only the degrees matter for
/// measure and diameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderSpec {
    field: FieldSpec,
    degrees: Vec<usize>,
    quotients: Option<Vec<Poly>>,
}

impl CylinderSpec {
    pub fn from_degrees(field: FieldSpec, degrees: Vec<usize>) -> Result<Self, CylinderError> {
        if let Some(i) = degrees.iter().position(|&d| d == 0) {
            return Err(CylinderError::ZeroDegree(i));
        }
        Ok(Self {
            field,
            degrees,
            quotients: None,
        })
    }

    pub fn from_quotients(field: FieldSpec, quotients: Vec<Poly>) -> Result<Self, CylinderError> {
        let mut degrees = Vec::with_capacity(quotients.len());
        for (i, a) in quotients.iter().enumerate() {
            match a.deg() {
                Some(d) if d >= 1 && a.field() == field => degrees.push(d),
                Some(0) | None => return Err(CylinderError::ZeroDegree(i)),
                Some(_) => return Err(CylinderError::QuotientMismatch(i)),
            }
        }
        Ok(Self {
            field,
            degrees,
            quotients: Some(quotients),
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn quotients(&self) -> Option<&[Poly]> {
        self.quotients.as_deref()
    }

    pub fn degree_sum(&self) -> usize {
        self.degrees.iter().sum()
    }
}

/// `q^{-2 sum d_i - 1}`
pub fn cylinder_diameter(c: &CylinderSpec) -> ExactRational {
    q_pow(c.field.q(), -(2 * c.degree_sum() as i64) - 1)
}

/// `q^{-2 sum d_i}`
pub fn cylinder_measure(c: &CylinderSpec) -> ExactRational {
    q_pow(c.field.q(), -(2 * c.degree_sum() as i64))
}

/// Diameter of the union of order-(n+1) cylinders with the given prefix
/// and `deg A_{n+1} >= m`: `q^{-m - 2 sum prefix}`.
pub fn gset_diameter(field: FieldSpec, prefix_degrees: &[usize], m: usize) -> ExactRational {
    let sum: usize = prefix_degrees.iter().sum();
    q_pow(field.q(), -(m as i64) - 2 * sum as i64)
}

/// Number of order-k cylinders with degree sum `m`:
/// `C(m-1, k-1) (q-1)^k q^m`, and 0 when `m < k`.
pub fn count_cylinders(field: FieldSpec, m: usize, k: usize) -> BigUint {
    if k == 0 || m < k {
        return BigUint::zero();
    }
    let q = BigUint::from(field.q());
    let unit = BigUint::from(field.q() - 1);
    binomial(BigUint::from(m - 1), BigUint::from(k - 1)) * unit.pow(k as u32) * q.pow(m as u32)
}

/// `nu{x : sum_{i<=k} deg A_i(x) = m} = C(m-1, k-1) (q-1)^k q^{-m}`.
pub fn measure_degree_sum(field: FieldSpec, m: usize, k: usize) -> ExactRational {
    from_biguint(count_cylinders(field, m, k)) * q_pow(field.q(), -2 * m as i64)
}

/// `nu{x : sum_{i<=k} deg A_i(x) >= M}`, summed in closed form.
///
/// With `x = 1/q` and `S_j(M) = sum_{m>=M} C(m-1, j-1) x^m`, Pascal's rule
/// gives `(1-x) S_j(M) = C(M-1, j-1) x^M + x S_{j-1}(M)` and
/// `S_1(M) = x^M/(1-x)`; the measure is `(q-1)^k S_k(M)`.
pub fn tail_measure(field: FieldSpec, big_m: usize, k: usize) -> Result<ExactRational, CylinderError> {
    if k == 0 {
        return Err(CylinderError::ZeroLength);
    }
    if big_m <= k {
        return Ok(ExactRational::one());
    }
    let q = field.q();
    let x = q_pow(q, -1);
    let one_minus_x = ExactRational::one() - &x;
    let x_m = q_pow(q, -(big_m as i64));
    let mut s = &x_m / &one_minus_x;
    for j in 2..=k {
        let c = from_biguint(binomial(BigUint::from(big_m - 1), BigUint::from(j - 1)));
        s = (c * &x_m + &x * s) / &one_minus_x;
    }
    let unit = from_biguint(BigUint::from(q - 1).pow(k as u32));
    Ok(unit * s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailProfile {
    pub q: u32,
    pub k: usize,
    /// `(M, tail(M) / (M^{k-1} q^{-M}))` for each sampled M.
    pub ratios: Vec<(usize, f64)>,
    pub min: f64,
    pub max: f64,
}

/// Empirical ratio of the tail measure to `M^{k-1} q^{-M}` for `M` in
/// `k..=m_max`.
pub fn tail_profile(field: FieldSpec, k: usize, m_max: usize) -> Result<TailProfile, CylinderError> {
    let q = field.q();
    let mut ratios = Vec::new();
    for m in k.max(1)..=m_max {
        let tail = tail_measure(field, m, k)?;
        let scale = from_biguint(BigUint::from(m).pow(k as u32 - 1)) * q_pow(q, -(m as i64));
        ratios.push((m, to_f64(&(tail / scale))));
    }
    let min = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let max = ratios.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(TailProfile {
        q,
        k,
        ratios,
        min,
        max,
    })
}

/// Every `(d_1..d_k)` with `d_i >= 1` and `sum d_i = m`, in lexicographic order.
pub fn compositions(m: usize, k: usize) -> Compositions {
    let current = if k == 0 || m < k {
        None
    } else {
        let mut v = vec![1; k];
        v[k - 1] = m - (k - 1);
        Some(v)
    };
    Compositions { current }
}

pub struct Compositions {
    current: Option<Vec<usize>>,
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let v = self.current.as_mut().unwrap();
        let k = v.len();
        // Rightmost part that can take a unit from the parts after it.
        let pivot = (0..k.saturating_sub(1))
            .rev()
            .find(|&i| v[i + 1..].iter().sum::<usize>() > k - 1 - i);
        match pivot {
            Some(i) => {
                let rest: usize = v[i + 1..].iter().sum::<usize>() - 1;
                v[i] += 1;
                v[i + 1..k - 1].iter_mut().for_each(|d| *d = 1);
                v[k - 1] = rest - (k - 2 - i);
            }
            None => self.current = None,
        }
        Some(out)
    }
}
