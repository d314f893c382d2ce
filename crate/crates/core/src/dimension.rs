//! The exponent functions `f_k`, the dimension equation and its solvers.
//!
//! For `s > 1/2` the series `sum_{j>=1} (q-1) q^j q^{-2js - B f_k(s)}` is a
//! geometric series and is always evaluated in closed form. The truncated
//! sum up to `M` is summed term by term.

use serde::Serialize;
use thiserror::Error;

use crate::field::FieldSpec;

/// Left end of the bisection bracket for the infinite-sum equation.
pub const S_LOWER: f64 = 0.5 + 1e-9;
pub const RESIDUAL_TOL: f64 = 1e-12;
pub const WIDTH_TOL: f64 = 1e-13;
const MAX_ITERATIONS: u32 = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DimensionError {
    #[error("s = {0} is outside (0, 1]")]
    SOutOfRange(f64),
    #[error("the series diverges for s = {0} <= 1/2")]
    Divergent(f64),
    #[error("k must be >= 1")]
    ZeroK,
    #[error("B = {0} is not in (0, inf); use dim_f for the boundary cases")]
    NotFiniteCase(f64),
    #[error("M = {0} must be >= 2")]
    SmallM(usize),
    #[error("{name} identity residual {residual:e} exceeds {tol:e}")]
    IdentityResidual {
        name: &'static str,
        residual: f64,
        tol: f64,
    },
    #[error("growth function {0} is bounded; the G-set formula needs Phi(n) -> inf")]
    BoundedGrowth(String),
    #[error("invalid growth function: {0}")]
    InvalidGrowth(String),
}

fn check_s(s: f64) -> Result<(), DimensionError> {
    if s.is_finite() && s > 0.0 && s <= 1.0 {
        Ok(())
    } else {
        Err(DimensionError::SOutOfRange(s))
    }
}

/// `f_k(s)` by the recursion `f_1 = s`, `f_{i+1} = s f_i / (1 - s + f_i)`.
pub fn f_k(s: f64, k: usize) -> Result<f64, DimensionError> {
    check_s(s)?;
    if k == 0 {
        return Err(DimensionError::ZeroK);
    }
    let mut f = s;
    for _ in 1..k {
        f = s * f / (1.0 - s + f);
    }
    Ok(f)
}

/// `f_k(s) = s^k (2s-1) / (s^k - (1-s)^k)`, with the limit `1/(2k)` at `s = 1/2`.
pub fn f_k_closed(s: f64, k: usize) -> Result<f64, DimensionError> {
    check_s(s)?;
    if k == 0 {
        return Err(DimensionError::ZeroK);
    }
    if s == 0.5 {
        return Ok(1.0 / (2 * k) as f64);
    }
    let sk = s.powi(k as i32);
    Ok(sk * (2.0 * s - 1.0) / (sk - (1.0 - s).powi(k as i32)))
}

/// `log_q` of the infinite sum, using `1 - q^{1-2s} = -expm1((1-2s) ln q)`.
fn log_pressure(q: u32, k: usize, b: f64, s: f64) -> Result<f64, DimensionError> {
    check_s(s)?;
    if s <= 0.5 {
        return Err(DimensionError::Divergent(s));
    }
    let ln_q = (q as f64).ln();
    let t = (1.0 - 2.0 * s) * ln_q;
    let geometric = ((q - 1) as f64).ln() + t - (-t.exp_m1()).ln();
    Ok(geometric / ln_q - b * f_k(s, k)?)
}

/// `sum_{j>=1} (q-1) q^j / q^{2js + B f_k(s)}` for `s > 1/2`, in closed form.
pub fn pressure(field: FieldSpec, k: usize, b: f64, s: f64) -> Result<f64, DimensionError> {
    Ok((field.q() as f64).powf(log_pressure(field.q(), k, b, s)?))
}

/// The same sum truncated at `j = M`, summed literally. Defined for all
/// `s` in `(0, 1]`.
pub fn pressure_finite(field: FieldSpec, k: usize, b: f64, s: f64, m: usize) -> Result<f64, DimensionError> {
    check_s(s)?;
    let q = field.q() as f64;
    let fk = f_k(s, k)?;
    let sum: f64 = (1..=m)
        .map(|j| (q - 1.0) * q.powf(j as f64 * (1.0 - 2.0 * s) - b * fk))
        .sum();
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverInfo {
    pub iterations: u32,
    pub bracket: (f64, f64),
    /// `|pressure(s) - 1|` at the returned root.
    pub residual: f64,
    /// The root lies left of the bracket: the equation's value at the lower
    /// end is already below 1, so `s` is only known to be in `(1/2, lower]`.
    pub bracket_limited: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub s: f64,
    pub info: SolverInfo,
}

/// Bisection for a decreasing `g` with `g(lo) >= 1 >= g(hi)`. Runs until
/// both tolerances hold or the bracket cannot shrink further, then returns
/// whichever endpoint has the smaller residual.
fn bisect(mut g: impl FnMut(f64) -> Result<f64, DimensionError>, lo: f64, hi: f64) -> Result<Root, DimensionError> {
    let bracket = (lo, hi);
    let (mut a, mut b) = (lo, hi);
    let (mut ga, mut gb) = (g(a)?, g(b)?);
    if ga <= 1.0 {
        return Ok(Root {
            s: a,
            info: SolverInfo {
                iterations: 0,
                bracket,
                residual: (ga - 1.0).abs(),
                bracket_limited: ga < 1.0,
            },
        });
    }
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let best = (ga - 1.0).abs().min((gb - 1.0).abs());
        if best <= RESIDUAL_TOL && b - a <= WIDTH_TOL {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        iterations += 1;
        let gm = g(mid)?;
        if gm >= 1.0 {
            a = mid;
            ga = gm;
        } else {
            b = mid;
            gb = gm;
        }
    }
    let (s, gs) = if (ga - 1.0).abs() <= (gb - 1.0).abs() { (a, ga) } else { (b, gb) };
    Ok(Root {
        s,
        info: SolverInfo {
            iterations,
            bracket,
            residual: (gs - 1.0).abs(),
            bracket_limited: false,
        },
    })
}

/// The root `s_k(B)` of the dimension equation, `0 < B < inf`.
pub fn solve_s_k(field: FieldSpec, k: usize, b: f64) -> Result<Root, DimensionError> {
    if k == 0 {
        return Err(DimensionError::ZeroK);
    }
    if !(b.is_finite() && b > 0.0) {
        return Err(DimensionError::NotFiniteCase(b));
    }
    bisect(|s| pressure(field, k, b, s), S_LOWER, 1.0)
}

/// The root `s_{k,M}(B)` of the equation truncated at `M` terms.
pub fn solve_s_k_m(field: FieldSpec, k: usize, b: f64, m: usize) -> Result<Root, DimensionError> {
    if k == 0 {
        return Err(DimensionError::ZeroK);
    }
    if m < 2 {
        return Err(DimensionError::SmallM(m));
    }
    if !(b.is_finite() && b > 0.0) {
        return Err(DimensionError::NotFiniteCase(b));
    }
    bisect(|s| pressure_finite(field, k, b, s, m), f64::MIN_POSITIVE, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaParams {
    pub alpha: Vec<f64>,
    /// `|sum alpha_i - B|`
    pub sum_residual: f64,
    /// `max_i |s alpha_i - (1-s) alpha_{i-1}|`
    pub ratio_residual: f64,
    /// `|B f_k(s) - s alpha_1|`
    pub f_residual: f64,
}

/// `alpha_i = s^{k-i} (2s-1) (1-s)^{i-1} B / (s^k - (1-s)^k)`, `i = 1..=k`.
///
/// At `s = 1/2` numerator and denominator both vanish; dividing out `2s-1`
/// leaves `B / k` for every `i`, which also satisfies `sum alpha_i = B` and
/// `B f_k(1/2) = B/(2k) = alpha_1 / 2`.
pub fn alpha_params(k: usize, b: f64, s: f64) -> Result<AlphaParams, DimensionError> {
    if k == 0 {
        return Err(DimensionError::ZeroK);
    }
    if !(0.5..1.0).contains(&s) {
        return Err(DimensionError::SOutOfRange(s));
    }
    let alpha: Vec<f64> = if s == 0.5 {
        vec![b / k as f64; k]
    } else {
        let den = s.powi(k as i32) - (1.0 - s).powi(k as i32);
        (1..=k)
            .map(|i| s.powi((k - i) as i32) * (2.0 * s - 1.0) * (1.0 - s).powi(i as i32 - 1) * b / den)
            .collect()
    };
    let sum_residual = (alpha.iter().sum::<f64>() - b).abs();
    let ratio_residual = alpha
        .windows(2)
        .map(|w| (s * w[1] - (1.0 - s) * w[0]).abs())
        .fold(0.0, f64::max);
    let f_residual = (b * f_k(s, k)? - s * alpha[0]).abs();
    let out = AlphaParams {
        alpha,
        sum_residual,
        ratio_residual,
        f_residual,
    };
    let tol = 1e-9 * b.max(1.0);
    for (name, residual) in [
        ("sum", out.sum_residual),
        ("ratio", out.ratio_residual),
        ("f_k", out.f_residual),
    ] {
        if residual > tol {
            return Err(DimensionError::IdentityResidual { name, residual, tol });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaSplit {
    /// `s_{k+1}(B)`
    pub s_tilde: f64,
    pub gamma: f64,
    /// `B s~ - (1 - s~) gamma`
    pub lhs: f64,
    /// `gamma f_k(s~)`
    pub mid: f64,
    /// `B f_{k+1}(s~)`
    pub rhs: f64,
    pub residual: f64,
}

pub const GAMMA_TOL: f64 = 1e-10;

/// `gamma = B s~ / (1 - s~ + f_k(s~))` with `s~ = s_{k+1}(B)`, together with
/// the two-sided identity `B s~ - (1-s~) gamma = gamma f_k(s~) = B f_{k+1}(s~)`.
pub fn gamma_split(field: FieldSpec, k: usize, b: f64) -> Result<GammaSplit, DimensionError> {
    let root = solve_s_k(field, k + 1, b)?;
    let s = root.s;
    let fk = f_k(s, k)?;
    let gamma = b * s / (1.0 - s + fk);
    let lhs = b * s - (1.0 - s) * gamma;
    let mid = gamma * fk;
    let rhs = b * f_k(s, k + 1)?;
    let residual = (lhs - mid).abs().max((mid - rhs).abs());
    if residual > GAMMA_TOL {
        return Err(DimensionError::IdentityResidual {
            name: "gamma",
            residual,
            tol: GAMMA_TOL,
        });
    }
    Ok(GammaSplit {
        s_tilde: s,
        gamma,
        lhs,
        mid,
        rhs,
        residual,
    })
}
