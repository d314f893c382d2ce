//! Growth functions `Phi`, their invariants and the dimension formulas for
//! the sets `F_k(Phi)` and `G_k(Phi)`.
//!
//! `B = liminf Phi(n)/n`, `log b = liminf log Phi(n) / n` and
//! `log a = limsup log Phi(n) / n`. Presets get exact invariants; tables
//! only yield estimates over their range.

use num_traits::{One, Signed, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::dimension::{solve_s_k, DimensionError, SolverInfo};
use crate::field::FieldSpec;
use crate::rational::{parse_rational, to_f64, ExactRational, RationalRepr};

/// Minimum table length for a classification.
pub const TABLE_MIN_POINTS: usize = 8;
/// Table estimates of `B` below this count as `B = 0`.
pub const TABLE_ZERO_B: f64 = 1e-6;
/// Table estimates of `B` above this count as `B = inf`.
pub const TABLE_INFINITE_B: f64 = 1e6;
/// Table estimates of `b` within this of 1 count as `b = 1`.
pub const TABLE_UNIT_B: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum GrowthKind {
    /// `slope * n`
    Linear(ExactRational),
    /// `n^c`
    Power(ExactRational),
    /// `base^n`
    Exponential(ExactRational),
    /// `c * log(n + 2)`
    LogScale(ExactRational),
    /// `base^(n^c)`
    ExpPower { base: ExactRational, exponent: ExactRational },
    Constant(ExactRational),
    /// `(n, Phi(n))` on consecutive `n`.
    Table(Vec<(u64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFunction {
    pub kind: GrowthKind,
    /// Evaluate as `max(Phi(n), k)`.
    pub clamp_at: Option<usize>,
}

/// A value in `[0, inf]`, exact when possible.
#[derive(Debug, Clone, PartialEq)]
pub enum Extended {
    Exact(ExactRational),
    Approx(f64),
    Infinite,
}

impl Extended {
    fn int(n: i64) -> Self {
        Extended::Exact(ExactRational::from_integer(n.into()))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Exact(r) => to_f64(r),
            Extended::Approx(v) => *v,
            Extended::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Extended::Exact(r) => RationalRepr::from(r).serialize(s),
            Extended::Approx(v) => s.serialize_f64(*v),
            Extended::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthInvariants {
    #[serde(rename = "B")]
    pub big_b: Extended,
    pub b: Extended,
    pub a: Extended,
    /// `Phi(n) -> inf`.
    pub unbounded: bool,
    /// Values come from a finite table.
    pub estimate: bool,
}

fn positive(r: &ExactRational, what: &str) -> Result<(), DimensionError> {
    if r.is_positive() {
        Ok(())
    } else {
        Err(DimensionError::InvalidGrowth(format!("{what} must be positive, got {r}")))
    }
}

fn above_one(r: &ExactRational, what: &str) -> Result<(), DimensionError> {
    if *r > ExactRational::one() {
        Ok(())
    } else {
        Err(DimensionError::InvalidGrowth(format!("{what} must exceed 1, got {r}")))
    }
}

impl GrowthFunction {
    pub fn new(kind: GrowthKind) -> Result<Self, DimensionError> {
        match &kind {
            GrowthKind::Linear(c) | GrowthKind::Power(c) | GrowthKind::LogScale(c) => positive(c, "parameter")?,
            GrowthKind::Exponential(base) => above_one(base, "base")?,
            GrowthKind::ExpPower { base, exponent } => {
                above_one(base, "base")?;
                positive(exponent, "exponent")?;
            }
            GrowthKind::Constant(c) => positive(c, "constant")?,
            GrowthKind::Table(points) => validate_table(points)?,
        }
        Ok(Self { kind, clamp_at: None })
    }

    pub fn clamped(mut self, k: usize) -> Self {
        self.clamp_at = Some(k);
        self
    }

    /// Parse a preset: `linear:B`, `power:c`, `exp:b`, `log[:c]`,
    /// `exppow:base:c`, `const:c`. Tables are built with [`parse_table`].
    pub fn parse(spec: &str) -> Result<Self, DimensionError> {
        let bad = || DimensionError::InvalidGrowth(format!("cannot parse '{spec}'"));
        let mut parts = spec.trim().split(':');
        let name = parts.next().ok_or_else(bad)?;
        let args: Vec<ExactRational> = parts
            .map(|p| parse_rational(p).ok_or_else(bad))
            .collect::<Result<_, _>>()?;
        let one = ExactRational::one();
        let kind = match (name, args.as_slice()) {
            ("linear", [c]) => GrowthKind::Linear(c.clone()),
            ("power", [c]) => GrowthKind::Power(c.clone()),
            ("exp", [b]) => GrowthKind::Exponential(b.clone()),
            ("log", []) => GrowthKind::LogScale(one),
            ("log", [c]) => GrowthKind::LogScale(c.clone()),
            ("exppow", [b, c]) => GrowthKind::ExpPower {
                base: b.clone(),
                exponent: c.clone(),
            },
            ("const", [c]) => GrowthKind::Constant(c.clone()),
            _ => return Err(bad()),
        };
        Self::new(kind)
    }

    /// `Phi(n)`, after clamping. Tables return `None` outside their range.
    pub fn value(&self, n: u64) -> Option<f64> {
        let x = n as f64;
        let raw = match &self.kind {
            GrowthKind::Linear(c) => to_f64(c) * x,
            GrowthKind::Power(c) => x.powf(to_f64(c)),
            GrowthKind::Exponential(b) => to_f64(b).powf(x),
            GrowthKind::LogScale(c) => to_f64(c) * (x + 2.0).ln(),
            GrowthKind::ExpPower { base, exponent } => to_f64(base).powf(x.powf(to_f64(exponent))),
            GrowthKind::Constant(c) => to_f64(c),
            GrowthKind::Table(points) => {
                let start = points.first()?.0;
                points.get(n.checked_sub(start)? as usize)?.1
            }
        };
        Some(match self.clamp_at {
            Some(k) => raw.max(k as f64),
            None => raw,
        })
    }

    pub fn is_table(&self) -> bool {
        matches!(self.kind, GrowthKind::Table(_))
    }

    fn label(&self) -> String {
        match &self.kind {
            GrowthKind::Linear(c) => format!("linear:{c}"),
            GrowthKind::Power(c) => format!("power:{c}"),
            GrowthKind::Exponential(b) => format!("exp:{b}"),
            GrowthKind::LogScale(c) => format!("log:{c}"),
            GrowthKind::ExpPower { base, exponent } => format!("exppow:{base}:{exponent}"),
            GrowthKind::Constant(c) => format!("const:{c}"),
            GrowthKind::Table(p) => format!("table[{} points]", p.len()),
        }
    }
}

fn validate_table(points: &[(u64, f64)]) -> Result<(), DimensionError> {
    let Some(&(start, _)) = points.first() else {
        return Err(DimensionError::InvalidGrowth("empty table".into()));
    };
    for (i, &(n, v)) in points.iter().enumerate() {
        if n != start + i as u64 {
            return Err(DimensionError::InvalidGrowth(format!(
                "table must cover consecutive n; expected {} at row {}, got {n}",
                start + i as u64,
                i + 1
            )));
        }
        if !(v.is_finite() && v > 0.0) {
            return Err(DimensionError::InvalidGrowth(format!("Phi({n}) = {v} is not a positive number")));
        }
    }
    if start == 0 {
        return Err(DimensionError::InvalidGrowth("table must start at n >= 1".into()));
    }
    Ok(())
}

/// Parse `n value` rows separated by whitespace or a comma. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_table(text: &str) -> Result<GrowthFunction, DimensionError> {
    let mut points = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let bad = || DimensionError::InvalidGrowth(format!("table line {}: '{line}'", line_no + 1));
        let [n, v] = fields.as_slice() else {
            return Err(bad());
        };
        points.push((n.parse().map_err(|_| bad())?, v.parse().map_err(|_| bad())?));
    }
    GrowthFunction::new(GrowthKind::Table(points))
}

/// `(B, b, a)` and boundedness of `Phi`.
pub fn growth_invariants(phi: &GrowthFunction) -> GrowthInvariants {
    let exact = |big_b: Extended, b: Extended, a: Extended, unbounded| GrowthInvariants {
        big_b,
        b,
        a,
        unbounded,
        estimate: false,
    };
    let one = || Extended::int(1);
    match &phi.kind {
        GrowthKind::Linear(c) => exact(Extended::Exact(c.clone()), one(), one(), true),
        GrowthKind::Power(c) => {
            let big_b = match c.cmp(&ExactRational::one()) {
                std::cmp::Ordering::Less => Extended::int(0),
                std::cmp::Ordering::Equal => one(),
                std::cmp::Ordering::Greater => Extended::Infinite,
            };
            exact(big_b, one(), one(), true)
        }
        GrowthKind::Exponential(base) => exact(
            Extended::Infinite,
            Extended::Exact(base.clone()),
            Extended::Exact(base.clone()),
            true,
        ),
        GrowthKind::LogScale(_) => exact(Extended::int(0), one(), one(), true),
        GrowthKind::ExpPower { base, exponent } => {
            let ba = match exponent.cmp(&ExactRational::one()) {
                std::cmp::Ordering::Less => one(),
                std::cmp::Ordering::Equal => Extended::Exact(base.clone()),
                std::cmp::Ordering::Greater => Extended::Infinite,
            };
            exact(Extended::Infinite, ba.clone(), ba, true)
        }
        GrowthKind::Constant(_) => exact(Extended::int(0), one(), one(), false),
        GrowthKind::Table(points) => table_invariants(points, phi.clamp_at),
    }
}

/// Extremes of `Phi(n)/n` and `log Phi(n)/n` over the second half of the
/// table.
fn table_invariants(points: &[(u64, f64)], clamp: Option<usize>) -> GrowthInvariants {
    let tail = &points[points.len() / 2..];
    let value = |v: f64| clamp.map_or(v, |k| v.max(k as f64));
    let ratios = tail.iter().map(|&(n, v)| value(v) / n as f64);
    let logs: Vec<f64> = tail.iter().map(|&(n, v)| value(v).ln() / n as f64).collect();
    let big_b = ratios.fold(f64::INFINITY, f64::min);
    let log_b = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    let log_a = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let first = value(points[0].1);
    let last = value(points[points.len() - 1].1);
    GrowthInvariants {
        big_b: Extended::Approx(big_b),
        b: Extended::Approx(log_b.exp().max(1.0)),
        a: Extended::Approx(log_a.exp().max(1.0)),
        unbounded: last > first,
        estimate: true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionCase {
    /// `B = 0`: full dimension.
    BZero,
    /// `0 < B < inf`: the root `s_k(B)`.
    BFinite,
    /// `B = inf` and `b = 1`: one half.
    BInfiniteUnitB,
    /// `B = inf` and `1 < b < inf`: `1/(b+1)`.
    BInfiniteFiniteB,
    /// `B = inf` and `b = inf`: zero.
    BInfiniteInfiniteB,
    /// The G-set formula `1/(a+1)`.
    GSet,
    /// A table too short to classify.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionResult {
    /// `None` only for [`DimensionCase::Inconclusive`].
    pub value: Option<f64>,
    pub exact: Option<ExactRational>,
    pub case: DimensionCase,
    pub solver: Option<SolverInfo>,
    pub invariants: GrowthInvariants,
}

impl Serialize for DimensionResult {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DimensionResult", 5)?;
        st.serialize_field("case", &self.case)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("exact", &self.exact.as_ref().map(RationalRepr::from))?;
        st.serialize_field("solver", &self.solver)?;
        st.serialize_field("invariants", &self.invariants)?;
        st.end()
    }
}

fn exact_result(r: ExactRational, case: DimensionCase, invariants: GrowthInvariants) -> DimensionResult {
    DimensionResult {
        value: Some(to_f64(&r)),
        exact: Some(r),
        case,
        solver: None,
        invariants,
    }
}

fn inconclusive(invariants: GrowthInvariants) -> DimensionResult {
    DimensionResult {
        value: None,
        exact: None,
        case: DimensionCase::Inconclusive,
        solver: None,
        invariants,
    }
}

fn table_too_short(phi: &GrowthFunction) -> bool {
    matches!(&phi.kind, GrowthKind::Table(p) if p.len() < TABLE_MIN_POINTS)
}

/// `1 / (x + 1)` for `x >= 1`, exact when `x` is.
fn reciprocal_plus_one(x: &Extended) -> (f64, Option<ExactRational>) {
    match x {
        Extended::Exact(r) => {
            let v = (r + ExactRational::one()).recip();
            (to_f64(&v), Some(v))
        }
        Extended::Approx(v) => (1.0 / (v + 1.0), None),
        Extended::Infinite => (0.0, Some(ExactRational::zero())),
    }
}

/// Hausdorff dimension of `F_k(Phi)`.
pub fn dim_f(field: FieldSpec, k: usize, phi: &GrowthFunction) -> Result<DimensionResult, DimensionError> {
    if k == 0 {
        return Err(DimensionError::ZeroK);
    }
    let inv = growth_invariants(phi);
    if table_too_short(phi) {
        return Ok(inconclusive(inv));
    }
    let big_b = match &inv.big_b {
        Extended::Approx(v) if *v < TABLE_ZERO_B => Extended::int(0),
        Extended::Approx(v) if *v > TABLE_INFINITE_B => Extended::Infinite,
        other => other.clone(),
    };
    match big_b {
        Extended::Exact(ref r) if r.is_zero() => Ok(exact_result(ExactRational::one(), DimensionCase::BZero, inv)),
        Extended::Infinite => {
            let b = match &inv.b {
                Extended::Approx(v) if (v - 1.0).abs() < TABLE_UNIT_B => Extended::int(1),
                other => other.clone(),
            };
            let case = match &b {
                Extended::Infinite => DimensionCase::BInfiniteInfiniteB,
                Extended::Exact(r) if r.is_one() => DimensionCase::BInfiniteUnitB,
                _ => DimensionCase::BInfiniteFiniteB,
            };
            let (value, exact) = reciprocal_plus_one(&b);
            Ok(DimensionResult {
                value: Some(value),
                exact,
                case,
                solver: None,
                invariants: inv,
            })
        }
        finite => {
            let b = finite.to_f64();
            let root = solve_s_k(field, k, b)?;
            Ok(DimensionResult {
                value: Some(root.s),
                exact: None,
                case: DimensionCase::BFinite,
                solver: Some(root.info),
                invariants: inv,
            })
        }
    }
}

/// Hausdorff dimension of `G_k(Phi)`, `1/(a+1)`. Requires `Phi(n) -> inf`.
pub fn dim_g(_field: FieldSpec, k: usize, phi: &GrowthFunction) -> Result<DimensionResult, DimensionError> {
    if k == 0 {
        return Err(DimensionError::ZeroK);
    }
    let inv = growth_invariants(phi);
    if table_too_short(phi) {
        return Ok(inconclusive(inv));
    }
    if !inv.unbounded {
        return Err(DimensionError::BoundedGrowth(phi.label()));
    }
    let (value, exact) = reciprocal_plus_one(&inv.a);
    Ok(DimensionResult {
        value: Some(value),
        exact,
        case: DimensionCase::GSet,
        solver: None,
        invariants: inv,
    })
}
