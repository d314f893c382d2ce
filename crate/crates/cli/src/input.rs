use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use fqcf::dirichlet::Number;
use fqcf::growth::{parse_table, GrowthFunction};
use fqcf::rational::parse_rational;
use fqcf::{ExactRational, FieldSpec, LaurentSeries, Poly};

use crate::{flag, CliError};

/// `int=<poly>; frac=<c1,...>` is a truncated series, `<poly>/<poly>` or a
/// bare polynomial is exact.
pub enum XInput {
    Rational { num: Poly, den: Poly },
    Series(LaurentSeries),
}

impl XInput {
    pub fn parse(field: FieldSpec, text: &str, name: &'static str) -> Result<Self, CliError> {
        if text.contains('=') {
            return LaurentSeries::parse(field, text).map(XInput::Series).map_err(flag(name));
        }
        let (num, den) = text.split_once('/').unwrap_or((text, "1"));
        let num = Poly::parse(field, num).map_err(flag(name))?;
        let den = Poly::parse(field, den).map_err(flag(name))?;
        if den.is_zero() {
            return Err(CliError::usage(name, "zero denominator"));
        }
        Ok(XInput::Rational { num, den })
    }

    pub fn number(&self) -> Result<Number, CliError> {
        match self {
            XInput::Rational { num, den } => Ok(Number::rational(num, den)?),
            XInput::Series(x) => Ok(Number::series(x)),
        }
    }
}

/// `a..b` or `a..=b`, both inclusive.
pub fn range(text: &str, name: &'static str) -> Result<RangeInclusive<u64>, CliError> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| CliError::usage(name, format!("expected a..b, got {text:?}")))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: u64 = a.trim().parse().map_err(flag(name))?;
    let b: u64 = b.trim().parse().map_err(flag(name))?;
    if a > b {
        return Err(CliError::usage(name, format!("empty range {a}..{b}")));
    }
    Ok(a..=b)
}

pub fn exact(text: &str, name: &'static str) -> Result<ExactRational, CliError> {
    parse_rational(text).ok_or_else(|| CliError::usage(name, format!("not a rational: {text:?}")))
}

/// Preset spec, or a two-column table file named by `table`.
pub fn growth(spec: Option<&str>, table: Option<&std::path::Path>) -> Result<GrowthFunction, CliError> {
    match (spec, table) {
        (Some(s), None) => GrowthFunction::parse(s).map_err(flag("--phi")),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(flag("--phi-table"))?;
            parse_table(&text).map_err(flag("--phi-table"))
        }
        _ => Err(CliError::usage("--phi", "give exactly one of --phi or --phi-table")),
    }
}

/// Rows `m value` with exact rational values, `#` comments allowed.
pub fn exact_table(path: &std::path::Path) -> Result<BTreeMap<i64, ExactRational>, CliError> {
    let text = std::fs::read_to_string(path).map_err(flag("--phi-table"))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split_whitespace();
        let (Some(m), Some(v), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(CliError::usage("--phi-table", format!("line {}: expected `m value`", i + 1)));
        };
        let m: i64 = m
            .parse()
            .map_err(|e| CliError::usage("--phi-table", format!("line {}: {e}", i + 1)))?;
        let v = parse_rational(v)
            .ok_or_else(|| CliError::usage("--phi-table", format!("line {}: not a rational: {v:?}", i + 1)))?;
        out.insert(m, v);
    }
    Ok(out)
}

pub fn positive<T: PartialOrd + Default + std::fmt::Display>(v: T, name: &'static str) -> Result<T, CliError> {
    if v > T::default() {
        Ok(v)
    } else {
        Err(CliError::usage(name, format!("must be positive, got {v}")))
    }
}
