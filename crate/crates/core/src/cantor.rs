//! The Cantor subset used for the lower bound on `dim F_k(B)`.
//!
//! Fix `M >= 2`, `s = s_{k,M}(B)`, weights `alpha_1..alpha_k` and an index
//! sequence `n_1 < n_2 < ...`. A prefix `(A_1, ..., A_n)` is admissible when
//! `deg A_{n_j + i} = floor(n_j alpha_i) + 1` for every window position
//! `n_j + i` (`1 <= i <= k`) and `1 <= deg A_m <= M` everywhere else.
//!
//! Mass splits uniformly over the `(q-1) q^d` quotients at a window position
//! and with weight `q^{-2 s d - B f_k(s)}` per quotient of degree `d`
//! elsewhere; the latter sums to 1 over degrees `1..=M` exactly because `s`
//! solves the truncated equation.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::dimension::{alpha_params, f_k, solve_s_k_m, AlphaParams, DimensionError};
use crate::field::FieldSpec;
use crate::poly::{enumerate_polys, Poly};
use crate::rational::{q_pow, ExactRational};

pub const DEFAULT_BUDGET: u64 = 10_000_000;
/// Slack allowed when comparing `log mu` against `(s - eps) log |J|`.
pub const HOLDER_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CantorError {
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error("eps = {eps} must lie in (0, s - 1/2) with s = {s}")]
    BadEpsilon { eps: f64, s: f64 },
    #[error("M = {0} must be >= 2")]
    SmallM(usize),
    #[error("index sequence {0:?} must start at n_1 >= 1 and satisfy n_(j+1) >= n_j + k")]
    BadRelaxedSequence(Vec<u64>),
    #[error("index sequence overflowed at j = {0}")]
    IndexOverflow(usize),
    #[error("enumeration of {estimate} basic sets exceeds the budget of {budget}")]
    BudgetExceeded { estimate: BigUint, budget: u64 },
    #[error("prefix {degrees:?} is not admissible: deg A_{position} = {found}, expected {expected}")]
    NotAdmissible {
        degrees: Vec<usize>,
        position: usize,
        found: usize,
        expected: String,
    },
    #[error("depth {depth} is below n_1 = {n1}")]
    DepthBelowFirst { depth: usize, n1: u128 },
    #[error("mass inequality fails at order {order} for degrees {degrees:?}: ratio {ratio} < {bound}")]
    HolderViolation {
        order: usize,
        degrees: Vec<usize>,
        ratio: f64,
        bound: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexSequence {
    pub strict: bool,
    s: f64,
    eps: f64,
    k: usize,
    alpha_min: f64,
    terms: Vec<u128>,
}

impl IndexSequence {
    /// `n_1 = ceil(2(s-eps)/(eps min alpha))`, `n_{j+1} = ceil(s(n_j+k)/eps)`,
    /// bumped when float rounding leaves either condition unmet.
    pub fn strict(s: f64, eps: f64, k: usize, alpha_min: f64) -> Result<Self, CantorError> {
        let mut seq = Self {
            strict: true,
            s,
            eps,
            k,
            alpha_min,
            terms: Vec::new(),
        };
        let mut n1 = (2.0 * (s - eps) / (eps * alpha_min)).ceil().max(1.0) as u128;
        while !seq.first_condition(n1) {
            n1 += 1;
        }
        seq.terms.push(n1);
        Ok(seq)
    }

    pub fn relaxed(terms: Vec<u64>, s: f64, eps: f64, k: usize, alpha_min: f64) -> Result<Self, CantorError> {
        let ok = terms.first().is_some_and(|&n| n >= 1)
            && terms.windows(2).all(|w| w[1] >= w[0] + k as u64);
        if !ok {
            return Err(CantorError::BadRelaxedSequence(terms));
        }
        Ok(Self {
            strict: false,
            s,
            eps,
            k,
            alpha_min,
            terms: terms.into_iter().map(u128::from).collect(),
        })
    }

    /// `min_i n alpha_i / (n alpha_i + 2) >= (s - eps)/s`
    fn first_condition(&self, n: u128) -> bool {
        let x = n as f64 * self.alpha_min;
        x / (x + 2.0) >= (self.s - self.eps) / self.s
    }

    /// `(next - n - k)/next >= (s - eps)/s`
    fn second_condition(&self, n: u128, next: u128) -> bool {
        let gap = next as f64 - n as f64 - self.k as f64;
        gap / next as f64 >= (self.s - self.eps) / self.s
    }

    fn next_strict(&self, n: u128) -> Result<u128, CantorError> {
        let raw = (self.s * (n as f64 + self.k as f64) / self.eps).ceil();
        if !raw.is_finite() || raw >= u128::MAX as f64 / 2.0 {
            return Err(CantorError::IndexOverflow(self.terms.len() + 1));
        }
        let mut next = raw as u128;
        while !self.second_condition(n, next) {
            // past 2^53 a unit step no longer changes the float comparison
            let step = (next >> 40).max(1);
            next = next.checked_add(step).ok_or(CantorError::IndexOverflow(self.terms.len() + 1))?;
        }
        Ok(next)
    }

    /// Make sure the first `count` terms exist. Relaxed sequences are finite.
    pub fn extend_to(&mut self, count: usize) -> Result<(), CantorError> {
        if !self.strict {
            return Ok(());
        }
        while self.terms.len() < count {
            let next = self.next_strict(*self.terms.last().unwrap())?;
            self.terms.push(next);
        }
        Ok(())
    }

    /// Generate strict terms until one exceeds `order`.
    pub fn extend_past(&mut self, order: u128) -> Result<(), CantorError> {
        while self.strict && *self.terms.last().unwrap() <= order {
            let n = self.terms.len() + 1;
            self.extend_to(n)?;
        }
        Ok(())
    }

    pub fn terms(&self) -> &[u128] {
        &self.terms
    }

    pub fn first(&self) -> u128 {
        self.terms[0]
    }

    /// Both index conditions for every generated `j`; the second needs `n_{j+1}`.
    pub fn condition_report(&self) -> Vec<ConditionRow> {
        let bound = (self.s - self.eps) / self.s;
        self.terms
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let x = n as f64 * self.alpha_min;
                let next = self.terms.get(i + 1).copied();
                ConditionRow {
                    j: i + 1,
                    n_j: n,
                    bound,
                    first_value: x / (x + 2.0),
                    first_holds: self.first_condition(n),
                    second_value: next.map(|m| (m as f64 - n as f64 - self.k as f64) / m as f64),
                    second_holds: next.map(|m| self.second_condition(n, m)),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionRow {
    pub j: usize,
    pub n_j: u128,
    /// `(s - eps)/s`
    pub bound: f64,
    pub first_value: f64,
    pub first_holds: bool,
    pub second_value: Option<f64>,
    pub second_holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IndexMode {
    Strict,
    Relaxed(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CantorParams {
    pub field: FieldSpec,
    pub k: usize,
    #[serde(rename = "B")]
    pub big_b: f64,
    #[serde(rename = "M")]
    pub big_m: usize,
    pub eps: f64,
    /// `s_{k,M}(B)`
    pub s: f64,
    pub f_k: f64,
    pub alphas: AlphaParams,
    pub n_seq: IndexSequence,
}

impl CantorParams {
    pub fn new(field: FieldSpec, k: usize, big_b: f64, big_m: usize, eps: f64, mode: IndexMode) -> Result<Self, CantorError> {
        if big_m < 2 {
            return Err(CantorError::SmallM(big_m));
        }
        let s = solve_s_k_m(field, k, big_b, big_m)?.s;
        if !(eps > 0.0 && eps < s - 0.5) {
            return Err(CantorError::BadEpsilon { eps, s });
        }
        let alphas = alpha_params(k, big_b, s)?;
        let alpha_min = alphas.alpha.iter().cloned().fold(f64::INFINITY, f64::min);
        let n_seq = match mode {
            IndexMode::Strict => IndexSequence::strict(s, eps, k, alpha_min)?,
            IndexMode::Relaxed(terms) => IndexSequence::relaxed(terms, s, eps, k, alpha_min)?,
        };
        Ok(Self {
            field,
            k,
            big_b,
            big_m,
            eps,
            s,
            f_k: f_k(s, k)?,
            alphas,
            n_seq,
        })
    }

    /// `floor(n_j alpha_i) + 1` for the window positions `n_j + i <= limit`.
    pub fn forced_degrees(&mut self, limit: usize) -> Result<BTreeMap<usize, usize>, CantorError> {
        self.n_seq.extend_past(limit as u128)?;
        let mut out = BTreeMap::new();
        for &n in self.n_seq.terms() {
            for (i, a) in self.alphas.alpha.iter().enumerate() {
                let pos = n + i as u128 + 1;
                if pos <= limit as u128 {
                    out.insert(pos as usize, (n as f64 * a).floor() as usize + 1);
                }
            }
        }
        Ok(out)
    }

    fn ln_q(&self) -> f64 {
        (self.field.q() as f64).ln()
    }

    /// `ln` of the mass factor for a free position of degree `d`.
    fn free_factor(&self, d: usize) -> f64 {
        -(2.0 * self.s * d as f64 + self.big_b * self.f_k) * self.ln_q()
    }

    /// `ln` of the uniform share at a window position of degree `d`.
    fn window_factor(&self, d: usize) -> f64 {
        -(((self.field.q() - 1) as f64).ln() + d as f64 * self.ln_q())
    }
}

/// Basic set `J(A_1, ..., A_n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasicSet {
    pub order: usize,
    pub degrees: Vec<usize>,
    #[serde(skip)]
    pub quotients: Option<Vec<Poly>>,
    /// `|J| = q^{-diameter_exponent}`.
    pub diameter_exponent: u64,
    /// Natural log of the mass.
    pub log_mass: f64,
    /// Number of explicit prefixes this record stands for.
    #[serde(serialize_with = "ser_biguint")]
    pub multiplicity: BigUint,
}

fn ser_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl BasicSet {
    pub fn diameter(&self, field: FieldSpec) -> ExactRational {
        q_pow(field.q(), -(self.diameter_exponent as i64))
    }

    /// `log mu / log |J|`; undefined for the full space.
    pub fn holder_ratio(&self, field: FieldSpec) -> Option<f64> {
        if self.order == 0 {
            return None;
        }
        Some(self.log_mass / (-(self.diameter_exponent as f64) * (field.q() as f64).ln()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumMode {
    /// Every admissible prefix of polynomials.
    Explicit,
    /// One record per degree pattern, carrying its multiplicity.
    DegreeClass,
}

/// Everything needed to walk the admissible tree to a fixed depth.
pub struct Walker {
    params: CantorParams,
    forced: BTreeMap<usize, usize>,
    depth: usize,
    mode: EnumMode,
}

impl Walker {
    pub fn new(mut params: CantorParams, depth: usize, mode: EnumMode, budget: u64) -> Result<Self, CantorError> {
        let forced = params.forced_degrees(depth + 1)?;
        let walker = Self {
            params,
            forced,
            depth,
            mode,
        };
        let estimate = walker.size_estimate();
        if estimate > BigUint::from(budget) {
            return Err(CantorError::BudgetExceeded { estimate, budget });
        }
        Ok(walker)
    }

    pub fn params(&self) -> &CantorParams {
        &self.params
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `|D_n|` for explicit prefixes.
    pub fn admissible_count(&self, n: usize) -> BigUint {
        (1..=n).map(|m| self.branching(m, EnumMode::Explicit)).product()
    }

    fn branching(&self, m: usize, mode: EnumMode) -> BigUint {
        let q = self.params.field.q();
        let per_degree = |d: usize| BigUint::from(q - 1) * BigUint::from(q).pow(d as u32);
        match (self.forced.get(&m), mode) {
            (Some(_), EnumMode::DegreeClass) => BigUint::one(),
            (Some(&d), EnumMode::Explicit) => per_degree(d),
            (None, EnumMode::DegreeClass) => BigUint::from(self.params.big_m),
            (None, EnumMode::Explicit) => (1..=self.params.big_m).map(per_degree).sum(),
        }
    }

    /// Total records the walk will visit, counted before walking.
    pub fn size_estimate(&self) -> BigUint {
        let mut level = BigUint::one();
        let mut total = BigUint::one();
        for m in 1..=self.depth {
            level *= self.branching(m, self.mode);
            total += &level;
        }
        total
    }

    fn root(&self) -> BasicSet {
        self.finish(Vec::new(), Some(Vec::new()), 0.0, BigUint::one())
    }

    fn finish(&self, degrees: Vec<usize>, quotients: Option<Vec<Poly>>, log_mass: f64, multiplicity: BigUint) -> BasicSet {
        let order = degrees.len();
        let next = self.forced.get(&(order + 1)).copied().unwrap_or(1);
        let sum: usize = degrees.iter().sum();
        BasicSet {
            order,
            degrees,
            quotients: if self.mode == EnumMode::Explicit { quotients } else { None },
            diameter_exponent: (2 * sum + next) as u64,
            log_mass,
            multiplicity,
        }
    }

    pub fn children(&self, node: &BasicSet) -> Vec<BasicSet> {
        let m = node.order + 1;
        let q = self.params.field.q();
        let options: Vec<(usize, f64)> = match self.forced.get(&m) {
            Some(&d) => vec![(d, self.params.window_factor(d))],
            None => (1..=self.params.big_m).map(|d| (d, self.params.free_factor(d))).collect(),
        };
        let mut out = Vec::new();
        for (d, factor) in options {
            let mut degrees = node.degrees.clone();
            degrees.push(d);
            let log_mass = node.log_mass + factor;
            match self.mode {
                EnumMode::DegreeClass => {
                    let mult = &node.multiplicity * BigUint::from(q - 1) * BigUint::from(q).pow(d as u32);
                    out.push(self.finish(degrees, None, log_mass, mult));
                }
                EnumMode::Explicit => {
                    let prefix = node.quotients.clone().unwrap_or_default();
                    for a in enumerate_polys(self.params.field, d as i64).expect("positive degree") {
                        let mut quotients = prefix.clone();
                        quotients.push(a);
                        out.push(self.finish(degrees.clone(), Some(quotients), log_mass, BigUint::one()));
                    }
                }
            }
        }
        out
    }

    /// Preorder stream of every record of order `<= depth`.
    pub fn iter(&self) -> impl Iterator<Item = BasicSet> + '_ {
        let mut stack = vec![self.root()];
        std::iter::from_fn(move || {
            let node = stack.pop()?;
            if node.order < self.depth {
                let mut kids = self.children(&node);
                kids.reverse();
                stack.extend(kids);
            }
            Some(node)
        })
    }
}

/// Stream every admissible prefix (or degree class) to depth `depth`.
pub fn enumerate_basic_sets(params: CantorParams, depth: usize, mode: EnumMode, budget: u64) -> Result<Vec<BasicSet>, CantorError> {
    let walker = Walker::new(params, depth, mode, budget)?;
    Ok(walker.iter().collect())
}

/// `ln mu(J(A_1..A_n))` from the degrees, rejecting inadmissible prefixes.
pub fn mass(params: &CantorParams, degrees: &[usize]) -> Result<f64, CantorError> {
    let mut params = params.clone();
    let forced = params.forced_degrees(degrees.len())?;
    let mut log_mass = 0.0;
    for (i, &d) in degrees.iter().enumerate() {
        let position = i + 1;
        let reject = |expected: String| CantorError::NotAdmissible {
            degrees: degrees.to_vec(),
            position,
            found: d,
            expected,
        };
        match forced.get(&position) {
            Some(&f) if f != d => return Err(reject(f.to_string())),
            Some(_) => log_mass += params.window_factor(d),
            None if d == 0 || d > params.big_m => return Err(reject(format!("1..={}", params.big_m))),
            None => log_mass += params.free_factor(d),
        }
    }
    Ok(log_mass)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassReport {
    pub parents: u64,
    pub nodes: u64,
    /// `max |sum children mu / mu(parent) - 1|`
    pub worst_relative_residual: f64,
}

/// Check that the children of every parent above `depth` carry its mass.
pub fn mass_conservation(walker: &Walker) -> MassReport {
    let mut report = MassReport {
        parents: 0,
        nodes: 0,
        worst_relative_residual: 0.0,
    };
    let mut stack = vec![walker.root()];
    while let Some(node) = stack.pop() {
        report.nodes += 1;
        if node.order >= walker.depth {
            continue;
        }
        let kids = walker.children(&node);
        let ratio: f64 = kids
            .iter()
            .map(|c| {
                let share = (c.log_mass - node.log_mass).exp();
                match walker.mode {
                    EnumMode::Explicit => share,
                    EnumMode::DegreeClass => share * (&c.multiplicity / &node.multiplicity).to_f64().unwrap_or(f64::INFINITY),
                }
            })
            .sum();
        report.parents += 1;
        report.worst_relative_residual = report.worst_relative_residual.max((ratio - 1.0).abs());
        stack.extend(kids);
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderReport {
    pub strict: bool,
    pub depth: usize,
    pub first_order: usize,
    /// `s - eps`
    pub bound: f64,
    pub checked: u64,
    pub worst_ratio: f64,
    pub worst_degrees: Vec<usize>,
    pub violations: u64,
    pub passed: bool,
}

/// Compare `log mu` with `(s - eps) log |J|` for every basic set of order
/// `n_1..=depth`, by degree class. Strict sequences fail on the first
/// violation; relaxed ones report it.
pub fn check_holder(params: CantorParams, depth: usize, budget: u64) -> Result<HolderReport, CantorError> {
    let n1 = params.n_seq.first();
    if (depth as u128) < n1 {
        return Err(CantorError::DepthBelowFirst { depth, n1 });
    }
    let strict = params.n_seq.strict;
    let bound = params.s - params.eps;
    let walker = Walker::new(params, depth, EnumMode::DegreeClass, budget)?;
    let field = walker.params.field;
    let mut report = HolderReport {
        strict,
        depth,
        first_order: n1 as usize,
        bound,
        checked: 0,
        worst_ratio: f64::INFINITY,
        worst_degrees: Vec::new(),
        violations: 0,
        passed: true,
    };
    for set in walker.iter().filter(|b| b.order as u128 >= n1) {
        let ratio = set.holder_ratio(field).expect("order >= 1");
        report.checked += 1;
        if ratio < report.worst_ratio {
            report.worst_ratio = ratio;
            report.worst_degrees = set.degrees.clone();
        }
        if ratio < bound - HOLDER_SLACK {
            if strict {
                return Err(CantorError::HolderViolation {
                    order: set.order,
                    degrees: set.degrees,
                    ratio,
                    bound,
                });
            }
            report.violations += 1;
            report.passed = false;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderStats {
    pub order: usize,
    /// Explicit basic sets at this order.
    #[serde(serialize_with = "ser_biguint")]
    pub count: BigUint,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Mean over explicit basic sets.
    pub mean_ratio: f64,
}

/// Per-order summary of `log mu / log |J|`, orders `1..=depth`.
pub fn local_dimension_profile(params: CantorParams, depth: usize, budget: u64) -> Result<Vec<OrderStats>, CantorError> {
    let walker = Walker::new(params, depth, EnumMode::DegreeClass, budget)?;
    let field = walker.params.field;
    let mut rows: Vec<(BigUint, f64, f64, f64)> = vec![(BigUint::zero(), f64::INFINITY, f64::NEG_INFINITY, 0.0); depth + 1];
    for set in walker.iter().filter(|b| b.order >= 1) {
        let ratio = set.holder_ratio(field).expect("order >= 1");
        let row = &mut rows[set.order];
        row.1 = row.1.min(ratio);
        row.2 = row.2.max(ratio);
        row.3 += ratio * set.multiplicity.to_f64().unwrap_or(f64::INFINITY);
        row.0 += &set.multiplicity;
    }
    Ok(rows
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(order, (count, min, max, weighted))| {
            let mean = weighted / count.to_f64().unwrap_or(f64::INFINITY);
            OrderStats {
                order,
                count,
                min_ratio: min,
                max_ratio: max,
                mean_ratio: mean,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipRow {
    pub j: usize,
    pub n_j: u128,
    /// `sum_i (floor(n_j alpha_i) + 1)`
    pub window_degree_sum: u128,
    /// `n_j B`
    pub required: f64,
    pub holds: bool,
}

/// Every path through the construction has window degree sums `>= n_j B`.
pub fn membership_check(params: &CantorParams, count: usize) -> Result<Vec<MembershipRow>, CantorError> {
    let mut seq = params.n_seq.clone();
    seq.extend_to(count)?;
    Ok(seq
        .terms()
        .iter()
        .take(count)
        .enumerate()
        .map(|(i, &n)| {
            let sum: u128 = params
                .alphas
                .alpha
                .iter()
                .map(|a| (n as f64 * a).floor() as u128 + 1)
                .sum();
            let required = n as f64 * params.big_b;
            MembershipRow {
                j: i + 1,
                n_j: n,
                window_degree_sum: sum,
                required,
                holds: sum as f64 >= required,
            }
        })
        .collect())
}
