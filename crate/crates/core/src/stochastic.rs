//! Haar-random elements of I and Monte Carlo checks of the degree laws.
//!
//! Haar measure on I is the product of uniform measures on the
//! coefficients, so a sample is `N` independent uniform digits. Samples are
//! produced in fixed-size chunks; chunk `c` draws from the ChaCha8 stream
//! `c` of the seed, so results do not depend on how chunks are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::contfrac::expand_truncated;
use crate::cylinder::{measure_degree_sum, tail_measure};
use crate::field::FieldSpec;
use crate::growth::GrowthFunction;
use crate::laurent::LaurentSeries;
use crate::rational::{q_pow, to_f64, RationalRepr};

pub const DEFAULT_CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplerError {
    #[error("position {0} must be >= 1")]
    ZeroPosition(usize),
    #[error("positions must differ, got ({0}, {0})")]
    SamePosition(usize),
    #[error("chunk size must be >= 1")]
    ZeroChunk,
    #[error("empty n range")]
    EmptyRange,
    #[error("bin cutoff must be >= 2, got {0}")]
    SmallCutoff(usize),
    #[error("growth function undefined at n = {0}")]
    GrowthUndefined(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub field: FieldSpec,
    /// Coefficients per sample; `None` picks [`default_precision`] for the
    /// deepest position a statistic needs.
    pub precision: Option<usize>,
    pub samples: u64,
    pub seed: u64,
    pub chunk_size: u64,
}

impl SamplerConfig {
    pub fn new(field: FieldSpec, samples: u64, seed: u64) -> Self {
        Self {
            field,
            precision: None,
            samples,
            seed,
            chunk_size: DEFAULT_CHUNK,
        }
    }

    pub fn with_precision(mut self, n: usize) -> Self {
        self.precision = Some(n);
        self
    }

    fn resolved(&self, deepest: usize) -> Result<usize, SamplerError> {
        if self.chunk_size == 0 {
            return Err(SamplerError::ZeroChunk);
        }
        Ok(self.precision.unwrap_or_else(|| default_precision(self.field, deepest)))
    }
}

/// Enough coefficients to certify `positions` quotients except with
/// negligible probability.
///
/// Under Haar measure the degrees are i.i.d. with `P(deg = j) = (q-1) q^{-j}`:
/// mean `q/(q-1)`, variance `q/(q-1)^2`. Certifying `P` quotients needs
/// `N >= 2 sum deg`, so take `N = 2 (mean P + 10 sd sqrt(P) + 10)`.
pub fn default_precision(field: FieldSpec, positions: usize) -> usize {
    let q = field.q() as f64;
    let p = positions as f64;
    let mean = q / (q - 1.0);
    let sd = q.sqrt() / (q - 1.0);
    (2.0 * (mean * p + 10.0 * sd * p.sqrt() + 10.0)).ceil() as usize
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn chunk_count(cfg: &SamplerConfig) -> u64 {
    cfg.samples.div_ceil(cfg.chunk_size)
}

fn draw(rng: &mut ChaCha8Rng, field: FieldSpec, precision: usize) -> LaurentSeries {
    let q = field.q();
    LaurentSeries::from_frac(field, (0..precision).map(|_| rng.gen_range(0..q)).collect())
}

fn chunk_samples(cfg: &SamplerConfig, precision: usize, chunk: u64) -> impl Iterator<Item = LaurentSeries> {
    let mut rng = chunk_rng(cfg.seed, chunk);
    let start = chunk * cfg.chunk_size;
    let len = cfg.chunk_size.min(cfg.samples - start);
    let field = cfg.field;
    (0..len).map(move |_| draw(&mut rng, field, precision))
}

/// The sample stream in order.
pub fn sample_uniform(cfg: &SamplerConfig) -> Result<impl Iterator<Item = LaurentSeries> + '_, SamplerError> {
    let precision = cfg.resolved(0)?;
    Ok((0..chunk_count(cfg)).flat_map(move |c| chunk_samples(cfg, precision, c)))
}

/// Fold every sample in parallel over chunks and merge the chunk results
/// in chunk order.
pub fn map_reduce<A, I, S, M>(cfg: &SamplerConfig, precision: usize, init: I, step: S, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    S: Fn(&mut A, &LaurentSeries) + Sync,
    M: Fn(A, A) -> A,
{
    let parts: Vec<A> = (0..chunk_count(cfg))
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            for x in chunk_samples(cfg, precision, c) {
                step(&mut acc, &x);
            }
            acc
        })
        .collect();
    parts.into_iter().fold(init(), merge)
}

/// Certified degrees of the first `positions` quotients.
fn certified_degrees(x: &LaurentSeries, positions: usize) -> Vec<usize> {
    let cf = expand_truncated(x, Some(positions)).expect("samples lie in I");
    cf.certified_degrees()
}

fn sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn z_score(empirical: f64, exact: f64, n: u64) -> f64 {
    let s = sigma(exact, n);
    if s == 0.0 {
        if empirical == exact { 0.0 } else { f64::INFINITY }
    } else {
        (empirical - exact) / s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeBin {
    pub degree: usize,
    pub count: u64,
    pub empirical: f64,
    pub exact: RationalRepr,
    pub exact_value: f64,
    pub sigma: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeReport {
    pub q: u32,
    pub position: usize,
    pub precision: usize,
    pub total: u64,
    pub used: u64,
    pub discarded: u64,
    pub bins: Vec<DegreeBin>,
    /// Samples with degree above the last bin.
    pub beyond: u64,
    pub max_abs_z: f64,
}

/// Histogram of `deg A_i` for `deg = 1..=max_degree` against
/// `(q-1) q^{-j}`.
pub fn degree_distribution(cfg: &SamplerConfig, position: usize, max_degree: usize) -> Result<DegreeReport, SamplerError> {
    if position == 0 {
        return Err(SamplerError::ZeroPosition(0));
    }
    let precision = cfg.resolved(position)?;
    let (counts, beyond, discarded) = map_reduce(
        cfg,
        precision,
        || (vec![0u64; max_degree + 1], 0u64, 0u64),
        |acc, x| {
            let d = certified_degrees(x, position);
            match d.get(position - 1) {
                Some(&deg) if deg <= max_degree => acc.0[deg] += 1,
                Some(_) => acc.1 += 1,
                None => acc.2 += 1,
            }
        },
        |mut a, b| {
            a.0.iter_mut().zip(&b.0).for_each(|(x, y)| *x += y);
            (a.0, a.1 + b.1, a.2 + b.2)
        },
    );
    let used = cfg.samples - discarded;
    let bins: Vec<DegreeBin> = (1..=max_degree)
        .map(|j| {
            let exact = measure_degree_sum(cfg.field, j, 1);
            let exact_value = to_f64(&exact);
            let empirical = counts[j] as f64 / used.max(1) as f64;
            DegreeBin {
                degree: j,
                count: counts[j],
                empirical,
                exact: RationalRepr::from(&exact),
                exact_value,
                sigma: sigma(exact_value, used.max(1)),
                z: z_score(empirical, exact_value, used.max(1)),
            }
        })
        .collect();
    let max_abs_z = bins.iter().map(|b| b.z.abs()).fold(0.0, f64::max);
    Ok(DegreeReport {
        q: cfg.field.q(),
        position,
        precision,
        total: cfg.samples,
        used,
        discarded,
        bins,
        beyond,
        max_abs_z,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependenceReport {
    pub q: u32,
    pub positions: (usize, usize),
    pub precision: usize,
    /// Degrees `1..cutoff` get their own bin; `>= cutoff` share the last.
    pub cutoff: usize,
    pub total: u64,
    pub used: u64,
    pub discarded: u64,
    pub observed: Vec<Vec<u64>>,
    pub expected: Vec<Vec<f64>>,
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Exact marginal law of a binned degree: `(q-1) q^{-j}` for `j < cutoff`
/// and `q^{-(cutoff-1)}` for the tail bin.
pub fn binned_law(field: FieldSpec, cutoff: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (1..cutoff).map(|j| to_f64(&measure_degree_sum(field, j, 1))).collect();
    p.push(to_f64(&q_pow(field.q(), -(cutoff as i64 - 1))));
    p
}

fn bin(deg: usize, cutoff: usize) -> usize {
    deg.min(cutoff) - 1
}

/// Pearson chi-square of a joint table against the product of known
/// marginals. The law has no fitted parameters, so `df = cells - 1`.
pub fn chi_square_product(observed: &[Vec<u64>], marginal: &[f64]) -> (Vec<Vec<f64>>, f64, usize, f64) {
    let n: u64 = observed.iter().flatten().sum();
    let expected: Vec<Vec<f64>> = marginal
        .iter()
        .map(|pi| marginal.iter().map(|pj| pi * pj * n as f64).collect())
        .collect();
    let statistic: f64 = observed
        .iter()
        .flatten()
        .zip(expected.iter().flatten())
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let df = marginal.len() * marginal.len() - 1;
    let p = 1.0 - ChiSquared::new(df as f64).expect("df >= 1").cdf(statistic);
    (expected, statistic, df, p)
}

/// Chi-square test of `(deg A_i, deg A_j)` against the product law.
pub fn independence_check(cfg: &SamplerConfig, positions: (usize, usize), cutoff: usize) -> Result<IndependenceReport, SamplerError> {
    let (i, j) = positions;
    if i == 0 || j == 0 {
        return Err(SamplerError::ZeroPosition(0));
    }
    if i == j {
        return Err(SamplerError::SamePosition(i));
    }
    if cutoff < 2 {
        return Err(SamplerError::SmallCutoff(cutoff));
    }
    let deepest = i.max(j);
    let precision = cfg.resolved(deepest)?;
    let (observed, discarded) = map_reduce(
        cfg,
        precision,
        || (vec![vec![0u64; cutoff]; cutoff], 0u64),
        |acc, x| {
            let d = certified_degrees(x, deepest);
            if d.len() < deepest {
                acc.1 += 1;
            } else {
                acc.0[bin(d[i - 1], cutoff)][bin(d[j - 1], cutoff)] += 1;
            }
        },
        |mut a, b| {
            for (ra, rb) in a.0.iter_mut().zip(&b.0) {
                ra.iter_mut().zip(rb).for_each(|(x, y)| *x += y);
            }
            (a.0, a.1 + b.1)
        },
    );
    let (expected, statistic, df, p_value) = chi_square_product(&observed, &binned_law(cfg.field, cutoff));
    Ok(IndependenceReport {
        q: cfg.field.q(),
        positions,
        precision,
        cutoff,
        total: cfg.samples,
        used: cfg.samples - discarded,
        discarded,
        observed,
        expected,
        statistic,
        df,
        p_value,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub n: u64,
    pub phi: f64,
    /// `ceil(Phi(n))`
    pub threshold: usize,
    pub used: u64,
    pub discarded: u64,
    pub hits: u64,
    pub empirical: f64,
    pub exact: RationalRepr,
    pub exact_value: f64,
    pub sigma: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub q: u32,
    pub k: usize,
    pub precision: usize,
    pub total: u64,
    pub rows: Vec<TailRow>,
    /// `n` values dropped because the precision cannot certify them.
    pub truncated: Vec<u64>,
    /// Mean over samples of the number of hits among `n_lo..=n`, for each
    /// `n`. Growth is a finite-range proxy for infinitely many hits.
    pub mean_hits: Vec<(u64, f64)>,
    pub max_abs_z: f64,
}

/// Frequency of `sum_{i=1}^k deg A_{n+i} >= Phi(n)` for each `n` in the
/// range, against the exact tail measure. Samples not certified to
/// position `n + k` are discarded for that row only.
pub fn tail_event_frequency(
    cfg: &SamplerConfig,
    k: usize,
    phi: &GrowthFunction,
    range: std::ops::RangeInclusive<u64>,
) -> Result<TailReport, SamplerError> {
    if k == 0 {
        return Err(SamplerError::ZeroPosition(0));
    }
    if range.is_empty() {
        return Err(SamplerError::EmptyRange);
    }
    let (lo, hi) = (*range.start(), *range.end());
    let deepest = hi as usize + k;
    let precision = cfg.resolved(deepest)?;
    // positions the precision could never certify even at minimal degree
    let reachable = precision / 2;
    let truncated: Vec<u64> = (lo..=hi).filter(|&n| n as usize + k > reachable).collect();
    let ns: Vec<u64> = (lo..=hi).filter(|&n| n as usize + k <= reachable).collect();
    let thresholds: Vec<(f64, usize)> = ns
        .iter()
        .map(|&n| {
            let v = phi.value(n).ok_or(SamplerError::GrowthUndefined(n))?;
            Ok((v, v.ceil().max(0.0) as usize))
        })
        .collect::<Result<_, SamplerError>>()?;
    let need = ns.last().map_or(0, |&n| n as usize + k);
    let rows_len = ns.len();
    // per row: (hits, discarded); per prefix: total hit counts
    let (rows, prefix_hits) = map_reduce(
        cfg,
        precision,
        || (vec![(0u64, 0u64); rows_len], vec![0u64; rows_len]),
        |acc, x| {
            let d = certified_degrees(x, need);
            let mut running = 0u64;
            for (r, &n) in ns.iter().enumerate() {
                let start = n as usize;
                if d.len() < start + k {
                    acc.0[r].1 += 1;
                } else if d[start..start + k].iter().sum::<usize>() >= thresholds[r].1 {
                    acc.0[r].0 += 1;
                    running += 1;
                }
                acc.1[r] += running;
            }
        },
        |mut a, b| {
            a.0.iter_mut().zip(&b.0).for_each(|(x, y)| {
                x.0 += y.0;
                x.1 += y.1
            });
            a.1.iter_mut().zip(&b.1).for_each(|(x, y)| *x += y);
            a
        },
    );
    let rows: Vec<TailRow> = ns
        .iter()
        .zip(rows)
        .zip(&thresholds)
        .map(|((&n, (hits, discarded)), &(phi_n, threshold))| {
            let exact = tail_measure(cfg.field, threshold, k).expect("k >= 1");
            let exact_value = to_f64(&exact);
            let used = cfg.samples - discarded;
            let empirical = hits as f64 / used.max(1) as f64;
            TailRow {
                n,
                phi: phi_n,
                threshold,
                used,
                discarded,
                hits,
                empirical,
                exact: RationalRepr::from(&exact),
                exact_value,
                sigma: sigma(exact_value, used.max(1)),
                z: z_score(empirical, exact_value, used.max(1)),
            }
        })
        .collect();
    let mean_hits = ns
        .iter()
        .zip(prefix_hits)
        .map(|(&n, h)| (n, h as f64 / cfg.samples.max(1) as f64))
        .collect();
    let max_abs_z = rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max);
    Ok(TailReport {
        q: cfg.field.q(),
        k,
        precision,
        total: cfg.samples,
        rows,
        truncated,
        mean_hits,
        max_abs_z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> FieldSpec {
        FieldSpec::new(q).unwrap()
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let cfg = SamplerConfig::new(f(3), 5000, 7).with_precision(16);
        let a: Vec<_> = sample_uniform(&cfg).unwrap().collect();
        let b: Vec<_> = sample_uniform(&cfg).unwrap().collect();
        assert_eq!(a, b);
        let other = SamplerConfig::new(f(3), 5000, 8).with_precision(16);
        let c: Vec<_> = sample_uniform(&other).unwrap().take(10).collect();
        assert_ne!(&a[..10], &c[..]);
        let mut rechunked = cfg.clone();
        rechunked.chunk_size = 1000;
        let d: Vec<_> = sample_uniform(&rechunked).unwrap().collect();
        assert_eq!(d.len(), a.len());
    }

    #[test]
    fn coefficient_frequencies() {
        let n = 100_000u64;
        let cfg = SamplerConfig::new(f(3), n, 1).with_precision(1);
        let mut counts = [0u64; 3];
        for x in sample_uniform(&cfg).unwrap() {
            counts[x.frac_coeffs()[0] as usize] += 1;
        }
        for c in counts {
            let p = c as f64 / n as f64;
            assert!(z_score(p, 1.0 / 3.0, n).abs() < 4.0);
        }
    }

    #[test]
    fn exact_laws() {
        assert_eq!(binned_law(f(2), 4), vec![0.5, 0.25, 0.125, 0.125]);
        assert!((to_f64(&measure_degree_sum(f(3), 2, 1)) - 2.0 / 9.0).abs() < 1e-15);
        let law = binned_law(f(2), 4);
        assert_eq!(law[0] * law[0], 0.25);
    }

    #[test]
    fn degree_histogram() {
        let cfg = SamplerConfig::new(f(2), 20_000, 3);
        let r = degree_distribution(&cfg, 1, 6).unwrap();
        assert_eq!(r.used + r.discarded, r.total);
        assert!(r.max_abs_z < 4.0, "{r:?}");
        let r3 = degree_distribution(&SamplerConfig::new(f(3), 20_000, 4), 2, 4).unwrap();
        assert!(r3.max_abs_z < 4.0);
    }

    #[test]
    fn discards_are_counted() {
        let cfg = SamplerConfig::new(f(2), 2000, 5).with_precision(4);
        let r = degree_distribution(&cfg, 2, 3).unwrap();
        assert!(r.discarded > 0);
        assert_eq!(r.used + r.discarded, 2000);
    }

    #[test]
    fn independence_and_negative_control() {
        let cfg = SamplerConfig::new(f(2), 20_000, 11);
        let r = independence_check(&cfg, (1, 2), 4).unwrap();
        assert!(r.p_value > 0.001, "{r:?}");
        let mut dependent = vec![vec![0u64; 4]; 4];
        for (i, p) in binned_law(f(2), 4).iter().enumerate() {
            dependent[i][i] = (p * 20_000.0) as u64;
        }
        let (_, _, _, p) = chi_square_product(&dependent, &binned_law(f(2), 4));
        assert!(p < 1e-6);
        assert!(independence_check(&cfg, (2, 2), 4).is_err());
    }

    #[test]
    fn tail_frequencies() {
        let cfg = SamplerConfig::new(f(2), 20_000, 13);
        let phi = GrowthFunction::parse("linear:1").unwrap();
        let r = tail_event_frequency(&cfg, 2, &phi, 1..=8).unwrap();
        assert!(r.truncated.is_empty());
        assert!(r.max_abs_z < 4.0, "{r:?}");
        for row in &r.rows {
            assert_eq!(row.used + row.discarded, 20_000);
        }
        let k1 = tail_event_frequency(&cfg, 1, &phi, 3..=3).unwrap();
        assert_eq!(k1.rows[0].exact, RationalRepr::from(&tail_measure(f(2), 3, 1).unwrap()));
    }

    #[test]
    fn short_precision_truncates_range() {
        let cfg = SamplerConfig::new(f(2), 100, 1).with_precision(10);
        let phi = GrowthFunction::parse("linear:1").unwrap();
        let r = tail_event_frequency(&cfg, 2, &phi, 1..=8).unwrap();
        assert_eq!(r.truncated, vec![4, 5, 6, 7, 8]);
    }
}
