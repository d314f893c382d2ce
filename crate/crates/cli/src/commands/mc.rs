use clap::{Args, ValueEnum};
use fqcf::stochastic::{degree_distribution, independence_check, tail_event_frequency, SamplerConfig};
use serde_json::json;

use crate::input::{growth, positive, range};
use crate::output::{float, to_value, Output, Table};
use crate::{flag, CliError, RunConfig};

#[derive(Clone, Copy, ValueEnum)]
enum Stat {
    /// Law of deg A_i
    Degree,
    /// Chi-square test of deg A_i against deg A_j
    Indep,
    /// Frequency of the block-sum event against its exact measure
    Tail,
}

#[derive(Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 100_000)]
    n_samples: u64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Coefficients drawn per sample; derived from the deepest position if unset
    #[arg(long)]
    precision: Option<usize>,

    #[arg(long, value_enum)]
    stat: Stat,

    /// Position i for --stat degree
    #[arg(long, default_value_t = 1)]
    position: usize,

    /// Largest degree with its own row for --stat degree
    #[arg(long, default_value_t = 6)]
    max_degree: usize,

    /// Positions i,j for --stat indep
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2])]
    positions: Vec<usize>,

    /// Degrees at or above this share one bin for --stat indep
    #[arg(long, default_value_t = 6)]
    cutoff: usize,

    /// Block length for --stat tail
    #[arg(long, default_value_t = 2)]
    k: usize,

    /// Growth preset for --stat tail
    #[arg(long, default_value = "linear:1")]
    phi: String,

    /// Inclusive range of n for --stat tail
    #[arg(long, default_value = "1..12")]
    n_range: String,
}

pub fn run(cfg: &RunConfig, args: McArgs) -> Result<Output, CliError> {
    let samples = positive(args.n_samples, "--n-samples")?;
    let mut sampler = SamplerConfig::new(cfg.field, samples, args.seed);
    if let Some(p) = args.precision {
        sampler = sampler.with_precision(positive(p, "--precision")?);
    }
    let q = cfg.field.q();
    match args.stat {
        Stat::Degree => {
            let position = positive(args.position, "--position")?;
            let max_degree = positive(args.max_degree, "--max-degree")?;
            let report = degree_distribution(&sampler, position, max_degree).map_err(flag("--position"))?;
            let mut human = format!(
                "q = {q}, position {position}, {} samples ({} discarded), precision {}\n",
                report.total, report.discarded, report.precision
            );
            human += "degree  empirical  exact  z\n";
            let mut table = Table::new(&["degree", "count", "empirical", "exact_num", "exact_den", "exact", "sigma", "z"]);
            for b in &report.bins {
                human += &format!("{:>6}  {:.6}  {}  {:+.3}\n", b.degree, b.empirical, b.exact_value, b.z);
                table.push(vec![
                    b.degree.to_string(),
                    b.count.to_string(),
                    float(b.empirical),
                    b.exact.num.clone(),
                    b.exact.den.clone(),
                    float(b.exact_value),
                    float(b.sigma),
                    float(b.z),
                ]);
            }
            human += &format!("beyond {max_degree}: {}, max |z| = {:.3}\n", report.beyond, report.max_abs_z);
            Ok(Output {
                json: to_value(&report)?,
                human,
                table,
            })
        }
        Stat::Indep => {
            let [i, j] = args.positions[..] else {
                return Err(CliError::usage("--positions", "expected two positions i,j"));
            };
            let report = independence_check(&sampler, (i, j), args.cutoff).map_err(flag("--positions"))?;
            let human = format!(
                "q = {q}, deg A_{i} vs deg A_{j}, {} samples ({} discarded), cutoff {}\nchi2 = {:.4}, df = {}, p = {:.6}\n",
                report.total, report.discarded, report.cutoff, report.statistic, report.df, report.p_value
            );
            let mut table = Table::new(&["bin_i", "bin_j", "observed", "expected"]);
            for (a, (row_o, row_e)) in report.observed.iter().zip(&report.expected).enumerate() {
                for (b, (o, e)) in row_o.iter().zip(row_e).enumerate() {
                    table.push(vec![(a + 1).to_string(), (b + 1).to_string(), o.to_string(), float(*e)]);
                }
            }
            Ok(Output {
                json: to_value(&report)?,
                human,
                table,
            })
        }
        Stat::Tail => {
            let k = positive(args.k, "--k")?;
            let phi = growth(Some(&args.phi), None)?;
            let n_range = range(&args.n_range, "--n-range")?;
            let report = tail_event_frequency(&sampler, k, &phi, n_range).map_err(flag("--n-range"))?;
            let mut human = format!(
                "q = {q}, k = {k}, phi = {}, {} samples, precision {}\n",
                args.phi, report.total, report.precision
            );
            human += "n  threshold  empirical  exact  z\n";
            let mut table = Table::new(&[
                "n",
                "phi",
                "threshold",
                "used",
                "hits",
                "empirical",
                "exact_num",
                "exact_den",
                "exact",
                "sigma",
                "z",
            ]);
            for r in &report.rows {
                human += &format!(
                    "{:>2}  {:>3}  {:.6}  {:.6}  {:+.3}\n",
                    r.n, r.threshold, r.empirical, r.exact_value, r.z
                );
                table.push(vec![
                    r.n.to_string(),
                    float(r.phi),
                    r.threshold.to_string(),
                    r.used.to_string(),
                    r.hits.to_string(),
                    float(r.empirical),
                    r.exact.num.clone(),
                    r.exact.den.clone(),
                    float(r.exact_value),
                    float(r.sigma),
                    float(r.z),
                ]);
            }
            if !report.truncated.is_empty() {
                human += &format!("uncertified n: {:?}\n", report.truncated);
            }
            human += &format!("max |z| = {:.3}\n", report.max_abs_z);
            let mut json = to_value(&report)?;
            json["phi_spec"] = json!(args.phi);
            Ok(Output { json, human, table })
        }
    }
}
