use clap::Args;
use fqcf::cylinder::{count_cylinders, measure_degree_sum, tail_measure};
use fqcf::rational::to_f64;
use serde_json::json;

use crate::input::positive;
use crate::output::{float, Output, Table};
use crate::{flag, CliError, RunConfig};

#[derive(Args)]
pub struct MeasureArgs {
    /// Block length
    #[arg(long)]
    k: usize,

    /// Exact degree sum of the block
    #[arg(long, conflicts_with = "tail_from", required_unless_present = "tail_from")]
    m: Option<usize>,

    /// Degree sum at least this value
    #[arg(long)]
    tail_from: Option<usize>,
}

#[derive(Args)]
pub struct CountArgs {
    /// Block length
    #[arg(long)]
    k: usize,

    /// Degree sum
    #[arg(long, conflicts_with = "m_max", required_unless_present = "m_max")]
    m: Option<usize>,

    /// Tabulate every degree sum from k up to this value
    #[arg(long)]
    m_max: Option<usize>,
}

pub fn run_measure(cfg: &RunConfig, args: MeasureArgs) -> Result<Output, CliError> {
    let k = positive(args.k, "--k")?;
    let q = cfg.field.q();
    let (json, label, count, measure) = match (args.m, args.tail_from) {
        (Some(m), _) => {
            let count = count_cylinders(cfg.field, m, k);
            let measure = measure_degree_sum(cfg.field, m, k);
            let json = json!({
                "q": q,
                "k": k,
                "m": m,
                "count": count.to_string(),
                "measure_num": measure.numer().to_string(),
                "measure_den": measure.denom().to_string(),
            });
            (json, format!("m = {m}"), Some(count), measure)
        }
        (None, Some(big_m)) => {
            let measure = tail_measure(cfg.field, big_m, k).map_err(flag("--tail-from"))?;
            let json = json!({
                "q": q,
                "k": k,
                "tail_from": big_m,
                "measure_num": measure.numer().to_string(),
                "measure_den": measure.denom().to_string(),
            });
            (json, format!("m >= {big_m}"), None, measure)
        }
        (None, None) => unreachable!("clap requires --m or --tail-from"),
    };
    let approx = to_f64(&measure);
    let mut human = format!("q = {q}, k = {k}, {label}\n");
    if let Some(c) = &count {
        human += &format!("count   = {c}\n");
    }
    human += &format!("measure = {measure} ~ {approx:e}\n");
    let mut table = Table::new(&["q", "k", "m", "tail", "count", "measure_num", "measure_den", "measure"]);
    table.push(vec![
        q.to_string(),
        k.to_string(),
        args.m.or(args.tail_from).unwrap_or_default().to_string(),
        args.tail_from.is_some().to_string(),
        count.map(|c| c.to_string()).unwrap_or_default(),
        measure.numer().to_string(),
        measure.denom().to_string(),
        float(approx),
    ]);
    Ok(Output { json, human, table })
}

pub fn run_count(cfg: &RunConfig, args: CountArgs) -> Result<Output, CliError> {
    let k = positive(args.k, "--k")?;
    let q = cfg.field.q();
    let ms: Vec<usize> = match (args.m, args.m_max) {
        (Some(m), _) => vec![m],
        (None, Some(hi)) => (k..=hi).collect(),
        (None, None) => unreachable!("clap requires --m or --m-max"),
    };
    let mut rows = Vec::new();
    let mut table = Table::new(&["q", "k", "m", "count"]);
    let mut human = String::new();
    for &m in &ms {
        let c = count_cylinders(cfg.field, m, k).to_string();
        human += &format!("q = {q}, k = {k}, m = {m}: {c}\n");
        table.push(vec![q.to_string(), k.to_string(), m.to_string(), c.clone()]);
        rows.push(json!({ "m": m, "count": c }));
    }
    let json = if args.m.is_some() {
        json!({ "q": q, "k": k, "m": ms[0], "count": rows[0]["count"] })
    } else {
        json!({ "q": q, "k": k, "rows": rows })
    };
    Ok(Output { json, human, table })
}
