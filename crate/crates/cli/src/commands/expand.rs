use std::fmt::Write;

use clap::Args;
use fqcf::contfrac::{expand_truncated, CfExpansion, Target};
use serde_json::json;

use crate::input::XInput;
use crate::output::{join, to_value, Output, Table};
use crate::{CliError, RunConfig};

#[derive(Args)]
pub struct ExpandArgs {
    /// `num/den` with polynomial numerator and denominator, or
    /// `int=<poly>; frac=<c1,...,cN>`
    #[arg(long)]
    x: String,

    /// Stop after this many partial quotients
    #[arg(long)]
    n_max: Option<usize>,

    /// Also list the convergents P_n/Q_n
    #[arg(long)]
    convergents: bool,
}

pub fn run(cfg: &RunConfig, args: ExpandArgs) -> Result<Output, CliError> {
    let x = XInput::parse(cfg.field, &args.x, "--x")?;
    let number = x.number()?;
    let mut cf: CfExpansion = match &number.frac {
        Target::Series(frac) => expand_truncated(frac, args.n_max)?,
        rational => rational.expansion()?,
    };
    if let Some(n) = args.n_max {
        if cf.quotients.len() > n {
            cf.quotients.truncate(n);
            cf.certified = cf.certified.min(n);
        }
    }
    let degrees = cf.degrees();
    let convergents = args.convergents.then(|| cf.convergents());

    let quotients: Vec<_> = cf
        .quotients
        .iter()
        .zip(&degrees)
        .enumerate()
        .map(|(i, (a, d))| {
            json!({
                "index": i + 1,
                "quotient": a.to_string(),
                "degree": d,
                "certified": i < cf.certified,
            })
        })
        .collect();
    let mut value = json!({
        "q": cfg.field.q(),
        "int_part": number.int_part.to_string(),
        "quotients": quotients,
        "certified": cf.certified,
        "terminated": cf.terminated,
        "stop": to_value(&cf.stop)?,
    });
    if let Some(conv) = &convergents {
        value["convergents"] = conv
            .iter()
            .map(|c| json!({ "index": c.index, "p": c.p.to_string(), "q": c.q.to_string() }))
            .collect();
    }

    let mut human = String::new();
    writeln!(human, "[x] = {}", number.int_part).unwrap();
    let shown: Vec<String> = cf.quotients.iter().map(|a| a.to_string()).collect();
    writeln!(human, "{{x}} = [{}]", shown.join(", ")).unwrap();
    writeln!(human, "degrees: {}", join(&degrees, " ")).unwrap();
    writeln!(
        human,
        "certified: {} of {} ({})",
        cf.certified,
        cf.len(),
        to_value(&cf.stop)?.as_str().unwrap_or("")
    )
    .unwrap();
    if let Some(conv) = &convergents {
        for c in conv {
            writeln!(human, "P_{0}/Q_{0} = ({1})/({2})", c.index, c.p, c.q).unwrap();
        }
    }

    let mut table = Table::new(&["index", "quotient", "degree", "certified"]);
    for (i, (a, d)) in cf.quotients.iter().zip(&degrees).enumerate() {
        table.push(vec![(i + 1).to_string(), a.to_string(), d.to_string(), (i < cf.certified).to_string()]);
    }
    Ok(Output {
        json: value,
        human,
        table,
    })
}
