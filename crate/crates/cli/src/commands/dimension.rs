use std::path::PathBuf;

use clap::{Args, ValueEnum};
use fqcf::dimension::solve_s_k_m;
use fqcf::growth::{dim_f, dim_g, DimensionCase, Extended};
use serde_json::json;

use crate::input::{growth, positive};
use crate::output::{float, opt, to_value, Output, Table};
use crate::{flag, CliError, RunConfig};

#[derive(Clone, Copy, ValueEnum)]
enum SetKind {
    #[value(name = "F", alias = "f")]
    F,
    #[value(name = "G", alias = "g")]
    G,
}

#[derive(Args)]
pub struct DimensionArgs {
    /// Block length
    #[arg(long, default_value_t = 1)]
    k: usize,

    /// Growth preset: linear:B, power:c, exp:b, log[:c], exppow:b:c, const:c
    #[arg(long)]
    phi: Option<String>,

    /// File of `n Phi(n)` rows, used instead of --phi
    #[arg(long, conflicts_with = "phi")]
    phi_table: Option<PathBuf>,

    /// F: the block sum reaches Phi(n) infinitely often; G: for every n
    #[arg(long, value_enum, default_value = "F")]
    set: SetKind,

    /// Also solve the equation truncated to degrees at most M
    #[arg(long = "M")]
    big_m: Option<usize>,
}

pub fn run(cfg: &RunConfig, args: DimensionArgs) -> Result<Output, CliError> {
    let k = positive(args.k, "--k")?;
    let phi = growth(args.phi.as_deref(), args.phi_table.as_deref())?;
    let (set, result) = match args.set {
        SetKind::F => ("F", dim_f(cfg.field, k, &phi).map_err(flag("--phi"))?),
        SetKind::G => ("G", dim_g(cfg.field, k, &phi).map_err(flag("--phi"))?),
    };
    let truncated = match (args.big_m, result.case, &result.invariants.big_b) {
        (Some(m), DimensionCase::BFinite, b) => {
            let root = solve_s_k_m(cfg.field, k, b.to_f64(), m).map_err(flag("--M"))?;
            Some((m, root))
        }
        (Some(_), _, _) => {
            return Err(CliError::usage("--M", "only applies when 0 < B < inf on the F-set"));
        }
        _ => None,
    };

    let mut json = to_value(&result)?;
    json["q"] = json!(cfg.field.q());
    json["k"] = json!(k);
    json["set"] = json!(set);
    json["phi"] = json!(args.phi.clone().unwrap_or_else(|| "table".into()));
    if let Some((m, root)) = &truncated {
        json["truncated"] = json!({ "M": m, "value": root.s, "solver": to_value(&root.info)? });
    }

    let case = to_value(&result.case)?;
    let case = case.as_str().unwrap_or_default();
    let inv = &result.invariants;
    let ext = |e: &Extended| match e {
        Extended::Exact(r) => r.to_string(),
        Extended::Approx(v) => format!("~{v}"),
        Extended::Infinite => "inf".into(),
    };
    let mut human = format!("dim {set}_{k} = ");
    match (&result.exact, result.value) {
        (Some(r), _) => human += &format!("{r}\n"),
        (None, Some(v)) => human += &format!("{v:.12}\n"),
        (None, None) => human += "inconclusive\n",
    }
    human += &format!("case: {case}\n");
    human += &format!("B = {}, b = {}, a = {}", ext(&inv.big_b), ext(&inv.b), ext(&inv.a));
    if inv.estimate {
        human += " (table estimate)";
    }
    human += "\n";
    if let Some(info) = &result.solver {
        human += &format!("solver: {} iterations, residual {:e}", info.iterations, info.residual);
        if info.bracket_limited {
            human += ", root below the bracket";
        }
        human += "\n";
    }
    if let Some((m, root)) = &truncated {
        human += &format!("degrees <= {m}: s = {:.12}\n", root.s);
    }

    let mut table = Table::new(&["q", "k", "set", "case", "value", "exact", "residual"]);
    table.push(vec![
        cfg.field.q().to_string(),
        k.to_string(),
        set.into(),
        case.into(),
        opt(result.value.map(float)),
        opt(result.exact.as_ref()),
        opt(result.solver.map(|s| float(s.residual))),
    ]);
    Ok(Output { json, human, table })
}
