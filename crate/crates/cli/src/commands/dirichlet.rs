use std::path::PathBuf;

use clap::Args;
use fqcf::dirichlet::{dirichlet_witness, half_inverse_table, is_improvable, ApproxFunction, DirichletError};
use fqcf::ExactRational;
use serde_json::json;

use crate::input::{exact, exact_table, range, XInput};
use crate::output::{to_value, Output, Table};
use crate::{flag, CliError, RunConfig};

#[derive(Args)]
pub struct DirichletArgs {
    /// `num/den` or `int=<poly>; frac=<c1,...,cN>`
    #[arg(long)]
    x: String,

    /// inverse (1/t), scaled:c (c/t), power:c:tau (c t^-tau) or half-inverse (q^-m/2 at t = q^m)
    #[arg(long, default_value = "inverse")]
    phi: String,

    /// File of `m phi(q^m)` rows with exact values, used instead of --phi
    #[arg(long)]
    phi_table: Option<PathBuf>,

    /// Inclusive range of n to test
    #[arg(long, default_value = "1..15")]
    n_range: String,

    /// Also produce a witness (P, Q) for t = q^tau
    #[arg(long)]
    tau: Option<String>,
}

fn preset(spec: &str, q: u32, max_m: usize) -> Result<ApproxFunction, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::usage("--phi", format!("unknown preset {spec:?}"));
    match parts[..] {
        ["inverse"] => Ok(ApproxFunction::inverse()),
        ["half-inverse"] => Ok(half_inverse_table(q, max_m)),
        ["scaled", c] => {
            let c = exact(c, "--phi")?;
            ApproxFunction::power_law(c, ExactRational::from_integer(1.into())).map_err(flag("--phi"))
        }
        ["power", c, tau] => {
            ApproxFunction::power_law(exact(c, "--phi")?, exact(tau, "--phi")?).map_err(flag("--phi"))
        }
        _ => Err(bad()),
    }
}

pub fn run(cfg: &RunConfig, args: DirichletArgs) -> Result<Output, CliError> {
    let q = cfg.field.q();
    let x = XInput::parse(cfg.field, &args.x, "--x")?;
    let number = x.number()?;
    let n_range = range(&args.n_range, "--n-range")?;
    let (lo, mut hi) = (*n_range.start() as usize, *n_range.end() as usize);
    // a rational x has finitely many quotients and nothing to check past them
    let cf = number.frac.expansion()?;
    if cf.terminated {
        hi = hi.min(cf.len());
    }
    // S_n never exceeds deg den, or half the known coefficients of a series
    let max_m = match &x {
        XInput::Rational { den, .. } => den.deg().unwrap_or(0),
        XInput::Series(s) => s.precision(),
    };
    let phi = match &args.phi_table {
        Some(path) => ApproxFunction::table(exact_table(path)?).map_err(flag("--phi-table"))?,
        None => preset(&args.phi, q, max_m)?,
    };
    let verdict = is_improvable(&number, &phi, lo..=hi).map_err(|e| match e {
        DirichletError::Uncertified { .. } => CliError::usage("--n-range", e),
        DirichletError::Undefined(_) => CliError::usage("--phi-table", e),
        e => CliError::Run(e.into()),
    })?;
    let witness = match &args.tau {
        Some(t) => Some(dirichlet_witness(&number, &exact(t, "--tau")?).map_err(flag("--tau"))?),
        None => None,
    };

    let json = json!({
        "q": q,
        "x": args.x,
        "phi": args.phi_table.as_ref().map_or(args.phi.clone(), |p| p.display().to_string()),
        "verdict": to_value(&verdict)?,
        "witness": witness.as_ref().map(to_value).transpose()?,
    });

    let mut human = format!(
        "n in {lo}..={hi}: {}\n",
        if verdict.holds { "holds" } else { "fails" }
    );
    if let Some(n) = verdict.first_failure {
        human += &format!("first failure at n = {n}\n");
    }
    if let Some(w) = &witness {
        human += &format!(
            "witness: P = {}, Q = {} (convergent {}), log|Q| = {}, log|Qx - P| = {}\n",
            w.p,
            w.q,
            w.index,
            w.q_log_norm,
            w.residual_log_norm.map_or("-inf".into(), |r| r.to_string())
        );
    }
    let mut table = Table::new(&["n", "degree_sum", "holds"]);
    for r in &verdict.rows {
        table.push(vec![r.n.to_string(), r.degree_sum.to_string(), r.holds.to_string()]);
    }
    Ok(Output { json, human, table })
}
