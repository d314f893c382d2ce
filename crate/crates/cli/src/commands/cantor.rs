use clap::{Args, ValueEnum};
use fqcf::cantor::{
    check_holder, local_dimension_profile, mass_conservation, membership_check, CantorError, CantorParams, EnumMode,
    IndexMode, Walker, DEFAULT_BUDGET, HOLDER_SLACK,
};
use serde_json::json;

use crate::input::positive;
use crate::output::{float, join, to_value, Output, Table};
use crate::{CliError, RunConfig};

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Explicit,
    DegreeClass,
}

#[derive(Args)]
pub struct CantorArgs {
    /// Block length
    #[arg(long)]
    k: usize,

    /// Linear growth rate B of Phi(n) = Bn
    #[arg(long = "B")]
    big_b: f64,

    /// Free positions use degrees 1..=M
    #[arg(long = "M")]
    big_m: usize,

    #[arg(long)]
    eps: f64,

    /// Enumerate basic sets up to this order
    #[arg(long)]
    depth: usize,

    /// Comma-separated window positions n_1,n_2,... instead of the strict sequence
    #[arg(long, value_delimiter = ',')]
    relaxed: Option<Vec<u64>>,

    /// Enumeration used for the mass-conservation pass
    #[arg(long, value_enum, default_value = "degree-class")]
    mode: Mode,

    /// Cap on enumerated records
    #[arg(long, env = "FQCF_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

fn attribute(e: CantorError) -> CliError {
    let name = match &e {
        CantorError::BadEpsilon { .. } => "--eps",
        CantorError::SmallM(_) => "--M",
        CantorError::BadRelaxedSequence(_) => "--relaxed",
        CantorError::BudgetExceeded { .. } => "--budget",
        CantorError::DepthBelowFirst { .. } => "--depth",
        _ => return CliError::Run(e.into()),
    };
    CliError::usage(name, e)
}

pub fn run(cfg: &RunConfig, args: CantorArgs) -> Result<Output, CliError> {
    let k = positive(args.k, "--k")?;
    let big_b = positive(args.big_b, "--B")?;
    let budget = positive(args.budget, "--budget")?;
    let index_mode = match &args.relaxed {
        Some(terms) => IndexMode::Relaxed(terms.clone()),
        None => IndexMode::Strict,
    };
    let mode = match args.mode {
        Mode::Explicit => EnumMode::Explicit,
        Mode::DegreeClass => EnumMode::DegreeClass,
    };
    let params = CantorParams::new(cfg.field, k, big_b, args.big_m, args.eps, index_mode).map_err(attribute)?;
    let n1 = params.n_seq.first();
    let bound = params.s - params.eps;

    let walker = Walker::new(params.clone(), args.depth, mode, budget).map_err(attribute)?;
    let mass = mass_conservation(&walker);
    let profile = local_dimension_profile(params.clone(), args.depth, budget).map_err(attribute)?;
    let holder = if (args.depth as u128) >= n1 {
        Some(check_holder(params.clone(), args.depth, budget).map_err(attribute)?)
    } else {
        None
    };
    let windows = params.n_seq.terms().iter().filter(|&&n| n <= args.depth as u128).count().max(1);
    let membership = membership_check(&params, windows).map_err(attribute)?;
    let conditions = params.n_seq.condition_report();

    let order_pass = |order: usize, min_ratio: f64| (order as u128) < n1 || min_ratio >= bound - HOLDER_SLACK;
    let rows = profile
        .iter()
        .map(|r| {
            let mut v = to_value(r)?;
            v["pass"] = json!(order_pass(r.order, r.min_ratio));
            Ok(v)
        })
        .collect::<serde_json::Result<Vec<_>>>()?;
    let passed = holder.as_ref().is_none_or(|h| h.passed) && membership.iter().all(|m| m.holds);

    let json = json!({
        "q": cfg.field.q(),
        "params": to_value(&params)?,
        "depth": args.depth,
        "mode": to_value(&mode)?,
        "bound": bound,
        "conditions": to_value(&conditions)?,
        "mass": to_value(&mass)?,
        "holder": holder.as_ref().map(to_value).transpose()?,
        "orders": rows,
        "membership": to_value(&membership)?,
        "passed": passed,
    });

    let mut human = format!(
        "s = {:.12}, eps = {}, s - eps = {:.12}\nalpha = [{}]\nn_j = {}\n",
        params.s,
        params.eps,
        bound,
        join(&params.alphas.alpha.iter().map(|a| format!("{a:.6}")).collect::<Vec<_>>(), ", "),
        join(params.n_seq.terms(), ", "),
    );
    human += &format!(
        "mass: {} parents, {} nodes, worst relative residual {:e}\n",
        mass.parents, mass.nodes, mass.worst_relative_residual
    );
    human += "order  count  min_ratio  max_ratio  pass\n";
    for r in &profile {
        human += &format!(
            "{:>5}  {}  {:.6}  {:.6}  {}\n",
            r.order,
            r.count,
            r.min_ratio,
            r.max_ratio,
            order_pass(r.order, r.min_ratio)
        );
    }
    match &holder {
        Some(h) => {
            human += &format!(
                "holder: {} classes from order {}, worst ratio {:.9} at {:?}, {} violations\n",
                h.checked, h.first_order, h.worst_ratio, h.worst_degrees, h.violations
            )
        }
        None => human += &format!("holder: skipped, depth below n_1 = {n1}\n"),
    }
    human += if passed { "PASS" } else { "FAIL" };
    if !params.n_seq.strict {
        human += " (relaxed sequence, non-certifying)";
    }
    human += "\n";

    let mut table = Table::new(&["order", "count", "min_ratio", "max_ratio", "mean_ratio", "bound", "pass"]);
    for r in &profile {
        table.push(vec![
            r.order.to_string(),
            r.count.to_string(),
            float(r.min_ratio),
            float(r.max_ratio),
            float(r.mean_ratio),
            float(bound),
            order_pass(r.order, r.min_ratio).to_string(),
        ]);
    }
    Ok(Output { json, human, table })
}
