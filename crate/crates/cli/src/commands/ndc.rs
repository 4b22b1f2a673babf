use clap::Args;
use serde_json::json;

use super::log_space;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult, Outcome};
use crate::output::emit_json;
use crate::WeightArgs;

#[derive(Debug, Args)]
pub struct NdcArgs {
    #[command(flatten)]
    weight: WeightArgs,
    /// Depth grid σ: 0 followed by `points` log-spaced depths in [1e-4, sigma-max].
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[arg(long, default_value_t = 1e4)]
    sigma_max: f64,
}

pub fn run(args: NdcArgs, mut cfg: RunConfig) -> CliResult<Outcome> {
    args.weight.apply(&mut cfg);
    if !(args.sigma_max > 1e-4 && args.sigma_max.is_finite()) {
        return Err(CliError::Usage("sigma-max must exceed 1e-4".into()));
    }
    let w = cfg.weight()?;
    let mut sigmas = vec![0.0];
    sigmas.extend(log_space(1e-4, args.sigma_max, args.points));
    let rho = w.rho_grid_from_depths(&sigmas)?;
    let r = w.ndc_check(&rho)?;
    emit_json(
        &cfg,
        json!({
            "weight": w.describe(),
            "class": format!("{:?}", w.classify()?),
            "grid_points": rho.len(),
            "grid_inf_h": r.grid_inf_h,
            "analytic_bound": r.analytic_bound,
            "satisfied": r.satisfied,
            "ge_one": r.ge_one,
            "numerical_only": r.numerical_only,
        }),
    )?;
    // The bound is the value of H at t = η, so the grid infimum may not undercut it.
    if r.grid_inf_h < r.analytic_bound * (1.0 - 1e-9) {
        return Err(CliError::Tolerance(format!(
            "grid infimum {:e} below analytic bound {:e}",
            r.grid_inf_h, r.analytic_bound
        )));
    }
    Ok(if r.satisfied { Outcome::Pass } else { Outcome::Violation })
}
