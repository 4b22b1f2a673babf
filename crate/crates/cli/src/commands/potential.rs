use clap::Args;
use serde_json::json;
use superlog_ckn::WeightClass;

use super::log_space;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult, Outcome};
use crate::output::{emit_csv, num, opt};
use crate::{set, WeightArgs};

#[derive(Debug, Args)]
pub struct PotentialArgs {
    #[command(flatten)]
    weight: WeightArgs,
    /// Depth grid σ = log(η/t): 0 followed by `points` log-spaced depths.
    #[arg(long, default_value_t = 60)]
    points: usize,
    #[arg(long, default_value_t = 1e-3)]
    sigma_min: f64,
    #[arg(long, default_value_t = 1e3)]
    sigma_max: f64,
    /// Largest accepted closed-vs-quadrature relative gap.
    #[arg(long)]
    potential_gap: Option<f64>,
}

pub fn run(args: PotentialArgs, mut cfg: RunConfig) -> CliResult<Outcome> {
    args.weight.apply(&mut cfg);
    set(&mut cfg.tolerance.potential_gap, args.potential_gap);
    if !(args.sigma_min > 0.0 && args.sigma_min <= args.sigma_max && args.sigma_max.is_finite()) {
        return Err(CliError::Usage("need 0 < sigma-min <= sigma-max < inf".into()));
    }
    let w = cfg.weight()?;
    let class = w.classify()?;
    let mu = w.mu()?;
    let bound = w.ndc_analytic_bound()?;
    let ln_eta = w.eta().ln();

    let header: Vec<String> =
        ["sigma", "t", "ln_t", "w", "f_closed", "f_quad", "rel_gap", "G", "rho", "H", "H_lower_bound"]
            .map(String::from)
            .to_vec();
    let mut sigmas = vec![0.0];
    sigmas.extend(log_space(args.sigma_min, args.sigma_max, args.points));
    let mut rows = Vec::with_capacity(sigmas.len());
    let (mut max_gap, mut inf_h): (f64, f64) = (0.0, f64::INFINITY);
    for &s in &sigmas {
        let ln_t = ln_eta - s;
        let ln_w = w.ln_w_sigma(s)?;
        let (fc, fq) = (w.f_closed_sigma(s)?, w.f_quad_sigma(s)?);
        let gap = (fc - fq).abs() / fc.abs();
        max_gap = max_gap.max(gap);
        let h = w.h_sigma(s)?;
        inf_h = inf_h.min(h);
        let (g, rho) = match class {
            WeightClass::P => (Some(w.g_sigma(s)?), 1.0 / fc),
            WeightClass::Q => (None, fc),
        };
        rows.push(vec![
            num(s),
            num(ln_t.exp()),
            num(ln_t),
            num((ln_t + ln_w).exp()),
            num(fc),
            num(fq),
            num(gap),
            opt(g),
            num(rho),
            num(h),
            opt(bound),
        ]);
    }
    let f_at_eta = w.f_closed_sigma(0.0)?;
    let summary = json!({
        "weight": w.describe(),
        "class": format!("{class:?}"),
        "mu": mu,
        "f_at_eta": f_at_eta,
        "rows": rows.len(),
        "max_rel_gap": max_gap,
        "gap_bound": cfg.tolerance.potential_gap,
        "grid_inf_h": inf_h,
        "h_lower_bound": bound,
    });
    emit_csv(&cfg, &header, &rows, summary)?;
    if !(max_gap <= cfg.tolerance.potential_gap) {
        return Err(CliError::Tolerance(format!(
            "closed-vs-quadrature gap {max_gap:e} exceeds {:e}",
            cfg.tolerance.potential_gap
        )));
    }
    Ok(Outcome::Pass)
}
