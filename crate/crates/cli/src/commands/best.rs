use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde_json::json;
use superlog_ckn::varopt::{minimize_potential, near_extremal_line, Budget, LineGrid};
use superlog_ckn::{BestConstantEstimate, WeightClass};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult, Outcome};
use crate::output::{emit_json, num};
use crate::{set, QuotientArgs, WeightArgs};

#[derive(Debug, Args)]
pub struct BestArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[command(flatten)]
    quotient: QuotientArgs,
    /// Number of starts; start i > 0 jitters the initial profile with seed `seed + i`.
    #[arg(long)]
    starts: Option<usize>,
    /// Maximum coordinate sweeps per start.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jitter: Option<f64>,
    /// Comma-separated δ values for the near-extremal family f_η^δ (p = q only).
    #[arg(long, value_delimiter = ',')]
    delta_ladder: Option<Vec<f64>>,
    /// A single δ, appended to the ladder.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    ladder_span: Option<f64>,
    #[arg(long)]
    ladder_ramp: Option<f64>,
    #[arg(long)]
    ladder_nodes: Option<usize>,
    /// CSV of the best start's nodes (y = log(s/s₀), u).
    #[arg(long)]
    minimizer_out: Option<PathBuf>,
}

pub fn run(args: BestArgs, mut cfg: RunConfig) -> CliResult<Outcome> {
    args.weight.apply(&mut cfg);
    args.quotient.apply(&mut cfg);
    let s = &mut cfg.search;
    set(&mut s.starts, args.starts);
    set(&mut s.budget, args.budget);
    set(&mut s.seed, args.seed);
    set(&mut s.jitter, args.jitter);
    set(&mut s.delta_ladder, args.delta_ladder);
    s.delta_ladder.extend(args.delta);
    set(&mut s.ladder_span, args.ladder_span);
    set(&mut s.ladder_ramp, args.ladder_ramp);
    set(&mut s.ladder_nodes, args.ladder_nodes);
    if s.starts == 0 || s.budget == 0 {
        return Err(CliError::Usage("starts and budget must be positive".into()));
    }

    let spec = cfg.explicit_spec()?;
    let s = &cfg.search;
    let grid = if spec.p() == spec.q() && spec.class() == WeightClass::P {
        LineGrid::hardy()
    } else {
        LineGrid::localized()
    };
    let starts: Vec<BestConstantEstimate> = cfg.pool()?.install(|| {
        (0..s.starts)
            .into_par_iter()
            .map(|i| {
                let budget = Budget {
                    max_sweeps: s.budget,
                    step_tol: s.step_tol,
                    seed: s.seed + i as u64,
                    jitter: if i == 0 { 0.0 } else { s.jitter },
                    ..Budget::default()
                };
                minimize_potential(&spec, &grid, &budget)
            })
            .collect::<Result<_, _>>()
    })?;
    let (best_i, best) = starts
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .expect("at least one start");

    let ladder = s
        .delta_ladder
        .iter()
        .map(|&d| {
            let q = near_extremal_line(&spec, d, s.ladder_span, s.ladder_ramp, s.ladder_nodes)?;
            // δ^p times the level factor of the explicit form.
            let reference = spec.sharp_constant().map(|c| c * (d * spec.p_conj()).powf(spec.p()));
            Ok(json!({ "delta": d, "quotient": q, "reference": reference }))
        })
        .collect::<CliResult<Vec<_>>>()?;

    if let Some(path) = &args.minimizer_out {
        if let Some((ys, us)) = &best.potential_nodes {
            let mut w = csv::Writer::from_path(path)?;
            w.write_record(["y", "u"])?;
            for (y, u) in ys.iter().zip(us) {
                w.write_record([num(*y), num(*u)])?;
            }
            w.flush()?;
        }
    }

    let report = json!({
        "weight": spec.weight().describe(),
        "estimate": best.value,
        "best_start": best_i,
        "method": format!("{:?}", best.method),
        "lower_reference": best.lower_reference,
        "converged": best.converged,
        "evaluations": best.evaluations,
        "trace": best.trace,
        "starts": starts.iter().map(|e| json!({ "value": e.value, "converged": e.converged })).collect::<Vec<_>>(),
        "ladder": ladder,
    });
    emit_json(&cfg, report)?;
    if let Some(lo) = best.lower_reference {
        if best.value < lo * (1.0 - 1e-3) {
            return Err(CliError::Tolerance(format!("estimate {} undercuts the proven bound {lo}", best.value)));
        }
    }
    Ok(Outcome::Pass)
}
