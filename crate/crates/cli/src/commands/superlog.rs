use clap::Args;
use serde_json::json;
use superlog_ckn::SuperLog;

use super::log_space;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult, Outcome};
use crate::output::{emit_csv, num};
use crate::set;

#[derive(Debug, Args)]
pub struct SuperlogArgs {
    /// Base a > 1.
    #[arg(long)]
    a: Option<f64>,
    /// Highest family index: columns A0_1..A0_k and A1_0..A1_k.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    r_min: f64,
    #[arg(long, default_value_t = 1e6)]
    r_max: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
    /// Check L(r) ≤ L(e^r) ≤ (1+a)L(r) at every grid point with r ≥ e^a; exit 1 on failure.
    #[arg(long)]
    verify_sandwich: bool,
    #[arg(long)]
    product_tol: Option<f64>,
    #[arg(long)]
    quad_tol: Option<f64>,
    #[arg(long)]
    max_tower_depth: Option<usize>,
}

pub fn run(args: SuperlogArgs, mut cfg: RunConfig) -> CliResult<Outcome> {
    let s = &mut cfg.superlog;
    set(&mut s.a, args.a);
    set(&mut s.product_tol, args.product_tol);
    set(&mut s.quad_tol, args.quad_tol);
    set(&mut s.max_tower_depth, args.max_tower_depth);
    if !(args.r_min > 0.0 && args.r_min <= args.r_max && args.r_max.is_finite()) || args.points == 0 {
        return Err(CliError::Usage("need 0 < r-min <= r-max < inf and points >= 1".into()));
    }
    let params = cfg.superlog_params()?;
    let sl = SuperLog::new(params)?;

    let mut header = vec!["r".to_string(), "L".to_string()];
    header.extend((1..=args.k).map(|j| format!("A0_{j}")));
    header.extend((0..=args.k).map(|j| format!("A1_{j}")));
    header.extend(["B0", "error_bound", "truncation_depth"].map(String::from));

    let grid = log_space(args.r_min, args.r_max, args.points);
    let mut rows = Vec::with_capacity(grid.len());
    let mut worst_bound: f64 = 0.0;
    let (mut checked, mut failed) = (0usize, Vec::new());
    for &r in &grid {
        let l = sl.super_log(r)?;
        let mut row = vec![num(r), num(l)];
        if r >= 1.0 {
            for j in 1..=args.k {
                row.push(num(sl.a0(j, r)?));
            }
            for j in 0..=args.k {
                row.push(num(sl.a1(j, r)?));
            }
            let b = sl.b0(r)?;
            worst_bound = worst_bound.max(b.error_bound);
            row.extend([num(b.value), num(b.error_bound), b.truncation_depth.to_string()]);
        } else {
            row.resize(header.len(), String::new());
        }
        rows.push(row);
        if args.verify_sandwich && r.ln() >= params.a {
            checked += 1;
            let le = sl.super_log_ln(r)?;
            if !(l <= le && le <= (1.0 + params.a) * l) {
                failed.push(r);
            }
        }
    }

    let mut summary = json!({
        "rows": rows.len(),
        "max_error_bound": worst_bound,
    });
    if args.verify_sandwich {
        summary["sandwich"] = json!({ "checked": checked, "violations": failed.len(), "failed_at": failed });
    }
    emit_csv(&cfg, &header, &rows, summary)?;
    if worst_bound > params.product_tol {
        return Err(CliError::Tolerance(format!(
            "B0 truncation bound {worst_bound:e} exceeds product_tol {:e}",
            params.product_tol
        )));
    }
    Ok(if failed.is_empty() { Outcome::Pass } else { Outcome::Violation })
}
