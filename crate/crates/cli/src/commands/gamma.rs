use clap::{Args, ValueEnum};
use serde_json::json;
use superlog_ckn::varopt::hypothesis_report;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult, Outcome};
use crate::output::{emit_csv, emit_json, num};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct GammaArgs {
    #[arg(long, default_value_t = 1)]
    n_min: u32,
    #[arg(long, default_value_t = 10)]
    n_max: u32,
    /// Largest p; defaults to max((n+1)/2, 2) for each n.
    #[arg(long)]
    p_max: Option<f64>,
    /// p samples in (1, p-max].
    #[arg(long, default_value_t = 40)]
    p_samples: usize,
    /// Samples of s = 1/p - 1/q in [0, 1/n].
    #[arg(long, default_value_t = 40)]
    s_samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

pub fn run(args: GammaArgs, cfg: RunConfig) -> CliResult<Outcome> {
    if args.n_min == 0 || args.n_min > args.n_max || args.p_samples == 0 || args.s_samples < 2 {
        return Err(CliError::Usage("need 1 <= n-min <= n-max, p-samples >= 1, s-samples >= 2".into()));
    }
    if matches!(args.p_max, Some(p) if !(p > 1.0 && p.is_finite())) {
        return Err(CliError::Usage("p-max must exceed 1".into()));
    }
    let header: Vec<String> =
        ["n", "p", "q", "gamma", "inv_p_conj", "condition", "lemma_sufficient"].map(String::from).to_vec();
    let mut rows = Vec::new();
    let (mut sufficient, mut exceptions) = (0usize, 0usize);
    for n in args.n_min..=args.n_max {
        let p_max = args.p_max.unwrap_or(((n as f64 + 1.0) / 2.0).max(2.0));
        for i in 1..=args.p_samples {
            let p = 1.0 + (p_max - 1.0) * i as f64 / args.p_samples as f64;
            for j in 0..args.s_samples {
                let s = j as f64 / (args.s_samples - 1) as f64 / n as f64;
                let q = 1.0 / (1.0 / p - s);
                if !(q.is_finite() && q > 0.0) {
                    continue;
                }
                let h = hypothesis_report(n, p, q, None)?;
                sufficient += h.lemma_sufficient as usize;
                exceptions += (h.lemma_sufficient && !h.exponent_condition) as usize;
                rows.push(vec![
                    n.to_string(),
                    num(p),
                    num(q),
                    num(h.gamma),
                    num(h.inv_p_conj),
                    h.exponent_condition.to_string(),
                    h.lemma_sufficient.to_string(),
                ]);
            }
        }
    }
    let summary = json!({ "cases": rows.len(), "sufficient_cases": sufficient, "exceptions": exceptions });
    match args.format {
        Format::Csv => emit_csv(&cfg, &header, &rows, summary)?,
        Format::Json => {
            let table: Vec<_> = rows
                .iter()
                .map(|r| header.iter().zip(r).map(|(k, v)| (k.clone(), cell(v))).collect::<serde_json::Map<_, _>>())
                .collect();
            let mut body = summary;
            body["table"] = table.into();
            emit_json(&cfg, body)?;
        }
    }
    Ok(if exceptions == 0 { Outcome::Pass } else { Outcome::Violation })
}

fn cell(v: &str) -> serde_json::Value {
    serde_json::from_str(v).unwrap_or_else(|_| v.into())
}
