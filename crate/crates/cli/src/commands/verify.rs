use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use superlog_ckn::corpus;
use superlog_ckn::functionals::{quotient, remainder_sides};
use superlog_ckn::varopt::{minimize_potential, Budget, LineGrid};
use superlog_ckn::{QuotientSpec, Variant, WeightClass};

use crate::config::{FamilyName, RunConfig};
use crate::error::{CliResult, Outcome};
use crate::output::emit_json;
use crate::{set, QuotientArgs, WeightArgs};

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[command(flatten)]
    quotient: QuotientArgs,
    /// Number of corpus functions.
    #[arg(long)]
    corpus_size: Option<usize>,
    /// Corpus seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_nodes: Option<usize>,
    /// Constant to test against; by default the sharp constant when p = q and a
    /// search estimate otherwise.
    #[arg(long)]
    constant: Option<f64>,
    #[arg(long)]
    violation_slack: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Row {
    index: usize,
    kind: &'static str,
    quotient: f64,
    numerator: f64,
    denominator: f64,
    quadrature_error: f64,
    ratio: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    remainder: Option<RemainderRow>,
}

#[derive(Debug, Serialize)]
struct RemainderRow {
    lhs: f64,
    main: f64,
    rem: f64,
    coefficient: Option<f64>,
    pass: bool,
}

pub fn run(args: VerifyArgs, mut cfg: RunConfig) -> CliResult<Outcome> {
    args.weight.apply(&mut cfg);
    args.quotient.apply(&mut cfg);
    set(&mut cfg.corpus.size, args.corpus_size);
    set(&mut cfg.corpus.seed, args.seed);
    set(&mut cfg.corpus.max_nodes, args.max_nodes);
    set(&mut cfg.tolerance.violation_slack, args.violation_slack);
    let corpus_cfg = cfg.corpus()?;
    let spec = cfg.explicit_spec()?;
    let w = spec.weight().clone();
    let alpha = cfg.weight.alpha;
    let family = match cfg.weight.family {
        FamilyName::PolyLog => "poly-log",
        FamilyName::SuperLog => "super-log",
    };
    let inequality = format!("{family}-{}", if alpha == 1.0 { "critical" } else { "explicit" });

    let (constant, source) = match (args.constant, spec.sharp_constant()) {
        (Some(c), _) => (c, "given"),
        (None, Some(c)) => (c, "sharp"),
        (None, None) => {
            let s = &cfg.search;
            let budget = Budget { max_sweeps: s.budget, step_tol: s.step_tol, seed: s.seed, ..Budget::default() };
            (minimize_potential(&spec, &LineGrid::localized(), &budget)?.value, "search-estimate")
        }
    };
    let remainder_spec = (cfg.weight.family == FamilyName::SuperLog
        && alpha == 1.0
        && spec.p() == spec.q()
        && spec.class() == WeightClass::P)
        .then(|| QuotientSpec::new(spec.n(), spec.p(), spec.q(), w.clone(), Variant::HardyRemainder))
        .transpose()?;
    let slack = cfg.tolerance.violation_slack;

    let rows: Vec<Row> = cfg.pool()?.install(|| {
        (0..corpus_cfg.size)
            .into_par_iter()
            .map(|i| -> CliResult<Row> {
                let e = corpus::entry(&corpus_cfg, w.eta(), Some(&w), i)?;
                let v = quotient(&spec, &e.profile)?;
                let remainder = match &remainder_spec {
                    Some(rs) => {
                        let s = remainder_sides(rs, &e.profile)?;
                        let c = s.coefficient();
                        Some(RemainderRow {
                            lhs: s.lhs,
                            main: s.main,
                            rem: s.rem,
                            coefficient: c,
                            pass: s.lhs - s.main >= -slack * s.lhs.abs() && s.rem > 0.0,
                        })
                    }
                    None => None,
                };
                Ok(Row {
                    index: i,
                    kind: e.kind.name(),
                    quotient: v.quotient,
                    numerator: v.numerator,
                    denominator: v.denominator,
                    quadrature_error: v.quadrature_error,
                    ratio: v.quotient / constant,
                    pass: v.quotient >= constant - slack,
                    remainder,
                })
            })
            .collect::<CliResult<Vec<Row>>>()
    })?;

    let violations = rows.iter().filter(|r| !r.pass).count();
    let min_quotient = rows.iter().map(|r| r.quotient).fold(f64::INFINITY, f64::min);
    let mut report = json!({
        "inequality": inequality,
        "weight": w.describe(),
        "constant": constant,
        "constant_source": source,
        "functions": rows.len(),
        "violations": violations,
        "min_quotient": min_quotient,
        "min_ratio": min_quotient / constant,
    });
    let mut remainder_violations = 0;
    if remainder_spec.is_some() {
        remainder_violations = rows.iter().filter(|r| r.remainder.as_ref().is_some_and(|m| !m.pass)).count();
        let c0 = rows
            .iter()
            .filter_map(|r| r.remainder.as_ref().and_then(|m| m.coefficient))
            .fold(f64::INFINITY, f64::min);
        report["remainder"] = json!({ "violations": remainder_violations, "min_coefficient": c0 });
    }
    report["rows"] = serde_json::to_value(&rows).expect("rows serialize");
    emit_json(&cfg, report)?;
    Ok(if violations + remainder_violations == 0 { Outcome::Pass } else { Outcome::Violation })
}
