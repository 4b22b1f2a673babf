use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;

use config::{FamilyName, RunConfig};
use error::{CliResult, Outcome};

/// Super-logarithms, weighted Hardy potentials and critical CKN inequalities.
///
/// Exit codes: 0 pass, 1 inequality violation found, 2 usage or domain error,
/// 3 numerical-tolerance failure.
#[derive(Debug, Parser)]
#[command(name = "superlog-ckn", version)]
struct Cli {
    /// TOML config file (default: $SUPERLOG_CKN_CONFIG, then built-in defaults).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for corpus and multi-start work.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate L, A⁰_k, A¹_k and B⁰ over a log-spaced r grid (CSV).
    Superlog(commands::superlog::SuperlogArgs),
    /// Tabulate w, f_η (closed form and quadrature), G_η and H over a depth grid (CSV).
    Potential(commands::potential::PotentialArgs),
    /// Run the inequality suite over the seeded corpus (JSON).
    Verify(commands::verify::VerifyArgs),
    /// Estimate the best constant and evaluate the near-extremal ladder (JSON).
    BestConstant(commands::best::BestArgs),
    /// Non-degeneracy report for a weight (JSON).
    Ndc(commands::ndc::NdcArgs),
    /// γ_{p,q} and the sufficiency condition over an (n, p, q) grid (CSV or JSON).
    Gamma(commands::gamma::GammaArgs),
}

/// Weight selection shared by the weight-based commands.
#[derive(Debug, Args)]
pub struct WeightArgs {
    #[arg(long, value_enum)]
    family: Option<FamilyName>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// R of the poly-log family.
    #[arg(long = "r-big")]
    r_big: Option<f64>,
    /// Base of the super-log family.
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Override of the potential constant μ.
    #[arg(long)]
    mu: Option<f64>,
}

impl WeightArgs {
    pub fn apply(&self, c: &mut RunConfig) {
        let w = &mut c.weight;
        set(&mut w.family, self.family);
        set(&mut w.k, self.k);
        set(&mut w.alpha, self.alpha);
        set(&mut w.r_big, self.r_big);
        set(&mut w.a, self.a);
        set(&mut w.eta, self.eta);
        if self.mu.is_some() {
            w.mu = self.mu;
        }
    }
}

/// Dimension and exponents.
#[derive(Debug, Args)]
pub struct QuotientArgs {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
}

impl QuotientArgs {
    pub fn apply(&self, c: &mut RunConfig) {
        set(&mut c.quotient.n, self.n);
        set(&mut c.quotient.p, self.p);
        set(&mut c.quotient.q, self.q);
    }
}

pub fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn run(cli: Cli) -> CliResult<Outcome> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    set(&mut cfg.output.jobs, cli.jobs);
    if cli.out.is_some() {
        cfg.output.out = cli.out;
    }
    match cli.command {
        Command::Superlog(a) => commands::superlog::run(a, cfg),
        Command::Potential(a) => commands::potential::run(a, cfg),
        Command::Verify(a) => commands::verify::run(a, cfg),
        Command::BestConstant(a) => commands::best::run(a, cfg),
        Command::Ndc(a) => commands::ndc::run(a, cfg),
        Command::Gamma(a) => commands::gamma::run(a, cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(o) => o.into(),
        Err(e) => {
            eprintln!("superlog-ckn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
