//! Run configuration: TOML file, then command-line overrides.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use superlog_ckn::corpus::CorpusConfig;
use superlog_ckn::{QuotientSpec, SuperLog, SuperLogParams, WeightSpec};

use crate::error::{CliError, CliResult};

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "SUPERLOG_CKN_CONFIG";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub superlog: SuperLogSection,
    pub weight: WeightSection,
    pub quotient: QuotientSection,
    pub corpus: CorpusSection,
    pub search: SearchSection,
    pub tolerance: ToleranceSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuperLogSection {
    pub a: f64,
    pub product_tol: f64,
    pub quad_tol: f64,
    pub max_tower_depth: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    PolyLog,
    SuperLog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightSection {
    pub family: FamilyName,
    pub k: u32,
    pub alpha: f64,
    /// `R` of the poly-log family.
    pub r_big: f64,
    /// Base `a` of the super-log family.
    pub a: f64,
    pub eta: f64,
    /// Override of the potential constant `μ`; the canonical value when absent.
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuotientSection {
    pub n: u32,
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub size: usize,
    pub seed: u64,
    pub support_lo: f64,
    pub support_hi: f64,
    pub max_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSection {
    pub starts: usize,
    pub budget: usize,
    pub seed: u64,
    pub jitter: f64,
    pub step_tol: f64,
    pub delta_ladder: Vec<f64>,
    /// Length of the near-extremal window in `y = log(s/s₀)`.
    pub ladder_span: f64,
    /// Width of the inner cutoff ramp.
    pub ladder_ramp: f64,
    pub ladder_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceSection {
    /// Largest accepted relative gap between closed-form and quadrature potentials.
    pub potential_gap: f64,
    /// A quotient counts as a violation only below `constant - violation_slack`.
    pub violation_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub out: Option<PathBuf>,
    pub jobs: usize,
}

impl Default for SuperLogSection {
    fn default() -> Self {
        let p = SuperLogParams::new(3.0).expect("default base");
        SuperLogSection { a: p.a, product_tol: p.product_tol, quad_tol: p.quad_tol, max_tower_depth: p.max_tower_depth }
    }
}

impl Default for WeightSection {
    fn default() -> Self {
        WeightSection { family: FamilyName::PolyLog, k: 1, alpha: 0.0, r_big: 10.0, a: 3.0, eta: 1.0, mu: None }
    }
}

impl Default for QuotientSection {
    fn default() -> Self {
        QuotientSection { n: 2, p: 2.0, q: 2.0 }
    }
}

impl Default for CorpusSection {
    fn default() -> Self {
        let c = CorpusConfig::default();
        CorpusSection {
            size: c.size,
            seed: c.seed,
            support_lo: c.support_lo,
            support_hi: c.support_hi,
            max_nodes: c.max_nodes,
        }
    }
}

impl Default for SearchSection {
    fn default() -> Self {
        SearchSection {
            starts: 4,
            budget: 120,
            seed: 0,
            jitter: 0.02,
            step_tol: 1e-7,
            delta_ladder: Vec::new(),
            ladder_span: 4000.0,
            ladder_ramp: 100.0,
            ladder_nodes: 8001,
        }
    }
}

impl Default for ToleranceSection {
    fn default() -> Self {
        ToleranceSection { potential_gap: 1e-8, violation_slack: 1e-6 }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { out: None, jobs: 1 }
    }
}

impl RunConfig {
    /// Reads `path`, else the file named by [`CONFIG_ENV`], else the defaults.
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let env = std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
        match path.map(Path::to_path_buf).or(env) {
            Some(p) => {
                let text = std::fs::read_to_string(&p)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
                toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", p.display())))
            }
            None => Ok(RunConfig::default()),
        }
    }

    pub fn superlog_params(&self) -> CliResult<SuperLogParams> {
        let s = &self.superlog;
        Ok(SuperLogParams::with_tolerances(s.a, s.product_tol, s.quad_tol, s.max_tower_depth)?)
    }

    /// The configured weight; super-log weights take their tolerances from `[superlog]`.
    pub fn weight(&self) -> CliResult<WeightSpec> {
        let w = &self.weight;
        let spec = match w.family {
            FamilyName::PolyLog => WeightSpec::poly_log(w.k, w.alpha, w.r_big, w.eta)?,
            FamilyName::SuperLog => {
                let s = &self.superlog;
                let params = SuperLogParams::with_tolerances(w.a, s.product_tol, s.quad_tol, s.max_tower_depth)?;
                WeightSpec::super_log(w.k, w.alpha, Arc::new(SuperLog::new(params)?), w.eta)?
            }
        };
        Ok(match w.mu {
            Some(mu) => spec.with_mu(mu)?,
            None => spec,
        })
    }

    /// The explicit (poly-log or super-log form) quotient for the configured weight.
    pub fn explicit_spec(&self) -> CliResult<QuotientSpec> {
        let q = &self.quotient;
        Ok(QuotientSpec::explicit(q.n, q.p, q.q, self.weight()?)?)
    }

    pub fn corpus(&self) -> CliResult<CorpusConfig> {
        let c = &self.corpus;
        if c.size == 0 {
            return Err(CliError::Usage("corpus is empty (size = 0)".into()));
        }
        Ok(CorpusConfig {
            size: c.size,
            seed: c.seed,
            support_lo: c.support_lo,
            support_hi: c.support_hi,
            max_nodes: c.max_nodes,
        })
    }

    /// A pool of `output.jobs` worker threads.
    pub fn pool(&self) -> CliResult<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.output.jobs.max(1))
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
