//! Seeded test-function corpus.
//!
//! Entry `i` is drawn from its own ChaCha8 stream `(seed, i)`, so any subset can
//! be regenerated independently and in parallel with identical results.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::bail;
use crate::math::{exp, ln, powf};
use crate::rearrangement::RadialProfile;
use crate::weight::WeightSpec;
use crate::Result;

/// Corpus parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusConfig {
    /// Number of functions.
    pub size: usize,
    /// Seed.
    pub seed: u64,
    /// Support lower bound as a fraction of `η`.
    pub support_lo: f64,
    /// Support upper bound as a fraction of `η`.
    pub support_hi: f64,
    /// Largest node count of a profile (at least 6).
    pub max_nodes: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { size: 200, seed: 0x5eed, support_lo: 1e-6, support_hi: 0.9, max_nodes: 48 }
    }
}

/// Shape family of a corpus entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Polynomial bump `(1 - z²)^m` in log radius.
    Bump,
    /// Tent, linear in log radius.
    Tent,
    /// `f_η^δ` times polynomial cutoffs.
    PotentialPower,
    /// Random signed node values.
    RandomPiecewise,
}

impl Kind {
    /// Lower-case name.
    pub fn name(self) -> &'static str {
        match self {
            Kind::Bump => "bump",
            Kind::Tent => "tent",
            Kind::PotentialPower => "potential-power",
            Kind::RandomPiecewise => "random-pl",
        }
    }
}

/// One corpus function.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    /// Position in the corpus.
    pub index: usize,
    /// Shape family.
    pub kind: Kind,
    /// The profile (zero at and below its first node, zero at its last).
    pub profile: RadialProfile,
}

struct Draw(ChaCha8Rng);

impl Draw {
    fn new(seed: u64, index: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        Draw(rng)
    }
    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }
    fn int(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.0.next_u64() % (hi - lo + 1) as u64) as usize
    }
}

fn smoothstep(z: f64) -> f64 {
    let z = z.clamp(0.0, 1.0);
    z * z * z * (10.0 - 15.0 * z + 6.0 * z * z)
}

/// The corpus for a weight (its `f_η` drives [`Kind::PotentialPower`]; without a
/// weight `log(eη/t)` is used) at scale `eta`.
pub fn generate(cfg: &CorpusConfig, eta: f64, weight: Option<&WeightSpec>) -> Result<Vec<CorpusEntry>> {
    (0..cfg.size).map(|i| entry(cfg, eta, weight, i)).collect()
}

/// Entry `index` of the corpus.
pub fn entry(cfg: &CorpusConfig, eta: f64, weight: Option<&WeightSpec>, index: usize) -> Result<CorpusEntry> {
    if !(cfg.support_lo > 0.0 && cfg.support_lo < cfg.support_hi && cfg.support_hi <= 1.0) {
        bail!(Domain, "support fractions must satisfy 0 < lo < hi <= 1");
    }
    if !(eta > 0.0 && eta.is_finite()) {
        bail!(Domain, "η must be positive and finite");
    }
    if cfg.max_nodes < 6 {
        bail!(Domain, "profiles need at least 6 nodes");
    }
    let mut d = Draw::new(cfg.seed, index);
    let kind = [Kind::Bump, Kind::Tent, Kind::PotentialPower, Kind::RandomPiecewise][index % 4];
    let (x_lo, x_hi) = (ln(cfg.support_lo * eta), ln(cfg.support_hi * eta));
    // Support [a, b] with width at least a quarter of the window (and at least 1).
    let width_min = (0.25 * (x_hi - x_lo)).max(1.0).min(x_hi - x_lo);
    let width = d.range(width_min, x_hi - x_lo);
    let a = d.range(x_lo, x_hi - width);
    let nodes = d.int(6, cfg.max_nodes);
    let xs: Vec<f64> = (0..nodes).map(|i| a + width * i as f64 / (nodes - 1) as f64).collect();
    let z = |x: f64| (x - a) / width;
    let amp = d.range(0.5, 2.0);
    let mut vs: Vec<f64> = match kind {
        Kind::Bump => {
            let m = d.int(1, 4) as i32;
            xs.iter().map(|&x| amp * powf(1.0 - (2.0 * z(x) - 1.0) * (2.0 * z(x) - 1.0), m as f64)).collect()
        }
        Kind::Tent => {
            let peak = d.range(0.1, 0.9);
            xs.iter().map(|&x| amp * if z(x) <= peak { z(x) / peak } else { (1.0 - z(x)) / (1.0 - peak) }).collect()
        }
        Kind::PotentialPower => {
            let delta = d.range(0.05, 0.45);
            let (r_in, r_out) = (d.range(0.05, 0.4), d.range(0.05, 0.4));
            let mut out = Vec::with_capacity(nodes);
            for &x in &xs {
                let f = match weight {
                    Some(w) => w.f_eta(exp(x).min(w.eta()))?,
                    None => 1.0 + ln(eta) - x,
                };
                let cut = smoothstep(z(x) / r_in) * smoothstep((1.0 - z(x)) / r_out);
                out.push(amp * powf(f.abs(), delta) * cut);
            }
            out
        }
        Kind::RandomPiecewise => xs.iter().map(|_| amp * d.range(-1.0, 1.0)).collect(),
    };
    vs[0] = 0.0;
    *vs.last_mut().unwrap() = 0.0;
    if vs.iter().all(|&v| v == 0.0) {
        vs[nodes / 2] = amp;
    }
    Ok(CorpusEntry { index, kind, profile: RadialProfile::from_log_radii(xs, vs)? })
}

/// Copy of `u` with every interior node value multiplied by `1 + ε·ξ_i`,
/// `ξ_i` uniform in `[-1, 1]` from stream `(seed, index)`.
pub fn perturb(u: &RadialProfile, eps: f64, seed: u64, index: usize) -> Result<RadialProfile> {
    let mut d = Draw::new(seed ^ 0x9e37_79b9_7f4a_7c15, index);
    let mut vs = u.values().to_vec();
    let n = vs.len();
    for v in &mut vs[..n - 1] {
        *v *= 1.0 + eps * d.range(-1.0, 1.0);
    }
    RadialProfile::from_log_radii(u.log_radii().to_vec(), vs)
}
