//! Weights, their Hardy potentials and non-degeneracy data.
//!
//! All maps are evaluated in the logarithmic depth variable `σ = log(η/t) ≥ 0`,
//! so radii far below the `f64` range (`t = η e^{-σ}`) remain addressable.
//! `W(σ) = w(t)/t` is the basic quantity: the potential satisfies
//! `df/dσ = 1/W` (P class) or `df/dσ = -1/W` (Q class), and `H = W·f`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::bail;
use crate::math::{exp, expm1_over, ln, powf};
use crate::quadrature::{integrate_breaks, Tolerance};
use crate::roots::bisect;
use crate::superlog::{poly_exp, poly_log, SuperLog};
use crate::{Error, Result};

/// Integrability class of `1/w` at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightClass {
    /// `1/w` is not integrable near 0.
    P,
    /// `1/w` is integrable near 0.
    Q,
}

/// A weight sampled on `(0, η]`, interpolated log-log linearly, extended by a
/// power law below the smallest sample and by a constant above the largest.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedWeight {
    // Depths σ_i (ascending) and log w at those depths.
    sigma: Vec<f64>,
    ln_w: Vec<f64>,
    // Slope of log W = log(w/t) in σ on [σ_i, σ_{i+1}], plus the extrapolation slope.
    kappa: Vec<f64>,
    class_override: Option<WeightClass>,
}

/// The weight families.
#[derive(Debug, Clone)]
pub enum Family {
    /// `w(t) = t Π_{j<k} log^j(Rη/t) · (log^k(Rη/t))^α`.
    PolyLog {
        /// Depth `k ≥ 1`.
        k: u32,
        /// Exponent `α`.
        alpha: f64,
        /// Scale `R`.
        r_big: f64,
    },
    /// `w(t) = t B⁰(η/t) Π_{j<k} A¹_j(η/t) · A¹_k(η/t)^α`.
    SuperLog {
        /// Depth `k ≥ 0`.
        k: u32,
        /// Exponent `α`.
        alpha: f64,
        /// Shared super-log evaluator (carries `a`).
        eval: Arc<SuperLog>,
    },
    /// Sampled weight.
    Tabulated(TabulatedWeight),
}

/// A weight on `(0, ∞)`, constant for `t ≥ η`, with an optional override of
/// the constant `μ` in the P-class potential.
#[derive(Debug, Clone)]
pub struct WeightSpec {
    family: Family,
    eta: f64,
    mu: Option<f64>,
}

/// Hardy potential data derived from a weight.
#[derive(Debug, Clone)]
pub struct HardyPotential {
    /// The weight.
    pub weight: WeightSpec,
    /// Its class.
    pub class: WeightClass,
    /// `μ = f_η(η)` for P-class weights.
    pub mu: Option<f64>,
    /// Right end of the admissible `ρ` interval.
    pub rho_max: f64,
    /// Lower bound for `inf H` (analytic for the closed-form families).
    pub c0_lower: f64,
}

/// Non-degeneracy diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NdcReport {
    /// Minimum of `H` on the supplied grid.
    pub grid_inf_h: f64,
    /// Analytic lower bound for `inf H` (the grid value for tabulated weights).
    pub analytic_bound: f64,
    /// `analytic_bound > 0` and `grid_inf_h > 0`.
    pub satisfied: bool,
    /// `inf H ≥ 1`.
    pub ge_one: bool,
    /// The bound is numerical evidence only.
    pub numerical_only: bool,
}

/// Sign data for the monotonicity hypotheses of the sharpness argument.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    /// `β = (n-p)/(p-1)`.
    pub beta: f64,
    /// `A = p'(n-1)`.
    pub a_coef: f64,
    /// `B = (1-α)(1+q/p')`.
    pub b_coef: f64,
    /// `C = 1+q/p'`.
    pub c_coef: f64,
    /// Smallest `a` (super-log) or `R` (poly-log) for which `v` is decreasing.
    pub v_threshold: f64,
    /// Smallest `a` or `R` for which the sign function of `g` is negative.
    pub g_threshold: f64,
    /// The weight's own `a` or `R`.
    pub parameter: f64,
    /// `parameter ≥ max(v_threshold, g_threshold)`.
    pub thresholds_hold: bool,
    /// Maximum of `t g'(t)/g(t)` on the sample grid.
    pub g_log_slope_max: f64,
    /// Maximum of the finite-difference slope of `log v` in `log t`.
    pub v_log_slope_max: f64,
    /// Maximum deviation between the analytic sign function and finite differences of `log g`.
    pub fd_mismatch: f64,
    /// All sampled slopes are non-positive.
    pub sampled_ok: bool,
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_nan() || sigma < 0.0 {
        bail!(Domain, "depth σ = log(η/t) must be >= 0, got {sigma:e}");
    }
    if sigma.is_infinite() {
        bail!(Overflow, "infinite depth");
    }
    Ok(())
}

impl TabulatedWeight {
    /// Samples `(t_i, w_i)` with `0 < t_1 < ... < t_m ≤ η`, `w_i > 0`.
    pub fn new(t: &[f64], w: &[f64], eta: f64, class_override: Option<WeightClass>) -> Result<Self> {
        if t.is_empty() || t.len() != w.len() {
            bail!(InvalidInput, "tabulated weight needs matching non-empty samples");
        }
        if !(eta > 0.0 && eta.is_finite()) {
            bail!(Domain, "η must be positive, got {eta:e}");
        }
        for i in 0..t.len() {
            if !(t[i] > 0.0 && t[i] <= eta * (1.0 + 1e-15)) {
                bail!(Domain, "sample t = {:e} outside (0, η]", t[i]);
            }
            if i > 0 && t[i] <= t[i - 1] {
                bail!(InvalidInput, "sample radii must be strictly increasing");
            }
            if !(w[i] > 0.0 && w[i].is_finite()) {
                bail!(Domain, "weight samples must be positive, got {:e}", w[i]);
            }
        }
        let sigma: Vec<f64> = t.iter().rev().map(|&ti| ln(eta / ti).max(0.0)).collect();
        let ln_w: Vec<f64> = w.iter().rev().map(|&wi| ln(wi)).collect();
        let mut kappa = Vec::with_capacity(sigma.len());
        for i in 0..sigma.len() - 1 {
            kappa.push(1.0 + (ln_w[i + 1] - ln_w[i]) / (sigma[i + 1] - sigma[i]));
        }
        let last = kappa.last().copied().unwrap_or(1.0);
        kappa.push(last);
        Ok(TabulatedWeight { sigma, ln_w, kappa, class_override })
    }

    /// Samples a closure at the given radii.
    pub fn from_fn<F: Fn(f64) -> f64>(
        t: &[f64],
        w: F,
        eta: f64,
        class_override: Option<WeightClass>,
    ) -> Result<Self> {
        let ws: Vec<f64> = t.iter().map(|&x| w(x)).collect();
        Self::new(t, &ws, eta, class_override)
    }

    /// `log W(σ) - log η`-free form: returns `(log W(σ) + log η, segment)`.
    fn ln_w_eta(&self, sigma: f64) -> (f64, usize) {
        let s0 = self.sigma[0];
        if sigma <= s0 {
            return (self.ln_w[0] + sigma, usize::MAX);
        }
        let i = match self.sigma.binary_search_by(|s| s.partial_cmp(&sigma).unwrap()) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let ln_w = self.ln_w[i] + (self.kappa[i] - 1.0) * (sigma - self.sigma[i]);
        (ln_w + sigma, i)
    }

    /// Exponent `e` of the power law `w ~ t^e` near 0.
    pub fn tail_exponent(&self) -> f64 {
        1.0 - *self.kappa.last().unwrap()
    }
}

impl WeightSpec {
    /// Poly-log weight; requires `log^k R > 1` (`log^{k+1} R > 1` when `α = 1`).
    pub fn poly_log(k: u32, alpha: f64, r_big: f64, eta: f64) -> Result<Self> {
        check_eta(eta)?;
        if k == 0 {
            bail!(Domain, "poly-log weights need k >= 1");
        }
        if !alpha.is_finite() {
            bail!(Domain, "α must be finite");
        }
        let depth = if alpha == 1.0 { k + 1 } else { k };
        match poly_log(depth, r_big) {
            Ok(v) if v > 1.0 => {}
            _ => bail!(Domain, "R = {r_big:e} must exceed exp^{}(1)", depth),
        }
        Ok(WeightSpec { family: Family::PolyLog { k, alpha, r_big }, eta, mu: None })
    }

    /// Super-log weight; requires `a > max(1, |α-1|^{1/(k+1)})`.
    pub fn super_log(k: u32, alpha: f64, eval: Arc<SuperLog>, eta: f64) -> Result<Self> {
        check_eta(eta)?;
        if !alpha.is_finite() {
            bail!(Domain, "α must be finite");
        }
        let a = eval.a();
        let floor = powf((alpha - 1.0).abs(), 1.0 / (k as f64 + 1.0));
        if a <= floor {
            bail!(Domain, "a = {a} must exceed |α-1|^(1/(k+1)) = {floor}");
        }
        Ok(WeightSpec { family: Family::SuperLog { k, alpha, eval }, eta, mu: None })
    }

    /// Super-log weight with a fresh evaluator at base `a`.
    pub fn super_log_base(k: u32, alpha: f64, a: f64, eta: f64) -> Result<Self> {
        Self::super_log(k, alpha, Arc::new(SuperLog::with_base(a)?), eta)
    }

    /// Tabulated weight; `mu` is required for P-class potentials.
    pub fn tabulated(tab: TabulatedWeight, eta: f64, mu: Option<f64>) -> Result<Self> {
        check_eta(eta)?;
        if let Some(m) = mu {
            check_mu(m)?;
        }
        Ok(WeightSpec { family: Family::Tabulated(tab), eta, mu })
    }

    /// Replaces `μ`; the potential shifts by the difference.
    pub fn with_mu(mut self, mu: f64) -> Result<Self> {
        check_mu(mu)?;
        self.mu = Some(mu);
        Ok(self)
    }

    /// The family.
    pub fn family(&self) -> &Family {
        &self.family
    }

    /// The length scale `η`.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `(k, α)` for the closed-form families.
    pub fn k_alpha(&self) -> Option<(u32, f64)> {
        match &self.family {
            Family::PolyLog { k, alpha, .. } | Family::SuperLog { k, alpha, .. } => Some((*k, *alpha)),
            Family::Tabulated(_) => None,
        }
    }

    /// Short human-readable description.
    pub fn describe(&self) -> alloc::string::String {
        match &self.family {
            Family::PolyLog { k, alpha, r_big } => {
                format!("poly-log(k={k}, alpha={alpha}, R={r_big}, eta={})", self.eta)
            }
            Family::SuperLog { k, alpha, eval } => {
                format!("super-log(k={k}, alpha={alpha}, a={}, eta={})", eval.a(), self.eta)
            }
            Family::Tabulated(t) => format!("tabulated({} samples, eta={})", t.sigma.len(), self.eta),
        }
    }

    /// P or Q.
    pub fn classify(&self) -> Result<WeightClass> {
        match &self.family {
            Family::PolyLog { alpha, .. } | Family::SuperLog { alpha, .. } => {
                Ok(if *alpha <= 1.0 { WeightClass::P } else { WeightClass::Q })
            }
            Family::Tabulated(tab) => match tab.class_override {
                Some(c) => Ok(c),
                None => self.classify_dyadic(tab),
            },
        }
    }

    // Integrals of 1/w over dyadic intervals [t·2^{-j-1}, t·2^{-j}] below the
    // smallest sample, i.e. unit steps of log 2 in σ.
    fn classify_dyadic(&self, tab: &TabulatedWeight) -> Result<WeightClass> {
        let base = *tab.sigma.last().unwrap();
        let step = core::f64::consts::LN_2;
        let piece = |j: usize| -> Result<f64> {
            let lo = base + j as f64 * step;
            let r = integrate_breaks(
                |s| Ok(exp(-self.ln_w_sigma(s)?)),
                &[lo, lo + step],
                Tolerance::rel(1e-12),
            )?;
            Ok(r.value)
        };
        let first = piece(0)?;
        let mut prev = first;
        let mut total = first;
        let mut ratio = 1.0;
        for j in 1..=60 {
            let cur = piece(j)?;
            total += cur;
            ratio = cur / prev;
            prev = cur;
            if total > 1e12 * first {
                return Ok(WeightClass::P);
            }
        }
        if ratio >= 1.0 - 1e-9 {
            Ok(WeightClass::P)
        } else if ratio <= 1.0 - 1e-3 {
            Ok(WeightClass::Q)
        } else {
            Err(Error::Indeterminate(format!("dyadic ratio {ratio} too close to 1")))
        }
    }

    /// Canonical `μ` of the closed-form families (P class only).
    pub fn canonical_mu(&self) -> Option<f64> {
        match &self.family {
            Family::PolyLog { k, alpha, r_big } => {
                let lk = poly_log(*k, *r_big).ok()?;
                if *alpha < 1.0 {
                    Some(powf(lk, 1.0 - alpha) / (1.0 - alpha))
                } else if *alpha == 1.0 {
                    Some(ln(lk))
                } else {
                    None
                }
            }
            Family::SuperLog { alpha, eval, .. } => {
                let a = eval.a();
                if *alpha < 1.0 {
                    Some(powf(a, 1.0 - alpha) / (1.0 - alpha))
                } else if *alpha == 1.0 {
                    Some(a)
                } else {
                    None
                }
            }
            Family::Tabulated(_) => None,
        }
    }

    /// `μ` in effect (override, else canonical); `None` for Q-class weights.
    pub fn mu(&self) -> Result<Option<f64>> {
        if self.classify()? == WeightClass::Q {
            return Ok(None);
        }
        match (self.mu, self.canonical_mu()) {
            (Some(m), _) | (None, Some(m)) => Ok(Some(m)),
            (None, None) => bail!(InvalidInput, "P-class tabulated weight needs an explicit μ"),
        }
    }

    // Shift between the μ in effect and the canonical one.
    fn mu_shift(&self) -> f64 {
        match (self.mu, self.canonical_mu()) {
            (Some(m), Some(c)) => m - c,
            _ => 0.0,
        }
    }

    /// `log W(σ)` with `W = w/t`.
    pub fn ln_w_sigma(&self, sigma: f64) -> Result<f64> {
        check_sigma(sigma)?;
        match &self.family {
            Family::PolyLog { k, alpha, r_big } => {
                let l = poly_levels(*k as usize, ln(*r_big) + sigma);
                let mut s = 0.0;
                for lj in &l[..*k as usize - 1] {
                    s += ln(*lj);
                }
                Ok(s + alpha * ln(l[*k as usize - 1]))
            }
            Family::SuperLog { k, alpha, eval } => {
                let lv = eval.levels_ln(*k as usize, sigma)?;
                let k = *k as usize;
                let mut s = ln(lv.b0.value);
                for aj in &lv.a1[..k] {
                    s += ln(*aj);
                }
                Ok(s + alpha * ln(lv.a1[k]))
            }
            Family::Tabulated(tab) => Ok(tab.ln_w_eta(sigma).0 - ln(self.eta)),
        }
    }

    /// `W(σ) = w(t)/t` at `t = η e^{-σ}`.
    pub fn w_over_t(&self, sigma: f64) -> Result<f64> {
        Ok(exp(self.ln_w_sigma(sigma)?))
    }

    /// `w(t)` for `t > 0`, constant for `t ≥ η`.
    pub fn w(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            bail!(Domain, "w needs t > 0, got {t:e}");
        }
        let tt = t.min(self.eta);
        Ok(tt * self.w_over_t(ln(self.eta / tt).max(0.0))?)
    }

    fn sigma_of(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= self.eta * (1.0 + 1e-15)) {
            bail!(Domain, "t = {t:e} outside (0, η]");
        }
        Ok(ln(self.eta / t).max(0.0))
    }

    /// Closed-form `f_η` at depth `σ` (with the canonical-μ shift applied).
    pub fn f_closed_sigma(&self, sigma: f64) -> Result<f64> {
        check_sigma(sigma)?;
        let base = match &self.family {
            Family::PolyLog { k, alpha, r_big } => {
                let k = *k as usize;
                let l = poly_levels(k + 1, ln(*r_big) + sigma);
                closed_from_levels(*alpha, l[k - 1], l[k])
            }
            Family::SuperLog { k, alpha, eval } => {
                let lv = eval.levels_ln(*k as usize + 1, sigma)?;
                closed_from_levels(*alpha, lv.a1[*k as usize], lv.a1[*k as usize + 1])
            }
            Family::Tabulated(_) => bail!(Unsupported, "no closed form for tabulated weights"),
        };
        Ok(base + self.mu_shift())
    }

    /// `f_η` at depth `σ`: closed form for the families, exact piecewise
    /// integration for tabulated weights.
    pub fn f_sigma(&self, sigma: f64) -> Result<f64> {
        match &self.family {
            Family::Tabulated(tab) => self.f_tabulated(tab, sigma),
            _ => self.f_closed_sigma(sigma),
        }
    }

    fn f_tabulated(&self, tab: &TabulatedWeight, sigma: f64) -> Result<f64> {
        check_sigma(sigma)?;
        let ln_eta = ln(self.eta);
        // ∫ over [σa, σb] of e^{-log W} with log W linear (slope κ) from lw_a.
        let seg = |lw_a: f64, kappa: f64, len: f64| exp(-lw_a) * expm1_over(-kappa, len);
        let s = &tab.sigma;
        match self.classify()? {
            WeightClass::P => {
                let mu = self.mu()?.unwrap();
                let mut acc = mu;
                let mut cur = 0.0;
                // Constant-w stretch above the largest sample.
                let top = s[0].min(sigma);
                if top > 0.0 {
                    acc += seg(tab.ln_w[0] - ln_eta, 1.0, top);
                    cur = top;
                }
                for i in 0..s.len() {
                    if cur >= sigma {
                        break;
                    }
                    let start = cur.max(s[i]);
                    let end = if i + 1 < s.len() { s[i + 1].min(sigma) } else { sigma };
                    if end > start {
                        let lw = tab.ln_w_eta(start).0 - ln_eta;
                        acc += seg(lw, tab.kappa[i], end - start);
                        cur = end;
                    }
                }
                Ok(acc)
            }
            WeightClass::Q => {
                let kl = *tab.kappa.last().unwrap();
                if kl <= 0.0 {
                    bail!(Divergence, "1/w is not integrable at 0 for the extrapolated tail");
                }
                let last = *s.last().unwrap();
                let start = sigma.max(last);
                let lw = tab.ln_w_eta(start).0 - ln_eta;
                let mut acc = exp(-lw) / kl;
                let mut cur = start;
                for i in (0..s.len()).rev() {
                    if cur <= sigma {
                        break;
                    }
                    let lo = s[i].max(sigma);
                    if i + 1 < s.len() && lo < cur {
                        let lw = tab.ln_w_eta(lo).0 - ln_eta;
                        acc += seg(lw, tab.kappa[i], cur - lo);
                        cur = lo;
                    }
                }
                if cur > sigma {
                    let lw = tab.ln_w[0] - ln_eta + sigma;
                    acc += seg(lw, 1.0, cur - sigma);
                }
                Ok(acc)
            }
        }
    }

    /// Closed-form `f_η(t)` (closed-form families only).
    pub fn f_eta_closed(&self, t: f64) -> Result<f64> {
        self.f_closed_sigma(self.sigma_of(t)?)
    }

    /// `f_η(t)`.
    pub fn f_eta(&self, t: f64) -> Result<f64> {
        self.f_sigma(self.sigma_of(t)?)
    }

    /// `f_η` by direct adaptive quadrature of `1/w`.
    ///
    /// Q-class closed-form families are integrated up to an anchor depth
    /// `σ_A = 2σ + 64` and completed with the closed form at the anchor;
    /// tabulated Q weights use their exact power-law tail.
    pub fn f_quad_sigma(&self, sigma: f64) -> Result<f64> {
        check_sigma(sigma)?;
        let inv_w = |s: f64| Ok(exp(-self.ln_w_sigma(s)?));
        let tol = Tolerance { abs: 1e-300, rel: 1e-13, max_panels: 20000 };
        match self.classify()? {
            WeightClass::P => {
                let mu = self.mu()?.unwrap();
                Ok(mu + integrate_breaks(inv_w, &depth_breaks(0.0, sigma), tol)?.value)
            }
            WeightClass::Q => {
                let (anchor, tail) = match &self.family {
                    Family::Tabulated(tab) => {
                        let anchor = sigma.max(*tab.sigma.last().unwrap());
                        let kl = *tab.kappa.last().unwrap();
                        if kl <= 0.0 {
                            bail!(Divergence, "1/w is not integrable at 0");
                        }
                        (anchor, exp(-self.ln_w_sigma(anchor)?) / kl)
                    }
                    _ => {
                        let anchor = 2.0 * sigma + 64.0;
                        (anchor, self.f_closed_sigma(anchor)?)
                    }
                };
                Ok(tail + integrate_breaks(inv_w, &depth_breaks(sigma, anchor), tol)?.value)
            }
        }
    }

    /// [`f_quad_sigma`](Self::f_quad_sigma) at radius `t`.
    pub fn f_eta_quad(&self, t: f64) -> Result<f64> {
        self.f_quad_sigma(self.sigma_of(t)?)
    }

    fn require_p(&self) -> Result<f64> {
        match self.classify()? {
            WeightClass::P => Ok(self.mu()?.unwrap()),
            WeightClass::Q => bail!(Class, "G_η is defined for P-class weights only"),
        }
    }

    /// `G_η = μ - log μ + log f_η` at depth `σ`.
    pub fn g_sigma(&self, sigma: f64) -> Result<f64> {
        let mu = self.require_p()?;
        Ok(mu - ln(mu) + ln(self.f_sigma(sigma)?))
    }

    /// `G_η(t)`.
    pub fn g_eta(&self, t: f64) -> Result<f64> {
        self.g_sigma(self.sigma_of(t)?)
    }

    /// `G_η = μ + ∫_t^η 1/(w f_η)` by quadrature.
    pub fn g_quad_sigma(&self, sigma: f64) -> Result<f64> {
        let mu = self.require_p()?;
        let integrand = |s: f64| Ok(exp(-self.ln_w_sigma(s)?) / self.f_sigma(s)?);
        let tol = Tolerance { abs: 1e-300, rel: 1e-13, max_panels: 20000 };
        Ok(mu + integrate_breaks(integrand, &depth_breaks(0.0, sigma), tol)?.value)
    }

    /// `H = W·f_η` at depth `σ`.
    pub fn h_sigma(&self, sigma: f64) -> Result<f64> {
        Ok(self.w_over_t(sigma)? * self.f_sigma(sigma)?)
    }

    /// Product formula for `H` (closed-form families with canonical `μ`).
    pub fn h_product_sigma(&self, sigma: f64) -> Result<f64> {
        check_sigma(sigma)?;
        if self.mu_shift() != 0.0 {
            bail!(Unsupported, "product formula assumes the canonical μ");
        }
        match &self.family {
            Family::PolyLog { k, alpha, r_big } => {
                let k = *k as usize;
                let l = poly_levels(k + 1, ln(*r_big) + sigma);
                let p: f64 = l[..k].iter().product();
                Ok(if *alpha == 1.0 { p * l[k] } else { p / (1.0 - alpha).abs() })
            }
            Family::SuperLog { k, alpha, eval } => {
                let k = *k as usize;
                let lv = eval.levels_ln(k + 1, sigma)?;
                let p: f64 = lv.b0.value * lv.a1[..=k].iter().product::<f64>();
                Ok(if *alpha == 1.0 { p * lv.a1[k + 1] } else { p / (1.0 - alpha).abs() })
            }
            Family::Tabulated(_) => bail!(Unsupported, "no product formula for tabulated weights"),
        }
    }

    /// Analytic lower bound for `inf H` (value of `H` at `t = η`).
    pub fn ndc_analytic_bound(&self) -> Result<Option<f64>> {
        if self.mu_shift() < 0.0 {
            return Ok(None);
        }
        match &self.family {
            Family::PolyLog { k, alpha, r_big } => {
                let depth = if *alpha == 1.0 { k + 1 } else { *k };
                let mut p = 1.0;
                for j in 1..=depth {
                    p *= poly_log(j, *r_big)?;
                }
                Ok(Some(if *alpha == 1.0 { p } else { p / (1.0 - alpha).abs() }))
            }
            Family::SuperLog { k, alpha, eval } => {
                let a = eval.a();
                Ok(Some(if *alpha == 1.0 {
                    powf(a, *k as f64 + 2.0)
                } else {
                    powf(a, *k as f64 + 1.0) / (1.0 - alpha).abs()
                }))
            }
            Family::Tabulated(_) => Ok(None),
        }
    }

    /// Right end of the admissible `ρ` interval: `1/μ` (P) or `f_η(η)` (Q).
    pub fn rho_max(&self) -> Result<f64> {
        match self.classify()? {
            WeightClass::P => Ok(1.0 / self.mu()?.unwrap()),
            WeightClass::Q => self.f_sigma(0.0),
        }
    }

    /// Depth `σ` of `t = φ(ρ)`.
    pub fn rho_map_sigma(&self, rho: f64) -> Result<f64> {
        let rho_max = self.rho_max()?;
        if !(rho > 0.0 && rho <= rho_max * (1.0 + 1e-12)) {
            bail!(OutOfRange, "ρ = {rho:e} outside (0, {rho_max:e}]");
        }
        let class = self.classify()?;
        let target = match class {
            WeightClass::P => 1.0 / rho,
            WeightClass::Q => rho,
        };
        if rho >= rho_max {
            return Ok(0.0);
        }
        if let Some(s) = self.poly_log_inverse(target)? {
            return Ok(s);
        }
        // g(σ) > 0 beyond the root, < 0 before it.
        let g = |s: f64| -> Result<f64> {
            let f = self.f_sigma(s)?;
            Ok(match class {
                WeightClass::P => f - target,
                WeightClass::Q => target - f,
            })
        };
        let mut hi = 1.0;
        while g(hi)? < 0.0 {
            hi *= 2.0;
            if hi > 1e300 {
                bail!(OutOfRange, "ρ = {rho:e} maps below every representable depth");
            }
        }
        bisect(g, 0.0, hi, 1e-13, 1e-15)
    }

    // Closed-form inversion for poly-log weights.
    fn poly_log_inverse(&self, target: f64) -> Result<Option<f64>> {
        let Family::PolyLog { k, alpha, r_big } = &self.family else {
            return Ok(None);
        };
        let f = target - self.mu_shift();
        let lk = if *alpha < 1.0 {
            powf((1.0 - alpha) * f, 1.0 / (1.0 - alpha))
        } else if *alpha == 1.0 {
            exp(f)
        } else {
            powf((alpha - 1.0) * f, -1.0 / (alpha - 1.0))
        };
        match poly_exp(*k - 1, lk) {
            Ok(l1) if l1.is_finite() => Ok(Some((l1 - ln(*r_big)).max(0.0))),
            _ => bail!(OutOfRange, "depth for f = {target:e} exceeds f64"),
        }
    }

    /// `t = φ(ρ)` (may underflow to 0; see [`rho_map_sigma`](Self::rho_map_sigma)).
    pub fn rho_map(&self, rho: f64) -> Result<f64> {
        Ok(self.eta * exp(-self.rho_map_sigma(rho)?))
    }

    /// `H(ρ) = w(φ(ρ)) f_η(φ(ρ)) / φ(ρ)`.
    pub fn h_of(&self, rho: f64) -> Result<f64> {
        self.h_sigma(self.rho_map_sigma(rho)?)
    }

    /// `ρ` values for depths `σ` (`1/f` for P, `f` for Q).
    pub fn rho_grid_from_depths(&self, sigmas: &[f64]) -> Result<Vec<f64>> {
        let class = self.classify()?;
        sigmas
            .iter()
            .map(|&s| {
                let f = self.f_sigma(s)?;
                Ok(match class {
                    WeightClass::P => 1.0 / f,
                    WeightClass::Q => f,
                })
            })
            .collect()
    }

    /// Non-degeneracy report on a `ρ` grid.
    pub fn ndc_check(&self, rho_grid: &[f64]) -> Result<NdcReport> {
        let mut inf = f64::INFINITY;
        for &rho in rho_grid {
            inf = inf.min(self.h_of(rho)?);
        }
        let (bound, numerical_only) = match self.ndc_analytic_bound()? {
            Some(b) => (b, false),
            None => (inf, true),
        };
        Ok(NdcReport {
            grid_inf_h: inf,
            analytic_bound: bound,
            satisfied: bound > 0.0 && inf > 0.0,
            ge_one: bound >= 1.0,
            numerical_only,
        })
    }

    /// Hardy potential data.
    pub fn potential(&self) -> Result<HardyPotential> {
        let class = self.classify()?;
        let mu = self.mu()?;
        let c0_lower = match self.ndc_analytic_bound()? {
            Some(b) => b,
            None => self.h_sigma(0.0)?,
        };
        Ok(HardyPotential { weight: self.clone(), class, mu, rho_max: self.rho_max()?, c0_lower })
    }

    /// Sign function `t g'(t)/g(t)` for `g = t^β / W`.
    pub fn g_log_slope(&self, beta: f64, sigma: f64) -> Result<f64> {
        check_sigma(sigma)?;
        match &self.family {
            Family::PolyLog { k, alpha, r_big } => {
                let k = *k as usize;
                let l = poly_levels(k, ln(*r_big) + sigma);
                let mut s = beta;
                let mut prod = 1.0;
                for (j, lj) in l.iter().enumerate() {
                    prod *= lj;
                    s += if j + 1 < k { 1.0 / prod } else { alpha / prod };
                }
                Ok(s)
            }
            Family::SuperLog { k, alpha, eval } => {
                let k = *k as usize;
                let a = eval.a();
                let lv = eval.levels_ln(k, sigma)?;
                let mut s = beta;
                // Σ_m 1/Π_{j≤m} A⁰_j from the derivative of log B⁰.
                let mut d = sigma;
                let mut prod = 1.0;
                for _ in 0..4096 {
                    prod *= a + d;
                    let term = 1.0 / prod;
                    s += term;
                    if term / (a - 1.0) <= 1e-17 {
                        break;
                    }
                    d = crate::math::ln1p(d / a);
                }
                let mut prod = lv.b0.value;
                for j in 0..=k {
                    prod *= lv.a1[j];
                    s += if j < k { 1.0 / prod } else { alpha / prod };
                }
                Ok(s)
            }
            Family::Tabulated(_) => bail!(Unsupported, "monotonicity probe needs a closed-form family"),
        }
    }

    /// Checks the decreasing-`g` and decreasing-`v` hypotheses for `(n, p, q)`.
    pub fn monotonicity_probe(&self, n: u32, p: f64, q: f64) -> Result<MonotonicityReport> {
        if !(p > 1.0 && q >= p) {
            bail!(Domain, "needs 1 < p <= q, got p = {p}, q = {q}");
        }
        if (n as f64) >= p {
            bail!(Hypothesis, "needs n < p, got n = {n}, p = {p}");
        }
        let (k, alpha) = match self.k_alpha() {
            Some(ka) => ka,
            None => bail!(Unsupported, "monotonicity probe needs a closed-form family"),
        };
        if alpha > 1.0 {
            bail!(Hypothesis, "needs α <= 1, got {alpha}");
        }
        let pp = p / (p - 1.0);
        let beta = (n as f64 - p) / (p - 1.0);
        let a_coef = pp * (n as f64 - 1.0);
        let c_coef = 1.0 + q / pp;
        let b_coef = (1.0 - alpha) * c_coef;
        let need = if alpha == 1.0 { c_coef / a_coef } else { b_coef / a_coef };
        let ap = alpha.max(0.0);
        let (v_threshold, g_threshold, parameter) = match &self.family {
            Family::SuperLog { eval, .. } => {
                let kk = k as f64;
                let v = if a_coef == 0.0 {
                    f64::INFINITY
                } else if alpha == 1.0 {
                    powf(need, 1.0 / (kk + 2.0)).max(1.0)
                } else {
                    powf(need, 1.0 / (kk + 1.0)).max(1.0)
                };
                let sign_at = |a: f64| {
                    beta + 1.0 / (a - 1.0) + (1.0 - powf(a, -kk)) / (a - 1.0) + ap * powf(a, -kk - 1.0)
                };
                let g = threshold_search(|x| sign_at(x), 1.0 + 1e-9, 1e12);
                (v, g, eval.a())
            }
            Family::PolyLog { r_big, .. } => {
                let depth = if alpha == 1.0 { k + 1 } else { k };
                let prod_at = |lr: f64, m: u32| {
                    let mut x = lr;
                    let mut p = 1.0;
                    for _ in 0..m {
                        p *= x;
                        x = ln(x);
                    }
                    p
                };
                let lo = poly_exp(depth.saturating_sub(1), 1.0).unwrap_or(f64::INFINITY) * (1.0 + 1e-12);
                let v = if a_coef == 0.0 {
                    f64::INFINITY
                } else {
                    exp(threshold_search(|lr| need - prod_at(lr, depth), lo, 1e300))
                };
                let sign_at = |lr: f64| {
                    let mut s = beta;
                    let mut x = lr;
                    let mut p = 1.0;
                    for j in 0..k {
                        p *= x;
                        x = ln(x);
                        s += if j + 1 < k { 1.0 / p } else { ap / p };
                    }
                    s
                };
                let lo_g = poly_exp(k.saturating_sub(1), 1.0).unwrap_or(f64::INFINITY) * (1.0 + 1e-12);
                let g = exp(threshold_search(sign_at, lo_g, 1e300));
                (v, g, *r_big)
            }
            Family::Tabulated(_) => unreachable!(),
        };
        // Sampled confirmation on 1000 depths covering t ∈ [1e-12 η, η].
        let m = 1000;
        let smax = 12.0 * core::f64::consts::LN_10;
        let mut g_max = f64::NEG_INFINITY;
        let mut v_max = f64::NEG_INFINITY;
        let mut mismatch: f64 = 0.0;
        let ln_v = |s: f64| -> Result<f64> {
            // log v = -A log t - C log f, up to constants; log t = log η - σ.
            Ok(a_coef * s - c_coef * ln(self.f_sigma(s)?))
        };
        let ln_g = |s: f64| -> Result<f64> { Ok(-beta * s - self.ln_w_sigma(s)?) };
        let h = 1e-4;
        for i in 0..m {
            let s = smax * i as f64 / (m - 1) as f64 + h;
            let gs = self.g_log_slope(beta, s)?;
            g_max = g_max.max(gs);
            // d/d log t = -d/dσ.
            let fd_g = -(ln_g(s + h)? - ln_g(s - h)?) / (2.0 * h);
            mismatch = mismatch.max((fd_g - gs).abs());
            let fd_v = -(ln_v(s + h)? - ln_v(s - h)?) / (2.0 * h);
            v_max = v_max.max(fd_v);
        }
        let thresholds_hold = parameter >= v_threshold && parameter >= g_threshold;
        Ok(MonotonicityReport {
            beta,
            a_coef,
            b_coef,
            c_coef,
            v_threshold,
            g_threshold,
            parameter,
            thresholds_hold,
            g_log_slope_max: g_max,
            v_log_slope_max: v_max,
            fd_mismatch: mismatch,
            sampled_ok: g_max <= 0.0 && v_max <= 1e-9,
        })
    }
}

impl HardyPotential {
    /// `f_η(t)`.
    pub fn f_eta(&self, t: f64) -> Result<f64> {
        self.weight.f_eta(t)
    }
    /// `G_η(t)`.
    pub fn g_eta(&self, t: f64) -> Result<f64> {
        self.weight.g_eta(t)
    }
    /// `φ(ρ)`.
    pub fn rho_map(&self, rho: f64) -> Result<f64> {
        self.weight.rho_map(rho)
    }
    /// `H(ρ)`.
    pub fn h(&self, rho: f64) -> Result<f64> {
        self.weight.h_of(rho)
    }
}

// Smallest x in [lo, hi] with f(x) ≤ 0, assuming f decreasing; `hi` if none.
fn threshold_search<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    if f(lo) <= 0.0 {
        return lo;
    }
    if f(hi) > 0.0 {
        return f64::INFINITY;
    }
    bisect(|x| Ok(f(x)), lo, hi, 0.0, 1e-14).unwrap_or(f64::INFINITY)
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta.is_finite()) {
        bail!(Domain, "η must be positive and finite, got {eta:e}");
    }
    Ok(())
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu.is_finite()) {
        bail!(Domain, "μ must be positive, got {mu:e}");
    }
    Ok(())
}

/// `L_1 = l1`, `L_{j+1} = log L_j`, returned for `j = 1..=m`.
fn poly_levels(m: usize, l1: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(m);
    let mut x = l1;
    for _ in 0..m {
        out.push(x);
        x = ln(x);
    }
    out
}

// Closed form of f from the level at depth k and k+1.
fn closed_from_levels(alpha: f64, lk: f64, lk1: f64) -> f64 {
    if alpha < 1.0 {
        powf(lk, 1.0 - alpha) / (1.0 - alpha)
    } else if alpha == 1.0 {
        lk1
    } else {
        powf(lk, 1.0 - alpha) / (alpha - 1.0)
    }
}

// Breakpoints on [lo, hi] at unit, then geometrically growing spacing.
pub(crate) fn depth_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let mut b = alloc::vec![lo];
    let mut x = lo;
    let mut step = 1.0;
    while x + step < hi {
        x += step;
        b.push(x);
        step = (step * 1.25).max(0.25 * x);
    }
    if hi > lo {
        b.push(hi);
    }
    b
}

/// `γ_{p,q} = (n-1)/(1+q/p')`.
pub fn gamma_pq(n: u32, p: f64, q: f64) -> Result<f64> {
    check_pq(p, q)?;
    let pp = p / (p - 1.0);
    Ok((n as f64 - 1.0) / (1.0 + q / pp))
}

/// `0 ≤ 1/p - 1/q ≤ 1/n`.
pub fn admissible_exponents(n: u32, p: f64, q: f64) -> Result<bool> {
    check_pq(p, q)?;
    if n == 0 {
        bail!(Domain, "dimension must be >= 1");
    }
    let s = 1.0 / p - 1.0 / q;
    Ok(s >= -1e-15 && s <= 1.0 / n as f64 + 1e-15)
}

/// `p ≤ (n+1)/2`, sufficient for `1/p' ≤ γ_{p,q}`.
pub fn lemma_sufficiency(n: u32, p: f64) -> Result<bool> {
    if !(p > 1.0) {
        bail!(Domain, "needs p > 1, got {p}");
    }
    Ok(p <= (n as f64 + 1.0) / 2.0)
}

fn check_pq(p: f64, q: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        bail!(Domain, "needs 1 < p < inf, got {p}");
    }
    if !(q >= p * (1.0 - 1e-12) && q.is_finite()) {
        bail!(Domain, "needs p <= q < inf, got q = {q}");
    }
    Ok(())
}
