//! Best-constant estimation.
//!
//! Two search paths share one derivative-free coordinate search:
//!
//! * the radial grid path varies the node values of a [`RadialProfile`] on a
//!   fixed log grid and evaluates the quotient with a [`PreparedGrid`];
//! * the potential path works in `y = log(s/s₀)`, `s = f_η(t)`, where the
//!   general quotient becomes weight independent:
//!   `∫|du/ds|^p ds / (∫|u|^q s^{-c} ds)^{p/q}`. With `u = e^{y/p'} v` this is
//!   `∫|v' + v/p'|^p dy / (∫|v|^q dy)^{p/q}`, translation invariant and exactly
//!   integrable for piecewise-linear `v`.
//!
//! Estimates are quotients of admissible profiles, hence upper bounds on the
//! infimum; sharpness evidence comes from [`near_extremal`].

use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::perturb;
use crate::error::bail;
use crate::functionals::{quotient, PreparedGrid, QuotientSpec, Variant};
use crate::math::{exp, ln, powf, sin};
use crate::quadrature::gk21;
use crate::rearrangement::RadialProfile;
use crate::roots::bisect;
use crate::weight::{gamma_pq, lemma_sufficiency, WeightClass, WeightSpec};
use crate::{Error, Result};

/// Search controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    /// Maximum number of sweeps over all free nodes.
    pub max_sweeps: usize,
    /// Stop once every relative step is below this.
    pub step_tol: f64,
    /// Restrict to monotone profiles (non-increasing in `r`).
    pub project: bool,
    /// Seed of the initial jitter.
    pub seed: u64,
    /// Relative jitter applied to the initial profile (0 disables).
    pub jitter: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_sweeps: 400, step_tol: 1e-7, project: true, seed: 0, jitter: 0.0 }
    }
}

/// How an estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Coordinate search over node values of a radial profile.
    RadialGrid,
    /// Coordinate search in the potential variable.
    PotentialLine,
    /// One-dimensional problem on `(-η, η)` restricted to even profiles.
    EvenLine,
    /// One-dimensional problem on `(-η, η)` without symmetry.
    TwoSidedLine,
}

impl Method {
    /// Name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            Method::RadialGrid => "coordinate-search/radial-grid",
            Method::PotentialLine => "coordinate-search/potential-line",
            Method::EvenLine => "coordinate-search/even-line",
            Method::TwoSidedLine => "coordinate-search/two-sided-line",
        }
    }
}

/// An upper bound on a best constant with its evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct BestConstantEstimate {
    /// Smallest quotient found.
    pub value: f64,
    /// Producing method.
    pub method: Method,
    /// The profile attaining `value`, when it maps to radii representable in `f64`.
    pub minimizer: Option<RadialProfile>,
    /// Potential-path nodes `(y_i, u_i)` (both sides concatenated for two-sided runs).
    pub potential_nodes: Option<(Vec<f64>, Vec<f64>)>,
    /// Quotient after each sweep.
    pub trace: Vec<f64>,
    /// Proven lower bound, when one is known.
    pub lower_reference: Option<f64>,
    /// Steps fell below tolerance before the sweep budget ran out.
    pub converged: bool,
    /// Monotone projection was active.
    pub projected: bool,
    /// Objective evaluations.
    pub evaluations: usize,
}

struct Outcome {
    vals: Vec<f64>,
    value: f64,
    trace: Vec<f64>,
    converged: bool,
    evaluations: usize,
}

// (energy, norm) contributions touching node i when it holds `val`.
type Local<'a> = dyn Fn(&[f64], usize, f64) -> (f64, f64) + 'a;
type Total<'a> = dyn Fn(&[f64]) -> (f64, f64) + 'a;
type Bounds<'a> = dyn Fn(&[f64], usize) -> (f64, f64) + 'a;

fn coordinate_search(
    mut vals: Vec<f64>,
    free: &[usize],
    local: &Local,
    total: &Total,
    bounds: Option<&Bounds>,
    blocks: &[core::ops::Range<usize>],
    ratio: f64,
    q: f64,
    budget: &Budget,
) -> Result<Outcome> {
    let (mut e, mut d) = total(&vals);
    if !(d > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    let mut value = e / powf(d, ratio);
    let mut steps = vec![0.05; vals.len()];
    let mut block_steps = vec![0.25; blocks.len()];
    let mut trace = Vec::with_capacity(budget.max_sweeps);
    let mut evaluations = 1;
    let mut converged = false;
    for _ in 0..budget.max_sweeps {
        let top = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for &i in free {
            let old = vals[i];
            let (le, ld) = local(&vals, i, old);
            let scale = old.abs().max(1e-3 * top);
            let mut moved = false;
            for dir in [1.0, -1.0] {
                let mut cand = old + dir * steps[i] * scale;
                if let Some(b) = bounds {
                    let (lo, hi) = b(&vals, i);
                    cand = cand.clamp(lo, hi.max(lo));
                }
                if cand == old {
                    continue;
                }
                let (ne, nd) = local(&vals, i, cand);
                evaluations += 1;
                let (e2, d2) = (e - le + ne, d - ld + nd);
                if d2 > 0.0 {
                    let q2 = e2 / powf(d2, ratio);
                    if q2 < value * (1.0 - 1e-14) {
                        vals[i] = cand;
                        (e, d, value) = (e2, d2, q2);
                        steps[i] = (steps[i] * 1.5).min(0.5);
                        moved = true;
                        break;
                    }
                }
            }
            if !moved {
                steps[i] *= 0.5;
            }
        }
        // Rescale whole blocks (e.g. one side of a two-sided profile).
        for (b, range) in blocks.iter().enumerate() {
            let mut moved = false;
            for f in [1.0 - block_steps[b], 1.0 + block_steps[b]] {
                let mut trial = vals.clone();
                trial[range.clone()].iter_mut().for_each(|v| *v *= f);
                let (e2, d2) = total(&trial);
                evaluations += 1;
                if d2 > 0.0 && e2 / powf(d2, ratio) < value * (1.0 - 1e-14) {
                    vals = trial;
                    (d, value) = (d2, e2 / powf(d2, ratio));
                    block_steps[b] = (block_steps[b] * 1.5).min(0.9);
                    moved = true;
                    break;
                }
            }
            if !moved {
                block_steps[b] *= 0.5;
            }
        }
        // Normalise the denominator to 1 and refresh the running sums.
        let c = powf(d, -1.0 / q);
        vals.iter_mut().for_each(|v| *v *= c);
        (e, d) = total(&vals);
        evaluations += 1;
        value = e / powf(d, ratio);
        trace.push(value);
        if free.iter().all(|&i| steps[i] < budget.step_tol) {
            converged = true;
            break;
        }
    }
    Ok(Outcome { vals, value, trace, converged, evaluations })
}

/// Minimises the quotient of `spec` over node values on the grid of `init`.
///
/// With `budget.project` the search is restricted to non-negative profiles
/// that are non-increasing in `r`; the initial profile is projected first.
pub fn minimize_quotient(spec: &QuotientSpec, init: &RadialProfile, budget: &Budget) -> Result<BestConstantEstimate> {
    let init = if budget.jitter > 0.0 { perturb(init, budget.jitter, budget.seed, 0)? } else { init.clone() };
    if init.max_abs() == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let grid = PreparedGrid::new(spec, init.log_radii())?;
    let n = init.len();
    let mut vals = init.values().to_vec();
    let q_class = spec.class() == WeightClass::Q && !matches!(spec.variant(), Variant::ClassicCkn { .. });
    // The core ball below the first node only has finite norm for P-class weights.
    let pinned = q_class || matches!(spec.variant(), Variant::ClassicCkn { gamma } if gamma <= 0.0);
    if pinned {
        vals[0] = 0.0;
    }
    if budget.project {
        for v in vals.iter_mut() {
            *v = v.abs();
        }
        for i in (0..n - 1).rev() {
            vals[i] = vals[i].max(vals[i + 1]);
        }
        if q_class {
            // A Q-class profile must vanish near 0, so a monotone one vanishes identically.
            bail!(Domain, "monotone projection is incompatible with Q-class weights; disable it");
        }
    }
    let free: Vec<usize> = (usize::from(pinned)..n - 1).collect();
    let local = |v: &[f64], i: usize, x: f64| {
        let (mut e, mut d) = (0.0, 0.0);
        if i > 0 {
            e += grid.segment_energy(i - 1, v[i - 1], x);
            d += grid.segment_norm(i - 1, v[i - 1], x);
        } else {
            d += grid.core_norm(x);
        }
        if i + 1 < n {
            e += grid.segment_energy(i, x, v[i + 1]);
            d += grid.segment_norm(i, x, v[i + 1]);
        }
        (e, d)
    };
    let total = |v: &[f64]| grid.evaluate(v);
    let bounds = |v: &[f64], i: usize| {
        let lo = if i + 1 < n { v[i + 1].max(0.0) } else { 0.0 };
        let hi = if i > 0 { v[i - 1] } else { f64::INFINITY };
        (lo, hi)
    };
    let out = coordinate_search(
        vals,
        &free,
        &local,
        &total,
        if budget.project { Some(&bounds) } else { None },
        &[],
        spec.p() / spec.q(),
        spec.q(),
        budget,
    )?;
    let minimizer = RadialProfile::from_log_radii(init.log_radii().to_vec(), out.vals)?;
    // Report the directly evaluated quotient of the returned profile.
    let value = quotient(spec, &minimizer)?.quotient;
    Ok(BestConstantEstimate {
        value,
        method: Method::RadialGrid,
        minimizer: Some(minimizer),
        potential_nodes: None,
        trace: out.trace,
        lower_reference: spec.sharp_constant(),
        converged: out.converged,
        projected: budget.project,
        evaluations: out.evaluations,
    })
}

/// Boundary behaviour of a potential-path profile at the far end `y = span`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Constant continuation beyond the last node (P class: `u` constant near `t = 0`).
    ConstantTail,
    /// Zero at both ends.
    Compact,
}

/// Initial shape of a potential-path profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineInit {
    /// `v = sin(π y/span)`, i.e. `u ∝ s^{1/p'}` under a sine envelope.
    Sine,
    /// `v = sech((y - span/2)/width)`.
    Bump {
        /// Width in `y`.
        width: f64,
    },
}

/// Uniform grid of the potential path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineGrid {
    /// Length of the `y` interval.
    pub span: f64,
    /// Number of nodes (at least 3).
    pub nodes: usize,
    /// Far-end behaviour.
    pub boundary: Boundary,
    /// Initial shape.
    pub init: LineInit,
}

impl LineGrid {
    /// Grid suited to the Hardy case `p = q`: a long sine ramp with a constant tail.
    pub fn hardy() -> Self {
        LineGrid { span: 200.0, nodes: 401, boundary: Boundary::ConstantTail, init: LineInit::Sine }
    }

    /// Grid suited to `p < q`: a localised bump, zero at both ends.
    pub fn localized() -> Self {
        LineGrid { span: 30.0, nodes: 241, boundary: Boundary::Compact, init: LineInit::Bump { width: 1.5 } }
    }

    fn ys(&self) -> Result<Vec<f64>> {
        if self.nodes < 3 || !(self.span > 0.0 && self.span.is_finite()) {
            bail!(Domain, "line grid needs >= 3 nodes and a positive span");
        }
        Ok((0..self.nodes).map(|i| self.span * i as f64 / (self.nodes - 1) as f64).collect())
    }

    fn initial(&self, ys: &[f64]) -> Vec<f64> {
        let mut v: Vec<f64> = ys
            .iter()
            .map(|&y| match self.init {
                LineInit::Sine => sin(core::f64::consts::PI * y / self.span),
                LineInit::Bump { width } => 2.0 / (exp((y - 0.5 * self.span) / width) + exp(-(y - 0.5 * self.span) / width)),
            })
            .collect();
        v[0] = 0.0;
        if self.boundary == Boundary::Compact {
            *v.last_mut().unwrap() = 0.0;
        }
        v
    }
}

// ∫_0^1 |g0 + (g1 - g0)λ|^k dλ.
fn mean_power(g0: f64, g1: f64, k: f64) -> f64 {
    let big = g0.abs().max(g1.abs());
    if big == 0.0 {
        return 0.0;
    }
    let dg = g1 - g0;
    if dg.abs() <= 1e-3 * big {
        return gk21(|l| powf((g0 + dg * l).abs(), k), 0.0, 1.0).0;
    }
    let anti = |g: f64| g.signum() * powf(g.abs(), k + 1.0) / (k + 1.0);
    (anti(g1) - anti(g0)) / dg
}

// The line problem in the v variables for one chain of nodes.
struct Line {
    ys: Vec<f64>,
    p: f64,
    q: f64,
    a: f64,
    tail: bool,
}

impl Line {
    fn seg(&self, i: usize, va: f64, vb: f64) -> (f64, f64) {
        let h = self.ys[i + 1] - self.ys[i];
        let m = (vb - va) / h;
        let e = h * mean_power(m + self.a * va, m + self.a * vb, self.p);
        let d = h * mean_power(va, vb, self.q);
        (e, d)
    }
    fn tail_norm(&self, v: f64) -> f64 {
        if self.tail {
            powf(v.abs(), self.q) / (self.q * self.a)
        } else {
            0.0
        }
    }
    fn local(&self, v: &[f64], i: usize, x: f64) -> (f64, f64) {
        let n = self.ys.len();
        let (mut e, mut d) = (0.0, 0.0);
        if i > 0 {
            let (se, sd) = self.seg(i - 1, v[i - 1], x);
            e += se;
            d += sd;
        }
        if i + 1 < n {
            let (se, sd) = self.seg(i, x, v[i + 1]);
            e += se;
            d += sd;
        } else {
            d += self.tail_norm(x);
        }
        (e, d)
    }
    fn total(&self, v: &[f64]) -> (f64, f64) {
        let n = self.ys.len();
        let (mut e, mut d) = (0.0, self.tail_norm(v[n - 1]));
        for i in 0..n - 1 {
            let (se, sd) = self.seg(i, v[i], v[i + 1]);
            e += se;
            d += sd;
        }
        (e, d)
    }
    fn free(&self) -> Vec<usize> {
        let n = self.ys.len();
        (1..if self.tail { n } else { n - 1 }).collect()
    }
    // u = e^{a y} v non-decreasing in y.
    fn bounds(&self, v: &[f64], i: usize) -> (f64, f64) {
        let n = self.ys.len();
        let lo = v[i - 1] * exp(self.a * (self.ys[i - 1] - self.ys[i]));
        let hi = if i + 1 < n { v[i + 1] * exp(self.a * (self.ys[i + 1] - self.ys[i])) } else { f64::INFINITY };
        (lo.max(0.0), hi)
    }
    fn u_values(&self, v: &[f64]) -> Vec<f64> {
        self.ys.iter().zip(v).map(|(&y, &vv)| exp(self.a * y) * vv).collect()
    }
}

fn line_for(p: f64, q: f64, grid: &LineGrid) -> Result<Line> {
    if !(p > 1.0 && q >= p * (1.0 - 1e-12)) {
        bail!(Domain, "needs 1 < p <= q");
    }
    let pp = p / (p - 1.0);
    Ok(Line { ys: grid.ys()?, p, q, a: 1.0 / pp, tail: grid.boundary == Boundary::ConstantTail })
}

/// Minimises the general quotient of `spec` in the potential variable.
///
/// The search runs on the weight-independent line problem; the result is
/// scaled by `ω^{1-p/q}` (and by `|α-1|^{p-1+p/q}` for the explicit forms with
/// `α ≠ 1`). The minimiser is mapped back to radii when the inverse of `f_η`
/// is representable.
pub fn minimize_potential(spec: &QuotientSpec, grid: &LineGrid, budget: &Budget) -> Result<BestConstantEstimate> {
    let factor = explicit_factor(spec)?;
    if spec.class() == WeightClass::Q && grid.boundary == Boundary::ConstantTail {
        bail!(Domain, "Q-class profiles vanish near the origin; use a compact line grid");
    }
    let line = line_for(spec.p(), spec.q(), grid)?;
    let project = budget.project && grid.boundary == Boundary::ConstantTail;
    let out = run_line(&line, grid, budget, project)?;
    let scale = factor * powf(spec.omega(), 1.0 - spec.p() / spec.q());
    let u = line.u_values(&out.vals);
    let minimizer = map_to_radii(spec.weight(), spec.class(), &line.ys, &u).ok();
    Ok(BestConstantEstimate {
        value: scale * out.value,
        method: Method::PotentialLine,
        minimizer,
        potential_nodes: Some((line.ys.clone(), u)),
        trace: out.trace.iter().map(|t| scale * t).collect(),
        lower_reference: spec.sharp_constant(),
        converged: out.converged,
        projected: project,
        evaluations: out.evaluations,
    })
}

// `|α-1|^{p-1+p/q}` for explicit forms with `α ≠ 1`, else 1.
fn explicit_factor(spec: &QuotientSpec) -> Result<f64> {
    Ok(match spec.variant() {
        Variant::ClassicCkn { .. } => bail!(Unsupported, "the potential path needs a weight potential"),
        Variant::General | Variant::CriticalCkn { .. } | Variant::HardyRemainder => 1.0,
        Variant::PolyLog | Variant::SuperLog => {
            let w = spec.weight();
            if let (Some(m), Some(c)) = (w.mu()?, w.canonical_mu()) {
                if m != c {
                    bail!(Unsupported, "explicit forms need the canonical μ on the potential path");
                }
            }
            match w.k_alpha() {
                Some((_, alpha)) if alpha != 1.0 => powf((alpha - 1.0).abs(), spec.p() - 1.0 + spec.p() / spec.q()),
                _ => 1.0,
            }
        }
    })
}

fn run_line(line: &Line, grid: &LineGrid, budget: &Budget, project: bool) -> Result<Outcome> {
    let mut v = grid.initial(&line.ys);
    if budget.jitter > 0.0 {
        let prof = RadialProfile::from_log_radii(line.ys.clone(), {
            let mut w = v.clone();
            *w.last_mut().unwrap() = 0.0;
            w
        })?;
        let j = perturb(&prof, budget.jitter, budget.seed, 0)?;
        let last = *v.last().unwrap();
        v = j.values().to_vec();
        *v.last_mut().unwrap() = last;
    }
    if project {
        let u = line.u_values(&v);
        let mut run = 0.0f64;
        for (i, ui) in u.iter().enumerate() {
            run = run.max(ui.abs());
            v[i] = run * exp(-line.a * line.ys[i]);
        }
        v[0] = 0.0;
    }
    let local = |vv: &[f64], i: usize, x: f64| line.local(vv, i, x);
    let total = |vv: &[f64]| line.total(vv);
    let bounds = |vv: &[f64], i: usize| line.bounds(vv, i);
    coordinate_search(
        v,
        &line.free(),
        &local,
        &total,
        if project { Some(&bounds) } else { None },
        &[],
        line.p / line.q,
        line.q,
        budget,
    )
}

/// Depth `σ` with `f_η(σ) = s` (bisection; `f_η` is monotone in `σ`).
pub fn sigma_for_potential(weight: &WeightSpec, s: f64) -> Result<f64> {
    let f0 = weight.f_sigma(0.0)?;
    let increasing = weight.classify()? == WeightClass::P;
    if (increasing && s < f0) || (!increasing && s > f0) {
        bail!(OutOfRange, "potential value {s:e} outside the range of f_η");
    }
    if s == f0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    loop {
        let f = weight.f_sigma(hi)?;
        if (increasing && f >= s) || (!increasing && f <= s) {
            break;
        }
        hi *= 2.0;
        if hi > 1e300 {
            bail!(Overflow, "potential value {s:e} needs a depth beyond f64");
        }
    }
    bisect(|x| Ok(weight.f_sigma(x)? - s), 0.0, hi, 0.0, 4.0 * f64::EPSILON)
}

// Maps potential-path nodes (y = log(s/s₀)) to a radial profile.
fn map_to_radii(weight: &WeightSpec, class: WeightClass, ys: &[f64], u: &[f64]) -> Result<RadialProfile> {
    let ln_eta = ln(weight.eta());
    let span = *ys.last().unwrap();
    let (s0, y_ref) = match class {
        // s = μ e^{y}; y grows towards t = 0.
        WeightClass::P => (weight.f_sigma(0.0)?, 0.0),
        // s = f(η) e^{y - span}; y grows towards t = η.
        WeightClass::Q => (weight.f_sigma(0.0)?, span),
    };
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(ys.len());
    for (&y, &uv) in ys.iter().zip(u) {
        let sigma = sigma_for_potential(weight, s0 * exp(y - y_ref))?;
        pts.push((ln_eta - sigma, uv));
    }
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pts.dedup_by(|a, b| a.0 == b.0);
    let (x, mut v): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    *v.last_mut().unwrap() = 0.0;
    RadialProfile::from_log_radii(x, v)
}

/// The one-dimensional problem on `(-η, η)` for `n = 1`:
/// `∫|u'|^p w^{p-1} / (∫|u|^q/(w f^c))^{p/q}` over profiles vanishing near `0`
/// and `±η`, either even (`symmetric`) or with independent sides.
///
/// The unconstrained run starts from an asymmetric pair (`u₋ = u₊/2`).
pub fn two_sided(p: f64, q: f64, grid: &LineGrid, budget: &Budget, symmetric: bool) -> Result<BestConstantEstimate> {
    let grid = LineGrid { boundary: Boundary::Compact, ..*grid };
    let line = line_for(p, q, &grid)?;
    let n = line.ys.len();
    let ratio = p / q;
    if symmetric {
        let out = run_line(&line, &grid, budget, false)?;
        let scale = powf(2.0, 1.0 - ratio);
        let u = line.u_values(&out.vals);
        return Ok(BestConstantEstimate {
            value: scale * out.value,
            method: Method::EvenLine,
            minimizer: None,
            potential_nodes: Some((line.ys.clone(), u)),
            trace: out.trace.iter().map(|t| scale * t).collect(),
            lower_reference: None,
            converged: out.converged,
            projected: false,
            evaluations: out.evaluations,
        });
    }
    let half = grid.initial(&line.ys);
    let mut v = half.clone();
    v.extend(half.iter().map(|x| 0.5 * x));
    let side = |i: usize| if i < n { (0, i) } else { (n, i - n) };
    let local = |vv: &[f64], i: usize, x: f64| {
        let (off, j) = side(i);
        line.local(&vv[off..off + n], j, x)
    };
    let total = |vv: &[f64]| {
        let (e1, d1) = line.total(&vv[..n]);
        let (e2, d2) = line.total(&vv[n..]);
        (e1 + e2, d1 + d2)
    };
    let mut free = line.free();
    free.extend(line.free().iter().map(|i| i + n));
    let out = coordinate_search(v, &free, &local, &total, None, &[0..n, n..2 * n], ratio, q, budget)?;
    let mut ys = line.ys.clone();
    ys.extend(line.ys.iter().map(|y| -y));
    let mut u = line.u_values(&out.vals[..n]);
    u.extend(line.u_values(&out.vals[n..]));
    Ok(BestConstantEstimate {
        value: out.value,
        method: Method::TwoSidedLine,
        minimizer: None,
        potential_nodes: Some((ys, u)),
        trace: out.trace,
        lower_reference: None,
        converged: out.converged,
        projected: false,
        evaluations: out.evaluations,
    })
}

/// `f_η^δ` with polynomial cutoffs, sampled on `nodes` points uniform in
/// `ξ = log(f_η/μ)`.
///
/// The outer cutoff rises from 0 at `t = η` to 1 at `ξ = ε_out`; the inner one
/// falls from 1 at `ξ_in/2` to 0 at `ξ_in = log(f_η(ε_in)/μ)`, so the profile
/// vanishes on `(0, ε_in]`. Without cutoffs the energy and norm integrands
/// coincide up to `δ^p`.
pub fn near_extremal(spec: &QuotientSpec, delta: f64, cutoff: (f64, f64), nodes: usize) -> Result<RadialProfile> {
    let p = spec.p();
    if (p - spec.q()).abs() > 1e-12 * p {
        bail!(Domain, "near-extremal family needs p = q");
    }
    if spec.class() != WeightClass::P {
        bail!(Class, "near-extremal family needs a P-class weight");
    }
    if !(delta > 0.0 && delta < 1.0 / spec.p_conj()) {
        bail!(Domain, "δ = {delta} outside (0, 1/p')");
    }
    let (eps_in, eps_out) = cutoff;
    let w = spec.weight();
    let eta = w.eta();
    if !(eps_in > 0.0 && eps_in < eta && eps_out > 0.0) {
        bail!(Domain, "cutoffs need 0 < ε_in < η and ε_out > 0");
    }
    if nodes < 8 {
        bail!(Domain, "near-extremal profile needs at least 8 nodes");
    }
    let mu = w.f_sigma(0.0)?;
    let sigma_in = ln(eta / eps_in);
    let xi_in = ln(w.f_sigma(sigma_in)? / mu);
    if !(eps_out < xi_in) {
        bail!(Domain, "outer cutoff ε_out = {eps_out} must be below ξ_in = {xi_in}");
    }
    let step = |z: f64| {
        let z = z.clamp(0.0, 1.0);
        z * z * z * (10.0 - 15.0 * z + 6.0 * z * z)
    };
    let ln_eta = ln(eta);
    let mut x = Vec::with_capacity(nodes);
    let mut v = Vec::with_capacity(nodes);
    for i in (0..nodes).rev() {
        let xi = xi_in * i as f64 / (nodes - 1) as f64;
        let sigma = if i == 0 {
            0.0
        } else if i == nodes - 1 {
            sigma_in
        } else {
            bisect(|s| Ok(ln(w.f_sigma(s)? / mu) - xi), 0.0, sigma_in, 0.0, 4.0 * f64::EPSILON)?
        };
        let cut = step(xi / eps_out) * step((xi_in - xi) / (0.5 * xi_in));
        x.push(ln_eta - sigma);
        v.push(powf(mu * exp(xi), delta) * cut);
    }
    *v.last_mut().unwrap() = 0.0;
    RadialProfile::from_log_radii(x, v)
}

/// Quotient of the near-extremal profile `u = f_η^δ` evaluated in the potential
/// variable `y = log(f_η/μ)`, where the family needs a long `y` range that maps
/// to radii far below `f64`.
///
/// The profile is `e^{δy}` (up to the constant `μ^δ`) on `[0, span]` times a
/// smoothstep rising over `[0, ramp]` and falling over `[span/2, span]`,
/// sampled on `nodes` uniform points.
pub fn near_extremal_line(spec: &QuotientSpec, delta: f64, span: f64, ramp: f64, nodes: usize) -> Result<f64> {
    let p = spec.p();
    if (p - spec.q()).abs() > 1e-12 * p {
        bail!(Domain, "near-extremal family needs p = q");
    }
    if spec.class() != WeightClass::P {
        bail!(Class, "near-extremal family needs a P-class weight");
    }
    if !(delta > 0.0 && delta < 1.0 / spec.p_conj()) {
        bail!(Domain, "δ = {delta} outside (0, 1/p')");
    }
    if !(ramp > 0.0 && ramp < 0.5 * span) {
        bail!(Domain, "ramp must lie in (0, span/2)");
    }
    let grid = LineGrid { span, nodes, boundary: Boundary::Compact, init: LineInit::Sine };
    let line = line_for(p, p, &grid)?;
    let step = |z: f64| {
        let z = z.clamp(0.0, 1.0);
        z * z * z * (10.0 - 15.0 * z + 6.0 * z * z)
    };
    let v: Vec<f64> = line
        .ys
        .iter()
        .map(|&y| exp((delta - line.a) * y) * step(y / ramp) * step((span - y) / (0.5 * span)))
        .collect();
    let (e, d) = line.total(&v);
    if !(d > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok(explicit_factor(spec)? * e / d)
}

/// Hypotheses of the constant relations for a dimension and exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisReport {
    /// `γ_{p,q} = (n-1)/(1+q/p')`.
    pub gamma: f64,
    /// `1/p'`.
    pub inv_p_conj: f64,
    /// `1/p' ≤ γ_{p,q}`.
    pub exponent_condition: bool,
    /// `p ≤ (n+1)/2` (sufficient for the exponent condition).
    pub lemma_sufficient: bool,
    /// `C₀ ≥ 1` for the supplied weight (`None` without a weight or bound).
    pub c0_at_least_one: Option<bool>,
    /// Both hypotheses hold.
    pub applicable: Option<bool>,
}

/// Hypothesis check for `(n, p, q)` and an optional weight.
pub fn hypothesis_report(n: u32, p: f64, q: f64, weight: Option<&WeightSpec>) -> Result<HypothesisReport> {
    let gamma = gamma_pq(n, p, q)?;
    let inv = 1.0 - 1.0 / p;
    let exponent_condition = inv <= gamma + 1e-12;
    let c0 = match weight {
        Some(w) => w.ndc_analytic_bound()?.map(|b| b >= 1.0),
        None => None,
    };
    Ok(HypothesisReport {
        gamma,
        inv_p_conj: inv,
        exponent_condition,
        lemma_sufficient: lemma_sufficiency(n, p)?,
        c0_at_least_one: c0,
        applicable: c0.map(|c| c && exponent_condition),
    })
}

/// Comparison of the unconstrained and even one-dimensional constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationReport {
    /// `2^{p/q-1}`.
    pub factor: f64,
    /// Unconstrained estimate over even estimate.
    pub ratio: f64,
    /// `|ratio/factor - 1|`.
    pub relative_gap: f64,
    /// `relative_gap ≤ tolerance`.
    pub consistent: bool,
    /// Hypotheses for the supplied dimension.
    pub hypotheses: HypothesisReport,
}

/// Checks `C₁ ≈ 2^{p/q-1} C₁_rad` from an unconstrained estimate `c1` and an
/// even one `c1_rad`, and reports the hypotheses for dimension `n`.
pub fn constant_relations(
    n: u32,
    p: f64,
    q: f64,
    c1: Option<f64>,
    c1_rad: Option<f64>,
    tolerance: f64,
    weight: Option<&WeightSpec>,
) -> Result<RelationReport> {
    let (Some(c1), Some(rad)) = (c1, c1_rad) else {
        bail!(InvalidInput, "both the unconstrained and the even estimate are required");
    };
    if !(c1 > 0.0 && rad > 0.0) {
        bail!(Domain, "estimates must be positive");
    }
    let factor = powf(2.0, p / q - 1.0);
    let ratio = c1 / rad;
    let relative_gap = (ratio / factor - 1.0).abs();
    Ok(RelationReport {
        factor,
        ratio,
        relative_gap,
        consistent: relative_gap <= tolerance,
        hypotheses: hypothesis_report(n, p, q, weight)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hardy_spec(p: f64) -> QuotientSpec {
        QuotientSpec::general(1, p, p, WeightSpec::poly_log(1, 0.0, 10.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn mean_power_matches_quadrature() {
        for (g0, g1, k) in [(0.3, 1.7, 2.5), (-1.0, 2.0, 3.0), (1.0, 1.0 + 1e-6, 2.0), (0.0, 0.0, 2.0)] {
            let direct = gk21(|l: f64| powf((g0 + (g1 - g0) * l).abs(), k), 0.0, 1.0).0;
            let split = if g0 * g1 < 0.0 {
                let z = g0 / (g0 - g1);
                gk21(|l: f64| powf((g0 + (g1 - g0) * l).abs(), k), 0.0, z).0
                    + gk21(|l: f64| powf((g0 + (g1 - g0) * l).abs(), k), z, 1.0).0
            } else {
                direct
            };
            assert!((mean_power(g0, g1, k) - split).abs() < 1e-12 * split.max(1e-300), "{g0} {g1}");
        }
    }

    #[test]
    fn potential_path_approaches_hardy_constant() {
        let spec = hardy_spec(2.0);
        let est = minimize_potential(&spec, &LineGrid::hardy(), &Budget { max_sweeps: 60, ..Budget::default() }).unwrap();
        assert!(est.value >= 0.25 - 1e-9 && est.value <= 0.25 * 1.02, "{}", est.value);
        assert!(est.trace.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        // Profile evaluated by the radial path agrees with the line value.
        let m = est.minimizer.as_ref().unwrap();
        let direct = quotient(&spec, m).unwrap().quotient;
        assert!((direct - est.value).abs() < 0.01 * est.value, "{direct} {}", est.value);
    }

    #[test]
    fn radial_grid_path_and_determinism() {
        let spec = hardy_spec(2.0);
        let init = near_extremal(&spec, 0.45, (1e-12, 0.5), 80).unwrap();
        let b = Budget { max_sweeps: 30, ..Budget::default() };
        let e1 = minimize_quotient(&spec, &init, &b).unwrap();
        let e2 = minimize_quotient(&spec, &init, &b).unwrap();
        assert_eq!(e1.trace, e2.trace);
        let q0 = quotient(&spec, &init).unwrap().quotient;
        assert!(e1.value <= q0 * (1.0 + 1e-9) && e1.value >= 0.25 - 1e-6, "{} {q0}", e1.value);
        assert!(e1.minimizer.as_ref().unwrap().is_non_increasing());
    }

    #[test]
    fn near_extremal_is_bounded_below_by_hardy() {
        let spec = hardy_spec(2.0);
        for d in [0.1, 0.3, 0.45] {
            let u = near_extremal(&spec, d, (1e-8, 0.5), 200).unwrap();
            let v = quotient(&spec, &u).unwrap().quotient;
            assert!(v >= 0.25 - 1e-6, "δ={d}: {v}");
        }
        assert!(near_extremal(&spec, 0.6, (1e-8, 0.5), 100).is_err());
        let q3 = QuotientSpec::general(1, 2.0, 3.0, WeightSpec::poly_log(1, 0.0, 10.0, 1.0).unwrap()).unwrap();
        assert!(near_extremal(&q3, 0.3, (1e-8, 0.5), 100).is_err());
    }

    #[test]
    fn near_extremal_line_tracks_hardy() {
        let spec = hardy_spec(2.0);
        let q = near_extremal_line(&spec, 0.49, 4000.0, 100.0, 8001).unwrap();
        assert!(q >= 0.25 - 1e-9 && q < 0.2521, "{q}");
        let far = near_extremal_line(&spec, 0.3, 4000.0, 100.0, 8001).unwrap();
        assert!(far > q);
        assert!(near_extremal_line(&spec, 0.5, 100.0, 10.0, 101).is_err());
        // Same cutoffs on both paths; only the interpolation variable differs.
        let w = spec.weight();
        let xi_in = ln(w.f_sigma(ln(1e12)).unwrap() / w.f_sigma(0.0).unwrap());
        let t_path = quotient(&spec, &near_extremal(&spec, 0.4, (1e-12, 0.5), 4001).unwrap()).unwrap().quotient;
        let y_path = near_extremal_line(&spec, 0.4, xi_in, 0.5, 4001).unwrap();
        assert!((t_path / y_path - 1.0).abs() < 1e-4, "{t_path} {y_path}");
    }

    #[test]
    fn two_sided_relation() {
        let b = Budget { max_sweeps: 150, ..Budget::default() };
        let g = LineGrid::localized();
        let even = two_sided(2.0, 4.0, &g, &b, true).unwrap();
        let free = two_sided(2.0, 4.0, &g, &b, false).unwrap();
        let r = constant_relations(1, 2.0, 4.0, Some(free.value), Some(even.value), 0.05, None).unwrap();
        assert!(r.consistent, "{r:?}");
        let same = constant_relations(1, 2.0, 2.0, Some(1.0), Some(1.0), 1e-12, None).unwrap();
        assert_eq!(same.factor, 1.0);
        assert!(constant_relations(1, 2.0, 4.0, None, Some(1.0), 0.05, None).is_err());
    }

    #[test]
    fn hypotheses_for_three_dimensions() {
        let h = hypothesis_report(3, 2.0, 2.0, None).unwrap();
        assert!(h.exponent_condition && (h.gamma - 1.0).abs() < 1e-15 && h.lemma_sufficient);
        let w = WeightSpec::super_log_base(0, 1.0, 3.0, 1.0).unwrap();
        let h = hypothesis_report(3, 2.0, 2.0, Some(&w)).unwrap();
        assert_eq!(h.applicable, Some(true));
    }
}
