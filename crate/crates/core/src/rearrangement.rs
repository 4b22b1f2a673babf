//! Weighted radial rearrangement of piecewise-linear radial profiles.
//!
//! Profiles are linear in `x = log r` between nodes, constant below the first
//! node and zero from the last node on. Densities are piecewise power laws (or
//! linear where a sample vanishes), so ball measures, distribution functions and
//! their inverses are computed in closed form.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::bail;
use crate::math::{exp, expm1, ln, powf, unit_sphere_measure};
use crate::quadrature::{integrate_breaks, Tolerance};
use crate::roots::bisect;
use crate::{Error, Result};

/// A radial profile, piecewise linear in `log r`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    ln_r: Vec<f64>,
    values: Vec<f64>,
}

impl RadialProfile {
    /// Profile through `(r_i, u_i)`; radii strictly increasing and positive,
    /// last value zero.
    pub fn new(radii: &[f64], values: &[f64]) -> Result<Self> {
        if radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            bail!(Domain, "profile radii must be positive and finite");
        }
        Self::from_log_radii(radii.iter().map(|&r| ln(r)).collect(), values.to_vec())
    }

    /// Profile through `(log r_i, u_i)`.
    pub fn from_log_radii(ln_r: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if ln_r.len() < 2 || ln_r.len() != values.len() {
            bail!(InvalidInput, "profile needs at least two nodes and matching values");
        }
        if ln_r.windows(2).any(|w| !(w[1] > w[0])) || ln_r.iter().any(|x| !x.is_finite()) {
            bail!(InvalidInput, "profile radii must be strictly increasing");
        }
        if values.iter().any(|v| !v.is_finite()) {
            bail!(InvalidInput, "profile values must be finite");
        }
        if *values.last().unwrap() != 0.0 {
            bail!(Support, "profile must vanish at its last node");
        }
        Ok(RadialProfile { ln_r, values })
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.ln_r.len()
    }

    /// Always false (profiles have at least two nodes).
    pub fn is_empty(&self) -> bool {
        false
    }

    /// `log r_i`.
    pub fn log_radii(&self) -> &[f64] {
        &self.ln_r
    }

    /// `r_i`.
    pub fn radii(&self) -> Vec<f64> {
        self.ln_r.iter().map(|&x| exp(x)).collect()
    }

    /// `u_i`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest radius beyond which the profile vanishes.
    pub fn support_radius(&self) -> f64 {
        let mut i = self.values.len() - 1;
        while i > 0 && self.values[i - 1] == 0.0 {
            i -= 1;
        }
        exp(self.ln_r[i])
    }

    /// `max |u|`.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Value at `log r`.
    pub fn value_at_ln(&self, x: f64) -> f64 {
        let n = self.ln_r.len();
        if x <= self.ln_r[0] {
            return self.values[0];
        }
        if x >= self.ln_r[n - 1] {
            return 0.0;
        }
        let i = self.ln_r.partition_point(|&y| y <= x) - 1;
        self.interpolate(i, x)
    }

    // value_at_ln starting the segment search at `hint` (quadrature visits
    // points mostly left to right).
    fn value_at_ln_near(&self, x: f64, hint: &mut usize) -> f64 {
        let n = self.ln_r.len();
        if x <= self.ln_r[0] {
            return self.values[0];
        }
        if x >= self.ln_r[n - 1] {
            return 0.0;
        }
        let h = *hint;
        if !(h + 1 < n && self.ln_r[h] <= x && x < self.ln_r[h + 1]) {
            *hint = self.ln_r.partition_point(|&y| y <= x) - 1;
        }
        self.interpolate(*hint, x)
    }

    fn interpolate(&self, i: usize, x: f64) -> f64 {
        let (x0, x1) = (self.ln_r[i], self.ln_r[i + 1]);
        let w = (x - x0) / (x1 - x0);
        self.values[i] + w * (self.values[i + 1] - self.values[i])
    }

    /// Value at radius `r > 0`.
    pub fn value_at(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return self.values[0];
        }
        self.value_at_ln(ln(r))
    }

    /// `du/dr` at the nodes: one-sided at the ends, centred (in `log r`) inside.
    pub fn derivative_samples(&self) -> Vec<f64> {
        let n = self.len();
        let slope = |i: usize| (self.values[i + 1] - self.values[i]) / (self.ln_r[i + 1] - self.ln_r[i]);
        (0..n)
            .map(|i| {
                let s = if i == 0 {
                    slope(0)
                } else if i == n - 1 {
                    slope(n - 2)
                } else {
                    0.5 * (slope(i - 1) + slope(i))
                };
                s / exp(self.ln_r[i])
            })
            .collect()
    }

    /// Values mapped through `f` on the same nodes (last value forced to 0).
    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        let mut values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        *values.last_mut().unwrap() = 0.0;
        RadialProfile { ln_r: self.ln_r.clone(), values }
    }

    /// Scaled copy.
    pub fn scaled(&self, c: f64) -> Self {
        self.map_values(|v| c * v)
    }

    /// Non-increasing in `r` (in absolute value) and non-negative.
    pub fn is_non_increasing(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0) && self.values.windows(2).all(|w| w[1] <= w[0])
    }

    // Intervals in x where |u| > t (or ≥ t), merged, with -inf for the core ball.
    fn level_intervals(&self, t: f64, inclusive: bool) -> Vec<(f64, f64)> {
        let above = |v: f64| if inclusive { v >= t } else { v > t };
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut push = |a: f64, b: f64| {
            if b <= a && a != f64::NEG_INFINITY {
                return;
            }
            if let Some(last) = out.last_mut() {
                if last.1 == a {
                    last.1 = b;
                    return;
                }
            }
            out.push((a, b));
        };
        if above(self.values[0].abs()) {
            push(f64::NEG_INFINITY, self.ln_r[0]);
        }
        for i in 0..self.len() - 1 {
            let (xa, xb) = (self.ln_r[i], self.ln_r[i + 1]);
            let (ua, ub) = (self.values[i], self.values[i + 1]);
            // Split at a sign change so |u| is linear on each part.
            let mut parts = [(xa, ua.abs(), xb, ub.abs()); 2];
            let mut np = 1;
            if ua * ub < 0.0 {
                let xz = xa + ua / (ua - ub) * (xb - xa);
                parts = [(xa, ua.abs(), xz, 0.0), (xz, 0.0, xb, ub.abs())];
                np = 2;
            }
            for &(x0, a0, x1, a1) in &parts[..np] {
                match (above(a0), above(a1)) {
                    (true, true) => push(x0, x1),
                    (true, false) => push(x0, x0 + (a0 - t) / (a0 - a1) * (x1 - x0)),
                    (false, true) => push(x0 + (t - a0) / (a1 - a0) * (x1 - x0), x1),
                    (false, false) => {}
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PieceKind {
    // g = g_ref (r/r_ref)^e
    Power { x_ref: f64, g_ref: f64, e: f64 },
    // g linear in r between (r0, g0) and (r1, g1)
    Linear { r0: f64, g0: f64, r1: f64, g1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Piece {
    x_lo: f64,
    x_hi: f64,
    kind: PieceKind,
    // μ_g(B_{e^{x_lo}})
    m_lo: f64,
}

/// A radial, non-increasing, locally integrable density `g ≥ 0` on `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleDensity {
    n: u32,
    omega: f64,
    pieces: Vec<Piece>,
}

impl AdmissibleDensity {
    /// `g(r) = coef · r^exponent` with `-n < exponent ≤ 0`.
    pub fn power(n: u32, coef: f64, exponent: f64) -> Result<Self> {
        check_n(n)?;
        if !(coef > 0.0 && coef.is_finite()) {
            bail!(Domain, "density coefficient must be positive, got {coef:e}");
        }
        if !(exponent <= 0.0) {
            bail!(Domain, "density must be non-increasing, exponent {exponent} > 0");
        }
        if exponent <= -(n as f64) {
            bail!(Domain, "r^{exponent} is not locally integrable in dimension {n}");
        }
        let piece = Piece {
            x_lo: f64::NEG_INFINITY,
            x_hi: f64::INFINITY,
            kind: PieceKind::Power { x_ref: 0.0, g_ref: coef, e: exponent },
            m_lo: 0.0,
        };
        Ok(AdmissibleDensity { n, omega: unit_sphere_measure(n), pieces: vec![piece] })
    }

    /// `g ≡ c`.
    pub fn constant(n: u32, c: f64) -> Result<Self> {
        Self::power(n, c, 0.0)
    }

    /// Samples `(r_i, g_i)`: log-log interpolation where both samples are
    /// positive, linear in `r` otherwise; power-law extension below `r_1`,
    /// constant beyond `r_m`.
    pub fn tabulated(n: u32, radii: &[f64], values: &[f64]) -> Result<Self> {
        check_n(n)?;
        let m = radii.len();
        if m < 2 || values.len() != m {
            bail!(InvalidInput, "tabulated density needs at least two matching samples");
        }
        for i in 0..m {
            if !(radii[i] > 0.0 && radii[i].is_finite()) || (i > 0 && radii[i] <= radii[i - 1]) {
                bail!(InvalidInput, "density radii must be positive and strictly increasing");
            }
            if !(values[i] >= 0.0 && values[i].is_finite()) {
                bail!(Domain, "density values must be non-negative, got {:e}", values[i]);
            }
            if i > 0 && values[i] > values[i - 1] * (1.0 + 1e-12) {
                bail!(Domain, "density must be non-increasing (sample {i} rises)");
            }
        }
        if values[0] <= 0.0 {
            bail!(Degenerate, "density vanishes identically");
        }
        let x: Vec<f64> = radii.iter().map(|&r| ln(r)).collect();
        let mut kinds = Vec::with_capacity(m + 1);
        let e0 = if values[1] > 0.0 { (ln(values[1]) - ln(values[0])) / (x[1] - x[0]) } else { 0.0 };
        if e0 <= -(n as f64) {
            bail!(Domain, "extrapolated density r^{e0} is not locally integrable");
        }
        kinds.push((f64::NEG_INFINITY, x[0], PieceKind::Power { x_ref: x[0], g_ref: values[0], e: e0.min(0.0) }));
        for i in 0..m - 1 {
            let kind = if values[i] > 0.0 && values[i + 1] > 0.0 {
                let e = (ln(values[i + 1]) - ln(values[i])) / (x[i + 1] - x[i]);
                PieceKind::Power { x_ref: x[i], g_ref: values[i], e: e.min(0.0) }
            } else {
                PieceKind::Linear { r0: radii[i], g0: values[i], r1: radii[i + 1], g1: values[i + 1] }
            };
            kinds.push((x[i], x[i + 1], kind));
        }
        kinds.push((x[m - 1], f64::INFINITY, PieceKind::Power { x_ref: x[m - 1], g_ref: values[m - 1], e: 0.0 }));
        let omega = unit_sphere_measure(n);
        let mut pieces = Vec::with_capacity(kinds.len());
        let mut m_lo = 0.0;
        for (x_lo, x_hi, kind) in kinds {
            let p = Piece { x_lo, x_hi, kind, m_lo };
            if x_hi.is_finite() {
                m_lo += piece_measure(n, omega, &p, x_lo, x_hi);
            }
            pieces.push(p);
        }
        Ok(AdmissibleDensity { n, omega, pieces })
    }

    /// Samples a closure at the given radii.
    pub fn from_fn<F: Fn(f64) -> f64>(n: u32, radii: &[f64], g: F) -> Result<Self> {
        let v: Vec<f64> = radii.iter().map(|&r| g(r)).collect();
        Self::tabulated(n, radii, &v)
    }

    /// Dimension.
    pub fn dim(&self) -> u32 {
        self.n
    }

    /// `ω_{n-1}`, the surface measure of the unit sphere.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    fn piece_at(&self, x: f64) -> &Piece {
        let i = self.pieces.partition_point(|p| p.x_hi < x);
        &self.pieces[i.min(self.pieces.len() - 1)]
    }

    /// `g(r)`.
    pub fn eval(&self, r: f64) -> f64 {
        if !(r > 0.0) {
            return f64::INFINITY;
        }
        self.eval_ln(ln(r))
    }

    fn eval_ln(&self, x: f64) -> f64 {
        match self.piece_at(x).kind {
            PieceKind::Power { x_ref, g_ref, e } => g_ref * exp(e * (x - x_ref)),
            PieceKind::Linear { r0, g0, r1, g1 } => g0 + (g1 - g0) * (exp(x) - r0) / (r1 - r0),
        }
    }

    /// `μ_g(B_r) = ω_{n-1} ∫_0^r g(s) s^{n-1} ds`.
    pub fn ball_measure(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || r.is_infinite() {
            bail!(OutOfRange, "ball radius must be positive and finite, got {r:e}");
        }
        Ok(self.ball_measure_ln(ln(r)))
    }

    /// `μ_g(B_{e^x})`.
    pub fn ball_measure_ln(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        let p = self.piece_at(x);
        p.m_lo + piece_measure(self.n, self.omega, p, p.x_lo, x)
    }

    /// `log` of the radius whose ball has measure `m`.
    pub fn radius_for_measure_ln(&self, m: f64) -> Result<f64> {
        if !(m >= 0.0) {
            bail!(Domain, "measure must be non-negative, got {m:e}");
        }
        if m == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let i = self.pieces.partition_point(|p| p.m_lo <= m).max(1) - 1;
        let p = &self.pieces[i];
        let dm = m - p.m_lo;
        match p.kind {
            PieceKind::Power { x_ref, g_ref, e } => {
                let c = e + self.n as f64;
                let scale = self.omega * g_ref * exp(self.n as f64 * x_ref) / c;
                let base = if p.x_lo.is_finite() { exp(c * (p.x_lo - x_ref)) } else { 0.0 };
                let z = base + dm / scale;
                if !(z > 0.0) || z.is_infinite() {
                    bail!(OutOfRange, "measure {m:e} exceeds the total mass of the density");
                }
                Ok(x_ref + ln(z) / c)
            }
            PieceKind::Linear { .. } => {
                let f = |x: f64| Ok(piece_measure(self.n, self.omega, p, p.x_lo, x) - dm);
                bisect(f, p.x_lo, p.x_hi, 0.0, 1e-16)
            }
        }
    }

    /// `μ_g({|u| > t})`.
    pub fn distribution(&self, u: &RadialProfile, t: f64) -> f64 {
        self.measure_of(&u.level_intervals(t.max(0.0), false))
    }

    /// `μ_g({|u| ≥ t})`.
    pub fn distribution_inclusive(&self, u: &RadialProfile, t: f64) -> f64 {
        if t <= 0.0 {
            return f64::INFINITY;
        }
        self.measure_of(&u.level_intervals(t, true))
    }

    fn measure_of(&self, intervals: &[(f64, f64)]) -> f64 {
        intervals
            .iter()
            .map(|&(a, b)| (self.ball_measure_ln(b) - self.ball_measure_ln(a)).max(0.0))
            .sum()
    }

    /// `∫ F(r) g dx` over the ball of radius `e^{x_hi}`, as an integral in
    /// `log r` with breakpoints at the density pieces and at `extra`.
    fn integrate_ln<F: FnMut(f64) -> f64>(&self, mut f: F, extra: &[f64], tol: f64) -> Result<f64> {
        let mut breaks: Vec<f64> = extra.to_vec();
        for p in &self.pieces {
            if p.x_lo.is_finite() && p.x_lo > extra[0] && p.x_lo < *extra.last().unwrap() {
                breaks.push(p.x_lo);
            }
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let n = self.n as f64;
        let omega = self.omega;
        let r = integrate_breaks(
            |x| Ok(f(x) * omega * self.eval_ln(x) * exp(n * x)),
            &breaks,
            Tolerance { abs: 1e-300, rel: tol, max_panels: 200_000 },
        )?;
        Ok(r.value)
    }
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        bail!(Domain, "dimension must be >= 1");
    }
    Ok(())
}

fn piece_measure(n: u32, omega: f64, p: &Piece, xa: f64, xb: f64) -> f64 {
    if xb <= xa {
        return 0.0;
    }
    let nf = n as f64;
    match p.kind {
        PieceKind::Power { x_ref, g_ref, e } => {
            let c = e + nf;
            let scale = omega * g_ref * exp(nf * x_ref);
            if xa == f64::NEG_INFINITY {
                return scale * exp(c * (xb - x_ref)) / c;
            }
            scale * exp(c * (xa - x_ref)) * expm1(c * (xb - xa)) / c
        }
        PieceKind::Linear { r0, g0, r1, g1 } => {
            let b = (g1 - g0) / (r1 - r0);
            let a0 = g0 - b * r0;
            let (ra, rb) = (exp(xa), exp(xb));
            omega * (a0 * (powf(rb, nf) - powf(ra, nf)) / nf + b * (powf(rb, nf + 1.0) - powf(ra, nf + 1.0)) / (nf + 1.0))
        }
    }
}

/// Pointwise rearrangement `R_g[u](r) = sup{t ≥ 0 : μ_g[u](t) > μ_g(B_r)}`.
pub fn rearrangement_at(g: &AdmissibleDensity, u: &RadialProfile, r: f64) -> Result<f64> {
    rearrangement_at_power(g, u, 1.0, r)
}

/// `R_g[|u|^p](r)`, from the distribution `t ↦ μ_g{|u| > t^{1/p}}` of `|u|^p`.
pub fn rearrangement_at_power(g: &AdmissibleDensity, u: &RadialProfile, p: f64, r: f64) -> Result<f64> {
    if !(p > 0.0) {
        bail!(Domain, "power must be positive, got {p}");
    }
    let m = g.ball_measure(r)?;
    let dist = |t: f64| g.distribution(u, powf(t, 1.0 / p));
    let top = powf(u.max_abs(), p);
    if !(dist(0.0) > m) {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, top);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if dist(mid) > m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Tolerances of [`rearrange_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RearrangeTol {
    /// Maximum deviation of the piecewise-linear output from the exact
    /// rearrangement at refinement midpoints, relative to `max |u|`.
    pub value: f64,
    /// Maximum relative error of the output's level-set measures at
    /// refinement midpoints (level sets smaller than `1e-12` of the support
    /// are only held to the absolute error `1e-12·measure·μ_g(supp u)`).
    pub measure: f64,
    /// Node cap.
    pub max_nodes: usize,
}

impl Default for RearrangeTol {
    fn default() -> Self {
        RearrangeTol { value: 1e-8, measure: 1e-6, max_nodes: 200_000 }
    }
}

/// The rearranged profile `R_g[u]` with default tolerances.
pub fn rearrange(g: &AdmissibleDensity, u: &RadialProfile) -> Result<RadialProfile> {
    rearrange_with(g, u, RearrangeTol::default())
}

/// The rearranged profile `R_g[u]`.
///
/// Nodes sit at the exact radii `ρ(t) = μ_g(B_·)^{-1}(μ_g[u](t))` of a set of
/// levels (the node values of `u`, geometric levels near `max|u|` and adaptive
/// midpoints); plateaus of `u` produce two nodes at the same level.
pub fn rearrange_with(g: &AdmissibleDensity, u: &RadialProfile, tol: RearrangeTol) -> Result<RadialProfile> {
    let top = u.max_abs();
    if top == 0.0 {
        return RadialProfile::from_log_radii(u.ln_r.clone(), vec![0.0; u.len()]);
    }
    let node_x = |t: f64| -> Result<f64> { g.radius_for_measure_ln(g.distribution(u, t)) };
    let mut levels: Vec<f64> = u.values.iter().map(|v| v.abs()).collect();
    levels.push(0.0);
    for j in 1..=40 {
        levels.push(top * (1.0 - powf(2.0, -(j as f64))));
    }
    levels.sort_by(|a, b| b.partial_cmp(a).unwrap());
    levels.dedup();

    // (x, level) pairs in increasing x.
    let mut nodes: Vec<(f64, f64)> = Vec::with_capacity(levels.len() * 2);
    let atol = tol.value * top;
    let mtol = (tol.measure, 1e-12 * tol.measure * g.distribution(u, 0.0));
    let ball = |x: f64| g.ball_measure_ln(x);
    let mut last: Option<(f64, f64)> = None;
    for &t in &levels {
        let strict = g.distribution(u, t);
        let inclusive = if t > 0.0 { g.distribution_inclusive(u, t) } else { strict };
        let x_in = if strict > 0.0 { Some(g.radius_for_measure_ln(strict)?) } else { None };
        if let (Some((xa, ta)), Some(xb)) = (last, x_in) {
            refine(&node_x, &ball, (xa, ta), (xb, t), (atol, mtol), tol.max_nodes, &mut nodes)?;
        }
        if let Some(x) = x_in {
            push_node(&mut nodes, x, t);
            last = Some((x, t));
        }
        if inclusive > strict * (1.0 + 1e-13) && inclusive > 0.0 {
            let x = g.radius_for_measure_ln(inclusive)?;
            push_node(&mut nodes, x, t);
            last = Some((x, t));
        }
    }
    if nodes.len() < 2 {
        bail!(Degenerate, "rearrangement collapsed to a single node");
    }
    let (ln_r, mut values): (Vec<f64>, Vec<f64>) = nodes.into_iter().unzip();
    *values.last_mut().unwrap() = 0.0;
    RadialProfile::from_log_radii(ln_r, values)
}

fn push_node(nodes: &mut Vec<(f64, f64)>, x: f64, t: f64) {
    if let Some(&(lx, _)) = nodes.last() {
        if !(x > lx) {
            return;
        }
    }
    nodes.push((x, t));
}

// Inserts exact midpoint levels between (xa, ta) and (xb, tb) until the
// linear interpolant is within atol of the exact level and its level set
// within rel·measure + floor of the exact one.
fn refine<F: Fn(f64) -> Result<f64>, B: Fn(f64) -> f64>(
    node_x: &F,
    ball: &B,
    a: (f64, f64),
    b: (f64, f64),
    (atol, (rel, floor)): (f64, (f64, f64)),
    max_nodes: usize,
    nodes: &mut Vec<(f64, f64)>,
) -> Result<()> {
    let mut stack = vec![(a, b, 0u32)];
    // Depth-first, emitting nodes in increasing x order.
    let mut pending: Vec<(f64, f64)> = Vec::new();
    while let Some(((xa, ta), (xb, tb), depth)) = stack.pop() {
        if !(xb > xa) || ta - tb <= atol || depth > 48 || nodes.len() + pending.len() > max_nodes {
            continue;
        }
        let tm = 0.5 * (ta + tb);
        let xm = node_x(tm)?;
        if !(xm > xa && xm < xb) {
            continue;
        }
        let t_lin = ta + (tb - ta) * (xm - xa) / (xb - xa);
        let x_lin = xa + (xb - xa) * (ta - tm) / (ta - tb);
        pending.push((xm, tm));
        let m = ball(xm);
        if (t_lin - tm).abs() > atol || (ball(x_lin) - m).abs() > rel * m + floor {
            stack.push(((xa, ta), (xm, tm), depth + 1));
            stack.push(((xm, tm), (xb, tb), depth + 1));
        }
    }
    pending.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    for (x, t) in pending {
        push_node(nodes, x, t);
    }
    Ok(())
}

/// Breakpoints of a profile (nodes plus zero crossings) clipped to its support.
fn profile_breaks(u: &RadialProfile, extra: &[f64]) -> Vec<f64> {
    let mut b: Vec<f64> = u.ln_r.clone();
    for i in 0..u.len() - 1 {
        let (ua, ub) = (u.values[i], u.values[i + 1]);
        if ua * ub < 0.0 {
            b.push(u.ln_r[i] + ua / (ua - ub) * (u.ln_r[i + 1] - u.ln_r[i]));
        }
    }
    let (lo, hi) = (u.ln_r[0], *u.ln_r.last().unwrap());
    b.extend(extra.iter().copied().filter(|&x| x > lo && x < hi));
    b.sort_by(|p, q| p.partial_cmp(q).unwrap());
    b.dedup();
    b
}

const INT_TOL: f64 = 1e-12;

/// `∫ |u|^p g dx`.
pub fn lp_integral(g: &AdmissibleDensity, u: &RadialProfile, p: f64) -> Result<f64> {
    let core = powf(u.values[0].abs(), p) * g.ball_measure_ln(u.ln_r[0]);
    let mut h = 0;
    let body = g.integrate_ln(|x| powf(u.value_at_ln_near(x, &mut h).abs(), p), &profile_breaks(u, &[]), INT_TOL)?;
    Ok(core + body)
}

/// `∫ |u|^q v(|x|) g dx` for a radial weight `v`.
pub fn weighted_lp_integral<V: Fn(f64) -> f64>(
    g: &AdmissibleDensity,
    u: &RadialProfile,
    q: f64,
    v: V,
) -> Result<f64> {
    let x0 = u.ln_r[0];
    let c = powf(u.values[0].abs(), q);
    let core = if c > 0.0 {
        // The core ball needs the weight integrated down to r = 0.
        let lo = x0 - 60.0;
        c * (g.integrate_ln(|x| v(exp(x)), &[lo, x0], INT_TOL)? + g.ball_measure_ln(lo) * v(exp(lo)))
    } else {
        0.0
    };
    let mut h = 0;
    let body =
        g.integrate_ln(|x| powf(u.value_at_ln_near(x, &mut h).abs(), q) * v(exp(x)), &profile_breaks(u, &[]), INT_TOL)?;
    Ok(core + body)
}

/// `∫ |u v| g dx`.
pub fn product_integral(g: &AdmissibleDensity, u: &RadialProfile, v: &RadialProfile) -> Result<f64> {
    let x0 = u.ln_r[0].min(v.ln_r[0]);
    let core = (u.value_at_ln(x0) * v.value_at_ln(x0)).abs() * g.ball_measure_ln(x0);
    let hi = u.ln_r.last().unwrap().min(*v.ln_r.last().unwrap());
    let mut b = profile_breaks(u, &v.ln_r);
    b.extend(profile_breaks(v, &u.ln_r));
    b.retain(|&x| x >= x0 && x <= hi);
    b.push(x0);
    b.sort_by(|p, q| p.partial_cmp(q).unwrap());
    b.dedup();
    if b.len() < 2 {
        return Ok(core);
    }
    let (mut hu, mut hv) = (0, 0);
    let body = g.integrate_ln(|x| (u.value_at_ln_near(x, &mut hu) * v.value_at_ln_near(x, &mut hv)).abs(), &b, INT_TOL)?;
    Ok(core + body)
}

/// `∫ |∇u|^p g^{1-p} dx`.
pub fn dirichlet_integral(g: &AdmissibleDensity, u: &RadialProfile, p: f64) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..u.len() - 1 {
        let (xa, xb) = (u.ln_r[i], u.ln_r[i + 1]);
        let slope = (u.values[i + 1] - u.values[i]) / (xb - xa);
        if slope == 0.0 {
            continue;
        }
        // g is non-increasing, so it vanishes somewhere on the segment iff at its right end.
        if !(g.eval(exp(xb)) > 0.0) {
            return Err(Error::Degenerate(alloc::format!(
                "g vanishes on [{:e}, {:e}] where the gradient is non-zero",
                exp(xa),
                exp(xb)
            )));
        }
        let mut breaks = vec![xa];
        breaks.extend(g.pieces.iter().map(|pc| pc.x_lo).filter(|&x| x > xa && x < xb));
        breaks.push(xb);
        let mut weight = 0.0;
        for w in breaks.windows(2) {
            weight += gradient_weight(g, p, w[0], w[1])?;
        }
        total += powf(slope.abs(), p) * weight;
    }
    Ok(total)
}

// ∫ ω g^{1-p} e^{(n-p)x} dx over [xa, xb] inside one piece of g.
fn gradient_weight(g: &AdmissibleDensity, p: f64, xa: f64, xb: f64) -> Result<f64> {
    let n = g.n as f64;
    let piece = g.piece_at(0.5 * (xa + xb));
    if let PieceKind::Power { x_ref, g_ref, e } = piece.kind {
        if !(g_ref > 0.0) {
            bail!(Degenerate, "g vanishes on [{:e}, {:e}] where the gradient is non-zero", exp(xa), exp(xb));
        }
        let k = (1.0 - p) * e + n - p;
        let lead = exp((1.0 - p) * (ln(g_ref) + e * (xa - x_ref)) + (n - p) * xa);
        let len = xb - xa;
        let span = if (k * len).abs() < 1e-300 { len } else { expm1(k * len) / k };
        return Ok(g.omega * lead * span);
    }
    let mut degenerate = false;
    let r = integrate_breaks(
        |x| {
            let gv = g.eval_ln(x);
            if gv <= 0.0 {
                degenerate = true;
                return Ok(0.0);
            }
            Ok(g.omega * powf(gv, 1.0 - p) * exp((n - p) * x))
        },
        &[xa, xb],
        Tolerance { abs: 1e-300, rel: INT_TOL, max_panels: 10_000 },
    )?;
    if degenerate {
        bail!(Degenerate, "g vanishes on [{:e}, {:e}] where the gradient is non-zero", exp(xa), exp(xb));
    }
    Ok(r.value)
}

/// `(∫|u|^p g, ∫ R_g[u]^p g)`.
pub fn check_norm_preservation(g: &AdmissibleDensity, u: &RadialProfile, p: f64) -> Result<(f64, f64)> {
    let ru = rearrange(g, u)?;
    Ok((lp_integral(g, u, p)?, lp_integral(g, &ru, p)?))
}

/// `(∫|uv| g, ∫ R_g[u] R_g[v] g)`.
pub fn check_hardy_littlewood(g: &AdmissibleDensity, u: &RadialProfile, v: &RadialProfile) -> Result<(f64, f64)> {
    let (ru, rv) = (rearrange(g, u)?, rearrange(g, v)?);
    Ok((product_integral(g, u, v)?, product_integral(g, &ru, &rv)?))
}

/// `(∫|∇u|^p g^{1-p}, ∫|∇R_g[u]|^p g^{1-p})`.
pub fn check_polya_szego(g: &AdmissibleDensity, u: &RadialProfile, p: f64) -> Result<(f64, f64)> {
    let ru = rearrange(g, u)?;
    Ok((dirichlet_integral(g, u, p)?, dirichlet_integral(g, &ru, p)?))
}

/// Rayleigh quotients `∫|∇u|^p g^{1-p} / (∫|u|^q v g)^{p/q}` of `u` and of `R_g[u]`.
pub fn quotient_comparison<V: Fn(f64) -> f64>(
    g: &AdmissibleDensity,
    v: V,
    u: &RadialProfile,
    p: f64,
    q: f64,
) -> Result<(f64, f64)> {
    let ru = rearrange(g, u)?;
    let quotient = |w: &RadialProfile| -> Result<f64> {
        let den = weighted_lp_integral(g, w, q, &v)?;
        if !(den > 0.0) {
            return Err(Error::ZeroDenominator);
        }
        Ok(dirichlet_integral(g, w, p)? / powf(den, p / q))
    };
    Ok((quotient(u)?, quotient(&ru)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn tent(n: usize, lo: f64, peak: f64, hi: f64) -> RadialProfile {
        let radii: Vec<f64> = (0..n).map(|i| lo * powf(hi / lo, i as f64 / (n - 1) as f64)).collect();
        let xp = ln(peak);
        let vals: Vec<f64> = radii
            .iter()
            .map(|&r| {
                let x = ln(r);
                if x <= xp {
                    (x - ln(lo)) / (xp - ln(lo))
                } else {
                    (ln(hi) - x) / (ln(hi) - xp)
                }
            })
            .collect();
        RadialProfile::new(&radii, &vals).unwrap()
    }

    #[test]
    fn ball_measures() {
        let g1 = AdmissibleDensity::constant(1, 1.0).unwrap();
        assert!((g1.ball_measure(0.7).unwrap() - 1.4).abs() < 1e-15);
        let g2 = AdmissibleDensity::constant(2, 1.0).unwrap();
        assert!((g2.ball_measure(0.7).unwrap() - PI * 0.49).abs() < 1e-14);
        let g3 = AdmissibleDensity::power(2, 1.0, -1.0).unwrap();
        assert!((g3.ball_measure(0.7).unwrap() - 2.0 * PI * 0.7).abs() < 1e-14);
        let radii: Vec<f64> = (0..50).map(|i| 1e-3 * powf(1e3, i as f64 / 49.0)).collect();
        let tab = AdmissibleDensity::from_fn(2, &radii, |r| 1.0 / r).unwrap();
        for r in [1e-4f64, 0.01, 0.5, 3.0] {
            let want = 2.0 * PI * r.min(1.0) + if r > 1.0 { PI * (r * r - 1.0) } else { 0.0 };
            assert!((tab.ball_measure(r).unwrap() - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn measure_inverse_round_trip() {
        let radii = [0.1, 0.2, 0.5, 1.0];
        let g = AdmissibleDensity::tabulated(3, &radii, &[4.0, 2.0, 0.0, 0.0]).unwrap();
        for r in [0.01, 0.15, 0.3, 0.45] {
            let m = g.ball_measure(r).unwrap();
            let x = g.radius_for_measure_ln(m).unwrap();
            assert!((exp(x) - r).abs() < 1e-12 * r);
        }
    }

    #[test]
    fn distribution_basics() {
        let g = AdmissibleDensity::constant(2, 1.0).unwrap();
        let u = tent(20, 0.01, 0.1, 0.5);
        assert_eq!(g.distribution(&u, 1.0), 0.0);
        assert_eq!(g.distribution(&u, 2.0), 0.0);
        let d0 = g.distribution(&u, 0.0);
        let want = PI * (0.25 - 1e-4);
        assert!((d0 - want).abs() < 1e-14);
    }

    #[test]
    fn idempotent_on_decreasing_profiles() {
        let g = AdmissibleDensity::power(3, 2.0, -0.5).unwrap();
        let radii = [0.01, 0.05, 0.1, 0.3, 0.6, 1.0];
        let u = RadialProfile::new(&radii, &[3.0, 2.5, 2.5, 1.0, 0.2, 0.0]).unwrap();
        let ru = rearrange(&g, &u).unwrap();
        assert!(ru.is_non_increasing());
        for &r in &[0.005, 0.02, 0.07, 0.2, 0.45, 0.8, 1.2] {
            assert!((ru.value_at(r) - u.value_at(r)).abs() < 1e-9, "r={r}");
        }
    }

    #[test]
    fn rearranged_tent_is_monotone_and_equimeasurable() {
        let g = AdmissibleDensity::power(2, 1.0, -1.0).unwrap();
        let u = tent(25, 0.01, 0.2, 0.9);
        let ru = rearrange(&g, &u).unwrap();
        assert!(ru.is_non_increasing());
        for k in 0..16 {
            let t = k as f64 / 16.0;
            let (a, b) = (g.distribution(&u, t), g.distribution(&ru, t));
            assert!((a - b).abs() <= 1e-6 * a.max(1e-12), "t={t} {a} {b}");
        }
        for &r in &[0.001, 0.05, 0.3, 0.8] {
            let exact = rearrangement_at(&g, &u, r).unwrap();
            assert!((ru.value_at(r) - exact).abs() < 1e-7);
            let pw = rearrangement_at_power(&g, &u, 3.0, r).unwrap();
            assert!((pw - powf(exact, 3.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn dirichlet_closed_form_and_quadrature() {
        // g = 1/r in R^2, p = 2: g^{1-p} r^{n-p} = r, so a unit drop over
        // [x0, x1] costs 2π (e^{x1} - e^{x0}) / (x1 - x0)^2.
        let g = AdmissibleDensity::power(2, 1.0, -1.0).unwrap();
        let u = RadialProfile::from_log_radii(vec![-2.0, -0.5], vec![1.0, 0.0]).unwrap();
        let expect = 2.0 * PI * (exp(-0.5) - exp(-2.0)) / (1.5 * 1.5);
        let got = dirichlet_integral(&g, &u, 2.0).unwrap();
        assert!((got / expect - 1.0).abs() < 1e-13, "{got} {expect}");
        // A zero sample at r = 2 makes g linear in r on [r0, 2]; that piece is
        // integrated numerically. Compare with composite Simpson in log r.
        let r0 = exp(-0.1);
        let tab = AdmissibleDensity::tabulated(2, &[0.5, r0, 2.0], &[2.0, 1.0 / r0, 0.0]).unwrap();
        let u = RadialProfile::from_log_radii(vec![-0.05, 0.4], vec![1.0, 0.0]).unwrap();
        let g_lin = |x: f64| (1.0 / r0) * (2.0 - exp(x)) / (2.0 - r0);
        let m = 2000;
        let h = 0.45 / m as f64;
        let simpson: f64 = (0..=m)
            .map(|i| {
                let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                w / g_lin(-0.05 + i as f64 * h)
            })
            .sum::<f64>()
            * h
            / 3.0;
        let expect = 2.0 * PI * simpson / (0.45 * 0.45);
        let got = dirichlet_integral(&tab, &u, 2.0).unwrap();
        assert!((got / expect - 1.0).abs() < 1e-10, "{got} {expect}");
    }

    #[test]
    fn integrals_and_inequalities() {
        let g = AdmissibleDensity::power(2, 1.0, -0.5).unwrap();
        let u = tent(30, 0.02, 0.3, 0.9);
        let (a, b) = check_norm_preservation(&g, &u, 2.0).unwrap();
        assert!(((a - b) / a).abs() < 1e-6);
        let (l, r) = check_hardy_littlewood(&g, &u, &u).unwrap();
        assert!(((l - a) / a).abs() < 1e-10 && ((r - a) / a).abs() < 1e-6);
        let (e, er) = check_polya_szego(&g, &u, 2.0).unwrap();
        assert!(er <= e * (1.0 + 1e-6));
    }

    #[test]
    fn degenerate_density_is_reported() {
        let g = AdmissibleDensity::tabulated(2, &[0.1, 0.2, 0.3], &[1.0, 0.0, 0.0]).unwrap();
        let u = tent(10, 0.05, 0.15, 0.5);
        assert!(matches!(dirichlet_integral(&g, &u, 2.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn invalid_inputs() {
        assert!(AdmissibleDensity::power(2, 1.0, 0.5).is_err());
        assert!(AdmissibleDensity::power(2, 1.0, -2.0).is_err());
        assert!(AdmissibleDensity::tabulated(2, &[0.1, 0.2], &[1.0, 2.0]).is_err());
        assert!(RadialProfile::new(&[0.1, 0.2], &[1.0, 1.0]).is_err());
        assert!(RadialProfile::new(&[0.2, 0.1], &[1.0, 0.0]).is_err());
    }
}
