//! Radial evaluation of the Rayleigh quotients and inequality sides.
//!
//! For a radial profile `u` (piecewise linear in `x = log t`) the integrals are
//! taken in the depth variable `σ = log(η/t)`, where a segment with slope
//! `m = du/dx` contributes
//!
//! * energy: `ω |m|^p ∫ W(σ)^{p-1} dσ`,
//! * norm:   `ω ∫ |u|^q / (W(σ) F(σ)^c) dσ`, `c = 1 + q/p'`,
//!
//! with `W = w/t` and `F` the potential `f_η` (or the level function of the
//! explicit inequalities). Below the first node the profile is constant and the
//! norm integral is closed-form for P-class weights, because `dF/dσ ∝ 1/W`.

use alloc::vec::Vec;

use crate::error::bail;
use crate::math::{exp, expm1_over, ln, powf};
use crate::quadrature::{adapted_panels, integrate_breaks, rule_points, Integral, Tolerance};
use crate::rearrangement::RadialProfile;
use crate::roots::bisect;
use crate::weight::{admissible_exponents, depth_breaks, Family, WeightClass, WeightSpec};
use crate::{Error, Result};

/// Which quotient is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    /// Power weights: `∫|∇u|^p |x|^{p(1+γ)-n} / (∫|u|^q |x|^{γq-n})^{p/q}` on
    /// `R^n \ {0}`; the weight of the spec is not used.
    ClassicCkn {
        /// `γ`.
        gamma: f64,
    },
    /// Critical CKN with `log(Rη/|x|)`; requires the poly-log weight `k = 1, α = 0`.
    CriticalCkn {
        /// `R > 1`.
        r_big: f64,
    },
    /// `∫|∇u|^p w^{p-1}|x|^{1-n} / (∫|u|^q |x|^{1-n} / (w f_η^{1+q/p'}))^{p/q}`.
    General,
    /// Poly-log form: the denominator uses `(log^k)^{(1-α)c}` (or `(log^{k+1})^c` at `α = 1`).
    PolyLog,
    /// Super-log form: the denominator uses `(A¹_k)^{(1-α)c}` (or `(A¹_{k+1})^c` at `α = 1`).
    SuperLog,
    /// Hardy inequality with remainder, `p = q`, super-log weight with `α = 1`.
    HardyRemainder,
}

/// A validated quotient specification.
#[derive(Debug, Clone)]
pub struct QuotientSpec {
    n: u32,
    p: f64,
    q: f64,
    weight: WeightSpec,
    variant: Variant,
    class: WeightClass,
    omega: f64,
}

/// Numerator, unpowered denominator and their quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientValue {
    /// Energy.
    pub numerator: f64,
    /// Norm integral before the `p/q` power.
    pub denominator: f64,
    /// `numerator / denominator^{p/q}`.
    pub quotient: f64,
    /// Sum of the absolute quadrature error estimates of both integrals.
    pub quadrature_error: f64,
}

/// The three sides of the Hardy inequality with remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderSides {
    /// Energy.
    pub lhs: f64,
    /// `(1/p')^p ∫ |u|^p |x|^{1-n} / (w f_η^p)`.
    pub main: f64,
    /// `∫ |u|^p |x|^{1-n} / (w f_η^p G_η²)`.
    pub rem: f64,
}

impl RemainderSides {
    /// `(lhs - main) / rem`, the largest remainder coefficient this profile allows.
    pub fn coefficient(&self) -> Option<f64> {
        (self.rem > 0.0).then(|| (self.lhs - self.main) / self.rem)
    }
}

const REL: f64 = 1e-12;

fn tol() -> Tolerance {
    Tolerance { abs: 1e-300, rel: REL, max_panels: 20_000 }
}

impl QuotientSpec {
    /// Validates exponents and the weight/variant pairing.
    pub fn new(n: u32, p: f64, q: f64, weight: WeightSpec, variant: Variant) -> Result<Self> {
        if !admissible_exponents(n, p, q)? {
            bail!(Domain, "exponents violate 0 <= 1/p - 1/q <= 1/n (n={n}, p={p}, q={q})");
        }
        let kind = |want: &str| Error::VariantMismatch(alloc::format!("{variant:?} needs {want}, got {}", weight.describe()));
        match (variant, weight.family()) {
            (Variant::ClassicCkn { gamma }, _) => {
                if !gamma.is_finite() {
                    bail!(Domain, "γ must be finite");
                }
            }
            (Variant::CriticalCkn { r_big }, Family::PolyLog { k: 1, alpha, r_big: r }) => {
                if *alpha != 0.0 || *r != r_big {
                    return Err(kind("the poly-log weight k=1, alpha=0 with the same R"));
                }
            }
            (Variant::CriticalCkn { .. }, _) => return Err(kind("a poly-log weight")),
            (Variant::PolyLog, Family::PolyLog { .. }) | (Variant::SuperLog, Family::SuperLog { .. }) => {}
            (Variant::PolyLog, _) => return Err(kind("a poly-log weight")),
            (Variant::SuperLog, _) => return Err(kind("a super-log weight")),
            (Variant::HardyRemainder, Family::SuperLog { alpha, .. }) => {
                if *alpha != 1.0 {
                    return Err(kind("a super-log weight with alpha = 1"));
                }
                if (p - q).abs() > 1e-12 * p {
                    bail!(VariantMismatch, "the remainder inequality needs p = q");
                }
            }
            (Variant::HardyRemainder, _) => return Err(kind("a super-log weight")),
            (Variant::General, _) => {}
        }
        let class = weight.classify()?;
        if class == WeightClass::P && !matches!(variant, Variant::ClassicCkn { .. }) {
            weight.mu()?;
        }
        let omega = crate::math::unit_sphere_measure(n);
        Ok(QuotientSpec { n, p, q, weight, variant, class, omega })
    }

    /// The general quotient for `weight`.
    pub fn general(n: u32, p: f64, q: f64, weight: WeightSpec) -> Result<Self> {
        Self::new(n, p, q, weight, Variant::General)
    }

    /// The critical CKN quotient with `log(Rη/|x|)`.
    pub fn critical_ckn(n: u32, p: f64, q: f64, r_big: f64, eta: f64) -> Result<Self> {
        Self::new(n, p, q, WeightSpec::poly_log(1, 0.0, r_big, eta)?, Variant::CriticalCkn { r_big })
    }

    /// The explicit quotient matching the weight family (poly-log or super-log).
    pub fn explicit(n: u32, p: f64, q: f64, weight: WeightSpec) -> Result<Self> {
        let variant = match weight.family() {
            Family::PolyLog { .. } => Variant::PolyLog,
            Family::SuperLog { .. } => Variant::SuperLog,
            Family::Tabulated(_) => Variant::General,
        };
        Self::new(n, p, q, weight, variant)
    }

    /// Dimension.
    pub fn n(&self) -> u32 {
        self.n
    }
    /// `p`.
    pub fn p(&self) -> f64 {
        self.p
    }
    /// `q`.
    pub fn q(&self) -> f64 {
        self.q
    }
    /// `p' = p/(p-1)`.
    pub fn p_conj(&self) -> f64 {
        self.p / (self.p - 1.0)
    }
    /// `c = 1 + q/p'`.
    pub fn c_exp(&self) -> f64 {
        1.0 + self.q / self.p_conj()
    }
    /// The weight.
    pub fn weight(&self) -> &WeightSpec {
        &self.weight
    }
    /// The variant.
    pub fn variant(&self) -> Variant {
        self.variant
    }
    /// Class of the weight.
    pub fn class(&self) -> WeightClass {
        self.class
    }
    /// `ω_{n-1}`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Proven lower bound for the quotient when `p = q`: `(1/p')^p`, times
    /// `|α-1|^{p-1+p/q}` for the explicit forms with `α ≠ 1`.
    pub fn sharp_constant(&self) -> Option<f64> {
        if (self.p - self.q).abs() > 1e-12 * self.p || matches!(self.variant, Variant::ClassicCkn { .. }) {
            return None;
        }
        Some(powf(1.0 / self.p_conj(), self.p) * self.level_factor())
    }

    // |α-1|^{p-1+p/q} for the explicit α ≠ 1 forms, else 1.
    fn level_factor(&self) -> f64 {
        match (self.variant, self.weight.k_alpha()) {
            (Variant::PolyLog | Variant::SuperLog, Some((_, alpha))) if alpha != 1.0 => {
                powf((alpha - 1.0).abs(), self.p - 1.0 + self.p / self.q)
            }
            _ => 1.0,
        }
    }

    // Scale s with F = s·(f_η - shift) for the explicit forms; (1, 0) otherwise.
    fn level_map(&self) -> Result<(f64, f64)> {
        match (self.variant, self.weight.k_alpha()) {
            (Variant::PolyLog | Variant::SuperLog, Some((_, alpha))) => {
                let shift = match (self.weight.mu()?, self.weight.canonical_mu()) {
                    (Some(m), Some(c)) => m - c,
                    _ => 0.0,
                };
                let scale = if alpha == 1.0 { 1.0 } else { (alpha - 1.0).abs() };
                Ok((scale, shift))
            }
            _ => Ok((1.0, 0.0)),
        }
    }

    fn sigma_range(&self, u: &RadialProfile) -> Result<(f64, f64)> {
        let ln_eta = ln(self.weight.eta());
        let x = u.log_radii();
        let last = *x.last().unwrap();
        if last > ln_eta + 1e-12 * ln_eta.abs().max(1.0) {
            bail!(Support, "profile extends to r = {:e} beyond η = {:e}", exp(last), self.weight.eta());
        }
        Ok((ln_eta - x[0], (ln_eta - last).max(0.0)))
    }
}

fn check_nonzero_p(p: f64) -> Result<()> {
    if !(p > 0.0) {
        bail!(Domain, "exponent must be positive");
    }
    Ok(())
}

// Segment slopes in x and the depth interval [σ_hi_end, σ_lo_end].
fn segments(u: &RadialProfile, ln_eta: f64) -> impl Iterator<Item = (f64, f64, f64, f64, f64)> + '_ {
    let x = u.log_radii();
    let v = u.values();
    (0..u.len() - 1).map(move |i| {
        let m = (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
        // σ decreases as x increases.
        ((ln_eta - x[i + 1]).max(0.0), (ln_eta - x[i]).max(0.0), v[i + 1], v[i], m)
    })
}

// ∫ |u|^q ρ(σ) dσ over the segments of u, splitting at sign changes.
fn segment_norm<R: FnMut(f64) -> Result<f64>>(
    u: &RadialProfile,
    ln_eta: f64,
    q: f64,
    mut rho: R,
) -> Result<Integral> {
    let mut total = Integral { value: 0.0, error: 0.0, panels: 0 };
    for (s0, s1, u0, u1, _) in segments(u, ln_eta) {
        if !(s1 > s0) || (u0 == 0.0 && u1 == 0.0) {
            continue;
        }
        // u(σ) linear: u0 at s0, u1 at s1.
        let lin = |s: f64| u0 + (u1 - u0) * (s - s0) / (s1 - s0);
        let mut breaks = depth_breaks(s0, s1);
        if u0 * u1 < 0.0 {
            breaks.push(s0 + u0 / (u0 - u1) * (s1 - s0));
            breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        let r = integrate_breaks(|s| Ok(powf(lin(s).abs(), q) * rho(s)?), &breaks, tol())?;
        total.value += r.value;
        total.error += r.error;
        total.panels += r.panels;
    }
    Ok(total)
}

/// `ω ∫ |u'(t)|^p w(t)^{p-1} dt` (power weight `t^{p(1+γ)-1}` for the classic variant).
pub fn energy(spec: &QuotientSpec, u: &RadialProfile) -> Result<f64> {
    energy_with_error(spec, u).map(|r| r.value)
}

fn energy_with_error(spec: &QuotientSpec, u: &RadialProfile) -> Result<Integral> {
    let p = spec.p;
    let mut out = Integral { value: 0.0, error: 0.0, panels: 0 };
    if let Variant::ClassicCkn { gamma } = spec.variant {
        let x = u.log_radii();
        let v = u.values();
        for i in 0..u.len() - 1 {
            let m = (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
            if m != 0.0 {
                // ∫ e^{pγx} dx over the segment.
                let seg = exp(p * gamma * x[i]) * expm1_over(p * gamma, x[i + 1] - x[i]);
                out.value += spec.omega * powf(m.abs(), p) * seg;
            }
        }
        return Ok(out);
    }
    let ln_eta = ln(spec.weight.eta());
    spec.sigma_range(u)?;
    for (s0, s1, _, _, m) in segments(u, ln_eta) {
        if m == 0.0 || !(s1 > s0) {
            continue;
        }
        let r = integrate_breaks(
            |s| Ok(exp((p - 1.0) * spec.weight.ln_w_sigma(s)?)),
            &depth_breaks(s0, s1),
            tol(),
        )?;
        let c = spec.omega * powf(m.abs(), p);
        out.value += c * r.value;
        out.error += c * r.error;
        out.panels += r.panels;
    }
    Ok(out)
}

/// `ω ∫ |u|^q |x|^{1-n} / (w F^{1+q/p'})` with `F = f_η` (or the variant's level
/// function; `|x|^{γq-n}` for the classic variant).
pub fn norm_term(spec: &QuotientSpec, u: &RadialProfile) -> Result<f64> {
    norm_with_error(spec, u).map(|r| r.value)
}

fn norm_with_error(spec: &QuotientSpec, u: &RadialProfile) -> Result<Integral> {
    let q = spec.q;
    check_nonzero_p(q)?;
    let u0 = u.values()[0];
    if let Variant::ClassicCkn { gamma } = spec.variant {
        let x = u.log_radii();
        let core = if u0 == 0.0 {
            0.0
        } else if gamma > 0.0 {
            powf(u0.abs(), q) * exp(gamma * q * x[0]) / (gamma * q)
        } else {
            bail!(Divergence, "|x|^(γq-n) is not integrable at 0 for γ <= 0 unless u vanishes there");
        };
        // Integrate in σ' = L - x (L past the last node) so the shared segment routine applies.
        let top = *x.last().unwrap() + 1.0;
        let r = segment_norm(u, top, q, |s| Ok(exp(gamma * q * (top - s))))?;
        return Ok(Integral { value: spec.omega * (core + r.value), error: spec.omega * r.error, panels: r.panels });
    }
    let (sigma0, _) = spec.sigma_range(u)?;
    let c = spec.c_exp();
    let (scale, shift) = spec.level_map()?;
    let w = &spec.weight;
    let level = |s: f64| -> Result<f64> { Ok(scale * (w.f_sigma(s)? - shift)) };
    let core = if u0 == 0.0 {
        0.0
    } else {
        match spec.class {
            WeightClass::P => powf(u0.abs(), q) * powf(level(sigma0)?, 1.0 - c) / ((c - 1.0) * scale),
            WeightClass::Q => bail!(Divergence, "Q-class norm diverges unless u vanishes near 0"),
        }
    };
    let ln_eta = ln(w.eta());
    let r = segment_norm(u, ln_eta, q, |s| Ok(exp(-w.ln_w_sigma(s)?) * powf(level(s)?, -c)))?;
    Ok(Integral { value: spec.omega * (core + r.value), error: spec.omega * r.error, panels: r.panels })
}

/// The general norm term computed in the potential variable `s = f_η(t)`,
/// where it reads `ω ∫ |u|^q s^{-c} ds`; the profile is mapped through the
/// inverse of `f_η` by bisection. Used to cross-check [`norm_term`].
pub fn norm_term_potential(spec: &QuotientSpec, u: &RadialProfile) -> Result<f64> {
    if spec.variant != Variant::General && spec.variant != Variant::HardyRemainder {
        bail!(VariantMismatch, "the potential-variable path evaluates the general norm only");
    }
    let (sigma0, _) = spec.sigma_range(u)?;
    let (c, q, w) = (spec.c_exp(), spec.q, &spec.weight);
    let ln_eta = ln(w.eta());
    let u0 = u.values()[0];
    let core = if u0 == 0.0 {
        0.0
    } else if spec.class == WeightClass::P {
        powf(u0.abs(), q) * powf(w.f_sigma(sigma0)?, 1.0 - c) / (c - 1.0)
    } else {
        bail!(Divergence, "Q-class norm diverges unless u vanishes near 0");
    };
    let mut total = core;
    for (s0, s1, _, _, _) in segments(u, ln_eta) {
        if !(s1 > s0) {
            continue;
        }
        let (f0, f1) = (w.f_sigma(s0)?, w.f_sigma(s1)?);
        let (lo, hi) = if f0 < f1 { (f0, f1) } else { (f1, f0) };
        let sigma_of = |s: f64| -> Result<f64> {
            bisect(|x| Ok(w.f_sigma(x)? - s), s0, s1, 0.0, 1e-15).or_else(|e| {
                if (s - f0).abs() <= 1e-14 * s {
                    Ok(s0)
                } else if (s - f1).abs() <= 1e-14 * s {
                    Ok(s1)
                } else {
                    Err(e)
                }
            })
        };
        // Integrate in y = log s to keep wide segments balanced.
        let r = integrate_breaks(
            |y| {
                let s = exp(y);
                let x = ln_eta - sigma_of(s)?;
                Ok(powf(u.value_at_ln(x).abs(), q) * powf(s, 1.0 - c))
            },
            &[ln(lo), ln(hi)],
            Tolerance { abs: 1e-300, rel: 1e-11, max_panels: 4000 },
        )?;
        total += r.value;
    }
    Ok(spec.omega * total)
}

/// `energy / norm^{p/q}`.
pub fn quotient(spec: &QuotientSpec, u: &RadialProfile) -> Result<QuotientValue> {
    let den = norm_with_error(spec, u)?;
    if !(den.value > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    let num = energy_with_error(spec, u)?;
    Ok(QuotientValue {
        numerator: num.value,
        denominator: den.value,
        quotient: num.value / powf(den.value, spec.p / spec.q),
        quadrature_error: num.error + den.error,
    })
}

/// `(lhs, main, rem)` of the Hardy inequality with remainder
/// `lhs ≥ main + C·rem`.
pub fn remainder_sides(spec: &QuotientSpec, u: &RadialProfile) -> Result<RemainderSides> {
    if spec.variant != Variant::HardyRemainder {
        bail!(VariantMismatch, "remainder sides need the HardyRemainder variant");
    }
    if u.max_abs() == 0.0 {
        return Ok(RemainderSides { lhs: 0.0, main: 0.0, rem: 0.0 });
    }
    let p = spec.p;
    let w = &spec.weight;
    let mu = w.mu()?.unwrap();
    let (sigma0, _) = spec.sigma_range(u)?;
    let ln_eta = ln(w.eta());
    let u0 = u.values()[0].abs();
    let hardy = powf(1.0 / spec.p_conj(), p);

    let main_body = segment_norm(u, ln_eta, p, |s| Ok(exp(-w.ln_w_sigma(s)?) * powf(w.f_sigma(s)?, -p)))?;
    let rem_body = segment_norm(u, ln_eta, p, |s| {
        let f = w.f_sigma(s)?;
        let g = mu - ln(mu) + ln(f);
        Ok(exp(-w.ln_w_sigma(s)?) * powf(f, -p) / (g * g))
    })?;
    let (mut main_core, mut rem_core) = (0.0, 0.0);
    if u0 > 0.0 {
        let f0 = w.f_sigma(sigma0)?;
        main_core = powf(f0, 1.0 - p) / (p - 1.0);
        // In G = μ - log μ + log f the tail is ∫ f^{1-p} G^{-2} dG, f = μ e^{G-μ}.
        let g0 = mu - ln(mu) + ln(f0);
        let span = 60.0 / (p - 1.0);
        let r = integrate_breaks(
            |g| Ok(powf(mu * exp(g - mu), 1.0 - p) / (g * g)),
            &depth_breaks(0.0, span).iter().map(|d| g0 + d).collect::<Vec<_>>(),
            tol(),
        )?;
        rem_core = r.value;
    }
    let up = powf(u0, p);
    Ok(RemainderSides {
        lhs: energy(spec, u)?,
        main: spec.omega * hardy * (up * main_core + main_body.value),
        rem: spec.omega * (up * rem_core + rem_body.value),
    })
}

/// Quotient evaluator for profiles on a fixed node set.
///
/// Per-segment energy coefficients and norm quadrature nodes are computed once,
/// so re-evaluating with new node values costs `O(nodes)` arithmetic only.
#[derive(Debug, Clone)]
pub struct PreparedGrid {
    ln_r: Vec<f64>,
    p: f64,
    q: f64,
    // ω ∫ W^{p-1} dσ / Δx^p per segment.
    energy_coef: Vec<f64>,
    // (λ, weight) with u = u_i + λ (u_{i+1} - u_i).
    norm_nodes: Vec<Vec<(f64, f64)>>,
    // Coefficient of |u_0|^q from the ball below the first node.
    core: f64,
}

impl PreparedGrid {
    /// Prepares the segments of `ln_r` (strictly increasing, last node `≤ log η`).
    pub fn new(spec: &QuotientSpec, ln_r: &[f64]) -> Result<Self> {
        let zeros = alloc::vec![0.0; ln_r.len()];
        let probe = RadialProfile::from_log_radii(ln_r.to_vec(), zeros)?;
        let (p, q) = (spec.p, spec.q);
        let mut energy_coef = Vec::with_capacity(ln_r.len());
        let mut norm_nodes = Vec::with_capacity(ln_r.len());
        let ln_eta = ln(spec.weight.eta());
        let classic = matches!(spec.variant, Variant::ClassicCkn { .. });
        let (core, rho): (f64, alloc::boxed::Box<dyn Fn(f64) -> Result<(f64, f64)> + '_>) = match spec.variant {
            Variant::ClassicCkn { gamma } => {
                let core = if gamma > 0.0 { spec.omega * exp(gamma * q * ln_r[0]) / (gamma * q) } else { f64::INFINITY };
                (core, alloc::boxed::Box::new(move |x: f64| Ok((spec.omega * exp(p * gamma * x), spec.omega * exp(gamma * q * x)))))
            }
            _ => {
                let (sigma0, _) = spec.sigma_range(&probe)?;
                let c = spec.c_exp();
                let (scale, shift) = spec.level_map()?;
                let w = &spec.weight;
                let core = match spec.class {
                    WeightClass::P => spec.omega * powf(scale * (w.f_sigma(sigma0)? - shift), 1.0 - c) / ((c - 1.0) * scale),
                    WeightClass::Q => f64::INFINITY,
                };
                (
                    core,
                    alloc::boxed::Box::new(move |x: f64| {
                        let s = (ln_eta - x).max(0.0);
                        let lw = w.ln_w_sigma(s)?;
                        let lev = scale * (w.f_sigma(s)? - shift);
                        Ok((spec.omega * exp((p - 1.0) * lw), spec.omega * exp(-lw) * powf(lev, -c)))
                    }),
                )
            }
        };
        for i in 0..ln_r.len() - 1 {
            let (xa, xb) = (ln_r[i], ln_r[i + 1]);
            let h = xb - xa;
            let breaks = if classic {
                sub_breaks(xa, xb)
            } else {
                // Geometric in depth, as in the direct evaluation.
                let (sa, sb) = ((ln_eta - xb).max(0.0), (ln_eta - xa).max(0.0));
                let mut b: Vec<f64> = depth_breaks(sa, sb).iter().rev().map(|s| ln_eta - s).collect();
                b[0] = xa;
                *b.last_mut().unwrap() = xb;
                b
            };
            let e = integrate_breaks(|x| Ok(rho(x)?.0), &breaks, tol())?;
            energy_coef.push(e.value / powf(h, p));
            // Panels adapted to ρ·(1 + λ^q + (1-λ)^q), which bounds every |u|^q ρ of a
            // non-negative linear u up to a factor.
            let (_, panels) = adapted_panels(
                |x| {
                    let l = (x - xa) / h;
                    Ok(rho(x)?.1 * (1.0 + powf(l, q) + powf(1.0 - l, q)))
                },
                &breaks,
                Tolerance { abs: 1e-300, rel: 1e-11, max_panels: 2000 },
            )?;
            let mut nodes = Vec::with_capacity(21 * panels.len());
            for (a, b) in panels {
                for pt in rule_points(a, b) {
                    nodes.push(((pt.x - xa) / h, pt.wk * rho(pt.x)?.1));
                }
            }
            norm_nodes.push(nodes);
        }
        Ok(PreparedGrid { ln_r: ln_r.to_vec(), p, q, energy_coef, norm_nodes, core })
    }

    /// Node positions `log r_i`.
    pub fn log_radii(&self) -> &[f64] {
        &self.ln_r
    }

    /// Number of segments.
    pub fn segments(&self) -> usize {
        self.energy_coef.len()
    }

    /// Energy of segment `i` with end values `a`, `b`.
    pub fn segment_energy(&self, i: usize, a: f64, b: f64) -> f64 {
        let d = (b - a).abs();
        if d == 0.0 {
            0.0
        } else {
            self.energy_coef[i] * powf(d, self.p)
        }
    }

    /// Norm contribution of segment `i` with end values `a`, `b`.
    pub fn segment_norm(&self, i: usize, a: f64, b: f64) -> f64 {
        if a == 0.0 && b == 0.0 {
            return 0.0;
        }
        let q = self.q;
        self.norm_nodes[i].iter().map(|&(l, w)| w * powf((a + l * (b - a)).abs(), q)).sum()
    }

    /// Norm contribution of the ball below the first node.
    pub fn core_norm(&self, u0: f64) -> f64 {
        if u0 == 0.0 {
            0.0
        } else {
            self.core * powf(u0.abs(), self.q)
        }
    }

    /// `(energy, norm)` for node values `values` (last one zero).
    pub fn evaluate(&self, values: &[f64]) -> (f64, f64) {
        let mut e = 0.0;
        let mut d = self.core_norm(values[0]);
        for i in 0..self.segments() {
            e += self.segment_energy(i, values[i], values[i + 1]);
            d += self.segment_norm(i, values[i], values[i + 1]);
        }
        (e, d)
    }

    /// `energy / norm^{p/q}`.
    pub fn quotient(&self, values: &[f64]) -> f64 {
        let (e, d) = self.evaluate(values);
        e / powf(d, self.p / self.q)
    }
}

// Breaks in x for a segment, geometric in depth for very wide segments.
fn sub_breaks(xa: f64, xb: f64) -> Vec<f64> {
    let span = xb - xa;
    if span <= 1.0 {
        return alloc::vec![xa, xb];
    }
    depth_breaks(0.0, span).iter().rev().map(|d| xb - d).collect()
}
