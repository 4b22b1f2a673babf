//! Gauss–Kronrod 21-point quadrature, fixed and globally adaptive.

use alloc::vec::Vec;

use crate::{Error, Result};

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// One node of the 21-point rule mapped to an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RulePoint {
    /// Abscissa.
    pub x: f64,
    /// Kronrod weight (already scaled by the half-length).
    pub wk: f64,
    /// Embedded Gauss weight (zero at Kronrod-only nodes).
    pub wg: f64,
}

/// The 21 nodes of the Gauss–Kronrod rule on `[a, b]`.
pub fn rule_points(a: f64, b: f64) -> [RulePoint; 21] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [RulePoint { x: c, wk: 0.0, wg: 0.0 }; 21];
    for j in 0..10 {
        let wg = if j % 2 == 1 { WG[j / 2] * h } else { 0.0 };
        let dx = h * XGK[j];
        out[2 * j] = RulePoint { x: c - dx, wk: WGK[j] * h, wg };
        out[2 * j + 1] = RulePoint { x: c + dx, wk: WGK[j] * h, wg };
    }
    out[20] = RulePoint { x: c, wk: WGK[10] * h, wg: 0.0 };
    out
}

/// Single application of the rule: `(kronrod, |kronrod - gauss|)`.
pub fn gk21<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> (f64, f64) {
    let mut k = 0.0;
    let mut g = 0.0;
    for p in rule_points(a, b) {
        let y = f(p.x);
        k += p.wk * y;
        g += p.wg * y;
    }
    (k, (k - g).abs())
}

/// Same as [`gk21`] for integrands that can fail.
pub fn try_gk21<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64) -> Result<(f64, f64)> {
    let mut k = 0.0;
    let mut g = 0.0;
    for p in rule_points(a, b) {
        let y = f(p.x)?;
        k += p.wk * y;
        g += p.wg * y;
    }
    Ok((k, (k - g).abs()))
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    /// Estimate of the integral.
    pub value: f64,
    /// Estimated absolute error (sum of panel `|K - G|`).
    pub error: f64,
    /// Number of panels used.
    pub panels: usize,
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Absolute target.
    pub abs: f64,
    /// Relative target.
    pub rel: f64,
    /// Panel cap.
    pub max_panels: usize,
}

impl Tolerance {
    /// Relative tolerance with a tiny absolute floor.
    pub fn rel(rel: f64) -> Self {
        Tolerance { abs: 1e-300, rel, max_panels: 4000 }
    }
    /// Absolute tolerance.
    pub fn abs(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0, max_panels: 4000 }
    }
}

/// Globally adaptive integration over the panels delimited by `breaks`.
///
/// The panel with the largest error estimate is bisected until the total
/// error meets `max(tol.abs, tol.rel·|value|)`.
pub fn integrate_breaks<F: FnMut(f64) -> Result<f64>>(
    f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Integral> {
    adapt(f, breaks, tol).map(|(r, _)| r)
}

/// Like [`integrate_breaks`], also returning the final panels `(a, b)` in
/// increasing order, so the same rule can be reapplied to other integrands.
pub fn adapted_panels<F: FnMut(f64) -> Result<f64>>(
    f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<(Integral, Vec<(f64, f64)>)> {
    let (r, panels) = adapt(f, breaks, tol)?;
    let mut out: Vec<(f64, f64)> = panels.iter().map(|p| (p.a, p.b)).collect();
    out.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    Ok((r, out))
}

struct Panel {
    a: f64,
    b: f64,
    v: f64,
    e: f64,
}

fn adapt<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<(Integral, Vec<Panel>)> {
    let mut panels: Vec<Panel> = Vec::with_capacity(breaks.len() + 16);
    for w in breaks.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (v, e) = try_gk21(&mut f, w[0], w[1])?;
        panels.push(Panel { a: w[0], b: w[1], v, e });
    }
    loop {
        let value: f64 = panels.iter().map(|p| p.v).sum();
        let error: f64 = panels.iter().map(|p| p.e).sum();
        if !value.is_finite() {
            return Err(Error::Quadrature { value, error });
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok((Integral { value, error, panels: panels.len() }, panels));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.e > acc.1 { (i, p.e) } else { acc });
        let Panel { a, b, .. } = panels[worst];
        let m = 0.5 * (a + b);
        if panels.len() >= tol.max_panels || !(a < m && m < b) {
            // Resolution exhausted: accept only if the error is at rounding level.
            if error <= 64.0 * f64::EPSILON * panels.iter().map(|p| p.v.abs()).sum::<f64>() {
                return Ok((Integral { value, error, panels: panels.len() }, panels));
            }
            return Err(Error::Quadrature { value, error });
        }
        let (v1, e1) = try_gk21(&mut f, a, m)?;
        let (v2, e2) = try_gk21(&mut f, m, b)?;
        panels[worst] = Panel { a, b: m, v: v1, e: e1 };
        panels.push(Panel { a: m, b, v: v2, e: e2 });
    }
}

/// Globally adaptive integration over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> Result<f64>>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<Integral> {
    integrate_breaks(f, &[a, b], tol)
}
