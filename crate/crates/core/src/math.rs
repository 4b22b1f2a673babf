//! Thin `libm` wrappers so the numerical code reads like ordinary float code.

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub fn ln1p(x: f64) -> f64 {
    libm::log1p(x)
}
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}
#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
#[inline]
#[cfg(test)]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}
#[inline]
pub fn tgamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Surface measure of the unit sphere in `R^n`, `2 π^{n/2} / Γ(n/2)`.
pub fn unit_sphere_measure(n: u32) -> f64 {
    let half = n as f64 / 2.0;
    2.0 * powf(core::f64::consts::PI, half) / tgamma(half)
}

/// `((1+x)^c - 1)/c`-style helper: `expm1(c·y)/c` with the `c → 0` limit `y`.
#[inline]
pub fn expm1_over(c: f64, y: f64) -> f64 {
    if (c * y).abs() < 1e-300 || c.abs() < 1e-14 {
        y * (1.0 + 0.5 * c * y)
    } else {
        expm1(c * y) / c
    }
}
