pub mod best;
pub mod gamma;
pub mod ndc;
pub mod potential;
pub mod superlog;
pub mod verify;

/// `n` log-spaced points on `[lo, hi]`; `[lo]` when `n = 1`.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            i if i == n - 1 => hi,
            i => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}
