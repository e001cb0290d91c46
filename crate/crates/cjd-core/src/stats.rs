//! Small statistics toolbox: compensated summation, batch-means standard
//! errors, and log-slope fits shared by the estimators.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

/// Kahan-compensated running sum. Used everywhere an ensemble is reduced so
/// that the reported statistics do not depend on summation granularity
/// beyond one rounding.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Compensated sum of a slice.
pub fn ksum(xs: &[f64]) -> f64 {
    let mut s = KahanSum::new();
    for &x in xs {
        s.add(x);
    }
    s.value()
}

/// Sample mean (compensated).
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    ksum(xs) / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    let mut s = KahanSum::new();
    for &x in xs {
        s.add((x - m) * (x - m));
    }
    s.value() / (n - 1) as f64
}

/// Standard error of the sample mean.
pub fn stderr_of_mean(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    (variance(xs) / n as f64).sqrt()
}

/// Mean and batch-means standard error for a (possibly autocorrelated)
/// sequence, using `floor(sqrt(n))` batches. With fewer than four points the
/// stderr falls back to the i.i.d. formula.
pub fn batch_means(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let m = mean(xs);
    if n < 4 {
        return (m, if n < 2 { 0.0 } else { stderr_of_mean(xs) });
    }
    let k = (n as f64).sqrt().floor() as usize;
    let b = n / k; // batch length
    let mut bms = Vec::with_capacity(k);
    for i in 0..k {
        bms.push(mean(&xs[i * b..(i + 1) * b]));
    }
    let se = stderr_of_mean(&bms);
    (m, if se.is_nan() { 0.0 } else { se })
}

/// Weighted mean of `values` with nonnegative weights (not necessarily
/// normalized).
pub fn weighted_mean(values: &[f64], weights: &[f64]) -> f64 {
    debug_assert_eq!(values.len(), weights.len());
    let mut num = KahanSum::new();
    let mut den = KahanSum::new();
    for (&v, &w) in values.iter().zip(weights) {
        num.add(v * w);
        den.add(w);
    }
    num.value() / den.value()
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return f64::NAN;
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = KahanSum::new();
    let mut sxx = KahanSum::new();
    for (&xi, &yi) in x.iter().zip(y) {
        sxy.add((xi - mx) * (yi - my));
        sxx.add((xi - mx) * (xi - mx));
    }
    sxy.value() / sxx.value()
}

/// Outcome of fitting the exponential rate of a nonnegative trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogSlope {
    /// Least-squares slope of `ln value` over the fit window.
    Fitted(f64),
    /// The trajectory hit the numerical absorption radius; the slope is
    /// reported as the given floor (the fastest decay resolvable over the
    /// window).
    Absorbed(f64),
    /// The trajectory diverged before enough of the window existed; the
    /// slope is reported as the given ceiling.
    Diverged(f64),
}

impl LogSlope {
    pub fn value(self) -> f64 {
        match self {
            LogSlope::Fitted(s) | LogSlope::Absorbed(s) | LogSlope::Diverged(s) => s,
        }
    }
}

/// Fit the exponential rate of `values` (a nonnegative series on `times`)
/// over the window `t >= window_start`.
///
/// * values below `absorption` end the usable series; when that happens the
///   result is `Absorbed(floor)` with `floor = (ln absorption − ln v0) / span`
///   where `span` is the fit window length: decay too fast to resolve.
/// * a series truncated by divergence (shorter than `times`, signalled by
///   `diverged = true`) that leaves fewer than two window points yields
///   `Diverged(ceiling)`; with two or more points the positive prefix slope
///   is fitted and returned as `Diverged(slope)`.
pub fn fit_log_slope(
    times: &[f64],
    values: &[f64],
    window_start: f64,
    absorption: f64,
    diverged: bool,
    divergence_radius: f64,
) -> LogSlope {
    debug_assert_eq!(times.len(), values.len());
    let horizon = times.last().copied().unwrap_or(0.0);
    let span = (horizon - window_start).max(f64::MIN_POSITIVE);
    let v0 = values.first().copied().unwrap_or(1.0).max(absorption);

    let mut ts = Vec::new();
    let mut ls = Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        if v < absorption {
            let floor = (absorption.ln() - v0.ln()) / span;
            return LogSlope::Absorbed(floor);
        }
        if t >= window_start {
            ts.push(t);
            ls.push(v.ln());
        }
    }
    if diverged {
        if ts.len() < 2 {
            let ceiling = (divergence_radius.ln() - v0.ln()) / span;
            return LogSlope::Diverged(ceiling);
        }
        return LogSlope::Diverged(ols_slope(&ts, &ls));
    }
    LogSlope::Fitted(ols_slope(&ts, &ls))
}
