//! Tail exponents and comparison metrics for time series.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evolution::EvolutionResult;
use crate::linalg::least_squares;

/// Comparisons ignore samples where both series are below this.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Fits whose log-space residual RMS exceeds this are flagged unreliable.
pub const RELIABILITY_RMS: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    LogLogLs,
    LocalIndex,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub window: (f64, f64),
    /// `p(t)` at log-spaced times inside the window.
    pub local_index_series: BTreeMap<String, f64>,
    pub method: FitMethod,
    pub residual_rms: f64,
    pub reliable: bool,
    pub samples: usize,
    /// SHA-256 of the fitted `(t, ψ)` samples.
    pub series_hash: String,
}

impl FitReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit report serializes")
    }
}

/// SHA-256 over the bit patterns of `times` and `psi`.
pub fn series_hash(times: &[f64], psi: &[f64]) -> String {
    let mut h = Sha256::new();
    for (t, p) in times.iter().zip(psi) {
        h.update(t.to_bits().to_le_bytes());
        h.update(p.to_bits().to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Derivative at `t[i]` of the Lagrange interpolant through the samples
/// `idx` (which contain `i`).
fn stencil_derivative(t: &[f64], y: &[f64], i: usize, idx: &[usize]) -> f64 {
    let x = t[i];
    let mut d = 0.0;
    for &j in idx {
        let w = if j == i {
            idx.iter().filter(|&&k| k != j).map(|&k| 1.0 / (t[j] - t[k])).sum::<f64>()
        } else {
            let mut p = 1.0 / (t[j] - t[i]);
            for &k in idx {
                if k != j && k != i {
                    p *= (x - t[k]) / (t[j] - t[k]);
                }
            }
            p
        };
        d += w * y[j];
    }
    d
}

/// Stencil spacing relative to `t`: wide enough that sample noise is not
/// amplified by `t/Δt`, narrow enough for a `1e-8` truncation error.
const STENCIL_SPAN: f64 = 0.005;

fn index_at(times: &[f64], psi: &[f64], i: usize) -> Result<f64> {
    let n = times.len();
    if n < 3 || i == 0 || i + 1 >= n {
        return Err(Error::Contract(format!("t = {} is not interior to the series", times[i.min(n - 1)])));
    }
    let dt = 0.5 * (times[i + 1] - times[i - 1]);
    let want = ((STENCIL_SPAN * times[i].abs() / dt).floor() as usize).max(1);
    let stride = want.min(i / 2).min((n - 1 - i) / 2);
    let idx: Vec<usize> = if stride >= 1 {
        (0..5).map(|k| i + k * stride - 2 * stride).collect()
    } else {
        vec![i - 1, i, i + 1]
    };
    let (lo, hi) = (idx[0], idx[idx.len() - 1]);
    let s = psi[i].signum();
    if psi[lo..=hi].iter().any(|p| *p == 0.0 || p.signum() != s) {
        return Err(Error::Oscillation(times[i]));
    }
    Ok(-times[i] * stencil_derivative(times, psi, i, &idx) / psi[i])
}

fn check_series(times: &[f64], psi: &[f64]) -> Result<()> {
    if times.len() != psi.len() || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Contract("series times must be strictly increasing and match ψ".into()));
    }
    Ok(())
}

/// `p(t) = -t ψ'(t)/ψ(t)` from a centered five-point stencil on the stored
/// samples (stride chosen so the span is about `0.01 t`), interpolated
/// linearly between samples.
pub fn local_power_index(series: &EvolutionResult, t: f64) -> Result<f64> {
    local_power_index_of(&series.times, &series.psi, t)
}

pub fn local_power_index_of(times: &[f64], psi: &[f64], t: f64) -> Result<f64> {
    check_series(times, psi)?;
    let n = times.len();
    if n < 3 || !(t > times[0] && t < times[n - 1]) {
        return Err(Error::Contract(format!("t = {t} is not interior to the series")));
    }
    let k = times.partition_point(|&s| s <= t).max(1);
    let i = k - 1;
    if (times[i] - t).abs() <= 1e-12 * t.abs().max(1.0) {
        return index_at(times, psi, i);
    }
    if (times[k] - t).abs() <= 1e-12 * t.abs().max(1.0) {
        return index_at(times, psi, k);
    }
    let (i0, i1) = (i.max(1), k.min(n - 2));
    let (p0, p1) = (index_at(times, psi, i0)?, index_at(times, psi, i1)?);
    if i0 == i1 {
        return Ok(p0);
    }
    Ok(p0 + (p1 - p0) * (t - times[i0]) / (times[i1] - times[i0]))
}

/// Least-squares slope of `log|ψ|` against `log t` over `window`.
pub fn fit_tail_exponent(series: &EvolutionResult, window: (f64, f64)) -> Result<FitReport> {
    fit_tail_exponent_of(&series.times, &series.psi, window)
}

pub fn fit_tail_exponent_of(times: &[f64], psi: &[f64], window: (f64, f64)) -> Result<FitReport> {
    check_series(times, psi)?;
    let (a, b) = window;
    if !(a > 0.0 && b > a) {
        return Err(Error::Contract(format!("invalid window [{a}, {b}]")));
    }
    let n = times.len();
    if n == 0 || a < times[0] || b > times[n - 1] {
        return Err(Error::Contract(format!("window [{a}, {b}] outside the series range")));
    }
    let idx: Vec<usize> = (0..n).filter(|&i| times[i] >= a && times[i] <= b).collect();
    if idx.len() < 3 {
        return Err(Error::Contract("fewer than three samples in the window".into()));
    }
    let s = psi[idx[0]].signum();
    for &i in &idx {
        if psi[i] == 0.0 || psi[i].signum() != s {
            return Err(Error::Oscillation(times[i]));
        }
    }
    let lt: Vec<f64> = idx.iter().map(|&i| times[i].ln()).collect();
    let ly: Vec<f64> = idx.iter().map(|&i| psi[i].abs().ln()).collect();
    let mean = lt.iter().sum::<f64>() / lt.len() as f64;
    let centered: Vec<f64> = lt.iter().map(|x| x - mean).collect();
    let ones = vec![1.0; lt.len()];
    let (coef, _) = least_squares(&[ones, centered.clone()], &ly)
        .ok_or_else(|| Error::Contract("degenerate fit window".into()))?;
    let m = lt.len() as f64;
    let rss: f64 = centered.iter().zip(&ly).map(|(x, y)| (y - coef[0] - coef[1] * x).powi(2)).sum();
    let sxx: f64 = centered.iter().map(|x| x * x).sum();
    let stderr = (rss / (m - 2.0).max(1.0) / sxx).sqrt();
    let residual_rms = (rss / m).sqrt();

    let mut local = BTreeMap::new();
    let k = 24;
    for j in 0..=k {
        let t = a * (b / a).powf(j as f64 / k as f64);
        if let Ok(p) = local_power_index_of(times, psi, t) {
            local.insert(format!("{t:.6e}"), p);
        }
    }
    let sel_t: Vec<f64> = idx.iter().map(|&i| times[i]).collect();
    let sel_p: Vec<f64> = idx.iter().map(|&i| psi[i]).collect();
    Ok(FitReport {
        exponent: -coef[1],
        exponent_stderr: stderr,
        window,
        local_index_series: local,
        method: FitMethod::LogLogLs,
        residual_rms,
        reliable: residual_rms < RELIABILITY_RMS,
        samples: idx.len(),
        series_hash: series_hash(&sel_t, &sel_p),
    })
}

/// Largest log-length window inside `bounds` on which the local power
/// index varies by less than `spread`, requiring `t_hi/t_lo >= min_ratio`.
pub fn auto_window(times: &[f64], psi: &[f64], bounds: (f64, f64), spread: f64, min_ratio: f64) -> Result<(f64, f64)> {
    check_series(times, psi)?;
    let n = times.len();
    if n < 5 {
        return Err(Error::Contract("series too short for window selection".into()));
    }
    let lo = bounds.0.max(times[1]);
    let hi = bounds.1.min(times[n - 2]);
    if !(hi > lo) {
        return Err(Error::Contract(format!("bounds [{}, {}] outside the series", bounds.0, bounds.1)));
    }
    let k = 200;
    let mut pts = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let t = lo * (hi / lo).powf(j as f64 / k as f64);
        pts.push((t, local_power_index_of(times, psi, t).ok()));
    }
    let mut best: Option<(usize, usize)> = None;
    for i in 0..pts.len() {
        let (mut pmin, mut pmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for j in i..pts.len() {
            let Some(p) = pts[j].1 else { break };
            pmin = pmin.min(p);
            pmax = pmax.max(p);
            if pmax - pmin >= spread {
                break;
            }
            if pts[j].0 / pts[i].0 >= min_ratio && best.map_or(true, |(a, b)| j - i > b - a) {
                best = Some((i, j));
            }
        }
    }
    best.map(|(i, j)| (pts[i].0, pts[j].0))
        .ok_or_else(|| Error::Contract(format!("no window in [{lo}, {hi}] with index spread < {spread}")))
}

/// Fit over the automatically selected window.
pub fn fit_tail_auto(series: &EvolutionResult, bounds: (f64, f64)) -> Result<FitReport> {
    let w = auto_window(&series.times, &series.psi, bounds, 0.1, 2.0)?;
    fit_tail_exponent(series, w)
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareMetrics {
    pub max_relative: f64,
    pub mean_relative: f64,
    pub samples: usize,
    /// Pearson correlation of the local power indices where both exist.
    pub index_correlation: Option<f64>,
}

/// Four-point Lagrange interpolation of `(t, y)` at `x` inside the range.
fn cubic_interp(t: &[f64], y: &[f64], x: f64) -> f64 {
    let n = t.len();
    if n < 4 {
        let k = t.partition_point(|&s| s <= x).clamp(1, n - 1);
        let (a, b) = (t[k - 1], t[k]);
        return y[k - 1] + (y[k] - y[k - 1]) * (x - a) / (b - a);
    }
    let k = t.partition_point(|&s| s <= x);
    let lo = k.saturating_sub(2).min(n - 4);
    let mut v = 0.0;
    for j in lo..lo + 4 {
        let mut l = 1.0;
        for m in lo..lo + 4 {
            if m != j {
                l *= (x - t[m]) / (t[j] - t[m]);
            }
        }
        v += l * y[j];
    }
    v
}

/// Errors of `b` relative to `a` on `a`'s samples inside the common range.
pub fn compare_series(a: &EvolutionResult, b: &EvolutionResult) -> Result<CompareMetrics> {
    compare_series_of(&a.times, &a.psi, &b.times, &b.psi)
}

pub fn compare_series_of(ta: &[f64], pa: &[f64], tb: &[f64], pb: &[f64]) -> Result<CompareMetrics> {
    check_series(ta, pa)?;
    check_series(tb, pb)?;
    if ta.is_empty() || tb.len() < 2 {
        return Err(Error::Contract("empty series".into()));
    }
    let (lo, hi) = (ta[0].max(tb[0]), ta[ta.len() - 1].min(tb[tb.len() - 1]));
    if hi < lo {
        return Err(Error::Contract("series windows are disjoint".into()));
    }
    let mut max_rel: f64 = 0.0;
    let mut sum = 0.0;
    let mut count = 0;
    let (mut ia, mut ib) = (Vec::new(), Vec::new());
    for (i, (&t, &x)) in ta.iter().zip(pa).enumerate() {
        if t < lo || t > hi {
            continue;
        }
        let y = cubic_interp(tb, pb, t);
        if x.abs().max(y.abs()) <= NOISE_FLOOR {
            continue;
        }
        let r = (x - y).abs() / x.abs().max(NOISE_FLOOR);
        max_rel = max_rel.max(r);
        sum += r;
        count += 1;
        if i > 0 && i + 1 < ta.len() && t > tb[1] && t < tb[tb.len() - 2] {
            if let (Ok(p), Ok(q)) = (index_at(ta, pa, i), local_power_index_of(tb, pb, t)) {
                ia.push(p);
                ib.push(q);
            }
        }
    }
    if count == 0 {
        return Err(Error::Contract("no samples above the noise floor in the common window".into()));
    }
    Ok(CompareMetrics {
        max_relative: max_rel,
        mean_relative: sum / count as f64,
        samples: count,
        index_correlation: correlation(&ia, &ib),
    })
}

fn correlation(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 3 {
        return None;
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(f: impl Fn(f64) -> f64, a: f64, b: f64, dt: f64) -> (Vec<f64>, Vec<f64>) {
        let n = ((b - a) / dt).round() as usize;
        let t: Vec<f64> = (0..=n).map(|i| a + i as f64 * dt).collect();
        let p = t.iter().map(|&x| f(x)).collect();
        (t, p)
    }

    #[test]
    fn index_examples() {
        let (t, p) = sampled(|t| t.powi(-3), 90.0, 110.0, 0.1);
        assert!((local_power_index_of(&t, &p, 100.0).unwrap() - 3.0).abs() < 1e-6);
        let (t, p) = sampled(|t| t.powi(-3) * (1.0 + 10.0 / t), 90.0, 110.0, 0.1);
        let expect = (3.0 + 0.4) / 1.1;
        assert!((local_power_index_of(&t, &p, 100.0).unwrap() - expect).abs() < 1e-6);
        let (t, p) = sampled(|_| 2.5, 90.0, 110.0, 0.1);
        assert!(local_power_index_of(&t, &p, 100.0).unwrap().abs() < 1e-12);
        let (t, p) = sampled(|t| t.sin(), 90.0, 110.0, 0.1);
        assert!(matches!(local_power_index_of(&t, &p, 100.5), Err(Error::Oscillation(_))));
    }

    #[test]
    fn fit_and_compare() {
        let (t, p) = sampled(|t| 7.0 * t.powi(-3), 10.0, 1000.0, 0.5);
        let r = fit_tail_exponent_of(&t, &p, (10.0, 1000.0)).unwrap();
        assert!((r.exponent - 3.0).abs() < 1e-6 && r.reliable);
        let q: Vec<f64> = p.iter().map(|x| 1.01 * x).collect();
        let c = compare_series_of(&t, &p, &t, &q).unwrap();
        assert!((c.max_relative - 0.01).abs() < 1e-12 && (c.mean_relative - 0.01).abs() < 1e-12);
        let c = compare_series_of(&t, &p, &t, &p).unwrap();
        assert_eq!(c.max_relative, 0.0);
        assert!(compare_series_of(&t, &p, &[2000.0, 3000.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn auto_window_finds_the_tail() {
        let (t, p) = sampled(|t| t.powi(-3) + 50.0 * t.powi(-4), 50.0, 1000.0, 0.25);
        let w = auto_window(&t, &p, (60.0, 1000.0), 0.1, 2.0).unwrap();
        assert!(w.1 > 990.0 && w.0 > 60.0);
        let r = fit_tail_exponent_of(&t, &p, w).unwrap();
        assert!((r.exponent - 3.0).abs() < 0.15);
    }
}
