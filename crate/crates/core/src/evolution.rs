//! Wave evolution `ψ_tt - ψ_xx + Vψ = 0` at an observer: spectral
//! representation through `Im G`, finite differences and the free closed
//! form.
//!
//! The spectral λ-integrals `∫ sin(tλ) ω(λ) dλ` are evaluated on a natural
//! cubic spline of `ω` with exact trigonometric moments on every interval,
//! so the cost per time is independent of `t`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::spectral::{resonance_and_bound_states, JostPair, KernelRegime, SpectralContext};

type C = Complex64;

/// Initial displacement or velocity profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Zero,
    /// Gaussian truncated at ten standard deviations.
    Gaussian { center: f64, sigma: f64, amplitude: f64 },
    /// `A exp(1 - 1/(1-u²))`, `u = (x - center)/radius`.
    Bump { center: f64, radius: f64, amplitude: f64 },
    Indicator { lo: f64, hi: f64, amplitude: f64 },
}

impl Profile {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Gaussian { center, sigma, amplitude } => {
                let u = (x - center) / sigma;
                if u.abs() > 10.0 {
                    0.0
                } else {
                    amplitude * (-0.5 * u * u).exp()
                }
            }
            Profile::Bump { center, radius, amplitude } => {
                let u = (x - center) / radius;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    amplitude * (1.0 - 1.0 / (1.0 - u * u)).exp()
                }
            }
            Profile::Indicator { lo, hi, amplitude } => {
                if x >= lo && x <= hi {
                    amplitude
                } else {
                    0.0
                }
            }
        }
    }

    /// Derivative (zero for the indicator away from its jumps).
    pub fn deriv(&self, x: f64) -> f64 {
        match *self {
            Profile::Zero | Profile::Indicator { .. } => 0.0,
            Profile::Gaussian { center, sigma, .. } => -(x - center) / (sigma * sigma) * self.value(x),
            Profile::Bump { center, radius, .. } => {
                let u = (x - center) / radius;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    let q = 1.0 - u * u;
                    -2.0 * u / (q * q) / radius * self.value(x)
                }
            }
        }
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            Profile::Zero => None,
            Profile::Gaussian { center, sigma, .. } => Some((center - 10.0 * sigma, center + 10.0 * sigma)),
            Profile::Bump { center, radius, .. } => Some((center - radius, center + radius)),
            Profile::Indicator { lo, hi, .. } => Some((lo, hi)),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Profile::Zero => true,
            Profile::Gaussian { sigma, .. } => sigma > 0.0,
            Profile::Bump { radius, .. } => radius > 0.0,
            Profile::Indicator { lo, hi, .. } => hi > lo,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Contract(format!("degenerate profile {self:?}")))
        }
    }
}

/// Initial data `(ψ, ψ_t)(0) = (f, g)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CauchyData {
    pub f: Profile,
    pub g: Profile,
}

impl CauchyData {
    pub fn new(f: Profile, g: Profile) -> Result<CauchyData> {
        f.validate()?;
        g.validate()?;
        Ok(CauchyData { f, g })
    }

    /// Hull of both supports.
    pub fn support(&self) -> Option<(f64, f64)> {
        match (self.f.support(), self.g.support()) {
            (None, None) => None,
            (Some(s), None) | (None, Some(s)) => Some(s),
            (Some(a), Some(b)) => Some((a.0.min(b.0), a.1.max(b.1))),
        }
    }

    /// `<x>^{α+1}`-weighted L¹ norms of `f`, `f'` and `g`.
    pub fn norm_weights(&self, alpha: f64) -> [f64; 3] {
        let Some((a, b)) = self.support() else { return [0.0; 3] };
        let (xs, ws) = composite_nodes(a, b, &[], 0.25, 12);
        let mut out = [0.0; 3];
        for (x, w) in xs.iter().zip(&ws) {
            let weight = (1.0 + x * x).sqrt().powf(alpha + 1.0) * w;
            out[0] += weight * self.f.value(*x).abs();
            out[1] += weight * self.f.deriv(*x).abs();
            out[2] += weight * self.g.value(*x).abs();
        }
        out
    }
}

/// Composite Gauss–Legendre nodes on `[a, b]` with the given breakpoints
/// and panel width at most `width`.
pub fn composite_nodes(a: f64, b: f64, breaks: &[f64], width: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(n);
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&c| c > a && c < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo <= 0.0 {
            continue;
        }
        let m = ((hi - lo) / width).ceil().max(1.0) as usize;
        let h = (hi - lo) / m as f64;
        for p in 0..m {
            let left = lo + p as f64 * h;
            for (x, wt) in gx.iter().zip(&gw) {
                xs.push(left + 0.5 * h * (x + 1.0));
                ws.push(0.5 * h * wt);
            }
        }
    }
    (xs, ws)
}

/// Smooth cutoff: 1 on `[0, δ]`, 0 beyond `2δ`, `C^∞` in between.
pub fn chi(lambda: f64, delta: f64) -> f64 {
    step_down(lambda / delta - 1.0)
}

/// Smooth step from 1 (`s <= 0`) to 0 (`s >= 1`).
fn step_down(s: f64) -> f64 {
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let e = |v: f64| (-1.0 / v).exp();
        e(1.0 - s) / (e(1.0 - s) + e(s))
    }
}

/// `∫_0^h u^n e^{itu} du` for `n = 0..=3`.
fn moments(h: f64, t: f64) -> [C; 4] {
    let mut out = [C::new(0.0, 0.0); 4];
    let th = t * h;
    if th.abs() < 1.5 {
        for (n, slot) in out.iter_mut().enumerate() {
            // Σ (it)^k h^{n+k+1} / (k! (n+k+1))
            let mut acc = C::new(0.0, 0.0);
            let mut pw = C::new(h.powi(n as i32 + 1), 0.0);
            for k in 0..60 {
                let term = pw / (n + k + 1) as f64;
                acc += term;
                if term.norm() < 1e-18 * acc.norm() {
                    break;
                }
                pw = pw * C::new(0.0, th) / (k + 1) as f64;
            }
            *slot = acc;
        }
    } else {
        let e = C::from_polar(1.0, th);
        let it = C::new(0.0, t);
        out[0] = (e - 1.0) / it;
        let mut hn = 1.0;
        for n in 1..4 {
            hn *= h;
            out[n] = (e * hn - out[n - 1] * n as f64) / it;
        }
    }
    out
}

/// Spectral weight `ω` on a λ grid, with a power-law head on `[0, λ_0]`
/// and an optional `η e^{-λ²}/λ` part integrated in closed form.
#[derive(Debug, Clone, Serialize)]
pub struct OscillatoryWeight {
    pub lambda_grid: Vec<f64>,
    pub omega_values: Vec<f64>,
    pub cutoff_delta: f64,
    pub support_end: f64,
    /// `ω(λ) ≈ ω(λ_0) (λ/λ_0)^p` below the first grid point.
    pub head_power: usize,
    pub singular_residue: f64,
    #[serde(skip)]
    coeffs: Vec<[f64; 4]>,
}

impl OscillatoryWeight {
    pub fn new(lambda_grid: Vec<f64>, omega_values: Vec<f64>, head_power: usize) -> Result<OscillatoryWeight> {
        let n = lambda_grid.len();
        if n < 3 || omega_values.len() != n {
            return Err(Error::Contract("weight needs at least three matching samples".into()));
        }
        if lambda_grid[0] <= 0.0 || lambda_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Contract("λ grid must be positive and increasing".into()));
        }
        let coeffs = natural_spline(&lambda_grid, &omega_values);
        let support_end = lambda_grid[n - 1];
        Ok(OscillatoryWeight {
            lambda_grid,
            omega_values,
            cutoff_delta: 0.0,
            support_end,
            head_power,
            singular_residue: 0.0,
            coeffs,
        })
    }

    /// Samples `f` on `grid`.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: Vec<f64>, f: F, head_power: usize) -> Result<OscillatoryWeight> {
        let v = grid.iter().map(|&l| f(l)).collect();
        Self::new(grid, v, head_power)
    }

    /// Spline interpolant (head law below the grid, zero beyond it).
    pub fn eval(&self, lambda: f64) -> f64 {
        let g = &self.lambda_grid;
        if lambda <= g[0] {
            return self.omega_values[0] * (lambda / g[0]).powi(self.head_power as i32);
        }
        if lambda > self.support_end {
            return 0.0;
        }
        let i = (g.partition_point(|&x| x <= lambda) - 1).min(g.len() - 2);
        let u = lambda - g[i];
        let [a, b, c, d] = self.coeffs[i];
        a + u * (b + u * (c + u * d))
    }

    fn complex_integral(&self, t: f64) -> C {
        let g = &self.lambda_grid;
        let mut acc = C::new(0.0, 0.0);
        for i in 0..g.len() - 1 {
            let h = g[i + 1] - g[i];
            let m = moments(h, t);
            let [a, b, c, d] = self.coeffs[i];
            acc += C::from_polar(1.0, t * g[i]) * (m[0] * a + m[1] * b + m[2] * c + m[3] * d);
        }
        // head: ω_0 λ_0^{-p} ∫_0^{λ_0} λ^p e^{itλ}
        let p = self.head_power.min(3);
        acc += moments(g[0], t)[p] * (self.omega_values[0] / g[0].powi(p as i32));
        acc
    }
}

/// Natural cubic spline coefficients `[a, b, c, d]` per interval.
fn natural_spline(x: &[f64], y: &[f64]) -> Vec<[f64; 4]> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let mut m = vec![0.0; n];
    if n > 2 {
        let k = n - 2;
        let mut diag = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        let mut sub = vec![0.0; k];
        for i in 0..k {
            diag[i] = 2.0 * (h[i] + h[i + 1]);
            sub[i] = h[i];
            rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h[i + 1] - (y[i + 1] - y[i]) / h[i]);
        }
        // Thomas algorithm; super-diagonal entry of row i is h[i+1]
        for i in 1..k {
            let f = sub[i] / diag[i - 1];
            diag[i] -= f * h[i];
            rhs[i] -= f * rhs[i - 1];
        }
        m[k] = rhs[k - 1] / diag[k - 1];
        for i in (0..k - 1).rev() {
            m[i + 1] = (rhs[i] - h[i + 1] * m[i + 2]) / diag[i];
        }
    }
    (0..n - 1)
        .map(|i| {
            let hi = h[i];
            [
                y[i],
                (y[i + 1] - y[i]) / hi - hi * (2.0 * m[i] + m[i + 1]) / 6.0,
                0.5 * m[i],
                (m[i + 1] - m[i]) / (6.0 * hi),
            ]
        })
        .collect()
}

/// `∫_0^∞ sin(tλ) ω(λ) dλ`.
pub fn oscillatory_integral(w: &OscillatoryWeight, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Contract(format!("t must be nonnegative, got {t}")));
    }
    let mut v = w.complex_integral(t).im;
    if w.singular_residue != 0.0 {
        v += w.singular_residue * 0.5 * PI * libm::erf(0.5 * t);
    }
    Ok(v)
}

/// `∫_0^∞ cos(tλ) ω(λ) dλ`.
pub fn oscillatory_integral_cos(w: &OscillatoryWeight, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Contract(format!("t must be nonnegative, got {t}")));
    }
    if w.singular_residue != 0.0 {
        return Err(Error::Contract("cosine integral of a 1/λ weight diverges".into()));
    }
    Ok(w.complex_integral(t).re)
}

/// Logarithmic grid from `lambda_min` (`per_decade` points per decade)
/// until the spacing reaches `h`, then uniform with step `h` to `lambda_max`.
pub fn lambda_grid(lambda_min: f64, per_decade: usize, h: f64, lambda_max: f64) -> Vec<f64> {
    let r = 10f64.powf(1.0 / per_decade as f64);
    let mut g = vec![lambda_min];
    let mut l = lambda_min;
    while l < lambda_max {
        let step = (l * (r - 1.0)).min(h);
        l += step;
        g.push(l.min(lambda_max));
    }
    if let [.., a, b] = g[..] {
        if b - a < 1e-3 * h {
            g.pop();
            *g.last_mut().unwrap() = lambda_max;
        }
    }
    g
}

/// `∫_z^∞ sin(u)/u du` for `z >= 40` from the auxiliary-function series.
fn sine_integral_tail(z: f64) -> f64 {
    let z2 = z * z;
    let (mut f, mut g) = (0.0, 0.0);
    let (mut tf, mut tg) = (1.0 / z, 1.0 / z2);
    for k in 0..12 {
        f += tf;
        g += tg;
        let k = k as f64;
        tf *= -(2.0 * k + 1.0) * (2.0 * k + 2.0) / z2;
        tg *= -(2.0 * k + 2.0) * (2.0 * k + 3.0) / z2;
    }
    f * z.cos() + g * z.sin()
}

/// `(1/π) ∫_0^∞ sin(sλ)/λ dλ` evaluated numerically: closed-form
/// Gaussian-damped part, spline quadrature of the remainder on
/// `[0, Λ]` and the asymptotic tail beyond `Λ`.
fn dirichlet(s: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    let a = s.abs();
    let cut = 50.0f64.max(50.0 / a);
    let grid = lambda_grid(1e-6, 50, 0.005 / a.max(1.0), cut);
    let w = OscillatoryWeight::from_fn(grid, |l| -(-l * l).exp_m1() / l, 1).expect("valid grid");
    let body = w.complex_integral(a).im;
    let v = (body + 0.5 * PI * libm::erf(0.5 * a) + sine_integral_tail(a * cut)) / PI;
    v * s.signum()
}

/// Free fundamental sine kernel `-(2/π) ∫ sin(tλ) Im G_0(x, x', λ) dλ`
/// with `Im G_0 = -cos(λ|x-x'|)/(2λ)`, by numerical quadrature.
pub fn fundamental_sine_kernel_free(x: f64, x_prime: f64, t: f64) -> f64 {
    let d = (x - x_prime).abs();
    0.5 * (dirichlet(t + d) + dirichlet(t - d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Sine,
    Cosine,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Spectral,
    Fdtd,
    Dalembert,
}

/// `ψ(t, x_obs)` on a time sequence.
#[derive(Debug, Clone, Serialize)]
pub struct EvolutionResult {
    pub observer_x: f64,
    pub times: Vec<f64>,
    pub psi: Vec<f64>,
    pub method: Method,
    /// Per-time bound on the neglected part of the λ-integral (zero for
    /// methods without one).
    pub truncation_estimate: Vec<f64>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl EvolutionResult {
    /// `t, psi, method, truncation_estimate` with a commented header.
    pub fn to_csv(&self, header: &str) -> String {
        let mut out = String::new();
        for line in header.lines() {
            out.push_str(&format!("# {line}\n"));
        }
        for (k, v) in &self.diagnostics {
            out.push_str(&format!("# {k}={v:.16e}\n"));
        }
        out.push_str("t,psi,method,truncation_estimate\n");
        let m = match self.method {
            Method::Spectral => "spectral",
            Method::Fdtd => "fdtd",
            Method::Dalembert => "dalembert",
        };
        for i in 0..self.times.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{m},{:.16e}\n",
                self.times[i], self.psi[i], self.truncation_estimate[i]
            ));
        }
        out
    }
}

/// Quadrature parameters of [`evolve_spectral_with`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralParams {
    pub lambda_min: f64,
    pub per_decade: usize,
    pub h_uniform: f64,
    /// Upper λ limit. When absent it starts at the data's Fourier cutoff
    /// and grows until the weight's tail drops below `tail_threshold`.
    pub lambda_max: Option<f64>,
    pub delta: f64,
    /// Largest panel width of the `x'` quadrature (further limited to
    /// `8/Λ`).
    pub node_width: f64,
    /// Relative Fourier threshold for the automatic `lambda_max`.
    pub fourier_threshold: f64,
    /// The weight is smoothly switched off on `[(1 - taper) Λ, Λ]`, so a
    /// short `Λ` acts as a smooth low-pass filter and leaves no `1/t`
    /// endpoint term.
    pub taper: f64,
    /// Largest weight on `[(1 - taper) Λ, Λ]` relative to its overall
    /// maximum accepted by the automatic `lambda_max`.
    pub tail_threshold: f64,
}

impl Default for SpectralParams {
    fn default() -> Self {
        SpectralParams {
            lambda_min: 1e-6,
            per_decade: 50,
            h_uniform: 0.005,
            lambda_max: None,
            delta: 0.05,
            node_width: 0.25,
            fourier_threshold: 1e-10,
            taper: 0.25,
            tail_threshold: 1e-4,
        }
    }
}

/// Smallest `Λ` beyond which the data's Fourier transform (and `λ f̂`)
/// stays below `threshold` times its L¹ norm.
pub fn fourier_cutoff(data: &CauchyData, threshold: f64) -> f64 {
    let Some((a, b)) = data.support() else { return 1.0 };
    let (xs, ws) = composite_nodes(a, b, &[], 0.02, 12);
    let fv: Vec<f64> = xs.iter().map(|&x| data.f.value(x)).collect();
    let gv: Vec<f64> = xs.iter().map(|&x| data.g.value(x)).collect();
    let norm: f64 = ws.iter().zip(fv.iter().zip(&gv)).map(|(w, (f, g))| w * (f.abs() + g.abs())).sum();
    let transform = |l: f64| {
        let (mut sf, mut sg) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
        for i in 0..xs.len() {
            let e = C::from_polar(ws[i], l * xs[i]);
            sf += e * fv[i];
            sg += e * gv[i];
        }
        sg.norm() + l.max(1.0) * sf.norm()
    };
    let mut last = 0.0;
    let mut l = 0.0;
    // stop well before the node-spacing alias near 2π/0.02
    while l < 250.0 && l < 2.0 * last + 20.0 {
        if transform(l) > threshold * norm {
            last = l;
        }
        l += 0.05;
    }
    last + 0.5
}

/// Largest `Λ` the automatic choice grows to.
pub const MAX_AUTO_LAMBDA: f64 = 250.0;

/// Untapered weights `∫ g Im G` and `∫ f Im G` on the λ grid up to `Λ`.
struct SampledWeights {
    grid: Vec<f64>,
    og: Vec<f64>,
    of: Vec<f64>,
    delta: f64,
    eta_g: f64,
    n_nodes: usize,
    width: f64,
}

impl SampledWeights {
    /// `max |ω|` beyond `frac Λ` over the overall maximum (`λ ω_f` for the
    /// cosine part).
    fn tail_ratio(&self, frac: f64) -> f64 {
        let lmax = self.grid.last().copied().unwrap_or(0.0);
        let (mut tail, mut peak) = (0.0f64, 0.0f64);
        for ((l, g), f) in self.grid.iter().zip(&self.og).zip(&self.of) {
            let v = g.abs().max((l * f).abs());
            peak = peak.max(v);
            if *l >= frac * lmax {
                tail = tail.max(v);
            }
        }
        if peak > 0.0 {
            tail / peak
        } else {
            0.0
        }
    }
}

fn sample_weights(
    ctx: &SpectralContext,
    data: &CauchyData,
    observer_x: f64,
    (use_f, use_g): (bool, bool),
    params: &SpectralParams,
    lambda_max: f64,
    previous: Option<SampledWeights>,
) -> Result<SampledWeights> {
    let free = ctx.model.is_zero();
    let (a, b) = data.support().expect("nonempty data");
    // 12-point panels integrate cos(λx') to double precision while λ·width <= 8
    let width = params.node_width.min(8.0 / lambda_max);
    let (xs, ws) = composite_nodes(a, b, &[observer_x], width, 12);
    let fw: Vec<f64> = xs.iter().zip(&ws).map(|(x, w)| w * data.f.value(*x)).collect();
    let gw: Vec<f64> = xs.iter().zip(&ws).map(|(x, w)| w * data.g.value(*x)).collect();
    let lo = a.min(observer_x);
    let hi = b.max(observer_x);
    let reach = lo.abs().max(hi.abs());
    // the matched kernel is only valid for |x| <= 1/λ
    let delta = params.delta.min(0.45 / reach.max(1e-300));
    let grid = lambda_grid(params.lambda_min, params.per_decade, params.h_uniform, lambda_max);
    let eta_g: f64 = -0.5 * gw.iter().sum::<f64>();

    // samples of a shorter run on the same nodes are reused
    let (mut og, mut of) = (Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len()));
    if let Some(prev) = previous.filter(|p| p.width == width) {
        let k = prev.grid.iter().zip(&grid).take_while(|(a, b)| a.to_bits() == b.to_bits()).count();
        og.extend_from_slice(&prev.og[..k]);
        of.extend_from_slice(&prev.of[..k]);
    }
    let ctx_local = SpectralContext { delta, ..ctx.clone() };
    let samples: Vec<Result<(f64, f64)>> = grid[og.len()..]
        .par_iter()
        .map(|&l| {
            let im_g = |x: &[f64]| -> Result<Vec<f64>> {
                if free {
                    return Ok(x.iter().map(|xp| -(l * (observer_x - xp).abs()).cos() / (2.0 * l)).collect());
                }
                let weight = chi(l, delta);
                let mut out = vec![0.0; x.len()];
                for (regime, wt) in [(KernelRegime::LowMatched, weight), (KernelRegime::DirectJost, 1.0 - weight)] {
                    if wt == 0.0 {
                        continue;
                    }
                    let pair = JostPair::with_regime(&ctx_local, l, lo, hi, &[observer_x], regime)?;
                    let fo = pair.f_plus(observer_x)?.value;
                    let go = pair.f_minus(observer_x)?.value;
                    for (o, &xp) in out.iter_mut().zip(x) {
                        let g = if xp <= observer_x {
                            pair.f_minus(xp)?.value * fo
                        } else {
                            go * pair.f_plus(xp)?.value
                        } / pair.wronskian;
                        *o += wt * g.im;
                    }
                }
                Ok(out)
            };
            let k = im_g(&xs)?;
            let og: f64 = if use_g { k.iter().zip(&gw).map(|(k, w)| k * w).sum() } else { 0.0 };
            let of: f64 = if use_f { k.iter().zip(&fw).map(|(k, w)| k * w).sum() } else { 0.0 };
            Ok((og, of))
        })
        .collect();
    for s in samples {
        let (g, f) = s?;
        og.push(g);
        of.push(f);
    }
    Ok(SampledWeights { grid, og, of, delta, eta_g, n_nodes: xs.len(), width })
}

/// Spectral evolution with default quadrature parameters.
pub fn evolve_spectral(
    ctx: &SpectralContext,
    data: &CauchyData,
    observer_x: f64,
    times: &[f64],
    mode: Mode,
) -> Result<EvolutionResult> {
    evolve_spectral_with(ctx, data, observer_x, times, mode, &SpectralParams::default())
}

/// Evolution by `sin(t√A)/√A g = -(2/π) ∫ sin(tλ) ∫ Im G(x, x', λ) g(x') dx' dλ`
/// and its time derivative for `cos(t√A) f`.
pub fn evolve_spectral_with(
    ctx: &SpectralContext,
    data: &CauchyData,
    observer_x: f64,
    times: &[f64],
    mode: Mode,
    params: &SpectralParams,
) -> Result<EvolutionResult> {
    if times.windows(2).any(|w| w[1] <= w[0]) || times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::Contract("times must be nonnegative and strictly increasing".into()));
    }
    let free = ctx.model.is_zero();
    if !free {
        let r = resonance_and_bound_states(ctx)?;
        if r.resonant {
            return Err(Error::Hypothesis(format!("zero-energy resonance (b_11 = {:.3e})", r.b11)));
        }
        if r.bound_states > 0 {
            return Err(Error::Hypothesis(format!("{} bound state(s)", r.bound_states)));
        }
    }
    if data.support().is_none() {
        let n = times.len();
        return Ok(EvolutionResult {
            observer_x,
            times: times.to_vec(),
            psi: vec![0.0; n],
            method: Method::Spectral,
            truncation_estimate: vec![0.0; n],
            diagnostics: BTreeMap::new(),
        });
    }
    let use_f = !matches!(data.f, Profile::Zero) && mode != Mode::Sine;
    let use_g = !matches!(data.g, Profile::Zero) && mode != Mode::Cosine;
    let auto = params.lambda_max.is_none() && !free;
    let mut lambda_max = params.lambda_max.unwrap_or_else(|| fourier_cutoff(data, params.fourier_threshold));
    // the kernel carries the potential's own Fourier content, so the weight
    // can outlast the data's transform
    let mut previous = None;
    let (sw, tail_ratio) = loop {
        let sw = sample_weights(ctx, data, observer_x, (use_f, use_g), params, lambda_max, previous)?;
        let ratio = sw.tail_ratio(1.0 - params.taper);
        if !auto || ratio <= params.tail_threshold || lambda_max >= MAX_AUTO_LAMBDA {
            break (sw, ratio);
        }
        lambda_max = (1.5 * lambda_max).min(MAX_AUTO_LAMBDA);
        previous = Some(sw);
    };
    let SampledWeights { grid, og: og_raw, of: of_raw, delta, eta_g, n_nodes, .. } = sw;
    let mut og = Vec::with_capacity(grid.len());
    let mut of = Vec::with_capacity(grid.len());
    let taper_width = (params.taper * lambda_max).max(1e-300);
    for ((g, f), l) in og_raw.into_iter().zip(of_raw).zip(&grid) {
        let k = step_down((l - (lambda_max - taper_width)) / taper_width);
        og.push(k * g);
        of.push(k * f);
    }
    let mut sine_w = None;
    if use_g {
        let (vals, residue) = if free {
            (grid.iter().zip(&og).map(|(l, o)| o - eta_g * (-l * l).exp() / l).collect(), eta_g)
        } else {
            (og.clone(), 0.0)
        };
        let mut w = OscillatoryWeight::new(grid.clone(), vals, 1)?;
        w.singular_residue = residue;
        w.cutoff_delta = delta;
        sine_w = Some(w);
    }
    let mut cos_w = None;
    if use_f {
        let vals: Vec<f64> = grid.iter().zip(&of).map(|(l, o)| l * o).collect();
        // λ Im G tends to a constant without a potential, vanishes like λ² otherwise
        let mut w = OscillatoryWeight::new(grid.clone(), vals, if free { 0 } else { 2 })?;
        w.cutoff_delta = delta;
        cos_w = Some(w);
    }
    let tail_g = og.last().copied().unwrap_or(0.0).abs();
    let tail_f = (lambda_max * of.last().copied().unwrap_or(0.0)).abs();
    let mut psi = Vec::with_capacity(times.len());
    let mut trunc = Vec::with_capacity(times.len());
    for &t in times {
        let mut v = 0.0;
        if let Some(w) = &sine_w {
            v += -2.0 / PI * oscillatory_integral(w, t)?;
        }
        if let Some(w) = &cos_w {
            v += -2.0 / PI * oscillatory_integral_cos(w, t)?;
        }
        psi.push(v);
        trunc.push(2.0 / PI * (tail_g + tail_f) / t.max(1.0));
    }
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("lambda_max".into(), lambda_max);
    diagnostics.insert("lambda_min".into(), params.lambda_min);
    diagnostics.insert("n_lambda".into(), grid.len() as f64);
    diagnostics.insert("delta".into(), delta);
    diagnostics.insert("n_nodes".into(), n_nodes as f64);
    diagnostics.insert("tail_ratio".into(), tail_ratio);
    Ok(EvolutionResult { observer_x, times: times.to_vec(), psi, method: Method::Spectral, truncation_estimate: trunc, diagnostics })
}

/// Largest FDTD grid accepted.
pub const FDTD_MAX_POINTS: usize = 20_000_000;

/// Leapfrog finite differences on `[-L, L]`, `L = |x_obs| + t_max + R + 10`,
/// Dirichlet ends out of causal reach; `dt = 0.9 dx`.
pub fn evolve_fdtd(
    model: &crate::potential::PotentialModel,
    data: &CauchyData,
    observer_x: f64,
    t_max: f64,
    dx: f64,
) -> Result<EvolutionResult> {
    if !(dx > 0.0) || !(t_max > 0.0) {
        return Err(Error::Contract("dx and t_max must be positive".into()));
    }
    let radius = data.support().map(|(a, b)| a.abs().max(b.abs())).unwrap_or(0.0);
    let half = observer_x.abs() + t_max + radius + 10.0;
    let left = ((observer_x + half) / dx).ceil() as usize;
    let right = ((half - observer_x) / dx).ceil() as usize;
    let n = left + right + 1;
    if n > FDTD_MAX_POINTS {
        return Err(Error::Sizing { points: n, suggested_dx: 2.0 * half / FDTD_MAX_POINTS as f64 });
    }
    let x = |i: usize| observer_x + (i as f64 - left as f64) * dx;
    let v: Vec<f64> = (0..n).map(|i| model.value(x(i))).collect();
    let dt = 0.9 * dx;
    let r2 = (dt / dx) * (dt / dx);
    let dt2 = dt * dt;
    let steps = (t_max / dt).ceil() as usize;
    let mut prev: Vec<f64> = (0..n).map(|i| data.f.value(x(i))).collect();
    let gv: Vec<f64> = (0..n).map(|i| data.g.value(x(i))).collect();
    let lap = |u: &[f64], i: usize| (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dx * dx);
    let mut cur = vec![0.0; n];
    for i in 1..n - 1 {
        let au = lap(&prev, i) - v[i] * prev[i];
        let ag = lap(&gv, i) - v[i] * gv[i];
        cur[i] = prev[i] + dt * gv[i] + 0.5 * dt2 * au + dt2 * dt / 6.0 * ag;
    }
    let energy = |a: &[f64], b: &[f64]| -> f64 {
        // conserved leapfrog energy between levels a (old) and b (new)
        let mut e = 0.0;
        for i in 0..n {
            let vt = (b[i] - a[i]) / dt;
            e += vt * vt + v[i] * a[i] * b[i];
            if i + 1 < n {
                e += (b[i + 1] - b[i]) * (a[i + 1] - a[i]) / (dx * dx);
            }
        }
        e * dx
    };
    let e0 = energy(&prev, &cur);
    let mut times = Vec::with_capacity(steps + 1);
    let mut psi = Vec::with_capacity(steps + 1);
    times.push(0.0);
    psi.push(prev[left]);
    times.push(dt);
    psi.push(cur[left]);
    let mut next = vec![0.0; n];
    let mut drift: f64 = 0.0;
    for step in 2..=steps {
        for i in 1..n - 1 {
            next[i] = 2.0 * cur[i] - prev[i] + r2 * (cur[i + 1] - 2.0 * cur[i] + cur[i - 1]) - dt2 * v[i] * cur[i];
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
        times.push(step as f64 * dt);
        psi.push(cur[left]);
        if step % 1000 == 0 || step == steps {
            drift = drift.max((energy(&prev, &cur) - e0).abs());
        }
    }
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("dx".into(), dx);
    diagnostics.insert("dt".into(), dt);
    diagnostics.insert("half_width".into(), half);
    diagnostics.insert("energy".into(), e0);
    diagnostics.insert("energy_drift".into(), if e0 != 0.0 { drift / e0.abs() } else { drift });
    let m = times.len();
    Ok(EvolutionResult { observer_x, times, psi, method: Method::Fdtd, truncation_estimate: vec![0.0; m], diagnostics })
}

/// `½[f(x+t) + f(x-t)] + ½ ∫_{x-t}^{x+t} g`.
pub fn dalembert(data: &CauchyData, x: f64, t: f64) -> f64 {
    let mut v = 0.5 * (data.f.value(x + t) + data.f.value(x - t));
    if let Some((a, b)) = data.g.support() {
        let (lo, hi) = ((x - t.abs()).max(a), (x + t.abs()).min(b));
        if hi > lo {
            let (xs, ws) = composite_nodes(lo, hi, &[], 0.1, 20);
            let s: f64 = xs.iter().zip(&ws).map(|(x, w)| w * data.g.value(*x)).sum();
            v += 0.5 * s * t.signum();
        }
    }
    v
}

/// d'Alembert values at the observer as an [`EvolutionResult`].
pub fn evolve_dalembert(data: &CauchyData, observer_x: f64, times: &[f64]) -> EvolutionResult {
    EvolutionResult {
        observer_x,
        times: times.to_vec(),
        psi: times.iter().map(|&t| dalembert(data, observer_x, t)).collect(),
        method: Method::Dalembert,
        truncation_estimate: vec![0.0; times.len()],
        diagnostics: BTreeMap::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{make_inverse_power, make_zero};

    #[test]
    fn moments_match_quadrature() {
        for (h, t) in [(0.3, 0.1), (0.3, 4.0), (0.01, 1000.0), (2.0, 0.7)] {
            let m = moments(h, t);
            for (n, mn) in m.iter().enumerate() {
                let re = crate::quadrature::integrate(|u| u.powi(n as i32) * (t * u).cos(), 0.0, h, 200);
                let im = crate::quadrature::integrate(|u| u.powi(n as i32) * (t * u).sin(), 0.0, h, 200);
                assert!((mn.re - re).abs() < 1e-14 * h.powi(n as i32 + 1).max(1e-300) + 1e-16, "{h} {t} {n}");
                assert!((mn.im - im).abs() < 1e-14 * h.powi(n as i32 + 1).max(1e-300) + 1e-16);
            }
        }
    }

    #[test]
    fn spline_is_exact_on_cubics_away_from_ends() {
        let grid: Vec<f64> = (1..200).map(|i| 0.01 * i as f64).collect();
        let w = OscillatoryWeight::from_fn(grid, |l| l.sin(), 1).unwrap();
        assert!((w.eval(1.0) - 1f64.sin()).abs() < 1e-9);
        assert_eq!(w.eval(5.0), 0.0);
    }

    #[test]
    fn sharp_cutoff_closed_form() {
        let a = 2.0;
        let grid: Vec<f64> = (0..=400).map(|i| 1e-3 + (a - 1e-3) * i as f64 / 400.0).collect();
        // constant weight: head power 0 covers [0, 1e-3]
        let w = OscillatoryWeight::from_fn(grid, |_| 1.0, 0).unwrap();
        for t in [0.0, 0.5, 3.0, 40.0, 900.0] {
            let exact = if t == 0.0 { 0.0 } else { (1.0 - (t * a).cos()) / t };
            assert!((oscillatory_integral(&w, t).unwrap() - exact).abs() < 1e-13, "{t}");
        }
    }

    #[test]
    fn dirichlet_kernel_is_half() {
        for t in [1.0, 5.0, 10.0] {
            assert!((fundamental_sine_kernel_free(0.0, 0.0, t) - 0.5).abs() < 1e-8);
        }
        assert!(fundamental_sine_kernel_free(0.0, 3.0, 2.0).abs() < 1e-8);
    }

    #[test]
    fn dalembert_examples() {
        let d = CauchyData::new(Profile::Zero, Profile::Indicator { lo: -1.0, hi: 1.0, amplitude: 1.0 }).unwrap();
        assert!((dalembert(&d, 0.0, 10.0) - 1.0).abs() < 1e-14);
        assert_eq!(dalembert(&d, 100.0, 10.0), 0.0);
        let f = Profile::Gaussian { center: 0.0, sigma: 1.0, amplitude: 1.0 };
        let d = CauchyData::new(f, Profile::Zero).unwrap();
        assert_eq!(dalembert(&d, 0.3, 0.0), f.value(0.3));
    }

    #[test]
    fn free_spectral_matches_dalembert() {
        let ctx = SpectralContext::new(&make_zero()).unwrap();
        let d = CauchyData::new(
            Profile::Gaussian { center: 0.5, sigma: 1.0, amplitude: 1.0 },
            Profile::Gaussian { center: -1.0, sigma: 1.0, amplitude: 0.7 },
        )
        .unwrap();
        let times = [0.5, 2.0, 7.0, 30.0];
        let r = evolve_spectral(&ctx, &d, 1.5, &times, Mode::Full).unwrap();
        for (t, p) in times.iter().zip(&r.psi) {
            let e = dalembert(&d, 1.5, *t);
            assert!((p - e).abs() < 1e-6 * e.abs().max(1e-3), "{t}: {p} vs {e}");
        }
    }

    #[test]
    fn fdtd_free_and_energy() {
        let m = make_inverse_power(3.0, 1.0, 1.0).unwrap();
        let d = CauchyData::new(Profile::Gaussian { center: 0.0, sigma: 1.0, amplitude: 1.0 }, Profile::Zero).unwrap();
        let r = evolve_fdtd(&m, &d, 5.0, 30.0, 0.05).unwrap();
        assert!(r.diagnostics["energy_drift"] < 1e-6);
        let z = make_zero();
        let r = evolve_fdtd(&z, &d, 5.0, 10.0, 0.05).unwrap();
        let i = r.times.len() - 1;
        assert!((r.psi[i] - dalembert(&d, 5.0, r.times[i])).abs() < 1e-3);
    }
}
