//! Independent reference computations: plain RK4 shooting and brute-force
//! quadrature, sharing nothing with the library's Volterra solvers.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use wavetail::potential::PotentialModel;

/// Classical RK4 for `y'' = q(x) y` with complex `y`, stepping from `x0`
/// to `x1` in `n` equal steps.
pub fn rk4_linear(q: impl Fn(f64) -> C, x0: f64, x1: f64, y: C, dy: C, n: usize) -> (C, C) {
    let h = (x1 - x0) / n as f64;
    let (mut y, mut dy) = (y, dy);
    for k in 0..n {
        let x = x0 + h * k as f64;
        let qa = q(x);
        let qm = q(x + 0.5 * h);
        let qb = q(x + h);
        let (k1y, k1d) = (dy, qa * y);
        let (k2y, k2d) = (dy + 0.5 * h * k1d, qm * (y + 0.5 * h * k1y));
        let (k3y, k3d) = (dy + 0.5 * h * k2d, qm * (y + 0.5 * h * k2y));
        let (k4y, k4d) = (dy + h * k3d, qb * (y + h * k3y));
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        dy += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    }
    (y, dy)
}

/// `m_+(x, λ) = e^{-iλx} f_+(x, λ)` for `V = c x^{-3}` on `x >= 2`,
/// shot inward from `X = 1e4` with first-order Born data there.
pub fn jost_m_plus_alpha3(c: f64, lambda: f64, x: f64) -> C {
    let big: f64 = 1e4;
    let i = C::i();
    let m = 1.0 + i * c / (4.0 * lambda * big * big);
    let dm = -i * c / (2.0 * lambda * big.powi(3));
    let ph = C::from_polar(1.0, lambda * big);
    let f = ph * m;
    let df = ph * (i * lambda * m + dm);
    let n = ((big - x) / 0.005).ceil() as usize;
    let (fx, _) = rk4_linear(|y| C::new(c * y.powi(-3) - lambda * lambda, 0.0), big, x, f, df, n);
    fx * C::from_polar(1.0, -lambda * x)
}

/// Real RK4 on `u'' = (V - k2) u` with steps no longer than `hmax`.
pub fn shoot(model: &PotentialModel, k2: f64, x0: f64, x1: f64, u: f64, du: f64, hmax: f64) -> (f64, f64) {
    let n = ((x1 - x0).abs() / hmax).ceil().max(1.0) as usize;
    let (y, d) = rk4_linear(|x| C::new(model.value(x) - k2, 0.0), x0, x1, C::new(u, 0.0), C::new(du, 0.0), n);
    (y.re, d.re)
}

/// Zero-energy `u_1^+` (bounded, `→ 1`) at `x`, for a `c x^{-α}` tail,
/// integrated inward from `X = 1e5` in geometrically shrinking blocks.
pub fn zero_energy_u1_plus(model: &PotentialModel, alpha: f64, c: f64, x: f64) -> (f64, f64) {
    let mut s: f64 = 1e5;
    // u = 1 + c s^{2-α}/((α-1)(α-2))
    let a = c / ((alpha - 1.0) * (alpha - 2.0));
    let (mut u, mut du) = (1.0 + a * s.powf(2.0 - alpha), a * (2.0 - alpha) * s.powf(1.0 - alpha));
    while s > x {
        let next = (s * 0.5).max(x);
        let h = (s * 1e-4).clamp(1e-4, 0.5);
        (u, du) = shoot(model, 0.0, s, next, u, du, h);
        s = next;
    }
    (u, du)
}

/// Sign changes of the zero-energy solution started flat at `-L` and
/// shot to `+L`.
pub fn zero_energy_nodes(model: &PotentialModel, span: f64) -> usize {
    let n = (2.0 * span / 1e-3) as usize;
    let h = 2.0 * span / n as f64;
    let (mut u, mut du) = (1.0, 0.0);
    let mut count = 0;
    let mut x = -span;
    for _ in 0..n {
        let (u1, du1) = shoot(model, 0.0, x, x + h, u, du, h);
        if u1 != 0.0 && (u1 > 0.0) != (u > 0.0) {
            count += 1;
        }
        (u, du, x) = (u1, du1, x + h);
    }
    count
}

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + h * k as f64) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}
