//! Zero-energy fundamental systems `u_0^±, u_1^±` and their perturbations
//! `u_j^±(·, λ)` for small λ on `±x ∈ [0, 1/λ]`.
//!
//! As in [`crate::jost`] everything is computed in the side coordinate
//! `s = ±x`; derivatives are converted back on evaluation.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jost::{march_inward, side_grid, PointValue, Side, VolterraMethod};
use crate::linalg::lu_solve;
use crate::panels::{PanelGrid, PanelValues, Reference, Q};
use crate::potential::PotentialModel;

/// Default smallness threshold for the perturbative representation.
pub const LAMBDA_0: f64 = 0.1;

/// Truncation point for the zero-energy problem. Exponentially decaying
/// sides are carried equally far so that the perturbed systems cover
/// `[0, 1/λ]` down to small λ.
pub fn zero_energy_truncation(_model: &PotentialModel, _side: Side) -> f64 {
    1e6
}

/// `u_1(X)`, `u_1'(X)` (side coordinate) from the two leading terms of the
/// Born series of `u_1 = 1 + ∫_x^∞ (y-x) V u_1`.
pub fn zero_energy_far_field(model: &PotentialModel, side: Side, x: f64) -> (f64, f64) {
    let sg = side.sign();
    let mut u = 1.0 + model.tail_moment(sg, x);
    let mut up = -model.tail_integral(sg, x);
    if let Some(alpha) = model.power_decay(sg) {
        let c = if sg > 0.0 { model.c_plus } else { model.c_minus };
        let a = c / ((alpha - 1.0) * (alpha - 2.0));
        u += c * a * x.powf(4.0 - 2.0 * alpha) / ((2.0 * alpha - 3.0) * (2.0 * alpha - 4.0));
        up -= c * a * x.powf(3.0 - 2.0 * alpha) / (2.0 * alpha - 3.0);
    }
    (u, up)
}

/// Asymptotic correction `T` in `u_0 ≈ s + T(s)` used to calibrate `α_±`.
fn u0_correction(model: &PotentialModel, side: Side, s: f64) -> f64 {
    let sg = side.sign();
    match model.power_decay(sg) {
        Some(alpha) => {
            let c = if sg > 0.0 { model.c_plus } else { model.c_minus };
            if (alpha - 3.0).abs() < 1e-12 {
                -c * s.ln()
            } else {
                c / ((alpha - 2.0) * (alpha - 3.0)) * s.powf(3.0 - alpha)
            }
        }
        None => 0.0,
    }
}

/// Real fundamental system at zero energy on one side.
#[derive(Debug, Clone)]
pub struct ZeroEnergySystem {
    pub side: Side,
    /// Panels in the side coordinate.
    pub grid: PanelGrid,
    pub u1: PanelValues<f64>,
    pub u1p: PanelValues<f64>,
    pub u0: PanelValues<f64>,
    pub u0p: PanelValues<f64>,
    /// Reduction-of-order base point (side coordinate).
    pub x1: f64,
    /// Constant of the reduction ansatz.
    pub alpha_const: f64,
}

fn real_part(v: &PanelValues<Complex64>) -> PanelValues<f64> {
    PanelValues { values: v.values.iter().map(|row| row.map(|z| z.re)).collect() }
}

impl ZeroEnergySystem {
    fn at(&self, vals: &PanelValues<f64>, ders: &PanelValues<f64>, x: f64) -> Result<PointValue<f64>> {
        let sg = self.side.sign();
        let s = sg * x;
        let p = self.grid.locate(s)?;
        Ok(PointValue { value: vals.eval_on(&self.grid, p, s), deriv: sg * ders.eval_on(&self.grid, p, s) })
    }

    /// `u_0^±(x)` and its derivative at a physical position.
    pub fn u0_at(&self, x: f64) -> Result<PointValue<f64>> {
        self.at(&self.u0, &self.u0p, x)
    }

    /// `u_1^±(x)` and its derivative at a physical position.
    pub fn u1_at(&self, x: f64) -> Result<PointValue<f64>> {
        self.at(&self.u1, &self.u1p, x)
    }

    /// Physical positions, ascending.
    pub fn grid_positions(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.grid.all_nodes().iter().map(|s| self.side.sign() * s).collect();
        if self.side == Side::Minus {
            v.reverse();
        }
        v
    }

    /// Physical `(u_0, u_0', u_1, u_1')` matching [`Self::grid_positions`].
    pub fn profiles(&self) -> [Vec<f64>; 4] {
        let sg = self.side.sign();
        let mut out = [
            self.u0.flatten(),
            self.u0p.flatten().into_iter().map(|v| sg * v).collect(),
            self.u1.flatten(),
            self.u1p.flatten().into_iter().map(|v| sg * v).collect(),
        ];
        if self.side == Side::Minus {
            for v in out.iter_mut() {
                v.reverse();
            }
        }
        out
    }

    /// Wronskian `W(u_0, u_1)` at a physical position.
    pub fn wronskian_at(&self, x: f64) -> Result<f64> {
        let a = self.u0_at(x)?;
        let b = self.u1_at(x)?;
        Ok(a.value * b.deriv - a.deriv * b.value)
    }
}

/// Builds `u_1^±` from its Volterra equation and `u_0^±` by reduction of
/// order; both reach down to the physical point `reach` (default `0`).
pub fn solve_zero_energy(model: &PotentialModel, side: Side) -> Result<ZeroEnergySystem> {
    solve_zero_energy_to(model, side, 0.0, &[])
}

pub fn solve_zero_energy_to(model: &PotentialModel, side: Side, reach: f64, nodes: &[f64]) -> Result<ZeroEnergySystem> {
    let sg = side.sign();
    let x_max = zero_energy_truncation(model, side);
    let s_lo = sg * reach;
    if s_lo >= x_max {
        return Err(Error::Contract(format!("reach {reach} beyond truncation {x_max}")));
    }
    let mut forced: Vec<f64> = nodes.to_vec();
    forced.push(sg * 2.0);
    let grid = side_grid(model, side, 0.0, s_lo, x_max, &forced);
    let (ub, upb) = zero_energy_far_field(model, side, x_max);
    let (u1c, u1pc, _) = march_inward(
        model,
        side,
        0.0,
        &grid,
        Complex64::new(ub, 0.0),
        Complex64::new(upb, 0.0),
        VolterraMethod::Direct,
        1e-12,
        50,
    )?;
    let u1 = real_part(&u1c);
    let u1p = real_part(&u1pc);

    // base point: smallest edge >= 2 beyond which |u_1| > 1/2
    let n = grid.n_panels();
    let mut p1 = n;
    for p in (0..n).rev() {
        let (a, _) = grid.bounds(p);
        if u1.values[p].iter().any(|v| v.abs() <= 0.5) {
            break;
        }
        if a >= 2.0 - 1e-12 {
            p1 = p;
        }
    }
    if p1 == n {
        return Err(Error::Hypothesis("u_1 vanishes beyond every admissible base point".into()));
    }
    let x1 = grid.bounds(p1).0;

    // I(s) = ∫_{x1}^s u_1^{-2}, cumulative over panels p1..n
    let r = Reference::get();
    let mut integral = PanelValues::<f64>::new(n);
    let mut acc = 0.0;
    for p in p1..n {
        let (a, b) = grid.bounds(p);
        let inv2: Vec<f64> = u1.values[p].iter().map(|v| 1.0 / (v * v)).collect();
        for j in 0..Q {
            let s: f64 = (0..Q).map(|k| r.sf[j][k] * inv2[k]).sum();
            integral.values[p][j] = acc + 0.5 * (b - a) * s;
        }
        acc = integral.values[p][Q - 1];
    }

    // α_± by least squares of u_1 (I + α) ≈ s + T(s) over the last decade
    let nodes_all = grid.all_nodes();
    let i_all = {
        let mut v = Vec::new();
        for p in 0..n {
            let start = if p == 0 { 0 } else { 1 };
            v.extend_from_slice(&integral.values[p][start..]);
        }
        v
    };
    let u1_all = u1.flatten();
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &s) in nodes_all.iter().enumerate() {
        if s >= 0.1 * x_max && s >= x1 {
            let target = s + u0_correction(model, side, s);
            num += u1_all[i] * (target - u1_all[i] * i_all[i]);
            den += u1_all[i] * u1_all[i];
        }
    }
    let alpha_const = if den > 0.0 { num / den } else { 0.0 };

    let mut u0 = PanelValues::<f64>::new(n);
    let mut u0p = PanelValues::<f64>::new(n);
    for p in p1..n {
        for j in 0..Q {
            let (v, d, ii) = (u1.values[p][j], u1p.values[p][j], integral.values[p][j]);
            u0.values[p][j] = v * (ii + alpha_const);
            u0p.values[p][j] = d * (ii + alpha_const) + 1.0 / v;
        }
    }
    if p1 > 0 {
        let sub = PanelGrid { edges: grid.edges[..=p1].to_vec() };
        let (lo, lop, _) = march_inward(
            model,
            side,
            0.0,
            &sub,
            Complex64::new(u0.values[p1][0], 0.0),
            Complex64::new(u0p.values[p1][0], 0.0),
            VolterraMethod::Direct,
            1e-12,
            50,
        )?;
        for p in 0..p1 {
            u0.values[p] = lo.values[p].map(|z| z.re);
            u0p.values[p] = lop.values[p].map(|z| z.re);
        }
    }
    Ok(ZeroEnergySystem { side, grid, u1, u1p, u0, u0p, x1, alpha_const })
}

/// Kernel used for the energy perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KernelTag {
    K0,
    K1,
}

/// `u_j^±(·, λ)` on `±x ∈ [0, min(1/λ, grid end)]`.
#[derive(Debug, Clone)]
pub struct PerturbedSystem {
    pub lambda: f64,
    pub side: Side,
    pub grid: PanelGrid,
    pub u0: PanelValues<f64>,
    pub u0p: PanelValues<f64>,
    pub u1: PanelValues<f64>,
    pub u1p: PanelValues<f64>,
    /// Kernel for `(u_0, u_1)`; the `K_0` equation is solved multiplied
    /// through by `<x>`, which turns it into the `K_1` form.
    pub kernel_tag: [KernelTag; 2],
}

impl PerturbedSystem {
    fn at(&self, vals: &PanelValues<f64>, ders: &PanelValues<f64>, x: f64) -> Result<PointValue<f64>> {
        let sg = self.side.sign();
        let s = sg * x;
        let p = self.grid.locate(s)?;
        Ok(PointValue { value: vals.eval_on(&self.grid, p, s), deriv: sg * ders.eval_on(&self.grid, p, s) })
    }

    pub fn u0_at(&self, x: f64) -> Result<PointValue<f64>> {
        self.at(&self.u0, &self.u0p, x)
    }

    pub fn u1_at(&self, x: f64) -> Result<PointValue<f64>> {
        self.at(&self.u1, &self.u1p, x)
    }

    pub fn u_at(&self, j: usize, x: f64) -> Result<PointValue<f64>> {
        if j == 0 {
            self.u0_at(x)
        } else {
            self.u1_at(x)
        }
    }

    pub fn wronskian_at(&self, x: f64) -> Result<f64> {
        let a = self.u0_at(x)?;
        let b = self.u1_at(x)?;
        Ok(a.value * b.deriv - a.deriv * b.value)
    }

    /// Right end of the validity window (side coordinate).
    pub fn window_end(&self) -> f64 {
        self.grid.hi()
    }
}

/// Solves `u(x,λ) = u_j(x) + λ² ∫_0^x [u_0(y)u_1(x) - u_0(x)u_1(y)] u(y,λ) dy`
/// for `j = 0, 1` by forward marching. Extra physical nodes become panel
/// edges.
pub fn perturb_in_energy(zs: &ZeroEnergySystem, lambda: f64) -> Result<PerturbedSystem> {
    perturb_in_energy_with(zs, lambda, LAMBDA_0, &[])
}

pub fn perturb_in_energy_with(
    zs: &ZeroEnergySystem,
    lambda: f64,
    lambda_0: f64,
    nodes: &[f64],
) -> Result<PerturbedSystem> {
    if !(lambda > 0.0 && lambda < lambda_0) {
        return Err(Error::Regime { lambda, regime: "low-energy perturbative" });
    }
    let sg = zs.side.sign();
    let end = (1.0 / lambda).min(zs.grid.hi());
    if zs.grid.lo() > 0.0 {
        return Err(Error::Contract("zero-energy system does not reach x = 0".into()));
    }
    let mut edges: Vec<f64> = zs.grid.edges.iter().copied().filter(|&e| e > 0.0 && e < end).collect();
    edges.push(0.0);
    edges.push(end);
    for &x in nodes {
        let s = sg * x;
        if s > 0.0 && s < end {
            edges.push(s);
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
    let grid = PanelGrid { edges };
    let n = grid.n_panels();
    let r = Reference::get();
    let l2 = lambda * lambda;
    let mut out = [PanelValues::<f64>::new(n), PanelValues::<f64>::new(n), PanelValues::<f64>::new(n), PanelValues::<f64>::new(n)];
    let (mut pa, mut qa) = ([0.0f64; 2], [0.0f64; 2]);
    for p in 0..n {
        let (a, b) = grid.bounds(p);
        let half = 0.5 * (b - a);
        let xs = grid.nodes(p);
        let mut z0 = [0.0; Q];
        let mut z0p = [0.0; Q];
        let mut z1 = [0.0; Q];
        let mut z1p = [0.0; Q];
        for j in 0..Q {
            let zp = zs.grid.locate(xs[j])?;
            z0[j] = zs.u0.eval_on(&zs.grid, zp, xs[j]);
            z0p[j] = zs.u0p.eval_on(&zs.grid, zp, xs[j]);
            z1[j] = zs.u1.eval_on(&zs.grid, zp, xs[j]);
            z1p[j] = zs.u1p.eval_on(&zs.grid, zp, xs[j]);
        }
        let mut mat = vec![0.0; Q * Q];
        for j in 0..Q {
            for k in 0..Q {
                mat[j * Q + k] = -l2 * half * r.sf[j][k] * (z1[j] * z0[k] - z0[j] * z1[k]);
            }
            mat[j * Q + j] += 1.0;
        }
        for (jj, seed) in [z0, z1].iter().enumerate() {
            let mut m = mat.clone();
            let mut rhs: Vec<f64> = (0..Q).map(|i| seed[i] + l2 * (z1[i] * pa[jj] - z0[i] * qa[jj])).collect();
            lu_solve(&mut m, &mut rhs, Q).ok_or(Error::SingularKernel(0.0))?;
            let mut pv = [0.0; Q];
            let mut qv = [0.0; Q];
            for i in 0..Q {
                pv[i] = pa[jj] + half * (0..Q).map(|k| r.sf[i][k] * z0[k] * rhs[k]).sum::<f64>();
                qv[i] = qa[jj] + half * (0..Q).map(|k| r.sf[i][k] * z1[k] * rhs[k]).sum::<f64>();
            }
            let seed_p = if jj == 0 { z0p } else { z1p };
            let mut vals = [0.0; Q];
            let mut ders = [0.0; Q];
            for i in 0..Q {
                vals[i] = rhs[i];
                ders[i] = seed_p[i] + l2 * (z1p[i] * pv[i] - z0p[i] * qv[i]);
            }
            out[2 * jj].values[p] = vals;
            out[2 * jj + 1].values[p] = ders;
            pa[jj] = pv[Q - 1];
            qa[jj] = qv[Q - 1];
        }
    }
    let [u0, u0p, u1, u1p] = out;
    Ok(PerturbedSystem {
        lambda,
        side: zs.side,
        grid,
        u0,
        u0p,
        u1,
        u1p,
        kernel_tag: [KernelTag::K0, KernelTag::K1],
    })
}

/// Values of `u_j^±(±λ^{-2/α}, λ)` against their small-μ expansions.
#[derive(Debug, Clone, Serialize)]
pub struct LowEnergyTurningReport {
    pub lambda: f64,
    pub side: Side,
    pub mu: f64,
    /// `u_0`, `∂_x u_0`, `u_1`, `∂_x u_1` at the turning point.
    pub values: [f64; 4],
    pub predicted: [f64; 4],
    /// Residuals normalized by the prefactors `λ^{-2/α}`, `±1`, `1`,
    /// `∓λ^{2/α}`, i.e. residuals of the bracketed expansions.
    pub residuals: [f64; 4],
}

/// Predicted brackets of the four turning-point expansions.
pub fn lowenergy_prediction(alpha: f64, c: f64, mu: f64) -> [f64; 4] {
    let m2 = mu * mu;
    let u0 = if (alpha - 3.0).abs() < 1e-12 {
        1.0 + 2.0 * c * m2 * mu.ln() - m2 / 6.0
    } else {
        1.0 + (c / ((alpha - 2.0) * (alpha - 3.0)) - 1.0 / 6.0) * m2
    };
    [
        u0,
        1.0 - (c / (alpha - 2.0) + 0.5) * m2,
        1.0 + (c / ((alpha - 1.0) * (alpha - 2.0)) - 0.5) * m2,
        (c / (alpha - 1.0) + 1.0) * m2,
    ]
}

pub fn lowenergy_turning_residual(
    model: &PotentialModel,
    zs: &ZeroEnergySystem,
    lambda: f64,
) -> Result<LowEnergyTurningReport> {
    let alpha = model.alpha;
    let side = zs.side;
    let sg = side.sign();
    let c = if sg > 0.0 { model.c_plus } else { model.c_minus };
    let mu = lambda.powf(1.0 - 2.0 / alpha);
    let xt = sg * lambda.powf(-2.0 / alpha);
    let ps = perturb_in_energy_with(zs, lambda, LAMBDA_0, &[xt])?;
    let u0 = ps.u0_at(xt)?;
    let u1 = ps.u1_at(xt)?;
    let pred = lowenergy_prediction(alpha, c, mu);
    let scale = [lambda.powf(-2.0 / alpha), sg, 1.0, -sg * lambda.powf(2.0 / alpha)];
    let values = [u0.value, u0.deriv, u1.value, u1.deriv];
    let mut residuals = [0.0; 4];
    let mut predicted = [0.0; 4];
    for i in 0..4 {
        predicted[i] = pred[i] * scale[i];
        residuals[i] = values[i] / scale[i] - pred[i];
    }
    Ok(LowEnergyTurningReport { lambda, side, mu, values, predicted, residuals })
}

/// CSV dump: `x, u0, u0', u1, u1'`.
pub fn to_csv(zs: &ZeroEnergySystem) -> String {
    let mut out = format!(
        "# side={} x1={:.16e} alpha_const={:.16e}\nx,u0,du0,u1,du1\n",
        if zs.side == Side::Plus { "+" } else { "-" },
        zs.x1,
        zs.alpha_const
    );
    let xs = zs.grid_positions();
    let [a, b, c, d] = zs.profiles();
    for i in 0..xs.len() {
        out.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n", xs[i], a[i], b[i], c[i], d[i]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{make_inverse_power, make_zero};

    #[test]
    fn free_zero_energy_system() {
        let zs = solve_zero_energy(&make_zero(), Side::Plus).unwrap();
        for x in [0.0, 1.0, 3.0, 50.0] {
            let u1 = zs.u1_at(x).unwrap();
            assert!((u1.value - 1.0).abs() < 1e-13 && u1.deriv.abs() < 1e-13);
            let u0 = zs.u0_at(x).unwrap();
            assert!((u0.value - x).abs() < 1e-9, "x={x} u0={}", u0.value);
            assert!((zs.wronskian_at(x).unwrap() + 1.0).abs() < 1e-12);
        }
        let zm = solve_zero_energy(&make_zero(), Side::Minus).unwrap();
        assert!((zm.wronskian_at(-4.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((zm.u0_at(-4.0).unwrap().value - 4.0).abs() < 1e-9);
    }

    #[test]
    fn wronskian_constant_and_asymptotics() {
        let m = make_inverse_power(3.0, 1.0, 1.0).unwrap();
        let zs = solve_zero_energy(&m, Side::Plus).unwrap();
        for x in [0.0, 0.5, 2.0, 17.0, 1e3, 1e5] {
            assert!((zs.wronskian_at(x).unwrap() + 1.0).abs() < 1e-10, "x={x}");
        }
        // u_1 - 1 - x^{-1}/2 = o(x^{-1})
        let r1 = |x: f64| (zs.u1_at(x).unwrap().value - 1.0 - 0.5 / x) * x;
        assert!(r1(1e4).abs() < 1e-3 && r1(1e4).abs() < r1(1e2).abs());
        // u_0/x - 1 + log(x)/x = o(log x / x)
        let r0 = |x: f64| (zs.u0_at(x).unwrap().value / x - 1.0 + x.ln() / x) * x / x.ln();
        assert!(r0(1e5).abs() < 0.05 && r0(1e5).abs() < r0(1e2).abs(), "{} {}", r0(1e5), r0(1e2));
    }

    #[test]
    fn free_perturbation_is_cosine() {
        let zs = solve_zero_energy(&make_zero(), Side::Plus).unwrap();
        let lambda = 0.01;
        let ps = perturb_in_energy(&zs, lambda).unwrap();
        for x in [0.0, 10.0, 50.0, 99.0] {
            let u1 = ps.u1_at(x).unwrap();
            assert!((u1.value - (lambda * x).cos()).abs() < 1e-9);
            let u0 = ps.u0_at(x).unwrap();
            assert!((u0.value - zs.u0_at(0.0).unwrap().value * (lambda * x).cos() - (lambda * x).sin() / lambda).abs() < 1e-8);
            assert!((ps.wronskian_at(x).unwrap() + 1.0).abs() < 1e-8);
        }
        assert!(matches!(perturb_in_energy(&zs, 0.2), Err(Error::Regime { .. })));
    }

    #[test]
    fn free_lowenergy_residual_is_cosine_remainder() {
        let z = make_zero();
        let zs = solve_zero_energy(&z, Side::Plus).unwrap();
        let r = lowenergy_turning_residual(&z, &zs, 1e-3).unwrap();
        let mu = r.mu;
        assert!((r.values[2] - mu.cos()).abs() < 1e-10);
        assert!((r.residuals[2] - (mu.cos() - 1.0 + 0.5 * mu * mu)).abs() < 1e-10);
    }
}
