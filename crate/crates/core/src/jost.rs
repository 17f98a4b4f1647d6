//! Jost solutions `f_±(x, λ) = e^{±iλx} m_±(x, λ)` from the Volterra
//! equation
//!
//! `m(x) = 1 + ∫_x^∞ (e^{2iλ(y-x)} - 1)/(2iλ) V(y) m(y) dy`.
//!
//! Both sides are handled in the side coordinate `s = ±x`, in which `m_-`
//! is `m_+` of the reflected potential. The equation is marched inward
//! panel by panel: on a panel `[a, b]` with Cauchy data at `b`,
//!
//! `m(x) = m(b) - E(b-x) m'(b) + ∫_x^b E(y-x) V m dy`,
//! `m'(x) = e^{2iλ(b-x)} m'(b) - ∫_x^b e^{2iλ(y-x)} V m dy`,
//!
//! with `E(d) = (e^{2iλd} - 1)/(2iλ)` (`= d` at `λ = 0`), discretized by
//! Nyström on Chebyshev nodes. Beyond the truncation point the closed-form
//! far-field integrals of the potential supply the Cauchy data.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::lu_solve;
use crate::panels::{PanelGrid, PanelValues, Reference, G, Q};
use crate::potential::PotentialModel;

type C = Complex64;

/// Which Jost solution: `f_+` normalized at `+∞` or `f_-` at `-∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// How each panel's Nyström system is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolterraMethod {
    /// LU solve of the panel system.
    Direct,
    /// Fixed-point iteration from the panel's free solution.
    Picard,
}

/// Grid request for [`solve_m`].
#[derive(Debug, Clone)]
pub struct GridSpec {
    /// Physical point the solution must reach: covered region is
    /// `±x >= ±reach`.
    pub reach: f64,
    /// Truncation point in the side coordinate; defaults to
    /// [`default_truncation`].
    pub x_max: Option<f64>,
    /// Physical positions forced to be panel edges (exact node values).
    pub nodes: Vec<f64>,
    pub method: VolterraMethod,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            reach: 0.0,
            x_max: None,
            nodes: Vec::new(),
            method: VolterraMethod::Direct,
            tol: 1e-12,
            max_iter: 50,
        }
    }
}

/// Smallest admissible λ for the direct Jost solver.
pub const LAMBDA_FLOOR: f64 = 1e-8;

/// Truncation point on a side: `max(1e3, 50 λ^{-2/α}, 20/λ)` where the
/// potential decays like a power, the `1e-16` cutoff where it decays
/// exponentially.
pub fn default_truncation(model: &PotentialModel, side: Side, lambda: f64) -> f64 {
    match model.power_decay(side.sign()) {
        Some(alpha) => 1e3f64
            .max(50.0 * lambda.powf(-2.0 / alpha))
            .max(20.0 / lambda),
        None => exponential_cutoff(model, side),
    }
}

/// Minimal truncation point keeping the far-field closure valid:
/// `2λX >= 40` on power-law sides.
pub fn minimal_truncation(model: &PotentialModel, side: Side, lambda: f64) -> f64 {
    match model.power_decay(side.sign()) {
        Some(_) => (20.0 / lambda).max(model.x_asym),
        None => exponential_cutoff(model, side),
    }
}

fn exponential_cutoff(model: &PotentialModel, side: Side) -> f64 {
    let c = match side {
        Side::Plus => model.right_cutoff(),
        Side::Minus => model.left_cutoff().map(|v| -v),
    };
    c.unwrap_or(10.0).max(1.0)
}

/// Oscillation-free Jost profile on one side.
#[derive(Debug, Clone)]
pub struct JostData {
    pub lambda: f64,
    pub side: Side,
    /// Panels in the side coordinate `s = ±x`.
    pub grid: PanelGrid,
    /// `m(s)` at the panel nodes.
    pub m: PanelValues<C>,
    /// `dm/ds` at the panel nodes.
    pub mp: PanelValues<C>,
    pub truncation_point: f64,
    /// Total fixed-point sweeps (one per panel for direct solves).
    pub iteration_count: usize,
    /// Sup-norm defect of `m'' + 2iλm' - Vm` relative to `sup |Vm|`.
    pub residual_norm: f64,
}

/// Value and derivative of a solution at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValue<T> {
    pub value: T,
    pub deriv: T,
}

impl JostData {
    /// Physical grid positions, ascending.
    pub fn grid_positions(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.grid.all_nodes().iter().map(|s| self.side.sign() * s).collect();
        if self.side == Side::Minus {
            v.reverse();
        }
        v
    }

    /// `m_±(x)` and `m_±'(x)` at a physical position.
    pub fn m_at(&self, x: f64) -> Result<PointValue<C>> {
        let sg = self.side.sign();
        let s = sg * x;
        let p = self.grid.locate(s)?;
        Ok(PointValue {
            value: self.m.eval_on(&self.grid, p, s),
            deriv: self.mp.eval_on(&self.grid, p, s) * sg,
        })
    }

    /// Physical profiles as flat sequences matching [`Self::grid_positions`].
    pub fn profiles(&self) -> (Vec<C>, Vec<C>) {
        let sg = self.side.sign();
        let mut m = self.m.flatten();
        let mut mp: Vec<C> = self.mp.flatten().into_iter().map(|v| v * sg).collect();
        if self.side == Side::Minus {
            m.reverse();
            mp.reverse();
        }
        (m, mp)
    }
}

/// `f_±(x, λ)` and `f_±'(x, λ)` from the stored profile.
pub fn jost_eval(jd: &JostData, x: f64) -> Result<PointValue<C>> {
    let sg = jd.side.sign();
    let s = sg * x;
    let p = jd.grid.locate(s)?;
    let m = jd.m.eval_on(&jd.grid, p, s);
    let mp = jd.mp.eval_on(&jd.grid, p, s);
    let phase = C::from_polar(1.0, jd.lambda * s);
    let i = C::i();
    Ok(PointValue {
        value: phase * m,
        deriv: phase * (i * jd.lambda * m + mp) * sg,
    })
}

/// `(e^{2iλd} - 1)/(2iλ)` without cancellation; `d` at `λ = 0`.
#[inline]
pub fn e_kernel(lambda: f64, d: f64) -> C {
    let th = lambda * d;
    if th == 0.0 {
        return C::new(d, 0.0);
    }
    // e^{iθ} sin θ / λ
    let sinc = if th.abs() < 1e-4 { 1.0 - th * th / 6.0 } else { th.sin() / th };
    C::from_polar(1.0, th) * (d * sinc)
}

/// Far-field Cauchy data `(m(X), m'(X))` in the side coordinate.
///
/// The solution beyond `X` is replaced by its eikonal form
/// `exp(i P(y)/(2λ))`, `P(y) = ∫_y^∞ V`; the oscillatory part uses the
/// integration-by-parts series of the potential.
pub fn far_field_data(model: &PotentialModel, side: Side, lambda: f64, x: f64) -> (C, C) {
    let sg = side.sign();
    if model.is_zero() {
        return (C::new(1.0, 0.0), C::new(0.0, 0.0));
    }
    let p = model.tail_integral(sg, x);
    let th = p / (2.0 * lambda);
    let eik = C::from_polar(1.0, th);
    let eik_m1 = C::new(-2.0 * (0.5 * th).sin().powi(2), th.sin());
    let b = eik_m1 * (2.0 * lambda) / C::i();
    let d = model.tail_oscillatory(sg, x, 2.0 * lambda) * eik;
    let c = (d - b) / (C::i() * (2.0 * lambda));
    (C::new(1.0, 0.0) + c, -d)
}

/// Panel-wise λ-dependent quadrature matrices.
struct PanelKernel {
    kw: Vec<C>,
    dw: Vec<C>,
    free_e: [C; Q],
    free_phase: [C; Q],
}

fn panel_kernel(lambda: f64, a: f64, b: f64) -> PanelKernel {
    let r = Reference::get();
    let half = 0.5 * (b - a);
    let mut kw = vec![C::new(0.0, 0.0); Q * Q];
    let mut dw = vec![C::new(0.0, 0.0); Q * Q];
    let mut free_e = [C::new(0.0, 0.0); Q];
    let mut free_phase = [C::new(0.0, 0.0); Q];
    for j in 0..Q {
        let dist = half * (1.0 - r.t[j]);
        free_e[j] = e_kernel(lambda, dist);
        free_phase[j] = C::from_polar(1.0, 2.0 * lambda * dist);
        if j == Q - 1 {
            continue;
        }
        for g in 0..G {
            let idx = j * G + g;
            let d = half * r.sub_offset[idx];
            let w = half * r.sub_weight[idx];
            let ek = e_kernel(lambda, d) * w;
            let ph = C::from_polar(w, 2.0 * lambda * d);
            let basis = &r.sub_basis[idx];
            let row_k = &mut kw[j * Q..(j + 1) * Q];
            for k in 0..Q {
                row_k[k] += ek * basis[k];
            }
            let row_d = &mut dw[j * Q..(j + 1) * Q];
            for k in 0..Q {
                row_d[k] += ph * basis[k];
            }
        }
    }
    PanelKernel { kw, dw, free_e, free_phase }
}

/// Marches the `m`-equation from the top of `grid` (Cauchy data
/// `(m_b, mp_b)` there) down to its bottom. Works for `λ = 0` as well.
#[allow(clippy::too_many_arguments)]
pub fn march_inward(
    model: &PotentialModel,
    side: Side,
    lambda: f64,
    grid: &PanelGrid,
    m_b: C,
    mp_b: C,
    method: VolterraMethod,
    tol: f64,
    max_iter: usize,
) -> Result<(PanelValues<C>, PanelValues<C>, usize)> {
    let sg = side.sign();
    let n = grid.n_panels();
    let mut m = PanelValues::<C>::new(n);
    let mut mp = PanelValues::<C>::new(n);
    let (mut mb, mut mpb) = (m_b, mp_b);
    let mut iterations = 0;
    for p in (0..n).rev() {
        let (a, b) = grid.bounds(p);
        let nodes = grid.nodes(p);
        let v: Vec<f64> = nodes.iter().map(|&s| model.value(sg * s)).collect();
        let kern = panel_kernel(lambda, a, b);
        let mut rhs = [C::new(0.0, 0.0); Q];
        for j in 0..Q {
            rhs[j] = mb - kern.free_e[j] * mpb;
        }
        let sol: [C; Q] = match method {
            VolterraMethod::Direct => {
                let mut mat = vec![C::new(0.0, 0.0); Q * Q];
                for j in 0..Q {
                    for k in 0..Q {
                        mat[j * Q + k] = -kern.kw[j * Q + k] * v[k];
                    }
                    mat[j * Q + j] += 1.0;
                }
                let mut x = rhs.to_vec();
                lu_solve(&mut mat, &mut x, Q).ok_or(Error::SingularKernel(0.0))?;
                iterations += 1;
                let mut out = [C::new(0.0, 0.0); Q];
                out.copy_from_slice(&x);
                out
            }
            VolterraMethod::Picard => {
                let mut cur = rhs;
                let mut converged = false;
                let mut last = f64::INFINITY;
                for _ in 0..max_iter {
                    iterations += 1;
                    let mut next = rhs;
                    for j in 0..Q {
                        let mut acc = C::new(0.0, 0.0);
                        for k in 0..Q {
                            acc += kern.kw[j * Q + k] * (cur[k] * v[k]);
                        }
                        next[j] += acc;
                    }
                    let diff = (0..Q).map(|j| (next[j] - cur[j]).norm()).fold(0.0, f64::max);
                    let scale = (0..Q).map(|j| next[j].norm()).fold(1e-300, f64::max);
                    cur = next;
                    last = diff / scale;
                    if last < tol {
                        converged = true;
                        break;
                    }
                }
                if !converged {
                    return Err(Error::NonConvergence { iterations: max_iter, residual: last });
                }
                cur
            }
        };
        let mut der = [C::new(0.0, 0.0); Q];
        for j in 0..Q {
            let mut acc = C::new(0.0, 0.0);
            for k in 0..Q {
                acc += kern.dw[j * Q + k] * (sol[k] * v[k]);
            }
            der[j] = kern.free_phase[j] * mpb - acc;
        }
        m.values[p] = sol;
        mp.values[p] = der;
        mb = sol[0];
        mpb = der[0];
    }
    Ok((m, mp, iterations))
}

/// Relative ODE defect `m'' + 2iλ m' - V m` using spectral differentiation
/// of the stored `m'`.
pub fn ode_defect(
    model: &PotentialModel,
    side: Side,
    lambda: f64,
    grid: &PanelGrid,
    m: &PanelValues<C>,
    mp: &PanelValues<C>,
) -> f64 {
    let r = Reference::get();
    let sg = side.sign();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for p in 0..grid.n_panels() {
        let (a, b) = grid.bounds(p);
        let nodes = grid.nodes(p);
        for j in 0..Q {
            let mut mpp = C::new(0.0, 0.0);
            for k in 0..Q {
                mpp += mp.values[p][k] * r.d[j][k];
            }
            mpp = mpp * (2.0 / (b - a));
            let vm = m.values[p][j] * model.value(sg * nodes[j]);
            let defect = mpp + C::i() * (2.0 * lambda) * mp.values[p][j] - vm;
            worst = worst.max(defect.norm());
            scale = scale.max(vm.norm()).max(mpp.norm());
        }
    }
    if worst == 0.0 {
        0.0
    } else {
        worst / scale.max(1e-300)
    }
}

/// Panel grid in the side coordinate from `s_lo` to `x_max`.
pub fn side_grid(
    model: &PotentialModel,
    side: Side,
    lambda: f64,
    s_lo: f64,
    x_max: f64,
    nodes: &[f64],
) -> PanelGrid {
    let sg = side.sign();
    let mut bps: Vec<f64> = model.breakpoints().iter().map(|b| sg * b).collect();
    bps.extend(nodes.iter().map(|x| sg * x));
    let osc = if lambda > 0.0 { 4.0 / lambda } else { f64::INFINITY };
    PanelGrid::build(s_lo, x_max, &bps, |s| (0.5 * s.max(1.0)).min(osc))
}

/// Solves for `m_±(·, λ)` on the requested region.
pub fn solve_m(model: &PotentialModel, side: Side, lambda: f64, spec: &GridSpec) -> Result<JostData> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Contract(format!("lambda must be positive, got {lambda}")));
    }
    if lambda < LAMBDA_FLOOR {
        return Err(Error::Regime { lambda, regime: "direct Jost" });
    }
    let sg = side.sign();
    let x_max = match spec.x_max {
        Some(x) => x.max(minimal_truncation(model, side, lambda)),
        None => default_truncation(model, side, lambda),
    };
    let s_lo = sg * spec.reach;
    let x_max = x_max.max(s_lo + 1.0);
    let grid = side_grid(model, side, lambda, s_lo, x_max, &spec.nodes);
    let (mb, mpb) = far_field_data(model, side, lambda, x_max);
    let (m, mp, iterations) =
        march_inward(model, side, lambda, &grid, mb, mpb, spec.method, spec.tol, spec.max_iter)?;
    let residual_norm = ode_defect(model, side, lambda, &grid, &m, &mp);
    Ok(JostData {
        lambda,
        side,
        grid,
        m,
        mp,
        truncation_point: x_max,
        iteration_count: iterations,
        residual_norm,
    })
}

/// Turning-point expansions of `f_±` and `f_±'` compared with the solver.
#[derive(Debug, Clone, Serialize)]
pub struct TurningPointReport {
    pub lambda: f64,
    pub side: Side,
    pub mu: f64,
    pub turning_point: f64,
    pub f_value: [f64; 2],
    pub f_deriv: [f64; 2],
    pub predicted_value: [f64; 2],
    pub predicted_deriv: [f64; 2],
    pub residual_value: [f64; 2],
    pub residual_deriv: [f64; 2],
}

fn pair(z: C) -> [f64; 2] {
    [z.re, z.im]
}

/// Closed-form small-μ expansions of `f_±(±λ^{-2/α})` and of the bracket
/// in `f_±' = ±λ^{2/α}[...]`.
pub fn turning_point_prediction(alpha: f64, c: f64, mu: f64) -> (C, C) {
    let i = C::i();
    let value = if (alpha - 3.0).abs() < 1e-12 {
        1.0 + i * mu + 0.5 * (c - 1.0) * mu * mu - i * c * mu.powi(3) * mu.ln()
    } else {
        1.0 + i * mu
            + (c / ((alpha - 1.0) * (alpha - 2.0)) - 0.5) * mu * mu
            + i * (c / ((alpha - 2.0) * (alpha - 3.0)) - 1.0 / 6.0) * mu.powi(3)
    };
    let deriv = i * mu - (c / (alpha - 1.0) + 1.0) * mu * mu - i * (c / (alpha - 2.0) + 0.5) * mu.powi(3);
    (value, deriv)
}

pub fn turning_point_residual(model: &PotentialModel, side: Side, lambda: f64) -> Result<TurningPointReport> {
    let alpha = model.alpha;
    let sg = side.sign();
    let c = if sg > 0.0 { model.c_plus } else { model.c_minus };
    let mu = lambda.powf(1.0 - 2.0 / alpha);
    let xt = lambda.powf(-2.0 / alpha);
    let spec = GridSpec { reach: sg * xt, nodes: vec![sg * xt], ..GridSpec::default() };
    if let Some(xm) = spec.x_max {
        if xt >= xm {
            return Err(Error::TurningPointOutOfRange { turning: xt, limit: xm });
        }
    }
    let jd = solve_m(model, side, lambda, &spec)?;
    let f = jost_eval(&jd, sg * xt)?;
    let (pv, pd_bracket) = turning_point_prediction(alpha, c, mu);
    let pd = pd_bracket * (sg * lambda.powf(2.0 / alpha));
    Ok(TurningPointReport {
        lambda,
        side,
        mu,
        turning_point: sg * xt,
        f_value: pair(f.value),
        f_deriv: pair(f.deriv),
        predicted_value: pair(pv),
        predicted_deriv: pair(pd),
        residual_value: pair(f.value - pv),
        residual_deriv: pair(f.deriv - pd),
    })
}

/// CSV dump of a profile: `x, Re m, Im m, Re m', Im m'`.
pub fn to_csv(jd: &JostData, alpha: f64, tol: f64) -> String {
    let mut out = format!(
        "# lambda={:.16e} side={} alpha={:.16e} tol={:.3e} truncation={:.16e} interpolation=chebyshev_panel_q{}\n",
        jd.lambda,
        if jd.side == Side::Plus { "+" } else { "-" },
        alpha,
        tol,
        jd.truncation_point,
        Q
    );
    out.push_str("x,re_m,im_m,re_dm,im_dm\n");
    let xs = jd.grid_positions();
    let (m, mp) = jd.profiles();
    for i in 0..xs.len() {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            xs[i], m[i].re, m[i].im, mp[i].re, mp[i].im
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{make_inverse_power, make_poschl_teller, make_zero};

    #[test]
    fn free_solution_is_exact() {
        let z = make_zero();
        let jd = solve_m(&z, Side::Plus, 2.0, &GridSpec { reach: -3.0, ..Default::default() }).unwrap();
        let f = jost_eval(&jd, 1.0).unwrap();
        let e = C::from_polar(1.0, 2.0);
        assert!((f.value - e).norm() < 1e-14);
        assert!((f.deriv - C::i() * 2.0 * e).norm() < 1e-13);
        let f0 = jost_eval(&jd, 0.0).unwrap();
        assert!((f0.value - 1.0).norm() < 1e-14);
        assert!((f0.deriv - C::new(0.0, 2.0)).norm() < 1e-13);
        let (m, mp) = jd.profiles();
        assert!(m.iter().all(|v| (v - 1.0).norm() < 1e-14));
        assert!(mp.iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn contract_errors() {
        let z = make_zero();
        assert!(matches!(solve_m(&z, Side::Plus, 0.0, &GridSpec::default()), Err(Error::Contract(_))));
        assert!(matches!(solve_m(&z, Side::Plus, 1e-9, &GridSpec::default()), Err(Error::Regime { .. })));
        let jd = solve_m(&z, Side::Plus, 1.0, &GridSpec::default()).unwrap();
        assert!(matches!(jost_eval(&jd, -1.0), Err(Error::OutOfGrid { .. })));
    }

    #[test]
    fn wronskian_with_conjugate_is_constant() {
        let m = make_inverse_power(3.0, 1.0, 1.0).unwrap();
        let lambda = 0.3;
        let jd = solve_m(&m, Side::Plus, lambda, &GridSpec { reach: -20.0, ..Default::default() }).unwrap();
        assert!(jd.residual_norm < 1e-9, "{}", jd.residual_norm);
        for &x in &[-20.0, -3.3, 0.0, 1.7, 10.0, 250.0, 900.0] {
            let f = jost_eval(&jd, x).unwrap();
            let w = f.value * f.deriv.conj() - f.deriv * f.value.conj();
            assert!((w - C::new(0.0, -2.0 * lambda)).norm() < 1e-10 * 2.0 * lambda, "x={x} w={w}");
        }
    }

    #[test]
    fn picard_agrees_with_direct() {
        let m = make_inverse_power(3.0, 1.0, 1.0).unwrap();
        let direct = solve_m(&m, Side::Plus, 0.5, &GridSpec::default()).unwrap();
        let picard = solve_m(
            &m,
            Side::Plus,
            0.5,
            &GridSpec { method: VolterraMethod::Picard, ..Default::default() },
        )
        .unwrap();
        for x in [0.0, 2.0, 30.0] {
            let a = direct.m_at(x).unwrap().value;
            let b = picard.m_at(x).unwrap().value;
            assert!((a - b).norm() < 1e-11);
        }
        assert!(picard.iteration_count > direct.iteration_count);
    }

    #[test]
    fn minus_side_is_reflection() {
        let m = make_inverse_power(3.5, 2.0, 2.0).unwrap();
        let plus = solve_m(&m, Side::Plus, 0.2, &GridSpec { reach: -5.0, ..Default::default() }).unwrap();
        let minus = solve_m(&m, Side::Minus, 0.2, &GridSpec { reach: 5.0, ..Default::default() }).unwrap();
        for x in [-5.0, -1.0, 0.0, 2.5, 5.0] {
            let fp = jost_eval(&plus, x).unwrap();
            let fm = jost_eval(&minus, -x).unwrap();
            assert!((fp.value - fm.value).norm() < 1e-12);
            assert!((fp.deriv + fm.deriv).norm() < 1e-12);
        }
    }

    #[test]
    fn reflectionless_well_has_unit_transmission() {
        // -2 sech^2 x: f_+(x) = e^{iλx}(iλ - tanh x)/(iλ - 1)
        let pt = make_poschl_teller(1).unwrap();
        let lambda = 0.7;
        let jd = solve_m(&pt, Side::Plus, lambda, &GridSpec { reach: -5.0, ..Default::default() }).unwrap();
        let i = C::i();
        for x in [-5.0, -0.3, 0.0, 1.2, 4.0] {
            let exact = C::from_polar(1.0, lambda * x) * (i * lambda - x.tanh()) / (i * lambda - 1.0);
            let f = jost_eval(&jd, x).unwrap();
            assert!((f.value - exact).norm() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn free_turning_point_residual_is_taylor_remainder() {
        let z = make_zero();
        let lambda = 1e-3;
        let r = turning_point_residual(&z, Side::Plus, lambda).unwrap();
        let mu = r.mu;
        let exact = C::from_polar(1.0, mu) - (1.0 + C::i() * mu - 0.5 * mu * mu);
        let got = C::new(r.residual_value[0], r.residual_value[1]);
        assert!((got - exact).norm() < 1e-13);
        assert!((mu - lambda.powf(1.0 / 3.0)).abs() < 1e-15);
    }
}
