//! Wronskians, connection coefficients, the resolvent kernel
//! `G(x, x', λ) = f_-(x_<) f_+(x_>) / W(f_-, f_+)` and zero-energy
//! diagnostics.
//!
//! Below `δ` the Jost solutions are represented through the perturbed
//! zero-energy systems, `f_+ = -a_1^+ u_0^+ + a_0^+ u_1^+` and
//! `f_- = a_1^- u_0^- - a_0^- u_1^-`, with `a_j^± = W(f_±, u_j^±)` taken at
//! the turning point `±λ^{-2/α}`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jost::{jost_eval, solve_m, GridSpec, JostData, PointValue, Side, LAMBDA_FLOOR};
use crate::linalg::Scalar;
use crate::lowenergy::{perturb_in_energy_with, solve_zero_energy, PerturbedSystem, ZeroEnergySystem, LAMBDA_0};
use crate::potential::PotentialModel;

type C = Complex64;

/// Default regime boundary between matched and direct kernels.
pub const DELTA: f64 = 0.05;
/// Relative threshold on `b_11` for the resonance flag.
pub const RESONANCE_FLOOR: f64 = 1e-6;
/// `|W(f_-, f_+)|` below this is treated as a zero of the Wronskian.
pub const SINGULAR_FLOOR: f64 = 1e-14;

/// `f g' - f' g`.
pub fn wronskian<T: Scalar>(f: PointValue<T>, g: PointValue<T>) -> T {
    f.value * g.deriv - f.deriv * g.value
}

fn complexify(p: PointValue<f64>) -> PointValue<C> {
    PointValue { value: C::from_real(p.value), deriv: C::from_real(p.deriv) }
}

/// Which representation produced a kernel value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelRegime {
    LowMatched,
    DirectJost,
}

/// A model together with its zero-energy systems and `b_jk`.
#[derive(Debug, Clone)]
pub struct SpectralContext {
    pub model: PotentialModel,
    pub plus: ZeroEnergySystem,
    pub minus: ZeroEnergySystem,
    /// `b[j][k] = W(u_j^-, u_k^+)`, evaluated at `x = 0`.
    pub b: [[f64; 2]; 2],
    pub delta: f64,
}

impl SpectralContext {
    pub fn new(model: &PotentialModel) -> Result<SpectralContext> {
        let plus = solve_zero_energy(model, Side::Plus)?;
        let minus = solve_zero_energy(model, Side::Minus)?;
        let up = [plus.u0_at(0.0)?, plus.u1_at(0.0)?];
        let um = [minus.u0_at(0.0)?, minus.u1_at(0.0)?];
        let mut b = [[0.0; 2]; 2];
        for j in 0..2 {
            for k in 0..2 {
                b[j][k] = wronskian(um[j], up[k]);
            }
        }
        Ok(SpectralContext { model: model.clone(), plus, minus, b, delta: DELTA })
    }

    /// Bilinear expansion of `W(f_-, f_+)` in the `a_j^±`.
    pub fn bilinear_wronskian(&self, a_minus: [C; 2], a_plus: [C; 2]) -> C {
        let b = &self.b;
        -a_minus[1] * a_plus[1] * b[0][0] + a_minus[0] * a_plus[1] * b[1][0] + a_minus[1] * a_plus[0] * b[0][1]
            - a_minus[0] * a_plus[0] * b[1][1]
    }
}

/// Connection data at one λ.
#[derive(Debug, Clone, Serialize)]
pub struct ConnectionData {
    pub lambda: f64,
    /// `[a_0^+, a_1^+]`; absent above `λ_0`.
    pub a_plus: Option<[C; 2]>,
    pub a_minus: Option<[C; 2]>,
    pub b_matrix: [[f64; 2]; 2],
    /// `W(f_-, f_+)` from the bilinear expansion when available, else direct.
    pub wronskian: C,
    pub wronskian_matched: Option<C>,
    pub wronskian_direct: Option<C>,
    pub refl_a: Option<C>,
    pub refl_b: Option<C>,
}

/// Jost data on both sides covering `[lo, hi]`.
/// Truncation for kernel evaluation: the far-field closure error falls
/// off quickly in `X`, so `X = 200` (floored by the turning point scale and
/// `20/λ`) keeps the kernel near machine precision at a fraction of the
/// default cost.
fn kernel_truncation(model: &PotentialModel, side: Side, lambda: f64) -> Option<f64> {
    model.power_decay(side.sign()).map(|a| 200f64.max(50.0 * lambda.powf(-2.0 / a)))
}

fn direct_jost(model: &PotentialModel, lambda: f64, lo: f64, hi: f64, nodes: &[f64]) -> Result<(JostData, JostData)> {
    let spec = |side: Side, reach: f64| GridSpec {
        reach,
        x_max: kernel_truncation(model, side, lambda),
        nodes: nodes.to_vec(),
        ..GridSpec::default()
    };
    let plus = solve_m(model, Side::Plus, lambda, &spec(Side::Plus, lo.min(0.0)))?;
    let minus = solve_m(model, Side::Minus, lambda, &spec(Side::Minus, hi.max(0.0)))?;
    Ok((plus, minus))
}

struct Matched {
    pert_plus: PerturbedSystem,
    pert_minus: PerturbedSystem,
    a_plus: [C; 2],
    a_minus: [C; 2],
    jost_plus: JostData,
    jost_minus: JostData,
}

fn matched(ctx: &SpectralContext, lambda: f64, extra: &[f64]) -> Result<Matched> {
    let alpha = ctx.model.alpha;
    let xt = lambda.powf(-2.0 / alpha);
    let mut nodes = vec![xt, -xt];
    nodes.extend_from_slice(extra);
    let jost_plus = solve_m(&ctx.model, Side::Plus, lambda, &GridSpec { reach: xt, nodes: vec![xt], ..GridSpec::default() })?;
    let jost_minus = solve_m(&ctx.model, Side::Minus, lambda, &GridSpec { reach: -xt, nodes: vec![-xt], ..GridSpec::default() })?;
    let pert_plus = perturb_in_energy_with(&ctx.plus, lambda, LAMBDA_0, &nodes)?;
    let pert_minus = perturb_in_energy_with(&ctx.minus, lambda, LAMBDA_0, &nodes)?;
    if pert_plus.window_end() < xt * (1.0 - 1e-12) || pert_minus.window_end() < xt * (1.0 - 1e-12) {
        return Err(Error::TurningPointOutOfRange { turning: xt, limit: pert_plus.window_end().min(pert_minus.window_end()) });
    }
    let fp = jost_eval(&jost_plus, xt)?;
    let fm = jost_eval(&jost_minus, -xt)?;
    let a_plus = [
        wronskian(fp, complexify(pert_plus.u0_at(xt)?)),
        wronskian(fp, complexify(pert_plus.u1_at(xt)?)),
    ];
    let a_minus = [
        wronskian(fm, complexify(pert_minus.u0_at(-xt)?)),
        wronskian(fm, complexify(pert_minus.u1_at(-xt)?)),
    ];
    Ok(Matched { pert_plus, pert_minus, a_plus, a_minus, jost_plus, jost_minus })
}

/// `a(λ)`, `b(λ)` from `f_- = a f_+ + b conj(f_+)` at `x = 0`.
fn scattering_from(fp: PointValue<C>, fm: PointValue<C>) -> (C, C) {
    let fpc = PointValue { value: fp.value.conj(), deriv: fp.deriv.conj() };
    let det = wronskian(fp, fpc);
    let a = wronskian(fm, fpc) / det;
    let b = wronskian(fp, fm) / det;
    (a, b)
}

/// Connection coefficients at λ: matched quantities for `λ < λ_0`, direct
/// Wronskian and scattering coefficients whenever the direct solver applies.
pub fn connection_coefficients(ctx: &SpectralContext, lambda: f64) -> Result<ConnectionData> {
    if !(lambda > 0.0) {
        return Err(Error::Contract(format!("lambda must be positive, got {lambda}")));
    }
    let mut out = ConnectionData {
        lambda,
        a_plus: None,
        a_minus: None,
        b_matrix: ctx.b,
        wronskian: C::new(0.0, 0.0),
        wronskian_matched: None,
        wronskian_direct: None,
        refl_a: None,
        refl_b: None,
    };
    if lambda < LAMBDA_0 {
        let m = matched(ctx, lambda, &[])?;
        out.a_plus = Some(m.a_plus);
        out.a_minus = Some(m.a_minus);
        out.wronskian_matched = Some(ctx.bilinear_wronskian(m.a_minus, m.a_plus));
    }
    if lambda >= LAMBDA_FLOOR {
        let (jp, jm) = direct_jost(&ctx.model, lambda, 0.0, 0.0, &[])?;
        let fp = jost_eval(&jp, 0.0)?;
        let fm = jost_eval(&jm, 0.0)?;
        out.wronskian_direct = Some(wronskian(fm, fp));
        let (a, b) = scattering_from(fp, fm);
        out.refl_a = Some(a);
        out.refl_b = Some(b);
    }
    out.wronskian = match (out.wronskian_matched, out.wronskian_direct) {
        (Some(w), _) if lambda <= ctx.delta => w,
        (_, Some(w)) => w,
        (Some(w), None) => w,
        (None, None) => return Err(Error::Regime { lambda, regime: "connection" }),
    };
    Ok(out)
}

/// `(a(λ), b(λ))` with `f_- = a f_+ + b conj(f_+)`.
pub fn scattering_coefficients(model: &PotentialModel, lambda: f64) -> Result<(C, C)> {
    if !(lambda >= 1e-6) {
        return Err(Error::Regime { lambda, regime: "scattering (direct Jost)" });
    }
    let (jp, jm) = direct_jost(model, lambda, 0.0, 0.0, &[])?;
    Ok(scattering_from(jost_eval(&jp, 0.0)?, jost_eval(&jm, 0.0)?))
}

/// Zero-energy resonance and bound-state diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct ResonanceReport {
    pub b11: f64,
    pub scale: f64,
    pub resonant: bool,
    pub bound_states: usize,
}

fn sign_changes(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut count = 0;
    let mut last = 0.0f64;
    for v in values {
        if v != 0.0 {
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                count += 1;
            }
            last = v;
        }
    }
    (count, last)
}

/// Resonance flag from `b_11 = W(u_1^-, u_1^+)` and the number of zeros
/// of `u_1^+` on the whole line.
pub fn resonance_and_bound_states(ctx: &SpectralContext) -> Result<ResonanceReport> {
    let um = ctx.minus.u1_at(0.0)?;
    let up = ctx.plus.u1_at(0.0)?;
    let b11 = ctx.b[1][1];
    // Cauchy-Schwarz bound of the Wronskian; stays nonzero when u_1 or
    // u_1' vanishes at the origin
    let scale = um.value.hypot(um.deriv) * up.value.hypot(up.deriv);
    let resonant = b11.abs() < RESONANCE_FLOOR * scale;
    // x >= 0 straight from u_1^+
    let (n_plus, _) = sign_changes(ctx.plus.u1.flatten().into_iter());
    // x <= 0 through u_1^+ = -b_11 u_0^- + b_01 u_1^-, outward from the origin
    let (b01, u0m, u1m) = (ctx.b[0][1], ctx.minus.u0.flatten(), ctx.minus.u1.flatten());
    let first = up.value;
    let left = std::iter::once(first).chain((1..u0m.len()).map(|i| -b11 * u0m[i] + b01 * u1m[i]));
    let (n_minus, last) = sign_changes(left);
    let mut bound_states = n_plus + n_minus;
    if !resonant && last != 0.0 && (last > 0.0) != (-b11 > 0.0) {
        bound_states += 1;
    }
    Ok(ResonanceReport { b11, scale, resonant, bound_states })
}

/// One value of the resolvent kernel.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralKernelSample {
    pub lambda: f64,
    pub x: f64,
    pub x_prime: f64,
    pub green_re: f64,
    pub green_im: f64,
    pub im_green: f64,
    pub regime_tag: KernelRegime,
}

impl SpectralKernelSample {
    pub fn green(&self) -> C {
        C::new(self.green_re, self.green_im)
    }
}

enum PairRepr {
    Direct { plus: JostData, minus: JostData },
    Matched(Box<Matched>),
}

/// `f_±(·, λ)` on a bounded window together with `W(f_-, f_+)`.
pub struct JostPair {
    pub lambda: f64,
    pub regime: KernelRegime,
    pub wronskian: C,
    b: [[f64; 2]; 2],
    repr: PairRepr,
}

impl JostPair {
    /// Kernel ingredients at λ valid for `x ∈ [lo, hi]` (containing 0);
    /// `nodes` become exact grid points. The matched representation is
    /// used for `λ <= δ`.
    pub fn new(ctx: &SpectralContext, lambda: f64, lo: f64, hi: f64, nodes: &[f64]) -> Result<JostPair> {
        let regime = if lambda <= ctx.delta && lambda < LAMBDA_0 { KernelRegime::LowMatched } else { KernelRegime::DirectJost };
        Self::with_regime(ctx, lambda, lo, hi, nodes, regime)
    }

    pub fn with_regime(
        ctx: &SpectralContext,
        lambda: f64,
        lo: f64,
        hi: f64,
        nodes: &[f64],
        regime: KernelRegime,
    ) -> Result<JostPair> {
        if !(lambda > 0.0) {
            return Err(Error::Contract(format!("lambda must be positive, got {lambda}")));
        }
        let (lo, hi) = (lo.min(0.0), hi.max(0.0));
        match regime {
            KernelRegime::LowMatched => {
                if lambda >= LAMBDA_0 {
                    return Err(Error::Regime { lambda, regime: "low-energy matched" });
                }
                if hi > 1.0 / lambda || -lo > 1.0 / lambda {
                    return Err(Error::Regime { lambda, regime: "low-energy window |x| <= 1/λ" });
                }
                let m = matched(ctx, lambda, nodes)?;
                let w = ctx.bilinear_wronskian(m.a_minus, m.a_plus);
                if w.norm() < SINGULAR_FLOOR {
                    return Err(Error::SingularKernel(lambda));
                }
                Ok(JostPair { lambda, regime, wronskian: w, b: ctx.b, repr: PairRepr::Matched(Box::new(m)) })
            }
            KernelRegime::DirectJost => {
                let (plus, minus) = direct_jost(&ctx.model, lambda, lo, hi, nodes)?;
                let w = wronskian(jost_eval(&minus, 0.0)?, jost_eval(&plus, 0.0)?);
                if w.norm() < SINGULAR_FLOOR {
                    return Err(Error::SingularKernel(lambda));
                }
                Ok(JostPair { lambda, regime, wronskian: w, b: ctx.b, repr: PairRepr::Direct { plus, minus } })
            }
        }
    }

    fn combine(c0: C, c1: C, u0: PointValue<f64>, u1: PointValue<f64>) -> PointValue<C> {
        PointValue { value: c0 * u0.value + c1 * u1.value, deriv: c0 * u0.deriv + c1 * u1.deriv }
    }

    /// `f_+(x, λ)`.
    pub fn f_plus(&self, x: f64) -> Result<PointValue<C>> {
        match &self.repr {
            PairRepr::Direct { plus, .. } => jost_eval(plus, x),
            PairRepr::Matched(m) => {
                let (c0, c1) = (-m.a_plus[1], m.a_plus[0]);
                if x >= 0.0 {
                    Ok(Self::combine(c0, c1, m.pert_plus.u0_at(x)?, m.pert_plus.u1_at(x)?))
                } else {
                    // u_k^+ = -b_1k u_0^- + b_0k u_1^-
                    let b = &self.b;
                    let d0 = c0 * (-b[1][0]) + c1 * (-b[1][1]);
                    let d1 = c0 * b[0][0] + c1 * b[0][1];
                    Ok(Self::combine(d0, d1, m.pert_minus.u0_at(x)?, m.pert_minus.u1_at(x)?))
                }
            }
        }
    }

    /// `f_-(x, λ)`.
    pub fn f_minus(&self, x: f64) -> Result<PointValue<C>> {
        match &self.repr {
            PairRepr::Direct { minus, .. } => jost_eval(minus, x),
            PairRepr::Matched(m) => {
                let (c0, c1) = (m.a_minus[1], -m.a_minus[0]);
                if x <= 0.0 {
                    Ok(Self::combine(c0, c1, m.pert_minus.u0_at(x)?, m.pert_minus.u1_at(x)?))
                } else {
                    // u_j^- = -b_j1 u_0^+ + b_j0 u_1^+
                    let b = &self.b;
                    let d0 = c0 * (-b[0][1]) + c1 * (-b[1][1]);
                    let d1 = c0 * b[0][0] + c1 * b[1][0];
                    Ok(Self::combine(d0, d1, m.pert_plus.u0_at(x)?, m.pert_plus.u1_at(x)?))
                }
            }
        }
    }

    /// `G(x, x', λ)`, symmetric by construction.
    pub fn green(&self, x: f64, x_prime: f64) -> Result<C> {
        let (lo, hi) = if x <= x_prime { (x, x_prime) } else { (x_prime, x) };
        Ok(self.f_minus(lo)?.value * self.f_plus(hi)?.value / self.wronskian)
    }

    /// Jost profiles behind this pair.
    pub fn jost_profiles(&self) -> (&JostData, &JostData) {
        match &self.repr {
            PairRepr::Direct { plus, minus } => (plus, minus),
            PairRepr::Matched(m) => (&m.jost_plus, &m.jost_minus),
        }
    }
}

/// `G(x, x', λ)` with its imaginary part and the regime used.
pub fn greens_kernel(ctx: &SpectralContext, x: f64, x_prime: f64, lambda: f64) -> Result<SpectralKernelSample> {
    let pair = JostPair::new(ctx, lambda, x.min(x_prime), x.max(x_prime), &[x, x_prime])?;
    let g = pair.green(x, x_prime)?;
    Ok(SpectralKernelSample {
        lambda,
        x,
        x_prime,
        green_re: g.re,
        green_im: g.im,
        im_green: g.im,
        regime_tag: pair.regime,
    })
}

/// Spectral table CSV: `λ`, `W`, `a_j^±`, `Im G` at each requested pair.
pub fn spectral_csv(ctx: &SpectralContext, lambdas: &[f64], pairs: &[(f64, f64)]) -> Result<String> {
    let mut out = String::from("lambda,re_w,im_w,re_a0p,im_a0p,re_a1p,im_a1p,re_a0m,im_a0m,re_a1m,im_a1m");
    for (x, xp) in pairs {
        out.push_str(&format!(",im_g({x};{xp})"));
    }
    out.push('\n');
    let rows: Vec<Result<String>> = {
        use rayon::prelude::*;
        lambdas
            .par_iter()
            .map(|&l| {
                let cd = connection_coefficients(ctx, l)?;
                let z = C::new(f64::NAN, f64::NAN);
                let ap = cd.a_plus.unwrap_or([z, z]);
                let am = cd.a_minus.unwrap_or([z, z]);
                let mut row = format!("{:.16e},{:.16e},{:.16e}", l, cd.wronskian.re, cd.wronskian.im);
                for v in [ap[0], ap[1], am[0], am[1]] {
                    row.push_str(&format!(",{:.16e},{:.16e}", v.re, v.im));
                }
                for &(x, xp) in pairs {
                    row.push_str(&format!(",{:.16e}", greens_kernel(ctx, x, xp, l)?.im_green));
                }
                row.push('\n');
                Ok(row)
            })
            .collect()
    };
    for r in rows {
        out.push_str(&r?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{make_inverse_power, make_poschl_teller, make_zero};

    #[test]
    fn free_wronskians() {
        let l = 0.7;
        let x = 1.3;
        let i = C::i();
        let em = PointValue { value: (-i * l * x).exp(), deriv: -i * l * (-i * l * x).exp() };
        let ep = PointValue { value: (i * l * x).exp(), deriv: i * l * (i * l * x).exp() };
        assert!((wronskian(em, ep) - 2.0 * i * l).norm() < 1e-15);
        assert!(wronskian(ep, ep).norm() < 1e-15);
    }

    #[test]
    fn free_kernel_and_scattering() {
        let ctx = SpectralContext::new(&make_zero()).unwrap();
        for l in [0.01, 0.3, 2.0] {
            let s = greens_kernel(&ctx, 0.0, 0.0, l).unwrap();
            assert!((s.green() - 1.0 / (2.0 * C::i() * l)).norm() < 1e-10 / l);
            let s = greens_kernel(&ctx, -1.0, 2.0, l).unwrap();
            let exact = (3.0 * C::i() * l).exp() / (2.0 * C::i() * l);
            assert!((s.green() - exact).norm() < 1e-9 * exact.norm(), "{l} {:?}", s.green());
        }
        let (a, b) = scattering_coefficients(&make_zero(), 0.4).unwrap();
        assert!(a.norm() < 1e-13 && (b - 1.0).norm() < 1e-13);
        let r = resonance_and_bound_states(&ctx).unwrap();
        assert!(r.resonant && r.bound_states == 0);
    }

    #[test]
    fn matched_and_direct_agree() {
        let m = make_inverse_power(3.0, 2.0, 2.0).unwrap();
        let ctx = SpectralContext::new(&m).unwrap();
        let cd = connection_coefficients(&ctx, DELTA).unwrap();
        let (wm, wd) = (cd.wronskian_matched.unwrap(), cd.wronskian_direct.unwrap());
        assert!((wm - wd).norm() < 1e-8 * wd.norm(), "{wm} {wd}");
        let (a, b) = (cd.refl_a.unwrap(), cd.refl_b.unwrap());
        assert!((b.norm_sqr() - a.norm_sqr() - 1.0).abs() < 1e-12 * b.norm_sqr(), "{}", b.norm_sqr() - a.norm_sqr() - 1.0);
        assert!((b / wd - 1.0 / (2.0 * C::i() * DELTA)).norm() < 1e-8 / DELTA);
        let r = resonance_and_bound_states(&ctx).unwrap();
        assert!(!r.resonant && r.bound_states == 0);
        // kernel regimes agree near δ
        let lo = JostPair::new(&ctx, 0.049, -3.0, 3.0, &[]).unwrap();
        let hi = JostPair::new(&ctx, 0.0501, -3.0, 3.0, &[]).unwrap();
        assert_eq!(lo.regime, KernelRegime::LowMatched);
        assert_eq!(hi.regime, KernelRegime::DirectJost);
        for (x, xp) in [(0.0, 0.0), (-2.0, 1.5), (2.5, -0.5)] {
            let g1 = lo.green(x, xp).unwrap();
            let g2 = hi.green(x, xp).unwrap();
            assert!((g1 - g2).norm() < 1e-2 * g2.norm(), "{g1} {g2}");
            assert_eq!(lo.green(x, xp).unwrap(), lo.green(xp, x).unwrap());
        }
    }

    #[test]
    fn poschl_teller_counts() {
        for n in 1..=3 {
            let ctx = SpectralContext::new(&make_poschl_teller(n).unwrap()).unwrap();
            let r = resonance_and_bound_states(&ctx).unwrap();
            assert_eq!(r.bound_states, n as usize);
        }
    }
}
