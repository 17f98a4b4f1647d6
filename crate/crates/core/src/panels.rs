//! Chebyshev panels: the spatial discretization shared by the Volterra
//! solvers. Each panel carries `Q` Chebyshev extrema; functions are stored
//! by node values and interpolated barycentrically.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::Scalar;
use crate::quadrature::gauss_legendre;

/// Nodes per panel.
pub const Q: usize = 17;
/// Gauss points per node for the kernel integrals `int_{t_j}^1`.
pub const G: usize = 32;

/// Reference-panel data on `[-1, 1]`.
pub struct Reference {
    pub t: [f64; Q],
    pub bary: [f64; Q],
    /// Clenshaw–Curtis weights.
    pub cc: [f64; Q],
    /// `sb[j][k] = int_{t_j}^1 l_k`.
    pub sb: Vec<[f64; Q]>,
    /// `sf[j][k] = int_{-1}^{t_j} l_k`.
    pub sf: Vec<[f64; Q]>,
    /// Spectral differentiation matrix.
    pub d: Vec<[f64; Q]>,
    /// Gauss points on `[t_j, 1]` (offset `s - t_j`), weights and the
    /// Lagrange basis there: index `j * G + g`.
    pub sub_offset: Vec<f64>,
    pub sub_weight: Vec<f64>,
    pub sub_basis: Vec<[f64; Q]>,
}

/// Lagrange basis values at `s`.
pub fn lagrange_basis(t: &[f64; Q], bary: &[f64; Q], s: f64) -> [f64; Q] {
    let mut out = [0.0; Q];
    for k in 0..Q {
        if s == t[k] {
            out[k] = 1.0;
            return out;
        }
    }
    let mut den = 0.0;
    for k in 0..Q {
        let v = bary[k] / (s - t[k]);
        out[k] = v;
        den += v;
    }
    for v in out.iter_mut() {
        *v /= den;
    }
    out
}

impl Reference {
    fn build() -> Reference {
        let mut t = [0.0; Q];
        let mut bary = [0.0; Q];
        for j in 0..Q {
            t[j] = -(std::f64::consts::PI * j as f64 / (Q - 1) as f64).cos();
            bary[j] = if j % 2 == 0 { 1.0 } else { -1.0 };
        }
        t[(Q - 1) / 2] = 0.0;
        bary[0] *= 0.5;
        bary[Q - 1] *= 0.5;
        let (gx, gw) = gauss_legendre(G);
        let integrate_basis = |lo: f64, hi: f64| -> [f64; Q] {
            let mut acc = [0.0; Q];
            for (x, w) in gx.iter().zip(&gw) {
                let s = lo + 0.5 * (hi - lo) * (x + 1.0);
                let l = lagrange_basis(&t, &bary, s);
                for k in 0..Q {
                    acc[k] += 0.5 * (hi - lo) * w * l[k];
                }
            }
            acc
        };
        let cc = integrate_basis(-1.0, 1.0);
        let sb: Vec<[f64; Q]> = (0..Q).map(|j| integrate_basis(t[j], 1.0)).collect();
        let sf: Vec<[f64; Q]> = (0..Q).map(|j| integrate_basis(-1.0, t[j])).collect();
        let mut d = vec![[0.0; Q]; Q];
        for i in 0..Q {
            let mut diag = 0.0;
            for k in 0..Q {
                if k != i {
                    let v = (bary[k] / bary[i]) / (t[i] - t[k]);
                    d[i][k] = v;
                    diag -= v;
                }
            }
            d[i][i] = diag;
        }
        let mut sub_offset = Vec::with_capacity(Q * G);
        let mut sub_weight = Vec::with_capacity(Q * G);
        let mut sub_basis = Vec::with_capacity(Q * G);
        for &tj in &t {
            let half = 0.5 * (1.0 - tj);
            for (x, w) in gx.iter().zip(&gw) {
                let off = half * (x + 1.0);
                sub_offset.push(off);
                sub_weight.push(half * w);
                sub_basis.push(lagrange_basis(&t, &bary, tj + off));
            }
        }
        Reference { t, bary, cc, sb, sf, d, sub_offset, sub_weight, sub_basis }
    }

    pub fn get() -> &'static Reference {
        static REF: OnceLock<Reference> = OnceLock::new();
        REF.get_or_init(Reference::build)
    }
}

/// Contiguous panels covering `[edges[0], edges[last]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelGrid {
    pub edges: Vec<f64>,
}

impl PanelGrid {
    /// Panels on `[lo, hi]` with every breakpoint inside the interval as an
    /// edge (the origin always is one) and widths bounded by
    /// `width(|x|)` evaluated at the panel end nearest the origin.
    pub fn build<F: Fn(f64) -> f64>(lo: f64, hi: f64, breakpoints: &[f64], width: F) -> PanelGrid {
        assert!(hi > lo, "empty panel range");
        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .copied()
            .chain(std::iter::once(0.0))
            .filter(|&b| b > lo && b < hi)
            .collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
        let mut edges = vec![cuts[0]];
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let pieces = if a >= 0.0 {
                subdivide(a, b, &width)
            } else {
                let mut p: Vec<f64> = subdivide(-b, -a, &width).into_iter().map(|x| -x).collect();
                p.reverse();
                p
            };
            edges.extend_from_slice(&pieces[1..]);
        }
        PanelGrid { edges }
    }

    pub fn n_panels(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn lo(&self) -> f64 {
        self.edges[0]
    }

    pub fn hi(&self) -> f64 {
        *self.edges.last().unwrap()
    }

    pub fn bounds(&self, p: usize) -> (f64, f64) {
        (self.edges[p], self.edges[p + 1])
    }

    /// Physical nodes of panel `p`, ascending.
    pub fn nodes(&self, p: usize) -> [f64; Q] {
        let r = Reference::get();
        let (a, b) = self.bounds(p);
        let mut x = [0.0; Q];
        for j in 0..Q {
            x[j] = 0.5 * (a + b) + 0.5 * (b - a) * r.t[j];
        }
        x[0] = a;
        x[Q - 1] = b;
        x
    }

    /// Panel containing `x` (the left one at shared edges).
    pub fn locate(&self, x: f64) -> Result<usize> {
        let (lo, hi) = (self.lo(), self.hi());
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if !(x >= lo - slack && x <= hi + slack) {
            return Err(Error::OutOfGrid { x, lo, hi });
        }
        let idx = self.edges.partition_point(|&e| e < x);
        Ok(idx.saturating_sub(1).min(self.n_panels() - 1))
    }

    /// All nodes with duplicated panel edges removed.
    pub fn all_nodes(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_panels() * (Q - 1) + 1);
        for p in 0..self.n_panels() {
            let x = self.nodes(p);
            let start = if p == 0 { 0 } else { 1 };
            out.extend_from_slice(&x[start..]);
        }
        out
    }
}

fn subdivide<F: Fn(f64) -> f64>(a: f64, b: f64, width: &F) -> Vec<f64> {
    let mut pts = vec![a];
    let mut x = a;
    loop {
        let w = width(x).max(1e-9);
        let rest = b - x;
        if rest <= w * (1.0 + 1e-12) {
            pts.push(b);
            break;
        }
        if rest < 1.5 * w {
            pts.push(x + 0.5 * rest);
            pts.push(b);
            break;
        }
        x += w;
        pts.push(x);
    }
    pts
}

/// Node values of a function on a panel grid.
#[derive(Debug, Clone)]
pub struct PanelValues<T> {
    pub values: Vec<[T; Q]>,
}

impl<T: Scalar> PanelValues<T> {
    pub fn new(n: usize) -> Self {
        PanelValues { values: vec![[T::default(); Q]; n] }
    }

    /// Barycentric interpolation on panel `p`.
    pub fn eval_on(&self, grid: &PanelGrid, p: usize, x: f64) -> T {
        let r = Reference::get();
        let (a, b) = grid.bounds(p);
        let s = (2.0 * x - a - b) / (b - a);
        let l = lagrange_basis(&r.t, &r.bary, s.clamp(-1.0, 1.0));
        let mut acc = T::default();
        for k in 0..Q {
            acc = acc + self.values[p][k] * l[k];
        }
        acc
    }

    pub fn eval(&self, grid: &PanelGrid, x: f64) -> Result<T> {
        let p = grid.locate(x)?;
        Ok(self.eval_on(grid, p, x))
    }

    /// Flattened values matching [`PanelGrid::all_nodes`].
    pub fn flatten(&self) -> Vec<T> {
        let mut out = Vec::new();
        for (p, v) in self.values.iter().enumerate() {
            let start = if p == 0 { 0 } else { 1 };
            out.extend_from_slice(&v[start..]);
        }
        out
    }
}
