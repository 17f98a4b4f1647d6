//! Scalars shared by the real and complex solvers and a dense LU solve for
//! the small per-panel systems.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

pub trait Scalar:
    Copy
    + Default
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + Send
    + Sync
{
    fn modulus(self) -> f64;
    fn from_real(x: f64) -> Self;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn from_real(x: f64) -> Self {
        x
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

/// Solves `a x = b` in place (`a` is `n x n` row-major, overwritten);
/// returns `None` for a numerically singular matrix.
pub fn lu_solve<T: Scalar>(a: &mut [T], b: &mut [T], n: usize) -> Option<()> {
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].modulus();
        for r in col + 1..n {
            let m = a[r * n + col].modulus();
            if m > best {
                best = m;
                piv = r;
            }
        }
        if !(best > 1e-300) {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f.modulus() == 0.0 {
                continue;
            }
            for c in col..n {
                let v = a[col * n + c];
                a[r * n + c] = a[r * n + c] - f * v;
            }
            let bv = b[col];
            b[r] = b[r] - f * bv;
        }
    }
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s = s - a[r * n + c] * b[c];
        }
        b[r] = s / a[r * n + r];
    }
    Some(())
}

/// Ordinary least squares `y ~ sum_j c_j basis_j(x)` via normal equations
/// on a column-scaled design; returns coefficients and residual norms.
pub fn least_squares(design: &[Vec<f64>], y: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let p = design.len();
    let n = y.len();
    let scale: Vec<f64> = design
        .iter()
        .map(|col| col.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300))
        .collect();
    let mut ata = vec![0.0; p * p];
    let mut aty = vec![0.0; p];
    for i in 0..p {
        for j in 0..p {
            ata[i * p + j] = (0..n).map(|k| design[i][k] * design[j][k]).sum::<f64>()
                / (scale[i] * scale[j]);
        }
        aty[i] = (0..n).map(|k| design[i][k] * y[k]).sum::<f64>() / scale[i];
    }
    lu_solve(&mut ata, &mut aty, p)?;
    let coef: Vec<f64> = aty.iter().zip(&scale).map(|(c, s)| c / s).collect();
    let resid: Vec<f64> = (0..n)
        .map(|k| y[k] - (0..p).map(|j| coef[j] * design[j][k]).sum::<f64>())
        .collect();
    Some((coef, resid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_complex_system() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let mut a = vec![one, i, -i, 2.0 * one];
        let x = [one + i, 3.0 * one];
        let mut b = vec![a[0] * x[0] + a[1] * x[1], a[2] * x[0] + a[3] * x[1]];
        lu_solve(&mut a, &mut b, 2).unwrap();
        assert!((b[0] - x[0]).norm() < 1e-15 && (b[1] - x[1]).norm() < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 1.0];
        assert!(lu_solve(&mut a, &mut b, 2).is_none());
    }

    #[test]
    fn least_squares_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|x| 2.0 - 3.0 * x).collect();
        let (c, r) = least_squares(&[vec![1.0; 10], x], &y).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-12 && (c[1] + 3.0).abs() < 1e-12);
        assert!(r.iter().all(|v| v.abs() < 1e-12));
    }
}
