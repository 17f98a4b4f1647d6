//! Truncated Taylor series used to evaluate potentials together with their
//! derivatives. A `Series` holds the coefficients `c_k = f^{(k)}(x0) / k!`.

use std::ops::{Add, Mul, Neg, Sub};

/// Number of stored coefficients; derivatives up to order `ORDER - 1`.
pub const ORDER: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Series {
    pub c: [f64; ORDER],
}

impl Series {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; ORDER];
        c[0] = v;
        Series { c }
    }

    /// The identity map expanded around `x0`.
    pub fn variable(x0: f64) -> Self {
        let mut c = [0.0; ORDER];
        c[0] = x0;
        c[1] = 1.0;
        Series { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for j in 2..=k {
            fact *= j as f64;
        }
        self.c[k] * fact
    }

    pub fn scale(mut self, s: f64) -> Self {
        for v in self.c.iter_mut() {
            *v *= s;
        }
        self
    }

    pub fn recip(&self) -> Self {
        let u = &self.c;
        let mut w = [0.0; ORDER];
        w[0] = 1.0 / u[0];
        for k in 1..ORDER {
            let mut s = 0.0;
            for j in 1..=k {
                s += u[j] * w[k - j];
            }
            w[k] = -s * w[0];
        }
        Series { c: w }
    }

    /// `self^a`, requires a positive constant term.
    pub fn powf(&self, a: f64) -> Self {
        let u = &self.c;
        let mut w = [0.0; ORDER];
        w[0] = u[0].powf(a);
        for k in 1..ORDER {
            let mut s = 0.0;
            for j in 1..=k {
                s += (a * j as f64 - (k - j) as f64) * u[j] * w[k - j];
            }
            w[k] = s / (k as f64 * u[0]);
        }
        Series { c: w }
    }

    pub fn exp(&self) -> Self {
        let u = &self.c;
        let mut w = [0.0; ORDER];
        w[0] = u[0].exp();
        for k in 1..ORDER {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * u[j] * w[k - j];
            }
            w[k] = s / k as f64;
        }
        Series { c: w }
    }

    /// Evaluates the polynomial `sum coeffs[i] * self^i`.
    pub fn poly(&self, coeffs: &[f64]) -> Self {
        let mut acc = Series::constant(0.0);
        for &a in coeffs.iter().rev() {
            acc = acc * *self;
            acc.c[0] += a;
        }
        acc
    }
}

impl Add for Series {
    type Output = Series;
    fn add(mut self, rhs: Series) -> Series {
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a += b;
        }
        self
    }
}

impl Sub for Series {
    type Output = Series;
    fn sub(mut self, rhs: Series) -> Series {
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a -= b;
        }
        self
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(-1.0)
    }
}

impl Mul for Series {
    type Output = Series;
    fn mul(self, rhs: Series) -> Series {
        let mut w = [0.0; ORDER];
        for (i, a) in self.c.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in rhs.c.iter().take(ORDER - i).enumerate() {
                w[i + j] += a * b;
            }
        }
        Series { c: w }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powf_matches_closed_form_derivatives() {
        let s = Series::variable(2.0).powf(-3.0);
        assert!((s.derivative(0) - 0.125).abs() < 1e-15);
        assert!((s.derivative(1) + 3.0 / 16.0).abs() < 1e-15);
        assert!((s.derivative(2) - 12.0 / 32.0).abs() < 1e-14);
        assert!((s.derivative(3) + 60.0 / 64.0).abs() < 1e-13);
    }

    #[test]
    fn exp_and_recip_are_consistent() {
        let x = Series::variable(0.3);
        let e = x.exp();
        let prod = e * (-x).exp();
        assert!((prod.c[0] - 1.0).abs() < 1e-15);
        for k in 1..ORDER {
            assert!(prod.c[k].abs() < 1e-14);
        }
        let r = e.recip() * e;
        assert!((r.c[0] - 1.0).abs() < 1e-15);
        assert!(r.c[3].abs() < 1e-14);
    }
}
