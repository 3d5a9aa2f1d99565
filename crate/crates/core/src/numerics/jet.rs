//! Truncated bivariate Taylor series ("jets") in the conjugate coordinates
//! `(w, z)` about the origin.
//!
//! A [`Jet`] of order `K` stores the coefficients `c[a][b]` of `w^a z^b` for
//! `a + b <= K`. Every catalog characteristic function has a closed-form jet,
//! so derivatives at the origin come out exactly (to rounding) instead of
//! through finite differences: `∂^a_w ∂^b_z f(0) = a! b! c[a][b]`.

use num_complex::Complex64;
use std::ops::{Add, Mul};

/// Highest total order a jet may carry.
pub const MAX_JET_ORDER: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    order: usize,
    coeffs: Vec<Complex64>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

impl Jet {
    pub fn zero(order: usize) -> Self {
        assert!(order <= MAX_JET_ORDER, "jet order {order} above {MAX_JET_ORDER}");
        Jet {
            order,
            coeffs: vec![Complex64::new(0.0, 0.0); (order + 1) * (order + 1)],
        }
    }

    pub fn constant(order: usize, value: Complex64) -> Self {
        let mut j = Jet::zero(order);
        j.coeffs[0] = value;
        j
    }

    pub fn one(order: usize) -> Self {
        Jet::constant(order, Complex64::new(1.0, 0.0))
    }

    /// `c0 + cw * w + cz * z`.
    pub fn affine(order: usize, c0: Complex64, cw: Complex64, cz: Complex64) -> Self {
        let mut j = Jet::constant(order, c0);
        if order >= 1 {
            j.set(1, 0, cw);
            j.set(0, 1, cz);
        }
        j
    }

    /// `qw * w^2 + qz * z^2`.
    pub fn diagonal_quadratic(order: usize, qw: Complex64, qz: Complex64) -> Self {
        let mut j = Jet::zero(order);
        if order >= 2 {
            j.set(2, 0, qw);
            j.set(0, 2, qz);
        }
        j
    }

    /// Series `Σ_k f_k u^k` in the radial variable `u = w² + z²`.
    pub fn from_radial_series(order: usize, coeffs: &[Complex64]) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let u = Jet::diagonal_quadratic(order, one, one);
        // Horner in u
        let mut acc = Jet::zero(order);
        for c in coeffs.iter().take(order / 2 + 1).rev() {
            acc = &(&acc * &u) + &Jet::constant(order, *c);
        }
        acc
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn idx(&self, a: usize, b: usize) -> usize {
        a * (self.order + 1) + b
    }

    /// Coefficient of `w^a z^b`; zero beyond the truncation order.
    pub fn coeff(&self, a: usize, b: usize) -> Complex64 {
        if a + b > self.order {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[self.idx(a, b)]
        }
    }

    pub fn set(&mut self, a: usize, b: usize, v: Complex64) {
        assert!(a + b <= self.order);
        let i = self.idx(a, b);
        self.coeffs[i] = v;
    }

    /// `∂^a_w ∂^b_z f` at the origin, or `None` beyond the stored order.
    pub fn derivative(&self, a: usize, b: usize) -> Option<Complex64> {
        (a + b <= self.order).then(|| self.coeff(a, b) * factorial(a) * factorial(b))
    }

    pub fn scale(&self, k: Complex64) -> Jet {
        Jet {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Jet of `ξ ↦ f(g ξ)` for real `g`.
    pub fn scale_argument(&self, g: f64) -> Jet {
        let mut out = self.clone();
        for a in 0..=self.order {
            for b in 0..=self.order - a {
                let i = out.idx(a, b);
                out.coeffs[i] *= g.powi((a + b) as i32);
            }
        }
        out
    }

    /// Jet of `ξ ↦ f(−ξ)`.
    pub fn negate_argument(&self) -> Jet {
        self.scale_argument(-1.0)
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        let mut out = Jet::zero(order);
        for a in 0..=order {
            for b in 0..=order - a {
                out.set(a, b, self.coeff(a, b));
            }
        }
        out
    }

    /// `exp(f)`, computed as `e^{f(0)} Σ_k t^k / k!` with `t = f − f(0)`.
    pub fn exp(&self) -> Jet {
        let c0 = self.coeffs[0];
        let mut t = self.clone();
        t.coeffs[0] = Complex64::new(0.0, 0.0);
        let mut term = Jet::one(self.order);
        let mut acc = Jet::one(self.order);
        for k in 1..=self.order {
            term = (&term * &t).scale(Complex64::new(1.0 / k as f64, 0.0));
            acc = &acc + &term;
        }
        acc.scale(c0.exp())
    }

    /// Value of the truncated polynomial at `(w, z)`; only useful near the origin.
    pub fn eval_polynomial(&self, w: f64, z: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..=self.order {
            for b in 0..=self.order - a {
                acc += self.coeff(a, b) * w.powi(a as i32) * z.powi(b as i32);
            }
        }
        acc
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut out = Jet::zero(order);
        for a in 0..=order {
            for b in 0..=order - a {
                out.set(a, b, self.coeff(a, b) + rhs.coeff(a, b));
            }
        }
        out
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut out = Jet::zero(order);
        for a1 in 0..=order {
            for b1 in 0..=order - a1 {
                let x = self.coeff(a1, b1);
                if x == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for a2 in 0..=order - a1 - b1 {
                    for b2 in 0..=order - a1 - b1 - a2 {
                        let i = out.idx(a1 + a2, b1 + b2);
                        out.coeffs[i] += x * rhs.coeff(a2, b2);
                    }
                }
            }
        }
        out
    }
}
