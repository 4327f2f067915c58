//! Scalar types the expression evaluator runs on: plain `f64` and forward-mode
//! dual numbers, which nest (`Dual<Dual<f64>>`) for second derivatives.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Real:
    Copy
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(v: f64) -> Self;
    /// Primal value.
    fn re(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn tanh(self) -> Self;
    fn abs(self) -> Self;
    fn powi(self, n: i32) -> Self;
    /// Power with a constant real exponent. Caller guarantees a non-negative base.
    fn powf(self, c: f64) -> Self;
    /// Power with a differentiable exponent. Caller guarantees a positive base.
    fn pow(self, e: Self) -> Self {
        (self.ln() * e).exp()
    }
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn re(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, c: f64) -> Self {
        f64::powf(self, c)
    }
    fn pow(self, e: Self) -> Self {
        f64::powf(self, e)
    }
}

/// First-order dual number `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Real> Dual<T> {
    pub fn new(re: T, eps: T) -> Self {
        Dual { re, eps }
    }

    pub fn variable(re: T) -> Self {
        Dual { re, eps: T::cst(1.0) }
    }

    pub fn constant(re: T) -> Self {
        Dual { re, eps: T::cst(0.0) }
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual::new(self.re * o.re, self.eps * o.re + self.re * o.eps)
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.re / o.re;
        Dual::new(q, (self.eps - q * o.eps) / o.re)
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
}

impl<T: Real> Real for Dual<T> {
    fn cst(v: f64) -> Self {
        Dual::constant(T::cst(v))
    }
    fn re(&self) -> f64 {
        self.re.re()
    }
    fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.eps * self.re.cos())
    }
    fn cos(self) -> Self {
        Dual::new(self.re.cos(), -(self.eps * self.re.sin()))
    }
    fn tan(self) -> Self {
        let c = self.re.cos();
        Dual::new(self.re.tan(), self.eps / (c * c))
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual::new(e, self.eps * e)
    }
    fn ln(self) -> Self {
        Dual::new(self.re.ln(), self.eps / self.re)
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        Dual::new(s, self.eps / (T::cst(2.0) * s))
    }
    fn tanh(self) -> Self {
        let t = self.re.tanh();
        Dual::new(t, self.eps * (T::cst(1.0) - t * t))
    }
    fn abs(self) -> Self {
        let r = self.re.re();
        if r > 0.0 {
            self
        } else if r < 0.0 {
            -self
        } else {
            // subgradient 0 at the kink
            Dual::new(self.re.abs(), self.eps * T::cst(0.0))
        }
    }
    fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::cst(1.0),
            1 => self,
            _ => Dual::new(self.re.powi(n), self.eps * self.re.powi(n - 1) * T::cst(n as f64)),
        }
    }
    fn powf(self, c: f64) -> Self {
        Dual::new(self.re.powf(c), self.eps * self.re.powf(c - 1.0) * T::cst(c))
    }
}
