//! Second-order forward-mode dual numbers.
//!
//! A [`Jet2`] carries a value together with its full gradient and Hessian with
//! respect to `m` seed variables. Arithmetic propagates all three exactly, so
//! evaluating an expression on seeded jets yields machine-precision first and
//! second derivatives.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Row-major `m × m`, always symmetric.
    pub hess: Vec<f64>,
}

impl Jet2 {
    pub fn constant(value: f64, m: usize) -> Self {
        Jet2 {
            value,
            grad: vec![0.0; m],
            hess: vec![0.0; m * m],
        }
    }

    /// The `i`-th independent variable evaluated at `value`.
    pub fn variable(value: f64, i: usize, m: usize) -> Self {
        let mut j = Jet2::constant(value, m);
        j.grad[i] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    /// Apply a scalar function given its value and first two derivatives at `self.value`.
    pub fn chain(&self, f: f64, df: f64, d2f: f64) -> Self {
        let m = self.dim();
        let mut out = Jet2::constant(f, m);
        for i in 0..m {
            out.grad[i] = df * self.grad[i];
        }
        for i in 0..m {
            for j in 0..m {
                out.hess[i * m + j] = df * self.hess[i * m + j] + d2f * self.grad[i] * self.grad[j];
            }
        }
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn powi(&self, k: i32) -> Self {
        let v = self.value;
        match k {
            0 => Jet2::constant(1.0, self.dim()),
            1 => self.clone(),
            _ => {
                let kf = k as f64;
                self.chain(v.powi(k), kf * v.powi(k - 1), kf * (kf - 1.0) * v.powi(k - 2))
            }
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet2 {
            value: self.value * s,
            grad: self.grad.iter().map(|g| g * s).collect(),
            hess: self.hess.iter().map(|h| h * s).collect(),
        }
    }
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value + rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a + b).collect(),
            hess: self.hess.iter().zip(&rhs.hess).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value - rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a - b).collect(),
            hess: self.hess.iter().zip(&rhs.hess).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        let m = self.dim();
        let (a, b) = (self, rhs);
        let mut out = Jet2::constant(a.value * b.value, m);
        for i in 0..m {
            out.grad[i] = a.value * b.grad[i] + b.value * a.grad[i];
        }
        for i in 0..m {
            for j in 0..m {
                let k = i * m + j;
                out.hess[k] = a.value * b.hess[k]
                    + b.value * a.hess[k]
                    + a.grad[i] * b.grad[j]
                    + b.grad[i] * a.grad[j];
            }
        }
        out
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}
