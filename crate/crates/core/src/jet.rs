//! Truncated Taylor series ("jets").
//!
//! A [`Jet`] of order `n` stores the normalized coefficients `f^(k)(x0) / k!`
//! for `k = 0..=n`. Arithmetic follows the usual power-series recurrences, so
//! every closed-form expression written over jets yields exact derivatives
//! up to round-off.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

impl Jet {
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet { c }
    }

    /// The identity function expanded around `x`.
    pub fn variable(x: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet { c }
    }

    pub fn zero(order: usize) -> Self {
        Jet { c: vec![0.0; order + 1] }
    }

    pub fn from_coeffs(c: Vec<f64>) -> Self {
        assert!(!c.is_empty(), "a jet needs at least one coefficient");
        Jet { c }
    }

    /// Builds a jet from plain derivatives `f, f', f'', ...`.
    pub fn from_derivatives(d: &[f64]) -> Self {
        Jet::from_coeffs(d.iter().enumerate().map(|(k, v)| v / factorial(k)).collect())
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.c.get(k).copied().unwrap_or(0.0)
    }

    /// The plain `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.coeff(k) * factorial(k)
    }

    pub fn derivatives(&self) -> Vec<f64> {
        (0..=self.order()).map(|k| self.derivative(k)).collect()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        Jet { c: self.c[..=n].to_vec() }
    }

    /// Jet of `f'`, one order lower. An order-0 jet has no derivative
    /// information and differentiates to zero.
    pub fn differentiate(&self) -> Self {
        if self.order() == 0 {
            return Jet::zero(0);
        }
        Jet { c: (1..self.c.len()).map(|k| k as f64 * self.c[k]).collect() }
    }

    /// Jet of the `k`-th derivative.
    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |j, _| j.differentiate())
    }

    /// Antiderivative with prescribed value, one order higher.
    pub fn integrate(&self, value: f64) -> Self {
        let mut c = Vec::with_capacity(self.c.len() + 1);
        c.push(value);
        c.extend(self.c.iter().enumerate().map(|(k, v)| v / (k + 1) as f64));
        Jet { c }
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet { c: self.c.iter().map(|v| v * s).collect() }
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    fn common(&self, other: &Jet) -> usize {
        self.order().min(other.order())
    }

    pub fn recip(&self) -> Self {
        Jet::constant(1.0, self.order()) / self
    }

    pub fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut base = self.clone();
        let mut acc = Jet::constant(1.0, self.order());
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Real power for positive base.
    pub fn powf(&self, a: f64) -> Self {
        (self.ln().scale(a)).exp()
    }

    pub fn exp(&self) -> Self {
        let n = self.order();
        let a = &self.c;
        let mut e = vec![0.0; n + 1];
        e[0] = a[0].exp();
        for k in 1..=n {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet { c: e }
    }

    pub fn ln(&self) -> Self {
        let n = self.order();
        let a = &self.c;
        let mut l = vec![0.0; n + 1];
        l[0] = a[0].ln();
        for k in 1..=n {
            let s: f64 = (1..k).map(|j| j as f64 * l[j] * a[k - j]).sum();
            l[k] = (a[k] - s / k as f64) / a[0];
        }
        Jet { c: l }
    }

    pub fn sqrt(&self) -> Self {
        let n = self.order();
        let a = &self.c;
        let mut s = vec![0.0; n + 1];
        s[0] = a[0].sqrt();
        for k in 1..=n {
            let acc: f64 = (1..k).map(|j| s[j] * s[k - j]).sum();
            s[k] = (a[k] - acc) / (2.0 * s[0]);
        }
        Jet { c: s }
    }

    /// `(sin, cos)` computed together.
    pub fn sin_cos(&self) -> (Self, Self) {
        let n = self.order();
        let a = &self.c;
        let mut s = vec![0.0; n + 1];
        let mut c = vec![0.0; n + 1];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..=n {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                ss += j as f64 * a[j] * c[k - j];
                cc += j as f64 * a[j] * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = -cc / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    /// `(sinh, cosh)` computed together.
    pub fn sinh_cosh(&self) -> (Self, Self) {
        let n = self.order();
        let a = &self.c;
        let mut s = vec![0.0; n + 1];
        let mut c = vec![0.0; n + 1];
        s[0] = a[0].sinh();
        c[0] = a[0].cosh();
        for k in 1..=n {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                ss += j as f64 * a[j] * c[k - j];
                cc += j as f64 * a[j] * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = cc / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    pub fn sinh(&self) -> Self {
        self.sinh_cosh().0
    }

    pub fn cosh(&self) -> Self {
        self.sinh_cosh().1
    }

    /// Uses `t' = (1 - t^2) a'`, stable for large arguments.
    pub fn tanh(&self) -> Self {
        let n = self.order();
        let a = &self.c;
        let mut t = vec![0.0; n + 1];
        let mut u = vec![0.0; n + 1];
        t[0] = a[0].tanh();
        u[0] = 1.0 - t[0] * t[0];
        for k in 1..=n {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * u[k - j]).sum();
            t[k] = s / k as f64;
            let sq: f64 = (0..=k).map(|i| t[i] * t[k - i]).sum();
            u[k] = -sq;
        }
        Jet { c: t }
    }

    pub fn erf(&self) -> Self {
        let v = libm::erf(self.value());
        if self.order() == 0 {
            return Jet::constant(v, 0);
        }
        let low = self.truncate(self.order() - 1);
        let gauss = (&low * &low).scale(-1.0).exp().scale(2.0 / std::f64::consts::PI.sqrt());
        (&gauss * &self.differentiate()).integrate(v)
    }
}

impl Add<&Jet> for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let n = self.common(rhs);
        Jet { c: (0..=n).map(|k| self.c[k] + rhs.c[k]).collect() }
    }
}

impl Sub<&Jet> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let n = self.common(rhs);
        Jet { c: (0..=n).map(|k| self.c[k] - rhs.c[k]).collect() }
    }
}

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.common(rhs);
        Jet { c: (0..=n).map(|k| (0..=k).map(|j| self.c[j] * rhs.c[k - j]).sum()).collect() }
    }
}

impl Div<&Jet> for &Jet {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        let n = self.common(rhs);
        let b = &rhs.c;
        let mut q = vec![0.0; n + 1];
        for k in 0..=n {
            let s: f64 = (1..=k).map(|j| b[j] * q[k - j]).sum();
            q[k] = (self.c[k] - s) / b[0];
        }
        Jet { c: q }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
        impl $tr<f64> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: f64) -> Jet {
                self.$m(&Jet::constant(rhs, self.order()))
            }
        }
        impl $tr<f64> for Jet {
            type Output = Jet;
            fn $m(self, rhs: f64) -> Jet {
                (&self).$m(&Jet::constant(rhs, self.order()))
            }
        }
        impl $tr<Jet> for f64 {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&Jet::constant(self, rhs.order())).$m(&rhs)
            }
        }
        impl $tr<&Jet> for f64 {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&Jet::constant(self, rhs.order())).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        *self = &*self + rhs;
    }
}
