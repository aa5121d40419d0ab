//! Real functions of one variable carrying exact derivatives.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Closed interval, either end possibly infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn half_line(r_min: f64) -> Self {
        Interval { lo: r_min, hi: f64::INFINITY }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn intersect(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.max(o.lo), hi: self.hi.min(o.hi) }
    }

    /// `n` uniformly spaced points including both ends.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        linspace(self.lo, self.hi, n)
    }

    /// Uniform points with a guard band removed at both ends.
    pub fn guarded(&self, n: usize, guard: f64) -> Vec<f64> {
        linspace(self.lo + guard, self.hi - guard, n)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub type JetFn = dyn Fn(f64, usize) -> Jet + Send + Sync;

/// A real function with analytic derivatives up to `max_order`.
#[derive(Clone)]
pub struct ScalarField {
    f: Arc<JetFn>,
    max_order: usize,
    domain: Interval,
}

/// Derivative order available from closed-form fields.
pub const CLOSED_FORM_ORDER: usize = 24;

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("max_order", &self.max_order)
            .field("domain", &self.domain)
            .finish()
    }
}

impl ScalarField {
    /// Wraps a jet-valued closure. The closure receives the expansion point
    /// and the requested order and must return a jet of at least that order.
    pub fn new<F>(f: F, max_order: usize, domain: Interval) -> Self
    where
        F: Fn(f64, usize) -> Jet + Send + Sync + 'static,
    {
        ScalarField { f: Arc::new(f), max_order, domain }
    }

    /// Closed form written over the jet variable `x`.
    pub fn closed_form<F>(f: F, domain: Interval) -> Self
    where
        F: Fn(&Jet) -> Jet + Send + Sync + 'static,
    {
        ScalarField::new(move |x, n| f(&Jet::variable(x, n)), CLOSED_FORM_ORDER, domain)
    }

    pub fn constant(c: f64) -> Self {
        ScalarField::new(move |_, n| Jet::constant(c, n), usize::MAX, Interval::REAL_LINE)
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn with_domain(&self, domain: Interval) -> Self {
        ScalarField { domain, ..self.clone() }
    }

    fn check(&self, x: f64, order: usize) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(Error::OutOfDomain { x, lo: self.domain.lo, hi: self.domain.hi });
        }
        if order > self.max_order {
            return Err(Error::OrderUnavailable { requested: order, available: self.max_order });
        }
        Ok(())
    }

    pub fn jet(&self, x: f64, order: usize) -> Result<Jet> {
        self.check(x, order)?;
        Ok((self.f)(x, order).truncate(order))
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(self.jet(x, 0)?.value())
    }

    pub fn derivative(&self, k: usize, x: f64) -> Result<f64> {
        Ok(self.jet(x, k)?.derivative(k))
    }

    /// Pointwise combination of two fields through a jet function.
    pub fn combine<F>(&self, other: &ScalarField, f: F) -> ScalarField
    where
        F: Fn(&Jet, &Jet) -> Jet + Send + Sync + 'static,
    {
        let (a, b) = (self.f.clone(), other.f.clone());
        ScalarField {
            f: Arc::new(move |x, n| f(&a(x, n), &b(x, n))),
            max_order: self.max_order.min(other.max_order),
            domain: self.domain.intersect(&other.domain),
        }
    }

    /// Field of the derivative; loses one order.
    pub fn derivative_field(&self) -> ScalarField {
        let f = self.f.clone();
        ScalarField {
            f: Arc::new(move |x, n| f(x, n + 1).differentiate()),
            max_order: self.max_order.saturating_sub(1),
            domain: self.domain,
        }
    }

    pub fn map<F>(&self, f: F) -> ScalarField
    where
        F: Fn(&Jet) -> Jet + Send + Sync + 'static,
    {
        let a = self.f.clone();
        ScalarField { f: Arc::new(move |x, n| f(&a(x, n))), max_order: self.max_order, domain: self.domain }
    }
}
