//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Default absolute tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Upper bound on the number of subintervals.
pub const MAX_INTERVALS: usize = 1 << 20;

const MAX_DEPTH: u32 = 60;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, tol).map(|v| -v);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut budget = MAX_INTERVALS;
    let v = step(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut budget);
    match v {
        Some(v) if v.is_finite() => Ok(v),
        Some(_) => Err(Error::QuadratureFailure(format!("non-finite integrand on [{a}, {b}]"))),
        None => Err(Error::NoConvergence { a, b, intervals: MAX_INTERVALS }),
    }
}

#[allow(clippy::too_many_arguments)]
fn step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut usize,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || depth == 0 {
        if depth == 0 && delta.abs() > 15.0 * tol {
            return None;
        }
        return Some(left + right + delta / 15.0);
    }
    if *budget < 2 {
        return None;
    }
    *budget -= 1;
    let l = step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget)?;
    let r = step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget)?;
    Some(l + r)
}

/// Quadrature of a [`ScalarField`]; domain errors are reported as failures.
pub fn quad(f: &ScalarField, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a >= b {
        return Err(Error::InvalidParameter(format!("quad needs a < b, got [{a}, {b}]")));
    }
    let first_err = std::cell::RefCell::new(None);
    let v = integrate(
        |x| match f.value(x) {
            Ok(v) => v,
            Err(e) => {
                first_err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        a,
        b,
        tol,
    );
    match first_err.into_inner() {
        Some(e) => Err(e),
        None => v,
    }
}
