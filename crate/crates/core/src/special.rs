//! Special functions and the finite-difference test oracle.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::jet::Jet;

/// Step used by [`fd_derivative`].
pub const FD_STEP: f64 = 1e-4;

/// `K_n(x) = (−i)^n He_n(ix)` via `K_{n+1} = x K_n + n K_{n−1}`.
pub fn kn_poly(n: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if n == 0 {
        return a;
    }
    for j in 1..n {
        let c = x * b + j as f64 * a;
        a = b;
        b = c;
    }
    b
}

/// Jet version of [`kn_poly`].
pub fn kn_poly_jet(n: usize, x: &Jet) -> Jet {
    let mut a = Jet::constant(1.0, x.order());
    if n == 0 {
        return a;
    }
    let mut b = x.clone();
    for j in 1..n {
        let c = x * &b + a.scale(j as f64);
        a = b;
        b = c;
    }
    b
}

/// Probabilists' Hermite polynomial `He_n`, `He_{n+1} = x He_n − n He_{n−1}`.
pub fn hermite_he_jet(n: usize, x: &Jet) -> Jet {
    let mut a = Jet::constant(1.0, x.order());
    if n == 0 {
        return a;
    }
    let mut b = x.clone();
    for j in 1..n {
        let c = x * &b - a.scale(j as f64);
        a = b;
        b = c;
    }
    b
}

/// Generalized Laguerre polynomial `L_n^a(x)` by the three-term recurrence.
pub fn laguerre(n: usize, a: f64, x: f64) -> f64 {
    let (mut l0, mut l1) = (1.0, 1.0 + a - x);
    if n == 0 {
        return l0;
    }
    for k in 1..n {
        let k = k as f64;
        let l2 = ((2.0 * k + 1.0 + a - x) * l1 - (k + a) * l0) / (k + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

/// Jet version of [`laguerre`].
pub fn laguerre_jet(n: usize, a: f64, x: &Jet) -> Jet {
    let one = Jet::constant(1.0, x.order());
    let mut l0 = one.clone();
    if n == 0 {
        return l0;
    }
    let mut l1 = (1.0 + a) - x;
    for k in 1..n {
        let k = k as f64;
        let l2 = (((2.0 * k + 1.0 + a) - x) * &l1 - l0.scale(k + a)).scale(1.0 / (k + 1.0));
        l0 = l1;
        l1 = l2;
    }
    l1
}

/// Rising factorial `(a)_n`.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + k as f64))
}

pub fn factorial(n: usize) -> f64 {
    pochhammer(1.0, n)
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Central finite difference of order 1 or 2 with step `1e-4`.
pub fn fd_derivative(f: &ScalarField, x: f64, order: usize) -> Result<f64> {
    let h = FD_STEP;
    match order {
        1 => Ok((f.value(x + h)? - f.value(x - h)?) / (2.0 * h)),
        2 => Ok((f.value(x + h)? - 2.0 * f.value(x)? + f.value(x - h)?) / (h * h)),
        _ => Err(Error::InvalidParameter(format!("fd_derivative supports orders 1 and 2, got {order}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Interval;
    use approx::assert_relative_eq;

    /// He_n by its own recurrence, evaluated at i x with complex arithmetic.
    fn kn_via_complex_hermite(n: usize, x: f64) -> f64 {
        // He_{k+1}(z) = z He_k(z) - k He_{k-1}(z), z = i x; track (re, im).
        let z = (0.0, x);
        let mul = |a: (f64, f64), b: (f64, f64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
        let mut h0 = (1.0, 0.0);
        let mut h1 = z;
        if n == 0 {
            return 1.0;
        }
        for k in 1..n {
            let zh = mul(z, h1);
            let h2 = (zh.0 - k as f64 * h0.0, zh.1 - k as f64 * h0.1);
            h0 = h1;
            h1 = h2;
        }
        // (-i)^n
        let mut p = (1.0, 0.0);
        for _ in 0..n {
            p = mul(p, (0.0, -1.0));
        }
        let r = mul(p, h1);
        assert!(r.1.abs() < 1e-9 * (1.0 + r.0.abs()));
        r.0
    }

    #[test]
    fn hermite_he_low_orders() {
        let x = Jet::variable(1.5, 1);
        assert_relative_eq!(hermite_he_jet(2, &x).value(), 1.5 * 1.5 - 1.0);
        assert_relative_eq!(hermite_he_jet(3, &x).value(), 1.5f64.powi(3) - 4.5);
        // He_n' = n He_{n-1}
        assert_relative_eq!(hermite_he_jet(4, &x).derivative(1), 4.0 * hermite_he_jet(3, &x).value(), epsilon = 1e-12);
    }

    #[test]
    fn kn_base_cases() {
        assert_eq!(kn_poly(0, 3.7), 1.0);
        assert_eq!(kn_poly(2, 0.0), 1.0);
        for &x in &[-1.5, 0.0, 0.8, 2.0] {
            assert_relative_eq!(kn_poly(3, x), x.powi(3) + 3.0 * x, epsilon = 1e-12);
        }
    }

    #[test]
    fn kn_matches_complex_hermite() {
        for n in 0..=10 {
            for &x in &[-2.0, -0.3, 0.0, 0.9, 1.7] {
                let a = kn_poly(n, x);
                let b = kn_via_complex_hermite(n, x);
                assert_relative_eq!(a, b, epsilon = 1e-9, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn k3_has_single_node_at_origin() {
        let xs: Vec<f64> = (0..400).map(|i| -3.99 + 0.02 * i as f64).collect();
        let changes = xs.windows(2).filter(|w| kn_poly(3, w[0]) * kn_poly(3, w[1]) < 0.0).count();
        assert_eq!(changes, 1);
        assert_eq!(kn_poly(3, 0.0), 0.0);
    }

    #[test]
    fn even_kn_are_nodeless() {
        for n in [0, 2, 4, 6, 8] {
            assert!((0..200).all(|i| kn_poly(n, -5.0 + 0.05 * i as f64) > 0.0));
        }
    }

    #[test]
    fn kn_jet_derivative_is_n_k_n_minus_1() {
        let x = 0.7;
        let j = kn_poly_jet(5, &Jet::variable(x, 1));
        assert_relative_eq!(j.derivative(1), 5.0 * kn_poly(4, x), epsilon = 1e-12);
    }

    #[test]
    fn laguerre_cases() {
        assert_eq!(laguerre(0, 0.3, 1.1), 1.0);
        assert_relative_eq!(laguerre(1, 0.3, 1.1), 1.0 + 0.3 - 1.1, epsilon = 1e-15);
        assert_relative_eq!(laguerre(2, 1.0, 2.0), -1.0, epsilon = 1e-14);
    }

    #[test]
    fn laguerre_explicit_polynomial() {
        for &(a, x) in &[(0.5, 0.2), (2.0, 3.0), (1.0, 7.5)] {
            let explicit = (a + 2.0) * (a + 1.0) / 2.0 - (a + 2.0) * x + x * x / 2.0;
            assert_relative_eq!(laguerre(2, a, x), explicit, epsilon = 1e-12);
        }
    }

    #[test]
    fn laguerre_jet_derivative() {
        // d/dx L_n^a = -L_{n-1}^{a+1}
        let (n, a, x) = (4, 1.0, 0.9);
        let j = laguerre_jet(n, a, &Jet::variable(x, 1));
        assert_relative_eq!(j.value(), laguerre(n, a, x), epsilon = 1e-13);
        assert_relative_eq!(j.derivative(1), -laguerre(n - 1, a + 1.0, x), epsilon = 1e-12);
    }

    #[test]
    fn fd_examples() {
        let sq = ScalarField::closed_form(|x| x * x, Interval::REAL_LINE);
        assert!((fd_derivative(&sq, 1.0, 1).unwrap() - 2.0).abs() < 1e-7);
        let c = ScalarField::constant(4.2);
        assert!(fd_derivative(&c, -3.0, 1).unwrap().abs() < 1e-9);
        let s = ScalarField::closed_form(Jet::sin, Interval::REAL_LINE);
        assert!(fd_derivative(&s, 0.0, 2).unwrap().abs() < 1e-5);
        assert!(fd_derivative(&s, 0.0, 3).is_err());
    }

    #[test]
    fn erf_against_gaussian_quadrature() {
        for &x in &[0.1, 0.5, 1.0, 2.5] {
            let q = crate::quad::integrate(|t| (-t * t).exp(), 0.0, x, 1e-14).unwrap();
            assert_relative_eq!(erf(x), 2.0 / std::f64::consts::PI.sqrt() * q, epsilon = 1e-12);
        }
    }
}
