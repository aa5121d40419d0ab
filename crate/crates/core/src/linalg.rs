//! Small real matrices, the fixed γ convention, and a generic LU determinant.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Absolute threshold on 2×2 determinants below which a matrix is singular.
pub const SINGULAR_EPS: f64 = 1e-12;

/// Pivot ratio above which a determinant is flagged as ill-conditioned.
pub const PIVOT_RATIO_WARN: f64 = 1e10;

/// Real 2×2 matrix `[[a11, a12], [a21, a22]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

pub type Vec2 = [f64; 2];

/// γ = iσ₂ = [[0, 1], [−1, 0]].
pub const GAMMA: Mat2 = Mat2::new(0.0, 1.0, -1.0, 0.0);
pub const SIGMA1: Mat2 = Mat2::new(0.0, 1.0, 1.0, 0.0);
pub const SIGMA3: Mat2 = Mat2::new(1.0, 0.0, 0.0, -1.0);
pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

impl Mat2 {
    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    pub const fn zero() -> Self {
        Mat2::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn from_columns(c1: Vec2, c2: Vec2) -> Self {
        Mat2::new(c1[0], c2[0], c1[1], c2[1])
    }

    /// `p σ₃ + q σ₁`.
    pub fn canonical(p: f64, q: f64) -> Self {
        Mat2::new(p, q, q, -p)
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn scale(&self, s: f64) -> Self {
        Mat2::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        [self.a11 * v[0] + self.a12 * v[1], self.a21 * v[0] + self.a22 * v[1]]
    }

    pub fn column(&self, j: usize) -> Vec2 {
        match j {
            0 => [self.a11, self.a21],
            _ => [self.a12, self.a22],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.a11.abs().max(self.a12.abs()).max(self.a21.abs()).max(self.a22.abs())
    }

    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with(SINGULAR_EPS)
    }

    pub fn inverse_with(&self, eps: f64) -> Result<Self> {
        let d = self.det();
        if d.abs() <= eps {
            return Err(Error::SingularMatrix { det: d });
        }
        Ok(Mat2::new(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d))
    }
}

/// 2×2 matrix inverse; errors when `|det M| <= 1e-12`.
pub fn mat2_inverse(m: &Mat2) -> Result<Mat2> {
    m.inverse()
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

pub fn vec_sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn vec_norm(a: Vec2) -> f64 {
    a[0].abs().max(a[1].abs())
}

// ---------------------------------------------------------------------------
// Jet-valued vectors and matrices

/// Two-component spinor of jets.
pub type SpinorJet = [Jet; 2];

/// 2×2 matrix of jets, row-major.
#[derive(Clone, Debug)]
pub struct Mat2Jet {
    pub m: [[Jet; 2]; 2],
}

impl Mat2Jet {
    pub fn from_columns(c1: &SpinorJet, c2: &SpinorJet) -> Self {
        Mat2Jet { m: [[c1[0].clone(), c2[0].clone()], [c1[1].clone(), c2[1].clone()]] }
    }

    pub fn canonical(p: &Jet, q: &Jet) -> Self {
        Mat2Jet { m: [[p.clone(), q.clone()], [q.clone(), -p]] }
    }

    pub fn scalar(s: f64, order: usize) -> Self {
        let z = Jet::zero(order);
        let d = Jet::constant(s, order);
        Mat2Jet { m: [[d.clone(), z.clone()], [z, d]] }
    }

    pub fn diag(a: f64, b: f64, order: usize) -> Self {
        let z = Jet::zero(order);
        Mat2Jet { m: [[Jet::constant(a, order), z.clone()], [z, Jet::constant(b, order)]] }
    }

    pub fn order(&self) -> usize {
        self.m.iter().flatten().map(Jet::order).min().unwrap_or(0)
    }

    pub fn det(&self) -> Jet {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    pub fn transpose(&self) -> Self {
        let m = &self.m;
        Mat2Jet { m: [[m[0][0].clone(), m[1][0].clone()], [m[0][1].clone(), m[1][1].clone()]] }
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        let m = &self.m;
        Mat2Jet {
            m: [[&m[1][1] / &d, -(&m[0][1] / &d)], [-(&m[1][0] / &d), &m[0][0] / &d]],
        }
    }

    pub fn mul(&self, o: &Mat2Jet) -> Mat2Jet {
        let a = &self.m;
        let b = &o.m;
        let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        Mat2Jet { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    pub fn add(&self, o: &Mat2Jet) -> Mat2Jet {
        let e = |i: usize, j: usize| &self.m[i][j] + &o.m[i][j];
        Mat2Jet { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    pub fn sub(&self, o: &Mat2Jet) -> Mat2Jet {
        let e = |i: usize, j: usize| &self.m[i][j] - &o.m[i][j];
        Mat2Jet { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    pub fn apply(&self, v: &SpinorJet) -> SpinorJet {
        [
            &self.m[0][0] * &v[0] + &self.m[0][1] * &v[1],
            &self.m[1][0] * &v[0] + &self.m[1][1] * &v[1],
        ]
    }

    pub fn differentiate(&self) -> Mat2Jet {
        let e = |i: usize, j: usize| self.m[i][j].differentiate();
        Mat2Jet { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    pub fn truncate(&self, order: usize) -> Mat2Jet {
        let e = |i: usize, j: usize| self.m[i][j].truncate(order);
        Mat2Jet { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    pub fn value(&self) -> Mat2 {
        Mat2::new(self.m[0][0].value(), self.m[0][1].value(), self.m[1][0].value(), self.m[1][1].value())
    }

    pub fn column(&self, j: usize) -> SpinorJet {
        [self.m[0][j].clone(), self.m[1][j].clone()]
    }
}

/// `γ v` for a spinor jet: `(v₂, −v₁)`.
pub fn gamma_apply(v: &SpinorJet) -> SpinorJet {
    [v[1].clone(), -&v[0]]
}

pub fn spinor_differentiate(v: &SpinorJet) -> SpinorJet {
    [v[0].differentiate(), v[1].differentiate()]
}

pub fn spinor_sub(a: &SpinorJet, b: &SpinorJet) -> SpinorJet {
    [&a[0] - &b[0], &a[1] - &b[1]]
}

pub fn spinor_add(a: &SpinorJet, b: &SpinorJet) -> SpinorJet {
    [&a[0] + &b[0], &a[1] + &b[1]]
}

pub fn spinor_scale(a: &SpinorJet, s: f64) -> SpinorJet {
    [a[0].scale(s), a[1].scale(s)]
}

pub fn spinor_truncate(a: &SpinorJet, order: usize) -> SpinorJet {
    [a[0].truncate(order), a[1].truncate(order)]
}

pub fn spinor_value(a: &SpinorJet) -> Vec2 {
    [a[0].value(), a[1].value()]
}

// ---------------------------------------------------------------------------
// Generic determinant

/// Field-like scalar usable in LU elimination.
pub trait Scalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    /// Magnitude used for pivot selection.
    fn magnitude(&self) -> f64;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    /// True when every stored coefficient is zero.
    fn is_null(&self) -> bool;
}

impl Scalar for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn is_null(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for Jet {
    fn magnitude(&self) -> f64 {
        self.value().abs()
    }
    fn zero_like(&self) -> Self {
        Jet::zero(self.order())
    }
    fn one_like(&self) -> Self {
        Jet::constant(1.0, self.order())
    }
    fn is_null(&self) -> bool {
        self.coeffs().iter().all(|c| *c == 0.0)
    }
}

/// Determinant together with the ratio of largest to smallest pivot.
#[derive(Clone, Debug)]
pub struct DetOutcome<T> {
    pub value: T,
    pub pivot_ratio: f64,
}

impl<T> DetOutcome<T> {
    pub fn ill_conditioned(&self) -> bool {
        self.pivot_ratio > PIVOT_RATIO_WARN
    }
}

/// Determinant by LU with partial pivoting. `rows` must be square and non-empty.
pub fn lu_det<T: Scalar>(rows: Vec<Vec<T>>) -> DetOutcome<T> {
    let n = rows.len();
    assert!(n > 0 && rows.iter().all(|r| r.len() == n), "square matrix expected");
    let mut a = rows;
    let mut det = a[0][0].one_like();
    let mut pmax: f64 = 0.0;
    let mut pmin = f64::INFINITY;
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| a[i][k].magnitude().total_cmp(&a[j][k].magnitude()))
            .unwrap_or(k);
        let mag = a[piv][k].magnitude();
        if mag == 0.0 {
            // Column values vanish; a jet column may still carry derivatives,
            // so expand the remaining block along it.
            let zero = a[0][0].zero_like();
            if (k..n).all(|i| a[i][k].is_null()) {
                return DetOutcome { value: zero, pivot_ratio: f64::INFINITY };
            }
            let mut sum = zero;
            for i in k..n {
                if a[i][k].is_null() {
                    continue;
                }
                let term = if k + 1 == n {
                    a[i][k].clone()
                } else {
                    let minor: Vec<Vec<T>> =
                        (k..n).filter(|&r| r != i).map(|r| a[r][k + 1..n].to_vec()).collect();
                    a[i][k].clone() * lu_det(minor).value
                };
                sum = if (i - k) % 2 == 0 { sum + term } else { sum - term };
            }
            return DetOutcome { value: det * sum, pivot_ratio: f64::INFINITY };
        }
        if piv != k {
            a.swap(piv, k);
            det = -det;
        }
        pmax = pmax.max(mag);
        pmin = pmin.min(mag);
        let p = a[k][k].clone();
        det = det * p.clone();
        for i in (k + 1)..n {
            let f = a[i][k].clone() / p.clone();
            #[allow(clippy::needless_range_loop)]
            for j in (k + 1)..n {
                let t = a[i][j].clone() - f.clone() * a[k][j].clone();
                a[i][j] = t;
            }
        }
    }
    DetOutcome { value: det, pivot_ratio: pmax / pmin }
}

/// Convenience wrapper returning only the determinant.
pub fn det<T: Scalar>(rows: Vec<Vec<T>>) -> T {
    lu_det(rows).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn jet_det_with_vanishing_column() {
        // [[t, 1], [2t, 3]] at t = 0: det = t
        let t = Jet::variable(0.0, 2);
        let one = Jet::constant(1.0, 2);
        let d = det(vec![vec![t.clone(), one.clone()], vec![t.scale(2.0), one.scale(3.0)]]);
        assert_eq!(d.coeffs(), &[0.0, 1.0, 0.0]);
        let z = Jet::zero(2);
        let d3 = det(vec![
            vec![one.clone(), t.clone(), z.clone()],
            vec![z.clone(), t.scale(2.0), one.clone()],
            vec![one.clone(), t.clone(), one.scale(2.0)],
        ]);
        // 1·(4t − t) − t·(0 − 1) = 4t
        assert_eq!(d3.coeffs(), &[0.0, 4.0, 0.0]);
    }

    #[test]
    fn inverse_of_identity_and_gamma() {
        assert_eq!(mat2_inverse(&IDENTITY).unwrap(), IDENTITY);
        assert_eq!(mat2_inverse(&GAMMA).unwrap(), -GAMMA);
    }

    #[test]
    fn inverse_of_hand_example() {
        let m = Mat2::new(1.0, 2.0, 3.0, 4.0);
        let inv = mat2_inverse(&m).unwrap();
        let expected = Mat2::new(-2.0, 1.0, 1.5, -0.5);
        assert!((inv - expected).max_abs() < 1e-15);
        assert!((m * inv - IDENTITY).max_abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_reports_det() {
        let err = mat2_inverse(&Mat2::new(1.0, 2.0, 2.0, 4.0)).unwrap_err();
        assert_eq!(err, Error::SingularMatrix { det: 0.0 });
    }

    #[test]
    fn gamma_squares_to_minus_identity_and_is_antisymmetric() {
        assert_eq!(GAMMA * GAMMA, -IDENTITY);
        assert_eq!(GAMMA.transpose(), -GAMMA);
    }

    #[test]
    fn lu_det_matches_cofactor_expansion() {
        let rows = vec![vec![2.0, -1.0, 0.5], vec![1.0, 3.0, 2.0], vec![0.0, 4.0, -1.0]];
        let cof = 2.0 * (-3.0 - 2.0 * 4.0) + (-1.0 - 0.0) + 0.5 * (4.0 - 0.0);
        assert_relative_eq!(det(rows), cof, epsilon = 1e-13);
    }

    #[test]
    fn lu_det_of_repeated_column_vanishes() {
        let rows = vec![vec![1.0, 1.0, 3.0], vec![2.0, 2.0, 5.0], vec![4.0, 4.0, 1.0]];
        assert!(det(rows).abs() < 1e-14);
    }

    #[test]
    fn jet_determinant_differentiates_like_the_scalar_one() {
        // det [[x, x^2], [1, x^3]] = x^4 - x^2, derivative 4x^3 - 2x
        let x = 1.3;
        let v = Jet::variable(x, 2);
        let rows = vec![vec![v.clone(), &v * &v], vec![Jet::constant(1.0, 2), v.powi(3)]];
        let d = det(rows);
        assert_relative_eq!(d.value(), x.powi(4) - x * x, epsilon = 1e-13);
        assert_relative_eq!(d.derivative(1), 4.0 * x.powi(3) - 2.0 * x, epsilon = 1e-12);
    }

    #[test]
    fn mat2_jet_inverse_multiplies_to_identity() {
        let x = Jet::variable(0.4, 3);
        let m = Mat2Jet { m: [[x.exp(), x.sin()], [x.cos(), &x * &x + 2.0]] };
        let p = m.mul(&m.inverse());
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(p.m[i][j].value(), target, epsilon = 1e-14);
                for k in 1..=3 {
                    assert!(p.m[i][j].coeff(k).abs() < 1e-13);
                }
            }
        }
    }
}
