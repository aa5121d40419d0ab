//! Eigenspinors of `h = γ∂ₓ + V`, exact derivatives, the Dirac Wronskian and
//! the second solution by quadrature.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Interval, CLOSED_FORM_ORDER};
use crate::jet::Jet;
use crate::linalg::{gamma_apply, spinor_differentiate, SpinorJet, Vec2};
use crate::potential::Potential;
use crate::quad;

/// Points used by the node scan.
pub const NODE_SCAN_POINTS: usize = 512;

/// Abscissa tolerance for node refinement.
pub const NODE_TOL: f64 = 1e-10;

/// Nodes in the cumulative-integral cache of [`second_solution`].
const CACHE_POINTS: usize = 257;

const CACHE_TOL: f64 = 1e-14;

pub type SpinorSource = dyn Fn(f64, usize) -> Result<SpinorJet> + Send + Sync;

struct SpinorData {
    energy: f64,
    parent: Potential,
    source: Arc<SpinorSource>,
    max_order: usize,
    label: String,
}

/// A real solution of `hψ = Eψ` bound to its potential.
#[derive(Clone)]
pub struct EigenSpinor {
    inner: Arc<SpinorData>,
}

impl fmt::Debug for EigenSpinor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EigenSpinor")
            .field("label", &self.inner.label)
            .field("energy", &self.inner.energy)
            .field("parent", &self.inner.parent.name())
            .finish()
    }
}

impl EigenSpinor {
    /// Wraps a jet-valued source. The source must return jets of at least
    /// the requested order.
    pub fn new<F>(parent: &Potential, energy: f64, label: impl Into<String>, max_order: usize, source: F) -> Self
    where
        F: Fn(f64, usize) -> Result<SpinorJet> + Send + Sync + 'static,
    {
        EigenSpinor {
            inner: Arc::new(SpinorData {
                energy,
                parent: parent.clone(),
                source: Arc::new(source),
                max_order,
                label: label.into(),
            }),
        }
    }

    /// Closed form written over the jet variable.
    pub fn closed_form<F>(parent: &Potential, energy: f64, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Jet) -> SpinorJet + Send + Sync + 'static,
    {
        EigenSpinor::new(parent, energy, label, CLOSED_FORM_ORDER, move |x, n| Ok(f(&Jet::variable(x, n))))
    }

    /// A constant spinor (valid only where it actually solves the equation).
    pub fn constant(parent: &Potential, energy: f64, label: impl Into<String>, v: Vec2) -> Self {
        EigenSpinor::new(parent, energy, label, usize::MAX, move |_, n| {
            Ok([Jet::constant(v[0], n), Jet::constant(v[1], n)])
        })
    }

    pub fn energy(&self) -> f64 {
        self.inner.energy
    }

    pub fn parent(&self) -> &Potential {
        &self.inner.parent
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    pub fn max_order(&self) -> usize {
        self.inner.max_order
    }

    pub fn same(&self, other: &EigenSpinor) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    pub fn with_label(&self, label: impl Into<String>) -> EigenSpinor {
        let src = self.inner.source.clone();
        EigenSpinor::new(self.parent(), self.energy(), label, self.max_order(), move |x, n| src(x, n))
    }

    fn check(&self, x: f64, order: usize) -> Result<()> {
        let d = self.parent().domain();
        if !d.contains(x) {
            return Err(Error::OutOfDomain { x, lo: d.lo, hi: d.hi });
        }
        if order > self.max_order() {
            return Err(Error::OrderUnavailable { requested: order, available: self.max_order() });
        }
        Ok(())
    }

    /// Taylor jet from the spinor's own definition (closed form, transform or
    /// quadrature), independent of the differential equation.
    pub fn native_jet(&self, x: f64, order: usize) -> Result<SpinorJet> {
        self.check(x, order)?;
        let [a, b] = (self.inner.source)(x, order)?;
        Ok([a.truncate(order), b.truncate(order)])
    }

    pub fn value(&self, x: f64) -> Result<Vec2> {
        let j = self.native_jet(x, 0)?;
        Ok([j[0].value(), j[1].value()])
    }

    /// Taylor jet generated from `ψ(x)` by the recurrence
    /// `ψ⁽ʲ⁺¹⁾ = γ[Σₖ C(j,k) V⁽ᵏ⁾ψ⁽ʲ⁻ᵏ⁾ − Eψ⁽ʲ⁾]`.
    pub fn jet(&self, x: f64, order: usize) -> Result<SpinorJet> {
        let v0 = self.value(x)?;
        if order == 0 {
            return Ok([Jet::constant(v0[0], 0), Jet::constant(v0[1], 0)]);
        }
        let (p, q) = self.parent().jets(x, order - 1)?;
        let e = self.energy();
        let mut c: Vec<Vec2> = Vec::with_capacity(order + 1);
        c.push(v0);
        for j in 0..order {
            // Normalized coefficients: (Vψ)_j = Σ V_k ψ_{j−k}.
            let mut w = [-e * c[j][0], -e * c[j][1]];
            for k in 0..=j {
                let (pk, qk) = (p.coeff(k), q.coeff(k));
                let s = c[j - k];
                w[0] += pk * s[0] + qk * s[1];
                w[1] += qk * s[0] - pk * s[1];
            }
            let inv = 1.0 / (j + 1) as f64;
            c.push([w[1] * inv, -w[0] * inv]);
        }
        Ok([
            Jet::from_coeffs(c.iter().map(|v| v[0]).collect()),
            Jet::from_coeffs(c.iter().map(|v| v[1]).collect()),
        ])
    }

    /// Exact `n`-th derivative.
    pub fn derivative(&self, n: usize, x: f64) -> Result<Vec2> {
        let j = self.jet(x, n)?;
        Ok([j[0].derivative(n), j[1].derivative(n)])
    }

    /// `‖γψ′ + Vψ − Eψ‖∞ / max(1, ‖ψ‖∞)` from the native jet.
    pub fn dirac_residual(&self, x: f64) -> Result<f64> {
        let j = self.native_jet(x, 1)?;
        let (p, q) = self.parent().pq(x)?;
        let r = dirac_residual_vec(&j, p, q, self.energy());
        let scale = j[0].value().abs().max(j[1].value().abs()).max(1.0);
        Ok(r[0].abs().max(r[1].abs()) / scale)
    }

    /// Linear combination of solutions sharing parent and energy.
    pub fn combine(terms: &[(f64, &EigenSpinor)], label: impl Into<String>) -> Result<EigenSpinor> {
        let first = terms.first().ok_or(Error::ZeroSpinor)?.1;
        for (_, s) in terms {
            if !s.parent().same(first.parent()) {
                return Err(Error::ParentMismatch);
            }
            if s.energy() != first.energy() {
                return Err(Error::InvalidParameter("combined spinors must share the energy".into()));
            }
        }
        let parts: Vec<(f64, EigenSpinor)> = terms.iter().map(|(c, s)| (*c, (*s).clone())).collect();
        let max_order = parts.iter().map(|(_, s)| s.max_order()).min().unwrap_or(0);
        Ok(EigenSpinor::new(first.parent(), first.energy(), label, max_order, move |x, n| {
            let mut acc = [Jet::zero(n), Jet::zero(n)];
            for (c, s) in &parts {
                let j = s.native_jet(x, n)?;
                acc[0] += &j[0].scale(*c);
                acc[1] += &j[1].scale(*c);
            }
            Ok(acc)
        }))
    }

    pub fn scaled(&self, c: f64) -> EigenSpinor {
        EigenSpinor::combine(&[(c, self)], format!("{}*{c}", self.label())).expect("single term")
    }

    /// True when both components stay below `tol` on every grid point.
    pub fn is_zero_on(&self, xs: &[f64], tol: f64) -> Result<bool> {
        for &x in xs {
            let v = self.value(x)?;
            if v[0].abs() > tol || v[1].abs() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `γψ′ + Vψ − Eψ` at the expansion point of `j`.
pub fn dirac_residual_vec(j: &SpinorJet, p: f64, q: f64, e: f64) -> Vec2 {
    let d = spinor_differentiate(j);
    let g = gamma_apply(&d);
    let (a, b) = (j[0].value(), j[1].value());
    [g[0].value() + p * a + q * b - e * a, g[1].value() + q * a - p * b - e * b]
}

/// Dirac Wronskian `a₁b₂ − a₂b₁`.
pub fn wronskian(a: &EigenSpinor, b: &EigenSpinor, x: f64) -> Result<f64> {
    let (u, v) = (a.value(x)?, b.value(x)?);
    Ok(u[0] * v[1] - u[1] * v[0])
}

/// Zeros of `f` on `interval` by a sign-change scan and bisection.
pub fn find_nodes<F: Fn(f64) -> Result<f64>>(f: F, interval: Interval, points: usize) -> Result<Vec<f64>> {
    let xs = interval.linspace(points);
    let mut nodes = Vec::new();
    let mut prev = (xs[0], f(xs[0])?);
    if prev.1 == 0.0 {
        nodes.push(prev.0);
    }
    for &x in &xs[1..] {
        let v = f(x)?;
        if v == 0.0 {
            nodes.push(x);
        } else if prev.1 * v < 0.0 {
            let (mut a, mut b, mut fa) = (prev.0, x, prev.1);
            while b - a > NODE_TOL {
                let m = 0.5 * (a + b);
                let fm = f(m)?;
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fa * fm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            nodes.push(0.5 * (a + b));
        }
        prev = (x, v);
    }
    Ok(nodes)
}

/// Default quadrature base point: 0, or `r_min + 1` on a half-line.
pub fn default_base_point(v: &Potential) -> f64 {
    let d = v.domain();
    let x0 = if d.lo.is_finite() { d.lo + 1.0 } else { 0.0 };
    let w = v.interval();
    if w.contains(x0) {
        x0
    } else {
        0.5 * (w.lo + w.hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SecondSolutionBranch {
    /// Built on `ψ₁`, which must be nodeless.
    Upper,
    /// Built on `ψ₂`.
    Lower,
}

/// Which branch [`second_solution`] will use for `ψ` on its working interval.
pub fn second_solution_branch(psi: &EigenSpinor) -> Result<SecondSolutionBranch> {
    let w = psi.parent().interval();
    let n1 = find_nodes(|x| Ok(psi.value(x)?[0]), w, NODE_SCAN_POINTS)?;
    if n1.is_empty() {
        return Ok(SecondSolutionBranch::Upper);
    }
    let n2 = find_nodes(|x| Ok(psi.value(x)?[1]), w, NODE_SCAN_POINTS)?;
    if n2.is_empty() {
        return Ok(SecondSolutionBranch::Lower);
    }
    Err(Error::NodeOnInterval { x: n1[0] })
}

/// Second solution `ψ̃` with the same energy and `W(ψ̃, ψ) = 1`.
///
/// Upper branch: `ψ̃₁ = ψ₁ ∫ (p + E)/ψ₁²`, `ψ̃₂ = (ψ̃₁ψ₂ − 1)/ψ₁`.
/// Lower branch: `ψ̃₂ = ψ₂ ∫ (E − p)/ψ₂²`, `ψ̃₁ = (ψ̃₂ψ₁ + 1)/ψ₂`.
pub fn second_solution(psi: &EigenSpinor, x0: f64) -> Result<EigenSpinor> {
    let branch = second_solution_branch(psi)?;
    let e = psi.energy();
    let v = psi.parent().clone();
    let (idx, sign) = match branch {
        SecondSolutionBranch::Upper => (0usize, 1.0),
        SecondSolutionBranch::Lower => (1usize, -1.0),
    };
    // integrand (sign·p + E)/ψ_idx², with sign·p + E = p + E or E − p
    let g = {
        let psi = psi.clone();
        let v = v.clone();
        move |x: f64| -> Result<f64> {
            let s = psi.value(x)?[idx];
            Ok((sign * v.p().value(x)? + e) / (s * s))
        }
    };
    let w = v.interval();
    let lo = w.lo.min(x0);
    let hi = w.hi.max(x0);
    let nodes = Interval::new(lo, hi).linspace(CACHE_POINTS);
    let mut cum = vec![0.0; nodes.len()];
    let i0 = nodes.iter().enumerate().min_by(|a, b| (a.1 - x0).abs().total_cmp(&(b.1 - x0).abs())).map(|(i, _)| i).unwrap_or(0);
    cum[i0] = integrate_checked(&g, x0, nodes[i0])?;
    for i in i0 + 1..nodes.len() {
        cum[i] = cum[i - 1] + integrate_checked(&g, nodes[i - 1], nodes[i])?;
    }
    for i in (0..i0).rev() {
        cum[i] = cum[i + 1] - integrate_checked(&g, nodes[i], nodes[i + 1])?;
    }
    let cache = Arc::new((nodes, cum));
    let integral = move |x: f64| -> Result<f64> {
        let (xs, cs) = &*cache;
        let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        let i = (((x - xs[0]) / h).round().max(0.0) as usize).min(xs.len() - 1);
        Ok(cs[i] + integrate_checked(&g, xs[i], x)?)
    };
    let base = psi.clone();
    let vp = v.clone();
    let label = format!("{}~", psi.label());
    let max_order = psi.max_order().min(v.max_order());
    Ok(EigenSpinor::new(&v, e, label, max_order, move |x, n| {
        let j = base.native_jet(x, n)?;
        let big = match n {
            0 => Jet::constant(integral(x)?, 0),
            _ => {
                let p = vp.p().jet(x, n - 1)?;
                let s = j[idx].truncate(n - 1);
                let gj = (p.scale(sign) + e) / (&s * &s);
                gj.integrate(integral(x)?)
            }
        };
        Ok(match branch {
            SecondSolutionBranch::Upper => {
                let t1 = &j[0] * &big;
                let t2 = (&t1 * &j[1] - 1.0) / &j[0];
                [t1, t2]
            }
            SecondSolutionBranch::Lower => {
                let t2 = &j[1] * &big;
                let t1 = (&t2 * &j[0] + 1.0) / &j[1];
                [t1, t2]
            }
        })
    }))
}

fn integrate_checked<G: Fn(f64) -> Result<f64>>(g: &G, a: f64, b: f64) -> Result<f64> {
    // relative to the integrand's size, which grows like 1/ψ² away from x₀
    let scale = g(a)?.abs().max(g(b)?.abs()).max(1.0);
    let err = std::cell::RefCell::new(None);
    let v = quad::integrate(
        |t| match g(t) {
            Ok(v) => v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        a,
        b,
        (CACHE_TOL * scale).max(1e-16 * (b - a).abs()),
    );
    match err.into_inner() {
        Some(e) => Err(e),
        None => v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{dirac_oscillator, free_mass, radial_free};
    use crate::special::fd_derivative;
    use crate::field::ScalarField;
    use approx::assert_relative_eq;

    fn one_soliton_psi(lam: f64) -> EigenSpinor {
        let m = 1.0f64;
        let k = (m * m - lam * lam).sqrt();
        EigenSpinor::closed_form(&free_mass(m), lam, "psi", move |r| {
            let (s, c) = r.scale(k).sinh_cosh();
            [c, s.scale(-k / (lam + m))]
        })
    }

    #[test]
    fn exponential_family_derivative() {
        let (m, e) = (1.0f64, 0.4f64);
        let k = (m * m - e * e).sqrt();
        let psi = EigenSpinor::closed_form(&free_mass(m), e, "exp", move |x| {
            let ex = x.scale(k).exp();
            [ex.scale(k / (e - m)), ex]
        });
        let x = 0.7;
        let v = psi.value(x).unwrap();
        let d = psi.derivative(1, x).unwrap();
        assert_relative_eq!(d[0], k * v[0], max_relative = 1e-13);
        assert_relative_eq!(d[1], k * v[1], max_relative = 1e-13);
        assert_eq!(psi.derivative(0, x).unwrap(), v);
    }

    #[test]
    fn oscillator_ground_derivative() {
        let psi = EigenSpinor::closed_form(&dirac_oscillator(1.0), 1.0, "u1", |x| {
            let o = x.order();
            [(x * x).scale(0.25).exp(), Jet::zero(o)]
        });
        let d = psi.derivative(1, 1.0).unwrap();
        assert_relative_eq!(d[0], 0.5 * 0.25f64.exp(), epsilon = 1e-14);
        assert_relative_eq!(d[0], 0.642013, epsilon = 1e-6);
        assert_eq!(d[1], 0.0);
        let f = ScalarField::closed_form(|x| (x * x).scale(0.25).exp(), Interval::REAL_LINE);
        assert!((fd_derivative(&f, 1.0, 1).unwrap() - d[0]).abs() < 1e-6);
    }

    #[test]
    fn recurrence_matches_native_to_high_order() {
        let psi = one_soliton_psi(0.5);
        let a = psi.jet(0.3, 8).unwrap();
        let b = psi.native_jet(0.3, 8).unwrap();
        for c in 0..2 {
            for k in 0..=8 {
                assert_relative_eq!(a[c].derivative(k), b[c].derivative(k), epsilon = 1e-10, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn wronskian_radial_pair_is_constant() {
        let (m, lam) = (1.0f64, 0.5f64);
        let k = (m * m - lam * lam).sqrt();
        let psi = one_soliton_psi(lam);
        let tilde = EigenSpinor::closed_form(psi.parent(), lam, "psi~", move |r| {
            let e = r.scale(-k).exp();
            [e.clone(), e.scale(k / (lam + m))]
        });
        for r in [0.1, 1.0, 3.0, 7.5] {
            assert_relative_eq!(wronskian(&tilde, &psi, r).unwrap(), -0.5773503, epsilon = 1e-7);
            assert_relative_eq!(wronskian(&psi, &tilde, r).unwrap(), 0.5773503, epsilon = 1e-7);
        }
        assert_eq!(wronskian(&psi, &psi, 1.3).unwrap(), 0.0);
    }

    #[test]
    fn second_solution_at_plus_mass() {
        let v = free_mass(1.0);
        let psi = EigenSpinor::constant(&v, 1.0, "up", [1.0, 0.0]);
        let t = second_solution(&psi, 0.0).unwrap();
        for x in [-3.0, 0.0, 0.4, 2.0] {
            let val = t.value(x).unwrap();
            assert_relative_eq!(val[0], 2.0 * x, epsilon = 1e-10);
            assert_relative_eq!(val[1], -1.0, epsilon = 1e-12);
            assert_relative_eq!(wronskian(&t, &psi, x).unwrap(), 1.0, epsilon = 1e-12);
            assert!(t.dirac_residual(x).unwrap() < 1e-10);
        }
    }

    #[test]
    fn second_solution_at_minus_mass_uses_fallback() {
        let v = free_mass(1.0);
        let psi = EigenSpinor::constant(&v, -1.0, "down", [0.0, 1.0]);
        assert_eq!(second_solution_branch(&psi).unwrap(), SecondSolutionBranch::Lower);
        let t = second_solution(&psi, 0.0).unwrap();
        for x in [-2.0, 1.5] {
            let val = t.value(x).unwrap();
            assert_relative_eq!(val[0], 1.0, epsilon = 1e-12);
            assert_relative_eq!(val[1], -2.0 * x, epsilon = 1e-10);
        }
    }

    #[test]
    fn second_solution_of_bound_type_spinor() {
        let psi = one_soliton_psi(0.5);
        let t = second_solution(&psi, 0.0).unwrap();
        for x in psi.parent().interval().linspace(41) {
            assert_relative_eq!(wronskian(&t, &psi, x).unwrap(), 1.0, epsilon = 1e-9);
            assert!(t.dirac_residual(x).unwrap() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn second_solution_rejects_double_nodes() {
        let v = free_mass(1.0);
        // above the gap both components oscillate
        let e2 = 2.0f64;
        let kk = (e2 * e2 - 1.0).sqrt();
        let psi = EigenSpinor::closed_form(&v, e2, "osc", move |x| {
            let (s, c) = x.scale(kk).sin_cos();
            [c.clone(), s.scale(kk / (e2 + 1.0))]
        });
        assert!(matches!(second_solution(&psi, 0.0), Err(Error::NodeOnInterval { .. })));
    }

    #[test]
    fn radial_seeds_are_solutions() {
        let v = radial_free(1.0, 1.0);
        let phim = EigenSpinor::closed_form(&v, 1.0, "phi(m)", |r| {
            let o = r.order();
            [Jet::constant(1.0, o), r.recip().scale(0.5)]
        });
        for r in v.interval().linspace(50) {
            assert!(phim.dirac_residual(r).unwrap() < 1e-13);
        }
        assert!(matches!(phim.value(-1.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn find_nodes_locates_root() {
        let n = find_nodes(|x| Ok(x - 0.3), Interval::new(-1.0, 1.0), 512).unwrap();
        assert_eq!(n.len(), 1);
        assert!((n[0] - 0.3).abs() < 1e-9);
    }
}
