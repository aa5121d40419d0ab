//! Reduction of pseudoscalar and scalar Dirac potentials to pairs of
//! Schrödinger partners, and checks of the resulting SUSY diagram.

use crate::darboux::{Branch, PseudoscalarStep, ScalarStep};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::jet::Jet;
use crate::potential::{ClassTag, Potential, Representation};
use crate::spinor::EigenSpinor;
use crate::verify::{GridSpec, ResidualReport};

/// Tolerance for `Ũ₁⁺ = U₀⁻` (upper) and `Ũ₁⁻ = U₀⁺` (lower).
pub const SHIFT_TOL: f64 = 1e-10;
/// Tolerance for the logarithmic-derivative identities.
pub const LOG_TOL: f64 = 1e-8;
/// Tolerance for the second-order component equations.
pub const COMPONENT_TOL: f64 = 1e-7;

/// `U± = q² ± q′`; eigenvalues are `ε = E² − shift`.
#[derive(Clone, Debug)]
pub struct SchrodingerPair {
    pub u_plus: ScalarField,
    pub u_minus: ScalarField,
    pub shift: f64,
}

impl SchrodingerPair {
    pub fn epsilon(&self, energy: f64) -> f64 {
        energy * energy - self.shift
    }
}

fn pair_from_q(q: &ScalarField, shift: f64) -> SchrodingerPair {
    let build = |sign: f64| {
        let (q, order, domain) = (q.clone(), q.max_order().saturating_sub(1), q.domain());
        ScalarField::new(
            move |x, n| match q.jet(x, n + 1) {
                Ok(j) => &j.truncate(n) * &j.truncate(n) + j.differentiate().scale(sign),
                Err(_) => Jet::constant(f64::NAN, n),
            },
            order,
            domain,
        )
    };
    SchrodingerPair { u_plus: build(1.0), u_minus: build(-1.0), shift }
}

/// `U₀± = q₀² ± q₀′` with `ε = E² − m²`.
pub fn pseudoscalar_to_schrodinger(q: &ScalarField, m: f64) -> SchrodingerPair {
    pair_from_q(q, m * m)
}

/// `U± = (m + S)² ± S′` with `ε = E²`.
pub fn scalar_to_schrodinger(s: &ScalarField, m: f64) -> SchrodingerPair {
    pair_from_q(&s.map(move |j| j + m), 0.0)
}

/// Pair for a pseudoscalar (σ₃ form) or scalar (hat form, `q̂ = m + S`) potential.
pub fn schrodinger_pair(v: &Potential) -> Result<SchrodingerPair> {
    match (v.representation(), v.class()) {
        (Representation::Sigma3, ClassTag::Pseudoscalar { mass } | ClassTag::Free { mass }) => {
            Ok(pseudoscalar_to_schrodinger(v.q(), mass))
        }
        (Representation::Hat, c) if c.is_scalar() => Ok(pair_from_q(v.q(), 0.0)),
        _ => Err(Error::WrongClass { expected: "pseudoscalar or scalar (hat form)" }),
    }
}

/// `(ln f)″` from a jet of order ≥ 2; sign of `f` is irrelevant.
fn log_dd(j: &Jet) -> f64 {
    let (f, d1, d2) = (j.value(), j.derivative(1), j.derivative(2));
    d2 / f - (d1 / f) * (d1 / f)
}

fn u_pm(q: &Jet) -> (f64, f64) {
    let (a, b) = (q.value(), q.derivative(1));
    (a * a + b, a * a - b)
}

/// Checks of one pseudoscalar step against the Schrödinger picture.
#[derive(Clone, Debug)]
pub struct SusyReport {
    /// `λ₂² − m²`, added to `U₁±` to align the spectra.
    pub energy_shift: f64,
    pub checks: Vec<ResidualReport>,
}

impl SusyReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

struct StepPoint {
    u0p: f64,
    u0m: f64,
    u1p: f64,
    u1m: f64,
    /// `(ln u₁ₖ)″` for the nonzero component of `u₁`.
    ld1: f64,
    /// `(ln u₂ₖ)″` for the log component of `u₂`.
    ld2: f64,
}

fn step_point(step: &PseudoscalarStep, x: f64, shift: f64) -> Result<StepPoint> {
    let t = &step.transform;
    let (_, q0) = t.parent().jets(x, 1)?;
    let q1 = step.potential.q().jet(x, 1)?;
    let (u0p, u0m) = u_pm(&q0);
    let (a, b) = u_pm(&q1);
    let (c1, c2) = match step.branch {
        Branch::Upper => (0, 1),
        Branch::Lower => (1, 0),
    };
    Ok(StepPoint {
        u0p,
        u0m,
        u1p: a + shift,
        u1m: b + shift,
        ld1: log_dd(&t.u1().native_jet(x, 2)?[c1]),
        ld2: log_dd(&t.u2().native_jet(x, 2)?[c2]),
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// The diagram relating `U₀±` and the shifted `Ũ₁± = U₁± + λ₂² − m²`.
///
/// Upper branch: `Ũ₁⁺ = U₀⁻`, `Ũ₁⁻ − U₀⁻ = −2(ln u₂₂)″`, `Ũ₁⁺ − U₀⁺ = −2(ln u₁₁)″`.
/// Lower branch: `Ũ₁⁻ = U₀⁺`, `Ũ₁⁺ − U₀⁺ = −2(ln u₁₂)″`, `Ũ₁⁻ − U₀⁻ = −2(ln u₂₁)″`.
/// Both: the two-step Schrödinger path agrees with the Dirac route.
pub fn susy_diagram_check(step: &PseudoscalarStep, grid: GridSpec) -> Result<SusyReport> {
    let m = match step.transform.parent().class() {
        ClassTag::Pseudoscalar { mass } | ClassTag::Free { mass } => mass,
        _ => return Err(Error::MissingStepData("parent is not pseudoscalar".into())),
    };
    let l2 = step.transform.lambda2();
    let shift = l2 * l2 - m * m;
    let upper = step.branch == Branch::Upper;
    let check = |name: &str, tol: f64, f: fn(&StepPoint, bool) -> (f64, f64)| {
        ResidualReport::from_grid(name, "", grid, tol, |x| {
            let p = step_point(step, x, shift)?;
            let (a, b) = f(&p, upper);
            Ok(rel(a, b))
        })
    };
    let checks = vec![
        check("shifted-partner", SHIFT_TOL, |p, up| if up { (p.u1p, p.u0m) } else { (p.u1m, p.u0p) })?,
        check("delta-u2", LOG_TOL, |p, up| {
            if up {
                (p.u1m - p.u0m, -2.0 * p.ld2)
            } else {
                (p.u1p - p.u0p, -2.0 * p.ld2)
            }
        })?,
        check("delta-u1", LOG_TOL, |p, up| {
            if up {
                (p.u1p - p.u0p, -2.0 * p.ld1)
            } else {
                (p.u1m - p.u0m, -2.0 * p.ld1)
            }
        })?,
        check("path", LOG_TOL, |p, up| {
            if up {
                (p.u1m, p.u0p - 2.0 * p.ld1 - 2.0 * p.ld2)
            } else {
                (p.u1p, p.u0m - 2.0 * p.ld1 - 2.0 * p.ld2)
            }
        })?,
    ];
    Ok(SusyReport { energy_shift: shift, checks })
}

/// `−φₖ″ + Ũ₁±φₖ − (E² − m²)φₖ` for `φ` the image of `ψ` under the step;
/// component 1 pairs with `Ũ₁⁺`, component 2 with `Ũ₁⁻`.
pub fn component_equation_residual(step: &PseudoscalarStep, psi: &EigenSpinor, grid: GridSpec) -> Result<ResidualReport> {
    let m = step
        .transform
        .parent()
        .class()
        .mass()
        .ok_or_else(|| Error::MissingStepData("parent mass".into()))?;
    let l2 = step.transform.lambda2();
    let shift = l2 * l2 - m * m;
    let phi = step.map(psi)?;
    let eps = psi.energy().powi(2) - m * m;
    ResidualReport::from_grid("component-equation", "", grid, COMPONENT_TOL, |x| {
        let j = phi.native_jet(x, 2)?;
        let q1 = step.potential.q().jet(x, 1)?;
        let (u1p, u1m) = u_pm(&q1);
        let r1 = -j[0].derivative(2) + (u1p + shift - eps) * j[0].value();
        let r2 = -j[1].derivative(2) + (u1m + shift - eps) * j[1].value();
        let scale = j[0].value().abs().max(j[1].value().abs()).max(1.0);
        Ok(r1.abs().max(r2.abs()) / scale)
    })
}

/// `U₁± = (m + S₁)² ± S₁′` against `(m + S₀)² ± S₀′ − 2(ln û₁₁)″` (plus)
/// and `− 2(ln û₂₁)″` (minus).
pub fn scalar_reduction_check(step: &ScalarStep, grid: GridSpec) -> Result<Vec<ResidualReport>> {
    let t = &step.transform;
    let point = |x: f64| -> Result<[f64; 4]> {
        let (_, q0) = t.parent().jets(x, 1)?;
        let (u0p, u0m) = u_pm(&q0);
        let (u1p, u1m) = u_pm(&step.potential.q().jet(x, 1)?);
        let u = t.u1().native_jet(x, 2)?;
        Ok([u1p, u0p - 2.0 * log_dd(&u[0]), u1m, u0m - 2.0 * log_dd(&u[1])])
    };
    Ok(vec![
        ResidualReport::from_grid("scalar-plus", "", grid, LOG_TOL, |x| {
            let p = point(x)?;
            Ok(rel(p[0], p[1]))
        })?,
        ResidualReport::from_grid("scalar-minus", "", grid, LOG_TOL, |x| {
            let p = point(x)?;
            Ok(rel(p[2], p[3]))
        })?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darboux::{pseudoscalar_step, scalar_step};
    use crate::potential::{dirac_oscillator, free_mass, free_mass_hat};
    use crate::special::kn_poly_jet;
    use approx::assert_relative_eq;

    fn upper_soliton() -> PseudoscalarStep {
        let v = free_mass(1.0);
        let k = 0.75f64.sqrt();
        let u1 = EigenSpinor::constant(&v, 1.0, "u1", [1.0, 0.0]);
        let u2 = EigenSpinor::closed_form(&v, 0.5, "u2", move |x| {
            let (s, c) = x.scale(k).sinh_cosh();
            [s.scale(-k / 1.5), c]
        });
        pseudoscalar_step(&v, &u1, &u2, Branch::Upper).unwrap()
    }

    #[test]
    fn free_pair_is_constant() {
        let p = schrodinger_pair(&free_mass(2.0)).unwrap();
        assert_eq!(p.u_plus.value(0.3).unwrap(), 0.0);
        assert_relative_eq!(p.epsilon(3.0), 5.0);
        let s = scalar_to_schrodinger(&ScalarField::constant(0.0), 1.5);
        assert_relative_eq!(s.u_minus.value(-2.0).unwrap(), 2.25);
        assert!(schrodinger_pair(&crate::potential::zero_potential().to_hat().unwrap()).is_ok());
    }

    #[test]
    fn tanh_pair_is_poschl_teller() {
        let k = 0.8;
        let q = ScalarField::closed_form(move |x| x.scale(k).tanh().scale(k), crate::field::Interval::REAL_LINE);
        let p = pseudoscalar_to_schrodinger(&q, 1.0);
        for x in [-1.0, 0.2, 3.0f64] {
            assert_relative_eq!(p.u_plus.value(x).unwrap(), k * k, epsilon = 1e-14);
            let sech2 = 1.0 / (k * x).cosh().powi(2);
            assert_relative_eq!(p.u_minus.value(x).unwrap(), k * k * (1.0 - 2.0 * sech2), epsilon = 1e-14);
        }
    }

    #[test]
    fn oscillator_pair() {
        let p = schrodinger_pair(&dirac_oscillator(1.0)).unwrap();
        let x = 1.3;
        assert_relative_eq!(p.u_plus.value(x).unwrap(), x * x / 4.0 + 0.5, epsilon = 1e-14);
        assert_relative_eq!(p.u_minus.value(x).unwrap(), x * x / 4.0 - 0.5, epsilon = 1e-14);
    }

    #[test]
    fn soliton_diagram() {
        let s = upper_soliton();
        let r = susy_diagram_check(&s, GridSpec::new(-8.0, 8.0, 81)).unwrap();
        assert_relative_eq!(r.energy_shift, 0.25 - 1.0);
        for c in &r.checks {
            assert!(c.pass, "{c}");
        }
        // Ũ₁⁻ = −2k² sech²(kx) reflectionless well
        let k2 = 0.75f64;
        let q1 = s.potential.q().jet(0.4, 1).unwrap();
        let (_, um) = u_pm(&q1);
        assert_relative_eq!(um + r.energy_shift, -2.0 * k2 / (0.4 * k2.sqrt()).cosh().powi(2), epsilon = 1e-12);
    }

    #[test]
    fn component_equation_on_plane_wave() {
        let s = upper_soliton();
        let v = s.transform.parent().clone();
        let (e, k) = (2.0f64, 3.0f64.sqrt());
        let psi = EigenSpinor::closed_form(&v, e, "w", move |x| {
            let (sn, cs) = x.scale(k).sin_cos();
            [cs.scale(k / (e - 1.0)), sn]
        });
        let r = component_equation_residual(&s, &psi, GridSpec::new(-6.0, 6.0, 61)).unwrap();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn oscillator_lower_diagram() {
        let (m, n) = (2.0f64, 2usize);
        let v = dirac_oscillator(m);
        let en = (m * m - n as f64).sqrt();
        let u1 = EigenSpinor::closed_form(&v, -m, "u1", |x| [Jet::zero(x.order()), (x * x).scale(-0.25).exp()]);
        let u2 = EigenSpinor::closed_form(&v, en, "u2", move |x| {
            let g = (x * x).scale(0.25).exp();
            [kn_poly_jet(n, x) * &g.scale(1.0 / (en - m)), kn_poly_jet(n - 1, x) * &g]
        });
        let s = pseudoscalar_step(&v, &u1, &u2, Branch::Lower).unwrap();
        let r = susy_diagram_check(&s, GridSpec::new(-5.0, 5.0, 51)).unwrap();
        assert!(r.pass(), "{:?}", r.checks);
    }

    #[test]
    fn scalar_well() {
        let (m, lam) = (1.0f64, 0.6f64);
        let k = (m * m - lam * lam).sqrt();
        let v = free_mass_hat(m);
        let u = EigenSpinor::closed_form(&v, lam, "u", move |x| {
            let (a, b) = (x.scale(k).exp(), x.scale(-k).exp());
            [&a + &b, a.scale((m - k) / lam) + b.scale((m + k) / lam)]
        });
        let s = scalar_step(&v, &u).unwrap();
        for r in scalar_reduction_check(&s, GridSpec::new(-8.0, 8.0, 81)).unwrap() {
            assert!(r.pass, "{r}");
        }
    }
}
