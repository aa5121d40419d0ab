//! One Darboux step: the transformation function `𝒰 = (u₁, u₂)`, the partner
//! potential, the intertwiners `L`, `L⁺`, and the pseudoscalar and scalar
//! specializations.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::{gamma_apply, spinor_differentiate, spinor_sub, Mat2, Mat2Jet, SpinorJet, Vec2, GAMMA};
use crate::field::ScalarField;
use crate::potential::{ClassTag, Potential, Representation, PROBE_POINTS};
use crate::spinor::{find_nodes, EigenSpinor, NODE_SCAN_POINTS};

/// Relative size of `det 𝒰` below which a grid point counts as degenerate.
pub const DEGENERATE_REL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default)]
pub struct BuildOptions {
    /// Accept isolated zeros of `det 𝒰`; they are recorded in
    /// [`TransformFunction::singular_nodes`].
    pub allow_singular: bool,
}

struct TfData {
    u1: EigenSpinor,
    u2: EigenSpinor,
    parent: Potential,
    transformed: Potential,
    singular_nodes: Vec<f64>,
}

/// Generator of one Darboux step.
#[derive(Clone)]
pub struct TransformFunction {
    inner: Arc<TfData>,
}

impl fmt::Debug for TransformFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformFunction")
            .field("u1", &self.inner.u1.label())
            .field("lambda1", &self.lambda1())
            .field("u2", &self.inner.u2.label())
            .field("lambda2", &self.lambda2())
            .finish()
    }
}

pub fn build_transform(u1: &EigenSpinor, u2: &EigenSpinor) -> Result<TransformFunction> {
    build_transform_with(u1, u2, BuildOptions::default())
}

pub fn build_transform_with(u1: &EigenSpinor, u2: &EigenSpinor, opts: BuildOptions) -> Result<TransformFunction> {
    if !u1.parent().same(u2.parent()) {
        return Err(Error::ParentMismatch);
    }
    if u1.energy() == u2.energy() {
        return Err(Error::EqualEigenvalues(u1.energy()));
    }
    let parent = u1.parent().clone();
    let nodes = degenerate_points(u1, u2, &parent)?;
    if !nodes.is_empty() && !opts.allow_singular {
        return Err(Error::DegenerateOnGrid { nodes });
    }
    let transformed = transformed_field(u1, u2, &parent)?;
    Ok(TransformFunction {
        inner: Arc::new(TfData { u1: u1.clone(), u2: u2.clone(), parent, transformed, singular_nodes: nodes }),
    })
}

fn degenerate_points(u1: &EigenSpinor, u2: &EigenSpinor, v: &Potential) -> Result<Vec<f64>> {
    let det = |x: f64| -> Result<f64> {
        let (a, b) = (u1.value(x)?, u2.value(x)?);
        Ok(a[0] * b[1] - a[1] * b[0])
    };
    let w = v.interval();
    let mut nodes = find_nodes(det, w, NODE_SCAN_POINTS)?;
    for x in w.linspace(NODE_SCAN_POINTS) {
        let (a, b) = (u1.value(x)?, u2.value(x)?);
        let scale = (a[0].abs() + a[1].abs()) * (b[0].abs() + b[1].abs());
        let d = a[0] * b[1] - a[1] * b[0];
        if !(d.abs() > DEGENERATE_REL * scale) && !nodes.iter().any(|n| (n - x).abs() < 1e-9) {
            nodes.push(x);
        }
    }
    nodes.sort_by(f64::total_cmp);
    Ok(nodes)
}

/// `p₁ = −p₀ + (λ₁−λ₂)d₁/det 𝒰`, `q₁ = −q₀ + (λ₁−λ₂)d₂/det 𝒰` with
/// `d₁ = u₁₁u₂₂ + u₁₂u₂₁`, `d₂ = u₂₁u₂₂ − u₁₁u₁₂`. No derivatives of 𝒰 are
/// needed, so the new fields keep the order of their inputs.
fn transformed_field(u1: &EigenSpinor, u2: &EigenSpinor, v: &Potential) -> Result<Potential> {
    let dl = u1.energy() - u2.energy();
    let max_order = v.max_order().min(u1.max_order()).min(u2.max_order());
    let dom = v.domain();
    let make = |which: usize| {
        let (a, b, v) = (u1.clone(), u2.clone(), v.clone());
        ScalarField::new(
            move |x, n| {
                let eval = || -> Result<Jet> {
                    let (ja, jb) = (a.native_jet(x, n)?, b.native_jet(x, n)?);
                    let det = &ja[0] * &jb[1] - &ja[1] * &jb[0];
                    let (d, base) = match which {
                        0 => (&ja[0] * &jb[1] + &jb[0] * &ja[1], v.p().jet(x, n)?),
                        _ => (&ja[1] * &jb[1] - &ja[0] * &jb[0], v.q().jet(x, n)?),
                    };
                    Ok((d / det).scale(dl) - base)
                };
                eval().unwrap_or_else(|_| Jet::constant(f64::NAN, n))
            },
            max_order,
            dom,
        )
    };
    Potential::new(
        format!("T[{}]", v.name()),
        make(0),
        make(1),
        v.representation(),
        v.interval(),
        v.class().mass(),
    )
}

impl TransformFunction {
    pub fn u1(&self) -> &EigenSpinor {
        &self.inner.u1
    }

    pub fn u2(&self) -> &EigenSpinor {
        &self.inner.u2
    }

    pub fn lambda1(&self) -> f64 {
        self.inner.u1.energy()
    }

    pub fn lambda2(&self) -> f64 {
        self.inner.u2.energy()
    }

    pub fn parent(&self) -> &Potential {
        &self.inner.parent
    }

    /// Zeros of `det 𝒰` accepted under `allow_singular`.
    pub fn singular_nodes(&self) -> &[f64] {
        &self.inner.singular_nodes
    }

    /// `V₁`, built once at construction.
    pub fn transformed_potential(&self) -> &Potential {
        &self.inner.transformed
    }

    /// `𝒰` as a jet matrix from the spinors' own definitions.
    pub fn u_jet(&self, x: f64, order: usize) -> Result<Mat2Jet> {
        Ok(Mat2Jet::from_columns(&self.u1().native_jet(x, order)?, &self.u2().native_jet(x, order)?))
    }

    pub fn u_at(&self, x: f64) -> Result<Mat2> {
        Ok(self.u_jet(x, 0)?.value())
    }

    /// `𝒰Λ𝒰⁻¹`.
    fn ulu_jet(&self, x: f64, order: usize) -> Result<Mat2Jet> {
        let u = self.u_jet(x, order)?;
        Ok(u.mul(&Mat2Jet::diag(self.lambda1(), self.lambda2(), order)).mul(&u.inverse()))
    }

    /// `A = 𝒰ₓ𝒰⁻¹`.
    pub fn a_jet(&self, x: f64, order: usize) -> Result<Mat2Jet> {
        let u = self.u_jet(x, order + 1)?;
        Ok(u.differentiate().mul(&u.inverse().truncate(order)))
    }

    /// Route through `V₁ = V₀ + [γ, A]`: `p₁ = p₀ + A₁₂ + A₂₁`, `q₁ = q₀ + A₂₂ − A₁₁`.
    pub fn potential_via_commutator(&self, x: f64) -> Result<(f64, f64)> {
        let a = self.a_jet(x, 0)?.value();
        let (p0, q0) = self.parent().pq(x)?;
        Ok((p0 + a.a12 + a.a21, q0 + a.a22 - a.a11))
    }

    /// Route through the `d₁, d₂` formulas (the one stored in `V₁`).
    pub fn potential_via_d(&self, x: f64) -> Result<(f64, f64)> {
        self.transformed_potential().pq(x)
    }

    /// `γ𝒰ₓ + V₀𝒰 − 𝒰Λ`, max-norm relative to `‖𝒰‖`.
    pub fn matrix_relation_residual(&self, x: f64) -> Result<f64> {
        let u = self.u_jet(x, 1)?;
        let uv = u.value();
        let ux = u.differentiate().value();
        let v = self.parent().matrix_at(x, 0)?;
        let lam = Mat2::new(self.lambda1(), 0.0, 0.0, self.lambda2());
        Ok((GAMMA * ux + v * uv - uv * lam).max_abs() / uv.max_abs().max(1.0))
    }

    /// `𝒰ₓ𝒰⁻¹ − (𝒰ₓ𝒰⁻¹)ᵗ + (λ₁+λ₂)γ`, max-norm.
    pub fn log_derivative_residual(&self, x: f64) -> Result<f64> {
        let a = self.a_jet(x, 0)?.value();
        Ok((a - a.transpose() + GAMMA.scale(self.lambda1() + self.lambda2())).max_abs())
    }

    /// `L = ∂ₓ − 𝒰ₓ𝒰⁻¹` applied to an arbitrary spinor jet; loses one order.
    pub fn l_apply(&self, x: f64, psi: &SpinorJet) -> Result<SpinorJet> {
        let n = psi[0].order().min(psi[1].order());
        if n == 0 {
            return Err(Error::OrderUnavailable { requested: 1, available: 0 });
        }
        let a = self.a_jet(x, n - 1)?;
        let d = spinor_differentiate(psi);
        let t = [psi[0].truncate(n - 1), psi[1].truncate(n - 1)];
        Ok(spinor_sub(&d, &a.apply(&t)))
    }

    /// `𝒱 = (𝒰ᵗ)⁻¹` as a jet matrix.
    pub fn v_jet(&self, x: f64, order: usize) -> Result<Mat2Jet> {
        Ok(self.u_jet(x, order)?.transpose().inverse())
    }

    /// `L⁺ = −∂ₓ + 𝒱ₓ𝒱⁻¹` applied to an arbitrary spinor jet; loses one order.
    pub fn ladj_apply(&self, x: f64, phi: &SpinorJet) -> Result<SpinorJet> {
        let n = phi[0].order().min(phi[1].order());
        if n == 0 {
            return Err(Error::OrderUnavailable { requested: 1, available: 0 });
        }
        let u = self.u_jet(x, n)?;
        let vx = u.transpose().inverse().differentiate();
        let b = vx.mul(&u.transpose().truncate(n - 1));
        let d = spinor_differentiate(phi);
        let t = [phi[0].truncate(n - 1), phi[1].truncate(n - 1)];
        Ok(spinor_sub(&b.apply(&t), &d))
    }

    /// `Lψ` evaluated from `ψ′ − 𝒰ₓ𝒰⁻¹ψ` at a point.
    pub fn forward_eql(&self, psi: &EigenSpinor, x: f64) -> Result<Vec2> {
        let j = self.l_apply(x, &psi.native_jet(x, 1)?)?;
        Ok([j[0].value(), j[1].value()])
    }
}

/// `h = γ∂ₓ + V` applied to an arbitrary spinor jet; loses one order.
pub fn hamiltonian_apply(v: &Potential, x: f64, psi: &SpinorJet) -> Result<SpinorJet> {
    let n = psi[0].order().min(psi[1].order());
    if n == 0 {
        return Err(Error::OrderUnavailable { requested: 1, available: 0 });
    }
    let vm = v.matrix_jet(x, n - 1)?;
    let t = [psi[0].truncate(n - 1), psi[1].truncate(n - 1)];
    let g = gamma_apply(&spinor_differentiate(psi));
    let w = vm.apply(&t);
    Ok([&g[0] + &w[0], &g[1] + &w[1]])
}

/// `Lψ` via `γ(𝒰Λ𝒰⁻¹ − E)ψ`, an eigenspinor of `V₁` with the same energy.
/// Zero when `ψ` lies in the span of the columns of `𝒰`.
pub fn apply_forward(t: &TransformFunction, psi: &EigenSpinor) -> Result<EigenSpinor> {
    if !psi.parent().same(t.parent()) {
        return Err(Error::ParentMismatch);
    }
    let e = psi.energy();
    let (tt, ps) = (t.clone(), psi.clone());
    let max_order = psi.max_order().min(t.u1().max_order()).min(t.u2().max_order());
    Ok(EigenSpinor::new(t.transformed_potential(), e, format!("L{}", psi.label()), max_order, move |x, n| {
        let m = tt.ulu_jet(x, n)?.sub(&Mat2Jet::scalar(e, n));
        Ok(gamma_apply(&m.apply(&ps.native_jet(x, n)?)))
    }))
}

/// `L⁺φ = −γ(𝒱Λ𝒱⁻¹ − E)φ`, an eigenspinor of the parent potential.
pub fn apply_adjoint(t: &TransformFunction, phi: &EigenSpinor) -> Result<EigenSpinor> {
    if !phi.parent().same(t.transformed_potential()) {
        return Err(Error::ParentMismatch);
    }
    let e = phi.energy();
    let (tt, ph) = (t.clone(), phi.clone());
    let max_order = phi.max_order().min(t.u1().max_order()).min(t.u2().max_order());
    Ok(EigenSpinor::new(t.parent(), e, format!("L+{}", phi.label()), max_order, move |x, n| {
        let v = tt.v_jet(x, n)?;
        let vlv = v.mul(&Mat2Jet::diag(tt.lambda1(), tt.lambda2(), n)).mul(&tt.u_jet(x, n)?.transpose());
        let m = vlv.sub(&Mat2Jet::scalar(e, n));
        let r = gamma_apply(&m.apply(&ph.native_jet(x, n)?));
        Ok([-&r[0], -&r[1]])
    }))
}

/// `𝒱 = (𝒰ᵗ)⁻¹` as a transformation function over `V₁` with the same `Λ`.
/// Its transformed potential is the original parent.
pub fn partner_matrix(t: &TransformFunction) -> Result<TransformFunction> {
    let v1 = t.transformed_potential();
    let max_order = t.u1().max_order().min(t.u2().max_order());
    let col = |j: usize, lam: f64, label: &str| {
        let tt = t.clone();
        EigenSpinor::new(v1, lam, label, max_order, move |x, n| Ok(tt.v_jet(x, n)?.column(j)))
    };
    let a = col(0, t.lambda1(), "v1");
    let b = col(1, t.lambda2(), "v2");
    Ok(TransformFunction {
        inner: Arc::new(TfData {
            u1: a,
            u2: b,
            parent: v1.clone(),
            transformed: t.parent().clone(),
            singular_nodes: t.singular_nodes().to_vec(),
        }),
    })
}

// ---------------------------------------------------------------------------
// Pseudoscalar step

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `u₁ = (u₁₁, 0)` at `λ₁ = m`.
    Upper,
    /// `u₁ = (0, u₂₁)` at `λ₁ = −m`.
    Lower,
}

/// Result of a mass-shifting step on a pseudoscalar potential.
#[derive(Clone, Debug)]
pub struct PseudoscalarStep {
    pub transform: TransformFunction,
    pub branch: Branch,
    /// Mass of the new potential: `−λ₂` (upper) or `+λ₂` (lower).
    pub mass: f64,
    /// `V₁` from the logarithmic-derivative formula.
    pub potential: Potential,
}

const ZERO_COMPONENT_TOL: f64 = 1e-12;

fn component_vanishes(u: &EigenSpinor, c: usize) -> Result<bool> {
    for x in u.parent().interval().linspace(PROBE_POINTS) {
        let v = u.value(x)?;
        if v[c].abs() > ZERO_COMPONENT_TOL * v[1 - c].abs().max(1.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn log_derivative_field(u: &EigenSpinor, c: usize, sign: f64) -> ScalarField {
    let u = u.clone();
    let max_order = u.max_order().saturating_sub(1);
    let domain = u.parent().domain();
    ScalarField::new(
        move |x, n| match u.native_jet(x, n + 1) {
            Ok(j) => (j[c].differentiate() / j[c].truncate(n)).scale(sign),
            Err(_) => Jet::constant(f64::NAN, n),
        },
        max_order,
        domain,
    )
}

pub fn pseudoscalar_step(v: &Potential, u1: &EigenSpinor, u2: &EigenSpinor, branch: Branch) -> Result<PseudoscalarStep> {
    let m = match v.class() {
        ClassTag::Pseudoscalar { mass } | ClassTag::Free { mass } if v.representation() == Representation::Sigma3 => mass,
        _ => return Err(Error::WrongClass { expected: "pseudoscalar" }),
    };
    if !u1.parent().same(v) || !u2.parent().same(v) {
        return Err(Error::ParentMismatch);
    }
    let (zero_c, lam, log_c, sign) = match branch {
        Branch::Upper => (1usize, m, 1usize, 1.0),
        Branch::Lower => (0usize, -m, 0usize, -1.0),
    };
    if u1.energy() != lam {
        return Err(Error::WrongBranch(format!("u1 must have eigenvalue {lam}, got {}", u1.energy())));
    }
    if !component_vanishes(u1, zero_c)? {
        return Err(Error::WrongBranch(format!("component {} of u1 is not identically zero", zero_c + 1)));
    }
    let nodes = find_nodes(|x| Ok(u2.value(x)?[log_c]), v.interval(), NODE_SCAN_POINTS)?;
    if let Some(&x) = nodes.first() {
        return Err(Error::NodeInLog { x });
    }
    let transform = build_transform(u1, u2)?;
    let l2 = u2.energy();
    let mass = -sign * l2;
    let q = log_derivative_field(u2, log_c, sign);
    let potential = Potential::new(
        format!("P[{}]", v.name()),
        ScalarField::constant(mass).with_domain(v.domain()),
        q,
        Representation::Sigma3,
        v.interval(),
        Some(mass),
    )?;
    Ok(PseudoscalarStep { transform, branch, mass, potential })
}

impl PseudoscalarStep {
    /// Upper: `φ = ((λ₂ − E)ψ₂, ψ₂′ − (ln u₂₂)′ψ₂)`.
    /// Lower: `φ = (ψ₁′ − (ln u₁₂)′ψ₁, (λ₂ + E)ψ₁)`.
    pub fn map(&self, psi: &EigenSpinor) -> Result<EigenSpinor> {
        if !psi.parent().same(self.transform.parent()) {
            return Err(Error::ParentMismatch);
        }
        let (ps, u2, branch) = (psi.clone(), self.transform.u2().clone(), self.branch);
        let (e, l2) = (psi.energy(), self.transform.lambda2());
        let max_order = psi.max_order().min(u2.max_order()).saturating_sub(1);
        Ok(EigenSpinor::new(&self.potential, e, format!("P{}", psi.label()), max_order, move |x, n| {
            let j = ps.native_jet(x, n + 1)?;
            let u = u2.native_jet(x, n + 1)?;
            Ok(match branch {
                Branch::Upper => {
                    let ld = u[1].differentiate() / u[1].truncate(n);
                    let s = j[1].truncate(n);
                    [s.scale(l2 - e), j[1].differentiate() - ld * s]
                }
                Branch::Lower => {
                    let ld = u[0].differentiate() / u[0].truncate(n);
                    let s = j[0].truncate(n);
                    [j[0].differentiate() - ld * &s, s.scale(l2 + e)]
                }
            })
        }))
    }
}

// ---------------------------------------------------------------------------
// Scalar step (hat representation)

/// `Û⁻¹ψ = ((ψ₁ − ψ₂), (ψ₁ + ψ₂))/√2`, bound to `hat`.
pub fn spinor_to_hat(psi: &EigenSpinor, hat: &Potential) -> EigenSpinor {
    let ps = psi.clone();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    EigenSpinor::new(hat, psi.energy(), format!("^{}", psi.label()), psi.max_order(), move |x, n| {
        let j = ps.native_jet(x, n)?;
        Ok([(&j[0] - &j[1]).scale(s), (&j[0] + &j[1]).scale(s)])
    })
}

/// `Ûψ̂ = ((ψ̂₁ + ψ̂₂), (ψ̂₂ − ψ̂₁))/√2`, bound to `sigma3`.
pub fn spinor_to_sigma3(psi: &EigenSpinor, sigma3: &Potential) -> EigenSpinor {
    let ps = psi.clone();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    EigenSpinor::new(sigma3, psi.energy(), format!("v{}", psi.label()), psi.max_order(), move |x, n| {
        let j = ps.native_jet(x, n)?;
        Ok([(&j[0] + &j[1]).scale(s), (&j[1] - &j[0]).scale(s)])
    })
}

/// Result of a scalar-preserving step, in hat form.
#[derive(Clone, Debug)]
pub struct ScalarStep {
    pub transform: TransformFunction,
    /// `V̂₁ = (m + S₁)σ₁` from `S₁ = S₀ + (ln û₂₁)′ − (ln û₁₁)′`.
    pub potential: Potential,
}

/// Scalar step with `û₂ = −σ₃û₁` at `−λ`. `v` and `u1` must be in hat form;
/// use [`Potential::to_hat`] and [`spinor_to_hat`] to convert.
pub fn scalar_step(v: &Potential, u1: &EigenSpinor) -> Result<ScalarStep> {
    if v.representation() != Representation::Hat || !v.class().is_scalar() {
        return Err(Error::WrongClass { expected: "scalar (hat form)" });
    }
    if !u1.parent().same(v) {
        return Err(Error::ParentMismatch);
    }
    for c in 0..2 {
        if let Some(&x) = find_nodes(|x| Ok(u1.value(x)?[c]), v.interval(), NODE_SCAN_POINTS)?.first() {
            return Err(Error::NodeInLog { x });
        }
    }
    let uu = u1.clone();
    let u2 = EigenSpinor::new(v, -u1.energy(), format!("-s3 {}", u1.label()), u1.max_order(), move |x, n| {
        let j = uu.native_jet(x, n)?;
        Ok([-&j[0], j[1].clone()])
    });
    let transform = build_transform(u1, &u2)?;
    let l2 = log_derivative_field(u1, 1, 1.0);
    let l1 = log_derivative_field(u1, 0, 1.0);
    let q = v.q().combine(&l2, |a, b| a + b).combine(&l1, |a, b| a - b);
    let potential = Potential::new(
        format!("S[{}]", v.name()),
        ScalarField::constant(0.0).with_domain(v.domain()),
        q,
        Representation::Hat,
        v.interval(),
        v.class().mass(),
    )?;
    Ok(ScalarStep { transform, potential })
}

impl ScalarStep {
    /// `φ̂ = (ψ̂₁′ − (ln û₁₁)′ψ̂₁, ψ̂₂′ − (ln û₂₁)′ψ̂₂)`.
    pub fn map(&self, psi: &EigenSpinor) -> Result<EigenSpinor> {
        if !psi.parent().same(self.transform.parent()) {
            return Err(Error::ParentMismatch);
        }
        let (ps, u) = (psi.clone(), self.transform.u1().clone());
        let max_order = psi.max_order().min(u.max_order()).saturating_sub(1);
        Ok(EigenSpinor::new(&self.potential, psi.energy(), format!("S{}", psi.label()), max_order, move |x, n| {
            let j = ps.native_jet(x, n + 1)?;
            let w = u.native_jet(x, n + 1)?;
            let f = |c: usize| j[c].differentiate() - w[c].differentiate() / w[c].truncate(n) * j[c].truncate(n);
            Ok([f(0), f(1)])
        }))
    }
}
