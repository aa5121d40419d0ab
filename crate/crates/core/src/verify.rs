//! Residual checks for the operator identities and spectral bookkeeping.

use std::fmt;

use crate::darboux::{apply_forward, hamiltonian_apply, TransformFunction};
use crate::error::{Error, Result};
use crate::field::Interval;
use crate::grid::max_on_grid;
use crate::jet::Jet;
use crate::linalg::{spinor_sub, SpinorJet};
use crate::potential::Potential;
use crate::quad;
use crate::spinor::{dirac_residual_vec, EigenSpinor};

/// Default number of verification points.
pub const DEFAULT_GRID_POINTS: usize = 201;

/// Default guard band at the ends of the verification interval.
pub const DEFAULT_GUARD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub guard: f64,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, points: usize) -> Self {
        GridSpec { lo, hi, points, guard: 0.0 }
    }

    /// 201 points on the potential's working interval with the default guard.
    pub fn for_potential(v: &Potential) -> Self {
        let w = v.interval();
        GridSpec { lo: w.lo, hi: w.hi, points: DEFAULT_GRID_POINTS, guard: DEFAULT_GUARD }
    }

    pub fn points(&self) -> Vec<f64> {
        Interval::new(self.lo, self.hi).guarded(self.points, self.guard)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]x{}", self.lo, self.hi, self.points)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub check: String,
    pub example: String,
    pub grid: GridSpec,
    pub max_residual: f64,
    /// Abscissa of the maximum.
    pub at: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Set when the checked spinor vanishes identically (kernel element).
    pub zero_spinor: bool,
}

impl ResidualReport {
    pub fn new(check: impl Into<String>, example: impl Into<String>, grid: GridSpec, worst: (f64, f64), tolerance: f64) -> Self {
        ResidualReport {
            check: check.into(),
            example: example.into(),
            grid,
            max_residual: worst.0,
            at: worst.1,
            tolerance,
            pass: worst.0 <= tolerance,
            zero_spinor: false,
        }
    }

    /// Residual evaluated by `f` on every grid point.
    pub fn from_grid<F>(check: &str, example: &str, grid: GridSpec, tolerance: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync + Send,
    {
        let worst = max_on_grid(&grid.points(), f)?;
        Ok(ResidualReport::new(check, example, grid, worst, tolerance))
    }

    pub fn with_example(mut self, example: impl Into<String>) -> Self {
        self.example = example.into();
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.max_residual <= tolerance;
        self
    }

    /// `check,example,max_residual,tolerance,pass`.
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.check,
            self.example,
            crate::catalog::fmt_sig(self.max_residual),
            crate::catalog::fmt_sig(self.tolerance),
            if self.pass { "pass" } else { "fail" }
        )
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.csv_line())
    }
}

fn inf_norm(v: &SpinorJet) -> f64 {
    v[0].value().abs().max(v[1].value().abs())
}

/// `‖h₁(Lψ) − E Lψ‖ / max(1, ‖Lψ‖)` with `h₁` taken from `v1`
/// (normally `T`'s transformed potential; a perturbed copy for controls).
pub fn intertwining_residual_against(v1: &Potential, t: &TransformFunction, psi: &EigenSpinor, grid: GridSpec) -> Result<ResidualReport> {
    let phi = apply_forward(t, psi)?;
    let e = psi.energy();
    let mut r = ResidualReport::from_grid("intertwining", "", grid, 1e-8, |x| {
        let j = phi.native_jet(x, 1)?;
        let (p, q) = v1.pq(x)?;
        let d = dirac_residual_vec(&j, p, q, e);
        Ok(d[0].abs().max(d[1].abs()) / inf_norm(&j).max(1.0))
    })?;
    r.zero_spinor = phi.is_zero_on(&grid.points(), 1e-12)?;
    Ok(r)
}

pub fn intertwining_residual(t: &TransformFunction, psi: &EigenSpinor, grid: GridSpec) -> Result<ResidualReport> {
    intertwining_residual_against(t.transformed_potential(), t, psi, grid)
}

/// Source of an arbitrary (not necessarily eigen) spinor jet.
pub type SpinorFn<'a> = &'a (dyn Fn(f64, usize) -> Result<SpinorJet> + Sync);

fn shifted(h: &SpinorJet, psi: &SpinorJet, lam: f64) -> SpinorJet {
    let n = h[0].order();
    spinor_sub(h, &[psi[0].truncate(n).scale(lam), psi[1].truncate(n).scale(lam)])
}

/// `(h − λ₁)(h − λ₂)ψ` at `x`; `psi` must have order ≥ 2.
pub fn quadratic_apply(v: &Potential, l1: f64, l2: f64, x: f64, psi: &SpinorJet) -> Result<SpinorJet> {
    let a = shifted(&hamiltonian_apply(v, x, psi)?, psi, l2);
    Ok(shifted(&hamiltonian_apply(v, x, &a)?, &a, l1))
}

/// `‖L⁺Lψ − (h₀−λ₁)(h₀−λ₂)ψ‖` at one point, relative to `max(1, ‖rhs‖, ‖ψ‖)`.
pub fn lpl_point(t: &TransformFunction, x: f64, psi: &SpinorJet) -> Result<f64> {
    let lhs = t.ladj_apply(x, &t.l_apply(x, psi)?)?;
    let rhs = quadratic_apply(t.parent(), t.lambda1(), t.lambda2(), x, psi)?;
    let d = spinor_sub(&lhs, &rhs);
    Ok(inf_norm(&d) / inf_norm(&rhs).max(inf_norm(psi)).max(1.0))
}

/// `‖LL⁺φ − (h₁−λ₁)(h₁−λ₂)φ‖` at one point, same scaling.
pub fn llp_point(t: &TransformFunction, x: f64, phi: &SpinorJet) -> Result<f64> {
    let lhs = t.l_apply(x, &t.ladj_apply(x, phi)?)?;
    let rhs = quadratic_apply(t.transformed_potential(), t.lambda1(), t.lambda2(), x, phi)?;
    let d = spinor_sub(&lhs, &rhs);
    Ok(inf_norm(&d) / inf_norm(&rhs).max(inf_norm(phi)).max(1.0))
}

/// Both factorization orderings: `ψ` is a spinor of `h₀`, and `Lψ` is used
/// as the test spinor of `h₁`.
pub fn factorization_residual(t: &TransformFunction, psi: &EigenSpinor, grid: GridSpec) -> Result<ResidualReport> {
    let phi = apply_forward(t, psi)?;
    ResidualReport::from_grid("factorization", "", grid, 1e-8, |x| {
        let a = lpl_point(t, x, &psi.native_jet(x, 2)?)?;
        let b = llp_point(t, x, &phi.native_jet(x, 2)?)?;
        Ok(a.max(b))
    })
}

/// Factorization on arbitrary spinors `ψ` (of `h₀`'s domain) and `φ`.
pub fn factorization_residual_generic(t: &TransformFunction, psi: SpinorFn, phi: SpinorFn, grid: GridSpec) -> Result<ResidualReport> {
    ResidualReport::from_grid("factorization-generic", "", grid, 1e-8, |x| {
        Ok(lpl_point(t, x, &psi(x, 2)?)?.max(llp_point(t, x, &phi(x, 2)?)?))
    })
}

/// Residuals of the superalgebra built from `ℋ = diag(h₀, h₁)`,
/// `𝒬 = [[0, 0], [L, 0]]`, `𝒬⁺ = [[0, L⁺], [0, 0]]`, on the stacked spinor `(ψ, φ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperalgebraResiduals {
    /// `𝒬²`.
    pub q_squared: f64,
    /// `{𝒬, 𝒬⁺} − (ℋ−λ₁)(ℋ−λ₂)`.
    pub anticommutator: f64,
    /// `[𝒬, ℋ]`.
    pub commutator: f64,
}

pub fn superalgebra_point(t: &TransformFunction, x: f64, psi: &SpinorJet, phi: &SpinorJet) -> Result<SuperalgebraResiduals> {
    // 𝒬(ψ, φ) = (0, Lψ); 𝒬 applied again sees a zero upper block.
    let n = psi[0].order();
    let zero = [Jet::zero(n), Jet::zero(n)];
    let q_of_zero = t.l_apply(x, &zero)?;
    let q_squared = inf_norm(&q_of_zero);
    let anticommutator = lpl_point(t, x, psi)?.max(llp_point(t, x, phi)?);
    // [𝒬, ℋ](ψ, φ) = (0, L h₀ψ − h₁ Lψ)
    let a = t.l_apply(x, &hamiltonian_apply(t.parent(), x, psi)?)?;
    let b = hamiltonian_apply(t.transformed_potential(), x, &t.l_apply(x, psi)?)?;
    let d = spinor_sub(&a, &b);
    let commutator = inf_norm(&d) / inf_norm(&a).max(inf_norm(psi)).max(1.0);
    Ok(SuperalgebraResiduals { q_squared, anticommutator, commutator })
}

pub fn superalgebra_residual(t: &TransformFunction, psi: SpinorFn, phi: SpinorFn, grid: GridSpec) -> Result<ResidualReport> {
    ResidualReport::from_grid("superalgebra", "", grid, 1e-7, |x| {
        let r = superalgebra_point(t, x, &psi(x, 2)?, &phi(x, 2)?)?;
        Ok(r.q_squared.max(r.anticommutator).max(r.commutator))
    })
}

/// `⟨Lψ|Lψ⟩ / (N_E² ⟨ψ|ψ⟩)` with `N_E² = (E−λ₁)(E−λ₂)`.
pub fn norm_preservation(t: &TransformFunction, psi: &EigenSpinor, interval: Interval, tol: f64) -> Result<f64> {
    let e = psi.energy();
    let n2 = (e - t.lambda1()) * (e - t.lambda2());
    if n2 <= 0.0 {
        return Err(Error::NonPositiveNormalization(n2));
    }
    let phi = apply_forward(t, psi)?;
    let sq = |s: &EigenSpinor| {
        let s = s.clone();
        move |x: f64| s.value(x).map(|v| v[0] * v[0] + v[1] * v[1]).unwrap_or(f64::NAN)
    };
    let den = quad::integrate(sq(psi), interval.lo, interval.hi, tol * 1e-3)?;
    if den == 0.0 {
        return Err(Error::ZeroSpinor);
    }
    let num = quad::integrate(sq(&phi), interval.lo, interval.hi, tol * 1e-3)?;
    Ok(num / (n2 * den))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayClass {
    Integrable,
    NonIntegrable,
    Indeterminate,
}

/// Tail fit: last 20% of each side of `window`, log-linear least squares.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailFit {
    /// Slope of `ln‖φ‖` per unit distance outward.
    pub slope: f64,
    pub r2: f64,
    /// Slope on the adjacent inner 20% window.
    pub inner_slope: f64,
}

const TAIL_FRACTION: f64 = 0.2;
const TAIL_SAMPLES: usize = 64;
const MIN_R2: f64 = 0.99;
const MAX_RATE_DROP: f64 = 0.1;

fn fit_line(t: &[f64], y: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = t.iter().zip(y).map(|(a, b)| (a - mt) * (b - my)).sum();
    let sxx: f64 = t.iter().map(|a| (a - mt) * (a - mt)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

/// `start` is the outer end, `dir` points inward (+1 on the left, −1 on the right).
fn tail_fit(phi: &EigenSpinor, start: f64, len: f64, dir: f64) -> Result<TailFit> {
    let sample = |from: f64| -> Result<(f64, f64)> {
        let mut t = Vec::with_capacity(TAIL_SAMPLES);
        let mut y = Vec::with_capacity(TAIL_SAMPLES);
        for i in 0..TAIL_SAMPLES {
            let d = from + len * i as f64 / (TAIL_SAMPLES - 1) as f64;
            let v = phi.value(start + dir * d)?;
            t.push(-d);
            y.push(0.5 * (v[0] * v[0] + v[1] * v[1]).ln());
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Ok((f64::NAN, 0.0));
        }
        Ok(fit_line(&t, &y))
    };
    let (slope, r2) = sample(0.0)?;
    let (inner_slope, _) = sample(len)?;
    Ok(TailFit { slope, r2, inner_slope })
}

fn classify_tail(f: &TailFit) -> DecayClass {
    if !f.slope.is_finite() || f.r2 < MIN_R2 {
        return DecayClass::Indeterminate;
    }
    if f.slope >= 0.0 {
        return DecayClass::NonIntegrable;
    }
    // polynomial decay: the rate falls off outward
    if -f.slope < (1.0 - MAX_RATE_DROP) * -f.inner_slope {
        return DecayClass::Indeterminate;
    }
    DecayClass::Integrable
}

/// Decay classification from the tails of `window`; on half-line potentials
/// only the right tail is used.
pub fn decay_classify(phi: &EigenSpinor, window: Interval) -> Result<DecayClass> {
    let len = TAIL_FRACTION * window.width();
    let mut classes = vec![classify_tail(&tail_fit(phi, window.hi, len, -1.0)?)];
    if !phi.parent().domain().lo.is_finite() {
        classes.push(classify_tail(&tail_fit(phi, window.lo, len, 1.0)?));
    }
    Ok(if classes.contains(&DecayClass::NonIntegrable) {
        DecayClass::NonIntegrable
    } else if classes.contains(&DecayClass::Indeterminate) {
        DecayClass::Indeterminate
    } else {
        DecayClass::Integrable
    })
}

/// Energies of the candidates classified as integrable, sorted.
pub fn bound_levels(candidates: &[EigenSpinor], window: Interval) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for c in candidates {
        if decay_classify(c, window)? == DecayClass::Integrable {
            out.push(c.energy());
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}
