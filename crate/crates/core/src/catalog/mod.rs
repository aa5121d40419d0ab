//! Worked examples: seeds, transformation functions, closed-form targets and
//! expected spectral facts, plus the figure tables.

mod examples;
mod figures;
mod spinors;

pub use examples::{coulomb_s2_k1, coulomb_spinor, EXAMPLE_NAMES};
pub use figures::{barrier_width, figure_data, fig4_well_separation, fig3_deviation, FigureData, FIGURE_NUMBERS};
pub use spinors::{free_spinor, oscillator_bound_state, radial_phi, radial_phi_tilde};

use crate::chain::{apply_sequential, chain_apply_spinor, ChainSpec};
use crate::darboux::{apply_forward, partner_matrix, PseudoscalarStep, ScalarStep, TransformFunction};
use crate::error::{Error, Result};
use crate::field::Interval;
use crate::potential::Potential;
use crate::spinor::{dirac_residual_vec, EigenSpinor};
use crate::verify::{bound_levels, factorization_residual, GridSpec, ResidualReport};

/// Twelve significant digits in scientific notation.
pub fn fmt_sig(v: f64) -> String {
    format!("{v:.11e}")
}

/// Default closed-form tolerance.
pub const CLOSED_FORM_TOL: f64 = 1e-8;
/// Tolerance for examples built on the error function.
pub const ERF_TOL: f64 = 1e-6;
/// Smallest residual a corrupted potential (`q + 0.01`) must produce.
pub const NEGATIVE_CONTROL_MIN: f64 = 1e-3;
/// Tolerance for operator-identity suites on catalog examples.
pub const SUITE_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct ExampleBundle {
    pub name: String,
    pub params: Vec<(String, f64)>,
    pub seed: Potential,
    /// Determinant route, when the example is a multi-step chain.
    pub chain: Option<ChainSpec>,
    /// One-step transformations in order; empty when the sequential route
    /// is singular on the interval.
    pub steps: Vec<TransformFunction>,
    pub computed: Potential,
    pub expected: Potential,
    /// Expected discrete levels of the final potential, when documented.
    pub levels: Option<Vec<f64>>,
    pub interval: Interval,
    pub tolerance: f64,
    /// Solutions of `seed` not used by the construction.
    pub test_spinors: Vec<EigenSpinor>,
    pub pseudoscalar: Option<PseudoscalarStep>,
    pub scalar: Option<ScalarStep>,
}

impl ExampleBundle {
    pub fn grid(&self) -> GridSpec {
        GridSpec::for_potential(&self.computed.with_interval(self.interval).unwrap_or_else(|_| self.computed.clone()))
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// Image of a seed solution on `computed`.
    pub fn image(&self, psi: &EigenSpinor) -> Result<EigenSpinor> {
        match &self.chain {
            Some(c) => chain_apply_spinor(c, &self.computed, psi),
            None => apply_sequential(&self.steps, psi),
        }
    }

    /// Candidates for discrete levels: both columns of every partner matrix,
    /// carried through the later steps, and the images of the test spinors.
    pub fn level_candidates(&self) -> Result<Vec<EigenSpinor>> {
        let mut out = Vec::new();
        for (i, t) in self.steps.iter().enumerate() {
            let pm = partner_matrix(t)?;
            for col in [pm.u1(), pm.u2()] {
                out.push(apply_sequential(&self.steps[i + 1..], col)?);
            }
        }
        for s in &self.test_spinors {
            out.push(apply_sequential(&self.steps, s)?);
        }
        Ok(out)
    }
}

/// Builds an example with its default parameters.
pub fn example(name: &str) -> Result<ExampleBundle> {
    examples::build(name, &[])
}

/// Builds an example with some parameters overridden.
pub fn example_with(name: &str, overrides: &[(&str, f64)]) -> Result<ExampleBundle> {
    examples::build(name, overrides)
}

/// Max `|computed − expected|` for `p` and `q` separately.
pub fn check_bundle(b: &ExampleBundle, grid: GridSpec, tol: f64) -> Result<Vec<ResidualReport>> {
    let report = |name: &str, pick: fn(&Potential) -> &crate::field::ScalarField| {
        ResidualReport::from_grid(name, &b.name, grid, tol, |x| {
            Ok((pick(&b.computed).value(x)? - pick(&b.expected).value(x)?).abs())
        })
    };
    Ok(vec![report("closed-form-p", |v| v.p())?, report("closed-form-q", |v| v.q())?])
}

pub fn check_example(name: &str, grid: GridSpec, tol: f64) -> Result<Vec<ResidualReport>> {
    check_bundle(&example(name)?, grid, tol)
}

/// `‖h(φ) − Eφ‖ / max(1, ‖φ‖)` of `φ` against `v`.
pub fn spinor_residual(v: &Potential, phi: &EigenSpinor, grid: GridSpec) -> Result<ResidualReport> {
    let e = phi.energy();
    ResidualReport::from_grid("dirac-residual", "", grid, CLOSED_FORM_TOL, |x| {
        let j = phi.native_jet(x, 1)?;
        let (p, q) = v.pq(x)?;
        let d = dirac_residual_vec(&j, p, q, e);
        Ok(d[0].abs().max(d[1].abs()) / j[0].value().abs().max(j[1].value().abs()).max(1.0))
    })
}

/// Images of every test spinor checked against `v` (the computed potential,
/// or a perturbed copy for the negative control).
pub fn intertwining_against(b: &ExampleBundle, v: &Potential, grid: GridSpec) -> Result<ResidualReport> {
    let mut worst = (0.0f64, f64::NAN);
    for s in &b.test_spinors {
        let r = spinor_residual(v, &b.image(s)?, grid)?;
        if !(r.max_residual <= worst.0) {
            worst = (r.max_residual, r.at);
        }
    }
    Ok(ResidualReport::new("intertwining", b.name.clone(), grid, worst, CLOSED_FORM_TOL))
}

pub fn intertwining_bundle(b: &ExampleBundle, grid: GridSpec) -> Result<ResidualReport> {
    intertwining_against(b, &b.computed, grid)
}

/// Both factorization orderings on every step, with the test spinors carried
/// to each step's parent.
pub fn factorization_bundle(b: &ExampleBundle, grid: GridSpec) -> Result<Option<ResidualReport>> {
    if b.steps.is_empty() {
        return Ok(None);
    }
    let mut worst = (0.0f64, f64::NAN);
    let mut current = b.test_spinors.clone();
    for t in &b.steps {
        for s in &current {
            let r = factorization_residual(t, s, grid)?;
            if !(r.max_residual <= worst.0) {
                worst = (r.max_residual, r.at);
            }
        }
        current = current.iter().map(|s| apply_forward(t, s)).collect::<Result<_>>()?;
    }
    Ok(Some(ResidualReport::new("factorization", b.name.clone(), grid, worst, SUITE_TOL)))
}

/// `levels` report: residual 0 when the classified levels equal the expected set.
pub fn levels_report(b: &ExampleBundle) -> Result<Option<(ResidualReport, Vec<f64>)>> {
    let Some(expected) = &b.levels else { return Ok(None) };
    let found = bound_levels(&b.level_candidates()?, b.interval)?;
    let mut want = expected.clone();
    want.sort_by(f64::total_cmp);
    let ok = found.len() == want.len() && found.iter().zip(&want).all(|(a, b)| (a - b).abs() <= 1e-12);
    let grid = GridSpec::new(b.interval.lo, b.interval.hi, 0);
    let r = ResidualReport::new("levels", b.name.clone(), grid, (if ok { 0.0 } else { 1.0 }, f64::NAN), 0.0);
    Ok(Some((r, found)))
}

/// Every suite that applies to the example.
pub fn verify_bundle(b: &ExampleBundle) -> Result<Vec<ResidualReport>> {
    let grid = b.grid();
    let mut out = check_bundle(b, grid, b.tolerance)?;
    out.push(intertwining_bundle(b, grid)?);
    let bad = b.computed.perturbed_q(1e-2)?;
    let neg = intertwining_against(b, &bad, grid)?;
    // detection margin 1e-3 / residual: at most 1 when the corruption is seen
    let margin = NEGATIVE_CONTROL_MIN / neg.max_residual;
    out.push(ResidualReport::new("negative-control", b.name.clone(), grid, (margin, neg.at), 1.0));
    if let Some(f) = factorization_bundle(b, grid)? {
        out.push(f);
    }
    if let Some(s) = &b.pseudoscalar {
        let rep = crate::reduction::susy_diagram_check(s, grid)?;
        out.extend(rep.checks.into_iter().map(|c| c.with_example(b.name.clone())));
    }
    if let Some(s) = &b.scalar {
        let rep = crate::reduction::scalar_reduction_check(s, grid)?;
        out.extend(rep.into_iter().map(|c| c.with_example(b.name.clone())));
    }
    if let Some((r, _)) = levels_report(b)? {
        out.push(r);
    }
    Ok(out)
}

pub fn verify_example(name: &str) -> Result<Vec<ResidualReport>> {
    verify_bundle(&example(name)?)
}

pub fn unknown(name: &str) -> Error {
    Error::UnknownExample(name.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_example_verifies() {
        let mut failures = Vec::new();
        for name in EXAMPLE_NAMES {
            match verify_example(name) {
                Ok(reports) => failures.extend(reports.into_iter().filter(|r| !r.pass).map(|r| r.to_string())),
                Err(e) => failures.push(format!("{name}: {e}")),
            }
        }
        assert!(failures.is_empty(), "{}", failures.join("\n"));
    }

    #[test]
    fn unknown_and_bad_parameters() {
        assert!(matches!(example("ex99"), Err(Error::UnknownExample(_))));
        assert!(matches!(example_with("ex1", &[("zz", 1.0)]), Err(Error::InvalidParameter(_))));
        assert!(matches!(example_with("ex6", &[("n", 2.0)]), Err(Error::ParameterOutOfRegularRange(_))));
        assert!(matches!(example_with("ex2", &[("eps1", 0.7)]), Err(Error::ParameterOutOfRegularRange(_))));
    }

    #[test]
    fn coulomb_k1_closed_form() {
        let b = example("ex11").unwrap();
        for r in [0.3, 1.0, 2.0, 5.0, 11.0] {
            let s = b.expected.q().value(r).unwrap() - 1.0;
            assert!((s - coulomb_s2_k1(1.0, 1.0, r)).abs() < 1e-12, "r={r}");
        }
    }
}
