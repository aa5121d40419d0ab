use std::f64::consts::PI;

use super::spinors::{free_spinor, oscillator_bound_state, radial_phi, radial_phi_tilde, radial_threshold};
use super::{unknown, ExampleBundle, CLOSED_FORM_TOL, ERF_TOL};
use crate::chain::{chain_potential, sequential, ChainSpec};
use crate::darboux::{build_transform, pseudoscalar_step, scalar_step, spinor_to_hat, Branch, PseudoscalarStep, TransformFunction};
use crate::error::{Error, Result};
use crate::field::{Interval, ScalarField};
use crate::jet::Jet;
use crate::potential::{dirac_oscillator, free_mass, free_mass_hat, radial_free, scalar_coulomb, Potential};
use crate::special::{factorial, kn_poly_jet, laguerre_jet, pochhammer};
use crate::spinor::EigenSpinor;

type Defaults = &'static [(&'static str, f64)];

const DEFAULTS: [(&str, Defaults); 18] = [
    ("ex1", &[("m", 1.0), ("eps", 0.5)]),
    ("ex2", &[("m", 1.0), ("eps", 0.5), ("eps1", 0.3)]),
    ("ex3", &[("m", 1.0), ("eps", 0.5), ("eps1", 0.3)]),
    ("ex4", &[("m", 1.0), ("eps", 0.5), ("eps1", 0.3), ("B", 1.5)]),
    ("ex5", &[("m", 1.0), ("eps", 0.5)]),
    ("ex6", &[("m", 2.0), ("n", 3.0)]),
    ("ex7", &[("m", 2.0), ("n", 2.0)]),
    ("ex8", &[("m", 1.0), ("B", 1.2)]),
    ("ex9", &[("m", 1.0), ("lambda", 0.6)]),
    ("ex10", &[("m", 1.0), ("lambda", 0.6), ("lambda1", 0.2)]),
    ("ex11", &[("m", 1.0), ("alpha", 1.0), ("k", 1.0)]),
    ("ex12", &[("m", 1.0)]),
    ("ex12b", &[("m", 1.0)]),
    ("ex13", &[("m", 1.0), ("lambda", 0.5)]),
    ("ex13b", &[("m", 1.0), ("lambda", 0.5)]),
    ("ex13c", &[("m", 1.0), ("lambda", 0.5)]),
    ("ex14", &[("m", 1.0), ("c", 1.5)]),
    ("ex14b", &[("m", 1.0), ("lambda", 0.5)]),
];

/// Every example name, in catalog order.
pub const EXAMPLE_NAMES: [&str; 18] = [
    "ex1", "ex2", "ex3", "ex4", "ex5", "ex6", "ex7", "ex8", "ex9", "ex10", "ex11", "ex12", "ex12b", "ex13", "ex13b",
    "ex13c", "ex14", "ex14b",
];

struct Params<'a>(&'a [(String, f64)]);

impl Params<'_> {
    fn get(&self, key: &str) -> f64 {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| *v).unwrap_or(f64::NAN)
    }

    fn integer(&self, key: &str) -> Result<usize> {
        let v = self.get(key);
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::InvalidParameter(format!("{key} = {v} must be a non-negative integer")));
        }
        Ok(v as usize)
    }
}

fn out_of_range(msg: String) -> Error {
    Error::ParameterOutOfRegularRange(msg)
}

pub(super) fn build(name: &str, overrides: &[(&str, f64)]) -> Result<ExampleBundle> {
    let (_, defaults) = DEFAULTS.iter().find(|(n, _)| *n == name).ok_or_else(|| unknown(name))?;
    let mut params: Vec<(String, f64)> = defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in overrides {
        match params.iter_mut().find(|(p, _)| p == k) {
            Some(slot) => slot.1 = *v,
            None => return Err(Error::InvalidParameter(format!("{name} has no parameter {k}"))),
        }
    }
    let p = Params(&params);
    let mut b = match name {
        "ex1" => ex1(&p),
        "ex2" | "ex3" | "ex4" => soliton_chain(name, &p),
        "ex5" => ex5(&p),
        "ex6" => ex6(&p),
        "ex7" => ex7(&p),
        "ex8" => ex8(&p),
        "ex9" => ex9(&p),
        "ex10" => ex10(&p),
        "ex11" => ex11(&p),
        "ex12" => ex12(&p),
        _ => radial(name, &p),
    }?;
    b.name = name.to_string();
    b.params = params;
    Ok(b)
}

enum Route {
    Steps(Vec<TransformFunction>),
    Chain(ChainSpec),
}

struct Draft {
    seed: Potential,
    route: Route,
    expected: Potential,
    levels: Option<Vec<f64>>,
    tolerance: f64,
    test_spinors: Vec<EigenSpinor>,
}

impl Draft {
    fn finish(self) -> Result<ExampleBundle> {
        let (chain, steps, computed) = match self.route {
            Route::Steps(steps) => {
                let computed = steps.last().expect("at least one step").transformed_potential().clone();
                (None, steps, computed)
            }
            Route::Chain(c) => {
                let computed = chain_potential(&c)?;
                let steps = match sequential(&c) {
                    Ok(s) => s,
                    Err(Error::DegenerateOnGrid { .. } | Error::SingularMatrix { .. }) => Vec::new(),
                    Err(e) => return Err(e),
                };
                (Some(c), steps, computed)
            }
        };
        Ok(ExampleBundle {
            name: String::new(),
            params: Vec::new(),
            interval: self.seed.interval(),
            seed: self.seed,
            chain,
            steps,
            computed,
            expected: self.expected,
            levels: self.levels,
            tolerance: self.tolerance,
            test_spinors: self.test_spinors,
            pseudoscalar: None,
            scalar: None,
        })
    }
}

fn closed<P, Q>(name: &str, seed: &Potential, p: P, q: Q) -> Result<Potential>
where
    P: Fn(&Jet) -> Jet + Send + Sync + 'static,
    Q: Fn(&Jet) -> Jet + Send + Sync + 'static,
{
    let dom = seed.domain();
    Potential::new(
        format!("{name}:closed-form"),
        ScalarField::closed_form(p, dom),
        ScalarField::closed_form(q, dom),
        seed.representation(),
        seed.interval(),
        seed.class().mass(),
    )
}

fn constant(c: f64) -> impl Fn(&Jet) -> Jet + Send + Sync + 'static {
    move |x| Jet::constant(c, x.order())
}

fn with_pseudoscalar(mut b: ExampleBundle, s: PseudoscalarStep) -> ExampleBundle {
    b.pseudoscalar = Some(s);
    b
}

// ---------------------------------------------------------------------------
// Free-particle (pseudoscalar) family

fn soliton_k(m: f64, e: f64, what: &str) -> Result<f64> {
    if !(e.abs() < m) || e == 0.0 && what == "eps" {
        return Err(out_of_range(format!("{what} = {e} must satisfy 0 < |{what}| < m = {m}")));
    }
    Ok((m * m - e * e).sqrt())
}

fn free_tests(v: &Potential, m: f64, energies: &[(f64, f64)]) -> Result<Vec<EigenSpinor>> {
    energies.iter().map(|&(e, s)| free_spinor(v, m, e * m, s)).collect()
}

/// `u₁ = (1, 0)` at `m`, `u₂ = (k/(ε − m) sinh kx, cosh kx)` at `ε`.
fn one_soliton_seeds(v: &Potential, m: f64, eps: f64, k: f64) -> (EigenSpinor, EigenSpinor) {
    let u1 = EigenSpinor::constant(v, m, "(1,0)", [1.0, 0.0]);
    let u2 = EigenSpinor::closed_form(v, eps, "soliton", move |x| {
        let (s, c) = x.scale(k).sinh_cosh();
        [s.scale(k / (eps - m)), c]
    });
    (u1, u2)
}

fn ex1(p: &Params) -> Result<ExampleBundle> {
    let (m, eps) = (p.get("m"), p.get("eps"));
    let k = soliton_k(m, eps, "eps")?;
    let v = free_mass(m);
    let (u1, u2) = one_soliton_seeds(&v, m, eps, k);
    let step = pseudoscalar_step(&v, &u1, &u2, Branch::Upper)?;
    let expected = closed("ex1", &v, constant(-eps), move |x| x.scale(k).tanh().scale(k))?;
    let b = Draft {
        route: Route::Steps(vec![step.transform.clone()]),
        expected,
        levels: Some(vec![eps]),
        tolerance: CLOSED_FORM_TOL,
        test_spinors: free_tests(&v, m, &[(0.2, 1.0), (0.2, -1.0), (-0.7, 1.0), (1.5, 1.0), (-2.0, -1.0)])?,
        seed: v,
    }
    .finish()?;
    Ok(with_pseudoscalar(b, step))
}

fn soliton_chain(name: &str, p: &Params) -> Result<ExampleBundle> {
    let (m, eps, eps1) = (p.get("m"), p.get("eps"), p.get("eps1"));
    let k = soliton_k(m, eps, "eps")?;
    let k1 = soliton_k(m, eps1, "eps1")?;
    if k1 <= k {
        return Err(out_of_range(format!("need k1 > k > 0, got k1 = {k1}, k = {k}")));
    }
    let v = free_mass(m);
    let (u1, u2) = one_soliton_seeds(&v, m, eps, k);
    let f2 = EigenSpinor::closed_form(&v, -eps, "(-k/(eps+m) sinh, cosh)", move |x| {
        let (s, c) = x.scale(k).sinh_cosh();
        [s.scale(-k / (eps + m)), c]
    });
    let a = k1 / (eps1 - m);
    let (g2, expected, levels) = match name {
        "ex2" => (
            EigenSpinor::closed_form(&v, eps1, "e^{-k1x}", move |x| {
                let e = x.scale(-k1).exp();
                [e.scale(-a), e]
            }),
            closed(name, &v, constant(-eps1), move |x| {
                let t = x.scale(k).tanh();
                (t.scale(k) + k1).recip().scale(k * k - k1 * k1) - t.scale(k)
            })?,
            Some(vec![-eps, eps]),
        ),
        "ex3" => (
            EigenSpinor::closed_form(&v, eps1, "(cosh, sinh)", move |x| {
                let (s, c) = x.scale(k1).sinh_cosh();
                [c.scale(a), s]
            }),
            closed(name, &v, constant(-eps1), move |x| {
                let (t, t1) = (x.scale(k).tanh(), x.scale(k1).tanh());
                // (k1² − k²)/(k1 coth k1x − k tanh kx), written without the pole of coth
                t1.scale(k1 * k1 - k * k) / (-(&t * &t1).scale(k) + k1) - t.scale(k)
            })?,
            Some(vec![-eps, eps, eps1]),
        ),
        _ => {
            let bb = p.get("B");
            if !(bb > 1.0) {
                return Err(out_of_range(format!("B = {bb} must exceed 1")));
            }
            (
                EigenSpinor::closed_form(&v, eps1, "B-family", move |x| {
                    let (s, c) = x.scale(k1).sinh_cosh();
                    [(&s + &c.scale(bb)).scale(a), &c + &s.scale(bb)]
                }),
                closed(name, &v, constant(-eps1), move |x| {
                    let (t, t1) = (x.scale(k).tanh(), x.scale(k1).tanh());
                    let num = (t1.scale(bb) + 1.0).scale(k1 * k1 - k * k);
                    let den = (&t1 + bb).scale(k1) - &t.scale(k) * &(t1.scale(bb) + 1.0);
                    num / den - t.scale(k)
                })?,
                None,
            )
        }
    };
    let chain = ChainSpec::new(vec![(u1, u2), (f2, g2)])?;
    Draft {
        route: Route::Chain(chain),
        expected,
        levels,
        tolerance: CLOSED_FORM_TOL,
        test_spinors: free_tests(&v, m, &[(0.1, 1.0), (0.1, -1.0), (-0.8, 1.0), (1.5, 1.0), (-2.0, -1.0)])?,
        seed: v,
    }
    .finish()
}

fn ex5(p: &Params) -> Result<ExampleBundle> {
    let (m, eps) = (p.get("m"), p.get("eps"));
    let k = soliton_k(m, eps, "eps")?;
    let v = free_mass(m);
    let a = EigenSpinor::closed_form(&v, -eps, "(-k/(eps+m) sinh, cosh)", move |x| {
        let (s, c) = x.scale(k).sinh_cosh();
        [s.scale(-k / (eps + m)), c]
    });
    let b = EigenSpinor::closed_form(&v, eps, "e^{kx}", move |x| {
        let e = x.scale(k).exp();
        [e.scale(k / (eps - m)), e]
    });
    let t = build_transform(&a, &b)?;
    let expected = closed(
        "ex5",
        &v,
        move |x| (x.scale(2.0 * k).exp().scale(eps) + m).recip().scale(-2.0 * k * k) + m,
        move |x| {
            let (ep, em) = (x.scale(k).exp(), x.scale(-k).exp());
            em.scale(-2.0 * k * eps) / (ep.scale(eps) + em.scale(m))
        },
    )?;
    Draft {
        route: Route::Steps(vec![t]),
        expected,
        levels: Some(vec![-eps]),
        tolerance: CLOSED_FORM_TOL,
        test_spinors: free_tests(&v, m, &[(0.2, 1.0), (0.2, -1.0), (-0.7, -1.0), (1.5, 1.0), (-2.0, -1.0)])?,
        seed: v,
    }
    .finish()
}

// ---------------------------------------------------------------------------
// Oscillator family

fn oscillator_common(p: &Params, need_odd: bool) -> Result<(f64, usize, f64)> {
    let m = p.get("m");
    let n = p.integer("n")?;
    if n == 0 || (n % 2 == 1) != need_odd {
        let parity = if need_odd { "odd" } else { "even" };
        return Err(out_of_range(format!("n = {n} must be {parity} and positive for a regular potential")));
    }
    if m * m <= n as f64 {
        return Err(out_of_range(format!("need m^2 > n, got m = {m}, n = {n}")));
    }
    Ok((m, n, (m * m - n as f64).sqrt()))
}

fn oscillator_u2(v: &Potential, m: f64, n: usize, en: f64) -> EigenSpinor {
    EigenSpinor::closed_form(v, en, format!("K{n}"), move |x| {
        let g = (x * x).scale(0.25).exp();
        [&kn_poly_jet(n, x) * &g.scale(1.0 / (en - m)), &kn_poly_jet(n - 1, x) * &g]
    })
}

fn oscillator_tests(v: &Potential, m: f64) -> Vec<EigenSpinor> {
    [(1, 1.0), (1, -1.0), (2, 1.0), (2, -1.0), (4, 1.0)]
        .iter()
        .map(|&(n, s)| oscillator_bound_state(v, m, n, s))
        .collect()
}

fn ex6(p: &Params) -> Result<ExampleBundle> {
    let (m, n, en) = oscillator_common(p, true)?;
    let v = dirac_oscillator(m);
    let u1 = EigenSpinor::closed_form(&v, m, "(e^{x²/4}, 0)", |x| [(x * x).scale(0.25).exp(), Jet::zero(x.order())]);
    let u2 = oscillator_u2(&v, m, n, en);
    let step = pseudoscalar_step(&v, &u1, &u2, Branch::Upper)?;
    let expected = closed("ex6", &v, constant(-en), move |x| {
        let base = x.scale(0.5);
        if n == 1 {
            base
        } else {
            base + (kn_poly_jet(n - 2, x) / kn_poly_jet(n - 1, x)).scale((n - 1) as f64)
        }
    })?;
    let b = Draft {
        route: Route::Steps(vec![step.transform.clone()]),
        expected,
        levels: None,
        tolerance: CLOSED_FORM_TOL,
        test_spinors: oscillator_tests(&v, m),
        seed: v,
    }
    .finish()?;
    Ok(with_pseudoscalar(b, step))
}

fn ex7(p: &Params) -> Result<ExampleBundle> {
    let (m, n, en) = oscillator_common(p, false)?;
    let v = dirac_oscillator(m);
    let u1 = EigenSpinor::closed_form(&v, -m, "(0, e^{-x²/4})", |x| [Jet::zero(x.order()), (x * x).scale(-0.25).exp()]);
    let u2 = oscillator_u2(&v, m, n, en);
    let step = pseudoscalar_step(&v, &u1, &u2, Branch::Lower)?;
    let expected = closed("ex7", &v, constant(en), move |x| {
        -(x.scale(0.5) + (kn_poly_jet(n - 1, x) / kn_poly_jet(n, x)).scale(n as f64))
    })?;
    let b = Draft {
        route: Route::Steps(vec![step.transform.clone()]),
        expected,
        levels: None,
        tolerance: CLOSED_FORM_TOL,
        test_spinors: oscillator_tests(&v, m),
        seed: v,
    }
    .finish()?;
    Ok(with_pseudoscalar(b, step))
}

fn ex8(p: &Params) -> Result<ExampleBundle> {
    let (m, bb) = (p.get("m"), p.get("B"));
    if !(bb > 1.0) {
        return Err(out_of_range(format!("B = {bb} must exceed 1")));
    }
    if !(m >= 1.0) {
        return Err(out_of_range(format!("m = {m} must be at least 1")));
    }
    let l2 = (m * m - 1.0).sqrt();
    let v = dirac_oscillator(m);
    let c = (PI / 2.0).sqrt();
    let q_of = move |x: &Jet| (x.scale(std::f64::consts::FRAC_1_SQRT_2).erf() + bb).scale(c);
    let u1 = EigenSpinor::closed_form(&v, m, "(e^{x²/4}, 0)", |x| [(x * x).scale(0.25).exp(), Jet::zero(x.order())]);
    let u2 = EigenSpinor::closed_form(&v, l2, "erf", move |x| {
        let (gp, gm) = ((x * x).scale(0.25).exp(), (x * x).scale(-0.25).exp());
        let q = q_of(x);
        let top = (&(x * &q) * &gp + gm).scale(1.0 / (l2 - m));
        [top, &q * &gp]
    });
    let step = pseudoscalar_step(&v, &u1, &u2, Branch::Upper)?;
    let expected = closed("ex8", &v, constant(-l2), move |x| x.scale(0.5) + (x * x).scale(-0.5).exp() / q_of(x))?;
    let b = Draft {
        route: Route::Steps(vec![step.transform.clone()]),
        expected,
        levels: None,
        tolerance: ERF_TOL,
        test_spinors: oscillator_tests(&v, m),
        seed: v,
    }
    .finish()?;
    Ok(with_pseudoscalar(b, step))
}

// ---------------------------------------------------------------------------
// Scalar family (hat form)

fn scalar_k(m: f64, l: f64, what: &str) -> Result<f64> {
    if !(l > 0.0 && l < m) {
        return Err(out_of_range(format!("{what} = {l} must satisfy 0 < {what} < m = {m}")));
    }
    Ok((m * m - l * l).sqrt())
}

/// `α = ½ ln √((m − k)/(m + k))`.
fn alpha_shift(m: f64, k: f64) -> f64 {
    0.25 * ((m - k) / (m + k)).ln()
}

fn hat_tests(v: &Potential, m: f64, energies: &[(f64, f64)]) -> Result<Vec<EigenSpinor>> {
    let s3 = free_mass(m);
    energies
        .iter()
        .map(|&(e, s)| Ok(spinor_to_hat(&free_spinor(&s3, m, e * m, s)?, v)))
        .collect()
}

/// `û = (e^{kx} + e^{−kx}, ((m − k)e^{kx} + (m + k)e^{−kx})/λ)` at `λ`.
fn transparent_seed(v: &Potential, m: f64, l: f64, k: f64) -> EigenSpinor {
    EigenSpinor::closed_form(v, l, "transparent", move |x| {
        let (a, b) = (x.scale(k).exp(), x.scale(-k).exp());
        [&a + &b, a.scale((m - k) / l) + b.scale((m + k) / l)]
    })
}

fn minus_sigma3(u: &EigenSpinor) -> EigenSpinor {
    let uu = u.clone();
    EigenSpinor::new(u.parent(), -u.energy(), format!("-s3 {}", u.label()), u.max_order(), move |x, n| {
        let j = uu.native_jet(x, n)?;
        Ok([-&j[0], j[1].clone()])
    })
}

fn ex9(p: &Params) -> Result<ExampleBundle> {
    let (m, l) = (p.get("m"), p.get("lambda"));
    let k = scalar_k(m, l, "lambda")?;
    let v = free_mass_hat(m);
    let u = transparent_seed(&v, m, l, k);
    let step = scalar_step(&v, &u)?;
    let al = alpha_shift(m, k);
    let expected = closed("ex9", &v, constant(0.0), move |x| {
        ((x.scale(2.0 * k) + 2.0 * al).cosh().scale(l) + m).recip().scale(-2.0 * k * k) + m
    })?;
    let mut b = Draft {
        route: Route::Steps(vec![step.transform.clone()]),
        expected,
        levels: Some(vec![-l, l]),
        tolerance: CLOSED_FORM_TOL,
        test_spinors: hat_tests(&v, m, &[(0.3, 1.0), (0.3, -1.0), (-0.8, 1.0), (1.5, 1.0), (-2.0, -1.0)])?,
        seed: v,
    }
    .finish()?;
    b.scalar = Some(step);
    Ok(b)
}

/// `(k₁² − k²) tanh y₁ / (k₁ − k tanh y tanh y₁)`, the regular form of
/// `(k₁² − k²)/(k₁ coth y₁ − k tanh y)`.
fn coth_ratio(k: f64, k1: f64, y: &Jet, y1: &Jet) -> Jet {
    let (t, t1) = (y.tanh(), y1.tanh());
    t1.scale(k1 * k1 - k * k) / (-(&t * &t1).scale(k) + k1)
}

fn ex10(p: &Params) -> Result<ExampleBundle> {
    let (m, l, l1) = (p.get("m"), p.get("lambda"), p.get("lambda1"));
    let k = scalar_k(m, l, "lambda")?;
    let k1 = scalar_k(m, l1, "lambda1")?;
    if k1 <= k {
        return Err(out_of_range(format!("need lambda1 < lambda (k1 > k), got lambda1 = {l1}, lambda = {l}")));
    }
    let v = free_mass_hat(m);
    let u = transparent_seed(&v, m, l, k);
    let (al, al1) = (alpha_shift(m, k), alpha_shift(m, k1));
    let w = EigenSpinor::closed_form(&v, l1, "(sinh k1x, sinh(k1x + 2a1))", move |x| {
        let y = x.scale(k1);
        [y.sinh(), (y + 2.0 * al1).sinh()]
    });
    let chain = ChainSpec::new(vec![(u.clone(), minus_sigma3(&u)), (w.clone(), minus_sigma3(&w))])?;
    let expected = closed("ex10", &v, constant(0.0), move |x| {
        let (y, y1) = (x.scale(k), x.scale(k1));
        let shifted = coth_ratio(k, k1, &(&y + 2.0 * al), &(&y1 + 2.0 * al1));
        shifted - coth_ratio(k, k1, &y, &y1) + m
    })?;
    Draft {
        route: Route::Chain(chain),
        expected,
        levels: Some(vec![-l, -l1, l1, l]),
        tolerance: CLOSED_FORM_TOL,
        test_spinors: hat_tests(&v, m, &[(0.4, 1.0), (0.4, -1.0), (-0.8, 1.0), (1.5, 1.0), (-2.0, -1.0)])?,
        seed: v,
    }
    .finish()
}

// ---------------------------------------------------------------------------
// Scalar Coulomb

fn coulomb_energy(m: f64, alpha: f64, n: usize) -> f64 {
    let a = alpha / (n as f64 + alpha);
    m * (1.0 - a * a).sqrt()
}

/// Coulomb solution `ψₙ` in hat form at `E = ±Eₙ`, `Eₙ = m √(1 − α²/(n + α)²)`:
/// `a = −E (n−1)!/(e (2α+1)ₙ) e^{−x} x^{α+1} L_{n−1}^{2α+1}(2x)`,
/// `b = n!/(2α)ₙ e^{−x} x^α L_n^{2α−1}(2x)`, with `e = √(m² − E²)`, `x = e r`.
pub fn coulomb_spinor(v: &Potential, m: f64, alpha: f64, n: usize, sign: f64) -> EigenSpinor {
    let e_n = sign.signum() * coulomb_energy(m, alpha, n);
    let e = (m * m - e_n * e_n).sqrt();
    let ca = -e_n * factorial(n - 1) / (e * pochhammer(2.0 * alpha + 1.0, n));
    let cb = factorial(n) / pochhammer(2.0 * alpha, n);
    EigenSpinor::closed_form(v, e_n, format!("coulomb(n={n},E={e_n})"), move |r| {
        let x = r.scale(e);
        let g = &x.scale(-1.0).exp() * &x.powf(alpha);
        let a = &(&g * &x) * &laguerre_jet(n - 1, 2.0 * alpha + 1.0, &x.scale(2.0));
        let b = &g * &laguerre_jet(n, 2.0 * alpha - 1.0, &x.scale(2.0));
        [a.scale(ca), b.scale(cb)]
    })
}

/// `S₂⁽¹⁾(r) = −(α+2)/r + 2m(2mr − 2α − 3)/(2m²r² − 2m(2α+3)r + (α+2)(2α+3))`.
pub fn coulomb_s2_k1(m: f64, alpha: f64, r: f64) -> f64 {
    let b = 2.0 * alpha + 3.0;
    -(alpha + 2.0) / r + 2.0 * m * (2.0 * m * r - b) / (2.0 * m * m * r * r - 2.0 * m * b * r + (alpha + 2.0) * b)
}

fn ex11(p: &Params) -> Result<ExampleBundle> {
    let (m, alpha) = (p.get("m"), p.get("alpha"));
    let k = p.integer("k")?;
    if k == 0 {
        return Err(out_of_range("k must be at least 1".into()));
    }
    let v = scalar_coulomb(m, alpha)?;
    let f1 = coulomb_spinor(&v, m, alpha, k, 1.0);
    let f2 = coulomb_spinor(&v, m, alpha, k + 1, 1.0);
    let chain = ChainSpec::new(vec![(f1.clone(), minus_sigma3(&f1)), (f2.clone(), minus_sigma3(&f2))])?;
    let ek = (m * m - coulomb_energy(m, alpha, k).powi(2)).sqrt();
    let ek1 = (m * m - coulomb_energy(m, alpha, k + 1).powi(2)).sqrt();
    let kf = k as f64;
    let expected = closed("ex11", &v, constant(0.0), move |r| {
        // L and dL/dr of L_n^a(2 e r)
        let lag = |n: usize, a: f64, e: f64| {
            let y = r.scale(2.0 * e);
            let d = if n == 0 { Jet::zero(r.order()) } else { laguerre_jet(n - 1, a + 1.0, &y).scale(-2.0 * e) };
            (laguerre_jet(n, a, &y), d)
        };
        let (a1, da1) = lag(k, 2.0 * alpha + 1.0, ek1);
        let (a2, da2) = lag(k, 2.0 * alpha - 1.0, ek);
        let (b1, db1) = lag(k - 1, 2.0 * alpha + 1.0, ek);
        let (b2, db2) = lag(k + 1, 2.0 * alpha - 1.0, ek1);
        let a = &a1 * &a2;
        let da = &da1 * &a2 + &a1 * &da2;
        let b = &b1 * &b2;
        let db = &db1 * &b2 + &b1 * &db2;
        let (c1, c2) = (kf / (2.0 * alpha + kf + 1.0), (kf + 1.0) / (2.0 * alpha + kf));
        let (w1, w2) = ((alpha + kf + 1.0).powi(-2), (alpha + kf).powi(-2));
        let q1 = a.scale(c1) - b.scale(c2);
        let dq1 = da.scale(c1) - db.scale(c2);
        let q2 = a.scale(w1) - b.scale(w2);
        let dq2 = da.scale(w1) - db.scale(w2);
        r.recip().scale(-alpha) + dq2 / q2 - dq1 / q1 + m
    })?;
    // bound states are small; rescale to unit peak so residuals are not
    // hidden by the max(1, |ψ|) normalization
    let xs = v.interval().linspace(201);
    let test_spinors = [(k + 2, 1.0), (k + 2, -1.0), (k + 3, 1.0)]
        .iter()
        .map(|&(n, s)| {
            let psi = coulomb_spinor(&v, m, alpha, n, s);
            let peak = xs.iter().map(|&r| psi.value(r).map(|u| u[0].abs().max(u[1].abs()))).try_fold(0.0, |a, b| b.map(|b| f64::max(a, b)))?;
            Ok(psi.scaled(1.0 / peak))
        })
        .collect::<Result<Vec<_>>>()?;
    Draft {
        route: Route::Chain(chain),
        expected,
        levels: None,
        tolerance: CLOSED_FORM_TOL,
        test_spinors,
        seed: v,
    }
    .finish()
}

// ---------------------------------------------------------------------------
// Radial family

fn radial_tests(v: &Potential, m: f64) -> Vec<EigenSpinor> {
    vec![
        radial_phi(v, m, 0.3 * m),
        radial_phi_tilde(v, m, 0.3 * m),
        radial_phi(v, m, -0.7 * m),
        radial_phi_tilde(v, m, -0.7 * m),
    ]
}

fn ex12(p: &Params) -> Result<ExampleBundle> {
    let m = p.get("m");
    if !(m > 0.0) {
        return Err(out_of_range(format!("m = {m} must be positive")));
    }
    let v = free_mass(m).with_interval(Interval::new(0.1, 10.0))?;
    let u1 = EigenSpinor::constant(&v, m, "(1,0)", [1.0, 0.0]);
    let u2 = EigenSpinor::closed_form(&v, -m, "(1, -2mr)", move |r| [Jet::constant(1.0, r.order()), r.scale(-2.0 * m)]);
    let step = pseudoscalar_step(&v, &u1, &u2, Branch::Upper)?;
    let expected = closed("ex12", &v, constant(m), |r| r.recip())?;
    let b = Draft {
        route: Route::Steps(vec![step.transform.clone()]),
        expected,
        levels: None,
        tolerance: CLOSED_FORM_TOL,
        test_spinors: free_tests(&v, m, &[(0.3, 1.0), (0.3, -1.0), (-0.6, 1.0), (1.5, 1.0)])?,
        seed: v,
    }
    .finish()?;
    Ok(with_pseudoscalar(b, step))
}

fn radial(name: &str, p: &Params) -> Result<ExampleBundle> {
    let m = p.get("m");
    if !(m > 0.0) {
        return Err(out_of_range(format!("m = {m} must be positive")));
    }
    let v = radial_free(m, 1.0);
    let th = |w: &str| radial_threshold(&v, m, w);
    let lam = p.get("lambda");
    let k = if name == "ex12b" || name == "ex14" { 0.0 } else { scalar_k(m, lam, "lambda")? };
    type F = Box<dyn Fn(&Jet) -> Jet + Send + Sync>;
    let (u1, u2, pf, qf, upper): (EigenSpinor, EigenSpinor, F, F, bool) = match name {
        "ex12b" => (th("phi~(m)"), th("phi~(-m)"), Box::new(constant(m)), Box::new(|r: &Jet| r.recip().scale(2.0)), true),
        "ex13" => (
            th("phi~(m)"),
            radial_phi_tilde(&v, m, lam),
            Box::new(constant(-lam)),
            Box::new(move |r: &Jet| -r.recip() - r.scale(k * k) / (r.scale(k) + 1.0)),
            true,
        ),
        "ex13b" => (
            th("phi~(m)"),
            radial_phi(&v, m, lam),
            Box::new(constant(-lam)),
            Box::new(move |r: &Jet| {
                let (s, c) = r.scale(k).sinh_cosh();
                let kr = r.scale(k);
                let num = (&kr * &c).scale(3.0) - &((r * r).scale(k * k) + 3.0) * &s;
                let den = r * &(&kr * &c - &s);
                r.recip().scale(2.0) - num / den
            }),
            true,
        ),
        "ex13c" => (
            radial_phi(&v, m, lam),
            radial_phi(&v, m, -lam),
            Box::new(constant(m)),
            Box::new(move |r: &Jet| {
                let (s, c) = r.scale(k).sinh_cosh();
                let kr = r.scale(k);
                let num = &kr * &c + (r * r).scale(k * k) / &s - s.scale(2.0);
                let den = r * &(&kr * &c - &s);
                r.recip().scale(2.0) - num / den
            }),
            false,
        ),
        "ex14" => {
            let c = p.get("c");
            if !(c > 0.0) {
                return Err(out_of_range(format!("c = {c} must be positive")));
            }
            let u1 = EigenSpinor::combine(&[(0.5 * c, &th("phi(m)")), (1.0, &th("phi~(m)"))], "c/2 phi(m) + phi~(m)")?;
            let den = move |r: &Jet| (r * r).scale(4.0 * c * m * m) + c * 3.0 + (&(r * r) * r).scale(8.0 * m * m);
            (
                u1,
                th("phi~(-m)"),
                Box::new(move |r: &Jet| den(r).recip().scale(-12.0 * c * m) + m),
                Box::new(move |r: &Jet| {
                    let num = (r * r).scale(12.0 * c * m * m) - 3.0 * c + (&(r * r) * r).scale(16.0 * m * m);
                    num / (r * &den(r))
                }),
                false,
            )
        }
        "ex14b" => {
            let den = move |r: &Jet| {
                let (s, c) = r.scale(k).sinh_cosh();
                (r * &c).scale(2.0 * k * m) + s.scale(lam - m)
            };
            (
                th("phi(m)"),
                radial_phi(&v, m, lam),
                Box::new(move |r: &Jet| {
                    let (s, c) = r.scale(k).sinh_cosh();
                    -((r * &c).scale(2.0 * k * m * lam) + s.scale(k * k + m * (m - lam))) / den(r)
                }),
                Box::new(move |r: &Jet| {
                    let (s, c) = r.scale(k).sinh_cosh();
                    ((r * &s).scale(2.0 * k * m) - c.scale(m + lam)).scale(k) / den(r)
                }),
                false,
            )
        }
        _ => return Err(unknown(name)),
    };
    let expected = closed(name, &v, pf, qf)?;
    let (t, ps) = if upper {
        let s = pseudoscalar_step(&v, &u1, &u2, Branch::Upper)?;
        (s.transform.clone(), Some(s))
    } else {
        (build_transform(&u1, &u2)?, None)
    };
    let mut b = Draft {
        route: Route::Steps(vec![t]),
        expected,
        levels: None,
        tolerance: CLOSED_FORM_TOL,
        test_spinors: radial_tests(&v, m),
        seed: v,
    }
    .finish()?;
    b.pseudoscalar = ps;
    Ok(b)
}
