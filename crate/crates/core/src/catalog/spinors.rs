use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::potential::Potential;
use crate::special::hermite_he_jet;
use crate::spinor::EigenSpinor;

/// Solution of the free equation `V = m σ₃` at `E ≠ ±m`, bound to `v`.
///
/// For `|E| < m`: `e^{s k x}(s k/(E − m), 1)` with `k = √(m² − E²)`.
/// For `|E| > m`: `(κ cos κx/(E − m), sin κx)` (`s > 0`) or
/// `(−κ sin κx/(E − m), cos κx)` (`s < 0`), `κ = √(E² − m²)`.
pub fn free_spinor(v: &Potential, m: f64, e: f64, s: f64) -> Result<EigenSpinor> {
    if e.abs() == m.abs() {
        return Err(Error::InvalidParameter(format!("E = {e} is a threshold of the free equation")));
    }
    let d = e - m;
    Ok(if e.abs() < m.abs() {
        let k = s.signum() * (m * m - e * e).sqrt();
        EigenSpinor::closed_form(v, e, format!("free(E={e},{})", if s > 0.0 { "+" } else { "-" }), move |x| {
            let ex = x.scale(k).exp();
            [ex.scale(k / d), ex]
        })
    } else {
        let kappa = (e * e - m * m).sqrt();
        let up = s > 0.0;
        EigenSpinor::closed_form(v, e, format!("wave(E={e},{})", if up { "sin" } else { "cos" }), move |x| {
            let (sn, cs) = x.scale(kappa).sin_cos();
            if up {
                [cs.scale(kappa / d), sn]
            } else {
                [sn.scale(-kappa / d), cs]
            }
        })
    })
}

/// Bound state of the oscillator `V = m σ₃ + (x/2) σ₁` at `E = ±√(m² + n)`:
/// `(n He_{n−1}/(E − m), He_n) e^{−x²/4}`. The ground state `n = 0` exists
/// only at `E = −m`; `sign` is ignored there.
pub fn oscillator_bound_state(v: &Potential, m: f64, n: usize, sign: f64) -> EigenSpinor {
    let e = if n == 0 { -m } else { sign.signum() * (m * m + n as f64).sqrt() };
    EigenSpinor::closed_form(v, e, format!("osc(n={n},E={e})"), move |x| {
        let g = (x * x).scale(-0.25).exp();
        let top = if n == 0 { Jet::zero(x.order()) } else { hermite_he_jet(n - 1, x).scale(n as f64 / (e - m)) };
        [&top * &g, &hermite_he_jet(n, x) * &g]
    })
}

/// Regular solution of `V = m σ₃ + σ₁/r` at `|λ| < m`:
/// `k (sinh kr, (−k cosh kr + sinh kr / r)/(λ + m))`.
pub fn radial_phi(v: &Potential, m: f64, lambda: f64) -> EigenSpinor {
    let k = (m * m - lambda * lambda).sqrt();
    EigenSpinor::closed_form(v, lambda, format!("phi({lambda})"), move |r| {
        let (s, c) = r.scale(k).sinh_cosh();
        let b = (c.scale(-k) + &s / r).scale(k / (lambda + m));
        [s.scale(k), b]
    })
}

/// Decaying solution of `V = m σ₃ + σ₁/r` at `|λ| < m`:
/// `−k e^{−kr}(1, (k + 1/r)/(λ + m))`.
pub fn radial_phi_tilde(v: &Potential, m: f64, lambda: f64) -> EigenSpinor {
    let k = (m * m - lambda * lambda).sqrt();
    EigenSpinor::closed_form(v, lambda, format!("phi~({lambda})"), move |r| {
        let ex = r.scale(-k).exp().scale(-k);
        let b = &ex * &(r.recip() + k).scale(1.0 / (lambda + m));
        [ex, b]
    })
}

/// `φ(m) = (1, 1/(2mr))`, `φ̃(m) = (r, 0)`, `φ(−m) = (0, 1/r)`, `φ̃(−m) = (−3r, 2mr²)`.
pub(crate) fn radial_threshold(v: &Potential, m: f64, which: &str) -> EigenSpinor {
    match which {
        "phi(m)" => EigenSpinor::closed_form(v, m, which, move |r| [Jet::constant(1.0, r.order()), r.recip().scale(0.5 / m)]),
        "phi~(m)" => EigenSpinor::closed_form(v, m, which, |r| [r.clone(), Jet::zero(r.order())]),
        "phi(-m)" => EigenSpinor::closed_form(v, -m, which, |r| [Jet::zero(r.order()), r.recip()]),
        "phi~(-m)" => EigenSpinor::closed_form(v, -m, which, move |r| [r.scale(-3.0), (r * r).scale(2.0 * m)]),
        _ => unreachable!("unknown threshold solution {which}"),
    }
}
