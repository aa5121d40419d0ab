//! Canonical-form Dirac potentials `V = p σ₃ + q σ₁` and the seed catalog.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Interval, ScalarField};
use crate::jet::Jet;
use crate::linalg::{Mat2, Mat2Jet};

/// Default lower cut-off for half-line (radial) domains.
pub const R_MIN: f64 = 1e-6;

/// Number of probe points used for class detection.
pub const PROBE_POINTS: usize = 33;

const CLASS_TOL: f64 = 1e-12;

/// Which basis the potential is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    /// `p σ₃ + q σ₁`, the form used for general and pseudoscalar potentials.
    Sigma3,
    /// `Û⁻¹ V Û` with `Û = (1 + γ)/√2`; scalar potentials are pure `σ₁`.
    Hat,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClassTag {
    General,
    /// Constant `p = mass`.
    Pseudoscalar { mass: f64 },
    /// `q ≡ 0` (σ₃ form) or `p ≡ 0` (hat form).
    Scalar { mass: Option<f64> },
    /// Both scalar and pseudoscalar: the free massive particle.
    Free { mass: f64 },
}

impl ClassTag {
    pub fn is_pseudoscalar(&self) -> bool {
        matches!(self, ClassTag::Pseudoscalar { .. } | ClassTag::Free { .. })
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, ClassTag::Scalar { .. } | ClassTag::Free { .. })
    }

    pub fn mass(&self) -> Option<f64> {
        match *self {
            ClassTag::Pseudoscalar { mass } | ClassTag::Free { mass } => Some(mass),
            ClassTag::Scalar { mass } => mass,
            ClassTag::General => None,
        }
    }
}

struct PotentialData {
    name: String,
    p: ScalarField,
    q: ScalarField,
    representation: Representation,
    class: ClassTag,
    interval: Interval,
}

/// Immutable, cheaply clonable potential. Identity (for parent checks) is the
/// shared allocation, not numerical equality.
#[derive(Clone)]
pub struct Potential {
    inner: Arc<PotentialData>,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("name", &self.inner.name)
            .field("representation", &self.inner.representation)
            .field("class", &self.inner.class)
            .field("interval", &self.inner.interval)
            .finish()
    }
}

/// Builds a σ₃-form potential with automatic class detection on `[-10, 10]`
/// (clipped to the domain of `p` and `q`).
pub fn make_canonical(p: ScalarField, q: ScalarField) -> Result<Potential> {
    let dom = p.domain().intersect(&q.domain());
    let interval = Interval::new(dom.lo.max(-10.0), dom.hi.min(10.0));
    Potential::new("custom", p, q, Representation::Sigma3, interval, None)
}

impl Potential {
    /// `mass_hint` supplies the mass of scalar potentials, which cannot be
    /// separated from `S(x)` by probing alone.
    pub fn new(
        name: impl Into<String>,
        p: ScalarField,
        q: ScalarField,
        representation: Representation,
        interval: Interval,
        mass_hint: Option<f64>,
    ) -> Result<Self> {
        if !interval.is_finite() || interval.lo >= interval.hi {
            return Err(Error::InvalidParameter(format!("working interval {interval} must be finite and non-empty")));
        }
        let class = detect_class(&p, &q, representation, interval, mass_hint)?;
        Ok(Potential {
            inner: Arc::new(PotentialData { name: name.into(), p, q, representation, class, interval }),
        })
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn p(&self) -> &ScalarField {
        &self.inner.p
    }

    pub fn q(&self) -> &ScalarField {
        &self.inner.q
    }

    pub fn representation(&self) -> Representation {
        self.inner.representation
    }

    pub fn class(&self) -> ClassTag {
        self.inner.class
    }

    /// Documented working interval.
    pub fn interval(&self) -> Interval {
        self.inner.interval
    }

    pub fn domain(&self) -> Interval {
        self.inner.p.domain().intersect(&self.inner.q.domain())
    }

    pub fn max_order(&self) -> usize {
        self.inner.p.max_order().min(self.inner.q.max_order())
    }

    pub fn same(&self, other: &Potential) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    /// `p⁽ᵏ⁾(x) σ₃ + q⁽ᵏ⁾(x) σ₁`.
    pub fn matrix_at(&self, x: f64, k: usize) -> Result<Mat2> {
        Ok(Mat2::canonical(self.inner.p.derivative(k, x)?, self.inner.q.derivative(k, x)?))
    }

    pub fn pq(&self, x: f64) -> Result<(f64, f64)> {
        Ok((self.inner.p.value(x)?, self.inner.q.value(x)?))
    }

    pub fn jets(&self, x: f64, order: usize) -> Result<(Jet, Jet)> {
        Ok((self.inner.p.jet(x, order)?, self.inner.q.jet(x, order)?))
    }

    pub fn matrix_jet(&self, x: f64, order: usize) -> Result<Mat2Jet> {
        let (p, q) = self.jets(x, order)?;
        Ok(Mat2Jet::canonical(&p, &q))
    }

    /// A copy with a different working interval (and a new identity).
    pub fn with_interval(&self, interval: Interval) -> Result<Potential> {
        Potential::new(
            self.name(),
            self.p().clone(),
            self.q().clone(),
            self.representation(),
            interval,
            self.class().mass(),
        )
    }

    /// `q + dq`, used for negative controls.
    pub fn perturbed_q(&self, dq: f64) -> Result<Potential> {
        let q = self.q().map(move |j| j + dq);
        Potential::new(
            format!("{}+dq", self.name()),
            self.p().clone(),
            q,
            self.representation(),
            self.interval(),
            self.class().mass(),
        )
    }

    /// Converts a hat-form potential to σ₃ form: `p = q̂`, `q = −p̂`.
    pub fn to_sigma3(&self) -> Result<Potential> {
        match self.representation() {
            Representation::Sigma3 => Ok(self.clone()),
            Representation::Hat => Potential::new(
                format!("{}[sigma3]", self.name()),
                self.q().clone(),
                self.p().map(|j| -j),
                Representation::Sigma3,
                self.interval(),
                self.class().mass(),
            ),
        }
    }

    /// Converts a σ₃-form potential to hat form: `p̂ = −q`, `q̂ = p`.
    pub fn to_hat(&self) -> Result<Potential> {
        match self.representation() {
            Representation::Hat => Ok(self.clone()),
            Representation::Sigma3 => Potential::new(
                format!("{}[hat]", self.name()),
                self.q().map(|j| -j),
                self.p().clone(),
                Representation::Hat,
                self.interval(),
                self.class().mass(),
            ),
        }
    }
}

fn detect_class(
    p: &ScalarField,
    q: &ScalarField,
    rep: Representation,
    interval: Interval,
    mass_hint: Option<f64>,
) -> Result<ClassTag> {
    let xs = interval.linspace(PROBE_POINTS);
    let mut pv = Vec::with_capacity(xs.len());
    let mut qv = Vec::with_capacity(xs.len());
    for &x in &xs {
        pv.push(p.value(x)?);
        qv.push(q.value(x)?);
    }
    let constant = |v: &[f64]| v.iter().all(|a| (a - v[0]).abs() <= CLASS_TOL);
    let zero = |v: &[f64]| v.iter().all(|a| a.abs() <= CLASS_TOL);
    Ok(match rep {
        Representation::Sigma3 => match (constant(&pv), zero(&qv)) {
            (true, true) => ClassTag::Free { mass: pv[0] },
            (true, false) => ClassTag::Pseudoscalar { mass: pv[0] },
            (false, true) => ClassTag::Scalar { mass: mass_hint },
            (false, false) => ClassTag::General,
        },
        Representation::Hat => match (zero(&pv), constant(&qv)) {
            (true, true) => ClassTag::Free { mass: qv[0] },
            (true, false) => ClassTag::Scalar { mass: mass_hint },
            _ => ClassTag::General,
        },
    })
}

// ---------------------------------------------------------------------------
// Seed catalog

/// Free massive particle `V = m σ₃`.
pub fn free_mass(m: f64) -> Potential {
    Potential::new(
        format!("free_mass:m={m}"),
        ScalarField::constant(m),
        ScalarField::constant(0.0),
        Representation::Sigma3,
        Interval::new(-10.0, 10.0),
        Some(m),
    )
    .expect("constant fields evaluate everywhere")
}

/// Free massive particle in hat form, `V̂ = m σ₁`.
pub fn free_mass_hat(m: f64) -> Potential {
    Potential::new(
        format!("free_mass_hat:m={m}"),
        ScalarField::constant(0.0),
        ScalarField::constant(m),
        Representation::Hat,
        Interval::new(-10.0, 10.0),
        Some(m),
    )
    .expect("constant fields evaluate everywhere")
}

/// Dirac oscillator `V = m σ₃ + (x/2) σ₁`.
pub fn dirac_oscillator(m: f64) -> Potential {
    Potential::new(
        format!("dirac_oscillator:m={m}"),
        ScalarField::constant(m),
        ScalarField::closed_form(|x| x.scale(0.5), Interval::REAL_LINE),
        Representation::Sigma3,
        Interval::new(-6.0, 6.0),
        Some(m),
    )
    .expect("closed forms evaluate everywhere")
}

/// Scalar Coulomb potential in hat form, `V̂ = (m − α/r) σ₁` on `r > r_min`.
pub fn scalar_coulomb(m: f64, alpha: f64) -> Result<Potential> {
    if alpha <= 0.0 {
        return Err(Error::ParameterOutOfRegularRange(format!("alpha = {alpha} must be positive")));
    }
    let dom = Interval::half_line(R_MIN);
    Potential::new(
        format!("scalar_coulomb:m={m},alpha={alpha}"),
        ScalarField::constant(0.0).with_domain(dom),
        ScalarField::closed_form(move |r| m - r.recip().scale(alpha), dom),
        Representation::Hat,
        Interval::new(0.1, 12.0),
        Some(m),
    )
}

/// Radial free particle `V = m σ₃ + (k/r) σ₁` on `r > r_min`.
pub fn radial_free(m: f64, k: f64) -> Potential {
    let dom = Interval::half_line(R_MIN);
    Potential::new(
        format!("radial_free:m={m},k={k}"),
        ScalarField::constant(m).with_domain(dom),
        ScalarField::closed_form(move |r| r.recip().scale(k), dom),
        Representation::Sigma3,
        Interval::new(0.1, 10.0),
        Some(m),
    )
    .expect("closed forms evaluate on the half line")
}

pub fn zero_potential() -> Potential {
    free_mass(0.0)
}

/// Names accepted by [`seed_catalog`].
pub const SEED_NAMES: [&str; 5] = ["free_mass", "free_mass_hat", "dirac_oscillator", "scalar_coulomb", "radial_free"];

/// Seed lookup by name and parameters (`m`, `alpha`, `k`).
pub fn seed_catalog(name: &str, params: &[(&str, f64)]) -> Result<Potential> {
    let get = |key: &str, default: f64| params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v).unwrap_or(default);
    for (k, _) in params {
        if !matches!(*k, "m" | "alpha" | "k") {
            return Err(Error::InvalidParameter(format!("unknown seed parameter `{k}`")));
        }
    }
    match name {
        "free_mass" => Ok(free_mass(get("m", 1.0))),
        "free_mass_hat" => Ok(free_mass_hat(get("m", 1.0))),
        "dirac_oscillator" => Ok(dirac_oscillator(get("m", 1.0))),
        "scalar_coulomb" => scalar_coulomb(get("m", 1.0), get("alpha", 1.0)),
        "radial_free" => Ok(radial_free(get("m", 1.0), get("k", 1.0))),
        other => Err(Error::UnknownSeed(other.to_string())),
    }
}

/// Parses `name` or `name:key=value,key=value`.
pub fn parse_seed_spec(spec: &str) -> Result<(String, Vec<(String, f64)>)> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n.trim(), r.trim()),
        None => (spec.trim(), ""),
    };
    if name.is_empty() {
        return Err(Error::Parse(format!("empty seed name in `{spec}`")));
    }
    let mut params = Vec::new();
    for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got `{item}`")))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("bad number in `{item}`")))?;
        params.push((k.trim().to_string(), v));
    }
    Ok((name.to_string(), params))
}

/// `seed_catalog` driven by a textual spec such as `free_mass:m=1`.
pub fn seed_from_spec(spec: &str) -> Result<Potential> {
    let (name, params) = parse_seed_spec(spec)?;
    let refs: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    seed_catalog(&name, &refs)
}
