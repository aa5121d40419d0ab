//! Line-oriented chain files:
//!
//! ```text
//! # two-soliton
//! step 1: seed=free_mass:m=1, lambda=1, mu=0.5
//! step 2: seed=free_mass:m=1, lambda=-0.5, mu=0.3, g=exp-
//! ```
//!
//! `seed` is either a seed spec or a catalog chain example (`seed=ex2`, which
//! takes that example's spinors for step `i`). For `free_mass` seeds the
//! optional `f` and `g` keys pick the solution at `lambda` and `mu`:
//! `cosh` (default), `sinh`, `exp+`, `exp-`; at `|E| = m` the constant
//! solution is used.

use darboux_core::catalog::example;
use darboux_core::potential::parse_seed_spec;
use darboux_core::spinor::EigenSpinor;
use darboux_core::{seed_catalog, Potential};

use crate::commands::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct StepLine {
    pub index: usize,
    pub seed: String,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub f: Option<String>,
    pub g: Option<String>,
}

fn usage(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("chain spec line {line}: {msg}"))
}

pub fn parse(text: &str) -> Result<Vec<StepLine>, CliError> {
    let mut steps = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let no = no + 1;
        let (head, body) = line.split_once(':').ok_or_else(|| usage(no, "expected `step i: ...`"))?;
        let index: usize = head
            .trim()
            .strip_prefix("step")
            .map(str::trim)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| usage(no, format!("bad step header `{head}`")))?;
        if index != steps.len() + 1 {
            return Err(usage(no, format!("steps must be numbered 1, 2, ...; found {index}")));
        }
        let mut step = StepLine { index, seed: String::new(), lambda: None, mu: None, f: None, g: None };
        // `seed=free_mass:m=1,k=2` may contain commas, so split on `, key=` boundaries
        for item in split_items(body) {
            let (k, v) = item.split_once('=').ok_or_else(|| usage(no, format!("expected key=value, got `{item}`")))?;
            let v = v.trim();
            let num = || v.parse::<f64>().map_err(|_| usage(no, format!("bad number `{v}`")));
            match k.trim() {
                "seed" => step.seed = v.to_string(),
                "lambda" => step.lambda = Some(num()?),
                "mu" => step.mu = Some(num()?),
                "f" => step.f = Some(v.to_string()),
                "g" => step.g = Some(v.to_string()),
                other => return Err(usage(no, format!("unknown key `{other}`"))),
            }
        }
        if step.seed.is_empty() {
            return Err(usage(no, "missing seed"));
        }
        steps.push(step);
    }
    if steps.is_empty() {
        return Err(CliError::Usage("chain spec has no steps".into()));
    }
    Ok(steps)
}

const KEYS: [&str; 5] = ["seed", "lambda", "mu", "f", "g"];

fn split_items(body: &str) -> Vec<String> {
    let mut items: Vec<String> = Vec::new();
    for part in body.split(',') {
        let key = part.split_once('=').map(|(k, _)| k.trim());
        match (key, items.last_mut()) {
            (Some(k), _) if KEYS.contains(&k) => items.push(part.trim().to_string()),
            (_, Some(last)) if last.starts_with("seed=") && last.contains(':') => {
                last.push(',');
                last.push_str(part.trim());
            }
            _ => items.push(part.trim().to_string()),
        }
    }
    items
}

/// Resolves every line to a spinor pair on one shared seed.
pub fn resolve(steps: &[StepLine]) -> Result<Vec<(EigenSpinor, EigenSpinor)>, CliError> {
    let first = &steps[0].seed;
    if steps.iter().any(|s| &s.seed != first) {
        return Err(CliError::Usage("all chain steps must use the same seed".into()));
    }
    if first.starts_with("ex") && !first.contains(':') {
        let b = example(first)?;
        let c = b.chain.ok_or_else(|| CliError::Usage(format!("{first} is not a chain example")))?;
        if steps.len() > c.depth() {
            return Err(CliError::Usage(format!("{first} has only {} steps", c.depth())));
        }
        return Ok(c.steps()[..steps.len()].to_vec());
    }
    let (name, params) = parse_seed_spec(first)?;
    if name != "free_mass" {
        return Err(CliError::Usage(format!("spinor builders exist for free_mass only, got `{name}`")));
    }
    let refs: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let v = seed_catalog(&name, &refs)?;
    let m = refs.iter().find(|(k, _)| *k == "m").map(|(_, v)| *v).unwrap_or(1.0);
    steps
        .iter()
        .map(|s| {
            let missing = |k: &str| usage(s.index, format!("missing {k}"));
            let l = s.lambda.ok_or_else(|| missing("lambda"))?;
            let mu = s.mu.ok_or_else(|| missing("mu"))?;
            Ok((free_builder(&v, m, l, s.f.as_deref())?, free_builder(&v, m, mu, s.g.as_deref())?))
        })
        .collect()
}

/// Solutions of `V = m σ₃` at `E`, `k = √(m² − E²)`.
fn free_builder(v: &Potential, m: f64, e: f64, kind: Option<&str>) -> Result<EigenSpinor, CliError> {
    if e == m {
        return Ok(EigenSpinor::constant(v, e, "(1,0)", [1.0, 0.0]));
    }
    if e == -m {
        return Ok(EigenSpinor::constant(v, e, "(0,1)", [0.0, 1.0]));
    }
    if e.abs() > m {
        return Err(CliError::Usage(format!("energy {e} lies in the continuum; builders need |E| < m")));
    }
    let k = (m * m - e * e).sqrt();
    let a = k / (e - m);
    let kind = kind.unwrap_or("cosh");
    let label = format!("{kind}@{e}");
    Ok(match kind {
        "cosh" => EigenSpinor::closed_form(v, e, label, move |x| {
            let (s, c) = x.scale(k).sinh_cosh();
            [s.scale(a), c]
        }),
        "sinh" => EigenSpinor::closed_form(v, e, label, move |x| {
            let (s, c) = x.scale(k).sinh_cosh();
            [c.scale(a), s]
        }),
        "exp+" => EigenSpinor::closed_form(v, e, label, move |x| {
            let ex = x.scale(k).exp();
            [ex.scale(a), ex]
        }),
        "exp-" => EigenSpinor::closed_form(v, e, label, move |x| {
            let ex = x.scale(-k).exp();
            [ex.scale(-a), ex]
        }),
        other => return Err(CliError::Usage(format!("unknown spinor builder `{other}`"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_steps_with_comma_seeds() {
        let s = parse("# c\nstep 1: seed=free_mass:m=1, lambda=1, mu=0.5\nstep 2: seed=free_mass:m=1, lambda=-0.5, mu=0.3, g=exp-\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].seed, "free_mass:m=1");
        assert_eq!(s[1].g.as_deref(), Some("exp-"));
        let s = parse("step 1: seed=radial_free:m=1,k=2, lambda=1, mu=0.5").unwrap();
        assert_eq!(s[0].seed, "radial_free:m=1,k=2");
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse("").is_err());
        assert!(parse("step 2: seed=ex2").is_err());
        assert!(parse("step 1: seed=ex2, lambda=abc").is_err());
        assert!(parse("step 1: seed=ex2, colour=red").is_err());
        assert!(parse("stage 1: seed=ex2").is_err());
    }

    #[test]
    fn builders_solve_the_free_equation() {
        let v = darboux_core::potential::free_mass(1.0);
        for kind in ["cosh", "sinh", "exp+", "exp-"] {
            let s = free_builder(&v, 1.0, 0.4, Some(kind)).unwrap();
            for x in [-2.0, 0.3, 1.7] {
                assert!(s.dirac_residual(x).unwrap() < 1e-12, "{kind}");
            }
        }
        assert!(free_builder(&v, 1.0, 1.5, None).is_err());
    }
}
