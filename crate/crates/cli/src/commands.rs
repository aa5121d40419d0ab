use std::io::Write;
use std::path::{Path, PathBuf};

use darboux_core::catalog::{
    self, check_bundle, example, example_with, figure_data, fmt_sig, ExampleBundle, FigureData, EXAMPLE_NAMES,
    FIGURE_NUMBERS,
};
use darboux_core::chain::{chain_potential, sequential, ChainSpec, DEFAULT_MAX_DEPTH};
use darboux_core::darboux::{apply_forward, partner_matrix, TransformFunction};
use darboux_core::potential::{parse_seed_spec, SEED_NAMES};
use darboux_core::reduction::{scalar_reduction_check, schrodinger_pair, susy_diagram_check};
use darboux_core::verify::{norm_preservation, superalgebra_residual, GridSpec, ResidualReport};
use darboux_core::{Interval, Potential};

use crate::chainfile;
use crate::{ChainArgs, FigureArgs, ReduceArgs, TransformArgs, VerifyArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] darboux_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{failed} of {total} checks failed")]
    Failed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed { .. } => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

const CROSS_CHECK_TOL: f64 = 1e-8;

/// `start:stop:step` with `step > 0` and `start < stop`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::Usage(format!("grid must be start:stop:step, got `{spec}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let n: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
    let (a, b, h) = (n[0], n[1], n[2]);
    if !(h.is_finite() && a.is_finite() && b.is_finite()) || h <= 0.0 || a >= b {
        return Err(CliError::Usage(format!("grid needs step > 0 and start < stop, got `{spec}`")));
    }
    let count = ((b - a) / h + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| a + i as f64 * h).collect())
}

fn grid_or_default(spec: Option<&str>, v: &Potential) -> Result<Vec<f64>> {
    match spec {
        Some(s) => parse_grid(s),
        None => Ok(GridSpec::for_potential(v).points()),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_table(t: &FigureData, out: Option<&Path>) -> Result<()> {
    emit(&t.to_csv()?, out)
}

fn potential_table(v: &Potential, xs: &[f64], lenient: bool) -> Result<FigureData> {
    let rows = xs
        .iter()
        .map(|&x| match v.pq(x) {
            Ok((p, q)) => Ok(vec![x, p, q]),
            Err(_) if lenient => Ok(vec![x, f64::NAN, f64::NAN]),
            Err(e) => Err(CliError::from(e)),
        })
        .collect::<Result<_>>()?;
    Ok(FigureData { columns: vec!["x".into(), "p".into(), "q".into()], rows })
}

pub fn list() -> Result<()> {
    let mut s = String::from("examples:\n");
    for name in EXAMPLE_NAMES {
        let b = example(name)?;
        let params: Vec<String> = b.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        s.push_str(&format!("  {name:<6} {}\n", params.join(",")));
    }
    s.push_str("seeds:\n");
    for n in SEED_NAMES {
        s.push_str(&format!("  {n}\n"));
    }
    s.push_str(&format!("figures: {}\n", FIGURE_NUMBERS.map(|n| n.to_string()).join(", ")));
    emit(&s, None)
}

/// Maps a seed spec plus energy/level onto the single-step catalog family
/// built on that seed.
fn bundle_for_seed(seed: &str, eps: Option<f64>, n: Option<u32>) -> Result<ExampleBundle> {
    let (name, params) = parse_seed_spec(seed)?;
    let mut over: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let need_eps = |what: &str| eps.ok_or_else(|| CliError::Usage(format!("{what} seeds need --eps")));
    let ex = match name.as_str() {
        "free_mass" => {
            over.push(("eps", need_eps("free_mass")?));
            "ex1"
        }
        "free_mass_hat" => {
            over.push(("lambda", need_eps("free_mass_hat")?));
            "ex9"
        }
        "dirac_oscillator" => {
            let n = n.ok_or_else(|| CliError::Usage("dirac_oscillator seeds need --n".into()))?;
            over.push(("n", n as f64));
            if n % 2 == 1 {
                "ex6"
            } else {
                "ex7"
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "transform supports free_mass, free_mass_hat and dirac_oscillator seeds (got `{other}`); use --example"
            )))
        }
    };
    Ok(example_with(ex, &over)?)
}

fn first_step(b: &ExampleBundle) -> Result<&TransformFunction> {
    b.steps
        .first()
        .ok_or_else(|| CliError::Usage(format!("{} has no sequential step on its interval", b.name)))
}

pub fn transform(a: TransformArgs) -> Result<()> {
    let b = match (&a.seed, &a.example) {
        (Some(s), None) => bundle_for_seed(s, a.eps, a.n)?,
        (None, Some(e)) => example(e)?,
        _ => return Err(CliError::Usage("transform needs --seed or --example".into())),
    };
    let t = first_step(&b)?;
    let v1 = t.transformed_potential();
    let xs = grid_or_default(a.output.grid.as_deref(), v1)?;
    emit_table(&potential_table(v1, &xs, false)?, a.output.out.as_deref())?;
    if let Some(path) = &a.solutions {
        let images: Vec<_> = b.test_spinors.iter().map(|s| apply_forward(t, s)).collect::<darboux_core::Result<_>>()?;
        let mut columns = vec!["x".to_string()];
        for (i, s) in images.iter().enumerate() {
            columns.push(format!("phi{}_1[E={}]", i + 1, s.energy()));
            columns.push(format!("phi{}_2[E={}]", i + 1, s.energy()));
        }
        let rows = xs
            .iter()
            .map(|&x| {
                let mut row = vec![x];
                for s in &images {
                    row.extend(s.value(x)?);
                }
                Ok(row)
            })
            .collect::<darboux_core::Result<_>>()?;
        emit_table(&FigureData { columns, rows }, Some(path))?;
    }
    Ok(())
}

fn max_depth() -> Result<usize> {
    match std::env::var("DARBOUX_MAX_DEPTH") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("DARBOUX_MAX_DEPTH must be a positive integer, got `{s}`"))),
        Err(_) => Ok(DEFAULT_MAX_DEPTH),
    }
}

fn read_spec(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read chain spec {}: {e}", path.display())))
}

pub fn chain(a: ChainArgs) -> Result<()> {
    let text = read_spec(&a.spec)?;
    let steps = chainfile::resolve(&chainfile::parse(&text)?)?;
    let c = ChainSpec::with_max_depth(steps, max_depth()?)?;
    let vn = chain_potential(&c)?;
    let xs = grid_or_default(a.output.grid.as_deref(), &vn)?;
    let table = potential_table(&vn, &xs, a.allow_singular)?;
    emit_table(&table, a.output.out.as_deref())?;
    if a.cross_check {
        let seq = sequential(&c)?;
        let last = seq.last().expect("non-empty chain").transformed_potential();
        let mut worst = (0.0f64, f64::NAN);
        for row in &table.rows {
            let (x, p, q) = (row[0], row[1], row[2]);
            if !(p.is_finite() && q.is_finite()) {
                continue;
            }
            let (ps, qs) = last.pq(x)?;
            let d = (p - ps).abs().max((q - qs).abs());
            if d > worst.0 {
                worst = (d, x);
            }
        }
        let g = GridSpec::new(xs[0], xs[xs.len() - 1], xs.len());
        let r = ResidualReport::new("chain-vs-sequential", "chain", g, worst, CROSS_CHECK_TOL);
        eprintln!("{}", r.csv_line());
        if !r.pass {
            return Err(CliError::Failed { failed: 1, total: 1 });
        }
    }
    Ok(())
}

/// Suites that are not tied to a single catalog example.
fn global_suites() -> Result<Vec<ResidualReport>> {
    let mut out = Vec::new();

    // norm preservation of the one-soliton bound state under the second two-soliton step
    let b = example("ex2")?;
    let pm = partner_matrix(&b.steps[0])?;
    let psi = if (pm.u1().energy() - 0.5).abs() < 1e-12 { pm.u1() } else { pm.u2() };
    let iv = Interval::new(-20.0, 20.0);
    let ratio = norm_preservation(&b.steps[1], psi, iv, 1e-6)?;
    let g = GridSpec::new(iv.lo, iv.hi, 0);
    out.push(ResidualReport::new("norm-preservation", "ex2", g, ((ratio - 1.0).abs(), f64::NAN), 1e-6));

    for name in ["ex1", "ex6"] {
        let b = example(name)?;
        let t = &b.steps[0];
        let (s0, s1) = (b.test_spinors[0].clone(), apply_forward(t, &b.test_spinors[1])?);
        let psi = move |x: f64, n: usize| s0.native_jet(x, n);
        let phi = move |x: f64, n: usize| s1.native_jet(x, n);
        let r = superalgebra_residual(t, &psi, &phi, b.grid())?;
        out.push(r.with_example(name));
    }
    Ok(out)
}

pub fn verify(a: VerifyArgs) -> Result<()> {
    let names: Vec<&str> = match &a.example {
        Some(n) => vec![n.as_str()],
        None => EXAMPLE_NAMES.to_vec(),
    };
    let run = |name: &str| -> Result<Vec<ResidualReport>> {
        let b = example(name)?;
        let mut reports = catalog::verify_bundle(&b)?;
        if let Some(tol) = a.tol {
            let fresh = check_bundle(&b, b.grid(), tol)?;
            reports.retain(|r| !r.check.starts_with("closed-form"));
            reports.splice(0..0, fresh);
        }
        Ok(reports)
    };
    let per_example: Vec<Result<Vec<ResidualReport>>> = std::thread::scope(|s| {
        let handles: Vec<_> = names.iter().map(|n| s.spawn(move || run(n))).collect();
        handles.into_iter().map(|h| h.join().expect("verification thread panicked")).collect()
    });
    let mut reports = Vec::new();
    for r in per_example {
        reports.extend(r?);
    }
    if a.all {
        reports.extend(global_suites()?);
    }
    let mut text = String::from("check,example,max_residual,tolerance,status\n");
    for r in &reports {
        text.push_str(&r.csv_line());
        text.push('\n');
    }
    emit(&text, a.out.as_deref())?;
    let failed = reports.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(CliError::Failed { failed, total: reports.len() });
    }
    Ok(())
}

pub fn figure(a: FigureArgs) -> Result<()> {
    let f = figure_data(a.n, a.variant.as_deref())?;
    emit_table(&f, a.out.as_deref())
}

pub fn reduce(a: ReduceArgs) -> Result<()> {
    let b = example(&a.example)?;
    let (v1, reports) = if let Some(step) = &b.pseudoscalar {
        (step.potential.clone(), susy_diagram_check(step, b.grid())?.checks)
    } else if let Some(step) = &b.scalar {
        (step.potential.clone(), scalar_reduction_check(step, b.grid())?)
    } else {
        return Err(CliError::Usage(format!("{} has no pseudoscalar or scalar step", b.name)));
    };
    let (p0, p1) = (schrodinger_pair(&b.seed)?, schrodinger_pair(&v1)?);
    let xs = grid_or_default(a.output.grid.as_deref(), &v1)?;
    let rows = xs
        .iter()
        .map(|&x| Ok(vec![x, p0.u_plus.value(x)?, p0.u_minus.value(x)?, p1.u_plus.value(x)?, p1.u_minus.value(x)?]))
        .collect::<darboux_core::Result<_>>()?;
    let columns = ["x", "U0_plus", "U0_minus", "U1_plus", "U1_minus"].map(String::from).to_vec();
    emit_table(&FigureData { columns, rows }, a.output.out.as_deref())?;
    eprintln!("energy shift {}", fmt_sig(p1.shift));
    let mut failed = 0;
    for r in &reports {
        eprintln!("{}", r.clone().with_example(b.name.clone()).csv_line());
        failed += usize::from(!r.pass);
    }
    if failed > 0 {
        return Err(CliError::Failed { failed, total: reports.len() });
    }
    Ok(())
}
