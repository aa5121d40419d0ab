use std::io::Write;
use std::path::Path;

use super::{example_with, fmt_sig};
use crate::error::{Error, Result};
use crate::field::linspace;

pub const FIGURE_NUMBERS: [u32; 4] = [2, 3, 4, 5];

/// A plotted table: one `x` column followed by one column per curve.
#[derive(Clone, Debug, PartialEq)]
pub struct FigureData {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FigureData {
    fn from_curves(x_name: &str, xs: &[f64], curves: Vec<(String, Vec<f64>)>) -> Self {
        let mut columns = vec![x_name.to_string()];
        columns.extend(curves.iter().map(|(n, _)| n.clone()));
        let rows = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| std::iter::once(x).chain(curves.iter().map(|(_, c)| c[i])).collect())
            .collect();
        FigureData { columns, rows }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| fmt_sig(*v))).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let s = self.to_csv()?;
        let mut f = std::fs::File::create(path).map_err(|e| Error::Io(e.to_string()))?;
        f.write_all(s.as_bytes()).map_err(|e| Error::Io(e.to_string()))
    }
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize + 1;
    linspace(lo, hi, n)
}

fn sample_q(name: &str, overrides: &[(&str, f64)], xs: &[f64]) -> Result<Vec<f64>> {
    let b = example_with(name, overrides)?;
    xs.iter().map(|&x| b.computed.q().value(x)).collect()
}

/// Table for figure `n`. Figure 2 accepts the variant `"swapped"`, which reads
/// the caption's energies the other way round and is rejected.
pub fn figure_data(n: u32, variant: Option<&str>) -> Result<FigureData> {
    match (n, variant) {
        (2, None) => {
            let xs = grid(-20.0, 20.0, 0.05);
            let a = sample_q("ex4", &[("eps", 0.5), ("eps1", 0.45), ("B", 1.5)], &xs)?;
            let b = sample_q("ex4", &[("eps", 0.5), ("eps1", 0.3), ("B", 1.000005)], &xs)?;
            Ok(FigureData::from_curves("x", &xs, vec![("q_B1.5_eps1_0.45".into(), a), ("q_B1.000005_eps1_0.3".into(), b)]))
        }
        (2, Some("swapped")) => {
            let xs = grid(-20.0, 20.0, 0.05);
            sample_q("ex4", &[("eps", 0.45), ("eps1", 0.5), ("B", 1.5)], &xs)?;
            unreachable!("the swapped reading is outside the regular range")
        }
        (3, None) => {
            let xs = grid(-6.0, 6.0, 0.05);
            let a = sample_q("ex8", &[("B", 1.0002)], &xs)?;
            let b = sample_q("ex8", &[("B", 1.2)], &xs)?;
            let base = xs.iter().map(|x| x / 2.0).collect();
            Ok(FigureData::from_curves(
                "x",
                &xs,
                vec![("q_B1.0002".into(), a), ("q_B1.2".into(), b), ("x_over_2".into(), base)],
            ))
        }
        (4, None) => {
            let xs = grid(-15.0, 15.0, 0.05);
            let s = |l1: f64| -> Result<Vec<f64>> {
                let b = example_with("ex10", &[("lambda", 0.6), ("lambda1", l1)])?;
                let m = b.param("m").unwrap_or(1.0);
                xs.iter().map(|&x| Ok(b.computed.q().value(x)? - m)).collect()
            };
            Ok(FigureData::from_curves("x", &xs, vec![("S2_lambda1_0.58".into(), s(0.58)?), ("S2_lambda1_0.2".into(), s(0.2)?)]))
        }
        (5, None) => {
            let rs = grid(0.1, 12.0, 0.05);
            let b = example_with("ex11", &[("m", 1.0), ("alpha", 1.0), ("k", 4.0)])?;
            let s2 = rs.iter().map(|&r| Ok(b.expected.q().value(r)? - 1.0)).collect::<Result<_>>()?;
            let s0 = rs.iter().map(|r| -1.0 / r).collect();
            Ok(FigureData::from_curves("r", &rs, vec![("S2_k4".into(), s2), ("S0".into(), s0)]))
        }
        (n, Some(v)) => Err(Error::InvalidParameter(format!("figure {n} has no variant `{v}`"))),
        (n, None) => Err(Error::InvalidParameter(format!("no figure {n}; available: {FIGURE_NUMBERS:?}"))),
    }
}

/// Distance from the origin of the first upward crossing of `q = 0`.
pub fn barrier_width(xs: &[f64], q: &[f64]) -> Option<f64> {
    xs.windows(2).zip(q.windows(2)).find_map(|(x, y)| {
        (y[0] < 0.0 && y[1] >= 0.0).then(|| (x[0] - y[0] * (x[1] - x[0]) / (y[1] - y[0])).abs())
    })
}

/// `sup |q − x/2|` over the figure grid.
pub fn fig3_deviation(xs: &[f64], q: &[f64]) -> f64 {
    xs.iter().zip(q).map(|(x, q)| (q - x / 2.0).abs()).fold(0.0, f64::max)
}

/// Distance between the outermost interior local minima of a sampled curve.
pub fn fig4_well_separation(xs: &[f64], s: &[f64]) -> Option<f64> {
    let minima: Vec<f64> = (1..s.len() - 1).filter(|&i| s[i] < s[i - 1] && s[i] <= s[i + 1]).map(|i| xs[i]).collect();
    match (minima.first(), minima.last()) {
        (Some(a), Some(b)) if minima.len() >= 2 => Some(b - a),
        _ => None,
    }
}
