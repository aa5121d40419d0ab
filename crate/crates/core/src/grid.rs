//! Grid evaluation with an optional rayon backend.

use crate::error::Result;

/// Evaluates `f` at every grid point, in parallel when the `parallel`
/// feature is enabled. Output order matches `xs`.
pub fn map_grid<T, F>(xs: &[f64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        xs.par_iter().map(|&x| f(x)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_grid_seq(xs, f)
    }
}

/// Sequential reference path.
pub fn map_grid_seq<T, F>(xs: &[f64], f: F) -> Vec<T>
where
    F: Fn(f64) -> T,
{
    xs.iter().map(|&x| f(x)).collect()
}

/// Fallible grid map; the first error in grid order wins.
pub fn try_map_grid<T, F>(xs: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync + Send,
{
    map_grid(xs, f).into_iter().collect()
}

/// Largest value of `f` on the grid and where it occurs. NaN counts as +inf.
pub fn max_on_grid<F>(xs: &[f64], f: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    let vals = try_map_grid(xs, f)?;
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for (&x, &v) in xs.iter().zip(&vals) {
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v > best.0 {
            best = (v, x);
        }
    }
    Ok(best)
}
