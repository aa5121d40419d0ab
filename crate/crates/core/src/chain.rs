//! n-step transformations through block Wronskians.
//!
//! For spinors `s₁ … s₂ₙ = f₁, g₁, …, fₙ, gₙ` the block Wronskian `W` has
//! rows `(s⁽ʲ⁾)₁, (s⁽ʲ⁾)₂` for `j = 0 … n−1`. `W₁`, `W₂` append a column `ψ`
//! and a row of n-th derivatives of first (resp. second) components.
//! `R₁`, `Q₂` replace row `2n−1` by n-th derivatives of first (resp. second)
//! components, `R₂`, `Q₁` replace row `2n` by second (resp. first).
//! Then `pₙ = p₀ + (Q₁+Q₂)/W`, `qₙ = q₀ + (R₂−R₁)/W`, `L ψ = (W₁, W₂)/W`.

use std::collections::HashSet;

use crate::darboux::{apply_forward, build_transform, TransformFunction};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::jet::Jet;
use crate::linalg::{lu_det, SpinorJet, Vec2};
use crate::potential::Potential;
use crate::spinor::{find_nodes, EigenSpinor, NODE_SCAN_POINTS};

/// Default cap on the number of steps.
pub const DEFAULT_MAX_DEPTH: usize = 4;

/// Ordered transformation-function pairs `(fᵢ, gᵢ)`, all solutions of `h₀`.
#[derive(Clone, Debug)]
pub struct ChainSpec {
    steps: Vec<(EigenSpinor, EigenSpinor)>,
    parent: Potential,
}

impl ChainSpec {
    pub fn new(steps: Vec<(EigenSpinor, EigenSpinor)>) -> Result<Self> {
        ChainSpec::with_max_depth(steps, DEFAULT_MAX_DEPTH)
    }

    pub fn with_max_depth(steps: Vec<(EigenSpinor, EigenSpinor)>, max_depth: usize) -> Result<Self> {
        let parent = steps.first().ok_or_else(|| Error::InvalidParameter("empty chain".into()))?.0.parent().clone();
        if steps.len() > max_depth {
            return Err(Error::DepthExceeded { depth: steps.len(), max: max_depth });
        }
        let mut seen = HashSet::new();
        for (f, g) in &steps {
            if !f.parent().same(&parent) || !g.parent().same(&parent) {
                return Err(Error::ParentMismatch);
            }
            if f.energy() == g.energy() {
                return Err(Error::EqualEigenvalues(f.energy()));
            }
            for e in [f.energy(), g.energy()] {
                if !seen.insert(e.to_bits()) {
                    return Err(Error::RepeatedEigenvalue(e));
                }
            }
        }
        let spec = ChainSpec { steps, parent };
        let spinors = spec.spinors();
        let w = spec.parent.interval();
        let mut nodes = find_nodes(|x| block_wronskian(&spinors, x), w, NODE_SCAN_POINTS)?;
        for x in w.linspace(NODE_SCAN_POINTS) {
            if !block_wronskian(&spinors, x)?.is_finite() {
                nodes.push(x);
            }
        }
        if !nodes.is_empty() {
            return Err(Error::DegenerateOnGrid { nodes });
        }
        Ok(spec)
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn parent(&self) -> &Potential {
        &self.parent
    }

    pub fn steps(&self) -> &[(EigenSpinor, EigenSpinor)] {
        &self.steps
    }

    /// `f₁, g₁, …, fₙ, gₙ`.
    pub fn spinors(&self) -> Vec<EigenSpinor> {
        self.steps.iter().flat_map(|(f, g)| [f.clone(), g.clone()]).collect()
    }

    pub fn eigenvalues(&self) -> Vec<(f64, f64)> {
        self.steps.iter().map(|(f, g)| (f.energy(), g.energy())).collect()
    }
}

fn check_even(spinors: &[EigenSpinor]) -> Result<usize> {
    if spinors.is_empty() || !spinors.len().is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("need an even, non-empty spinor list, got {}", spinors.len())));
    }
    Ok(spinors.len() / 2)
}

/// Jets of all derivative entries: `entry[s][j][c]` is the jet (order `r`) of
/// `(s⁽ʲ⁾)_c` for `j = 0 … n`.
fn entry_jets(spinors: &[EigenSpinor], n: usize, x: f64, r: usize) -> Result<Vec<Vec<SpinorJet>>> {
    spinors
        .iter()
        .map(|s| {
            let j = s.jet(x, n + r)?;
            Ok((0..=n).map(|d| [j[0].nth_derivative(d).truncate(r), j[1].nth_derivative(d).truncate(r)]).collect())
        })
        .collect()
}

/// The `2n` base rows plus the two n-th derivative rows.
struct Rows {
    base: Vec<Vec<Jet>>,
    nth: [Vec<Jet>; 2],
}

fn base_rows(entries: &[Vec<SpinorJet>], n: usize) -> Vec<Vec<Jet>> {
    let mut base = Vec::with_capacity(2 * n);
    for j in 0..n {
        for c in 0..2 {
            base.push(entries.iter().map(|e| e[j][c].clone()).collect());
        }
    }
    base
}

fn rows(entries: &[Vec<SpinorJet>], n: usize) -> Rows {
    let base = base_rows(entries, n);
    let nth = [0, 1].map(|c| entries.iter().map(|e| e[n][c].clone()).collect());
    Rows { base, nth }
}

fn det_jet(m: Vec<Vec<Jet>>) -> Jet {
    lu_det(m).value
}

fn replaced(base: &[Vec<Jet>], row: usize, with: &[Jet]) -> Vec<Vec<Jet>> {
    let mut m = base.to_vec();
    m[row] = with.to_vec();
    m
}

/// Block Wronskian `W(s₁, …, s₂ₙ)`.
pub fn block_wronskian(spinors: &[EigenSpinor], x: f64) -> Result<f64> {
    Ok(block_wronskian_jet(spinors, x, 0)?.value())
}

/// Block Wronskian as a jet of order `r`.
pub fn block_wronskian_jet(spinors: &[EigenSpinor], x: f64, r: usize) -> Result<Jet> {
    let n = check_even(spinors)?;
    let e = entry_jets(spinors, n - 1, x, r)?;
    Ok(det_jet(base_rows(&e, n)))
}

/// Largest-to-smallest pivot ratio of the LU factorization of `W`.
/// Values above [`crate::linalg::PIVOT_RATIO_WARN`] mark an ill-conditioned evaluation.
pub fn conditioning(spinors: &[EigenSpinor], x: f64) -> Result<f64> {
    let n = check_even(spinors)?;
    let e = entry_jets(spinors, n - 1, x, 0)?;
    let m: Vec<Vec<f64>> = base_rows(&e, n).into_iter().map(|r| r.iter().map(Jet::value).collect()).collect();
    Ok(lu_det(m).pivot_ratio)
}

/// `(W₁, W₂)`, the two odd-order determinants with `ψ` as last column.
pub fn odd_wronskians(spinors: &[EigenSpinor], psi: &EigenSpinor, x: f64) -> Result<(f64, f64)> {
    let (a, b) = odd_wronskians_jet(spinors, psi, x, 0)?;
    Ok((a.value(), b.value()))
}

pub fn odd_wronskians_jet(spinors: &[EigenSpinor], psi: &EigenSpinor, x: f64, r: usize) -> Result<(Jet, Jet)> {
    let n = if spinors.is_empty() { 0 } else { check_even(spinors)? };
    let mut all = spinors.to_vec();
    all.push(psi.clone());
    let e = entry_jets(&all, n, x, r)?;
    let rw = rows(&e, n);
    let mut m1 = rw.base.clone();
    m1.push(rw.nth[0].clone());
    let mut m2 = rw.base;
    m2.push(rw.nth[1].clone());
    Ok((det_jet(m1), det_jet(m2)))
}

/// The four row-replaced determinants.
#[derive(Clone, Debug, PartialEq)]
pub struct RowReplaced<T> {
    pub r1: T,
    pub r2: T,
    pub q1: T,
    pub q2: T,
}

pub fn row_replaced_dets(spinors: &[EigenSpinor], x: f64) -> Result<RowReplaced<f64>> {
    let j = row_replaced_jets(spinors, x, 0)?;
    Ok(RowReplaced { r1: j.r1.value(), r2: j.r2.value(), q1: j.q1.value(), q2: j.q2.value() })
}

pub fn row_replaced_jets(spinors: &[EigenSpinor], x: f64, r: usize) -> Result<RowReplaced<Jet>> {
    let n = check_even(spinors)?;
    let e = entry_jets(spinors, n, x, r)?;
    let rw = rows(&e, n);
    let (upper, lower) = (2 * n - 2, 2 * n - 1);
    Ok(RowReplaced {
        r1: det_jet(replaced(&rw.base, upper, &rw.nth[0])),
        r2: det_jet(replaced(&rw.base, lower, &rw.nth[1])),
        q1: det_jet(replaced(&rw.base, lower, &rw.nth[0])),
        q2: det_jet(replaced(&rw.base, upper, &rw.nth[1])),
    })
}

/// `L_{n←0}ψ` at `x`.
pub fn chain_apply(c: &ChainSpec, psi: &EigenSpinor, x: f64) -> Result<Vec2> {
    let (w1, w2) = odd_wronskians(&c.spinors(), psi, x)?;
    let w = block_wronskian(&c.spinors(), x)?;
    Ok([w1 / w, w2 / w])
}

/// `Vₙ` from the determinant formulas.
pub fn chain_potential(c: &ChainSpec) -> Result<Potential> {
    let spinors = c.spinors();
    let v0 = c.parent().clone();
    let n = c.depth();
    let max_order = spinors.iter().map(EigenSpinor::max_order).min().unwrap_or(0).min(v0.max_order().saturating_add(1)).saturating_sub(n);
    let make = |which: usize| {
        let (s, v) = (spinors.clone(), v0.clone());
        ScalarField::new(
            move |x, r| {
                let eval = || -> Result<Jet> {
                    let w = block_wronskian_jet(&s, x, r)?;
                    let d = row_replaced_jets(&s, x, r)?;
                    Ok(match which {
                        0 => v.p().jet(x, r)? + (d.q1 + d.q2) / w,
                        _ => v.q().jet(x, r)? + (d.r2 - d.r1) / w,
                    })
                };
                eval().unwrap_or_else(|_| Jet::constant(f64::NAN, r))
            },
            max_order,
            v0.domain(),
        )
    };
    Potential::new(
        format!("chain{n}[{}]", v0.name()),
        make(0),
        make(1),
        v0.representation(),
        v0.interval(),
        v0.class().mass(),
    )
}

/// `L_{n←0}ψ` as an eigenspinor of `vn`, which must be `chain_potential(c)`.
pub fn chain_apply_spinor(c: &ChainSpec, vn: &Potential, psi: &EigenSpinor) -> Result<EigenSpinor> {
    if !psi.parent().same(c.parent()) {
        return Err(Error::ParentMismatch);
    }
    let (s, ps) = (c.spinors(), psi.clone());
    let max_order = psi.max_order().min(s.iter().map(EigenSpinor::max_order).min().unwrap_or(0)).saturating_sub(c.depth());
    Ok(EigenSpinor::new(vn, psi.energy(), format!("L{}{}", c.depth(), psi.label()), max_order, move |x, r| {
        let w = block_wronskian_jet(&s, x, r)?;
        let (w1, w2) = odd_wronskians_jet(&s, &ps, x, r)?;
        Ok([w1 / &w, w2 / &w])
    }))
}

/// The same chain as `n` consecutive one-step transformations: step `i`
/// uses `fᵢ, gᵢ` mapped through steps `1 … i−1`.
pub fn sequential(c: &ChainSpec) -> Result<Vec<TransformFunction>> {
    let mut out: Vec<TransformFunction> = Vec::with_capacity(c.depth());
    for (f, g) in c.steps() {
        let (mut a, mut b) = (f.clone(), g.clone());
        for t in &out {
            a = apply_forward(t, &a)?;
            b = apply_forward(t, &b)?;
        }
        out.push(build_transform(&a, &b)?);
    }
    Ok(out)
}

/// Maps `ψ` through every step of a sequential chain.
pub fn apply_sequential(steps: &[TransformFunction], psi: &EigenSpinor) -> Result<EigenSpinor> {
    let mut cur = psi.clone();
    for t in steps {
        cur = apply_forward(t, &cur)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darboux::apply_forward;
    use crate::potential::free_mass;
    use approx::assert_relative_eq;

    const M: f64 = 1.0;

    fn kk(e: f64) -> f64 {
        (M * M - e * e).sqrt()
    }

    fn sinh_cosh_pair(v: &Potential, e: f64) -> EigenSpinor {
        let k = kk(e);
        EigenSpinor::closed_form(v, e, format!("sc{e}"), move |x| {
            let (s, c) = x.scale(k).sinh_cosh();
            [s.scale(k / (e - M)), c]
        })
    }

    fn decaying(v: &Potential, e: f64) -> EigenSpinor {
        let k = kk(e);
        EigenSpinor::closed_form(v, e, format!("d{e}"), move |x| {
            let ex = x.scale(-k).exp();
            [ex.scale(-k / (e - M)), ex]
        })
    }

    fn soliton_seeds() -> (Potential, EigenSpinor, EigenSpinor) {
        let v = free_mass(M);
        let u1 = EigenSpinor::constant(&v, M, "u1", [1.0, 0.0]);
        let u2 = sinh_cosh_pair(&v, 0.5);
        (v, u1, u2)
    }

    #[test]
    fn n1_wronskian_is_cosh() {
        let (_, u1, u2) = soliton_seeds();
        let k = kk(0.5);
        for x in [-2.0, 0.0, 1.0] {
            assert_relative_eq!(block_wronskian(&[u1.clone(), u2.clone()], x).unwrap(), (k * x).cosh(), epsilon = 1e-13);
            let r = row_replaced_dets(&[u1.clone(), u2.clone()], x).unwrap();
            assert_relative_eq!(r.r1 + r.r2, k * (k * x).sinh(), epsilon = 1e-13);
        }
        assert_eq!(block_wronskian(&[u2.clone(), u2.clone()], 0.4).unwrap(), 0.0);
    }

    #[test]
    fn odd_wronskians_vanish_on_repeated_column() {
        let (_, u1, u2) = soliton_seeds();
        let (a, b) = odd_wronskians(&[u1.clone(), u2.clone()], &u2, 0.7).unwrap();
        assert_eq!((a, b), (0.0, 0.0));
    }

    #[test]
    fn n1_chain_matches_single_step() {
        let (v, u1, u2) = soliton_seeds();
        let c = ChainSpec::new(vec![(u1.clone(), u2.clone())]).unwrap();
        let t = build_transform(&u1, &u2).unwrap();
        let psi = decaying(&v, 0.3);
        let phi = apply_forward(&t, &psi).unwrap();
        let vn = chain_potential(&c).unwrap();
        for x in [-3.0, 0.2, 4.0] {
            let a = chain_apply(&c, &psi, x).unwrap();
            let b = phi.value(x).unwrap();
            assert_relative_eq!(a[0], b[0], epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(a[1], b[1], epsilon = 1e-12, max_relative = 1e-12);
            let (p, q) = vn.pq(x).unwrap();
            let (p1, q1) = t.transformed_potential().pq(x).unwrap();
            assert_relative_eq!(p, p1, epsilon = 1e-12);
            assert_relative_eq!(q, q1, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_soliton_chain_value() {
        let (v, u1, u2) = soliton_seeds();
        let f2 = sinh_cosh_pair(&v, -0.5);
        let g2 = decaying(&v, 0.3);
        let c = ChainSpec::new(vec![(u1, u2), (f2, g2)]).unwrap();
        let vn = chain_potential(&c).unwrap();
        let (k, k1) = (kk(0.5), kk(0.3));
        assert_relative_eq!(vn.q().value(0.0).unwrap(), (k * k - k1 * k1) / k1, epsilon = 1e-12);
        assert_relative_eq!(vn.q().value(0.0).unwrap(), -0.1677256, epsilon = 1e-7);
        assert_relative_eq!(vn.p().value(1.3).unwrap(), -0.3, epsilon = 1e-12);
    }

    #[test]
    fn spec_validation() {
        let (v, u1, u2) = soliton_seeds();
        let again = sinh_cosh_pair(&v, 0.5);
        let g = decaying(&v, 0.3);
        assert!(matches!(
            ChainSpec::new(vec![(u1.clone(), u2.clone()), (again, g.clone())]),
            Err(Error::RepeatedEigenvalue(_))
        ));
        let many: Vec<_> = (0..5).map(|_| (u1.clone(), u2.clone())).collect();
        assert!(matches!(ChainSpec::with_max_depth(many, 4), Err(Error::DepthExceeded { depth: 5, max: 4 })));
        assert!(matches!(ChainSpec::new(vec![(g.clone(), g.scaled(2.0))]), Err(Error::EqualEigenvalues(_))));
    }

    #[test]
    fn constant_spinors_give_zero_replaced_rows() {
        let v = crate::potential::zero_potential();
        let a = EigenSpinor::constant(&v, 0.0, "a", [1.0, 0.0]);
        let b = EigenSpinor::constant(&v, 0.0, "b", [0.0, 1.0]);
        let r = row_replaced_dets(&[a, b], 0.3).unwrap();
        assert_eq!((r.r1, r.r2, r.q1, r.q2), (0.0, 0.0, 0.0, 0.0));
    }
}
