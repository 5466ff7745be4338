//! Norm specifications and evaluation.
//!
//! Covers the three classical `ℓp` norms, norms whose unit ball is the
//! symmetric convex hull of a finite generator set, and the simplex-fan
//! norm whose ball is `conv{±e_0, …, ±e_d}` with `e_0 = -Σ e_i`. The
//! polytopal case is evaluated by a small LP; the simplex-fan case has a
//! closed form via a median.

use serde::{Deserialize, Serialize};

use crate::numerics::{min_l1_combination, LpStatus, Matrix};
use crate::Error;

/// A norm on `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NormSpec {
    L1,
    L2,
    Linf,
    /// Unit ball `conv{±g_1, …, ±g_m}`; the generators must span the space
    /// or evaluation can fail with [`Error::Unrepresentable`].
    Polytopal(Vec<Vec<f64>>),
    /// Unit ball `conv{±e_0, …, ±e_d}` in dimension `d`, `e_0 = -Σ e_i`.
    SimplexFan(usize),
}

impl NormSpec {
    /// Short stable name used in reports and CSV output.
    pub fn kind(&self) -> &'static str {
        match self {
            NormSpec::L1 => "l1",
            NormSpec::L2 => "l2",
            NormSpec::Linf => "linf",
            NormSpec::Polytopal(_) => "polytopal",
            NormSpec::SimplexFan(_) => "simplex_fan",
        }
    }

    /// Evaluates the norm of `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64, Error> {
        match self {
            NormSpec::L1 => Ok(x.iter().map(|v| v.abs()).sum()),
            NormSpec::L2 => Ok(x.iter().map(|v| v * v).sum::<f64>().sqrt()),
            NormSpec::Linf => Ok(x.iter().fold(0.0_f64, |a, &v| a.max(v.abs()))),
            NormSpec::Polytopal(generators) => {
                let d = generators.first().map_or(0, Vec::len);
                if x.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, got: x.len() });
                }
                let a = Matrix::from_columns(generators);
                let sol = min_l1_combination(&a, x)?;
                match sol.status {
                    LpStatus::Optimal => Ok(sol.objective),
                    _ => Err(Error::Unrepresentable),
                }
            }
            NormSpec::SimplexFan(d) => {
                if x.len() != *d {
                    return Err(Error::DimensionMismatch { expected: *d, got: x.len() });
                }
                Ok(simplex_fan_norm(x))
            }
        }
    }

    /// The generator set `{e_0, …, e_d}` of the simplex-fan ball.
    pub fn simplex_fan_generators(d: usize) -> Vec<Vec<f64>> {
        let mut gens = vec![vec![-1.0; d]];
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            gens.push(e);
        }
        gens
    }
}

/// Simplex-fan norm of `x`: representations of `x` over `{e_0, …, e_d}`
/// are exactly `a_i = b_i - t` with `b = (0, x_1, …, x_d)`, so the norm
/// is `min_t Σ |b_i - t|`, attained at a median of the `b_i`.
fn simplex_fan_norm(x: &[f64]) -> f64 {
    let mut b = Vec::with_capacity(x.len() + 1);
    b.push(0.0);
    b.extend_from_slice(x);
    b.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let t = b[(b.len() - 1) / 2]; // lower median
    b.iter().map(|v| (v - t).abs()).sum()
}

/// Standard inner product.
pub fn dual_pairing(x: &[f64], y: &[f64]) -> Result<f64, Error> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    Ok(x.iter().zip(y).map(|(a, b)| a * b).sum())
}
