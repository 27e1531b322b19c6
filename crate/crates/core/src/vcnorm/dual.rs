use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::plan::PlanMeasure;
use crate::scalar::Scalar;
use crate::space::DiscreteSpace;

/// Dual norm of a (signed) plan: the larger of the sup-norms of the
/// marginal densities of `|η|` with respect to `μ` and `ν`.
pub fn me_norm<T: Scalar>(
    eta: &PlanMeasure<T>,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
) -> Result<T> {
    eta.check_spaces(x, y)?;
    let rows = eta.row_var();
    let cols = eta.col_var();
    let r = rows
        .iter()
        .zip(x.weights())
        .fold(T::zero(), |m, (&v, &w)| m.max_of(v / w));
    let c = cols
        .iter()
        .zip(y.weights())
        .fold(T::zero(), |m, (&v, &w)| m.max_of(v / w));
    Ok(r.max_of(c))
}

/// `∫ f dη = Σ f(i,j) η(i,j)`.
pub fn pairing<T: Scalar>(f: &Kernel<T>, eta: &PlanMeasure<T>) -> Result<T> {
    if f.shape() != eta.shape() {
        return Err(Error::ShapeMismatch {
            expected: f.shape(),
            actual: eta.shape(),
        });
    }
    Ok(eta.entries().iter().map(|&(i, j, m)| f.get(i, j) * m).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovOutput<T> {
    pub values: Vec<T>,
    /// Rows with zero marginal, mapped to 0.
    pub zero_rows: Vec<usize>,
}

/// Markov operator of a plan: `(U g)(i) = Σ_j λ(i,j) g(j) / rowVar(i)`.
pub fn markov_apply<T: Scalar>(
    lam: &PlanMeasure<T>,
    g: &[T],
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
) -> Result<MarkovOutput<T>> {
    lam.check_spaces(x, y)?;
    if lam.is_signed() || !lam.is_nonnegative() {
        return Err(Error::SignedPlan);
    }
    if g.len() != y.len() {
        return Err(Error::ShapeMismatch {
            expected: (y.len(), 1),
            actual: (g.len(), 1),
        });
    }
    let mut num = vec![T::zero(); x.len()];
    for &(i, j, m) in lam.entries() {
        num[i] += m * g[j];
    }
    let den = lam.row_var();
    let mut zero_rows = Vec::new();
    let values = num
        .into_iter()
        .zip(&den)
        .enumerate()
        .map(|(i, (n, &d))| {
            if d.is_zero() {
                zero_rows.push(i);
                T::zero()
            } else {
                n / d
            }
        })
        .collect();
    Ok(MarkovOutput { values, zero_rows })
}
