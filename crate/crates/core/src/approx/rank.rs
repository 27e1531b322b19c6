use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::scalar::Real;
use crate::space::DiscreteSpace;
use crate::thickness::tau_distance;

/// `Σ φ_k ⊗ ψ_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteRankFunction<T> {
    pub terms: Vec<(Vec<T>, Vec<T>)>,
}

impl<T: Real> FiniteRankFunction<T> {
    pub fn new(terms: Vec<(Vec<T>, Vec<T>)>) -> Result<Self> {
        let Some((p0, q0)) = terms.first() else {
            return Err(Error::Empty);
        };
        for (phi, psi) in &terms {
            if phi.len() != p0.len() || psi.len() != q0.len() {
                return Err(Error::ShapeMismatch {
                    expected: (p0.len(), q0.len()),
                    actual: (phi.len(), psi.len()),
                });
            }
            if let Some(k) = phi.iter().chain(psi).position(|v| !v.is_finite_value()) {
                return Err(Error::NonFinite(k));
            }
        }
        Ok(FiniteRankFunction { terms })
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn eval(&self) -> Kernel<T> {
        let (rows, cols) = (self.terms[0].0.len(), self.terms[0].1.len());
        Kernel::from_fn(rows, cols, |i, j| {
            self.terms.iter().map(|(phi, psi)| phi[i] * psi[j]).sum()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankFit<T> {
    pub function: FiniteRankFunction<T>,
    pub singular_values: Vec<T>,
    pub tau: T,
}

/// Truncated singular decomposition of `f` in `L²(μ) ⊗ L²(ν)`, keeping
/// the `r` largest terms, with the exact τ to `f`.
pub fn finite_rank_fit<T: Real>(
    f: &Kernel<T>,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
    r: usize,
) -> Result<RankFit<T>> {
    f.check_spaces(x, y)?;
    let (n, m) = f.shape();
    if r == 0 || r > n.min(m) {
        return Err(Error::InvalidParameter(format!(
            "rank {r} out of range 1..={}",
            n.min(m)
        )));
    }
    let sx: Vec<f64> = x.weights().iter().map(|w| w.to_f64_lossy().sqrt()).collect();
    let sy: Vec<f64> = y.weights().iter().map(|w| w.to_f64_lossy().sqrt()).collect();
    let a = DMatrix::from_fn(n, m, |i, j| sx[i] * f.get(i, j).to_f64_lossy() * sy[j]);
    let svd = a.svd(true, true);
    let u = svd.u.as_ref().ok_or_else(|| Error::Solver("SVD without U".into()))?;
    let vt = svd.v_t.as_ref().ok_or_else(|| Error::Solver("SVD without V".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&p, &q| {
        svd.singular_values[q]
            .partial_cmp(&svd.singular_values[p])
            .expect("finite singular values")
    });
    let terms = order[..r]
        .iter()
        .map(|&k| {
            let s = svd.singular_values[k];
            let phi = (0..n).map(|i| T::lit(s * u[(i, k)] / sx[i])).collect();
            let psi = (0..m).map(|j| T::lit(vt[(k, j)] / sy[j])).collect();
            (phi, psi)
        })
        .collect();
    let function = FiniteRankFunction::new(terms)?;
    let tau = tau_distance(f, &function.eval(), x, y)?.value;
    Ok(RankFit {
        function,
        singular_values: order.iter().map(|&k| T::lit(svd.singular_values[k])).collect(),
        tau,
    })
}
