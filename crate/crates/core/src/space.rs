use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A finite probability space: strictly positive point masses summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSpace<T> {
    weights: Vec<T>,
    original_sum: T,
}

impl<T: Scalar> DiscreteSpace<T> {
    /// Normalizes `weights` to total mass one. The input sum is kept for
    /// reporting, so count data can be passed directly.
    pub fn new(weights: &[T]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        for (i, w) in weights.iter().enumerate() {
            if !w.is_finite_value() {
                return Err(Error::NonFinite(i));
            }
            if *w <= T::zero() {
                return Err(Error::NonPositiveWeight(i));
            }
        }
        let total: T = weights.iter().copied().sum();
        Ok(Self {
            weights: weights.iter().map(|&w| w / total).collect(),
            original_sum: total,
        })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform space needs at least one point");
        let w = T::one() / T::from_usize(n).expect("size fits the scalar type");
        Self {
            weights: vec![w; n],
            original_sum: T::one(),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> T {
        self.weights[i]
    }

    pub fn original_sum(&self) -> T {
        self.original_sum
    }

    /// Mass of an index set.
    pub fn measure<I: IntoIterator<Item = usize>>(&self, idx: I) -> T {
        idx.into_iter().map(|i| self.weights[i]).sum()
    }

    /// Weighted sum `Σ v(i) μ(i)`.
    pub fn integrate(&self, v: &[T]) -> T {
        debug_assert_eq!(v.len(), self.len());
        v.iter().zip(&self.weights).map(|(&a, &w)| a * w).sum()
    }

    /// Pointwise equality of the two measures within `tol`.
    pub fn same_measure(&self, other: &Self, tol: T) -> bool {
        self.len() == other.len()
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(&a, &b)| (a - b).abs() <= tol)
    }

    /// The same space with points relabeled: new point `k` is old point `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            weights: perm.iter().map(|&p| self.weights[p]).collect(),
            original_sum: self.original_sum,
        }
    }
}

/// Validating constructor.
pub fn make_space<T: Scalar>(weights: &[T]) -> Result<DiscreteSpace<T>> {
    DiscreteSpace::new(weights)
}
