//! Semimetric validation on finite spaces.
//!
//! On a finite space with positive weights any symmetric function is
//! measurable and separable, so admissibility reduces to the semimetric
//! axioms. Zero distance between distinct points is allowed.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::scalar::Scalar;

const METRIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MetricViolation {
    Negative { i: usize, j: usize },
    Asymmetric { i: usize, j: usize },
    NonzeroDiagonal { i: usize },
    /// `d(i, k) > d(i, j) + d(j, k)`.
    Triangle { i: usize, j: usize, k: usize },
}

impl std::fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Negative { i, j } => write!(f, "negative distance at ({i},{j})"),
            Self::Asymmetric { i, j } => write!(f, "asymmetric pair ({i},{j})"),
            Self::NonzeroDiagonal { i } => write!(f, "nonzero diagonal at {i}"),
            Self::Triangle { i, j, k } => write!(f, "triangle violation ({i},{j},{k})"),
        }
    }
}

/// Lists every semimetric violation; empty means valid.
///
/// Triangle triples are reported once per unordered endpoint pair (`i < k`).
pub fn validate_metric<T: Scalar>(values: &Kernel<T>) -> Result<Vec<MetricViolation>> {
    let (n, m) = values.shape();
    if n != m {
        return Err(Error::NotSquare { rows: n, cols: m });
    }
    let tol = T::tol(METRIC_TOL);
    let d = |i, j| values.get(i, j);
    let mut out = Vec::new();
    for i in 0..n {
        if d(i, i).abs() > tol {
            out.push(MetricViolation::NonzeroDiagonal { i });
        }
        for j in 0..n {
            if d(i, j) < -tol {
                out.push(MetricViolation::Negative { i, j });
            }
            if i < j && (d(i, j) - d(j, i)).abs() > tol {
                out.push(MetricViolation::Asymmetric { i, j });
            }
        }
    }
    for i in 0..n {
        for k in i + 1..n {
            for j in 0..n {
                if j != i && j != k && d(i, k) > d(i, j) + d(j, k) + tol {
                    out.push(MetricViolation::Triangle { i, j, k });
                }
            }
        }
    }
    Ok(out)
}

/// A kernel that has passed [`validate_metric`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricMatrix<T>(Kernel<T>);

impl<T: Scalar> MetricMatrix<T> {
    pub fn new(values: Kernel<T>) -> Result<Self> {
        let violations = validate_metric(&values)?;
        if let Some(v) = violations.first() {
            return Err(Error::InvalidParameter(format!(
                "not a semimetric: {v} ({} violations)",
                violations.len()
            )));
        }
        Ok(Self(values))
    }

    pub fn kernel(&self) -> &Kernel<T> {
        &self.0
    }

    pub fn into_kernel(self) -> Kernel<T> {
        self.0
    }
}

impl<T> Deref for MetricMatrix<T> {
    type Target = Kernel<T>;

    fn deref(&self) -> &Kernel<T> {
        &self.0
    }
}

/// `d(i, j) = min(|i − j|, n − |i − j|)`, the cycle metric on `ℤ_n`.
pub fn circulant_metric<T: Scalar>(n: usize) -> Kernel<T> {
    Kernel::from_fn(n, n, |i, j| {
        let d = i.abs_diff(j);
        T::from_usize(d.min(n - d)).expect("small integer")
    })
}
