use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::check_dims;
use crate::scalar::Scalar;
use crate::space::DiscreteSpace;

/// Sparse, possibly signed measure on `X × Y`.
///
/// Entries are kept sorted by `(row, col)` with unique keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanMeasure<T> {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, T)>,
    signed: bool,
}

impl<T: Scalar> PlanMeasure<T> {
    pub fn new(
        rows: usize,
        cols: usize,
        mut entries: Vec<(usize, usize, T)>,
        signed: bool,
    ) -> Result<Self> {
        entries.sort_by_key(|&(i, j, _)| (i, j));
        for w in entries.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(Error::DuplicateEntry(w[0].0, w[0].1));
            }
        }
        for &(i, j, m) in &entries {
            if i >= rows || j >= cols {
                return Err(Error::IndexOutOfRange(i, j));
            }
            if !m.is_finite_value() {
                return Err(Error::NonFinite(i * cols + j));
            }
            if !signed && m < T::zero() {
                return Err(Error::NegativeMass(i, j));
            }
        }
        Ok(Self {
            rows,
            cols,
            entries,
            signed,
        })
    }

    /// Builds a plan by summing masses that share a cell; zero totals are dropped.
    pub fn accumulate(
        rows: usize,
        cols: usize,
        items: impl IntoIterator<Item = (usize, usize, T)>,
        signed: bool,
    ) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), T> = BTreeMap::new();
        for (i, j, m) in items {
            *acc.entry((i, j)).or_insert_with(T::zero) += m;
        }
        let entries = acc
            .into_iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|((i, j), m)| (i, j, m))
            .collect();
        Self::new(rows, cols, entries, signed)
    }

    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: Vec::new(),
            signed: false,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[(usize, usize, T)] {
        &self.entries
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|e| e.2 >= T::zero())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mass(&self, i: usize, j: usize) -> T {
        self.entries
            .binary_search_by_key(&(i, j), |&(a, b, _)| (a, b))
            .map_or(T::zero(), |k| self.entries[k].2)
    }

    /// Signed total mass.
    pub fn total_mass(&self) -> T {
        self.entries.iter().map(|e| e.2).sum()
    }

    /// `rowVar(i) = Σ_j |mass(i, j)|`.
    pub fn row_var(&self) -> Vec<T> {
        let mut v = vec![T::zero(); self.rows];
        for &(i, _, m) in &self.entries {
            v[i] += m.abs();
        }
        v
    }

    /// `colVar(j) = Σ_i |mass(i, j)|`.
    pub fn col_var(&self) -> Vec<T> {
        let mut v = vec![T::zero(); self.cols];
        for &(_, j, m) in &self.entries {
            v[j] += m.abs();
        }
        v
    }

    pub fn scale(&self, c: T) -> Self {
        let entries = self
            .entries
            .iter()
            .filter(|_| !c.is_zero())
            .map(|&(i, j, m)| (i, j, m * c))
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
            signed: self.signed || c < T::zero(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                actual: other.shape(),
            });
        }
        Self::accumulate(
            self.rows,
            self.cols,
            self.entries.iter().chain(&other.entries).copied(),
            self.signed || other.signed,
        )
    }

    pub fn check_spaces(&self, x: &DiscreteSpace<T>, y: &DiscreteSpace<T>) -> Result<()> {
        check_dims(self.shape(), x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanClass {
    Bistochastic,
    Submultistochastic,
    AlmostBistochastic,
    General,
}

impl std::fmt::Display for PlanClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PlanClass::Bistochastic => "bistochastic",
            PlanClass::Submultistochastic => "submultistochastic",
            PlanClass::AlmostBistochastic => "almost-bistochastic",
            PlanClass::General => "general",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport<T> {
    pub class: PlanClass,
    pub row_marginal: Vec<T>,
    pub col_marginal: Vec<T>,
}

const MARGINAL_TOL: f64 = 1e-10;

/// Classifies a nonnegative plan by comparing its marginals with `μ` and `ν`.
///
/// Checked in order: equal marginals, dominated marginals, marginals
/// positive everywhere; otherwise general.
pub fn plan_class<T: Scalar>(
    lam: &PlanMeasure<T>,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
) -> Result<PlanReport<T>> {
    lam.check_spaces(x, y)?;
    if lam.is_signed() || !lam.is_nonnegative() {
        return Err(Error::SignedPlan);
    }
    let tol = T::tol(MARGINAL_TOL);
    let row = lam.row_var();
    let col = lam.col_var();
    let eq = |m: &[T], w: &[T]| m.iter().zip(w).all(|(&a, &b)| (a - b).abs() <= tol);
    let le = |m: &[T], w: &[T]| m.iter().zip(w).all(|(&a, &b)| a <= b + tol);
    let pos = |m: &[T]| m.iter().all(|&a| a > T::zero());
    let class = if eq(&row, x.weights()) && eq(&col, y.weights()) {
        PlanClass::Bistochastic
    } else if le(&row, x.weights()) && le(&col, y.weights()) {
        PlanClass::Submultistochastic
    } else if pos(&row) && pos(&col) {
        PlanClass::AlmostBistochastic
    } else {
        PlanClass::General
    };
    Ok(PlanReport {
        class,
        row_marginal: row,
        col_marginal: col,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanKind {
    /// Mass `μ(i)` at `(i, i)`.
    Diagonal,
    /// Mass `μ(i)` at `(i, σ(i))`.
    Permutation(Vec<usize>),
    /// Product measure `μ ⊗ ν`.
    Product,
    /// On `X = Y = {0..n}²` indexed `u * n + v`: couples points on the same
    /// vertical line `u`, independently within the line.
    VerticalLine(usize),
}

/// Generators for the named bistochastic plans.
pub fn gen_plan<T: Scalar>(
    kind: &PlanKind,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
) -> Result<PlanMeasure<T>> {
    let (r, c) = (x.len(), y.len());
    let tol = T::tol(MARGINAL_TOL);
    match kind {
        PlanKind::Diagonal => {
            if !x.same_measure(y, tol) {
                return Err(Error::InvalidParameter(
                    "diagonal plan requires identical marginals".into(),
                ));
            }
            PlanMeasure::new(r, c, (0..r).map(|i| (i, i, x.weight(i))).collect(), false)
        }
        PlanKind::Permutation(sigma) => {
            if sigma.len() != r || r != c {
                return Err(Error::InvalidParameter(
                    "permutation length must match both spaces".into(),
                ));
            }
            let mut seen = vec![false; c];
            for &s in sigma {
                if s >= c || std::mem::replace(&mut seen[s], true) {
                    return Err(Error::InvalidParameter("sigma is not a permutation".into()));
                }
            }
            // mass μ(i) lands in column σ(i), which must carry ν(σ(i)) = μ(i)
            if sigma
                .iter()
                .enumerate()
                .any(|(i, &s)| (x.weight(i) - y.weight(s)).abs() > tol)
            {
                return Err(Error::InvalidParameter(
                    "permutation does not preserve the measure".into(),
                ));
            }
            PlanMeasure::new(
                r,
                c,
                sigma.iter().enumerate().map(|(i, &s)| (i, s, x.weight(i))).collect(),
                false,
            )
        }
        PlanKind::Product => {
            let mut entries = Vec::with_capacity(r * c);
            for i in 0..r {
                for j in 0..c {
                    entries.push((i, j, x.weight(i) * y.weight(j)));
                }
            }
            PlanMeasure::new(r, c, entries, false)
        }
        PlanKind::VerticalLine(n) => {
            let n = *n;
            if n == 0 || r != n * n || c != n * n {
                return Err(Error::InvalidParameter(format!(
                    "vertical-line plan needs spaces of size n² = {}",
                    n * n
                )));
            }
            let line = |s: &DiscreteSpace<T>, u: usize| -> T {
                (0..n).map(|v| s.weight(u * n + v)).sum()
            };
            let mut entries = Vec::with_capacity(n * n * n);
            for u in 0..n {
                let (px, py) = (line(x, u), line(y, u));
                if (px - py).abs() > tol {
                    return Err(Error::InvalidParameter(format!(
                        "line masses differ on vertical line {u}"
                    )));
                }
                for v in 0..n {
                    for w in 0..n {
                        let m = x.weight(u * n + v) * y.weight(u * n + w) / py;
                        entries.push((u * n + v, u * n + w, m));
                    }
                }
            }
            PlanMeasure::new(r, c, entries, false)
        }
    }
}
