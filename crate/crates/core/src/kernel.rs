use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::DiscreteSpace;

/// Dense row-major function on `X × Y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kernel<T> {
    rows: usize,
    cols: usize,
    values: Vec<T>,
}

impl<T: Scalar> Kernel<T> {
    pub fn new(rows: usize, cols: usize, values: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if values.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "{} values for a {rows}x{cols} kernel",
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::NonFinite(k));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidParameter("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(rows > 0 && cols > 0, "kernel dimensions must be positive");
        let mut values = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                values.push(f(i, j));
            }
        }
        Self { rows, cols, values }
    }

    pub fn constant(rows: usize, cols: usize, c: T) -> Self {
        Self::from_fn(rows, cols, |_, _| c)
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.cols + j]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |m, v| m.max_of(v.abs()))
    }

    /// Integral against the product measure.
    pub fn integrate(&self, x: &DiscreteSpace<T>, y: &DiscreteSpace<T>) -> T {
        let mut total = T::zero();
        for i in 0..self.rows {
            let row: T = self
                .row(i)
                .iter()
                .zip(y.weights())
                .map(|(&v, &w)| v * w)
                .sum();
            total += row * x.weight(i);
        }
        total
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                actual: other.shape(),
            });
        }
        Ok(())
    }

    pub fn check_spaces(&self, x: &DiscreteSpace<T>, y: &DiscreteSpace<T>) -> Result<()> {
        check_dims(self.shape(), x, y)
    }

    /// Cast every entry to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Kernel<U> {
        Kernel {
            rows: self.rows,
            cols: self.cols,
            values: self
                .values
                .iter()
                .map(|v| U::from_f64(v.to_f64_lossy()).expect("representable value"))
                .collect(),
        }
    }
}

pub(crate) fn check_dims<T: Scalar>(
    shape: (usize, usize),
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
) -> Result<()> {
    if shape != (x.len(), y.len()) {
        return Err(Error::ShapeMismatch {
            expected: (x.len(), y.len()),
            actual: shape,
        });
    }
    Ok(())
}

/// Boolean mask over `X × Y`; the indicator of a measurable set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellSet {
    rows: usize,
    cols: usize,
    mask: Vec<bool>,
}

impl CellSet {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            mask: vec![false; rows * cols],
        }
    }

    pub fn new(rows: usize, cols: usize, mask: Vec<bool>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if mask.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "{} cells for a {rows}x{cols} set",
                mask.len()
            )));
        }
        Ok(Self { rows, cols, mask })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut mask = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                mask.push(f(i, j));
            }
        }
        Self { rows, cols, mask }
    }

    pub fn from_cells(rows: usize, cols: usize, cells: &[(usize, usize)]) -> Self {
        let mut s = Self::empty(rows, cols);
        for &(i, j) in cells {
            s.insert(i, j);
        }
        s
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

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.cols + j]
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.mask[i * self.cols + j] = true;
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.cols;
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(k, _)| (k / cols, k % cols))
    }

    fn combine(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                actual: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a && b)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.shape() == other.shape() && self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    /// Product measure `(μ×ν)(Z)`.
    pub fn measure<T: Scalar>(&self, x: &DiscreteSpace<T>, y: &DiscreteSpace<T>) -> T {
        self.cells().map(|(i, j)| x.weight(i) * y.weight(j)).sum()
    }

    pub fn indicator<T: Scalar>(&self) -> Kernel<T> {
        Kernel::from_fn(self.rows, self.cols, |i, j| {
            if self.contains(i, j) {
                T::one()
            } else {
                T::zero()
            }
        })
    }

    pub fn check_spaces<T: Scalar>(&self, x: &DiscreteSpace<T>, y: &DiscreteSpace<T>) -> Result<()> {
        check_dims(self.shape(), x, y)
    }
}

/// `{(x, y) : |f − g| > eps}` with strict inequality.
pub fn level_set<T: Scalar>(f: &Kernel<T>, g: &Kernel<T>, eps: T) -> Result<CellSet> {
    f.check_same_shape(g)?;
    if eps < T::zero() {
        return Err(Error::InvalidParameter("eps must be nonnegative".into()));
    }
    Ok(CellSet::from_fn(f.rows(), f.cols(), |i, j| {
        (f.get(i, j) - g.get(i, j)).abs() > eps
    }))
}
