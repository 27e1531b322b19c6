use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::scalar::Scalar;

/// A function constant on each block of a product partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction<T> {
    pub row_part: Vec<usize>,
    pub col_part: Vec<usize>,
    pub block_values: Vec<Vec<T>>,
}

/// Number of classes of a labelling, checking that every class in
/// `0..count` is used.
fn class_count(part: &[usize], axis: &str) -> Result<usize> {
    if part.is_empty() {
        return Err(Error::Empty);
    }
    let count = part.iter().max().map_or(0, |&m| m + 1);
    let mut used = vec![false; count];
    for &c in part {
        used[c] = true;
    }
    if let Some(c) = used.iter().position(|u| !u) {
        return Err(Error::InvalidParameter(format!("{axis} class {c} is empty")));
    }
    Ok(count)
}

/// Relabels classes in order of first appearance.
pub fn canonical_labels(part: &[usize]) -> Vec<usize> {
    let mut map: Vec<Option<usize>> = Vec::new();
    let mut next = 0;
    part.iter()
        .map(|&c| {
            if c >= map.len() {
                map.resize(c + 1, None);
            }
            *map[c].get_or_insert_with(|| {
                next += 1;
                next - 1
            })
        })
        .collect()
}

impl<T: Scalar> StepFunction<T> {
    pub fn new(row_part: Vec<usize>, col_part: Vec<usize>, block_values: Vec<Vec<T>>) -> Result<Self> {
        let nx = class_count(&row_part, "row")?;
        let ny = class_count(&col_part, "column")?;
        if block_values.len() != nx || block_values.iter().any(|r| r.len() != ny) {
            return Err(Error::ShapeMismatch {
                expected: (nx, ny),
                actual: (
                    block_values.len(),
                    block_values.first().map_or(0, |r| r.len()),
                ),
            });
        }
        if let Some(k) = block_values.iter().flatten().position(|v| !v.is_finite_value()) {
            return Err(Error::NonFinite(k));
        }
        Ok(StepFunction {
            row_part,
            col_part,
            block_values,
        })
    }

    /// Block values chosen as the midrange of `f` over each block.
    pub fn midrange(f: &Kernel<T>, row_part: Vec<usize>, col_part: Vec<usize>) -> Result<Self> {
        if row_part.len() != f.rows() || col_part.len() != f.cols() {
            return Err(Error::ShapeMismatch {
                expected: f.shape(),
                actual: (row_part.len(), col_part.len()),
            });
        }
        let nx = class_count(&row_part, "row")?;
        let ny = class_count(&col_part, "column")?;
        let (lo, hi) = block_extremes(f, &row_part, &col_part, nx, ny);
        let block_values = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| {
                l.iter()
                    .zip(h)
                    .map(|(&a, &b)| (a.expect("nonempty block") + b.expect("nonempty block")) / T::two())
                    .collect()
            })
            .collect();
        Ok(StepFunction {
            row_part,
            col_part,
            block_values,
        })
    }

    pub fn row_classes(&self) -> usize {
        self.block_values.len()
    }

    pub fn col_classes(&self) -> usize {
        self.block_values.first().map_or(0, |r| r.len())
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.row_part.len(), self.col_part.len())
    }

    pub fn eval(&self) -> Kernel<T> {
        Kernel::from_fn(self.row_part.len(), self.col_part.len(), |i, j| {
            self.block_values[self.row_part[i]][self.col_part[j]]
        })
    }

    /// Flat CSV: `section,first,second,value` with sections `row`
    /// (index, class), `col` (index, class) and `block` (row class,
    /// column class, value).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "section,first,second,value")?;
        for (i, c) in self.row_part.iter().enumerate() {
            writeln!(w, "row,{i},{c},")?;
        }
        for (j, c) in self.col_part.iter().enumerate() {
            writeln!(w, "col,{j},{c},")?;
        }
        for (a, row) in self.block_values.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                writeln!(w, "block,{a},{k},{}", crate::io::fmt_f64(v.to_f64_lossy()))?;
            }
        }
        Ok(())
    }
}

/// Evaluates a step function given as partitions and block values.
pub fn eval_step<T: Scalar>(s: &StepFunction<T>) -> Kernel<T> {
    s.eval()
}

type Extremes<T> = (Vec<Vec<Option<T>>>, Vec<Vec<Option<T>>>);

pub(crate) fn block_extremes<T: Scalar>(
    f: &Kernel<T>,
    row_part: &[usize],
    col_part: &[usize],
    nx: usize,
    ny: usize,
) -> Extremes<T> {
    let mut lo = vec![vec![None; ny]; nx];
    let mut hi = vec![vec![None; ny]; nx];
    for (i, &a) in row_part.iter().enumerate() {
        for (j, &k) in col_part.iter().enumerate() {
            let v = f.get(i, j);
            let l: &mut Option<T> = &mut lo[a][k];
            *l = Some(l.map_or(v, |m: T| m.min_of(v)));
            let h: &mut Option<T> = &mut hi[a][k];
            *h = Some(h.map_or(v, |m: T| m.max_of(v)));
        }
    }
    (lo, hi)
}
