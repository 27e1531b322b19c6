//! Exact separable-bound norm for tiny kernels by vertex enumeration.
//!
//! Eliminating `b` gives the convex piecewise-linear objective
//!
//! ```text
//! g(a) = Σ a(i) μ(i) + Σ_j ν(j) · max(0, max_i (c(i,j) − a(i))),   a ≥ 0
//! ```
//!
//! on the smaller side. Its linearity regions are cut out by the
//! hyperplanes `a(i) = 0`, `a(i) = c(i,j)` and
//! `a(i) − a(k) = c(i,j) − c(k,j)`; the minimum sits at a vertex of that
//! arrangement, so evaluating `g` at every vertex is exact.

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::scalar::Scalar;
use crate::space::DiscreteSpace;

pub const ORACLE_MAX_CELLS: usize = 16;

/// `coef · a = rhs` with coefficients in {−1, 0, 1}.
#[derive(Debug, Clone, PartialEq)]
struct Hyperplane<T> {
    coef: Vec<i8>,
    rhs: T,
}

fn objective<T: Scalar>(a: &[T], c: &Kernel<T>, mu: &[T], nu: &[T]) -> T {
    let mut total: T = a.iter().zip(mu).map(|(&ai, &w)| ai * w).sum();
    for (j, &w) in nu.iter().enumerate() {
        let need = (0..a.len())
            .map(|i| c.get(i, j) - a[i])
            .fold(T::zero(), |m, v| m.max_of(v));
        total += w * need;
    }
    total
}

/// Solves a square system by Gaussian elimination; `None` when singular.
fn solve_square<T: Scalar>(planes: &[&Hyperplane<T>]) -> Option<Vec<T>> {
    let d = planes.len();
    let mut m: Vec<Vec<T>> = planes
        .iter()
        .map(|h| {
            let mut row: Vec<T> = h
                .coef
                .iter()
                .map(|&k| T::from_i8(k).expect("small integer"))
                .collect();
            row.push(h.rhs);
            row
        })
        .collect();
    let tiny = T::tol(1e-12);
    for col in 0..d {
        let piv = (col..d).max_by(|&p, &q| {
            m[p][col]
                .abs()
                .partial_cmp(&m[q][col].abs())
                .expect("finite")
        })?;
        if m[piv][col].abs() <= tiny {
            return None;
        }
        m.swap(piv, col);
        for k in 0..d {
            if k != col {
                let factor = m[k][col] / m[col][col];
                if !factor.is_zero() {
                    for l in col..=d {
                        let v = m[col][l];
                        m[k][l] -= factor * v;
                    }
                }
            }
        }
    }
    Some((0..d).map(|k| m[k][d] / m[k][k]).collect())
}

fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut p = k;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            if idx[p] != p + n - k {
                break;
            }
            if p == 0 {
                return;
            }
        }
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Exact separable-bound norm for kernels with at most 16 cells.
pub fn vc_norm_oracle<T: Scalar>(
    f: &Kernel<T>,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
) -> Result<T> {
    f.check_spaces(x, y)?;
    if f.rows() * f.cols() > ORACLE_MAX_CELLS {
        return Err(Error::SizeBound(format!(
            "{} cells exceed {ORACLE_MAX_CELLS}",
            f.rows() * f.cols()
        )));
    }
    let (c, mu, nu) = if f.rows() <= f.cols() {
        (f.abs(), x.weights(), y.weights())
    } else {
        (f.abs().transpose(), y.weights(), x.weights())
    };
    let d = c.rows();
    let unit = |i: usize| {
        let mut v = vec![0i8; d];
        v[i] = 1;
        v
    };
    let mut planes: Vec<Hyperplane<T>> = Vec::new();
    let mut push = |h: Hyperplane<T>| {
        if !planes.contains(&h) {
            planes.push(h);
        }
    };
    for i in 0..d {
        push(Hyperplane {
            coef: unit(i),
            rhs: T::zero(),
        });
        for j in 0..c.cols() {
            push(Hyperplane {
                coef: unit(i),
                rhs: c.get(i, j),
            });
        }
        for k in i + 1..d {
            let mut coef = unit(i);
            coef[k] = -1;
            for j in 0..c.cols() {
                push(Hyperplane {
                    coef: coef.clone(),
                    rhs: c.get(i, j) - c.get(k, j),
                });
            }
        }
    }
    let neg = -T::tol(1e-12);
    let mut best = objective(&vec![T::zero(); d], &c, mu, nu);
    for_each_subset(planes.len(), d, |pick| {
        let chosen: Vec<&Hyperplane<T>> = pick.iter().map(|&k| &planes[k]).collect();
        if let Some(a) = solve_square(&chosen) {
            if a.iter().all(|&v| v >= neg) {
                let a: Vec<T> = a.into_iter().map(|v| v.max_of(T::zero())).collect();
                let g = objective(&a, &c, mu, nu);
                if g < best {
                    best = g;
                }
            }
        }
    });
    Ok(best)
}
