//! Revised simplex for the bounded-mass bipartite LP
//!
//! ```text
//! max Σ c(i,j) λ(i,j)   s.t.  Σ_j λ(i,j) ≤ μ(i),  Σ_i λ(i,j) ≤ ν(j),  λ ≥ 0
//! ```
//!
//! whose simplex multipliers at optimality are the cheapest separable bound
//! `a(i) + b(j) ≥ c(i,j)`, `a, b ≥ 0`. Each structural column has exactly
//! two unit entries, so pricing a column costs two lookups in the dual
//! vector; the basis inverse is kept explicitly and refactorized
//! periodically.

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::scalar::Scalar;

const REFACTOR_EVERY: usize = 64;

#[derive(Debug, Clone)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) struct LpSolution<T> {
    /// Multipliers of the row constraints, then of the column constraints.
    pub duals: Vec<T>,
    pub plan: Vec<(usize, usize, T)>,
    pub objective: T,
    pub pivots: usize,
}

struct Tableau<'a, T> {
    r: usize,
    m: usize,
    cells: Vec<(usize, usize, T)>,
    rhs: &'a [T],
    basic: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<T>,
    xb: Vec<T>,
}

impl<'a, T: Scalar> Tableau<'a, T> {
    fn n_vars(&self) -> usize {
        self.cells.len() + self.m
    }

    fn cost(&self, var: usize) -> T {
        self.cells.get(var).map_or(T::zero(), |c| c.2)
    }

    /// Nonzero rows of a constraint column (all coefficients are 1).
    fn support(&self, var: usize) -> ([usize; 2], usize) {
        match self.cells.get(var) {
            Some(&(i, j, _)) => ([i, self.r + j], 2),
            None => ([var - self.cells.len(), 0], 1),
        }
    }

    fn duals(&self) -> Vec<T> {
        let m = self.m;
        let mut y = vec![T::zero(); m];
        for k in 0..m {
            let cb = self.cost(self.basic[k]);
            if cb.is_zero() {
                continue;
            }
            let row = &self.binv[k * m..(k + 1) * m];
            for (yl, &b) in y.iter_mut().zip(row) {
                *yl += cb * b;
            }
        }
        y
    }

    fn direction(&self, var: usize) -> Vec<T> {
        let m = self.m;
        let (rows, len) = self.support(var);
        (0..m)
            .map(|k| rows[..len].iter().map(|&l| self.binv[k * m + l]).sum())
            .collect()
    }

    fn pivot(&mut self, p: usize, entering: usize, d: &[T]) {
        let m = self.m;
        let dp = d[p];
        for l in 0..m {
            self.binv[p * m + l] /= dp;
        }
        self.xb[p] /= dp;
        for k in 0..m {
            if k == p || d[k].is_zero() {
                continue;
            }
            let factor = d[k];
            for l in 0..m {
                let v = self.binv[p * m + l];
                self.binv[k * m + l] -= factor * v;
            }
            let xp = self.xb[p];
            self.xb[k] -= factor * xp;
        }
        self.in_basis[self.basic[p]] = false;
        self.in_basis[entering] = true;
        self.basic[p] = entering;
    }

    /// Recomputes the basis inverse from scratch (Gauss–Jordan, partial pivoting).
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut a = vec![T::zero(); m * m];
        for (k, &var) in self.basic.iter().enumerate() {
            let (rows, len) = self.support(var);
            for &l in &rows[..len] {
                a[l * m + k] = T::one();
            }
        }
        let mut inv = vec![T::zero(); m * m];
        for k in 0..m {
            inv[k * m + k] = T::one();
        }
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&p, &q| {
                    a[p * m + col]
                        .abs()
                        .partial_cmp(&a[q * m + col].abs())
                        .expect("finite")
                })
                .expect("nonempty range");
            if a[piv * m + col].is_zero() {
                return Err(Error::Solver("singular basis".into()));
            }
            if piv != col {
                for l in 0..m {
                    a.swap(piv * m + l, col * m + l);
                    inv.swap(piv * m + l, col * m + l);
                }
            }
            let d = a[col * m + col];
            for l in 0..m {
                a[col * m + l] /= d;
                inv[col * m + l] /= d;
            }
            for k in 0..m {
                if k == col {
                    continue;
                }
                let factor = a[k * m + col];
                if factor.is_zero() {
                    continue;
                }
                for l in 0..m {
                    let (av, iv) = (a[col * m + l], inv[col * m + l]);
                    a[k * m + l] -= factor * av;
                    inv[k * m + l] -= factor * iv;
                }
            }
        }
        self.binv = inv;
        self.xb = (0..m)
            .map(|k| {
                (0..m)
                    .map(|l| self.binv[k * m + l] * self.rhs[l])
                    .sum::<T>()
                    .max_of(T::zero())
            })
            .collect();
        Ok(())
    }
}

/// Solves the LP; `cost` must be entrywise nonnegative.
pub(crate) fn solve<T: Scalar>(cost: &Kernel<T>, mu: &[T], nu: &[T]) -> Result<LpSolution<T>> {
    let (r, c) = cost.shape();
    let m = r + c;
    let cmax = cost.max_abs().max_of(T::one());
    let tol = T::tol(1e-12) * cmax;
    let piv_tol = T::tol(1e-11);

    let mut cells = Vec::new();
    for i in 0..r {
        for j in 0..c {
            let v = cost.get(i, j);
            if v > T::zero() {
                cells.push((i, j, v));
            }
        }
    }
    let rhs: Vec<T> = mu.iter().chain(nu).copied().collect();
    let n_struct = cells.len();
    let mut binv = vec![T::zero(); m * m];
    for k in 0..m {
        binv[k * m + k] = T::one();
    }
    let mut in_basis = vec![false; n_struct + m];
    in_basis[n_struct..].iter_mut().for_each(|b| *b = true);
    let mut tab = Tableau {
        r,
        m,
        cells,
        rhs: &rhs,
        basic: (n_struct..n_struct + m).collect(),
        in_basis,
        binv,
        xb: rhs.clone(),
    };

    let limit = 200 * (tab.n_vars() + m) + 1000;
    let mut pivots = 0;
    let mut degenerate_run = 0;
    loop {
        if pivots > limit {
            return Err(Error::Solver(format!("simplex exceeded {limit} pivots")));
        }
        let y = tab.duals();
        let bland = degenerate_run > 2 * m;
        let mut entering = None;
        let mut best = tol;
        for var in 0..tab.n_vars() {
            if tab.in_basis[var] {
                continue;
            }
            let rc = match tab.cells.get(var) {
                Some(&(i, j, cv)) => cv - y[i] - y[r + j],
                None => -y[var - n_struct],
            };
            if rc > best {
                entering = Some(var);
                if bland {
                    break;
                }
                best = rc;
            }
        }
        let Some(q) = entering else { break };

        let d = tab.direction(q);
        let mut leave: Option<(usize, T)> = None;
        for k in 0..m {
            if d[k] > piv_tol {
                let ratio = tab.xb[k] / d[k];
                let better = match leave {
                    None => true,
                    Some((p, best_ratio)) => {
                        ratio < best_ratio - tol
                            || (ratio <= best_ratio + tol && tab.basic[k] < tab.basic[p])
                    }
                };
                if better {
                    leave = Some((k, ratio));
                }
            }
        }
        let Some((p, step)) = leave else {
            return Err(Error::Solver("unbounded direction in a bounded LP".into()));
        };
        if step <= tol {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }
        tab.pivot(p, q, &d);
        pivots += 1;
        if pivots % REFACTOR_EVERY == 0 {
            tab.refactor()?;
        }
    }

    tab.refactor()?;
    let duals = tab.duals();
    let mut plan = Vec::new();
    let mut objective = T::zero();
    for (k, &var) in tab.basic.iter().enumerate() {
        if let Some(&(i, j, cv)) = tab.cells.get(var) {
            let v = tab.xb[k];
            if v > T::zero() {
                plan.push((i, j, v));
                objective += cv * v;
            }
        }
    }
    Ok(LpSolution {
        duals,
        plan,
        objective,
        pivots,
    })
}
