//! Brute-force step-fit defect for tiny grids.
//!
//! Walks every pair of partitions with at most `N` classes per side, sets
//! midrange block values and evaluates τ by a linear scan over breakpoints
//! with the subset-enumeration thickness. Shares no code with the fitting
//! heuristic or the max-flow path.

use crate::error::{Error, Result};
use crate::kernel::{CellSet, Kernel};
use crate::scalar::Scalar;
use crate::space::DiscreteSpace;
use crate::thickness::thickness_oracle;

pub const ORACLE_MAX_SIDE: usize = 8;
pub const ORACLE_MAX_CLASSES: usize = 3;

/// Advances a restricted growth string with at most `k` blocks; `false`
/// once exhausted.
fn next_rgs(a: &mut [usize], k: usize) -> bool {
    for p in (1..a.len()).rev() {
        let ceiling = a[..p].iter().max().map_or(0, |&m| m + 1);
        if a[p] < ceiling && a[p] + 1 < k {
            a[p] += 1;
            for q in a.iter_mut().skip(p + 1) {
                *q = 0;
            }
            return true;
        }
    }
    false
}

/// τ by scanning breakpoints upward; stops at the first feasible one or once
/// the level alone reaches `cutoff`.
fn tau_scan<T: Scalar>(d: &[T], rows: usize, cols: usize, x: &DiscreteSpace<T>, y: &DiscreteSpace<T>, cutoff: T) -> Result<T> {
    let mut levels: Vec<T> = d.to_vec();
    levels.push(T::zero());
    levels.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    levels.dedup();
    for k in 0..levels.len() {
        let v = levels[k];
        if v >= cutoff {
            return Ok(cutoff);
        }
        let z = CellSet::from_fn(rows, cols, |i, j| d[i * cols + j] > v);
        let t = thickness_oracle(&z, x, y)?;
        let cand = v.max_of(t);
        if k + 1 == levels.len() || cand < levels[k + 1] {
            return Ok(cand.min_of(cutoff));
        }
    }
    unreachable!("the top level is always feasible")
}

/// Minimum τ from `f` to a step function with at most `n` classes per side
/// and midrange block values.
pub fn fit_step_oracle<T: Scalar>(
    f: &Kernel<T>,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
    n: usize,
) -> Result<T> {
    f.check_spaces(x, y)?;
    let (r, c) = f.shape();
    if r > ORACLE_MAX_SIDE || c > ORACLE_MAX_SIDE || n > ORACLE_MAX_CLASSES {
        return Err(Error::SizeBound(format!(
            "{r}x{c} with {n} classes exceeds {ORACLE_MAX_SIDE}x{ORACLE_MAX_SIDE} with {ORACLE_MAX_CLASSES}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("class count must be positive".into()));
    }
    let mut best: Option<T> = None;
    let mut rp = vec![0usize; r];
    loop {
        let mut cp = vec![0usize; c];
        loop {
            let mut lo = vec![None::<T>; n * n];
            let mut hi = vec![None::<T>; n * n];
            for i in 0..r {
                for j in 0..c {
                    let b = rp[i] * n + cp[j];
                    let v = f.get(i, j);
                    lo[b] = Some(lo[b].map_or(v, |m| m.min_of(v)));
                    hi[b] = Some(hi[b].map_or(v, |m| m.max_of(v)));
                }
            }
            let d: Vec<T> = (0..r * c)
                .map(|p| {
                    let b = rp[p / c] * n + cp[p % c];
                    let mid = (lo[b].expect("block") + hi[b].expect("block")) / T::two();
                    (f.get(p / c, p % c) - mid).abs()
                })
                .collect();
            // τ < b needs thi{d ≥ b} < b, since thi{d > ε} is nonincreasing
            let hopeless = match best {
                Some(b) => thickness_oracle(&CellSet::from_fn(r, c, |i, j| d[i * c + j] >= b), x, y)? >= b,
                None => false,
            };
            if !hopeless {
                let cutoff = best.unwrap_or_else(|| f.max_abs() + T::one());
                let t = tau_scan(&d, r, c, x, y, cutoff)?;
                if best.is_none_or(|b| t < b) {
                    best = Some(t);
                }
            }
            if !next_rgs(&mut cp, n) {
                break;
            }
        }
        if !next_rgs(&mut rp, n) {
            break;
        }
    }
    Ok(best.expect("at least one partition"))
}
