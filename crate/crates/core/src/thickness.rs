//! Thickness of a set of cells and the τ-metric built on it.
//!
//! `thi(Z)` is the cheapest `μ(X₁) + ν(Y₁)` over axis covers of `Z`. On a
//! finite grid this is a bipartite vertex-cover LP whose constraint matrix is
//! totally unimodular, so the fractional and integral optima coincide and
//! equal the max flow of the network
//!
//! ```text
//! source ─μ(i)→ row i ─2→ col j ─ν(j)→ sink      (one middle arc per masked cell)
//! ```
//!
//! The flow on the middle arcs is a submultistochastic plan supported in
//! `Z`; the minimum cut is an integral cover of the same cost.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::Dinic;
use crate::kernel::{CellSet, Kernel};
use crate::plan::PlanMeasure;
use crate::scalar::Scalar;
use crate::space::DiscreteSpace;

/// Acceptance bound for `|gap|` and for cover-cost agreement.
pub const GAP_TOL: f64 = 1e-8;
/// Slack on cover inequalities and marginal bounds.
pub const COVER_TOL: f64 = 1e-9;
const FLOW_EPS: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalCover<T> {
    pub a: Vec<T>,
    pub b: Vec<T>,
}

impl<T: Scalar> FractionalCover<T> {
    pub fn cost(&self, x: &DiscreteSpace<T>, y: &DiscreteSpace<T>) -> T {
        x.integrate(&self.a) + y.integrate(&self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralCover {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl IntegralCover {
    pub fn cost<T: Scalar>(&self, x: &DiscreteSpace<T>, y: &DiscreteSpace<T>) -> T {
        x.measure(self.rows.iter().copied()) + y.measure(self.cols.iter().copied())
    }

    pub fn covers(&self, z: &CellSet) -> bool {
        let mut r = vec![false; z.rows()];
        let mut c = vec![false; z.cols()];
        self.rows.iter().for_each(|&i| r[i] = true);
        self.cols.iter().for_each(|&j| c[j] = true);
        z.cells().all(|(i, j)| r[i] || c[j])
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() && self.cols.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThicknessCertificate<T> {
    pub value: T,
    pub fractional: FractionalCover<T>,
    pub integral: IntegralCover,
    pub dual_witness: PlanMeasure<T>,
    pub gap: T,
}

impl<T: Scalar> ThicknessCertificate<T> {
    /// Re-checks every claim of the certificate against the inputs.
    pub fn verify(&self, z: &CellSet, x: &DiscreteSpace<T>, y: &DiscreteSpace<T>) -> Result<()> {
        let gap_tol = T::tol(GAP_TOL);
        let tol = T::tol(COVER_TOL);
        let fail = |m: String| Err(Error::Certificate(m));

        let w = &self.dual_witness;
        let mut rows = vec![T::zero(); x.len()];
        let mut cols = vec![T::zero(); y.len()];
        for &(i, j, m) in w.entries() {
            if !z.contains(i, j) {
                return fail(format!("dual mass at ({i},{j}) outside the set"));
            }
            if m < T::zero() {
                return fail(format!("negative dual mass at ({i},{j})"));
            }
            rows[i] += m;
            cols[j] += m;
        }
        if let Some(i) = (0..x.len()).find(|&i| rows[i] > x.weight(i) + tol) {
            return fail(format!("dual row marginal exceeds μ at {i}"));
        }
        if let Some(j) = (0..y.len()).find(|&j| cols[j] > y.weight(j) + tol) {
            return fail(format!("dual column marginal exceeds ν at {j}"));
        }
        let f = &self.fractional;
        for (i, j) in z.cells() {
            if f.a[i] + f.b[j] < T::one() - tol {
                return fail(format!("fractional cover misses ({i},{j})"));
            }
        }
        if f.a.iter().chain(&f.b).any(|&v| v < -tol || v > T::one() + tol) {
            return fail("fractional cover leaves [0,1]".into());
        }
        if !self.integral.covers(z) {
            return fail("integral cover misses a cell".into());
        }
        let mass = w.total_mass();
        let gap = f.cost(x, y) - mass;
        if (gap - self.gap).abs() > gap_tol || self.gap.abs() > gap_tol {
            return fail(format!("duality gap {} exceeds tolerance", self.gap));
        }
        if (self.integral.cost(x, y) - self.value).abs() > gap_tol {
            return fail("integral cover cost differs from the value".into());
        }
        if (mass - self.value).abs() > gap_tol {
            return fail("dual mass differs from the value".into());
        }
        Ok(())
    }
}

/// Exact thickness with primal, integral and dual witnesses.
pub fn thickness<T: Scalar>(
    z: &CellSet,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
) -> Result<ThicknessCertificate<T>> {
    z.check_spaces(x, y)?;
    let (r, c) = z.shape();
    let source = r + c;
    let sink = source + 1;
    let mut net = Dinic::new(r + c + 2, T::tol(FLOW_EPS));
    for i in 0..r {
        net.add_edge(source, i, x.weight(i));
    }
    // total flow never exceeds 1, so 2 acts as an unbounded middle capacity
    let middle: Vec<_> = z
        .cells()
        .map(|(i, j)| ((i, j), net.add_edge(i, r + j, T::two())))
        .collect();
    for j in 0..c {
        net.add_edge(r + j, sink, y.weight(j));
    }
    let value = net.max_flow(source, sink, T::two());

    let eps = T::tol(FLOW_EPS);
    let flows = middle.iter().filter_map(|&((i, j), arc)| {
        let f = net.flow_on(arc);
        (f > eps).then_some((i, j, f))
    });
    let dual_witness = PlanMeasure::new(r, c, flows.collect(), false)?;

    let side = net.source_side(source);
    let integral = IntegralCover {
        rows: (0..r).filter(|&i| !side[i]).collect(),
        cols: (0..c).filter(|&j| side[r + j]).collect(),
    };
    let indicator = |set: &[usize], n: usize| {
        let mut v = vec![T::zero(); n];
        set.iter().for_each(|&k| v[k] = T::one());
        v
    };
    let fractional = FractionalCover {
        a: indicator(&integral.rows, r),
        b: indicator(&integral.cols, c),
    };
    let gap = fractional.cost(x, y) - dual_witness.total_mass();
    Ok(ThicknessCertificate {
        value,
        fractional,
        integral,
        dual_witness,
        gap,
    })
}

/// Thickness value only.
pub fn thi<T: Scalar>(z: &CellSet, x: &DiscreteSpace<T>, y: &DiscreteSpace<T>) -> Result<T> {
    Ok(thickness(z, x, y)?.value)
}

pub const ORACLE_MAX_POINTS: usize = 24;

/// Brute-force thickness: minimum of `μ(X₁) + ν(Y₁)` over all covers.
///
/// For each `X₁` the cheapest admissible `Y₁` is forced (every column hit by
/// a row outside `X₁`), so enumerating the subsets of the smaller side
/// visits the minimum of all `2^(|X|+|Y|)` covers.
pub fn thickness_oracle<T: Scalar>(
    z: &CellSet,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
) -> Result<T> {
    z.check_spaces(x, y)?;
    let (r, c) = z.shape();
    if r + c > ORACLE_MAX_POINTS {
        return Err(Error::SizeBound(format!(
            "|X| + |Y| = {} exceeds {ORACLE_MAX_POINTS}",
            r + c
        )));
    }
    // enumerate the smaller side; masks of the other side as bitsets
    let (enum_w, other_w, lines): (&[T], &[T], Vec<u32>) = if r <= c {
        let lines = (0..r)
            .map(|i| (0..c).filter(|&j| z.contains(i, j)).fold(0u32, |m, j| m | 1 << j))
            .collect();
        (x.weights(), y.weights(), lines)
    } else {
        let lines = (0..c)
            .map(|j| (0..r).filter(|&i| z.contains(i, j)).fold(0u32, |m, i| m | 1 << i))
            .collect();
        (y.weights(), x.weights(), lines)
    };
    let k = enum_w.len();
    let mut best: Option<T> = None;
    for chosen in 0u32..(1u32 << k) {
        let mut cost = T::zero();
        let mut forced = 0u32;
        for (t, &line) in lines.iter().enumerate() {
            if chosen >> t & 1 == 1 {
                cost += enum_w[t];
            } else {
                forced |= line;
            }
        }
        let mut bits = forced;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            cost += other_w[j];
            bits &= bits - 1;
        }
        if best.is_none_or(|b| cost < b) {
            best = Some(cost);
        }
    }
    Ok(best.unwrap_or_else(T::zero))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NullCover<T> {
    /// Zero-measure cover; on a positive-weight grid this is always empty.
    Cover(IntegralCover),
    Refused { thickness: T },
}

/// Returns a null cover when the thickness vanishes.
///
/// Every point has positive weight, so thickness zero happens only for the
/// empty mask and the cover returned is empty.
pub fn extract_null_cover<T: Scalar>(
    z: &CellSet,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
) -> Result<NullCover<T>> {
    let cert = thickness(z, x, y)?;
    if cert.value <= T::tol(1e-10) {
        let cover = IntegralCover {
            rows: cert.integral.rows.into_iter().filter(|&i| x.weight(i).is_zero()).collect(),
            cols: cert.integral.cols.into_iter().filter(|&j| y.weight(j).is_zero()).collect(),
        };
        debug_assert!(cover.covers(z));
        Ok(NullCover::Cover(cover))
    } else {
        Ok(NullCover::Refused {
            thickness: cert.value,
        })
    }
}

/// One evaluated breakpoint: on `[level, next)` the set `{|f − g| > ε}` is
/// constant with the given thickness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint<T> {
    pub index: usize,
    pub level: T,
    pub thickness: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauResult<T> {
    pub value: T,
    /// Number of distinct values of `|f − g|`, including 0.
    pub levels: usize,
    /// The breakpoint that attains the infimum.
    pub selected: Breakpoint<T>,
    /// Every breakpoint whose thickness was computed, in evaluation order.
    pub evaluated: Vec<Breakpoint<T>>,
}

fn abs_diff<T: Scalar>(f: &Kernel<T>, g: &Kernel<T>) -> Result<Kernel<T>> {
    f.zip_with(g, |a, b| (a - b).abs())
}

fn distinct_levels<T: Scalar>(d: &Kernel<T>) -> Vec<T> {
    let mut v: Vec<T> = d.values().to_vec();
    v.push(T::zero());
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite kernel values"));
    v.dedup();
    v
}

fn strict_level_set<T: Scalar>(d: &Kernel<T>, level: T) -> CellSet {
    CellSet::from_fn(d.rows(), d.cols(), |i, j| d.get(i, j) > level)
}

/// Exact τ distance `inf{ε > 0 : thi{|f − g| > ε} ≤ ε}`.
///
/// With `0 = v₀ < v₁ < … < v_K` the distinct values of `|f − g|`, the level
/// set is constant on each `[v_k, v_{k+1})` with thickness `t_k`,
/// nonincreasing in `k`. The answer is `max(v_k, t_k)` for the first `k`
/// with `t_k < v_{k+1}`, found by binary search.
pub fn tau_distance<T: Scalar>(
    f: &Kernel<T>,
    g: &Kernel<T>,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
) -> Result<TauResult<T>> {
    f.check_spaces(x, y)?;
    let d = abs_diff(f, g)?;
    let levels = distinct_levels(&d);
    let last = levels.len() - 1;
    let mut evaluated = Vec::new();
    let mut eval = |k: usize| -> Result<Breakpoint<T>> {
        let t = if k == last {
            T::zero()
        } else {
            thi(&strict_level_set(&d, levels[k]), x, y)?
        };
        let b = Breakpoint {
            index: k,
            level: levels[k],
            thickness: t,
        };
        evaluated.push(b);
        Ok(b)
    };
    let (mut lo, mut hi) = (0usize, last);
    let mut found = None;
    // invariant: the first feasible index lies in [lo, hi]; `last` is feasible
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let b = eval(mid)?;
        if b.thickness < levels[mid + 1] {
            hi = mid;
            found = Some(b);
        } else {
            lo = mid + 1;
        }
    }
    let selected = match found {
        Some(b) if b.index == lo => b,
        _ => eval(lo)?,
    };
    Ok(TauResult {
        value: selected.level.max_of(selected.thickness),
        levels: levels.len(),
        selected,
        evaluated,
    })
}

/// τ by bisection on `ε`, stopping once the bracket is narrower than `tol`.
/// Returns the upper end of the bracket.
pub fn tau_bisection<T: Scalar>(
    f: &Kernel<T>,
    g: &Kernel<T>,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
    tol: T,
) -> Result<T> {
    f.check_spaces(x, y)?;
    let d = abs_diff(f, g)?;
    let mut hi = d.max_abs().min_of(T::one());
    if hi.is_zero() {
        return Ok(hi);
    }
    let mut lo = T::zero();
    let feasible = |eps: T| -> Result<bool> { Ok(thi(&strict_level_set(&d, eps), x, y)? <= eps) };
    while hi - lo > tol {
        let mid = (lo + hi) / T::two();
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
