//! Step-function fitting in τ.
//!
//! Each restart runs weighted k-means co-clustering on block profiles,
//! then a sup-type reassignment phase against midrange block values, and
//! on small grids a single-move local search driven by the exact τ. When
//! the whole partition space is tiny it is enumerated instead. Every
//! reported τ is recomputed from the returned step function.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::step::{canonical_labels, StepFunction};
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::scalar::Scalar;
use crate::space::DiscreteSpace;
use crate::kernel::CellSet;
use crate::thickness::{tau_distance, thi};

pub const DEFAULT_RESTARTS: usize = 16;
const MAX_SWEEPS: usize = 50;
const SUP_SWEEPS: usize = 20;
/// Grids up to this many cells get the τ-driven local search.
pub const POLISH_MAX_CELLS: usize = 1024;
const POLISH_PASSES: usize = 20;
/// Partition spaces up to this many (row, column) pairs are enumerated.
pub const EXHAUSTIVE_PAIRS: u64 = 1_200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WarmStart {
    /// Restart 0 starts from contiguous index intervals.
    Intervals,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub restarts: usize,
    pub seed: u64,
    pub warm: WarmStart,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            warm: WarmStart::Random,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFit<T> {
    pub step: StepFunction<T>,
    pub tau: T,
    /// Index of the restart that produced the fit.
    pub restart: usize,
}

/// Lexicographic fit quality: τ, then sup error as a plateau breaker.
#[derive(Debug, Clone, Copy)]
struct Key<T> {
    tau: T,
    sup: T,
}

impl<T: Scalar> Key<T> {
    fn better_than(&self, other: &Self) -> bool {
        self.tau < other.tau || (self.tau == other.tau && self.sup < other.sup)
    }
}

struct Problem<'a, T> {
    f: &'a Kernel<T>,
    ft: Kernel<T>,
    x: &'a DiscreteSpace<T>,
    y: &'a DiscreteSpace<T>,
    nx: usize,
    ny: usize,
}

struct Candidate<T> {
    step: StepFunction<T>,
    key: Key<T>,
}

fn check_counts<T: Scalar>(f: &Kernel<T>, nx: usize, ny: usize) -> Result<()> {
    if nx == 0 || nx > f.rows() {
        return Err(Error::InvalidParameter(format!(
            "row class count {nx} out of range 1..={}",
            f.rows()
        )));
    }
    if ny == 0 || ny > f.cols() {
        return Err(Error::InvalidParameter(format!(
            "column class count {ny} out of range 1..={}",
            f.cols()
        )));
    }
    Ok(())
}

pub(crate) fn intervals(n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|i| i * k / n).collect()
}

fn random_partition(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut part = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        part[i] = if rank < k { rank } else { rng.gen_range(0..k) };
    }
    part
}

fn sup_error<T: Scalar>(f: &Kernel<T>, g: &Kernel<T>) -> T {
    f.values()
        .iter()
        .zip(g.values())
        .fold(T::zero(), |m, (&a, &b)| m.max_of((a - b).abs()))
}

impl<'a, T: Scalar> Problem<'a, T> {
    fn new(f: &'a Kernel<T>, x: &'a DiscreteSpace<T>, y: &'a DiscreteSpace<T>, nx: usize, ny: usize) -> Self {
        Problem {
            f,
            ft: f.transpose(),
            x,
            y,
            nx,
            ny,
        }
    }

    fn score(&self, rows: &[usize], cols: &[usize]) -> Result<Candidate<T>> {
        let step = StepFunction::midrange(self.f, canonical_labels(rows), canonical_labels(cols))?;
        let g = step.eval();
        let tau = tau_distance(self.f, &g, self.x, self.y)?.value;
        let sup = sup_error(self.f, &g);
        Ok(Candidate {
            step,
            key: Key { tau, sup },
        })
    }

    /// Weighted block means, `[row class][column class]`.
    fn block_means(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<T>> {
        let mut num = vec![vec![T::zero(); self.ny]; self.nx];
        let mut den = vec![vec![T::zero(); self.ny]; self.nx];
        for (i, &a) in rows.iter().enumerate() {
            let wi = self.x.weight(i);
            for (j, &k) in cols.iter().enumerate() {
                let w = wi * self.y.weight(j);
                num[a][k] += w * self.f.get(i, j);
                den[a][k] += w;
            }
        }
        num.iter()
            .zip(&den)
            .map(|(n, d)| {
                n.iter()
                    .zip(d)
                    .map(|(&n, &d)| if d.is_zero() { T::zero() } else { n / d })
                    .collect()
            })
            .collect()
    }

    fn block_midranges(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<T>> {
        let (lo, hi) = super::step::block_extremes(self.f, rows, cols, self.nx, self.ny);
        lo.iter()
            .zip(&hi)
            .map(|(l, h)| {
                l.iter()
                    .zip(h)
                    .map(|(a, b)| match (a, b) {
                        (Some(a), Some(b)) => (*a + *b) / T::two(),
                        _ => T::zero(),
                    })
                    .collect()
            })
            .collect()
    }

    /// Co-clustering until neither side changes.
    fn cocluster(&self, rows: &mut [usize], cols: &mut [usize]) {
        for _ in 0..MAX_SWEEPS {
            let m = self.block_means(rows, cols);
            let a = reassign(self.f, self.y.weights(), rows, cols, self.nx, |a, k| m[a][k], Cost::L2);
            let m = self.block_means(rows, cols);
            let b = reassign(&self.ft, self.x.weights(), cols, rows, self.ny, |k, a| m[a][k], Cost::L2);
            if !a && !b {
                break;
            }
        }
    }

    /// Reassignment against midrange block values, keeping the best
    /// partition seen by sup error.
    fn sup_phase(&self, rows: &mut Vec<usize>, cols: &mut Vec<usize>) {
        let sup_of = |r: &[usize], c: &[usize]| {
            let mid = self.block_midranges(r, c);
            let mut worst = T::zero();
            for (i, &a) in r.iter().enumerate() {
                for (j, &k) in c.iter().enumerate() {
                    worst = worst.max_of((self.f.get(i, j) - mid[a][k]).abs());
                }
            }
            worst
        };
        let mut best = (rows.clone(), cols.clone(), sup_of(rows, cols));
        for _ in 0..SUP_SWEEPS {
            let m = self.block_midranges(rows, cols);
            let a = reassign(self.f, self.y.weights(), rows, cols, self.nx, |a, k| m[a][k], Cost::Sup);
            let m = self.block_midranges(rows, cols);
            let b = reassign(&self.ft, self.x.weights(), cols, rows, self.ny, |k, a| m[a][k], Cost::Sup);
            let s = sup_of(rows, cols);
            if s < best.2 {
                best = (rows.clone(), cols.clone(), s);
            }
            if !a && !b {
                break;
            }
        }
        *rows = best.0;
        *cols = best.1;
    }

    /// First-improvement single moves under the exact τ.
    fn polish(&self, rows: &mut [usize], cols: &mut [usize], mut best: Candidate<T>) -> Result<Candidate<T>> {
        for _ in 0..POLISH_PASSES {
            let mut improved = false;
            for axis in 0..2 {
                let len = if axis == 0 { rows.len() } else { cols.len() };
                let k = if axis == 0 { self.nx } else { self.ny };
                for i in 0..len {
                    let part: &[usize] = if axis == 0 { rows } else { cols };
                    let cur = part[i];
                    if part.iter().filter(|&&c| c == cur).count() < 2 {
                        continue;
                    }
                    for a in (0..k).filter(|&a| a != cur) {
                        if axis == 0 { rows[i] = a } else { cols[i] = a }
                        let cand = self.score(rows, cols)?;
                        if cand.key.better_than(&best.key) {
                            best = cand;
                            improved = true;
                            break;
                        }
                        if axis == 0 { rows[i] = cur } else { cols[i] = cur }
                    }
                }
            }
            if !improved {
                break;
            }
        }
        Ok(best)
    }

    fn run_from(&self, mut rows: Vec<usize>, mut cols: Vec<usize>) -> Result<Candidate<T>> {
        self.cocluster(&mut rows, &mut cols);
        let mut best = self.score(&rows, &cols)?;
        self.sup_phase(&mut rows, &mut cols);
        let cand = self.score(&rows, &cols)?;
        if cand.key.better_than(&best.key) {
            best = cand;
        }
        if self.f.rows() * self.f.cols() <= POLISH_MAX_CELLS {
            let mut rows = best.step.row_part.clone();
            let mut cols = best.step.col_part.clone();
            best = self.polish(&mut rows, &mut cols, best)?;
        }
        Ok(best)
    }

    fn restart(&self, r: usize, opts: &FitOptions) -> Result<Candidate<T>> {
        let (rows, cols) = if r == 0 && opts.warm == WarmStart::Intervals {
            (intervals(self.f.rows(), self.nx), intervals(self.f.cols(), self.ny))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            let rows = random_partition(self.f.rows(), self.nx, &mut rng);
            let cols = random_partition(self.f.cols(), self.ny, &mut rng);
            (rows, cols)
        };
        self.run_from(rows, cols)
    }

    /// Enumerates every partition pair. Ties keep the first pair in
    /// enumeration order.
    fn exhaustive(&self) -> Result<Candidate<T>> {
        let rows = all_partitions(self.f.rows(), self.nx);
        let cols = all_partitions(self.f.cols(), self.ny);
        let slack = T::tol(1e-12);
        let mut best: Option<Candidate<T>> = None;
        for r in &rows {
            for c in &cols {
                if let Some(b) = &best {
                    // τ < b needs thi{d ≥ b} < b
                    let step = StepFunction::midrange(self.f, r.clone(), c.clone())?;
                    let g = step.eval();
                    let bound = b.key.tau;
                    let z = CellSet::from_fn(self.f.rows(), self.f.cols(), |i, j| {
                        (self.f.get(i, j) - g.get(i, j)).abs() >= bound
                    });
                    if greedy_mass(&z, self.x, self.y) >= bound + slack
                        || thi(&z, self.x, self.y)? >= bound + slack
                    {
                        continue;
                    }
                }
                let cand = self.score(r, c)?;
                if best.as_ref().is_none_or(|b| cand.key.tau < b.key.tau) {
                    best = Some(cand);
                }
            }
        }
        Ok(best.expect("at least one partition"))
    }
}

/// Mass of a greedily built submultistochastic plan on `z`; a lower bound
/// for its thickness.
fn greedy_mass<T: Scalar>(z: &CellSet, x: &DiscreteSpace<T>, y: &DiscreteSpace<T>) -> T {
    let mut row_left = x.weights().to_vec();
    let mut col_left = y.weights().to_vec();
    let mut total = T::zero();
    for (i, j) in z.cells() {
        let m = row_left[i].min_of(col_left[j]);
        if m > T::zero() {
            row_left[i] -= m;
            col_left[j] -= m;
            total += m;
        }
    }
    total
}

#[derive(Clone, Copy)]
enum Cost {
    L2,
    Sup,
}

/// Moves each item (a row of `f`) to its cheapest class; returns whether
/// anything moved. Emptied classes are refilled with the worst-fitting item
/// of a class that can spare one.
fn reassign<T: Scalar>(
    f: &Kernel<T>,
    w: &[T],
    part: &mut [usize],
    other: &[usize],
    k: usize,
    value: impl Fn(usize, usize) -> T,
    cost: Cost,
) -> bool {
    let item_cost = |i: usize, a: usize| -> T {
        let row = f.row(i);
        match cost {
            Cost::L2 => row
                .iter()
                .zip(other)
                .zip(w)
                .map(|((&v, &o), &wj)| {
                    let d = v - value(a, o);
                    wj * d * d
                })
                .sum(),
            Cost::Sup => row
                .iter()
                .zip(other)
                .fold(T::zero(), |m, (&v, &o)| m.max_of((v - value(a, o)).abs())),
        }
    };
    let mut changed = false;
    let mut own_cost = vec![T::zero(); part.len()];
    for i in 0..part.len() {
        let mut best = (0, item_cost(i, 0));
        for a in 1..k {
            let c = item_cost(i, a);
            if c < best.1 {
                best = (a, c);
            }
        }
        // keep the current class on ties
        let cur = item_cost(i, part[i]);
        if best.1 < cur {
            part[i] = best.0;
            changed = true;
            own_cost[i] = best.1;
        } else {
            own_cost[i] = cur;
        }
    }
    let mut sizes = vec![0usize; k];
    for &c in part.iter() {
        sizes[c] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let donor = (0..part.len())
            .filter(|&i| sizes[part[i]] > 1)
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if own_cost[b] >= own_cost[i] => Some(b),
                _ => Some(i),
            });
        if let Some(i) = donor {
            sizes[part[i]] -= 1;
            part[i] = empty;
            sizes[empty] = 1;
            changed = true;
        }
    }
    changed
}

/// Best candidate by key, lowest index on ties.
fn pick_best<T: Scalar>(cands: Vec<Candidate<T>>) -> (usize, Candidate<T>) {
    let mut it = cands.into_iter().enumerate();
    let mut best = it.next().expect("nonempty candidate list");
    for (i, c) in it {
        if c.key.better_than(&best.1.key) {
            best = (i, c);
        }
    }
    best
}

/// Partitions of `0..n` into at most `k` blocks, as restricted growth
/// strings.
fn all_partitions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn grow(cur: &mut Vec<usize>, used: usize, n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..(used + 1).min(k) {
            cur.push(c);
            grow(cur, used.max(c + 1), n, k, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::with_capacity(n), 0, n, k, &mut out);
    out
}

/// `Σ_{j ≤ k} S(n, j)`, saturating.
pub(crate) fn partition_count(n: usize, k: usize) -> u64 {
    let mut s = vec![0u64; k + 1];
    s[0] = 1;
    for _ in 0..n {
        for j in (1..=k).rev() {
            s[j] = s[j - 1].saturating_add((j as u64).saturating_mul(s[j]));
        }
        s[0] = 0;
    }
    s.iter().fold(0u64, |a, &b| a.saturating_add(b))
}

fn fit_impl<T: Scalar>(
    p: &Problem<'_, T>,
    init: Option<(Vec<usize>, Vec<usize>)>,
    opts: &FitOptions,
) -> Result<StepFit<T>> {
    let pairs = partition_count(p.f.rows(), p.nx).saturating_mul(partition_count(p.f.cols(), p.ny));
    if pairs <= EXHAUSTIVE_PAIRS {
        let c = p.exhaustive()?;
        return Ok(StepFit {
            tau: c.key.tau,
            step: c.step,
            restart: 0,
        });
    }
    let restarts = opts.restarts.max(1);
    let mut cands: Vec<Candidate<T>> = (0..restarts)
        .into_par_iter()
        .map(|r| p.restart(r, opts))
        .collect::<Result<_>>()?;
    if let Some((rows, cols)) = init {
        cands.push(p.run_from(rows, cols)?);
    }
    let (restart, best) = pick_best(cands);
    Ok(StepFit {
        tau: best.key.tau,
        step: best.step,
        restart,
    })
}

/// Fits a step function with at most `nx × ny` blocks. The returned τ is
/// the exact τ distance to the returned step function, hence an upper
/// bound on the best achievable one.
pub fn fit_step<T: Scalar>(
    f: &Kernel<T>,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
    nx: usize,
    ny: usize,
    opts: &FitOptions,
) -> Result<StepFit<T>> {
    f.check_spaces(x, y)?;
    check_counts(f, nx, ny)?;
    fit_impl(&Problem::new(f, x, y, nx, ny), None, opts)
}

/// Splits classes of `part` (items are rows of `f`) until there are `k`,
/// always splitting the class with the widest sup-spread.
fn split_to<T: Scalar>(f: &Kernel<T>, part: &[usize], k: usize) -> Vec<usize> {
    let dist = |a: usize, b: usize| {
        f.row(a)
            .iter()
            .zip(f.row(b))
            .fold(T::zero(), |m, (&u, &v)| m.max_of((u - v).abs()))
    };
    let farthest = |from: usize, members: &[usize]| {
        members.iter().copied().fold((from, T::zero()), |best, i| {
            let d = dist(from, i);
            if d > best.1 {
                (i, d)
            } else {
                best
            }
        })
    };
    let mut part = canonical_labels(part);
    let mut classes = part.iter().max().map_or(0, |&m| m + 1);
    while classes < k.min(part.len()) {
        let mut pick: Option<(usize, usize, T)> = None;
        for c in 0..classes {
            let members: Vec<usize> = (0..part.len()).filter(|&i| part[i] == c).collect();
            if members.len() < 2 {
                continue;
            }
            let (s1, _) = farthest(members[0], &members);
            let (_, spread) = farthest(s1, &members);
            if pick.as_ref().is_none_or(|p| spread > p.2) {
                pick = Some((c, s1, spread));
            }
        }
        let Some((c, s1, _)) = pick else { break };
        let members: Vec<usize> = (0..part.len()).filter(|&i| part[i] == c).collect();
        let (s2, _) = farthest(s1, &members);
        let mut moved = false;
        for &i in &members {
            if i != s1 && (i == s2 || dist(i, s2) < dist(i, s1)) {
                part[i] = classes;
                moved = true;
            }
        }
        if !moved {
            let last = *members.last().expect("class has two members");
            part[last] = classes;
        }
        classes += 1;
    }
    part
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectEntry<T> {
    pub n: usize,
    pub tau: T,
    pub fit: StepFunction<T>,
    /// Set when the previous level's fit was kept by the running minimum.
    pub carried: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectProfile<T> {
    pub entries: Vec<DefectEntry<T>>,
}

impl<T: Scalar> DefectProfile<T> {
    pub fn taus(&self) -> Vec<T> {
        self.entries.iter().map(|e| e.tau).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,tau")?;
        for e in &self.entries {
            writeln!(w, "{},{}", e.n, crate::io::fmt_f64(e.tau.to_f64_lossy()))?;
        }
        Ok(())
    }
}

/// τ defect of `f` against step functions with at most `N × N` blocks for
/// each `N` in `ns`, as a running minimum. Each level also starts from the
/// previous level's partition with its widest classes split.
pub fn defect_profile<T: Scalar>(
    f: &Kernel<T>,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
    ns: &[usize],
    opts: &FitOptions,
) -> Result<DefectProfile<T>> {
    f.check_spaces(x, y)?;
    if ns.is_empty() {
        return Err(Error::Empty);
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) || ns[0] == 0 {
        return Err(Error::InvalidParameter(
            "block counts must be positive and strictly increasing".into(),
        ));
    }
    let ft = f.transpose();
    let mut entries: Vec<DefectEntry<T>> = Vec::new();
    for &n in ns {
        let nx = n.min(f.rows());
        let ny = n.min(f.cols());
        let p = Problem::new(f, x, y, nx, ny);
        let init = entries.last().map(|prev| {
            (
                split_to(f, &prev.fit.row_part, nx),
                split_to(&ft, &prev.fit.col_part, ny),
            )
        });
        let fit = fit_impl(&p, init, opts)?;
        let entry = match entries.last() {
            Some(prev) if prev.tau <= fit.tau => DefectEntry {
                n,
                tau: prev.tau,
                fit: prev.fit.clone(),
                carried: true,
            },
            _ => DefectEntry {
                n,
                tau: fit.tau,
                fit: fit.step,
                carried: false,
            },
        };
        entries.push(entry);
    }
    Ok(DefectProfile { entries })
}
