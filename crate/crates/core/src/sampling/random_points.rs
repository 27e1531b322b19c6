//! Finite-sample surrogate for the random-points criterion.
//!
//! Sampled rows are clustered greedily in increasing grid order: a row joins
//! the nearest class whose per-column range stays within `ε/2`, opens a new
//! class while fewer than `N` exist, and is an outlier otherwise. Columns
//! are then clustered the same way against the non-outlier rows. The test
//! passes when the outlier share is below `ε` and every block oscillates by
//! less than `ε`.

use serde::{Deserialize, Serialize};

use super::md::{draw_points, sampler, trial_rng};
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::scalar::Scalar;
use crate::space::DiscreteSpace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomPointsParams {
    pub eps: f64,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

/// Classes of the sampled points; class 0 holds the outliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterPartition {
    pub row_points: Vec<usize>,
    pub col_points: Vec<usize>,
    pub row_classes: Vec<usize>,
    pub col_classes: Vec<usize>,
    /// Share of indices `s` with `x_s` or `y_s` an outlier.
    pub outlier_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomPointsOutcome {
    pub pass: bool,
    pub partition: ClusterPartition,
    /// Largest within-block oscillation among non-outlier points.
    pub max_oscillation: f64,
    /// Whether the supplied partition was reused.
    pub warm_started: bool,
}

/// Greedy envelope clustering of the items (rows of `vals`, each a profile
/// over the active coordinates).
fn cluster(vals: &[Vec<f64>], order: &[usize], active: &[usize], half: f64, n: usize) -> Vec<usize> {
    let mut class = vec![0usize; vals.len()];
    let mut env: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for &s in order {
        let v = &vals[s];
        let mut best: Option<(usize, f64)> = None;
        for (a, (lo, hi)) in env.iter().enumerate() {
            let width = active
                .iter()
                .map(|&t| hi[t].max(v[t]) - lo[t].min(v[t]))
                .fold(0.0, f64::max);
            if width <= half && best.is_none_or(|b| width < b.1) {
                best = Some((a, width));
            }
        }
        match best {
            Some((a, _)) => {
                let (lo, hi) = &mut env[a];
                for &t in active {
                    lo[t] = lo[t].min(v[t]);
                    hi[t] = hi[t].max(v[t]);
                }
                class[s] = a + 1;
            }
            None if env.len() < n => {
                env.push((v.clone(), v.clone()));
                class[s] = env.len();
            }
            None => class[s] = 0,
        }
    }
    class
}

fn outlier_fraction(p: &ClusterPartition) -> f64 {
    let m = p.row_classes.len();
    let bad = (0..m)
        .filter(|&s| p.row_classes[s] == 0 || p.col_classes[s] == 0)
        .count();
    bad as f64 / m as f64
}

fn max_oscillation(vals: &[Vec<f64>], p: &ClusterPartition) -> f64 {
    let nr = p.row_classes.iter().max().copied().unwrap_or(0);
    let nc = p.col_classes.iter().max().copied().unwrap_or(0);
    let mut lo = vec![f64::INFINITY; nr * nc];
    let mut hi = vec![f64::NEG_INFINITY; nr * nc];
    for (s, &a) in p.row_classes.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (t, &k) in p.col_classes.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let b = (a - 1) * nc + (k - 1);
            lo[b] = lo[b].min(vals[s][t]);
            hi[b] = hi[b].max(vals[s][t]);
        }
    }
    lo.iter()
        .zip(&hi)
        .filter(|(l, _)| l.is_finite())
        .map(|(l, h)| h - l)
        .fold(0.0, f64::max)
}

/// Runs the criterion at `eps`. A `warm` partition over the same sampled
/// points is kept when it already passes, which makes a sweep over
/// increasing `eps` monotone.
pub fn random_points_test<T: Scalar>(
    f: &Kernel<T>,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
    params: &RandomPointsParams,
    warm: Option<&ClusterPartition>,
) -> Result<RandomPointsOutcome> {
    f.check_spaces(x, y)?;
    let RandomPointsParams { eps, n, m, seed } = *params;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    if n == 0 || m < n {
        return Err(Error::InvalidParameter("need m >= N >= 1".into()));
    }
    let mut rng = trial_rng(seed, 0);
    let (xs, ys) = draw_points(&sampler(x)?, &sampler(y)?, m, &mut rng);
    let vals: Vec<Vec<f64>> = xs
        .iter()
        .map(|&i| ys.iter().map(|&j| f.get(i, j).to_f64_lossy()).collect())
        .collect();

    if let Some(w) = warm {
        if w.row_points == xs && w.col_points == ys {
            let osc = max_oscillation(&vals, w);
            if w.outlier_fraction < eps && osc < eps {
                return Ok(RandomPointsOutcome {
                    pass: true,
                    partition: w.clone(),
                    max_oscillation: osc,
                    warm_started: true,
                });
            }
        }
    }

    let by_index = |pts: &[usize]| {
        let mut o: Vec<usize> = (0..pts.len()).collect();
        o.sort_by_key(|&s| (pts[s], s));
        o
    };
    let all: Vec<usize> = (0..m).collect();
    let row_classes = cluster(&vals, &by_index(&xs), &all, eps / 2.0, n);
    let kept: Vec<usize> = (0..m).filter(|&s| row_classes[s] != 0).collect();
    let cols_t: Vec<Vec<f64>> = (0..m).map(|t| (0..m).map(|s| vals[s][t]).collect()).collect();
    let col_classes = cluster(&cols_t, &by_index(&ys), &kept, eps / 2.0, n);
    let mut partition = ClusterPartition {
        row_points: xs,
        col_points: ys,
        row_classes,
        col_classes,
        outlier_fraction: 0.0,
    };
    partition.outlier_fraction = outlier_fraction(&partition);
    let osc = max_oscillation(&vals, &partition);
    Ok(RandomPointsOutcome {
        pass: partition.outlier_fraction < eps && osc < eps,
        partition,
        max_oscillation: osc,
        warm_started: false,
    })
}
