//! Energy-distance two-sample test on vectorized matrices.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::md::{trial_rng, MDSample};
use crate::error::{Error, Result};

pub const DEFAULT_PERMUTATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub statistic: f64,
    pub p_value: f64,
    pub permutations: usize,
    /// Seed of the permutation shuffles, derived from the two sample seeds.
    pub seed: u64,
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Upper triangle of the pooled distance matrix, row by row.
struct Pooled {
    n: usize,
    tri: Vec<f64>,
    total: f64,
}

impl Pooled {
    fn new(points: &[&[f64]]) -> Self {
        let n = points.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| (i + 1..n).map(|j| euclid(points[i], points[j])).collect())
            .collect();
        let tri: Vec<f64> = rows.into_iter().flatten().collect();
        let total = tri.iter().sum();
        Pooled { n, tri, total }
    }

    /// V-statistic `2 E|X−Y| − E|X−X'| − E|Y−Y'|` for the split given by
    /// `in_first`.
    fn statistic(&self, in_first: &[bool], n1: usize) -> f64 {
        let n2 = self.n - n1;
        let (mut s11, mut s22) = (0.0, 0.0);
        let mut off = 0;
        for i in 0..self.n {
            let row = &self.tri[off..off + self.n - i - 1];
            off += row.len();
            let gi = in_first[i];
            for (d, &gj) in row.iter().zip(&in_first[i + 1..]) {
                if gi == gj {
                    if gi {
                        s11 += d;
                    } else {
                        s22 += d;
                    }
                }
            }
        }
        let s12 = self.total - s11 - s22;
        let (a, b) = (n1 as f64, n2 as f64);
        (2.0 * s12 / (a * b) - 2.0 * s11 / (a * a) - 2.0 * s22 / (b * b)).max(0.0)
    }
}

fn sorted(s: &MDSample) -> Vec<&Vec<f64>> {
    let mut v: Vec<&Vec<f64>> = s.matrices.iter().collect();
    v.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    v
}

/// Energy distance between two matrix samples with a permutation p-value
/// `(1 + #{permuted ≥ observed}) / (1 + permutations)`.
pub fn compare_md(s1: &MDSample, s2: &MDSample, permutations: usize) -> Result<Comparison> {
    if s1.k != s2.k {
        return Err(Error::ShapeMismatch {
            expected: (s1.k, s1.k),
            actual: (s2.k, s2.k),
        });
    }
    let seed = s1.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ s2.seed.rotate_left(17) ^ 0xC0FF_EE00;
    if sorted(s1) == sorted(s2) {
        return Ok(Comparison {
            statistic: 0.0,
            p_value: 1.0,
            permutations,
            seed,
        });
    }
    let points: Vec<&[f64]> = s1
        .matrices
        .iter()
        .chain(&s2.matrices)
        .map(|m| m.as_slice())
        .collect();
    let pooled = Pooled::new(&points);
    let n1 = s1.matrices.len();
    let labels: Vec<bool> = (0..pooled.n).map(|i| i < n1).collect();
    let observed = pooled.statistic(&labels, n1);
    let exceed = (0..permutations)
        .into_par_iter()
        .filter(|&p| {
            let mut rng = trial_rng(seed, p as u64);
            let mut perm = labels.clone();
            perm.shuffle(&mut rng);
            pooled.statistic(&perm, n1) >= observed
        })
        .count();
    Ok(Comparison {
        statistic: observed,
        p_value: (1 + exceed) as f64 / (1 + permutations) as f64,
        permutations,
        seed,
    })
}
