//! Deterministic generators for the standard test objects.
//!
//! Continuum kernels on `[0,1]²` are sampled at cell centers
//! `((i + ½)/n, (j + ½)/n)` of a uniform `n × n` grid.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::{CellSet, Kernel};
use crate::scalar::Scalar;

/// Closed-form C¹ functions on `[0,1]²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothFn {
    /// `sin(2πx)·cos(2πy)`
    SinCos,
    /// `x·y`
    Product,
    /// `exp(−(x − y)²)`
    Gaussian,
    /// `(x + y)/2`
    Mean,
}

impl SmoothFn {
    pub fn eval(self, x: f64, y: f64) -> f64 {
        match self {
            SmoothFn::SinCos => (2.0 * PI * x).sin() * (2.0 * PI * y).cos(),
            SmoothFn::Product => x * y,
            SmoothFn::Gaussian => (-(x - y) * (x - y)).exp(),
            SmoothFn::Mean => 0.5 * (x + y),
        }
    }

    /// A Lipschitz bound for the distance `|x − x'| + |y − y'|`.
    pub fn lipschitz(self) -> f64 {
        match self {
            SmoothFn::SinCos => 2.0 * PI,
            SmoothFn::Product => 1.0,
            SmoothFn::Gaussian => 2.0 / std::f64::consts::E.sqrt(),
            SmoothFn::Mean => 0.5,
        }
    }
}

impl FromStr for SmoothFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sincos" => Ok(SmoothFn::SinCos),
            "xy" | "product" => Ok(SmoothFn::Product),
            "gaussian" => Ok(SmoothFn::Gaussian),
            "mean" => Ok(SmoothFn::Mean),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    /// `χ_{x ≥ y}`.
    Triangle,
    Smooth(SmoothFn),
    /// `values[i][j] = v[(i − j) mod n]`.
    Circulant(Vec<f64>),
    /// Seeded `Σ_{k<rank} φ_k ⊗ ψ_k` with entries uniform in `[−1, 1]`.
    LowRank { rank: usize },
    /// Explicit factors `Σ φ_k ⊗ ψ_k`.
    Factors(Vec<(Vec<f64>, Vec<f64>)>),
    /// i.i.d. uniform `[0, 1]`.
    Random,
}

pub fn cell_center(i: usize, n: usize) -> f64 {
    (i as f64 + 0.5) / n as f64
}

/// Samples `profile(k / n)` for `k = 0..n`, the generating vector of a
/// circulant kernel `F(x, y) = profile((x − y) mod 1)`.
pub fn sample_profile(n: usize, profile: impl Fn(f64) -> f64) -> Vec<f64> {
    (0..n).map(|k| profile(k as f64 / n as f64)).collect()
}

pub fn gen_kernel<T: Scalar>(kind: &KernelKind, n: usize, seed: u64) -> Result<Kernel<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let lit = T::lit;
    let k = match kind {
        KernelKind::Triangle => {
            Kernel::from_fn(n, n, |i, j| if i >= j { T::one() } else { T::zero() })
        }
        KernelKind::Smooth(s) => Kernel::from_fn(n, n, |i, j| {
            lit(s.eval(cell_center(i, n), cell_center(j, n)))
        }),
        KernelKind::Circulant(v) => {
            if v.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "circulant vector has length {}, expected {n}",
                    v.len()
                )));
            }
            Kernel::from_fn(n, n, |i, j| lit(v[(i + n - j) % n]))
        }
        KernelKind::LowRank { rank } => {
            if *rank == 0 || *rank > n {
                return Err(Error::InvalidParameter(format!(
                    "rank {rank} out of range 1..={n}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let factors: Vec<(Vec<f64>, Vec<f64>)> = (0..*rank)
                .map(|_| {
                    let phi = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                    let psi = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                    (phi, psi)
                })
                .collect();
            outer_sum(&factors, n, n)?.cast()
        }
        KernelKind::Factors(factors) => {
            if factors.len() > n {
                return Err(Error::InvalidParameter(format!(
                    "rank {} exceeds n = {n}",
                    factors.len()
                )));
            }
            outer_sum(factors, n, n)?.cast()
        }
        KernelKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let values = (0..n * n).map(|_| lit(rng.gen::<f64>())).collect();
            Kernel::new(n, n, values)?
        }
    };
    Ok(k)
}

fn outer_sum(factors: &[(Vec<f64>, Vec<f64>)], rows: usize, cols: usize) -> Result<Kernel<f64>> {
    if factors.is_empty() {
        return Err(Error::InvalidParameter("no factors".into()));
    }
    for (phi, psi) in factors {
        if phi.len() != rows || psi.len() != cols {
            return Err(Error::ShapeMismatch {
                expected: (rows, cols),
                actual: (phi.len(), psi.len()),
            });
        }
    }
    Ok(Kernel::from_fn(rows, cols, |i, j| {
        factors.iter().map(|(phi, psi)| phi[i] * psi[j]).sum()
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetKind {
    Diagonal,
    /// `{0 < |i − j| ≤ k}` when strict, `{|i − j| ≤ k}` otherwise.
    Band { k: usize, strict: bool },
    Rectangle { rows: Vec<usize>, cols: Vec<usize> },
    /// i.i.d. Bernoulli(`p`) cells.
    Random { p: f64, seed: u64 },
}

pub fn gen_set(kind: &SetKind, n: usize) -> Result<CellSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    match kind {
        SetKind::Diagonal => Ok(CellSet::from_fn(n, n, |i, j| i == j)),
        SetKind::Band { k, strict } => {
            if *k >= n {
                return Err(Error::InvalidParameter(format!("band width {k} must be < n = {n}")));
            }
            Ok(CellSet::from_fn(n, n, |i, j| {
                let d = i.abs_diff(j);
                d <= *k && (!strict || d > 0)
            }))
        }
        SetKind::Rectangle { rows, cols } => {
            if let Some(&bad) = rows.iter().chain(cols).find(|&&i| i >= n) {
                return Err(Error::InvalidParameter(format!("index {bad} out of range")));
            }
            let mut s = CellSet::empty(n, n);
            for &i in rows {
                for &j in cols {
                    s.insert(i, j);
                }
            }
            Ok(s)
        }
        SetKind::Random { p, seed } => {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok(CellSet::from_fn(n, n, |_, _| rng.gen_bool(*p)))
        }
    }
}

/// Random mask with independent rectangular dimensions.
pub fn random_mask(rows: usize, cols: usize, p: f64, seed: u64) -> CellSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CellSet::from_fn(rows, cols, |_, _| rng.gen_bool(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(k: &Kernel<f64>) -> Vec<Vec<f64>> {
        (0..k.rows()).map(|i| k.row(i).to_vec()).collect()
    }

    #[test]
    fn triangle_two() {
        let k = gen_kernel::<f64>(&KernelKind::Triangle, 2, 0).unwrap();
        assert_eq!(rows(&k), vec![vec![1.0, 0.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn circulant_two() {
        let k = gen_kernel::<f64>(&KernelKind::Circulant(vec![0.0, 1.0]), 2, 0).unwrap();
        assert_eq!(rows(&k), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(gen_kernel::<f64>(&KernelKind::Circulant(vec![0.0]), 2, 0).is_err());
    }

    #[test]
    fn explicit_rank_one_is_outer_product() {
        let kind = KernelKind::Factors(vec![(vec![1.0, 2.0], vec![1.0, 2.0])]);
        let k = gen_kernel::<f64>(&kind, 2, 0).unwrap();
        assert_eq!(rows(&k), vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
    }

    #[test]
    fn rank_bound_enforced() {
        assert!(gen_kernel::<f64>(&KernelKind::LowRank { rank: 3 }, 2, 0).is_err());
        assert!(gen_kernel::<f64>(&KernelKind::LowRank { rank: 0 }, 2, 0).is_err());
    }

    #[test]
    fn seeded_generators_are_bit_identical() {
        for kind in [KernelKind::Random, KernelKind::LowRank { rank: 3 }] {
            let a = gen_kernel::<f64>(&kind, 16, 42).unwrap();
            let b = gen_kernel::<f64>(&kind, 16, 42).unwrap();
            let c = gen_kernel::<f64>(&kind, 16, 43).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
        let s1 = gen_set(&SetKind::Random { p: 0.3, seed: 7 }, 20).unwrap();
        let s2 = gen_set(&SetKind::Random { p: 0.3, seed: 7 }, 20).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn smooth_samples_cell_centers() {
        let k = gen_kernel::<f64>(&KernelKind::Smooth(SmoothFn::Product), 2, 0).unwrap();
        assert_eq!(rows(&k), vec![vec![0.0625, 0.1875], vec![0.1875, 0.5625]]);
    }

    #[test]
    fn set_examples() {
        assert_eq!(
            gen_set(&SetKind::Diagonal, 3).unwrap(),
            CellSet::from_cells(3, 3, &[(0, 0), (1, 1), (2, 2)])
        );
        assert_eq!(
            gen_set(&SetKind::Band { k: 1, strict: true }, 3).unwrap(),
            CellSet::from_cells(3, 3, &[(0, 1), (1, 0), (1, 2), (2, 1)])
        );
        assert_eq!(
            gen_set(&SetKind::Rectangle { rows: vec![0], cols: vec![0, 1] }, 2).unwrap(),
            CellSet::from_cells(2, 2, &[(0, 0), (0, 1)])
        );
        assert_eq!(gen_set(&SetKind::Band { k: 1, strict: false }, 3).unwrap().count(), 7);
    }

    #[test]
    fn set_parameter_errors() {
        assert!(gen_set(&SetKind::Band { k: 3, strict: true }, 3).is_err());
        assert!(gen_set(&SetKind::Rectangle { rows: vec![2], cols: vec![0] }, 2).is_err());
    }
}
