use std::io::Write;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::scalar::Scalar;
use crate::space::DiscreteSpace;

/// `trials` independent `k × k` windows `f(x_i, y_j)` with i.i.d. points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MDSample {
    pub k: usize,
    pub trials: usize,
    /// Row-major `k × k` matrices, one per trial.
    pub matrices: Vec<Vec<f64>>,
    pub seed: u64,
}

impl MDSample {
    pub fn new(k: usize, matrices: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        if k == 0 || matrices.is_empty() {
            return Err(Error::Empty);
        }
        for (t, m) in matrices.iter().enumerate() {
            if m.len() != k * k {
                return Err(Error::ShapeMismatch {
                    expected: (k, k),
                    actual: (m.len(), 1),
                });
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(t));
            }
        }
        Ok(MDSample {
            k,
            trials: matrices.len(),
            matrices,
            seed,
        })
    }

    /// Flat CSV `trial,i,j,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "trial,i,j,value")?;
        for (t, m) in self.matrices.iter().enumerate() {
            for (p, v) in m.iter().enumerate() {
                writeln!(w, "{t},{},{},{}", p / self.k, p % self.k, crate::io::fmt_f64(*v))?;
            }
        }
        Ok(())
    }
}

pub(crate) fn sampler<T: Scalar>(space: &DiscreteSpace<T>) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(space.weights().iter().map(|w| w.to_f64_lossy()))
        .map_err(|e| Error::InvalidParameter(format!("weights: {e}")))
}

/// Random stream of one trial: the seed fixes the generator and the trial
/// index selects the stream.
pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws the points of one trial: `k` rows from `μ`, then `k` columns from `ν`.
pub(crate) fn draw_points(
    rows: &WeightedIndex<f64>,
    cols: &WeightedIndex<f64>,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, Vec<usize>) {
    let xs = (0..k).map(|_| rows.sample(rng)).collect();
    let ys = (0..k).map(|_| cols.sample(rng)).collect();
    (xs, ys)
}

/// Empirical matrix distribution of `f` under i.i.d. sampling of points.
/// Trials run in parallel on independent streams, so the result depends
/// only on the seed.
pub fn sample_md<T: Scalar>(
    f: &Kernel<T>,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<MDSample> {
    f.check_spaces(x, y)?;
    if k == 0 || trials == 0 {
        return Err(Error::InvalidParameter("k and trials must be positive".into()));
    }
    let rows = sampler(x)?;
    let cols = sampler(y)?;
    let matrices = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let (xs, ys) = draw_points(&rows, &cols, k, &mut rng);
            xs.iter()
                .flat_map(|&i| ys.iter().map(move |&j| (i, j)))
                .map(|(i, j)| f.get(i, j).to_f64_lossy())
                .collect()
        })
        .collect();
    MDSample::new(k, matrices, seed)
}
