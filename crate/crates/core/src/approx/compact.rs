//! Greedy ε-net evidence for precompactness of the row family.
//!
//! Success certifies that after discarding at most `ε` of row and column
//! mass, the remaining row profiles are covered by the reported centers in
//! sup distance. A refusal only says the greedy search gave up.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::scalar::Scalar;
use crate::space::DiscreteSpace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactnessCertificate<T> {
    pub kept_rows: Vec<usize>,
    pub kept_cols: Vec<usize>,
    pub net_centers: Vec<usize>,
    /// Largest distance from a kept row to its nearest center.
    pub radius: T,
    /// Removed (row, column) mass.
    pub removed_mass: (T, T),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum CompactnessOutcome<T> {
    Certified(CompactnessCertificate<T>),
    /// The attempt with the smallest net; its net exceeds the budget.
    Refused { best: CompactnessCertificate<T>, rounds: usize },
}

fn sup_dist<T: Scalar>(f: &Kernel<T>, a: usize, b: usize, cols: &[usize]) -> T {
    cols.iter()
        .fold(T::zero(), |m, &j| m.max_of((f.get(a, j) - f.get(b, j)).abs()))
}

impl<T: Scalar> CompactnessCertificate<T> {
    pub fn verify(&self, f: &Kernel<T>, x: &DiscreteSpace<T>, y: &DiscreteSpace<T>, eps: T) -> Result<()> {
        let fail = |m: &str| Err(Error::Certificate(m.to_string()));
        let slack = T::tol(1e-12);
        let removed_rows = T::one() - x.measure(self.kept_rows.iter().copied());
        let removed_cols = T::one() - y.measure(self.kept_cols.iter().copied());
        if removed_rows > eps + slack || removed_cols > eps + slack {
            return fail("removed mass exceeds eps");
        }
        if self.radius > eps {
            return fail("radius exceeds eps");
        }
        if self.net_centers.iter().any(|c| !self.kept_rows.contains(c)) {
            return fail("net center outside the kept rows");
        }
        for &i in &self.kept_rows {
            let d = self
                .net_centers
                .iter()
                .map(|&c| sup_dist(f, i, c, &self.kept_cols))
                .fold(None, |m: Option<T>, d| Some(m.map_or(d, |m| m.min_of(d))));
            if d.is_none_or(|d| d > self.radius + slack) {
                return fail("kept row not covered by the net");
            }
        }
        Ok(())
    }
}

struct Net<T> {
    centers: Vec<usize>,
    /// Distance of each kept row to its nearest center, with that center.
    nearest: Vec<(T, usize)>,
}

/// Farthest-point net: keeps adding the kept row farthest from the current
/// centers while that distance exceeds `eps`. With `cap`, stops after that
/// many centers.
fn farthest_point_net<T: Scalar>(f: &Kernel<T>, rows: &[usize], cols: &[usize], eps: T, cap: Option<usize>) -> Net<T> {
    let first = rows[0];
    let mut centers = vec![first];
    let mut nearest: Vec<(T, usize)> = rows.iter().map(|&i| (sup_dist(f, i, first, cols), first)).collect();
    loop {
        if cap.is_some_and(|c| centers.len() >= c) {
            break;
        }
        let (k, &(d, _)) = nearest
            .iter()
            .enumerate()
            .fold(None, |best: Option<(usize, &(T, usize))>, (k, e)| match best {
                Some((_, b)) if b.0 >= e.0 => best,
                _ => Some((k, e)),
            })
            .expect("nonempty rows");
        if d <= eps {
            break;
        }
        let c = rows[k];
        centers.push(c);
        for (e, &i) in nearest.iter_mut().zip(rows) {
            let d = sup_dist(f, i, c, cols);
            if d < e.0 {
                *e = (d, c);
            }
        }
    }
    Net { centers, nearest }
}

pub fn compactness_certificate<T: Scalar>(
    f: &Kernel<T>,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
    eps: T,
    net_budget: usize,
) -> Result<CompactnessOutcome<T>> {
    f.check_spaces(x, y)?;
    if !(eps > T::zero() && eps < T::one()) {
        return Err(Error::InvalidParameter("eps must lie in (0, 1)".into()));
    }
    if net_budget == 0 {
        return Err(Error::InvalidParameter("net budget must be positive".into()));
    }
    let mut rows: Vec<usize> = (0..f.rows()).collect();
    let mut cols: Vec<usize> = (0..f.cols()).collect();
    let (mut gone_rows, mut gone_cols) = (T::zero(), T::zero());
    let mut best: Option<CompactnessCertificate<T>> = None;
    let mut rounds = 0;
    loop {
        rounds += 1;
        let net = farthest_point_net(f, &rows, &cols, eps, None);
        let cert = CompactnessCertificate {
            kept_rows: rows.clone(),
            kept_cols: cols.clone(),
            net_centers: net.centers.clone(),
            radius: net.nearest.iter().fold(T::zero(), |m, e| m.max_of(e.0)),
            removed_mass: (gone_rows, gone_cols),
        };
        if net.centers.len() <= net_budget {
            return Ok(CompactnessOutcome::Certified(cert));
        }
        if best.as_ref().is_none_or(|b| cert.net_centers.len() < b.net_centers.len()) {
            best = Some(cert);
        }

        // what the budgeted net leaves uncovered drives the removals
        let capped = farthest_point_net(f, &rows, &cols, eps, Some(net_budget));
        let mut score = vec![T::zero(); f.cols()];
        for (&(d, c), &i) in capped.nearest.iter().zip(&rows) {
            if d <= eps {
                continue;
            }
            let j = cols
                .iter()
                .copied()
                .fold((cols[0], T::zero()), |b, j| {
                    let v = (f.get(i, j) - f.get(c, j)).abs();
                    if v > b.1 {
                        (j, v)
                    } else {
                        b
                    }
                })
                .0;
            score[j] += x.weight(i) * (d - eps);
        }
        let mut removed = false;
        if cols.len() > 1 {
            let pick = cols
                .iter()
                .copied()
                .filter(|&j| score[j] > T::zero() && gone_cols + y.weight(j) <= eps)
                .fold(None, |b: Option<usize>, j| match b {
                    Some(b) if score[b] >= score[j] => Some(b),
                    _ => Some(j),
                });
            if let Some(j) = pick {
                cols.retain(|&c| c != j);
                gone_cols += y.weight(j);
                removed = true;
            }
        }
        if rows.len() > 1 {
            let pick = capped
                .nearest
                .iter()
                .zip(&rows)
                .filter(|(e, &i)| e.0 > eps && gone_rows + x.weight(i) <= eps)
                .fold(None, |b: Option<(T, usize)>, (e, &i)| match b {
                    Some(b) if b.0 >= e.0 => Some(b),
                    _ => Some((e.0, i)),
                });
            if let Some((_, i)) = pick {
                rows.retain(|&r| r != i);
                gone_rows += x.weight(i);
                removed = true;
            }
        }
        if !removed {
            return Ok(CompactnessOutcome::Refused {
                best: best.expect("at least one attempt"),
                rounds,
            });
        }
    }
}
