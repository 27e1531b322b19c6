#![allow(dead_code)]

use proptest::prelude::*;
use vck::{CellSet, DiscreteSpace, Kernel, Rational};

pub fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, n)
}

pub fn space(w: &[f64]) -> DiscreteSpace<f64> {
    DiscreteSpace::new(w).unwrap()
}

/// Small integer weights as an exact space.
pub fn exact_space(w: &[u8]) -> DiscreteSpace<Rational> {
    let w: Vec<Rational> = w.iter().map(|&v| Rational::from_integer(v as i64 + 1)).collect();
    DiscreteSpace::new(&w).unwrap()
}

pub fn mask(r: usize, c: usize, bits: &[bool]) -> CellSet {
    CellSet::new(r, c, bits.to_vec()).unwrap()
}

/// A grid shape with weights on both sides and `k` companion payloads of
/// length `r·c` drawn by `cell`.
pub fn grid<S: Strategy + Clone>(
    max_r: usize,
    max_c: usize,
    k: usize,
    cell: S,
) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<Vec<S::Value>>)>
where
    S::Value: std::fmt::Debug + Clone,
{
    (1..=max_r, 1..=max_c).prop_flat_map(move |(r, c)| {
        (
            weights(r),
            weights(c),
            prop::collection::vec(prop::collection::vec(cell.clone(), r * c), k),
        )
    })
}

pub fn kernel(r: usize, c: usize, v: &[f64]) -> Kernel<f64> {
    Kernel::new(r, c, v.to_vec()).unwrap()
}

/// Values on a coarse lattice so that ties and equal breakpoints occur.
pub fn lattice() -> impl Strategy<Value = f64> + Clone {
    (-8i32..=8).prop_map(|k| k as f64 / 8.0)
}
