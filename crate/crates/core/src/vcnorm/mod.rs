//! The separable-bound norm
//!
//! ```text
//! ‖f‖ = min { Σ a μ + Σ b ν : a, b ≥ 0, a(i) + b(j) ≥ |f(i,j)| }
//!     = max { Σ |f| λ : λ ≥ 0, row sums ≤ μ, column sums ≤ ν }
//! ```
//!
//! computed from both sides by two unrelated solvers: a revised simplex
//! supplies the bound `(a, b)` and a min-cost-flow transportation solve
//! supplies the plan `λ = h · (μ ⊗ ν)`. The certificate carries both and
//! their gap.

mod dual;
mod mcf;
mod oracle;
mod simplex;

use serde::{Deserialize, Serialize};

pub use dual::{markov_apply, me_norm, pairing, MarkovOutput};
pub use oracle::{vc_norm_oracle, ORACLE_MAX_CELLS};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::plan::PlanMeasure;
use crate::scalar::Scalar;
use crate::space::DiscreteSpace;

pub const BOUND_TOL: f64 = 1e-9;
pub const GAP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableBound<T> {
    pub a: Vec<T>,
    pub b: Vec<T>,
}

impl<T: Scalar> SeparableBound<T> {
    pub fn cost(&self, x: &DiscreteSpace<T>, y: &DiscreteSpace<T>) -> T {
        x.integrate(&self.a) + y.integrate(&self.b)
    }

    /// Largest violation `|f(i,j)| − a(i) − b(j)`, or zero.
    pub fn max_violation(&self, f: &Kernel<T>) -> T {
        let mut worst = T::zero();
        for i in 0..f.rows() {
            for j in 0..f.cols() {
                worst = worst.max_of(f.get(i, j).abs() - self.a[i] - self.b[j]);
            }
        }
        worst
    }

    /// Raises `b` where round-off left a cell uncovered.
    fn repair(&mut self, c: &Kernel<T>) {
        for v in self.a.iter_mut().chain(self.b.iter_mut()) {
            *v = v.max_of(T::zero());
        }
        for j in 0..c.cols() {
            let need = (0..c.rows())
                .map(|i| c.get(i, j) - self.a[i])
                .fold(T::zero(), |m, v| m.max_of(v));
            self.b[j] = self.b[j].max_of(need);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormCertificate<T> {
    pub value: T,
    pub primal: SeparableBound<T>,
    /// The measure `h · (μ ⊗ ν)` of the optimal subbistochastic density.
    pub dual: PlanMeasure<T>,
    pub gap: T,
}

impl<T: Scalar> NormCertificate<T> {
    /// `Σ |f| dλ`, the value certified by the dual side.
    pub fn dual_value(&self, f: &Kernel<T>) -> T {
        self.dual
            .entries()
            .iter()
            .map(|&(i, j, m)| f.get(i, j).abs() * m)
            .sum()
    }

    /// Density `h(i,j) = λ(i,j) / (μ(i) ν(j))` of the dual witness.
    pub fn density(&self, x: &DiscreteSpace<T>, y: &DiscreteSpace<T>) -> Vec<(usize, usize, T)> {
        self.dual
            .entries()
            .iter()
            .map(|&(i, j, m)| (i, j, m / (x.weight(i) * y.weight(j))))
            .collect()
    }

    pub fn verify(&self, f: &Kernel<T>, x: &DiscreteSpace<T>, y: &DiscreteSpace<T>) -> Result<()> {
        let fail = |m: String| Err(Error::Certificate(m));
        let tol = T::tol(BOUND_TOL);
        if self.primal.a.iter().chain(&self.primal.b).any(|&v| v < T::zero()) {
            return fail("negative separable bound".into());
        }
        if self.primal.max_violation(f) > tol {
            return fail("separable bound does not dominate |f|".into());
        }
        if !self.dual.is_nonnegative() {
            return fail("negative dual density".into());
        }
        let rows = self.dual.row_var();
        let cols = self.dual.col_var();
        // Σ_j h(i,j) ν(j) ≤ 1 ⇔ row mass ≤ μ(i)
        for (i, (&m, &w)) in rows.iter().zip(x.weights()).enumerate() {
            if m > w * (T::one() + tol) {
                return fail(format!("dual density not subbistochastic at row {i}"));
            }
        }
        for (j, (&m, &w)) in cols.iter().zip(y.weights()).enumerate() {
            if m > w * (T::one() + tol) {
                return fail(format!("dual density not subbistochastic at column {j}"));
            }
        }
        let primal = self.primal.cost(x, y);
        let gap = primal - self.dual_value(f);
        let gap_tol = T::tol(GAP_TOL) * self.value.max_of(T::one());
        if (gap - self.gap).abs() > gap_tol || gap.abs() > gap_tol {
            return fail(format!("duality gap {gap} exceeds tolerance"));
        }
        if (primal - self.value).abs() > gap_tol {
            return fail("reported value differs from the primal cost".into());
        }
        Ok(())
    }
}

/// Separable-bound norm with both witnesses.
pub fn vc_norm<T: Scalar>(
    f: &Kernel<T>,
    x: &DiscreteSpace<T>,
    y: &DiscreteSpace<T>,
) -> Result<NormCertificate<T>> {
    f.check_spaces(x, y)?;
    let c = f.abs();
    let (r, _) = c.shape();

    let lp = simplex::solve(&c, x.weights(), y.weights())?;
    let mut primal = SeparableBound {
        a: lp.duals[..r].to_vec(),
        b: lp.duals[r..].to_vec(),
    };
    primal.repair(&c);

    let plan = mcf::max_profit_plan(&c, x.weights(), y.weights())?;
    let dual = PlanMeasure::new(f.rows(), f.cols(), plan, false)?;

    let value = primal.cost(x, y);
    let mut cert = NormCertificate {
        value,
        primal,
        dual,
        gap: T::zero(),
    };
    cert.gap = value - cert.dual_value(f);
    Ok(cert)
}
