//! Capacity-constrained transportation by successive shortest paths.
//!
//! Ships mass from rows (supply `μ`) to columns (demand cap `ν`) along
//! arcs of profit `c(i,j)`, stopping as soon as the next augmenting path
//! would not increase the profit. Unshipped mass is the slack of the
//! relaxation. Dijkstra runs on reduced costs with Johnson potentials.

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
struct Arc<T> {
    to: usize,
    cap: T,
    cost: T,
    rev: usize,
}

struct Network<T> {
    adj: Vec<Vec<Arc<T>>>,
}

impl<T: Scalar> Network<T> {
    fn add(&mut self, from: usize, to: usize, cap: T, cost: T) -> (usize, usize) {
        let (pf, pt) = (self.adj[from].len(), self.adj[to].len());
        self.adj[from].push(Arc {
            to,
            cap,
            cost,
            rev: pt,
        });
        self.adj[to].push(Arc {
            to: from,
            cap: T::zero(),
            cost: -cost,
            rev: pf,
        });
        (from, pf)
    }
}

/// Maximum-profit plan `λ ≥ 0` with row sums ≤ `μ` and column sums ≤ `ν`.
pub(crate) fn max_profit_plan<T: Scalar>(
    profit: &Kernel<T>,
    mu: &[T],
    nu: &[T],
) -> Result<Vec<(usize, usize, T)>> {
    let (r, c) = profit.shape();
    let source = 0;
    let sink = r + c + 1;
    let n = r + c + 2;
    let scale = profit.max_abs().max_of(T::one());
    let tol = T::tol(1e-12) * scale;
    let cap_eps = T::tol(1e-15);

    let mut net = Network {
        adj: vec![Vec::new(); n],
    };
    for (i, &w) in mu.iter().enumerate() {
        net.add(source, 1 + i, w, T::zero());
    }
    let mut middle = Vec::new();
    for i in 0..r {
        for j in 0..c {
            let p = profit.get(i, j);
            if p > T::zero() {
                middle.push((i, j, net.add(1 + i, 1 + r + j, T::two(), -p)));
            }
        }
    }
    for (j, &w) in nu.iter().enumerate() {
        net.add(1 + r + j, sink, w, T::zero());
    }

    // DAG shortest distances make every initial reduced cost nonnegative
    let mut pot = vec![T::zero(); n];
    for j in 0..c {
        pot[1 + r + j] = (0..r)
            .map(|i| -profit.get(i, j))
            .fold(T::zero(), |m, v| m.min_of(v));
    }
    pot[sink] = (0..c).map(|j| pot[1 + r + j]).fold(T::zero(), |m, v| m.min_of(v));

    let limit = 50 * (n + middle.len()) * (n + 1) + 1000;
    let mut rounds = 0;
    loop {
        rounds += 1;
        if rounds > limit {
            return Err(Error::Solver("min-cost flow did not terminate".into()));
        }
        // dense Dijkstra
        let mut dist: Vec<Option<T>> = vec![None; n];
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut done = vec![false; n];
        dist[source] = Some(T::zero());
        loop {
            let mut u = None;
            for v in 0..n {
                if done[v] {
                    continue;
                }
                if let Some(dv) = dist[v] {
                    if u.is_none_or(|(_, du)| dv < du) {
                        u = Some((v, dv));
                    }
                }
            }
            let Some((u, du)) = u else { break };
            done[u] = true;
            for (k, a) in net.adj[u].iter().enumerate() {
                if a.cap <= cap_eps || done[a.to] {
                    continue;
                }
                let rc = (a.cost + pot[u] - pot[a.to]).max_of(T::zero());
                let cand = du + rc;
                if dist[a.to].is_none_or(|d| cand < d) {
                    dist[a.to] = Some(cand);
                    prev[a.to] = Some((u, k));
                }
            }
        }
        if dist[sink].is_none() {
            break;
        }
        let far = dist.iter().flatten().fold(T::zero(), |m, &d| m.max_of(d));
        for v in 0..n {
            pot[v] += dist[v].unwrap_or(far);
        }
        // true cost of the path is pot[sink] - pot[source]
        let path_cost = pot[sink] - pot[source];
        if path_cost >= -tol {
            break;
        }
        let mut push: Option<T> = None;
        let mut v = sink;
        while let Some((u, k)) = prev[v] {
            let cap = net.adj[u][k].cap;
            push = Some(push.map_or(cap, |p| p.min_of(cap)));
            v = u;
        }
        let push = push.expect("sink reached by a nonempty path");
        let mut v = sink;
        while let Some((u, k)) = prev[v] {
            net.adj[u][k].cap -= push;
            let rev = net.adj[u][k].rev;
            net.adj[v][rev].cap += push;
            v = u;
        }
    }

    let eps = T::tol(1e-15);
    Ok(middle
        .into_iter()
        .filter_map(|(i, j, (from, pos))| {
            let arc = net.adj[from][pos];
            let flow = T::two() - arc.cap;
            (flow > eps).then_some((i, j, flow))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn picks_the_profitable_matching() {
        let c = Kernel::from_rows(vec![vec![1.0, 3.0], vec![2.0, 1.0]]).unwrap();
        let plan = max_profit_plan(&c, &[0.5, 0.5], &[0.5, 0.5]).unwrap();
        let value: f64 = plan.iter().map(|&(i, j, m)| c.get(i, j) * m).sum();
        assert!((value - 2.5).abs() < 1e-12);
    }

    #[test]
    fn zero_profit_ships_nothing() {
        let c = Kernel::constant(3, 2, 0.0);
        assert!(max_profit_plan(&c, &[0.2, 0.3, 0.5], &[0.5, 0.5]).unwrap().is_empty());
    }

    #[test]
    fn exact_rational_capacities_respected() {
        type Q = Ratio<i64>;
        let c = Kernel::from_fn(2, 3, |i, j| Q::from_integer((i + 2 * j) as i64 % 3 + 1));
        let mu = [Q::new(1, 3), Q::new(2, 3)];
        let nu = [Q::new(1, 6), Q::new(1, 2), Q::new(1, 3)];
        let plan = max_profit_plan(&c, &mu, &nu).unwrap();
        let mut rows = [Q::from_integer(0); 2];
        let mut cols = [Q::from_integer(0); 3];
        for &(i, j, m) in &plan {
            rows[i] += m;
            cols[j] += m;
        }
        assert!(rows.iter().zip(&mu).all(|(a, b)| a <= b));
        assert!(cols.iter().zip(&nu).all(|(a, b)| a <= b));
    }
}
