//! Dinic max-flow over any [`Scalar`].
//!
//! Residual capacities at or below `eps` count as saturated, which keeps
//! floating-point runs from chasing round-off; exact types use `eps = 0`.

use std::collections::VecDeque;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
struct Edge<T> {
    to: usize,
    cap: T,
    rev: usize,
}

#[derive(Debug, Clone)]
pub struct Dinic<T> {
    graph: Vec<Vec<Edge<T>>>,
    level: Vec<i32>,
    iter: Vec<usize>,
    eps: T,
    /// (from, position in graph[from], original capacity)
    arcs: Vec<(usize, usize, T)>,
}

/// Handle to an arc added with [`Dinic::add_edge`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcId(usize);

impl<T: Scalar> Dinic<T> {
    pub fn new(nodes: usize, eps: T) -> Self {
        Self {
            graph: vec![Vec::new(); nodes],
            level: vec![-1; nodes],
            iter: vec![0; nodes],
            eps,
            arcs: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: T) -> ArcId {
        let (rf, rt) = (self.graph[to].len(), self.graph[from].len());
        self.graph[from].push(Edge { to, cap, rev: rf });
        self.graph[to].push(Edge {
            to: from,
            cap: T::zero(),
            rev: rt,
        });
        self.arcs.push((from, rt, cap));
        ArcId(self.arcs.len() - 1)
    }

    /// Flow currently carried by an arc.
    pub fn flow_on(&self, arc: ArcId) -> T {
        let (from, pos, cap) = self.arcs[arc.0];
        cap - self.graph[from][pos].cap
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for e in &self.graph[v] {
                if e.cap > self.eps && self.level[e.to] < 0 {
                    self.level[e.to] = self.level[v] + 1;
                    queue.push_back(e.to);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, t: usize, limit: T) -> T {
        if v == t {
            return limit;
        }
        while self.iter[v] < self.graph[v].len() {
            let e = self.graph[v][self.iter[v]];
            if e.cap > self.eps && self.level[v] < self.level[e.to] {
                let pushed = self.dfs(e.to, t, limit.min_of(e.cap));
                if pushed > T::zero() {
                    let i = self.iter[v];
                    self.graph[v][i].cap -= pushed;
                    self.graph[e.to][e.rev].cap += pushed;
                    return pushed;
                }
            }
            self.iter[v] += 1;
        }
        T::zero()
    }

    /// Pushes a maximum flow from `s` to `t` and returns its value.
    pub fn max_flow(&mut self, s: usize, t: usize, infinity: T) -> T {
        let mut total = T::zero();
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return total;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, infinity);
                if f <= self.eps {
                    break;
                }
                total += f;
            }
        }
    }

    /// Nodes reachable from `s` through arcs with residual capacity above
    /// `eps`: the source side of a minimum cut once the flow is maximal.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.graph.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for e in &self.graph[v] {
                if e.cap > self.eps && !seen[e.to] {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        seen
    }
}
