//! Exact minimization of submodular binary energies by s-t min-cut.
//!
//! Variable `p` is labelled 1 when its node ends on the source side of the
//! cut. A pairwise term `w·s_p·s_q` with `w ≤ 0` is rewritten as
//! `w·s_p + (-w)·s_p·(1 - s_q)`: the first part joins the unary of `p`, the
//! second becomes an arc `p → q` of capacity `-w`, cut exactly when
//! `s_p = 1, s_q = 0`. Each net unary `a_p` then becomes a single terminal
//! arc, `p → sink` with capacity `a_p` if positive, or `source → p` with
//! capacity `-a_p` plus `a_p` moved into the offset if negative.
//!
//! Max-flow is Dinic's algorithm on `f64` capacities. Residuals at or below
//! `1e-12` times the largest capacity count as saturated.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::energy::{BinaryEnergy, Labeling};
use crate::error::{Error, Result};

const RELATIVE_EPS: f64 = 1e-12;
const UNREACHED: usize = usize::MAX;

#[derive(Debug, Clone, Copy)]
struct Arc {
    from: usize,
    to: usize,
    capacity: f64,
    residual: f64,
}

/// A forward arc with its capacity and the flow it carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcFlow {
    pub from: usize,
    pub to: usize,
    pub capacity: f64,
    pub flow: f64,
}

/// s-t network encoding a submodular energy. Nodes `0..n` are variables,
/// `n` is the source and `n + 1` the sink. Arcs are stored in forward /
/// reverse pairs at indices `2k` and `2k + 1`.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    num_vars: usize,
    arcs: Vec<Arc>,
    adjacency: Vec<Vec<usize>>,
    offset: f64,
}

/// Outcome of [`FlowNetwork::max_flow`].
#[derive(Debug, Clone, PartialEq)]
pub struct MaxFlow {
    pub value: f64,
    /// Variables reachable from the source in the final residual graph.
    pub source_side: Labeling,
}

impl FlowNetwork {
    /// Empty network over `num_vars` variable nodes.
    pub fn new(num_vars: usize) -> Self {
        FlowNetwork { num_vars, arcs: Vec::new(), adjacency: vec![Vec::new(); num_vars + 2], offset: 0.0 }
    }

    /// Builds the network for a submodular energy; fails on any `w > 0`.
    pub fn from_energy(e: &BinaryEnergy) -> Result<Self> {
        let n = e.num_vars();
        let mut net = FlowNetwork::new(n);
        let mut net_unary = e.unary().to_vec();
        for pair in e.pairs() {
            if !pair.is_submodular() {
                return Err(Error::NotSubmodular { p: pair.p, q: pair.q, w: pair.w });
            }
            net_unary[pair.p] += pair.w;
            if pair.w < 0.0 {
                net.add_arc(pair.p, pair.q, -pair.w);
            }
        }
        let mut offset = e.constant();
        for (p, &a) in net_unary.iter().enumerate() {
            if a > 0.0 {
                net.add_arc(p, net.sink(), a);
            } else if a < 0.0 {
                net.add_arc(net.source(), p, -a);
                offset += a;
            }
        }
        net.offset = offset;
        Ok(net)
    }

    /// Adds a directed arc with its zero-capacity reverse partner.
    pub fn add_arc(&mut self, from: usize, to: usize, capacity: f64) {
        debug_assert!(capacity >= 0.0);
        let k = self.arcs.len();
        self.arcs.push(Arc { from, to, capacity, residual: capacity });
        self.arcs.push(Arc { from: to, to: from, capacity: 0.0, residual: 0.0 });
        self.adjacency[from].push(k);
        self.adjacency[to].push(k + 1);
    }

    pub fn add_offset(&mut self, c: f64) {
        self.offset += c;
    }

    #[inline]
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.num_vars + 2
    }

    #[inline]
    pub fn source(&self) -> usize {
        self.num_vars
    }

    #[inline]
    pub fn sink(&self) -> usize {
        self.num_vars + 1
    }

    /// Constant energy not represented by any arc.
    #[inline]
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Forward arcs with their current flow.
    pub fn arcs(&self) -> impl Iterator<Item = ArcFlow> + '_ {
        self.arcs.chunks_exact(2).map(|pair| ArcFlow {
            from: pair[0].from,
            to: pair[0].to,
            capacity: pair[0].capacity,
            flow: pair[1].residual,
        })
    }

    /// Capacity of the cut that puts the source plus every variable
    /// labelled 1 on the source side.
    pub fn cut_cost(&self, s: &Labeling) -> Result<f64> {
        if s.len() != self.num_vars {
            return Err(Error::Dimension { expected: self.num_vars, found: s.len() });
        }
        let on_source_side = |v: usize| v == self.source() || (v < self.num_vars && s.get(v));
        Ok(self.arcs().filter(|a| on_source_side(a.from) && !on_source_side(a.to)).map(|a| a.capacity).sum())
    }

    fn epsilon(&self) -> f64 {
        let max_cap = self.arcs.iter().map(|a| a.capacity).fold(0.0, f64::max);
        RELATIVE_EPS * max_cap
    }

    /// Runs Dinic's algorithm to completion and returns the flow value with
    /// the minimal source set of a minimum cut.
    pub fn max_flow(&mut self) -> MaxFlow {
        let eps = self.epsilon();
        let mut level = vec![UNREACHED; self.num_nodes()];
        let mut next_arc = vec![0usize; self.num_nodes()];
        let mut value = 0.0;
        while self.build_levels(eps, &mut level) {
            next_arc.iter_mut().for_each(|x| *x = 0);
            value += self.blocking_flow(eps, &mut level, &mut next_arc);
        }
        let reached = self.residual_reach(eps);
        MaxFlow { value, source_side: Labeling::from_bools(reached[..self.num_vars].to_vec()) }
    }

    fn build_levels(&self, eps: f64, level: &mut [usize]) -> bool {
        level.iter_mut().for_each(|l| *l = UNREACHED);
        let mut queue = VecDeque::new();
        level[self.source()] = 0;
        queue.push_back(self.source());
        while let Some(u) = queue.pop_front() {
            for &k in &self.adjacency[u] {
                let arc = &self.arcs[k];
                if arc.residual > eps && level[arc.to] == UNREACHED {
                    level[arc.to] = level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        level[self.sink()] != UNREACHED
    }

    fn blocking_flow(&mut self, eps: f64, level: &mut [usize], next_arc: &mut [usize]) -> f64 {
        let (source, sink) = (self.source(), self.sink());
        let mut total = 0.0;
        let mut path: Vec<usize> = Vec::new();
        let mut u = source;
        loop {
            if u == sink {
                let bottleneck = path.iter().map(|&k| self.arcs[k].residual).fold(f64::INFINITY, f64::min);
                for &k in &path {
                    self.arcs[k].residual -= bottleneck;
                    self.arcs[k ^ 1].residual += bottleneck;
                }
                total += bottleneck;
                path.clear();
                u = source;
                continue;
            }
            let mut advanced = false;
            while next_arc[u] < self.adjacency[u].len() {
                let k = self.adjacency[u][next_arc[u]];
                let arc = &self.arcs[k];
                if arc.residual > eps && level[arc.to] != UNREACHED && level[arc.to] == level[u] + 1 {
                    path.push(k);
                    u = arc.to;
                    advanced = true;
                    break;
                }
                next_arc[u] += 1;
            }
            if !advanced {
                // dead end: remove u from the level graph and retreat
                level[u] = UNREACHED;
                match path.pop() {
                    None => return total,
                    Some(k) => {
                        u = self.arcs[k].from;
                        next_arc[u] += 1;
                    }
                }
            }
        }
    }

    fn residual_reach(&self, eps: f64) -> Vec<bool> {
        let mut seen = vec![false; self.num_nodes()];
        let mut stack = vec![self.source()];
        seen[self.source()] = true;
        while let Some(u) = stack.pop() {
            for &k in &self.adjacency[u] {
                let arc = &self.arcs[k];
                if arc.residual > eps && !seen[arc.to] {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        seen
    }
}

/// Network for a submodular energy; see [`FlowNetwork::from_energy`].
pub fn build_flow_network(e: &BinaryEnergy) -> Result<FlowNetwork> {
    FlowNetwork::from_energy(e)
}

/// Global minimum of a submodular energy. The returned value is
/// `e.eval(&labeling)`; ties between minimum cuts resolve to the smallest
/// source set, so unconstrained variables get label 0.
pub fn minimize_submodular(e: &BinaryEnergy) -> Result<(Labeling, f64)> {
    let mut net = FlowNetwork::from_energy(e)?;
    let labeling = net.max_flow().source_side;
    let value = e.eval_unchecked(&labeling);
    Ok((labeling, value))
}
