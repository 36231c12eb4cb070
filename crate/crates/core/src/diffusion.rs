//! Ground-truth triggering model with two competing cascades.
//!
//! Each node `u` presamples a trigger set `A_u` of in-neighbors (here: one
//! in-neighbor picked uniformly, or the empty set when `u` has none); each
//! edge carries a Weibull-distributed transmission time. One joint sample of
//! all trigger sets and transmission times is a live-edge realization — a
//! [`WeightedSubgraph`] with edges `(v, u)` for `v` in `A_u` — after which
//! diffusion is deterministic: a node adopts the cascade of its earliest
//! arrival, with simultaneous cross-cascade arrivals resolved by
//! [`TiePolicy`].
//!
//! The prevention value of a protector `P` against an attacker `M` is the
//! expected number of nodes that the misinformation reaches without `P` but
//! not with `P`, estimated by Monte Carlo with common random realizations
//! across the with/without pair.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use rand::Rng;

use crate::graph::{Dist, Graph, NodeId, NodeSet, WeightedSubgraph};
use crate::rng::{self, ChaCha8Rng};

/// Resolution of simultaneous cross-cascade arrivals at one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiePolicy {
    /// Ties make the node misinformation-active (the default rule).
    MisinfoWins,
    /// Ties make the node positive-active (the alternate rule).
    PositiveWins,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffusionError {
    /// Attacker and protector seed sets must be disjoint.
    OverlappingSeeds,
    /// Weibull parameters or edge arity mismatched the graph.
    BadModelParams,
}

impl fmt::Display for DiffusionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiffusionError::OverlappingSeeds => write!(f, "attacker and protector seeds overlap"),
            DiffusionError::BadModelParams => write!(f, "model parameters do not match the graph"),
        }
    }
}

/// Per-node partition of the outcome of one diffusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffusionOutcome {
    pub m_active: NodeSet,
    pub p_active: NodeSet,
    pub inactive: NodeSet,
}

/// Inverse-CDF Weibull sample: `t = alpha * (-ln U)^(1/beta)`.
///
/// `u` is clamped into the open unit interval so the result is strictly
/// positive and finite.
pub fn weibull_inverse_cdf(alpha: f64, beta: f64, u: f64) -> f64 {
    let u = u.clamp(f64::EPSILON, 1.0 - f64::EPSILON);
    alpha * libm::pow(-libm::log(u), 1.0 / beta)
}

/// The hidden ground truth: a graph plus per-edge Weibull transmission
/// parameters, with the uniform single-in-neighbor trigger family.
#[derive(Debug, Clone, PartialEq)]
pub struct TriggeringModel {
    graph: Graph,
    /// Per-edge `(alpha, beta)`, indexed by the graph's edge ids.
    weibull: Vec<(f64, f64)>,
}

impl TriggeringModel {
    pub fn new(graph: Graph, weibull: Vec<(f64, f64)>) -> Result<Self, DiffusionError> {
        if weibull.len() != graph.edge_count()
            || weibull.iter().any(|&(a, b)| !(a >= 1.0) || !(b >= 1.0))
        {
            return Err(DiffusionError::BadModelParams);
        }
        Ok(TriggeringModel { graph, weibull })
    }

    /// Draw both Weibull parameters for every edge uniformly from
    /// `{1, ..., 10}`, the standard benchmark parameterization.
    pub fn random(graph: Graph, rng: &mut ChaCha8Rng) -> Self {
        let weibull = (0..graph.edge_count())
            .map(|_| (rng.gen_range(1..=10) as f64, rng.gen_range(1..=10) as f64))
            .collect();
        TriggeringModel { graph, weibull }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn weibull_params(&self) -> &[(f64, f64)] {
        &self.weibull
    }

    /// Sample one live-edge realization: each node picks one in-neighbor
    /// uniformly (none if it has no in-neighbors), and each live edge draws
    /// its transmission time from the edge's Weibull distribution.
    pub fn sample_realization(&self, rng: &mut ChaCha8Rng) -> WeightedSubgraph {
        let n = self.graph.node_count();
        let mut live = Vec::new();
        for u in 0..n {
            let in_nb = self.graph.in_neighbors(u);
            if in_nb.is_empty() {
                continue;
            }
            let (_, eidx) = in_nb[rng.gen_range(0..in_nb.len())];
            let (alpha, beta) = self.weibull[eidx];
            let w = weibull_inverse_cdf(alpha, beta, rng.gen::<f64>());
            live.push((eidx, w));
        }
        WeightedSubgraph::from_parent(&self.graph, live).expect("realization edges are parent edges")
    }

    /// Monte-Carlo estimate of the prevention value `f(M, P | ∅)`: the
    /// expected count of nodes misinformation-active without `P` but not
    /// with `P`. Uses common random realizations for the with/without pair
    /// of each sample; returns `(mean, standard error)`.
    pub fn prevention_value(
        &self,
        m: &NodeSet,
        p: &NodeSet,
        tie: TiePolicy,
        n_sims: usize,
        seed: u64,
    ) -> Result<(f64, f64), DiffusionError> {
        if !m.is_disjoint(p) {
            return Err(DiffusionError::OverlappingSeeds);
        }
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for i in 0..n_sims {
            let g = self.sample_realization(&mut rng::stream(seed, i as u64));
            let saved = saved_count(&g, m, p, tie)? as f64;
            sum += saved;
            sum_sq += saved * saved;
        }
        let n = n_sims as f64;
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        let std_err = if n_sims > 1 { libm::sqrt(var / (n - 1.0)) } else { 0.0 };
        Ok((mean, std_err))
    }
}

/// Event-driven two-cascade propagation on one realization.
///
/// Seeds are active at time 0. An activation at time `t` on node `u`
/// schedules each live out-edge `(u, v)` to fire at `t + weight(u, v)`; a
/// node adopts the cascade of its earliest arrival, with cross-cascade
/// simultaneity resolved by `tie`. Simultaneous same-cascade arrivals are a
/// no-op (the first arrival already fixed the state).
pub fn simulate(
    realization: &WeightedSubgraph,
    m: &NodeSet,
    p: &NodeSet,
    tie: TiePolicy,
) -> Result<DiffusionOutcome, DiffusionError> {
    if !m.is_disjoint(p) {
        return Err(DiffusionError::OverlappingSeeds);
    }
    let n = realization.node_count();

    // States: 0 = inactive, 1 = M-active, 2 = P-active.
    let mut state = vec![0u8; n];

    // Heap key (time, node, rank): at equal time and node, the winning
    // cascade under `tie` has rank 0 and pops first, which implements the
    // tie rule without collecting simultaneous arrivals explicitly.
    let rank = |is_m: bool| -> u8 {
        match (tie, is_m) {
            (TiePolicy::MisinfoWins, true) | (TiePolicy::PositiveWins, false) => 0,
            _ => 1,
        }
    };
    let mut heap: BinaryHeap<Reverse<(Dist, NodeId, u8, bool)>> = BinaryHeap::new();
    for v in m.iter() {
        heap.push(Reverse((Dist(0.0), v, rank(true), true)));
    }
    for v in p.iter() {
        heap.push(Reverse((Dist(0.0), v, rank(false), false)));
    }

    let mut last_time = 0.0f64;
    while let Some(Reverse((Dist(t), u, _, is_m))) = heap.pop() {
        debug_assert!(t >= last_time, "event times must be nondecreasing");
        last_time = t;
        if state[u] != 0 {
            continue;
        }
        state[u] = if is_m { 1 } else { 2 };
        let r = rank(is_m);
        for &(v, w) in realization.out_neighbors(u) {
            if state[v] == 0 {
                heap.push(Reverse((Dist(t + w), v, r, is_m)));
            }
        }
    }

    let collect = |tag: u8| -> NodeSet { (0..n).filter(|&v| state[v] == tag).collect() };
    Ok(DiffusionOutcome {
        m_active: collect(1),
        p_active: collect(2),
        inactive: collect(0),
    })
}

/// Nodes misinformation-active without `p` but not with `p`, on one shared
/// realization.
pub fn saved_count(
    realization: &WeightedSubgraph,
    m: &NodeSet,
    p: &NodeSet,
    tie: TiePolicy,
) -> Result<usize, DiffusionError> {
    let without = simulate(realization, m, &NodeSet::new(), tie)?;
    let with = simulate(realization, m, p, tie)?;
    Ok(without.m_active.iter().filter(|&v| !with.m_active.contains(v)).count())
}
