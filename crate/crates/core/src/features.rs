//! Random-subgraph distance features and the learned scoring function.
//!
//! A feature bank is a set of `K` weighted subgraphs `g_1 ... g_K` sampled
//! once from a fixed distribution. For an attacker `M` and candidate
//! protector `S`, the feature of subgraph `g` counts the nodes that `M`
//! reaches in `g` but that `S` reaches strictly earlier under shortest-path
//! distances:
//!
//! ```text
//! f_g(M, S) = #{ v : dis_g(S, v) < dis_g(M, v), dis_g(M, v) != ∞ }
//! ```
//!
//! (with `<=` replacing `<` under the positive-wins tie rule, matching the
//! event simulation on the same subgraph exactly). The score of `S` is the
//! nonnegative-weighted sum over the bank, which for fixed `M` is a monotone
//! submodular function of `S` — the basis for greedy inference.
//!
//! [`AttackerContext`] supports the greedy loops: it caches the attacker
//! distances per subgraph once and maintains the protector distance frontier
//! incrementally, so a marginal gain costs a bounded label-setting pass from
//! the candidate instead of a full recomputation. Memory is `O(K·|V|)` per
//! context, the dominant footprint of training.

use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use rand::Rng;

use crate::diffusion::{weibull_inverse_cdf, TiePolicy, TriggeringModel};
use crate::graph::{Dist, Graph, NodeId, NodeSet, WeightedSubgraph};
use crate::rng::{self, ChaCha8Rng};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeatureError {
    EmptyBank,
    WeightDimensionMismatch { bank: usize, weights: usize },
    NegativeWeight(usize),
    AlreadyCommitted(NodeId),
    BadDistribution(String),
}

impl fmt::Display for FeatureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureError::EmptyBank => write!(f, "feature bank must hold at least one subgraph"),
            FeatureError::WeightDimensionMismatch { bank, weights } => {
                write!(f, "bank has {bank} subgraphs but {weights} weights given")
            }
            FeatureError::NegativeWeight(i) => write!(f, "weight {i} is negative"),
            FeatureError::AlreadyCommitted(v) => write!(f, "node {v} already committed"),
            FeatureError::BadDistribution(s) => write!(f, "bad feature distribution: {s}"),
        }
    }
}

/// Distribution a bank is sampled from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeatureDistribution<'m> {
    /// Each parent edge kept independently with probability `p`, constant
    /// weight `w` on kept edges.
    IidEdges { p: f64, w: f64 },
    /// Cheat features: edge `(u, v)` kept with probability `1/|N_v⁻|`,
    /// weight drawn from the edge's Weibull distribution.
    ModelMatched(&'m TriggeringModel),
}

/// Serializable descriptor of the distribution a bank was built from.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionTag {
    IidEdges { p: f64, w: f64 },
    ModelMatched,
}

/// `K` frozen weighted subgraphs; immutable after construction and
/// reproducible from `(graph, distribution, seed, K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBank {
    subgraphs: Vec<WeightedSubgraph>,
    tag: DistributionTag,
    seed: u64,
}

impl FeatureBank {
    pub fn build(
        graph: &Graph,
        dist: FeatureDistribution<'_>,
        k: usize,
        seed: u64,
    ) -> Result<Self, FeatureError> {
        if k == 0 {
            return Err(FeatureError::EmptyBank);
        }
        let tag = match dist {
            FeatureDistribution::IidEdges { p, w } => {
                if !(p > 0.0 && p <= 1.0) || !(w > 0.0) {
                    return Err(FeatureError::BadDistribution(String::from(
                        "need 0 < p <= 1 and w > 0",
                    )));
                }
                DistributionTag::IidEdges { p, w }
            }
            FeatureDistribution::ModelMatched(_) => DistributionTag::ModelMatched,
        };
        let subgraphs = (0..k)
            .map(|i| Self::sample_one(graph, &dist, &mut rng::stream(seed, i as u64)))
            .collect();
        Ok(FeatureBank { subgraphs, tag, seed })
    }

    /// Rebuild a bank from previously serialized subgraphs.
    pub fn from_parts(subgraphs: Vec<WeightedSubgraph>, tag: DistributionTag, seed: u64) -> Result<Self, FeatureError> {
        if subgraphs.is_empty() {
            return Err(FeatureError::EmptyBank);
        }
        Ok(FeatureBank { subgraphs, tag, seed })
    }

    fn sample_one(graph: &Graph, dist: &FeatureDistribution<'_>, rng: &mut ChaCha8Rng) -> WeightedSubgraph {
        match *dist {
            FeatureDistribution::IidEdges { p, w } => {
                let live = graph
                    .edges()
                    .iter()
                    .enumerate()
                    .filter(|_| rng.gen::<f64>() < p)
                    .map(|(e, _)| (e, w))
                    .collect::<Vec<_>>();
                WeightedSubgraph::from_parent(graph, live).expect("live edges from parent")
            }
            FeatureDistribution::ModelMatched(model) => {
                let params = model.weibull_params();
                let live = graph
                    .edges()
                    .iter()
                    .enumerate()
                    .filter_map(|(e, &(_, v))| {
                        let keep_p = 1.0 / graph.in_degree(v) as f64;
                        if rng.gen::<f64>() < keep_p {
                            let (alpha, beta) = params[e];
                            Some((e, weibull_inverse_cdf(alpha, beta, rng.gen::<f64>())))
                        } else {
                            None
                        }
                    })
                    .collect::<Vec<_>>();
                WeightedSubgraph::from_parent(graph, live).expect("live edges from parent")
            }
        }
    }

    pub fn len(&self) -> usize {
        self.subgraphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgraphs.is_empty()
    }

    pub fn subgraphs(&self) -> &[WeightedSubgraph] {
        &self.subgraphs
    }

    pub fn tag(&self) -> &DistributionTag {
        &self.tag
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Nonnegative weight vector over a bank; the learned strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreModel {
    w: Vec<f64>,
}

impl ScoreModel {
    pub fn new(w: Vec<f64>) -> Result<Self, FeatureError> {
        if let Some(i) = w.iter().position(|&x| x < 0.0) {
            return Err(FeatureError::NegativeWeight(i));
        }
        Ok(ScoreModel { w })
    }

    pub fn zeros(k: usize) -> Self {
        ScoreModel { w: vec![0.0; k] }
    }

    pub fn uniform(k: usize, value: f64) -> Self {
        ScoreModel { w: vec![value; k] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

fn beats(tie: TiePolicy, dist_s: f64, dist_m: f64) -> bool {
    dist_m.is_finite()
        && match tie {
            TiePolicy::MisinfoWins => dist_s < dist_m,
            TiePolicy::PositiveWins => dist_s <= dist_m,
        }
}

/// Count of nodes reached by `m` in `g` but reached earlier by `s`.
pub fn distance_feature(g: &WeightedSubgraph, m: &NodeSet, s: &NodeSet, tie: TiePolicy) -> usize {
    let dist_m = g.multi_source_shortest_dist(m);
    let dist_s = g.multi_source_shortest_dist(s);
    (0..g.node_count()).filter(|&v| beats(tie, dist_s[v], dist_m[v])).count()
}

/// Per-subgraph distance features for the whole bank.
pub fn feature_vector(bank: &FeatureBank, m: &NodeSet, s: &NodeSet, tie: TiePolicy) -> Vec<usize> {
    bank.subgraphs().iter().map(|g| distance_feature(g, m, s, tie)).collect()
}

pub fn feature_vector_f64(bank: &FeatureBank, m: &NodeSet, s: &NodeSet, tie: TiePolicy) -> Vec<f64> {
    feature_vector(bank, m, s, tie).into_iter().map(|c| c as f64).collect()
}

/// `w^T G(M, S)`.
pub fn score(bank: &FeatureBank, model: &ScoreModel, m: &NodeSet, s: &NodeSet, tie: TiePolicy) -> f64 {
    assert_eq!(bank.len(), model.len(), "bank/weights dimension mismatch");
    bank.subgraphs()
        .iter()
        .zip(model.weights())
        .map(|(g, &w)| w * distance_feature(g, m, s, tie) as f64)
        .sum()
}

/// Per-subgraph incremental state for one attacker.
struct SubgraphState {
    dist_m: Vec<f64>,
    dist_s: Vec<f64>,
    saved: usize,
}

/// Incremental marginal-gain support for greedy protector selection.
///
/// Attacker distances are computed once per subgraph at construction;
/// protector distances only ever decrease as nodes are committed.
pub struct AttackerContext<'b> {
    bank: &'b FeatureBank,
    tie: TiePolicy,
    m: NodeSet,
    committed: NodeSet,
    states: Vec<SubgraphState>,
    // scratch for non-mutating gain evaluation: tentative distance overlay
    // (NAN = untouched) plus the touched list for cheap reset
    overlay: Vec<f64>,
    touched: Vec<NodeId>,
}

impl<'b> AttackerContext<'b> {
    pub fn new(bank: &'b FeatureBank, m: NodeSet, tie: TiePolicy) -> Self {
        let n = bank.subgraphs().first().map_or(0, |g| g.node_count());
        let states = bank
            .subgraphs()
            .iter()
            .map(|g| SubgraphState {
                dist_m: g.multi_source_shortest_dist(&m),
                dist_s: vec![f64::INFINITY; g.node_count()],
                saved: 0,
            })
            .collect();
        AttackerContext {
            bank,
            tie,
            m,
            committed: NodeSet::new(),
            states,
            overlay: vec![f64::NAN; n],
            touched: Vec::new(),
        }
    }

    pub fn attacker(&self) -> &NodeSet {
        &self.m
    }

    pub fn committed(&self) -> &NodeSet {
        &self.committed
    }

    pub fn tie(&self) -> TiePolicy {
        self.tie
    }

    /// Current per-subgraph saved counts.
    pub fn counts(&self) -> Vec<usize> {
        self.states.iter().map(|st| st.saved).collect()
    }

    /// Current score under `weights`.
    pub fn score(&self, weights: &[f64]) -> f64 {
        self.states.iter().zip(weights).map(|(st, &w)| w * st.saved as f64).sum()
    }

    /// `score(M, S ∪ {v}) − score(M, S)` without mutating the context.
    ///
    /// Needs `&mut self` only for internal scratch buffers.
    pub fn marginal_gain(&mut self, weights: &[f64], v: NodeId) -> f64 {
        let mut total = 0.0;
        for i in 0..self.states.len() {
            let w = weights[i];
            if w != 0.0 {
                total += w * self.gain_count_in(i, v) as f64;
            }
        }
        total
    }

    /// Per-subgraph saved-count increments for adding `v`, regardless of
    /// weights.
    pub fn marginal_counts(&mut self, v: NodeId) -> Vec<usize> {
        (0..self.states.len()).map(|i| self.gain_count_in(i, v)).collect()
    }

    fn gain_count_in(&mut self, idx: usize, v: NodeId) -> usize {
        let g = &self.bank.subgraphs()[idx];
        let st = &self.states[idx];
        let tie = self.tie;
        let mut newly_saved = 0usize;

        // bounded label-setting pass from v over the overlay
        debug_assert!(self.touched.is_empty());
        let mut heap: BinaryHeap<Reverse<(Dist, NodeId)>> = BinaryHeap::new();
        if 0.0 < st.dist_s[v] {
            self.overlay[v] = 0.0;
            self.touched.push(v);
            heap.push(Reverse((Dist(0.0), v)));
        }
        while let Some(Reverse((Dist(d), u))) = heap.pop() {
            if d > self.overlay[u] {
                continue;
            }
            for &(x, w) in g.out_neighbors(u) {
                let nd = d + w;
                let cur = if self.overlay[x].is_nan() { st.dist_s[x] } else { self.overlay[x] };
                if nd < cur {
                    if self.overlay[x].is_nan() {
                        self.touched.push(x);
                    }
                    self.overlay[x] = nd;
                    heap.push(Reverse((Dist(nd), x)));
                }
            }
        }
        for &u in &self.touched {
            let new_d = self.overlay[u];
            if beats(tie, new_d, st.dist_m[u]) && !beats(tie, st.dist_s[u], st.dist_m[u]) {
                newly_saved += 1;
            }
            self.overlay[u] = f64::NAN;
        }
        self.touched.clear();
        newly_saved
    }

    /// Add `v` to the protector frontier, relaxing each subgraph's
    /// protector distances in place.
    pub fn commit(&mut self, v: NodeId) -> Result<(), FeatureError> {
        if !self.committed.insert(v) {
            return Err(FeatureError::AlreadyCommitted(v));
        }
        let tie = self.tie;
        for (g, st) in self.bank.subgraphs().iter().zip(self.states.iter_mut()) {
            let mut heap: BinaryHeap<Reverse<(Dist, NodeId)>> = BinaryHeap::new();
            if 0.0 < st.dist_s[v] {
                let was_saved = beats(tie, st.dist_s[v], st.dist_m[v]);
                st.dist_s[v] = 0.0;
                if !was_saved && beats(tie, 0.0, st.dist_m[v]) {
                    st.saved += 1;
                }
                heap.push(Reverse((Dist(0.0), v)));
            }
            while let Some(Reverse((Dist(d), u))) = heap.pop() {
                if d > st.dist_s[u] {
                    continue;
                }
                for &(x, w) in g.out_neighbors(u) {
                    let nd = d + w;
                    if nd < st.dist_s[x] {
                        let was_saved = beats(tie, st.dist_s[x], st.dist_m[x]);
                        st.dist_s[x] = nd;
                        if !was_saved && beats(tie, nd, st.dist_m[x]) {
                            st.saved += 1;
                        }
                        heap.push(Reverse((Dist(nd), x)));
                    }
                }
            }
        }
        Ok(())
    }
}
