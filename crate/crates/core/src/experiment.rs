//! Data generation and evaluation: attacker sampling, the Monte-Carlo
//! ground-truth protector oracle, pair pools, graph-based baselines, and the
//! performance ratio.
//!
//! The oracle exploits the equivalence between event-driven diffusion and
//! shortest-distance comparison on a realization: the Monte-Carlo estimate of
//! the prevention value over a frozen set of realizations is exactly a
//! uniformly weighted distance-feature score over that set, so ground-truth
//! protectors come from the same lazy greedy used for prediction. Comparisons
//! within a greedy run are paired by construction (every candidate sees the
//! same realizations).

use alloc::vec::Vec;

use rand::Rng;

use crate::diffusion::{TiePolicy, TriggeringModel};
use crate::features::{DistributionTag, FeatureBank, ScoreModel};
use crate::graph::{Graph, NodeId, NodeSet};
use crate::inference::greedy_max_score;
use crate::rng::{self, ChaCha8Rng};
use crate::training::TrainingPair;

/// Attacker-size distribution: `clamp(⌊Pareto(exponent − 1, min 1)⌋, 1, max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackerConfig {
    /// Power-law exponent of the size distribution (the benchmark uses 2.5).
    pub exponent: f64,
    pub max_size: usize,
}

impl AttackerConfig {
    pub fn new(exponent: f64, max_size: usize) -> Self {
        assert!(exponent > 1.0, "need exponent > 1");
        assert!(max_size >= 1, "need max_size >= 1");
        AttackerConfig { exponent, max_size }
    }
}

/// Sample an attacker: power-law size, members uniform without replacement.
pub fn sample_attacker(graph: &Graph, cfg: AttackerConfig, rng: &mut ChaCha8Rng) -> NodeSet {
    let n = graph.node_count();
    assert!(n >= 1, "graph must have nodes");
    // Pareto(shape, scale 1) via inverse CDF: x = U^(-1/shape)
    let shape = cfg.exponent - 1.0;
    let u: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let raw = libm::pow(u, -1.0 / shape);
    let size = if raw.is_finite() { raw as usize } else { usize::MAX }
        .clamp(1, cfg.max_size.min(n));
    let idx = rand::seq::index::sample(rng, n, size);
    idx.into_iter().collect()
}

/// Ground-truth protector: lazy greedy on the shared-realization Monte-Carlo
/// estimate of the prevention value. Returns `min(k, |V ∖ M|)` nodes.
pub fn oracle_protector(
    model: &TriggeringModel,
    m: &NodeSet,
    k: usize,
    n_sims: usize,
    seed: u64,
    tie: TiePolicy,
) -> NodeSet {
    assert!(k >= 1 && n_sims >= 1);
    let realizations: Vec<_> =
        (0..n_sims).map(|i| model.sample_realization(&mut rng::stream(seed, i as u64))).collect();
    let bank = FeatureBank::from_parts(realizations, DistributionTag::ModelMatched, seed)
        .expect("n_sims >= 1");
    let weights = ScoreModel::uniform(n_sims, 1.0);
    greedy_max_score(&bank, &weights, m, k, tie)
}

/// Pool provenance: everything needed to regenerate the pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoolProvenance {
    pub seed: u64,
    pub oracle_sims: usize,
    pub attacker: AttackerConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairPool {
    pub pairs: Vec<TrainingPair>,
    pub provenance: PoolProvenance,
}

/// Generate pair `index` of the pool keyed by `seed`. Exposed separately so
/// pool generation can be distributed across workers without changing the
/// result: pair `i` always consumes streams `2i` (attacker) and `2i + 1`
/// (oracle realizations).
pub fn generate_pair(
    model: &TriggeringModel,
    cfg: AttackerConfig,
    oracle_sims: usize,
    seed: u64,
    index: usize,
    tie: TiePolicy,
) -> TrainingPair {
    let graph = model.graph();
    // leave room for at least one protector node
    let cfg = AttackerConfig { max_size: cfg.max_size.min(graph.node_count() - 1), ..cfg };
    let m = sample_attacker(graph, cfg, &mut rng::stream(seed, 2 * index as u64));
    let p = oracle_protector(model, &m, m.len(), oracle_sims, seed ^ (2 * index as u64 + 1), tie);
    TrainingPair::new(m, p).expect("oracle protector is nonempty and disjoint")
}

/// Generate `pool_size` iid attacker–protector pairs; deterministic per seed.
pub fn generate_pool(
    model: &TriggeringModel,
    pool_size: usize,
    cfg: AttackerConfig,
    oracle_sims: usize,
    seed: u64,
    tie: TiePolicy,
) -> PairPool {
    assert!(pool_size >= 1);
    assert!(model.graph().node_count() >= 2, "need room for both seed sets");
    let pairs =
        (0..pool_size).map(|i| generate_pair(model, cfg, oracle_sims, seed, i, tie)).collect();
    PairPool { pairs, provenance: PoolProvenance { seed, oracle_sims, attacker: cfg } }
}

/// Shuffle `0..len` and carve out disjoint train/test index sets.
pub fn split_pool(len: usize, train: usize, test: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    assert!(train + test <= len, "split larger than pool");
    let mut idx: Vec<usize> = (0..len).collect();
    use rand::seq::SliceRandom;
    idx.shuffle(&mut rng::root(seed));
    let test_part = idx.split_off(train).into_iter().take(test).collect();
    (idx, test_part)
}

/// `k` uniform nodes from `V ∖ M`.
pub fn baseline_rand(graph: &Graph, m: &NodeSet, k: usize, rng: &mut ChaCha8Rng) -> NodeSet {
    let pool: Vec<NodeId> = (0..graph.node_count()).filter(|&v| !m.contains(v)).collect();
    let k = k.min(pool.len());
    rand::seq::index::sample(rng, pool.len(), k).into_iter().map(|i| pool[i]).collect()
}

/// `k` highest out-degree nodes of `V ∖ M`, ties by smallest id.
pub fn baseline_high_degree(graph: &Graph, m: &NodeSet, k: usize) -> NodeSet {
    let mut pool: Vec<NodeId> = (0..graph.node_count()).filter(|&v| !m.contains(v)).collect();
    pool.sort_by_key(|&v| (core::cmp::Reverse(graph.out_degree(v)), v));
    pool.into_iter().take(k).collect()
}

/// `k` nodes sampled uniformly from the out-neighbors of `M` (minus `M`),
/// topped up with uniform nodes from the rest of `V ∖ M` when there are
/// fewer than `k` neighbors.
pub fn baseline_proximity(graph: &Graph, m: &NodeSet, k: usize, rng: &mut ChaCha8Rng) -> NodeSet {
    let neighbors: NodeSet = m
        .iter()
        .flat_map(|u| graph.out_neighbors(u).iter().map(|&(v, _)| v))
        .filter(|&v| !m.contains(v))
        .collect();
    let nb: Vec<NodeId> = neighbors.iter().collect();
    let take = k.min(nb.len());
    let mut chosen: NodeSet =
        rand::seq::index::sample(rng, nb.len(), take).into_iter().map(|i| nb[i]).collect();
    if chosen.len() < k {
        let rest: Vec<NodeId> = (0..graph.node_count())
            .filter(|&v| !m.contains(v) && !chosen.contains(v))
            .collect();
        let fill = (k - chosen.len()).min(rest.len());
        for i in rand::seq::index::sample(rng, rest.len(), fill) {
            chosen.insert(rest[i]);
        }
    }
    chosen
}

/// One pair's evaluated ratio: the raw paired-estimator value plus the
/// clamped value actually reported. `valid == false` marks a degenerate
/// denominator (flag-and-exclude rather than silent clamping).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioOutcome {
    pub raw: f64,
    pub clamped: f64,
    pub valid: bool,
}

pub const RATIO_DENOM_FLOOR: f64 = 1e-9;

/// Paired performance ratio `f(M, P_pred | ∅) / f(M, P_true | ∅)`: both
/// prevention values are estimated on the same realizations keyed by `seed`.
pub fn performance_ratio(
    model: &TriggeringModel,
    m: &NodeSet,
    p_pred: &NodeSet,
    p_true: &NodeSet,
    tie: TiePolicy,
    n_sims: usize,
    seed: u64,
) -> RatioOutcome {
    let (num, _) = model.prevention_value(m, p_pred, tie, n_sims, seed).expect("disjoint pair");
    let (den, _) = model.prevention_value(m, p_true, tie, n_sims, seed).expect("disjoint pair");
    if den < RATIO_DENOM_FLOOR {
        if num < RATIO_DENOM_FLOOR {
            // nothing to prevent and nothing prevented: perfect by convention
            return RatioOutcome { raw: 1.0, clamped: 1.0, valid: true };
        }
        return RatioOutcome { raw: f64::INFINITY, clamped: 1.0, valid: false };
    }
    let raw = num / den;
    RatioOutcome { raw, clamped: raw.clamp(0.0, 1.0), valid: true }
}

/// Sample mean and (population-corrected) standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var))
}
