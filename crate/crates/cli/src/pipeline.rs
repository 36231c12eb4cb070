//! Orchestration: parallel pool generation, parallel-separation training,
//! and the end-to-end experiment runner.
//!
//! Parallelism never changes results: every task derives its RNG stream from
//! explicit (seed, index) keys and results are collected in index order, so
//! output bytes are identical at any worker count.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use prevent_core::diffusion::{TiePolicy, TriggeringModel};
use prevent_core::experiment::{
    baseline_high_degree, baseline_proximity, baseline_rand, generate_pair, mean_std,
    performance_ratio, split_pool, AttackerConfig, PairPool, PoolProvenance, RatioOutcome,
};
use prevent_core::features::{FeatureBank, ScoreModel};
use prevent_core::graph::{Graph, NodeSet};
use prevent_core::inference::greedy_max_score;
use prevent_core::losses::LossSpec;
use prevent_core::rng;
use prevent_core::training::{
    one_slack_cutting_plane, separate_one, RoundLog, Separation, SeparationOutcome, TrainError,
    TrainerConfig, TrainingPair,
};

use crate::io::{self, DistSpec, ReportRow, ReportSummary, ReportSummaryEntry, TrainFileConfig};

// Salts separating the independent RNG stream families of one repetition.
const SALT_RAND: u64 = 0x72616e64;
const SALT_PRO: u64 = 0x70726f78;
const SALT_EVAL: u64 = 0x6576616c;
const SALT_BANK: u64 = 0x62616e6b;

/// Spread repetition indices across the seed space.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    base.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn build_thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        b = b.num_threads(t);
    }
    b.build().context("building worker pool")
}

/// Pool generation parallelized across pairs; identical to the serial
/// `generate_pool` for any worker count.
pub fn generate_pool_parallel(
    model: &TriggeringModel,
    pool_size: usize,
    cfg: AttackerConfig,
    oracle_sims: usize,
    seed: u64,
    tie: TiePolicy,
) -> PairPool {
    let pairs: Vec<TrainingPair> = (0..pool_size)
        .into_par_iter()
        .map(|i| generate_pair(model, cfg, oracle_sims, seed, i, tie))
        .collect();
    PairPool { pairs, provenance: PoolProvenance { seed, oracle_sims, attacker: cfg } }
}

/// Cutting-plane training with separation parallelized across pairs.
#[allow(clippy::too_many_arguments)]
pub fn train_parallel(
    pairs: &[TrainingPair],
    budgets: &[usize],
    bank: &FeatureBank,
    graph: &Graph,
    loss_spec: LossSpec,
    cfg: &TrainerConfig,
    sep: Separation,
    tie: TiePolicy,
) -> Result<(ScoreModel, f64, Vec<RoundLog>), TrainError> {
    let mut separate = |w: &[f64]| -> Result<Vec<SeparationOutcome>, TrainError> {
        pairs
            .par_iter()
            .zip(budgets.par_iter())
            .map(|(p, &k)| {
                separate_one(p, k, bank, graph, loss_spec, w, sep, tie).map_err(TrainError::from)
            })
            .collect()
    };
    one_slack_cutting_plane(pairs, budgets, bank, graph, loss_spec, cfg, tie, &mut separate)
}

// ---- experiment config ----------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureSetting {
    pub dist: String,
    pub k: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpConfig {
    pub graph: PathBuf,
    pub model: PathBuf,
    pub pool: PathBuf,
    pub features: Vec<FeatureSetting>,
    #[serde(default)]
    pub training: TrainFileConfig,
    pub train_size: usize,
    pub test_size: usize,
    pub repetitions: usize,
    pub seed: u64,
    #[serde(default = "default_eval_sims")]
    pub eval_sims: usize,
    #[serde(default = "default_tie")]
    pub tie: String,
}

fn default_eval_sims() -> usize {
    10_000
}
fn default_tie() -> String {
    "misinfo".into()
}

/// Resolve paths in the config relative to the config file's directory.
pub fn load_exp_config(path: &Path) -> Result<ExpConfig> {
    let mut cfg: ExpConfig = io::read_json(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    for p in [&mut cfg.graph, &mut cfg.model, &mut cfg.pool] {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    Ok(cfg)
}

// ---- experiment runner ----------------------------------------------------

struct MethodResult {
    method: String,
    setting: String,
    /// Per test pair, in test-split order.
    predictions: Vec<NodeSet>,
}

/// Run the full protocol: per repetition split the pool, build each feature
/// bank, train, predict on the shared test attackers, and evaluate every
/// method on identical pairs with a paired Monte-Carlo estimator.
pub fn run_experiment(cfg: &ExpConfig) -> Result<ReportSummary> {
    if cfg.repetitions == 0 || cfg.features.is_empty() {
        bail!("config needs at least one repetition and one feature setting");
    }
    let graph = io::read_graph(&cfg.graph)
        .with_context(|| format!("graph artifact {}", cfg.graph.display()))?;
    let graph_hash = io::file_hash(&cfg.graph)?;
    let (model, model_graph_hash) = io::read_model(&cfg.model)
        .with_context(|| format!("model artifact {}", cfg.model.display()))?;
    let model_hash = io::file_hash(&cfg.model)?;
    let (pool_meta, pool_pairs) = io::read_pool(&cfg.pool)
        .with_context(|| format!("pool artifact {}", cfg.pool.display()))?;
    if model_graph_hash != graph_hash {
        bail!("model was generated from a different graph (hash mismatch)");
    }
    if pool_meta.graph_hash != graph_hash || pool_meta.model_hash != model_hash {
        bail!("pool was generated from a different graph/model (hash mismatch)");
    }
    if cfg.train_size + cfg.test_size > pool_pairs.len() {
        bail!(
            "train {} + test {} exceeds pool size {}",
            cfg.train_size,
            cfg.test_size,
            pool_pairs.len()
        );
    }
    let tie = io::parse_tie(&cfg.tie)?;
    let loss_spec = cfg.training.loss_spec()?;
    let trainer = cfg.training.trainer();
    let sep = Separation::ModularModular { iters: cfg.training.lai_iters };
    let settings: Vec<(DistSpec, usize)> = cfg
        .features
        .iter()
        .map(|f| Ok((DistSpec::parse(&f.dist)?, f.k)))
        .collect::<Result<_>>()?;

    let mut rows: Vec<ReportRow> = Vec::new();
    for rep in 0..cfg.repetitions {
        let rep_seed = derive_seed(cfg.seed, rep as u64);
        let (train_idx, test_idx) =
            split_pool(pool_pairs.len(), cfg.train_size, cfg.test_size, rep_seed);
        let train_pairs: Vec<TrainingPair> =
            train_idx.iter().map(|&i| pool_pairs[i].clone()).collect();
        let budgets: Vec<usize> = train_pairs.iter().map(|p| p.m.len()).collect();
        let test_pairs: Vec<&TrainingPair> = test_idx.iter().map(|&i| &pool_pairs[i]).collect();

        let mut methods: Vec<MethodResult> = Vec::new();
        for (si, (dist, k)) in settings.iter().enumerate() {
            let bank = FeatureBank::build(
                &graph,
                dist.to_core(Some(&model))?,
                *k,
                derive_seed(rep_seed ^ SALT_BANK, si as u64),
            )
            .map_err(|e| anyhow::anyhow!("building feature bank: {e}"))?;
            let (weights, _, _) = train_parallel(
                &train_pairs,
                &budgets,
                &bank,
                &graph,
                loss_spec,
                &trainer,
                sep,
                tie,
            )
            .map_err(|e| anyhow::anyhow!("training failed: {e}"))?;
            let predictions: Vec<NodeSet> = test_pairs
                .par_iter()
                .map(|pair| greedy_max_score(&bank, &weights, &pair.m, pair.m.len(), tie))
                .collect();
            methods.push(MethodResult {
                method: "learned".into(),
                setting: format!("{}/K{}", dist.label(), k),
                predictions,
            });
        }

        let rand_preds: Vec<NodeSet> = test_pairs
            .par_iter()
            .enumerate()
            .map(|(i, pair)| {
                baseline_rand(
                    &graph,
                    &pair.m,
                    pair.m.len(),
                    &mut rng::stream(rep_seed ^ SALT_RAND, i as u64),
                )
            })
            .collect();
        let hd_preds: Vec<NodeSet> = test_pairs
            .par_iter()
            .map(|pair| baseline_high_degree(&graph, &pair.m, pair.m.len()))
            .collect();
        let pro_preds: Vec<NodeSet> = test_pairs
            .par_iter()
            .enumerate()
            .map(|(i, pair)| {
                baseline_proximity(
                    &graph,
                    &pair.m,
                    pair.m.len(),
                    &mut rng::stream(rep_seed ^ SALT_PRO, i as u64),
                )
            })
            .collect();
        methods.push(MethodResult { method: "rand".into(), setting: "-".into(), predictions: rand_preds });
        methods.push(MethodResult { method: "hd".into(), setting: "-".into(), predictions: hd_preds });
        methods.push(MethodResult { method: "pro".into(), setting: "-".into(), predictions: pro_preds });

        // evaluate all methods on identical pairs with shared realizations
        let ratios: Vec<Vec<RatioOutcome>> = test_pairs
            .par_iter()
            .enumerate()
            .map(|(i, pair)| {
                let eval_seed = derive_seed(rep_seed ^ SALT_EVAL, i as u64);
                methods
                    .iter()
                    .map(|m| {
                        performance_ratio(
                            &model,
                            &pair.m,
                            &m.predictions[i],
                            &pair.p,
                            tie,
                            cfg.eval_sims,
                            eval_seed,
                        )
                    })
                    .collect()
            })
            .collect();

        for (mi, m) in methods.iter().enumerate() {
            let valid: Vec<f64> =
                ratios.iter().map(|r| r[mi]).filter(|r| r.valid).map(|r| r.clamped).collect();
            let excluded = ratios.len() - valid.len();
            let (mean, std) = mean_std(&valid);
            rows.push(ReportRow {
                method: m.method.clone(),
                setting: m.setting.clone(),
                repetition: rep,
                mean,
                std,
                excluded_count: excluded,
            });
        }
    }

    // aggregate across repetitions per (method, setting)
    let mut entries: Vec<ReportSummaryEntry> = Vec::new();
    for row in &rows {
        if entries.iter().any(|e| e.method == row.method && e.setting == row.setting) {
            continue;
        }
        let means: Vec<f64> = rows
            .iter()
            .filter(|r| r.method == row.method && r.setting == row.setting)
            .map(|r| r.mean)
            .collect();
        let (mean_of_means, std_of_means) = mean_std(&means);
        entries.push(ReportSummaryEntry {
            method: row.method.clone(),
            setting: row.setting.clone(),
            mean_of_means,
            std_of_means,
            repetitions: means.len(),
        });
    }
    Ok(ReportSummary { entries, rows })
}
