use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use prevent_cli::io::{self, DistSpec, TrainFileConfig};
use prevent_cli::pipeline::{
    self, build_thread_pool, generate_pool_parallel, train_parallel, ExpConfig,
};
use prevent_core::diffusion::TriggeringModel;
use prevent_core::experiment::AttackerConfig;
use prevent_core::features::FeatureBank;
use prevent_core::graph::{Graph, NodeSet};
use prevent_core::inference::greedy_max_score;
use prevent_core::rng;
use prevent_core::training::Separation;

/// Learn and evaluate misinformation-prevention strategies from
/// attacker–protector pairs.
#[derive(Parser)]
#[command(name = "prevent", version, disable_help_subcommand = true)]
struct Cli {
    /// Worker-thread cap (results are identical at any setting).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random directed graph.
    GenGraph {
        /// er | powerlaw
        #[arg(long = "type")]
        kind: String,
        #[arg(long)]
        n: usize,
        /// Edge count for er; total target for powerlaw (per-node attachment
        /// is derived as round(m / (n - 1))).
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample per-edge Weibull transmission parameters for a graph.
    GenModel {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate attacker–protector pairs with the Monte-Carlo oracle.
    GenPairs {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        /// Oracle realizations per pair.
        #[arg(long, default_value_t = 2000)]
        sims: usize,
        /// Attacker-size power-law exponent.
        #[arg(long, default_value_t = 2.5)]
        exponent: f64,
        #[arg(long, default_value_t = 10)]
        max_attacker: usize,
        #[arg(long, default_value = "misinfo")]
        tie: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample a frozen random-subgraph feature bank.
    GenFeatures {
        #[arg(long)]
        graph: PathBuf,
        /// iid:<p>:<w> or matched (matched requires --model).
        #[arg(long)]
        dist: String,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train weights with the one-slack cutting plane.
    Train {
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        bank: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        /// Optional training-config JSON; flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// jhop:<j> or hamming
        #[arg(long)]
        loss: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long = "C")]
        c: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        lai_iters: Option<usize>,
        #[arg(long)]
        max_cp_iters: Option<usize>,
        #[arg(long, default_value = "misinfo")]
        tie: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict a protector for one attacker.
    Predict {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        bank: PathBuf,
        /// Comma-separated attacker node ids.
        #[arg(long)]
        attacker: String,
        /// "auto" (= attacker size) or an explicit budget.
        #[arg(long, default_value = "auto")]
        k: String,
        #[arg(long, default_value = "misinfo")]
        tie: String,
    },
    /// Run the full evaluation protocol from a config file.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            // internal failures (solver, IO on our own outputs) exit 2;
            // anything traceable to user inputs exits 1
            if e.chain().any(|c| c.to_string().contains("internal:")) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let pool = build_thread_pool(cli.threads)?;
    pool.install(|| dispatch(cli.cmd))
}

fn dispatch(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::GenGraph { kind, n, m, seed, out } => {
            let graph = match kind.as_str() {
                "er" => Graph::generate_er(n, m, &mut rng::root(seed)),
                "powerlaw" => {
                    let attach = (m as f64 / (n.saturating_sub(1)).max(1) as f64).round() as usize;
                    Graph::generate_powerlaw(n, attach.clamp(1, n.saturating_sub(1)), &mut rng::root(seed))
                }
                other => bail!("unknown graph type {other:?}; expected er or powerlaw"),
            }
            .map_err(|e| anyhow::anyhow!("{e}"))?;
            io::write_graph(&out, &graph)?;
            io::write_manifest(
                &out,
                "gen-graph",
                serde_json::json!({"type": kind, "n": n, "m": m, "seed": seed}),
                &[],
            )
        }
        Cmd::GenModel { graph, seed, out } => {
            let g = io::read_graph(&graph)?;
            let graph_hash = io::file_hash(&graph)?;
            let model = TriggeringModel::random(g, &mut rng::root(seed));
            io::write_model(&out, &model, &graph_hash)?;
            io::write_manifest(
                &out,
                "gen-model",
                serde_json::json!({"seed": seed}),
                &[("graph", graph_hash)],
            )
        }
        Cmd::GenPairs { graph, model, count, seed, sims, exponent, max_attacker, tie, out } => {
            if count == 0 {
                bail!("--count must be at least 1");
            }
            let graph_hash = io::file_hash(&graph)?;
            let (m, model_graph_hash) = io::read_model(&model)?;
            if model_graph_hash != graph_hash {
                bail!("model was generated from a different graph (hash mismatch)");
            }
            let model_hash = io::file_hash(&model)?;
            let tie = io::parse_tie(&tie)?;
            let cfg = AttackerConfig::new(exponent, max_attacker);
            let pool = generate_pool_parallel(&m, count, cfg, sims, seed, tie);
            let meta = io::PoolMeta {
                graph_hash: graph_hash.clone(),
                model_hash: model_hash.clone(),
                seed,
                oracle_sims: sims,
                exponent,
                max_attacker,
            };
            io::write_pool(&out, &meta, &pool.pairs)?;
            io::write_manifest(
                &out,
                "gen-pairs",
                serde_json::json!({
                    "count": count, "seed": seed, "sims": sims,
                    "exponent": exponent, "max_attacker": max_attacker,
                }),
                &[("graph", graph_hash), ("model", model_hash)],
            )
        }
        Cmd::GenFeatures { graph, dist, model, k, seed, out } => {
            let g = io::read_graph(&graph)?;
            let graph_hash = io::file_hash(&graph)?;
            let spec = DistSpec::parse(&dist)?;
            let loaded_model = match model {
                Some(ref p) => {
                    let (m, mh) = io::read_model(p)?;
                    if mh != graph_hash {
                        bail!("model was generated from a different graph (hash mismatch)");
                    }
                    Some(m)
                }
                None => None,
            };
            let bank = FeatureBank::build(&g, spec.to_core(loaded_model.as_ref())?, k, seed)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            io::write_bank(&out, &bank, &graph_hash)?;
            io::write_manifest(
                &out,
                "gen-features",
                serde_json::json!({"dist": dist, "k": k, "seed": seed}),
                &[("graph", graph_hash)],
            )
        }
        Cmd::Train {
            pairs,
            bank,
            graph,
            config,
            loss,
            alpha,
            c,
            epsilon,
            lai_iters,
            max_cp_iters,
            tie,
            out,
        } => {
            let mut cfg: TrainFileConfig = match config {
                Some(ref p) => io::read_json(p)?,
                None => TrainFileConfig::default(),
            };
            if let Some(l) = loss {
                let (name, j) = match l.split_once(':') {
                    Some((n, j)) => (n.to_string(), j.parse().context("bad j in --loss")?),
                    None => (l, cfg.j),
                };
                cfg.loss = name;
                cfg.j = j;
            }
            if let Some(a) = alpha {
                cfg.alpha = a;
            }
            if let Some(v) = c {
                cfg.c = v;
            }
            if let Some(v) = epsilon {
                cfg.epsilon = v;
            }
            if let Some(v) = lai_iters {
                cfg.lai_iters = v;
            }
            if let Some(v) = max_cp_iters {
                cfg.max_cp_iters = v;
            }
            let tie = io::parse_tie(&tie)?;
            let loss_spec = cfg.loss_spec()?;

            let g = io::read_graph(&graph)?;
            let graph_hash = io::file_hash(&graph)?;
            let (bank_data, bank_graph_hash) = io::read_bank(&bank)?;
            let bank_hash = io::file_hash(&bank)?;
            let (pool_meta, pool_pairs) = io::read_pool(&pairs)?;
            if bank_graph_hash != graph_hash || pool_meta.graph_hash != graph_hash {
                bail!("bank/pairs/graph hashes disagree; artifacts come from different graphs");
            }
            let budgets: Vec<usize> = pool_pairs.iter().map(|p| p.m.len()).collect();
            let (weights, _, logs) = train_parallel(
                &pool_pairs,
                &budgets,
                &bank_data,
                &g,
                loss_spec,
                &cfg.trainer(),
                Separation::ModularModular { iters: cfg.lai_iters },
                tie,
            )
            .map_err(|e| anyhow::anyhow!("internal: training failed: {e}"))?;
            io::write_weights(&out, &weights, &bank_hash)?;
            let log_path = out.with_extension("log.jsonl");
            io::write_train_log(&log_path, &logs)?;
            io::write_manifest(
                &out,
                "train",
                serde_json::to_value(&cfg)?,
                &[
                    ("graph", graph_hash),
                    ("bank", bank_hash),
                    ("pairs", io::file_hash(&pairs)?),
                ],
            )
        }
        Cmd::Predict { weights, bank, attacker, k, tie } => {
            let (model, bank_hash) = io::read_weights(&weights)?;
            let actual_bank_hash = io::file_hash(&bank)?;
            if bank_hash != actual_bank_hash {
                bail!("weights were trained against a different bank (hash mismatch)");
            }
            let (bank_data, _) = io::read_bank(&bank)?;
            if bank_data.len() != model.len() {
                bail!("bank size {} does not match weight count {}", bank_data.len(), model.len());
            }
            let m: NodeSet = attacker
                .split(',')
                .map(|t| t.trim().parse::<usize>().with_context(|| format!("bad node id {t:?}")))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .collect();
            if m.is_empty() {
                bail!("--attacker must name at least one node");
            }
            let budget = if k == "auto" { m.len() } else { k.parse().context("bad --k")? };
            let tie = io::parse_tie(&tie)?;
            let s = greedy_max_score(&bank_data, &model, &m, budget, tie);
            println!("{}", serde_json::to_string(&s.iter().collect::<Vec<_>>())?);
            Ok(())
        }
        Cmd::Evaluate { config, out } => {
            let cfg: ExpConfig = pipeline::load_exp_config(&config)?;
            let summary = pipeline::run_experiment(&cfg)?;
            io::write_report_csv(&out, &summary.rows)?;
            let json_path = out.with_extension("json");
            io::write_json(&json_path, &summary)?;
            io::write_manifest(
                &out,
                "evaluate",
                serde_json::to_value(&cfg)?,
                &[
                    ("config", io::file_hash(&config)?),
                    ("graph", io::file_hash(&cfg.graph)?),
                    ("model", io::file_hash(&cfg.model)?),
                    ("pool", io::file_hash(&cfg.pool)?),
                ],
            )
        }
    }
}
