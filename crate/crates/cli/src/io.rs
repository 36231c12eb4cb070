//! File formats and artifact plumbing: edge-list graphs, model/bank/weights
//! JSON, pair pools as JSON lines, training configs, reports, and the run
//! manifest emitted next to every output.
//!
//! Every artifact embeds the SHA-256 of its inputs so downstream commands can
//! refuse mismatched combinations (e.g. a feature bank built on a different
//! graph than the pair pool).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use prevent_core::diffusion::{TiePolicy, TriggeringModel};
use prevent_core::features::{DistributionTag, FeatureBank, FeatureDistribution, ScoreModel};
use prevent_core::graph::{Graph, NodeSet, WeightedSubgraph};
use prevent_core::losses::{LossSpec, SimilarityKind};
use prevent_core::training::{RoundLog, TrainerConfig, TrainingPair};

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        write!(out, "{b:02x}").unwrap();
    }
    out
}

pub fn file_hash(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(sha256_hex(&bytes))
}

// ---- graph ----------------------------------------------------------------

/// Plain edge-list text with a `# nodes=N` header so isolated trailing nodes
/// survive the round trip.
pub fn write_graph(path: &Path, graph: &Graph) -> Result<()> {
    let mut text = format!("# nodes={}\n", graph.node_count());
    for &(s, d) in graph.edges() {
        writeln!(text, "{s} {d}").unwrap();
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let declared = text
        .lines()
        .filter(|l| l.trim_start().starts_with('#'))
        .find_map(|l| l.split("nodes=").nth(1).and_then(|s| s.trim().parse::<usize>().ok()));
    let parsed = Graph::parse_edge_list(&text)
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    match declared {
        Some(n) if n > parsed.node_count() => {
            Graph::from_edges(n, parsed.edges().iter().copied())
                .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
        }
        _ => Ok(parsed),
    }
}

// ---- diffusion model ------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ModelFile {
    n: usize,
    edges: Vec<(usize, usize, f64, f64)>,
    trigger: String,
    graph_hash: String,
}

pub fn write_model(path: &Path, model: &TriggeringModel, graph_hash: &str) -> Result<()> {
    let g = model.graph();
    let edges = g
        .edges()
        .iter()
        .zip(model.weibull_params())
        .map(|(&(s, d), &(a, b))| (s, d, a, b))
        .collect();
    let file = ModelFile {
        n: g.node_count(),
        edges,
        trigger: "uniform_single".into(),
        graph_hash: graph_hash.into(),
    };
    write_json(path, &file)
}

pub fn read_model(path: &Path) -> Result<(TriggeringModel, String)> {
    let file: ModelFile = read_json(path)?;
    if file.trigger != "uniform_single" {
        bail!("{}: unsupported trigger family {:?}", path.display(), file.trigger);
    }
    let graph = Graph::from_edges(file.n, file.edges.iter().map(|&(s, d, _, _)| (s, d)))
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    // from_edges sorts edges; re-align the per-edge params with that order
    let mut params = vec![(0.0, 0.0); graph.edge_count()];
    for &(s, d, a, b) in &file.edges {
        let idx = graph
            .edges()
            .binary_search(&(s, d))
            .map_err(|_| anyhow::anyhow!("{}: duplicate or missing edge ({s},{d})", path.display()))?;
        params[idx] = (a, b);
    }
    let model = TriggeringModel::new(graph, params)
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    Ok((model, file.graph_hash))
}

// ---- feature bank ---------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistSpec {
    Iid { p: f64, w: f64 },
    Matched,
}

impl DistSpec {
    /// Parse the CLI syntax `iid:p:w` / `matched`.
    pub fn parse(s: &str) -> Result<Self> {
        if s == "matched" {
            return Ok(DistSpec::Matched);
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["iid", p, w] => Ok(DistSpec::Iid { p: p.parse()?, w: w.parse()? }),
            _ => bail!("bad feature distribution {s:?}; expected iid:<p>:<w> or matched"),
        }
    }

    pub fn label(&self) -> String {
        match self {
            DistSpec::Iid { p, w } => format!("iid:{p}:{w}"),
            DistSpec::Matched => "matched".into(),
        }
    }

    pub fn to_core<'m>(&self, model: Option<&'m TriggeringModel>) -> Result<FeatureDistribution<'m>> {
        match *self {
            DistSpec::Iid { p, w } => Ok(FeatureDistribution::IidEdges { p, w }),
            DistSpec::Matched => Ok(FeatureDistribution::ModelMatched(
                model.context("matched feature distribution requires a model")?,
            )),
        }
    }

    fn from_tag(tag: &DistributionTag) -> Self {
        match *tag {
            DistributionTag::IidEdges { p, w } => DistSpec::Iid { p, w },
            DistributionTag::ModelMatched => DistSpec::Matched,
        }
    }

    fn to_tag(self) -> DistributionTag {
        match self {
            DistSpec::Iid { p, w } => DistributionTag::IidEdges { p, w },
            DistSpec::Matched => DistributionTag::ModelMatched,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct BankFile {
    seed: u64,
    distribution: DistSpec,
    n: usize,
    graph_hash: String,
    subgraphs: Vec<Vec<(usize, usize, f64)>>,
}

pub fn write_bank(path: &Path, bank: &FeatureBank, graph_hash: &str) -> Result<()> {
    let n = bank.subgraphs().first().map_or(0, |g| g.node_count());
    let file = BankFile {
        seed: bank.seed(),
        distribution: DistSpec::from_tag(bank.tag()),
        n,
        graph_hash: graph_hash.into(),
        subgraphs: bank.subgraphs().iter().map(|g| g.edges().to_vec()).collect(),
    };
    write_json(path, &file)
}

pub fn read_bank(path: &Path) -> Result<(FeatureBank, String)> {
    let file: BankFile = read_json(path)?;
    let subgraphs: Vec<WeightedSubgraph> = file
        .subgraphs
        .into_iter()
        .map(|edges| {
            WeightedSubgraph::from_weighted_edges(file.n, edges)
                .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
        })
        .collect::<Result<_>>()?;
    let bank = FeatureBank::from_parts(subgraphs, file.distribution.to_tag(), file.seed)
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    Ok((bank, file.graph_hash))
}

// ---- weights --------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct WeightsFile {
    w: Vec<f64>,
    bank_hash: String,
}

pub fn write_weights(path: &Path, model: &ScoreModel, bank_hash: &str) -> Result<()> {
    write_json(path, &WeightsFile { w: model.weights().to_vec(), bank_hash: bank_hash.into() })
}

pub fn read_weights(path: &Path) -> Result<(ScoreModel, String)> {
    let file: WeightsFile = read_json(path)?;
    let model =
        ScoreModel::new(file.w).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    Ok((model, file.bank_hash))
}

// ---- pair pool ------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoolMeta {
    pub graph_hash: String,
    pub model_hash: String,
    pub seed: u64,
    pub oracle_sims: usize,
    pub exponent: f64,
    pub max_attacker: usize,
}

#[derive(Serialize, Deserialize)]
struct PoolLine {
    #[serde(rename = "M")]
    m: Vec<usize>,
    #[serde(rename = "P")]
    p: Vec<usize>,
}

/// JSON lines: a metadata header object followed by one `{"M":…,"P":…}` per
/// pair.
pub fn write_pool(path: &Path, meta: &PoolMeta, pairs: &[TrainingPair]) -> Result<()> {
    let mut text = serde_json::to_string(meta)?;
    text.push('\n');
    for pair in pairs {
        let line = PoolLine { m: pair.m.iter().collect(), p: pair.p.iter().collect() };
        text.push_str(&serde_json::to_string(&line)?);
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_pool(path: &Path) -> Result<(PoolMeta, Vec<TrainingPair>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().context("empty pool file")?;
    let meta: PoolMeta =
        serde_json::from_str(header).with_context(|| format!("{}: pool header", path.display()))?;
    let mut pairs = Vec::new();
    for (i, line) in lines.enumerate() {
        let pl: PoolLine = serde_json::from_str(line)
            .with_context(|| format!("{}: pool line {}", path.display(), i + 2))?;
        let m: NodeSet = pl.m.into_iter().collect();
        let p: NodeSet = pl.p.into_iter().collect();
        let pair = TrainingPair::new(m, p)
            .map_err(|e| anyhow::anyhow!("{}: pool line {}: {e}", path.display(), i + 2))?;
        pairs.push(pair);
    }
    if pairs.is_empty() {
        bail!("{}: pool has no pairs", path.display());
    }
    Ok((meta, pairs))
}

// ---- training config ------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainFileConfig {
    #[serde(rename = "C", default = "default_c")]
    pub c: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_loss")]
    pub loss: String,
    #[serde(default = "default_j")]
    pub j: usize,
    #[serde(default = "default_max_cp_iters")]
    pub max_cp_iters: usize,
    #[serde(default = "default_lai_iters")]
    pub lai_iters: usize,
}

fn default_c() -> f64 {
    0.01
}
fn default_epsilon() -> f64 {
    0.001
}
fn default_alpha() -> f64 {
    1000.0
}
fn default_loss() -> String {
    "jhop".into()
}
fn default_j() -> usize {
    1
}
fn default_max_cp_iters() -> usize {
    200
}
fn default_lai_iters() -> usize {
    1
}

impl Default for TrainFileConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

impl TrainFileConfig {
    pub fn loss_spec(&self) -> Result<LossSpec> {
        let kind = match self.loss.as_str() {
            "jhop" => SimilarityKind::JHop(self.j),
            "hamming" => SimilarityKind::Hamming,
            other => bail!("unknown loss {other:?}; expected jhop or hamming"),
        };
        if !(self.alpha > 0.0) {
            bail!("alpha must be positive");
        }
        Ok(LossSpec::new(kind, self.alpha))
    }

    pub fn trainer(&self) -> TrainerConfig {
        TrainerConfig {
            c: self.c,
            epsilon: self.epsilon,
            max_cp_iters: self.max_cp_iters,
            ..TrainerConfig::default()
        }
    }
}

/// Training log line per cutting-plane round.
pub fn write_train_log(path: &Path, logs: &[RoundLog]) -> Result<()> {
    let mut text = String::new();
    for l in logs {
        writeln!(
            text,
            "{}",
            serde_json::json!({
                "round": l.round,
                "objective": l.objective,
                "violation": l.violation,
                "xi": l.xi,
            })
        )
        .unwrap();
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

// ---- tie policy -----------------------------------------------------------

pub fn parse_tie(s: &str) -> Result<TiePolicy> {
    match s {
        "misinfo" => Ok(TiePolicy::MisinfoWins),
        "positive" => Ok(TiePolicy::PositiveWins),
        other => bail!("unknown tie policy {other:?}; expected misinfo or positive"),
    }
}

// ---- report ---------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub setting: String,
    pub repetition: usize,
    pub mean: f64,
    pub std: f64,
    pub excluded_count: usize,
}

pub fn write_report_csv(path: &Path, rows: &[ReportRow]) -> Result<()> {
    let mut text = String::from("method,setting,repetition,mean,std,excluded_count\n");
    for r in rows {
        writeln!(
            text,
            "{},{},{},{},{},{}",
            r.method, r.setting, r.repetition, r.mean, r.std, r.excluded_count
        )
        .unwrap();
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportSummaryEntry {
    pub method: String,
    pub setting: String,
    pub mean_of_means: f64,
    pub std_of_means: f64,
    pub repetitions: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportSummary {
    pub entries: Vec<ReportSummaryEntry>,
    pub rows: Vec<ReportRow>,
}

// ---- manifest -------------------------------------------------------------

/// Emitted next to every output artifact; `(command, args, input hashes,
/// version)` pin the artifact byte-for-byte.
pub fn write_manifest(
    out: &Path,
    command: &str,
    args: serde_json::Value,
    inputs: &[(&str, String)],
) -> Result<()> {
    let manifest = serde_json::json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "args": args,
        "inputs": inputs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<std::collections::BTreeMap<_, _>>(),
        "output_hash": file_hash(out)?,
    });
    let path = manifest_path(out);
    write_json(&path, &manifest)
}

pub fn manifest_path(out: &Path) -> std::path::PathBuf {
    let mut os = out.as_os_str().to_owned();
    os.push(".manifest.json");
    os.into()
}

// ---- generic json ---------------------------------------------------------

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
