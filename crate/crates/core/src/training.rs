//! One-slack cutting-plane training of the nonnegative weight vector.
//!
//! The trainer maintains a working set of aggregated constraints. Each round
//! solves
//!
//! ```text
//! min  1/2 ||w||^2 + C * xi
//! s.t. w . delta_psi_r >= ell_r - xi   for every working-set row r
//!      w >= 0,  xi >= 0
//! ```
//!
//! then runs loss-augmented inference per training pair to build the next
//! aggregated row
//!
//! ```text
//! delta_psi = (1/n) Σ_i (G(M_i, P_i) - G(M_i, P̂_i))
//! ell       = (α/n) Σ_i L(P_i, P̂_i)
//! ```
//!
//! and stops when the new row's violation `ell - w . delta_psi` is at most
//! `xi + epsilon`. Separation is heuristic (LAI is NP-hard), so the loop is
//! additionally capped; on cap exit the QP is re-solved over every collected
//! row so the returned `(w, xi)` is feasible for the whole working set.
//!
//! The QP is solved in the dual: with `u = Σ_r λ_r delta_psi_r`, the
//! nonnegativity of `w` turns the dual objective into
//! `g(λ) = ℓ·λ - 1/2 ||u_+||^2` over `{λ >= 0, Σλ <= C}`, maximized by
//! accelerated projected gradient; the primal solution is recovered as
//! `w = u_+` with `xi` the exact maximum violation, so returned iterates are
//! always primal-feasible and the duality gap certifies optimality.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::diffusion::TiePolicy;
use crate::features::{feature_vector_f64, FeatureBank, ScoreModel};
use crate::graph::{Graph, NodeSet};
use crate::inference::{
    brute_force_lai, loss_augmented_inference, InferenceError, LaiProblem,
};
use crate::losses::{loss, LossSpec};

/// One attacker–protector example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingPair {
    pub m: NodeSet,
    pub p: NodeSet,
}

impl TrainingPair {
    pub fn new(m: NodeSet, p: NodeSet) -> Result<Self, TrainError> {
        if m.is_empty() || p.is_empty() || !m.is_disjoint(&p) {
            return Err(TrainError::InvalidPair);
        }
        Ok(TrainingPair { m, p })
    }
}

/// Aggregated working-set constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintRow {
    pub delta_psi: Vec<f64>,
    pub ell: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainerConfig {
    /// Slack regularization weight.
    pub c: f64,
    /// Cutting-plane stopping tolerance on the violation.
    pub epsilon: f64,
    /// Cap on cutting-plane rounds.
    pub max_cp_iters: usize,
    /// Relative duality-gap tolerance for the working-set QP.
    pub qp_tol: f64,
    /// Iteration cap for the QP solver.
    pub qp_max_iters: usize,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig { c: 0.01, epsilon: 0.001, max_cp_iters: 200, qp_tol: 1e-9, qp_max_iters: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainError {
    EmptyPairs,
    InvalidPair,
    BadBudget { pair: usize, k: usize },
    QpNonConvergence { gap: f64, iters: usize },
    Inference(InferenceError),
}

impl fmt::Display for TrainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainError::EmptyPairs => write!(f, "training requires at least one pair"),
            TrainError::InvalidPair => write!(f, "training pair must be nonempty and disjoint"),
            TrainError::BadBudget { pair, k } => write!(f, "budget {k} infeasible for pair {pair}"),
            TrainError::QpNonConvergence { gap, iters } => {
                write!(f, "QP solver stopped at gap {gap:.3e} after {iters} iterations")
            }
            TrainError::Inference(e) => write!(f, "separation failed: {e}"),
        }
    }
}

impl From<InferenceError> for TrainError {
    fn from(e: InferenceError) -> Self {
        TrainError::Inference(e)
    }
}

/// Euclidean projection onto `{λ >= 0, Σλ <= c}`.
fn project_capped_simplex(y: &mut [f64], c: f64) {
    let clamped_sum: f64 = y.iter().map(|&v| v.max(0.0)).sum();
    if clamped_sum <= c {
        for v in y.iter_mut() {
            *v = v.max(0.0);
        }
        return;
    }
    // sum constraint active: project onto {λ >= 0, Σλ = c}
    let mut sorted: Vec<f64> = y.to_vec();
    sorted.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        acc += v;
        let t = (acc - c) / (i + 1) as f64;
        if i + 1 == sorted.len() || sorted[i + 1] <= t {
            theta = t;
            break;
        }
    }
    for v in y.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Recover the primal pair from dual multipliers: `w = (Σ λ_r Δψ_r)_+`,
/// `xi` = exact maximum constraint violation at `w`.
fn primal_from_dual(rows: &[ConstraintRow], lambda: &[f64], dim: usize) -> (Vec<f64>, f64) {
    let mut u = vec![0.0; dim];
    for (row, &l) in rows.iter().zip(lambda) {
        if l != 0.0 {
            for (ui, &d) in u.iter_mut().zip(&row.delta_psi) {
                *ui += l * d;
            }
        }
    }
    let w: Vec<f64> = u.into_iter().map(|x| x.max(0.0)).collect();
    let xi = rows
        .iter()
        .map(|r| r.ell - dot(&w, &r.delta_psi))
        .fold(0.0f64, f64::max);
    (w, xi)
}

/// Solve the working-set QP. Empty working set yields `(0, 0)`.
pub fn solve_working_set_qp(
    rows: &[ConstraintRow],
    dim: usize,
    cfg: &TrainerConfig,
) -> Result<(Vec<f64>, f64), TrainError> {
    if rows.is_empty() {
        return Ok((vec![0.0; dim], 0.0));
    }
    let m = rows.len();
    // Lipschitz bound for the dual gradient: ||A||^2 <= ||A||_F^2
    let lipschitz: f64 = rows
        .iter()
        .map(|r| dot(&r.delta_psi, &r.delta_psi))
        .sum::<f64>()
        .max(1e-12);
    let step = 1.0 / lipschitz;

    let mut lambda = vec![0.0; m];
    let mut momentum = lambda.clone();
    let mut t_acc = 1.0f64;
    let mut last_gap = f64::INFINITY;

    for iter in 0..cfg.qp_max_iters {
        // gradient of the dual at the momentum point
        let mut u = vec![0.0; dim];
        for (row, &l) in rows.iter().zip(&momentum) {
            if l != 0.0 {
                for (ui, &d) in u.iter_mut().zip(&row.delta_psi) {
                    *ui += l * d;
                }
            }
        }
        for ui in u.iter_mut() {
            *ui = ui.max(0.0);
        }
        let mut next: Vec<f64> = momentum
            .iter()
            .zip(rows)
            .map(|(&l, r)| l + step * (r.ell - dot(&u, &r.delta_psi)))
            .collect();
        project_capped_simplex(&mut next, cfg.c);

        let t_next = 0.5 * (1.0 + libm::sqrt(1.0 + 4.0 * t_acc * t_acc));
        for i in 0..m {
            momentum[i] = next[i] + (t_acc - 1.0) / t_next * (next[i] - lambda[i]);
        }
        t_acc = t_next;
        lambda = next;

        if iter % 16 == 0 || iter + 1 == cfg.qp_max_iters {
            let (w, xi) = primal_from_dual(rows, &lambda, dim);
            let primal = 0.5 * dot(&w, &w) + cfg.c * xi;
            let mut u = vec![0.0; dim];
            for (row, &l) in rows.iter().zip(&lambda) {
                for (ui, &d) in u.iter_mut().zip(&row.delta_psi) {
                    *ui += l * d;
                }
            }
            let u_plus_sq: f64 = u
                .iter()
                .map(|&x| {
                    let p = x.max(0.0);
                    p * p
                })
                .sum();
            let dual = rows.iter().zip(&lambda).map(|(r, &l)| r.ell * l).sum::<f64>()
                - 0.5 * u_plus_sq;
            last_gap = primal - dual;
            if last_gap <= cfg.qp_tol * primal.abs().max(1.0) {
                return Ok((w, xi));
            }
        }
    }
    Err(TrainError::QpNonConvergence { gap: last_gap, iters: cfg.qp_max_iters })
}

/// How the most-violated protector is searched per pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Separation {
    /// Modular-modular LAI with the given iteration cap.
    ModularModular { iters: usize },
    /// Exhaustive enumeration (small fixtures only).
    BruteForce { cap: u128 },
}

/// Result of separation on one pair: the found protector, its feature
/// vector, and its loss against the label.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationOutcome {
    pub p_hat: NodeSet,
    pub g_hat: Vec<f64>,
    pub loss: f64,
}

/// Run separation for one training pair under weights `w`.
pub fn separate_one(
    pair: &TrainingPair,
    k: usize,
    bank: &FeatureBank,
    graph: &Graph,
    loss_spec: LossSpec,
    w: &[f64],
    sep: Separation,
    tie: TiePolicy,
) -> Result<SeparationOutcome, InferenceError> {
    let weights = ScoreModel::new(w.to_vec()).expect("QP keeps weights nonnegative");
    let prob = LaiProblem {
        bank,
        weights: &weights,
        graph,
        m: &pair.m,
        p_true: &pair.p,
        loss: loss_spec,
        k,
        tie,
    };
    let p_hat = match sep {
        Separation::ModularModular { iters } => loss_augmented_inference(&prob, iters)?,
        Separation::BruteForce { cap } => brute_force_lai(&prob, cap)?,
    };
    let g_hat = feature_vector_f64(bank, &pair.m, &p_hat, tie);
    let loss_val = loss(loss_spec.kind, graph, &pair.p, &p_hat);
    Ok(SeparationOutcome { p_hat, g_hat, loss: loss_val })
}

/// Per-round training log entry.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundLog {
    pub round: usize,
    pub objective: f64,
    pub violation: f64,
    pub xi: f64,
}

/// One-slack cutting-plane training.
///
/// `budgets[i]` is pair `i`'s protector budget (normally `|M_i|`).
/// `separate_batch` receives the current weights and must return one
/// [`SeparationOutcome`] per pair, in pair order — callers may run it
/// serially or in parallel, the contract is identical output either way.
pub fn one_slack_cutting_plane(
    pairs: &[TrainingPair],
    budgets: &[usize],
    bank: &FeatureBank,
    graph: &Graph,
    loss_spec: LossSpec,
    cfg: &TrainerConfig,
    tie: TiePolicy,
    separate_batch: &mut dyn FnMut(&[f64]) -> Result<Vec<SeparationOutcome>, TrainError>,
) -> Result<(ScoreModel, f64, Vec<RoundLog>), TrainError> {
    if pairs.is_empty() {
        return Err(TrainError::EmptyPairs);
    }
    assert_eq!(pairs.len(), budgets.len());
    let n = pairs.len() as f64;
    let ground_size = graph.node_count();
    for (i, (pair, &k)) in pairs.iter().zip(budgets).enumerate() {
        if pair.m.is_empty() || pair.p.is_empty() || !pair.m.is_disjoint(&pair.p) {
            return Err(TrainError::InvalidPair);
        }
        if k < pair.p.len() || k > ground_size - pair.m.len() {
            return Err(TrainError::BadBudget { pair: i, k });
        }
    }
    let dim = bank.len();
    let g_true: Vec<Vec<f64>> =
        pairs.iter().map(|p| feature_vector_f64(bank, &p.m, &p.p, tie)).collect();

    let mut rows: Vec<ConstraintRow> = Vec::new();
    let mut logs = Vec::new();
    for round in 0..cfg.max_cp_iters {
        let (w, xi) = solve_working_set_qp(&rows, dim, cfg)?;
        let outs = separate_batch(&w)?;
        debug_assert_eq!(outs.len(), pairs.len());

        let mut delta_psi = vec![0.0; dim];
        let mut ell = 0.0;
        for (out, gt) in outs.iter().zip(&g_true) {
            for ((d, &t), &h) in delta_psi.iter_mut().zip(gt).zip(&out.g_hat) {
                *d += (t - h) / n;
            }
            ell += loss_spec.alpha * out.loss / n;
        }
        let violation = ell - dot(&w, &delta_psi);
        let objective = 0.5 * dot(&w, &w) + cfg.c * xi;
        logs.push(RoundLog { round, objective, violation, xi });

        if violation <= xi + cfg.epsilon {
            return Ok((ScoreModel::new(w).expect("nonnegative by projection"), xi, logs));
        }
        rows.push(ConstraintRow { delta_psi, ell });
    }

    // Round cap hit: re-solve over the full working set so the returned
    // weights are feasible for every collected row.
    let (w, xi) = solve_working_set_qp(&rows, dim, cfg)?;
    let objective = 0.5 * dot(&w, &w) + cfg.c * xi;
    let last_violation = rows
        .last()
        .map(|r| r.ell - dot(&w, &r.delta_psi))
        .unwrap_or(0.0);
    logs.push(RoundLog { round: cfg.max_cp_iters, objective, violation: last_violation, xi });
    Ok((ScoreModel::new(w).expect("nonnegative by projection"), xi, logs))
}

/// Serial convenience wrapper around [`one_slack_cutting_plane`].
#[allow(clippy::too_many_arguments)]
pub fn train_serial(
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
            .iter()
            .zip(budgets)
            .map(|(p, &k)| separate_one(p, k, bank, graph, loss_spec, w, sep, tie).map_err(Into::into))
            .collect()
    };
    one_slack_cutting_plane(pairs, budgets, bank, graph, loss_spec, cfg, tie, &mut separate)
}
