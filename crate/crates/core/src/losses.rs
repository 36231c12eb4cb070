//! Set-similarity losses for margin re-scaling: `L(P, S) = SIM(P, P) − SIM(P, S)`.
//!
//! Two similarity families: Hamming (`1` iff the sets are equal) and j-hop
//! overlap (`|H_P^j ∩ H_S^j|`, the intersection of out-direction j-hop
//! neighborhoods). The j-hop similarity is a coverage function of `S` for
//! fixed `P`, hence monotone submodular — which is what the modular upper
//! bound in loss-augmented inference relies on.

use crate::graph::{Graph, NodeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimilarityKind {
    Hamming,
    JHop(usize),
}

/// Loss configuration: similarity kind plus the margin scale `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSpec {
    pub kind: SimilarityKind,
    pub alpha: f64,
}

impl LossSpec {
    pub fn new(kind: SimilarityKind, alpha: f64) -> Self {
        assert!(alpha > 0.0, "alpha must be positive");
        LossSpec { kind, alpha }
    }

    /// The benchmark default: one-hop loss with alpha = 1000.
    pub fn default_jhop() -> Self {
        LossSpec { kind: SimilarityKind::JHop(1), alpha: 1000.0 }
    }
}

/// `SIM(A, B)` under `kind`.
pub fn similarity(kind: SimilarityKind, graph: &Graph, a: &NodeSet, b: &NodeSet) -> f64 {
    match kind {
        SimilarityKind::Hamming => {
            if a == b {
                1.0
            } else {
                0.0
            }
        }
        SimilarityKind::JHop(j) => {
            let ha = graph.jhop_neighborhood(a, j);
            let hb = graph.jhop_neighborhood(b, j);
            ha.intersection_size(&hb) as f64
        }
    }
}

/// `L(P, S) = SIM(P, P) − SIM(P, S)`; nonnegative, zero at `S = P`.
pub fn loss(kind: SimilarityKind, graph: &Graph, p: &NodeSet, s: &NodeSet) -> f64 {
    similarity(kind, graph, p, p) - similarity(kind, graph, p, s)
}
