//! Core algorithms for learning misinformation-prevention strategies from
//! attacker–protector example pairs, without access to the underlying
//! diffusion model.
//!
//! The crate is organized around a small pipeline:
//!
//! - [`graph`]: directed graphs, generators, shortest-path and neighborhood
//!   primitives;
//! - [`diffusion`]: the ground-truth triggering model with two competing
//!   cascades, plus Monte-Carlo estimation of the prevention value;
//! - [`features`]: random weighted subgraphs and the distance-based feature
//!   map that scores a protector against an attacker;
//! - [`losses`]: set-similarity losses (Hamming, j-hop overlap);
//! - [`inference`]: greedy submodular maximization and the modular-modular
//!   heuristic for loss-augmented inference;
//! - [`training`]: one-slack cutting-plane training of the nonnegative
//!   feature weights;
//! - [`experiment`]: attacker sampling, a greedy Monte-Carlo protector
//!   oracle, baselines, and performance-ratio evaluation.
//!
//! Everything is deterministic given explicit seeds; no operation reads
//! ambient randomness. The crate is `no_std` (with `alloc`) so the
//! algorithmic core stays free of IO; file formats and orchestration live in
//! the companion CLI crate.

#![no_std]

extern crate alloc;

pub mod diffusion;
pub mod experiment;
pub mod features;
pub mod graph;
pub mod inference;
pub mod losses;
pub mod rng;
pub mod training;

pub use diffusion::{DiffusionOutcome, TiePolicy, TriggeringModel};
pub use features::{DistributionTag, FeatureBank, FeatureDistribution, ScoreModel};
pub use graph::{Graph, NodeId, NodeSet, WeightedSubgraph};
pub use losses::{LossSpec, SimilarityKind};
