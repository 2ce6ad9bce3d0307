//! Bayesian-network model of the Bayesian Optimization Algorithm: BIC-scored
//! greedy structure search, Laplace-smoothed conditional probability tables
//! and ancestral sampling.

mod network;
mod score;

pub use network::{estimate_cpts, greedy_build_network, network_score, sample_network, BayesianNetwork};
pub use score::{bic_node_score, conditional_entropy, ScoredDataset};

/// Default cap on parents per node.
pub const DEFAULT_MAX_INDEGREE: usize = 5;
