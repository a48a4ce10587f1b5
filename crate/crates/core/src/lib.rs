//! Community detection for the stochastic block model (SBM).
//!
//! The crate covers the full pipeline of a likelihood-based analysis:
//!
//! - [`graph`]: graphs, labelings, block counters, confusion matrices and
//!   the misclassification distance between two labelings.
//! - [`sampler`]: model parameters, seeded sampling and the conditional
//!   expectation of block edge counts under a mismatched labeling.
//! - [`modularity`]: the profile-likelihood modularity `Q_ML` and the
//!   integrated conditional likelihood modularity `Q_ICL`.
//! - [`theory`]: divergences, the Chernoff-Hellinger constant `C(pi, S)`
//!   and the expectation-based decompositions of `Q_ML`.
//! - [`estimators`]: exact and greedy maximizers of either modularity over
//!   labelings whose smallest community holds at least `alpha * n` nodes.
//! - [`metrics`], [`experiments`], [`verify`]: NMI, the separation and
//!   sparsity sweeps, the concentration diagnostic and a self-check suite.

pub mod assignment;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod metrics;
pub mod modularity;
pub mod plot;
pub mod rng;
pub mod sampler;
pub mod theory;
pub mod verify;

pub use error::{Result, SbmError};
pub use estimators::{exact_argmax, greedy_argmax, Alpha, FitResult, SearchConfig};
pub use graph::{
    block_counters, confusion, in_constraint_set, misclassification, misclassification_l1,
    BlockCounters, ConfusionMatrix, Graph, Labeling,
};
pub use matrix::Matrix;
pub use metrics::nmi;
pub use modularity::{icl_ml_gap, q_icl, q_ml, Objective};
pub use sampler::{expected_edge_counts, mixture_probability, sample, RhoMode, SbmParams};
pub use theory::{ch_constant, g_s, h_pn, w_deviation, x_statistic, PhaseConstant};
