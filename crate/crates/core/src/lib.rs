//! Risk-dependent node centralities for financial and economic networks.
//!
//! Every node `i` of an undirected (optionally weighted) graph with adjacency
//! matrix `A` gets three curves parameterised by the external risk level `ζ ≥ 0`:
//!
//! * total communicability `R_i(ζ) = (e^{ζA} 1)_i`,
//! * circulability `C_i(ζ) = (e^{ζA})_ii`,
//! * transmissibility `T_i(ζ) = R_i(ζ) - C_i(ζ)`.
//!
//! The crate bundles the matrix-function engine behind them, the SI epidemic
//! model they come from, detection of ranking interlacement, Erdős–Rényi
//! null-model experiments and the two financial pipelines (correlation MST
//! asset trees and board-interlock networks).
//!
//! Data-parallel loops (ζ sweeps, Monte Carlo replications, all-pairs scans)
//! run on rayon when the `parallel` feature is enabled and fall back to plain
//! iterators otherwise; see [`exec`].

pub mod centrality;
pub mod config;
pub mod epidemics;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod finance;
pub mod graph;
pub mod interlacement;
pub mod spectral;
pub mod stats;

pub use centrality::{Measure, RankingSweep, RiskProfile, TieRule};
pub use error::{Error, Result};
pub use exec::Execution;
pub use graph::Graph;
pub use spectral::{ExpmEngine, SpectralDecomposition};
