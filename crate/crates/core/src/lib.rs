//! Quantum correlations of bipartite states quantified through the quantum
//! Fisher information of local observables.

pub mod correlations;
pub mod discord;
pub mod error;
pub mod fisher;
pub mod linalg;
pub mod measurement;
pub mod optimizer;
pub mod random;
pub mod spec;
pub mod states;
pub mod verify;

pub use correlations::{q_ah, q_api, q_api_with_basis, ObservableBasis, QuantifierResult};
pub use error::{Error, Result};
pub use fisher::{qfi, Observable, Povm};
pub use measurement::VonNeumannMeasurement;
pub use optimizer::{OptimizerConfig, OptimizerReport};
pub use states::{BipartiteState, DensityMatrix, KrausChannel};
