//! Monte Carlo and exact-arithmetic laboratory for nodal sets of random
//! waves on flat tori.

pub mod combinatorics;
pub mod ensemble;
pub mod grassmann;
pub mod harness;
pub mod nodal;

pub use combinatorics::{ExactScalar, JetCovariance};
pub use harness::{run, ExperimentConfig, ExperimentKind, ExperimentResult, Report};
