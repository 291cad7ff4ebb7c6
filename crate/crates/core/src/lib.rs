//! Information-theoretic sample-complexity lower bounds for learning the
//! edge structure of zero-field ferromagnetic Ising models, together with
//! the exact small-graph machinery needed to check them: brute-force
//! inference, hard-instance generators, and an empirical Fano-floor
//! harness.

pub mod bounds;
pub mod ensembles;
pub mod er;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod ising;
pub mod numerics;
pub mod paths;
pub mod sampling;

pub use error::{Error, Result};
pub use graph::Graph;
pub use ising::{infer_exact, kl_exact, Caps, ExactInference, IsingModel};
