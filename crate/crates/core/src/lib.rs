//! Simulation and attack synthesis for quantum bit commitment.
//!
//! The crate models purification-based commitment schemes (`scheme`), builds
//! Alice's cheating unitaries (`attack`), simulates the TTP-assisted
//! non-static protocol (`choi`) and runs reproducible numerical studies on
//! top of them (`analysis`).

pub mod analysis;
pub mod attack;
pub mod choi;
pub mod error;
pub mod qcore;
pub mod rng;
pub mod scheme;
pub mod serial;

pub use error::{QbcError, Result};
