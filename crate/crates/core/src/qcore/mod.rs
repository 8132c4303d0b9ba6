//! Dense complex linear algebra and quantum-state primitives.
//!
//! Index convention: amplitudes and matrices are row-major with subsystems in
//! the order listed in `dims`. For a bipartite operator on `d_A x d_B` the
//! entry `a_{ijkl} = <ij|U|kl>` lives at row `i * d_B + j`, column
//! `k * d_B + l`.

mod linalg;
mod measure;
mod metrics;
mod operators;
mod random;
mod schmidt;
mod state;

pub use linalg::{dagger, eigh, hermitize, kron, max_abs, max_abs_diff, sqrt_psd, svd_sorted};
pub use measure::{apply_local, measure_projective, Measurement};
pub use metrics::{fidelity, trace_distance};
pub use operators::{partial_trace, DensityOperator, Keep, UnitaryOperator};
pub use random::{haar_random_state, haar_random_unitary};
pub use schmidt::{purify, schmidt_decompose, SchmidtDecomposition};
pub use state::StateVector;

pub use nalgebra::Complex;

pub type C64 = nalgebra::Complex<f64>;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;

/// Structural invariants (norm, hermiticity, trace).
pub const STRUCT_TOL: f64 = 1e-12;
/// Derived quantities (unitarity, orthonormality, reconstructions).
pub const DERIVED_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, 0)` are treated as numerical zeros.
pub const PSD_TOL: f64 = 1e-10;
/// Largest supported subsystem dimension.
pub const MAX_SUBSYSTEM_DIM: usize = 64;

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
