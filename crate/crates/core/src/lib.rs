//! Numerical laboratory for projection tuples with scalar sum, their trace
//! moment matrices, unitary correlation matrices and the Schur-multiplier
//! quantum channels built from them.
//!
//! The modules follow the chain of constructions:
//!
//! - [`spectra`]: closed-form membership oracles for the sets of scalars that
//!   occur as sums of `n` projections, and the rational dimension bound.
//! - [`tuples`]: seeds, the reflection functors, the alternating solver,
//!   symmetrization and banded-matrix diagnostics.
//! - [`moments`]: moment matrices `[τ(p_j p_i)]`, admissible pairs, the 2×2
//!   description and synchronous correlation export.
//! - [`unitaries`]: the projection/unitary bridge, Gram matrices, the explicit
//!   correlation matrices, padding and unitary discretization.
//! - [`channels`]: Schur multipliers, Choi certification and exact
//!   factorizations.
//! - [`pipeline`]: end-to-end witness bundles and residual sweeps.

pub mod channels;
pub mod error;
pub mod linalg;
pub mod moments;
pub mod pipeline;
pub mod runlog;
pub mod scalar;
pub mod spectra;
pub mod tuples;
pub mod unitaries;

pub use error::{Error, Result};
pub use scalar::Scalar;
