//! Numerical tolerances used across the crate.
//!
//! Exact-algebra identities are held to near machine precision; anything
//! that passes through the optimizer is held to the optimizer's precision.

/// Largest matrix dimension handled by the dense kernels.
pub const MAX_DIM: usize = 64;

/// Hermiticity residual accepted on input to the eigensolver.
pub const HERMITIAN: f64 = 1e-10;

/// Off-diagonal Frobenius norm at which a Jacobi sweep is considered done.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-14;

/// Sweep cap for the Jacobi eigensolver and the one-sided Jacobi SVD.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Unitarity residual for matrices checked with `is_unitary`.
pub const UNITARY: f64 = 1e-10;

/// Trace and positivity tolerance for density matrices.
pub const DENSITY: f64 = 1e-10;

/// Norm tolerance for pure-state amplitude vectors.
pub const PURE_NORM: f64 = 1e-12;

/// Eigenvalues in `[-ENTROPY_CLIP, 0)` are treated as zero by the entropy.
pub const ENTROPY_CLIP: f64 = 1e-12;

/// Completeness (`sum K^dag K = I`) tolerance for Kraus sets.
pub const TRACE_PRESERVING: f64 = 1e-10;

/// Covariance residual below which the covariant capacity shortcut is allowed.
pub const COVARIANCE: f64 = 1e-8;

/// Exact algebraic identities (Pauli products, commutators, basis changes).
pub const EXACT_IDENTITY: f64 = 1e-15;

/// Pointwise channel equivalence on matrix units.
pub const POINTWISE: f64 = 1e-12;

/// Agreement between minimum output entropies found by the optimizer.
pub const OPTIMIZER: f64 = 1e-7;

/// Additivity gap `|h(Phi x Phi) - 2 h(Phi)|`.
pub const ADDITIVITY: f64 = 1e-6;

/// Slack allowed when a sampled entangled input is compared against `2 h(Phi)`.
pub const ENTANGLED_SLACK: f64 = 1e-9;

/// Default simplex-span convergence threshold for the optimizer.
pub const OPTIMIZER_SPAN: f64 = 1e-10;

/// Bloch-vector contraction residual.
pub const BLOCH: f64 = 1e-12;

/// Spectral agreement between the closed-form and numerical product outputs.
pub const SPECTRUM: f64 = 1e-10;

/// Closed-form algebraic identities evaluated in floating point.
pub const CLOSED_FORM: f64 = 1e-12;
