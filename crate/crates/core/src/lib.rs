//! Isotropic quantum spin channels.
//!
//! Kraus-form construction of the spin-1/2 and spin-1 rotationally invariant
//! channels and the transpose-depolarizing family, minimum output entropy by
//! multistart simplex search, Holevo capacity for covariant channels, the
//! Schmidt-coefficient analysis of two-use outputs, and a suite of checks
//! that pin the closed-form results to stated tolerances.

#![forbid(unsafe_code)]
// `!(x <= tol)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bipartite;
pub mod channels;
pub mod entropy;
pub mod error;
pub mod numerics;
pub mod optim;
pub mod random;
pub mod report;
pub mod tolerance;
pub mod verify;

pub use channels::{
    bloch_to_state, build_isotropic, build_transpose_depolarizing, check_covariance,
    state_to_bloch, Basis, BlochVector, DensityMatrix, KrausChannel, PureState, Spin,
};
pub use entropy::{
    holevo_covariant, holevo_ensemble_value, min_output_entropy, von_neumann_entropy,
    CovarianceCertificate, Ensemble, EntropyReport,
};
pub use error::{Error, Result};
pub use numerics::{Complex, ComplexMatrix};
pub use report::Units;
