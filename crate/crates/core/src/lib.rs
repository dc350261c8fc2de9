//! Intrinsic degree of coherence for finite- and infinite-dimensional states.
//!
//! For an N-level density matrix ρ the intrinsic degree of coherence is
//! P_N = √((N·Tr ρ² − 1)/(N − 1)). It is basis independent and equals, among
//! other things, the length of the Bloch vector, the normalized distance of ρ
//! from the maximally mixed state, the maximum over bases of the degree of
//! coherence μ_N, and the maximum over bases of an N-path interference
//! visibility. For infinite-dimensional normalizable states it tends to
//! P_∞ = √(Tr ρ²).
//!
//! Modules:
//! - [`state`]: validated density matrices, spectra, random states, JSON I/O.
//! - [`bloch`]: generalized Gell-Mann basis and Bloch vectors.
//! - [`measures`]: P_N by every route, μ_N, visibilities, the pure-part
//!   decomposition, and the combined report.
//! - [`basis_opt`]: Haar sampling, the analytic maximizing bases, and a
//!   local search over U(N).
//! - [`infdim`]: OAM, angle, Fock, position/momentum and Wigner routes to P_∞.
//! - [`cli`]: the batch front end behind the `coherence` binary.

// `!(x > 0.0)` is used on purpose so NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis_opt;
pub mod bloch;
pub mod cli;
pub mod error;
pub mod format;
pub mod infdim;
pub mod measures;
pub mod state;

pub use error::{Error, Result};
pub use state::{DensityMatrix, Spectrum};
