//! # qcorr
//!
//! Entropic measures of quantum correlations for two-qubit states.
//!
//! A local projective measurement that goes unread can only mix a bipartite
//! state, never sharpen it; the induced entropy increase, minimized over
//! measurement directions, quantifies the quantum correlations the
//! measurement destroys. This crate computes that minimum for a family of
//! generalized entropies `S_f = Tr f(rho)`:
//!
//! - exact 3x3 moment-matrix closed forms for the quadratic (twice the
//!   geometric discord) and cubic measures of arbitrary states,
//! - the universal spectrum formula for states with maximally mixed
//!   marginals, valid for every admissible entropy,
//! - principal-axis and interior-angle machinery for X states,
//! - piecewise branches with exact critical angles for the mixture of two
//!   aligned spins,
//! - a derivative-free direction optimizer and a dense-grid oracle for
//!   everything else (arbitrary Tsallis index, von Neumann), plus the
//!   quantum discord under projective measurements,
//! - concurrence / entanglement-of-formation references and purity-bound
//!   diagnostics.
//!
//! States travel as [`state::BlochState`] (two local Bloch vectors plus the
//! 3x3 correlation matrix) or as raw 4x4 density matrices; JSON file I/O
//! accepts both. Everything is a pure function of its inputs and safe to
//! call concurrently.
//!
//! ```
//! use qcorr::{aligned_state, info_loss_quadratic, minimize_info_loss};
//! use qcorr::{EntropySpec, OptimizerOptions};
//!
//! // mixture of two spins tilted by +-60 degrees: separable but correlated
//! let state = aligned_state(std::f64::consts::PI / 3.0);
//!
//! let quadratic = info_loss_quadratic(&state); // exact closed form
//! assert!((quadratic.value - 5.0 / 32.0).abs() < 1e-12);
//!
//! let spec = EntropySpec::parse("vn").unwrap(); // von Neumann: grid search
//! let deficit = minimize_info_loss(&state, spec, &OptimizerOptions::default());
//! assert!(deficit.value > 0.0 && deficit.converged);
//! ```
//!
//! The `qcorr` binary exposes the library as subcommands (`measure`,
//! `sweep-aligned`, `envelope`, `oracle`, `random`) that emit JSON or CSV.

#![forbid(unsafe_code)]

pub mod closed;
pub mod entangle;
pub mod entropy;
pub mod io;
pub mod measure;
pub mod oracle;
pub mod runs;
pub mod state;

pub use closed::{
    aligned_closed, aligned_state, bell_diag_info_loss, bell_diag_spectrum,
    critical_angle_cubic, critical_angle_quadratic, info_loss_cubic, info_loss_quadratic,
    spectrum_envelope, x_state_info_loss, MomentMatrix,
};
pub use entangle::{concurrence, entanglement_bound_bell_diag, eof, ConcurrenceReport};
pub use entropy::{entropy_of_spectrum, s2_closed, s3_closed, EntropySpec};
pub use measure::{
    cond_spectrum, discord, info_loss, local_state_after, minimize_info_loss,
    post_measurement_state, stationary_residual, Direction, MeasurementReport, Method,
    OptimizerOptions,
};
pub use oracle::grid_oracle;
pub use state::{BlochState, DensityMatrix, SampleMethod, StateTag};
