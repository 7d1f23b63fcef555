// SPDX-License-Identifier: Apache-2.0

//! Quantum-limited accuracy bounds for estimating a qubit rotation rate `g`.
//!
//! Probes of `n` qubits (product or cat states) pick up a phase `n g T` while
//! passing through a rotationally invariant T₁/T₂ decoherence channel. The
//! crate provides
//!
//! - [`qcore`]: dense Hermitian algebra, symmetric logarithmic derivative and
//!   quantum Fisher information,
//! - [`channel`]: the single-qubit decoherence map and its n-qubit extension,
//! - [`probes`]: initial and evolved probe states with closed-form spectra,
//! - [`bounds`]: weak and strong uncertainty bounds,
//! - [`allocator`]: optimal deployment of a qubit rate `R` over a window `τ`,
//! - [`montecarlo`]: simulated σ_x / parity readout with the arccos estimator,
//! - [`verify`]: brute-force oracle suites used by the CLI `verify` command.
//!
//! Rates are in s⁻¹ and times in s throughout.

pub mod allocator;
pub mod bounds;
pub mod channel;
mod error;
pub mod exec;
pub mod montecarlo;
pub mod probes;
pub mod qcore;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;

/// Largest qubit count for which explicit `2ⁿ × 2ⁿ` matrices are built.
pub const MAX_EXPLICIT_QUBITS: usize = 6;
