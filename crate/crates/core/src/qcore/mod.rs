// SPDX-License-Identifier: Apache-2.0

//! Dense complex Hermitian algebra, Pauli operators, and the symmetric
//! logarithmic derivative / quantum Fisher information machinery.
//!
//! Qubit ordering is big-endian: qubit 1 is the leftmost Kronecker factor and
//! the most significant bit of a computational-basis index.

mod fisher;
mod matrix;
mod pauli;

pub use fisher::{delta_sq, generator_derivative, qfi, sld, variance, SUPPORT_CUTOFF};
pub use matrix::{eig_hermitian, DensityOperator, HermitianMatrix, SpectralDecomposition};
pub use pauli::{collective_h, kron_all, parity_x, pauli_string, parse_pauli_labels, Pauli, PauliString};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
