// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M†| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a density operator: {0}")]
    NotDensityOperator(String),

    #[error("derivative must be traceless, trace = {trace:.3e}")]
    NonTracelessDerivative { trace: f64 },

    #[error("empty Pauli string")]
    EmptyPauliString,

    #[error("invalid Pauli label {0:?} (expected one of I, X, Y, Z)")]
    InvalidPauliLabel(char),

    #[error("invalid channel parameters: {0}")]
    InvalidChannel(String),

    #[error("invalid Bloch vector: {0}")]
    InvalidBlochVector(String),

    #[error("duration must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("n = {n} exceeds the explicit-matrix cap of {cap} qubits")]
    QubitCapExceeded { n: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bound diverges: {0}")]
    Divergent(String),

    #[error("infeasible resources: {0}")]
    Infeasible(String),
}
