// SPDX-License-Identifier: Apache-2.0

use nalgebra::SymmetricEigen;

use super::{CMatrix, C64};
use crate::{Error, Result};

/// Relative tolerance for accepting a matrix as Hermitian before it is
/// symmetrized.
const HERMITIAN_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;

/// A complex Hermitian matrix, stored symmetrized so that
/// `m[(i, j)] == conj(m[(j, i)])` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
}

impl HermitianMatrix {
    /// Validates `m` as Hermitian (relative to its largest entry) and stores
    /// `(m + m†) / 2`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        let adj = m.adjoint();
        let deviation = (&m - &adj).iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        let scale = m.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
        if !(deviation <= HERMITIAN_TOL * scale) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { m: (&m + adj).scale(0.5) })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { m: CMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: CMatrix::identity(dim, dim) }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self { m: CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::new(0.0, 0.0) }) }
    }

    pub(crate) fn from_symmetrized(m: CMatrix) -> Self {
        let adj = m.adjoint();
        Self { m: (&m + adj).scale(0.5) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: self.m.scale(s) }
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.m - &other.m).norm()
    }

    /// `tr(self · other)`, real for Hermitian arguments.
    pub fn trace_product(&self, other: &Self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.m[(i, j)] * other.m[(j, i)]).re;
            }
        }
        acc
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { m: self.m.kronecker(&other.m) }
    }
}

/// Eigenvalues in descending order with matching orthonormal eigenvector
/// columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    /// `Σ p_α |α⟩⟨α|`.
    pub fn reconstruct(&self) -> CMatrix {
        let v = &self.eigenvectors;
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&p| C64::new(p, 0.0)),
        ));
        v * d * v.adjoint()
    }

    /// Expresses `op` in the eigenbasis, `V† op V`.
    pub fn to_eigenbasis(&self, op: &CMatrix) -> CMatrix {
        self.eigenvectors.adjoint() * op * &self.eigenvectors
    }

    pub fn from_eigenbasis(&self, op: &CMatrix) -> CMatrix {
        &self.eigenvectors * op * self.eigenvectors.adjoint()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

pub fn eig_hermitian(m: &HermitianMatrix) -> SpectralDecomposition {
    let eig = SymmetricEigen::new(m.as_matrix().clone());
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    SpectralDecomposition { eigenvalues, eigenvectors }
}

/// Trace-one positive semidefinite state of `n_qubits` qubits. The spectrum is
/// computed once at construction and reused by the Fisher-information routines.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: HermitianMatrix,
    n_qubits: usize,
    spectrum: SpectralDecomposition,
}

impl DensityOperator {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let dim = matrix.dim();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::NotDensityOperator(format!("dimension {dim} is not 2^n with n >= 1")));
        }
        let trace = matrix.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotDensityOperator(format!("trace {trace} differs from 1")));
        }
        let spectrum = eig_hermitian(&matrix);
        let min = spectrum.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotDensityOperator(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix, n_qubits: dim.trailing_zeros() as usize, spectrum })
    }

    /// `|ψ⟩⟨ψ|` for a normalized state vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotDensityOperator(format!("state vector norm² {norm} differs from 1")));
        }
        let v = nalgebra::DVector::from_column_slice(psi);
        Self::new(HermitianMatrix::from_symmetrized(&v * v.adjoint()))
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    /// `⟨op⟩ = tr(ρ op)`.
    pub fn expectation(&self, op: &HermitianMatrix) -> f64 {
        self.matrix.trace_product(op)
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        Self::new(self.matrix.kron(&other.matrix))
    }
}
