// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use super::{CMatrix, HermitianMatrix, C64};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_label(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidPauliLabel(other)),
        }
    }

    /// Position in the `(I, X, Y, Z)` ordering.
    pub fn index(self) -> usize {
        self as usize
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn phases(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

pub fn parse_pauli_labels(s: &str) -> Result<Vec<Pauli>> {
    if s.is_empty() {
        return Err(Error::EmptyPauliString);
    }
    s.chars().map(Pauli::from_label).collect()
}

/// A tensor product of Pauli operators in monomial form: every column has a
/// single nonzero entry, `P|c⟩ = i^{#Y} (-1)^{|c ∧ z|} |c ⊕ x⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliString {
    n: usize,
    x_mask: usize,
    z_mask: usize,
    y_count: u32,
}

impl PauliString {
    pub fn new(labels: &[Pauli]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyPauliString);
        }
        let n = labels.len();
        let mut x_mask = 0;
        let mut z_mask = 0;
        let mut y_count = 0;
        for (j, p) in labels.iter().enumerate() {
            let bit = 1usize << (n - 1 - j);
            if p.flips() {
                x_mask |= bit;
            }
            if p.phases() {
                z_mask |= bit;
            }
            if *p == Pauli::Y {
                y_count += 1;
            }
        }
        Ok(Self { n, x_mask, z_mask, y_count })
    }

    /// Decodes the base-4 index `k` (digit order I, X, Y, Z; qubit 1 most
    /// significant) into a string on `n` qubits.
    pub fn from_index(n: usize, mut k: usize) -> Self {
        let mut labels = vec![Pauli::I; n];
        for j in (0..n).rev() {
            labels[j] = Pauli::ALL[k & 3];
            k >>= 2;
        }
        Self::new(&labels).expect("n >= 1")
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Row index and value of the nonzero entry in column `col`.
    #[inline]
    pub fn column_entry(&self, col: usize) -> (usize, C64) {
        let sign = if (col & self.z_mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let phase = match self.y_count % 4 {
            0 => C64::new(sign, 0.0),
            1 => C64::new(0.0, sign),
            2 => C64::new(-sign, 0.0),
            _ => C64::new(0.0, -sign),
        };
        (col ^ self.x_mask, phase)
    }

    pub fn to_matrix(&self) -> CMatrix {
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let (row, v) = self.column_entry(col);
            m[(row, col)] = v;
        }
        m
    }

    /// `tr(M P)` in O(2ⁿ).
    pub fn trace_with(&self, m: &CMatrix) -> C64 {
        let dim = 1usize << self.n;
        (0..dim)
            .map(|col| {
                let (row, v) = self.column_entry(col);
                m[(col, row)] * v
            })
            .sum()
    }

    /// Accumulates `coeff · P` into `m`.
    pub fn add_scaled_to(&self, m: &mut CMatrix, coeff: C64) {
        let dim = 1usize << self.n;
        for col in 0..dim {
            let (row, v) = self.column_entry(col);
            m[(row, col)] += coeff * v;
        }
    }
}

/// Kronecker product of single-qubit Pauli operators; `labels[0]` is qubit 1.
pub fn pauli_string(labels: &[Pauli]) -> Result<HermitianMatrix> {
    Ok(HermitianMatrix::from_symmetrized(PauliString::new(labels)?.to_matrix()))
}

/// `h = Σ_j σ_z;j / 2`, the generator of the coupling `H = g h`.
pub fn collective_h(n: usize) -> Result<HermitianMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("collective_h needs n >= 1".into()));
    }
    let dim = 1usize << n;
    let diag: Vec<f64> = (0..dim).map(|b| (n as f64 - 2.0 * b.count_ones() as f64) / 2.0).collect();
    Ok(HermitianMatrix::from_real_diagonal(&diag))
}

/// `Σ_x = ⊗_j σ_x;j`, the parity readout for cat probes.
pub fn parity_x(n: usize) -> Result<HermitianMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("parity_x needs n >= 1".into()));
    }
    pauli_string(&vec![Pauli::X; n])
}

pub fn kron_all(factors: &[HermitianMatrix]) -> Result<HermitianMatrix> {
    let (first, rest) = factors.split_first().ok_or(Error::EmptyPauliString)?;
    Ok(rest.iter().fold(first.clone(), |acc, f| acc.kron(f)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(p: Pauli) -> CMatrix {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match p {
            Pauli::I => CMatrix::from_row_slice(2, 2, &[one, z, z, one]),
            Pauli::X => CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
            Pauli::Y => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            Pauli::Z => CMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
        }
    }

    #[test]
    fn single_qubit_z() {
        let z = pauli_string(&[Pauli::Z]).unwrap();
        assert_eq!(z.as_matrix(), &dense(Pauli::Z));
    }

    #[test]
    fn monomial_form_matches_kronecker_products() {
        for k in 0..64 {
            let s = PauliString::from_index(3, k);
            let mut labels = Vec::new();
            let mut kk = k;
            for _ in 0..3 {
                labels.push(Pauli::ALL[kk & 3]);
                kk >>= 2;
            }
            labels.reverse();
            let expected = labels.iter().skip(1).fold(dense(labels[0]), |acc, &p| acc.kronecker(&dense(p)));
            assert_eq!(s.to_matrix(), expected, "string {labels:?}");
        }
    }

    #[test]
    fn collective_h_two_qubits() {
        let h = collective_h(2).unwrap();
        let diag: Vec<f64> = h.as_matrix().diagonal().iter().map(|z| z.re).collect();
        assert_eq!(diag, vec![1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn parity_two_qubits_is_antidiagonal() {
        let p = parity_x(2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(p.as_matrix()[(i, j)], C64::new(expected, 0.0));
            }
        }
    }

    #[test]
    fn empty_and_bad_labels() {
        assert_eq!(pauli_string(&[]).unwrap_err(), Error::EmptyPauliString);
        assert_eq!(parse_pauli_labels("").unwrap_err(), Error::EmptyPauliString);
        assert_eq!(parse_pauli_labels("XQ").unwrap_err(), Error::InvalidPauliLabel('Q'));
        assert_eq!(parse_pauli_labels("ixyz").unwrap(), Pauli::ALL.to_vec());
    }

    #[test]
    fn trace_with_matches_dense() {
        let m = pauli_string(&[Pauli::Y, Pauli::Z]).unwrap();
        let s = PauliString::new(&[Pauli::Y, Pauli::Z]).unwrap();
        assert!((s.trace_with(m.as_matrix()) - C64::new(4.0, 0.0)).norm() < 1e-15);
        let other = PauliString::new(&[Pauli::X, Pauli::Z]).unwrap();
        assert!(other.trace_with(m.as_matrix()).norm() < 1e-15);
    }
}
