// SPDX-License-Identifier: Apache-2.0

//! Symmetric logarithmic derivative and the quantities built on it.
//!
//! In the eigenbasis `ρ = Σ p_α |α⟩⟨α|` the SLD superoperator is
//! `L_ρ(O) = Σ 2/(p_α + p_β) O_αβ |α⟩⟨β|`, summed over pairs off the joint
//! null space of ρ. The quantum Fisher information is `tr(ρ′ L_ρ(ρ′))`.

use super::{CMatrix, DensityOperator, HermitianMatrix, C64};
use crate::{Error, Result};

/// Pairs with `p_α + p_β` below this are treated as outside the support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

const TRACELESS_TOL: f64 = 1e-10;

fn check_shapes(rho: &DensityOperator, op: &HermitianMatrix) -> Result<()> {
    if rho.dim() != op.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: op.dim() });
    }
    Ok(())
}

fn check_derivative(rho: &DensityOperator, drho: &HermitianMatrix) -> Result<()> {
    check_shapes(rho, drho)?;
    let trace = drho.trace();
    if trace.abs() > TRACELESS_TOL {
        return Err(Error::NonTracelessDerivative { trace });
    }
    Ok(())
}

/// `ρ′ = -i t [h, ρ]`, the derivative of `e^{-i g t h} ρ e^{i g t h}` with
/// respect to `g`.
pub fn generator_derivative(rho: &DensityOperator, h: &HermitianMatrix, t: f64) -> Result<HermitianMatrix> {
    check_shapes(rho, h)?;
    let r = rho.matrix().as_matrix();
    let hm = h.as_matrix();
    let comm: CMatrix = hm * r - r * hm;
    Ok(HermitianMatrix::from_symmetrized(comm * C64::new(0.0, -t)))
}

/// The symmetric logarithmic derivative `L` with `ρ′ = (ρL + Lρ)/2` on the
/// support of ρ.
pub fn sld(rho: &DensityOperator, drho: &HermitianMatrix) -> Result<HermitianMatrix> {
    check_derivative(rho, drho)?;
    let spec = rho.spectrum();
    let p = &spec.eigenvalues;
    let d = spec.to_eigenbasis(drho.as_matrix());
    let n = p.len();
    let l = CMatrix::from_fn(n, n, |a, b| {
        let s = p[a] + p[b];
        if s < SUPPORT_CUTOFF {
            C64::new(0.0, 0.0)
        } else {
            d[(a, b)] * (2.0 / s)
        }
    });
    Ok(HermitianMatrix::from_symmetrized(spec.from_eigenbasis(&l)))
}

/// Quantum Fisher information `tr(ρ′ L_ρ(ρ′)) = Σ 2|ρ′_αβ|²/(p_α + p_β)`.
pub fn qfi(rho: &DensityOperator, drho: &HermitianMatrix) -> Result<f64> {
    check_derivative(rho, drho)?;
    let spec = rho.spectrum();
    let p = &spec.eigenvalues;
    let d = spec.to_eigenbasis(drho.as_matrix());
    let mut acc = 0.0;
    for a in 0..p.len() {
        for b in 0..p.len() {
            let s = p[a] + p[b];
            if s >= SUPPORT_CUTOFF {
                acc += 2.0 * d[(a, b)].norm_sqr() / s;
            }
        }
    }
    Ok(acc.max(0.0))
}

/// `Δ² = ½ Σ (p_α − p_β)²/(p_α + p_β) |h_αβ|²`, so that
/// `qfi(ρ, -iT[h, ρ]) = 4T²Δ²`.
pub fn delta_sq(rho: &DensityOperator, h: &HermitianMatrix) -> Result<f64> {
    check_shapes(rho, h)?;
    let spec = rho.spectrum();
    let p = &spec.eigenvalues;
    let hm = spec.to_eigenbasis(h.as_matrix());
    let mut acc = 0.0;
    for a in 0..p.len() {
        for b in 0..p.len() {
            let s = p[a] + p[b];
            if s >= SUPPORT_CUTOFF {
                let diff = p[a] - p[b];
                acc += 0.5 * diff * diff / s * hm[(a, b)].norm_sqr();
            }
        }
    }
    Ok(acc.max(0.0))
}

/// `⟨h²⟩ − ⟨h⟩²`.
pub fn variance(rho: &DensityOperator, h: &HermitianMatrix) -> Result<f64> {
    check_shapes(rho, h)?;
    let mean = rho.expectation(h);
    let h2 = HermitianMatrix::from_symmetrized(h.as_matrix() * h.as_matrix());
    Ok((rho.expectation(&h2) - mean * mean).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{collective_h, pauli_string, Pauli};

    fn plus_state() -> DensityOperator {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityOperator::pure(&[C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap()
    }

    #[test]
    fn pure_qubit_qfi_is_one() {
        let rho = plus_state();
        let h = collective_h(1).unwrap();
        let drho = generator_derivative(&rho, &h, 1.0).unwrap();
        assert!((qfi(&rho, &drho).unwrap() - 1.0).abs() < 1e-12);
        assert!((delta_sq(&rho, &h).unwrap() - 0.25).abs() < 1e-12);
        assert!((variance(&rho, &h).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn pure_state_sld_gives_four_variance() {
        let rho = plus_state();
        let h = collective_h(1).unwrap();
        let drho = generator_derivative(&rho, &h, 1.0).unwrap();
        let l = sld(&rho, &drho).unwrap();
        assert!((drho.trace_product(&l) - 4.0 * variance(&rho, &h).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn zero_derivative_gives_zero_sld() {
        let rho = DensityOperator::new(HermitianMatrix::from_real_diagonal(&[0.5, 0.5])).unwrap();
        let l = sld(&rho, &HermitianMatrix::zeros(2)).unwrap();
        assert!(l.as_matrix().norm() == 0.0);
        assert_eq!(qfi(&rho, &HermitianMatrix::zeros(2)).unwrap(), 0.0);
    }

    #[test]
    fn diagonal_qubit_sld_matches_lyapunov_solution() {
        // ρL + Lρ = 2ρ′ with ρ = diag(a, b), ρ′ = c σ_x has L = 2c/(a+b) σ_x.
        let rho = DensityOperator::new(HermitianMatrix::from_real_diagonal(&[0.75, 0.25])).unwrap();
        let drho = pauli_string(&[Pauli::X]).unwrap().scale(0.3);
        let l = sld(&rho, &drho).unwrap();
        let expected = pauli_string(&[Pauli::X]).unwrap().scale(0.6);
        assert!(l.distance(&expected) < 1e-12);
    }

    #[test]
    fn commuting_generator_has_no_information() {
        let rho = DensityOperator::new(HermitianMatrix::from_real_diagonal(&[0.6, 0.3, 0.1, 0.0])).unwrap();
        let h = collective_h(2).unwrap();
        assert!(delta_sq(&rho, &h).unwrap().abs() < 1e-15);
    }

    #[test]
    fn rejects_traced_derivative_and_bad_shapes() {
        let rho = plus_state();
        let drho = HermitianMatrix::from_real_diagonal(&[0.1, 0.0]);
        assert!(matches!(sld(&rho, &drho), Err(Error::NonTracelessDerivative { .. })));
        let h = collective_h(2).unwrap();
        assert!(matches!(variance(&rho, &h), Err(Error::DimensionMismatch { .. })));
    }
}
