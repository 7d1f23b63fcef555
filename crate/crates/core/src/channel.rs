// SPDX-License-Identifier: Apache-2.0

//! Rotationally invariant single-qubit decoherence and its independent,
//! identical action on n-qubit states.
//!
//! The map acts on the Pauli basis as
//!
//! ```text
//! A_t(I)        = I + μ(1 - e^{-γ₁t}) Z
//! A_t(Z)        = e^{-γ₁t} Z
//! A_t(X ± iY)   = e^{-γ₂t} e^{∓iωt} (X ± iY)
//! ```
//!
//! so Bloch vectors relax towards `(0, 0, μ)` while precessing at rate ω about z.

use serde::{Deserialize, Serialize};

use crate::qcore::{eig_hermitian, CMatrix, DensityOperator, HermitianMatrix, Pauli, PauliString, C64};
use crate::{Error, Result, MAX_EXPLICIT_QUBITS};

const BLOCH_TOL: f64 = 1e-10;
const CHOI_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct RawParams {
    #[serde(default)]
    gamma1: f64,
    #[serde(default)]
    gamma2: f64,
    #[serde(default)]
    mu: f64,
    #[serde(default)]
    omega: f64,
}

/// Channel constants: `gamma1 = 1/T₁`, `gamma2 = 1/T₂` (s⁻¹), fixed-point
/// bias `mu`, and coherent rotation rate `omega` (s⁻¹).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ChannelParams {
    gamma1: f64,
    gamma2: f64,
    mu: f64,
    omega: f64,
}

impl TryFrom<RawParams> for ChannelParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        Self::new(r.gamma1, r.gamma2, r.mu).and_then(|p| p.with_omega(r.omega))
    }
}

impl From<ChannelParams> for RawParams {
    fn from(p: ChannelParams) -> Self {
        RawParams { gamma1: p.gamma1, gamma2: p.gamma2, mu: p.mu, omega: p.omega }
    }
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl ChannelParams {
    /// Enforces `|μ| ≤ 1` and `γ₂ ≥ γ₁/2 ≥ 0`.
    pub fn new(gamma1: f64, gamma2: f64, mu: f64) -> Result<Self> {
        let p = Self::unchecked(gamma1, gamma2, mu, 0.0);
        p.validate()?;
        Ok(p)
    }

    /// Only γ₂ > 0: pure dephasing.
    pub fn dephasing(gamma2: f64) -> Result<Self> {
        Self::new(0.0, gamma2, 0.0)
    }

    pub fn noiseless() -> Self {
        Self::unchecked(0.0, 0.0, 0.0, 0.0)
    }

    /// Builds parameters without the complete-positivity checks, for probing
    /// the CP region with [`choi_psd_check`]. Other operations may reject the
    /// result.
    pub fn unchecked(gamma1: f64, gamma2: f64, mu: f64, omega: f64) -> Self {
        Self { gamma1, gamma2, mu, omega }
    }

    pub fn with_omega(mut self, omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::InvalidChannel(format!("omega must be finite, got {omega}")));
        }
        self.omega = omega;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { gamma1, gamma2, mu, omega } = *self;
        if ![gamma1, gamma2, mu, omega].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidChannel("parameters must be finite".into()));
        }
        if gamma1 < 0.0 {
            return Err(Error::InvalidChannel(format!("gamma1 must be >= 0, got {gamma1}")));
        }
        if !(-1.0..=1.0).contains(&mu) {
            return Err(Error::InvalidChannel(format!("mu must lie in [-1, 1], got {mu}")));
        }
        if gamma2 < 0.5 * gamma1 {
            return Err(Error::InvalidChannel(format!(
                "complete positivity needs gamma2 >= gamma1/2 (T2 <= 2 T1), got gamma2 = {gamma2}, gamma1 = {gamma1}"
            )));
        }
        Ok(())
    }

    pub fn is_cp_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// 4×4 Pauli transfer matrix in the `(I, X, Y, Z)` basis at time `t`.
    pub fn transfer_matrix(&self, t: f64) -> Result<[[f64; 4]; 4]> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        let e1 = (-self.gamma1 * t).exp();
        let d1 = self.mu * (1.0 - e1);
        let d2 = (-self.gamma2 * t).exp();
        let (s, c) = (self.omega * t).sin_cos();
        Ok([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, d2 * c, -d2 * s, 0.0],
            [0.0, d2 * s, d2 * c, 0.0],
            [d1, 0.0, 0.0, e1],
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Self { x, y, z };
        let norm = v.norm();
        if !(norm <= 1.0 + BLOCH_TOL) {
            return Err(Error::InvalidBlochVector(format!("norm {norm} exceeds 1")));
        }
        Ok(v)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn from_density(rho: &DensityOperator) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: rho.dim() });
        }
        let m = rho.matrix().as_matrix();
        Self::new(2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, (m[(0, 0)] - m[(1, 1)]).re)
    }

    /// `(I + x X + y Y + z Z) / 2`.
    pub fn to_density(&self) -> Result<DensityOperator> {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.5 * (1.0 + self.z), 0.0),
                C64::new(0.5 * self.x, -0.5 * self.y),
                C64::new(0.5 * self.x, 0.5 * self.y),
                C64::new(0.5 * (1.0 - self.z), 0.0),
            ],
        );
        DensityOperator::new(HermitianMatrix::new(m)?)
    }

    fn as_coeffs(&self) -> [f64; 4] {
        [1.0, self.x, self.y, self.z]
    }
}

fn apply_transfer(r: &[[f64; 4]; 4], a: [f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (i, row) in r.iter().enumerate() {
        out[i] = row.iter().zip(a.iter()).map(|(x, y)| x * y).sum();
    }
    out
}

pub fn apply_bloch(params: &ChannelParams, t: f64, v: BlochVector) -> Result<BlochVector> {
    let r = params.transfer_matrix(t)?;
    let [_, x, y, z] = apply_transfer(&r, v.as_coeffs());
    Ok(BlochVector { x, y, z })
}

pub fn apply_qubit(params: &ChannelParams, t: f64, rho: &DensityOperator) -> Result<DensityOperator> {
    let v = BlochVector::from_density(rho)?;
    apply_bloch(params, t, v)?.to_density()
}

/// Applies the single-qubit map independently to every qubit of `rho`
/// through the Pauli-transfer representation: extract the 4ⁿ coefficients
/// `tr(ρ P_s)`, contract each qubit axis with the 4×4 transfer matrix, and
/// resum.
pub fn apply_nqubit(params: &ChannelParams, t: f64, rho: &DensityOperator) -> Result<DensityOperator> {
    let n = rho.n_qubits();
    if n > MAX_EXPLICIT_QUBITS {
        return Err(Error::QubitCapExceeded { n, cap: MAX_EXPLICIT_QUBITS });
    }
    let r = params.transfer_matrix(t)?;
    let m = rho.matrix().as_matrix();
    let count = 1usize << (2 * n);
    let strings: Vec<PauliString> = (0..count).map(|k| PauliString::from_index(n, k)).collect();
    let mut coeffs: Vec<f64> = strings.iter().map(|s| s.trace_with(m).re).collect();

    let mut scratch = vec![0.0; count];
    for axis in 0..n {
        let stride = 1usize << (2 * (n - 1 - axis));
        for base in 0..count {
            if (base / stride) % 4 != 0 {
                continue;
            }
            let a = [coeffs[base], coeffs[base + stride], coeffs[base + 2 * stride], coeffs[base + 3 * stride]];
            let b = apply_transfer(&r, a);
            for (k, v) in b.into_iter().enumerate() {
                scratch[base + k * stride] = v;
            }
        }
        std::mem::swap(&mut coeffs, &mut scratch);
    }

    let dim = 1usize << n;
    let norm = 1.0 / dim as f64;
    let mut out = CMatrix::zeros(dim, dim);
    for (s, c) in strings.iter().zip(coeffs.iter()) {
        if *c != 0.0 {
            s.add_scaled_to(&mut out, C64::new(c * norm, 0.0));
        }
    }
    DensityOperator::new(HermitianMatrix::new(out)?)
}

/// Complete-positivity probe of the single-qubit map at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChoiReport {
    pub psd: bool,
    pub min_eigenvalue: f64,
}

/// Builds the Choi matrix `Σ_ij |i⟩⟨j| ⊗ A_t(|i⟩⟨j|)` and reports its smallest
/// eigenvalue. Works on unchecked parameters.
pub fn choi_psd_check(params: &ChannelParams, t: f64) -> Result<ChoiReport> {
    let r = params.transfer_matrix(t)?;
    let paulis: Vec<CMatrix> =
        Pauli::ALL.iter().map(|&p| PauliString::new(&[p]).expect("single label").to_matrix()).collect();
    let mut choi = CMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let mut e = CMatrix::zeros(2, 2);
            e[(i, j)] = C64::new(1.0, 0.0);
            // complex Pauli coefficients of |i⟩⟨j|
            let a: Vec<C64> = paulis.iter().map(|p| (&e * p).trace() * 0.5).collect();
            let mut image = CMatrix::zeros(2, 2);
            for (row, p) in r.iter().zip(paulis.iter()) {
                let coeff: C64 = row.iter().zip(a.iter()).map(|(rk, ak)| ak * *rk).sum();
                image += p * coeff;
            }
            for k in 0..2 {
                for l in 0..2 {
                    choi[(2 * i + k, 2 * j + l)] = image[(k, l)];
                }
            }
        }
    }
    let min_eigenvalue = eig_hermitian(&HermitianMatrix::new(choi)?).min_eigenvalue();
    Ok(ChoiReport { psd: min_eigenvalue >= -CHOI_TOL, min_eigenvalue })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn constructor_enforces_cp_conditions() {
        assert!(ChannelParams::new(1.0, 0.5, 0.3).is_ok());
        assert!(matches!(ChannelParams::new(1.0, 0.49, 0.0), Err(Error::InvalidChannel(_))));
        assert!(matches!(ChannelParams::new(0.0, 1.0, 1.5), Err(Error::InvalidChannel(_))));
        assert!(matches!(ChannelParams::new(-1.0, 1.0, 0.0), Err(Error::InvalidChannel(_))));
        assert!(ChannelParams::new(f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn zero_time_is_identity() {
        let p = ChannelParams::new(0.4, 0.9, 0.2).unwrap().with_omega(1.3).unwrap();
        let v = BlochVector::new(0.3, -0.4, 0.5).unwrap();
        assert_eq!(apply_bloch(&p, 0.0, v).unwrap(), v);
    }

    #[test]
    fn long_time_reaches_fixed_point() {
        let p = ChannelParams::new(1.0, 2.0, -0.6).unwrap().with_omega(0.7).unwrap();
        let v = BlochVector::new(0.0, 0.6, 0.8).unwrap();
        let w = apply_bloch(&p, 80.0, v).unwrap();
        assert_close(w.x, 0.0, 1e-12);
        assert_close(w.y, 0.0, 1e-12);
        assert_close(w.z, -0.6, 1e-12);
    }

    #[test]
    fn figure_one_parameters() {
        // μ = 3/4, γ₁ = 3γ₂/4, γ₂t = π/4
        let g2 = 1.0;
        let p = ChannelParams::new(0.75 * g2, g2, 0.75).unwrap();
        let t = std::f64::consts::FRAC_PI_4 / g2;
        let w = apply_bloch(&p, t, BlochVector::new(0.0, 0.0, 1.0).unwrap()).unwrap();
        let e = (-3.0 * std::f64::consts::PI / 16.0).exp();
        assert_close(w.z, e + 0.75 * (1.0 - e), 1e-15);
    }

    #[test]
    fn negative_time_rejected() {
        let p = ChannelParams::noiseless();
        assert_eq!(apply_bloch(&p, -1.0, BlochVector::new(0.0, 0.0, 1.0).unwrap()).unwrap_err(), Error::NegativeTime(-1.0));
    }

    #[test]
    fn qubit_map_examples() {
        let mixed = BlochVector::new(0.0, 0.0, 0.0).unwrap().to_density().unwrap();
        let p = ChannelParams::new(0.8, 1.1, 0.0).unwrap();
        for t in [0.0, 0.3, 5.0] {
            let out = apply_qubit(&p, t, &mixed).unwrap();
            assert!(out.matrix().distance(mixed.matrix()) < 1e-15);
        }

        // (I + σ_x)/2 with γ₂t = 1, ω = 0
        let p = ChannelParams::new(0.5, 1.0, 0.4).unwrap();
        let plus = BlochVector::new(1.0, 0.0, 0.0).unwrap().to_density().unwrap();
        let out = BlochVector::from_density(&apply_qubit(&p, 1.0, &plus).unwrap()).unwrap();
        assert_close(out.x, (-1.0f64).exp(), 1e-15);
        assert_close(out.y, 0.0, 1e-15);
        assert_close(out.z, 0.4 * (1.0 - (-0.5f64).exp()), 1e-15);

        // |0⟩ with γ₁t = ln 2, μ = 0
        let p = ChannelParams::new(1.0, 1.0, 0.0).unwrap();
        let zero = BlochVector::new(0.0, 0.0, 1.0).unwrap().to_density().unwrap();
        let out = BlochVector::from_density(&apply_qubit(&p, 2f64.ln(), &zero).unwrap()).unwrap();
        assert_close(out.z, 0.5, 1e-15);
    }

    #[test]
    fn qubit_map_rejects_two_qubit_state() {
        let rho = DensityOperator::new(HermitianMatrix::from_real_diagonal(&[0.25; 4])).unwrap();
        assert!(matches!(apply_qubit(&ChannelParams::noiseless(), 1.0, &rho), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn precession_direction_follows_operator_map() {
        // σ_x → σ_x cos ωt + σ_y sin ωt
        let p = ChannelParams::noiseless().with_omega(1.0).unwrap();
        let w = apply_bloch(&p, 0.3, BlochVector::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert_close(w.x, 0.3f64.cos(), 1e-15);
        assert_close(w.y, 0.3f64.sin(), 1e-15);
    }

    #[test]
    fn nqubit_product_factorizes() {
        let p = ChannelParams::new(0.3, 0.7, 0.5).unwrap().with_omega(0.9).unwrap();
        let a = BlochVector::new(0.6, 0.0, 0.8).unwrap().to_density().unwrap();
        let b = BlochVector::new(-0.2, 0.5, 0.1).unwrap().to_density().unwrap();
        let joint = a.kron(&b).unwrap();
        let out = apply_nqubit(&p, 0.8, &joint).unwrap();
        let expected = apply_qubit(&p, 0.8, &a).unwrap().kron(&apply_qubit(&p, 0.8, &b).unwrap()).unwrap();
        assert!(out.matrix().distance(expected.matrix()) < 1e-14);

        let unchanged = apply_nqubit(&p, 0.0, &joint).unwrap();
        assert!(unchanged.matrix().distance(joint.matrix()) < 1e-14);
    }

    #[test]
    fn nqubit_cap() {
        let dim = 1 << 7;
        let rho = DensityOperator::new(HermitianMatrix::from_real_diagonal(&vec![1.0 / dim as f64; dim])).unwrap();
        assert_eq!(
            apply_nqubit(&ChannelParams::noiseless(), 1.0, &rho).unwrap_err(),
            Error::QubitCapExceeded { n: 7, cap: MAX_EXPLICIT_QUBITS }
        );
    }

    #[test]
    fn choi_unitary_and_amplitude_damping() {
        for mu in [-1.0, 0.0, 0.3, 1.0] {
            let p = ChannelParams::unchecked(0.0, 0.0, mu, 0.4);
            assert!(choi_psd_check(&p, 2.0).unwrap().psd);
        }
        let damping = ChannelParams::new(1.0, 0.5, 1.0).unwrap();
        for k in 0..=50 {
            assert!(choi_psd_check(&damping, 0.1 * k as f64).unwrap().psd);
        }
    }

    #[test]
    fn choi_flags_fast_longitudinal_decay() {
        let p = ChannelParams::unchecked(1.0, 0.4, 0.0, 0.0);
        let flagged = (1..=500).any(|k| !choi_psd_check(&p, 0.01 * k as f64).unwrap().psd);
        assert!(flagged);
    }

    #[test]
    fn serde_validates() {
        let ok: ChannelParams = serde_json::from_str(r#"{"gamma1":0.2,"gamma2":1.0,"mu":0.5}"#).unwrap();
        assert_eq!(ok.gamma2(), 1.0);
        assert!(serde_json::from_str::<ChannelParams>(r#"{"gamma1":2.0,"gamma2":0.5}"#).is_err());
    }
}
