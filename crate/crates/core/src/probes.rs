// SPDX-License-Identifier: Apache-2.0

//! Product and cat probe states, their evolution through the channel, and the
//! closed-form spectral data and moments behind the strong and weak bounds.
//!
//! Evolution folds the signal rotation into the channel (`ω = g`), so an
//! evolved probe is `A_T(ρ₀)` with the channel precessing at the probe's `g`.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::qcore::{CMatrix, DensityOperator, HermitianMatrix, C64};
use crate::{Error, Result, MAX_EXPLICIT_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeFamily {
    /// `⊗ (|0⟩ + |1⟩)/√2`
    Product,
    /// `(|0…0⟩ + |1…1⟩)/√2`
    Cat,
}

impl std::str::FromStr for ProbeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "product" => Ok(ProbeFamily::Product),
            "cat" => Ok(ProbeFamily::Cat),
            other => Err(Error::InvalidArgument(format!("unknown probe family {other:?}"))),
        }
    }
}

impl std::fmt::Display for ProbeFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProbeFamily::Product => "product",
            ProbeFamily::Cat => "cat",
        })
    }
}

/// Probe family, qubits per probe `n`, interaction time `t` (s) and coupling
/// `g` (s⁻¹).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub family: ProbeFamily,
    pub n: usize,
    pub t: f64,
    pub g: f64,
}

impl ProbeSpec {
    pub fn new(family: ProbeFamily, n: usize, t: f64, g: f64) -> Result<Self> {
        let spec = Self { family, n, t, g };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("probe needs n >= 1 qubits".into()));
        }
        if !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(Error::NegativeTime(self.t));
        }
        if !self.g.is_finite() {
            return Err(Error::InvalidArgument(format!("coupling g must be finite, got {}", self.g)));
        }
        Ok(())
    }

    fn check_cap(&self) -> Result<()> {
        self.validate()?;
        if self.n > MAX_EXPLICIT_QUBITS {
            return Err(Error::QubitCapExceeded { n: self.n, cap: MAX_EXPLICIT_QUBITS });
        }
        Ok(())
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn qubit_matrix(x: f64, y: f64, z: f64) -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[real(0.5 * (1.0 + z)), C64::new(0.5 * x, -0.5 * y), C64::new(0.5 * x, 0.5 * y), real(0.5 * (1.0 - z))],
    )
}

fn cat_matrix(n: usize, upper: f64, lower: f64, coherence: C64) -> CMatrix {
    // diagonal: ½[Π(1 + upper·s_j)/2 + Π(1 − lower·s_j)/2], s_j = ±1 for bit 0/1
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for b in 0..dim {
        let ones = b.count_ones() as i32;
        let zeros = n as i32 - ones;
        let first = ((1.0 + upper) / 2.0).powi(zeros) * ((1.0 - upper) / 2.0).powi(ones);
        let second = ((1.0 - lower) / 2.0).powi(zeros) * ((1.0 + lower) / 2.0).powi(ones);
        m[(b, b)] = real(0.5 * (first + second));
    }
    if n >= 1 {
        m[(0, dim - 1)] += coherence;
        m[(dim - 1, 0)] += coherence.conj();
    }
    m
}

fn density(m: CMatrix) -> Result<DensityOperator> {
    DensityOperator::new(HermitianMatrix::new(m)?)
}

/// Initial probe state before the channel.
pub fn build_initial(spec: &ProbeSpec) -> Result<DensityOperator> {
    spec.check_cap()?;
    match spec.family {
        ProbeFamily::Product => {
            let q = qubit_matrix(1.0, 0.0, 0.0);
            density((1..spec.n).fold(q.clone(), |acc, _| acc.kronecker(&q)))
        }
        ProbeFamily::Cat => density(cat_matrix(spec.n, 1.0, 1.0, real(0.5))),
    }
}

/// Probe state after time `spec.t` in the channel, assembled from the closed
/// forms (channel precession set to `spec.g`).
pub fn evolve(spec: &ProbeSpec, params: &ChannelParams) -> Result<DensityOperator> {
    spec.check_cap()?;
    let t = spec.t;
    let e1 = (-params.gamma1() * t).exp();
    let d1 = params.mu() * (1.0 - e1);
    let phase = spec.g * t;
    match spec.family {
        ProbeFamily::Product => {
            let d2 = (-params.gamma2() * t).exp();
            let q = qubit_matrix(d2 * phase.cos(), d2 * phase.sin(), d1);
            density((1..spec.n).fold(q.clone(), |acc, _| acc.kronecker(&q)))
        }
        ProbeFamily::Cat => {
            let n = spec.n as f64;
            let d2n = (-n * params.gamma2() * t).exp();
            let coherence = C64::from_polar(0.5 * d2n, -n * phase);
            density(cat_matrix(spec.n, e1 + d1, e1 - d1, coherence))
        }
    }
}

/// Single-qubit spectrum after time `T`: eigenvalues `(1 ± √(d₁² + d₂²))/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitSpectralData {
    pub d1: f64,
    pub d2: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub sin_theta: f64,
    pub cos_theta: f64,
}

/// Spectrum of the evolved cat state restricted to span{|0…0⟩, |1…1⟩}.
/// `p_plus + p_minus = (d_plus + d_minus)/2`, which is below one when γ₁ > 0
/// and n ≥ 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatSpectralData {
    pub d_plus: f64,
    pub d_minus: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub sin_theta: f64,
    pub cos_theta: f64,
    pub d2n: f64,
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

fn angle(adjacent: f64, opposite: f64) -> (f64, f64) {
    let r = adjacent.hypot(opposite);
    if r == 0.0 {
        (0.0, 1.0)
    } else {
        (opposite / r, adjacent / r)
    }
}

pub fn qubit_spectral(t: f64, params: &ChannelParams) -> Result<QubitSpectralData> {
    check_time(t)?;
    let e1 = (-params.gamma1() * t).exp();
    let d1 = params.mu() * (1.0 - e1);
    let d2 = (-params.gamma2() * t).exp();
    let r = d1.hypot(d2);
    let (sin_theta, cos_theta) = angle(d1, d2);
    Ok(QubitSpectralData { d1, d2, p_plus: 0.5 * (1.0 + r), p_minus: 0.5 * (1.0 - r), sin_theta, cos_theta })
}

pub fn cat_spectral(n: usize, t: f64, params: &ChannelParams) -> Result<CatSpectralData> {
    check_time(t)?;
    if n == 0 {
        return Err(Error::InvalidArgument("cat probe needs n >= 1".into()));
    }
    let e1 = (-params.gamma1() * t).exp();
    let d1 = params.mu() * (1.0 - e1);
    let nf = n as f64;
    let d_plus = ((1.0 + e1 + d1) / 2.0).powf(nf) + ((1.0 - e1 + d1) / 2.0).powf(nf);
    let d_minus = ((1.0 + e1 - d1) / 2.0).powf(nf) + ((1.0 - e1 - d1) / 2.0).powf(nf);
    let d2n = (-nf * params.gamma2() * t).exp();
    let diff = d_plus - d_minus;
    let r = diff.hypot(2.0 * d2n);
    let (sin_theta, cos_theta) = angle(diff, 2.0 * d2n);
    let sum = d_plus + d_minus;
    Ok(CatSpectralData {
        d_plus,
        d_minus,
        p_plus: 0.25 * (sum + r),
        p_minus: 0.25 * (sum - r),
        sin_theta,
        cos_theta,
        d2n,
    })
}

fn ln_add_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

/// `ln(2/(d₊ + d₋))`: the correction to the cat-state Δ² from population
/// leaking out of span{|0…0⟩, |1…1⟩}. Zero when γ₁ = 0 or n = 1. Evaluated
/// in log space so large `n` does not underflow.
pub fn ln_cat_leakage(n: usize, t: f64, params: &ChannelParams) -> f64 {
    if n <= 1 || params.gamma1() == 0.0 || t == 0.0 {
        return 0.0;
    }
    let e1 = (-params.gamma1() * t).exp();
    let d1 = params.mu() * (1.0 - e1);
    let nf = n as f64;
    let term = |base: f64| if base > 0.0 { nf * (base / 2.0).ln() } else { f64::NEG_INFINITY };
    let ln_dp = ln_add_exp(term(1.0 + e1 + d1), term(1.0 - e1 + d1));
    let ln_dm = ln_add_exp(term(1.0 + e1 - d1), term(1.0 - e1 - d1));
    std::f64::consts::LN_2 - ln_add_exp(ln_dp, ln_dm)
}

/// Moments of `h = Σσ_z;j/2` in the evolved cat state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatMoments {
    pub mean_h: f64,
    pub mean_h2: f64,
    pub var_h: f64,
}

pub fn cat_moments(n: usize, t: f64, params: &ChannelParams) -> Result<CatMoments> {
    check_time(t)?;
    if n == 0 {
        return Err(Error::InvalidArgument("cat probe needs n >= 1".into()));
    }
    let e1 = (-params.gamma1() * t).exp();
    let d1 = params.mu() * (1.0 - e1);
    let nf = n as f64;
    let e1sq = e1 * e1;
    let d1sq = d1 * d1;
    Ok(CatMoments {
        mean_h: nf * d1 / 2.0,
        mean_h2: nf / 4.0 * (1.0 + (nf - 1.0) * (e1sq + d1sq)),
        var_h: nf / 4.0 * (1.0 + (nf - 1.0) * e1sq - d1sq),
    })
}

/// `ln Δ²` for the evolved probe: product `ln(n/4) − 2γ₂T`; cat
/// `ln(n²/4) − 2nγ₂T + ln(2/(d₊ + d₋))`.
pub fn ln_delta_sq_closed(spec: &ProbeSpec, params: &ChannelParams) -> Result<f64> {
    spec.validate()?;
    let n = spec.n as f64;
    let g2t = params.gamma2() * spec.t;
    Ok(match spec.family {
        ProbeFamily::Product => (n / 4.0).ln() - 2.0 * g2t,
        ProbeFamily::Cat => (n * n / 4.0).ln() - 2.0 * n * g2t + ln_cat_leakage(spec.n, spec.t, params),
    })
}

/// Δ² of the evolved probe in closed form (no matrix cap).
pub fn delta_sq_closed(spec: &ProbeSpec, params: &ChannelParams) -> Result<f64> {
    Ok(ln_delta_sq_closed(spec, params)?.exp())
}
