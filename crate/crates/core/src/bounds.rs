// SPDX-License-Identifier: Apache-2.0

//! Closed-form lower bounds on the estimation error δg.
//!
//! Every bound has the form `δg = 1 / (2T √ν Δ)`: the weak bounds take Δ from
//! the variance of `h`, the strong bounds from the Fisher-information Δ of the
//! evolved state, and the no-decoherence bounds from the pure initial probe.
//! The decay factor `e^{nγ₂T}` is kept apart from the prefactor, and the
//! bound falls back to log space when either piece alone would overflow.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::probes::{ln_cat_leakage, ProbeFamily};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundForm {
    Nodec,
    Weak,
    Strong,
}

impl std::str::FromStr for BoundForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nodec" => Ok(BoundForm::Nodec),
            "weak" => Ok(BoundForm::Weak),
            "strong" => Ok(BoundForm::Strong),
            other => Err(Error::InvalidArgument(format!("unknown bound form {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundQuery {
    pub family: ProbeFamily,
    pub form: BoundForm,
    /// Qubits per probe.
    pub n: usize,
    /// Number of probes.
    pub nu: u64,
    /// Interaction time, s.
    pub t: f64,
    #[serde(default)]
    pub params: ChannelParams,
}

impl BoundQuery {
    pub fn total_qubits(&self) -> f64 {
        self.n as f64 * self.nu as f64
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.nu == 0 {
            return Err(Error::InvalidArgument(format!("need n >= 1 and nu >= 1, got n = {}, nu = {}", self.n, self.nu)));
        }
        if !self.t.is_finite() || self.t < 0.0 {
            return Err(Error::NegativeTime(self.t));
        }
        if self.t == 0.0 {
            return Err(Error::Divergent("interaction time T = 0 carries no information about g".into()));
        }
        self.params.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    /// Lower bound on δg, s⁻¹.
    pub delta_g: f64,
    /// `√(R/γ₂) δg/γ₂`, filled by [`BoundResult::with_dimensionless`].
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dimensionless: Option<f64>,
}

impl BoundResult {
    /// Adds the dimensionless form for qubit rate `r`; left empty when γ₂ = 0.
    pub fn with_dimensionless(mut self, r: f64, gamma2: f64) -> Self {
        self.dimensionless = dimensionless(self.delta_g, r, gamma2);
        self
    }
}

/// `√(R/γ₂) δg/γ₂`, or `None` without dephasing.
pub fn dimensionless(delta_g: f64, r: f64, gamma2: f64) -> Option<f64> {
    (gamma2 > 0.0 && r > 0.0).then(|| (r / gamma2).sqrt() * delta_g / gamma2)
}

/// `Δ² = base · e^{−2 decay}`, split so that large `nγ₂T` stays representable.
fn delta_sq_parts(q: &BoundQuery) -> Result<(f64, f64)> {
    let n = q.n as f64;
    let p = &q.params;
    let e1 = (-p.gamma1() * q.t).exp();
    let d1 = p.mu() * (1.0 - e1);
    let g2t = p.gamma2() * q.t;
    let (base, decay) = match (q.family, q.form) {
        (ProbeFamily::Product, BoundForm::Nodec) => (n / 4.0, 0.0),
        (ProbeFamily::Cat, BoundForm::Nodec) => (n * n / 4.0, 0.0),
        (ProbeFamily::Product, BoundForm::Weak) => (n / 4.0 * (1.0 - d1 * d1), 0.0),
        (ProbeFamily::Cat, BoundForm::Weak) => (n / 4.0 * (1.0 + (n - 1.0) * e1 * e1 - d1 * d1), 0.0),
        (ProbeFamily::Product, BoundForm::Strong) => (n / 4.0, g2t),
        (ProbeFamily::Cat, BoundForm::Strong) => (n * n / 4.0, n * g2t - 0.5 * ln_cat_leakage(q.n, q.t, p)),
    };
    if !(base > 0.0) {
        return Err(Error::Divergent("variance of h vanishes".into()));
    }
    Ok((base, decay))
}

/// Evaluates the requested bound.
///
/// | family  | nodec        | weak                                   | strong            |
/// |---------|--------------|----------------------------------------|-------------------|
/// | product | 1/(T√N)      | 1/(T√N) · (1 − d₁²)^{-1/2}             | e^{γ₂T}/(T√N)     |
/// | cat     | 1/(Tn√ν)     | 1/(T√N) · (1 + (n−1)e^{−2γ₁T} − d₁²)^{-1/2} | e^{nγ₂T}/(Tn√ν) · √((d₊+d₋)/2) |
///
/// with `d₁ = μ(1 − e^{−γ₁T})`. The last factor of the cat strong bound is 1
/// whenever γ₁ = 0 or n = 1.
pub fn bound(query: &BoundQuery) -> Result<BoundResult> {
    query.validate()?;
    let (base, decay) = delta_sq_parts(query)?;
    let direct = decay.exp() / (2.0 * query.t * (query.nu as f64).sqrt() * base.sqrt());
    if direct.is_finite() && direct > 0.0 {
        return Ok(BoundResult { delta_g: direct, dimensionless: None });
    }
    let ln_dg = decay - (2.0 * query.t).ln() - 0.5 * (query.nu as f64).ln() - 0.5 * base.ln();
    let delta_g = ln_dg.exp();
    if !delta_g.is_finite() {
        return Err(Error::Divergent(format!("ln δg = {ln_dg:.3} overflows")));
    }
    Ok(BoundResult { delta_g, dimensionless: None })
}

/// The three terms of `√(1 − μ²(1 − e^{−γ₁T})²) ≥ e^{−γ₁T/2} ≥ e^{−γ₂T}`,
/// which orders the weak product bound below the strong one.
pub fn weak_vs_strong_chain(t: f64, params: &ChannelParams) -> Result<[f64; 3]> {
    params.validate()?;
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let e1 = (-params.gamma1() * t).exp();
    let d1 = params.mu() * (1.0 - e1);
    Ok([(1.0 - d1 * d1).sqrt(), (-0.5 * params.gamma1() * t).exp(), (-params.gamma2() * t).exp()])
}
