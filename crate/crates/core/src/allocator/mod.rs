// SPDX-License-Identifier: Apache-2.0

//! Resource-optimal deployment of a qubit supply: given the supply rate `R`,
//! the total duration `τ`, the dephasing rate `γ₂` and the minimum probe
//! count `ν_min`, choose the interaction time `T`, qubits per probe `n` and
//! probe count `ν` subject to `τ = νn/R + T`.
//!
//! Each [`Allocation`] carries two answers. The `continuous` block is the
//! relaxed optimum with real `n` and `ν` (the regime table / `dec4i`-style
//! closed forms). The top-level fields are a physical allocation with whole
//! qubits and probes whose `δg` is evaluated with the strong bound.

mod figures;
mod search;

pub use figures::{figure_curves, log_grid, Fig2Row, Fig3Row, FigureKind, FigureTable, FIG3_SCALES};
pub use search::{grid_search, GridOptimum};

use serde::{Deserialize, Serialize};

use crate::bounds::{bound, dimensionless, BoundForm, BoundQuery};
use crate::channel::ChannelParams;
use crate::probes::ProbeFamily;
use crate::{Error, Result};

pub const DEFAULT_NU_MIN: u64 = 50;

fn default_nu_min() -> u64 {
    DEFAULT_NU_MIN
}

/// Rates in s⁻¹, times in s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resources {
    /// Qubit supply rate.
    #[serde(rename = "R")]
    pub r: f64,
    /// Total duration of the measurement.
    pub tau: f64,
    #[serde(default = "default_nu_min")]
    pub nu_min: u64,
    #[serde(default)]
    pub gamma2: f64,
    /// Only used for [`Allocation::delta_g_full`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<f64>,
    /// Only used for [`Allocation::delta_g_full`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

impl Resources {
    pub fn new(r: f64, tau: f64, gamma2: f64) -> Result<Self> {
        let res = Self { r, tau, nu_min: DEFAULT_NU_MIN, gamma2, gamma1: None, mu: None };
        res.validate()?;
        Ok(res)
    }

    pub fn with_nu_min(mut self, nu_min: u64) -> Result<Self> {
        self.nu_min = nu_min;
        self.validate()?;
        Ok(self)
    }

    /// Checks the field ranges. Feasibility (`Rτ > ν_min`) is checked
    /// separately by [`Resources::check_feasible`].
    pub fn validate(&self) -> Result<()> {
        if !(self.r.is_finite() && self.r > 0.0) {
            return Err(Error::InvalidArgument(format!("R must be > 0, got {}", self.r)));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidArgument(format!("tau must be > 0, got {}", self.tau)));
        }
        if self.nu_min == 0 {
            return Err(Error::InvalidArgument("nu_min must be >= 1".into()));
        }
        if !(self.gamma2.is_finite() && self.gamma2 >= 0.0) {
            return Err(Error::InvalidArgument(format!("gamma2 must be >= 0, got {}", self.gamma2)));
        }
        if self.gamma1.is_some() || self.mu.is_some() {
            self.channel()?;
        }
        Ok(())
    }

    pub fn check_feasible(&self) -> Result<()> {
        self.validate()?;
        if self.r * self.tau <= self.nu_min as f64 {
            return Err(Error::Infeasible(format!(
                "R*tau = {} qubits cannot field nu_min = {} probes with any interaction time",
                self.r * self.tau,
                self.nu_min
            )));
        }
        Ok(())
    }

    /// The full channel, with unset `γ₁` and `μ` taken as 0.
    pub fn channel(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.gamma1.unwrap_or(0.0), self.gamma2, self.mu.unwrap_or(0.0))
    }

    fn nu_min_f(&self) -> f64 {
        self.nu_min as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "starved")]
    Starved,
    #[serde(rename = "low-dec")]
    LowDecoherence,
    #[serde(rename = "transition")]
    Transition,
    #[serde(rename = "high-dec")]
    HighDecoherence,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Starved => "starved",
            Regime::LowDecoherence => "low-dec",
            Regime::Transition => "transition",
            Regime::HighDecoherence => "high-dec",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Relaxed optimum with real-valued `n` and `ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousOptimum {
    #[serde(rename = "T")]
    pub t: f64,
    pub n: f64,
    pub nu: f64,
    pub delta_g: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimensionless: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub family: ProbeFamily,
    pub regime: Regime,
    #[serde(rename = "T")]
    pub t: f64,
    pub n: u64,
    pub nu: u64,
    /// Qubits consumed, `nν`.
    #[serde(rename = "N")]
    pub total_qubits: u64,
    /// Strong bound (pure dephasing) at the integer allocation.
    pub delta_g: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimensionless: Option<f64>,
    pub continuous: ContinuousOptimum,
    /// Strong bound with the full (γ₁, γ₂, μ) channel, when γ₁ or μ is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_g_full: Option<f64>,
}

impl Allocation {
    /// Time left over after the probes have been sent, `τ − nν/R − T`.
    pub fn time_slack(&self, res: &Resources) -> f64 {
        res.tau - (self.n as f64) * (self.nu as f64) / res.r - self.t
    }
}

/// `τ − ν_min/R`, the interaction time when exactly `ν_min` single qubits use
/// up the whole supply.
pub fn t_s(res: &Resources) -> Result<f64> {
    res.check_feasible()?;
    Ok(res.tau - res.nu_min_f() / res.r)
}

/// Smaller root of `y² − (3/2 + γ₂τ) y + γ₂τ = 0` for `y = γ₂T_p`, returned as
/// `T_p`. Without dephasing this is `2τ/3`.
pub fn t_p(gamma2: f64, tau: f64) -> Result<f64> {
    if !(gamma2.is_finite() && gamma2 >= 0.0) {
        return Err(Error::InvalidArgument(format!("gamma2 must be >= 0, got {gamma2}")));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be > 0, got {tau}")));
    }
    if gamma2 == 0.0 {
        return Ok(2.0 * tau / 3.0);
    }
    Ok(gamma2_t_p(gamma2 * tau) / gamma2)
}

/// `γ₂T_p` as a function of `x = γ₂τ`.
pub fn gamma2_t_p(x: f64) -> f64 {
    let b = 1.5 + x;
    2.0 * x / (b + (b * b - 4.0 * x).sqrt())
}

/// Residual of the optimality quadratic at `y = γ₂T`.
pub fn t_p_residual(x: f64, y: f64) -> f64 {
    y.mul_add(y, -(1.5 + x) * y) + x
}

fn strong_delta_g(family: ProbeFamily, n: u64, nu: u64, t: f64, params: ChannelParams) -> Result<f64> {
    let q = BoundQuery { family, form: BoundForm::Strong, n: n as usize, nu, t, params };
    Ok(bound(&q)?.delta_g)
}

/// `δg = e^{nγ₂T} / (T √(n R (τ − T)))` with `ν` eliminated through the time
/// budget.
pub(crate) fn relaxed_delta_g(n: f64, t: f64, res: &Resources) -> f64 {
    (n * res.gamma2 * t - t.ln() - 0.5 * (n * res.r * (res.tau - t)).ln()).exp()
}

fn whole_probes(n: u64, t: f64, res: &Resources) -> u64 {
    let nu = (res.r * (res.tau - t) / n as f64 + 1e-9).floor();
    (nu.max(0.0) as u64).max(res.nu_min)
}

/// Integer allocation near interaction time `t0` for `n`-qubit probes: ν is
/// floored and `T` takes up the remaining time.
fn settle(family: ProbeFamily, n: u64, t0: f64, res: &Resources) -> Result<(f64, u64, f64)> {
    let nu = whole_probes(n, t0, res);
    let t = res.tau - (n * nu) as f64 / res.r;
    if !(t > 0.0) {
        return Err(Error::Infeasible(format!("no interaction time left for n = {n}, nu = {nu}")));
    }
    let dg = strong_delta_g(family, n, nu, t, ChannelParams::dephasing(res.gamma2)?)?;
    Ok((t, nu, dg))
}

fn finish(
    family: ProbeFamily,
    regime: Regime,
    n: u64,
    (t, nu, delta_g): (f64, u64, f64),
    continuous: ContinuousOptimum,
    res: &Resources,
) -> Result<Allocation> {
    let delta_g_full = if res.gamma1.is_some() || res.mu.is_some() {
        Some(strong_delta_g(family, n, nu, t, res.channel()?)?)
    } else {
        None
    };
    Ok(Allocation {
        family,
        regime,
        t,
        n,
        nu,
        total_qubits: n * nu,
        delta_g,
        dimensionless: dimensionless(delta_g, res.r, res.gamma2),
        continuous,
        delta_g_full,
    })
}

fn continuous(t: f64, n: f64, nu: f64, delta_g: f64, res: &Resources) -> ContinuousOptimum {
    ContinuousOptimum { t, n, nu, delta_g, dimensionless: dimensionless(delta_g, res.r, res.gamma2) }
}

/// Relaxed product optimum: `T = T_p`, or `T = T_s` with `ν = ν_min` when
/// `T_p` would leave fewer than `ν_min` qubits.
pub fn product_continuous(res: &Resources) -> Result<(Regime, ContinuousOptimum)> {
    res.check_feasible()?;
    let tp = t_p(res.gamma2, res.tau)?;
    let (regime, t, nu) = if res.r * (res.tau - tp) >= res.nu_min_f() {
        (Regime::HighDecoherence, tp, res.r * (res.tau - tp))
    } else {
        (Regime::Starved, t_s(res)?, res.nu_min_f())
    };
    let dg = (res.gamma2 * t - t.ln() - 0.5 * nu.ln()).exp();
    Ok((regime, continuous(t, 1.0, nu, dg, res)))
}

/// Product probes: always `n = 1`.
pub fn optimize_product(res: &Resources) -> Result<Allocation> {
    let (regime, cont) = product_continuous(res)?;
    let settled = settle(ProbeFamily::Product, 1, cont.t, res)?;
    finish(ProbeFamily::Product, regime, 1, settled, cont, res)
}

/// Regime of the cat-probe table for these resources. Boundary points take
/// the lower-decoherence label.
pub fn cat_regime(res: &Resources) -> Regime {
    let x = res.gamma2 * res.tau;
    let a = 2.0 * res.nu_min_f() * res.gamma2 / res.r;
    if res.r * res.tau <= 2.0 * res.nu_min_f() {
        Regime::Starved
    } else if x <= a.sqrt() {
        Regime::LowDecoherence
    } else if x <= 1.0 {
        Regime::Transition
    } else {
        Regime::HighDecoherence
    }
}

/// Relaxed optimum `(T, n, ν, δg)` of one row of the cat table, evaluated at
/// `res` whether or not `res` lies in that row's range.
pub fn cat_row(regime: Regime, res: &Resources) -> Result<ContinuousOptimum> {
    res.check_feasible()?;
    let (r, tau, g2, nu_min) = (res.r, res.tau, res.gamma2, res.nu_min_f());
    Ok(match regime {
        Regime::Starved => {
            let ts = t_s(res)?;
            continuous(ts, 1.0, nu_min, (g2 * ts).exp() / (ts * nu_min.sqrt()), res)
        }
        Regime::LowDecoherence => {
            let dg = 4.0 * nu_min.sqrt() / (r * tau * tau) * (g2 * r * tau * tau / (4.0 * nu_min)).exp();
            continuous(tau / 2.0, r * tau / (2.0 * nu_min), nu_min, dg, res)
        }
        Regime::Transition => {
            if g2 == 0.0 {
                return Err(Error::InvalidArgument("the transition row needs gamma2 > 0".into()));
            }
            let dg = 2.0 * (2.0 * std::f64::consts::E).sqrt() / (tau * (r / g2).sqrt());
            continuous(tau / 2.0, 1.0 / (g2 * tau), g2 * r * tau * tau / 2.0, dg, res)
        }
        Regime::HighDecoherence => {
            let tp = t_p(g2, tau)?;
            let nu = r * (tau - tp);
            continuous(tp, 1.0, nu, (g2 * tp).exp() / (tp * nu.sqrt()), res)
        }
    })
}

/// Relaxed cat optimum from the regime table. When `2ν_min γ₂/R > 1` the
/// cat rows never apply and the product optimum is returned, as it is in the
/// high-decoherence row.
pub fn cat_continuous(res: &Resources) -> Result<(Regime, ContinuousOptimum)> {
    res.check_feasible()?;
    if 2.0 * res.nu_min_f() * res.gamma2 / res.r > 1.0 {
        return product_continuous(res);
    }
    match cat_regime(res) {
        Regime::HighDecoherence => product_continuous(res),
        regime => Ok((regime, cat_row(regime, res)?)),
    }
}

/// Cat probes. Whole-qubit `n` is searched around the relaxed `n*`.
pub fn optimize_cat(res: &Resources) -> Result<Allocation> {
    let (regime, cont) = cat_continuous(res)?;
    match regime {
        Regime::LowDecoherence | Regime::Transition => {
            let (n, settled) = best_integer_cat(cont.n, res)?;
            finish(ProbeFamily::Cat, regime, n, settled, cont, res)
        }
        // single-qubit probes: the product allocation, family label included
        _ => optimize_product(res),
    }
}

/// Largest `n` that leaves positive interaction time with `ν_min` probes.
fn n_max(res: &Resources) -> u64 {
    let mut n = (res.r * res.tau / res.nu_min_f()).ceil().max(1.0) as u64;
    while n > 1 && res.tau - (n * res.nu_min) as f64 / res.r <= 0.0 {
        n -= 1;
    }
    n
}

fn cat_candidate(n: u64, res: &Resources) -> Option<(f64, u64, f64)> {
    let t_budget = res.tau - (n * res.nu_min) as f64 / res.r;
    if !(t_budget > 0.0) {
        return None;
    }
    let t0 = t_p(n as f64 * res.gamma2, res.tau).ok()?.min(t_budget);
    settle(ProbeFamily::Cat, n, t0, res).ok()
}

/// Seeds from `⌊n*⌋`, `⌈n*⌉` and the ends of the allowed range, then walks to
/// the neighbouring `n` while that improves δg.
fn best_integer_cat(n_star: f64, res: &Resources) -> Result<(u64, (f64, u64, f64))> {
    let top = n_max(res);
    let clamp = |n: f64| (n.max(1.0) as u64).clamp(1, top);
    let seeds = [1, clamp(n_star.floor()), clamp(n_star.ceil()), top];
    let mut best: Option<(u64, (f64, u64, f64))> = None;
    for n in seeds {
        if let Some(c) = cat_candidate(n, res) {
            if best.map_or(true, |(_, b)| c.2 < b.2) {
                best = Some((n, c));
            }
        }
    }
    let (mut n, mut cur) = best.ok_or_else(|| Error::Infeasible("no integer cat allocation".into()))?;
    loop {
        let step = [n.checked_sub(1).filter(|&m| m >= 1), Some(n + 1).filter(|&m| m <= top)]
            .into_iter()
            .flatten()
            .filter_map(|m| cat_candidate(m, res).map(|c| (m, c)))
            .filter(|(_, c)| c.2 < cur.2)
            .min_by(|a, b| a.1 .2.total_cmp(&b.1 .2));
        match step {
            Some((m, c)) => {
                n = m;
                cur = c;
            }
            None => return Ok((n, cur)),
        }
    }
}

/// Finite-difference Hessian of the relaxed cat bound in `(n, T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HessianReport {
    /// Bound at the point.
    pub value: f64,
    /// Gradient of `δg/δg(n, T)`, i.e. relative to the value at the point.
    pub gradient: [f64; 2],
    /// Determinant and trace of the Hessian of `δg/δg(n, T)`.
    pub determinant: f64,
    pub trace: f64,
}

/// Second differences of `e^{nγ₂T}/(T√(nR(τ−T)))` at `(n, T)`, normalized by
/// the value there. The point must satisfy `0 < T < τ`.
pub fn hessian_check(n: f64, t: f64, res: &Resources) -> Result<HessianReport> {
    res.validate()?;
    if !(n > 0.0 && t > 0.0 && t < res.tau) {
        return Err(Error::InvalidArgument(format!("need n > 0 and 0 < T < tau, got n = {n}, T = {t}")));
    }
    let f0 = relaxed_delta_g(n, t, res);
    let f = |dn: f64, dt: f64| relaxed_delta_g(n + dn, t + dt, res) / f0;
    let (hn, ht) = (1e-4 * n, 1e-4 * t.min(res.tau - t));
    let fnn = (f(hn, 0.0) - 2.0 + f(-hn, 0.0)) / (hn * hn);
    let ftt = (f(0.0, ht) - 2.0 + f(0.0, -ht)) / (ht * ht);
    let fnt = (f(hn, ht) - f(hn, -ht) - f(-hn, ht) + f(-hn, -ht)) / (4.0 * hn * ht);
    let gradient = [(f(hn, 0.0) - f(-hn, 0.0)) / (2.0 * hn), (f(0.0, ht) - f(0.0, -ht)) / (2.0 * ht)];
    Ok(HessianReport { value: f0, gradient, determinant: fnn * ftt - fnt * fnt, trace: fnn + ftt })
}
