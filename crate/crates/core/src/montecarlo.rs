// SPDX-License-Identifier: Apache-2.0

//! Sampling of the σ_x (product) and parity Σ_x (cat) measurements and the
//! arccos estimator built on their averages.
//!
//! Outcomes are drawn from the closed-form probability
//! `P(+1) = (1 + e^{−mγ₂T} cos mgT)/2`, with `m = 1` for a qubit of a product
//! probe and `m = n` for the parity of an `n`-qubit cat. One experiment
//! consists of `ν` probes; its count of `+1` outcomes is a binomial draw made
//! by inversion of a single uniform, and the same uniform is reused at
//! `g ± δ` so the slope `d⟨g_est⟩/dg` is estimated with common random numbers.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, Discrete, DiscreteCDF};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::channel::ChannelParams;
use crate::probes::{ProbeFamily, ProbeSpec};
use crate::{Error, Execution, Result};

/// Width of the `g` bracket used for the slope, as a fraction of a fringe.
const SLOPE_BRACKET: f64 = 0.005;
/// Above this value of `e^{mγ₂T} ΔΣ̄` the linearized error estimate is
/// flagged.
const LINEARIZATION_LIMIT: f64 = 0.1;

/// Half-width, in standard deviations, of the tabulated part of the CDF.
const TABLE_SIGMAS: f64 = 9.0;

/// Binomial inversion with the CDF over `mean ± 9σ` tabulated once; uniforms
/// landing in the tails go to the generic search.
struct CountSampler {
    dist: Binomial,
    lo: u64,
    cdf: Vec<f64>,
}

impl CountSampler {
    fn new(p: f64, samples: u64) -> Result<Self> {
        let dist = Binomial::new(p, samples).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        if p <= 0.0 || p >= 1.0 {
            return Ok(Self { dist, lo: 0, cdf: Vec::new() });
        }
        let n = samples as f64;
        let (mean, sd) = (n * p, (n * p * (1.0 - p)).sqrt());
        let lo = (mean - TABLE_SIGMAS * sd - 1.0).floor().max(0.0) as u64;
        let hi = ((mean + TABLE_SIGMAS * sd + 1.0).ceil() as u64).min(samples);
        let odds = p / (1.0 - p);
        let mut cdf = Vec::with_capacity((hi - lo + 1) as usize);
        let mut acc = dist.cdf(lo);
        let mut pmf = dist.pmf(lo);
        cdf.push(acc);
        for k in lo..hi {
            pmf *= odds * (samples - k) as f64 / (k + 1) as f64;
            acc += pmf;
            cdf.push(acc);
        }
        Ok(Self { dist, lo, cdf })
    }

    fn inverse(&self, u: f64) -> u64 {
        match (self.cdf.first(), self.cdf.last()) {
            (Some(&first), Some(&last)) if u > first && u <= last => {
                self.lo + self.cdf.partition_point(|&c| c < u) as u64
            }
            _ => self.dist.inverse_cdf(u),
        }
    }
}

/// Phase multiplier `m`: the measured phase is `m g T`.
fn multiplier(spec: &ProbeSpec) -> f64 {
    match spec.family {
        ProbeFamily::Product => 1.0,
        ProbeFamily::Cat => spec.n as f64,
    }
}

/// Single measurements recorded per probe.
fn outcomes_per_probe(spec: &ProbeSpec) -> u64 {
    match spec.family {
        ProbeFamily::Product => spec.n as u64,
        ProbeFamily::Cat => 1,
    }
}

fn plus_probability(m: f64, t: f64, g: f64, gamma2: f64) -> f64 {
    0.5 * (1.0 + (-m * gamma2 * t).exp() * (m * g * t).cos())
}

/// `P(σ_x = +1) = (1 + e^{−γ₂T} cos gT)/2` for any single qubit.
pub fn sigma_x_probability(t: f64, g: f64, params: &ChannelParams) -> f64 {
    plus_probability(1.0, t, g, params.gamma2())
}

/// `P(Σ_x = +1) = (1 + e^{−nγ₂T} cos ngT)/2` for an `n`-qubit cat probe.
pub fn parity_probability(n: usize, t: f64, g: f64, params: &ChannelParams) -> f64 {
    plus_probability(n as f64, t, g, params.gamma2())
}

fn draw<R: Rng + ?Sized>(p: f64, rng: &mut R) -> i8 {
    if rng.random::<f64>() < p {
        1
    } else {
        -1
    }
}

/// One σ_x outcome for one qubit of the probe.
pub fn sample_sigma_x<R: Rng + ?Sized>(spec: &ProbeSpec, params: &ChannelParams, rng: &mut R) -> Result<i8> {
    spec.validate()?;
    params.validate()?;
    Ok(draw(sigma_x_probability(spec.t, spec.g, params), rng))
}

/// One parity outcome for a cat probe (any family with `n = 1`).
pub fn sample_parity<R: Rng + ?Sized>(spec: &ProbeSpec, params: &ChannelParams, rng: &mut R) -> Result<i8> {
    spec.validate()?;
    params.validate()?;
    if spec.family != ProbeFamily::Cat && spec.n != 1 {
        return Err(Error::InvalidArgument("parity readout needs a cat probe".into()));
    }
    Ok(draw(parity_probability(spec.n, spec.t, spec.g, params), rng))
}

/// Nearest `g′` with `m g′ T ≡ π/2 (mod π)`, where `|sin m g′ T| = 1`.
pub fn sweet_spot_offset(spec: &ProbeSpec) -> Result<f64> {
    if !(spec.t.is_finite() && spec.t > 0.0) {
        return Err(Error::InvalidArgument(format!("sweet spot needs T > 0, got {}", spec.t)));
    }
    let mt = multiplier(spec) * spec.t;
    let k = ((spec.g * mt - FRAC_PI_2) / PI + 0.5).floor();
    Ok((FRAC_PI_2 + k * PI) / mt)
}

/// Closed-form `δg` of the arccos estimator in the large-ν limit.
pub fn predicted_delta_g(spec: &ProbeSpec, params: &ChannelParams, nu: u64) -> f64 {
    let m = multiplier(spec);
    let samples = (nu * outcomes_per_probe(spec)) as f64;
    let decay = (-m * params.gamma2() * spec.t).exp();
    let phase = m * spec.g * spec.t;
    let c = phase.cos();
    (1.0 - decay * decay * c * c).sqrt() / (decay * spec.t * m * samples.sqrt() * phase.sin().abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    /// Probe; `spec.g` is the true coupling.
    pub spec: ProbeSpec,
    pub params: ChannelParams,
    /// Probes per experiment, ν ≥ 2.
    pub trials: u64,
    /// Independent experiments averaged in the report.
    pub experiments: u64,
    pub seed: u64,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.params.validate()?;
        if self.trials < 2 {
            return Err(Error::InvalidArgument(format!("need nu >= 2 probes, got {}", self.trials)));
        }
        if self.experiments < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 experiments, got {}", self.experiments)));
        }
        if !(self.spec.t > 0.0) {
            return Err(Error::InvalidArgument("interaction time must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub g_true: f64,
    pub g_est_mean: f64,
    /// Finite-difference `d⟨g_est⟩/dg`.
    pub slope: f64,
    /// Units-corrected RMS deviation, s⁻¹.
    pub empirical_delta_g: f64,
    /// Standard error of `empirical_delta_g` over the experiments.
    pub empirical_delta_g_stderr: f64,
    pub predicted_delta_g: f64,
    /// Fraction of arccos arguments clamped into [−1, 1].
    pub clipped_fraction: f64,
    /// Fraction of experiments in which every outcome was identical.
    pub degenerate_fraction: f64,
    /// `e^{mγ₂T} ΔΣ̄`; the estimator is only near-linear when this is small.
    pub linearization: f64,
    pub experiments: u64,
    pub trials: u64,
    pub seed: u64,
    pub warnings: Vec<String>,
}

struct Shot {
    g_est: [f64; 3],
    clipped: u32,
    degenerate: bool,
}

/// Experiment `index` uses stream `index` of a ChaCha8 generator keyed by the
/// seed, so results do not depend on scheduling.
pub fn experiment_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn run_trials(cfg: &TrialConfig, exec: Execution) -> Result<EstimateReport> {
    cfg.validate()?;
    let spec = cfg.spec;
    let m = multiplier(&spec);
    let mt = m * spec.t;
    let samples = cfg.trials * outcomes_per_probe(&spec);
    let gamma2 = cfg.params.gamma2();
    let recovery = (m * gamma2 * spec.t).exp();
    let delta = SLOPE_BRACKET * 2.0 * PI / mt;
    let gs = [spec.g - delta, spec.g, spec.g + delta];
    let fringe = (spec.g * mt / PI).floor();
    let dists = gs
        .iter()
        .map(|&g| {
            CountSampler::new(plus_probability(m, spec.t, g, gamma2).clamp(0.0, 1.0), samples)
        })
        .collect::<Result<Vec<_>>>()?;

    let estimate = |k: u64| -> (f64, bool) {
        let mean = (2.0 * k as f64 - samples as f64) / samples as f64;
        let arg = recovery * mean;
        let clipped = arg.abs() > 1.0;
        let theta = arg.clamp(-1.0, 1.0).acos();
        let phase = if fringe.rem_euclid(2.0) == 0.0 { fringe * PI + theta } else { (fringe + 1.0) * PI - theta };
        (phase / mt, clipped)
    };

    let shots = exec.map_indexed(cfg.experiments as usize, |i| {
        let u: f64 = experiment_rng(cfg.seed, i as u64).random();
        let mut shot = Shot { g_est: [0.0; 3], clipped: 0, degenerate: false };
        for (j, d) in dists.iter().enumerate() {
            let k = d.inverse(u);
            let (g, c) = estimate(k);
            shot.g_est[j] = g;
            shot.clipped += c as u32;
            if j == 1 {
                shot.degenerate = k == 0 || k == samples;
            }
        }
        shot
    });

    let count = shots.len() as f64;
    let mean_at = |j: usize| shots.iter().map(|s| s.g_est[j]).sum::<f64>() / count;
    let slope = (mean_at(2) - mean_at(0)) / (2.0 * delta);
    let g_est_mean = mean_at(1);
    let sq: Vec<f64> = shots.iter().map(|s| (s.g_est[1] / slope.abs() - spec.g).powi(2)).collect();
    let msq = sq.iter().sum::<f64>() / count;
    let var_sq = sq.iter().map(|v| (v - msq).powi(2)).sum::<f64>() / (count - 1.0);
    let empirical = msq.sqrt();
    let empirical_stderr = if empirical > 0.0 { (var_sq / count).sqrt() / (2.0 * empirical) } else { 0.0 };
    let clipped_fraction = shots.iter().map(|s| s.clipped as f64).sum::<f64>() / (3.0 * count);
    let degenerate_fraction = shots.iter().filter(|s| s.degenerate).count() as f64 / count;

    let expect = recovery.recip() * (mt * spec.g).cos();
    let linearization = recovery * ((1.0 - expect * expect).max(0.0) / samples as f64).sqrt();

    let mut warnings = Vec::new();
    if degenerate_fraction > 0.0 {
        warnings.push(format!(
            "degenerate estimate: all {samples} outcomes identical in {:.1}% of experiments",
            100.0 * degenerate_fraction
        ));
    }
    if clipped_fraction > 0.0 {
        warnings.push(format!("arccos argument clamped in {:.3}% of estimates", 100.0 * clipped_fraction));
    }
    if linearization > LINEARIZATION_LIMIT {
        warnings.push(format!("nu too small for the linearized error: e^(m*gamma2*T)*dS = {linearization:.3}"));
    }
    if slope.abs() < 1e-12 {
        warnings.push("estimator slope vanishes; units correction is meaningless".into());
    }

    Ok(EstimateReport {
        g_true: spec.g,
        g_est_mean,
        slope,
        empirical_delta_g: empirical,
        empirical_delta_g_stderr: empirical_stderr,
        predicted_delta_g: predicted_delta_g(&spec, &cfg.params, cfg.trials),
        clipped_fraction,
        degenerate_fraction,
        linearization,
        experiments: cfg.experiments,
        trials: cfg.trials,
        seed: cfg.seed,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_inverse_matches_search() {
        for (p, samples) in [(0.5, 10_000u64), (0.03, 400), (0.97, 2000), (0.5, 1)] {
            let fast = CountSampler::new(p, samples).unwrap();
            let slow = Binomial::new(p, samples).unwrap();
            let mut rng = experiment_rng(11, 0);
            for _ in 0..2000 {
                let u: f64 = rng.random();
                assert_eq!(fast.inverse(u), slow.inverse_cdf(u), "p={p} samples={samples} u={u}");
            }
        }
    }
    use crate::probes::evolve;
    use crate::qcore::parity_x;
    use std::f64::consts::E;

    fn spec(family: ProbeFamily, n: usize, t: f64, g: f64) -> ProbeSpec {
        ProbeSpec::new(family, n, t, g).unwrap()
    }

    #[test]
    fn outcome_probabilities() {
        let none = ChannelParams::noiseless();
        assert_eq!(sigma_x_probability(1.0, 0.0, &none), 1.0);
        let deph = ChannelParams::dephasing(1.0).unwrap();
        assert!((sigma_x_probability(1.0, FRAC_PI_2, &deph) - 0.5).abs() < 1e-15);
        assert!((sigma_x_probability(1.0, 0.0, &deph) - 0.683_939_720_585_721_2).abs() < 1e-12);
        assert!((parity_probability(3, 1.0, 0.0, &ChannelParams::dephasing(0.2).unwrap()) - 0.774_405_818_047_013_2).abs() < 1e-12);
        assert!(parity_probability(2, 1.0, FRAC_PI_2, &none).abs() < 1e-15);
        assert_eq!(parity_probability(1, 0.7, 0.4, &deph), sigma_x_probability(0.7, 0.4, &deph));
    }

    #[test]
    fn parity_matches_density_matrix() {
        let params = ChannelParams::new(0.3, 0.5, 0.4).unwrap();
        for n in 1..=4 {
            let s = spec(ProbeFamily::Cat, n, 0.8, 1.3);
            let rho = evolve(&s, &params).unwrap();
            let p = 0.5 * (1.0 + rho.expectation(&parity_x(n).unwrap()));
            assert!((p - parity_probability(n, 0.8, 1.3, &params)).abs() < 1e-12, "{n}");
        }
    }

    #[test]
    fn single_shots_follow_probability() {
        let params = ChannelParams::dephasing(1.0).unwrap();
        let s = spec(ProbeFamily::Product, 1, 1.0, 0.0);
        let mut rng = experiment_rng(3, 0);
        let plus = (0..20_000).filter(|_| sample_sigma_x(&s, &params, &mut rng).unwrap() == 1).count();
        assert!((plus as f64 / 20_000.0 - 0.6839).abs() < 0.01);
        let cat = spec(ProbeFamily::Cat, 2, 1.0, FRAC_PI_2);
        assert!((0..100).all(|_| sample_parity(&cat, &ChannelParams::noiseless(), &mut rng).unwrap() == -1));
        assert!(sample_parity(&spec(ProbeFamily::Product, 3, 1.0, 0.0), &params, &mut rng).is_err());
    }

    #[test]
    fn sweet_spots() {
        let at = |f, n, t, g| sweet_spot_offset(&spec(f, n, t, g)).unwrap();
        assert!((at(ProbeFamily::Product, 1, 1.0, 1.5) - FRAC_PI_2).abs() < 1e-15);
        assert!((at(ProbeFamily::Cat, 2, 1.0, 2.4) - 0.75 * PI).abs() < 1e-15);
        assert!((at(ProbeFamily::Cat, 5, 0.1, 0.0) - PI).abs() < 1e-14);
        assert!(sweet_spot_offset(&ProbeSpec { family: ProbeFamily::Cat, n: 2, t: 0.0, g: 1.0 }).is_err());
    }

    fn config(family: ProbeFamily, n: usize, t: f64, g: f64, gamma2: f64, seed: u64) -> TrialConfig {
        TrialConfig {
            spec: spec(family, n, t, g),
            params: ChannelParams::dephasing(gamma2).unwrap(),
            trials: 10_000,
            experiments: 2000,
            seed,
        }
    }

    #[test]
    fn saturates_noiseless_product_bound() {
        let r = run_trials(&config(ProbeFamily::Product, 1, 1.0, FRAC_PI_2, 0.0, 1), Execution::default()).unwrap();
        assert!((r.predicted_delta_g - 0.01).abs() < 1e-15);
        assert!(((r.empirical_delta_g - 0.01) / 0.01).abs() < 0.05, "{r:?}");
        assert!((r.slope - 1.0).abs() < 0.01);
        assert_eq!(r.clipped_fraction, 0.0);
    }

    #[test]
    fn saturates_dephased_product_bound() {
        let r = run_trials(&config(ProbeFamily::Product, 1, 1.0, FRAC_PI_2, 1.0, 2), Execution::default()).unwrap();
        assert!(((r.empirical_delta_g - E / 100.0) / (E / 100.0)).abs() < 0.05, "{r:?}");
    }

    #[test]
    fn saturates_cat_bound_on_higher_fringe() {
        // ngT = 3π/2: the estimator must unwrap past the principal branch
        let g = 1.5 * PI / 4.0;
        let r = run_trials(&config(ProbeFamily::Cat, 4, 1.0, g, 0.0, 3), Execution::default()).unwrap();
        assert!(((r.empirical_delta_g - 0.0025) / 0.0025).abs() < 0.05, "{r:?}");
        assert!((r.g_est_mean - g).abs() < 1e-3);
    }

    #[test]
    fn reports_are_reproducible_across_modes() {
        let mut cfg = config(ProbeFamily::Cat, 3, 0.5, 1.0, 0.4, 11);
        cfg.experiments = 300;
        let a = run_trials(&cfg, Execution::Sequential).unwrap();
        let b = run_trials(&cfg, Execution::Parallel).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        cfg.seed = 12;
        assert_ne!(run_trials(&cfg, Execution::Sequential).unwrap().empirical_delta_g, a.empirical_delta_g);
    }

    #[test]
    fn small_samples_warn() {
        let cfg = TrialConfig { trials: 4, experiments: 200, ..config(ProbeFamily::Product, 1, 1.0, 0.3, 1.0, 5) };
        let r = run_trials(&cfg, Execution::Sequential).unwrap();
        assert!(r.clipped_fraction > 0.0);
        assert!(r.degenerate_fraction > 0.0);
        assert!(r.warnings.len() >= 2, "{:?}", r.warnings);
        assert!(run_trials(&TrialConfig { trials: 1, ..cfg }, Execution::Sequential).is_err());
    }
}
