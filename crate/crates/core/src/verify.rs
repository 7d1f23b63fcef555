// SPDX-License-Identifier: Apache-2.0

//! Self-checks that recompute library results by independent routes: dense
//! density-matrix algebra against closed forms, channel identities on random
//! draws, bound orderings, and the allocator against its grid-search oracle.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::allocator::{self, Regime, Resources};
use crate::bounds::{bound, weak_vs_strong_chain, BoundForm, BoundQuery};
use crate::channel::{apply_bloch, apply_nqubit, choi_psd_check, BlochVector, ChannelParams};
use crate::probes::{build_initial, cat_moments, delta_sq_closed, evolve, ProbeFamily, ProbeSpec};
use crate::qcore::{collective_h, generator_derivative, qfi, DensityOperator, HermitianMatrix};
use crate::{Error, Execution, Result, MAX_EXPLICIT_QUBITS};

/// Relative tolerance of the dense-algebra comparisons unless overridden.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Largest probe simulated densely, at most [`MAX_EXPLICIT_QUBITS`].
    pub n_max: usize,
    pub tolerance: f64,
    /// Random draws per randomized check.
    pub draws: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { n_max: 4, tolerance: DEFAULT_TOLERANCE, draws: 200, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

struct Suite {
    name: &'static str,
    checks: usize,
    failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self { name, checks: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn close(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
        self.check(err <= tol, || format!("{what}: got {got:.15e}, want {want:.15e}"));
    }

    fn run(&mut self, what: &str, r: Result<()>) {
        if let Err(e) = r {
            self.check(false, || format!("{what}: {e}"));
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult { name: self.name.into(), passed: self.failures.is_empty(), checks: self.checks, failures: self.failures }
    }
}

/// CP-valid draw with γ₁ ∈ [0, 2], γ₂ ∈ [γ₁/2, γ₁/2 + 2], μ ∈ [−1, 1].
pub fn random_params(rng: &mut ChaCha8Rng) -> ChannelParams {
    let g1 = 2.0 * rng.random::<f64>();
    let g2 = 0.5 * g1 + 2.0 * rng.random::<f64>();
    let mu = 2.0 * rng.random::<f64>() - 1.0;
    ChannelParams::new(g1, g2, mu).expect("draw lies in the CP region")
}

/// Bloch vector drawn uniformly from the unit ball.
pub fn random_bloch(rng: &mut ChaCha8Rng) -> BlochVector {
    loop {
        let v = [0; 3].map(|_| 2.0 * rng.random::<f64>() - 1.0);
        let r2 = v.iter().map(|x| x * x).sum::<f64>();
        if r2 <= 1.0 {
            return BlochVector { x: v[0], y: v[1], z: v[2] };
        }
    }
}

fn brute_qfi(rho: &DensityOperator, t: f64) -> Result<f64> {
    let h = collective_h(rho.n_qubits())?;
    qfi(rho, &generator_derivative(rho, &h, t)?)
}

/// Parameter grid with γ₁/γ₂ ∈ {0, ½, 1}, μ ∈ {0, ½, 1} and γ₂T ∈ {0.1, 0.7, 2}
/// at `T = 1`.
pub fn channel_grid() -> Vec<ChannelParams> {
    let mut out = Vec::new();
    for ratio in [0.0, 0.5, 1.0] {
        for mu in [0.0, 0.5, 1.0] {
            for g2t in [0.1, 0.7, 2.0] {
                out.push(ChannelParams::new(ratio * g2t, g2t, mu).expect("grid is CP-valid"));
            }
        }
    }
    out
}

fn suite_qcore(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut s = Suite::new("qcore");
    let n_top = opts.n_max.min(4);
    for draw in 0..opts.draws.min(100) {
        let n = 1 + draw % n_top;
        let factors: Vec<DensityOperator> =
            (0..n).map(|_| random_bloch(rng).to_density().expect("unit ball")).collect();
        let r: Result<()> = (|| {
            let single: f64 = factors.iter().map(|f| brute_qfi(f, 1.0)).sum::<Result<f64>>()?;
            let mut joint = factors[0].clone();
            for f in &factors[1..] {
                joint = joint.kron(f)?;
            }
            s.close(&format!("additivity n={n} draw {draw}"), brute_qfi(&joint, 1.0)?, single, opts.tolerance.max(1e-12));
            Ok(())
        })();
        s.run("additivity", r);
    }
    let r: Result<()> = (|| {
        let q = random_bloch(rng).to_density()?;
        let one = brute_qfi(&q, 1.0)?;
        let mut joint = q.clone();
        for n in 2..=n_top {
            joint = joint.kron(&q)?;
            s.close(&format!("identical factors n={n}"), brute_qfi(&joint, 1.0)?, n as f64 * one, opts.tolerance);
        }
        Ok(())
    })();
    s.run("identical factors", r);
    s.finish()
}

fn suite_channel(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut s = Suite::new("channel");
    for draw in 0..opts.draws {
        let p = random_params(rng).with_omega(6.0 * rng.random::<f64>() - 3.0).expect("finite");
        let v = random_bloch(rng);
        let (t1, t2) = (2.0 * rng.random::<f64>(), 2.0 * rng.random::<f64>());
        let r: Result<()> = (|| {
            let direct = apply_bloch(&p, t1 + t2, v)?;
            let composed = apply_bloch(&p, t2, apply_bloch(&p, t1, v)?)?;
            let gap = (direct.x - composed.x).abs() + (direct.y - composed.y).abs() + (direct.z - composed.z).abs();
            s.check(gap < 1e-12, || format!("semigroup draw {draw}: gap {gap:e}"));
            let fixed = apply_bloch(&p, t1, BlochVector { x: 0.0, y: 0.0, z: p.mu() })?;
            s.check((fixed.z - p.mu()).abs() < 1e-12 && fixed.x.abs() < 1e-15, || format!("fixed point draw {draw}"));
            let out = apply_bloch(&p, t1, v)?;
            s.check(out.norm() <= 1.0 + 1e-12, || format!("image leaves the Bloch ball, draw {draw}"));
            s.check(choi_psd_check(&p, t1)?.psd, || format!("valid draw {draw} flagged non-CP"));
            Ok(())
        })();
        s.run("channel identity", r);
    }
    let r: Result<()> = (|| {
        let p = random_params(rng);
        for n in 1..=opts.n_max.min(3) {
            let rho = build_initial(&ProbeSpec::new(ProbeFamily::Cat, n, 1.0, 0.0)?)?;
            let out = apply_nqubit(&p, 0.8, &rho)?;
            let tr = out.matrix().trace();
            s.check((tr - 1.0).abs() < 1e-12, || format!("trace {tr} after n={n} channel"));
        }
        Ok(())
    })();
    s.run("trace", r);
    s.finish()
}

fn suite_probes(opts: &VerifyOptions) -> SuiteResult {
    let mut s = Suite::new("probes");
    for p in channel_grid() {
        for n in 1..=opts.n_max.min(MAX_EXPLICIT_QUBITS) {
            for family in [ProbeFamily::Product, ProbeFamily::Cat] {
                let r: Result<()> = (|| {
                    let spec = ProbeSpec::new(family, n, 1.0, 0.37)?;
                    let rho = evolve(&spec, &p)?;
                    let want = 4.0 * delta_sq_closed(&spec, &p)?;
                    s.close(&format!("{family} n={n} {p:?} qfi"), brute_qfi(&rho, 1.0)?, want, opts.tolerance);
                    if family == ProbeFamily::Cat {
                        let m = cat_moments(n, 1.0, &p)?;
                        let h = collective_h(n)?;
                        let h2 = HermitianMatrix::new(h.as_matrix() * h.as_matrix())?;
                        let no_rot = evolve(&ProbeSpec::new(family, n, 1.0, 0.0)?, &p)?;
                        let mean = no_rot.expectation(&h);
                        s.check((m.mean_h - mean).abs() <= 1e-9, || format!("<h> n={n}: {} vs {mean}", m.mean_h));
                        let mean2 = no_rot.expectation(&h2);
                        s.check((m.mean_h2 - mean2).abs() <= 1e-9, || format!("<h^2> n={n}: {} vs {mean2}", m.mean_h2));
                    }
                    Ok(())
                })();
                s.run("probe", r);
            }
        }
    }
    s.finish()
}

fn suite_bounds(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut s = Suite::new("bounds");
    let none = ChannelParams::noiseless();
    for family in [ProbeFamily::Product, ProbeFamily::Cat] {
        for n in [1usize, 2, 3, 10] {
            let q = BoundQuery { family, form: BoundForm::Nodec, n, nu: 50, t: 0.9, params: none };
            let r: Result<()> = (|| {
                let base = bound(&q)?.delta_g;
                for form in [BoundForm::Weak, BoundForm::Strong] {
                    let v = bound(&BoundQuery { form, ..q })?.delta_g;
                    s.check(v == base, || format!("{family} {form:?} n={n} does not reduce: {v} vs {base}"));
                }
                Ok(())
            })();
            s.run("reduction", r);
        }
    }
    for draw in 0..opts.draws {
        let p = random_params(rng);
        let t = 3.0 * rng.random::<f64>() + 1e-3;
        let n = 1 + (rng.random::<f64>() * 12.0) as usize;
        let family = if draw % 2 == 0 { ProbeFamily::Product } else { ProbeFamily::Cat };
        let r: Result<()> = (|| {
            let q = BoundQuery { family, form: BoundForm::Weak, n, nu: 100, t, params: p };
            let weak = bound(&q)?.delta_g;
            let strong = bound(&BoundQuery { form: BoundForm::Strong, ..q })?.delta_g;
            s.check(strong >= weak * (1.0 - 1e-12), || format!("strong < weak: {family} n={n} {p:?} T={t}"));
            let [a, b, c] = weak_vs_strong_chain(t, &p)?;
            s.check(a >= b - 1e-15 && b >= c - 1e-15, || format!("chain broken: {a} {b} {c}"));
            Ok(())
        })();
        s.run("ordering", r);
    }
    s.finish()
}

fn suite_allocator(exec: Execution) -> SuiteResult {
    let mut s = Suite::new("allocator");
    for i in 0..200 {
        let x = 10f64.powf(-3.0 + 6.0 * i as f64 / 199.0);
        let y = allocator::gamma2_t_p(x);
        let res = allocator::t_p_residual(x, y);
        s.check(res.abs() < 1e-12, || format!("T_p residual {res:e} at gamma2*tau = {x}"));
    }
    s.close("gamma2 T_p at gamma2 tau = 1", allocator::gamma2_t_p(1.0), 0.5, 1e-12);
    for scale in [100.0f64, 1000.0] {
        let base = Resources::new(scale * scale, 1.0, 1.0).expect("valid");
        let a = 2.0 * 50.0 / (scale * scale);
        for (x, lo, hi) in [
            (a, Regime::Starved, Regime::LowDecoherence),
            (a.sqrt(), Regime::LowDecoherence, Regime::Transition),
            (1.0, Regime::Transition, Regime::HighDecoherence),
        ] {
            let res = Resources { tau: x, ..base };
            let r: Result<()> = (|| {
                let (l, h) = (allocator::cat_row(lo, &res)?, allocator::cat_row(hi, &res)?);
                s.close(&format!("continuity {lo}/{hi} at scale {scale}"), l.delta_g, h.delta_g, 1e-9);
                Ok(())
            })();
            s.run("continuity", r);
        }
        for x in [0.3 * a.sqrt(), 0.2, 0.6, 1.5] {
            let res = Resources { tau: x, ..base };
            let r: Result<()> = (|| {
                let alloc = allocator::optimize_cat(&res)?;
                let oracle = allocator::grid_search(&res, ProbeFamily::Cat, 2000, exec)?;
                s.check(alloc.delta_g <= oracle.delta_g * 1.005, || {
                    format!("grid beats allocation at gamma2 tau = {x}: {} < {}", oracle.delta_g, alloc.delta_g)
                });
                Ok(())
            })();
            s.run("oracle", r);
        }
    }
    s.finish()
}

/// Runs every suite. `n_max` above the dense-simulation cap is rejected.
pub fn run_all(opts: &VerifyOptions, exec: Execution) -> Result<VerifyReport> {
    if opts.n_max > MAX_EXPLICIT_QUBITS {
        return Err(Error::QubitCapExceeded { n: opts.n_max, cap: MAX_EXPLICIT_QUBITS });
    }
    if opts.n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    if !(opts.tolerance > 0.0 && opts.tolerance.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be > 0, got {}", opts.tolerance)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let suites = vec![
        suite_qcore(opts, &mut rng),
        suite_channel(opts, &mut rng),
        suite_probes(opts),
        suite_bounds(opts, &mut rng),
        suite_allocator(exec),
    ];
    Ok(VerifyReport { passed: suites.iter().all(|s| s.passed), suites })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_at_small_cap() {
        let opts = VerifyOptions { n_max: 3, draws: 50, ..Default::default() };
        let report = run_all(&opts, Execution::default()).unwrap();
        for s in &report.suites {
            assert!(s.passed, "{}: {:?}", s.name, s.failures);
            assert!(s.checks > 0);
        }
        assert!(report.passed);
    }

    #[test]
    fn cap_is_enforced() {
        let opts = VerifyOptions { n_max: 7, ..Default::default() };
        assert!(matches!(run_all(&opts, Execution::Sequential), Err(Error::QubitCapExceeded { n: 7, cap: 6 })));
    }

    #[test]
    fn absurd_tolerance_fails_a_suite() {
        let opts = VerifyOptions { n_max: 2, draws: 5, tolerance: 1e-300, ..Default::default() };
        assert!(!run_all(&opts, Execution::Sequential).unwrap().passed);
    }
}
