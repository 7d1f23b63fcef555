// SPDX-License-Identifier: Apache-2.0

//! Brute-force optimum over every admissible integer `n` and a uniform grid
//! of interaction times, with `ν = R(τ − T)/n ≥ ν_min` left continuous.
//! Used as an oracle for the closed-form allocations.

use serde::{Deserialize, Serialize};

use super::{relaxed_delta_g, Resources};
use crate::probes::ProbeFamily;
use crate::{Error, Execution, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptimum {
    pub n: u64,
    pub t: f64,
    pub nu: f64,
    pub delta_g: f64,
}

fn best_for_n(n: u64, t_points: usize, res: &Resources) -> Option<GridOptimum> {
    let t_max = res.tau - (n * res.nu_min) as f64 / res.r;
    if !(t_max > 0.0) {
        return None;
    }
    let nf = n as f64;
    let mut best: Option<GridOptimum> = None;
    for k in 1..=t_points {
        let t = t_max * k as f64 / t_points as f64;
        let dg = relaxed_delta_g(nf, t, res);
        if best.map_or(true, |b| dg < b.delta_g) {
            best = Some(GridOptimum { n, t, nu: res.r * (res.tau - t) / nf, delta_g: dg });
        }
    }
    best
}

/// Product probes search `n = 1` only; cat probes search
/// `1 ≤ n ≤ R τ / ν_min`.
pub fn grid_search(res: &Resources, family: ProbeFamily, t_points: usize, exec: Execution) -> Result<GridOptimum> {
    res.check_feasible()?;
    if t_points == 0 {
        return Err(Error::InvalidArgument("grid needs at least one T point".into()));
    }
    let n_top = match family {
        ProbeFamily::Product => 1,
        ProbeFamily::Cat => (res.r * res.tau / res.nu_min as f64).floor().max(1.0) as u64,
    };
    exec.map_indexed(n_top as usize, |i| best_for_n(i as u64 + 1, t_points, res))
        .into_iter()
        .flatten()
        .min_by(|a, b| a.delta_g.total_cmp(&b.delta_g))
        .ok_or_else(|| Error::Infeasible("no admissible grid point".into()))
}
