// SPDX-License-Identifier: Apache-2.0

//! Data behind the optimal-interaction-time and dimensionless-bound curves.
//! Everything is in units where `γ₂ = 1`, so `γ₂τ` is the abscissa and a
//! curve is labelled by `√(R/γ₂)`.

use serde::{Deserialize, Serialize};

use super::{cat_continuous, gamma2_t_p, product_continuous, Resources};
use crate::{Error, Execution, Result};

/// Supply scales `√(R/γ₂)` of the cat-bound figure; with `ν_min = 50` these
/// are `√(R/2ν_minγ₂)` = 1, 10, 100 and 1000.
pub const FIG3_SCALES: [f64; 4] = [10.0, 100.0, 1000.0, 10000.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureKind {
    Fig2,
    Fig3,
}

impl std::str::FromStr for FigureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" | "fig2" => Ok(FigureKind::Fig2),
            "3" | "fig3" => Ok(FigureKind::Fig3),
            other => Err(Error::InvalidArgument(format!("unknown figure {other:?}, expected 2 or 3"))),
        }
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub gamma2_tau: f64,
    pub gamma2_Tp: f64,
    pub dimensionless_bound: f64,
}

/// Points with `Rτ ≤ ν_min` carry no values and the regime `infeasible`.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3Row {
    pub gamma2_tau: f64,
    pub sqrt_R_over_gamma2: f64,
    pub dimensionless_bound_cat: Option<f64>,
    pub dimensionless_bound_product: Option<f64>,
    pub regime: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FigureTable {
    Fig2(Vec<Fig2Row>),
    Fig3(Vec<Fig3Row>),
}

impl FigureTable {
    pub fn len(&self) -> usize {
        match self {
            FigureTable::Fig2(r) => r.len(),
            FigureTable::Fig3(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || count == 0 {
        return Err(Error::InvalidArgument(format!("bad grid [{lo}, {hi}] with {count} points")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|i| match i {
            0 => lo,
            _ if i == count - 1 => hi,
            _ => (a + (b - a) * i as f64 / (count - 1) as f64).exp(),
        })
        .collect())
}

fn fig3_row(x: f64, scale: f64, nu_min: u64) -> Result<Fig3Row> {
    let res = Resources { r: scale * scale, tau: x, nu_min, gamma2: 1.0, gamma1: None, mu: None };
    let infeasible = || Fig3Row {
        gamma2_tau: x,
        sqrt_R_over_gamma2: scale,
        dimensionless_bound_cat: None,
        dimensionless_bound_product: None,
        regime: "infeasible".into(),
    };
    match (cat_continuous(&res), product_continuous(&res)) {
        (Ok((regime, cat)), Ok((_, product))) => Ok(Fig3Row {
            gamma2_tau: x,
            sqrt_R_over_gamma2: scale,
            dimensionless_bound_cat: cat.dimensionless,
            dimensionless_bound_product: product.dimensionless,
            regime: regime.label().into(),
        }),
        (Err(Error::Infeasible(_)), _) | (_, Err(Error::Infeasible(_))) => Ok(infeasible()),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

/// Curve table over an increasing `γ₂τ` grid. `scales` (values of
/// `√(R/γ₂)`) is only used by [`FigureKind::Fig3`]; rows are grouped by
/// scale, in the order given, each group following the grid.
pub fn figure_curves(kind: FigureKind, grid: &[f64], scales: &[f64], nu_min: u64, exec: Execution) -> Result<FigureTable> {
    if grid.iter().any(|x| !(x.is_finite() && *x > 0.0)) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("grid must be positive and strictly increasing".into()));
    }
    Ok(match kind {
        FigureKind::Fig2 => FigureTable::Fig2(exec.map_slice(grid, |&x| {
            let y = gamma2_t_p(x);
            Fig2Row { gamma2_tau: x, gamma2_Tp: y, dimensionless_bound: y.exp() / (y * (x - y).sqrt()) }
        })),
        FigureKind::Fig3 => {
            if scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
                return Err(Error::InvalidArgument("scales must be positive".into()));
            }
            let cells = exec.map_indexed(grid.len() * scales.len(), |i| {
                fig3_row(grid[i % grid.len()], scales[i / grid.len()], nu_min)
            });
            FigureTable::Fig3(cells.into_iter().collect::<Result<_>>()?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn fig3_meets_transition_value_at_unit_dephasing() {
        let table = figure_curves(FigureKind::Fig3, &[1.0], &FIG3_SCALES, 50, Execution::Sequential).unwrap();
        let FigureTable::Fig3(rows) = table else { panic!() };
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert!((row.dimensionless_bound_cat.unwrap() - 2.0 * (2.0 * E).sqrt()).abs() < 1e-9, "{row:?}");
        }
        assert_eq!(rows[1].regime, "transition");
    }

    #[test]
    fn fig3_regime_sequence() {
        let grid = log_grid(1e-4, 10.0, 400).unwrap();
        let FigureTable::Fig3(rows) = figure_curves(FigureKind::Fig3, &grid, &[1000.0], 50, Execution::Sequential).unwrap()
        else {
            panic!()
        };
        let a = 2.0 * 50.0 / 1e6;
        for row in &rows {
            let x = row.gamma2_tau;
            let expected = if x * 1e6 <= 50.0 {
                "infeasible"
            } else if x <= a {
                "starved"
            } else if x <= a.sqrt() {
                "low-dec"
            } else if x <= 1.0 {
                "transition"
            } else {
                "high-dec"
            };
            assert_eq!(row.regime, expected, "{x}");
            if expected == "high-dec" || expected == "starved" {
                let (c, p) = (row.dimensionless_bound_cat.unwrap(), row.dimensionless_bound_product.unwrap());
                assert!(((c - p) / p).abs() < 1e-12);
            }
            if expected == "low-dec" || expected == "transition" {
                assert!(row.dimensionless_bound_cat < row.dimensionless_bound_product);
            }
        }
    }

    #[test]
    fn fig2_small_dephasing_ratio() {
        let grid = log_grid(1e-6, 100.0, 200).unwrap();
        let FigureTable::Fig2(rows) = figure_curves(FigureKind::Fig2, &grid, &[], 50, Execution::Parallel).unwrap() else {
            panic!()
        };
        assert!((rows[0].gamma2_Tp / rows[0].gamma2_tau - 2.0 / 3.0).abs() < 1e-5);
        assert!(rows.windows(2).all(|w| w[1].gamma2_Tp > w[0].gamma2_Tp));
    }

    #[test]
    fn grid_validation() {
        assert!(figure_curves(FigureKind::Fig2, &[1.0, 0.5], &[], 50, Execution::Sequential).is_err());
        assert!(log_grid(0.0, 1.0, 3).is_err());
        let g = log_grid(0.01, 100.0, 5).unwrap();
        assert_eq!((g[0], g[4]), (0.01, 100.0));
        assert!((g[2] - 1.0).abs() < 1e-12);
    }
}
