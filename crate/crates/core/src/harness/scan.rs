//! Empirical smoothness thresholds from the decay of per-level terms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::gridfn::TestFunctionSpec;
use crate::params::{Flavor, SpaceParams};
use crate::spacenorms::{seminorm, Level};

use super::grid_with_cells;

/// Levels with `a_j` at or below this multiple of `max |f|` count as zero.
pub const ZERO_LEVEL: f64 = 1e-12;

/// Fewest levels a slope fit accepts.
pub const MIN_FIT_LEVELS: usize = 3;

/// Range of scales entering the slope fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRange {
    /// Largest fitted scale as a fraction of `min(T, diameter)`; coarser
    /// levels see the global shape of `f` rather than its local regularity.
    pub ceiling_fraction: f64,
    /// Smallest fitted scale in grid cells; finer levels under-resolve
    /// singularities that fall between nodes.
    pub floor_cells: f64,
}

impl Default for FitRange {
    fn default() -> Self {
        FitRange { ceiling_fraction: 0.25, floor_cells: 8.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridScan {
    pub cells: usize,
    pub levels: Vec<Level>,
    /// Least-squares slope of `log2 a_j` against `j` over the fit levels.
    pub slope: f64,
    /// `-slope`: the `s` at which `log2(2^{js} a_j)` stops decreasing.
    pub threshold: f64,
    pub fit_levels: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub function: String,
    pub flavor: Flavor,
    pub grids: Vec<GridScan>,
    /// Threshold on the finest grid; `+inf` when every level term vanishes.
    pub threshold: f64,
}

/// `(slope, intercept)` of the least-squares line through `(x_i, y_i)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fits the per-level decay on the levels with `floor ≤ 2^{-j} ≤ ceiling`.
pub fn fit_levels(cells: usize, levels: Vec<Level>, floor: f64, ceiling: f64, zero: f64) -> Result<GridScan> {
    let fit: Vec<&Level> = levels.iter().filter(|l| l.t >= floor && l.t <= ceiling && l.a_j > zero).collect();
    if levels.iter().all(|l| l.a_j <= zero) {
        return Ok(GridScan {
            cells,
            levels,
            slope: f64::NEG_INFINITY,
            threshold: f64::INFINITY,
            fit_levels: Vec::new(),
        });
    }
    if fit.len() < MIN_FIT_LEVELS {
        return Err(Error::InsufficientScales { needed: MIN_FIT_LEVELS, got: fit.len() });
    }
    let xs: Vec<f64> = fit.iter().map(|l| l.j as f64).collect();
    let ys: Vec<f64> = fit.iter().map(|l| l.a_j.log2()).collect();
    let (slope, _) = fit_line(&xs, &ys);
    let fit_levels = fit.iter().map(|l| l.j).collect();
    Ok(GridScan { cells, levels, slope, threshold: -slope, fit_levels })
}

/// Per-level terms of `f` on each grid and the threshold fitted over the
/// default [`FitRange`].
pub fn regularity_scan(
    f: &TestFunctionSpec,
    sp: &SpaceParams,
    dom: &DomainSpec,
    grid_sizes: &[usize],
    flavor: Flavor,
) -> Result<ScanResult> {
    regularity_scan_with(f, sp, dom, grid_sizes, flavor, FitRange::default())
}

pub fn regularity_scan_with(
    f: &TestFunctionSpec,
    sp: &SpaceParams,
    dom: &DomainSpec,
    grid_sizes: &[usize],
    flavor: Flavor,
    range: FitRange,
) -> Result<ScanResult> {
    if grid_sizes.len() < 3 {
        return Err(Error::InsufficientScales { needed: 3, got: grid_sizes.len() });
    }
    let mut sizes = grid_sizes.to_vec();
    sizes.sort_unstable();
    let ceiling = sp.t_max.min(dom.window.diameter()) * range.ceiling_fraction;
    let mut grids = Vec::with_capacity(sizes.len());
    for &n in &sizes {
        let grid = grid_with_cells(dom, sp, n)?;
        let g = f.sample(&grid, dom);
        let (_, breakdown) = seminorm(&g, sp, dom, flavor)?;
        let zero = ZERO_LEVEL * g.max_abs().max(f64::MIN_POSITIVE);
        grids.push(fit_levels(n, breakdown.levels, range.floor_cells * grid.spacing, ceiling, zero)?);
    }
    let threshold = grids.last().map(|g| g.threshold).unwrap_or(f64::NAN);
    Ok(ScanResult { function: f.name.clone(), flavor, grids, threshold })
}
