//! Experiment orchestration: configuration, norm reports, regularity scans,
//! invariant checks, brute-force oracles and the acceptance criteria.

pub mod checks;
pub mod config;
pub mod oracles;
pub mod report;
pub mod run;
pub mod scan;
pub mod suite;

use crate::error::Result;
use crate::geometry::DomainSpec;
use crate::gridfn::GridSpec;
use crate::params::SpaceParams;
use crate::spacenorms::grid_for;

/// Grid with `cells` cells across the first axis of the window, padded as
/// the domain requires.
pub fn grid_with_cells(dom: &DomainSpec, sp: &SpaceParams, cells: usize) -> Result<GridSpec> {
    let extent = dom.window.hi[0] - dom.window.lo[0];
    grid_for(dom, sp, extent / cells as f64)
}
