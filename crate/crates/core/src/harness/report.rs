//! Norm reports: JSON documents with every computed cell, ratio matrices
//! rebuilt from the stored totals, invariant outcomes, and per-level CSV.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lpref::PSI_PROFILE;
use crate::params::Flavor;
use crate::spacenorms::{NormEntry, SCALE_FLOOR_CELLS};

use super::config::SCHEMA;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub psi_profile: String,
    pub scale_floor_cells: f64,
    pub seed: u64,
}

impl Environment {
    pub fn current(seed: u64) -> Self {
        Environment {
            version: env!("CARGO_PKG_VERSION").to_string(),
            psi_profile: PSI_PROFILE.to_string(),
            scale_floor_cells: SCALE_FLOOR_CELLS,
            seed,
        }
    }
}

/// One `(function, domain, params, grid, flavor)` task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormCell {
    pub function: String,
    pub domain: String,
    pub params: String,
    pub grid_size: usize,
    pub spacing: f64,
    pub flavor: Flavor,
    pub entry: Option<NormEntry>,
    /// Numeric failure of this cell alone.
    pub error: Option<String>,
}

impl NormCell {
    pub fn total(&self) -> Option<f64> {
        self.entry.as_ref().map(|e| e.total)
    }

    fn same_slot(&self, other: &NormCell) -> bool {
        self.function == other.function
            && self.domain == other.domain
            && self.params == other.params
            && self.grid_size == other.grid_size
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioCell {
    pub function: String,
    pub domain: String,
    pub params: String,
    pub grid_size: usize,
    pub numerator: f64,
    pub denominator: f64,
    /// `None` when the denominator vanishes.
    pub ratio: Option<f64>,
    pub within_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioMatrix {
    pub numerator: Flavor,
    pub denominator: Flavor,
    pub bound: f64,
    pub cells: Vec<RatioCell>,
}

impl RatioMatrix {
    /// Ratios of the stored totals of `a` over `b` for every slot where both
    /// cells succeeded. Two vanishing totals count as within the bound.
    pub fn build(cells: &[NormCell], a: Flavor, b: Flavor, bound: f64) -> Self {
        let mut out = Vec::new();
        for ca in cells.iter().filter(|c| c.flavor == a) {
            let Some(cb) = cells.iter().find(|c| c.flavor == b && c.same_slot(ca)) else { continue };
            let (Some(x), Some(y)) = (ca.total(), cb.total()) else { continue };
            let ratio = if y != 0.0 { Some(x / y) } else { None };
            let within_bound = match ratio {
                Some(r) => r >= 1.0 / bound && r <= bound,
                None => x == 0.0,
            };
            out.push(RatioCell {
                function: ca.function.clone(),
                domain: ca.domain.clone(),
                params: ca.params.clone(),
                grid_size: ca.grid_size,
                numerator: x,
                denominator: y,
                ratio,
                within_bound,
            });
        }
        RatioMatrix { numerator: a, denominator: b, bound, cells: out }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantOutcome {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub schema: u32,
    pub environment: Environment,
    pub cells: Vec<NormCell>,
    pub ratios: Vec<RatioMatrix>,
    pub invariants: Vec<InvariantOutcome>,
}

impl NormReport {
    pub fn new(seed: u64, cells: Vec<NormCell>) -> Self {
        NormReport { schema: SCHEMA, environment: Environment::current(seed), cells, ratios: Vec::new(), invariants: Vec::new() }
    }

    pub fn numeric_failures(&self) -> usize {
        self.cells.iter().filter(|c| c.error.is_some()).count()
    }

    /// No failed cell, every ratio within its bound, every invariant held.
    pub fn passed(&self) -> bool {
        self.numeric_failures() == 0
            && self.ratios.iter().all(|m| m.cells.iter().all(|c| c.within_bound))
            && self.invariants.iter().all(|i| i.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One row per stored level of every successful cell.
    pub fn write_levels_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for c in &self.cells {
            let Some(e) = &c.entry else { continue };
            for l in &e.levels {
                out.serialize(LevelRow {
                    function: &c.function,
                    domain: &c.domain,
                    params: &c.params,
                    grid_size: c.grid_size,
                    flavor: c.flavor.name(),
                    j: l.j,
                    t: l.t,
                    a_j: l.a_j,
                    weighted: (l.j as f64 * e.params.s).exp2() * l.a_j,
                })?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Writes `report.json` and `levels.csv` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json()?)?;
        self.write_levels_csv(std::fs::File::create(dir.join("levels.csv"))?)
    }
}

#[derive(Serialize)]
struct LevelRow<'a> {
    function: &'a str,
    domain: &'a str,
    params: &'a str,
    grid_size: usize,
    flavor: &'a str,
    j: i32,
    t: f64,
    a_j: f64,
    weighted: f64,
}
