//! Experiment configuration (JSON, `schema: 1`) and its validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::gridfn::TestFunctionSpec;
use crate::params::{Flavor, SpaceParams};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedDomain {
    pub name: String,
    pub domain: DomainSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedParams {
    pub name: String,
    pub params: SpaceParams,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    /// Directory receiving `report.json` and `levels.csv`; nothing is written
    /// when absent.
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerance {
    /// Every compared ratio must lie in `[1/ratio_bound, ratio_bound]`.
    pub ratio_bound: f64,
    /// Relative slack of the stored-value reproducibility checks.
    pub reproduce: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { ratio_bound: 10.0, reproduce: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub corpus: Vec<TestFunctionSpec>,
    pub domains: Vec<NamedDomain>,
    pub params: Vec<NamedParams>,
    /// Cells across the first window axis.
    pub grid_sizes: Vec<usize>,
    pub flavors: Vec<Flavor>,
    #[serde(default)]
    pub comparisons: Vec<(Flavor, Flavor)>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerance: Tolerance,
    /// Worker threads; hardware concurrency when absent.
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::config(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config { location, message } => Error::config(format!("{}: {location}", path.display()), message),
            other => other,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Structural checks; the first failure is reported with its location.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::config("schema", format!("unsupported schema {}, expected {SCHEMA}", self.schema)));
        }
        if self.corpus.is_empty() {
            return Err(Error::config("corpus", "corpus must not be empty"));
        }
        if self.params.is_empty() {
            return Err(Error::config("params", "parameter grid must not be empty"));
        }
        if self.domains.is_empty() {
            return Err(Error::config("domains", "at least one domain is required"));
        }
        if self.flavors.is_empty() {
            return Err(Error::config("flavors", "at least one flavor is required"));
        }
        if self.grid_sizes.is_empty() || self.grid_sizes.contains(&0) {
            return Err(Error::config("grid_sizes", "grid sizes must be a nonempty list of positive integers"));
        }
        for (i, f) in self.corpus.iter().enumerate() {
            f.validate(None).map_err(|e| Error::config(format!("corpus[{i}]"), e.to_string()))?;
        }
        for (i, d) in self.domains.iter().enumerate() {
            d.domain.validate().map_err(|e| Error::config(format!("domains[{i}] ({})", d.name), e.to_string()))?;
        }
        for (i, p) in self.params.iter().enumerate() {
            p.params.check().map_err(|e| Error::config(format!("params[{i}] ({})", p.name), e.to_string()))?;
            for d in &self.domains {
                if d.domain.dim() != p.params.d {
                    return Err(Error::config(
                        format!("params[{i}] ({})", p.name),
                        format!("d = {} but domain {} has dimension {}", p.params.d, d.name, d.domain.dim()),
                    ));
                }
            }
        }
        if self.flavors.contains(&Flavor::Lp) {
            if let Some((i, d)) = self.domains.iter().enumerate().find(|(_, d)| !d.domain.is_full_space()) {
                return Err(Error::config(
                    format!("domains[{i}] ({})", d.name),
                    "flavor lp is defined on the full space only",
                ));
            }
        }
        for (i, (a, b)) in self.comparisons.iter().enumerate() {
            if !self.flavors.contains(a) || !self.flavors.contains(b) {
                return Err(Error::config(
                    format!("comparisons[{i}]"),
                    format!("{}/{} compares a flavor that is not computed", a.name(), b.name()),
                ));
            }
        }
        if !(self.tolerance.ratio_bound >= 1.0) {
            return Err(Error::config("tolerance.ratio_bound", "ratio bound must be at least 1"));
        }
        if !(self.tolerance.reproduce >= 0.0) {
            return Err(Error::config("tolerance.reproduce", "reproducibility slack must be nonnegative"));
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads", "thread count must be positive"));
        }
        Ok(())
    }

    /// All comparisons among the computed flavors, in order.
    pub fn all_pairs(&self) -> Vec<(Flavor, Flavor)> {
        let mut out = Vec::new();
        for (i, a) in self.flavors.iter().enumerate() {
            for b in &self.flavors[i + 1..] {
                out.push((*a, *b));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "schema": 1,
        "corpus": [{"name": "g", "family": "gaussian", "center": [0.0], "width": 0.5}],
        "domains": [{"name": "line", "domain": {"kind": "full_space", "window": {"lo": [-4.0], "hi": [4.0]}}}],
        "params": [{"name": "bm", "params": {"d": 1, "s": 0.7, "p": 1.5, "q": 2, "v": 2, "N": 2, "T": 1, "R": 1,
                     "family": {"kind": "besov_morrey", "u": 3.0}}}],
        "grid_sizes": [256],
        "flavors": ["osc", "diff"],
        "comparisons": [["osc", "diff"]]
    }"#;

    #[test]
    fn minimal_config_parses_and_round_trips() {
        let cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.tolerance, Tolerance::default());
        let back = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn errors_carry_a_location() {
        let bad = MINIMAL.replace(r#""comparisons": [["osc", "diff"]]"#, r#""comparisons": [["osc", "lp"]]"#);
        match ExperimentConfig::from_json(&bad) {
            Err(Error::Config { location, .. }) => assert_eq!(location, "comparisons[0]"),
            other => panic!("{other:?}"),
        }
        let bad = MINIMAL.replace(r#""width": 0.5"#, r#""width": -1"#);
        assert!(matches!(ExperimentConfig::from_json(&bad), Err(Error::Config { location, .. }) if location == "corpus[0]"));
        let bad = MINIMAL.replace(r#"["osc", "diff"],"#, r#"["osc", "wavelet"],"#);
        assert!(matches!(ExperimentConfig::from_json(&bad), Err(Error::Config { .. })));
    }
}
