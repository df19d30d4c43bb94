//! Fan-out of `(function, domain, params, grid, flavor)` tasks over a worker
//! pool and single-threaded assembly of the report.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::{Flavor, SpaceFamily};
use crate::spacenorms::{full_norm, ScaleBreakdown};

use super::config::ExperimentConfig;
use super::grid_with_cells;
use super::report::{InvariantOutcome, NormCell, NormReport, RatioMatrix};

struct Task<'a> {
    function: usize,
    domain: usize,
    params: usize,
    grid_size: usize,
    flavor: Flavor,
    cfg: &'a ExperimentConfig,
}

impl Task<'_> {
    fn run(&self) -> NormCell {
        let f = &self.cfg.corpus[self.function];
        let dom = &self.cfg.domains[self.domain];
        let sp = &self.cfg.params[self.params];
        let mut cell = NormCell {
            function: f.name.clone(),
            domain: dom.name.clone(),
            params: sp.name.clone(),
            grid_size: self.grid_size,
            spacing: f64::NAN,
            flavor: self.flavor,
            entry: None,
            error: None,
        };
        let result = grid_with_cells(&dom.domain, &sp.params, self.grid_size).and_then(|grid| {
            cell.spacing = grid.spacing;
            full_norm(&f.sample(&grid, &dom.domain), &sp.params, &dom.domain, self.flavor)
        });
        match result {
            Ok(e) => cell.entry = Some(e),
            Err(e) => cell.error = Some(e.to_string()),
        }
        cell
    }
}

/// Builds a pool of the configured size; `None` uses hardware concurrency.
pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::config("threads", e.to_string()))
}

/// Computes every requested norm, the ratio matrices and the invariant
/// checks. Only configuration problems are errors; numeric failures are
/// recorded on their cells.
pub fn run(cfg: &ExperimentConfig) -> Result<NormReport> {
    cfg.validate()?;
    let mut tasks = Vec::new();
    for function in 0..cfg.corpus.len() {
        for domain in 0..cfg.domains.len() {
            for params in 0..cfg.params.len() {
                for &grid_size in &cfg.grid_sizes {
                    for &flavor in &cfg.flavors {
                        tasks.push(Task { function, domain, params, grid_size, flavor, cfg });
                    }
                }
            }
        }
    }
    let pool = thread_pool(cfg.threads)?;
    let cells: Vec<NormCell> = pool.install(|| tasks.par_iter().map(Task::run).collect());
    let mut report = NormReport::new(cfg.seed, cells);
    report.ratios = cfg
        .comparisons
        .iter()
        .map(|(a, b)| RatioMatrix::build(&report.cells, *a, *b, cfg.tolerance.ratio_bound))
        .collect();
    report.invariants = stored_invariants(&report, cfg.tolerance.reproduce);
    Ok(report)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) || a == b
}

/// Checks that need no further computation: reproducibility of ratios and
/// aggregates from stored values, additivity of the two addends, and
/// monotonicity of the `ℓ_q` aggregate in `q`.
pub fn stored_invariants(report: &NormReport, rel: f64) -> Vec<InvariantOutcome> {
    let mut ratio = (0usize, 0usize);
    for m in &report.ratios {
        for c in &m.cells {
            let num = report.cells.iter().find(|x| {
                x.flavor == m.numerator && x.function == c.function && x.domain == c.domain && x.params == c.params && x.grid_size == c.grid_size
            });
            let den = report.cells.iter().find(|x| {
                x.flavor == m.denominator && x.function == c.function && x.domain == c.domain && x.params == c.params && x.grid_size == c.grid_size
            });
            ratio.0 += 1;
            let ok = match (num.and_then(|x| x.total()), den.and_then(|x| x.total()), c.ratio) {
                (Some(a), Some(b), Some(r)) => close(r, a / b, rel),
                (Some(a), Some(b), None) => b == 0.0 && c.numerator == a,
                _ => false,
            };
            ratio.1 += (!ok) as usize;
        }
    }
    let mut aggregate = (0usize, 0usize);
    let mut additive = (0usize, 0usize);
    let mut q_mono = (0usize, 0usize);
    for c in &report.cells {
        let Some(e) = &c.entry else { continue };
        let sp = &e.params;
        let dv = if sp.v.is_infinite() { 0.0 } else { sp.d as f64 / sp.v };
        let s = if e.flavor == Flavor::Hn { sp.s + dv } else { sp.s };
        let agg = ScaleBreakdown::aggregate_of(&e.levels, s, sp.q);
        if matches!(sp.family, SpaceFamily::BesovMorrey { .. }) {
            aggregate.0 += 1;
            aggregate.1 += (!close(agg, e.seminorm, rel)) as usize;
        }
        if matches!(e.flavor, Flavor::Osc | Flavor::Diff) {
            additive.0 += 1;
            additive.1 += (!close(e.total, e.main_term + e.seminorm, rel)) as usize;
        }
        let qs = [sp.q, 2.0 * sp.q, f64::INFINITY];
        let vals: Vec<f64> = qs.iter().map(|q| ScaleBreakdown::aggregate_of(&e.levels, s, *q)).collect();
        q_mono.0 += 1;
        q_mono.1 += vals.windows(2).any(|w| w[1] > w[0] * (1.0 + rel)) as usize;
    }
    let outcome = |name: &str, (checked, failed): (usize, usize), what: &str| InvariantOutcome {
        name: name.to_string(),
        passed: failed == 0,
        checked,
        detail: format!("{failed} of {checked} {what} failed"),
    };
    vec![
        outcome("ratio_reproducible", ratio, "ratio cells"),
        outcome("aggregate_reproducible", aggregate, "Besov-Morrey breakdowns"),
        outcome("main_plus_seminorm", additive, "oscillation/difference totals"),
        outcome("q_monotone", q_mono, "stored breakdowns"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoxRegion, DomainSpec};
    use crate::gridfn::TestFunctionSpec;
    use crate::harness::config::{NamedDomain, NamedParams, OutputConfig, Tolerance};
    use crate::params::SpaceParams;

    fn config(corpus: Vec<TestFunctionSpec>, comparisons: Vec<(Flavor, Flavor)>) -> ExperimentConfig {
        ExperimentConfig {
            schema: 1,
            corpus,
            domains: vec![NamedDomain {
                name: "line".into(),
                domain: DomainSpec::full_space(BoxRegion::new(vec![-4.0], vec![4.0]).unwrap()),
            }],
            params: vec![NamedParams { name: "bm".into(), params: SpaceParams::besov_morrey(1, 0.7, 1.5, 3.0, 2.0, 2.0, 2) }],
            grid_sizes: vec![256],
            flavors: vec![Flavor::Osc, Flavor::Diff, Flavor::Hn, Flavor::Lp],
            comparisons,
            output: OutputConfig::default(),
            tolerance: Tolerance::default(),
            threads: Some(1),
            seed: 0,
        }
    }

    #[test]
    fn zero_function_gives_zero_norms_and_passing_invariants() {
        let cfg = config(vec![TestFunctionSpec::zero()], vec![(Flavor::Osc, Flavor::Diff)]);
        let rep = run(&cfg).unwrap();
        assert_eq!(rep.cells.len(), 4);
        assert!(rep.cells.iter().all(|c| c.total() == Some(0.0)));
        assert!(rep.passed(), "{:?}", rep.invariants);
    }

    #[test]
    fn empty_comparisons_give_no_ratios() {
        let cfg = config(vec![TestFunctionSpec::gaussian(vec![0.0], 0.5)], Vec::new());
        let rep = run(&cfg).unwrap();
        assert!(rep.ratios.is_empty());
        assert!(rep.cells.iter().all(|c| c.entry.is_some()));
    }

    #[test]
    fn report_is_deterministic_and_round_trips() {
        let cfg = config(vec![TestFunctionSpec::gaussian(vec![0.0], 0.5)], vec![(Flavor::Osc, Flavor::Lp)]);
        let a = run(&cfg).unwrap();
        let b = run(&ExperimentConfig { threads: Some(2), ..cfg }).unwrap();
        let ja = a.to_json().unwrap();
        assert_eq!(ja, b.to_json().unwrap());
        assert_eq!(NormReport::from_json(&ja).unwrap(), a);
        let mut csv = Vec::new();
        a.write_levels_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("function,domain,params,grid_size,flavor,j,t,a_j,weighted"));
    }
}
