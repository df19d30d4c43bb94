//! Running a JSON experiment and reading the report back.
//!
//! Pass a configuration path to run it; without one the shipped default
//! is run on a single coarse grid.

use besov_morrey::harness::config::ExperimentConfig;
use besov_morrey::harness::report::NormReport;
use besov_morrey::harness::run::run;
use besov_morrey::harness::suite::default_config;

fn main() -> besov_morrey::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig { grid_sizes: vec![1024], ..default_config() },
    };
    let report = run(&cfg)?;

    for c in &report.cells {
        match (&c.entry, &c.error) {
            (Some(e), _) => println!("{:>14} {:>5} {:>4}: {:.5}  {:?}", c.function, c.grid_size, c.flavor.name(), e.total, e.flags),
            (_, Some(err)) => println!("{:>14} {:>5} {:>4}: error {err}", c.function, c.grid_size, c.flavor.name()),
            _ => unreachable!(),
        }
    }
    for m in &report.ratios {
        let worst = m.cells.iter().filter_map(|c| c.ratio).map(|r| r.max(1.0 / r)).fold(1.0, f64::max);
        println!("{}/{}: worst factor {worst:.3}", m.numerator.name(), m.denominator.name());
    }
    for i in &report.invariants {
        println!("{}: {}", i.name, i.detail);
    }

    let json = report.to_json()?;
    assert_eq!(NormReport::from_json(&json)?, report);
    println!("report: {} bytes of JSON, schema {}", json.len(), report.schema);
    Ok(())
}
