//! Reading off smoothness from the decay of the per-level terms.
//!
//! A jump has `B^s_{p,∞}` regularity up to `1/p`; the cusp `|x|^α` up to
//! `α + 1/p`. With `p = 2` the fitted thresholds land near 0.5 and 0.8.

use besov_morrey::geometry::{BoxRegion, DomainSpec};
use besov_morrey::gridfn::TestFunctionSpec;
use besov_morrey::harness::scan::regularity_scan;
use besov_morrey::params::{Flavor, SpaceParams};

fn main() -> besov_morrey::Result<()> {
    let dom = DomainSpec::full_space(BoxRegion::new(vec![-2.0], vec![2.0])?);
    let sp = SpaceParams::besov_morrey(1, 0.5, 2.0, 2.0, 1.0, 1.0, 1);
    let corpus = [TestFunctionSpec::step(vec![0.0], vec![1.0]), TestFunctionSpec::cusp(0.3, 1.0)];
    for f in &corpus {
        let scan = regularity_scan(f, &sp, &dom, &[1024, 2048, 4096], Flavor::Osc)?;
        println!("{}: threshold {:.3}", scan.function, scan.threshold);
        for g in &scan.grids {
            let terms: Vec<String> = g.levels.iter().map(|l| format!("{}:{:.2e}", l.j, l.a_j)).collect();
            println!("  {:>5} cells, slope {:+.3} over {:?}: {}", g.cells, g.slope, g.fit_levels, terms.join(" "));
        }
    }
    Ok(())
}
