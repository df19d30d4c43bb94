//! The four equivalent quasi-norms side by side on three grids.

use besov_morrey::harness::grid_with_cells;
use besov_morrey::harness::suite::{equivalence_corpus, equivalence_params};
use besov_morrey::geometry::{BoxRegion, DomainSpec};
use besov_morrey::params::Flavor;
use besov_morrey::spacenorms::full_norm;

fn main() -> besov_morrey::Result<()> {
    let dom = DomainSpec::full_space(BoxRegion::new(vec![-8.0], vec![8.0])?);
    let sp = equivalence_params();
    let flavors = [Flavor::Osc, Flavor::Diff, Flavor::Hn, Flavor::Lp];
    print!("{:>14} {:>6}", "function", "cells");
    for f in flavors {
        print!(" {:>9}", f.name());
    }
    println!(" {:>9}", "max/min");
    for f in equivalence_corpus() {
        for cells in [1024, 2048, 4096] {
            let g = f.sample(&grid_with_cells(&dom, &sp, cells)?, &dom);
            let totals = flavors.iter().map(|fl| full_norm(&g, &sp, &dom, *fl).map(|e| e.total)).collect::<besov_morrey::Result<Vec<_>>>()?;
            print!("{:>14} {cells:>6}", f.name);
            for t in &totals {
                print!(" {t:>9.4}");
            }
            let hi = totals.iter().cloned().fold(f64::MIN, f64::max);
            let lo = totals.iter().cloned().fold(f64::MAX, f64::min);
            println!(" {:>9.3}", hi / lo);
        }
    }
    Ok(())
}
