//! Morrey norms in ball and dyadic-cube form.
//!
//! The indicator of `[0, 1]` and a cusp, for `u` between `p` and a large
//! value; the cube-to-ball ratio stays bounded as the grid refines.

use besov_morrey::geometry::{BoxRegion, DomainSpec};
use besov_morrey::gridfn::{GridSpec, TestFunctionSpec};
use besov_morrey::morrey::{cube_levels, default_radii, morrey_ball_norm, morrey_cube_norm, MorreyParams};

fn main() -> besov_morrey::Result<()> {
    let window = BoxRegion::new(vec![-4.0], vec![4.0])?;
    let dom = DomainSpec::full_space(window.clone());
    let corpus = [TestFunctionSpec::step(vec![0.0], vec![1.0]), TestFunctionSpec::cusp(-0.3, 1.0)];
    println!("{:>10} {:>5} {:>6} {:>10} {:>10} {:>7}", "function", "u", "cells", "ball", "cube", "ratio");
    for f in &corpus {
        for u in [1.0, 2.0, 8.0] {
            let mp = MorreyParams::new(1.0, u)?;
            for cells in [512, 2048] {
                let grid = GridSpec::cells(&window, cells)?;
                let g = f.sample(&grid, &dom);
                let ball = morrey_ball_norm(&g, &mp, &default_radii(grid.spacing, window.diameter()))?;
                let (j_min, j_max) = cube_levels(&window, grid.spacing);
                let cube = morrey_cube_norm(&g, &mp, j_min, j_max)?;
                println!("{:>10} {u:>5} {cells:>6} {ball:>10.4} {cube:>10.4} {:>7.3}", f.name, cube / ball);
            }
        }
    }
    Ok(())
}
