//! The Fourier-side reference norm and its dyadic pieces.

use besov_morrey::geometry::{BoxRegion, DomainSpec};
use besov_morrey::gridfn::{GridSpec, TestFunctionSpec};
use besov_morrey::lpref::{build_decomposition, lp_norm, lp_norm_with, lp_pieces, max_level};
use besov_morrey::params::SpaceParams;

fn main() -> besov_morrey::Result<()> {
    let window = BoxRegion::new(vec![-8.0], vec![8.0])?;
    let dom = DomainSpec::full_space(window.clone());
    let grid = GridSpec::cells(&window, 4096)?;
    let k_max = max_level(grid.spacing);
    let dec = build_decomposition(&grid, k_max)?;

    let f = TestFunctionSpec::cusp(0.3, 1.0).sample(&grid, &dom);
    let pieces = lp_pieces(&f, &dec)?;
    println!("k_max = {k_max}, boundary mass {:.2e}, imaginary residue {:.2e}", pieces.boundary_mass, pieces.imaginary_residue);
    for (k, p) in pieces.pieces.iter().enumerate() {
        println!("  piece {k}: max |f_k| = {:.4e}", p.max_abs());
    }

    let bm = SpaceParams::besov_morrey(1, 0.7, 1.5, 3.0, 2.0, 2.0, 2);
    let e = lp_norm(&f, &bm, &dom)?;
    println!("Besov-Morrey: main {:.4}, seminorm {:.4}, total {:.4}", e.main_term, e.seminorm, e.total);

    let bt = SpaceParams::besov_type(1, 0.7, 1.5, 0.2, 2.0, 2.0, 2);
    let cut = lp_norm_with(&f, &bt, &dom, true)?.total;
    let full = lp_norm_with(&f, &bt, &dom, false)?.total;
    println!("Besov-type: truncated {cut:.4} <= untruncated {full:.4}");
    Ok(())
}
