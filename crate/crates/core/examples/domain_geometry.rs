//! Domains, admissible difference steps and dyadic cubes.
//!
//! Builds the wedge `{y_2 > |y_1|}` and the open square, then lists how many
//! lattice steps survive the `N + 1` membership tests as the order grows.

use besov_morrey::geometry::{cubes_touching, v_set_sample, BoxRegion, DomainSpec, PiecewiseLinear};

fn main() -> besov_morrey::Result<()> {
    let window = BoxRegion::cube(2, -1.0, 1.0);
    let wedge = DomainSpec::special_lipschitz(vec![PiecewiseLinear::abs(0.0, 1.0)], 0.0, window.clone())?;
    let square = DomainSpec::convex_box(&BoxRegion::cube(2, -0.5, 0.5));

    let x = [0.0, 0.2];
    let (t, step) = (0.3, 0.05);
    println!("lattice steps h with |h| < {t} and x + l h in the domain, x = {x:?}");
    println!("{:>3} {:>8} {:>8}", "N", "wedge", "square");
    for n in 1..=4 {
        let a = v_set_sample(&wedge, &x, t, n, step)?.len();
        let b = v_set_sample(&square, &x, t, n, step)?.len();
        println!("{n:>3} {a:>8} {b:>8}");
    }

    for j in 0..=3 {
        let cubes = cubes_touching(&wedge, j, j, 1 << 20)?;
        println!("level {j}: {} dyadic cubes meet the wedge inside the window", cubes.len());
    }
    Ok(())
}
