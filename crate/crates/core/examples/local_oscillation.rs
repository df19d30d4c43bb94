//! Local polynomial oscillations in the three modes.
//!
//! Exact least squares for `v = 2`, the discrete Chebyshev fit for `v = ∞`,
//! and the projection surrogate otherwise, on a cusp near its singularity.

use besov_morrey::geometry::{BoxRegion, DomainSpec};
use besov_morrey::gridfn::{GridSpec, TestFunctionSpec};
use besov_morrey::localpoly::{oscillation, project, OscMode};

fn main() -> besov_morrey::Result<()> {
    let window = BoxRegion::new(vec![-1.0], vec![1.0])?;
    let dom = DomainSpec::full_space(window.clone());
    let grid = GridSpec::cells(&window, 800)?;
    let f = TestFunctionSpec::cusp(0.5, 1.0).sample(&grid, &dom);

    let x = [0.1];
    println!("{:>6} {:>3} {:>12} {:>12} {:>12}", "t", "N", "v=2", "v=inf", "v=1 (surr.)");
    for t in [0.4, 0.2, 0.1, 0.05] {
        for n in 1..=3 {
            let l2 = oscillation(&f, &x, t, 2.0, n, OscMode::Exact2)?;
            let linf = oscillation(&f, &x, t, f64::INFINITY, n, OscMode::Minimax)?;
            let l1 = oscillation(&f, &x, t, 1.0, n, OscMode::ProjectionSurrogate)?;
            println!("{t:>6} {n:>3} {l2:>12.4e} {linf:>12.4e} {l1:>12.4e}");
        }
    }

    // The projection value at the center tends to f(x) as the ball shrinks.
    let exact = TestFunctionSpec::cusp(0.5, 1.0).eval(&x);
    for t in [0.2, 0.1, 0.05, 0.02] {
        let p = project(&f, &x, t, 3)?;
        println!("t = {t:<5} quadratic projection at x: {:.6} (f(x) = {exact:.6})", p.eval(&x));
    }
    Ok(())
}
