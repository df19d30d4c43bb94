//! Exact higher-order differences and difference ball means.

use besov_morrey::differences::{delta, diff_ball_mean, iterated_difference, stencil_sum, DifferenceStencil};
use besov_morrey::geometry::{BoxRegion, DomainSpec};
use besov_morrey::gridfn::{GridSpec, TestFunctionSpec};

fn main() -> besov_morrey::Result<()> {
    for n in 1..=5 {
        println!("N = {n}: coefficients {:?}", DifferenceStencil::new(n).coefficients);
    }

    // Closed form and iterated first differences agree bit for bit.
    let values = [0.1, 1e16, -3.7, 2.0 / 3.0, 1e-8];
    let closed = stencil_sum(&DifferenceStencil::new(4), &values);
    println!("closed {closed:e}, iterated {:e}", iterated_difference(&values));

    let window = BoxRegion::new(vec![-2.0], vec![2.0])?;
    let dom = DomainSpec::full_space(window.clone());
    let grid = GridSpec::cells(&window, 400)?;
    let cubic = TestFunctionSpec::polynomial_1d("cubic", &[1.0, -2.0, 0.5, 3.0]).sample(&grid, &dom);
    // cell-centred nodes: index 200 sits at h/2
    let x = [200];
    for n in 3..=5 {
        println!("Δ^{n} of a cubic with step 7h: {:e}", delta(&cubic, &x, &[7], n)?);
    }

    let step = TestFunctionSpec::step(vec![0.0], vec![1.0]).sample(&grid, &dom);
    for t in [0.4, 0.2, 0.1, 0.05] {
        let (mean, steps) = diff_ball_mean(&step, &x, t, 2.0, 2)?;
        println!("t = {t:<5} second-difference ball mean {mean:.4} over {steps} steps");
    }
    Ok(())
}
