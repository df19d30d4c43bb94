//! Higher-order differences `Δ^N_h f(x) = Σ_k (-1)^{N-k} C(N,k) f(x + kh)` on
//! lattice steps, and their means over the admissible step sets
//! `V^N(x, t) = {h : |h| < t, x + ℓh ∈ Ω for 0 ≤ ℓ ≤ N}`.
//!
//! Stencil sums are evaluated exactly in integer arithmetic and rounded once,
//! so the closed form and the iterated first-order difference agree bit for
//! bit.

use num_bigint::{BigInt, Sign};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::LatticeBall;
use crate::gridfn::{Field, GridFunction};

/// Integer coefficients `(-1)^{N-k} C(N, k)`, `k = 0..=N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceStencil {
    pub order: usize,
    pub coefficients: Vec<i64>,
}

impl DifferenceStencil {
    pub fn new(order: usize) -> Self {
        let mut binom = vec![1i64];
        for _ in 0..order {
            let mut next = vec![1i64; binom.len() + 1];
            for k in 1..binom.len() {
                next[k] = binom[k - 1] + binom[k];
            }
            binom = next;
        }
        let coefficients =
            binom.iter().enumerate().map(|(k, c)| if (order - k) % 2 == 0 { *c } else { -*c }).collect();
        DifferenceStencil { order, coefficients }
    }

    /// `Σ |c_k| = 2^N`.
    pub fn l1_mass(&self) -> i64 {
        self.coefficients.iter().map(|c| c.abs()).sum()
    }
}

/// `f = m · 2^e` with integer `m`, or `None` for non-finite input.
fn decompose(v: f64) -> Option<(i64, i32)> {
    if !v.is_finite() {
        return None;
    }
    if v == 0.0 {
        return Some((0, 0));
    }
    let bits = v.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1i64 << 52), exp - 1075) };
    Some((if v < 0.0 { -m } else { m }, e))
}

fn ldexp(mut x: f64, mut e: i32) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e)
}

/// Correctly rounded `s · 2^e` for an integer `s` of any width.
fn round_big(s: &BigInt, e: i32) -> f64 {
    let bits = s.bits();
    if bits <= 64 {
        let mag = s.magnitude().to_u64_digits().first().copied().unwrap_or(0);
        let v = mag as f64;
        return ldexp(if s.sign() == Sign::Minus { -v } else { v }, e);
    }
    let shift = bits - 64;
    let mag = s.magnitude();
    let top = (mag >> shift).to_u64_digits()[0];
    let sticky = (mag.trailing_zeros().unwrap_or(0) < shift) as u64;
    let v = (top | sticky) as f64;
    ldexp(if s.sign() == Sign::Minus { -v } else { v }, e + shift as i32)
}

fn round_i128(s: i128, e: i32) -> f64 {
    let mag = s.unsigned_abs();
    let bits = 128 - mag.leading_zeros();
    let (v, shift) = if bits <= 64 {
        (mag as u64 as f64, 0)
    } else {
        let shift = bits - 64;
        let sticky = (mag.trailing_zeros() < shift) as u64;
        (((mag >> shift) as u64 | sticky) as f64, shift as i32)
    };
    ldexp(if s < 0 { -v } else { v }, e + shift)
}

/// Values rewritten as integers over a common power of two.
enum Scaled {
    Narrow(Vec<i128>, i32),
    Wide(Vec<BigInt>, i32),
}

fn common_scale(values: &[f64]) -> Option<Scaled> {
    let parts: Vec<(i64, i32)> = values.iter().map(|v| decompose(*v)).collect::<Option<_>>()?;
    let e_min = parts.iter().filter(|(m, _)| *m != 0).map(|(_, e)| *e).min().unwrap_or(0);
    let e_max = parts.iter().filter(|(m, _)| *m != 0).map(|(_, e)| *e).max().unwrap_or(0);
    // 53 + 60 bits of shifted mantissa, C(8,4) < 2^7, 9 terms: below 2^125
    if e_max - e_min <= 60 && values.len() <= 9 {
        let ints = parts.iter().map(|(m, e)| if *m == 0 { 0 } else { (*m as i128) << (e - e_min) }).collect();
        Some(Scaled::Narrow(ints, e_min))
    } else {
        let ints = parts.iter().map(|(m, e)| if *m == 0 { BigInt::from(0) } else { BigInt::from(*m) << (e - e_min) as usize }).collect();
        Some(Scaled::Wide(ints, e_min))
    }
}

/// Exact `Σ c_k v_k`, rounded once. Non-finite input gives NaN.
pub fn stencil_sum(stencil: &DifferenceStencil, values: &[f64]) -> f64 {
    debug_assert_eq!(values.len(), stencil.order + 1);
    match common_scale(values) {
        None => f64::NAN,
        Some(Scaled::Narrow(ints, e)) => {
            let s: i128 = ints.iter().zip(&stencil.coefficients).map(|(m, c)| m * *c as i128).sum();
            round_i128(s, e)
        }
        Some(Scaled::Wide(ints, e)) => {
            let s: BigInt = ints.iter().zip(&stencil.coefficients).map(|(m, c)| m * *c).sum();
            round_big(&s, e)
        }
    }
}

/// `Δ_h(Δ_h^{N-1} f)(x)` by exact iterated first-order differences, rounded
/// once.
pub fn iterated_difference(values: &[f64]) -> f64 {
    match common_scale(values) {
        None => f64::NAN,
        Some(Scaled::Narrow(mut ints, e)) => {
            for len in (1..ints.len()).rev() {
                for k in 0..len {
                    ints[k] = ints[k + 1] - ints[k];
                }
            }
            round_i128(ints[0], e)
        }
        Some(Scaled::Wide(ints, e)) => iterate_big(ints, e),
    }
}

fn iterate_big(mut ints: Vec<BigInt>, e: i32) -> f64 {
    for len in (1..ints.len()).rev() {
        for k in 0..len {
            ints[k] = &ints[k + 1] - &ints[k];
        }
    }
    round_big(&ints[0], e)
}

/// Values `f(x + kh)`, `k = 0..=N`, or the first masked/off-grid node.
fn chord(f: &GridFunction, x: &[i64], h: &[i64], n: usize, buf: &mut Vec<f64>) -> std::result::Result<(), Vec<i64>> {
    buf.clear();
    let mut node = x.to_vec();
    for k in 0..=n {
        for i in 0..x.len() {
            node[i] = x[i] + k as i64 * h[i];
        }
        match f.get_index(&node) {
            Some(v) => buf.push(v),
            None => return Err(node),
        }
    }
    Ok(())
}

/// `Δ^N_h f(x)` at the node with multi-index `x` for the lattice step `h`
/// (in cells).
pub fn delta(f: &GridFunction, x: &[i64], h: &[i64], n: usize) -> Result<f64> {
    let mut buf = Vec::with_capacity(n + 1);
    chord(f, x, h, n, &mut buf).map_err(Error::OutOfDomain)?;
    Ok(stencil_sum(&DifferenceStencil::new(n), &buf))
}

/// `(t^{-d} Σ_{h ∈ V^N(x,t)} |Δ^N_h f(x)|^v h_grid^d)^{1/v}` (maximum for
/// `v = ∞`) and the number of admissible steps. No admissible step gives 0.
pub fn diff_ball_mean(f: &GridFunction, x: &[i64], t: f64, v: f64, n: usize) -> Result<(f64, usize)> {
    check(f, t, v)?;
    if f.get_index(x).is_none() {
        return Err(Error::OutOfDomain(x.to_vec()));
    }
    let ball = LatticeBall::new(f.grid().dim(), t / f.grid().spacing);
    Ok(ball_mean_with(f, x, &ball, t, v, &DifferenceStencil::new(n)))
}

fn check(f: &GridFunction, t: f64, v: f64) -> Result<()> {
    if !(t >= 2.0 * f.grid().spacing) {
        return Err(Error::invalid(format!("radius {t} is below twice the grid spacing")));
    }
    if !(v > 0.0) {
        return Err(Error::invalid("exponent v must be positive"));
    }
    Ok(())
}

fn ball_mean_with(f: &GridFunction, x: &[i64], ball: &LatticeBall, t: f64, v: f64, st: &DifferenceStencil) -> (f64, usize) {
    let n = st.order;
    let mut buf = Vec::with_capacity(n + 1);
    let mut count = 0usize;
    let mut acc = 0.0f64;
    for h in ball.iter() {
        if chord(f, x, h, n, &mut buf).is_err() {
            continue;
        }
        count += 1;
        let a = stencil_sum(st, &buf).abs();
        if v.is_infinite() {
            acc = acc.max(a);
        } else {
            acc += a.powf(v);
        }
    }
    if v.is_infinite() || count == 0 {
        return (acc, count);
    }
    let g = f.grid();
    let w = g.cell_volume() / t.powi(g.dim() as i32);
    ((acc * w).powf(1.0 / v), count)
}

/// Difference ball means at every unmasked node.
pub fn diff_field(f: &GridFunction, t: f64, v: f64, n: usize) -> Result<Field> {
    diff_field_on(f, f.mask(), t, v, n)
}

/// Difference ball means at the nodes of `centers ∧ mask`; the output mask
/// is that set.
pub fn diff_field_on(f: &GridFunction, centers: &[bool], t: f64, v: f64, n: usize) -> Result<Field> {
    check(f, t, v)?;
    let grid = f.grid();
    let ball = LatticeBall::new(grid.dim(), t / grid.spacing);
    let st = DifferenceStencil::new(n);
    let eval: Vec<bool> = centers.iter().zip(f.mask()).map(|(a, b)| *a && *b).collect();
    let idx: Vec<usize> = (0..grid.len()).filter(|i| eval[*i]).collect();
    let out: Vec<(f64, usize)> =
        idx.par_iter().map(|&c| ball_mean_with(f, &grid.unravel(c), &ball, t, v, &st)).collect();
    let mut values = vec![0.0; grid.len()];
    let mut empty = 0;
    for (i, (val, count)) in idx.iter().zip(out) {
        values[*i] = val;
        empty += (count == 0) as usize;
    }
    Ok(Field { values: GridFunction::from_parts_unchecked(grid.clone(), values, eval), sparse: 0, empty })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoxRegion, DomainSpec};
    use crate::gridfn::GridSpec;

    fn node_fn(lo: f64, hi: f64, h: f64, f: impl Fn(f64) -> f64) -> GridFunction {
        let w = BoxRegion::new(vec![lo], vec![hi]).unwrap();
        let grid = GridSpec::nodes(&w, h).unwrap();
        GridFunction::from_fn(&grid, &DomainSpec::full_space(w), |x| f(x[0]))
    }

    #[test]
    fn stencil_coefficients() {
        assert_eq!(DifferenceStencil::new(1).coefficients, vec![-1, 1]);
        assert_eq!(DifferenceStencil::new(4).coefficients, vec![1, -4, 6, -4, 1]);
        for n in 1..12 {
            let s = DifferenceStencil::new(n);
            assert_eq!(s.coefficients.iter().sum::<i64>(), 0);
            assert_eq!(s.l1_mass(), 1 << n);
        }
    }

    #[test]
    fn delta_examples() {
        let g = node_fn(-2.0, 4.0, 1.0, |x| x * x);
        assert_eq!(delta(&g, &[2], &[1], 2).unwrap(), 2.0);
        let lin = node_fn(-2.0, 4.0, 0.5, |x| 3.0 * x - 1.0);
        assert_eq!(delta(&lin, &[1], &[2], 2).unwrap(), 0.0);
        assert!(matches!(delta(&g, &[5], &[1], 2), Err(Error::OutOfDomain(_))));

        let ln2 = std::f64::consts::LN_2;
        let values = [1.0, ln2.exp(), (2.0 * ln2).exp()];
        let d2 = stencil_sum(&DifferenceStencil::new(2), &values);
        assert!((d2 - (ln2.exp() - 1.0).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn exact_sum_is_correctly_rounded() {
        // 1e16 + 1 - 1e16 is 1 in exact arithmetic
        let st = DifferenceStencil { order: 2, coefficients: vec![1, 1, -1] };
        assert_eq!(stencil_sum(&st, &[1e16, 1.0, 1e16]), 1.0);
        let wide = [1e300, 1e-300, -1e300];
        assert_eq!(stencil_sum(&DifferenceStencil::new(2), &wide), -2e-300);
        assert_eq!(iterated_difference(&wide), stencil_sum(&DifferenceStencil::new(2), &wide));
    }

    #[test]
    fn ball_mean_examples() {
        let h = 1.0 / 64.0;
        let sq = node_fn(-2.0, 2.0, h, |x| x * x);
        let (v, _) = diff_ball_mean(&sq, &[128], 0.5, f64::INFINITY, 2).unwrap();
        let hmax = 31.0 * h;
        assert_eq!(v, 2.0 * hmax * hmax);

        let step = node_fn(-1.0, 1.0, 0.05, |x| if x >= 0.0 { 1.0 } else { 0.0 });
        let x = step.grid().node_index(&[-0.1]).unwrap();
        let (v, count) = diff_ball_mean(&step, &x, 0.3, 1.0, 1).unwrap();
        assert_eq!(count, 11);
        assert!((v - 0.2 / 0.3).abs() < 1e-12);
    }

    #[test]
    fn gaussian_field_is_symmetric() {
        let h = 1.0 / 128.0;
        let g = node_fn(-4.0, 4.0, h, |x| (-x * x / 2.0).exp());
        let field = diff_field(&g, 0.25, 2.0, 2).unwrap().values;
        let n = g.grid().len();
        for i in 0..n {
            let (a, b) = (field.get(i).unwrap(), field.get(n - 1 - i).unwrap());
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{i}: {a} {b}");
        }
    }
}
