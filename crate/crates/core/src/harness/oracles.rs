//! Brute-force reference values for small sample sets, written against a
//! fixed Legendre product basis so that they share no code with the
//! projection or the simplex.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::localpoly::BallSamples;

fn legendre(k: u32, u: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, u);
    if k == 0 {
        return p0;
    }
    for n in 1..k {
        let n = n as f64;
        let p2 = ((2.0 * n + 1.0) * u * p1 - n * p0) / (n + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Multi-indices of total degree `< order` in `dim` variables.
fn degrees(dim: usize, order: usize) -> Vec<Vec<u32>> {
    (0..dim)
        .map(|_| 0..order as u32)
        .multi_cartesian_product()
        .filter(|a| (a.iter().sum::<u32>() as usize) < order)
        .collect()
}

/// Rows `L_α(u_i)` of the Legendre product basis of `P_{order-1}`.
pub fn legendre_design(s: &BallSamples, order: usize) -> DMatrix<f64> {
    let alphas = degrees(s.dim, order.max(1));
    let alphas = if order == 0 { Vec::new() } else { alphas };
    let mut a = DMatrix::<f64>::zeros(s.len(), alphas.len());
    for (i, u) in s.points().enumerate() {
        for (k, al) in alphas.iter().enumerate() {
            a[(i, k)] = al.iter().zip(u).map(|(e, x)| legendre(*e, *x)).product();
        }
    }
    a
}

/// `min_c (w Σ (f_i - (Ac)_i)^2)^{1/2}` by a zooming grid scan over the
/// coefficients. The scan runs in coordinates whitened by the Cholesky
/// factor of `AᵀA`, where the objective is isotropic, so each zoom keeps
/// the minimizer inside the next box. `None` if `AᵀA` is singular.
pub fn exact2_scan(s: &BallSamples, order: usize) -> Option<f64> {
    let a = legendre_design(s, order);
    let (n, m) = (a.nrows(), a.ncols());
    let f = &s.values;
    let fnorm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
    if m == 0 {
        return Some((s.weight * fnorm * fnorm).sqrt());
    }
    let chol = (a.transpose() * &a).cholesky()?;
    let q = &a * chol.l().transpose().try_inverse()?;
    let objective = |z: &[f64]| -> f64 {
        (0..n)
            .map(|i| {
                let r = f[i] - (0..m).map(|k| q[(i, k)] * z[k]).sum::<f64>();
                r * r
            })
            .sum()
    };
    // in whitened coordinates the minimizer satisfies |z| ≤ |f|
    let mut center = vec![0.0; m];
    let mut half = fnorm * 1.01 + 1e-300;
    let steps = 10i64;
    let mut best = objective(&center);
    let mut z = vec![0.0; m];
    while half > 1e-13 * (fnorm + 1e-300) {
        let mut best_z = center.clone();
        for offs in (0..m).map(|_| -steps..=steps).multi_cartesian_product() {
            for k in 0..m {
                z[k] = center[k] + half * offs[k] as f64 / steps as f64;
            }
            let v = objective(&z);
            if v < best {
                best = v;
                best_z.copy_from_slice(&z);
            }
        }
        center = best_z;
        half *= 0.3;
    }
    Some((s.weight * best).sqrt())
}

/// `min_c max_i |f_i - (Ac)_i|` as the largest single-subset value
/// `|λ·f_S| / |λ|_1` over subsets `S` of at most `m + 1` samples whose rows
/// have a one-dimensional left null space spanned by `λ`.
pub fn minimax_enumeration(s: &BallSamples, order: usize) -> f64 {
    let a = legendre_design(s, order);
    let (n, m) = (a.nrows(), a.ncols());
    let mut best = 0.0f64;
    for k in 1..=(m + 1).min(n) {
        for subset in (0..n).combinations(k) {
            let cols = m.max(k);
            let mut sub = DMatrix::<f64>::zeros(k, cols);
            for (r, &i) in subset.iter().enumerate() {
                for c in 0..m {
                    sub[(r, c)] = a[(i, c)];
                }
            }
            let svd = sub.clone().svd(true, false);
            let u = svd.u.expect("left singular vectors requested");
            let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
            let tol = 1e-10 * smax.max(1.0);
            let null: Vec<usize> = (0..k).filter(|j| svd.singular_values[*j] <= tol).collect();
            if null.len() != 1 {
                continue;
            }
            let lambda = u.column(null[0]);
            let num: f64 = subset.iter().enumerate().map(|(r, &i)| lambda[r] * s.values[i]).sum();
            let den: f64 = lambda.iter().map(|x| x.abs()).sum();
            best = best.max(num.abs() / den);
        }
    }
    best
}

/// `min_c w Σ |f_i - (Ac)_i|` over interpolants of `m`-subsets with a
/// nonsingular design (a vertex of the L1 linear program).
pub fn l1_enumeration(s: &BallSamples, order: usize) -> Option<f64> {
    let a = legendre_design(s, order);
    let (n, m) = (a.nrows(), a.ncols());
    if m == 0 {
        return Some(s.weight * s.values.iter().map(|v| v.abs()).sum::<f64>());
    }
    let f = DVector::from_column_slice(&s.values);
    let mut best: Option<f64> = None;
    for subset in (0..n).combinations(m) {
        let sub = DMatrix::from_fn(m, m, |r, c| a[(subset[r], c)]);
        let rhs = DVector::from_iterator(m, subset.iter().map(|i| s.values[*i]));
        let Some(c) = sub.lu().solve(&rhs) else { continue };
        if !c.iter().all(|v| v.is_finite()) {
            continue;
        }
        let val = s.weight * (&f - &a * c).iter().map(|r| r.abs()).sum::<f64>();
        best = Some(best.map_or(val, |b: f64| b.min(val)));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoxRegion, DomainSpec};
    use crate::gridfn::{GridSpec, TestFunctionSpec};

    fn samples(f: &TestFunctionSpec, t: f64) -> BallSamples {
        let dom = DomainSpec::full_space(BoxRegion::new(vec![-1.0], vec![1.0]).unwrap());
        let grid = GridSpec::nodes(&dom.window, 0.25).unwrap();
        BallSamples::collect(&f.sample(&grid, &dom), &[0.0], t).unwrap()
    }

    #[test]
    fn legendre_recurrence() {
        assert!((legendre(2, 0.5) - (-0.125)).abs() < 1e-15);
        assert!((legendre(3, 0.5) - (-0.4375)).abs() < 1e-15);
    }

    #[test]
    fn oracles_on_a_line() {
        // f(y) = y on {-0.75, …, 0.75}, t = 1: best constant 0
        let s = samples(&TestFunctionSpec::polynomial_1d("y", &[0.0, 1.0]), 1.0);
        assert!((minimax_enumeration(&s, 1) - 0.75).abs() < 1e-12);
        let l2 = (0.25 * s.values.iter().map(|v| v * v).sum::<f64>()).sqrt();
        assert!((exact2_scan(&s, 1).unwrap() - l2).abs() < 1e-9);
        let l1 = 0.25 * s.values.iter().map(|v| v.abs()).sum::<f64>();
        assert!((l1_enumeration(&s, 1).unwrap() - l1).abs() < 1e-12);
        assert!(minimax_enumeration(&s, 2) < 1e-12);
    }
}
