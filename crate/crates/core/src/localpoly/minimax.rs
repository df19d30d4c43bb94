//! Discrete Chebyshev (minimax) fitting by a revised simplex on the dual
//! linear program, with columns priced over all samples.
//!
//! The primal `min z s.t. |f_i - φ_i·c| ≤ z` has the dual
//! `max Σ f_i (a_i - b_i)` subject to `Σ (a_i + b_i) = 1`,
//! `Σ (a_i - b_i) φ_i = 0`, `a, b ≥ 0`. The dual has `m + 1` rows, so a basis
//! is a reference of at most `m + 1` samples; the simplex prices
//! `y = (z, c) = c_B B^{-1}` and the entering column is a sample with
//! `|f_i - φ_i·c| > z`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const OPT_TOL: f64 = 1e-13;

/// A dual column: an artificial unit vector or sample `i` with sign `σ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Col {
    Artificial(usize),
    Sample(usize, bool),
}

impl Col {
    fn vector(self, phi: &[f64], cols: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        match self {
            Col::Artificial(r) => out[r] = 1.0,
            Col::Sample(i, neg) => {
                let sg = if neg { -1.0 } else { 1.0 };
                out[0] = 1.0;
                for k in 0..cols {
                    out[k + 1] = sg * phi[i * cols + k];
                }
            }
        }
    }
}

/// Best uniform approximation of `f` by combinations of the columns of
/// `phi` (row-major, `f.len()` rows of `cols` entries). Returns the min-max
/// residual and the coefficients.
pub fn chebyshev_fit(phi: &[f64], cols: usize, f: &[f64]) -> Result<(f64, Vec<f64>)> {
    chebyshev_fit_seeded(phi, cols, f, None)
}

/// As [`chebyshev_fit`]; pricing starts on the samples with the largest
/// `|hint|` (typically least-squares residuals) and widens to all samples
/// only to confirm optimality or to add violators.
pub fn chebyshev_fit_seeded(phi: &[f64], cols: usize, f: &[f64], hint: Option<&[f64]>) -> Result<(f64, Vec<f64>)> {
    let n = f.len();
    if n == 0 {
        return Err(Error::DegenerateBall);
    }
    debug_assert_eq!(phi.len(), n * cols);
    let scale = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok((0.0, vec![0.0; cols]));
    }
    if cols == 0 {
        return Ok((scale, Vec::new()));
    }
    let fs: Vec<f64> = f.iter().map(|v| v / scale).collect();
    let rows = cols + 1;
    let batch = 4 * rows;
    let mut working: Vec<usize> = match hint {
        Some(r) if n > 2 * batch => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|a, b| r[*a].total_cmp(&r[*b]).then(a.cmp(b)));
            let mut w: Vec<usize> = order[..batch].iter().chain(&order[n - batch..]).copied().collect();
            w.sort_unstable();
            w
        }
        _ => (0..n).collect(),
    };
    let mut in_set = vec![false; n];
    working.iter().for_each(|i| in_set[*i] = true);
    let all: Vec<usize> = (0..n).collect();
    let mut basis: Vec<Col> = (0..rows).map(Col::Artificial).collect();
    let mut y = vec![0.0; rows];
    // phase 1 drives the artificials to zero, phase 2 maximizes Σ f_i (a_i - b_i)
    for phase in [1, 2] {
        let cost = |c: Col| match c {
            Col::Artificial(_) => {
                if phase == 1 {
                    -1.0
                } else {
                    0.0
                }
            }
            Col::Sample(i, neg) if phase == 2 => {
                if neg {
                    -fs[i]
                } else {
                    fs[i]
                }
            }
            Col::Sample(..) => 0.0,
        };
        let mut iter = 0usize;
        loop {
            iter += 1;
            if iter > 20_000 {
                return Err(Error::invalid("minimax simplex iteration limit reached"));
            }
            let binv = basis_inverse(&basis, phi, cols)?;
            let cb = DVector::from_iterator(rows, basis.iter().map(|c| cost(*c)));
            let yv = binv.transpose() * cb;
            y.copy_from_slice(yv.as_slice());
            let bland = iter > 50 * rows;
            let mut entering = price(phi, cols, &fs, &y, phase == 2, &basis, bland, &working, 1);
            if entering.is_empty() && working.len() < n {
                entering = price(phi, cols, &fs, &y, phase == 2, &basis, bland, &all, batch);
                for c in &entering {
                    if let Col::Sample(i, _) = c {
                        if !in_set[*i] {
                            in_set[*i] = true;
                            working.push(*i);
                        }
                    }
                }
            }
            let Some(&col) = entering.first() else { break };
            let mut a = vec![0.0; rows];
            col.vector(phi, cols, &mut a);
            let d = &binv * DVector::from_column_slice(&a);
            let xb = binv.column(0).clone_owned();
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..rows {
                let zero_artificial = phase == 2 && matches!(basis[r], Col::Artificial(_));
                let ok = d[r] > PIVOT_EPS || (zero_artificial && d[r].abs() > PIVOT_EPS);
                if !ok {
                    continue;
                }
                let ratio = if zero_artificial { 0.0 } else { (xb[r] / d[r]).max(0.0) };
                leave = match leave {
                    Some((lr, lv)) if !(ratio < lv - 1e-15 || (ratio <= lv + 1e-15 && basis[r] < basis[lr])) => Some((lr, lv)),
                    _ => Some((r, ratio)),
                };
            }
            let Some((r, _)) = leave else { return Err(Error::invalid("minimax dual unbounded")) };
            basis[r] = col;
        }
        if phase == 1 {
            let binv = basis_inverse(&basis, phi, cols)?;
            let infeas: f64 =
                (0..rows).filter(|r| matches!(basis[*r], Col::Artificial(_))).map(|r| binv[(r, 0)]).sum();
            if infeas > 1e-9 {
                return Err(Error::invalid("minimax dual infeasible"));
            }
        }
    }
    let c = &y[1..];
    let worst = (0..n)
        .map(|i| (fs[i] - (0..cols).map(|k| phi[i * cols + k] * c[k]).sum::<f64>()).abs())
        .fold(0.0, f64::max);
    Ok((worst * scale, c.iter().map(|v| v * scale).collect()))
}

fn basis_inverse(basis: &[Col], phi: &[f64], cols: usize) -> Result<DMatrix<f64>> {
    let rows = basis.len();
    let mut b = DMatrix::<f64>::zeros(rows, rows);
    let mut a = vec![0.0; rows];
    for (j, c) in basis.iter().enumerate() {
        c.vector(phi, cols, &mut a);
        for r in 0..rows {
            b[(r, j)] = a[r];
        }
    }
    b.try_inverse().ok_or_else(|| Error::invalid("singular minimax basis"))
}

/// Up to `keep` improving columns among the samples `over`, best first
/// (Dantzig), or the first improving one under Bland's rule.
#[allow(clippy::too_many_arguments)]
fn price(
    phi: &[f64],
    cols: usize,
    f: &[f64],
    y: &[f64],
    phase2: bool,
    basis: &[Col],
    bland: bool,
    over: &[usize],
    keep: usize,
) -> Vec<Col> {
    let mut found: Vec<(Col, f64)> = Vec::new();
    for &i in over {
        let g: f64 = (0..cols).map(|k| phi[i * cols + k] * y[k + 1]).sum();
        let base = if phase2 { f[i] - g } else { -g };
        for neg in [false, true] {
            let rc = if neg { -base } else { base } - y[0];
            if rc <= OPT_TOL {
                continue;
            }
            let col = Col::Sample(i, neg);
            if basis.contains(&col) {
                continue;
            }
            if bland {
                return vec![col];
            }
            found.push((col, rc));
        }
    }
    found.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    found.truncate(keep);
    found.into_iter().map(|(c, _)| c).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn best_constant_is_midrange() {
        let f = [1.0, 4.0, 2.0, -2.0];
        let phi = [1.0; 4];
        let (v, c) = chebyshev_fit(&phi, 1, &f).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
        assert!((c[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn line_through_parabola() {
        // best line to y^2 on {-1, -0.5, 0, 0.5, 1} has error 1/2 (equioscillation at -1, 0, 1)
        let xs = [-1.0, -0.5, 0.0, 0.5, 1.0];
        let phi: Vec<f64> = xs.iter().flat_map(|x| [1.0, *x]).collect();
        let f: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let (v, c) = chebyshev_fit(&phi, 2, &f).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        assert!((c[0] - 0.5).abs() < 1e-12 && c[1].abs() < 1e-12);
    }

    #[test]
    fn exact_fit_gives_zero() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 / 7.0).collect();
        let phi: Vec<f64> = xs.iter().flat_map(|x| [1.0, *x]).collect();
        let f: Vec<f64> = xs.iter().map(|x| 3.0 * x + 1.0).collect();
        let (v, _) = chebyshev_fit(&phi, 2, &f).unwrap();
        assert!(v < 1e-12);
    }
}
