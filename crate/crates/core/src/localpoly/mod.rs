//! Polynomials of degree below `N`, the local orthonormal projection onto
//! them, and the local `v`-oscillation
//! `osc^{N-1}_{v,Ω} f(x,t) = inf_π (t^{-d} ∫_{B(x,t)∩Ω} |f - π|^v)^{1/v}`.
//!
//! Polynomials are written in the scaled, shifted monomials `((y - x)/t)^α`
//! so the Gram matrix conditioning does not depend on `t`.

pub mod minimax;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LatticeBall;
use crate::gridfn::{Field, GridFunction};

/// Relative Gram eigenvalue threshold below which directions are dropped.
pub const RANK_TOL: f64 = 1e-10;

/// `P_{N-1}` on `R^d`: multi-indices with `|α| ≤ N - 1`, graded order.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySpace {
    pub dim: usize,
    pub order: usize,
    exponents: Vec<Vec<u32>>,
}

impl PolySpace {
    /// Polynomials of degree `< order` in `dim` variables.
    pub fn new(dim: usize, order: usize) -> Self {
        let mut exponents = Vec::new();
        for deg in 0..order as u32 {
            let mut alpha = vec![0u32; dim];
            push_degree(&mut exponents, &mut alpha, 0, deg);
        }
        PolySpace { dim, order, exponents }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    /// Monomial values at the scaled point `u`.
    pub fn eval_monomials(&self, u: &[f64], out: &mut [f64]) {
        for (o, a) in out.iter_mut().zip(&self.exponents) {
            *o = a.iter().zip(u).map(|(e, v)| v.powi(*e as i32)).product();
        }
    }
}

fn push_degree(out: &mut Vec<Vec<u32>>, alpha: &mut [u32], axis: usize, left: u32) {
    if axis + 1 == alpha.len() {
        alpha[axis] = left;
        out.push(alpha.to_vec());
        alpha[axis] = 0;
        return;
    }
    for k in (0..=left).rev() {
        alpha[axis] = k;
        push_degree(out, alpha, axis + 1, left - k);
    }
    alpha[axis] = 0;
}

/// Samples of `f` on `B(x, t) ∩ Ω` in scaled coordinates `u = (y - x)/t`.
#[derive(Clone, Debug)]
pub struct BallSamples {
    pub dim: usize,
    /// Scaled coordinates, `dim` entries per sample.
    pub scaled: Vec<f64>,
    pub values: Vec<f64>,
    pub flat: Vec<usize>,
    /// Quadrature weight `h^d / t^d` of one sample.
    pub weight: f64,
}

impl BallSamples {
    /// Unmasked nodes within distance `< t` of an arbitrary point `x`.
    pub fn collect(f: &GridFunction, x: &[f64], t: f64) -> Result<Self> {
        let grid = f.grid();
        if x.len() != grid.dim() {
            return Err(Error::DimensionMismatch { expected: grid.dim(), got: x.len() });
        }
        let dom = crate::geometry::DomainSpec::full_space(grid.node_box());
        let pts = crate::geometry::ball_domain_samples(&dom, x, t, grid)?;
        let mut s = BallSamples::empty(grid.dim(), grid.cell_volume() / t.powi(grid.dim() as i32));
        for i in pts {
            if let Some(v) = f.get(i) {
                s.scaled.extend(grid.point(i).iter().zip(x).map(|(y, c)| (y - c) / t));
                s.values.push(v);
                s.flat.push(i);
            }
        }
        Ok(s)
    }

    /// Unmasked nodes `center + o` for the offsets of a lattice ball of
    /// radius `t / h`.
    pub fn collect_lattice(f: &GridFunction, center: usize, ball: &LatticeBall, t: f64) -> Self {
        let grid = f.grid();
        let h = grid.spacing;
        let c = grid.unravel(center);
        let mut s = BallSamples::empty(grid.dim(), grid.cell_volume() / t.powi(grid.dim() as i32));
        let mut idx = vec![0i64; c.len()];
        for o in ball.iter() {
            for i in 0..c.len() {
                idx[i] = c[i] + o[i];
            }
            if let Some(fl) = grid.flat(&idx) {
                if let Some(v) = f.get(fl) {
                    s.scaled.extend(o.iter().map(|k| *k as f64 * h / t));
                    s.values.push(v);
                    s.flat.push(fl);
                }
            }
        }
        s
    }

    fn empty(dim: usize, weight: f64) -> Self {
        BallSamples { dim, scaled: Vec::new(), values: Vec::new(), flat: Vec::new(), weight }
    }

    /// Scaled coordinates of sample `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.scaled[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.scaled.chunks_exact(self.dim)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `Π^{N-1}_{x,t} f = Σ_i ⟨f, p_i⟩ p_i` for the discrete inner product
/// `⟨f, g⟩ = t^{-d} Σ f g h^d` over the ball samples.
#[derive(Clone, Debug)]
pub struct LocalProjection {
    pub center: Vec<f64>,
    pub radius: f64,
    pub space: PolySpace,
    /// Monomial coefficients of the orthonormal basis, one column per `p_i`.
    pub basis: DMatrix<f64>,
    /// `⟨f, p_i⟩`.
    pub coefficients: Vec<f64>,
    pub rank: usize,
    /// Ratio of the largest to the smallest retained Gram eigenvalue.
    pub condition: f64,
    /// Values of `f - Π f` at the samples.
    pub residual: Vec<f64>,
}

impl LocalProjection {
    /// `Π f` in the scaled monomial basis.
    pub fn monomial_coefficients(&self) -> Vec<f64> {
        let c = nalgebra::DVector::from_column_slice(&self.coefficients);
        (&self.basis * c).iter().copied().collect()
    }

    /// `Π f (y)`.
    pub fn eval(&self, y: &[f64]) -> f64 {
        let u: Vec<f64> = y.iter().zip(&self.center).map(|(a, c)| (a - c) / self.radius).collect();
        let mut m = vec![0.0; self.space.len()];
        self.space.eval_monomials(&u, &mut m);
        self.monomial_coefficients().iter().zip(&m).map(|(a, b)| a * b).sum()
    }

    /// Values of the orthonormal basis functions at the scaled point `u`.
    pub fn basis_values(&self, u: &[f64]) -> Vec<f64> {
        let mut m = vec![0.0; self.space.len()];
        self.space.eval_monomials(u, &mut m);
        let mv = nalgebra::DVector::from_column_slice(&m);
        (self.basis.transpose() * mv).iter().copied().collect()
    }
}

/// Orthonormal projection of the samples onto `space`.
pub fn project_samples(s: &BallSamples, space: &PolySpace, center: &[f64], radius: f64) -> Result<LocalProjection> {
    let n = s.len();
    if n == 0 {
        return Err(Error::DegenerateBall);
    }
    let m = space.len();
    let mut phi = DMatrix::<f64>::zeros(n, m);
    let mut row = vec![0.0; m];
    for (i, u) in s.points().enumerate() {
        space.eval_monomials(u, &mut row);
        for k in 0..m {
            phi[(i, k)] = row[k];
        }
    }
    let gram = (phi.transpose() * &phi) * s.weight;
    let eig = SymmetricEigen::new(gram);
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..m).filter(|k| eig.eigenvalues[*k] > RANK_TOL * lmax).collect();
    let rank = keep.len();
    let mut basis = DMatrix::<f64>::zeros(m, rank);
    let mut lmin = f64::INFINITY;
    for (c, &k) in keep.iter().enumerate() {
        let l = eig.eigenvalues[k];
        lmin = lmin.min(l);
        let col = eig.eigenvectors.column(k) / l.sqrt();
        basis.set_column(c, &col);
    }
    let pb = &phi * &basis;
    let fv = nalgebra::DVector::from_column_slice(&s.values);
    let coeff = (pb.transpose() * &fv) * s.weight;
    let fitted = &pb * &coeff;
    let residual = s.values.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    Ok(LocalProjection {
        center: center.to_vec(),
        radius,
        space: space.clone(),
        basis,
        coefficients: coeff.iter().copied().collect(),
        rank,
        condition: if rank > 0 { lmax / lmin } else { f64::INFINITY },
        residual,
    })
}

fn check_radius(f: &GridFunction, t: f64) -> Result<()> {
    if !(t >= 2.0 * f.grid().spacing) {
        return Err(Error::invalid(format!("radius {t} is below twice the grid spacing")));
    }
    Ok(())
}

/// `Π^{N-1}_{x,t} f` over the unmasked samples of `B(x, t)`.
pub fn project(f: &GridFunction, x: &[f64], t: f64, n: usize) -> Result<LocalProjection> {
    check_radius(f, t)?;
    let s = BallSamples::collect(f, x, t)?;
    project_samples(&s, &PolySpace::new(f.grid().dim(), n), x, t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OscMode {
    /// Exact least-squares infimum; `v = 2` only.
    Exact2,
    /// Exact discrete Chebyshev infimum; `v = ∞` only.
    Minimax,
    /// `v`-mean of the projection residual, an upper bound within the
    /// quasi-optimality constant.
    ProjectionSurrogate,
}

impl OscMode {
    /// Exact mode where one exists.
    pub fn for_v(v: f64) -> Self {
        if v == 2.0 {
            OscMode::Exact2
        } else if v.is_infinite() {
            OscMode::Minimax
        } else {
            OscMode::ProjectionSurrogate
        }
    }

    fn check(self, v: f64) -> Result<()> {
        match self {
            OscMode::Exact2 if v != 2.0 => Err(Error::ModeMismatch { mode: "exact2", v }),
            OscMode::Minimax if !v.is_infinite() => Err(Error::ModeMismatch { mode: "minimax", v }),
            _ if !(v > 0.0) => Err(Error::invalid("exponent v must be positive")),
            _ => Ok(()),
        }
    }
}

/// Oscillation of the given samples. Fewer samples than `dim P_{N-1}` give 0.
pub fn oscillation_of_samples(s: &BallSamples, space: &PolySpace, v: f64, mode: OscMode) -> Result<f64> {
    mode.check(v)?;
    if s.is_empty() {
        return Err(Error::DegenerateBall);
    }
    if s.len() < space.len() {
        return Ok(0.0);
    }
    let origin = vec![0.0; space.dim];
    let proj = project_samples(s, space, &origin, 1.0)?;
    match mode {
        OscMode::Exact2 => Ok((s.weight * proj.residual.iter().map(|r| r * r).sum::<f64>()).sqrt()),
        OscMode::ProjectionSurrogate => Ok(v_mean(&proj.residual, s.weight, v)),
        OscMode::Minimax => {
            // fit in the orthonormal basis, which spans the realized space
            let m = space.len();
            let mut mono = DMatrix::<f64>::zeros(m, s.len());
            let mut row = vec![0.0; m];
            for (i, u) in s.points().enumerate() {
                space.eval_monomials(u, &mut row);
                mono.column_mut(i).copy_from_slice(&row);
            }
            // column i of B^T M holds the orthonormal basis at sample i
            let phi = proj.basis.transpose() * mono;
            Ok(minimax::chebyshev_fit_seeded(phi.as_slice(), proj.rank, &s.values, Some(&proj.residual))?.0)
        }
    }
}

/// `(w Σ |r|^v)^{1/v}`, or `max |r|` for `v = ∞`.
pub fn v_mean(r: &[f64], weight: f64, v: f64) -> f64 {
    if v.is_infinite() {
        r.iter().map(|x| x.abs()).fold(0.0, f64::max)
    } else {
        (weight * r.iter().map(|x| x.abs().powf(v)).sum::<f64>()).powf(1.0 / v)
    }
}

/// `osc^{N-1}_{v,Ω} f(x, t)` computed in the given mode.
pub fn oscillation(f: &GridFunction, x: &[f64], t: f64, v: f64, n: usize, mode: OscMode) -> Result<f64> {
    check_radius(f, t)?;
    let s = BallSamples::collect(f, x, t)?;
    oscillation_of_samples(&s, &PolySpace::new(f.grid().dim(), n), v, mode)
}

/// Oscillation at every unmasked node, in the exact mode where available.
pub fn osc_field(f: &GridFunction, t: f64, v: f64, n: usize) -> Result<Field> {
    osc_field_on(f, f.mask(), t, v, n, OscMode::for_v(v))
}

/// Oscillation at the nodes of `centers ∧ mask`; the output mask is that
/// set.
pub fn osc_field_on(f: &GridFunction, centers: &[bool], t: f64, v: f64, n: usize, mode: OscMode) -> Result<Field> {
    check_radius(f, t)?;
    mode.check(v)?;
    let grid = f.grid();
    let space = PolySpace::new(grid.dim(), n);
    let ball = LatticeBall::new(grid.dim(), t / grid.spacing);
    let eval: Vec<bool> = centers.iter().zip(f.mask()).map(|(a, b)| *a && *b).collect();
    let idx: Vec<usize> = (0..grid.len()).filter(|i| eval[*i]).collect();
    let out: Vec<(f64, u8)> = idx
        .par_iter()
        .map(|&c| {
            let s = BallSamples::collect_lattice(f, c, &ball, t);
            if s.is_empty() {
                return Ok((0.0, 2));
            }
            let flag = (s.len() < space.len()) as u8;
            Ok((oscillation_of_samples(&s, &space, v, mode)?, flag))
        })
        .collect::<Result<_>>()?;
    let mut values = vec![0.0; grid.len()];
    let (mut sparse, mut empty) = (0, 0);
    for (i, (val, flag)) in idx.iter().zip(out) {
        values[*i] = val;
        match flag {
            1 => sparse += 1,
            2 => empty += 1,
            _ => {}
        }
    }
    Ok(Field { values: GridFunction::from_parts_unchecked(grid.clone(), values, eval), sparse, empty })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoxRegion, DomainSpec};
    use crate::gridfn::GridSpec;

    fn line_fn(lo: f64, hi: f64, h: f64, f: impl Fn(f64) -> f64) -> GridFunction {
        let w = BoxRegion::new(vec![lo], vec![hi]).unwrap();
        let grid = GridSpec::cells_with_spacing(&w, h).unwrap();
        GridFunction::from_fn(&grid, &DomainSpec::full_space(w), |x| f(x[0]))
    }

    #[test]
    fn poly_space_dimension() {
        for (d, n, expect) in [(1, 1, 1), (1, 3, 3), (2, 2, 3), (2, 3, 6), (2, 4, 10), (3, 3, 10)] {
            let s = PolySpace::new(d, n);
            assert_eq!(s.len(), expect);
            let mut e = s.exponents().to_vec();
            e.dedup();
            assert_eq!(e.len(), expect);
        }
    }

    #[test]
    fn constants_and_odd_functions() {
        let g = line_fn(-2.0, 2.0, 1.0 / 64.0, |_| 5.0);
        let p = project(&g, &[1.0 / 128.0], 1.0, 3).unwrap();
        assert!((p.eval(&[0.3]) - 5.0).abs() < 1e-12);
        assert!(p.residual.iter().all(|r| r.abs() < 1e-12));

        let g = line_fn(-2.0, 2.0, 1.0 / 64.0, |x| x);
        let p = project(&g, &[0.0], 1.0, 1).unwrap();
        assert!(p.eval(&[0.0]).abs() < 1e-14);
    }

    #[test]
    fn basis_is_orthonormal() {
        let g = line_fn(-2.0, 2.0, 1.0 / 32.0, |x| x.exp());
        let p = project(&g, &[0.0], 0.5, 4).unwrap();
        let s = BallSamples::collect(&g, &[0.0], 0.5).unwrap();
        let vals: Vec<Vec<f64>> = s.points().map(|u| p.basis_values(u)).collect();
        for a in 0..p.rank {
            for b in 0..p.rank {
                let ip: f64 = vals.iter().map(|v| v[a] * v[b]).sum::<f64>() * s.weight;
                assert!((ip - if a == b { 1.0 } else { 0.0 }).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn oscillation_examples() {
        let h = 1.0 / 4096.0;
        let g = line_fn(-2.0, 2.0, h, |x| 3.0 * x + 1.0);
        for (v, mode) in [(2.0, OscMode::Exact2), (f64::INFINITY, OscMode::Minimax), (1.0, OscMode::ProjectionSurrogate)] {
            assert!(oscillation(&g, &[h / 2.0], 0.5, v, 2, mode).unwrap() < 1e-10);
        }
        let g = line_fn(-2.0, 2.0, h, |x| x);
        let sup = oscillation(&g, &[h / 2.0], 1.0, f64::INFINITY, 1, OscMode::Minimax).unwrap();
        assert!((sup - 1.0).abs() < 2.0 * h);
        let l2 = oscillation(&g, &[h / 2.0], 1.0, 2.0, 1, OscMode::Exact2).unwrap();
        assert!((l2 - (2.0f64 / 3.0).sqrt()).abs() < 1e-3);
    }

    #[test]
    fn mode_mismatch() {
        let g = line_fn(-1.0, 1.0, 0.125, |x| x);
        assert!(matches!(oscillation(&g, &[0.0625], 0.5, 1.0, 1, OscMode::Exact2), Err(Error::ModeMismatch { .. })));
        assert!(matches!(oscillation(&g, &[0.0625], 0.5, 2.0, 1, OscMode::Minimax), Err(Error::ModeMismatch { .. })));
    }

    #[test]
    fn jump_oscillation_with_constants() {
        // t^{-1} ∫_{0.75}^{1.25} |χ_{[0,1]} - c| = 4 · 1/4 for every c ∈ [0, 1]
        let h = 1.0 / 4096.0;
        let g = line_fn(-1.0, 3.0, h, |x| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 });
        let v = oscillation(&g, &[1.0 + h / 2.0], 0.25, 1.0, 1, OscMode::ProjectionSurrogate).unwrap();
        assert!((v - 1.0).abs() < 1e-3);
        let far = oscillation(&g, &[2.0 + h / 2.0], 0.25, 1.0, 1, OscMode::ProjectionSurrogate).unwrap();
        assert_eq!(far, 0.0);
    }
}
