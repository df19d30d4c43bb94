//! Littlewood-Paley reference norms on the full space.
//!
//! Frequencies are ordinary (`ξ = m / (n h)` per axis, Nyquist `1/(2h)`).
//! The window is treated as one period of a periodic function; the corpus
//! decays or vanishes at the window edge and the residual boundary size is
//! reported.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::gridfn::{GridFunction, GridSpec};
use crate::morrey::{cube_levels, default_radii, morrey_ball_norm, morrey_cube_norm};
use crate::params::{validate, Flavor, SpaceFamily, SpaceParams};
use crate::spacenorms::{CubeAccumulator, Level, NormEntry, ScaleBreakdown};

/// Profile identifier recorded in reports.
pub const PSI_PROFILE: &str = "exp-transition on 1 < |xi| < 3/2";

fn g(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Radial bump: 1 on `r ≤ 1`, 0 on `r ≥ 3/2`, smooth transition between.
pub fn psi(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 1.5 {
        0.0
    } else {
        let a = g(1.5 - r);
        a / (a + g(r - 1.0))
    }
}

/// `φ_0 = ψ`, `φ_k(ξ) = ψ(2^{-k} ξ) - ψ(2^{-k+1} ξ)`.
pub fn phi(k: u32, r: f64) -> f64 {
    if k == 0 {
        psi(r)
    } else {
        psi(r / (k as f64).exp2()) - psi(r / ((k - 1) as f64).exp2())
    }
}

/// Largest `k` with `3 · 2^{k-1} ≤ 1/(2h)`.
pub fn max_level(spacing: f64) -> u32 {
    let nyquist = 0.5 / spacing;
    let mut k = 0u32;
    while 3.0 * (k as f64).exp2() <= nyquist {
        k += 1;
    }
    k
}

/// `|ξ|` at every frequency-grid node, in the FFT layout of `grid`.
fn frequency_radii(grid: &GridSpec) -> Vec<f64> {
    let axes: Vec<Vec<f64>> = grid
        .shape
        .iter()
        .map(|&n| {
            (0..n)
                .map(|m| {
                    let m = if m < n.div_ceil(2) { m as f64 } else { m as f64 - n as f64 };
                    m / (n as f64 * grid.spacing)
                })
                .collect()
        })
        .collect();
    (0..grid.len())
        .map(|i| {
            let idx = grid.unravel(i);
            idx.iter().enumerate().map(|(a, k)| axes[a][*k as usize].powi(2)).sum::<f64>().sqrt()
        })
        .collect()
}

/// Samples of `φ_0, …, φ_{k_max}` on the frequency grid of a spatial grid.
#[derive(Clone, Debug)]
pub struct DyadicDecomposition {
    pub k_max: u32,
    pub grid: GridSpec,
    pub radii: Vec<f64>,
    pub phis: Vec<Vec<f64>>,
}

/// Builds the decomposition for `grid`; needs `3 · 2^{k_max - 1}` at or below
/// the Nyquist frequency.
pub fn build_decomposition(grid: &GridSpec, k_max: u32) -> Result<DyadicDecomposition> {
    let nyquist = 0.5 / grid.spacing;
    if k_max < 1 || 3.0 * ((k_max - 1) as f64).exp2() > nyquist {
        return Err(Error::NyquistTooLow { nyquist, k_max });
    }
    let radii = frequency_radii(grid);
    let phis = (0..=k_max).map(|k| radii.iter().map(|r| phi(k, *r)).collect()).collect();
    Ok(DyadicDecomposition { k_max, grid: grid.clone(), radii, phis })
}

fn fft_nd(data: &mut [Complex<f64>], shape: &[usize], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let d = shape.len();
    let total: usize = shape.iter().product();
    let mut stride = 1;
    for axis in (0..d).rev() {
        let n = shape[axis];
        let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let mut line = vec![Complex::new(0.0, 0.0); n];
        let block = n * stride;
        for start in (0..total).step_by(block) {
            for off in 0..stride {
                for k in 0..n {
                    line[k] = data[start + off + k * stride];
                }
                fft.process(&mut line);
                for k in 0..n {
                    data[start + off + k * stride] = line[k];
                }
            }
        }
        stride *= n;
    }
    if inverse {
        let scale = 1.0 / total as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

/// `F^{-1}[φ_k F f]` for `k = 0..=k_max` with diagnostics.
#[derive(Clone, Debug)]
pub struct Pieces {
    pub pieces: Vec<GridFunction>,
    /// `max |f|` on the outermost grid layer relative to `max |f|`.
    pub boundary_mass: f64,
    /// Largest imaginary part of any piece relative to `max |f|`.
    pub imaginary_residue: f64,
    pub flags: Vec<String>,
}

pub fn lp_pieces(f: &GridFunction, dec: &DyadicDecomposition) -> Result<Pieces> {
    let grid = f.grid();
    if grid != &dec.grid {
        return Err(Error::invalid("decomposition was built for a different grid"));
    }
    let vals = f.values_or(0.0);
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut spectrum: Vec<Complex<f64>> = vals.iter().map(|v| Complex::new(*v, 0.0)).collect();
    fft_nd(&mut spectrum, &grid.shape, false);
    let mut pieces = Vec::with_capacity(dec.phis.len());
    let mut imag = 0.0f64;
    for phi_k in &dec.phis {
        let mut buf: Vec<Complex<f64>> = spectrum.iter().zip(phi_k).map(|(s, p)| s * p).collect();
        fft_nd(&mut buf, &grid.shape, true);
        imag = imag.max(buf.iter().map(|c| c.im.abs()).fold(0.0, f64::max));
        let re = buf.iter().map(|c| c.re).collect();
        pieces.push(GridFunction::new(grid.clone(), re, f.mask().to_vec())?);
    }
    let boundary = (0..grid.len())
        .filter(|i| grid.unravel(*i).iter().zip(&grid.shape).any(|(k, n)| *k == 0 || *k as usize == n - 1))
        .map(|i| vals[i].abs())
        .fold(0.0, f64::max);
    let rel = |x: f64| if scale > 0.0 { x / scale } else { 0.0 };
    let mut flags = Vec::new();
    if rel(boundary) > 1e-8 {
        flags.push(format!("boundary mass {:.3e} exceeds 1e-8; periodization may leak", rel(boundary)));
    }
    if rel(imag) > 1e-10 {
        flags.push(format!("imaginary residue {:.3e} exceeds 1e-10", rel(imag)));
    }
    Ok(Pieces { pieces, boundary_mass: rel(boundary), imaginary_residue: rel(imag), flags })
}

/// Littlewood-Paley quasi-norm of `f` with the largest level the grid
/// resolves.
pub fn lp_norm(f: &GridFunction, sp: &SpaceParams, dom: &DomainSpec) -> Result<NormEntry> {
    lp_norm_with(f, sp, dom, true)
}

/// As [`lp_norm`]; with `truncate = false` the Besov-type inner sum runs over
/// every `k` instead of `k ≥ max{j_P, 0}`.
pub fn lp_norm_with(f: &GridFunction, sp: &SpaceParams, dom: &DomainSpec, truncate: bool) -> Result<NormEntry> {
    sp.check()?;
    if !dom.is_full_space() {
        return Err(Error::invalid("the Littlewood-Paley reference is defined on the full space only"));
    }
    let grid = f.grid();
    let dec = build_decomposition(grid, max_level(grid.spacing))?;
    let pieces = lp_pieces(f, &dec)?;
    let mut flags = validate(sp, dom, Flavor::Lp).violations();
    flags.extend(pieces.flags.iter().cloned());
    flags.push(format!("psi profile: {PSI_PROFILE}; k_max = {}", dec.k_max));
    let mp = sp.morrey()?;
    let mut levels = Vec::new();
    let total = match sp.family {
        SpaceFamily::BesovMorrey { .. } => {
            let radii = default_radii(grid.spacing, dom.window.diameter());
            for (k, piece) in pieces.pieces.iter().enumerate() {
                let a = morrey_ball_norm(piece, &mp, &radii)?;
                levels.push(Level { j: k as i32, t: (-(k as f64)).exp2(), a_j: a });
            }
            ScaleBreakdown::aggregate_of(&levels, sp.s, sp.q)
        }
        SpaceFamily::BesovType { .. } => {
            let (j_min, j_max) = cube_levels(&dom.window, grid.spacing);
            let mut acc = CubeAccumulator::new(mp, sp.q, j_min, j_max);
            for (k, piece) in pieces.pieces.iter().enumerate() {
                let a = morrey_cube_norm(piece, &mp, j_min, j_max)?;
                levels.push(Level { j: k as i32, t: (-(k as f64)).exp2(), a_j: a });
                // k ≥ max{j_P, 0} ⇔ j_P ≤ k
                let to = if truncate { k as i32 } else { i32::MAX };
                acc.add_levels(piece, (k as f64 * sp.s).exp2(), i32::MIN, to);
            }
            acc.finish()
        }
    };
    Ok(NormEntry { params: sp.clone(), flavor: Flavor::Lp, main_term: 0.0, seminorm: total, total, levels, flags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoxRegion;
    use crate::gridfn::TestFunctionSpec;

    #[test]
    fn partition_of_unity_and_supports() {
        for i in 0..4000 {
            let r = i as f64 * 0.01;
            let total: f64 = (0..=8).map(|k| phi(k, r)).sum();
            if r <= 128.0 {
                assert!((total - 1.0).abs() < 1e-12, "{r}");
            }
            for k in 1..=8u32 {
                let lo = ((k - 1) as f64).exp2();
                if r < lo || r > 3.0 * lo {
                    assert!(phi(k, r).abs() < 1e-12);
                }
            }
        }
        assert_eq!(phi(0, 0.0), 1.0);
        assert_eq!(phi(3, 0.0), 0.0);
    }

    #[test]
    fn nyquist_guard() {
        let grid = GridSpec::cells(&BoxRegion::new(vec![-8.0], vec![8.0]).unwrap(), 4096).unwrap();
        let k = max_level(grid.spacing);
        assert_eq!(k, 6);
        assert!(build_decomposition(&grid, k).is_ok());
        assert!(matches!(build_decomposition(&grid, k + 1), Err(Error::NyquistTooLow { .. })));
    }

    #[test]
    fn gaussian_reconstruction() {
        let dom = DomainSpec::full_space(BoxRegion::new(vec![-8.0], vec![8.0]).unwrap());
        let grid = GridSpec::cells(&dom.window, 4096).unwrap();
        let f = TestFunctionSpec::gaussian(vec![0.0], 1.0).sample(&grid, &dom);
        let dec = build_decomposition(&grid, max_level(grid.spacing)).unwrap();
        let p = lp_pieces(&f, &dec).unwrap();
        let worst = (0..grid.len())
            .map(|i| (p.pieces.iter().map(|g| g.get(i).unwrap()).sum::<f64>() - f.get(i).unwrap()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
        assert!(p.imaginary_residue < 1e-10);
    }

    #[test]
    fn band_limited_pieces_vanish() {
        let dom = DomainSpec::full_space(BoxRegion::new(vec![-8.0], vec![8.0]).unwrap());
        let grid = GridSpec::cells(&dom.window, 1024).unwrap();
        let f = TestFunctionSpec::band_limited(0.5).sample(&grid, &dom);
        let dec = build_decomposition(&grid, max_level(grid.spacing)).unwrap();
        let p = lp_pieces(&f, &dec).unwrap();
        for piece in &p.pieces[2..] {
            assert!(piece.max_abs() < 1e-10);
        }
    }
}
