//! Morrey norms of sampled functions: the radius-weighted ball form, the
//! `|P|^{-τ}`-weighted dyadic-cube form, and the ball-sum machinery shared
//! with the averaged main terms.
//!
//! The domain enters only through the function's mask: masked nodes
//! contribute nothing to any integral and are never used as centers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cube_count, BoxRegion, DyadicCube, DEFAULT_CUBE_CAP};
use crate::gridfn::{GridFunction, GridSpec};

/// `0 < p ≤ u < ∞`. The Besov-type weight `τ = 1/p - 1/u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorreyParams {
    pub p: f64,
    pub u: f64,
}

impl MorreyParams {
    pub fn new(p: f64, u: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() || !(u >= p) || !u.is_finite() {
            return Err(Error::invalid(format!("Morrey parameters need 0 < p <= u < inf, got p={p}, u={u}")));
        }
        Ok(MorreyParams { p, u })
    }

    /// `u = 1/(1/p - τ)` for `0 ≤ τ < 1/p`.
    pub fn from_tau(p: f64, tau: f64) -> Result<Self> {
        if !(tau >= 0.0) || !(tau < 1.0 / p) {
            return Err(Error::invalid(format!("tau must lie in [0, 1/p), got {tau}")));
        }
        MorreyParams::new(p, 1.0 / (1.0 / p - tau))
    }

    pub fn tau(&self) -> f64 {
        1.0 / self.p - 1.0 / self.u
    }

    /// Exponent of the radius weight `r^{d(1/u - 1/p)}`.
    pub fn radius_exponent(&self, d: usize) -> f64 {
        d as f64 * (1.0 / self.u - 1.0 / self.p)
    }
}

/// Dyadic radii `2^{-j}` in `[spacing, diameter]` followed by one radius
/// just above the diameter, so that the last ball swallows the window.
pub fn default_radii(spacing: f64, diameter: f64) -> Vec<f64> {
    let mut radii = Vec::new();
    let mut j = -(diameter.log2().floor() as i32);
    loop {
        let r = (-j as f64).exp2();
        if r < spacing {
            break;
        }
        if r <= diameter {
            radii.push(r);
        }
        j += 1;
    }
    radii.push(diameter + spacing);
    radii
}

/// Compensated prefix sums along the last grid axis, so that the sum over
/// any ball is a handful of row-segment differences.
pub(crate) struct BallSummer<'a> {
    grid: &'a GridSpec,
    hi: Vec<f64>,
    lo: Vec<f64>,
    maxima: Option<RowMax>,
}

impl<'a> BallSummer<'a> {
    /// `weights` must already be zero on masked nodes.
    pub fn new(grid: &'a GridSpec, weights: &[f64]) -> Self {
        let n_last = *grid.shape.last().unwrap();
        let mut hi = vec![0.0; weights.len()];
        let mut lo = vec![0.0; weights.len()];
        for row in 0..weights.len() / n_last {
            let base = row * n_last;
            let (mut s, mut c) = (0.0f64, 0.0f64);
            for k in 0..n_last {
                let x = weights[base + k];
                let t = s + x;
                c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
                s = t;
                hi[base + k] = s;
                lo[base + k] = c;
            }
        }
        BallSummer { grid, hi, lo, maxima: None }
    }

    /// Summer that additionally answers ball maxima of `weights`.
    pub fn with_maxima(grid: &'a GridSpec, weights: &[f64]) -> Self {
        let mut s = BallSummer::new(grid, weights);
        s.maxima = Some(RowMax::new(grid, weights));
        s
    }

    fn prefix(&self, flat: usize) -> (f64, f64) {
        (self.hi[flat], self.lo[flat])
    }

    /// Calls `seg(row_base, a, b)` for each row segment `[a, b]` (last-axis
    /// indices) of the open lattice ball of radius `radius` around `center`.
    fn segments(&self, center: &[i64], radius: f64, mut seg: impl FnMut(usize, usize, usize)) {
        let g = self.grid;
        let d = g.dim();
        let rc = radius / g.spacing;
        let r2 = rc * rc;
        let reach = rc.ceil() as i64;
        let n_last = g.shape[d - 1] as i64;
        let mut off = vec![-reach; d - 1];
        let ranges: Vec<(i64, i64)> = (0..d - 1)
            .map(|i| ((-reach).max(-center[i]), reach.min(g.shape[i] as i64 - 1 - center[i])))
            .collect();
        if ranges.iter().any(|(a, b)| a > b) {
            return;
        }
        for (o, r) in off.iter_mut().zip(&ranges) {
            *o = r.0;
        }
        let mut idx = vec![0i64; d];
        loop {
            let o2: i64 = off.iter().map(|v| v * v).sum();
            let rem = r2 - o2 as f64;
            if rem > 0.0 {
                // largest k with k^2 < rem
                let mut w = rem.sqrt().floor() as i64;
                while (w * w) as f64 >= rem {
                    w -= 1;
                }
                while (((w + 1) * (w + 1)) as f64) < rem {
                    w += 1;
                }
                if w >= 0 {
                    let a = (center[d - 1] - w).max(0);
                    let b = (center[d - 1] + w).min(n_last - 1);
                    if a <= b {
                        for i in 0..d - 1 {
                            idx[i] = center[i] + off[i];
                        }
                        idx[d - 1] = 0;
                        let base = g.flat(&idx).expect("row inside grid");
                        seg(base, a as usize, b as usize);
                    }
                }
            }
            if !crate::geometry::odometer_next(&mut off, &ranges) {
                break;
            }
        }
    }

    /// Sum of the weights over the open ball `B(center, radius)`.
    pub fn ball_sum(&self, center: &[i64], radius: f64) -> f64 {
        let (mut s, mut c) = (0.0, 0.0);
        self.segments(center, radius, |base, a, b| {
            let (h1, l1) = self.prefix(base + b);
            let (h0, l0) = if a == 0 { (0.0, 0.0) } else { self.prefix(base + a - 1) };
            s += h1 - h0;
            c += l1 - l0;
        });
        (s + c).max(0.0)
    }

    /// Maximum of the weights over the open ball; needs [`Self::with_maxima`].
    pub fn ball_max(&self, center: &[i64], radius: f64) -> f64 {
        let rm = self.maxima.as_ref().expect("summer built without maxima");
        let mut m = 0.0f64;
        self.segments(center, radius, |base, a, b| m = m.max(rm.query(base, a, b)));
        m
    }
}

/// Sparse tables for range maxima along the last axis.
struct RowMax {
    n_last: usize,
    levels: Vec<Vec<f64>>,
}

impl RowMax {
    fn new(grid: &GridSpec, weights: &[f64]) -> Self {
        let n_last = *grid.shape.last().unwrap();
        let mut levels = vec![weights.to_vec()];
        let mut width = 1;
        while 2 * width <= n_last {
            let prev = levels.last().unwrap();
            let mut next = vec![0.0; weights.len()];
            for row in 0..weights.len() / n_last {
                let base = row * n_last;
                for k in 0..=n_last - 2 * width {
                    next[base + k] = prev[base + k].max(prev[base + k + width]);
                }
            }
            levels.push(next);
            width *= 2;
        }
        RowMax { n_last, levels }
    }

    fn query(&self, base: usize, a: usize, b: usize) -> f64 {
        debug_assert!(a <= b && b < self.n_last);
        let len = b - a + 1;
        let lvl = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let t = &self.levels[lvl];
        t[base + a].max(t[base + b + 1 - (1 << lvl)])
    }
}

/// `|g|^p` on unmasked nodes, zero elsewhere.
pub(crate) fn powered(g: &GridFunction, p: f64) -> Vec<f64> {
    g.raw_values()
        .iter()
        .zip(g.mask())
        .map(|(v, m)| if *m { v.abs().powf(p) } else { 0.0 })
        .collect()
}

/// `max_{y, r} r^{d(1/u-1/p)} (Σ_{B(y,r)} |g|^p h^d)^{1/p}` over unmasked
/// centers `y` and the given radii.
pub fn morrey_ball_norm(g: &GridFunction, mp: &MorreyParams, radii: &[f64]) -> Result<f64> {
    let grid = g.grid();
    if radii.is_empty() || radii.iter().any(|r| !(*r >= grid.spacing)) {
        return Err(Error::invalid("radius set must be nonempty with every radius >= grid spacing"));
    }
    if g.count_unmasked() == 0 {
        return Err(Error::EmptyDomain);
    }
    let weights = powered(g, mp.p);
    if weights.iter().all(|w| *w == 0.0) {
        return Ok(0.0);
    }
    let summer = BallSummer::new(grid, &weights);
    let hd = grid.cell_volume();
    let expo = mp.radius_exponent(grid.dim());
    let centers: Vec<usize> = g.iter_unmasked().map(|(i, _)| i).collect();
    let best = centers
        .par_iter()
        .map(|&c| {
            let idx = grid.unravel(c);
            radii
                .iter()
                .map(|r| r.powf(expo) * (summer.ball_sum(&idx, *r) * hd).powf(1.0 / mp.p))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Range of dyadic levels whose cubes have side between the grid spacing and
/// the extent of `window`: `-ceil(log2 extent) ..= floor(log2 (1/h))`.
pub fn cube_levels(window: &BoxRegion, spacing: f64) -> (i32, i32) {
    let extent = window.lo.iter().zip(&window.hi).map(|(a, b)| b - a).fold(0.0, f64::max);
    (-(extent.log2().ceil() as i32), (1.0 / spacing).log2().floor() as i32)
}

/// Sums of `weights` over every nonempty level-`j` cube, keyed by cube index,
/// in lexicographic index order.
pub(crate) fn cube_sums(grid: &GridSpec, weights: &[f64], mask: &[bool], level: i32) -> Vec<(Vec<i64>, f64)> {
    let d = grid.dim();
    let scale = (level as f64).exp2();
    let nb = grid.node_box();
    let lo: Vec<i64> = nb.lo.iter().map(|v| (v * scale).floor() as i64).collect();
    let hi: Vec<i64> = nb.hi.iter().map(|v| (v * scale).floor() as i64).collect();
    let dims: Vec<usize> = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as usize).collect();
    // bin of each node is separable: precompute per axis
    let axis_bins: Vec<Vec<usize>> = (0..d)
        .map(|i| {
            (0..grid.shape[i])
                .map(|k| {
                    let x = grid.origin[i] + k as f64 * grid.spacing;
                    ((x * scale).floor() as i64 - lo[i]) as usize
                })
                .collect()
        })
        .collect();
    let total: usize = dims.iter().product();
    let mut sums = vec![0.0; total];
    let mut hit = vec![false; total];
    let n = grid.len();
    let mut idx = vec![0usize; d];
    for flat in 0..n {
        if mask[flat] {
            let mut b = 0usize;
            for i in 0..d {
                b = b * dims[i] + axis_bins[i][idx[i]];
            }
            sums[b] += weights[flat];
            hit[b] = true;
        }
        for i in (0..d).rev() {
            idx[i] += 1;
            if idx[i] < grid.shape[i] {
                break;
            }
            idx[i] = 0;
        }
    }
    let mut out = Vec::new();
    for (b, s) in sums.into_iter().enumerate() {
        if hit[b] {
            let mut rem = b;
            let mut k = vec![0i64; d];
            for i in (0..d).rev() {
                k[i] = (rem % dims[i]) as i64 + lo[i];
                rem /= dims[i];
            }
            out.push((k, s));
        }
    }
    out
}

/// `max_P |P|^{-τ} ||g||_{L_p(P ∩ Ω)}` over dyadic cubes of levels
/// `j_min..=j_max` meeting the unmasked samples.
pub fn morrey_cube_norm(g: &GridFunction, mp: &MorreyParams, j_min: i32, j_max: i32) -> Result<f64> {
    morrey_cube_norm_capped(g, mp, j_min, j_max, DEFAULT_CUBE_CAP)
}

pub fn morrey_cube_norm_capped(g: &GridFunction, mp: &MorreyParams, j_min: i32, j_max: i32, cap: u64) -> Result<f64> {
    if j_min > j_max {
        return Err(Error::invalid("j_min must not exceed j_max"));
    }
    let grid = g.grid();
    let requested = cube_count(&grid.node_box(), j_min, j_max);
    if requested > cap as u128 {
        return Err(Error::CapExceeded { requested, cap });
    }
    let weights = powered(g, mp.p);
    let hd = grid.cell_volume();
    let tau = mp.tau();
    let d = grid.dim() as f64;
    let levels: Vec<i32> = (j_min..=j_max).collect();
    let best = levels
        .par_iter()
        .map(|&j| {
            let vol = (-(j as f64) * d).exp2();
            cube_sums(grid, &weights, g.mask(), j)
                .into_iter()
                .map(|(_, s)| vol.powf(-tau) * (s * hd).powf(1.0 / mp.p))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Riemann `L_p` norm of `g` over the unmasked samples in the half-open cube.
pub fn local_lp_on_cube(g: &GridFunction, p: f64, cube: &DyadicCube) -> f64 {
    let grid = g.grid();
    let lo = cube.lower_corner();
    let side = cube.side();
    let ranges: Vec<(i64, i64)> = (0..grid.dim())
        .map(|i| {
            let a = ((lo[i] - grid.origin[i]) / grid.spacing).ceil() as i64;
            let b = ((lo[i] + side - grid.origin[i]) / grid.spacing).ceil() as i64 - 1;
            (a.max(0) - 1, b.min(grid.shape[i] as i64 - 1) + 1)
        })
        .collect();
    if ranges.iter().any(|(a, b)| a > b) {
        return 0.0;
    }
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut sum = 0.0;
    loop {
        if let Some(f) = grid.flat(&idx) {
            if let Some(v) = g.get(f) {
                if cube.contains(&grid.point_of(&idx)) {
                    sum += v.abs().powf(p);
                }
            }
        }
        if !crate::geometry::odometer_next(&mut idx, &ranges) {
            break;
        }
    }
    (sum * grid.cell_volume()).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;

    fn line_fn(lo: f64, hi: f64, h: f64, f: impl Fn(f64) -> f64) -> GridFunction {
        let w = BoxRegion::new(vec![lo], vec![hi]).unwrap();
        let grid = GridSpec::cells_with_spacing(&w, h).unwrap();
        GridFunction::from_fn(&grid, &DomainSpec::full_space(w), |x| f(x[0]))
    }

    #[test]
    fn ball_norm_of_unit_ball_indicator() {
        let g = line_fn(-4.0, 4.0, 1.0 / 256.0, |x| if x.abs() < 1.0 { 1.0 } else { 0.0 });
        let mp = MorreyParams::new(1.0, 2.0).unwrap();
        let v = morrey_ball_norm(&g, &mp, &default_radii(1.0 / 256.0, 8.0)).unwrap();
        // one boundary cell is lost to the open ball
        assert!((v - 2.0).abs() <= 1.0 / 256.0 + 1e-12, "{v}");
    }

    #[test]
    fn ball_norm_reduces_to_lp_when_u_equals_p() {
        let g = line_fn(-2.0, 2.0, 1.0 / 64.0, |x| (-x * x).exp());
        let mp = MorreyParams::new(2.0, 2.0).unwrap();
        let v = morrey_ball_norm(&g, &mp, &default_radii(1.0 / 64.0, 4.0)).unwrap();
        let direct = (g.iter_unmasked().map(|(_, v)| v * v).sum::<f64>() / 64.0).sqrt();
        assert!((v - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn cube_examples() {
        let g = line_fn(0.0, 1.0, 0.25, |_| 1.0);
        let mp = MorreyParams::from_tau(2.0, 0.25).unwrap();
        assert!((morrey_cube_norm(&g, &mp, 0, 0).unwrap() - 1.0).abs() < 1e-15);
        let q = DyadicCube { level: 0, index: vec![0] };
        assert!((local_lp_on_cube(&g, 2.0, &q) - 1.0).abs() < 1e-15);
        let far = DyadicCube { level: 0, index: vec![5] };
        assert_eq!(local_lp_on_cube(&g, 2.0, &far), 0.0);

        let chi = line_fn(-1.0, 2.0, 1.0 / 64.0, |x| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 });
        let mp = MorreyParams::from_tau(1.0, 0.5).unwrap();
        let half = DyadicCube { level: 1, index: vec![0] };
        let v = 2f64.powf(0.5) * local_lp_on_cube(&chi, 1.0, &half);
        assert!((v - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((morrey_cube_norm(&chi, &mp, 0, 3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cube_sums_agree_with_local_lp() {
        let g = line_fn(-1.0, 1.0, 1.0 / 32.0, |x| x.sin() + 2.0);
        for (k, s) in cube_sums(g.grid(), &powered(&g, 1.5), g.mask(), 2) {
            let q = DyadicCube { level: 2, index: k };
            let direct = local_lp_on_cube(&g, 1.5, &q);
            assert!(((s / 32.0).powf(1.0 / 1.5) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_max_matches_scan() {
        let w = BoxRegion::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let grid = GridSpec::cells(&w, 16).unwrap();
        let vals: Vec<f64> = (0..grid.len()).map(|i| ((i * 37) % 11) as f64).collect();
        let s = BallSummer::with_maxima(&grid, &vals);
        for c in [0usize, 17, 100, 255] {
            let idx = grid.unravel(c);
            for r in [0.05, 0.2, 0.5] {
                let x = grid.point(c);
                let pts: Vec<usize> =
                    (0..grid.len()).filter(|j| crate::geometry::dist2(&grid.point(*j), &x) < r * r).collect();
                let m = pts.iter().map(|j| vals[*j]).fold(0.0, f64::max);
                let sum: f64 = pts.iter().map(|j| vals[*j]).sum();
                assert_eq!(s.ball_max(&idx, r), m);
                assert!((s.ball_sum(&idx, r) - sum).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn empty_domain_is_an_error() {
        let g = line_fn(0.0, 1.0, 0.25, |_| 1.0).restricted(&[false; 4]);
        let mp = MorreyParams::new(1.0, 1.0).unwrap();
        assert!(matches!(morrey_ball_norm(&g, &mp, &[0.5]), Err(Error::EmptyDomain)));
    }
}
