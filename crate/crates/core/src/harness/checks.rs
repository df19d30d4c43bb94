//! Pointwise inequality checks: the Whitney bridge between oscillations and
//! differences, monotonicity under restriction to a subdomain, and brute-force
//! re-verification of the admissible step sets.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::differences::{diff_ball_mean, diff_field_on};
use crate::error::{Error, Result};
use crate::geometry::{v_set_sample, DomainKind, DomainSpec};
use crate::gridfn::{GridFunction, GridSpec, TestFunctionSpec};
use crate::localpoly::{osc_field_on, oscillation, OscMode};
use crate::params::SpaceParams;
use crate::spacenorms::eval_mask;

use super::grid_with_cells;

/// Values at or below this count as zero in ratio denominators.
pub const RATIO_FLOOR: f64 = 1e-12;

/// `max` of `g` over the cube `[x - r h, x + r h]^d` around every node,
/// restricted to nodes of `mask`.
pub fn neighborhood_max(g: &GridFunction, mask: &[bool], r: usize) -> Vec<f64> {
    let grid = g.grid();
    let mut cur: Vec<f64> = (0..grid.len()).map(|i| if mask[i] { g.get(i).unwrap_or(0.0) } else { 0.0 }).collect();
    let strides = grid.strides();
    for axis in 0..grid.dim() {
        let n = grid.shape[axis] as i64;
        let st = strides[axis];
        let mut next = cur.clone();
        for (i, out) in next.iter_mut().enumerate() {
            let k = (i / st) as i64 % n;
            let lo = (k - r as i64).max(0);
            let hi = (k + r as i64).min(n - 1);
            let base = i - (k as usize) * st;
            *out = (lo..=hi).map(|m| cur[base + m as usize * st]).fold(0.0, f64::max);
        }
        cur = next;
    }
    cur
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WhitneyCell {
    pub function: String,
    pub cells: usize,
    pub t: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(with = "crate::params::inf")]
    pub v: f64,
    /// `max_x osc(x, t) / max_{|y - x|_∞ ≤ t} diff(y, t)` over nodes with a
    /// nonzero denominator; `inf` if an oscillation is not dominated at all.
    pub max_ratio: f64,
    pub compared: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WhitneyReport {
    pub cells: Vec<WhitneyCell>,
    /// Corpus maximum per grid size, coarse to fine.
    pub per_grid: Vec<(usize, f64)>,
    pub max_ratio: f64,
    /// Largest over smallest per-grid maximum.
    pub spread: f64,
}

/// Ratio of the oscillation field to the neighborhood maximum of the
/// difference field at scale `t` over `window ∩ Ω`.
pub fn whitney_ratio(f: &GridFunction, dom: &DomainSpec, t: f64, v: f64, n: usize) -> Result<(f64, usize)> {
    let eval = eval_mask(f, dom);
    let osc = osc_field_on(f, &eval, t, v, n, OscMode::for_v(v))?.values;
    let diff = diff_field_on(f, &eval, t, v, n)?.values;
    let r = (t / f.grid().spacing).floor() as usize;
    let smooth = neighborhood_max(&diff, &eval, r);
    let mut worst = 0.0f64;
    let mut compared = 0;
    for (i, o) in osc.iter_unmasked() {
        if smooth[i] > RATIO_FLOOR {
            worst = worst.max(o / smooth[i]);
            compared += 1;
        } else if o > RATIO_FLOOR {
            worst = f64::INFINITY;
        }
    }
    Ok((worst, compared))
}

/// Whitney ratios for every corpus entry, grid, scale and `(N, v)` pair.
pub fn whitney_check(
    corpus: &[TestFunctionSpec],
    dom: &DomainSpec,
    grid_sizes: &[usize],
    scales: &[f64],
    orders: &[(usize, f64)],
) -> Result<WhitneyReport> {
    let mut cells = Vec::new();
    let mut per_grid = Vec::new();
    for &n_cells in grid_sizes {
        let grid = GridSpec::cells(&dom.window, n_cells)?;
        let mut grid_max = 0.0f64;
        for f in corpus {
            let g = f.sample(&grid, dom);
            for &t in scales {
                for &(n, v) in orders {
                    let (max_ratio, compared) = whitney_ratio(&g, dom, t, v, n)?;
                    grid_max = grid_max.max(max_ratio);
                    cells.push(WhitneyCell { function: f.name.clone(), cells: n_cells, t, n, v, max_ratio, compared });
                }
            }
        }
        per_grid.push((n_cells, grid_max));
    }
    let max_ratio = per_grid.iter().map(|p| p.1).fold(0.0, f64::max);
    let min = per_grid.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(WhitneyReport { cells, per_grid, max_ratio, spread: max_ratio / min })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RestrictionReport {
    pub points: usize,
    pub osc_violations: usize,
    pub diff_violations: usize,
    /// Largest `restricted - full` seen, negative when every pair is strict.
    pub max_osc_excess: f64,
    pub max_diff_excess: f64,
    /// Largest `|restricted - full|`; zero when Ω covers the grid.
    pub max_gap: f64,
}

impl RestrictionReport {
    pub fn passed(&self) -> bool {
        self.points > 0 && self.osc_violations == 0 && self.diff_violations == 0
    }
}

/// Samples `F` on the whole grid and on `Ω`, then compares
/// `osc_{v,Ω}[F|Ω](x,t) ≤ osc_v F(x,t)` and the `V^N` difference means at
/// random nodes `x ∈ window ∩ Ω` and radii `t ∈ [2h, t_max]`.
#[allow(clippy::too_many_arguments)]
pub fn restriction_check<R: Rng>(
    fspec: &TestFunctionSpec,
    dom: &DomainSpec,
    sp: &SpaceParams,
    cells: usize,
    points: usize,
    t_max: f64,
    tol: f64,
    rng: &mut R,
) -> Result<RestrictionReport> {
    let grid = grid_with_cells(dom, sp, cells)?;
    let full = fspec.sample(&grid, &DomainSpec::full_space(grid.node_box()));
    let restricted = fspec.sample(&grid, dom);
    let eval: Vec<usize> = eval_mask(&restricted, dom).iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect();
    if eval.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let h = grid.spacing;
    let mode = OscMode::for_v(sp.v);
    let mut rep = RestrictionReport { max_osc_excess: f64::NEG_INFINITY, max_diff_excess: f64::NEG_INFINITY, ..Default::default() };
    for _ in 0..points {
        let i = eval[rng.gen_range(0..eval.len())];
        let t = rng.gen_range(2.0 * h..=t_max.max(2.0 * h));
        let x = grid.point(i);
        let on = oscillation(&restricted, &x, t, sp.v, sp.n, mode)?;
        let off = oscillation(&full, &x, t, sp.v, sp.n, mode)?;
        let idx = grid.unravel(i);
        let (dn, _) = diff_ball_mean(&restricted, &idx, t, sp.v, sp.n)?;
        let (df, _) = diff_ball_mean(&full, &idx, t, sp.v, sp.n)?;
        rep.points += 1;
        rep.max_osc_excess = rep.max_osc_excess.max(on - off);
        rep.max_diff_excess = rep.max_diff_excess.max(dn - df);
        rep.max_gap = rep.max_gap.max((on - off).abs()).max((dn - df).abs());
        rep.osc_violations += (on > off + tol) as usize;
        rep.diff_violations += (dn > df + tol) as usize;
    }
    Ok(rep)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VsetReport {
    pub checked: usize,
    /// Step sets differing from brute-force enumeration.
    pub mismatches: usize,
    /// Steps in `V^{N+1}` missing from `V^N`.
    pub antitone_failures: usize,
    /// Convex domains: admissible endpoints with an inadmissible midpoint.
    pub convexity_failures: usize,
    /// Random single steps whose membership disagreed with the direct test.
    pub single_step_failures: usize,
}

impl VsetReport {
    pub fn passed(&self) -> bool {
        self.checked > 0
            && self.mismatches == 0
            && self.antitone_failures == 0
            && self.convexity_failures == 0
            && self.single_step_failures == 0
    }
}

/// Re-derives `V^N(x, t)` for random `x ∈ window ∩ Ω`, `t ∈ [step, t_max]`
/// by enumerating the lattice cube and testing every chord node.
pub fn vset_check<R: Rng>(dom: &DomainSpec, n: usize, step: f64, t_max: f64, count: usize, rng: &mut R) -> Result<VsetReport> {
    let d = dom.dim();
    let mut rep = VsetReport::default();
    let mut attempts = 0;
    while rep.checked < count {
        attempts += 1;
        if attempts > 100 * count {
            return Err(Error::EmptyDomain);
        }
        let x: Vec<f64> = (0..d).map(|i| rng.gen_range(dom.window.lo[i]..=dom.window.hi[i])).collect();
        if !dom.contains(&x) {
            continue;
        }
        let t = rng.gen_range(step..=t_max);
        let mut got = v_set_sample(dom, &x, t, n, step)?;
        let reach = (t / step).ceil() as i64;
        let mut brute = Vec::new();
        let mut o = vec![-reach; d];
        loop {
            let hv: Vec<f64> = o.iter().map(|k| *k as f64 * step).collect();
            let n2: i64 = o.iter().map(|k| k * k).sum();
            if (n2 as f64) < (t / step).powi(2) {
                let ok = (0..=n).all(|l| {
                    let y: Vec<f64> = x.iter().zip(&hv).map(|(a, b)| a + l as f64 * b).collect();
                    dom.contains(&y)
                });
                if ok {
                    brute.push(hv);
                }
            }
            let mut k = d;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                if o[k] < reach {
                    o[k] += 1;
                    break;
                }
                o[k] = -reach;
            }
            if o.iter().all(|v| *v == -reach) {
                break;
            }
        }
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        brute.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rep.mismatches += (got != brute) as usize;
        let next = v_set_sample(dom, &x, t, n + 1, step)?;
        rep.antitone_failures += next.iter().filter(|h| !got.contains(h)).count();
        if let DomainKind::BoundedConvex { .. } = dom.kind {
            for hv in &got {
                let end: Vec<f64> = x.iter().zip(hv).map(|(a, b)| a + n as f64 * b).collect();
                if dom.contains(&end) {
                    let bad = (1..n).any(|l| {
                        let y: Vec<f64> = x.iter().zip(hv).map(|(a, b)| a + l as f64 * b).collect();
                        !dom.contains(&y)
                    });
                    rep.convexity_failures += bad as usize;
                }
            }
        }
        // one random lattice step in the cube, tested directly
        let o: Vec<i64> = (0..d).map(|_| rng.gen_range(-reach..=reach)).collect();
        let hv: Vec<f64> = o.iter().map(|k| *k as f64 * step).collect();
        let n2: i64 = o.iter().map(|k| k * k).sum();
        let direct = (n2 as f64) < (t / step).powi(2)
            && (0..=n).all(|l| {
                let y: Vec<f64> = x.iter().zip(&hv).map(|(a, b)| a + l as f64 * b).collect();
                dom.contains(&y)
            });
        rep.single_step_failures += (direct != got.contains(&hv)) as usize;
        rep.checked += 1;
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoxRegion;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn neighborhood_max_is_a_sliding_max() {
        let dom = DomainSpec::full_space(BoxRegion::new(vec![0.0], vec![1.0]).unwrap());
        let grid = GridSpec::cells(&dom.window, 8).unwrap();
        let g = GridFunction::new(grid, vec![0., 0., 3., 0., 0., 0., 1., 0.], vec![true; 8]).unwrap();
        let m = neighborhood_max(&g, &[true; 8], 1);
        assert_eq!(m, vec![0., 3., 3., 3., 0., 1., 1., 1.]);
    }

    #[test]
    fn restriction_to_the_whole_window_is_an_equality() {
        let w = BoxRegion::new(vec![-1.0], vec![1.0]).unwrap();
        let dom = DomainSpec::full_space(w);
        let sp = SpaceParams::besov_morrey(1, 0.5, 2.0, 2.0, 2.0, 2.0, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = TestFunctionSpec::gaussian(vec![0.2], 0.3);
        let rep = restriction_check(&f, &dom, &sp, 128, 50, 0.25, 1e-10, &mut rng).unwrap();
        assert!(rep.passed());
        assert!(rep.max_gap <= 1e-12, "{}", rep.max_gap);
    }

    #[test]
    fn half_line_steps_match_brute_force() {
        let dom = DomainSpec::half_line(0.0, BoxRegion::new(vec![-1.0], vec![1.0]).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rep = vset_check(&dom, 2, 0.05, 0.5, 200, &mut rng).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
}
