//! Domains, balls, dyadic cubes and admissible difference steps.
//!
//! A [`DomainSpec`] couples a domain kind (the whole space, the epigraph of a
//! piecewise-linear Lipschitz graph, a convex polytope or an open box) with the
//! finite window on which every computation happens.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::GridSpec;

/// Default cap on the number of dyadic cubes a single enumeration may visit.
pub const DEFAULT_CUBE_CAP: u64 = 10_000_000;

/// Closed axis-aligned box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::invalid("box corners must have equal, nonzero dimension"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::invalid("box must satisfy lo < hi componentwise"));
        }
        Ok(BoxRegion { lo, hi })
    }

    /// The cube `[lo, hi]^d`.
    pub fn cube(d: usize, lo: f64, hi: f64) -> Self {
        BoxRegion { lo: vec![lo; d], hi: vec![hi; d] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn diameter(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn contains_closed(&self, y: &[f64]) -> bool {
        y.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    pub fn padded(&self, pad: f64) -> Self {
        BoxRegion {
            lo: self.lo.iter().map(|v| v - pad).collect(),
            hi: self.hi.iter().map(|v| v + pad).collect(),
        }
    }
}

/// Continuous piecewise-linear function of one variable, extended linearly
/// beyond its first and last knot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() || knots.len() < 2 {
            return Err(Error::invalid("piecewise-linear profile needs >= 2 matching knots/values"));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("profile knots must be strictly increasing"));
        }
        Ok(PiecewiseLinear { knots, values })
    }

    /// `x ↦ |x - center|` sampled with a kink at `center` and knots at `±half_width`.
    pub fn abs(center: f64, half_width: f64) -> Self {
        PiecewiseLinear {
            knots: vec![center - half_width, center, center + half_width],
            values: vec![half_width, 0.0, half_width],
        }
    }

    pub fn constant(value: f64) -> Self {
        PiecewiseLinear { knots: vec![0.0, 1.0], values: vec![value, value] }
    }

    fn slope(&self, seg: usize) -> f64 {
        (self.values[seg + 1] - self.values[seg]) / (self.knots[seg + 1] - self.knots[seg])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.knots.len();
        // index of the segment containing x, clamped to the end segments
        let seg = match self.knots.partition_point(|k| *k <= x) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        };
        self.values[seg] + self.slope(seg) * (x - self.knots[seg])
    }

    /// Largest absolute slope; the exact Lipschitz constant of the profile.
    pub fn max_slope(&self) -> f64 {
        (0..self.knots.len() - 1).map(|s| self.slope(s).abs()).fold(0.0, f64::max)
    }
}

/// Strict half-space `normal · y < offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    pub fn value(&self, y: &[f64]) -> f64 {
        self.normal.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() - self.offset
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "snake_case")]
pub enum DomainKind {
    FullSpace,
    /// `{ y : y_d > offset + Σ_i profiles[i](y_i) }`, one profile per
    /// coordinate of `y' = (y_1, …, y_{d-1})`.
    SpecialLipschitz {
        profiles: Vec<PiecewiseLinear>,
        #[serde(default)]
        offset: f64,
        lipschitz: f64,
    },
    /// Intersection of strict half-spaces, with the polytope's vertices kept
    /// alongside for consistency checks.
    BoundedConvex {
        halfspaces: Vec<HalfSpace>,
        #[serde(default)]
        vertices: Vec<Vec<f64>>,
    },
    BoxWindow { lo: Vec<f64>, hi: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    #[serde(flatten)]
    pub kind: DomainKind,
    pub window: BoxRegion,
}

impl DomainSpec {
    pub fn full_space(window: BoxRegion) -> Self {
        DomainSpec { kind: DomainKind::FullSpace, window }
    }

    /// Epigraph of `offset + Σ profiles[i](y_i)`; the Lipschitz constant is
    /// taken as the Euclidean norm of the per-profile slope bounds.
    pub fn special_lipschitz(profiles: Vec<PiecewiseLinear>, offset: f64, window: BoxRegion) -> Result<Self> {
        if profiles.len() + 1 != window.dim() {
            return Err(Error::DimensionMismatch { expected: window.dim() - 1, got: profiles.len() });
        }
        let lipschitz = profiles.iter().map(|p| p.max_slope().powi(2)).sum::<f64>().sqrt();
        let dom = DomainSpec { kind: DomainKind::SpecialLipschitz { profiles, offset, lipschitz }, window };
        dom.validate()?;
        Ok(dom)
    }

    /// Open half-line `(a, ∞)` as a one-dimensional special Lipschitz domain.
    pub fn half_line(a: f64, window: BoxRegion) -> Result<Self> {
        Self::special_lipschitz(Vec::new(), a, window)
    }

    pub fn convex(halfspaces: Vec<HalfSpace>, vertices: Vec<Vec<f64>>, window: BoxRegion) -> Result<Self> {
        let dom = DomainSpec { kind: DomainKind::BoundedConvex { halfspaces, vertices }, window };
        dom.validate()?;
        Ok(dom)
    }

    /// The open box `(lo, hi)` as a convex polytope, windowed by its closure.
    pub fn convex_box(region: &BoxRegion) -> Self {
        let d = region.dim();
        let mut halfspaces = Vec::with_capacity(2 * d);
        for i in 0..d {
            let mut n = vec![0.0; d];
            n[i] = 1.0;
            halfspaces.push(HalfSpace { normal: n.clone(), offset: region.hi[i] });
            n[i] = -1.0;
            halfspaces.push(HalfSpace { normal: n, offset: -region.lo[i] });
        }
        let vertices = (0..1usize << d)
            .map(|mask| (0..d).map(|i| if mask >> i & 1 == 1 { region.hi[i] } else { region.lo[i] }).collect())
            .collect();
        DomainSpec { kind: DomainKind::BoundedConvex { halfspaces, vertices }, window: region.clone() }
    }

    pub fn box_window(region: &BoxRegion) -> Self {
        DomainSpec {
            kind: DomainKind::BoxWindow { lo: region.lo.clone(), hi: region.hi.clone() },
            window: region.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    pub fn is_full_space(&self) -> bool {
        matches!(self.kind, DomainKind::FullSpace)
    }

    /// Checks the stored geometric invariants.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        match &self.kind {
            DomainKind::FullSpace => Ok(()),
            DomainKind::SpecialLipschitz { profiles, lipschitz, .. } => {
                if profiles.len() + 1 != d {
                    return Err(Error::DimensionMismatch { expected: d - 1, got: profiles.len() });
                }
                for p in profiles {
                    PiecewiseLinear::new(p.knots.clone(), p.values.clone())?;
                }
                let realized = profiles.iter().map(|p| p.max_slope().powi(2)).sum::<f64>().sqrt();
                if !(*lipschitz >= 0.0) || realized > lipschitz * (1.0 + 1e-12) + 1e-12 {
                    return Err(Error::invalid(format!(
                        "graph slope {realized} exceeds stored Lipschitz constant {lipschitz}"
                    )));
                }
                Ok(())
            }
            DomainKind::BoundedConvex { halfspaces, vertices } => {
                if halfspaces.iter().any(|h| h.normal.len() != d) || vertices.iter().any(|v| v.len() != d) {
                    return Err(Error::invalid("polytope data has the wrong dimension"));
                }
                for v in vertices {
                    for h in halfspaces {
                        if h.value(v) > 1e-12 {
                            return Err(Error::invalid(format!("vertex {v:?} violates a half-space")));
                        }
                    }
                }
                Ok(())
            }
            DomainKind::BoxWindow { lo, hi } => BoxRegion::new(lo.clone(), hi.clone()).map(|_| ()),
        }
    }

    /// Membership in the open domain.
    pub fn contains(&self, y: &[f64]) -> bool {
        match &self.kind {
            DomainKind::FullSpace => true,
            DomainKind::SpecialLipschitz { profiles, offset, .. } => {
                let d = y.len();
                let graph: f64 = offset + profiles.iter().zip(y).map(|(p, v)| p.eval(*v)).sum::<f64>();
                y[d - 1] > graph
            }
            DomainKind::BoundedConvex { halfspaces, .. } => halfspaces.iter().all(|h| h.value(y) < 0.0),
            DomainKind::BoxWindow { lo, hi } => {
                y.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *a < *v && *v < *b)
            }
        }
    }

    /// Window enlarged so that balls and difference chords of the given reach
    /// started inside the window stay on the represented grid. Only unbounded
    /// non-trivial domains need this; the other kinds return the window.
    pub fn computation_window(&self, reach: f64) -> BoxRegion {
        match self.kind {
            DomainKind::SpecialLipschitz { .. } => self.window.padded(reach),
            _ => self.window.clone(),
        }
    }
}

/// `B(x, t)`, open.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::invalid("ball radius must be positive"));
        }
        Ok(Ball { center, radius })
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        dist2(&self.center, y) < self.radius * self.radius
    }
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `Q_{j,k} = 2^{-j}([0,1)^d + k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub level: i32,
    pub index: Vec<i64>,
}

impl DyadicCube {
    pub fn side(&self) -> f64 {
        2f64.powi(-self.level)
    }

    pub fn volume(&self) -> f64 {
        self.side().powi(self.index.len() as i32)
    }

    pub fn lower_corner(&self) -> Vec<f64> {
        let s = self.side();
        self.index.iter().map(|k| *k as f64 * s).collect()
    }

    /// Membership in the half-open cube.
    pub fn contains(&self, y: &[f64]) -> bool {
        let s = self.side();
        y.iter().zip(&self.index).all(|(v, k)| {
            let a = *k as f64 * s;
            a <= *v && *v < a + s
        })
    }

    /// The dyadic cube of the given level containing `y`.
    pub fn containing(level: i32, y: &[f64]) -> Self {
        let scale = 2f64.powi(level);
        DyadicCube { level, index: y.iter().map(|v| (v * scale).floor() as i64).collect() }
    }
}

/// Per-axis index ranges of the level-`j` cubes whose half-open extent meets
/// the open window.
fn cube_index_ranges(window: &BoxRegion, level: i32) -> Vec<(i64, i64)> {
    let scale = 2f64.powi(level);
    window
        .lo
        .iter()
        .zip(&window.hi)
        .map(|(lo, hi)| {
            let first = (lo * scale - 1.0).floor() as i64 + 1;
            let last = (hi * scale).ceil() as i64 - 1;
            (first, last)
        })
        .collect()
}

/// Advances a multi-index through the box `ranges` (inclusive), last axis
/// fastest. Returns `false` once the box is exhausted.
pub(crate) fn odometer_next(idx: &mut [i64], ranges: &[(i64, i64)]) -> bool {
    for axis in (0..idx.len()).rev() {
        if idx[axis] < ranges[axis].1 {
            idx[axis] += 1;
            for a in axis + 1..idx.len() {
                idx[a] = ranges[a].0;
            }
            return true;
        }
    }
    false
}

/// Number of cubes with levels in `[j_min, j_max]` meeting the window.
pub fn cube_count(window: &BoxRegion, j_min: i32, j_max: i32) -> u128 {
    (j_min..=j_max)
        .map(|j| {
            cube_index_ranges(window, j)
                .iter()
                .map(|(a, b)| (b - a + 1).max(0) as u128)
                .product::<u128>()
        })
        .sum()
}

/// Every dyadic cube with level in `[j_min, j_max]` meeting `window ∩ Ω`,
/// level-major and lexicographic in the index.
///
/// Intersection with Ω is decided on a `9^d` lattice of interior test points
/// of each cube, which is exact for the full space and boxes and resolves
/// polytopes and epigraphs up to slivers thinner than `side / 8`.
pub fn cubes_touching(dom: &DomainSpec, j_min: i32, j_max: i32, cap: u64) -> Result<Vec<DyadicCube>> {
    if j_min > j_max {
        return Err(Error::invalid("cubes_touching needs j_min <= j_max"));
    }
    let requested = cube_count(&dom.window, j_min, j_max);
    if requested > cap as u128 {
        return Err(Error::CapExceeded { requested, cap });
    }
    let mut out = Vec::new();
    for j in j_min..=j_max {
        let ranges = cube_index_ranges(&dom.window, j);
        if ranges.iter().any(|(a, b)| a > b) {
            continue;
        }
        let mut k: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        loop {
            let cube = DyadicCube { level: j, index: k.clone() };
            if dom.is_full_space() || cube_meets_domain(dom, &cube) {
                out.push(cube);
            }
            if !odometer_next(&mut k, &ranges) {
                break;
            }
        }
    }
    Ok(out)
}

fn cube_meets_domain(dom: &DomainSpec, cube: &DyadicCube) -> bool {
    const PER_AXIS: usize = 9;
    let d = dom.dim();
    let side = cube.side();
    let corner = cube.lower_corner();
    let total = PER_AXIS.pow(d as u32);
    let mut y = vec![0.0; d];
    (0..total).any(|mut code| {
        for i in (0..d).rev() {
            let c = code % PER_AXIS;
            code /= PER_AXIS;
            y[i] = corner[i] + side * (c as f64 + 0.5) / PER_AXIS as f64;
        }
        dom.window.contains_closed(&y) && dom.contains(&y)
    })
}

/// Integer lattice offsets `o` with `|o| < radius_cells`, in lexicographic
/// order. Distances are compared in exact integer arithmetic against the
/// squared radius.
#[derive(Clone, Debug)]
pub struct LatticeBall {
    pub dim: usize,
    offsets: Vec<i64>,
}

impl LatticeBall {
    pub fn new(dim: usize, radius_cells: f64) -> Self {
        let r2 = radius_cells * radius_cells;
        let reach = radius_cells.ceil() as i64;
        let mut offsets = Vec::new();
        let ranges = vec![(-reach, reach); dim];
        let mut o = vec![-reach; dim];
        loop {
            let n2: i64 = o.iter().map(|v| v * v).sum();
            if (n2 as f64) < r2 {
                offsets.extend_from_slice(&o);
            }
            if !odometer_next(&mut o, &ranges) {
                break;
            }
        }
        LatticeBall { dim, offsets }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> + '_ {
        self.offsets.chunks_exact(self.dim)
    }
}

/// Lattice steps `h` (multiples of `step`) in `V^N(x, t)`: `|h| < t` and
/// `x + ℓh ∈ Ω` for every `0 ≤ ℓ ≤ N`.
pub fn v_set_sample(dom: &DomainSpec, x: &[f64], t: f64, n: usize, step: f64) -> Result<Vec<Vec<f64>>> {
    if !(t > 0.0) || !(step > 0.0) {
        return Err(Error::invalid("v_set_sample needs t > 0 and step > 0"));
    }
    if x.len() != dom.dim() {
        return Err(Error::DimensionMismatch { expected: dom.dim(), got: x.len() });
    }
    let ball = LatticeBall::new(x.len(), t / step);
    let mut out = Vec::new();
    let mut node = vec![0.0; x.len()];
    for o in ball.iter() {
        let h: Vec<f64> = o.iter().map(|v| *v as f64 * step).collect();
        let admissible = (0..=n).all(|l| {
            for (i, y) in node.iter_mut().enumerate() {
                *y = x[i] + l as f64 * h[i];
            }
            dom.contains(&node)
        });
        if admissible {
            out.push(h);
        }
    }
    Ok(out)
}

/// Flat indices of grid nodes `y` with `|x - y| < t` and `y ∈ Ω`, in
/// increasing index order.
pub fn ball_domain_samples(dom: &DomainSpec, x: &[f64], t: f64, grid: &GridSpec) -> Result<Vec<usize>> {
    if !(t > 0.0) {
        return Err(Error::invalid("ball radius must be positive"));
    }
    let d = grid.dim();
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    let h = grid.spacing;
    let ranges: Vec<(i64, i64)> = (0..d)
        .map(|i| {
            let c = (x[i] - grid.origin[i]) / h;
            let r = t / h;
            let lo = ((c - r).floor() as i64).max(0);
            let hi = ((c + r).ceil() as i64).min(grid.shape[i] as i64 - 1);
            (lo, hi)
        })
        .collect();
    let mut out = Vec::new();
    if ranges.iter().any(|(a, b)| a > b) {
        return Ok(out);
    }
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut y = vec![0.0; d];
    let t2 = t * t;
    loop {
        for i in 0..d {
            y[i] = grid.origin[i] + idx[i] as f64 * h;
        }
        if dist2(&y, x) < t2 && dom.contains(&y) {
            out.push(grid.flat(&idx).expect("index inside range"));
        }
        if !odometer_next(&mut idx, &ranges) {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(lo: f64, hi: f64) -> BoxRegion {
        BoxRegion::new(vec![lo], vec![hi]).unwrap()
    }

    #[test]
    fn epigraph_membership() {
        let w = BoxRegion::new(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        let dom = DomainSpec::special_lipschitz(vec![PiecewiseLinear::abs(0.0, 2.0)], 0.0, w).unwrap();
        assert!(dom.contains(&[1.0, 1.5]));
        assert!(!dom.contains(&[1.0, 0.5]));
        assert!(!dom.contains(&[1.0, 1.0]));
        assert!(DomainSpec::full_space(line(-1.0, 1.0)).contains(&[123.0]));
    }

    #[test]
    fn lipschitz_constant_is_checked() {
        let w = BoxRegion::new(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        let dom = DomainSpec {
            kind: DomainKind::SpecialLipschitz {
                profiles: vec![PiecewiseLinear::abs(0.0, 1.0)],
                offset: 0.0,
                lipschitz: 0.5,
            },
            window: w,
        };
        assert!(dom.validate().is_err());
    }

    #[test]
    fn polytope_vertices_checked() {
        let sq = DomainSpec::convex_box(&BoxRegion::cube(2, -1.0, 1.0));
        sq.validate().unwrap();
        let DomainKind::BoundedConvex { halfspaces, .. } = sq.kind.clone() else { unreachable!() };
        let bad = DomainSpec::convex(halfspaces, vec![vec![1.5, 0.0]], BoxRegion::cube(2, -1.0, 1.0));
        assert!(bad.is_err());
    }

    #[test]
    fn v_set_half_line() {
        let dom = DomainSpec::half_line(0.0, line(-1.0, 3.0)).unwrap();
        let steps = v_set_sample(&dom, &[1.0], 0.5, 2, 0.1).unwrap();
        let hs: Vec<f64> = steps.iter().map(|h| h[0]).collect();
        assert_eq!(hs.len(), 9);
        assert!(hs.iter().all(|h| h.abs() < 0.5));

        let steps = v_set_sample(&dom, &[0.4], 0.5, 2, 0.1).unwrap();
        let hs: Vec<f64> = steps.iter().map(|h| h[0]).collect();
        // 0.4 + 2h > 0 rejects h <= -0.2
        assert!(hs.iter().all(|h| *h > -0.2 + 1e-12 && *h < 0.5));
        assert_eq!(hs.len(), 1 + 4 + 1);
    }

    #[test]
    fn v_set_full_space_lattice_ball() {
        let dom = DomainSpec::full_space(line(-1.0, 1.0));
        let steps = v_set_sample(&dom, &[0.0], 0.3, 3, 0.1).unwrap();
        let hs: Vec<f64> = steps.iter().map(|h| h[0]).collect();
        assert_eq!(hs.len(), 5);
        for (a, b) in hs.iter().zip([-0.2, -0.1, 0.0, 0.1, 0.2]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn cube_enumeration() {
        let dom = DomainSpec::full_space(line(0.0, 1.0));
        let cubes = cubes_touching(&dom, 0, 1, DEFAULT_CUBE_CAP).unwrap();
        let got: Vec<(i32, i64)> = cubes.iter().map(|c| (c.level, c.index[0])).collect();
        assert_eq!(got, vec![(0, 0), (1, 0), (1, 1)]);

        let sq = DomainSpec::full_space(BoxRegion::cube(2, 0.0, 1.0));
        assert_eq!(cubes_touching(&sq, 1, 1, DEFAULT_CUBE_CAP).unwrap().len(), 4);

        let dom = DomainSpec::full_space(line(-1.0, 1.0));
        let got: Vec<i64> = cubes_touching(&dom, 0, 0, DEFAULT_CUBE_CAP).unwrap().iter().map(|c| c.index[0]).collect();
        assert_eq!(got, vec![-1, 0]);
    }

    #[test]
    fn cube_cap() {
        let sq = DomainSpec::full_space(BoxRegion::cube(2, 0.0, 1.0));
        assert!(matches!(cubes_touching(&sq, 0, 12, 1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn cube_corners_are_exact() {
        let c = DyadicCube { level: 3, index: vec![-5, 7] };
        assert_eq!(c.lower_corner(), vec![-0.625, 0.875]);
        assert_eq!(c.volume(), 1.0 / 64.0);
        assert!(c.contains(&[-0.625, 0.9]));
        assert!(!c.contains(&[-0.5, 0.9]));
        assert_eq!(DyadicCube::containing(3, &[-0.6, 0.9]), c);
    }

    #[test]
    fn ball_samples() {
        let grid = GridSpec::nodes(&line(-2.0, 2.0), 0.5).unwrap();
        let dom = DomainSpec::full_space(line(-2.0, 2.0));
        let pts: Vec<f64> =
            ball_domain_samples(&dom, &[0.0], 1.0, &grid).unwrap().iter().map(|i| grid.point(*i)[0]).collect();
        assert_eq!(pts, vec![-0.5, 0.0, 0.5]);

        let half = DomainSpec::half_line(0.0, line(-2.0, 2.0)).unwrap();
        let pts: Vec<f64> =
            ball_domain_samples(&half, &[0.5], 1.0, &grid).unwrap().iter().map(|i| grid.point(*i)[0]).collect();
        assert_eq!(pts, vec![0.5, 1.0]);

        let pts = ball_domain_samples(&dom, &[0.5], 0.1, &grid).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(grid.point(pts[0]), vec![0.5]);
    }

    #[test]
    fn domain_json_shape() {
        let dom = DomainSpec::half_line(0.0, line(-1.0, 1.0)).unwrap();
        let v = serde_json::to_value(&dom).unwrap();
        assert_eq!(v["kind"], "special_lipschitz");
        assert!(v["parameters"].is_object());
        assert!(v["window"].is_object());
        let back: DomainSpec = serde_json::from_value(v).unwrap();
        assert_eq!(back, dom);
        let fs = DomainSpec::full_space(line(-1.0, 1.0));
        let back: DomainSpec = serde_json::from_str(&serde_json::to_string(&fs).unwrap()).unwrap();
        assert_eq!(back, fs);
    }
}
