//! Sampled functions on uniform isotropic grids, midpoint Riemann means, the
//! analytic test-function corpus, and the binary/CSV file formats.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoxRegion, DomainSpec};

/// Uniform tensor grid: node `i` sits at `origin + i * spacing`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub shape: Vec<usize>,
}

impl GridSpec {
    pub fn new(origin: Vec<f64>, spacing: f64, shape: Vec<usize>) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::invalid("grid spacing must be positive"));
        }
        if shape.is_empty() || shape.iter().any(|n| *n == 0) || origin.len() != shape.len() {
            return Err(Error::invalid("grid shape must be nonempty and match the origin"));
        }
        Ok(GridSpec { origin, spacing, shape })
    }

    /// Nodes `lo, lo + h, …` up to and including `hi` on every axis.
    pub fn nodes(window: &BoxRegion, spacing: f64) -> Result<Self> {
        let shape = window
            .lo
            .iter()
            .zip(&window.hi)
            .map(|(a, b)| ((b - a) / spacing).round() as usize + 1)
            .collect();
        GridSpec::new(window.lo.clone(), spacing, shape)
    }

    /// Cell midpoints of a partition of the window into cubes of side
    /// `(hi_0 - lo_0) / cells`; other axes get as many cells as fit.
    pub fn cells(window: &BoxRegion, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::invalid("need at least one cell"));
        }
        let spacing = (window.hi[0] - window.lo[0]) / cells as f64;
        GridSpec::cells_with_spacing(window, spacing)
    }

    pub fn cells_with_spacing(window: &BoxRegion, spacing: f64) -> Result<Self> {
        let shape = window
            .lo
            .iter()
            .zip(&window.hi)
            .map(|(a, b)| ((b - a) / spacing).round().max(1.0) as usize)
            .collect();
        let origin = window.lo.iter().map(|a| a + 0.5 * spacing).collect();
        GridSpec::new(origin, spacing, shape)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Volume element `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim() as i32)
    }

    /// Row-major strides (last axis fastest).
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dim()];
        for i in (0..self.dim().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.shape[i + 1];
        }
        s
    }

    pub fn flat(&self, idx: &[i64]) -> Option<usize> {
        let mut f = 0usize;
        for (i, (v, n)) in idx.iter().zip(&self.shape).enumerate() {
            if *v < 0 || *v as usize >= *n {
                return None;
            }
            f = if i == 0 { *v as usize } else { f * n + *v as usize };
        }
        Some(f)
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<i64> {
        let mut idx = vec![0i64; self.dim()];
        for i in (0..self.dim()).rev() {
            idx[i] = (flat % self.shape[i]) as i64;
            flat /= self.shape[i];
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .iter()
            .zip(&self.origin)
            .map(|(i, o)| o + *i as f64 * self.spacing)
            .collect()
    }

    pub fn point_of(&self, idx: &[i64]) -> Vec<f64> {
        idx.iter().zip(&self.origin).map(|(i, o)| o + *i as f64 * self.spacing).collect()
    }

    /// Multi-index of the node at `x`, if `x` is a node up to `1e-9` cells.
    pub fn node_index(&self, x: &[f64]) -> Option<Vec<i64>> {
        let mut idx = Vec::with_capacity(self.dim());
        for (v, o) in x.iter().zip(&self.origin) {
            let c = (v - o) / self.spacing;
            let r = c.round();
            if (c - r).abs() > 1e-9 {
                return None;
            }
            idx.push(r as i64);
        }
        self.flat(&idx).map(|_| idx)
    }

    /// Smallest box containing every node.
    pub fn node_box(&self) -> BoxRegion {
        BoxRegion {
            lo: self.origin.clone(),
            hi: self.origin.iter().zip(&self.shape).map(|(o, n)| o + (*n as f64 - 1.0) * self.spacing).collect(),
        }
    }

    /// Largest distance between two nodes.
    pub fn node_diameter(&self) -> f64 {
        self.node_box().diameter()
    }
}

/// Real samples with a domain mask. Masked entries are stored but never
/// exposed through [`GridFunction::get`] or the unmasked iterators.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: GridSpec,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<f64>, mask: Vec<bool>) -> Result<Self> {
        if values.len() != grid.len() || mask.len() != grid.len() {
            return Err(Error::invalid(format!(
                "values ({}) and mask ({}) must both have {} entries",
                values.len(),
                mask.len(),
                grid.len()
            )));
        }
        Ok(GridFunction { grid, values, mask })
    }

    /// Evaluates `f` at every node inside `dom`; nodes outside are masked.
    pub fn from_fn(grid: &GridSpec, dom: &DomainSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let n = grid.len();
        let mut values = vec![0.0; n];
        let mut mask = vec![false; n];
        for i in 0..n {
            let y = grid.point(i);
            if dom.contains(&y) {
                mask[i] = true;
                values[i] = f(&y);
            }
        }
        GridFunction { grid: grid.clone(), values, mask }
    }

    pub fn zeros_like(&self) -> Self {
        GridFunction { grid: self.grid.clone(), values: vec![0.0; self.values.len()], mask: self.mask.clone() }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn get(&self, flat: usize) -> Option<f64> {
        if self.mask[flat] {
            Some(self.values[flat])
        } else {
            None
        }
    }

    pub fn get_index(&self, idx: &[i64]) -> Option<f64> {
        self.grid.flat(idx).and_then(|f| self.get(f))
    }

    /// `(flat index, value)` for every unmasked node.
    pub fn iter_unmasked(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().zip(&self.mask).enumerate().filter(|(_, (_, m))| **m).map(|(i, (v, _))| (i, *v))
    }

    pub fn count_unmasked(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    /// Values with masked entries replaced by `fill`.
    pub fn values_or(&self, fill: f64) -> Vec<f64> {
        self.values.iter().zip(&self.mask).map(|(v, m)| if *m { *v } else { fill }).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.iter_unmasked().map(|(_, v)| v.abs()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let values = self.values.iter().zip(&self.mask).map(|(v, m)| if *m { f(*v) } else { 0.0 }).collect();
        GridFunction { grid: self.grid.clone(), values, mask: self.mask.clone() }
    }

    /// Pointwise sum on the common mask.
    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::invalid("cannot add functions on different grids"));
        }
        let mask: Vec<bool> = self.mask.iter().zip(&other.mask).map(|(a, b)| *a && *b).collect();
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .zip(&mask)
            .map(|((a, b), m)| if *m { a + b } else { 0.0 })
            .collect();
        Ok(GridFunction { grid: self.grid.clone(), values, mask })
    }

    /// Same values with a different mask (entries newly exposed are read as
    /// whatever was stored, so callers should only shrink masks).
    pub fn with_mask(&self, mask: Vec<bool>) -> Result<Self> {
        GridFunction::new(self.grid.clone(), self.values.clone(), mask)
    }

    /// Restriction to `mask ∧ self.mask`.
    pub fn restricted(&self, mask: &[bool]) -> Self {
        let mask: Vec<bool> = self.mask.iter().zip(mask).map(|(a, b)| *a && *b).collect();
        let values = self.values.iter().zip(&mask).map(|(v, m)| if *m { *v } else { 0.0 }).collect();
        GridFunction { grid: self.grid.clone(), values, mask }
    }

    /// Translates the samples by `cells` nodes along `axis`, filling vacated
    /// nodes with zero. The mask is kept.
    pub fn shifted(&self, axis: usize, cells: i64) -> Self {
        let mut values = vec![0.0; self.values.len()];
        for (i, v) in values.iter_mut().enumerate() {
            let mut idx = self.grid.unravel(i);
            idx[axis] -= cells;
            if let Some(src) = self.grid.flat(&idx) {
                if self.mask[src] {
                    *v = self.values[src];
                }
            }
        }
        GridFunction { grid: self.grid.clone(), values, mask: self.mask.clone() }
    }

    pub(crate) fn raw_values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn from_parts_unchecked(grid: GridSpec, values: Vec<f64>, mask: Vec<bool>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        GridFunction { grid, values, mask }
    }
}

/// A field `x ↦ value(x, t)` over grid nodes plus counts of degenerate balls.
#[derive(Clone, Debug)]
pub struct Field {
    pub values: GridFunction,
    /// Balls with fewer samples than `dim P_{N-1}` (value set to 0).
    pub sparse: usize,
    /// Balls or step sets with no samples at all (value set to 0).
    pub empty: usize,
}

/// Monomial `coefficient · Π x_i^{exponents[i]}`; missing exponents are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub coefficient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Polynomial { terms: Vec<Monomial> },
    /// `exp(-|x - center|^2 / (2 width^2))`.
    Gaussian { center: Vec<f64>, width: f64 },
    /// Indicator of the closed box `[lo, hi]`.
    StepIndicator { lo: Vec<f64>, hi: Vec<f64> },
    /// `|x - center|^exponent · b(|x - center| / cutoff)` with the smooth bump
    /// `b(r) = exp(1 - 1/(1 - r^2))` on `r < 1`.
    Cusp {
        exponent: f64,
        cutoff: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// `Π_i cos(2π · cutoff · x_i)`: spectrum on the corners `|ξ_i| = cutoff`.
    BandLimited { cutoff: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionSpec {
    #[serde(default)]
    pub name: String,
    #[serde(flatten)]
    pub family: Family,
    /// Known smoothness threshold, when one exists.
    #[serde(default)]
    pub regularity: Option<f64>,
}

impl TestFunctionSpec {
    pub fn new(name: &str, family: Family) -> Self {
        let regularity = match &family {
            Family::Cusp { exponent, .. } => Some(*exponent),
            _ => None,
        };
        TestFunctionSpec { name: name.to_string(), family, regularity }
    }

    pub fn zero() -> Self {
        Self::new("zero", Family::Polynomial { terms: Vec::new() })
    }

    /// Univariate polynomial in the first coordinate, `Σ c_k x_1^k`.
    pub fn polynomial_1d(name: &str, coefficients: &[f64]) -> Self {
        let terms = coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| Monomial { exponents: vec![k as u32], coefficient: *c })
            .collect();
        Self::new(name, Family::Polynomial { terms })
    }

    pub fn gaussian(center: Vec<f64>, width: f64) -> Self {
        Self::new("gaussian", Family::Gaussian { center, width })
    }

    pub fn step(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Self::new("step", Family::StepIndicator { lo, hi })
    }

    pub fn cusp(exponent: f64, cutoff: f64) -> Self {
        Self::new("cusp", Family::Cusp { exponent, cutoff, center: Vec::new() })
    }

    pub fn band_limited(cutoff: f64) -> Self {
        Self::new("band_limited", Family::BandLimited { cutoff })
    }

    pub fn validate(&self, window: Option<&BoxRegion>) -> Result<()> {
        match &self.family {
            Family::Cusp { exponent, cutoff, .. } if !(*exponent > 0.0) || !(*cutoff > 0.0) => {
                Err(Error::invalid("cusp needs exponent > 0 and cutoff > 0"))
            }
            Family::Gaussian { width, .. } if !(*width > 0.0) => Err(Error::invalid("gaussian width must be positive")),
            Family::StepIndicator { lo, hi } => {
                if let Some(w) = window {
                    if !w.contains_closed(lo) || !w.contains_closed(hi) {
                        return Err(Error::invalid("step indicator box must lie inside the window"));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.family {
            Family::Polynomial { terms } => terms
                .iter()
                .map(|m| {
                    m.coefficient
                        * m.exponents.iter().zip(x).map(|(e, v)| v.powi(*e as i32)).product::<f64>()
                })
                .sum(),
            Family::Gaussian { center, width } => {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                (-r2 / (2.0 * width * width)).exp()
            }
            Family::StepIndicator { lo, hi } => {
                let inside = x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *a <= *v && *v <= *b);
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
            Family::Cusp { exponent, cutoff, center } => {
                let r = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let c = center.get(i).copied().unwrap_or(0.0);
                        (v - c) * (v - c)
                    })
                    .sum::<f64>()
                    .sqrt();
                let rho = r / cutoff;
                if rho >= 1.0 {
                    0.0
                } else {
                    r.powf(*exponent) * (1.0 - 1.0 / (1.0 - rho * rho)).exp()
                }
            }
            Family::BandLimited { cutoff } => x.iter().map(|v| (2.0 * PI * cutoff * v).cos()).product(),
        }
    }

    /// Pointwise samples at the grid nodes, masked by domain membership.
    pub fn sample(&self, grid: &GridSpec, dom: &DomainSpec) -> GridFunction {
        GridFunction::from_fn(grid, dom, |x| self.eval(x))
    }
}

/// Midpoint Riemann realization of `(normalizer^{-1} ∫ |g|^v)^{1/v}` over the
/// given nodes; `v = ∞` gives the maximum modulus. Masked nodes are skipped and
/// an empty node set yields 0.
pub fn riemann_mean(g: &GridFunction, points: &[usize], normalizer: f64, v: f64) -> Result<f64> {
    if !(normalizer > 0.0) {
        return Err(Error::NonpositiveNormalizer(normalizer));
    }
    if !(v > 0.0) {
        return Err(Error::invalid("exponent v must be positive"));
    }
    let vals = points.iter().filter_map(|i| g.get(*i));
    if v.is_infinite() {
        return Ok(vals.map(f64::abs).fold(0.0, f64::max));
    }
    let sum: f64 = vals.map(|x| x.abs().powf(v)).sum();
    Ok((sum * g.grid().cell_volume() / normalizer).powf(1.0 / v))
}

const MAGIC: &[u8; 4] = b"BMGF";
const FORMAT_VERSION: u32 = 1;

impl GridFunction {
    /// Little-endian layout: `"BMGF"`, `u32` version, `u32 d`, `d × u64`
    /// shape, `d × f64` origin, `f64` spacing, `n × f64` values, `n` mask bytes.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.grid.dim() as u32).to_le_bytes())?;
        for n in &self.grid.shape {
            w.write_all(&(*n as u64).to_le_bytes())?;
        }
        for o in &self.grid.origin {
            w.write_all(&o.to_le_bytes())?;
        }
        w.write_all(&self.grid.spacing.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        let mask: Vec<u8> = self.mask.iter().map(|m| *m as u8).collect();
        w.write_all(&mask)?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::invalid("not a grid function file"));
        }
        let version = read_u32(&mut r)?;
        if version != FORMAT_VERSION {
            return Err(Error::invalid(format!("unsupported grid file version {version}")));
        }
        let d = read_u32(&mut r)? as usize;
        if d == 0 || d > 16 {
            return Err(Error::invalid(format!("implausible dimension {d}")));
        }
        let mut shape = Vec::with_capacity(d);
        for _ in 0..d {
            shape.push(read_u64(&mut r)? as usize);
        }
        let mut origin = Vec::with_capacity(d);
        for _ in 0..d {
            origin.push(read_f64(&mut r)?);
        }
        let spacing = read_f64(&mut r)?;
        let grid = GridSpec::new(origin, spacing, shape)?;
        let n = grid.len();
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(read_f64(&mut r)?);
        }
        let mut mask = vec![0u8; n];
        r.read_exact(&mut mask)?;
        GridFunction::new(grid, values, mask.into_iter().map(|b| b != 0).collect())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_binary(f)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_binary(f)
    }

    /// CSV with one row per node: coordinates, value, mask (`d ≤ 2`).
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let d = self.grid.dim();
        if d > 2 {
            return Err(Error::invalid("CSV export supports d <= 2"));
        }
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<&str> = ["x", "y"][..d].to_vec();
        header.extend(["value", "mask"]);
        out.write_record(&header)?;
        for i in 0..self.grid.len() {
            let mut rec: Vec<String> = self.grid.point(i).iter().map(|v| v.to_string()).collect();
            rec.push(if self.mask[i] { self.values[i].to_string() } else { String::new() });
            rec.push((self.mask[i] as u8).to_string());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(lo: f64, hi: f64) -> BoxRegion {
        BoxRegion::new(vec![lo], vec![hi]).unwrap()
    }

    #[test]
    fn samples_polynomial_on_nodes() {
        let w = line(-1.0, 1.0);
        let grid = GridSpec::nodes(&w, 0.5).unwrap();
        let f = TestFunctionSpec::polynomial_1d("x", &[0.0, 1.0]).sample(&grid, &DomainSpec::full_space(w));
        let vals: Vec<f64> = f.iter_unmasked().map(|(_, v)| v).collect();
        assert_eq!(vals, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn corpus_point_values() {
        assert_eq!(TestFunctionSpec::gaussian(vec![0.0], 1.0).eval(&[0.0]), 1.0);
        assert_eq!(TestFunctionSpec::step(vec![0.0], vec![1.0]).eval(&[-0.25]), 0.0);
        assert_eq!(TestFunctionSpec::step(vec![0.0], vec![1.0]).eval(&[0.25]), 1.0);
        assert_eq!(TestFunctionSpec::cusp(0.3, 2.0).eval(&[0.0]), 0.0);
        assert_eq!(TestFunctionSpec::cusp(0.3, 2.0).eval(&[2.5]), 0.0);
        assert!((TestFunctionSpec::band_limited(0.5).eval(&[1.0]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn cusp_rejects_nonpositive_exponent() {
        assert!(TestFunctionSpec::cusp(0.0, 1.0).validate(None).is_err());
        let step = TestFunctionSpec::step(vec![0.0], vec![3.0]);
        assert!(step.validate(Some(&line(-1.0, 2.0))).is_err());
    }

    #[test]
    fn riemann_mean_examples() {
        let grid = GridSpec::new(vec![0.0], 1.0, vec![3]).unwrap();
        let g = GridFunction::new(grid.clone(), vec![2.0; 3], vec![true; 3]).unwrap();
        assert!((riemann_mean(&g, &[0, 1, 2], 3.0, 1.0).unwrap() - 2.0).abs() < 1e-15);

        let g = GridFunction::new(grid.clone(), vec![1.0, -2.0, 3.0], vec![true; 3]).unwrap();
        assert_eq!(riemann_mean(&g, &[0, 1, 2], 1.0, f64::INFINITY).unwrap(), 3.0);

        let grid2 = GridSpec::new(vec![0.0], 1.0, vec![2]).unwrap();
        let g = GridFunction::new(grid2, vec![3.0, 4.0], vec![true; 2]).unwrap();
        let expect = (25.0f64 / 2.0).sqrt();
        assert!((riemann_mean(&g, &[0, 1], 2.0, 2.0).unwrap() - expect).abs() < 1e-14);

        assert!(matches!(riemann_mean(&g, &[0], 0.0, 1.0), Err(Error::NonpositiveNormalizer(_))));
        assert_eq!(riemann_mean(&g, &[], 1.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn masked_values_are_hidden() {
        let grid = GridSpec::new(vec![0.0], 1.0, vec![3]).unwrap();
        let g = GridFunction::new(grid, vec![1.0, 99.0, 3.0], vec![true, false, true]).unwrap();
        assert_eq!(g.get(1), None);
        assert_eq!(riemann_mean(&g, &[0, 1, 2], 1.0, f64::INFINITY).unwrap(), 3.0);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let grid = GridSpec::new(vec![0.0], 1.0, vec![3]).unwrap();
        assert!(GridFunction::new(grid, vec![1.0; 3], vec![true; 2]).is_err());
        assert!(GridSpec::new(vec![0.0], 0.0, vec![3]).is_err());
        assert!(GridSpec::new(vec![0.0], 1.0, vec![0]).is_err());
    }

    #[test]
    fn cell_grid_layout() {
        let g = GridSpec::cells(&line(-8.0, 8.0), 4096).unwrap();
        assert_eq!(g.spacing, 1.0 / 256.0);
        assert_eq!(g.shape, vec![4096]);
        assert_eq!(g.point(0)[0], -8.0 + 0.5 / 256.0);
        let g2 = GridSpec::cells(&BoxRegion::new(vec![-1.0, 0.0], vec![1.0, 1.0]).unwrap(), 8).unwrap();
        assert_eq!(g2.shape, vec![8, 4]);
        assert_eq!(g2.unravel(g2.flat(&[3, 2]).unwrap()), vec![3, 2]);
    }

    #[test]
    fn binary_and_csv_round_trip() {
        let w = BoxRegion::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let grid = GridSpec::cells(&w, 4).unwrap();
        let f = TestFunctionSpec::gaussian(vec![0.2, 0.0], 0.7).sample(&grid, &DomainSpec::full_space(w));
        let f = f.restricted(&(0..16).map(|i| i % 3 != 0).collect::<Vec<_>>());
        let mut buf = Vec::new();
        f.write_binary(&mut buf).unwrap();
        let back = GridFunction::read_binary(&buf[..]).unwrap();
        assert_eq!(back, f);

        let mut csv_buf = Vec::new();
        f.write_csv(&mut csv_buf).unwrap();
        let text = String::from_utf8(csv_buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "x,y,value,mask");
        assert_eq!(text.lines().count(), 17);
    }

    #[test]
    fn shift_moves_samples() {
        let grid = GridSpec::new(vec![0.0], 1.0, vec![4]).unwrap();
        let g = GridFunction::new(grid, vec![1.0, 2.0, 3.0, 4.0], vec![true; 4]).unwrap();
        let s = g.shifted(0, 1);
        let vals: Vec<f64> = s.iter_unmasked().map(|(_, v)| v).collect();
        assert_eq!(vals, vec![0.0, 1.0, 2.0, 3.0]);
    }
}
