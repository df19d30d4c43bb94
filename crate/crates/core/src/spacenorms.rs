//! Full quasi-norms: main terms, dyadic scale sums of oscillation or
//! difference fields, Besov-Morrey (Morrey outer norm) and Besov-type
//! (`|P|^{-τ}`-weighted cube supremum) variants, and the discrete
//! dyadic-scale norm with unnormalized ball errors.
//!
//! The continuous `t`-integral `∫_0^T t^{-sq} a(t)^q dt/t` is replaced by
//! `Σ_j 2^{jsq} a(2^{-j})^q` over `4h ≤ 2^{-j} ≤ T`.
//!
//! Fields are evaluated at nodes in `window ∩ Ω`; inner balls and difference
//! chords may use samples outside the window when the grid extends past it.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::differences::diff_field_on;
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::gridfn::{GridFunction, GridSpec};
use crate::localpoly::{osc_field_on, OscMode};
use crate::morrey::{cube_levels, cube_sums, default_radii, morrey_ball_norm, morrey_cube_norm, powered, BallSummer, MorreyParams};
use crate::params::{inf, validate, Flavor, MainTerm, SpaceFamily, SpaceParams};

/// Smallest admissible scale in grid cells.
pub const SCALE_FLOOR_CELLS: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub j: i32,
    pub t: f64,
    pub a_j: f64,
}

/// Per-level outer norms `a_j` of the inner fields and their aggregate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleBreakdown {
    pub s: f64,
    #[serde(with = "inf")]
    pub q: f64,
    pub levels: Vec<Level>,
    pub aggregate: f64,
}

impl ScaleBreakdown {
    /// `(Σ_j (2^{js} a_j)^q)^{1/q}`, or `max_j 2^{js} a_j` for `q = ∞`.
    pub fn aggregate_of(levels: &[Level], s: f64, q: f64) -> f64 {
        let terms = levels.iter().map(|l| (l.j as f64 * s).exp2() * l.a_j);
        if q.is_infinite() {
            terms.fold(0.0, f64::max)
        } else {
            terms.map(|x| x.powf(q)).sum::<f64>().powf(1.0 / q)
        }
    }

    /// Re-aggregates the stored `a_j` with another exponent.
    pub fn reaggregate(&self, q: f64) -> f64 {
        Self::aggregate_of(&self.levels, self.s, q)
    }
}

/// One computed norm: the addends, the scale breakdown and any flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEntry {
    pub params: SpaceParams,
    pub flavor: Flavor,
    pub main_term: f64,
    pub seminorm: f64,
    pub total: f64,
    pub levels: Vec<Level>,
    pub flags: Vec<String>,
}

/// Dyadic levels `j` with `4h ≤ 2^{-j} ≤ min(T, diameter)`, coarse to fine.
/// The flag is set when `T` exceeded the diameter and was truncated.
pub fn scale_levels(spacing: f64, t_max: f64, diameter: f64) -> Result<(Vec<i32>, bool)> {
    let floor = SCALE_FLOOR_CELLS * spacing;
    let truncated = t_max > diameter;
    let ceiling = if truncated { diameter } else { t_max };
    let j_lo = (-ceiling.log2()).ceil() as i32;
    let j_hi = (-floor.log2()).floor() as i32;
    if j_lo > j_hi {
        return Err(Error::ScaleRangeEmpty { floor, ceiling: t_max });
    }
    Ok(((j_lo..=j_hi).collect(), truncated))
}

/// Largest scale actually used for `T`: `T` itself or the truncated value.
pub fn effective_ceiling(t_max: f64, diameter: f64) -> f64 {
    if t_max > diameter {
        (diameter.log2().floor()).exp2()
    } else {
        t_max
    }
}

/// Reach of balls and difference chords for `sp` on a window of the given
/// diameter: `max(T, R, N·T)` with the effective `T`.
pub fn reach(sp: &SpaceParams, diameter: f64) -> f64 {
    let t = effective_ceiling(sp.t_max, diameter);
    t.max(sp.r).max(sp.n as f64 * t)
}

/// Cell-centered grid of the given spacing over the computation window of
/// `dom` (padded for special Lipschitz domains).
pub fn grid_for(dom: &DomainSpec, sp: &SpaceParams, spacing: f64) -> Result<GridSpec> {
    let w = dom.computation_window(reach(sp, dom.window.diameter()));
    GridSpec::cells_with_spacing(&w, spacing)
}

/// Nodes of `f` that lie in `window ∩ Ω`.
pub fn eval_mask(f: &GridFunction, dom: &DomainSpec) -> Vec<bool> {
    let g = f.grid();
    (0..g.len()).map(|i| f.mask()[i] && dom.window.contains_closed(&g.point(i))).collect()
}

/// Outer quasi-norm of a field on `window ∩ Ω`.
enum Outer {
    Morrey { mp: MorreyParams, radii: Vec<f64> },
    Cubes { mp: MorreyParams, j_min: i32, j_max: i32 },
}

impl Outer {
    fn new(sp: &SpaceParams, dom: &DomainSpec, spacing: f64) -> Result<Self> {
        let mp = sp.morrey()?;
        Ok(match sp.family {
            SpaceFamily::BesovMorrey { .. } => Outer::Morrey { mp, radii: default_radii(spacing, dom.window.diameter()) },
            SpaceFamily::BesovType { .. } => {
                let (j_min, j_max) = cube_levels(&dom.window, spacing);
                Outer::Cubes { mp, j_min, j_max }
            }
        })
    }

    fn norm(&self, g: &GridFunction) -> Result<f64> {
        match self {
            Outer::Morrey { mp, radii } => morrey_ball_norm(g, mp, radii),
            Outer::Cubes { mp, j_min, j_max } => {
                if g.count_unmasked() == 0 {
                    return Err(Error::EmptyDomain);
                }
                morrey_cube_norm(g, mp, *j_min, *j_max)
            }
        }
    }
}

/// Cube-wise accumulation of `Σ_j (w_j ||g_j||_{L_p(P)})^q` followed by
/// `sup_P |P|^{-τ} (…)^{1/q}`.
pub(crate) struct CubeAccumulator {
    mp: MorreyParams,
    q: f64,
    j_min: i32,
    j_max: i32,
    acc: HashMap<(i32, Vec<i64>), f64>,
}

impl CubeAccumulator {
    pub(crate) fn new(mp: MorreyParams, q: f64, j_min: i32, j_max: i32) -> Self {
        CubeAccumulator { mp, q, j_min, j_max, acc: HashMap::new() }
    }

    /// Adds `weight · ||g||_{L_p(P)}` for every cube `P`; cubes of level
    /// below `from_level` are skipped.
    pub(crate) fn add(&mut self, g: &GridFunction, weight: f64, from_level: i32) {
        self.add_levels(g, weight, from_level, i32::MAX);
    }

    /// As [`Self::add`], restricted to cube levels in `[from_level, to_level]`.
    pub(crate) fn add_levels(&mut self, g: &GridFunction, weight: f64, from_level: i32, to_level: i32) {
        let grid = g.grid();
        let pw = powered(g, self.mp.p);
        let hd = grid.cell_volume();
        for level in self.j_min.max(from_level)..=self.j_max.min(to_level) {
            for (k, s) in cube_sums(grid, &pw, g.mask(), level) {
                let x = weight * (s * hd).powf(1.0 / self.mp.p);
                let e = self.acc.entry((level, k)).or_insert(0.0);
                if self.q.is_infinite() {
                    *e = e.max(x);
                } else {
                    *e += x.powf(self.q);
                }
            }
        }
    }

    pub(crate) fn finish(&self) -> f64 {
        let d = self.acc.keys().next().map(|(_, k)| k.len()).unwrap_or(1) as f64;
        let tau = self.mp.tau();
        self.acc
            .iter()
            .map(|((level, _), v)| {
                let vol = (-(*level as f64) * d).exp2();
                let inner = if self.q.is_infinite() { *v } else { v.powf(1.0 / self.q) };
                vol.powf(-tau) * inner
            })
            .fold(0.0, f64::max)
    }
}

fn field_at(f: &GridFunction, eval: &[bool], sp: &SpaceParams, flavor: Flavor, t: f64, flags: &mut Flags) -> Result<GridFunction> {
    let field = match flavor {
        Flavor::Osc | Flavor::Hn => osc_field_on(f, eval, t, sp.v, sp.n, OscMode::for_v(sp.v))?,
        Flavor::Diff => diff_field_on(f, eval, t, sp.v, sp.n)?,
        Flavor::Lp => return Err(Error::invalid("the Littlewood-Paley reference has no scale field")),
    };
    flags.sparse += field.sparse;
    flags.empty += field.empty;
    Ok(field.values)
}

#[derive(Default)]
struct Flags {
    sparse: usize,
    empty: usize,
    notes: Vec<String>,
}

impl Flags {
    fn into_vec(self) -> Vec<String> {
        let mut out = self.notes;
        if self.sparse > 0 {
            out.push(format!("{} balls had fewer samples than dim P_(N-1); oscillation set to 0", self.sparse));
        }
        if self.empty > 0 {
            out.push(format!("{} balls or step sets were empty; value set to 0", self.empty));
        }
        out
    }
}

fn check_inputs(f: &GridFunction, sp: &SpaceParams, dom: &DomainSpec) -> Result<()> {
    sp.check()?;
    if f.grid().dim() != sp.d || dom.dim() != sp.d {
        return Err(Error::DimensionMismatch { expected: sp.d, got: f.grid().dim() });
    }
    Ok(())
}

/// `|f|^{(T,v,N)}` for the oscillation or difference flavor.
pub fn seminorm(f: &GridFunction, sp: &SpaceParams, dom: &DomainSpec, flavor: Flavor) -> Result<(f64, ScaleBreakdown)> {
    let mut flags = Flags::default();
    seminorm_flagged(f, sp, dom, flavor, &mut flags)
}

fn seminorm_flagged(
    f: &GridFunction,
    sp: &SpaceParams,
    dom: &DomainSpec,
    flavor: Flavor,
    flags: &mut Flags,
) -> Result<(f64, ScaleBreakdown)> {
    check_inputs(f, sp, dom)?;
    let h = f.grid().spacing;
    let (js, truncated) = scale_levels(h, sp.t_max, dom.window.diameter())?;
    if truncated {
        flags.notes.push(format!("T truncated to {}", effective_ceiling(sp.t_max, dom.window.diameter())));
    }
    let eval = eval_mask(f, dom);
    let outer = Outer::new(sp, dom, h)?;
    let mut levels = Vec::with_capacity(js.len());
    let mut cubes = match &outer {
        Outer::Cubes { mp, j_min, j_max } => Some(CubeAccumulator::new(*mp, sp.q, *j_min, *j_max)),
        Outer::Morrey { .. } => None,
    };
    for &j in &js {
        let t = (-j as f64).exp2();
        let field = field_at(f, &eval, sp, flavor, t, flags)?;
        let a_j = outer.norm(&field)?;
        if let Some(acc) = cubes.as_mut() {
            acc.add(&field, (j as f64 * sp.s).exp2(), i32::MIN);
        }
        levels.push(Level { j, t, a_j });
    }
    let aggregate = ScaleBreakdown::aggregate_of(&levels, sp.s, sp.q);
    let value = match cubes {
        Some(acc) => {
            flags.notes.push("cube supremum taken outside the scale sum".into());
            acc.finish()
        }
        None => aggregate,
    };
    Ok((value, ScaleBreakdown { s: sp.s, q: sp.q, levels, aggregate }))
}

/// `x ↦ (Σ_{B(x,R)∩Ω} |f|^v h^d)^{1/v}` (max modulus for `v = ∞`) on the
/// nodes of `eval`.
pub fn averaged_field(f: &GridFunction, eval: &[bool], r: f64, v: f64) -> GridFunction {
    let grid = f.grid();
    let weights = if v.is_infinite() { powered(f, 1.0) } else { powered(f, v) };
    let summer = if v.is_infinite() { BallSummer::with_maxima(grid, &weights) } else { BallSummer::new(grid, &weights) };
    let hd = grid.cell_volume();
    let mut values = vec![0.0; grid.len()];
    use rayon::prelude::*;
    let idx: Vec<usize> = (0..grid.len()).filter(|i| eval[*i]).collect();
    let vals: Vec<f64> = idx
        .par_iter()
        .map(|&i| {
            let c = grid.unravel(i);
            if v.is_infinite() {
                summer.ball_max(&c, r)
            } else {
                (summer.ball_sum(&c, r) * hd).powf(1.0 / v)
            }
        })
        .collect();
    for (i, x) in idx.iter().zip(vals) {
        values[*i] = x;
    }
    GridFunction::from_parts_unchecked(grid.clone(), values, eval.to_vec())
}

/// Main term: outer norm of `f` or of its unnormalized `v`-average over
/// `B(·, R) ∩ Ω`.
pub fn main_term(f: &GridFunction, sp: &SpaceParams, dom: &DomainSpec) -> Result<f64> {
    check_inputs(f, sp, dom)?;
    let eval = eval_mask(f, dom);
    let outer = Outer::new(sp, dom, f.grid().spacing)?;
    match sp.main_term {
        MainTerm::PlainMorrey => outer.norm(&f.restricted(&eval)),
        MainTerm::VAveraged => outer.norm(&averaged_field(f, &eval, sp.r, sp.v)),
    }
}

/// Main term plus seminorm for the oscillation and difference flavors, the
/// discrete-scale norm for [`Flavor::Hn`], and the Littlewood-Paley
/// reference for [`Flavor::Lp`].
pub fn full_norm(f: &GridFunction, sp: &SpaceParams, dom: &DomainSpec, flavor: Flavor) -> Result<NormEntry> {
    match flavor {
        Flavor::Hn => return hn_discrete_norm(f, sp, dom),
        Flavor::Lp => return crate::lpref::lp_norm(f, sp, dom),
        _ => {}
    }
    let mut flags = Flags::default();
    flags.notes.extend(validate(sp, dom, flavor).violations());
    let main = main_term(f, sp, dom)?;
    let (semi, breakdown) = seminorm_flagged(f, sp, dom, flavor, &mut flags)?;
    Ok(NormEntry {
        params: sp.clone(),
        flavor,
        main_term: main,
        seminorm: semi,
        total: main + semi,
        levels: breakdown.levels,
        flags: flags.into_vec(),
    })
}

/// `(||(∫_{B(·,1)}|f|^v)^{1/v}||^q + Σ_{j≥1} 2^{jq(s+d/v)} ||E_j||^q)^{1/q}`
/// with `E_j(x) = inf_π (∫_{B(x,2^{-j})∩Ω} |f-π|^v)^{1/v}`; for Besov-type
/// parameters the cube supremum is taken outside the bracket.
pub fn hn_discrete_norm(f: &GridFunction, sp: &SpaceParams, dom: &DomainSpec) -> Result<NormEntry> {
    check_inputs(f, sp, dom)?;
    let mut flags = Flags::default();
    flags.notes.extend(validate(sp, dom, Flavor::Hn).violations());
    let h = f.grid().spacing;
    let diameter = dom.window.diameter();
    let (all, _) = scale_levels(h, f64::INFINITY, diameter)?;
    let js: Vec<i32> = all.into_iter().filter(|j| *j >= 1).collect();
    if js.is_empty() {
        return Err(Error::ScaleRangeEmpty { floor: SCALE_FLOOR_CELLS * h, ceiling: 0.5 });
    }
    let eval = eval_mask(f, dom);
    let outer = Outer::new(sp, dom, h)?;
    let main_field = averaged_field(f, &eval, 1.0, sp.v);
    let main = outer.norm(&main_field)?;
    let d = sp.d as f64;
    let dv = if sp.v.is_infinite() { 0.0 } else { d / sp.v };
    let mut cubes = match &outer {
        Outer::Cubes { mp, j_min, j_max } => {
            let mut acc = CubeAccumulator::new(*mp, sp.q, *j_min, *j_max);
            acc.add(&main_field, 1.0, i32::MIN);
            Some(acc)
        }
        Outer::Morrey { .. } => None,
    };
    let mut levels = Vec::new();
    for &j in &js {
        let t = (-j as f64).exp2();
        let osc = field_at(f, &eval, sp, Flavor::Hn, t, &mut flags)?;
        let err = osc.scaled((-(j as f64) * dv).exp2());
        let a_j = outer.norm(&err)?;
        if let Some(acc) = cubes.as_mut() {
            acc.add(&err, (j as f64 * (sp.s + dv)).exp2(), i32::MIN);
        }
        levels.push(Level { j, t, a_j });
    }
    let semi = ScaleBreakdown::aggregate_of(&levels, sp.s + dv, sp.q);
    let total = match cubes {
        Some(acc) => acc.finish(),
        None if sp.q.is_infinite() => main.max(semi),
        None => (main.powf(sp.q) + semi.powf(sp.q)).powf(1.0 / sp.q),
    };
    Ok(NormEntry { params: sp.clone(), flavor: Flavor::Hn, main_term: main, seminorm: semi, total, levels, flags: flags.into_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoxRegion;
    use crate::gridfn::TestFunctionSpec;

    fn line(lo: f64, hi: f64) -> DomainSpec {
        DomainSpec::full_space(BoxRegion::new(vec![lo], vec![hi]).unwrap())
    }

    #[test]
    fn levels_respect_floor_and_ceiling() {
        let (js, tr) = scale_levels(1.0 / 256.0, 1.0, 16.0).unwrap();
        assert_eq!(js, (0..=6).collect::<Vec<_>>());
        assert!(!tr);
        let (js, tr) = scale_levels(1.0 / 256.0, f64::INFINITY, 16.0).unwrap();
        assert_eq!(js[0], -4);
        assert!(tr);
        assert!(matches!(scale_levels(0.25, 0.5, 4.0), Err(Error::ScaleRangeEmpty { .. })));
    }

    #[test]
    fn polynomials_have_zero_seminorm() {
        let dom = line(-2.0, 2.0);
        let grid = GridSpec::cells(&dom.window, 256).unwrap();
        let f = TestFunctionSpec::polynomial_1d("p", &[1.0, -2.0, 0.5]).sample(&grid, &dom);
        let sp = SpaceParams::besov_morrey(1, 1.5, 2.0, 3.0, 2.0, 2.0, 3);
        for flavor in [Flavor::Osc, Flavor::Diff] {
            let (v, _) = seminorm(&f, &sp, &dom, flavor).unwrap();
            assert!(v < 1e-9, "{flavor:?}: {v}");
        }
        let e = full_norm(&f, &sp, &dom, Flavor::Osc).unwrap();
        assert_eq!(e.total, e.main_term + e.seminorm);
    }

    #[test]
    fn plain_main_term_examples() {
        let dom = line(0.0, 1.0);
        let grid = GridSpec::cells(&dom.window, 64).unwrap();
        let one = TestFunctionSpec::polynomial_1d("one", &[1.0]).sample(&grid, &dom);
        let sp = SpaceParams::besov_morrey(1, 0.5, 2.0, 2.0, 2.0, 2.0, 1);
        assert!((main_term(&one, &sp, &dom).unwrap() - 1.0).abs() < 1e-12);
        let zero = one.scaled(0.0);
        assert_eq!(main_term(&zero, &sp, &dom).unwrap(), 0.0);

        let dom = line(-4.0, 4.0);
        let grid = GridSpec::cells(&dom.window, 2048).unwrap();
        let chi = TestFunctionSpec::step(vec![0.0], vec![1.0]).sample(&grid, &dom);
        let sp = SpaceParams::besov_morrey(1, 0.5, 1.0, 2.0, 2.0, 2.0, 1);
        let m = main_term(&chi, &sp, &dom).unwrap();
        // χ_[0,1] has L_1 mass 1 on a ball of radius 1/2: weight (1/2)^{-1/2}
        assert!((m - 2f64.sqrt()).abs() < 1e-2, "{m}");
        let chi = TestFunctionSpec::step(vec![-1.0], vec![1.0]).sample(&grid, &dom);
        assert!((main_term(&chi, &sp, &dom).unwrap() - 2.0).abs() < 1e-2);
    }

    #[test]
    fn breakdown_reproduces_aggregate() {
        let dom = line(-4.0, 4.0);
        let grid = GridSpec::cells(&dom.window, 512).unwrap();
        let f = TestFunctionSpec::gaussian(vec![0.0], 1.0).sample(&grid, &dom);
        let sp = SpaceParams::besov_morrey(1, 0.7, 1.5, 3.0, 2.0, 2.0, 2);
        let (v, b) = seminorm(&f, &sp, &dom, Flavor::Osc).unwrap();
        assert!((b.reaggregate(2.0) - v).abs() <= 1e-12 * v);
        assert!(b.reaggregate(4.0) <= b.reaggregate(2.0));
    }
}
