use proptest::prelude::*;

use besov_morrey::differences::{iterated_difference, stencil_sum, DifferenceStencil};
use besov_morrey::geometry::{v_set_sample, BoxRegion, DomainSpec, PiecewiseLinear};
use besov_morrey::gridfn::{riemann_mean, GridFunction, GridSpec, TestFunctionSpec};
use besov_morrey::localpoly::{oscillation, OscMode};
use besov_morrey::lpref::{phi, psi};
use besov_morrey::morrey::{default_radii, morrey_ball_norm, MorreyParams};
use besov_morrey::params::{Flavor, SpaceParams};
use besov_morrey::spacenorms::{full_norm, Level, ScaleBreakdown};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 32, ..ProptestConfig::default() }
}

fn line(lo: f64, hi: f64, cells: usize) -> (GridSpec, DomainSpec) {
    let w = BoxRegion::new(vec![lo], vec![hi]).unwrap();
    (GridSpec::cells(&w, cells).unwrap(), DomainSpec::full_space(w))
}

fn from_values(values: Vec<f64>) -> GridFunction {
    let n = values.len();
    let grid = GridSpec::new(vec![0.0], 0.1, vec![n]).unwrap();
    GridFunction::new(grid, values, vec![true; n]).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn closed_form_difference_equals_iterated(values in prop::collection::vec(-1e6f64..1e6, 2..9)) {
        let st = DifferenceStencil::new(values.len() - 1);
        prop_assert_eq!(stencil_sum(&st, &values).to_bits(), iterated_difference(&values).to_bits());
        prop_assert_eq!(st.l1_mass(), 1i64 << (values.len() - 1));
    }

    #[test]
    fn differences_annihilate_low_degree_polynomials(
        n in 1usize..7,
        coeffs in prop::collection::vec(-3.0f64..3.0, 6),
        x0 in -2.0f64..2.0,
        h in 0.01f64..0.5,
    ) {
        let deg = n - 1;
        let pi = |x: f64| coeffs[..=deg.min(5)].iter().rev().fold(0.0, |acc, c| acc * x + c);
        let pts: Vec<f64> = (0..=n).map(|l| pi(x0 + l as f64 * h)).collect();
        let scale = pts.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let tol = 1e-10 * n as f64 * (n as f64).exp2() * scale;
        prop_assert!(stencil_sum(&DifferenceStencil::new(n), &pts).abs() <= tol);
    }

    #[test]
    fn riemann_mean_is_homogeneous_and_holder_ordered(
        values in prop::collection::vec(-5.0f64..5.0, 1..40),
        c in -4.0f64..4.0,
        v1 in 0.3f64..4.0,
        dv in 0.0f64..4.0,
        t in 0.5f64..3.0,
    ) {
        let g = from_values(values.clone());
        let pts: Vec<usize> = (0..values.len()).collect();
        let m = riemann_mean(&g, &pts, t, v1).unwrap();
        let mc = riemann_mean(&g.scaled(c), &pts, t, v1).unwrap();
        prop_assert!((mc - c.abs() * m).abs() <= 1e-12 * (1.0 + mc.abs()));
        let v2 = v1 + dv;
        let m2 = riemann_mean(&g, &pts, t, v2).unwrap();
        let factor = (pts.len() as f64 * 0.1 / t).powf(1.0 / v1 - 1.0 / v2);
        prop_assert!(m <= factor * m2 * (1.0 + 1e-12) + 1e-300);
        let minf = riemann_mean(&g, &pts, t, f64::INFINITY).unwrap();
        let factor_inf = (pts.len() as f64 * 0.1 / t).powf(1.0 / v1);
        prop_assert!(m <= factor_inf * minf * (1.0 + 1e-12) + 1e-300);
        let zero = riemann_mean(&g.scaled(0.0), &pts, t, v1).unwrap();
        prop_assert_eq!(zero, 0.0);
    }

    #[test]
    fn v_set_members_satisfy_the_definition_and_shrink_with_order(
        x1 in -0.9f64..0.9,
        x2 in 0.0f64..1.0,
        t in 0.15f64..0.6,
        n in 1usize..4,
        slope in 0.2f64..1.5,
    ) {
        let profile = PiecewiseLinear::new(vec![-1.0, 0.0, 1.0], vec![slope, 0.0, slope]).unwrap();
        let dom = DomainSpec::special_lipschitz(vec![profile], 0.0, BoxRegion::cube(2, -1.0, 1.0)).unwrap();
        let x = [x1, x2];
        let step = 0.05;
        let hs = v_set_sample(&dom, &x, t, n, step).unwrap();
        for h in &hs {
            prop_assert!(h.iter().map(|c| c * c).sum::<f64>().sqrt() < t);
            for l in 0..=n {
                prop_assert!(dom.contains(&[x[0] + l as f64 * h[0], x[1] + l as f64 * h[1]]));
            }
        }
        let coarser = v_set_sample(&dom, &x, t, n + 1, step).unwrap();
        prop_assert!(coarser.iter().all(|h| hs.contains(h)));
    }

    #[test]
    fn full_space_v_set_is_the_lattice_ball(t in 0.11f64..0.7, n in 1usize..5) {
        let dom = DomainSpec::full_space(BoxRegion::cube(2, -3.0, 3.0));
        let step = 0.1;
        let hs = v_set_sample(&dom, &[0.0, 0.0], t, n, step).unwrap();
        let r = (t / step).ceil() as i64;
        let mut count = 0;
        for a in -r..=r {
            for b in -r..=r {
                count += (((a * a + b * b) as f64).sqrt() * step < t) as usize;
            }
        }
        prop_assert_eq!(hs.len(), count);
    }

    #[test]
    fn morrey_ball_norm_is_homogeneous_and_quasi_subadditive(
        a in prop::collection::vec(-3.0f64..3.0, 8..48),
        b in prop::collection::vec(-3.0f64..3.0, 8..48),
        c in -5.0f64..5.0,
        p in 0.5f64..3.0,
        du in 0.0f64..3.0,
    ) {
        let n = a.len().min(b.len());
        let ga = from_values(a[..n].to_vec());
        let gb = from_values(b[..n].to_vec());
        let mp = MorreyParams::new(p, p + du).unwrap();
        let radii = default_radii(0.1, 0.1 * n as f64);
        let na = morrey_ball_norm(&ga, &mp, &radii).unwrap();
        let nb = morrey_ball_norm(&gb, &mp, &radii).unwrap();
        let nc = morrey_ball_norm(&ga.scaled(c), &mp, &radii).unwrap();
        prop_assert!((nc - c.abs() * na).abs() <= 1e-10 * (1.0 + nc));
        let m = p.min(1.0);
        let sum = morrey_ball_norm(&ga.add(&gb).unwrap(), &mp, &radii).unwrap();
        prop_assert!(sum.powf(m) <= (na.powf(m) + nb.powf(m)) * (1.0 + 1e-10));
    }

    #[test]
    fn oscillation_is_dominated_by_the_mean_and_antitone_in_order(
        center in -0.5f64..0.5,
        width in 0.1f64..1.0,
        x in -0.4f64..0.4,
        t in 0.2f64..0.6,
        n in 1usize..4,
    ) {
        let (grid, dom) = line(-1.0, 1.0, 200);
        let f = TestFunctionSpec::gaussian(vec![center], width).sample(&grid, &dom);
        let o = |n| oscillation(&f, &[x], t, 2.0, n, OscMode::Exact2).unwrap();
        let pts: Vec<usize> = (0..grid.len()).filter(|i| (grid.point(*i)[0] - x).abs() < t).collect();
        let mean = riemann_mean(&f, &pts, t, 2.0).unwrap();
        prop_assert!(o(1) <= mean * (1.0 + 1e-9));
        prop_assert!(o(n + 1) <= o(n) * (1.0 + 1e-9) + 1e-14);
    }

    #[test]
    fn aggregate_is_antitone_in_q(
        a in prop::collection::vec(0.0f64..10.0, 1..12),
        s in -1.0f64..2.0,
        q in 0.3f64..5.0,
        dq in 0.0f64..5.0,
    ) {
        let levels: Vec<Level> = a.iter().enumerate()
            .map(|(i, a_j)| Level { j: i as i32, t: (-(i as f64)).exp2(), a_j: *a_j })
            .collect();
        let a1 = ScaleBreakdown::aggregate_of(&levels, s, q);
        let a2 = ScaleBreakdown::aggregate_of(&levels, s, q + dq);
        let ainf = ScaleBreakdown::aggregate_of(&levels, s, f64::INFINITY);
        prop_assert!(a2 <= a1 * (1.0 + 1e-12));
        prop_assert!(ainf <= a2 * (1.0 + 1e-12));
    }

    #[test]
    fn dyadic_pieces_telescope_to_the_dilated_bump(r in 0.0f64..100.0, k in 0u32..7) {
        let sum: f64 = (0..=k).map(|i| phi(i, r)).sum();
        prop_assert!((sum - psi(r / (k as f64).exp2())).abs() <= 1e-12);
        for i in 0..=k {
            prop_assert!(phi(i, r) >= -1e-15);
        }
    }

    #[test]
    fn full_space_norms_are_shift_equivariant(shift in -20i64..20, flavor_ix in 0usize..3) {
        let (grid, dom) = line(-6.0, 6.0, 512);
        let sp = SpaceParams::besov_morrey(1, 0.7, 1.5, 3.0, 2.0, 2.0, 2);
        let flavor = [Flavor::Osc, Flavor::Diff, Flavor::Hn][flavor_ix];
        let f = TestFunctionSpec::gaussian(vec![0.0], 0.4).sample(&grid, &dom);
        let base = full_norm(&f, &sp, &dom, flavor).unwrap().total;
        let moved = full_norm(&f.shifted(0, shift), &sp, &dom, flavor).unwrap().total;
        prop_assert!((base - moved).abs() <= 1e-12 * base.max(1e-300), "{base} vs {moved}");
    }

    #[test]
    fn grid_functions_round_trip_through_the_binary_format(
        values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, 1..64),
        mask_seed in any::<u64>(),
    ) {
        let n = values.len();
        let grid = GridSpec::new(vec![-1.25], 0.03125, vec![n]).unwrap();
        let mask: Vec<bool> = (0..n).map(|i| (mask_seed >> (i % 64)) & 1 == 1).collect();
        let g = GridFunction::new(grid, values, mask).unwrap();
        let mut bytes = Vec::new();
        g.write_binary(&mut bytes).unwrap();
        let back = GridFunction::read_binary(bytes.as_slice()).unwrap();
        prop_assert_eq!(back, g);
    }
}

#[test]
fn flavor_names_round_trip() {
    for f in [Flavor::Osc, Flavor::Diff, Flavor::Hn, Flavor::Lp] {
        assert_eq!(Flavor::parse(f.name()).unwrap(), f);
    }
    assert!(Flavor::parse("wavelet").is_err());
}
