use proptest::prelude::*;

use dropkit::analytic::{ball_distance_moment, ball_energy, BallConstants};
use dropkit::inequalities::{f_of_s, g_alpha};
use dropkit::quadrature::{moment_integral, riesz_energy_grid, FourierShape, GridShape};
use dropkit::splits::necessary_condition;
use dropkit::{energy_scale, Mass, RieszParams};

fn params() -> impl Strategy<Value = RieszParams> {
    (2usize..6, 0.01f64..0.99).prop_map(|(n, t)| RieszParams::new(n, t * n as f64).unwrap())
}

fn cells(dim: usize) -> impl Strategy<Value = GridShape> {
    prop::collection::btree_set(prop::collection::vec(-4i64..5, dim), 1..40)
        .prop_map(move |set| GridShape::from_cells(dim, 0.25, vec![0.0; dim], set).unwrap())
}

fn shape() -> impl Strategy<Value = FourierShape> {
    (
        0.2f64..3.0,
        prop::collection::vec(-0.1f64..0.1, 0..5),
        prop::collection::vec(-0.1f64..0.1, 0..5),
    )
        .prop_map(|(r, a, b)| FourierShape::new(r, a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ball_energy_obeys_dilation_law(p in params(), m in 0.01f64..100.0, t in 0.1f64..10.0) {
        let c = BallConstants::radial(&p);
        let unit = ball_energy(&p, Mass::new(1.0).unwrap(), &c);
        let direct = ball_energy(&p, Mass::new(m).unwrap(), &c);
        let scaled = energy_scale(&unit, &p, Mass::new(m).unwrap());
        prop_assert!((direct.total / scaled.total - 1.0).abs() < 1e-12);
        let twice = energy_scale(&scaled, &p, Mass::new(t).unwrap());
        let once = energy_scale(&unit, &p, Mass::new(m * t).unwrap());
        prop_assert!((twice.perimeter / once.perimeter - 1.0).abs() < 1e-12);
        prop_assert!((twice.riesz / once.riesz - 1.0).abs() < 1e-12);
    }

    #[test]
    fn split_ratio_is_smallest_at_the_half(p in params(), s in 0.001f64..0.999) {
        let half = f_of_s(&p, 0.5).unwrap();
        prop_assert!(f_of_s(&p, s).unwrap() >= half * (1.0 - 1e-12));
        prop_assert!((f_of_s(&p, s).unwrap() - f_of_s(&p, 1.0 - s).unwrap()).abs() < 1e-12 * half.max(1.0));
    }

    #[test]
    fn g_is_nonnegative(alpha in 0.001f64..1.999, s in 0.0f64..=1.0) {
        prop_assert!(g_alpha(alpha, s).unwrap() >= -1e-12);
    }

    #[test]
    fn pair_energy_invariant_under_lattice_symmetries(
        g in cells(2),
        shift in prop::collection::vec(-50i64..50, 2),
        axis in 0usize..2,
        lambda in 0.1f64..1.9,
    ) {
        let e = riesz_energy_grid(&g, lambda).unwrap();
        prop_assert_eq!(riesz_energy_grid(&g.translated(&shift).unwrap(), lambda).unwrap(), e);
        prop_assert_eq!(riesz_energy_grid(&g.reflected(axis).unwrap(), lambda).unwrap(), e);
    }

    #[test]
    fn spatial_pair_energy_invariant(g in cells(3), shift in prop::collection::vec(-9i64..9, 3)) {
        let e = moment_integral(&g, 0.5).unwrap();
        prop_assert_eq!(moment_integral(&g.translated(&shift).unwrap(), 0.5).unwrap(), e);
        prop_assert_eq!(moment_integral(&g.reflected(2).unwrap(), 0.5).unwrap(), e);
    }

    #[test]
    fn ball_minimizes_positive_moments(g in cells(2), p in 0.2f64..2.0) {
        // equal-measure ball moment from the unit-ball value by scaling
        let r = (g.measure() / std::f64::consts::PI).sqrt();
        let ball = ball_distance_moment(2, p, 200).unwrap() * r.powf(4.0 + p);
        prop_assert!(moment_integral(&g, p).unwrap() >= ball * (1.0 - 1e-9));
    }

    #[test]
    fn rle_roundtrip(g in cells(3)) {
        prop_assert_eq!(GridShape::from_rle(&g.to_rle()).unwrap(), g.clone());
        let h = GridShape::from_rle(&cells_text(&g)).unwrap();
        prop_assert_eq!(h, g);
    }

    #[test]
    fn fourier_json_roundtrip(s in shape()) {
        let text = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(serde_json::from_str::<FourierShape>(&text).unwrap(), s);
    }

    #[test]
    fn necessary_condition_verdict_is_the_margin_sign(g in cells(2), lambda in 0.1f64..1.9) {
        let p = RieszParams::new(2, lambda).unwrap();
        let r = necessary_condition(&g, &p).unwrap();
        prop_assert_eq!(r.satisfied, r.margin >= 0.0);
        prop_assert_eq!(r.margin, r.bound - r.moment);
    }
}

/// The same grid written one cell per run, which the parser must merge.
fn cells_text(g: &GridShape) -> String {
    let mut out = g.to_rle().lines().next().unwrap().to_string();
    out.push('\n');
    for c in g.cells() {
        let (last, prefix) = c.split_last().unwrap();
        let labels: Vec<String> = prefix.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("{}: {last}-{last}\n", labels.join(" ")));
    }
    out
}
