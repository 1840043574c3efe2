use proptest::prelude::*;

use uav_pathloss::geometry::{
    analyze_link, facade_hit_test, ground_reflection_length, los_distance, wall_reflection_length,
};
use uav_pathloss::pathloss::{
    fspl, path_loss_bu, phase_difference, sweep_horizontal, sweep_vertical, RadioConfig,
    StreetSetup, SweepRange,
};
use uav_pathloss::scenario::{derive_grid, BuiltUpParams, ConstantHeights, RayleighHeights};
use uav_pathloss::stats::{ecdf, normal_fit};
use uav_pathloss::{GridLayout, LinkGeometry};

fn layout() -> impl Strategy<Value = GridLayout> {
    (1.0..80.0f64, 0.5..40.0f64).prop_map(|(w, s)| GridLayout::new(w, s).unwrap())
}

fn link() -> impl Strategy<Value = LinkGeometry> {
    (
        0.0..300.0f64,
        0.1..5.0f64,
        0.1..400.0f64,
        layout(),
        -500.0..500.0f64,
    )
        .prop_map(|(d, hv, dh, l, xv)| {
            LinkGeometry::new(d, hv + dh, hv, l)
                .unwrap()
                .with_vehicle_x(xv)
        })
}

proptest! {
    #[test]
    fn grid_consistency(alpha in 1e-3..=1.0f64, beta in 1.0..1e6f64) {
        let g = derive_grid(&BuiltUpParams::new(alpha, beta, 10.0).unwrap()).unwrap();
        let ratio = (g.width / g.period()).powi(2);
        prop_assert!((ratio - alpha).abs() <= 1e-9 * alpha);
        let pitch = 1000.0 / beta.sqrt();
        prop_assert!((g.period() - pitch).abs() <= 1e-9 * pitch);
        prop_assert!(g.street >= 0.0);
    }

    #[test]
    fn reflections_never_shorter_than_los(g in link()) {
        let d = los_distance(&g);
        prop_assert!(ground_reflection_length(&g) >= d);
        prop_assert!(wall_reflection_length(&g) >= d);
    }

    #[test]
    fn facade_test_is_periodic(x in -1e4..1e4f64, n in -20i64..20, l in layout()) {
        let a = facade_hit_test(x, &l);
        let b = facade_hit_test(x + n as f64 * l.period(), &l);
        // points within rounding distance of an edge may legitimately flip
        let rem = x - (x / l.period()).floor() * l.period();
        let near_edge = rem.abs() < 1e-6 || (rem - l.width).abs() < 1e-6 || (rem - l.period()).abs() < 1e-6;
        prop_assume!(!near_edge);
        prop_assert_eq!(a.on_facade, b.on_facade);
        prop_assert_eq!(a.block + n, b.block);
    }

    #[test]
    fn wr_count_periodic_in_distance(d in 0.0..400.0f64, l in layout()) {
        let heights = ConstantHeights(1e6);
        let g1 = LinkGeometry::new(d, 50.0, 1.5, l).unwrap();
        let g2 = LinkGeometry::new(d + 2.0 * l.period(), 50.0, 1.5, l).unwrap();
        let mid = d / 2.0;
        let rem = mid - (mid / l.period()).floor() * l.period();
        prop_assume!(rem.abs() > 1e-6 && (rem - l.width).abs() > 1e-6 && (rem - l.period()).abs() > 1e-6);
        prop_assert_eq!(analyze_link(&g1, &heights).num_wr, analyze_link(&g2, &heights).num_wr);
    }

    #[test]
    fn wr_count_non_increasing_in_altitude(d in 0.0..200.0f64, seed in any::<u64>(), l in layout()) {
        let heights = RayleighHeights::new(20.0, seed).unwrap();
        let street = StreetSetup::new(l, 1.5);
        let range = SweepRange::new(2.0, 200.0, 0.5).unwrap();
        let radio = RadioConfig::ideal(4e9).unwrap();
        let s = sweep_vertical(&range, d, &street, &heights, &radio).unwrap();
        prop_assert!(s.windows(2).all(|w| w[1].num_wr <= w[0].num_wr));
        // steps only at the per-side critical altitudes
        let b = analyze_link(&street.link(d, 100.0).unwrap(), &heights);
        let thresholds: Vec<f64> = b.sides.iter().filter_map(|p| p.critical_altitude).collect();
        for w in s.windows(2) {
            if w[1].num_wr != w[0].num_wr {
                prop_assert!(thresholds.iter().any(|&t| w[0].altitude <= t && t < w[1].altitude));
            }
        }
    }

    #[test]
    fn phase_difference_non_positive(d in 0.1..1e4f64, extra in 0.0..100.0f64, f in 1e8..1e11f64) {
        let lambda = 299_792_458.0 / f;
        prop_assert!(phase_difference(d, d + extra, lambda).unwrap() <= 0.0);
    }

    #[test]
    fn free_space_reduction(g in link(), seed in any::<u64>()) {
        let radio = RadioConfig::new(4e9, 0.0, 0.0).unwrap();
        let heights = RayleighHeights::new(15.0, seed).unwrap();
        let s = path_loss_bu(&g, &heights, &radio).unwrap();
        prop_assert_eq!(s.pl_db, fspl(s.d_los, radio.wavelength()).unwrap());
        prop_assert!(!s.clipped);
    }

    #[test]
    fn amplitude_bound(g in link(), seed in any::<u64>(), gb in 0.0..=1.0f64, gg in 0.0..=1.0f64) {
        let radio = RadioConfig::new(4e9, gb, gg).unwrap();
        let heights = RayleighHeights::new(30.0, seed).unwrap();
        let s = path_loss_bu(&g, &heights, &radio).unwrap();
        let free = fspl(s.d_los, radio.wavelength()).unwrap();
        prop_assert!(s.pl_db >= free - 20.0 * (1.0 + gg + 2.0 * gb).log10() - 1e-9);
        let floor = 1.0 - gg - 2.0 * gb;
        if floor > 0.0 && !s.clipped {
            prop_assert!(s.pl_db <= free - 20.0 * floor.log10() + 1e-9);
        }
    }

    #[test]
    fn two_ray_reduction_without_wall_reflections(d in 0.0..300.0f64, h in 5.0..300.0f64) {
        // buildings too low to reflect: only the direct ray and ground bounce remain
        let l = GridLayout::new(24.5, 20.2).unwrap();
        let g = LinkGeometry::new(d, h, 1.5, l).unwrap();
        let radio = RadioConfig::ideal(4e9).unwrap();
        let s = path_loss_bu(&g, &ConstantHeights(0.5), &radio).unwrap();
        prop_assert_eq!(s.num_wr, 0);
        let lambda = radio.wavelength();
        let amp = 2.0 * (s.dphi_g / 2.0).cos().abs();
        prop_assume!(amp > 1e-6);
        let expected = 20.0 * (4.0 * std::f64::consts::PI * s.d_los / lambda).log10() - 20.0 * amp.log10();
        prop_assert!((s.pl_db - expected).abs() < 1e-6);
    }

    #[test]
    fn ecdf_monotone(values in prop::collection::vec(-200.0..200.0f64, 1..200)) {
        let e = ecdf(&values).unwrap();
        prop_assert!(e.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
        prop_assert_eq!(e.last().unwrap().1, 1.0);
    }

    #[test]
    fn normal_fit_equivariance(values in prop::collection::vec(50.0..120.0f64, 2..100), c in -50.0..50.0f64, k in 0.1..10.0f64) {
        let f = normal_fit(&values).unwrap();
        let shifted: Vec<f64> = values.iter().map(|v| v + c).collect();
        let fs = normal_fit(&shifted).unwrap();
        prop_assert!((fs.mu - (f.mu + c)).abs() < 1e-9);
        prop_assert!((fs.sigma - f.sigma).abs() < 1e-9);
        let scaled: Vec<f64> = values.iter().map(|v| v * k).collect();
        let fk = normal_fit(&scaled).unwrap();
        prop_assert!((fk.sigma - k * f.sigma).abs() < 1e-9 * (1.0 + k * f.sigma));
    }
}

#[test]
fn horizontal_sweep_is_deterministic() {
    let l = derive_grid(&BuiltUpParams::new(0.3, 500.0, 15.0).unwrap()).unwrap();
    let street = StreetSetup::new(l, 1.5);
    let range = SweepRange::new(0.0, 100.0, 0.1).unwrap();
    let radio = RadioConfig::ideal(4e9).unwrap();
    let h = RayleighHeights::new(15.0, 99).unwrap();
    let a = sweep_horizontal(&range, 50.0, &street, &h, &radio).unwrap();
    let b = sweep_horizontal(
        &range,
        50.0,
        &street,
        &RayleighHeights::new(15.0, 99).unwrap(),
        &radio,
    )
    .unwrap();
    assert_eq!(a.len(), 1001);
    assert!(a
        .iter()
        .zip(&b)
        .all(|(x, y)| x.pl_db.to_bits() == y.pl_db.to_bits()));
    assert!(a.iter().all(|s| s.num_wr <= 2));
}

#[test]
fn on_facade_pattern_has_period_two_grid_pitches() {
    // binary-exact layout and step so midpoints never straddle an edge by rounding;
    // tall buildings everywhere make the WR count 2 on walls and 0 over gaps
    let l = GridLayout::new(24.0, 20.0).unwrap();
    let street = StreetSetup::new(l, 1.5);
    let range = SweepRange::new(0.0, 400.0, 0.25).unwrap();
    let radio = RadioConfig::ideal(4e9).unwrap();
    let s = sweep_horizontal(&range, 50.0, &street, &ConstantHeights(1e6), &radio).unwrap();
    let shift = (2.0 * l.period() / 0.25) as usize;
    for i in 0..s.len() - shift {
        assert_eq!(s[i].num_wr, s[i + shift].num_wr, "D={}", s[i].distance);
    }
    assert!(s.iter().all(|p| p.num_wr == 0 || p.num_wr == 2));
    // a shift of W+S in D moves the midpoint by only half a pitch
    let half = shift / 2;
    assert!((0..s.len() - half).any(|i| s[i].num_wr != s[i + half].num_wr));
}

#[test]
fn normal_fit_round_trip() {
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    let dist = Normal::new(73.5, 8.03).unwrap();
    let xs: Vec<f64> = (0..100_000).map(|_| dist.sample(&mut rng)).collect();
    let f = normal_fit(&xs).unwrap();
    assert!((f.mu - 73.5).abs() < 0.1, "{}", f.mu);
    assert!((f.sigma - 8.03).abs() < 0.1, "{}", f.sigma);
}
