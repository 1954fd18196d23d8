use proptest::prelude::*;
use rayon::prelude::*;
use scenerywalk::calibration::Calibration;
use scenerywalk::ctrw::{
    hk_envelope, run_vsrw, simulate_srw, simulate_vsrw, srw_log_transition, time_change_compose,
    transition_prob_mc, WalkPath,
};
use scenerywalk::functional::{
    additive_functional, clock, functional_record, level_occupations, local_times, slice_index,
};
use scenerywalk::lattice::Site;
use scenerywalk::montecarlo::origin_local_times;
use scenerywalk::rng::replica_stream;
use scenerywalk::scenery::{Scenery, SceneryField, TableScenery};
use scenerywalk::stats::mean_stderr;

#[test]
fn jump_count_is_poisson() {
    let counts: Vec<f64> = (0..10_000)
        .into_par_iter()
        .map(|i| simulate_srw(1, 1.0, 100.0, &mut replica_stream(71, i)).jumps() as f64)
        .collect();
    let (m, _) = mean_stderr(&counts);
    // Poisson(100): standard error of the mean is 0.1.
    assert!((m - 100.0).abs() < 0.4, "mean jumps {m}");
}

#[test]
fn displacement_variance_is_rate_times_t() {
    let t = 1e4;
    let xs: Vec<f64> = (0..5000)
        .into_par_iter()
        .map(|i| simulate_srw(1, 1.0, t, &mut replica_stream(72, i)).end().coord(0) as f64)
        .collect();
    let var = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
    assert!((var / t - 1.0).abs() < 0.05, "Var/t = {}", var / t);
}

#[test]
fn unit_field_vsrw_jumps_at_rate_four() {
    let f = SceneryField::constant(1.0, 1).unwrap();
    let t = 100.0;
    let counts: Vec<f64> = (0..10_000)
        .into_par_iter()
        .map(|i| simulate_vsrw(&f, t, &mut replica_stream(73, i)).jumps() as f64)
        .collect();
    let (m, se) = mean_stderr(&counts);
    assert!((m - 4.0 * t).abs() < 3.0 * se.max((4.0 * t / 10_000.0).sqrt()), "{m}");
}

#[test]
fn vertical_fraction_is_c_over_c_plus_d() {
    let (c, d) = (3.0, 2usize);
    let f = SceneryField::constant(c, d).unwrap();
    let (mut vertical, mut total) = (0u64, 0u64);
    for i in 0..2000 {
        let mut prev = Site::origin(d + 1);
        run_vsrw(&f, prev, 20.0, &mut replica_stream(74, i), |_, x| {
            vertical += (x.coord(0) != prev.coord(0)) as u64;
            total += 1;
            prev = *x;
        });
    }
    let p = c / (c + d as f64);
    let frac = vertical as f64 / total as f64;
    let sigma = (p * (1.0 - p) / total as f64).sqrt();
    assert!((frac - p).abs() < 3.0 * sigma, "{frac} vs {p}");
}

#[test]
fn unit_field_clock_is_the_identity() {
    let f = SceneryField::constant(1.0, 2).unwrap();
    let mut rng = replica_stream(75, 0);
    let transverse = simulate_srw(2, 4.0, 30.0, &mut rng);
    let c = clock(&f, &transverse);
    assert!((c.eval(30.0) - 30.0).abs() < 1e-12);
    let vertical = simulate_srw(1, 2.0, 30.0, &mut rng);
    let x = time_change_compose(&vertical, &c, &transverse, 30.0).unwrap();
    assert_eq!(x.coord(0), vertical.end().coord(0));
    assert_eq!(&x.coords()[1..], transverse.end().coords());
}

#[test]
fn frozen_transverse_clock() {
    let mut f = TableScenery::new(1, 1.0);
    f.set(Site::new(&[0]), 5.0);
    let frozen = WalkPath::stationary(Site::new(&[0]), 2.0);
    assert_eq!(clock(&f, &frozen).eval(2.0), 10.0);
    let short = WalkPath::stationary(Site::new(&[0]), 3.0);
    assert!(time_change_compose(&short, &clock(&f, &frozen), &frozen, 2.0).is_err());
}

#[test]
fn transition_probability_at_time_one() {
    let est = transition_prob_mc(1.0, 1.0, &Site::origin(1), 100_000, 76).unwrap();
    let exact = srw_log_transition(1.0, 1.0, &Site::origin(1)).exp();
    assert!((exact - 0.465_759_607_593_640_3).abs() < 1e-13);
    assert!((est.probability - exact).abs() < 3.0 * est.stderr());
}

#[test]
fn tiny_times_concentrate_at_the_start() {
    let at0 = transition_prob_mc(1.0, 1e-9, &Site::origin(2), 1000, 77).unwrap();
    let at1 = transition_prob_mc(1.0, 1e-9, &Site::new(&[1, 0]), 1000, 77).unwrap();
    assert_eq!(at0.probability, 1.0);
    assert_eq!(at1.probability, 0.0);
}

#[test]
fn local_time_at_origin_scales_like_root_t() {
    let sample = |t: f64, seed: u64| {
        let v: Vec<f64> = (0..10_000)
            .into_par_iter()
            .map(|i| origin_local_times(1, 1.0, &[t], &mut replica_stream(seed, i))[0])
            .collect();
        mean_stderr(&v)
    };
    let (a, sa) = sample(1e4, 78);
    let (b, sb) = sample(4e4, 79);
    let diff = b - 2.0 * a;
    assert!(diff.abs() < 3.0 * (sb * sb + 4.0 * sa * sa).sqrt(), "{b} vs 2·{a}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn calibrated_envelope_sandwiches_the_kernel(
        dim in 1usize..=3,
        t in 1.0f64..1000.0,
        frac in prop::collection::vec(-4.0f64..4.0, 3),
    ) {
        let c = Calibration::pilot().heat_kernel.constants();
        let coords: Vec<i64> = frac[..dim].iter().map(|f| (f * t).round() as i64).collect();
        let x = Site::new(&coords);
        let exact = srw_log_transition(1.0, t, &x);
        let (lo, hi) = hk_envelope(t, &x, &c).unwrap();
        prop_assert!(lo <= exact && exact <= hi, "{lo} ≤ {exact} ≤ {hi} at t={t}, x={x:?}");
    }

    #[test]
    fn generated_paths_are_valid(seed in any::<u64>(), dim in 1usize..=3, t in 0.0f64..200.0) {
        let mut rng = replica_stream(seed, 0);
        simulate_srw(dim, 1.0, t, &mut rng).validate().unwrap();
        let f = SceneryField::pareto(0.8, dim, seed).unwrap();
        simulate_vsrw(&f, t / 10.0, &mut rng).validate().unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn time_and_functional_are_conserved(seed in any::<u64>(), dim in 1usize..=2, alpha in 0.3f64..3.0, t in 0.5f64..100.0) {
        let f = SceneryField::pareto(alpha, dim, seed).unwrap();
        let p = simulate_srw(dim, 1.0, t, &mut replica_stream(seed, 1));
        let lt = local_times(&p, t).unwrap();
        prop_assert!((lt.total() - t).abs() <= 1e-9 * t);
        let rec = functional_record(&f, &p, t).unwrap();
        let direct = additive_functional(&f, &p, t).unwrap();
        prop_assert!((rec.a_t - direct).abs() <= 1e-9 * direct);
        prop_assert!((clock(&f, &p).eval(t) - direct).abs() <= 1e-9 * direct);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn functional_is_additive_under_splicing(seed in any::<u64>(), s in 0.1f64..50.0, t in 0.1f64..50.0) {
        let f = SceneryField::pareto(0.9, 1, seed).unwrap();
        let p = simulate_srw(1, 1.0, s + t, &mut replica_stream(seed, 2));
        let tail = WalkPath {
            dim: 1,
            start: p.position_at(s),
            events: p.events.iter().filter(|e| e.0 > s).map(|&(u, x)| (u - s, x)).collect(),
            horizon: t,
        };
        let whole = additive_functional(&f, &p, s + t).unwrap();
        let parts = additive_functional(&f, &p, s).unwrap() + additive_functional(&f, &tail, t).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-9 * whole);
    }

    #[test]
    fn inverse_clock_undoes_the_clock(seed in any::<u64>(), u in 0.0f64..40.0) {
        let f = SceneryField::pareto(1.2, 1, seed).unwrap();
        let p = simulate_srw(1, 1.0, 40.0, &mut replica_stream(seed, 3));
        let c = clock(&f, &p);
        let back = c.inverse(c.eval(u)).unwrap();
        prop_assert!((back - u).abs() <= 1e-9 * u.max(1.0));
    }

    #[test]
    fn slices_sandwich_the_functional(seed in any::<u64>(), eps in 0.05f64..0.5, t in 2.0f64..100.0) {
        let f = SceneryField::pareto(0.6, 1, seed).unwrap();
        let p = simulate_srw(1, 1.0, t, &mut replica_stream(seed, 4));
        let zmax = local_times(&p, t).unwrap().times.keys().map(|x| f.value(x)).fold(1.0, f64::max);
        let k_max = slice_index(zmax, t, eps, usize::MAX) + 1;
        let occ = level_occupations(&f, &p, t, eps, k_max).unwrap();
        prop_assert!((occ.iter().sum::<f64>() - t).abs() <= 1e-9 * t);
        let a = additive_functional(&f, &p, t).unwrap();
        let lower: f64 = occ.iter().enumerate().map(|(k, l)| t.powf(k as f64 * eps) * l).sum();
        let upper: f64 = occ.iter().enumerate().map(|(k, l)| t.powf((k + 1) as f64 * eps) * l).sum();
        prop_assert!(lower <= a * (1.0 + 1e-12) && a <= upper * (1.0 + 1e-12));
    }
}
