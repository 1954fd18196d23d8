use proptest::prelude::*;
use scenerywalk::lattice::Site;
use scenerywalk::scenery::{box_max, exceedance_prob, level_set, pareto_tail, Scenery, SceneryField};
use scenerywalk::stats::quantile;

#[test]
fn box_max_grows_like_site_count_to_one_over_alpha() {
    // Extreme values of N Pareto(1) draws are of order N.
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let mut ratios: Vec<f64> = (0..15)
            .map(|s| {
                let f = SceneryField::pareto(1.0, 1, 900 + s).unwrap();
                box_max(&f, n).0.ln() / ((2 * n + 1) as f64).ln()
            })
            .collect();
        let med = quantile(&mut ratios, 0.5);
        assert!((med - 1.0).abs() <= 0.1, "n = {n}: median ratio {med}");
    }
}

#[test]
fn radius_zero_is_the_origin() {
    let f = SceneryField::pareto(0.7, 3, 4).unwrap();
    let (v, x) = box_max(&f, 0);
    assert_eq!(x, Site::origin(3));
    assert_eq!(v, f.value(&Site::origin(3)));
}

#[test]
fn level_set_extremes() {
    let f = SceneryField::pareto(1.3, 2, 8).unwrap();
    assert_eq!(level_set(&f, 4, 1.0, 1000).unwrap().len(), 81);
    let (m, _) = box_max(&f, 4);
    assert!(level_set(&f, 4, m + 1.0, 1000).unwrap().is_empty());
}

#[test]
fn exceedance_by_hand() {
    assert_eq!(exceedance_prob(1.0, 1, 0, 2.0).unwrap(), 0.5);
    assert_eq!(exceedance_prob(1.5, 2, 3, 1.0).unwrap(), 1.0);
    assert!((exceedance_prob(2.0, 1, 1, 10.0).unwrap() - 0.029701).abs() < 1e-12);
}

#[test]
fn single_site_tail_matches_law() {
    // Fraction of sites above r against r^(−α).
    let f = SceneryField::pareto(0.5, 2, 31).unwrap();
    let n = 200_000;
    let r = 9.0;
    let hits = (0..n)
        .filter(|&i| f.value(&Site::new(&[i / 500, i % 500])) > r)
        .count() as f64;
    let p = pareto_tail(r, 0.5);
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    assert!((hits / n as f64 - p).abs() < 4.0 * sigma);
}

fn site(dim: usize) -> impl Strategy<Value = Site> {
    prop::collection::vec(-1_000_000i64..1_000_000, dim).prop_map(|c| Site::new(&c))
}

proptest! {
    #[test]
    fn queries_agree_in_any_order(seed in any::<u64>(), alpha in 0.1f64..4.0, xs in prop::collection::vec(site(2), 1..20)) {
        let f = SceneryField::pareto(alpha, 2, seed).unwrap();
        let forward: Vec<f64> = xs.iter().map(|x| f.value(x)).collect();
        let backward: Vec<f64> = xs.iter().rev().map(|x| f.value(x)).collect();
        for (a, b) in forward.iter().zip(backward.iter().rev()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        prop_assert!(forward.iter().all(|&v| v >= 1.0 && v.is_finite()));
    }

    #[test]
    fn larger_alpha_gives_smaller_values(seed in any::<u64>(), x in site(3), a in 0.2f64..3.0, b in 0.2f64..3.0) {
        let f = SceneryField::pareto(a.min(b), 3, seed).unwrap();
        let g = f.with_alpha(a.max(b));
        prop_assert!(g.value(&x) <= f.value(&x));
    }

    #[test]
    fn exceedance_is_a_probability_decreasing_in_s(alpha in 0.1f64..4.0, r in 0u64..20, s in 1.0f64..1e6) {
        let p = exceedance_prob(alpha, 2, r, s).unwrap();
        let q = exceedance_prob(alpha, 2, r, s * 2.0).unwrap();
        prop_assert!((0.0..=1.0).contains(&p) && q <= p);
    }
}
