use proptest::prelude::*;
use scenerywalk::exponents::{
    optimal_mu, p_exponent, p_first_regime, p_or_zero, phase_diagram, q_breakpoints,
    q_closed_form, q_regime, q_variational, DiagramKind, Regime,
};

fn q(alpha: f64, delta: f64, dim: usize) -> f64 {
    q_closed_form(alpha, delta, dim).unwrap().value_or_zero()
}

#[test]
fn single_point_row() {
    let rows = phase_diagram(&[1.0], &[1.5], DiagramKind::P, 1).unwrap();
    let r = rows.iter().find(|r| r.x == 1.5 && !r.regime.starts_with("boundary")).unwrap();
    assert_eq!((r.value, r.regime.as_str()), (Some(0.5), "first"));
}

#[test]
fn q_diagram_lists_boundaries() {
    let grid: Vec<f64> = (0..=40).map(|i| i as f64 * 0.1).collect();
    let rows = phase_diagram(&[2.0], &grid, DiagramKind::Q, 1).unwrap();
    let b = q_breakpoints(2.0, 1);
    for x in [b.first_end, b.second_end, b.third_end, b.fourth_end] {
        assert!(rows.iter().any(|r| r.x == x && r.regime.starts_with("boundary:")), "{x}");
    }
    assert!(rows.windows(2).all(|w| w[0].x <= w[1].x));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn p_is_nondecreasing_in_rho(alpha in 0.05f64..4.0, dim in 1usize..=4, a in 0.01f64..6.0, b in 0.01f64..6.0) {
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(p_or_zero(alpha, lo, dim) <= p_or_zero(alpha, hi, dim) + 1e-12);
    }

    #[test]
    fn p_is_nondecreasing_in_alpha(rho in 0.01f64..6.0, dim in 1usize..=4, a in 0.05f64..4.0, b in 0.05f64..4.0) {
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(p_or_zero(lo, rho, dim) <= p_or_zero(hi, rho, dim) + 1e-12);
    }

    #[test]
    fn p_is_continuous_across_the_second_regime(alpha in 0.05f64..4.0, dim in 1usize..=4) {
        let (_, hi) = p_first_regime(alpha, dim);
        let below = p_or_zero(alpha, hi, dim);
        let above = p_or_zero(alpha, hi * (1.0 + 1e-12), dim);
        prop_assert!((below - 1.0).abs() < 1e-9 && (above - below).abs() < 1e-9);
    }

    #[test]
    fn polynomial_regime_is_exactly_below_the_first(alpha in 0.05f64..4.0, dim in 1usize..=4, rho in 0.01f64..6.0) {
        let (lo, _) = p_first_regime(alpha, dim);
        let r = p_exponent(alpha, rho, dim).unwrap();
        prop_assert_eq!(r.regime == Regime::Polynomial, rho < lo);
        prop_assert!(r.value().is_none_or(|v| v >= 0.0));
    }

    #[test]
    fn q_regimes_partition_the_half_line(alpha in 0.05f64..4.0, dim in 1usize..=4, delta in 0.0f64..10.0) {
        let b = q_breakpoints(alpha, dim);
        let regime = q_regime(alpha, delta, dim);
        let inside = match regime {
            Regime::First => delta < b.first_end,
            Regime::Second => delta >= b.first_end && delta < b.second_end,
            Regime::Third => delta >= b.third_start && delta <= b.third_end,
            Regime::Fourth => delta > b.third_end && delta < b.fourth_end,
            Regime::Fifth => delta >= b.fourth_end,
            _ => false,
        };
        prop_assert!(inside, "{delta} in {regime:?} with {b:?}");
    }

    #[test]
    fn q_is_monotone_and_bounded(alpha in 0.05f64..4.0, dim in 1usize..=4, a in 0.0f64..8.0, b in 0.0f64..8.0) {
        let (lo, hi) = (a.min(b), a.max(b));
        let (ql, qh) = (q(alpha, lo, dim), q(alpha, hi, dim));
        prop_assert!(ql <= qh + 1e-12);
        prop_assert!((0.0..=lo + 1e-12).contains(&ql));
    }

    #[test]
    fn q_is_nondecreasing_in_alpha(delta in 0.0f64..6.0, dim in 1usize..=4, a in 0.05f64..4.0, b in 0.05f64..4.0) {
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(q(lo, delta, dim) <= q(hi, delta, dim) + 1e-9);
    }

    #[test]
    fn variational_formula_matches_closed_form(alpha in 0.05f64..4.0, dim in 1usize..=4, delta in 0.0f64..4.0) {
        let v = q_variational(alpha, delta, dim, 1e-13).unwrap();
        prop_assert!((v - q(alpha, delta, dim)).abs() < 1e-9, "{v} vs {}", q(alpha, delta, dim));
    }

    #[test]
    fn optimal_radius_lies_in_the_unit_half(alpha in 0.05f64..4.0, dim in 1usize..=4, s in 0.0f64..1.0) {
        let (lo, hi) = p_first_regime(alpha, dim);
        let rho = lo + (hi - lo) * s;
        prop_assume!(rho > lo);
        let mu = optimal_mu(alpha, rho, dim).unwrap();
        prop_assert!(mu > 0.5 - 1e-12 && mu <= 1.0 + 1e-12, "mu = {mu}");
    }
}
