use homsense_core::chronocyclic::wigner_analytic;
use homsense_core::hommodel::coincidence_prob;
use homsense_core::qfi::{
    convention_ratio, grid_variance, qfi_analytic, qfi_canonical, qfi_mixed_quadrature, qfi_mixed_two_color, GridSign,
};
use homsense_core::{BiphotonState, DetectionModel, Family, HomModel, PhaseMatchingSpec};
use proptest::prelude::*;
use std::f64::consts::PI;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

fn pure_spec() -> impl Strategy<Value = PhaseMatchingSpec> {
    (0.3f64..3.0, 0usize..6, 0.2f64..0.8, 0.5f64..4.0).prop_map(|(sigma, kind, r, x)| match kind {
        0 => PhaseMatchingSpec::gaussian(sigma, 0.0),
        1 => PhaseMatchingSpec::frequency_cat(sigma, x * sigma),
        2 => PhaseMatchingSpec::time_cat(sigma, x / sigma),
        3 => PhaseMatchingSpec::airy_grid(sigma, r, x / sigma),
        4 => PhaseMatchingSpec::frequency_airy_grid(sigma, r, x / sigma),
        _ => PhaseMatchingSpec::gaussian_comb(sigma, x * sigma, 0.2 * sigma),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outcome_probabilities_form_a_simplex(spec in pure_spec(), gamma in 0.0f64..0.95, mu in -3.0f64..3.0, tau in -3.0f64..3.0) {
        let model = HomModel::from_spec(&spec, DetectionModel::new(gamma).unwrap()).unwrap();
        let p = model.outcome_probs(mu, tau);
        prop_assert_eq!(p.p0, gamma * gamma);
        prop_assert!((p.p0 + p.p1 + p.p2 - 1.0).abs() <= 1e-12);
        prop_assert!(p.as_array().iter().all(|&x| (-1e-15..=1.0 + 1e-15).contains(&x)));
    }

    #[test]
    fn loss_never_increases_fisher_information(spec in pure_spec(), gamma in 0.0f64..0.95, mu in -2.0f64..2.0, tau in -2.0f64..2.0) {
        let ideal = HomModel::from_spec(&spec, DetectionModel::ideal()).unwrap();
        let lossy = ideal.with_detection(DetectionModel::new(gamma).unwrap()).unwrap();
        let (f0, f) = (ideal.fisher(mu, tau), lossy.fisher(mu, tau));
        prop_assert!(f.f_tt <= f0.f_tt * (1.0 + 1e-12) + 1e-300);
        prop_assert!(f.f_mm <= f0.f_mm * (1.0 + 1e-12) + 1e-300);
        prop_assert!(f.f_mt.abs() <= f0.f_mt.abs() * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn printed_and_canonical_differ_by_the_family_ratio(spec in pure_spec()) {
        prop_assume!(spec.family != Family::GaussianComb);
        let ratio = convention_ratio(spec.family).unwrap();
        let printed = qfi_analytic(&spec).unwrap();
        let canonical = qfi_canonical(&BiphotonState::new(&spec).unwrap()).unwrap();
        prop_assert!(close(printed.f_tt, ratio * canonical.f_tt, 1e-9));
        prop_assert!(close(printed.f_mm, ratio * canonical.f_mm, 1e-9));
    }

    #[test]
    fn time_cat_is_dual_to_frequency_cat(sigma in 0.2f64..5.0, delta in 0.1f64..20.0) {
        let f = qfi_analytic(&PhaseMatchingSpec::frequency_cat(sigma, delta)).unwrap();
        let t = qfi_analytic(&PhaseMatchingSpec::time_cat(1.0 / sigma, delta)).unwrap();
        prop_assert!(close(f.f_tt, t.f_mm, 1e-12));
        prop_assert!(close(f.f_mm, t.f_tt, 1e-12));
    }

    #[test]
    fn cat_delay_information_grows_with_separation(sigma in 0.2f64..5.0, delta in 0.0f64..20.0, extra in 0.01f64..5.0) {
        let a = qfi_analytic(&PhaseMatchingSpec::frequency_cat(sigma, delta * sigma)).unwrap();
        let b = qfi_analytic(&PhaseMatchingSpec::frequency_cat(sigma, (delta + extra) * sigma)).unwrap();
        prop_assert!(b.f_tt > a.f_tt);
    }

    #[test]
    fn grid_frequency_gain_grows_with_reflectivity_and_round_trip(r in 0.05f64..0.9, dr in 0.01f64..0.09, s in 0.5f64..8.0, ds in 0.1f64..2.0) {
        let base = qfi_analytic(&PhaseMatchingSpec::airy_grid(1.0, r, s)).unwrap().f_mm;
        let more_r = qfi_analytic(&PhaseMatchingSpec::airy_grid(1.0, r + dr, s)).unwrap().f_mm;
        let more_s = qfi_analytic(&PhaseMatchingSpec::airy_grid(1.0, r, s + ds)).unwrap().f_mm;
        prop_assert!(more_r > base);
        prop_assert!(more_s > base);
        let v = grid_variance(r, s, GridSign::Sum).unwrap();
        prop_assert!(v.value > 0.0 && !v.clamped);
    }

    #[test]
    fn mixture_formula_matches_quadrature(sigma in 0.5f64..2.0, delta in 1.0f64..10.0, tau in 0.0f64..1.0) {
        let spec = PhaseMatchingSpec::two_color_mixture(sigma, delta * sigma);
        let a = qfi_mixed_two_color(&spec, tau).unwrap();
        let b = qfi_mixed_quadrature(&spec, tau).unwrap();
        prop_assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0));
    }

    #[test]
    fn bunching_witness_matches_wigner_sign(spec in pure_spec(), mu in -3.0f64..3.0, tau in -3.0f64..3.0) {
        let state = BiphotonState::new(&spec).unwrap();
        let w = wigner_analytic(&state, mu, tau);
        let p = coincidence_prob(&state, mu, tau);
        prop_assert!((p > 0.5) == (w < 0.0) || (PI * w).abs() < 1e-9);
    }

    #[test]
    fn even_states_have_point_symmetric_wigner(spec in pure_spec(), w in -3.0f64..3.0, t in -3.0f64..3.0) {
        let state = BiphotonState::new(&spec).unwrap();
        prop_assume!(state.is_even());
        let a = wigner_analytic(&state, w, t);
        let b = wigner_analytic(&state, -w, -t);
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn wigner_is_bounded_by_inverse_pi(spec in pure_spec(), w in -4.0f64..4.0, t in -4.0f64..4.0) {
        let state = BiphotonState::new(&spec).unwrap();
        prop_assert!(wigner_analytic(&state, w, t).abs() <= 1.0 / PI + 1e-12);
    }
}
