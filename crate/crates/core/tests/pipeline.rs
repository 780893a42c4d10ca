use homsense_core::chronocyclic::{inverse_transform, wigner_grid};
use homsense_core::estimator::{estimate_gamma, mle_estimate, precision_profile, simulate_trials, Axis};
use homsense_core::qfi::{preset_rows, qcr_table, TablePreset};
use homsense_core::{
    BiphotonState, Convention, DetectionModel, Error, HomModel, PhaseMatchingSpec, SearchWindow, Which,
};

#[test]
fn simulated_counts_recover_the_delay() {
    let model = HomModel::from_spec(&PhaseMatchingSpec::frequency_cat(1.0, 10.0), DetectionModel::new(0.2).unwrap()).unwrap();
    let window = SearchWindow::preset(&model);
    let tau = 0.5 * window.tau_hi;
    let counts = simulate_trials(&model, 0.0, tau, 1_000_000, 3).unwrap();
    let r = mle_estimate(&counts, &model, window, Which::Tau).unwrap();
    assert!((r.tau_hat - tau).abs() < 5.0 * r.stderr, "{} vs {tau}", r.tau_hat);
    assert!((r.stderr / r.cr_stderr - 1.0).abs() < 0.05);
    assert!((estimate_gamma(&counts) - 0.2).abs() < 0.01);
}

#[test]
fn simulation_is_reproducible_from_the_seed() {
    let model = HomModel::from_spec(&PhaseMatchingSpec::gaussian(1.0, 0.0), DetectionModel::new(0.3).unwrap()).unwrap();
    let a = simulate_trials(&model, 0.1, 0.4, 5000, 42).unwrap();
    let b = simulate_trials(&model, 0.1, 0.4, 5000, 42).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.total(), 5000);
}

#[test]
fn estimation_fails_cleanly_outside_the_profile() {
    let model = HomModel::from_spec(&PhaseMatchingSpec::gaussian(1.0, 0.0), DetectionModel::ideal()).unwrap();
    let window = SearchWindow::along_tau(0.0, 0.5, 0.0);
    let counts = simulate_trials(&model, 0.0, 3.0, 10_000, 1).unwrap();
    assert!(matches!(mle_estimate(&counts, &model, window, Which::Tau), Err(Error::NoRoot { .. })));
}

#[test]
fn precision_profile_is_finite_on_the_flank() {
    let model = HomModel::from_spec(&PhaseMatchingSpec::gaussian(1.0, 0.0), DetectionModel::ideal()).unwrap();
    let p = precision_profile(&model, Axis::Tau, 0.0, 0.1, 1.5, 50).unwrap();
    assert_eq!(p.points.len(), 50);
    assert!(p.points.iter().all(|&(_, v)| v.is_finite() && v > 0.0));
}

#[test]
fn wigner_grid_inverts_to_the_amplitude() {
    let spec = PhaseMatchingSpec::frequency_cat(1.0, 2.0);
    let state = BiphotonState::new(&spec).unwrap();
    let grid = wigner_grid(&state, (-4.0, 4.0), (-12.0, 12.0), 161, 481).unwrap();
    let f0 = state.spectral(0.0).unwrap();
    for (w, f) in inverse_transform(&grid).unwrap() {
        if w.abs() <= 4.0 {
            let exact = state.spectral(w).unwrap() * (f0.conj() / f0.norm());
            assert!((f - exact).norm() < 1e-4, "{w}: {f} vs {exact}");
        }
    }
}

#[test]
fn presets_serialize_to_json() {
    let rows = qcr_table(&preset_rows(TablePreset::Table2), 1_000_000, Convention::Printed).unwrap();
    let text = serde_json::to_string(&rows).unwrap();
    let back: Vec<homsense_core::qfi::QcrRow> = serde_json::from_str(&text).unwrap();
    assert_eq!(rows, back);
    let spec = PhaseMatchingSpec::airy_grid(1.0, 0.9, 10.0).with_unit_scale(1e6);
    let back: PhaseMatchingSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(spec, back);
}
