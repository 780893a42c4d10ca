use criterion::{black_box, criterion_group, criterion_main, Criterion};
use homsense_core::chronocyclic::{wigner_analytic, wigner_numeric};
use homsense_core::estimator::{mle_estimate, simulate_trials};
use homsense_core::qfi::{grid_variance, qfi_numeric, GridSign};
use homsense_core::{BiphotonState, DetectionModel, HomModel, PhaseMatchingSpec, SearchWindow, Which};

fn wigner(c: &mut Criterion) {
    let cat = BiphotonState::new(&PhaseMatchingSpec::frequency_cat(1.0, 10.0)).unwrap();
    let grid = BiphotonState::new(&PhaseMatchingSpec::airy_grid(1.0, 0.9, 2.0)).unwrap();
    let comb = BiphotonState::new(&PhaseMatchingSpec::gaussian_comb(8.0, 1.0, 0.02)).unwrap();
    c.bench_function("wigner_analytic/cat", |b| b.iter(|| wigner_analytic(&cat, black_box(0.3), black_box(0.1))));
    c.bench_function("wigner_analytic/airy", |b| b.iter(|| wigner_analytic(&grid, black_box(0.3), black_box(2.1))));
    c.bench_function("wigner_analytic/comb", |b| b.iter(|| wigner_analytic(&comb, black_box(0.5), black_box(3.1))));
    c.bench_function("wigner_numeric/cat", |b| b.iter(|| wigner_numeric(&cat, black_box(0.3), black_box(0.1)).unwrap()));
}

fn information(c: &mut Criterion) {
    c.bench_function("grid_variance/r0.9_s10", |b| {
        b.iter(|| grid_variance(black_box(0.9), black_box(10.0), GridSign::Sum).unwrap())
    });
    let cat = BiphotonState::new(&PhaseMatchingSpec::frequency_cat(1.0, 5.0)).unwrap();
    c.bench_function("qfi_numeric/cat", |b| b.iter(|| qfi_numeric(black_box(&cat)).unwrap()));
    let model = HomModel::new(cat, DetectionModel::new(0.3).unwrap()).unwrap();
    c.bench_function("fisher/cat", |b| b.iter(|| model.fisher(black_box(0.01), black_box(0.05))));
}

fn estimation(c: &mut Criterion) {
    let model = HomModel::from_spec(&PhaseMatchingSpec::frequency_cat(1.0, 10.0), DetectionModel::new(0.3).unwrap()).unwrap();
    let window = SearchWindow::preset(&model);
    let counts = simulate_trials(&model, 0.0, 0.5 * window.tau_hi, 10_000, 1).unwrap();
    c.bench_function("mle_estimate/tau", |b| b.iter(|| mle_estimate(black_box(&counts), &model, window, Which::Tau).unwrap()));
    c.bench_function("simulate_trials/1e4", |b| b.iter(|| simulate_trials(&model, 0.0, 0.05, 10_000, black_box(7)).unwrap()));
}

criterion_group!(benches, wigner, information, estimation);
criterion_main!(benches);
