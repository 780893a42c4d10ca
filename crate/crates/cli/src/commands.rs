use std::fmt::Write as _;

use homsense_core::chronocyclic::{wigner_grid_with, WignerMethod};
use homsense_core::estimator::{cr_saturation_study, mle_estimate, simulate_trials};
use homsense_core::qfi::{invert, preset_rows, qcr_table, qfi, qfi_canonical, QcrRow};
use homsense_core::{BiphotonState, DetectionModel, HomModel, PhaseMatchingSpec};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{Format, Method, RunConfig, SweepAxis, Task};
use crate::CliError;

fn num(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn model(cfg: &RunConfig) -> Result<HomModel, CliError> {
    Ok(HomModel::from_spec(cfg.state()?, DetectionModel::new(cfg.gamma)?)?)
}

/// Parameter columns of a spec, in a fixed order, skipping unset ones.
fn spec_params(spec: &PhaseMatchingSpec) -> Vec<(&'static str, f64)> {
    let mut p = vec![("sigma", spec.sigma)];
    let optional = [
        ("delta", spec.delta),
        ("delta_t", spec.delta_t),
        ("reflectivity", spec.reflectivity),
        ("tau_bar", spec.tau_bar),
        ("omega_bar", spec.omega_bar),
        ("peak_width", spec.peak_width),
        ("freq_chirp", spec.freq_chirp.map(|c| c.sign.value() * c.c)),
        ("time_chirp", spec.time_chirp.map(|c| c.sign.value() * c.c)),
    ];
    p.extend(optional.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))));
    if spec.omega0 != 0.0 {
        p.push(("omega0", spec.omega0));
    }
    p
}

/// Output body (without the provenance header) of the configured task.
pub fn execute(cfg: &RunConfig) -> Result<String, CliError> {
    if cfg.format == Format::Long && !matches!(cfg.task, Task::Wigner { .. }) {
        return Err(CliError::Validation("--format long is only available for wigner".into()));
    }
    if let Some(spec) = &cfg.state {
        spec.validate()?;
    }
    match &cfg.task {
        Task::Qfi { repeats } => cmd_qfi(cfg, *repeats),
        Task::Tables { preset } => cmd_table(cfg, &qcr_table(&preset_rows(*preset), 1, cfg.convention)?),
        Task::FiSweep { axis, range, fixed } => cmd_fi_sweep(cfg, *axis, &range.points(), *fixed),
        Task::Wigner { omega, time, method } => cmd_wigner(cfg, omega, time, *method),
        Task::Simulate { mu, tau, trials } => {
            let c = simulate_trials(&model(cfg)?, *mu, *tau, *trials, cfg.seed)?;
            Ok(match cfg.format {
                Format::Json => to_json(&json!({ "n0": c.n0, "n1": c.n1, "n2": c.n2, "seed": cfg.seed })),
                _ => format!("n0,n1,n2,seed\n{},{},{},{}\n", c.n0, c.n1, c.n2, cfg.seed),
            })
        }
        Task::Estimate { counts, which, window } => {
            let r = mle_estimate(counts, &model(cfg)?, *window, *which)?;
            Ok(match cfg.format {
                Format::Json => to_json(&r),
                _ => format!(
                    "which,tau_hat,mu_hat,dip_value_hat,stderr,cr_stderr,gamma_hat,converged\n{},{},{},{},{},{},{},{}\n",
                    serde_json::to_value(r.which).expect("enum").as_str().unwrap_or_default(),
                    num(r.tau_hat),
                    num(r.mu_hat),
                    num(r.dip_value_hat),
                    num(r.stderr),
                    num(r.cr_stderr),
                    opt_num(r.gamma_hat),
                    r.converged
                ),
            })
        }
        Task::CrStudy { tau, window, trials, experiments } => {
            let report = cr_saturation_study(&model(cfg)?, *tau, *window, *trials, *experiments, cfg.seed)?;
            Ok(match cfg.format {
                Format::Json => to_json(&report),
                _ => {
                    let mut out = String::from("experiment_id,tau_hat,converged\n");
                    for (i, t) in &report.estimates {
                        let _ = writeln!(out, "{i},{},{}", opt_num(*t), t.is_some());
                    }
                    let summary = json!({
                        "tau_true": report.tau_true,
                        "fisher_tau": report.fisher_tau,
                        "mean": report.mean,
                        "bias": report.bias,
                        "variance": report.variance,
                        "ratio": report.ratio,
                        "ratio_stderr": report.ratio_stderr,
                        "failure_rate": report.failure_rate,
                    });
                    let _ = writeln!(out, "# summary {summary}");
                    out
                }
            })
        }
    }
}

fn cmd_qfi(cfg: &RunConfig, repeats: u64) -> Result<String, CliError> {
    let spec = cfg.state()?;
    let q = qfi(&BiphotonState::new(spec)?, cfg.convention)?;
    let cr = invert(&q, repeats)?;
    let params = spec_params(spec);
    let family = serde_json::to_value(spec.family).expect("enum");
    let family = family.as_str().unwrap_or_default();
    if cfg.format == Format::Json {
        let p: serde_json::Map<String, serde_json::Value> = params.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
        return Ok(to_json(&json!({
            "family": family,
            "params": p,
            "unit_scale": spec.unit_scale,
            "qfi": q,
            "cramer_rao": cr,
        })));
    }
    let names: Vec<&str> = params.iter().map(|p| p.0).collect();
    let values: Vec<String> = params.iter().map(|p| num(p.1)).collect();
    Ok(format!(
        "family,{},convention,f_tt,f_mm,f_mt,var_tau,var_mu,cov\n{family},{},{},{},{},{},{},{},{}\n",
        names.join(","),
        values.join(","),
        q.convention,
        num(q.f_tt),
        num(q.f_mm),
        num(q.f_mt),
        num(cr.var_tau),
        num(cr.var_mu),
        num(cr.cov_mu_tau)
    ))
}

fn cmd_table(cfg: &RunConfig, rows: &[QcrRow]) -> Result<String, CliError> {
    if cfg.format == Format::Json {
        return Ok(to_json(&rows));
    }
    let mut out = String::from("label,family,convention,unit_scale,delta_tau_sqrt_n,delta_mu_sqrt_n,delta_mu_tau_sqrt_n\n");
    for r in rows {
        let family = serde_json::to_value(r.family).expect("enum");
        let _ = writeln!(
            out,
            "\"{}\",{},{},{},{},{},{}",
            r.label,
            family.as_str().unwrap_or_default(),
            r.convention,
            num(r.unit_scale),
            num(r.delta_tau),
            num(r.delta_mu),
            opt_num(r.delta_mu_tau)
        );
    }
    Ok(out)
}

#[derive(Serialize)]
struct SweepRow {
    param_value: f64,
    p0: f64,
    p1: f64,
    p2: f64,
    coincidence: f64,
    f_tt: f64,
    f_mm: f64,
    f_mt: f64,
}

fn cmd_fi_sweep(cfg: &RunConfig, axis: SweepAxis, xs: &[f64], fixed: f64) -> Result<String, CliError> {
    let m = model(cfg)?;
    let rows: Vec<SweepRow> = xs
        .par_iter()
        .map(|&x| {
            let (mu, tau) = match axis {
                SweepAxis::Tau => (fixed, x),
                SweepAxis::Mu => (x, fixed),
            };
            let p = m.outcome_probs(mu, tau);
            let f = m.fisher(mu, tau);
            SweepRow {
                param_value: x,
                p0: p.p0,
                p1: p.p1,
                p2: p.p2,
                coincidence: m.coincidence(mu, tau),
                f_tt: f.f_tt,
                f_mm: f.f_mm,
                f_mt: f.f_mt,
            }
        })
        .collect();
    let reference = match m.state().is_pure() {
        true => Some(qfi_canonical(m.state())?),
        false => None,
    };
    if cfg.format == Format::Json {
        return Ok(to_json(&json!({ "rows": rows, "qfi_reference": reference })));
    }
    let mut out = String::new();
    if let Some(q) = reference {
        let _ = writeln!(out, "# qfi_reference canonical f_tt={} f_mm={} f_mt={}", num(q.f_tt), num(q.f_mm), num(q.f_mt));
    }
    out.push_str("param_value,p0,p1,p2,coincidence,f_tt,f_mm,f_mt\n");
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(r.param_value),
            num(r.p0),
            num(r.p1),
            num(r.p2),
            num(r.coincidence),
            num(r.f_tt),
            num(r.f_mm),
            num(r.f_mt)
        );
    }
    Ok(out)
}

fn cmd_wigner(cfg: &RunConfig, omega: &crate::config::Range, time: &crate::config::Range, method: Method) -> Result<String, CliError> {
    let state = BiphotonState::new(cfg.state()?)?;
    let method = match method {
        Method::Analytic => WignerMethod::Analytic,
        Method::Numeric => WignerMethod::Numeric,
    };
    let grid = wigner_grid_with(&state, (omega.start, omega.stop), (time.start, time.stop), omega.count, time.count, method)?;
    match cfg.format {
        Format::Json => {
            let rows: Vec<&[f64]> = grid.values.chunks(grid.ny()).collect();
            Ok(to_json(&json!({
                "omega_axis": grid.omega_axis,
                "time_axis": grid.time_axis,
                "values": rows,
                "norm_estimate": grid.integral(),
                "unit_scale": cfg.state()?.unit_scale,
            })))
        }
        format => {
            let mut buf = Vec::new();
            grid.write_csv(&mut buf, format == Format::Long).map_err(|e| CliError::Io(e.to_string()))?;
            Ok(String::from_utf8(buf).expect("csv is utf-8"))
        }
    }
}
