//! Quantum Fisher information over the delay/detuning pair `(τ, μ)`.
//!
//! Two conventions coexist. `Printed` evaluates the per-family closed forms
//! as they are usually quoted; `Canonical` is `4·Var(ω)`, `4·Var(t)` and
//! `-4·cov(ω, t)` of the chronocyclic Wigner function, which is the value the
//! lossless HOM Fisher information reaches for even amplitudes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::integrate;
use crate::statefamilies::{Base, BiphotonState, Family, PhaseMatchingSpec, PureState, Shear};
use crate::terms;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Printed,
    Canonical,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Printed => "printed",
            Convention::Canonical => "canonical",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(Convention::Printed),
            "canonical" => Ok(Convention::Canonical),
            other => Err(Error::InvalidSpec(format!("unknown convention {other:?}"))),
        }
    }
}

/// Symmetric 2×2 information matrix in the `(τ, μ)` basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiMatrix {
    pub f_tt: f64,
    pub f_mm: f64,
    pub f_mt: f64,
    pub convention: Convention,
}

impl QfiMatrix {
    pub fn new(f_tt: f64, f_mm: f64, f_mt: f64, convention: Convention) -> Self {
        QfiMatrix { f_tt, f_mm, f_mt, convention }
    }

    pub fn determinant(&self) -> f64 {
        self.f_tt * self.f_mm - self.f_mt * self.f_mt
    }

    pub fn scaled(&self, k: f64) -> QfiMatrix {
        QfiMatrix { f_tt: k * self.f_tt, f_mm: k * self.f_mm, f_mt: k * self.f_mt, ..*self }
    }
}

/// Quantum Cramér-Rao covariance for `n_repeats` independent repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrCovariance {
    pub var_tau: f64,
    pub var_mu: f64,
    pub cov_mu_tau: f64,
    pub n_repeats: u64,
}

/// First and second moments of a chronocyclic Wigner function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceMoments {
    pub mean_omega: f64,
    pub mean_t: f64,
    pub var_omega: f64,
    pub var_t: f64,
    pub cov: f64,
}

impl PhaseSpaceMoments {
    fn from_raw(norm: f64, w1: f64, w2: f64, t1: f64, t2: f64, wt: f64) -> Self {
        let (mw, mt) = (w1 / norm, t1 / norm);
        PhaseSpaceMoments {
            mean_omega: mw,
            mean_t: mt,
            var_omega: w2 / norm - mw * mw,
            var_t: t2 / norm - mt * mt,
            cov: wt / norm - mw * mt,
        }
    }

    /// Canonical QFI `(4·Var ω, 4·Var t, -4·cov)`.
    pub fn qfi(&self) -> QfiMatrix {
        QfiMatrix::new(4.0 * self.var_omega, 4.0 * self.var_t, -4.0 * self.cov, Convention::Canonical)
    }

    fn sheared(self, shear: Shear) -> Self {
        match shear {
            Shear::None => self,
            Shear::Frequency { y, center } => PhaseSpaceMoments {
                mean_t: self.mean_t - y * (self.mean_omega - center),
                var_t: self.var_t + y * y * self.var_omega - 2.0 * y * self.cov,
                cov: self.cov - y * self.var_omega,
                ..self
            },
            Shear::Time { kappa } => PhaseSpaceMoments {
                mean_omega: self.mean_omega - kappa * self.mean_t,
                var_omega: self.var_omega + kappa * kappa * self.var_t - 2.0 * kappa * self.cov,
                cov: self.cov - kappa * self.var_t,
                ..self
            },
        }
    }
}

/// Which lattice combination a grid moment refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridSign {
    /// `n + m`
    Sum,
    /// `n - m`
    Difference,
}

/// A grid variance, with a flag set when an underflowing value was clamped to 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridVariance {
    pub value: f64,
    pub clamped: bool,
}

const GRID_BAND_CAP: usize = 10_000;
const UNDERFLOW_CLAMP: f64 = 1e-300;

/// Sums over the cavity lattice with weights `R^{n+m} e^{-(n-m)² s²}`,
/// resummed along each diagonal band `k = |n - m|`. Returns
/// `(Σw, Σw(n+m), Σw(n+m)², Σw(n-m)²)`.
fn grid_sums(r: f64, s: f64) -> Result<[f64; 4]> {
    if !(0.0..1.0).contains(&r) || !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidSpec(format!("grid moments need R in [0, 1) and s >= 0, got R = {r}, s = {s}")));
    }
    let x = r * r;
    let g0 = 1.0 / (1.0 - x);
    let g1 = x * g0 * g0;
    let g2 = x * (1.0 + x) * g0 * g0 * g0;
    let peak = if r > 0.0 { 2.0 / -r.ln() } else { 0.0 };
    let mut acc = [0.0; 4];
    for k in 0..=GRID_BAND_CAP {
        let kf = k as f64;
        let c = r.powi(k as i32) * (-s * s * kf * kf).exp();
        let mult = if k == 0 { 1.0 } else { 2.0 };
        let w = mult * c;
        acc[0] += w * g0;
        acc[1] += w * (2.0 * g1 + kf * g0);
        acc[2] += w * (4.0 * g2 + 4.0 * kf * g1 + kf * kf * g0);
        acc[3] += w * kf * kf * g0;
        if kf > peak && c * (kf + 1.0).powi(2) <= 1e-18 * acc[0] {
            return Ok(acc);
        }
    }
    Err(Error::NonConvergentSum { what: format!("grid moments with R = {r}, s = {s}"), terms: GRID_BAND_CAP })
}

/// `⟨(n ± m)^order⟩` over `n, m ≥ 0` with weights `R^{n+m} e^{-(n-m)² s²}`,
/// `s = τ̄σ`. The first moment of `n - m` vanishes by symmetry.
pub fn grid_moments(r: f64, s: f64, order: u32, sign: GridSign) -> Result<f64> {
    let sums = grid_sums(r, s)?;
    match (order, sign) {
        (1, GridSign::Sum) => Ok(sums[1] / sums[0]),
        (2, GridSign::Sum) => Ok(sums[2] / sums[0]),
        (1, GridSign::Difference) => Ok(0.0),
        (2, GridSign::Difference) => Ok(sums[3] / sums[0]),
        _ => Err(Error::InvalidSpec(format!("grid moment order must be 1 or 2, got {order}"))),
    }
}

/// `Var(n ± m)`; values below 1e-300 are reported as 0 with `clamped` set.
pub fn grid_variance(r: f64, s: f64, sign: GridSign) -> Result<GridVariance> {
    let sums = grid_sums(r, s)?;
    let raw = match sign {
        GridSign::Sum => {
            let m = sums[1] / sums[0];
            (sums[2] / sums[0] - m * m).max(0.0)
        }
        GridSign::Difference => sums[3] / sums[0],
    };
    if raw < UNDERFLOW_CLAMP && r > 0.0 && s > 0.0 {
        Ok(GridVariance { value: 0.0, clamped: true })
    } else {
        Ok(GridVariance { value: raw, clamped: false })
    }
}

/// `(Var(n+m), Var(n-m))` for the Gaussian comb lattice over ℤ² with weights
/// `e^{-(n²+m²)δ²/2} e^{-(n-m)² s²}`, `δ = Δω/ω̄`.
pub fn comb_grid_variances(delta: f64, s: f64) -> Result<(f64, f64)> {
    if !(delta.is_finite() && delta > 0.0 && s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidSpec(format!("comb moments need delta > 0 and s >= 0, got {delta}, {s}")));
    }
    // In j = n+m, k = n-m (same parity) the weight factorizes.
    let cut = 745.0;
    let a = delta * delta / 4.0;
    let j_max = (cut / a).sqrt().ceil() as i64;
    let k_max = (cut / (a + s * s)).sqrt().ceil() as i64;
    if j_max as usize > 100 * GRID_BAND_CAP {
        return Err(Error::NonConvergentSum { what: format!("comb moments with delta = {delta}"), terms: 100 * GRID_BAND_CAP });
    }
    let profile = |lim: i64, rate: f64, parity: i64| -> (f64, f64) {
        let (mut z, mut m2) = (0.0, 0.0);
        let mut i = -lim + ((-lim - parity).rem_euclid(2));
        while i <= lim {
            let f = i as f64;
            let w = (-rate * f * f).exp();
            z += w;
            m2 += w * f * f;
            i += 2;
        }
        (z, m2)
    };
    let (mut z, mut j2, mut k2) = (0.0, 0.0, 0.0);
    for parity in 0..2 {
        let (zj, mj) = profile(j_max, a, parity);
        let (zk, mk) = profile(k_max, a + s * s, parity);
        z += zj * zk;
        j2 += mj * zk;
        k2 += zj * mk;
    }
    Ok((j2 / z, k2 / z))
}

/// Closed-form phase-space moments of a prepared state. For the two-color
/// mixture these are the moments of the averaged Wigner function.
pub fn phase_space_moments(state: &BiphotonState) -> Result<PhaseSpaceMoments> {
    let comps = state.components();
    if comps.len() == 1 {
        return pure_moments(&comps[0].1);
    }
    let (mut w1, mut w2, mut t1, mut t2, mut wt) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (p, s) in comps {
        let m = pure_moments(s)?;
        w1 += p * m.mean_omega;
        w2 += p * (m.var_omega + m.mean_omega * m.mean_omega);
        t1 += p * m.mean_t;
        t2 += p * (m.var_t + m.mean_t * m.mean_t);
        wt += p * (m.cov + m.mean_omega * m.mean_t);
    }
    Ok(PhaseSpaceMoments::from_raw(1.0, w1, w2, t1, t2, wt))
}

fn pure_moments(pure: &PureState) -> Result<PhaseSpaceMoments> {
    match &pure.base {
        Base::Terms(_) => {
            let m = terms::moments(&pure.terms);
            Ok(PhaseSpaceMoments::from_raw(
                1.0,
                m.mean_w,
                m.mean_w2,
                m.mean_t,
                m.mean_t2,
                m.mean_wt,
            ))
        }
        Base::Airy(a) => {
            let (sum, diff, mean) = airy_lattice(a.r, a.sigma * a.tau_bar)?;
            let base = PhaseSpaceMoments {
                mean_omega: a.omega0,
                mean_t: a.tau_bar * mean,
                var_omega: 0.5 * a.sigma * a.sigma * diff,
                var_t: 0.5 / (a.sigma * a.sigma) + a.tau_bar * a.tau_bar * sum,
                cov: 0.0,
            };
            Ok(base.sheared(pure.shear))
        }
        Base::RotatedAiry(a) => {
            let s2 = a.sigma * a.sigma;
            let (sum, diff, mean) = airy_lattice(a.r, a.sigma * a.tau_bar)?;
            let base = PhaseSpaceMoments {
                mean_omega: a.omega0 + s2 * a.tau_bar * mean,
                mean_t: 0.0,
                var_omega: s2 * s2 * (0.5 / s2 + a.tau_bar * a.tau_bar * sum),
                var_t: 0.5 / s2 * diff,
                cov: 0.0,
            };
            Ok(base.sheared(pure.shear))
        }
    }
}

/// `(Var(n+m), 1 - 2s²Var(n-m), ⟨n+m⟩)`.
fn airy_lattice(r: f64, s: f64) -> Result<(f64, f64, f64)> {
    let sums = grid_sums(r, s)?;
    let mean = sums[1] / sums[0];
    let var_sum = (sums[2] / sums[0] - mean * mean).max(0.0);
    let var_diff = sums[3] / sums[0];
    Ok((var_sum, 1.0 - 2.0 * s * s * var_diff, mean))
}

/// Canonical QFI from the closed-form moments. Mixtures are rejected since
/// their QFI is not a variance.
pub fn qfi_canonical(state: &BiphotonState) -> Result<QfiMatrix> {
    state.pure()?;
    Ok(phase_space_moments(state)?.qfi())
}

/// Phase-space moments by quadrature of `|f|²`, `Im(f' f*)` and `|f'|²`.
pub fn phase_space_moments_numeric(state: &BiphotonState) -> Result<PhaseSpaceMoments> {
    let pure = state.pure()?;
    let (lo, hi) = pure.support();
    let spec = pure.quadrature(lo, hi, 0.0);
    let slot = |k: usize| {
        move |w: f64| {
            let d = pure.spectral_derivs(w);
            let i = d[0].norm_sqr();
            let j = (d[1] * d[0].conj()).im;
            match k {
                0 => Complex64::new(i, w * i),
                1 => Complex64::new(w * w * i, j),
                _ => Complex64::new(d[1].norm_sqr(), w * j),
            }
        }
    };
    let a = integrate(slot(0), &spec)?.value;
    let b = integrate(slot(1), &spec)?.value;
    let c = integrate(slot(2), &spec)?.value;
    Ok(PhaseSpaceMoments::from_raw(a.re, a.im, b.re, b.im, c.re, c.im))
}

/// Canonical QFI with every moment obtained by quadrature.
pub fn qfi_numeric(state: &BiphotonState) -> Result<QfiMatrix> {
    Ok(phase_space_moments_numeric(state)?.qfi())
}

/// Per-family closed-form QFI in the printed convention.
pub fn qfi_analytic(spec: &PhaseMatchingSpec) -> Result<QfiMatrix> {
    spec.validate()?;
    let sigma = spec.sigma;
    let s2 = sigma * sigma;
    let y = spec.freq_chirp.map(|c| -c.rate());
    let kappa = spec.time_chirp.map(|c| c.rate());
    let unsupported = || {
        Err(Error::InvalidSpec(format!(
            "no closed-form QFI for family {} with this chirp",
            spec.family.name()
        )))
    };
    let (f_tt, f_mm, f_mt) = match (spec.family, y, kappa) {
        (Family::Gaussian, None, None) => (s2 / 2.0, 0.5 / s2, 0.0),
        (Family::Gaussian, Some(y), None) => (s2 / 2.0, 0.5 / s2 + y * y * s2 / 2.0, y * s2 / 2.0),
        (Family::Gaussian, None, Some(k)) => (s2 / 2.0 + k * k / (2.0 * s2), 0.5 / s2, k / (2.0 * s2)),
        (Family::FrequencyCat, y, None) => {
            let d = spec.delta();
            let e = (-d * d / s2).exp();
            let f_tt = s2 + 2.0 * d * d / (1.0 + e);
            match y {
                None => (f_tt, (1.0 - 2.0 * d * d / s2 * e / (1.0 + e)) / s2, 0.0),
                Some(y) => (
                    f_tt,
                    1.0 / s2 + y * y * s2 - d * d / (2.0 * s2 * s2) * e / (1.0 + e),
                    y * s2 / (1.0 + e),
                ),
            }
        }
        (Family::TimeCat, None, k) => {
            let d = spec.delta_t();
            let e = (-d * d * s2).exp();
            let f_mm = 1.0 / s2 + 2.0 * d * d / (1.0 + e);
            match k {
                None => (s2 * (1.0 - 2.0 * d * d * s2 * e / (1.0 + e)), f_mm, 0.0),
                Some(k) => (
                    s2 + k * k / s2 - d * d * s2 * s2 / 2.0 * e / (1.0 + e),
                    f_mm,
                    k / (s2 * (1.0 + e)),
                ),
            }
        }
        (Family::AiryGrid, y, None) => {
            let s = sigma * spec.tau_bar();
            let minus = 1.0 - 2.0 * s * s * grid_variance(spec.reflectivity(), s, GridSign::Difference)?.value;
            let plus = 1.0 + 2.0 * s * s * grid_variance(spec.reflectivity(), s, GridSign::Sum)?.value;
            let y = y.unwrap_or(0.0);
            (s2 / 2.0 * minus, plus / (2.0 * s2) + y * y * s2 / 2.0 * minus, y * s2 / 2.0 * minus)
        }
        (Family::FrequencyAiryGrid, None, k) => {
            let s = sigma * spec.tau_bar();
            let minus = 1.0 - 2.0 * s * s * grid_variance(spec.reflectivity(), s, GridSign::Difference)?.value;
            let plus = 1.0 + 2.0 * s * s * grid_variance(spec.reflectivity(), s, GridSign::Sum)?.value;
            let k = k.unwrap_or(0.0);
            (s2 / 2.0 * plus + k * k / (2.0 * s2) * minus, minus / (2.0 * s2), k / (2.0 * s2) * minus)
        }
        (Family::GaussianComb, None, None) => {
            let s = sigma * spec.tau_bar();
            let delta = spec.peak_width.unwrap_or(1.0) / spec.omega_bar.unwrap_or(1.0);
            let (v_plus, v_minus) = comb_grid_variances(delta, s)?;
            (s2 / 2.0 * (1.0 - 2.0 * s * s * v_minus), (1.0 + 2.0 * s * s * v_plus) / (2.0 * s2), 0.0)
        }
        _ => return unsupported(),
    };
    Ok(QfiMatrix::new(f_tt, f_mm, f_mt, Convention::Printed))
}

/// QFI in either convention.
pub fn qfi(state: &BiphotonState, convention: Convention) -> Result<QfiMatrix> {
    match convention {
        Convention::Printed => qfi_analytic(state.spec()),
        Convention::Canonical => qfi_canonical(state),
    }
}

/// Ratio printed/canonical for an unchirped member of `family`, when it is a
/// parameter-independent constant.
pub fn convention_ratio(family: Family) -> Option<f64> {
    match family {
        Family::Gaussian | Family::AiryGrid | Family::FrequencyAiryGrid => Some(0.25),
        Family::FrequencyCat | Family::TimeCat => Some(0.5),
        Family::GaussianComb | Family::TwoColorMixture => None,
    }
}

fn mixture_params(spec: &PhaseMatchingSpec) -> Result<(f64, f64)> {
    if spec.family != Family::TwoColorMixture {
        return Err(Error::InvalidSpec(format!("expected two_color_mixture, got {}", spec.family.name())));
    }
    spec.validate()?;
    Ok((spec.sigma, spec.delta()))
}

/// Delay QFI of the equal mixture of two colors at `±Δ`, as a function of
/// the delay `τ` at which it is evaluated.
pub fn qfi_mixed_two_color(spec: &PhaseMatchingSpec, tau: f64) -> Result<f64> {
    let (sigma, d) = mixture_params(spec)?;
    Ok(mixed_formula(sigma, d, tau, 2.0 * d * tau))
}

/// Same expression with the fringe phase written as `Δτ` instead of `2Δτ`.
pub fn qfi_mixed_two_color_printed(spec: &PhaseMatchingSpec, tau: f64) -> Result<f64> {
    let (sigma, d) = mixture_params(spec)?;
    Ok(mixed_formula(sigma, d, tau, d * tau))
}

fn mixed_formula(sigma: f64, d: f64, tau: f64, phase: f64) -> f64 {
    let s2 = sigma * sigma;
    let env = (-2.0 * tau * tau * s2).exp();
    let a = d * phase.sin() + tau * s2 * phase.cos();
    8.0 * env * a * a + 8.0 * tau * tau * s2 * s2 * env * (-2.0 * d * d / s2).exp()
}

/// The mixture QFI as `4 Σ_{ij} |∫ ω sin(2ωτ) f_i f_j* dω|²` over the two
/// components, by quadrature.
pub fn qfi_mixed_quadrature(spec: &PhaseMatchingSpec, tau: f64) -> Result<f64> {
    mixture_params(spec)?;
    let state = BiphotonState::new(spec)?;
    let comps = state.components();
    let (lo, hi) = state.support();
    let mut total = 0.0;
    for (_, a) in comps {
        for (_, b) in comps {
            let q = a.quadrature(lo, hi, 2.0 * tau.abs());
            let v = integrate(|w| a.spectral(w) * b.spectral(w).conj() * (w * (2.0 * w * tau).sin()), &q)?.value;
            total += 4.0 * v.norm_sqr();
        }
    }
    Ok(total)
}

/// Canonical QFI of the full biphoton with a Gaussian sum-frequency
/// envelope of width `sigma_plus`.
pub fn qfi_total(state: &BiphotonState, sigma_plus: f64) -> Result<QfiMatrix> {
    if !(sigma_plus.is_finite() && sigma_plus > 0.0) {
        return Err(Error::InvalidSpec(format!("sigma_plus must be positive, got {sigma_plus}")));
    }
    let minus = qfi_canonical(state)?;
    let s2 = sigma_plus * sigma_plus;
    Ok(QfiMatrix {
        f_tt: minus.f_tt + 2.0 * s2,
        f_mm: minus.f_mm + 2.0 / s2,
        ..minus
    })
}

/// Cramér-Rao covariance `(1/N) F⁻¹`.
pub fn invert(q: &QfiMatrix, n_repeats: u64) -> Result<CrCovariance> {
    if n_repeats == 0 {
        return Err(Error::InvalidSpec("repeat count must be at least 1".into()));
    }
    let det = q.determinant();
    if !(q.f_tt > 0.0 && q.f_mm > 0.0) || !(det > 1e-12 * q.f_tt * q.f_mm) {
        return Err(Error::SingularMatrix(det));
    }
    let n = n_repeats as f64;
    Ok(CrCovariance {
        var_tau: q.f_mm / (det * n),
        var_mu: q.f_tt / (det * n),
        cov_mu_tau: -q.f_mt / (det * n),
        n_repeats,
    })
}

/// One line of a precision table, `√(N·var)` in natural units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcrRow {
    pub label: String,
    pub family: Family,
    pub convention: Convention,
    pub unit_scale: f64,
    pub delta_tau: f64,
    pub delta_mu: f64,
    /// `√|cov|`, absent when the covariance vanishes.
    pub delta_mu_tau: Option<f64>,
}

/// Precision rows for labeled specs.
pub fn qcr_table(rows: &[(String, PhaseMatchingSpec)], n_repeats: u64, convention: Convention) -> Result<Vec<QcrRow>> {
    rows.par_iter()
        .map(|(label, spec)| {
            let q = match convention {
                Convention::Printed => qfi_analytic(spec)?,
                Convention::Canonical => qfi_canonical(&BiphotonState::new(spec)?)?,
            };
            let cr = invert(&q, n_repeats)?;
            let n = n_repeats as f64;
            Ok(QcrRow {
                label: label.clone(),
                family: spec.family,
                convention,
                unit_scale: spec.unit_scale,
                delta_tau: (cr.var_tau * n).sqrt(),
                delta_mu: (cr.var_mu * n).sqrt(),
                delta_mu_tau: (cr.cov_mu_tau != 0.0).then(|| (cr.cov_mu_tau.abs() * n).sqrt()),
            })
        })
        .collect()
}

/// Named collections of specs reproducing the standard precision tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TablePreset {
    Table1,
    Table2,
}

impl FromStr for TablePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(TablePreset::Table1),
            "table2" => Ok(TablePreset::Table2),
            other => Err(Error::InvalidSpec(format!("unknown preset {other:?}"))),
        }
    }
}

const ALGAAS_SIGMA: f64 = 2.0 * PI * 10.9e12;

/// Labeled specs of a preset, in rad/s and s.
pub fn preset_rows(preset: TablePreset) -> Vec<(String, PhaseMatchingSpec)> {
    use crate::statefamilies::ChirpSign;
    let g = PhaseMatchingSpec::gaussian;
    match preset {
        TablePreset::Table1 => {
            let cold = 1e6;
            let bulk = 2.0 * PI * 1.5e12;
            vec![
                ("AlGaAs waveguide, broadband".to_string(), g(ALGAAS_SIGMA, 0.0)),
                ("AlGaAs/PPKTP, narrowband".to_string(), g(2.0 * PI * 0.1e12, 0.0)),
                ("laser-cooled atoms".to_string(), g(cold, 0.0)),
                ("laser-cooled atoms, time chirp".to_string(), g(cold, 0.0).with_time_chirp(5.66e-8, ChirpSign::Plus)),
                ("bulk crystal".to_string(), g(bulk, 0.0)),
            ]
        }
        TablePreset::Table2 => {
            let s = ALGAAS_SIGMA;
            vec![
                ("Gaussian".to_string(), g(s, 0.0)),
                ("frequency cat".to_string(), PhaseMatchingSpec::frequency_cat(s, 10.0 * s)),
                ("time grid, R = 0.9".to_string(), PhaseMatchingSpec::airy_grid(s, 0.9, 10.0 / s)),
            ]
        }
    }
}
