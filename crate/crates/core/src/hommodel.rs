//! Generalized Hong-Ou-Mandel measurement: coincidence probability, the
//! three outcome probabilities with lossy detectors, and the classical
//! Fisher information of the (zero, single, coincidence) counts.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chronocyclic::{wigner_analytic, wigner_gradient};
use crate::error::{Error, Result};
use crate::numerics::fd_step;
use crate::qfi::phase_space_moments;
use crate::statefamilies::{BiphotonState, Family, PhaseMatchingSpec};

/// Dip depth below which `1 - πW` is treated as the dip bottom.
const DIP_FLOOR: f64 = 1e-12;

/// Lossy detection: each detector sits behind a beam splitter of reflectivity `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionModel {
    pub gamma: f64,
}

impl DetectionModel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::InvalidSpec(format!("gamma must lie in [0, 1), got {gamma}")));
        }
        Ok(DetectionModel { gamma })
    }

    pub fn ideal() -> Self {
        DetectionModel { gamma: 0.0 }
    }

    /// `k = (1 + 3γ)/(1 - γ)`, the offset in `p1 = ½(1-γ)²(k + πW)`.
    pub fn offset(&self) -> f64 {
        (1.0 + 3.0 * self.gamma) / (1.0 - self.gamma)
    }
}

impl Default for DetectionModel {
    fn default() -> Self {
        DetectionModel::ideal()
    }
}

/// Probabilities of zero, one and two detector clicks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbabilities {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

impl OutcomeProbabilities {
    /// Linear map from the coincidence probability `I` of ideal detectors.
    pub fn from_coincidence(i: f64, det: DetectionModel) -> Self {
        let g = det.gamma;
        let p0 = g * g;
        let p2 = (1.0 - g) * (1.0 - g) * i;
        let p1 = (1.0 - p0 - p2).max(0.0);
        OutcomeProbabilities { p0, p1, p2 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.p0, self.p1, self.p2]
    }
}

/// Classical Fisher information of the three outcomes over `(τ, μ)`.
/// `singular` marks the dip bottom, where the returned values are the limit
/// `(1-γ)²·(-∇²πW)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherMatrix {
    pub f_tt: f64,
    pub f_mm: f64,
    pub f_mt: f64,
    pub singular: bool,
}

/// A prepared state together with its detectors and difference-step scales.
#[derive(Debug, Clone)]
pub struct HomModel {
    state: BiphotonState,
    det: DetectionModel,
    scale_tau: f64,
    scale_mu: f64,
}

impl HomModel {
    pub fn new(state: BiphotonState, det: DetectionModel) -> Result<Self> {
        DetectionModel::new(det.gamma)?;
        let m = phase_space_moments(&state)?;
        Ok(HomModel {
            state,
            det,
            scale_tau: 1.0 / m.var_omega.sqrt(),
            scale_mu: 1.0 / m.var_t.sqrt(),
        })
    }

    pub fn from_spec(spec: &PhaseMatchingSpec, det: DetectionModel) -> Result<Self> {
        HomModel::new(BiphotonState::new(spec)?, det)
    }

    pub fn state(&self) -> &BiphotonState {
        &self.state
    }

    pub fn detection(&self) -> DetectionModel {
        self.det
    }

    pub fn with_detection(&self, det: DetectionModel) -> Result<Self> {
        DetectionModel::new(det.gamma)?;
        Ok(HomModel { det, ..self.clone() })
    }

    /// Natural step scales `(1/√Var ω, 1/√Var t)` for the delay and detuning.
    pub fn scales(&self) -> (f64, f64) {
        (self.scale_tau, self.scale_mu)
    }

    /// `πW(μ, τ)`.
    pub fn dip(&self, mu: f64, tau: f64) -> f64 {
        PI * wigner_analytic(&self.state, mu, tau)
    }

    /// `I = ½(1 - πW(μ, τ))`, clamped to `[0, 1]`.
    pub fn coincidence(&self, mu: f64, tau: f64) -> f64 {
        (0.5 * (1.0 - self.dip(mu, tau))).clamp(0.0, 1.0)
    }

    pub fn outcome_probs(&self, mu: f64, tau: f64) -> OutcomeProbabilities {
        OutcomeProbabilities::from_coincidence(self.coincidence(mu, tau), self.det)
    }

    /// `(πW, ∂τ πW, ∂μ πW)`.
    pub fn dip_gradient(&self, mu: f64, tau: f64) -> [f64; 3] {
        let g = wigner_gradient(&self.state, mu, tau);
        [PI * g[0], PI * g[2], PI * g[1]]
    }

    pub fn fisher(&self, mu: f64, tau: f64) -> FisherMatrix {
        let [d, dt, dm] = self.dip_gradient(mu, tau);
        let l = (1.0 - self.det.gamma).powi(2);
        let gap = 1.0 - d;
        if gap < DIP_FLOOR {
            let ht = fd_step(tau, self.scale_tau);
            let hm = fd_step(mu, self.scale_mu);
            let tp = self.dip_gradient(mu, tau + ht);
            let tm = self.dip_gradient(mu, tau - ht);
            let mp = self.dip_gradient(mu + hm, tau);
            let mm = self.dip_gradient(mu - hm, tau);
            let h_tt = (tp[1] - tm[1]) / (2.0 * ht);
            let h_mm = (mp[2] - mm[2]) / (2.0 * hm);
            let h_mt = 0.5 * ((tp[2] - tm[2]) / (2.0 * ht) + (mp[1] - mm[1]) / (2.0 * hm));
            return FisherMatrix { f_tt: -l * h_tt, f_mm: -l * h_mm, f_mt: -l * h_mt, singular: true };
        }
        let w = 0.5 * l * (1.0 / gap + 1.0 / (self.det.offset() + d));
        FisherMatrix { f_tt: w * dt * dt, f_mm: w * dm * dm, f_mt: w * dt * dm, singular: false }
    }
}

pub fn coincidence_prob(state: &BiphotonState, mu: f64, tau: f64) -> f64 {
    (0.5 * (1.0 - PI * wigner_analytic(state, mu, tau))).clamp(0.0, 1.0)
}

pub fn outcome_probs(state: &BiphotonState, mu: f64, tau: f64, det: DetectionModel) -> OutcomeProbabilities {
    OutcomeProbabilities::from_coincidence(coincidence_prob(state, mu, tau), det)
}

pub fn fisher_matrix(state: &BiphotonState, mu: f64, tau: f64, det: DetectionModel) -> Result<FisherMatrix> {
    Ok(HomModel::new(state.clone(), det)?.fisher(mu, tau))
}

/// `½(1-γ)² D'² [1/(1-D) + 1/(k+D)]`, or `(1-γ)²(-D'')` at the dip bottom.
fn fisher_1d(d: f64, d1: f64, d2: f64, det: DetectionModel) -> f64 {
    let l = (1.0 - det.gamma).powi(2);
    if 1.0 - d < DIP_FLOOR {
        return -l * d2;
    }
    0.5 * l * d1 * d1 * (1.0 / (1.0 - d) + 1.0 / (det.offset() + d))
}

fn centered_cat(spec: &PhaseMatchingSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    if spec.family != Family::FrequencyCat || spec.omega0 != 0.0 || spec.freq_chirp.is_some() || spec.time_chirp.is_some()
    {
        return Err(Error::InvalidSpec("closed-form Fisher information needs an unchirped frequency_cat at omega0 = 0".into()));
    }
    Ok((spec.sigma, spec.delta()))
}

/// Delay Fisher information of the frequency cat at `μ = 0`.
pub fn fisher_tau_analytic(spec: &PhaseMatchingSpec, tau: f64, det: DetectionModel) -> Result<f64> {
    DetectionModel::new(det.gamma)?;
    let (sigma, delta) = centered_cat(spec)?;
    let s2 = sigma * sigma;
    let e = (-delta * delta / s2).exp();
    let env = (-tau * tau * s2).exp() / (1.0 + e);
    let (sn, cs) = (2.0 * delta * tau).sin_cos();
    let d = env * (e + cs);
    let d1 = env * (-2.0 * tau * s2 * (e + cs) - 2.0 * delta * sn);
    let d2 = -(2.0 * s2 + 4.0 * delta * delta / (1.0 + e));
    Ok(fisher_1d(d, d1, d2, det))
}

/// Detuning Fisher information of the frequency cat at `τ = 0`.
pub fn fisher_mu_analytic(spec: &PhaseMatchingSpec, mu: f64, det: DetectionModel) -> Result<f64> {
    DetectionModel::new(det.gamma)?;
    let (sigma, delta) = centered_cat(spec)?;
    let s2 = sigma * sigma;
    let e = (-delta * delta / s2).exp();
    let norm = 1.0 / (2.0 * (1.0 + e));
    let (gp, gm, g0) = (
        (-(mu + delta).powi(2) / s2).exp(),
        (-(mu - delta).powi(2) / s2).exp(),
        (-mu * mu / s2).exp(),
    );
    let d = norm * (gp + gm + 2.0 * g0);
    let d1 = -2.0 * norm / s2 * ((mu + delta) * gp + (mu - delta) * gm + 2.0 * mu * g0);
    let d2 = 4.0 * delta * delta * e / (s2 * s2 * (1.0 + e)) - 2.0 / s2;
    Ok(fisher_1d(d, d1, d2, det))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statefamilies::ChirpSign;

    fn model(spec: PhaseMatchingSpec, gamma: f64) -> HomModel {
        HomModel::from_spec(&spec, DetectionModel::new(gamma).unwrap()).unwrap()
    }

    #[test]
    fn probabilities() {
        let m = model(PhaseMatchingSpec::gaussian(1.0, 0.0), 0.3);
        let p = m.outcome_probs(0.2, 0.4);
        assert_eq!(p.p0, 0.09);
        assert!((p.p0 + p.p1 + p.p2 - 1.0).abs() < 1e-15);
        let ideal = model(PhaseMatchingSpec::gaussian(1.0, 0.0), 0.0);
        let o = ideal.outcome_probs(0.0, 0.0);
        assert!(o.p0 == 0.0 && (o.p1 - 1.0).abs() < 1e-14 && o.p2.abs() < 1e-14);
        let far = ideal.outcome_probs(0.0, 50.0);
        assert!((far.p1 - 0.5).abs() < 1e-14 && (far.p2 - 0.5).abs() < 1e-14);
        let cat = model(PhaseMatchingSpec::frequency_cat(1.0, 10.0), 0.0);
        let tau = PI / 20.0;
        assert!((cat.coincidence(0.0, tau) - 0.5 * (1.0 + (-tau * tau).exp())).abs() < 1e-12);
        assert!(DetectionModel::new(1.0).is_err());
    }

    #[test]
    fn dip_limits_match_four_variance() {
        let g = model(PhaseMatchingSpec::gaussian(1.0, 0.0), 0.0);
        let f = g.fisher(0.0, 0.0);
        assert!(f.singular && (f.f_tt - 2.0).abs() < 1e-6 && (f.f_mm - 2.0).abs() < 1e-6 && f.f_mt.abs() < 1e-6);
        let near = g.fisher(0.0, 1e-4);
        assert!(!near.singular && (near.f_tt - 2.0).abs() < 1e-6);
        let cat = model(PhaseMatchingSpec::frequency_cat(1.0, 10.0), 0.0);
        assert!((cat.fisher(0.0, 0.0).f_tt - 402.0).abs() < 1e-4);
    }

    #[test]
    fn cat_closed_forms_agree_with_gradient() {
        let spec = PhaseMatchingSpec::frequency_cat(1.0, 3.0);
        for &gamma in &[0.0, 0.3] {
            let m = model(spec.clone(), gamma);
            let det = m.detection();
            for &tau in &[0.01, 0.13, 0.4, 1.1] {
                let a = fisher_tau_analytic(&spec, tau, det).unwrap();
                let b = m.fisher(0.0, tau).f_tt;
                assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-12), "{tau}: {a} vs {b}");
            }
            for &mu in &[0.05, 0.7, 2.5] {
                let a = fisher_mu_analytic(&spec, mu, det).unwrap();
                let b = m.fisher(mu, 0.0).f_mm;
                assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-12), "{mu}: {a} vs {b}");
            }
        }
        let lim = fisher_tau_analytic(&spec, 0.0, DetectionModel::ideal()).unwrap();
        assert!((lim - (2.0 + 4.0 * 9.0 / (1.0 + (-9.0f64).exp()))).abs() < 1e-12);
        let lim_mu = fisher_mu_analytic(&spec, 0.0, DetectionModel::ideal()).unwrap();
        let var_t = 0.5 - 9.0 * (-9.0f64).exp() / (1.0 + (-9.0f64).exp());
        assert!((lim_mu - 4.0 * var_t).abs() < 1e-12);
        assert!(fisher_tau_analytic(&PhaseMatchingSpec::gaussian(1.0, 0.0), 0.1, DetectionModel::ideal()).is_err());
        let chirped = PhaseMatchingSpec::frequency_cat(1.0, 3.0).with_freq_chirp(1.0, ChirpSign::Plus);
        assert!(fisher_tau_analytic(&chirped, 0.1, DetectionModel::ideal()).is_err());
    }

    #[test]
    fn losses_shrink_information() {
        let spec = PhaseMatchingSpec::time_cat(1.0, 2.0);
        let m0 = model(spec.clone(), 0.0);
        let m3 = model(spec, 0.3);
        for &(mu, tau) in &[(0.1, 0.2), (0.5, -0.3), (-1.0, 1.5)] {
            let (a, b) = (m0.fisher(mu, tau), m3.fisher(mu, tau));
            assert!(b.f_tt <= a.f_tt && b.f_mm <= a.f_mm && b.f_mt.abs() <= a.f_mt.abs());
        }
    }
}
