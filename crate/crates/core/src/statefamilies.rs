//! Biphoton phase-matching families: specification, validation,
//! normalization and evaluation of the spectral amplitude `f(ω)` and the
//! temporal amplitude `f̃(t) = ∫ e^{iωt} f(ω) dω`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{truncated_double_sum, QuadratureSpec, TailBound};
use crate::terms::{self, Term};

/// A normalized complex amplitude value.
pub type ComplexAmplitude = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gaussian,
    FrequencyCat,
    TimeCat,
    AiryGrid,
    FrequencyAiryGrid,
    GaussianComb,
    TwoColorMixture,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::FrequencyCat => "frequency_cat",
            Family::TimeCat => "time_cat",
            Family::AiryGrid => "airy_grid",
            Family::FrequencyAiryGrid => "frequency_airy_grid",
            Family::GaussianComb => "gaussian_comb",
            Family::TwoColorMixture => "two_color_mixture",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ChirpSign {
    #[default]
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl ChirpSign {
    pub fn value(self) -> f64 {
        match self {
            ChirpSign::Plus => 1.0,
            ChirpSign::Minus => -1.0,
        }
    }
}

/// Quadratic phase `exp(±i x²/(2c²))` applied in frequency or in time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Chirp {
    pub c: f64,
    #[serde(default)]
    pub sign: ChirpSign,
}

impl Chirp {
    pub fn new(c: f64, sign: ChirpSign) -> Chirp {
        Chirp { c, sign }
    }

    /// Signed curvature `±1/c²` of the phase.
    pub fn rate(&self) -> f64 {
        self.sign.value() / (self.c * self.c)
    }
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn is_unit(x: &f64) -> bool {
    *x == 1.0
}

fn unit() -> f64 {
    1.0
}

/// Tagged description of a phase-matching family and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseMatchingSpec {
    pub family: Family,
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reflectivity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_bar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_bar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_width: Option<f64>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub omega0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq_chirp: Option<Chirp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_chirp: Option<Chirp>,
    #[serde(default = "unit", skip_serializing_if = "is_unit")]
    pub unit_scale: f64,
}

impl PhaseMatchingSpec {
    fn bare(family: Family, sigma: f64) -> Self {
        PhaseMatchingSpec {
            family,
            sigma,
            delta: None,
            delta_t: None,
            reflectivity: None,
            tau_bar: None,
            omega_bar: None,
            peak_width: None,
            omega0: 0.0,
            freq_chirp: None,
            time_chirp: None,
            unit_scale: 1.0,
        }
    }

    pub fn gaussian(sigma: f64, delta: f64) -> Self {
        PhaseMatchingSpec { delta: Some(delta), ..Self::bare(Family::Gaussian, sigma) }
    }

    pub fn frequency_cat(sigma: f64, delta: f64) -> Self {
        PhaseMatchingSpec { delta: Some(delta), ..Self::bare(Family::FrequencyCat, sigma) }
    }

    pub fn time_cat(sigma: f64, delta_t: f64) -> Self {
        PhaseMatchingSpec { delta_t: Some(delta_t), ..Self::bare(Family::TimeCat, sigma) }
    }

    pub fn airy_grid(sigma: f64, reflectivity: f64, tau_bar: f64) -> Self {
        PhaseMatchingSpec {
            reflectivity: Some(reflectivity),
            tau_bar: Some(tau_bar),
            ..Self::bare(Family::AiryGrid, sigma)
        }
    }

    pub fn frequency_airy_grid(sigma: f64, reflectivity: f64, tau_bar: f64) -> Self {
        PhaseMatchingSpec {
            reflectivity: Some(reflectivity),
            tau_bar: Some(tau_bar),
            ..Self::bare(Family::FrequencyAiryGrid, sigma)
        }
    }

    pub fn gaussian_comb(sigma: f64, omega_bar: f64, peak_width: f64) -> Self {
        PhaseMatchingSpec {
            omega_bar: Some(omega_bar),
            peak_width: Some(peak_width),
            ..Self::bare(Family::GaussianComb, sigma)
        }
    }

    pub fn two_color_mixture(sigma: f64, delta: f64) -> Self {
        PhaseMatchingSpec { delta: Some(delta), ..Self::bare(Family::TwoColorMixture, sigma) }
    }

    pub fn with_freq_chirp(mut self, c: f64, sign: ChirpSign) -> Self {
        self.freq_chirp = Some(Chirp::new(c, sign));
        self
    }

    pub fn with_time_chirp(mut self, c: f64, sign: ChirpSign) -> Self {
        self.time_chirp = Some(Chirp::new(c, sign));
        self
    }

    pub fn with_omega0(mut self, omega0: f64) -> Self {
        self.omega0 = omega0;
        self
    }

    pub fn with_unit_scale(mut self, unit_scale: f64) -> Self {
        self.unit_scale = unit_scale;
        self
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(0.0)
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t.unwrap_or(0.0)
    }

    pub fn reflectivity(&self) -> f64 {
        self.reflectivity.unwrap_or(0.0)
    }

    pub fn tau_bar(&self) -> f64 {
        match self.family {
            Family::GaussianComb => 2.0 * PI / self.omega_bar.unwrap_or(f64::NAN),
            _ => self.tau_bar.unwrap_or(0.0),
        }
    }

    /// Center of the spectral chirp phase.
    pub fn chirp_center(&self) -> f64 {
        match self.family {
            Family::Gaussian => self.omega0 + self.delta(),
            _ => self.omega0,
        }
    }

    /// Checks field ranges and the family/field combination.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return bad(format!("sigma must be positive and finite, got {}", self.sigma));
        }
        if !self.omega0.is_finite() {
            return bad("omega0 must be finite".into());
        }
        if !(self.unit_scale.is_finite() && self.unit_scale > 0.0) {
            return bad("unit_scale must be positive".into());
        }
        let present = [
            ("delta", self.delta),
            ("delta_t", self.delta_t),
            ("reflectivity", self.reflectivity),
            ("tau_bar", self.tau_bar),
            ("omega_bar", self.omega_bar),
            ("peak_width", self.peak_width),
        ];
        let (required, optional): (&[&str], &[&str]) = match self.family {
            Family::Gaussian => (&[], &["delta"]),
            Family::FrequencyCat => (&["delta"], &[]),
            Family::TimeCat => (&["delta_t"], &[]),
            Family::AiryGrid | Family::FrequencyAiryGrid => (&["reflectivity", "tau_bar"], &[]),
            Family::GaussianComb => (&["omega_bar", "peak_width"], &[]),
            Family::TwoColorMixture => (&["delta"], &[]),
        };
        for (name, value) in present {
            match value {
                Some(v) if !v.is_finite() => return bad(format!("{name} must be finite")),
                Some(_) if !required.contains(&name) && !optional.contains(&name) => {
                    return bad(format!("field {name} does not apply to family {}", self.family.name()))
                }
                None if required.contains(&name) => {
                    return bad(format!("family {} requires field {name}", self.family.name()))
                }
                _ => {}
            }
        }
        if let Some(r) = self.reflectivity {
            if !(0.0..1.0).contains(&r) {
                return bad(format!("reflectivity must lie in [0, 1), got {r}"));
            }
        }
        for (name, v) in [("tau_bar", self.tau_bar), ("omega_bar", self.omega_bar), ("peak_width", self.peak_width)] {
            if let Some(v) = v {
                if v <= 0.0 {
                    return bad(format!("{name} must be positive, got {v}"));
                }
            }
        }
        if self.freq_chirp.is_some() && self.time_chirp.is_some() {
            return bad("freq_chirp and time_chirp are mutually exclusive".into());
        }
        for chirp in [self.freq_chirp, self.time_chirp].into_iter().flatten() {
            if !(chirp.c.is_finite() && chirp.c > 0.0) {
                return bad(format!("chirp constant must be positive, got {}", chirp.c));
            }
        }
        if self.family == Family::TwoColorMixture
            && (self.omega0 != 0.0 || self.freq_chirp.is_some() || self.time_chirp.is_some())
        {
            return bad("two_color_mixture carries sigma and delta only".into());
        }
        Ok(())
    }

    /// True when the spectral amplitude is even about ω = 0.
    pub fn is_even(&self) -> bool {
        match self.family {
            Family::Gaussian => self.omega0 + self.delta() == 0.0,
            Family::FrequencyCat | Family::TimeCat | Family::GaussianComb => self.omega0 == 0.0,
            _ => false,
        }
    }
}

/// How the comb amplitude is summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombForm {
    /// Sum over Gaussian teeth in frequency.
    Direct,
    /// Poisson-resummed sum over temporal harmonics.
    Resummed,
}

/// Parameters of the cavity grid families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct AiryParams {
    pub sigma: f64,
    pub r: f64,
    pub tau_bar: f64,
    pub omega0: f64,
    /// `Σ_{n,m≥0} R^{n+m} exp(-(n-m)² τ̄² σ²)`.
    pub s_norm: f64,
    pub amp: f64,
    pub n_max: usize,
}

const GRID_TERM_FLOOR: f64 = 1e-10;
const GRID_TERM_CAP: usize = 10_000;

/// Coordinate change mapping a chirped Wigner function onto its chirp-free base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Shear {
    None,
    /// `W(ω,t) = W₀(ω, t + y(ω - center))`.
    Frequency { y: f64, center: f64 },
    /// `W(ω,t) = W₀(ω + κt, t)`.
    Time { kappa: f64 },
}

impl Shear {
    pub fn base_point(&self, w: f64, t: f64) -> (f64, f64) {
        match *self {
            Shear::None => (w, t),
            Shear::Frequency { y, center } => (w, t + y * (w - center)),
            Shear::Time { kappa } => (w + kappa * t, t),
        }
    }

    pub fn gradient(&self, base: [f64; 2]) -> [f64; 2] {
        match *self {
            Shear::None => base,
            Shear::Frequency { y, .. } => [base[0] + y * base[1], base[1]],
            Shear::Time { kappa } => [base[0], base[1] + kappa * base[0]],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Base {
    Terms(Vec<Term>),
    Airy(AiryParams),
    RotatedAiry(AiryParams),
}

/// A normalized pure phase-matching amplitude ready for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    pub(crate) terms: Vec<Term>,
    /// Closed-form cavity amplitude with its spectral chirp curvature.
    pub(crate) closed: Option<(AiryParams, f64)>,
    pub(crate) base: Base,
    pub(crate) shear: Shear,
    pub(crate) amp: f64,
    support: (f64, f64),
    feature: f64,
    oscillation: f64,
}

impl PureState {
    pub fn spectral(&self, w: f64) -> Complex64 {
        match &self.closed {
            Some((a, b)) => airy_closed(a, *b, w)[0],
            None => terms::eval(&self.terms, w),
        }
    }

    /// `(f, f', f'')` at ω.
    pub fn spectral_derivs(&self, w: f64) -> [Complex64; 3] {
        match &self.closed {
            Some((a, b)) => airy_closed(a, *b, w),
            None => terms::eval_derivs(&self.terms, w),
        }
    }

    pub fn temporal(&self, t: f64) -> Complex64 {
        terms::fourier(&self.terms, t)
    }

    pub(crate) fn quadrature_rate(&self) -> f64 {
        self.oscillation
    }

    /// Interval outside which |f| is negligible.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Quadrature layout over the support, resolving the narrowest spectral
    /// feature and any additional phase rate `extra_rate` of the integrand.
    pub fn quadrature(&self, lo: f64, hi: f64, extra_rate: f64) -> QuadratureSpec {
        let rate = self.oscillation + extra_rate;
        let mut h = self.feature;
        if rate > 0.0 {
            h = h.min(PI / rate);
        }
        let panels = ((hi - lo) / h).ceil().clamp(4.0, 20_000.0) as usize;
        QuadratureSpec::new(lo, hi).with_panels(panels).with_max_points(1 << 20)
    }
}

/// A prepared (validated and normalized) state: one pure component, or the
/// two equally weighted components of the two-color mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct BiphotonState {
    spec: PhaseMatchingSpec,
    components: Vec<(f64, PureState)>,
}

impl BiphotonState {
    pub fn new(spec: &PhaseMatchingSpec) -> Result<BiphotonState> {
        spec.validate()?;
        let components = if spec.family == Family::TwoColorMixture {
            let d = spec.delta();
            vec![
                (0.5, prepare_pure(&PhaseMatchingSpec::gaussian(spec.sigma, d))?),
                (0.5, prepare_pure(&PhaseMatchingSpec::gaussian(spec.sigma, -d))?),
            ]
        } else {
            vec![(1.0, prepare_pure(spec)?)]
        };
        Ok(BiphotonState { spec: spec.clone(), components })
    }

    pub fn spec(&self) -> &PhaseMatchingSpec {
        &self.spec
    }

    pub fn is_pure(&self) -> bool {
        self.components.len() == 1
    }

    pub fn is_even(&self) -> bool {
        self.spec.is_even()
    }

    pub fn components(&self) -> &[(f64, PureState)] {
        &self.components
    }

    /// The pure amplitude, or `InvalidSpec` for a mixture.
    pub fn pure(&self) -> Result<&PureState> {
        if self.is_pure() {
            Ok(&self.components[0].1)
        } else {
            Err(Error::InvalidSpec(format!("{} is not a pure state", self.spec.family.name())))
        }
    }

    /// Normalization constant of the raw family amplitude.
    pub fn normalization(&self) -> f64 {
        self.components[0].1.amp
    }

    pub fn spectral(&self, w: f64) -> Result<ComplexAmplitude> {
        Ok(self.pure()?.spectral(w))
    }

    pub fn temporal(&self, t: f64) -> Result<ComplexAmplitude> {
        Ok(self.pure()?.temporal(t))
    }

    /// `Σ_k w_k |f_k(ω)|²`.
    pub fn spectral_intensity(&self, w: f64) -> f64 {
        self.components.iter().map(|(p, s)| p * s.spectral(w).norm_sqr()).sum()
    }

    /// Time marginal of the Wigner function, `Σ_k w_k |f̃_k(-t)|²/2π`.
    pub fn temporal_intensity(&self, t: f64) -> f64 {
        self.components.iter().map(|(p, s)| p * s.temporal(-t).norm_sqr()).sum::<f64>() / (2.0 * PI)
    }

    pub fn support(&self) -> (f64, f64) {
        self.components
            .iter()
            .map(|(_, s)| s.support)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |a, b| (a.0.min(b.0), a.1.max(b.1)))
    }
}

/// Normalization constant A of the raw family amplitude.
pub fn normalization(spec: &PhaseMatchingSpec) -> Result<f64> {
    Ok(BiphotonState::new(spec)?.normalization())
}

pub fn eval_spectral(spec: &PhaseMatchingSpec, w: f64) -> Result<ComplexAmplitude> {
    BiphotonState::new(spec)?.spectral(w)
}

pub fn eval_temporal(spec: &PhaseMatchingSpec, t: f64) -> Result<ComplexAmplitude> {
    BiphotonState::new(spec)?.temporal(t)
}

/// Normalized comb amplitude evaluated with an explicit summation form.
pub fn comb_amplitude(spec: &PhaseMatchingSpec, w: f64, form: CombForm) -> Result<ComplexAmplitude> {
    if spec.family != Family::GaussianComb || spec.freq_chirp.is_some() || spec.time_chirp.is_some() {
        return Err(Error::InvalidSpec("comb_amplitude needs an unchirped gaussian_comb".into()));
    }
    spec.validate()?;
    let ts = comb_terms(spec, form);
    let a = 1.0 / terms::norm_squared(&ts).sqrt();
    Ok(terms::eval(&ts, w) * a)
}

fn comb_terms(spec: &PhaseMatchingSpec, form: CombForm) -> Vec<Term> {
    let sigma = spec.sigma;
    let wb = spec.omega_bar.unwrap_or(1.0);
    let dw = spec.peak_width.unwrap_or(1.0);
    let cut = (1e-17f64).ln().abs();
    match form {
        CombForm::Direct => {
            let s2 = sigma * sigma + dw * dw;
            let rho = sigma * dw / s2.sqrt();
            let n_max = ((2.0 * cut * s2).sqrt() / wb).ceil() as i64;
            (-n_max..=n_max)
                .map(|n| {
                    let nf = n as f64;
                    let b = (-nf * nf * wb * wb / (2.0 * s2)).exp();
                    Term::gaussian(b, spec.omega0 + nf * wb * sigma * sigma / s2, rho)
                })
                .collect()
        }
        CombForm::Resummed => {
            let delta = dw / wb;
            let tau = 2.0 * PI / wb;
            let k_max = ((cut / (2.0 * PI * PI)).sqrt() / delta).ceil() as i64;
            let pre = dw * (2.0 * PI).sqrt() / wb;
            (-k_max..=k_max)
                .map(|k| {
                    let kf = k as f64;
                    let mut t = Term::gaussian(pre * (-2.0 * PI * PI * kf * kf * delta * delta).exp(), spec.omega0, sigma);
                    t.q = Complex64::new(0.0, kf * tau);
                    t
                })
                .collect()
        }
    }
}

fn grid_extent(r: f64) -> Result<usize> {
    if r == 0.0 {
        return Ok(0);
    }
    let n = (GRID_TERM_FLOOR.ln() / r.ln()).floor() as usize;
    if n >= GRID_TERM_CAP {
        return Err(Error::NonConvergentSum { what: format!("grid amplitude with R = {r}"), terms: GRID_TERM_CAP });
    }
    Ok(n)
}

/// `Σ_{n,m≥0} R^{n+m} exp(-(n-m)² s²)` with `s = στ̄`.
pub(crate) fn grid_norm_sum(r: f64, s: f64) -> Result<f64> {
    let damping = s * s;
    let w = |n: i64, m: i64| {
        let k = (n - m) as f64;
        r.powi((n + m) as i32) * (-k * k * damping).exp()
    };
    Ok(truncated_double_sum(w, TailBound::GeometricBanded { ratio: r, scale: 1.0, damping }, 1e-14)?.value)
}

fn airy_params(spec: &PhaseMatchingSpec) -> Result<AiryParams> {
    let sigma = spec.sigma;
    let r = spec.reflectivity();
    let tau_bar = spec.tau_bar();
    let s_norm = grid_norm_sum(r, sigma * tau_bar)?;
    Ok(AiryParams {
        sigma,
        r,
        tau_bar,
        omega0: spec.omega0,
        s_norm,
        amp: 1.0 / (sigma * PI.sqrt() * s_norm).sqrt(),
        n_max: grid_extent(r)?,
    })
}

/// Closed-form cavity amplitude `A e^{-u²/2σ²} e^{ibu²/2} / (1 - R e^{2iuτ̄})`
/// with its first two derivatives.
fn airy_closed(a: &AiryParams, b: f64, w: f64) -> [Complex64; 3] {
    let u = w - a.omega0;
    let z = Complex64::new(1.0 / (a.sigma * a.sigma), -b);
    let g = (-z * u * u / 2.0).exp();
    let g1 = -z * u * g;
    let g2 = (z * z * u * u - z) * g;
    let q = a.r * Complex64::new(0.0, 2.0 * u * a.tau_bar).exp();
    let h = 1.0 / (1.0 - q);
    let i2t = Complex64::new(0.0, 2.0 * a.tau_bar);
    let h1 = i2t * q * h * h;
    let h2 = i2t * i2t * (q * h * h + 2.0 * q * q * h * h * h);
    [a.amp * g * h, a.amp * (g1 * h + g * h1), a.amp * (g2 * h + 2.0 * g1 * h1 + g * h2)]
}

fn prepare_pure(spec: &PhaseMatchingSpec) -> Result<PureState> {
    let sigma = spec.sigma;
    let w0 = spec.omega0;
    let mut closed = None;
    let (raw, base_kind): (Vec<Term>, Option<(AiryParams, bool)>) = match spec.family {
        Family::Gaussian => (vec![Term::gaussian(1.0, w0 + spec.delta(), sigma)], None),
        Family::FrequencyCat => {
            let d = spec.delta();
            (vec![Term::gaussian(1.0, w0 + d, sigma), Term::gaussian(1.0, w0 - d, sigma)], None)
        }
        Family::TimeCat => {
            let d = spec.delta_t();
            let mut plus = Term::gaussian(1.0, w0, sigma);
            let mut minus = plus;
            plus.q = Complex64::new(0.0, d);
            minus.q = Complex64::new(0.0, -d);
            (vec![plus, minus], None)
        }
        Family::GaussianComb => {
            let direct = comb_terms(spec, CombForm::Direct);
            let resummed = comb_terms(spec, CombForm::Resummed);
            (if direct.len() <= resummed.len() { direct } else { resummed }, None)
        }
        Family::AiryGrid => {
            let a = airy_params(spec)?;
            let ts = (0..=a.n_max)
                .map(|n| {
                    let mut t = Term::gaussian(a.r.powi(n as i32), w0, sigma);
                    t.q = Complex64::new(0.0, 2.0 * n as f64 * a.tau_bar);
                    t
                })
                .collect();
            (ts, Some((a, false)))
        }
        Family::FrequencyAiryGrid => {
            let a = airy_params(spec)?;
            let ts = (0..=a.n_max)
                .map(|n| Term::gaussian(a.r.powi(n as i32), w0 + 2.0 * n as f64 * a.tau_bar * sigma * sigma, sigma))
                .collect();
            (ts, Some((a, true)))
        }
        Family::TwoColorMixture => unreachable!("mixtures are split into components"),
    };

    let amp = match &base_kind {
        Some((a, _)) => a.amp,
        None => 1.0 / terms::norm_squared(&raw).sqrt(),
    };
    let base_terms: Vec<Term> = raw
        .iter()
        .map(|t| Term { amp: t.amp * amp, ..*t })
        .filter(|t| t.amp.norm() > 0.0)
        .collect();

    let center = spec.chirp_center();
    let (chirped, shear) = match (spec.freq_chirp, spec.time_chirp) {
        (Some(c), _) => (
            base_terms.iter().map(|t| t.freq_chirped(c.rate(), center)).collect(),
            Shear::Frequency { y: -c.rate(), center },
        ),
        (_, Some(c)) => (
            base_terms.iter().map(|t| t.time_chirped(c.rate())).collect(),
            Shear::Time { kappa: c.rate() },
        ),
        _ => (base_terms.clone(), Shear::None),
    };

    let base = match base_kind {
        Some((a, false)) => {
            if spec.time_chirp.is_none() {
                closed = Some((a, spec.freq_chirp.map(|c| c.rate()).unwrap_or(0.0)));
            }
            Base::Airy(a)
        }
        Some((a, true)) => Base::RotatedAiry(a),
        None => Base::Terms(base_terms),
    };

    let (support, mut feature, mut oscillation) = term_layout(&chirped);
    if let Some((a, b)) = &closed {
        let half = 8.0 * sigma;
        let lo = (a.omega0 - half).max(support.0);
        let hi = (a.omega0 + half).min(support.1);
        let mut f = sigma.min(PI / (4.0 * a.tau_bar));
        if a.r > 0.0 {
            f = f.min(PI / a.tau_bar / 4.0);
        }
        feature = f;
        oscillation = b.abs() * half;
        return Ok(PureState { terms: chirped, closed, base, shear, amp, support: (lo, hi), feature, oscillation });
    }
    if feature <= 0.0 {
        feature = sigma;
    }
    if oscillation.is_nan() {
        oscillation = 0.0;
    }
    Ok(PureState { terms: chirped, closed, base, shear, amp, support, feature, oscillation })
}

/// Support hull, narrowest envelope and largest phase rate of a term sum.
fn term_layout(ts: &[Term]) -> ((f64, f64), f64, f64) {
    let envs: Vec<(f64, f64, f64)> = ts.iter().map(|t| t.envelope()).collect();
    let top = envs.iter().map(|e| e.0).fold(0.0, f64::max);
    let threshold = 1e-13 * top;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut feature = f64::INFINITY;
    for &(peak, c, width) in &envs {
        if peak < threshold {
            continue;
        }
        let half = width * (2.0 * (peak / threshold).ln()).sqrt();
        lo = lo.min(c - half);
        hi = hi.max(c + half);
        feature = feature.min(width);
    }
    let mut oscillation: f64 = 0.0;
    for (t, &(peak, _, _)) in ts.iter().zip(&envs) {
        if peak < threshold {
            continue;
        }
        let reach = (lo - t.center).abs().max((hi - t.center).abs());
        oscillation = oscillation.max(t.q.im.abs() + 2.0 * t.p.im.abs() * reach);
    }
    ((lo, hi), feature, oscillation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_real;

    fn norm_by_quadrature(s: &BiphotonState) -> f64 {
        let p = s.pure().unwrap();
        let (lo, hi) = p.support();
        integrate_real(|w| p.spectral(w).norm_sqr(), &p.quadrature(lo, hi, 0.0).with_tolerance(1e-13, 1e-10))
            .unwrap()
            .0
    }

    #[test]
    fn spec_json_round_trip_and_unknown_fields() {
        let json = r#"{ "family": "airy_grid", "sigma": 1.0, "reflectivity": 0.9, "tau_bar": 10.0, "omega0": 0.0, "freq_chirp": {"c": 2.0, "sign": "+"}, "unit_scale": 1e6 }"#;
        let spec: PhaseMatchingSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.family, Family::AiryGrid);
        assert_eq!(spec.freq_chirp.unwrap().sign, ChirpSign::Plus);
        spec.validate().unwrap();
        let back: PhaseMatchingSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        let bad = r#"{ "family": "gaussian", "sigma": 1.0, "colour": 3 }"#;
        assert!(serde_json::from_str::<PhaseMatchingSpec>(bad).is_err());
    }

    #[test]
    fn validation_rejects_bad_fields() {
        assert!(PhaseMatchingSpec::gaussian(-1.0, 0.0).validate().is_err());
        assert!(PhaseMatchingSpec::airy_grid(1.0, 1.0, 1.0).validate().is_err());
        assert!(PhaseMatchingSpec::airy_grid(1.0, 0.5, 0.0).validate().is_err());
        assert!(PhaseMatchingSpec::gaussian_comb(1.0, 0.0, 0.1).validate().is_err());
        let both = PhaseMatchingSpec::gaussian(1.0, 0.0)
            .with_freq_chirp(1.0, ChirpSign::Plus)
            .with_time_chirp(1.0, ChirpSign::Plus);
        assert!(both.validate().is_err());
        let mix = PhaseMatchingSpec::two_color_mixture(1.0, 3.0).with_omega0(1.0);
        assert!(mix.validate().is_err());
        let mut extra = PhaseMatchingSpec::frequency_cat(1.0, 2.0);
        extra.reflectivity = Some(0.3);
        assert!(matches!(extra.validate(), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn cat_normalization_constant() {
        let s = BiphotonState::new(&PhaseMatchingSpec::frequency_cat(1.0, 10.0)).unwrap();
        let expected = 1.0 / (2.0 * PI.sqrt() * (1.0 + (-100f64).exp())).sqrt();
        assert!((s.normalization() - expected).abs() < 1e-14);
        assert!(s.spectral(0.0).unwrap().norm() < 1e-20);
    }

    #[test]
    fn families_are_normalized() {
        let specs = [
            PhaseMatchingSpec::gaussian(1.3, 0.4),
            PhaseMatchingSpec::frequency_cat(0.7, 2.0).with_freq_chirp(0.8, ChirpSign::Minus),
            PhaseMatchingSpec::time_cat(1.0, 3.0).with_time_chirp(1.2, ChirpSign::Plus),
            PhaseMatchingSpec::airy_grid(1.0, 0.6, 2.0),
            PhaseMatchingSpec::airy_grid(1.0, 0.9, 5.0).with_freq_chirp(2.0, ChirpSign::Plus),
            PhaseMatchingSpec::frequency_airy_grid(1.0, 0.5, 1.5),
            PhaseMatchingSpec::gaussian_comb(1.0, 0.8, 0.1),
        ];
        for spec in specs {
            let s = BiphotonState::new(&spec).unwrap();
            let n = norm_by_quadrature(&s);
            assert!((n - 1.0).abs() < 1e-6, "{spec:?}: {n}");
        }
    }

    #[test]
    fn airy_closed_form_peak_ratio() {
        let s = BiphotonState::new(&PhaseMatchingSpec::airy_grid(1.0, 0.9, 10.0)).unwrap();
        let ratio = s.spectral(0.0).unwrap().norm() / s.normalization();
        assert!((ratio - 10.0).abs() < 1e-12);
        let p = s.pure().unwrap();
        for w in [-0.3, 0.01, 0.5] {
            let sum = terms::eval(&p.terms, w);
            assert!((sum - p.spectral(w)).norm() < 1e-9 * p.spectral(0.0).norm());
        }
    }

    #[test]
    fn airy_temporal_peaks_decay_by_reflectivity() {
        let s = BiphotonState::new(&PhaseMatchingSpec::airy_grid(1.0, 0.9, 10.0)).unwrap();
        let r = s.temporal(-20.0).unwrap().norm() / s.temporal(0.0).unwrap().norm();
        assert!((r - 0.9).abs() < 1e-9);
    }

    #[test]
    fn zero_reflectivity_is_gaussian() {
        let a = BiphotonState::new(&PhaseMatchingSpec::airy_grid(0.8, 0.0, 3.0)).unwrap();
        let g = BiphotonState::new(&PhaseMatchingSpec::gaussian(0.8, 0.0)).unwrap();
        for w in [-2.0, -0.5, 0.0, 0.3, 1.7] {
            assert!((a.spectral(w).unwrap() - g.spectral(w).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn gaussian_peak_is_real() {
        let f = eval_spectral(&PhaseMatchingSpec::gaussian(1.0, 0.0), 0.0).unwrap();
        assert!(f.re > 0.0 && f.im == 0.0);
    }

    #[test]
    fn cat_temporal_amplitude() {
        let s = BiphotonState::new(&PhaseMatchingSpec::frequency_cat(1.0, 10.0)).unwrap();
        let a = s.normalization();
        for t in [0.0f64, 0.05, 0.3] {
            let expect = 2.0 * a * (2.0 * PI).sqrt() * (10.0 * t).cos() * (-t * t / 2.0).exp();
            assert!((s.temporal(t).unwrap().re - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_flags() {
        assert!(PhaseMatchingSpec::gaussian(1.0, 0.0).is_even());
        assert!(!PhaseMatchingSpec::gaussian(1.0, 0.5).is_even());
        assert!(!PhaseMatchingSpec::airy_grid(1.0, 0.5, 1.0).is_even());
        let s = BiphotonState::new(&PhaseMatchingSpec::airy_grid(1.0, 0.5, 1.0)).unwrap();
        assert!((s.spectral(0.3).unwrap() - s.spectral(-0.3).unwrap()).norm() > 1e-3);
    }
}
