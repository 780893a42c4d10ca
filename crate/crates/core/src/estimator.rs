//! Simulated HOM experiments and maximum-likelihood recovery of the delay,
//! the detuning and the detector loss, with Cramér-Rao comparisons.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hommodel::HomModel;
use crate::numerics::find_root;
use crate::statefamilies::Family;

/// Observed zero, single and coincidence counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TrialCounts {
    pub n0: u64,
    pub n1: u64,
    pub n2: u64,
}

impl TrialCounts {
    pub fn new(n0: u64, n1: u64, n2: u64) -> Self {
        TrialCounts { n0, n1, n2 }
    }

    pub fn total(&self) -> u64 {
        self.n0 + self.n1 + self.n2
    }
}

/// Which parameter is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Tau,
    Mu,
    Joint,
}

/// Rectangle searched by the estimator. A degenerate range pins that
/// parameter; single-parameter modes read the pinned value from its `lo`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchWindow {
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub mu_lo: f64,
    pub mu_hi: f64,
}

impl SearchWindow {
    pub fn along_tau(lo: f64, hi: f64, mu: f64) -> Self {
        SearchWindow { tau_lo: lo, tau_hi: hi, mu_lo: mu, mu_hi: mu }
    }

    pub fn along_mu(lo: f64, hi: f64, tau: f64) -> Self {
        SearchWindow { tau_lo: tau, tau_hi: tau, mu_lo: lo, mu_hi: hi }
    }

    /// One-sided delay window on which the dip profile at `μ = 0` is monotone:
    /// up to a quarter fringe `π/(2Δ)` for the frequency cat, `√2/√Var ω`
    /// otherwise (`2/σ` for the Gaussian), cut at the first turning point.
    pub fn preset(model: &HomModel) -> Self {
        let spec = model.state().spec();
        let hi = match spec.family {
            Family::FrequencyCat => std::f64::consts::PI / (2.0 * spec.delta()),
            _ => std::f64::consts::SQRT_2 * model.scales().0,
        };
        let slope = |t: f64| model.dip_gradient(0.0, t)[1];
        let n = 512;
        let mut prev = (hi / n as f64, slope(hi / n as f64));
        for i in 2..=n {
            let t = hi * i as f64 / n as f64;
            let s = slope(t);
            if s != 0.0 && prev.1 != 0.0 && s.signum() != prev.1.signum() {
                let cut = find_root(slope, prev.0, t, 1e-12 * hi).unwrap_or(prev.0);
                return SearchWindow::along_tau(0.0, cut, 0.0);
            }
            prev = (t, s);
        }
        SearchWindow::along_tau(0.0, hi, 0.0)
    }

    fn contains(&self, tau: f64, mu: f64) -> bool {
        (self.tau_lo..=self.tau_hi).contains(&tau) && (self.mu_lo..=self.mu_hi).contains(&mu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub which: Which,
    pub tau_hat: f64,
    pub mu_hat: f64,
    /// Dip value `πW` implied by the counts.
    pub dip_value_hat: f64,
    /// Delta-method standard error of the estimated parameter.
    pub stderr: f64,
    /// `1/√(N F)` at the estimate.
    pub cr_stderr: f64,
    pub gamma_hat: Option<f64>,
    pub window: SearchWindow,
    pub converged: bool,
}

/// Generator for experiment `index` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Multinomial draw of `n_repeats` outcomes at `(μ, τ)`.
pub fn simulate_trials(model: &HomModel, mu: f64, tau: f64, n_repeats: u64, seed: u64) -> Result<TrialCounts> {
    simulate_with(model, mu, tau, n_repeats, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn simulate_with(model: &HomModel, mu: f64, tau: f64, n: u64, rng: &mut ChaCha8Rng) -> Result<TrialCounts> {
    if n == 0 {
        return Err(Error::InvalidSpec("at least one repetition is required".into()));
    }
    let p = model.outcome_probs(mu, tau);
    let draw = |n: u64, p: f64, rng: &mut ChaCha8Rng| -> Result<u64> {
        let b = Binomial::new(n, p.clamp(0.0, 1.0)).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        Ok(b.sample(rng))
    };
    let n0 = draw(n, p.p0, rng)?;
    let rest = 1.0 - p.p0;
    let n2 = if rest > 0.0 { draw(n - n0, p.p2 / rest, rng)? } else { 0 };
    Ok(TrialCounts { n0, n1: n - n0 - n2, n2 })
}

/// `γ̂ = √(n0/N)`.
pub fn estimate_gamma(counts: &TrialCounts) -> f64 {
    let n = counts.total();
    if n == 0 {
        return 0.0;
    }
    (counts.n0 as f64 / n as f64).sqrt()
}

/// Dip value solving the likelihood equation, `(n1 - k·n2)/(n1 + n2)`.
pub fn dip_from_counts(counts: &TrialCounts, k: f64) -> Option<f64> {
    let m = counts.n1 + counts.n2;
    (m > 0).then(|| (counts.n1 as f64 - k * counts.n2 as f64) / m as f64)
}

const PROFILE_SAMPLES: usize = 257;

/// Maximum-likelihood estimate inside `window`.
pub fn mle_estimate(counts: &TrialCounts, model: &HomModel, window: SearchWindow, which: Which) -> Result<EstimationResult> {
    let k = model.detection().offset();
    let target = dip_from_counts(counts, k).ok_or(Error::NoRoot { target: f64::NAN, lo: f64::NAN, hi: f64::NAN })?;
    let (tau_hat, mu_hat) = match which {
        Which::Tau => {
            let mu = window.mu_lo;
            (invert_profile(|x| model.dip(mu, x), target, window.tau_lo, window.tau_hi)?, mu)
        }
        Which::Mu => {
            let tau = window.tau_lo;
            (tau, invert_profile(|x| model.dip(x, tau), target, window.mu_lo, window.mu_hi)?)
        }
        Which::Joint => joint_search(counts, model, window)?,
    };
    let g = model.dip_gradient(mu_hat, tau_hat);
    let slope = match which {
        Which::Tau => g[1].abs(),
        Which::Mu => g[2].abs(),
        Which::Joint => g[1].hypot(g[2]),
    };
    let p = model.outcome_probs(mu_hat, tau_hat);
    let q = if p.p1 + p.p2 > 0.0 { p.p2 / (p.p1 + p.p2) } else { 0.0 };
    let m = (counts.n1 + counts.n2) as f64;
    let stderr = (1.0 + k) * (q * (1.0 - q) / m).sqrt() / slope;
    let f = model.fisher(mu_hat, tau_hat);
    let info = match which {
        Which::Tau => f.f_tt,
        Which::Mu => f.f_mm,
        Which::Joint => f.f_tt + f.f_mm,
    };
    let cr_stderr = 1.0 / (counts.total() as f64 * info).sqrt();
    Ok(EstimationResult {
        which,
        tau_hat,
        mu_hat,
        dip_value_hat: target,
        stderr,
        cr_stderr,
        gamma_hat: Some(estimate_gamma(counts)),
        window,
        converged: window.contains(tau_hat, mu_hat) && stderr.is_finite() && stderr > 0.0,
    })
}

/// Solves `profile(x) = target` on a window where the profile is monotone.
fn invert_profile<F: Fn(f64) -> f64>(profile: F, target: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(hi > lo) {
        return Err(Error::InvalidSpec(format!("empty search window [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (PROFILE_SAMPLES - 1) as f64;
    let values: Vec<f64> = (0..PROFILE_SAMPLES).map(|i| profile(lo + i as f64 * step)).collect();
    let rising = values[PROFILE_SAMPLES - 1] > values[0];
    let monotone = values.windows(2).all(|w| if rising { w[1] >= w[0] } else { w[1] <= w[0] });
    if !monotone {
        return Err(Error::NonMonotoneWindow);
    }
    let (a, b) = (values[0], values[PROFILE_SAMPLES - 1]);
    let (min, max) = (a.min(b), a.max(b));
    let slack = 1e-12 * (max - min).max(1e-300);
    if target > max + slack || target < min - slack {
        return Err(Error::NoRoot { target, lo: min, hi: max });
    }
    if (target - a).abs() <= slack {
        return Ok(lo);
    }
    if (target - b).abs() <= slack {
        return Ok(hi);
    }
    find_root(|x| profile(x) - target, lo, hi, 1e-12 * (hi - lo)).map_err(|_| Error::NoRoot { target, lo: min, hi: max })
}

/// Negative multinomial log-likelihood, up to the γ-only `n0` term.
fn neg_log_likelihood(counts: &TrialCounts, model: &HomModel, mu: f64, tau: f64) -> f64 {
    let p = model.outcome_probs(mu, tau);
    let term = |n: u64, p: f64| if n == 0 { 0.0 } else { -(n as f64) * p.max(1e-300).ln() };
    term(counts.n1, p.p1) + term(counts.n2, p.p2)
}

const JOINT_GRID: usize = 41;

/// Coarse grid over the window followed by coordinate descent with golden
/// section line searches.
fn joint_search(counts: &TrialCounts, model: &HomModel, w: SearchWindow) -> Result<(f64, f64)> {
    if !(w.tau_hi > w.tau_lo && w.mu_hi > w.mu_lo) {
        return Err(Error::InvalidSpec("joint estimation needs a two-dimensional window".into()));
    }
    let nll = |mu: f64, tau: f64| neg_log_likelihood(counts, model, mu, tau);
    let (dt, dm) = ((w.tau_hi - w.tau_lo) / (JOINT_GRID - 1) as f64, (w.mu_hi - w.mu_lo) / (JOINT_GRID - 1) as f64);
    let mut best = (f64::INFINITY, w.tau_lo, w.mu_lo);
    for i in 0..JOINT_GRID {
        for j in 0..JOINT_GRID {
            let (t, m) = (w.tau_lo + i as f64 * dt, w.mu_lo + j as f64 * dm);
            let v = nll(m, t);
            if v < best.0 {
                best = (v, t, m);
            }
        }
    }
    let (mut tau, mut mu) = (best.1, best.2);
    for _ in 0..100 {
        let t_new = golden(|t| nll(mu, t), (tau - dt).max(w.tau_lo), (tau + dt).min(w.tau_hi), 1e-12 * (w.tau_hi - w.tau_lo));
        let m_new = golden(|m| nll(m, t_new), (mu - dm).max(w.mu_lo), (mu + dm).min(w.mu_hi), 1e-12 * (w.mu_hi - w.mu_lo));
        let moved = (t_new - tau).abs() / dt + (m_new - mu).abs() / dm;
        tau = t_new;
        mu = m_new;
        if moved < 1e-10 {
            break;
        }
    }
    Ok((tau, mu))
}

fn golden<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Parameter scanned by a precision profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Tau,
    Mu,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionProfile {
    pub axis: Axis,
    /// `(α, Δα)`; `Δα = +∞` where the slope of `P2` vanishes.
    pub points: Vec<(f64, f64)>,
    /// Location and value of the smallest finite `Δα`.
    pub best: Option<(f64, f64)>,
}

/// Single-shot precision `Δα = √(P2(1-P2))/|∂α P2|` from coincidences alone,
/// with the other parameter held at `fixed`.
pub fn precision_profile(model: &HomModel, axis: Axis, fixed: f64, lo: f64, hi: f64, n: usize) -> Result<PrecisionProfile> {
    if n < 2 || !(hi > lo) {
        return Err(Error::InvalidSpec("precision profile needs n >= 2 points on a nonempty range".into()));
    }
    let l = (1.0 - model.detection().gamma).powi(2);
    let (st, sm) = model.scales();
    let points: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let (mu, tau) = match axis {
                Axis::Tau => (fixed, x),
                Axis::Mu => (x, fixed),
            };
            let g = model.dip_gradient(mu, tau);
            let (slope, scale) = match axis {
                Axis::Tau => (g[1], st),
                Axis::Mu => (g[2], sm),
            };
            let p2 = model.outcome_probs(mu, tau).p2;
            let dp2 = 0.5 * l * slope.abs();
            if dp2 * scale <= 1e-12 {
                (x, f64::INFINITY)
            } else {
                (x, (p2 * (1.0 - p2)).sqrt() / dp2)
            }
        })
        .collect();
    let best = points
        .iter()
        .copied()
        .filter(|p| p.1.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1));
    Ok(PrecisionProfile { axis, points, best })
}

/// Operating delay for estimation at `μ = mu`: the far edge of the first
/// flank on which `F_ττ` stays within 1% of its supremum over the window.
pub fn fi_optimal_tau(model: &HomModel, window: SearchWindow) -> Result<f64> {
    let (lo, hi) = (window.tau_lo, window.tau_hi);
    if !(hi > lo) {
        return Err(Error::InvalidSpec("empty delay window".into()));
    }
    let mu = window.mu_lo;
    let n = 4001;
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let fs: Vec<f64> = xs.par_iter().map(|&t| model.fisher(mu, t).f_tt).collect();
    let sup = fs.iter().copied().fold(0.0, f64::max);
    if !(sup > 0.0) {
        return Err(Error::NoRoot { target: 0.0, lo, hi });
    }
    let level = 0.99 * sup;
    let first = fs.iter().position(|&f| f >= level).unwrap_or(0);
    let end = fs[first..].iter().position(|&f| f < level).map(|j| first + j);
    match end {
        None => Ok(xs[n - 1]),
        Some(j) => find_root(|t| model.fisher(mu, t).f_tt - level, xs[j - 1], xs[j], 1e-12 * (hi - lo)),
    }
}

/// Summary of a Monte Carlo Cramér-Rao comparison for the delay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub tau_true: f64,
    pub mu: f64,
    pub gamma: f64,
    pub n_repeats: u64,
    pub n_experiments: usize,
    pub seed: u64,
    /// `(experiment id, τ̂)`; `None` when the estimator failed.
    pub estimates: Vec<(usize, Option<f64>)>,
    pub fisher_tau: f64,
    pub mean: f64,
    pub bias: f64,
    pub variance: f64,
    /// `variance · N · F_ττ(τ*)`; 1 at saturation.
    pub ratio: f64,
    pub ratio_stderr: f64,
    pub failure_rate: f64,
}

/// Repeats `n_experiments` simulations of `n_repeats` trials at `τ*`, each
/// from its own stream of `seed`, and compares the spread of `τ̂` to the bound.
pub fn cr_saturation_study(
    model: &HomModel,
    tau_true: f64,
    window: SearchWindow,
    n_repeats: u64,
    n_experiments: usize,
    seed: u64,
) -> Result<StudyReport> {
    if n_experiments < 2 {
        return Err(Error::InvalidSpec("a study needs at least two experiments".into()));
    }
    let mu = window.mu_lo;
    let estimates: Vec<(usize, Option<f64>)> = (0..n_experiments)
        .into_par_iter()
        .map(|i| {
            let counts = simulate_with(model, mu, tau_true, n_repeats, &mut stream_rng(seed, i as u64))?;
            Ok((i, mle_estimate(&counts, model, window, Which::Tau).ok().map(|r| r.tau_hat)))
        })
        .collect::<Result<_>>()?;
    let ok: Vec<f64> = estimates.iter().filter_map(|e| e.1).collect();
    let m = ok.len() as f64;
    let mean = ok.iter().sum::<f64>() / m;
    let variance = ok.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let fisher_tau = model.fisher(mu, tau_true).f_tt;
    let ratio = variance * n_repeats as f64 * fisher_tau;
    Ok(StudyReport {
        tau_true,
        mu,
        gamma: model.detection().gamma,
        n_repeats,
        n_experiments,
        seed,
        fisher_tau,
        mean,
        bias: mean - tau_true,
        variance,
        ratio,
        ratio_stderr: ratio * (2.0 / (m - 1.0)).sqrt(),
        failure_rate: 1.0 - m / n_experiments as f64,
        estimates,
    })
}
