//! Shared numerical kernels: adaptive Gauss–Legendre quadrature, Gaussian
//! integral closed forms, truncated double sums, finite differences and
//! bracketed root finding.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Configuration of an adaptive composite Gauss–Legendre integration.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub lower: f64,
    pub upper: f64,
    /// Number of nodes of the rule applied on each panel.
    pub order: usize,
    /// Uniform panels used before any adaptive refinement.
    pub initial_panels: usize,
    /// Refinement cap on the total number of integrand evaluations.
    pub max_points: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl QuadratureSpec {
    pub fn new(lower: f64, upper: f64) -> Self {
        QuadratureSpec {
            lower,
            upper,
            order: 16,
            initial_panels: 8,
            max_points: 1 << 18,
            abs_tol: 1e-14,
            rel_tol: 1e-11,
        }
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.initial_panels = panels.max(1);
        self
    }

    pub fn with_tolerance(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_points(mut self, max_points: usize) -> Self {
        self.max_points = max_points;
        self
    }
}

/// Result of a quadrature with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    whole: Complex64,
    left: Complex64,
    right: Complex64,
}

impl Panel {
    fn error(&self) -> f64 {
        (self.whole - self.left - self.right).norm()
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error() == other.error()
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error()
            .total_cmp(&other.error())
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    fn apply<F: FnMut(f64) -> Complex64>(&self, f: &mut F, a: f64, b: f64) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }
}

/// Integrates a complex-valued function of one real variable.
///
/// The interval is split into `initial_panels` uniform panels. Each panel is
/// estimated with the rule on the panel and on its two halves; the panel with
/// the largest discrepancy is bisected until the summed discrepancy drops
/// below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: FnMut(f64) -> Complex64>(mut f: F, spec: &QuadratureSpec) -> Result<Integral> {
    if !(spec.lower.is_finite() && spec.upper.is_finite()) || spec.order == 0 {
        return Err(Error::QuadratureFailure(format!(
            "bad support [{}, {}] or order {}",
            spec.lower, spec.upper, spec.order
        )));
    }
    if spec.lower == spec.upper {
        return Ok(Integral { value: Complex64::new(0.0, 0.0), error: 0.0, evaluations: 0 });
    }
    let (nodes, weights) = gauss_legendre(spec.order);
    let rule = Rule { nodes, weights };
    let mut evaluations = 0usize;
    let make = |f: &mut F, a: f64, b: f64, whole: Option<Complex64>, evals: &mut usize| {
        let m = 0.5 * (a + b);
        let whole = match whole {
            Some(w) => w,
            None => {
                *evals += spec.order;
                rule.apply(f, a, b)
            }
        };
        *evals += 2 * spec.order;
        Panel { a, b, whole, left: rule.apply(f, a, m), right: rule.apply(f, m, b) }
    };

    let n0 = spec.initial_panels.max(1);
    let width = (spec.upper - spec.lower) / n0 as f64;
    let mut heap = BinaryHeap::with_capacity(2 * n0);
    for i in 0..n0 {
        let a = spec.lower + width * i as f64;
        let b = if i + 1 == n0 { spec.upper } else { a + width };
        heap.push(make(&mut f, a, b, None, &mut evaluations));
    }

    let (mut value, mut error) = totals(&heap);
    loop {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::QuadratureFailure("integrand produced a non-finite value".into()));
        }
        let target = spec.abs_tol.max(spec.rel_tol * value.norm());
        if error <= target {
            let (v, e) = totals(&heap);
            if e <= spec.abs_tol.max(spec.rel_tol * v.norm()) {
                return Ok(Integral { value: v, error: e, evaluations });
            }
            value = v;
            error = e;
        }
        if evaluations + 4 * spec.order > spec.max_points {
            return Err(Error::QuadratureFailure(format!(
                "no convergence after {evaluations} evaluations (error {error:e}, target {target:e})"
            )));
        }
        let worst = heap.pop().expect("heap never empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            return Err(Error::QuadratureFailure("panel width underflow".into()));
        }
        let left = make(&mut f, worst.a, m, Some(worst.left), &mut evaluations);
        let right = make(&mut f, m, worst.b, Some(worst.right), &mut evaluations);
        value += left.left + left.right + right.left + right.right - worst.left - worst.right;
        error += left.error() + right.error() - worst.error();
        heap.push(left);
        heap.push(right);
    }
}

fn totals(heap: &BinaryHeap<Panel>) -> (Complex64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for p in panels {
        value += p.left + p.right;
        error += p.error();
    }
    (value, error)
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F: FnMut(f64) -> f64>(mut f: F, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let r = integrate(|x| Complex64::new(f(x), 0.0), spec)?;
    Ok((r.value.re, r.error))
}

/// `∫ x^order exp(-alpha x² + beta x) dx` over the real line, order 0, 1 or 2.
pub fn gaussian_moment(alpha: Complex64, beta: Complex64, order: u32) -> Result<Complex64> {
    gaussian_moment_scaled(alpha, beta, Complex64::new(0.0, 0.0), order)
}

/// `∫ x^order exp(-alpha x² + beta x + c0) dx`; folding `c0` into the
/// exponent avoids overflow when large constants cancel.
pub fn gaussian_moment_scaled(
    alpha: Complex64,
    beta: Complex64,
    c0: Complex64,
    order: u32,
) -> Result<Complex64> {
    if !(alpha.re > 0.0) {
        return Err(Error::InvalidAlpha(alpha.re));
    }
    let base = (Complex64::new(PI, 0.0) / alpha).sqrt() * (beta * beta / (4.0 * alpha) + c0).exp();
    match order {
        0 => Ok(base),
        1 => Ok(base * beta / (2.0 * alpha)),
        2 => Ok(base * (1.0 + beta * beta / (2.0 * alpha)) / (2.0 * alpha)),
        _ => Err(Error::InvalidSpec(format!("Gaussian moment order {order} not supported"))),
    }
}

/// Analytic bound on the magnitude of the summand of a double series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailBound {
    /// Over n, m ≥ 0: |w(n,m)| ≤ scale · ratio^(n+m).
    Geometric { ratio: f64, scale: f64 },
    /// Over n, m ≥ 0: |w(n,m)| ≤ scale · ratio^(n+m) · exp(-damping (n-m)²).
    GeometricBanded { ratio: f64, scale: f64, damping: f64 },
    /// Over all integers: |w(n,m)| ≤ scale · exp(-rate (n² + m²)).
    Gaussian { rate: f64, scale: f64 },
}

impl TailBound {
    /// Geometric bound for a summand carrying an extra polynomial factor
    /// (n+m)^degree, obtained by trading half the decay rate.
    pub fn geometric_with_poly(ratio: f64, scale: f64, degree: i32) -> TailBound {
        if ratio == 0.0 {
            return TailBound::Geometric { ratio, scale };
        }
        let r = ratio.sqrt();
        let peak = (degree as f64 / (-r.ln())).max(0.0);
        let mut factor: f64 = 1.0;
        for p in [peak.floor(), peak.ceil()] {
            factor = factor.max(p.powi(degree) * r.powf(p));
        }
        TailBound::Geometric { ratio: r, scale: scale * factor }
    }
}

/// A truncated double sum together with a certified tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleSum {
    pub value: f64,
    pub tail_bound: f64,
    /// Largest retained index magnitude.
    pub extent: usize,
    pub terms: usize,
}

const MAX_EXTENT: usize = 10_000;

/// Sums `weight(n, m)` over the domain implied by `bound`, truncating once
/// the analytic tail estimate drops below `tolerance`.
pub fn truncated_double_sum<F: Fn(i64, i64) -> f64>(
    weight: F,
    bound: TailBound,
    tolerance: f64,
) -> Result<DoubleSum> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidSpec("tolerance must be positive".into()));
    }
    match bound {
        TailBound::Geometric { ratio, scale } => {
            let (n, tail) = geometric_extent(ratio, scale, tolerance)?;
            Ok(sum_quadrant(&weight, n, None, tail))
        }
        TailBound::GeometricBanded { ratio, scale, damping } => {
            let (n, tail_g) = geometric_extent(ratio, scale, 0.5 * tolerance)?;
            let band = banded_width(ratio, scale, damping, 0.5 * tolerance, n);
            let band_tail = if band >= n { 0.0 } else { band_tail(ratio, scale, damping, band) };
            Ok(sum_quadrant(&weight, n, Some(band), tail_g + band_tail))
        }
        TailBound::Gaussian { rate, scale } => {
            if !(rate > 0.0) {
                return Err(Error::NonConvergentSum { what: "Gaussian double sum".into(), terms: MAX_EXTENT });
            }
            let q = (-rate).exp();
            let full = 1.0 + 2.0 / (1.0 - q);
            let mut n = 0usize;
            loop {
                let nf = n as f64;
                let edge = 2.0 * (-rate * (nf + 1.0).powi(2)).exp() / (1.0 - (-rate * (2.0 * nf + 3.0)).exp());
                let tail = 2.0 * scale * edge * full;
                if tail < tolerance {
                    let ni = n as i64;
                    let mut value = 0.0;
                    for a in -ni..=ni {
                        for b in -ni..=ni {
                            value += weight(a, b);
                        }
                    }
                    return Ok(DoubleSum { value, tail_bound: tail, extent: n, terms: (2 * n + 1).pow(2) });
                }
                n += 1;
                if n > MAX_EXTENT {
                    return Err(Error::NonConvergentSum { what: "Gaussian double sum".into(), terms: MAX_EXTENT });
                }
            }
        }
    }
}

fn geometric_extent(ratio: f64, scale: f64, tolerance: f64) -> Result<(usize, f64)> {
    if !(0.0..1.0).contains(&ratio) {
        return Err(Error::NonConvergentSum { what: format!("geometric sum with ratio {ratio}"), terms: MAX_EXTENT });
    }
    if ratio == 0.0 {
        return Ok((0, 0.0));
    }
    let denom = (1.0 - ratio).powi(2);
    let mut n = 0usize;
    let mut rn1 = ratio;
    loop {
        let tail = 2.0 * scale * rn1 / denom;
        if tail < tolerance {
            return Ok((n, tail));
        }
        n += 1;
        rn1 *= ratio;
        if n > MAX_EXTENT {
            return Err(Error::NonConvergentSum { what: format!("geometric sum with ratio {ratio}"), terms: MAX_EXTENT });
        }
    }
}

fn band_tail(ratio: f64, scale: f64, damping: f64, band: usize) -> f64 {
    let k = band as f64 + 1.0;
    let q = (-damping).exp();
    2.0 * scale * (-damping * k * k).exp() / (1.0 - q.powf(2.0 * k + 1.0)) / (1.0 - ratio).powi(2)
}

fn banded_width(ratio: f64, scale: f64, damping: f64, tolerance: f64, n: usize) -> usize {
    if !(damping > 0.0) {
        return n;
    }
    (0..n).find(|&b| band_tail(ratio, scale, damping, b) < tolerance).unwrap_or(n)
}

fn sum_quadrant<F: Fn(i64, i64) -> f64>(weight: &F, n: usize, band: Option<usize>, tail: f64) -> DoubleSum {
    let mut value = 0.0;
    let mut terms = 0usize;
    let b = band.unwrap_or(n) as i64;
    let ni = n as i64;
    for a in 0..=ni {
        let lo = (a - b).max(0);
        let hi = (a + b).min(ni);
        for c in lo..=hi {
            value += weight(a, c);
            terms += 1;
        }
    }
    DoubleSum { value, tail_bound: tail, extent: n, terms }
}

/// Central-difference step `ε^(1/3)·max(scale, |x|)` for first derivatives.
pub fn fd_step(x: f64, scale: f64) -> f64 {
    f64::EPSILON.cbrt() * scale.max(x.abs())
}

/// Central-difference step `ε^(1/4)·max(scale, |x|)` for second derivatives.
pub fn fd_step2(x: f64, scale: f64) -> f64 {
    f64::EPSILON.powf(0.25) * scale.max(x.abs())
}

pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

pub fn central_second_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// Mixed partial `∂²g/∂x∂y` by the four-point stencil.
pub fn central_mixed_diff<F: Fn(f64, f64) -> f64>(g: F, x: f64, y: f64, hx: f64, hy: f64) -> f64 {
    (g(x + hx, y + hy) - g(x + hx, y - hy) - g(x - hx, y + hy) + g(x - hx, y - hy)) / (4.0 * hx * hy)
}

/// Root of `f` inside `[lo, hi]` by bisection with secant acceleration.
/// The bracket must show a sign change; `xtol` is the absolute tolerance.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoRoot { target: 0.0, lo: fa.min(fb), hi: fa.max(fb) });
    }
    for _ in 0..200 {
        if b - a <= xtol {
            break;
        }
        let secant = b - fb * (b - a) / (fb - fa);
        let mid = 0.5 * (a + b);
        let quarter = 0.25 * (b - a);
        let x = if secant.is_finite() && (secant - mid).abs() < quarter { secant } else { mid };
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = w.iter().sum();
        assert_relative_eq!(s, 2.0, epsilon = 1e-14);
        let m30: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert_relative_eq!(m30, 2.0 / 31.0, epsilon = 1e-14);
    }

    #[test]
    fn gaussian_over_finite_support() {
        let r = integrate(|x| c((-x * x).exp(), 0.0), &QuadratureSpec::new(-8.0, 8.0)).unwrap();
        assert!((r.value.re - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn second_moment_with_linear_term() {
        let spec = QuadratureSpec::new(-12.0, 14.0).with_panels(16);
        let r = integrate(|x| c(x * x * (-x * x + 2.0 * x).exp(), 0.0), &spec).unwrap();
        let exact = 0.5 * PI.sqrt() * 3.0 * 1f64.exp();
        assert!((r.value.re - exact).abs() < 1e-11 * exact);
        let g = gaussian_moment(c(1.0, 0.0), c(2.0, 0.0), 2).unwrap();
        assert!((g.re - exact).abs() < 1e-13 * exact);
    }

    #[test]
    fn oscillatory_gaussian() {
        let spec = QuadratureSpec::new(-9.0, 9.0).with_panels(64).with_tolerance(1e-16, 1e-12);
        let r = integrate(|x| c((-x * x).exp() * (40.0 * x).cos(), 0.0), &spec).unwrap();
        let exact = PI.sqrt() * (-400.0f64).exp();
        assert!((r.value.re - exact).abs() < 1e-15);
        assert!(r.error >= (r.value.re - exact).abs() || r.error < 1e-15);
    }

    #[test]
    fn gaussian_moment_closed_forms() {
        let g0 = gaussian_moment(c(1.0, 0.0), c(0.0, 0.0), 0).unwrap();
        assert_relative_eq!(g0.re, PI.sqrt(), epsilon = 1e-15);
        let g1 = gaussian_moment(c(1.0, 0.0), c(0.0, 0.0), 1).unwrap();
        assert_eq!(g1, c(0.0, 0.0));
        let g2 = gaussian_moment(c(1.0, 0.0), c(0.0, 2.0), 2).unwrap();
        let q = integrate(
            |x| c(x * x, 0.0) * c(-x * x, 2.0 * x).exp(),
            &QuadratureSpec::new(-10.0, 10.0).with_panels(32),
        )
        .unwrap();
        assert!((q.value - g2).norm() < 1e-12);
        assert!(matches!(gaussian_moment(c(-1.0, 0.0), c(0.0, 0.0), 0), Err(Error::InvalidAlpha(_))));
    }

    #[test]
    fn geometric_double_sum() {
        let r = 0.5f64;
        let s = truncated_double_sum(|n, m| r.powi((n + m) as i32), TailBound::Geometric { ratio: r, scale: 1.0 }, 1e-14)
            .unwrap();
        assert!((s.value - 4.0).abs() < 1e-12);
        let z = truncated_double_sum(|n, m| if n + m == 0 { 1.0 } else { 0.0 }, TailBound::Geometric { ratio: 0.0, scale: 1.0 }, 1e-14)
            .unwrap();
        assert_eq!(z.value, 1.0);
    }

    #[test]
    fn banded_sum_matches_brute_force() {
        let (r, s2) = (0.9f64, 100.0f64);
        let w = |n: i64, m: i64| r.powi((n + m) as i32) * (-((n - m) as f64).powi(2) * s2).exp();
        let banded = truncated_double_sum(w, TailBound::GeometricBanded { ratio: r, scale: 1.0, damping: s2 }, 1e-13).unwrap();
        let mut brute = 0.0;
        for n in 0..600 {
            for m in 0..600 {
                brute += w(n, m);
            }
        }
        assert!((banded.value - brute).abs() < 1e-10 * brute);
        let diagonal = 1.0 / (1.0 - r * r);
        assert!((banded.value - diagonal).abs() < 1e-10 * diagonal);
    }

    #[test]
    fn gaussian_plane_sum() {
        let s = truncated_double_sum(
            |n, m| (-0.5 * ((n * n + m * m) as f64)).exp(),
            TailBound::Gaussian { rate: 0.5, scale: 1.0 },
            1e-15,
        )
        .unwrap();
        let one: f64 = (-40..=40).map(|n: i64| (-0.5 * (n * n) as f64).exp()).sum();
        assert!((s.value - one * one).abs() < 1e-13);
    }

    #[test]
    fn root_finding() {
        let r = find_root(|x| x.cos() - x, 0.0, 1.0, 1e-14).unwrap();
        assert!((r.cos() - r).abs() < 1e-13);
        assert!(matches!(find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12), Err(Error::NoRoot { .. })));
    }

    #[test]
    fn finite_differences() {
        let h = fd_step(1.0, 1.0);
        assert!((central_diff(f64::sin, 1.0, h) - 1f64.cos()).abs() < 1e-10);
        let h2 = fd_step2(1.0, 1.0);
        assert!((central_second_diff(f64::sin, 1.0, h2) + 1f64.sin()).abs() < 1e-7);
    }
}
