//! Sums of complex Gaussians `a·exp(-p(ω-c)² + q(ω-c))` and the closed-form
//! integrals built on them (overlaps, moments, Fourier transforms and cross
//! Wigner functions).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::numerics::gaussian_moment_scaled;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Term {
    pub amp: Complex64,
    pub p: Complex64,
    pub q: Complex64,
    pub center: f64,
}

impl Term {
    pub fn gaussian(amp: f64, center: f64, width: f64) -> Term {
        Term {
            amp: Complex64::new(amp, 0.0),
            p: Complex64::new(0.5 / (width * width), 0.0),
            q: ZERO,
            center,
        }
    }

    pub fn eval(&self, w: f64) -> Complex64 {
        let x = w - self.center;
        self.amp * (-self.p * x * x + self.q * x).exp()
    }

    /// Value with first and second derivatives in ω.
    pub fn eval_derivs(&self, w: f64) -> [Complex64; 3] {
        let x = w - self.center;
        let v = self.eval(w);
        let l = -2.0 * self.p * x + self.q;
        [v, l * v, (l * l - 2.0 * self.p) * v]
    }

    /// `∫ e^{iωt} φ(ω) dω`.
    pub fn fourier(&self, t: f64) -> Complex64 {
        let it = Complex64::new(0.0, t);
        let s = self.q + it;
        self.amp * (Complex64::new(PI, 0.0) / self.p).sqrt() * (it * self.center + s * s / (4.0 * self.p)).exp()
    }

    /// Multiplies by `exp(i·b·(ω-c0)²/2)`.
    pub fn freq_chirped(&self, b: f64, c0: f64) -> Term {
        let e = self.center - c0;
        let i = Complex64::new(0.0, 1.0);
        Term {
            amp: self.amp * (i * b * e * e / 2.0).exp(),
            p: self.p - i * b / 2.0,
            q: self.q + i * b * e,
            center: self.center,
        }
    }

    /// Multiplies the temporal amplitude by `exp(i·κ·t²/2)` and transforms back.
    pub fn time_chirped(&self, kappa: f64) -> Term {
        let i = Complex64::new(0.0, 1.0);
        let a_t = 1.0 / (4.0 * self.p) - i * kappa / 2.0;
        let r = self.q / (2.0 * self.p);
        let pi = Complex64::new(PI, 0.0);
        let amp = self.amp / (2.0 * PI)
            * (pi / self.p).sqrt()
            * (pi / a_t).sqrt()
            * (self.q * self.q / (4.0 * self.p) - r * r / (4.0 * a_t)).exp();
        Term { amp, p: 1.0 / (4.0 * a_t), q: r / (2.0 * a_t), center: self.center }
    }

    /// Peak magnitude, location and width of |φ|.
    pub fn envelope(&self) -> (f64, f64, f64) {
        let pr = self.p.re;
        let qr = self.q.re;
        let peak = self.amp.norm() * (qr * qr / (4.0 * pr)).exp();
        (peak, self.center + qr / (2.0 * pr), 1.0 / (2.0 * pr).sqrt())
    }
}

/// Product `φ_j·conj(φ_k)` written as `amp·exp(-α x² + β x + c0)` with
/// `x = ω - m`, together with the linear forms of `φ'_j/φ_j` and
/// `conj(φ'_k/φ_k)` in `x`.
pub(crate) struct Pair {
    pub amp: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub c0: Complex64,
    pub m: f64,
    /// (slope, offset) of `φ'_j/φ_j`.
    pub lj: (Complex64, Complex64),
    /// (slope, offset) of `conj(φ'_k/φ_k)`.
    pub lk: (Complex64, Complex64),
}

impl Pair {
    pub fn new(j: &Term, k: &Term) -> Pair {
        let m = 0.5 * (j.center + k.center);
        let dj = m - j.center;
        let dk = m - k.center;
        let pk = k.p.conj();
        let qk = k.q.conj();
        Pair {
            amp: j.amp * k.amp.conj(),
            alpha: j.p + pk,
            beta: (j.q - 2.0 * j.p * dj) + (qk - 2.0 * pk * dk),
            c0: (-j.p * dj * dj + j.q * dj) + (-pk * dk * dk + qk * dk),
            m,
            lj: (-2.0 * j.p, j.q - 2.0 * j.p * dj),
            lk: (-2.0 * pk, qk - 2.0 * pk * dk),
        }
    }

    /// `∫ poly(x)·φ_j conj(φ_k) dω` with `poly = c[0] + c[1] x + c[2] x²`.
    pub fn integrate(&self, c: [Complex64; 3]) -> Complex64 {
        let mut acc = ZERO;
        for (order, coef) in c.iter().enumerate() {
            if *coef != ZERO {
                let g = gaussian_moment_scaled(self.alpha, self.beta, self.c0, order as u32)
                    .expect("terms have Re p > 0");
                acc += coef * g;
            }
        }
        self.amp * acc
    }
}

fn poly_mul(a: (Complex64, Complex64), b: (Complex64, Complex64)) -> [Complex64; 3] {
    [a.1 * b.1, a.0 * b.1 + a.1 * b.0, a.0 * b.0]
}

/// Intensity moments of a term sum, computed in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SpectralMoments {
    pub norm: f64,
    pub mean_w: f64,
    pub mean_w2: f64,
    pub mean_t: f64,
    pub mean_t2: f64,
    pub mean_wt: f64,
}

pub(crate) fn norm_squared(terms: &[Term]) -> f64 {
    let one = [Complex64::new(1.0, 0.0), ZERO, ZERO];
    let mut acc = 0.0;
    for (a, j) in terms.iter().enumerate() {
        acc += Pair::new(j, j).integrate(one).re;
        for k in &terms[a + 1..] {
            acc += 2.0 * Pair::new(j, k).integrate(one).re;
        }
    }
    acc
}

/// Phase-space moments using `∫tW dt = Im(f' f*)` and `∫t²W dω dt = ∫|f'|² dω`.
pub(crate) fn moments(terms: &[Term]) -> SpectralMoments {
    let one = Complex64::new(1.0, 0.0);
    let (mut n, mut w1, mut w2, mut t1, mut t2, mut wt) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for j in terms {
        for k in terms {
            let pr = Pair::new(j, k);
            let m = Complex64::new(pr.m, 0.0);
            n += pr.integrate([one, ZERO, ZERO]).re;
            w1 += pr.integrate([m, one, ZERO]).re;
            w2 += pr.integrate([m * m, 2.0 * m, one]).re;
            let lj = pr.integrate([pr.lj.1, pr.lj.0, ZERO]);
            t1 += lj.im;
            let lw = poly_mul(pr.lj, (one, m));
            wt += pr.integrate(lw).im;
            t2 += pr.integrate(poly_mul(pr.lj, pr.lk)).re;
        }
    }
    SpectralMoments { norm: n, mean_w: w1 / n, mean_w2: w2 / n, mean_t: t1 / n, mean_t2: t2 / n, mean_wt: wt / n }
}

/// Cross-Wigner contribution of a pair with its ω and t derivatives.
fn cross_wigner(j: &Term, k: &Term, w: f64, t: f64, grad: bool) -> [Complex64; 3] {
    let pk = k.p.conj();
    let qk = k.q.conj();
    let uj = w - j.center;
    let vk = w - k.center;
    let alpha = j.p + pk;
    let beta = 2.0 * j.p * uj - j.q - 2.0 * pk * vk + qk + Complex64::new(0.0, 2.0 * t);
    let c = -j.p * uj * uj + j.q * uj - pk * vk * vk + qk * vk;
    let val = j.amp * k.amp.conj() / PI
        * (Complex64::new(PI, 0.0) / alpha).sqrt()
        * (beta * beta / (4.0 * alpha) + c).exp();
    if !grad {
        return [val, ZERO, ZERO];
    }
    let dw = (-2.0 * j.p * uj + j.q - 2.0 * pk * vk + qk) + beta * (j.p - pk) / alpha;
    let dt = Complex64::new(0.0, 1.0) * beta / alpha;
    [val, val * dw, val * dt]
}

/// Wigner function of a term sum, optionally with (∂ω, ∂t).
pub(crate) fn wigner(terms: &[Term], w: f64, t: f64, grad: bool) -> [f64; 3] {
    let mut acc = [0.0; 3];
    for (a, j) in terms.iter().enumerate() {
        let d = cross_wigner(j, j, w, t, grad);
        for i in 0..3 {
            acc[i] += d[i].re;
        }
        for k in &terms[a + 1..] {
            let c = cross_wigner(j, k, w, t, grad);
            for i in 0..3 {
                acc[i] += 2.0 * c[i].re;
            }
        }
    }
    acc
}

pub(crate) fn eval(terms: &[Term], w: f64) -> Complex64 {
    terms.iter().map(|t| t.eval(w)).sum()
}

pub(crate) fn eval_derivs(terms: &[Term], w: f64) -> [Complex64; 3] {
    let mut acc = [ZERO; 3];
    for t in terms {
        let d = t.eval_derivs(w);
        for i in 0..3 {
            acc[i] += d[i];
        }
    }
    acc
}

pub(crate) fn fourier(terms: &[Term], t: f64) -> Complex64 {
    terms.iter().map(|x| x.fourier(t)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, QuadratureSpec};

    fn sample() -> Vec<Term> {
        let i = Complex64::new(0.0, 1.0);
        vec![
            Term { amp: Complex64::new(0.7, 0.2), p: Complex64::new(0.6, 0.3), q: 0.4 * i, center: 0.5 },
            Term { amp: Complex64::new(-0.3, 0.5), p: Complex64::new(1.1, -0.2), q: Complex64::new(0.1, -0.8), center: -1.0 },
        ]
    }

    fn quad(f: impl FnMut(f64) -> Complex64) -> Complex64 {
        integrate(f, &QuadratureSpec::new(-14.0, 14.0).with_panels(64)).unwrap().value
    }

    #[test]
    fn closed_form_moments_match_quadrature() {
        let ts = sample();
        let m = moments(&ts);
        let n = quad(|w| Complex64::new(eval(&ts, w).norm_sqr(), 0.0)).re;
        assert!((m.norm - n).abs() < 1e-12);
        assert!((norm_squared(&ts) - n).abs() < 1e-12);
        let w2 = quad(|w| Complex64::new(w * w * eval(&ts, w).norm_sqr(), 0.0)).re / n;
        assert!((m.mean_w2 - w2).abs() < 1e-11);
        let t1 = quad(|w| {
            let d = eval_derivs(&ts, w);
            Complex64::new((d[1] * d[0].conj()).im, 0.0)
        })
        .re / n;
        assert!((m.mean_t - t1).abs() < 1e-11);
        let t2 = quad(|w| Complex64::new(eval_derivs(&ts, w)[1].norm_sqr(), 0.0)).re / n;
        assert!((m.mean_t2 - t2).abs() < 1e-10);
    }

    #[test]
    fn fourier_matches_quadrature() {
        let ts = sample();
        for t in [-2.0, 0.0, 0.7, 3.0] {
            let q = quad(|w| eval(&ts, w) * Complex64::new(0.0, w * t).exp());
            assert!((q - fourier(&ts, t)).norm() < 1e-12);
        }
    }

    #[test]
    fn wigner_matches_quadrature() {
        let ts = sample();
        for (w, t) in [(0.0, 0.0), (0.3, -0.8), (-1.2, 1.5)] {
            let q = quad(|x| eval(&ts, w - x) * eval(&ts, w + x).conj() * Complex64::new(0.0, 2.0 * x * t).exp()) / PI;
            let a = wigner(&ts, w, t, false);
            assert!((q.re - a[0]).abs() < 1e-12);
            assert!(q.im.abs() < 1e-12);
        }
    }

    #[test]
    fn wigner_gradient_matches_differences() {
        let ts = sample();
        let (w, t, h) = (0.3, -0.4, 1e-5);
        let g = wigner(&ts, w, t, true);
        let dw = (wigner(&ts, w + h, t, false)[0] - wigner(&ts, w - h, t, false)[0]) / (2.0 * h);
        let dt = (wigner(&ts, w, t + h, false)[0] - wigner(&ts, w, t - h, false)[0]) / (2.0 * h);
        assert!((g[1] - dw).abs() < 1e-8);
        assert!((g[2] - dt).abs() < 1e-8);
    }

    #[test]
    fn time_chirp_multiplies_temporal_amplitude() {
        let ts = sample();
        let kappa = 0.7;
        let chirped: Vec<Term> = ts.iter().map(|t| t.time_chirped(kappa)).collect();
        for t in [-1.5, 0.0, 0.4, 2.0] {
            let expect = fourier(&ts, t) * Complex64::new(0.0, kappa * t * t / 2.0).exp();
            assert!((fourier(&chirped, t) - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn freq_chirp_multiplies_spectrum() {
        let ts = sample();
        let chirped: Vec<Term> = ts.iter().map(|t| t.freq_chirped(0.9, 0.2)).collect();
        for w in [-1.0, 0.0, 0.6] {
            let expect = eval(&ts, w) * Complex64::new(0.0, 0.9 * (w - 0.2) * (w - 0.2) / 2.0).exp();
            assert!((eval(&chirped, w) - expect).norm() < 1e-13);
        }
    }
}
