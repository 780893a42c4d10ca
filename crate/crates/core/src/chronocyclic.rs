//! Chronocyclic Wigner function `W(ω,t) = (1/π)∫ e^{2iω't} f(ω-ω') f*(ω+ω') dω'`:
//! numeric and closed-form evaluation, sampled grids, marginals and the
//! inverse transform back to the spectral amplitude.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{fd_step, integrate};
use crate::statefamilies::{AiryParams, Base, BiphotonState, PureState};
use crate::terms;

const RESIDUE_LIMIT: f64 = 1e-9;

/// Wigner function by direct quadrature of the defining integral.
pub fn wigner_numeric(state: &BiphotonState, w: f64, t: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (weight, pure) in state.components() {
        acc += weight * pure_numeric(pure, w, t)?;
    }
    Ok(acc)
}

fn pure_numeric(pure: &PureState, w: f64, t: f64) -> Result<f64> {
    let (lo, hi) = pure.support();
    let a = (w - hi).max(lo - w);
    let b = (w - lo).min(hi - w);
    if a >= b {
        return Ok(0.0);
    }
    let spec = pure
        .quadrature(a, b, 2.0 * t.abs() + pure.quadrature_rate())
        .with_tolerance(1e-14, 1e-11);
    let r = integrate(
        |x| pure.spectral(w - x) * pure.spectral(w + x).conj() * Complex64::new(0.0, 2.0 * x * t).exp(),
        &spec,
    )?;
    let v = r.value / PI;
    let scale = pure.spectral(w).norm_sqr().max(1.0);
    if v.im.abs() > RESIDUE_LIMIT * scale {
        return Err(Error::QuadratureFailure(format!("imaginary residue {:e} at ({w}, {t})", v.im)));
    }
    Ok(v.re)
}

/// Wigner function from the family's closed form.
pub fn wigner_analytic(state: &BiphotonState, w: f64, t: f64) -> f64 {
    state.components().iter().map(|(p, s)| p * pure_analytic(s, w, t)).sum()
}

/// `(W, ∂W/∂ω, ∂W/∂t)`; analytic for Gaussian sums, central differences
/// for the cavity families.
pub fn wigner_gradient(state: &BiphotonState, w: f64, t: f64) -> [f64; 3] {
    let mut acc = [0.0; 3];
    for (p, s) in state.components() {
        let g = pure_gradient(s, w, t);
        for i in 0..3 {
            acc[i] += p * g[i];
        }
    }
    acc
}

pub(crate) fn pure_analytic(pure: &PureState, w: f64, t: f64) -> f64 {
    let (bw, bt) = pure.shear.base_point(w, t);
    base_value(&pure.base, bw, bt)
}

fn base_value(base: &Base, w: f64, t: f64) -> f64 {
    match base {
        Base::Terms(ts) => terms::wigner(ts, w, t, false)[0],
        Base::Airy(a) => airy_wigner(a, w - a.omega0, t),
        Base::RotatedAiry(a) => rotated_airy_wigner(a, w, t),
    }
}

fn rotated_airy_wigner(a: &AiryParams, w: f64, t: f64) -> f64 {
    let s2 = a.sigma * a.sigma;
    airy_wigner(a, t * s2, (w - a.omega0) / s2)
}

fn pure_gradient(pure: &PureState, w: f64, t: f64) -> [f64; 3] {
    let (bw, bt) = pure.shear.base_point(w, t);
    let base = match &pure.base {
        Base::Terms(ts) => terms::wigner(ts, bw, bt, true),
        Base::Airy(a) | Base::RotatedAiry(a) => {
            let (sw, st) = match pure.base {
                Base::Airy(_) => (a.sigma.min(1.0 / a.tau_bar), 1.0 / a.sigma),
                _ => (a.sigma, (1.0 / a.sigma).min(1.0 / (a.tau_bar * a.sigma * a.sigma))),
            };
            let hw = fd_step(bw, sw);
            let ht = fd_step(bt, st);
            let f = |x: f64, y: f64| base_value(&pure.base, x, y);
            [
                f(bw, bt),
                (f(bw + hw, bt) - f(bw - hw, bt)) / (2.0 * hw),
                (f(bw, bt + ht) - f(bw, bt - ht)) / (2.0 * ht),
            ]
        }
    };
    let g = pure.shear.gradient([base[1], base[2]]);
    [base[0], g[0], g[1]]
}

/// Closed-form cavity Wigner function with `u = ω - ω₀`:
/// `(1/πS) e^{-u²/σ²} Σ_p R^p e^{-(t-pτ̄)²σ²} sin((p+1)θ)/sin θ`, `θ = 2uτ̄`.
pub(crate) fn airy_wigner(a: &AiryParams, u: f64, t: f64) -> f64 {
    let sigma = a.sigma;
    let env = (-u * u / (sigma * sigma)).exp();
    let pre = env / (PI * a.s_norm);
    if env == 0.0 {
        return 0.0;
    }
    if a.r == 0.0 {
        return pre * (-t * t * sigma * sigma).exp();
    }
    let tb = a.tau_bar;
    let reach = 8.7 / sigma;
    let p_cap = ((1e-20f64).ln() / a.r.ln()).ceil().max(0.0);
    let p_lo = ((t - reach) / tb).ceil().max(0.0);
    let p_hi = ((t + reach) / tb).floor().min(p_cap);
    if p_hi < p_lo {
        return 0.0;
    }
    let theta = 2.0 * u * tb;
    let s = theta.sin();
    let mut acc = 0.0;
    let mut p = p_lo as i64;
    while p as f64 <= p_hi {
        let pf = p as f64;
        let d = if s.abs() > 1e-6 {
            ((pf + 1.0) * theta).sin() / s
        } else {
            (0..=p).map(|j| ((pf - 2.0 * j as f64) * theta).cos()).sum()
        };
        let g = (t - pf * tb) * sigma;
        acc += a.r.powi(p as i32) * (-g * g).exp() * d;
        p += 1;
    }
    pre * acc
}

/// Method used to fill a [`WignerGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WignerMethod {
    Analytic,
    Numeric,
}

/// Wigner function sampled on a uniform rectangular grid; `values` is
/// row-major with one row per frequency sample.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub omega_axis: Vec<f64>,
    pub time_axis: Vec<f64>,
    pub values: Vec<f64>,
    pub norm_estimate: f64,
    pub even: bool,
    pub unit_scale: f64,
}

fn axis(range: (f64, f64), n: usize) -> Vec<f64> {
    let step = (range.1 - range.0) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { range.1 } else { range.0 + step * i as f64 }).collect()
}

fn trapezoid_weights(n: usize, step: f64) -> Vec<f64> {
    let mut w = vec![step; n];
    w[0] *= 0.5;
    w[n - 1] *= 0.5;
    w
}

pub fn wigner_grid(
    state: &BiphotonState,
    omega_range: (f64, f64),
    time_range: (f64, f64),
    nx: usize,
    ny: usize,
) -> Result<WignerGrid> {
    wigner_grid_with(state, omega_range, time_range, nx, ny, WignerMethod::Analytic)
}

pub fn wigner_grid_with(
    state: &BiphotonState,
    omega_range: (f64, f64),
    time_range: (f64, f64),
    nx: usize,
    ny: usize,
    method: WignerMethod,
) -> Result<WignerGrid> {
    if nx < 16 || ny < 16 {
        return Err(Error::InvalidSpec(format!("grid needs at least 16x16 samples, got {nx}x{ny}")));
    }
    if !(omega_range.1 > omega_range.0 && time_range.1 > time_range.0) {
        return Err(Error::InvalidSpec("grid ranges must be increasing".into()));
    }
    let omega_axis = axis(omega_range, nx);
    let time_axis = axis(time_range, ny);
    let rows: Vec<Result<Vec<f64>>> = omega_axis
        .par_iter()
        .map(|&w| {
            time_axis
                .iter()
                .map(|&t| match method {
                    WignerMethod::Analytic => Ok(wigner_analytic(state, w, t)),
                    WignerMethod::Numeric => wigner_numeric(state, w, t),
                })
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(nx * ny);
    for r in rows {
        values.extend(r?);
    }
    let mut grid = WignerGrid {
        omega_axis,
        time_axis,
        values,
        norm_estimate: 0.0,
        even: state.is_even(),
        unit_scale: state.spec().unit_scale,
    };
    grid.norm_estimate = grid.integral();
    if (grid.norm_estimate - 1.0).abs() > 1e-2 {
        return Err(Error::GridTooCoarse(grid.norm_estimate));
    }
    Ok(grid)
}

impl WignerGrid {
    pub fn nx(&self) -> usize {
        self.omega_axis.len()
    }

    pub fn ny(&self) -> usize {
        self.time_axis.len()
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ny() + j]
    }

    fn d_omega(&self) -> f64 {
        (self.omega_axis[self.nx() - 1] - self.omega_axis[0]) / (self.nx() - 1) as f64
    }

    fn d_t(&self) -> f64 {
        (self.time_axis[self.ny() - 1] - self.time_axis[0]) / (self.ny() - 1) as f64
    }

    /// Trapezoidal estimate of `∫∫ W dω dt`.
    pub fn integral(&self) -> f64 {
        let (spectral, _) = marginals(self);
        let wx = trapezoid_weights(self.nx(), self.d_omega());
        spectral.iter().zip(&wx).map(|(v, w)| v * w).sum()
    }

    /// Writes the grid as CSV: a header comment, the header values, then one
    /// line per frequency sample (or `omega,t,value` triples when `long`).
    pub fn write_csv<W: Write>(&self, out: &mut W, long: bool) -> io::Result<()> {
        if long {
            writeln!(out, "omega,t,value")?;
            for (i, w) in self.omega_axis.iter().enumerate() {
                for (j, t) in self.time_axis.iter().enumerate() {
                    writeln!(out, "{:.16e},{:.16e},{:.16e}", w, t, self.at(i, j))?;
                }
            }
            return Ok(());
        }
        writeln!(out, "# omega_min omega_max n_omega t_min t_max n_t unit_scale norm_estimate")?;
        writeln!(
            out,
            "# {:.16e} {:.16e} {} {:.16e} {:.16e} {} {:.16e} {:.16e}",
            self.omega_axis[0],
            self.omega_axis[self.nx() - 1],
            self.nx(),
            self.time_axis[0],
            self.time_axis[self.ny() - 1],
            self.ny(),
            self.unit_scale,
            self.norm_estimate
        )?;
        for i in 0..self.nx() {
            let row: Vec<String> = (0..self.ny()).map(|j| format!("{:.16e}", self.at(i, j))).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// `(∫W dt, ∫W dω)` sampled on the grid axes (trapezoidal rule).
pub fn marginals(grid: &WignerGrid) -> (Vec<f64>, Vec<f64>) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let wt = trapezoid_weights(ny, grid.d_t());
    let wx = trapezoid_weights(nx, grid.d_omega());
    let spectral = (0..nx).map(|i| (0..ny).map(|j| grid.at(i, j) * wt[j]).sum()).collect();
    let temporal = (0..ny).map(|j| (0..nx).map(|i| grid.at(i, j) * wx[i]).sum()).collect();
    (spectral, temporal)
}

/// Recovers `f(ω) = (1/f*(0)) ∫ W(ω/2, t) e^{iωt} dt` at `ω = 2·omega_axis[i]`,
/// with the global phase fixed by `f(0) > 0`. The grid must sample ω = 0.
pub fn inverse_transform(grid: &WignerGrid) -> Result<Vec<(f64, Complex64)>> {
    let span = grid.omega_axis[grid.nx() - 1] - grid.omega_axis[0];
    let zero = grid
        .omega_axis
        .iter()
        .position(|w| w.abs() <= 1e-12 * span)
        .ok_or_else(|| Error::InvalidSpec("inverse transform needs a grid row at omega = 0".into()))?;
    let wt = trapezoid_weights(grid.ny(), grid.d_t());
    let anchor2: f64 = (0..grid.ny()).map(|j| grid.at(zero, j) * wt[j]).sum();
    let anchor = anchor2.max(0.0).sqrt();
    if anchor < 1e-9 {
        return Err(Error::ZeroAnchor(anchor));
    }
    Ok(grid
        .omega_axis
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let omega = 2.0 * w;
            let v: Complex64 = grid
                .time_axis
                .iter()
                .enumerate()
                .map(|(j, &t)| Complex64::new(0.0, omega * t).exp() * grid.at(i, j) * wt[j])
                .sum();
            (omega, v / anchor)
        })
        .collect())
}
