//! Hong-Ou-Mandel coincidence scans, interferogram fitting, and the linear
//! temperature calibration.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, Domain};

/// Coincidence probability versus relative delay.
#[derive(Debug, Clone)]
pub struct HomPattern {
    delays: Vec<f64>,
    p_cc: Vec<f64>,
}

impl HomPattern {
    pub fn new(delays: Vec<f64>, p_cc: Vec<f64>) -> Result<Self> {
        if delays.len() != p_cc.len() {
            return Err(Error::ShapeMismatch);
        }
        if delays.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("delays must be strictly increasing"));
        }
        if p_cc
            .iter()
            .any(|p| !p.is_finite() || *p < -1e-9 || *p > 1.0 + 1e-9)
        {
            return Err(Error::InvalidParameter(
                "coincidence probabilities must lie in [0, 1]",
            ));
        }
        Ok(HomPattern { delays, p_cc })
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn p_cc(&self) -> &[f64] {
        &self.p_cc
    }

    pub fn len(&self) -> usize {
        self.delays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays.is_empty()
    }
}

/// Fitted interferogram parameters. The model is
/// `P(tau) = 1/2 [1 - V E(tau; w) cos(2 pi f tau - phi)]` plus the
/// exchange-overlap cross term described at [`hom_fit`]; `phase` is
/// reported in `[0, 2 pi)` and matches the `phi` handed to `superpose`.
#[derive(Debug, Clone, Copy)]
pub struct HomFitResult {
    pub freq: f64,
    pub phase: f64,
    pub visibility: f64,
    pub envelope_width: f64,
    pub residual_rms: f64,
}

/// Linear temperature calibration of mode separation and relative phase.
#[derive(Debug, Clone, Copy)]
pub struct CalibrationModel {
    pub t_ref: f64,
    pub sep_ref: f64,
    pub sep_slope: f64,
    pub phi_ref: f64,
    pub phi_slope: f64,
}

impl Default for CalibrationModel {
    fn default() -> Self {
        CalibrationModel {
            t_ref: 45.0,
            sep_ref: 0.26,
            sep_slope: 1.2e-2,
            phi_ref: 0.86 * PI,
            phi_slope: -9.5e-2 * PI,
        }
    }
}

/// `(separation, phi)` at temperature `t` from the linear model.
pub fn calibration_eval(model: &CalibrationModel, t: f64) -> (f64, f64) {
    (
        model.sep_ref + model.sep_slope * (t - model.t_ref),
        model.phi_ref + model.phi_slope * (t - model.t_ref),
    )
}

/// Beamsplitter coincidence probability versus delay:
/// `P(tau) = 1/2 [1 - Re(sum f(v1,v2) conj(f(v2,v1)) e^{-i 2 pi (v1-v2) tau})
///  / sum |f|^2]`.
///
/// The double sum collapses onto the difference coordinate `d = i - j`
/// (the kernel depends on `v1 - v2` only), so the quadrature costs O(n^2)
/// once plus O(n) per delay.
pub fn hom_scan(jsa: &ComplexField2D, delays: &[f64]) -> Result<HomPattern> {
    if jsa.domain() != Domain::Frequency {
        return Err(Error::WrongDomain {
            expected: Domain::Frequency,
            got: jsa.domain(),
        });
    }
    if jsa.axis_x() != jsa.axis_y() {
        return Err(Error::AxisMismatch);
    }
    let n = jsa.n();
    let v = jsa.values();
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if norm == 0.0 {
        return Err(Error::ZeroField);
    }
    // K[d] = sum over i - j = d of f[i,j] conj(f[j,i]); index shift d + n - 1
    let mut k = vec![Complex64::default(); 2 * n - 1];
    for i in 0..n {
        for j in 0..n {
            k[i + (n - 1) - j] += v[[i, j]] * v[[j, i]].conj();
        }
    }
    let step = jsa.axis_x().step();
    let p_cc: Vec<f64> = delays
        .par_iter()
        .map(|&tau| {
            let mut overlap = 0.0;
            for (m, kv) in k.iter().enumerate() {
                let d = m as f64 - (n as f64 - 1.0);
                let ph = -2.0 * PI * d * step * tau;
                overlap += kv.re * ph.cos() - kv.im * ph.sin();
            }
            let p = 0.5 * (1.0 - overlap / norm);
            p.clamp(0.0, 1.0)
        })
        .collect();
    HomPattern::new(delays.to_vec(), p_cc)
}

struct Basis {
    c: Vec<f64>,
    s: Vec<f64>,
    g: Vec<f64>,
}

fn basis(delays: &[f64], f: f64, w: f64) -> Basis {
    let mut c = Vec::with_capacity(delays.len());
    let mut s = Vec::with_capacity(delays.len());
    let mut g = Vec::with_capacity(delays.len());
    for &tau in delays {
        let e = (1.0 - tau.abs() / w).max(0.0);
        let arg = 2.0 * PI * f * tau;
        c.push(e * arg.cos());
        s.push(e * arg.sin());
        g.push(if tau.abs() <= w {
            (2.0 * PI * f * (w - tau.abs())).sin()
        } else {
            0.0
        });
    }
    Basis { c, s, g }
}

fn solve3(m: [[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let mut a = [
        [m[0][0], m[0][1], m[0][2], r[0]],
        [m[1][0], m[1][1], m[1][2], r[1]],
        [m[2][0], m[2][1], m[2][2], r[2]],
    ];
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
            .unwrap();
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for row in 0..3 {
            if row != col {
                let fac = a[row][col] / a[col][col];
                for c in col..4 {
                    a[row][c] -= fac * a[col][c];
                }
            }
        }
    }
    Some([a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]])
}

/// Least-squares fit of `y = 1 - 2 P` at fixed `(f, w)`; returns the three
/// linear coefficients and the sum of squared residuals.
fn fit_at(delays: &[f64], y: &[f64], f: f64, w: f64) -> (Option<[f64; 3]>, f64) {
    let bs = basis(delays, f, w);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, z)| x * z).sum::<f64>();
    let m = [
        [dot(&bs.c, &bs.c), dot(&bs.c, &bs.s), dot(&bs.c, &bs.g)],
        [dot(&bs.s, &bs.c), dot(&bs.s, &bs.s), dot(&bs.s, &bs.g)],
        [dot(&bs.g, &bs.c), dot(&bs.g, &bs.s), dot(&bs.g, &bs.g)],
    ];
    let r = [dot(&bs.c, y), dot(&bs.s, y), dot(&bs.g, y)];
    match solve3(m, r) {
        Some(coef) => {
            let res: f64 = (0..y.len())
                .map(|i| {
                    let model = coef[0] * bs.c[i] + coef[1] * bs.s[i] + coef[2] * bs.g[i];
                    (y[i] - model).powi(2)
                })
                .sum();
            (Some(coef), res)
        }
        None => (None, f64::INFINITY),
    }
}

fn golden_min(mut lo: f64, mut hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > 1e-12 * hi.max(1.0) {
        let x1 = hi - gr * (hi - lo);
        let x2 = lo + gr * (hi - lo);
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    0.5 * (lo + hi)
}

/// Fit an interferogram to
/// `1 - 2 P(tau) = V E(tau; w) cos(2 pi f tau - phi) + gamma X(tau; f, w)`
/// with `E` the triangular envelope of half-width `w` and `X` the
/// exchange cross term `sin(2 pi f (w - |tau|))` inside the envelope.
///
/// The cross term arises when the two displaced sinc modes overlap: their
/// exchange integral oscillates at the same beat frequency with a constant
/// extra phase, and omitting it biases the recovered phase by up to half a
/// period. Both oscillatory coefficients and the cross coefficient are
/// linear, so each `(f, w)` candidate costs one 3x3 solve; `f` is
/// multi-started on a log grid to avoid period aliasing, then `(f, w)` are
/// refined coordinate-wise.
pub fn hom_fit(pattern: &HomPattern) -> Result<HomFitResult> {
    let delays = pattern.delays();
    let y: Vec<f64> = pattern.p_cc().iter().map(|p| 1.0 - 2.0 * p).collect();
    if delays.len() < 32 {
        return Err(Error::InvalidParameter(
            "need at least 32 delay points to fit",
        ));
    }
    if y.iter().all(|v| v.abs() < 1e-9) {
        return Err(Error::FitDegenerate);
    }

    let freqs: Vec<f64> = (0..64)
        .map(|i| 0.01 * (2.0f64 / 0.01).powf(i as f64 / 63.0))
        .collect();
    let widths = [2.0, 3.0, 4.0, 4.5, 5.0, 6.0, 8.0];
    let mut best: Option<(f64, f64, f64)> = None;
    for &f in &freqs {
        for &w in &widths {
            let (coef, res) = fit_at(delays, &y, f, w);
            if coef.is_some() && best.map_or(true, |(_, _, r)| res < r) {
                best = Some((f, w, res));
            }
        }
    }
    let (mut f, mut w, _) = best.ok_or(Error::NotConverged)?;

    for _ in 0..40 {
        let (pf, pw) = (f, w);
        f = golden_min(f * 0.9, f * 1.1, |x| fit_at(delays, &y, x, w).1);
        w = golden_min(w * 0.85, w * 1.18, |x| fit_at(delays, &y, f, x).1);
        if (f - pf).abs() <= 1e-11 * f && (w - pw).abs() <= 1e-11 * w {
            break;
        }
    }

    let (coef, res) = fit_at(delays, &y, f, w);
    let coef = coef.ok_or(Error::NotConverged)?;
    let phase = coef[1].atan2(coef[0]).rem_euclid(2.0 * PI);
    // contrast of the fitted model, not the raw quadrature amplitude: the
    // cross term can push sqrt(a^2 + b^2) slightly above one
    let bs = basis(delays, f, w);
    let vis = (0..delays.len())
        .map(|i| (coef[0] * bs.c[i] + coef[1] * bs.s[i] + coef[2] * bs.g[i]).abs())
        .fold(0.0, f64::max)
        .min(1.0);
    Ok(HomFitResult {
        freq: f,
        phase,
        visibility: vis,
        envelope_width: w,
        residual_rms: (res / delays.len() as f64).sqrt(),
    })
}

/// Ordinary least squares line through `points`; returns
/// `(slope, intercept, r_squared)`.
pub fn fit_linear(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 2 {
        return Err(Error::DegenerateX);
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateX);
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok((slope, intercept, r2))
}
