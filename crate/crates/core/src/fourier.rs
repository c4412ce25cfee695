//! 2D Fourier transform between joint spectral and joint temporal
//! amplitudes, closed-form temporal solutions, Parseval checks,
//! anti-diagonal peak analysis, and the mode separation product.
//!
//! The forward kernel is `exp(-i 2 pi (t1 nu1 + t2 nu2))` with integration
//! weight `dnu^2`; the inverse uses the positive kernel with weight `dt^2`.
//! With those conventions the closed-form prefactors come out numerically,
//! not up to normalization.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::parallel::prelude::*;
use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, Domain, RealField2D, SampledAxis};
use crate::spectral::{SimplifiedJsaParams, SuperpositionParams};

/// Indicator of [-1/2, 1/2], closed at both edges.
pub fn unit_box(x: f64) -> f64 {
    if x.abs() <= 0.5 {
        1.0
    } else {
        0.0
    }
}

/// One centered DFT pass along every lane of `along`.
///
/// For a lane x over the input axis, computes
/// `y[k] = step * sum_i x[i] exp(sign * i 2 pi t_k nu_i)`
/// with `nu_i` the input samples and `t_k` the output samples. The center
/// offsets of both axes enter as pre/post phase ramps around a plain FFT,
/// which needs `n` divisible by 4 (guaranteed by the axis invariant n >= 8,
/// power of two).
fn transform_lanes(
    values: &mut Array2<Complex64>,
    along: usize,
    in_axis: &SampledAxis,
    out_axis: &SampledAxis,
    forward: bool,
) {
    let n = in_axis.n();
    let sign = if forward { -1.0 } else { 1.0 };
    let mut planner = FftPlanner::new();
    let fft: Arc<dyn Fft<f64>> = if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };

    let pre: Vec<Complex64> = (0..n)
        .map(|i| {
            let ph = sign * 2.0 * PI * out_axis.center() * in_axis.sample(i);
            let alt = if i % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::from_polar(alt, ph)
        })
        .collect();
    let post: Vec<Complex64> = (0..n)
        .map(|k| {
            let ph =
                sign * 2.0 * PI * (out_axis.sample(k) - out_axis.center()) * in_axis.center();
            let alt = if k % 2 == 0 { 1.0 } else { -1.0 };
            in_axis.step() * Complex64::from_polar(alt, ph)
        })
        .collect();

    let lane_axis = Axis(1 - along);
    values
        .axis_iter_mut(lane_axis)
        .into_par_iter()
        .for_each(|mut lane| {
            let mut buf: Vec<Complex64> =
                lane.iter().zip(&pre).map(|(v, p)| v * p).collect();
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(&mut buf, &mut scratch);
            for ((dst, y), p) in lane.iter_mut().zip(&buf).zip(&post) {
                *dst = y * p;
            }
        });
}

fn check_square(field: &ComplexField2D) -> Result<()> {
    if field.axis_x().n() != field.axis_y().n() {
        return Err(Error::AxisMismatch);
    }
    Ok(())
}

/// Forward transform: frequency-domain field to the joint temporal
/// amplitude on the conjugate (zero-centered) time axes.
pub fn ft2(field: &ComplexField2D) -> Result<ComplexField2D> {
    if field.domain() != Domain::Frequency {
        return Err(Error::WrongDomain {
            expected: Domain::Frequency,
            got: field.domain(),
        });
    }
    check_square(field)?;
    let tx = field.axis_x().conjugate();
    let ty = field.axis_y().conjugate();
    let mut values = field.values().clone();
    transform_lanes(&mut values, 0, field.axis_x(), &tx, true);
    transform_lanes(&mut values, 1, field.axis_y(), &ty, true);
    ComplexField2D::new(tx, ty, values)
}

/// Inverse transform: time-domain field back to frequency, onto the given
/// target axes (which must be conjugate to the input axes in sample count
/// and step). Recovers `ft2` inputs exactly including off-center grids.
pub fn ift2_onto(
    field: &ComplexField2D,
    target_x: &SampledAxis,
    target_y: &SampledAxis,
) -> Result<ComplexField2D> {
    if field.domain() != Domain::Time {
        return Err(Error::WrongDomain {
            expected: Domain::Time,
            got: field.domain(),
        });
    }
    check_square(field)?;
    if target_x.domain() != Domain::Frequency
        || target_y.domain() != Domain::Frequency
        || target_x.n() != field.axis_x().n()
        || target_y.n() != field.axis_y().n()
        || target_x.conjugate().step() != field.axis_x().step()
        || target_y.conjugate().step() != field.axis_y().step()
    {
        return Err(Error::AxisMismatch);
    }
    let mut values = field.values().clone();
    transform_lanes(&mut values, 0, field.axis_x(), target_x, false);
    transform_lanes(&mut values, 1, field.axis_y(), target_y, false);
    ComplexField2D::new(target_x.clone(), target_y.clone(), values)
}

/// Inverse transform onto the zero-centered conjugate frequency axes.
pub fn ift2(field: &ComplexField2D) -> Result<ComplexField2D> {
    let tx = field.axis_x().conjugate();
    let ty = field.axis_y().conjugate();
    ift2_onto(field, &tx, &ty)
}

/// Closed-form single-mode joint temporal amplitude:
/// `(pi/2b) sqrt(pi/a) exp[-pi^2 (t1+t2)^2 / 4a] Box[pi (t1-t2) / 2b]`.
pub fn jta_single(t1: f64, t2: f64, s: &SimplifiedJsaParams) -> Complex64 {
    let big_t = t1 + t2;
    let tau = t1 - t2;
    let v = (PI / (2.0 * s.b))
        * (PI / s.a).sqrt()
        * (-PI * PI * big_t * big_t / (4.0 * s.a)).exp()
        * unit_box(PI * tau / (2.0 * s.b));
    Complex64::new(v, 0.0)
}

/// Closed-form two-mode joint temporal amplitude for modes displaced to
/// `+-delta` with relative phase `phi`:
/// `(pi/b) sqrt(pi/a) exp[-pi^2 (t1+t2)^2 / 4a] Box[pi (t1-t2)/2b]
///  * e^{i phi/2} cos[pi (t1-t2) delta - phi/2]`.
///
/// At `phi = pi` this is `i sin[pi (t1-t2) delta]` times the envelope, at
/// `phi = 0` the cosine form; the general phase is cross-validated against
/// `ft2` in the tests before being used as an oracle anywhere.
pub fn jta_two_mode(
    t1: f64,
    t2: f64,
    s: &SimplifiedJsaParams,
    sp: &SuperpositionParams,
) -> Complex64 {
    let big_t = t1 + t2;
    let tau = t1 - t2;
    let env = (PI / s.b)
        * (PI / s.a).sqrt()
        * (-PI * PI * big_t * big_t / (4.0 * s.a)).exp()
        * unit_box(PI * tau / (2.0 * s.b));
    Complex64::from_polar(1.0, sp.phi / 2.0) * env * (PI * tau * sp.delta - sp.phi / 2.0).cos()
}

/// Relative discrete Parseval defect between a spectral/temporal pair:
/// `|dnu^2 sum|JSA|^2 - dt^2 sum|JTA|^2| / (dnu^2 sum|JSA|^2)`.
pub fn parseval_residual(jsa: &ComplexField2D, jta: &ComplexField2D) -> Result<f64> {
    if jsa.domain() != Domain::Frequency {
        return Err(Error::WrongDomain {
            expected: Domain::Frequency,
            got: jsa.domain(),
        });
    }
    if jta.domain() != Domain::Time
        || jsa.axis_x().conjugate().step() != jta.axis_x().step()
        || jsa.axis_y().conjugate().step() != jta.axis_y().step()
        || jsa.axis_x().n() != jta.axis_x().n()
        || jsa.axis_y().n() != jta.axis_y().n()
    {
        return Err(Error::AxisMismatch);
    }
    let m_nu = jsa.l2_mass();
    if m_nu == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok((m_nu - jta.l2_mass()).abs() / m_nu)
}

/// Local maxima of the anti-diagonal profile of an intensity field.
#[derive(Debug, Clone)]
pub struct PeakSet {
    /// Peak coordinates `(x, y)`, sorted by the anti-diagonal coordinate
    /// `x - y`, refined to sub-bin accuracy.
    pub positions: Vec<(f64, f64)>,
    /// Mean Euclidean distance between adjacent peaks along the
    /// anti-diagonal line; `None` with fewer than two peaks.
    pub separation: Option<f64>,
}

impl PeakSet {
    pub fn require_separation(&self) -> Result<f64> {
        self.separation.ok_or(Error::NoSeparation)
    }
}

/// Find peaks of the profile `p(d) = max over samples with i - j = d`,
/// the intensity ridge seen along the anti-diagonal direction.
///
/// Candidates are strict local maxima above `rel_threshold` times the
/// global maximum. Adjacent candidates whose connecting valley stays above
/// 0.8 of the lower candidate are merged (discrete ridges of oscillatory
/// fields carry shallow sampling ripples that are not separate modes).
/// Surviving peaks get parabolic sub-bin refinement; the separation is the
/// mean adjacent spacing divided by sqrt(2) to convert the difference
/// coordinate to Euclidean distance along the anti-diagonal.
pub fn antidiagonal_peaks(field: &RealField2D, rel_threshold: f64) -> Result<PeakSet> {
    if !(rel_threshold > 0.0 && rel_threshold < 1.0) {
        return Err(Error::InvalidParameter("rel_threshold must be in (0, 1)"));
    }
    if field.axis_x().n() != field.axis_y().n()
        || field.axis_x().step() != field.axis_y().step()
    {
        return Err(Error::AxisMismatch);
    }
    let n = field.n();
    let v = field.values();
    let m = 2 * n - 1;
    // profile over d = i - j, index shift m_idx = d + n - 1; remember the
    // grid sample attaining each slice maximum for position reporting
    let mut prof = vec![0.0f64; m];
    let mut arg = vec![(0usize, 0usize); m];
    for i in 0..n {
        for j in 0..n {
            let idx = i + (n - 1) - j;
            if v[[i, j]] > prof[idx] {
                prof[idx] = v[[i, j]];
                arg[idx] = (i, j);
            }
        }
    }
    let max = prof.iter().cloned().fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(Error::NoPeaks);
    }
    let thr = rel_threshold * max;
    let mut idx: Vec<usize> = (0..m)
        .filter(|&i| {
            let l = if i > 0 { prof[i - 1] } else { f64::NEG_INFINITY };
            let r = if i + 1 < m { prof[i + 1] } else { f64::NEG_INFINITY };
            prof[i] > thr && prof[i] > l && prof[i] >= r
        })
        .collect();
    // valley-prominence merge
    loop {
        let mut merged = false;
        for k in 0..idx.len().saturating_sub(1) {
            let (i, j) = (idx[k], idx[k + 1]);
            let valley = prof[i..=j].iter().cloned().fold(f64::INFINITY, f64::min);
            if valley >= 0.8 * prof[i].min(prof[j]) {
                let keep = if prof[i] >= prof[j] { i } else { j };
                idx.remove(k + 1);
                idx[k] = keep;
                merged = true;
                break;
            }
        }
        if !merged {
            break;
        }
    }
    if idx.is_empty() {
        return Err(Error::NoPeaks);
    }

    let step = field.axis_x().step();
    let mut refined: Vec<f64> = Vec::with_capacity(idx.len());
    let mut positions: Vec<(f64, f64)> = Vec::with_capacity(idx.len());
    for &i in &idx {
        let off = if i > 0 && i + 1 < m {
            let (y0, y1, y2) = (prof[i - 1], prof[i], prof[i + 1]);
            let den = y0 - 2.0 * y1 + y2;
            if den != 0.0 {
                0.5 * (y0 - y2) / den
            } else {
                0.0
            }
        } else {
            0.0
        };
        refined.push(i as f64 + off);
        let (pi_, pj_) = arg[i];
        positions.push((
            field.axis_x().sample(pi_) + off * step / 2.0,
            field.axis_y().sample(pj_) - off * step / 2.0,
        ));
    }
    let separation = if refined.len() >= 2 {
        let total: f64 = refined.windows(2).map(|w| w[1] - w[0]).sum();
        Some(total / (refined.len() - 1) as f64 * step / 2f64.sqrt())
    } else {
        None
    };
    Ok(PeakSet {
        positions,
        separation,
    })
}

/// Product of a spectral and a temporal peak separation; 1 at the level of
/// intensity, 2 at the level of amplitude for mode-separated states.
pub fn mode_separation_product(jsi_sep: f64, jti_sep: f64) -> Result<f64> {
    for s in [jsi_sep, jti_sep] {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::NonPositiveInput(s));
        }
    }
    Ok(jsi_sep * jti_sep)
}

/// Fast path for fields separable in rotated coordinates:
/// `field(x, y) = g(x' + y') * h(x' - y')` with `x', y'` the center-shifted
/// axis samples. Returns the same joint temporal amplitude as [`ft2`] of
/// the assembled field, to 1e-10 relative, in O(n^2 log n) without ever
/// forming the 2D product grid.
///
/// The sum and difference indices `p = i + j`, `q = i - j` live on a
/// diamond lattice; for each output sum index the inner sum over `p`
/// telescopes (each difference-coordinate bound adds two lattice sites),
/// and the remaining sum over `q` is one length-2n FFT.
pub fn ft2_separable_rotated<G, H>(
    axis_x: &SampledAxis,
    axis_y: &SampledAxis,
    g: G,
    h: H,
) -> Result<ComplexField2D>
where
    G: Fn(f64) -> Complex64 + Sync,
    H: Fn(f64) -> Complex64 + Sync,
{
    if axis_x.domain() != Domain::Frequency || axis_y.domain() != Domain::Frequency {
        return Err(Error::WrongDomain {
            expected: Domain::Frequency,
            got: axis_x.domain(),
        });
    }
    if axis_x.n() != axis_y.n() || axis_x.step() != axis_y.step() {
        return Err(Error::AxisMismatch);
    }
    let n = axis_x.n();
    let step = axis_x.step();
    let tx = axis_x.conjugate();
    let ty = axis_y.conjugate();

    // factor samples on the diamond lattice: u_p = (p - n) step covers the
    // attainable sum values, v_q = q step the difference values
    let gp: Vec<Complex64> = (0..2 * n - 1)
        .map(|p| g((p as f64 - n as f64) * step))
        .collect();
    let hq: Vec<Complex64> = (0..2 * n - 1)
        .map(|m| h((m as f64 - (n as f64 - 1.0)) * step))
        .collect();

    let mut planner = FftPlanner::new();
    let fft: Arc<dyn Fft<f64>> = planner.plan_fft_forward(2 * n);

    // per output-sum-index K = k + l - n, one inner reduction + one FFT
    let spectra: Vec<Vec<Complex64>> = (0..2 * n - 1)
        .into_par_iter()
        .map(|kk| {
            let big_k = kk as f64 - n as f64;
            let gph: Vec<Complex64> = gp
                .iter()
                .enumerate()
                .map(|(p, v)| {
                    v * Complex64::from_polar(1.0, -PI * big_k * (p as f64 - n as f64) / n as f64)
                })
                .collect();
            // A[r] = sum of gph[p] over p in [r, 2n-2-r] with p = r (mod 2)
            let mut a = vec![Complex64::default(); n];
            a[n - 1] = gph[n - 1];
            if n >= 2 {
                a[n - 2] = gph[n - 2] + gph[n];
            }
            for r in (0..n.saturating_sub(2)).rev() {
                a[r] = a[r + 2] + gph[r] + gph[2 * n - 2 - r];
            }
            let mut buf = vec![Complex64::default(); 2 * n];
            for (m_idx, hv) in hq.iter().enumerate() {
                let q = m_idx as i64 - (n as i64 - 1);
                buf[m_idx] = hv * a[q.unsigned_abs() as usize];
            }
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(&mut buf, &mut scratch);
            buf
        })
        .collect();

    let w = step * step;
    let mut values = Array2::default((n, n));
    values
        .outer_iter_mut()
        .into_par_iter()
        .enumerate()
        .for_each(|(k, mut row)| {
            for (l, out) in row.iter_mut().enumerate() {
                let kk = k + l; // K + n
                let m_val = k as i64 - l as i64;
                let m_idx = m_val.rem_euclid(2 * n as i64) as usize;
                let twiddle = Complex64::from_polar(
                    1.0,
                    PI * m_val as f64 * (n as f64 - 1.0) / n as f64,
                );
                let center_ph = Complex64::from_polar(
                    1.0,
                    -2.0 * PI
                        * (tx.sample(k) * axis_x.center() + ty.sample(l) * axis_y.center()),
                );
                *out = w * center_ph * twiddle * spectra[kk][m_idx];
            }
        });
    ComplexField2D::new(tx, ty, values)
}
