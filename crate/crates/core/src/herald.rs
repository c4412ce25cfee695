//! Heralded single-photon waveforms, detector-response convolution, and
//! peak counting.
//!
//! Heralding is modeled as an unconditioned marginal: the trigger detector
//! resolves neither time nor frequency, so the heralded intensity is the
//! joint intensity integrated over the heralding photon's coordinate.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, Domain, RealField2D, SampledAxis};
use crate::spectral::marginal_intensity;

/// Real nonnegative intensity samples on one axis.
#[derive(Debug, Clone)]
pub struct Waveform1D {
    axis: SampledAxis,
    values: Vec<f64>,
}

impl Waveform1D {
    pub fn new(axis: SampledAxis, values: Vec<f64>) -> Result<Self> {
        if values.len() != axis.n() {
            return Err(Error::ShapeMismatch);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        if values.iter().any(|v| *v < 0.0) {
            return Err(Error::InvalidParameter("waveform values must be >= 0"));
        }
        Ok(Waveform1D { axis, values })
    }

    pub fn axis(&self) -> &SampledAxis {
        &self.axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Integral `sum v * step`.
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.axis.step()
    }
}

fn require_domain(field: &ComplexField2D, expected: Domain) -> Result<()> {
    if field.domain() != expected {
        return Err(Error::WrongDomain {
            expected,
            got: field.domain(),
        });
    }
    Ok(())
}

/// Heralded temporal intensity `I(t1) = sum_{t2} |JTA(t1, t2)|^2 dt`.
pub fn heralded_temporal(jta: &ComplexField2D) -> Result<Waveform1D> {
    require_domain(jta, Domain::Time)?;
    if jta.values().iter().all(|v| v.norm_sqr() == 0.0) {
        return Err(Error::ZeroField);
    }
    marginal_intensity(jta, 1)
}

/// Heralded spectral intensity `I(nu1) = sum_{nu2} |S(nu1, nu2)|^2 dnu`.
pub fn heralded_spectral(jsa: &ComplexField2D) -> Result<Waveform1D> {
    require_domain(jsa, Domain::Frequency)?;
    if jsa.values().iter().all(|v| v.norm_sqr() == 0.0) {
        return Err(Error::ZeroField);
    }
    marginal_intensity(jsa, 1)
}

/// Unit-sum Gaussian kernel taps for a given FWHM in axis units,
/// truncated at +-8 sigma. Empty for fwhm = 0.
fn gaussian_kernel(fwhm: f64, step: f64) -> Result<Vec<f64>> {
    if fwhm < 0.0 || !fwhm.is_finite() {
        return Err(Error::NegativeFwhm(fwhm));
    }
    if fwhm == 0.0 {
        return Ok(Vec::new());
    }
    let sigma = fwhm / (2.0 * (2.0 * (2f64).ln()).sqrt());
    let half = ((8.0 * sigma / step).ceil() as usize).max(1);
    let mut taps: Vec<f64> = (0..=2 * half)
        .map(|k| {
            let x = (k as f64 - half as f64) * step / sigma;
            (-0.5 * x * x).exp()
        })
        .collect();
    let s: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= s;
    }
    Ok(taps)
}

fn convolve_zero_padded(values: &[f64], taps: &[f64]) -> Vec<f64> {
    let n = values.len();
    let half = taps.len() / 2;
    (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for (k, t) in taps.iter().enumerate() {
                let j = i as isize + k as isize - half as isize;
                if j >= 0 && (j as usize) < n {
                    acc += t * values[j as usize];
                }
            }
            acc
        })
        .collect()
}

/// Blur a waveform with a unit-area Gaussian detector response of the
/// given FWHM (same unit as the axis). Zero-padded, so no wraparound;
/// the integral is preserved as long as the support stays inside the
/// window. `fwhm = 0` is the identity.
pub fn convolve_response(w: &Waveform1D, fwhm: f64) -> Result<Waveform1D> {
    let taps = gaussian_kernel(fwhm, w.axis.step())?;
    if taps.is_empty() {
        return Ok(w.clone());
    }
    Waveform1D::new(w.axis.clone(), convolve_zero_padded(&w.values, &taps))
}

/// Separable Gaussian blur of a 2D intensity with per-axis FWHMs.
pub fn blur2d(field: &RealField2D, fwhm_x: f64, fwhm_y: f64) -> Result<RealField2D> {
    let taps_x = gaussian_kernel(fwhm_x, field.axis_x().step())?;
    let taps_y = gaussian_kernel(fwhm_y, field.axis_y().step())?;
    let n = field.n();
    let mut out = field.values().clone();
    if !taps_x.is_empty() {
        let mut tmp = Array2::zeros(out.dim());
        for j in 0..n {
            let col: Vec<f64> = (0..n).map(|i| out[[i, j]]).collect();
            let c = convolve_zero_padded(&col, &taps_x);
            for i in 0..n {
                tmp[[i, j]] = c[i];
            }
        }
        out = tmp;
    }
    if !taps_y.is_empty() {
        for i in 0..n {
            let row: Vec<f64> = (0..n).map(|j| out[[i, j]]).collect();
            let r = convolve_zero_padded(&row, &taps_y);
            for j in 0..n {
                out[[i, j]] = r[j];
            }
        }
    }
    RealField2D::new(field.axis_x().clone(), field.axis_y().clone(), out)
}

/// Count strict local maxima above `rel_threshold * max(w)`.
///
/// Plateaus count once, endpoint maxima count (a monotone ramp has one
/// peak at its end). Sub-bin parabolic refinement of the peak positions
/// does not change the count, so only the comparison logic matters here.
pub fn count_peaks(w: &Waveform1D, rel_threshold: f64) -> Result<usize> {
    if !(rel_threshold > 0.0 && rel_threshold < 1.0) {
        return Err(Error::InvalidParameter("rel_threshold must be in (0, 1)"));
    }
    let v = &w.values;
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return Err(Error::EmptyWaveform);
    }
    let thr = rel_threshold * max;
    let n = v.len();
    let mut count = 0;
    let mut i = 0;
    while i < n {
        // extend over a plateau of equal values
        let mut j = i;
        while j + 1 < n && v[j + 1] == v[i] {
            j += 1;
        }
        let left_lower = i == 0 || v[i - 1] < v[i];
        let right_lower = j == n - 1 || v[j + 1] < v[i];
        if left_lower && right_lower && v[i] >= thr {
            count += 1;
        }
        i = j + 1;
    }
    Ok(count)
}

/// Mode separation and relative phase at a crystal temperature, by linear
/// interpolation between the calibration anchors (45 C, delta 0.2131,
/// phi 0.86 pi) and (65 C, delta 0.4237) with phase slope -0.095 pi per C.
pub fn sweep_params(t_celsius: f64) -> (f64, f64) {
    let delta = 0.2131 + (0.4237 - 0.2131) / 20.0 * (t_celsius - 45.0);
    let phi = std::f64::consts::PI * (0.86 - 0.095 * (t_celsius - 45.0));
    (delta, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SampledAxis;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    const A: f64 = 0.11284;
    const B: f64 = 13.888;

    // closed-form two-mode joint temporal amplitude on a time grid
    fn jta_two_mode_field(n: usize, span: f64, delta: f64, phi: f64) -> ComplexField2D {
        use std::f64::consts::PI;
        let ax = SampledAxis::new(n, 0.0, span, Domain::Time).unwrap();
        ComplexField2D::from_fn(ax.clone(), ax, move |t1, t2| {
            let big_t = t1 + t2;
            let tau = t1 - t2;
            if (PI * tau / (2.0 * B)).abs() > 0.5 {
                return Complex64::new(0.0, 0.0);
            }
            let env = (PI / B) * (PI / A).sqrt() * (-PI * PI * big_t * big_t / (4.0 * A)).exp();
            Complex64::from_polar(1.0, phi / 2.0) * env * (PI * tau * delta - phi / 2.0).cos()
        })
        .unwrap()
    }

    fn wf(values: Vec<f64>) -> Waveform1D {
        let n = values.len();
        let ax = SampledAxis::new(n, 0.0, n as f64, Domain::Time).unwrap();
        Waveform1D::new(ax, values).unwrap()
    }

    #[test]
    fn waveform_rejects_negative() {
        let ax = SampledAxis::new(8, 0.0, 8.0, Domain::Time).unwrap();
        assert!(Waveform1D::new(ax, vec![0.0, 1.0, 2.0, -0.1, 0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn heralded_temporal_single_mode_single_peak() {
        let f = jta_two_mode_field(512, 24.0, 0.0, 0.0);
        let w = heralded_temporal(&f).unwrap();
        assert_eq!(count_peaks(&w, 0.2).unwrap(), 1);
    }

    #[test]
    fn heralded_temporal_four_peaks_at_large_delta() {
        let f = jta_two_mode_field(1024, 24.0, 0.4237, std::f64::consts::PI);
        let w = heralded_temporal(&f).unwrap();
        assert_eq!(count_peaks(&w, 0.2).unwrap(), 4);
        // peaks of sin^2(pi delta t1 * 2) marginal sit near +-0.59 and +-1.77 ps
        let v = w.values();
        let imax = (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
        let t = w.axis().sample(imax).abs();
        assert!(
            (t - 0.590).abs() < 0.1 || (t - 1.770).abs() < 0.1,
            "dominant peak at {t}"
        );
    }

    #[test]
    fn heralded_temporal_two_peaks_at_reference_phase() {
        let f = jta_two_mode_field(1024, 24.0, 0.2131, 0.86 * std::f64::consts::PI);
        let w = heralded_temporal(&f).unwrap();
        assert_eq!(count_peaks(&w, 0.2).unwrap(), 2);
    }

    #[test]
    fn heralded_temporal_rejects_frequency_domain_and_zero() {
        let ax = SampledAxis::new(16, 0.0, 8.0, Domain::Frequency).unwrap();
        let f = ComplexField2D::from_fn(ax.clone(), ax, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(
            heralded_temporal(&f),
            Err(Error::WrongDomain { .. })
        ));
        let axt = SampledAxis::new(16, 0.0, 8.0, Domain::Time).unwrap();
        let z = ComplexField2D::from_fn(axt.clone(), axt, |_, _| Complex64::new(0.0, 0.0)).unwrap();
        assert!(matches!(heralded_temporal(&z), Err(Error::ZeroField)));
    }

    #[test]
    fn heralded_marginal_mass_matches_field() {
        let f = jta_two_mode_field(512, 24.0, 0.4237, 1.0);
        let w = heralded_temporal(&f).unwrap();
        assert_relative_eq!(w.total(), f.l2_mass(), max_relative = 1e-12);
    }

    #[test]
    fn heralded_spectral_single_peak() {
        use crate::spectral::{jsa_two_mode, SimplifiedJsaParams, SuperpositionParams};
        let ax = SampledAxis::new(512, 0.0, 16.0, Domain::Frequency).unwrap();
        let s = SimplifiedJsaParams::DEFAULT;
        for delta in [0.0, 0.4237] {
            let sp = SuperpositionParams::new(delta, 0.86 * std::f64::consts::PI).unwrap();
            let f = jsa_two_mode(&ax, &ax, &s, &sp).unwrap();
            let w = heralded_spectral(&f).unwrap();
            assert_eq!(count_peaks(&w, 0.2).unwrap(), 1, "delta {delta}");
            assert_relative_eq!(w.total(), f.l2_mass(), max_relative = 1e-12);
        }
    }

    #[test]
    fn convolve_identity_at_zero_fwhm() {
        let w = wf(vec![0.0, 1.0, 3.0, 2.0, 0.5, 0.0, 0.0, 0.0]);
        let out = convolve_response(&w, 0.0).unwrap();
        assert_eq!(out.values(), w.values());
        assert!(matches!(
            convolve_response(&w, -1.0),
            Err(Error::NegativeFwhm(_))
        ));
    }

    #[test]
    fn convolve_delta_gives_gaussian_of_stated_fwhm() {
        let n = 256;
        let ax = SampledAxis::new(n, 0.0, 64.0, Domain::Time).unwrap();
        let mut values = vec![0.0; n];
        values[n / 2] = 1.0;
        let w = Waveform1D::new(ax.clone(), values).unwrap();
        let fwhm = 3.0;
        let out = convolve_response(&w, fwhm).unwrap();
        let max = out.values().iter().cloned().fold(0.0, f64::max);
        // half maximum crossings should straddle +-fwhm/2 within one bin
        let half_crossing = out
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v >= max / 2.0)
            .map(|(i, _)| ax.sample(i))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((half_crossing - fwhm / 2.0).abs() <= ax.step());
        assert_relative_eq!(out.total(), w.total(), max_relative = 1e-9);
    }

    #[test]
    fn convolve_preserves_four_peaks_at_instrument_resolution() {
        let f = jta_two_mode_field(1024, 24.0, 0.4237, std::f64::consts::PI);
        let w = heralded_temporal(&f).unwrap();
        let blurred = convolve_response(&w, 0.34).unwrap();
        assert_eq!(count_peaks(&blurred, 0.2).unwrap(), 4);
        // contrast is reduced but mass is not
        assert_relative_eq!(blurred.total(), w.total(), max_relative = 1e-9);
        let max = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
        assert!(max(blurred.values()) < max(w.values()));
    }

    #[test]
    fn blur2d_identity_and_mass() {
        let ax = SampledAxis::new(128, 0.0, 16.0, Domain::Time).unwrap();
        let f = ComplexField2D::from_fn(ax.clone(), ax, |x, y| {
            Complex64::new((-(x * x + 0.5 * y * y)).exp(), 0.0)
        })
        .unwrap();
        let i = f.intensity();
        let same = blur2d(&i, 0.0, 0.0).unwrap();
        assert_eq!(same.values(), i.values());
        let blurred = blur2d(&i, 0.48, 0.48).unwrap();
        assert_relative_eq!(blurred.total_mass(), i.total_mass(), max_relative = 1e-9);
    }

    #[test]
    fn count_peaks_basics() {
        // monotone ramp: single peak at the right end
        let ramp = wf((0..16).map(|i| i as f64).collect());
        assert_eq!(count_peaks(&ramp, 0.2).unwrap(), 1);

        // two clear peaks with a plateau counting once
        let w = wf(vec![0.0, 1.0, 5.0, 5.0, 5.0, 1.0, 0.0, 4.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(count_peaks(&w, 0.2).unwrap(), 2);

        // sub-threshold bump is not counted
        assert_eq!(count_peaks(&w, 0.9).unwrap(), 1);

        let zero = wf(vec![0.0; 8]);
        assert!(matches!(count_peaks(&zero, 0.2), Err(Error::EmptyWaveform)));
        assert!(count_peaks(&ramp, 1.5).is_err());
    }

    #[test]
    fn sweep_params_anchors() {
        let (d45, p45) = sweep_params(45.0);
        assert_relative_eq!(d45, 0.2131, max_relative = 1e-12);
        assert_relative_eq!(p45, 0.86 * std::f64::consts::PI, max_relative = 1e-12);
        let (d65, _) = sweep_params(65.0);
        assert_relative_eq!(d65, 0.4237, max_relative = 1e-12);
    }

    #[test]
    fn sweep_reproduces_peak_count_sequence() {
        for (t, expect) in [(35.0, 1), (45.0, 2), (55.0, 3), (65.0, 4)] {
            let (delta, phi) = sweep_params(t);
            let f = jta_two_mode_field(1024, 24.0, delta, phi);
            let w = heralded_temporal(&f).unwrap();
            assert_eq!(count_peaks(&w, 0.2).unwrap(), expect, "T = {t}");
            let blurred = convolve_response(&w, 0.34).unwrap();
            assert_eq!(count_peaks(&blurred, 0.2).unwrap(), expect, "blurred T = {t}");
        }
    }
}
