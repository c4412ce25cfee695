//! Uniform sampled axes and complex fields on square 2D grids.
//!
//! Frequencies are in THz and times in ps throughout, so with the
//! `exp(-i 2 pi t nu)` transform kernel the product `t * nu` is
//! dimensionless and no unit constants appear anywhere.

use ndarray::parallel::prelude::*;
use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Physical domain of an axis: frequency (THz) or time (ps).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Frequency,
    Time,
}

impl Domain {
    pub fn conjugate(self) -> Domain {
        match self {
            Domain::Frequency => Domain::Time,
            Domain::Time => Domain::Frequency,
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Domain::Frequency => "THz",
            Domain::Time => "ps",
        }
    }
}

/// Uniform sampling of one coordinate. `sample(i) = center + (i - n/2) * step`.
///
/// `n` is restricted to powers of two (>= 8) so the center sample is
/// unambiguous and the discrete transform stays simple.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledAxis {
    n: usize,
    center: f64,
    step: f64,
    domain: Domain,
}

impl SampledAxis {
    /// Build an axis of `n` samples covering `span` around `center`.
    /// The sample spacing is `span / n`.
    pub fn new(n: usize, center: f64, span: f64, domain: Domain) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::NonPowerOfTwo(n));
        }
        if !(span > 0.0) || !span.is_finite() {
            return Err(Error::NonPositiveSpan(span));
        }
        if !center.is_finite() {
            return Err(Error::InvalidParameter("axis center must be finite"));
        }
        Ok(SampledAxis {
            n,
            center,
            step: span / n as f64,
            domain,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn span(&self) -> f64 {
        self.step * self.n as f64
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn sample(&self, i: usize) -> f64 {
        self.center + (i as f64 - (self.n / 2) as f64) * self.step
    }

    pub fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.sample(i))
    }

    /// The axis conjugate under the discrete Fourier transform:
    /// domain flipped, centered on zero, `step' = 1 / (n * step)`.
    pub fn conjugate(&self) -> SampledAxis {
        SampledAxis {
            n: self.n,
            center: 0.0,
            step: 1.0 / (self.n as f64 * self.step),
            domain: self.domain.conjugate(),
        }
    }
}

/// Complex amplitude sampled on a square axis-by-axis grid.
///
/// Immutable after construction; `values[[i, j]]` is the amplitude at
/// `(axis_x.sample(i), axis_y.sample(j))`.
#[derive(Debug, Clone)]
pub struct ComplexField2D {
    axis_x: SampledAxis,
    axis_y: SampledAxis,
    values: Array2<Complex64>,
}

impl ComplexField2D {
    pub fn new(axis_x: SampledAxis, axis_y: SampledAxis, values: Array2<Complex64>) -> Result<Self> {
        if axis_x.domain() != axis_y.domain() {
            return Err(Error::AxisMismatch);
        }
        if values.dim() != (axis_x.n(), axis_y.n()) {
            return Err(Error::ShapeMismatch);
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        Ok(ComplexField2D {
            axis_x,
            axis_y,
            values,
        })
    }

    /// Evaluate `f(x, y)` on the grid, parallelized over rows.
    /// Bit-identical to [`ComplexField2D::from_fn_serial`] for the same `f`.
    pub fn from_fn<F>(axis_x: SampledAxis, axis_y: SampledAxis, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        if axis_x.domain() != axis_y.domain() {
            return Err(Error::AxisMismatch);
        }
        let (nx, ny) = (axis_x.n(), axis_y.n());
        let mut values = Array2::zeros((nx, ny));
        values
            .outer_iter_mut()
            .into_par_iter()
            .enumerate()
            .for_each(|(i, mut row)| {
                let x = axis_x.sample(i);
                for (j, v) in row.iter_mut().enumerate() {
                    *v = f(x, axis_y.sample(j));
                }
            });
        Self::new(axis_x, axis_y, values)
    }

    /// Serial reference evaluation, used to assert order independence.
    pub fn from_fn_serial<F>(axis_x: SampledAxis, axis_y: SampledAxis, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64,
    {
        if axis_x.domain() != axis_y.domain() {
            return Err(Error::AxisMismatch);
        }
        let (nx, ny) = (axis_x.n(), axis_y.n());
        let mut values = Array2::zeros((nx, ny));
        for i in 0..nx {
            let x = axis_x.sample(i);
            for j in 0..ny {
                values[[i, j]] = f(x, axis_y.sample(j));
            }
        }
        Self::new(axis_x, axis_y, values)
    }

    pub fn axis_x(&self) -> &SampledAxis {
        &self.axis_x
    }

    pub fn axis_y(&self) -> &SampledAxis {
        &self.axis_y
    }

    pub fn domain(&self) -> Domain {
        self.axis_x.domain()
    }

    pub fn n(&self) -> usize {
        self.axis_x.n()
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<Complex64> {
        self.values
    }

    /// Total L2 mass: `sum |v|^2 * step_x * step_y`.
    pub fn l2_mass(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        s * self.axis_x.step() * self.axis_y.step()
    }

    /// Squared-magnitude field with the same axes.
    pub fn intensity(&self) -> RealField2D {
        RealField2D {
            axis_x: self.axis_x.clone(),
            axis_y: self.axis_y.clone(),
            values: self.values.mapv(|v| v.norm_sqr()),
        }
    }

    pub fn same_axes(&self, other: &ComplexField2D) -> bool {
        self.axis_x == other.axis_x && self.axis_y == other.axis_y
    }
}

/// Real-valued 2D data (intensities) on the same grid layout.
#[derive(Debug, Clone)]
pub struct RealField2D {
    axis_x: SampledAxis,
    axis_y: SampledAxis,
    values: Array2<f64>,
}

impl RealField2D {
    pub fn new(axis_x: SampledAxis, axis_y: SampledAxis, values: Array2<f64>) -> Result<Self> {
        if axis_x.domain() != axis_y.domain() {
            return Err(Error::AxisMismatch);
        }
        if values.dim() != (axis_x.n(), axis_y.n()) {
            return Err(Error::ShapeMismatch);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        Ok(RealField2D {
            axis_x,
            axis_y,
            values,
        })
    }

    pub fn axis_x(&self) -> &SampledAxis {
        &self.axis_x
    }

    pub fn axis_y(&self) -> &SampledAxis {
        &self.axis_y
    }

    pub fn n(&self) -> usize {
        self.axis_x.n()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn total_mass(&self) -> f64 {
        self.values.sum() * self.axis_x.step() * self.axis_y.step()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_axis_basic() {
        let ax = SampledAxis::new(8, 0.0, 8.0, Domain::Frequency).unwrap();
        assert_eq!(ax.step(), 1.0);
        let s: Vec<f64> = ax.samples().collect();
        assert_eq!(s, vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn make_axis_reference_grid() {
        let ax = SampledAxis::new(512, 189.39, 8.0, Domain::Frequency).unwrap();
        assert_eq!(ax.step(), 0.015625);
        assert_eq!(ax.sample(256), 189.39);
    }

    #[test]
    fn make_axis_rejects_non_power_of_two() {
        assert!(matches!(
            SampledAxis::new(12, 0.0, 8.0, Domain::Time),
            Err(Error::NonPowerOfTwo(12))
        ));
        assert!(matches!(
            SampledAxis::new(4, 0.0, 8.0, Domain::Time),
            Err(Error::NonPowerOfTwo(4))
        ));
        assert!(matches!(
            SampledAxis::new(8, 0.0, -1.0, Domain::Time),
            Err(Error::NonPositiveSpan(_))
        ));
    }

    #[test]
    fn conjugate_axis_values() {
        let ax = SampledAxis::new(512, 189.39, 8.0, Domain::Frequency).unwrap();
        let t = ax.conjugate();
        assert_eq!(t.domain(), Domain::Time);
        assert_eq!(t.step(), 0.125);
        assert_eq!(t.span(), 64.0);
        assert_eq!(t.center(), 0.0);

        let ax8 = SampledAxis::new(8, 0.0, 8.0, Domain::Frequency).unwrap();
        assert_eq!(ax8.conjugate().step(), 0.125);
    }

    #[test]
    fn conjugate_is_involution_on_step() {
        for &(n, span) in &[(8usize, 8.0f64), (512, 8.0), (1024, 13.7), (64, 0.375)] {
            let ax = SampledAxis::new(n, 1.5, span, Domain::Frequency).unwrap();
            let back = ax.conjugate().conjugate();
            assert_eq!(back.n(), ax.n());
            assert_eq!(back.step(), ax.step(), "step must round-trip bit-exactly");
            assert_eq!(back.domain(), ax.domain());
        }
    }

    #[test]
    fn parallel_and_serial_evaluation_agree_bitwise() {
        let ax = SampledAxis::new(64, 0.3, 10.0, Domain::Frequency).unwrap();
        let f = |x: f64, y: f64| Complex64::new((-0.1 * (x + y).powi(2)).exp(), (x - y).sin());
        let a = ComplexField2D::from_fn(ax.clone(), ax.clone(), f).unwrap();
        let b = ComplexField2D::from_fn_serial(ax.clone(), ax, f).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn l2_mass_finite_nonnegative() {
        let ax = SampledAxis::new(16, 0.0, 4.0, Domain::Time).unwrap();
        let field =
            ComplexField2D::from_fn(ax.clone(), ax, |x, y| Complex64::new(x * y, 0.2)).unwrap();
        let m = field.l2_mass();
        assert!(m.is_finite() && m >= 0.0);
    }
}
