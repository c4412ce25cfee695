use thiserror::Error;

/// Errors produced by grid construction, field synthesis and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sample count {0} is not a power of two >= 8")]
    NonPowerOfTwo(usize),
    #[error("span must be positive and finite, got {0}")]
    NonPositiveSpan(f64),
    #[error("expected a {expected:?}-domain field, got {got:?}")]
    WrongDomain {
        expected: crate::grid::Domain,
        got: crate::grid::Domain,
    },
    #[error("field axes do not match")]
    AxisMismatch,
    #[error("value array shape does not match axes")]
    ShapeMismatch,
    #[error("non-finite value in field")]
    NonFiniteValue,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("shift of {0} THz moves significant support outside the sampled window")]
    ShiftExceedsGrid(f64),
    #[error("axis index {0} out of range (must be 0 or 1)")]
    BadAxisIndex(usize),
    #[error("field has zero norm")]
    ZeroField,
    #[error("no peaks above threshold")]
    NoPeaks,
    #[error("separation requires at least two peaks")]
    NoSeparation,
    #[error("input must be positive, got {0}")]
    NonPositiveInput(f64),
    #[error("interference pattern is flat; nothing to fit")]
    FitDegenerate,
    #[error("fit did not converge")]
    NotConverged,
    #[error("all x values coincide; linear fit is degenerate")]
    DegenerateX,
    #[error("negative FWHM {0}")]
    NegativeFwhm(f64),
    #[error("empty waveform")]
    EmptyWaveform,
}

pub type Result<T> = std::result::Result<T, Error>;
