//! Biphoton wave-packet synthesis and analysis in 2D time-frequency space.
//!
//! Joint spectral amplitudes are built from a pump envelope and a sinc
//! phase-matching function (or a fitted simplified form), superposed with a
//! controllable mode separation and relative phase, transformed to joint
//! temporal amplitudes, and analyzed: Hong-Ou-Mandel interferograms,
//! heralded single-photon waveforms, and peak structure.
//!
//! Conventions: frequencies in THz, times in ps, transform kernel
//! `exp(-i 2 pi t nu)` so axes stay unit-consistent without extra constants.

pub mod error;
pub mod fourier;
pub mod grid;
pub mod herald;
pub mod interference;
pub mod selftest;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{ComplexField2D, Domain, RealField2D, SampledAxis};
pub use herald::Waveform1D;
