//! Shared fixtures for the benchmark targets.

use std::f64::consts::PI;

use biphoton::grid::{ComplexField2D, Domain, SampledAxis};
use biphoton::spectral::{jsa_two_mode, SimplifiedJsaParams, SuperpositionParams};

pub fn freq_axis(n: usize, span: f64) -> SampledAxis {
    SampledAxis::new(n, 0.0, span, Domain::Frequency).unwrap()
}

/// Antisymmetric two-mode joint spectrum at the larger displacement.
pub fn two_mode_jsa(n: usize, span: f64) -> ComplexField2D {
    let ax = freq_axis(n, span);
    let s = SimplifiedJsaParams::DEFAULT;
    let sp = SuperpositionParams::new(0.4237, PI).unwrap();
    jsa_two_mode(&ax, &ax, &s, &sp).unwrap()
}
