//! Run configuration: defaults, config-file parsing, and value parsers
//! shared with the command line.
//!
//! The file format is flat `key = value` pairs under `[section]` headers;
//! `#` starts a comment. Sections and keys mirror the command-line flags
//! one to one, so any flag can live in the file and the command line wins
//! on conflict.
//!
//! ```text
//! [grid]
//! n = 1024
//! span = 16.0
//! center = 0.0
//!
//! [model]
//! kind = simplified      # simplified | physical
//! a = 0.11284
//! b = 13.888
//! length = 30.0          # mm, physical model
//! poling_period = 46.0   # um
//! dk0 = 0.0              # rad/mm
//! gp = 6.2               # ps/mm
//! g1 = 6.0527
//! g2 = 6.3473
//! pump_center = 0.0      # THz, sum-coordinate offset
//! pump_sigma = 2.124     # THz amplitude bandwidth
//!
//! [superposition]
//! delta = 0.2131         # THz
//! phi = 0.86pi           # radians or multiples of pi
//!
//! [hom]
//! tau = -15:15:0.05      # ps, start:stop:step
//!
//! [herald]
//! sweep_temp = 35,45,55,65
//! response_fwhm = 0.0    # ps
//!
//! [analysis]
//! threshold = 0.2
//!
//! [calibration]
//! t_ref = 45.0
//! sep_ref = 0.26
//! sep_slope = 0.012
//! phi_ref = 0.86pi
//! phi_slope = -0.095pi
//!
//! [calibrate]
//! temps = 35:65:5
//!
//! [output]
//! grid = out/field.grid
//! csv = out/scan.csv
//! heatmap = out/field.pgm
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use biphoton::interference::CalibrationModel;

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Simplified,
    Physical,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct Settings {
    pub n: usize,
    pub span: f64,
    pub center: f64,

    pub model: ModelKind,
    pub a: f64,
    pub b: f64,
    pub length: f64,
    pub poling_period: f64,
    pub dk0: f64,
    pub gp: f64,
    pub g1: f64,
    pub g2: f64,
    pub pump_center: f64,
    pub pump_sigma: f64,

    pub delta: f64,
    pub phi: f64,

    pub tau: (f64, f64, f64),
    pub sweep_temp: Vec<f64>,
    pub response_fwhm: f64,
    pub threshold: f64,

    pub calibration: CalibrationModel,
    pub temps: Vec<f64>,

    pub out_grid: Option<PathBuf>,
    pub out_csv: Option<PathBuf>,
    pub out_heatmap: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            n: 512,
            span: 16.0,
            center: 0.0,
            model: ModelKind::Simplified,
            a: 0.11284,
            b: 13.888,
            length: 30.0,
            poling_period: 46.0,
            dk0: 0.0,
            gp: 6.2,
            g1: 6.0527,
            g2: 6.3473,
            pump_center: 0.0,
            pump_sigma: 2.124,
            delta: 0.0,
            phi: 0.0,
            tau: (-15.0, 15.0, 0.05),
            sweep_temp: Vec::new(),
            response_fwhm: 0.0,
            threshold: 0.2,
            calibration: CalibrationModel::default(),
            temps: vec![35.0, 40.0, 45.0, 50.0, 55.0, 60.0, 65.0],
            out_grid: None,
            out_csv: None,
            out_heatmap: None,
        }
    }
}

/// Parse an angle given in radians or as a multiple of pi
/// (`pi`, `-pi`, `0.86pi`).
pub fn parse_angle(s: &str) -> Result<f64> {
    let t = s.trim();
    let bad = || CliError::Config(format!("cannot parse angle '{s}'"));
    if let Some(head) = t.strip_suffix("pi") {
        let factor = match head.trim() {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h.parse::<f64>().map_err(|_| bad())?,
        };
        Ok(factor * PI)
    } else {
        t.parse::<f64>().map_err(|_| bad())
    }
}

/// Parse `start:stop:step` into an inclusive range description.
pub fn parse_range(s: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Config(format!("cannot parse range '{s}' (want start:stop:step)"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    if !(v[2] > 0.0) || !(v[1] >= v[0]) {
        return Err(bad());
    }
    Ok((v[0], v[1], v[2]))
}

/// Expand an inclusive range into its grid of values.
pub fn range_values((start, stop, step): (f64, f64, f64)) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| start + step * i as f64).collect()
}

/// Parse a list of numbers: comma-separated values or a `start:stop:step`
/// range.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    if s.contains(':') {
        return Ok(range_values(parse_range(s)?));
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("cannot parse number '{}'", p.trim())))
        })
        .collect()
}

fn parse_key<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| CliError::Config(format!("cannot parse value '{value}' for key '{key}'")))
}

impl Settings {
    /// Merge `key = value` pairs from a config file into this settings set.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        let mut section = String::new();
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            if section.is_empty() {
                return Err(CliError::Config(format!(
                    "line {}: key outside any [section]",
                    lineno + 1
                )));
            }
            map.insert(
                format!("{section}.{}", key.trim()),
                value.trim().to_string(),
            );
        }
        for (key, value) in &map {
            self.apply_pair(key, value)?;
        }
        Ok(())
    }

    /// Apply one dotted `section.key` assignment.
    pub fn apply_key(&mut self, key: &str, value: &str) -> Result<()> {
        self.apply_pair(key, value)
    }

    fn apply_pair(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "grid.n" => self.n = parse_key(key, value)?,
            "grid.span" => self.span = parse_key(key, value)?,
            "grid.center" => self.center = parse_key(key, value)?,
            "model.kind" => {
                self.model = match value {
                    "simplified" => ModelKind::Simplified,
                    "physical" => ModelKind::Physical,
                    other => {
                        return Err(CliError::Config(format!(
                            "model.kind must be 'simplified' or 'physical', got '{other}'"
                        )))
                    }
                }
            }
            "model.a" => self.a = parse_key(key, value)?,
            "model.b" => self.b = parse_key(key, value)?,
            "model.length" => self.length = parse_key(key, value)?,
            "model.poling_period" => self.poling_period = parse_key(key, value)?,
            "model.dk0" => self.dk0 = parse_key(key, value)?,
            "model.gp" => self.gp = parse_key(key, value)?,
            "model.g1" => self.g1 = parse_key(key, value)?,
            "model.g2" => self.g2 = parse_key(key, value)?,
            "model.pump_center" => self.pump_center = parse_key(key, value)?,
            "model.pump_sigma" => self.pump_sigma = parse_key(key, value)?,
            "superposition.delta" => self.delta = parse_key(key, value)?,
            "superposition.phi" => self.phi = parse_angle(value)?,
            "hom.tau" => self.tau = parse_range(value)?,
            "herald.sweep_temp" => self.sweep_temp = parse_list(value)?,
            "herald.response_fwhm" => self.response_fwhm = parse_key(key, value)?,
            "analysis.threshold" => self.threshold = parse_key(key, value)?,
            "calibration.t_ref" => self.calibration.t_ref = parse_key(key, value)?,
            "calibration.sep_ref" => self.calibration.sep_ref = parse_key(key, value)?,
            "calibration.sep_slope" => self.calibration.sep_slope = parse_key(key, value)?,
            "calibration.phi_ref" => self.calibration.phi_ref = parse_angle(value)?,
            "calibration.phi_slope" => self.calibration.phi_slope = parse_angle(value)?,
            "calibrate.temps" => self.temps = parse_list(value)?,
            "output.grid" => self.out_grid = Some(PathBuf::from(value)),
            "output.csv" => self.out_csv = Some(PathBuf::from(value)),
            "output.heatmap" => self.out_heatmap = Some(PathBuf::from(value)),
            other => {
                return Err(CliError::Config(format!("unknown config key '{other}'")));
            }
        }
        Ok(())
    }
}
