//! Text artifact writers and readers: CSV series, self-describing grid
//! files, and ASCII graymap heatmaps.
//!
//! Floats in grid files use the shortest representation that parses back
//! to the identical value, so write then read is value-exact. CSV uses
//! fixed scientific notation with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use biphoton::grid::{ComplexField2D, Domain, RealField2D, SampledAxis};
use biphoton::herald::Waveform1D;
use biphoton::interference::HomPattern;
use ndarray::Array2;
use num_complex::Complex64;

use crate::{CliError, Result};

fn domain_name(d: Domain) -> &'static str {
    match d {
        Domain::Frequency => "frequency",
        Domain::Time => "time",
    }
}

fn parse_domain(s: &str) -> Result<Domain> {
    match s {
        "frequency" => Ok(Domain::Frequency),
        "time" => Ok(Domain::Time),
        other => Err(CliError::Config(format!("unknown domain '{other}'"))),
    }
}

/// Write `x,value` rows with a `# axis_unit,value` header.
pub fn export_csv(path: &Path, axis_unit: &str, rows: &[(f64, f64)]) -> Result<()> {
    if rows.is_empty() {
        return Err(CliError::Config("refusing to write an empty CSV".into()));
    }
    let mut out = String::new();
    let _ = writeln!(out, "# {axis_unit},value");
    for (x, v) in rows {
        let _ = writeln!(out, "{x:.16e},{v:.16e}");
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn waveform_rows(w: &Waveform1D) -> Vec<(f64, f64)> {
    w.axis()
        .samples()
        .zip(w.values().iter().copied())
        .collect()
}

pub fn pattern_rows(p: &HomPattern) -> Vec<(f64, f64)> {
    p.delays().iter().copied().zip(p.p_cc().iter().copied()).collect()
}

/// A grid file holds either a real intensity or a complex amplitude.
#[derive(Debug)]
pub enum GridData {
    Real(RealField2D),
    Complex(ComplexField2D),
}

fn grid_header(ax: &SampledAxis, ay: &SampledAxis, kind: &str) -> String {
    format!(
        "# {} {} {} {} {} {} {} {kind}\n",
        ax.n(),
        ay.n(),
        ax.center(),
        ax.step(),
        ay.center(),
        ay.step(),
        domain_name(ax.domain()),
    )
}

/// Write a real intensity grid: header then `nx` rows of `ny` values.
pub fn export_grid_real(path: &Path, field: &RealField2D) -> Result<()> {
    let mut out = grid_header(field.axis_x(), field.axis_y(), "intensity");
    for row in field.values().outer_iter() {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Write a complex grid: each row interleaves `re im` per sample.
pub fn export_grid_complex(path: &Path, field: &ComplexField2D) -> Result<()> {
    let mut out = grid_header(field.axis_x(), field.axis_y(), "complex");
    for row in field.values().outer_iter() {
        let line: Vec<String> = row.iter().map(|v| format!("{} {}", v.re, v.im)).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a grid file written by the exporters above, value-exact.
pub fn read_grid(path: &Path) -> Result<GridData> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Config("empty grid file".into()))?;
    let fields: Vec<&str> = header
        .strip_prefix('#')
        .ok_or_else(|| CliError::Config("grid header must start with '#'".into()))?
        .split_whitespace()
        .collect();
    if fields.len() != 8 {
        return Err(CliError::Config(format!(
            "grid header needs 8 fields, got {}",
            fields.len()
        )));
    }
    let nx: usize = fields[0]
        .parse()
        .map_err(|_| CliError::Config("bad nx in grid header".into()))?;
    let ny: usize = fields[1]
        .parse()
        .map_err(|_| CliError::Config("bad ny in grid header".into()))?;
    let nums: Vec<f64> = fields[2..6]
        .iter()
        .map(|s| s.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Config("bad axis numbers in grid header".into()))?;
    let domain = parse_domain(fields[6])?;
    let kind = fields[7];
    // step * n is exact for power-of-two n, so the axis reconstructs
    // bit-identically from (center, step)
    let ax = SampledAxis::new(nx, nums[0], nums[1] * nx as f64, domain)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let ay = SampledAxis::new(ny, nums[2], nums[3] * ny as f64, domain)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let per_row = match kind {
        "intensity" => ny,
        "complex" => 2 * ny,
        other => return Err(CliError::Config(format!("unknown grid kind '{other}'"))),
    };
    let mut values: Vec<f64> = Vec::with_capacity(nx * per_row);
    for (i, line) in lines.enumerate() {
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| CliError::Config(format!("bad number in grid row {}", i + 1)))?;
        if row.len() != per_row {
            return Err(CliError::Config(format!(
                "grid row {} has {} values, expected {per_row}",
                i + 1,
                row.len()
            )));
        }
        values.extend(row);
    }
    if values.len() != nx * per_row {
        return Err(CliError::Config(format!(
            "grid has {} rows, expected {nx}",
            values.len() / per_row
        )));
    }
    match kind {
        "intensity" => {
            let arr = Array2::from_shape_vec((nx, ny), values)
                .map_err(|e| CliError::Config(e.to_string()))?;
            Ok(GridData::Real(
                RealField2D::new(ax, ay, arr).map_err(|e| CliError::Config(e.to_string()))?,
            ))
        }
        _ => {
            let cplx: Vec<Complex64> = values
                .chunks_exact(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect();
            let arr = Array2::from_shape_vec((nx, ny), cplx)
                .map_err(|e| CliError::Config(e.to_string()))?;
            Ok(GridData::Complex(
                ComplexField2D::new(ax, ay, arr).map_err(|e| CliError::Config(e.to_string()))?,
            ))
        }
    }
}

/// Write an ASCII portable graymap of a nonnegative field, scaled so the
/// maximum maps to 255.
pub fn export_heatmap(path: &Path, field: &RealField2D) -> Result<()> {
    let max = field.values().iter().cloned().fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(CliError::Numeric("cannot render a heatmap of a zero field".into()));
    }
    let (nx, ny) = (field.axis_x().n(), field.axis_y().n());
    let mut out = format!("P2\n{ny} {nx}\n255\n");
    for row in field.values().outer_iter() {
        let line: Vec<String> = row
            .iter()
            .map(|v| format!("{}", (255.0 * v / max).round() as u32))
            .collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    fs::write(path, out)?;
    Ok(())
}
