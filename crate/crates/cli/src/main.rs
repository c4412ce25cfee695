//! Command-line front end. Subcommands cover the joint spectrum (`jsa`),
//! its time-domain transform (`jta`), two-photon interference scans
//! (`hom`), heralded single-photon shaping (`herald`), the temperature
//! calibration model (`calibrate`), and the built-in verification suite
//! (`selftest`).
//!
//! Exit codes: 0 on success, 2 for configuration problems, 3 for numeric
//! failures (including a failing selftest).

use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use biphoton::fourier::{antidiagonal_peaks, ft2, mode_separation_product, parseval_residual};
use biphoton::grid::{ComplexField2D, Domain, SampledAxis};
use biphoton::herald::{convolve_response, count_peaks, heralded_spectral, heralded_temporal, sweep_params};
use biphoton::interference::{calibration_eval, fit_linear, hom_fit, hom_scan};
use biphoton::selftest;
use biphoton::spectral::{
    jsa_physical, jsa_simplified, jsa_simplified_mode, jsa_two_mode, shift_difference, superpose,
    DispersionModel, PumpParams, SimplifiedJsaParams, SuperpositionParams,
};
use biphoton_cli::config::{parse_list, parse_range, range_values, ModelKind, Settings};
use biphoton_cli::io;
use biphoton_cli::{CliError, Result};

#[derive(Parser)]
#[command(name = "biphoton", version, about = "Biphoton joint spectral and temporal simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every modelling subcommand. Each one mirrors a config
/// file key; a flag given on the command line overrides the file.
#[derive(Args)]
struct CommonArgs {
    /// Config file with [section] key = value pairs
    #[arg(long)]
    config: Option<PathBuf>,
    /// Samples per axis (power of two)
    #[arg(long)]
    n: Option<usize>,
    /// Axis span in THz
    #[arg(long)]
    span: Option<f64>,
    /// Axis center in THz
    #[arg(long, allow_negative_numbers = true)]
    center: Option<f64>,
    /// Spectral model: simplified | physical
    #[arg(long)]
    model: Option<String>,
    /// Sum-coordinate Gaussian width parameter (simplified model)
    #[arg(long)]
    a: Option<f64>,
    /// Difference-coordinate sinc scale (simplified model)
    #[arg(long)]
    b: Option<f64>,
    /// Mode displacement along the difference coordinate, THz
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Superposition phase, radians or multiples of pi (e.g. 0.86pi)
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    /// Crystal length, mm (physical model)
    #[arg(long)]
    length: Option<f64>,
    /// Poling period, um (physical model)
    #[arg(long)]
    poling_period: Option<f64>,
    /// Residual phase mismatch at degeneracy, rad/mm
    #[arg(long, allow_negative_numbers = true)]
    dk0: Option<f64>,
    /// Pump group slowness, ps/mm
    #[arg(long)]
    gp: Option<f64>,
    /// Signal group slowness, ps/mm
    #[arg(long)]
    g1: Option<f64>,
    /// Idler group slowness, ps/mm
    #[arg(long)]
    g2: Option<f64>,
    /// Pump detuning from degeneracy, THz
    #[arg(long, allow_negative_numbers = true)]
    pump_center: Option<f64>,
    /// Pump amplitude bandwidth, THz
    #[arg(long)]
    pump_sigma: Option<f64>,
    /// Relative peak detection threshold
    #[arg(long)]
    threshold: Option<f64>,
    /// Write the complex field as a grid file
    #[arg(long)]
    out_grid: Option<PathBuf>,
    /// Write a 1D summary as CSV
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Write the intensity as an ASCII graymap
    #[arg(long)]
    heatmap: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the joint spectral amplitude and report its ridge peaks
    Jsa(CommonArgs),
    /// Transform to the joint temporal amplitude and report separations
    Jta(CommonArgs),
    /// Scan two-photon coincidence probability against relative delay
    Hom {
        #[command(flatten)]
        common: CommonArgs,
        /// Delay scan as start:stop:step in ps
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
    },
    /// Heralded single-photon waveform and peak counts
    Herald {
        #[command(flatten)]
        common: CommonArgs,
        /// Temperatures to sweep, comma list or start:stop:step
        #[arg(long, allow_hyphen_values = true)]
        sweep_temp: Option<String>,
        /// Detector response FWHM in ps (0 disables)
        #[arg(long)]
        response_fwhm: Option<f64>,
    },
    /// Evaluate the temperature calibration model and refit its slopes
    Calibrate {
        #[command(flatten)]
        common: CommonArgs,
        /// Temperatures to evaluate, comma list or start:stop:step
        #[arg(long, allow_hyphen_values = true)]
        temps: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        t_ref: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sep_ref: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sep_slope: Option<f64>,
        /// Reference phase, radians or multiples of pi
        #[arg(long, allow_hyphen_values = true)]
        phi_ref: Option<String>,
        /// Phase slope per degree, radians or multiples of pi
        #[arg(long, allow_hyphen_values = true)]
        phi_slope: Option<String>,
    },
    /// Run the built-in verification suite
    Selftest,
}

fn resolve(common: &CommonArgs) -> Result<Settings> {
    let mut s = Settings::default();
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        s.apply_file(&text)?;
    }
    if let Some(v) = common.n {
        s.n = v;
    }
    if let Some(v) = common.span {
        s.span = v;
    }
    if let Some(v) = common.center {
        s.center = v;
    }
    if let Some(v) = &common.model {
        s.apply_key("model.kind", v)?;
    }
    if let Some(v) = common.a {
        s.a = v;
    }
    if let Some(v) = common.b {
        s.b = v;
    }
    if let Some(v) = common.delta {
        s.delta = v;
    }
    if let Some(v) = &common.phi {
        s.phi = biphoton_cli::config::parse_angle(v)?;
    }
    if let Some(v) = common.length {
        s.length = v;
    }
    if let Some(v) = common.poling_period {
        s.poling_period = v;
    }
    if let Some(v) = common.dk0 {
        s.dk0 = v;
    }
    if let Some(v) = common.gp {
        s.gp = v;
    }
    if let Some(v) = common.g1 {
        s.g1 = v;
    }
    if let Some(v) = common.g2 {
        s.g2 = v;
    }
    if let Some(v) = common.pump_center {
        s.pump_center = v;
    }
    if let Some(v) = common.pump_sigma {
        s.pump_sigma = v;
    }
    if let Some(v) = common.threshold {
        s.threshold = v;
    }
    if let Some(v) = &common.out_grid {
        s.out_grid = Some(v.clone());
    }
    if let Some(v) = &common.out_csv {
        s.out_csv = Some(v.clone());
    }
    if let Some(v) = &common.heatmap {
        s.out_heatmap = Some(v.clone());
    }
    Ok(s)
}

fn frequency_axes(s: &Settings) -> Result<(SampledAxis, SampledAxis)> {
    let ax = SampledAxis::new(s.n, s.center, s.span, Domain::Frequency)?;
    Ok((ax.clone(), ax))
}

/// Build the configured joint spectral amplitude, including the two-mode
/// superposition when `delta` is nonzero.
fn build_jsa(s: &Settings) -> Result<ComplexField2D> {
    let (ax, ay) = frequency_axes(s)?;
    match s.model {
        ModelKind::Simplified => {
            let p = SimplifiedJsaParams::new(s.a, s.b)?;
            if s.delta == 0.0 {
                Ok(jsa_simplified(&ax, &ay, &p)?)
            } else {
                let sp = SuperpositionParams::new(s.delta, s.phi)?;
                Ok(jsa_two_mode(&ax, &ay, &p, &sp)?)
            }
        }
        ModelKind::Physical => {
            let pump = PumpParams::new(s.pump_center, s.pump_sigma)?;
            let disp = DispersionModel::new(s.length, s.poling_period, s.dk0, s.gp, s.g1, s.g2)?;
            let base = jsa_physical(&ax, &ay, &pump, &disp)?;
            if s.delta == 0.0 {
                Ok(base)
            } else {
                let m1 = shift_difference(&base, s.delta)?;
                let m2 = shift_difference(&base, -s.delta)?;
                Ok(superpose(&m1, &m2, s.phi)?)
            }
        }
    }
}

/// Spectral separation between the two displaced modes, each located by
/// its own ridge peak. Only defined when `delta` is nonzero.
fn per_mode_spectral_separation(s: &Settings) -> Result<f64> {
    let (ax, ay) = frequency_axes(s)?;
    let (m1, m2) = match s.model {
        ModelKind::Simplified => {
            let p = SimplifiedJsaParams::new(s.a, s.b)?;
            (
                jsa_simplified_mode(&ax, &ay, &p, s.delta)?,
                jsa_simplified_mode(&ax, &ay, &p, -s.delta)?,
            )
        }
        ModelKind::Physical => {
            let pump = PumpParams::new(s.pump_center, s.pump_sigma)?;
            let disp = DispersionModel::new(s.length, s.poling_period, s.dk0, s.gp, s.g1, s.g2)?;
            let base = jsa_physical(&ax, &ay, &pump, &disp)?;
            (
                shift_difference(&base, s.delta)?,
                shift_difference(&base, -s.delta)?,
            )
        }
    };
    let p1 = antidiagonal_peaks(&m1.intensity(), s.threshold)?;
    let p2 = antidiagonal_peaks(&m2.intensity(), s.threshold)?;
    let (x1, y1) = p1.positions[0];
    let (x2, y2) = p2.positions[0];
    Ok(((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt())
}

fn write_common_outputs(s: &Settings, field: &ComplexField2D, csv_axis_index: usize) -> Result<()> {
    if let Some(path) = &s.out_grid {
        io::export_grid_complex(path, field)?;
        println!("grid written to {}", path.display());
    }
    if let Some(path) = &s.out_heatmap {
        io::export_heatmap(path, &field.intensity())?;
        println!("heatmap written to {}", path.display());
    }
    if let Some(path) = &s.out_csv {
        let marg = biphoton::spectral::marginal_intensity(field, csv_axis_index)?;
        io::export_csv(path, field.axis_x().domain().unit(), &io::waveform_rows(&marg))?;
        println!("csv written to {}", path.display());
    }
    Ok(())
}

fn cmd_jsa(common: &CommonArgs) -> Result<()> {
    let s = resolve(common)?;
    let f = build_jsa(&s)?;
    println!(
        "jsa: n={} span={} center={} model={} delta={} phi={}",
        s.n,
        s.span,
        s.center,
        match s.model {
            ModelKind::Simplified => "simplified",
            ModelKind::Physical => "physical",
        },
        s.delta,
        s.phi,
    );
    match antidiagonal_peaks(&f.intensity(), s.threshold) {
        Ok(peaks) => {
            println!("spectral ridge peaks: {}", peaks.positions.len());
            if let Some(sep) = peaks.separation {
                println!("spectral separation: {sep:.6} THz");
            }
        }
        Err(e) => println!("spectral ridge peaks: none ({e})"),
    }
    if s.delta != 0.0 {
        println!(
            "per-mode spectral separation: {:.6} THz",
            per_mode_spectral_separation(&s)?
        );
    }
    write_common_outputs(&s, &f, 1)
}

fn cmd_jta(common: &CommonArgs) -> Result<()> {
    let s = resolve(common)?;
    let f = build_jsa(&s)?;
    let j = ft2(&f)?;
    println!("jta: n={} span={} delta={} phi={}", s.n, s.span, s.delta, s.phi);
    println!("parseval residual: {:.3e}", parseval_residual(&f, &j)?);
    let jti = antidiagonal_peaks(&j.intensity(), s.threshold)?;
    println!("temporal ridge peaks: {}", jti.positions.len());
    if s.delta != 0.0 {
        let sep_f = per_mode_spectral_separation(&s)?;
        let sep_t = jti.require_separation()?;
        println!("jsi separation: {sep_f:.6} THz");
        println!("jti separation: {sep_t:.6} ps");
        println!("mode separation product: {:.6}", mode_separation_product(sep_f, sep_t)?);
    }
    write_common_outputs(&s, &j, 1)
}

fn cmd_hom(common: &CommonArgs, tau: &Option<String>) -> Result<()> {
    let mut s = resolve(common)?;
    if let Some(t) = tau {
        s.tau = parse_range(t)?;
    }
    let f = build_jsa(&s)?;
    let delays = range_values(s.tau);
    let pattern = hom_scan(&f, &delays)?;
    let fit = hom_fit(&pattern)?;
    println!("hom: {} delays over [{}, {}] ps", delays.len(), s.tau.0, s.tau.1);
    println!("fit frequency: {:.6} THz", fit.freq);
    println!("fit phase: {:.6}pi", fit.phase / PI);
    println!("fit visibility: {:.6}", fit.visibility);
    println!("fit envelope width: {:.6} ps", fit.envelope_width);
    println!("fit residual rms: {:.3e}", fit.residual_rms);
    if let Some(path) = &s.out_csv {
        io::export_csv(path, "ps", &io::pattern_rows(&pattern))?;
        println!("csv written to {}", path.display());
    }
    Ok(())
}

fn cmd_herald(
    common: &CommonArgs,
    sweep: &Option<String>,
    response: Option<f64>,
) -> Result<()> {
    let mut s = resolve(common)?;
    if let Some(list) = sweep {
        s.sweep_temp = parse_list(list)?;
    }
    if let Some(v) = response {
        s.response_fwhm = v;
    }
    if s.sweep_temp.is_empty() {
        let f = build_jsa(&s)?;
        let j = ft2(&f)?;
        let mut w = heralded_temporal(&j)?;
        if s.response_fwhm > 0.0 {
            w = convolve_response(&w, s.response_fwhm)?;
        }
        println!("temporal peaks: {}", count_peaks(&w, s.threshold)?);
        println!("spectral peaks: {}", count_peaks(&heralded_spectral(&f)?, s.threshold)?);
        if let Some(path) = &s.out_csv {
            io::export_csv(path, "ps", &io::waveform_rows(&w))?;
            println!("csv written to {}", path.display());
        }
        return Ok(());
    }
    for &t in &s.sweep_temp {
        let (delta, phi) = sweep_params(t);
        let mut st = s.clone();
        st.delta = delta;
        st.phi = phi;
        let f = build_jsa(&st)?;
        let j = ft2(&f)?;
        let mut w = heralded_temporal(&j)?;
        if s.response_fwhm > 0.0 {
            w = convolve_response(&w, s.response_fwhm)?;
        }
        let nt = count_peaks(&w, s.threshold)?;
        let ns = count_peaks(&heralded_spectral(&f)?, s.threshold)?;
        println!(
            "T={t} delta={delta:.4} phi={:.4}pi temporal_peaks={nt} spectral_peaks={ns}",
            phi / PI,
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_calibrate(
    common: &CommonArgs,
    temps: &Option<String>,
    t_ref: Option<f64>,
    sep_ref: Option<f64>,
    sep_slope: Option<f64>,
    phi_ref: &Option<String>,
    phi_slope: &Option<String>,
) -> Result<()> {
    let mut s = resolve(common)?;
    if let Some(list) = temps {
        s.temps = parse_list(list)?;
    }
    if let Some(v) = t_ref {
        s.calibration.t_ref = v;
    }
    if let Some(v) = sep_ref {
        s.calibration.sep_ref = v;
    }
    if let Some(v) = sep_slope {
        s.calibration.sep_slope = v;
    }
    if let Some(v) = phi_ref {
        s.calibration.phi_ref = biphoton_cli::config::parse_angle(v)?;
    }
    if let Some(v) = phi_slope {
        s.calibration.phi_slope = biphoton_cli::config::parse_angle(v)?;
    }
    if s.temps.len() < 2 {
        return Err(CliError::Config("calibrate needs at least two temperatures".into()));
    }
    let mut sep_pts = Vec::new();
    let mut phi_pts = Vec::new();
    for &t in &s.temps {
        let (sep, phi) = calibration_eval(&s.calibration, t);
        println!("T={t} separation={sep:.6} THz phase={:.6}pi", phi / PI);
        sep_pts.push((t, sep));
        phi_pts.push((t, phi));
    }
    let (ss, si, sr2) = fit_linear(&sep_pts)?;
    let (ps, pi_, pr2) = fit_linear(&phi_pts)?;
    println!("separation fit: slope={ss:.6} intercept={si:.6} r2={sr2:.6}");
    println!(
        "phase fit: slope={:.6}pi intercept={:.6}pi r2={pr2:.6}",
        ps / PI,
        pi_ / PI,
    );
    Ok(())
}

fn cmd_selftest() -> Result<()> {
    let results = selftest::run_all();
    let mut ok = true;
    for r in &results {
        println!("{} {} {}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail);
        ok &= r.pass;
    }
    if ok {
        Ok(())
    } else {
        Err(CliError::Numeric("selftest reported failures".into()))
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Jsa(c) => cmd_jsa(c),
        Command::Jta(c) => cmd_jta(c),
        Command::Hom { common, tau } => cmd_hom(common, tau),
        Command::Herald { common, sweep_temp, response_fwhm } => {
            cmd_herald(common, sweep_temp, *response_fwhm)
        }
        Command::Calibrate { common, temps, t_ref, sep_ref, sep_slope, phi_ref, phi_slope } => {
            cmd_calibrate(common, temps, *t_ref, *sep_ref, *sep_slope, phi_ref, phi_slope)
        }
        Command::Selftest => cmd_selftest(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Config(_) => ExitCode::from(2),
                CliError::Numeric(_) => ExitCode::from(3),
            }
        }
    }
}
