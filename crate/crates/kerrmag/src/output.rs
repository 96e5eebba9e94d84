//! CSV and JSON writers for the CLI.
//!
//! Every file is self-describing: CSV files start with `#`-prefixed
//! provenance lines carrying the subcommand and the resolved configuration
//! as one JSON line; JSON files embed the same under a `config` key. No
//! timestamps or environment data are written, so identical configs produce
//! byte-identical files.
//!
//! File values use the config-schema units (MHz, mW); the library itself
//! works in Hz.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::oracle::TrajectoryPoint;
use crate::response::SpectrumGrid;
use crate::steady::ThresholdDetuning;
use crate::sweep::HysteresisTrace;

const MHZ: f64 = 1e6;

/// Provenance header for CSV outputs.
fn provenance(command: &str, config: &RunConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    format!("# kerrmag {command}\n# config {json}\n")
}

fn create(path: &Path) -> io::Result<fs::File> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::File::create(path)
}

/// Serializes a result struct as JSON with the config embedded.
pub fn write_json<T: Serialize>(
    path: &Path,
    command: &str,
    config: &RunConfig,
    results: &T,
) -> io::Result<()> {
    #[derive(Serialize)]
    struct Document<'a, T> {
        command: &'a str,
        config: &'a RunConfig,
        results: &'a T,
    }
    let mut file = io::BufWriter::new(create(path)?);
    serde_json::to_writer_pretty(
        &mut file,
        &Document {
            command,
            config,
            results,
        },
    )?;
    file.write_all(b"\n")?;
    file.flush()
}

/// Sweep trace as CSV: axis value, Δ_m, branch, root count.
pub fn write_trace_csv(
    path: &Path,
    command: &str,
    config: &RunConfig,
    trace: &HysteresisTrace,
) -> io::Result<()> {
    let mut f = io::BufWriter::new(create(path)?);
    write!(f, "{}", provenance(command, config))?;
    let axis_unit = match trace.axis {
        crate::sweep::SweepAxis::Power => ("power_mw", 1.0),
        crate::sweep::SweepAxis::MagnonFrequency => ("omega_m_mhz", MHZ),
    };
    writeln!(f, "{},delta_m_mhz,branch,root_count", axis_unit.0)?;
    for s in &trace.samples {
        writeln!(
            f,
            "{:.12e},{:.12e},{},{}",
            s.axis_value / axis_unit.1,
            s.shift / MHZ,
            s.branch,
            s.root_count
        )?;
    }
    f.flush()
}

/// Spectrum in long form: ω_p, ω_m, |S21|, phase, branch.
pub fn write_spectrum_csv(
    path: &Path,
    command: &str,
    config: &RunConfig,
    grid: &SpectrumGrid,
) -> io::Result<()> {
    let mut f = io::BufWriter::new(create(path)?);
    write!(f, "{}", provenance(command, config))?;
    writeln!(f, "omega_p_mhz,omega_m_mhz,s21_abs,s21_phase_rad,branch")?;
    for (row, omega_m) in grid.omega_m.iter().enumerate() {
        for (col, omega_p) in grid.omega_p.iter().enumerate() {
            writeln!(
                f,
                "{:.12e},{:.12e},{:.12e},{:.12e},{}",
                omega_p / MHZ,
                omega_m / MHZ,
                grid.magnitude[row][col],
                grid.phase[row][col],
                grid.branches[row]
            )?;
        }
    }
    f.flush()
}

/// Threshold-detuning scan rows for the critical-power curve.
pub fn write_critical_csv(
    path: &Path,
    command: &str,
    config: &RunConfig,
    rows: &[(f64, Option<ThresholdDetuning>)],
) -> io::Result<()> {
    let mut f = io::BufWriter::new(create(path)?);
    write!(f, "{}", provenance(command, config))?;
    writeln!(
        f,
        "delta_mhz,delta_m_star_mhz,p_m_mw,p_c_mw,eta"
    )?;
    for (delta, t) in rows {
        match t {
            Some(t) => writeln!(
                f,
                "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                delta / MHZ,
                t.delta_m_star / MHZ,
                t.critical_power_yig,
                t.critical_power_cavity,
                t.eta
            )?,
            None => writeln!(f, "{:.12e},nan,nan,nan,nan", delta / MHZ)?,
        }
    }
    f.flush()
}

/// Integration trajectory: time, Re A, Im A, Re B, Im B.
pub fn write_trajectory_csv(
    path: &Path,
    command: &str,
    config: &RunConfig,
    points: &[TrajectoryPoint],
) -> io::Result<()> {
    let mut f = io::BufWriter::new(create(path)?);
    write!(f, "{}", provenance(command, config))?;
    writeln!(f, "time_s,re_a,im_a,re_b,im_b")?;
    for p in points {
        writeln!(
            f,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            p.time, p.state.cavity.re, p.state.cavity.im, p.state.magnon.re, p.state.magnon.im
        )?;
    }
    f.flush()
}
