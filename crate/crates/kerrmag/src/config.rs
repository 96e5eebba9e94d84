//! Run configuration: TOML schema and resolution into solver inputs.
//!
//! Units are fixed by the schema so no field carries a unit annotation:
//! frequencies and rates in MHz, powers in mW, lengths in mm, fields in T;
//! the drive coupling `c` in MHz³/mW. Material constants are SI (m⁻³, J/m³,
//! A/m). Explicit `[system]` values override material-derived ones with a
//! logged notice.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::params::{self, CrystalAxis, DerivedMagnonParams, MaterialAndGeometry};
use crate::steady::{DriveConfig, DriveTarget, SystemConfig};
use crate::sweep::{SweepAxis, SweepDirection};

const MHZ: f64 = 1e6;

/// Top-level config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub material: Option<MaterialSection>,
    pub system: SystemSection,
    pub drive: DriveSection,
    #[serde(default)]
    pub probe: ProbeSection,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub oracle: OracleSection,
    #[serde(default)]
    pub critical: CriticalSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// `[material]`: sphere constants and geometry for parameter derivation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    /// Net spin density (m⁻³).
    #[serde(default = "defaults::spin_density")]
    pub spin_density_per_m3: f64,
    /// μ0·K_an product (J/m³).
    #[serde(default = "defaults::anisotropy")]
    pub anisotropy_j_per_m3: f64,
    /// Saturation magnetization (A/m).
    #[serde(default = "defaults::magnetization")]
    pub saturation_magnetization_a_per_m: f64,
    /// Gyromagnetic ratio (MHz/T).
    #[serde(default = "defaults::gyro")]
    pub gyro_mhz_per_t: f64,
    /// Single-spin coupling (MHz).
    #[serde(default = "defaults::single_spin")]
    pub single_spin_coupling_mhz: f64,
    /// Sphere diameter (mm).
    pub diameter_mm: f64,
    /// "100" or "110".
    pub crystal_axis: String,
    /// Bias field (T).
    pub bias_field_t: f64,
}

mod defaults {
    pub fn spin_density() -> f64 {
        2.1e28
    }
    pub fn anisotropy() -> f64 {
        2480.0
    }
    pub fn magnetization() -> f64 {
        196e3
    }
    pub fn gyro() -> f64 {
        28e3
    }
    pub fn single_spin() -> f64 {
        39e-9
    }
    pub fn probe_points() -> usize {
        401
    }
    pub fn probe_eps() -> f64 {
        1e-3
    }
    pub fn sweep_direction() -> String {
        "both".into()
    }
    pub fn oracle_samples() -> usize {
        100
    }
    pub fn oracle_seed() -> u64 {
        7
    }
    pub fn critical_points() -> usize {
        81
    }
    pub fn output_dir() -> String {
        "out".into()
    }
}

/// `[system]`: explicit model parameters (MHz). Optional entries fall back
/// to material-derived values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub omega_c_mhz: f64,
    pub omega_m_mhz: Option<f64>,
    pub kappa_in_mhz: f64,
    pub kappa_out_mhz: f64,
    pub kappa_int_mhz: f64,
    pub gamma_m_mhz: f64,
    pub g_m_mhz: Option<f64>,
    pub kerr_mhz: Option<f64>,
}

/// `[drive]`: pump tone. Exactly one of `omega_d_mhz` / `delta_m_mhz`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    /// "yig" or "cavity".
    pub target: String,
    pub omega_d_mhz: Option<f64>,
    /// Alternative: δ_m = ω_m − ω_d (MHz).
    pub delta_m_mhz: Option<f64>,
    pub power_mw: f64,
    pub c_mhz3_per_mw: f64,
}

/// `[probe]`: probe-frequency grid for spectra. Defaults to
/// ω_c ± (2 g_m + 10 κ_c) with 401 points.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeSection {
    pub start_mhz: Option<f64>,
    pub stop_mhz: Option<f64>,
    pub points: usize,
    /// Nominal probe coupling ε_p (MHz); cancels in S21.
    pub epsilon_mhz: f64,
}

impl Default for ProbeSection {
    fn default() -> Self {
        Self {
            start_mhz: None,
            stop_mhz: None,
            points: defaults::probe_points(),
            epsilon_mhz: defaults::probe_eps(),
        }
    }
}

/// `[sweep]`: hysteresis sweep plan. `axis` is "power" (mW) or "omega_m"
/// (MHz).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default = "defaults::sweep_direction")]
    pub direction: String,
}

/// `[oracle]`: verification-suite controls.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    pub samples: usize,
    pub seed: u64,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            samples: defaults::oracle_samples(),
            seed: defaults::oracle_seed(),
        }
    }
}

/// `[critical]`: Δ-scan for the threshold/critical-power curve. Defaults to
/// Δ ∈ ±10 g_m with 81 points.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriticalSection {
    pub delta_start_mhz: Option<f64>,
    pub delta_stop_mhz: Option<f64>,
    pub points: usize,
}

impl Default for CriticalSection {
    fn default() -> Self {
        Self {
            delta_start_mhz: None,
            delta_stop_mhz: None,
            points: defaults::critical_points(),
        }
    }
}

/// `[output]`: file destinations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
    pub prefix: Option<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: defaults::output_dir(),
            prefix: None,
        }
    }
}

/// Fully resolved inputs for one run.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub sys: SystemConfig,
    pub drive: DriveConfig,
    pub material: Option<MaterialAndGeometry>,
    pub derived: Option<DerivedMagnonParams>,
    /// Probe grid (Hz, ascending).
    pub probe_grid: Vec<f64>,
    /// Probe coupling ε_p (Hz).
    pub probe_amp: f64,
    /// Sweep values (Hz or mW, ascending) with axis and direction.
    pub sweep: Option<(SweepAxis, Vec<f64>, SweepDirection)>,
    /// Δ-scan values (Hz, ascending).
    pub critical_grid: Vec<f64>,
    /// Override notices (explicit value replaced a derived one).
    pub notices: Vec<String>,
    /// Non-fatal warnings (guard rails).
    pub warnings: Vec<String>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Resolves sections into solver inputs, deriving magnon parameters from
    /// the material when present.
    pub fn resolve(&self) -> Result<Resolved, Error> {
        let mut notices = Vec::new();
        let mut warnings = Vec::new();

        let material = self
            .material
            .as_ref()
            .map(|m| -> Result<MaterialAndGeometry, Error> {
                let axis = match m.crystal_axis.as_str() {
                    "100" => CrystalAxis::Axis100,
                    "110" => CrystalAxis::Axis110,
                    other => {
                        return Err(Error::InvalidInput(format!(
                            "crystal_axis must be \"100\" or \"110\", got \"{other}\""
                        )))
                    }
                };
                Ok(MaterialAndGeometry {
                    spin_density: m.spin_density_per_m3,
                    anisotropy_energy: m.anisotropy_j_per_m3,
                    saturation_magnetization: m.saturation_magnetization_a_per_m,
                    gyro_ratio: m.gyro_mhz_per_t * MHZ,
                    single_spin_coupling: m.single_spin_coupling_mhz * MHZ,
                    diameter: m.diameter_mm * 1e-3,
                    axis,
                    bias_field: m.bias_field_t,
                })
            })
            .transpose()?;
        let derived = material
            .as_ref()
            .map(|mg| {
                warnings.extend(mg.warnings());
                params::derive_all(mg)
            })
            .transpose()?;

        let pick = |name: &str,
                    explicit: Option<f64>,
                    derived_value: Option<f64>,
                    notices: &mut Vec<String>|
         -> Result<f64, Error> {
            match (explicit, derived_value) {
                (Some(e), Some(d)) => {
                    if e * MHZ != d {
                        notices.push(format!(
                            "explicit {name} = {e} MHz overrides derived {:.6e} MHz",
                            d / MHZ
                        ));
                    }
                    Ok(e * MHZ)
                }
                (Some(e), None) => Ok(e * MHZ),
                (None, Some(d)) => Ok(d),
                (None, None) => Err(Error::InvalidInput(format!(
                    "{name} missing: set [system].{name}_mhz or provide [material]"
                ))),
            }
        };

        let s = &self.system;
        let omega_m = pick(
            "omega_m",
            s.omega_m_mhz,
            derived.as_ref().map(|d| d.magnon_frequency),
            &mut notices,
        )?;
        let g_m = pick(
            "g_m",
            s.g_m_mhz,
            derived.as_ref().map(|d| d.coupling),
            &mut notices,
        )?;
        let kerr = pick(
            "kerr",
            s.kerr_mhz,
            derived.as_ref().map(|d| d.kerr),
            &mut notices,
        )?;
        let sys = SystemConfig {
            omega_c: s.omega_c_mhz * MHZ,
            omega_m,
            kappa_in: s.kappa_in_mhz * MHZ,
            kappa_out: s.kappa_out_mhz * MHZ,
            kappa_int: s.kappa_int_mhz * MHZ,
            gamma_m: s.gamma_m_mhz * MHZ,
            g_m,
            kerr,
            macrospin: derived.as_ref().map(|d| d.macrospin),
        };
        sys.validate()?;

        let target = match self.drive.target.as_str() {
            "yig" => DriveTarget::Yig,
            "cavity" => DriveTarget::Cavity,
            other => {
                return Err(Error::InvalidInput(format!(
                    "drive target must be \"yig\" or \"cavity\", got \"{other}\""
                )))
            }
        };
        let omega_d = match (self.drive.omega_d_mhz, self.drive.delta_m_mhz) {
            (Some(w), None) => w * MHZ,
            (None, Some(dm)) => sys.omega_m - dm * MHZ,
            (Some(_), Some(_)) => {
                return Err(Error::InvalidInput(
                    "give either omega_d_mhz or delta_m_mhz, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::InvalidInput(
                    "drive needs omega_d_mhz or delta_m_mhz".into(),
                ))
            }
        };
        let drive = DriveConfig {
            target,
            omega_d,
            power: self.drive.power_mw,
            power_coupling: self.drive.c_mhz3_per_mw,
        };
        drive.validate(sys.kerr)?;

        let span = 2.0 * sys.g_m + 10.0 * sys.kappa_c();
        let start = self.probe.start_mhz.map_or(sys.omega_c - span, |v| v * MHZ);
        let stop = self.probe.stop_mhz.map_or(sys.omega_c + span, |v| v * MHZ);
        let probe_grid = linspace(start, stop, self.probe.points, "probe")?;

        let sweep = self
            .sweep
            .as_ref()
            .map(|sw| -> Result<(SweepAxis, Vec<f64>, SweepDirection), Error> {
                let (axis, scale) = match sw.axis.as_str() {
                    "power" => (SweepAxis::Power, 1.0),
                    "omega_m" => (SweepAxis::MagnonFrequency, MHZ),
                    other => {
                        return Err(Error::InvalidInput(format!(
                            "sweep axis must be \"power\" or \"omega_m\", got \"{other}\""
                        )))
                    }
                };
                let direction = match sw.direction.as_str() {
                    "up" => SweepDirection::Up,
                    "down" => SweepDirection::Down,
                    "both" => SweepDirection::Both,
                    other => {
                        return Err(Error::InvalidInput(format!(
                            "sweep direction must be up/down/both, got \"{other}\""
                        )))
                    }
                };
                let values = linspace(sw.start * scale, sw.stop * scale, sw.points, "sweep")?;
                Ok((axis, values, direction))
            })
            .transpose()?;

        let c_start = self
            .critical
            .delta_start_mhz
            .map_or(-10.0 * sys.g_m, |v| v * MHZ);
        let c_stop = self
            .critical
            .delta_stop_mhz
            .map_or(10.0 * sys.g_m, |v| v * MHZ);
        let critical_grid = linspace(c_start, c_stop, self.critical.points, "critical")?;

        Ok(Resolved {
            sys,
            drive,
            material,
            derived,
            probe_grid,
            probe_amp: self.probe.epsilon_mhz * MHZ,
            sweep,
            critical_grid,
            notices,
            warnings,
        })
    }
}

fn linspace(start: f64, stop: f64, points: usize, what: &str) -> Result<Vec<f64>, Error> {
    if points < 2 || start >= stop || start.is_nan() || stop.is_nan() {
        return Err(Error::InvalidInput(format!(
            "{what} grid needs points >= 2 and start < stop (got {points} over [{start}, {stop}])"
        )));
    }
    let step = (stop - start) / (points - 1) as f64;
    Ok((0..points).map(|i| start + step * i as f64).collect())
}
