//! Derived magnon parameters from material constants and sphere geometry.
//!
//! The sphere's spins form a single macrospin `S = ρ_s V_m / 2` (spin-1/2
//! sites), which collectively enhances the single-spin coupling `g_s` to
//! `g_m = sqrt(2S) g_s`. First-order magnetocrystalline anisotropy produces
//! the quadratic macrospin terms `D_x S_x² + D_y S_y² + D_z S_z²`; after the
//! Holstein-Primakoff mapping these yield both a shift of the magnon
//! frequency (volume-independent) and the Kerr coefficient `K ∝ 1/V_m`.
//! `K > 0` for the [100] crystal axis along the bias field, `K < 0` for
//! [110], with |K_110| / K_100 = 13/16 for identical geometry.
//!
//! The anisotropy formulas are energy expressions; they are converted here
//! to linear frequencies (Hz) by reinserting `ħ` (spin-1/2 sites carry
//! `s = ħ/2`) and dividing by 2π.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::HBAR;

/// Crystallographic axis of the sphere aligned with the bias field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrystalAxis {
    /// [100] axis: positive Kerr coefficient (blue shift).
    Axis100,
    /// [110] axis: negative Kerr coefficient (red shift).
    Axis110,
}

/// Material constants and geometry of the magnetized sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialAndGeometry {
    /// Net spin density ρ_s (spins per m³).
    pub spin_density: f64,
    /// First-order anisotropy energy density, stored as the product μ0·K_an (J/m³).
    pub anisotropy_energy: f64,
    /// Saturation magnetization M (A/m).
    pub saturation_magnetization: f64,
    /// Gyromagnetic ratio as a linear frequency per field, γ/2π (Hz/T).
    pub gyro_ratio: f64,
    /// Single-spin coupling strength to the cavity mode (Hz, linear).
    pub single_spin_coupling: f64,
    /// Sphere diameter d (m).
    pub diameter: f64,
    /// Crystal axis aligned with the bias field.
    pub axis: CrystalAxis,
    /// Static bias field B0 (T).
    pub bias_field: f64,
}

/// Usual sphere diameters; outside this band a warning is emitted, not an error.
pub const DIAMETER_GUARD_BAND: (f64, f64) = (1e-5, 5e-3);

impl MaterialAndGeometry {
    /// Standard single-crystal YIG constants with the given geometry.
    ///
    /// ρ_s = 2.1e28 m⁻³, μ0·K_an = 2480 J/m³, M = 196 kA/m,
    /// γ/2π = 28 GHz/T, g_s/2π = 39 mHz.
    pub fn yig(diameter: f64, axis: CrystalAxis, bias_field: f64) -> Self {
        Self {
            spin_density: 2.1e28,
            anisotropy_energy: 2480.0,
            saturation_magnetization: 196e3,
            gyro_ratio: 28e9,
            single_spin_coupling: 39e-3,
            diameter,
            axis,
            bias_field,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let positive = [
            ("spin_density", self.spin_density),
            ("anisotropy_energy", self.anisotropy_energy),
            ("saturation_magnetization", self.saturation_magnetization),
            ("gyro_ratio", self.gyro_ratio),
            ("diameter", self.diameter),
        ];
        for (name, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "{name} must be strictly positive and finite, got {value}"
                )));
            }
        }
        for (name, value) in [
            ("single_spin_coupling", self.single_spin_coupling),
            ("bias_field", self.bias_field),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "{name} must be nonnegative and finite, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Guard-rail warnings (non-fatal) for unusual geometry.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let (lo, hi) = DIAMETER_GUARD_BAND;
        if self.diameter < lo || self.diameter > hi {
            out.push(format!(
                "sphere diameter {:.3e} m is outside the usual band [{lo:.0e}, {hi:.0e}] m",
                self.diameter
            ));
        }
        out
    }

    /// Sphere volume V_m = (π/6) d³ (m³).
    pub fn volume(&self) -> f64 {
        PI / 6.0 * self.diameter.powi(3)
    }
}

/// Model parameters derived from [`MaterialAndGeometry`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedMagnonParams {
    /// Macrospin quantum number S = ρ_s V_m / 2 (dimensionless).
    pub macrospin: f64,
    /// Sphere volume V_m (m³).
    pub volume: f64,
    /// Collective magnon-photon coupling g_m = sqrt(2S) g_s (Hz).
    pub coupling: f64,
    /// Kerr coefficient K (Hz, signed by crystal axis).
    pub kerr: f64,
    /// Magnon frequency ω_m/2π = γB0 + anisotropy shift (Hz).
    pub magnon_frequency: f64,
    /// Anisotropy coefficients (D_x, D_y, D_z) as linear frequencies (Hz).
    pub anisotropy: [f64; 3],
}

/// Base anisotropy frequency μ0·K_an·γ²·ħ/(M²·V_m), expressed linear (Hz).
///
/// Every D_i and the Kerr coefficient are rational multiples of this.
fn anisotropy_unit(mg: &MaterialAndGeometry) -> f64 {
    let gamma_ang = 2.0 * PI * mg.gyro_ratio;
    let m2 = mg.saturation_magnetization * mg.saturation_magnetization;
    HBAR * mg.anisotropy_energy * gamma_ang * gamma_ang / (m2 * mg.volume()) / (2.0 * PI)
}

/// Collective coupling g_m = sqrt(2S) g_s and the macrospin S = ρ_s V_m / 2.
pub fn derive_coupling(mg: &MaterialAndGeometry) -> Result<(f64, f64), Error> {
    mg.validate()?;
    let two_s = mg.spin_density * mg.volume();
    Ok((two_s.sqrt() * mg.single_spin_coupling, two_s / 2.0))
}

/// Kerr coefficient and anisotropy coefficients (D_x, D_y, D_z), in Hz.
pub fn derive_kerr_and_anisotropy(mg: &MaterialAndGeometry) -> Result<(f64, [f64; 3]), Error> {
    mg.validate()?;
    let unit = anisotropy_unit(mg);
    Ok(match mg.axis {
        CrystalAxis::Axis100 => (unit, [0.0, 0.0, unit]),
        CrystalAxis::Axis110 => (
            -13.0 / 16.0 * unit,
            [1.5 * unit, 1.125 * unit, 0.5 * unit],
        ),
    })
}

/// Magnon frequency ω_m/2π = γB0 + axis-dependent anisotropy shift (Hz).
///
/// The shift is independent of the sphere volume.
pub fn derive_magnon_frequency(mg: &MaterialAndGeometry) -> Result<f64, Error> {
    mg.validate()?;
    let gamma_ang = 2.0 * PI * mg.gyro_ratio;
    let m2 = mg.saturation_magnetization * mg.saturation_magnetization;
    // spin-1/2 sites: s = ħ/2 once ħ is reinserted
    let base =
        mg.anisotropy_energy * mg.spin_density * (HBAR / 2.0) * gamma_ang * gamma_ang / m2
            / (2.0 * PI);
    let shift = match mg.axis {
        CrystalAxis::Axis100 => -2.0 * base,
        CrystalAxis::Axis110 => 13.0 / 8.0 * base,
    };
    Ok(mg.gyro_ratio * mg.bias_field + shift)
}

/// All derived parameters in one pass.
pub fn derive_all(mg: &MaterialAndGeometry) -> Result<DerivedMagnonParams, Error> {
    let (coupling, macrospin) = derive_coupling(mg)?;
    let (kerr, anisotropy) = derive_kerr_and_anisotropy(mg)?;
    let magnon_frequency = derive_magnon_frequency(mg)?;
    Ok(DerivedMagnonParams {
        macrospin,
        volume: mg.volume(),
        coupling,
        kerr,
        magnon_frequency,
        anisotropy,
    })
}
