//! Mean-field simulator for a driven cavity-magnon system with a magnon Kerr
//! nonlinearity.
//!
//! A small ferrimagnetic (YIG) sphere couples its uniform-precession Kittel
//! mode to a microwave cavity mode. Magnetocrystalline anisotropy gives the
//! magnon mode a quartic self-interaction whose coefficient `K` is positive
//! or negative depending on which crystal axis is aligned with the bias
//! field. Under a strong drive tone (applied either to the sphere or to the
//! cavity) the Kerr term shifts the magnon frequency by `Δ_m = 2K|B0|²`,
//! which satisfies a cubic equation in the drive power and exhibits
//! bistability with hysteresis. A weak probe measures the cavity
//! transmission `S21`, whose dip tracks the shifted magnon frequency.
//!
//! The crate is split along those physical layers:
//!
//! - [`params`]: material constants + sphere geometry -> collective coupling
//!   `g_m`, Kerr coefficient `K`, magnon frequency `ω_m`, anisotropy
//!   coefficients `D_i`.
//! - [`steady`]: effective detuning/damping, the steady-state cubic for the
//!   magnon frequency shift, switching points, critical powers, and the
//!   implicit threshold-detuning solve.
//! - [`oracle`]: an independent verification engine that integrates the
//!   mean-field equations of motion in the drive rotating frame and
//!   classifies fixed-point stability from the 4x4 Jacobian.
//! - [`sweep`]: ordered power / magnon-frequency sweeps with
//!   continuity-based branch tracking and switching detection.
//! - [`response`]: probe self-energy, `S21`, and 2D transmission maps.
//! - [`config`] / [`output`]: TOML run configuration and CSV/JSON writers
//!   used by the `kerrmag` binary.
//!
//! # Unit conventions
//!
//! All frequencies, detunings, rates, and the Kerr coefficient in the public
//! API are *linear* frequencies in Hz (`ν = ω/2π`). Every steady-state and
//! response formula is homogeneous in frequency, so the convention is
//! self-consistent as long as the drive-coupling constant `c` is the
//! linear-frequency one (MHz³/mW); see [`steady::DriveConfig`]. The
//! time-domain oracle converts to angular units (rad/s) internally and its
//! Jacobian eigenvalues are reported in rad/s.

pub mod config;
pub mod cubic;
pub mod error;
pub mod oracle;
pub mod output;
pub mod params;
pub mod response;
pub mod steady;
pub mod sweep;

pub use error::Error;
pub use params::{derive_all, CrystalAxis, DerivedMagnonParams, MaterialAndGeometry};
pub use steady::{
    bistability_analysis, effective_params, rabi_from_power, solve_steady, threshold_detuning,
    Branch, DriveConfig, DriveTarget, EffectiveParams, SteadyRoots, SteadySolution, SystemConfig,
};

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Conversion from the config-file drive coupling `c` (MHz³/mW) to Hz³/mW.
pub const MHZ3_PER_MW_TO_HZ3: f64 = 1e18;
