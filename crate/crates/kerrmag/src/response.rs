//! Probe response and cavity transmission.
//!
//! A weak probe at ω_p sees the cavity dressed by the magnon through the
//! self-energy
//!
//! ```text
//! Σ(ω_p) = g_m² / (i(ω_m + Δ_m − ω_p) + γ_m),
//! S21(ω_p) = 2 sqrt(κ_i κ_o) / (i(ω_c − ω_p) + κ_c + Σ(ω_p)),
//! ```
//!
//! where Δ_m is the drive-induced Kerr shift. The probe coupling ε_p
//! cancels in S21 by construction, and the expression holds for both drive
//! targets. Transmission maps over (ω_p, ω_m) take each row's Δ_m from a
//! hysteresis sweep, so the map depends on the sweep direction wherever the
//! steady state is bistable.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::steady::{Branch, DriveConfig, SystemConfig};
use crate::sweep::{self, SweepAxis, SweepPlan};

/// Magnon self-energy Σ(ω_p) seen by the cavity (Hz).
pub fn self_energy(omega_p: f64, sys: &SystemConfig, shift: f64) -> Complex64 {
    let x = sys.omega_m + shift - omega_p;
    sys.g_m * sys.g_m / Complex64::new(sys.gamma_m, x)
}

/// Transmission coefficient S21(ω_p) at a given magnon shift.
pub fn s21_at(omega_p: f64, sys: &SystemConfig, shift: f64) -> Complex64 {
    let numerator = 2.0 * (sys.kappa_in * sys.kappa_out).sqrt();
    let denom = Complex64::new(sys.kappa_c(), sys.omega_c - omega_p) + self_energy(omega_p, sys, shift);
    numerator / denom
}

/// Probe-induced amplitudes and transmission at one probe frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeResponse {
    pub omega_p: f64,
    /// Probe coupling ε_p (Hz, nominal; cancels in S21).
    pub probe_amp: f64,
    /// Cavity response A1 (linear in ε_p).
    pub cavity_amp: Complex64,
    /// Magnon response B1 (linear in ε_p).
    pub magnon_amp: Complex64,
    pub s21: Complex64,
}

/// Full probe response at ω_p, including the amplitudes behind S21.
pub fn probe_response(
    omega_p: f64,
    sys: &SystemConfig,
    shift: f64,
    probe_amp: f64,
) -> ProbeResponse {
    let sigma = self_energy(omega_p, sys, shift);
    let denom = Complex64::new(sys.kappa_c(), sys.omega_c - omega_p) + sigma;
    let cavity_amp = -Complex64::i() * probe_amp / denom;
    // second steady-state probe equation: [(ω_m+Δ_m−ω_p) − iγ_m] B1 + g_m A1 = 0
    let magnon_amp = -sys.g_m * cavity_amp / Complex64::new(sys.omega_m + shift - omega_p, -sys.gamma_m);
    ProbeResponse {
        omega_p,
        probe_amp,
        cavity_amp,
        magnon_amp,
        s21: 2.0 * (sys.kappa_in * sys.kappa_out).sqrt() / denom,
    }
}

/// Drive-tone component of the output field, sqrt(2 κ_o) A0. It rides at
/// ω_d and is excluded from S21; exposed as a diagnostic.
pub fn drive_tone_output(sys: &SystemConfig, cavity_amp0: Complex64) -> Complex64 {
    (2.0 * sys.kappa_out).sqrt() * cavity_amp0
}

/// |S21| map over probe frequency (columns) and magnon frequency (rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumGrid {
    /// Probe frequencies (Hz), ascending.
    pub omega_p: Vec<f64>,
    /// Magnon frequencies (Hz) in sweep order.
    pub omega_m: Vec<f64>,
    /// |S21|, indexed [row = ω_m][col = ω_p].
    pub magnitude: Vec<Vec<f64>>,
    /// arg S21 (rad), same indexing.
    pub phase: Vec<Vec<f64>>,
    /// Kerr shift used for each row (Hz).
    pub shifts: Vec<f64>,
    /// Branch that fed each row.
    pub branches: Vec<Branch>,
    /// True when the rows came from an ascending ω_m sweep.
    pub ascending: bool,
}

/// Builds the transmission map, tracking branches along the requested sweep
/// direction (`ascending = false` sweeps ω_m downward).
///
/// The Δ_m sequence is produced sequentially (hysteresis is order
/// dependent); rows are then independent evaluations of S21.
pub fn spectrum_map(
    sys: &SystemConfig,
    drive: &DriveConfig,
    probe_grid: &[f64],
    omega_m_grid: &[f64],
    ascending: bool,
) -> Result<SpectrumGrid, Error> {
    if probe_grid.is_empty() {
        return Err(Error::InvalidInput("probe grid must be nonempty".into()));
    }
    if probe_grid.windows(2).any(|w| w[0] >= w[1] || w[0].is_nan() || w[1].is_nan()) {
        return Err(Error::InvalidInput(
            "probe grid must be strictly ascending".into(),
        ));
    }
    let plan = SweepPlan {
        axis: SweepAxis::MagnonFrequency,
        values: omega_m_grid.to_vec(),
        direction: if ascending {
            sweep::SweepDirection::Up
        } else {
            sweep::SweepDirection::Down
        },
        sys: sys.clone(),
        drive: drive.clone(),
    };
    let result = sweep::hysteresis_sweep(&plan)?;
    let trace = if ascending {
        result.up.unwrap()
    } else {
        result.down.unwrap()
    };

    // the Δ_m sequence above is order-dependent; the rows are independent
    let rows: Vec<(Vec<f64>, Vec<f64>)> = trace
        .samples
        .par_iter()
        .map(|sample| {
            let mut sys_row = sys.clone();
            sys_row.omega_m = sample.axis_value;
            let mut mag_row = Vec::with_capacity(probe_grid.len());
            let mut phase_row = Vec::with_capacity(probe_grid.len());
            for &omega_p in probe_grid {
                let s21 = s21_at(omega_p, &sys_row, sample.shift);
                mag_row.push(s21.norm());
                phase_row.push(s21.arg());
            }
            (mag_row, phase_row)
        })
        .collect();
    let (magnitude, phase) = rows.into_iter().unzip();
    Ok(SpectrumGrid {
        omega_p: probe_grid.to_vec(),
        omega_m: trace.samples.iter().map(|s| s.axis_value).collect(),
        magnitude,
        phase,
        shifts: trace.samples.iter().map(|s| s.shift).collect(),
        branches: trace.samples.iter().map(|s| s.branch).collect(),
        ascending,
    })
}

/// A local maximum refined by quadratic interpolation through the three
/// surrounding grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub position: f64,
    pub height: f64,
}

/// Interior local maxima of `ys` over `xs`, sub-bin refined. Endpoints are
/// never reported as peaks.
pub fn find_peaks(xs: &[f64], ys: &[f64]) -> Vec<Peak> {
    assert_eq!(xs.len(), ys.len());
    let mut peaks = Vec::new();
    for i in 1..ys.len().saturating_sub(1) {
        if ys[i] > ys[i - 1] && ys[i] >= ys[i + 1] {
            let denom = ys[i - 1] - 2.0 * ys[i] + ys[i + 1];
            let (position, height) = if denom.abs() > 0.0 {
                let frac = 0.5 * (ys[i - 1] - ys[i + 1]) / denom;
                let step = 0.5 * (xs[i + 1] - xs[i - 1]);
                (
                    xs[i] + frac * step,
                    ys[i] - 0.25 * (ys[i - 1] - ys[i + 1]) * frac,
                )
            } else {
                (xs[i], ys[i])
            };
            peaks.push(Peak { position, height });
        }
    }
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steady::DriveTarget;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn fig6_system() -> SystemConfig {
        SystemConfig {
            omega_c: 10.0e9,
            omega_m: 10.0e9,
            kappa_in: 0.7e6,
            kappa_out: 0.7e6,
            kappa_int: 0.6e6,
            gamma_m: 2.0e6,
            g_m: 40.0e6,
            kerr: 4.099e-9,
            macrospin: None,
        }
    }

    fn fig6_drive(power: f64) -> DriveConfig {
        DriveConfig {
            target: DriveTarget::Yig,
            omega_d: 10.0e9 - 35.0e6,
            power,
            power_coupling: 2.0,
        }
    }

    #[test]
    fn zero_coupling_zero_self_energy() {
        let mut sys = fig6_system();
        sys.g_m = 0.0;
        for k in -5..=5 {
            let sigma = self_energy(sys.omega_c + k as f64 * 10e6, &sys, 0.0);
            assert_eq!(sigma, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn self_energy_peaks_on_magnon_resonance() {
        let sys = fig6_system();
        let shift = 3.0e6;
        let sigma = self_energy(sys.omega_m + shift, &sys, shift);
        assert_abs_diff_eq!(sigma.im, 0.0);
        assert_relative_eq!(
            sigma.re,
            sys.g_m * sys.g_m / sys.gamma_m,
            max_relative = 1e-12
        );
    }

    #[test]
    fn drive_tone_scales_with_the_output_port() {
        let sys = fig6_system();
        let a0 = Complex64::new(3.0, -4.0);
        let tone = drive_tone_output(&sys, a0);
        assert_relative_eq!(
            tone.norm(),
            (2.0 * sys.kappa_out).sqrt() * 5.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn bare_cavity_peak() {
        let mut sys = fig6_system();
        sys.g_m = 0.0;
        assert_relative_eq!(s21_at(sys.omega_c, &sys, 0.0).norm(), 0.7, max_relative = 1e-12);
    }

    #[test]
    fn normal_mode_dip_and_peaks() {
        let sys = fig6_system();
        let dip = s21_at(sys.omega_c, &sys, 0.0).norm();
        assert_relative_eq!(dip, 1.7456359102244387e-3, max_relative = 1e-9);
        for sign in [-1.0, 1.0] {
            let peak = s21_at(sys.omega_c + sign * sys.g_m, &sys, 0.0).norm();
            assert_relative_eq!(peak, 0.3503277665772128, max_relative = 1e-9);
        }
    }

    #[test]
    fn branch_shift_moves_the_dip() {
        // the |S21| minimum near ω_m + Δ_m tracks Δ_m linearly
        let mut sys = fig6_system();
        sys.omega_m = sys.omega_c - 80.0e6; // isolate the magnon dip
        let dip_position = |shift: f64| {
            let xs: Vec<f64> = (0..8000)
                .map(|i| sys.omega_m - 10.0e6 + 2.5e3 * i as f64)
                .collect();
            let ys: Vec<f64> = xs.iter().map(|&w| s21_at(w, &sys, shift).norm()).collect();
            let min_idx = ys
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            xs[min_idx]
        };
        let base = dip_position(0.0);
        for shift in [2.0e6, 5.0e6, 9.0e6] {
            let moved = dip_position(shift) - base;
            assert!(
                (moved - shift).abs() < 0.05e6,
                "dip moved {moved} for shift {shift}"
            );
        }
    }

    #[test]
    fn probe_amplitudes_satisfy_the_coupled_equations() {
        let sys = fig6_system();
        let shift = 4.0e6;
        let eps = 1.3e3;
        for k in [-37, -3, 11, 40] {
            let omega_p = sys.omega_c + k as f64 * 1.0e6;
            let r = probe_response(omega_p, &sys, shift, eps);
            // [(ω_c−ω_p) − iκ_c] A1 + g_m B1 + ε_p = 0
            let lhs1 = Complex64::new(sys.omega_c - omega_p, -sys.kappa_c()) * r.cavity_amp
                + sys.g_m * r.magnon_amp
                + eps;
            assert!(lhs1.norm() < 1e-10 * eps);
            // [(ω_m+Δ_m−ω_p) − iγ_m] B1 + g_m A1 = 0
            let lhs2 = Complex64::new(sys.omega_m + shift - omega_p, -sys.gamma_m) * r.magnon_amp
                + sys.g_m * r.cavity_amp;
            assert!(lhs2.norm() < 1e-10 * eps);
        }
    }

    #[test]
    fn avoided_crossing_map_at_zero_power() {
        let sys = fig6_system();
        let probe: Vec<f64> = (0..=400).map(|i| 9.9e9 + 0.5e6 * i as f64).collect();
        let omega_m: Vec<f64> = (0..=40).map(|i| 9.95e9 + 2.5e6 * i as f64).collect();
        let grid = spectrum_map(&sys, &fig6_drive(0.0), &probe, &omega_m, true).unwrap();
        assert!(grid.shifts.iter().all(|s| *s == 0.0));
        // row at ω_m = ω_c: polariton peaks split by 2 g_m
        let row = omega_m.iter().position(|w| *w == 10.0e9).unwrap();
        let peaks = find_peaks(&grid.omega_p, &grid.magnitude[row]);
        assert_eq!(peaks.len(), 2);
        let split = peaks[1].position - peaks[0].position;
        assert!((split - 2.0 * sys.g_m).abs() <= 0.5e6, "split = {split}");
    }

    #[test]
    fn far_detuned_row_is_the_bare_lorentzian() {
        let mut sys = fig6_system();
        // the line pull g²/|ω_m−ω_c| must drop below κ_c·1e-3 for the
        // bare-cavity limit to hold on the Lorentzian slope
        sys.omega_m = sys.omega_c - 1.0e12;
        let probe: Vec<f64> = (0..=200).map(|i| 9.99e9 + 0.1e6 * i as f64).collect();
        for &omega_p in &probe {
            let with_magnon = s21_at(omega_p, &sys, 0.0).norm();
            let mut bare = sys.clone();
            bare.g_m = 0.0;
            let lorentzian = s21_at(omega_p, &bare, 0.0).norm();
            assert!((with_magnon - lorentzian).abs() < 1e-3);
        }
    }

    #[test]
    fn energy_bound_holds() {
        let sys = fig6_system();
        let bound = 2.0 * (sys.kappa_in * sys.kappa_out).sqrt() / sys.kappa_c();
        assert!(bound <= 1.0);
        for k in -200..=200 {
            let s = s21_at(sys.omega_c + k as f64 * 1.0e6, &sys, 3.0e6).norm();
            assert!(s <= bound + 1e-12);
        }
    }

    proptest! {
        #[test]
        fn s21_independent_of_probe_amplitude(
            eps1 in 1e-3f64..1e6,
            eps2 in 1e-3f64..1e6,
            k in -60i32..60,
        ) {
            let sys = fig6_system();
            let omega_p = sys.omega_c + k as f64 * 1.0e6;
            let a = probe_response(omega_p, &sys, 2.0e6, eps1);
            let b = probe_response(omega_p, &sys, 2.0e6, eps2);
            prop_assert_eq!(a.s21, b.s21);
            // amplitudes are linear in ε_p
            let ratio = b.cavity_amp / a.cavity_amp;
            prop_assert!((ratio.re - eps2 / eps1).abs() < 1e-9 * (eps2 / eps1));
            prop_assert!(ratio.im.abs() < 1e-12 * (eps2 / eps1));
        }
    }
}
