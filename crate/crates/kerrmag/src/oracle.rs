//! Brute-force verification engine for the steady-state solver.
//!
//! Integrates the drive-only mean-field equations of motion in the frame
//! rotating at the drive frequency, where fixed points are genuine
//! equilibria:
//!
//! ```text
//! dA/dt = −i(δ_c − iκ_c) A − i g_m B − i Ω_d [cavity pumped]
//! dB/dt = −i(δ_m + 2K|B|² − iγ_m) B − i g_m A − i Ω_d [sphere pumped]
//! ```
//!
//! with every rate converted to angular units (2π × linear frequency) and
//! time in seconds. Input noise has zero mean and is dropped; the
//! integration is a deterministic fixed-step classical fourth-order scheme,
//! with the step tied to the fastest rate in the problem for
//! reproducibility. Steady-state detection uses the scale-free residual
//! `‖rhs‖ / (ω_char (1 + ‖state‖))`, so it behaves identically across drive
//! powers. Non-convergence within `max_time` is a reported outcome, not an
//! error; only divergence (norm above 1e12) fails.
//!
//! Stability of a fixed point comes from the 4x4 real Jacobian in
//! (Re A, Im A, Re B, Im B), including the `∂(2K|B|²B)/∂B` terms.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::steady::{self, DriveConfig, DriveTarget, SystemConfig};

const TWO_PI: f64 = std::f64::consts::TAU;

/// Norm bound beyond which the integration is declared divergent.
const DIVERGENCE_NORM: f64 = 1e12;

/// Residual bound below which a state qualifies as a fixed point for
/// [`stability_of`].
pub const FIXED_POINT_RESIDUAL: f64 = 1e-8;

/// Mean-field amplitudes of the two modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldState {
    pub cavity: Complex64,
    pub magnon: Complex64,
}

impl MeanFieldState {
    pub const ZERO: Self = Self {
        cavity: Complex64::new(0.0, 0.0),
        magnon: Complex64::new(0.0, 0.0),
    };

    pub fn norm(&self) -> f64 {
        (self.cavity.norm_sqr() + self.magnon.norm_sqr()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.cavity.re.is_finite()
            && self.cavity.im.is_finite()
            && self.magnon.re.is_finite()
            && self.magnon.im.is_finite()
    }

    fn distance(&self, other: &Self) -> f64 {
        ((self.cavity - other.cavity).norm_sqr() + (self.magnon - other.magnon).norm_sqr()).sqrt()
    }
}

/// Fixed-step integration controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    /// Step size (s).
    pub step: f64,
    /// Integration horizon (s).
    pub max_time: f64,
    /// Scale-free residual below which the state counts as steady.
    pub steady_tolerance: f64,
    /// Relative size of perturbations applied by the verification suite.
    pub perturbation_scale: f64,
}

impl IntegrationConfig {
    /// Step and horizon derived from the system rates: step = 0.01/ω_max and
    /// a horizon of 400 slow-decay times.
    pub fn auto(sys: &SystemConfig, drive: &DriveConfig) -> Self {
        let omega_max = char_angular_rate(sys, drive);
        let slow = TWO_PI * sys.gamma_m.min(sys.kappa_c()).max(f64::MIN_POSITIVE);
        Self {
            step: 0.01 / omega_max,
            max_time: 400.0 / slow,
            steady_tolerance: 1e-9,
            perturbation_scale: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !self.step.is_finite() || !self.max_time.is_finite() || self.step <= 0.0 || self.max_time <= self.step {
            return Err(Error::InvalidInput(format!(
                "integration needs 0 < step < max_time (step={}, max_time={})",
                self.step, self.max_time
            )));
        }
        if !(self.steady_tolerance > 0.0 && self.steady_tolerance < 1.0)
            || !(self.perturbation_scale > 0.0 && self.perturbation_scale < 1.0)
        {
            return Err(Error::InvalidInput(
                "tolerances must lie strictly inside (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Fastest angular rate in the problem, used for the step size and for
/// normalizing residuals and Jacobians.
fn char_angular_rate(sys: &SystemConfig, drive: &DriveConfig) -> f64 {
    let eff = steady::effective_params(sys, drive);
    // bound on the steady Kerr shift: |Δ_m| <= |q|^(1/3) when above scale
    let q = (drive.power_coupling_hz3() * drive.power).abs();
    let rate = sys
        .kappa_c()
        .max(sys.gamma_m)
        .max(sys.g_m)
        .max(eff.delta_c.abs())
        .max(eff.delta_m.abs())
        .max(eff.delta_m_eff.abs())
        .max(eff.gamma_m_eff)
        .max(q.cbrt())
        .max(1.0);
    TWO_PI * rate
}

/// Right-hand side of the rotating-frame equations of motion (per second).
///
/// The probe tone is a strict perturbation and never enters the drive-frame
/// amplitudes; the oracle therefore integrates drive-only dynamics.
pub fn mean_field_rhs(
    state: &MeanFieldState,
    sys: &SystemConfig,
    drive: &DriveConfig,
) -> MeanFieldState {
    let eff = steady::effective_params(sys, drive);
    let rabi = rabi_or_zero(sys, drive);
    rhs_inner(state, sys, &eff, rabi, drive.target)
}

fn rabi_or_zero(sys: &SystemConfig, drive: &DriveConfig) -> f64 {
    steady::rabi_from_power(drive, sys.kerr).unwrap_or(0.0)
}

fn rhs_inner(
    state: &MeanFieldState,
    sys: &SystemConfig,
    eff: &steady::EffectiveParams,
    rabi: f64,
    target: DriveTarget,
) -> MeanFieldState {
    let i = Complex64::i();
    let cavity_pole = TWO_PI * Complex64::new(eff.delta_c, -sys.kappa_c());
    let shift = 2.0 * sys.kerr * state.magnon.norm_sqr();
    let magnon_pole = TWO_PI * Complex64::new(eff.delta_m + shift, -sys.gamma_m);
    let g = TWO_PI * sys.g_m;
    let omega = TWO_PI * rabi;
    let (drive_a, drive_b) = match target {
        DriveTarget::Cavity => (omega, 0.0),
        DriveTarget::Yig => (0.0, omega),
    };
    MeanFieldState {
        cavity: -i * (cavity_pole * state.cavity + g * state.magnon + drive_a),
        magnon: -i * (magnon_pole * state.magnon + g * state.cavity + drive_b),
    }
}

/// Scale-free fixed-point residual `‖rhs‖ / (ω_char (1 + ‖state‖))`.
pub fn normalized_residual(state: &MeanFieldState, sys: &SystemConfig, drive: &DriveConfig) -> f64 {
    mean_field_rhs(state, sys, drive).norm()
        / (char_angular_rate(sys, drive) * (1.0 + state.norm()))
}

/// Outcome of a relaxation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Relaxation {
    pub state: MeanFieldState,
    /// True when the residual dropped below the steady tolerance; false on a
    /// timeout (e.g. a limit cycle), which is a legitimate finding.
    pub converged: bool,
    /// Integrated time (s).
    pub elapsed: f64,
    pub steps: u64,
    /// Final scale-free residual.
    pub residual: f64,
}

/// One classical fourth-order step.
fn rk4_step(
    state: &MeanFieldState,
    h: f64,
    sys: &SystemConfig,
    eff: &steady::EffectiveParams,
    rabi: f64,
    target: DriveTarget,
) -> MeanFieldState {
    let f = |s: &MeanFieldState| rhs_inner(s, sys, eff, rabi, target);
    let k1 = f(state);
    let k2 = f(&MeanFieldState {
        cavity: state.cavity + 0.5 * h * k1.cavity,
        magnon: state.magnon + 0.5 * h * k1.magnon,
    });
    let k3 = f(&MeanFieldState {
        cavity: state.cavity + 0.5 * h * k2.cavity,
        magnon: state.magnon + 0.5 * h * k2.magnon,
    });
    let k4 = f(&MeanFieldState {
        cavity: state.cavity + h * k3.cavity,
        magnon: state.magnon + h * k3.magnon,
    });
    MeanFieldState {
        cavity: state.cavity + h / 6.0 * (k1.cavity + 2.0 * k2.cavity + 2.0 * k3.cavity + k4.cavity),
        magnon: state.magnon + h / 6.0 * (k1.magnon + 2.0 * k2.magnon + 2.0 * k3.magnon + k4.magnon),
    }
}

/// Integrates until the scale-free residual drops below `cfg.steady_tolerance`
/// or `cfg.max_time` elapses.
pub fn relax_to_steady(
    initial: MeanFieldState,
    sys: &SystemConfig,
    drive: &DriveConfig,
    cfg: &IntegrationConfig,
) -> Result<Relaxation, Error> {
    relax_impl(initial, sys, drive, cfg, 0, |_, _| {})
}

/// Sampled point of a relaxation trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub time: f64,
    pub state: MeanFieldState,
}

/// Like [`relax_to_steady`], recording every `stride`-th state.
pub fn relax_traced(
    initial: MeanFieldState,
    sys: &SystemConfig,
    drive: &DriveConfig,
    cfg: &IntegrationConfig,
    stride: u64,
) -> Result<(Relaxation, Vec<TrajectoryPoint>), Error> {
    let mut points = Vec::new();
    let relax = relax_impl(initial, sys, drive, cfg, stride, |time, state| {
        points.push(TrajectoryPoint {
            time,
            state: *state,
        })
    })?;
    Ok((relax, points))
}

fn relax_impl(
    initial: MeanFieldState,
    sys: &SystemConfig,
    drive: &DriveConfig,
    cfg: &IntegrationConfig,
    stride: u64,
    mut on_sample: impl FnMut(f64, &MeanFieldState),
) -> Result<Relaxation, Error> {
    sys.validate()?;
    cfg.validate()?;
    let eff = steady::effective_params(sys, drive);
    let rabi = steady::rabi_from_power(drive, sys.kerr)?;
    let omega_char = char_angular_rate(sys, drive);
    let residual_of = |s: &MeanFieldState| {
        rhs_inner(s, sys, &eff, rabi, drive.target).norm() / (omega_char * (1.0 + s.norm()))
    };

    let mut state = initial;
    let mut time = 0.0;
    let mut steps: u64 = 0;
    let mut residual = residual_of(&state);
    if stride > 0 {
        on_sample(time, &state);
    }
    if residual < cfg.steady_tolerance {
        return Ok(Relaxation {
            state,
            converged: true,
            elapsed: time,
            steps,
            residual,
        });
    }
    const CHECK_STRIDE: u64 = 64;
    while time < cfg.max_time {
        state = rk4_step(&state, cfg.step, sys, &eff, rabi, drive.target);
        time += cfg.step;
        steps += 1;
        if stride > 0 && steps.is_multiple_of(stride) {
            on_sample(time, &state);
        }
        if !state.is_finite() || state.norm() > DIVERGENCE_NORM {
            return Err(Error::Divergence(format!(
                "norm {:.3e} after {steps} steps (t = {time:.3e} s) with drive {:?} at P = {} mW",
                state.norm(),
                drive.target,
                drive.power
            )));
        }
        if steps.is_multiple_of(CHECK_STRIDE) {
            residual = residual_of(&state);
            if residual < cfg.steady_tolerance {
                return Ok(Relaxation {
                    state,
                    converged: true,
                    elapsed: time,
                    steps,
                    residual,
                });
            }
        }
    }
    residual = residual_of(&state);
    Ok(Relaxation {
        state,
        converged: residual < cfg.steady_tolerance,
        elapsed: time,
        steps,
        residual,
    })
}

/// 4x4 real Jacobian of the rotating-frame flow at `state`, in the basis
/// (Re A, Im A, Re B, Im B), entries in rad/s.
pub fn jacobian(state: &MeanFieldState, sys: &SystemConfig, drive: &DriveConfig) -> Matrix4<f64> {
    let eff = steady::effective_params(sys, drive);
    let dc = TWO_PI * eff.delta_c;
    let kc = TWO_PI * sys.kappa_c();
    let dm = TWO_PI * eff.delta_m;
    let gam = TWO_PI * sys.gamma_m;
    let g = TWO_PI * sys.g_m;
    let kerr = TWO_PI * sys.kerr;
    let (br, bi) = (state.magnon.re, state.magnon.im);
    let u = dm + 2.0 * kerr * (br * br + bi * bi);
    Matrix4::new(
        -kc, dc, 0.0, g, //
        -dc, -kc, -g, 0.0, //
        0.0, g, 4.0 * kerr * br * bi - gam, u + 4.0 * kerr * bi * bi, //
        -g, 0.0, -(u + 4.0 * kerr * br * br), -4.0 * kerr * br * bi - gam,
    )
}

/// Stability classification of a fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// All Jacobian eigenvalues have negative real part.
    pub stable: bool,
    /// Eigenvalue real parts (rad/s), ascending.
    pub eigen_real_parts: [f64; 4],
}

/// Classifies a fixed point by the eigenvalues of the 4x4 Jacobian.
///
/// The state must satisfy the fixed-point residual bound; eigenvalues are
/// computed on the ω_char-normalized matrix and scaled back.
pub fn stability_of(
    state: &MeanFieldState,
    sys: &SystemConfig,
    drive: &DriveConfig,
) -> Result<StabilityReport, Error> {
    let residual = normalized_residual(state, sys, drive);
    if residual.is_nan() || residual >= FIXED_POINT_RESIDUAL {
        return Err(Error::InvalidFixedPoint {
            residual,
            bound: FIXED_POINT_RESIDUAL,
        });
    }
    let omega_char = char_angular_rate(sys, drive);
    let normalized = jacobian(state, sys, drive) / omega_char;
    let eigen = normalized.complex_eigenvalues();
    let mut real_parts = [0.0; 4];
    for (slot, ev) in real_parts.iter_mut().zip(eigen.iter()) {
        *slot = ev.re * omega_char;
    }
    real_parts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(StabilityReport {
        stable: real_parts.iter().all(|re| *re < 0.0),
        eigen_real_parts: real_parts,
    })
}

/// Outcome of the randomized solver-vs-integrator comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub samples: usize,
    /// Stable roots relaxed back from a perturbed start.
    pub stable_roots_checked: usize,
    /// max over stable roots of the relative state error after relaxation.
    pub max_relative_error: f64,
    /// Middle roots in three-root cases.
    pub middle_roots_checked: usize,
    /// Middle roots classified unstable by the Jacobian.
    pub middle_unstable: usize,
    /// Middle roots whose perturbed trajectory escaped the fixed point.
    pub middle_escaped: usize,
    /// Per-case failure descriptions (empty on success).
    pub failures: Vec<String>,
}

impl EquivalenceReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn perturbed(state: &MeanFieldState, scale: f64, rng: &mut impl Rng) -> MeanFieldState {
    let mag = scale * state.norm().max(1.0);
    let phase_a = rng.gen_range(0.0..TWO_PI);
    let phase_b = rng.gen_range(0.0..TWO_PI);
    MeanFieldState {
        cavity: state.cavity + mag * Complex64::from_polar(1.0, phase_a),
        magnon: state.magnon + mag * Complex64::from_polar(1.0, phase_b),
    }
}

/// Randomized verification: jitter the base configuration (both drive
/// targets, both Kerr signs, ±50% parameter spreads), then check that every
/// stable cubic root is dynamically reached to 1e-6 relative and every
/// middle root is unstable and escapes a 1e-6 perturbation.
pub fn equivalence_suite(
    base_sys: &SystemConfig,
    base_drive: &DriveConfig,
    samples: usize,
    seed: u64,
) -> Result<EquivalenceReport, Error> {
    base_sys.validate()?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut report = EquivalenceReport {
        samples,
        stable_roots_checked: 0,
        max_relative_error: 0.0,
        middle_roots_checked: 0,
        middle_unstable: 0,
        middle_escaped: 0,
        failures: Vec::new(),
    };

    for case in 0..samples {
        let mut jitter = |x: f64| x * rng.gen_range(0.5..1.5);
        let negative_kerr = case % 2 == 1;
        let target = if (case / 2) % 2 == 0 {
            DriveTarget::Yig
        } else {
            DriveTarget::Cavity
        };
        let dispersive = (case / 4) % 2 == 1;

        let g_m = jitter(base_sys.g_m);
        let mut sys = SystemConfig {
            kappa_in: jitter(base_sys.kappa_in),
            kappa_out: jitter(base_sys.kappa_out),
            kappa_int: jitter(base_sys.kappa_int),
            gamma_m: jitter(base_sys.gamma_m),
            g_m,
            kerr: jitter(base_sys.kerr.abs()),
            macrospin: None,
            ..base_sys.clone()
        };
        // detuning families around the bistable regimes of each sign
        let delta = if dispersive { 3.0 * g_m } else { 0.0 };
        let delta_m_scale = if dispersive { 0.225 } else { 0.905 };
        let mut delta_m = delta_m_scale * g_m * rng.gen_range(0.9..1.1);
        let mut c = base_drive.power_coupling.abs() * rng.gen_range(0.5..1.5);
        if negative_kerr {
            sys.kerr = -sys.kerr;
            c = -c;
            delta_m = -delta_m;
        }
        sys.omega_c = sys.omega_m + delta;
        let mut drive = DriveConfig {
            target,
            omega_d: sys.omega_m - delta_m,
            power: 0.0,
            power_coupling: c,
        };
        let eff = steady::effective_params(&sys, &drive);
        let analysis = steady::bistability_analysis(&eff, &sys, &drive);
        let c_eff_hz3 = match target {
            DriveTarget::Yig => drive.power_coupling_hz3(),
            DriveTarget::Cavity => eff.eta * drive.power_coupling_hz3(),
        };
        drive.power = match analysis.switching_shifts {
            Some((s1, s2)) => {
                // strictly inside the window, away from the folds
                let p1 = crate::cubic::resubstitute(eff.delta_m_eff, eff.gamma_m_eff, s2)
                    / c_eff_hz3;
                let p2 = crate::cubic::resubstitute(eff.delta_m_eff, eff.gamma_m_eff, s1)
                    / c_eff_hz3;
                let (lo, hi) = (p1.min(p2), p1.max(p2));
                if hi - lo < 0.02 * hi {
                    // near-threshold window: critically slow dynamics, test
                    // the single-root regime instead
                    hi * rng.gen_range(1.5..3.0)
                } else {
                    lo + (hi - lo) * rng.gen_range(0.3..0.7)
                }
            }
            None => analysis.critical_power.unwrap_or(50.0) * rng.gen_range(0.2..2.0),
        };

        let label = format!(
            "case {case} ({:?}, K {} 0, P = {:.3} mW)",
            target,
            if negative_kerr { "<" } else { ">" },
            drive.power
        );
        let roots = match steady::solve_steady(&sys, &drive) {
            Ok(r) => r,
            Err(e) => {
                report.failures.push(format!("{label}: solve failed: {e}"));
                continue;
            }
        };
        let base_cfg = IntegrationConfig::auto(&sys, &drive);
        let omega_char = char_angular_rate(&sys, &drive);
        let fixed: Vec<MeanFieldState> = roots
            .solutions
            .iter()
            .map(|s| MeanFieldState {
                cavity: s.cavity_amp,
                magnon: s.magnon_amp,
            })
            .collect();
        let stabilities: Vec<StabilityReport> = match fixed
            .iter()
            .map(|fp| stability_of(fp, &sys, &drive))
            .collect::<Result<_, _>>()
        {
            Ok(v) => v,
            Err(e) => {
                report.failures.push(format!("{label}: stability failed: {e}"));
                continue;
            }
        };
        // slowest contraction rate over the stable roots sets the horizon
        let slow_rate = stabilities
            .iter()
            .zip(&roots.solutions)
            .filter(|(_, s)| s.stable)
            .map(|(st, _)| -st.eigen_real_parts[3])
            .fold(f64::INFINITY, f64::min);
        // residual-to-state-error ratio scales like ω_char/λ_slow
        let tuned = |rate: f64| {
            let mut cfg = base_cfg;
            cfg.max_time = base_cfg.max_time.max((60.0 / rate).min(1e-3));
            cfg.steady_tolerance = (3e-7 * rate / omega_char).clamp(1e-12, 1e-9);
            cfg
        };

        for ((sol, fp), stab) in roots.solutions.iter().zip(&fixed).zip(&stabilities) {
            if sol.stable {
                report.stable_roots_checked += 1;
                let cfg = tuned(-stab.eigen_real_parts[3]);
                let start = perturbed(fp, cfg.perturbation_scale, &mut rng);
                match relax_to_steady(start, &sys, &drive, &cfg) {
                    Ok(r) => {
                        let rel = r.state.distance(fp) / fp.norm().max(1.0);
                        report.max_relative_error = report.max_relative_error.max(rel);
                        if !r.converged || rel > 1e-6 {
                            report.failures.push(format!(
                                "{label}: stable root {:.4e} Hz reproduced to {rel:.2e} \
                                 (converged = {})",
                                sol.shift, r.converged
                            ));
                        }
                    }
                    Err(e) => report.failures.push(format!("{label}: relax failed: {e}")),
                }
            } else if roots.solutions.len() == 3 && sol.branch == steady::Branch::Middle {
                report.middle_roots_checked += 1;
                if !stab.stable {
                    report.middle_unstable += 1;
                } else {
                    report
                        .failures
                        .push(format!("{label}: middle root classified stable"));
                    continue;
                }
                // escape needs growth through ~9 e-folds plus capture
                let growth = stab.eigen_real_parts[3];
                let cfg = tuned(growth.min(slow_rate));
                let start = perturbed(fp, 1e-6, &mut rng);
                let initial_dist = start.distance(fp);
                match relax_to_steady(start, &sys, &drive, &cfg) {
                    Ok(r) => {
                        let escaped = r.state.distance(fp) > 1e3 * initial_dist;
                        let back = r.converged && r.state.distance(fp) < 10.0 * initial_dist;
                        if escaped && !back {
                            report.middle_escaped += 1;
                        } else {
                            report.failures.push(format!(
                                "{label}: middle root did not escape (dist ratio {:.2e})",
                                r.state.distance(fp) / initial_dist
                            ));
                        }
                    }
                    Err(e) => report.failures.push(format!("{label}: escape run failed: {e}")),
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn system() -> SystemConfig {
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

    fn drive(power: f64) -> DriveConfig {
        DriveConfig {
            target: DriveTarget::Yig,
            omega_d: 10.0e9 - 36.2e6,
            power,
            power_coupling: 2.0,
        }
    }

    #[test]
    fn undriven_vacuum_is_a_fixed_point() {
        let rhs = mean_field_rhs(&MeanFieldState::ZERO, &system(), &drive(0.0));
        assert_eq!(rhs.cavity, Complex64::new(0.0, 0.0));
        assert_eq!(rhs.magnon, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn steady_solutions_are_fixed_points() {
        let sys = system();
        let d = drive(69.5);
        let roots = steady::solve_steady(&sys, &d).unwrap();
        assert_eq!(roots.solutions.len(), 3);
        for sol in &roots.solutions {
            let state = MeanFieldState {
                cavity: sol.cavity_amp,
                magnon: sol.magnon_amp,
            };
            assert!(
                normalized_residual(&state, &sys, &d) < 1e-12,
                "root {} is not a fixed point",
                sol.shift
            );
        }
    }

    #[test]
    fn decoupled_linear_steady_state() {
        // g_m = 0, sphere pumped, K = 0: B* = −Ω_d/(δ_m − iγ_m)
        let mut sys = system();
        sys.g_m = 0.0;
        sys.kerr = 0.0;
        let rabi = 5.0e6;
        let d = DriveConfig {
            target: DriveTarget::Yig,
            omega_d: sys.omega_m - 12.0e6,
            power: 0.0,
            power_coupling: 0.0,
        };
        let delta_m = 12.0e6;
        let expected = -Complex64::new(rabi, 0.0) / Complex64::new(delta_m, -sys.gamma_m);
        let state = MeanFieldState {
            cavity: Complex64::new(0.0, 0.0),
            magnon: expected,
        };
        // rhs at the closed-form point must vanish; build it manually since
        // the drive amplitude cannot come from the power calibration at K=0.
        let eff = steady::effective_params(&sys, &d);
        let rhs = rhs_inner(&state, &sys, &eff, rabi, DriveTarget::Yig);
        assert!(rhs.norm() < 1e-8 * TWO_PI * rabi);
    }

    #[test]
    fn relax_reaches_the_unique_root_below_the_window() {
        let sys = system();
        let d = drive(40.0);
        let roots = steady::solve_steady(&sys, &d).unwrap();
        assert_eq!(roots.solutions.len(), 1);
        let cfg = IntegrationConfig::auto(&sys, &d);
        let relax = relax_to_steady(MeanFieldState::ZERO, &sys, &d, &cfg).unwrap();
        assert!(relax.converged);
        let target = MeanFieldState {
            cavity: roots.solutions[0].cavity_amp,
            magnon: roots.solutions[0].magnon_amp,
        };
        assert!(relax.state.distance(&target) / target.norm() < 1e-6);
    }

    #[test]
    fn vacuum_stability_eigenvalues() {
        // P = 0: eigenvalue real parts are {−κ_c, −κ_c, −γ_m, −γ_m} (angular)
        let sys = system();
        let d = drive(0.0);
        let report = stability_of(&MeanFieldState::ZERO, &sys, &d).unwrap();
        assert!(report.stable);
        for re in report.eigen_real_parts {
            assert_relative_eq!(re, -TWO_PI * 2.0e6, max_relative = 1e-9);
        }
    }

    #[test]
    fn middle_root_is_a_saddle() {
        let sys = system();
        let d = drive(69.5);
        let roots = steady::solve_steady(&sys, &d).unwrap();
        let states: Vec<MeanFieldState> = roots
            .solutions
            .iter()
            .map(|s| MeanFieldState {
                cavity: s.cavity_amp,
                magnon: s.magnon_amp,
            })
            .collect();
        let mid = stability_of(&states[1], &sys, &d).unwrap();
        assert!(!mid.stable);
        assert_eq!(
            mid.eigen_real_parts.iter().filter(|re| **re > 0.0).count(),
            1
        );
        for idx in [0, 2] {
            assert!(stability_of(&states[idx], &sys, &d).unwrap().stable);
        }
    }

    #[test]
    fn single_root_at_large_power_is_stable() {
        let sys = system();
        let d = drive(200.0);
        let roots = steady::solve_steady(&sys, &d).unwrap();
        assert_eq!(roots.solutions.len(), 1);
        assert!(roots.solutions[0].stable);
    }

    #[test]
    fn non_fixed_point_rejected() {
        let sys = system();
        let d = drive(69.5);
        let junk = MeanFieldState {
            cavity: Complex64::new(1e6, 0.0),
            magnon: Complex64::new(0.0, 1e6),
        };
        assert!(matches!(
            stability_of(&junk, &sys, &d),
            Err(Error::InvalidFixedPoint { .. })
        ));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let sys = system();
        let d = drive(69.5);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let state = MeanFieldState {
                cavity: Complex64::new(
                    rng.gen_range(-1.0..1.0) * 1e8,
                    rng.gen_range(-1.0..1.0) * 1e8,
                ),
                magnon: Complex64::new(
                    rng.gen_range(-1.0..1.0) * 1e8,
                    rng.gen_range(-1.0..1.0) * 1e8,
                ),
            };
            let jac = jacobian(&state, &sys, &d);
            let scale = jac.abs().max();
            let mut coords = [
                state.cavity.re,
                state.cavity.im,
                state.magnon.re,
                state.magnon.im,
            ];
            for col in 0..4 {
                let h = 5e-6 * (1.0 + coords[col].abs());
                let orig = coords[col];
                coords[col] = orig + h;
                let fp = rhs_vec(&coords, &sys, &d);
                coords[col] = orig - h;
                let fm = rhs_vec(&coords, &sys, &d);
                coords[col] = orig;
                for row in 0..4 {
                    let fd = (fp[row] - fm[row]) / (2.0 * h);
                    // componentwise relative, with a floor for near-zero entries
                    let denom = jac[(row, col)].abs().max(1e-4 * scale);
                    assert!(
                        (fd - jac[(row, col)]).abs() / denom < 1e-6,
                        "J[{row}][{col}] fd={fd:.6e} analytic={:.6e}",
                        jac[(row, col)]
                    );
                }
            }
        }
    }

    fn rhs_vec(coords: &[f64; 4], sys: &SystemConfig, d: &DriveConfig) -> [f64; 4] {
        let state = MeanFieldState {
            cavity: Complex64::new(coords[0], coords[1]),
            magnon: Complex64::new(coords[2], coords[3]),
        };
        let rhs = mean_field_rhs(&state, sys, d);
        [rhs.cavity.re, rhs.cavity.im, rhs.magnon.re, rhs.magnon.im]
    }

    #[test]
    fn basin_grid_reaches_only_stable_roots() {
        // documented grid of initial conditions: vacuum, each root scaled by
        // {0.5, 1.1}, and each root phase-rotated by 90 degrees
        let sys = system();
        let d = drive(69.5);
        let roots = steady::solve_steady(&sys, &d).unwrap();
        let stable: Vec<MeanFieldState> = roots
            .solutions
            .iter()
            .filter(|s| s.stable)
            .map(|s| MeanFieldState {
                cavity: s.cavity_amp,
                magnon: s.magnon_amp,
            })
            .collect();
        let cfg = IntegrationConfig::auto(&sys, &d);
        let mut starts = vec![MeanFieldState::ZERO];
        for s in &roots.solutions {
            for f in [0.5, 1.1] {
                starts.push(MeanFieldState {
                    cavity: f * s.cavity_amp,
                    magnon: f * s.magnon_amp,
                });
            }
            starts.push(MeanFieldState {
                cavity: Complex64::i() * s.cavity_amp,
                magnon: Complex64::i() * s.magnon_amp,
            });
        }
        for (i, start) in starts.into_iter().enumerate() {
            let r = relax_to_steady(start, &sys, &d, &cfg).unwrap();
            if r.converged {
                let nearest = stable
                    .iter()
                    .map(|fp| r.state.distance(fp) / fp.norm().max(1.0))
                    .fold(f64::INFINITY, f64::min);
                assert!(nearest < 1e-5, "start {i} ended {nearest:.2e} from any stable root");
            }
        }
    }

    #[test]
    fn frame_consistency_time_average() {
        // at steady state the rotating-frame |B(t)|² is constant and equals |B0|²
        let sys = system();
        let d = drive(40.0);
        let roots = steady::solve_steady(&sys, &d).unwrap();
        let b0 = roots.solutions[0].magnon_amp;
        let start = MeanFieldState {
            cavity: roots.solutions[0].cavity_amp,
            magnon: b0,
        };
        // unreachable tolerance forces a full trace across the horizon
        let mut cfg = IntegrationConfig::auto(&sys, &d);
        cfg.steady_tolerance = 1e-300;
        cfg.max_time = 4000.0 * cfg.step;
        let (_, points) = relax_traced(start, &sys, &d, &cfg, 16).unwrap();
        assert!(points.len() > 100);
        let avg: f64 = points.iter().map(|p| p.state.magnon.norm_sqr()).sum::<f64>()
            / points.len() as f64;
        assert_relative_eq!(avg, b0.norm_sqr(), max_relative = 1e-6);
    }

    #[test]
    fn equivalence_suite_smoke() {
        let report = equivalence_suite(&system(), &drive(0.0), 8, 17).unwrap();
        assert!(report.all_passed(), "failures: {:?}", report.failures);
        assert!(report.stable_roots_checked > 0);
    }
}
