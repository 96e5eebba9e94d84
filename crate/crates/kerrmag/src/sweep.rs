//! Hysteresis engine: ordered sweeps with continuity-based branch tracking.
//!
//! A sweep walks an ordered list of drive powers or magnon frequencies,
//! solves the steady-state cubic at each sample, and tracks a branch by
//! picking the stable root closest to the previous sample's shift. The
//! first sample seeds from the stable root of smallest |Δ_m| (adiabatic
//! turn-on from zero drive). When the tracked branch ceases to exist past a
//! fold, the nearest remaining stable root is picked, which produces the
//! jump recorded as a switching. Ties break deterministically toward
//! smaller |Δ_m|, then smaller Δ_m, so re-running a plan is bit-identical.
//!
//! Grid resolution near the folds is the caller's responsibility: a
//! bistable window narrower than one grid step shows up as a direct
//! lower-to-upper jump (or as up/down traces that differ with no detected
//! switching) and the trace is flagged under-resolved instead of refined.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::steady::{self, Branch, DriveConfig, SteadySolution, SystemConfig};

/// Quantity swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Drive power (mW).
    Power,
    /// Magnon frequency ω_m/2π (Hz), e.g. via the bias field.
    MagnonFrequency,
}

impl SweepAxis {
    pub fn label(&self) -> &'static str {
        match self {
            SweepAxis::Power => "power_mw",
            SweepAxis::MagnonFrequency => "omega_m",
        }
    }
}

/// Sweep direction over the ascending value list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepDirection {
    Up,
    Down,
    Both,
}

/// An ordered sweep over one axis with fixed system/drive context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub axis: SweepAxis,
    /// Strictly ascending axis values (Hz or mW).
    pub values: Vec<f64>,
    pub direction: SweepDirection,
    pub sys: SystemConfig,
    pub drive: DriveConfig,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<(), Error> {
        self.sys.validate()?;
        if self.values.is_empty() {
            return Err(Error::InvalidInput("sweep needs at least one value".into()));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1] || w[0].is_nan() || w[1].is_nan()) {
            return Err(Error::InvalidInput(
                "sweep values must be strictly ascending".into(),
            ));
        }
        if !self.values.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("sweep values must be finite".into()));
        }
        if self.axis == SweepAxis::Power && self.values[0] < 0.0 {
            return Err(Error::InvalidInput("drive powers must be nonnegative".into()));
        }
        Ok(())
    }

    fn at(&self, value: f64) -> (SystemConfig, DriveConfig) {
        let mut sys = self.sys.clone();
        let mut drive = self.drive.clone();
        match self.axis {
            SweepAxis::Power => drive.power = value,
            SweepAxis::MagnonFrequency => sys.omega_m = value,
        }
        (sys, drive)
    }
}

/// One tracked sample of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    /// Axis value (Hz or mW).
    pub axis_value: f64,
    /// Tracked stable shift Δ_m (Hz).
    pub shift: f64,
    pub branch: Branch,
    /// Real-root count of the cubic at this sample.
    pub root_count: u8,
    /// How many of those roots are dynamically stable.
    pub stable_count: u8,
}

/// A detected fold jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchingRecord {
    /// Axis value of the first sample on the new branch.
    pub axis_value: f64,
    /// |Δ_m jump| across the switching (Hz).
    pub jump: f64,
    /// Tracked shift just before the jump (Hz).
    pub from_shift: f64,
    /// Tracked shift just after the jump (Hz).
    pub to_shift: f64,
}

/// One direction of a hysteresis sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HysteresisTrace {
    pub axis: SweepAxis,
    /// True for an up sweep (samples in ascending axis order).
    pub ascending: bool,
    pub samples: Vec<TraceSample>,
    pub switchings: Vec<SwitchingRecord>,
    /// Set when a jump occurred without a resolved three-root window, or
    /// when paired traces differ with no detected switching.
    pub under_resolved: bool,
}

/// Up and/or down traces of one plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub up: Option<HysteresisTrace>,
    pub down: Option<HysteresisTrace>,
}

/// Runs the plan in the requested direction(s).
pub fn hysteresis_sweep(plan: &SweepPlan) -> Result<SweepResult, Error> {
    plan.validate()?;
    let mut result = SweepResult {
        up: None,
        down: None,
    };
    if matches!(plan.direction, SweepDirection::Up | SweepDirection::Both) {
        result.up = Some(run_direction(plan, true)?);
    }
    if matches!(plan.direction, SweepDirection::Down | SweepDirection::Both) {
        result.down = Some(run_direction(plan, false)?);
    }
    if let (Some(up), Some(down)) = (&result.up, &result.down) {
        let differ = up
            .samples
            .iter()
            .zip(down.samples.iter().rev())
            .any(|(a, b)| a.shift != b.shift);
        if differ && (up.switchings.is_empty() || down.switchings.is_empty()) {
            if let Some(t) = result.up.as_mut() {
                t.under_resolved = true;
            }
            if let Some(t) = result.down.as_mut() {
                t.under_resolved = true;
            }
        }
    }
    Ok(result)
}

fn run_direction(plan: &SweepPlan, ascending: bool) -> Result<HysteresisTrace, Error> {
    let mut samples = Vec::with_capacity(plan.values.len());
    let mut prev_shift: Option<f64> = None;
    let iter: Box<dyn Iterator<Item = &f64>> = if ascending {
        Box::new(plan.values.iter())
    } else {
        Box::new(plan.values.iter().rev())
    };
    for &value in iter {
        let (sys, drive) = plan.at(value);
        let roots = steady::solve_steady(&sys, &drive)?;
        let stable: Vec<&SteadySolution> =
            roots.solutions.iter().filter(|s| s.stable).collect();
        if stable.is_empty() {
            return Err(Error::NoStableRoot {
                axis: plan.axis.label(),
                value,
                detail: format!(
                    "{} real roots, all classified unstable (near_fold = {})",
                    roots.solutions.len(),
                    roots.near_fold
                ),
            });
        }
        let pick = select_root(&stable, prev_shift);
        let branch = if roots.solutions.len() == 1 {
            let eff = steady::effective_params(&sys, &drive);
            classify_single_root(
                pick.shift,
                &steady::bistability_analysis(&eff, &sys, &drive),
            )
        } else {
            pick.branch
        };
        samples.push(TraceSample {
            axis_value: value,
            shift: pick.shift,
            branch,
            root_count: roots.solutions.len() as u8,
            stable_count: stable.len() as u8,
        });
        prev_shift = Some(pick.shift);
    }
    let indexed = detect_switchings_indexed(&samples);
    // a jump with single roots on both sides crossed an unsampled window
    let under_resolved = indexed
        .iter()
        .any(|(i, _)| samples[*i].root_count == 1 && samples[i + 1].root_count == 1);
    let switchings = indexed.into_iter().map(|(_, record)| record).collect();
    Ok(HysteresisTrace {
        axis: plan.axis,
        ascending,
        samples,
        switchings,
        under_resolved,
    })
}

/// Deterministic branch-tracking rule: nearest stable root to the previous
/// shift (adiabatic seed: smallest |Δ_m|), ties toward smaller |Δ_m| then
/// smaller Δ_m.
fn select_root<'a>(stable: &[&'a SteadySolution], prev: Option<f64>) -> &'a SteadySolution {
    let key = |s: &SteadySolution| match prev {
        Some(p) => (s.shift - p).abs(),
        None => s.shift.abs(),
    };
    let mut best = stable[0];
    for s in &stable[1..] {
        let (a, b) = (key(s), key(best));
        if a < b
            || (a == b
                && (s.shift.abs() < best.shift.abs()
                    || (s.shift.abs() == best.shift.abs() && s.shift < best.shift)))
        {
            best = s;
        }
    }
    best
}

/// Labels a single root by its position relative to the local fold shifts.
fn classify_single_root(shift: f64, report: &steady::BistabilityReport) -> Branch {
    match report.switching_shifts {
        None => Branch::Lower,
        Some((s1, s2)) => {
            if shift.abs() <= s1.abs() {
                Branch::Lower
            } else if shift.abs() >= s2.abs() {
                Branch::Upper
            } else if (shift - s1).abs() <= (shift - s2).abs() {
                Branch::Lower
            } else {
                Branch::Upper
            }
        }
    }
}

/// Flags every sample-to-sample branch change whose |ΔΔ_m| exceeds 10x the
/// local single-branch increment.
pub fn detect_switchings(samples: &[TraceSample]) -> Vec<SwitchingRecord> {
    detect_switchings_indexed(samples)
        .into_iter()
        .map(|(_, record)| record)
        .collect()
}

fn detect_switchings_indexed(samples: &[TraceSample]) -> Vec<(usize, SwitchingRecord)> {
    if samples.len() < 2 {
        return Vec::new();
    }
    let increments: Vec<f64> = samples
        .windows(2)
        .map(|w| (w[1].shift - w[0].shift).abs())
        .collect();
    let global = median(&increments);
    let shift_scale = samples
        .iter()
        .map(|s| s.shift.abs())
        .fold(0.0f64, f64::max);
    let floor = 1e-12 * shift_scale + f64::MIN_POSITIVE;

    let mut out = Vec::new();
    let mut recent: Vec<f64> = Vec::new();
    for (i, inc) in increments.iter().enumerate() {
        let local = if recent.is_empty() {
            global
        } else {
            median(&recent)
        };
        let branch_changed = samples[i].branch != samples[i + 1].branch;
        if branch_changed && *inc > 10.0 * local.max(floor) {
            out.push((
                i,
                SwitchingRecord {
                    axis_value: samples[i + 1].axis_value,
                    jump: *inc,
                    from_shift: samples[i].shift,
                    to_shift: samples[i + 1].shift,
                },
            ));
        } else {
            recent.push(*inc);
            if recent.len() > 5 {
                recent.remove(0);
            }
        }
    }
    out
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Trapezoidal integral of |Δ_m(up) − Δ_m(down)| over the axis. Both traces
/// must sample the same grid.
pub fn hysteresis_area(up: &HysteresisTrace, down: &HysteresisTrace) -> f64 {
    let rev: Vec<&TraceSample> = down.samples.iter().rev().collect();
    assert_eq!(up.samples.len(), rev.len(), "traces must share the grid");
    let gap: Vec<f64> = up
        .samples
        .iter()
        .zip(&rev)
        .map(|(a, b)| (a.shift - b.shift).abs())
        .collect();
    let mut area = 0.0;
    for i in 1..gap.len() {
        let dx = up.samples[i].axis_value - up.samples[i - 1].axis_value;
        area += 0.5 * (gap[i] + gap[i - 1]) * dx;
    }
    area
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steady::DriveTarget;

    fn fig4_system() -> SystemConfig {
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

    /// Drive fixed 35 MHz below the cavity.
    fn fig4_drive(power: f64) -> DriveConfig {
        DriveConfig {
            target: DriveTarget::Yig,
            omega_d: 10.0e9 - 35.0e6,
            power,
            power_coupling: 2.0,
        }
    }

    fn omega_m_grid() -> Vec<f64> {
        (0..=200).map(|i| 9.95e9 + 0.5e6 * i as f64).collect()
    }

    fn omega_m_plan(power: f64) -> SweepPlan {
        SweepPlan {
            axis: SweepAxis::MagnonFrequency,
            values: omega_m_grid(),
            direction: SweepDirection::Both,
            sys: fig4_system(),
            drive: fig4_drive(power),
        }
    }

    #[test]
    fn low_power_traces_coincide() {
        // the 80 mW window is narrower than the grid step; both sweeps see
        // the same single stable root everywhere
        let result = hysteresis_sweep(&omega_m_plan(80.0)).unwrap();
        let up = result.up.unwrap();
        let down = result.down.unwrap();
        assert!(up.switchings.len() <= 1);
        assert!(down.switchings.len() <= 1);
        for (a, b) in up.samples.iter().zip(down.samples.iter().rev()) {
            assert_eq!(a.shift, b.shift);
        }
    }

    #[test]
    fn high_power_traces_differ_between_switchings() {
        let result = hysteresis_sweep(&omega_m_plan(200.0)).unwrap();
        let up = result.up.unwrap();
        let down = result.down.unwrap();
        assert_eq!(up.switchings.len(), 1);
        assert_eq!(down.switchings.len(), 1);
        assert!(!up.under_resolved && !down.under_resolved);
        // predicted window edges: ω_m in [9.9914075e9, 9.9979005e9]
        let up_switch = up.switchings[0].axis_value;
        let down_switch = down.switchings[0].axis_value;
        assert!((up_switch - 9.9979005e9).abs() <= 0.75e6, "{up_switch}");
        assert!((down_switch - 9.9914075e9).abs() <= 0.75e6, "{down_switch}");
        // traces coincide outside the closed switching interval
        for (a, b) in up.samples.iter().zip(down.samples.iter().rev()) {
            if a.axis_value <= down_switch || a.axis_value >= up_switch {
                assert_eq!(a.shift, b.shift, "at {}", a.axis_value);
            }
        }
        let differ = up
            .samples
            .iter()
            .zip(down.samples.iter().rev())
            .any(|(a, b)| a.shift != b.shift);
        assert!(differ);
    }

    #[test]
    fn switching_shifts_match_fold_roots() {
        let result = hysteresis_sweep(&omega_m_plan(200.0)).unwrap();
        let up = result.up.unwrap();
        let sw = up.switchings[0];
        // fold shift where lower and middle merge, from the quadratic in Δ_m
        let fold_shift = 5.163445324121291e6;
        assert!(
            (sw.from_shift - fold_shift).abs() < 0.2 * sw.jump,
            "from_shift {} vs fold {}",
            sw.from_shift,
            fold_shift
        );
        let down = result.down.unwrap();
        let swd = down.switchings[0];
        let fold_shift_down = 18.578558806762924e6;
        assert!(
            (swd.from_shift - fold_shift_down).abs() < 0.2 * swd.jump,
            "from_shift {} vs fold {}",
            swd.from_shift,
            fold_shift_down
        );
    }

    #[test]
    fn hysteresis_area_nondecreasing_in_power() {
        let mut last = -1.0;
        for p in [80.0, 140.0, 200.0] {
            let result = hysteresis_sweep(&omega_m_plan(p)).unwrap();
            let area = hysteresis_area(&result.up.unwrap(), &result.down.unwrap());
            assert!(area >= last, "area({p}) = {area} < {last}");
            last = area;
        }
    }

    #[test]
    fn power_sweep_brackets_the_fold_powers() {
        // δ_m = 36.2 MHz: window in power is (69.3868, 69.7440) mW
        let plan = SweepPlan {
            axis: SweepAxis::Power,
            values: (0..=300).map(|i| 60.0 + 0.05 * i as f64).collect(),
            direction: SweepDirection::Both,
            sys: fig4_system(),
            drive: DriveConfig {
                omega_d: 10.0e9 - 36.2e6,
                ..fig4_drive(0.0)
            },
        };
        let result = hysteresis_sweep(&plan).unwrap();
        let up = result.up.unwrap();
        let down = result.down.unwrap();
        assert_eq!(up.switchings.len(), 1);
        assert_eq!(down.switchings.len(), 1);
        let up_switch = up.switchings[0].axis_value;
        let down_switch = down.switchings[0].axis_value;
        // up-switch above down-switch for K > 0
        assert!(up_switch > down_switch);
        assert!((up_switch - 69.7440).abs() < 0.1, "{up_switch}");
        assert!((down_switch - 69.3868).abs() < 0.1, "{down_switch}");
    }

    #[test]
    fn monotone_trace_has_no_switchings() {
        let trace = run_direction(&omega_m_plan(20.0), true).unwrap();
        assert!(trace.switchings.is_empty());
    }

    #[test]
    fn under_resolved_window_is_flagged() {
        // δ_m = 36.2 MHz: the power window (69.39, 69.74) mW sits strictly
        // inside one 1-mW grid cell, so the fold jump lands between two
        // single-root samples
        let plan = SweepPlan {
            axis: SweepAxis::Power,
            values: (0..=20).map(|i| 60.0 + 1.0 * i as f64).collect(),
            direction: SweepDirection::Both,
            sys: fig4_system(),
            drive: DriveConfig {
                omega_d: 10.0e9 - 36.2e6,
                ..fig4_drive(0.0)
            },
        };
        let result = hysteresis_sweep(&plan).unwrap();
        let up = result.up.unwrap();
        let down = result.down.unwrap();
        assert!(up.under_resolved, "switchings: {:?}", up.switchings);
        assert!(down.under_resolved);
        assert!(up.switchings.len() <= 1);
        // no grid point inside the window: the traces still coincide
        for (a, b) in up.samples.iter().zip(down.samples.iter().rev()) {
            assert_eq!(a.shift, b.shift);
        }
    }

    #[test]
    fn reruns_are_bit_identical() {
        let a = hysteresis_sweep(&omega_m_plan(200.0)).unwrap();
        let b = hysteresis_sweep(&omega_m_plan(200.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn every_sample_is_a_stable_root() {
        let result = hysteresis_sweep(&omega_m_plan(140.0)).unwrap();
        for trace in [result.up.unwrap(), result.down.unwrap()] {
            for s in &trace.samples {
                let (sys, drive) = omega_m_plan(140.0).at(s.axis_value);
                let roots = steady::solve_steady(&sys, &drive).unwrap();
                let found = roots
                    .solutions
                    .iter()
                    .any(|r| r.stable && r.shift == s.shift);
                assert!(found, "sample at {} not a stable root", s.axis_value);
            }
        }
    }

    #[test]
    fn invalid_plans_rejected() {
        let mut plan = omega_m_plan(10.0);
        plan.values = vec![1.0e9, 1.0e9];
        assert!(hysteresis_sweep(&plan).is_err());
        let mut plan = omega_m_plan(10.0);
        plan.values.clear();
        assert!(hysteresis_sweep(&plan).is_err());
    }
}
