//! Steady states of the driven cavity-magnon system and bistability analysis.
//!
//! Eliminating the cavity amplitude from the coupled steady-state equations
//! dresses the magnon mode with an effective detuning and damping
//!
//! ```text
//! δ'_m = δ_m − η δ_c,   γ'_m = γ_m + η κ_c,   η = g_m²/(δ_c² + κ_c²),
//! ```
//!
//! after which the Kerr shift `Δ_m = 2K|B0|²` obeys the cubic
//! `[(δ'_m + Δ_m)² + γ'_m²] Δ_m = c_eff P_d`, with `c_eff = c` when the
//! sphere is pumped directly and `c_eff = η c` when the cavity is pumped
//! (η P_d is the effective power reaching the magnon). Switching points are
//! the real roots of `3Δ_m² + 4δ'_mΔ_m + δ'_m² + γ'_m² = 0`; they exist iff
//! `δ'_m < −√3 γ'_m` (K > 0) or `δ'_m > √3 γ'_m` (K < 0), and coalesce at
//! the critical power `8√3 γ'_m³ / (9|c_eff|)`.
//!
//! Stability of each root is not assumed from branch position; it is
//! classified by the Jacobian of the time-domain model (see
//! [`crate::oracle::stability_of`]).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cubic;
use crate::error::Error;
use crate::oracle;
use crate::MHZ3_PER_MW_TO_HZ3;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Which mode the drive tone is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DriveTarget {
    /// Pump the magnon mode directly (drive coil at the sphere).
    Yig,
    /// Pump the cavity mode.
    Cavity,
}

/// Linear-plus-Kerr model parameters. All rates are linear frequencies (Hz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Cavity frequency ω_c/2π.
    pub omega_c: f64,
    /// Magnon frequency ω_m/2π.
    pub omega_m: f64,
    /// Cavity decay through the input port.
    pub kappa_in: f64,
    /// Cavity decay through the output port.
    pub kappa_out: f64,
    /// Intrinsic cavity decay.
    pub kappa_int: f64,
    /// Magnon damping rate γ_m.
    pub gamma_m: f64,
    /// Collective magnon-photon coupling g_m.
    pub g_m: f64,
    /// Kerr coefficient K (signed).
    pub kerr: f64,
    /// Macrospin S, when known from the material; enables the low-excitation
    /// guard |B0|²/(2S) <= 0.01.
    pub macrospin: Option<f64>,
}

impl SystemConfig {
    /// Total cavity decay κ_c = κ_i + κ_o + κ_int.
    pub fn kappa_c(&self) -> f64 {
        self.kappa_in + self.kappa_out + self.kappa_int
    }

    pub fn validate(&self) -> Result<(), Error> {
        for (name, v) in [
            ("omega_c", self.omega_c),
            ("omega_m", self.omega_m),
            ("kappa_in", self.kappa_in),
            ("kappa_out", self.kappa_out),
            ("kappa_int", self.kappa_int),
            ("gamma_m", self.gamma_m),
            ("g_m", self.g_m),
            ("kerr", self.kerr),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be finite, got {v}")));
            }
        }
        if self.kappa_in < 0.0 || self.kappa_out < 0.0 || self.kappa_int < 0.0 {
            return Err(Error::InvalidInput("cavity decay rates must be nonnegative".into()));
        }
        if self.kappa_c() <= 0.0 {
            return Err(Error::InvalidInput("total cavity decay kappa_c must be positive".into()));
        }
        if self.gamma_m <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "gamma_m must be positive, got {}",
                self.gamma_m
            )));
        }
        if self.g_m < 0.0 {
            return Err(Error::InvalidInput(format!(
                "g_m must be nonnegative, got {}",
                self.g_m
            )));
        }
        Ok(())
    }
}

/// Drive tone specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    pub target: DriveTarget,
    /// Drive frequency ω_d/2π (Hz).
    pub omega_d: f64,
    /// Drive power P_d (mW).
    pub power: f64,
    /// Line-coupling constant c (MHz³/mW, signed like K): 2K|Ω_d|² = c P_d.
    pub power_coupling: f64,
}

impl DriveConfig {
    /// Validates the drive against the Kerr coefficient it will act on.
    pub fn validate(&self, kerr: f64) -> Result<(), Error> {
        if !self.omega_d.is_finite() || !self.power.is_finite() || !self.power_coupling.is_finite()
        {
            return Err(Error::InvalidInput("drive parameters must be finite".into()));
        }
        if self.power < 0.0 {
            return Err(Error::InvalidInput(format!(
                "drive power must be nonnegative, got {}",
                self.power
            )));
        }
        if self.power_coupling * kerr < 0.0 {
            return Err(Error::InvalidInput(format!(
                "power coupling c = {} and Kerr coefficient K = {} must carry the same sign",
                self.power_coupling, kerr
            )));
        }
        if kerr == 0.0 && self.power_coupling != 0.0 && self.power > 0.0 {
            return Err(Error::InvalidInput(
                "c != 0 with K = 0 leaves the drive amplitude undefined (2K|Ω|² = cP)".into(),
            ));
        }
        Ok(())
    }

    /// `c` converted to Hz³/mW.
    pub fn power_coupling_hz3(&self) -> f64 {
        self.power_coupling * MHZ3_PER_MW_TO_HZ3
    }
}

/// Detunings and cavity-dressed effective magnon parameters (Hz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    /// δ_c = ω_c − ω_d.
    pub delta_c: f64,
    /// δ_m = ω_m − ω_d.
    pub delta_m: f64,
    /// Δ = ω_c − ω_m.
    pub delta: f64,
    /// η = g_m²/(δ_c² + κ_c²).
    pub eta: f64,
    /// δ'_m = δ_m − η δ_c.
    pub delta_m_eff: f64,
    /// γ'_m = γ_m + η κ_c.
    pub gamma_m_eff: f64,
}

/// Effective detuning/damping of the magnon mode dressed by the cavity.
pub fn effective_params(sys: &SystemConfig, drive: &DriveConfig) -> EffectiveParams {
    let delta_c = sys.omega_c - drive.omega_d;
    let delta_m = sys.omega_m - drive.omega_d;
    let kappa_c = sys.kappa_c();
    let eta = sys.g_m * sys.g_m / (delta_c * delta_c + kappa_c * kappa_c);
    EffectiveParams {
        delta_c,
        delta_m,
        delta: sys.omega_c - sys.omega_m,
        eta,
        delta_m_eff: delta_m - eta * delta_c,
        gamma_m_eff: sys.gamma_m + eta * kappa_c,
    }
}

/// Drive Rabi frequency |Ω_d| (Hz) from the power calibration 2K|Ω_d|² = cP_d.
pub fn rabi_from_power(drive: &DriveConfig, kerr: f64) -> Result<f64, Error> {
    drive.validate(kerr)?;
    let q = drive.power_coupling_hz3() * drive.power;
    if q == 0.0 {
        return Ok(0.0);
    }
    Ok((q / (2.0 * kerr)).sqrt())
}

/// Branch identity of a steady-state root, in excitation (|Δ_m|) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Lower,
    Middle,
    Upper,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Lower => "lower",
            Branch::Middle => "middle",
            Branch::Upper => "upper",
        })
    }
}

/// One steady-state root with its amplitudes and stability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadySolution {
    /// Kerr shift Δ_m = 2K|B0|² (Hz).
    pub shift: f64,
    /// Magnon amplitude B0 (dimensionless).
    pub magnon_amp: Complex64,
    /// Cavity amplitude A0 (dimensionless).
    pub cavity_amp: Complex64,
    /// Dynamical stability from the Jacobian of the mean-field flow.
    pub stable: bool,
    /// Position among the roots of this solve (excitation order).
    pub branch: Branch,
}

/// Full root set of one steady-state solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyRoots {
    pub eff: EffectiveParams,
    /// Drive Rabi frequency |Ω_d| (Hz).
    pub rabi: f64,
    /// 1-3 solutions in excitation order.
    pub solutions: Vec<SteadySolution>,
    /// Discriminant sat in the fold-degeneracy band (double root listed once).
    pub near_fold: bool,
    /// Set when |B0|²/(2S) > 0.01 for some root and the macrospin is known:
    /// the low-excitation expansion behind the model starts to strain.
    pub low_excitation_warning: bool,
}

fn branch_labels(n: usize) -> &'static [Branch] {
    match n {
        1 => &[Branch::Lower],
        2 => &[Branch::Lower, Branch::Upper],
        _ => &[Branch::Lower, Branch::Middle, Branch::Upper],
    }
}

/// Solves the steady-state cubic and fills amplitudes and stability flags.
///
/// The probe tone never enters here: drive-only amplitudes define Δ_m.
pub fn solve_steady(sys: &SystemConfig, drive: &DriveConfig) -> Result<SteadyRoots, Error> {
    sys.validate()?;
    let eff = effective_params(sys, drive);
    let rabi = rabi_from_power(drive, sys.kerr)?;
    let c_eff = match drive.target {
        DriveTarget::Yig => drive.power_coupling_hz3(),
        DriveTarget::Cavity => eff.eta * drive.power_coupling_hz3(),
    };
    let q = c_eff * drive.power;
    let roots = cubic::shift_cubic_roots(eff.delta_m_eff, eff.gamma_m_eff, q)?;

    let kappa_c = sys.kappa_c();
    let cavity_pole = Complex64::new(eff.delta_c, -kappa_c);
    let labels = branch_labels(roots.shifts.len());
    let mut low_excitation = false;
    let mut solutions = Vec::with_capacity(roots.shifts.len());
    for (shift, branch) in roots.shifts.iter().zip(labels) {
        let magnon_pole = Complex64::new(eff.delta_m_eff + shift, -eff.gamma_m_eff);
        let (magnon_amp, cavity_amp) = match drive.target {
            DriveTarget::Yig => {
                let b0 = -Complex64::new(rabi, 0.0) / magnon_pole;
                let a0 = -sys.g_m * b0 / cavity_pole;
                (b0, a0)
            }
            DriveTarget::Cavity => {
                let omega_eff = sys.g_m * Complex64::new(rabi, 0.0) / cavity_pole;
                let b0 = omega_eff / magnon_pole;
                let a0 = -(sys.g_m * b0 + rabi) / cavity_pole;
                (b0, a0)
            }
        };
        if let Some(s) = sys.macrospin {
            if magnon_amp.norm_sqr() / (2.0 * s) > 0.01 {
                low_excitation = true;
            }
        }
        let state = oracle::MeanFieldState {
            cavity: cavity_amp,
            magnon: magnon_amp,
        };
        let stable = oracle::stability_of(&state, sys, drive)?.stable;
        solutions.push(SteadySolution {
            shift: *shift,
            magnon_amp,
            cavity_amp,
            stable,
            branch: *branch,
        });
    }
    Ok(SteadyRoots {
        eff,
        rabi,
        solutions,
        near_fold: roots.near_fold,
        low_excitation_warning: low_excitation,
    })
}

/// Switching-point analysis at fixed effective parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BistabilityReport {
    /// True iff two switching points exist (signed condition on δ'_m).
    pub bistable: bool,
    /// The two fold shifts (Hz) in excitation order, when bistable.
    pub switching_shifts: Option<(f64, f64)>,
    /// Critical power for the requested drive target (mW); `None` when c = 0.
    pub critical_power: Option<f64>,
}

/// Bistable condition, switching shifts, and critical power.
///
/// The Kerr sign is taken from `sys.kerr`; the critical power divides by η
/// when the cavity is pumped (effective power η P_d reaches the magnon).
pub fn bistability_analysis(
    eff: &EffectiveParams,
    sys: &SystemConfig,
    drive: &DriveConfig,
) -> BistabilityReport {
    let dp = eff.delta_m_eff;
    let gp = eff.gamma_m_eff;
    let bistable = if sys.kerr > 0.0 {
        dp < -SQRT3 * gp
    } else if sys.kerr < 0.0 {
        dp > SQRT3 * gp
    } else {
        false
    };
    let switching_shifts = bistable.then(|| {
        let disc = (dp * dp - 3.0 * gp * gp).sqrt();
        // roots of 3Δ² + 4δ'Δ + δ'² + γ'² = 0, in excitation order
        let a = (-2.0 * dp - disc) / 3.0;
        let b = (-2.0 * dp + disc) / 3.0;
        if sys.kerr > 0.0 {
            (a, b)
        } else {
            (b, a)
        }
    });
    let c_eff = match drive.target {
        DriveTarget::Yig => drive.power_coupling_hz3(),
        DriveTarget::Cavity => eff.eta * drive.power_coupling_hz3(),
    };
    let critical_power =
        (c_eff != 0.0).then(|| 8.0 * SQRT3 * gp.powi(3) / (9.0 * c_eff.abs()));
    BistabilityReport {
        bistable,
        switching_shifts,
        critical_power,
    }
}

/// Result of the implicit threshold-detuning solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdDetuning {
    /// Threshold drive-magnon detuning δ_m* (Hz) where the switching points
    /// coalesce.
    pub delta_m_star: f64,
    /// η evaluated at the threshold.
    pub eta: f64,
    /// γ'_m at the threshold (Hz).
    pub gamma_m_eff: f64,
    /// Critical power pumping the sphere, P_m (mW).
    pub critical_power_yig: f64,
    /// Critical power pumping the cavity, P_c = P_m/η (mW).
    pub critical_power_cavity: f64,
}

/// Residual of the threshold condition δ'_m = ∓√3 γ'_m at a trial δ_m.
fn threshold_residual(sys: &SystemConfig, delta: f64, delta_m: f64) -> f64 {
    let delta_c = delta_m + delta;
    let kappa_c = sys.kappa_c();
    let eta = sys.g_m * sys.g_m / (delta_c * delta_c + kappa_c * kappa_c);
    let dp = delta_m - eta * delta_c;
    let gp = sys.gamma_m + eta * kappa_c;
    if sys.kerr > 0.0 {
        dp + SQRT3 * gp
    } else {
        dp - SQRT3 * gp
    }
}

/// Solves δ'_m(δ_m) = ∓√3 γ'_m(δ_m) for the threshold detuning at fixed
/// Δ = ω_c − ω_m, then evaluates both critical powers there.
///
/// The residual is scanned over δ_m in ±(|Δ| + 20·max(g_m, 10γ_m, 10κ_c))
/// on a 40001-point grid; for K > 0 the bistable region sits below the
/// largest sign change (the onset probed when tuning the drive toward the
/// polariton from outside), so that crossing is refined; for K < 0 the
/// mirror-image smallest crossing is used. Bisection runs until
/// |residual| < 1e-9 γ_m.
pub fn threshold_detuning(
    sys: &SystemConfig,
    delta: f64,
    power_coupling: f64,
) -> Result<ThresholdDetuning, Error> {
    sys.validate()?;
    if sys.kerr == 0.0 {
        return Err(Error::InvalidInput(
            "threshold detuning needs a nonzero Kerr coefficient".into(),
        ));
    }
    if power_coupling == 0.0 || power_coupling * sys.kerr < 0.0 {
        return Err(Error::InvalidInput(
            "threshold detuning needs a power coupling c with the sign of K".into(),
        ));
    }
    let span = (delta.abs() + 20.0 * sys.g_m.max(10.0 * sys.gamma_m).max(10.0 * sys.kappa_c()))
        .max(1.0);
    let (lo, hi) = (-span, span);
    let n = 40_000usize;
    let step = (hi - lo) / n as f64;
    let f = |dm: f64| threshold_residual(sys, delta, dm);

    let mut bracket = None;
    let mut prev = f(lo);
    for i in 1..=n {
        let x = lo + step * i as f64;
        let cur = f(x);
        if prev == 0.0 || prev * cur < 0.0 {
            bracket = Some((x - step, x));
            if sys.kerr < 0.0 {
                break; // smallest crossing
            }
        }
        prev = cur;
    }
    let (mut a, mut b) = bracket.ok_or(Error::NoThreshold {
        delta_hz: delta,
        lo_hz: lo,
        hi_hz: hi,
    })?;

    let tol = 1e-9 * sys.gamma_m;
    let mut fa = f(a);
    let mut mid = 0.5 * (a + b);
    for _ in 0..200 {
        mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm.abs() < tol {
            break;
        }
        if fa * fm <= 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    let fm = f(mid);
    if fm.abs() >= tol {
        return Err(Error::NumericalFailure {
            context: "threshold_detuning",
            detail: format!("bisection stalled at residual {fm:.3e} (tol {tol:.3e})"),
        });
    }

    let delta_m_star = mid;
    let delta_c = delta_m_star + delta;
    let kappa_c = sys.kappa_c();
    let eta = sys.g_m * sys.g_m / (delta_c * delta_c + kappa_c * kappa_c);
    let gp = sys.gamma_m + eta * kappa_c;
    let p_yig = 8.0 * SQRT3 * gp.powi(3)
        / (9.0 * (power_coupling * MHZ3_PER_MW_TO_HZ3).abs());
    Ok(ThresholdDetuning {
        delta_m_star,
        eta,
        gamma_m_eff: gp,
        critical_power_yig: p_yig,
        critical_power_cavity: p_yig / eta,
    })
}
