//! Real-root solver for the steady-state shift cubic.
//!
//! The magnon frequency shift satisfies
//!
//! ```text
//! [(δ'_m + Δ)² + γ'_m²] Δ = q,      q = c_eff P_d
//! ```
//!
//! i.e. the monic cubic `Δ³ + 2δ'Δ² + (δ'² + γ'²)Δ − q = 0`. Roots are
//! classified by the discriminant of the depressed cubic in coefficient-
//! normalized form, computed in closed form (trigonometric for three real
//! roots, Cardano otherwise), then Newton-polished on the original cubic.
//! Near-degenerate discriminants are reported as the fold boundary with the
//! double root listed once, so root counts stay bit-stable at fold points.
//!
//! The equation is odd under `(Δ, δ', q) -> (−Δ, −δ', −q)`; negative-`q`
//! problems (K < 0) are canonicalized to `q > 0` and the roots negated on
//! the way out, which makes that symmetry exact at the bit level. Roots are
//! returned in ascending excitation order (`|Δ|` increasing).

use crate::error::Error;

/// Relative bound for the re-substitution residual `|f(Δ)| <= RESIDUAL_TOL ·
/// max(1, |q|)`; violating it after polishing is a numerical failure.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Normalized-discriminant band treated as a fold boundary.
const FOLD_DISC_TOL: f64 = 1e-12;

/// Real roots of the shift cubic.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicRoots {
    /// Roots in ascending |Δ| order (all share the sign of `q`).
    pub shifts: Vec<f64>,
    /// True when the discriminant sits inside the fold-degeneracy band; the
    /// double root is then listed once.
    pub near_fold: bool,
}

/// All real roots of `[(δ' + Δ)² + γ'²] Δ = q`.
pub fn shift_cubic_roots(delta_eff: f64, gamma_eff: f64, q: f64) -> Result<CubicRoots, Error> {
    if !gamma_eff.is_finite() || gamma_eff <= 0.0 || !delta_eff.is_finite() || !q.is_finite() {
        return Err(Error::InvalidInput(format!(
            "shift cubic needs gamma_eff > 0 and finite coefficients \
             (delta_eff={delta_eff}, gamma_eff={gamma_eff}, q={q})"
        )));
    }
    if q == 0.0 {
        // (δ'+Δ)² + γ'² > 0, so Δ = 0 is the only real root.
        return Ok(CubicRoots {
            shifts: vec![0.0],
            near_fold: false,
        });
    }
    // Canonicalize to q > 0.
    let (d, g, qq, sign) = if q < 0.0 {
        (-delta_eff, gamma_eff, -q, -1.0)
    } else {
        (delta_eff, gamma_eff, q, 1.0)
    };

    let mut roots = canonical_roots(d, g, qq);
    for r in &mut roots.shifts {
        *r = polish(d, g, qq, *r);
        let f = resubstitute(d, g, *r) - qq;
        if f.abs() > RESIDUAL_TOL * qq.max(1.0) {
            return Err(Error::NumericalFailure {
                context: "shift_cubic_roots",
                detail: format!(
                    "root {r:.12e} has residual {f:.3e} > {:.3e} \
                     (delta_eff={delta_eff:.6e}, gamma_eff={gamma_eff:.6e}, q={q:.6e})",
                    RESIDUAL_TOL * qq.max(1.0)
                ),
            });
        }
    }
    roots.shifts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if sign < 0.0 {
        // negating an ascending list keeps it in ascending-|Δ| order
        for r in &mut roots.shifts {
            *r = -*r;
        }
    }
    Ok(roots)
}

/// Left-hand side `[(δ' + Δ)² + γ'²] Δ` of the cubic.
pub fn resubstitute(delta_eff: f64, gamma_eff: f64, shift: f64) -> f64 {
    let s = delta_eff + shift;
    (s * s + gamma_eff * gamma_eff) * shift
}

/// Closed-form roots for the canonical (q > 0) problem.
fn canonical_roots(d: f64, g: f64, q: f64) -> CubicRoots {
    // Scale so the coefficients are O(1): Δ = s·t with s a characteristic size.
    let s = d.abs().max(g).max(q.cbrt());
    let a2 = 2.0 * d / s;
    let a1 = (d * d + g * g) / (s * s);
    let a0 = -q / (s * s * s);
    // depressed form t = x - a2/3: x³ + p x + r
    let p = a1 - a2 * a2 / 3.0;
    let r = a0 - a1 * a2 / 3.0 + 2.0 * a2 * a2 * a2 / 27.0;
    let disc = -4.0 * p * p * p - 27.0 * r * r;
    let disc_scale = (4.0 * p.abs().powi(3)).max(27.0 * r * r).max(f64::MIN_POSITIVE);
    let shift_back = |x: f64| (x - a2 / 3.0) * s;

    if disc.abs() < FOLD_DISC_TOL * disc_scale {
        // fold boundary: double root plus a simple root (or a triple root)
        if p.abs() < 1e-14 {
            return CubicRoots {
                shifts: vec![shift_back(0.0)],
                near_fold: true,
            };
        }
        let double = -1.5 * r / p;
        let simple = 3.0 * r / p;
        let mut shifts = vec![shift_back(double), shift_back(simple)];
        shifts.dedup();
        return CubicRoots {
            shifts,
            near_fold: true,
        };
    }

    if disc > 0.0 {
        // three distinct real roots (requires p < 0)
        let amp = 2.0 * (-p / 3.0).sqrt();
        let cos3 = (-4.0 * r / (amp * amp * amp)).clamp(-1.0, 1.0);
        let theta = cos3.acos() / 3.0;
        let shifts = (0..3)
            .map(|k| {
                shift_back(amp * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            })
            .collect();
        CubicRoots {
            shifts,
            near_fold: false,
        }
    } else {
        // one real root; pick the large Cardano branch to avoid cancellation
        let w = (r * r / 4.0 + p * p * p / 27.0).sqrt();
        let big = if r <= 0.0 { -r / 2.0 + w } else { -r / 2.0 - w };
        let x = if big == 0.0 {
            0.0
        } else {
            let u = big.cbrt();
            u - p / (3.0 * u)
        };
        CubicRoots {
            shifts: vec![shift_back(x)],
            near_fold: false,
        }
    }
}

/// Damped Newton polishing on the original monic cubic.
fn polish(d: f64, g: f64, q: f64, root: f64) -> f64 {
    let f = |x: f64| resubstitute(d, g, x) - q;
    let fp = |x: f64| {
        let s = d + x;
        s * s + g * g + 2.0 * s * x
    };
    let mut x = root;
    let mut fx = f(x);
    for _ in 0..3 {
        let d1 = fp(x);
        if d1 == 0.0 {
            break;
        }
        let xn = x - fx / d1;
        if !xn.is_finite() {
            break;
        }
        let fn_ = f(xn);
        if fn_.abs() >= fx.abs() {
            break;
        }
        x = xn;
        fx = fn_;
    }
    x
}
