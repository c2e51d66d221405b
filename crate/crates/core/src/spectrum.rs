//! Bound states of the `N`-qubit + reservoir Hamiltonian in the
//! single-excitation sector.
//!
//! Eliminating the field amplitudes from the eigenvalue problem leaves the
//! scalar self-consistency condition `E = y(E)` with
//!
//! ```text
//! y(E) = ω0 − N ∫_0^∞ J(ω) / (ω − E) dω ,    E < 0.
//! ```
//!
//! `y` decreases monotonically on `E < 0` and tends to `ω0` as `E → −∞`, so
//! `g(E) = y(E) − E` has at most one root there: the bound-state energy.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::numerics::{find_root_bracketed, integrate_semi_infinite, QUAD_TOL, ROOT_TOL};
use crate::reservoir::{ReservoirModel, SpectralDensity};
use crate::{Complex64, Error, Result};

/// Bracket expansion gives up beyond `|E| = MAX_BRACKET · ω0`.
pub const MAX_BRACKET: f64 = 1.0e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundStateOptions {
    /// Probe distance below `E = 0`, in units of `ω0`.
    pub epsilon: f64,
    /// Minimum overlap weight for a Lorentzian root to count as a bound state.
    pub beta_sq_min: f64,
    pub quad_tol: f64,
    pub x_tol: f64,
    pub g_tol: f64,
}

impl Default for BoundStateOptions {
    fn default() -> Self {
        Self {
            epsilon: 1.0e-6,
            beta_sq_min: 1.0e-3,
            quad_tol: QUAD_TOL,
            x_tol: ROOT_TOL,
            g_tol: ROOT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundStateReport {
    pub n_qubits: usize,
    pub exists: bool,
    /// Bound-state energy; `None` when no bound state was found.
    pub e_bs: Option<f64>,
    /// Squared per-qubit amplitude of the normalised bound eigenstate.
    pub beta_sq: Option<f64>,
    /// Quadrature value of `y(−ε)`.
    pub y_at_zero: f64,
    /// Closed-form `y(0)`; only defined for the Ohmic family.
    pub y_at_zero_analytic: Option<f64>,
    pub probe_epsilon: f64,
    pub beta_sq_min: f64,
    /// Root of `y(E) = E` rejected because its weight is below `beta_sq_min`.
    pub candidate_e: Option<f64>,
    pub candidate_beta_sq: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Existence {
    pub exists: bool,
    pub y_at_zero: f64,
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::InvalidParameter(
            "number of qubits must be positive".into(),
        ));
    }
    Ok(())
}

fn y_with_tol(model: &ReservoirModel, n_qubits: usize, e: f64, tol: f64) -> Result<f64> {
    check_qubits(n_qubits)?;
    if !(e < 0.0) {
        return Err(Error::Domain(format!(
            "y(E) is only evaluated for E < 0, got {e}"
        )));
    }
    let integral = integrate_semi_infinite(
        |w| Complex64::new(model.density_at(w) / (w - e), 0.0),
        0.0,
        tol,
        tol,
    )?;
    Ok(model.omega0() - n_qubits as f64 * integral.value.re)
}

/// `y(E) = ω0 − N ∫_0^∞ J(ω)/(ω − E) dω` for `E < 0`.
pub fn y_of(model: &ReservoirModel, n_qubits: usize, e: f64) -> Result<f64> {
    y_with_tol(model, n_qubits, e, QUAD_TOL)
}

/// Closed form `y(0) = ω0 − N γ Γ(s) ωc / 2π` for the Ohmic family.
pub fn ohmic_y_at_zero(model: &ReservoirModel, n_qubits: usize) -> Option<f64> {
    match model.density() {
        SpectralDensity::OhmicFamily {
            s,
            gamma: coupling,
            omega_c,
        } => Some(
            model.omega0()
                - n_qubits as f64 * coupling * gamma(s) * omega_c / (2.0 * std::f64::consts::PI),
        ),
        SpectralDensity::Lorentzian { .. } => None,
    }
}

/// `β² = 1 / (N + N² K)` with `K = ∫_0^∞ J(ω)/(ω − E)² dω`.
pub fn bound_state_weight(model: &ReservoirModel, n_qubits: usize, e_bs: f64) -> Result<f64> {
    weight_with_tol(model, n_qubits, e_bs, QUAD_TOL)
}

pub(crate) fn weight_with_tol(
    model: &ReservoirModel,
    n_qubits: usize,
    e_bs: f64,
    tol: f64,
) -> Result<f64> {
    check_qubits(n_qubits)?;
    if !(e_bs < 0.0) {
        return Err(Error::Domain(format!(
            "bound-state energy must be negative, got {e_bs}"
        )));
    }
    let k = integrate_semi_infinite(
        |w| {
            let d = w - e_bs;
            Complex64::new(model.density_at(w) / (d * d), 0.0)
        },
        0.0,
        tol,
        tol,
    )?
    .value
    .re;
    let n = n_qubits as f64;
    Ok(1.0 / (n + n * n * k))
}

/// Existence test. Ohmic family: sign of the closed-form `y(0)`. Lorentzian:
/// `J(0) > 0` makes `y(0⁻)` diverge, so existence means a root at or below
/// `−ε` whose weight reaches `β²_min` (default thresholds).
pub fn bound_state_exists(model: &ReservoirModel, n_qubits: usize) -> Result<Existence> {
    let opts = BoundStateOptions::default();
    match ohmic_y_at_zero(model, n_qubits) {
        Some(y0) => {
            check_qubits(n_qubits)?;
            Ok(Existence {
                exists: y0 < 0.0,
                y_at_zero: y0,
            })
        }
        None => {
            let report = find_bound_state(model, n_qubits, &opts)?;
            Ok(Existence {
                exists: report.exists,
                y_at_zero: report.y_at_zero,
            })
        }
    }
}

pub fn find_bound_state(
    model: &ReservoirModel,
    n_qubits: usize,
    opts: &BoundStateOptions,
) -> Result<BoundStateReport> {
    check_qubits(n_qubits)?;
    if !(opts.epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {}",
            opts.epsilon
        )));
    }
    let omega0 = model.omega0();
    let eps = opts.epsilon * omega0;
    let y = |e: f64| y_with_tol(model, n_qubits, e, opts.quad_tol);

    let y_probe = y(-eps)?;
    let analytic = ohmic_y_at_zero(model, n_qubits);
    let mut report = BoundStateReport {
        n_qubits,
        exists: false,
        e_bs: None,
        beta_sq: None,
        y_at_zero: y_probe,
        y_at_zero_analytic: analytic,
        probe_epsilon: eps,
        beta_sq_min: opts.beta_sq_min,
        candidate_e: None,
        candidate_beta_sq: None,
    };

    if analytic.is_some_and(|y0| y0 >= 0.0) {
        return Ok(report);
    }
    // g(−ε) ≥ 0 means any root lies in (−ε, 0), below the probe resolution.
    if y_probe + eps >= 0.0 {
        return Ok(report);
    }

    let mut e_lo = -omega0;
    loop {
        let g_lo = y(e_lo)? - e_lo;
        if g_lo > 0.0 {
            break;
        }
        e_lo *= 2.0;
        if e_lo.abs() > MAX_BRACKET * omega0 {
            return Err(Error::BracketExpansion(e_lo.abs()));
        }
    }

    // A quadrature failure inside the root finder becomes NaN, which aborts
    // the search; the original error is kept and reported instead.
    let failure = RefCell::new(None);
    let g = |e: f64| match y(e) {
        Ok(v) => v - e,
        Err(err) => {
            failure.borrow_mut().get_or_insert(err);
            f64::NAN
        }
    };
    let found = find_root_bracketed(g, e_lo, -eps, opts.x_tol, opts.g_tol);
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let root = found?;
    let beta_sq = weight_with_tol(model, n_qubits, root, opts.quad_tol)?;

    if model.is_lorentzian() && beta_sq < opts.beta_sq_min {
        report.candidate_e = Some(root);
        report.candidate_beta_sq = Some(beta_sq);
        return Ok(report);
    }
    report.exists = true;
    report.e_bs = Some(root);
    report.beta_sq = Some(beta_sq);
    Ok(report)
}

/// `y(E)` on a uniform grid of `points` energies in `[e_min, e_max]`.
pub fn sample_y(
    model: &ReservoirModel,
    n_qubits: usize,
    e_min: f64,
    e_max: f64,
    points: usize,
) -> Result<Vec<(f64, f64)>> {
    energy_grid(e_min, e_max, points)?
        .into_iter()
        .map(|e| y_of(model, n_qubits, e).map(|v| (e, v)))
        .collect()
}

pub fn energy_grid(e_min: f64, e_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(e_min < e_max && e_max < 0.0) {
        return Err(Error::Domain(format!(
            "energy range needs e_min < e_max < 0, got [{e_min}, {e_max}]"
        )));
    }
    if points < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 energy points, got {points}"
        )));
    }
    let step = (e_max - e_min) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                e_max
            } else {
                e_min + i as f64 * step
            }
        })
        .collect())
}
