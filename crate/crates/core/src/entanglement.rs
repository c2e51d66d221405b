//! Two-qubit concurrence for the single-excitation states produced by the
//! dynamics, and the long-time prediction from the bound-state projection.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::dynamics::InitialState;
use crate::reservoir::ReservoirModel;
use crate::spectrum::BoundStateReport;
use crate::{Complex64, Error, Result};

/// Slack on `|c_m|² + |c_n|² ≤ 1`.
pub const AMPLITUDE_TOL: f64 = 1.0e-6;
const HERMITIAN_TOL: f64 = 1.0e-12;
const TRACE_TOL: f64 = 1.0e-12;
const EIGEN_TOL: f64 = 1.0e-10;

// Basis order {|ee⟩, |eg⟩, |ge⟩, |gg⟩}.
const EG: usize = 1;
const GE: usize = 2;
const GG: usize = 3;

/// Two-qubit density matrix in the basis `{|ee⟩, |eg⟩, |ge⟩, |gg⟩}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState(Matrix4<Complex64>);

impl TwoQubitState {
    pub fn new(rho: Matrix4<Complex64>) -> Result<Self> {
        let hermitian_gap = (rho - rho.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if hermitian_gap > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (max |ρ − ρ†| = {hermitian_gap:e})"
            )));
        }
        let trace = rho.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        let min_eig = rho
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -EIGEN_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self(rho))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn maximally_mixed() -> Self {
        Self(Matrix4::identity() * Complex64::new(0.25, 0.0))
    }

    /// Projector onto the pure state with the given basis amplitudes.
    pub fn pure(amplitudes: [Complex64; 4]) -> Result<Self> {
        let v = nalgebra::Vector4::from(amplitudes);
        let norm = v.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = v / Complex64::new(norm, 0.0);
        Self::new(v * v.adjoint())
    }
}

fn check_amplitudes(c_m: Complex64, c_n: Complex64) -> Result<f64> {
    let weight = c_m.norm_sqr() + c_n.norm_sqr();
    if !(weight <= 1.0 + AMPLITUDE_TOL) {
        return Err(Error::NonPhysical(weight));
    }
    Ok(weight)
}

/// `C = 2|c_m c_n|`, valid for any state of the form
/// `c_m|e,g⟩ + c_n|g,e⟩ + (rest in |g,g⟩ ⊗ environment)`.
pub fn concurrence_from_amplitudes(c_m: Complex64, c_n: Complex64) -> Result<f64> {
    check_amplitudes(c_m, c_n)?;
    Ok((2.0 * (c_m * c_n).norm()).min(1.0))
}

/// Reduced state of qubits `m`, `n` after tracing out the reservoir and the
/// remaining qubits. Weights a few ulps above one (within the amplitude
/// tolerance) are scaled back so the result stays a valid density matrix.
pub fn reduced_density_matrix(c_m: Complex64, c_n: Complex64) -> Result<TwoQubitState> {
    let weight = check_amplitudes(c_m, c_n)?;
    let (c_m, c_n) = if weight > 1.0 {
        let scale = weight.sqrt();
        (c_m / scale, c_n / scale)
    } else {
        (c_m, c_n)
    };
    let pop_m = c_m.norm_sqr();
    let pop_n = c_n.norm_sqr();
    let mut rho = Matrix4::<Complex64>::zeros();
    rho[(EG, EG)] = Complex64::new(pop_m, 0.0);
    rho[(GE, GE)] = Complex64::new(pop_n, 0.0);
    rho[(EG, GE)] = c_m * c_n.conj();
    rho[(GE, EG)] = c_n * c_m.conj();
    rho[(GG, GG)] = Complex64::new((1.0 - pop_m - pop_n).max(0.0), 0.0);
    Ok(TwoQubitState(rho))
}

/// Wootters concurrence `max{0, √λ1 − √λ2 − √λ3 − √λ4}`.
///
/// The `√λ_i` are the eigenvalues of `R = √(√ρ ρ̃ √ρ)`, obtained here as the
/// singular values of `√ρ √ρ̃` so that zero eigenvalues of `ρρ̃` are not
/// square-rooted from roundoff noise.
pub fn wootters_concurrence(rho: &TwoQubitState) -> Result<f64> {
    let rho = rho.matrix();
    let one = Complex64::new(1.0, 0.0);
    let mut spin_flip = Matrix4::<Complex64>::zeros();
    spin_flip[(0, 3)] = -one;
    spin_flip[(1, 2)] = one;
    spin_flip[(2, 1)] = one;
    spin_flip[(3, 0)] = -one;

    let eig = rho.symmetric_eigen();
    let largest = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    if let Some(l) = eig.eigenvalues.iter().find(|&&l| l < -EIGEN_TOL) {
        return Err(Error::InvalidState(format!("negative eigenvalue {l:e}")));
    }
    let noise = 16.0 * f64::EPSILON * largest;
    let roots = eig
        .eigenvalues
        .map(|l| Complex64::new(if l > noise { l.sqrt() } else { 0.0 }, 0.0));
    let sqrt_rho = eig.eigenvectors * Matrix4::from_diagonal(&roots) * eig.eigenvectors.adjoint();
    // √ρ̃ = (σy⊗σy) (√ρ)* (σy⊗σy); the trailing flip is unitary and drops out.
    let a = sqrt_rho * spin_flip * sqrt_rho.conjugate();

    let mut singular: Vec<f64> = a.singular_values().iter().copied().collect();
    singular.sort_by(|x, y| y.total_cmp(x));
    Ok((singular[0] - singular[1] - singular[2] - singular[3]).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyPrediction {
    pub dark_m: Complex64,
    pub dark_n: Complex64,
    /// Magnitude `β²|S(0)|` of the rotating bound-state term in each amplitude.
    pub bs_weight: f64,
    pub concurrence_min: f64,
    pub concurrence_max: f64,
    pub concurrence_mean: f64,
    /// Beat frequency `|E_BS − ω0|` between dark and bound components.
    pub beat_frequency: Option<f64>,
}

/// Long-time concurrence band of qubits `(m, n)` (1-based).
///
/// The dark components persist unchanged. A bound state adds, to each
/// amplitude, a term of magnitude `β²|S(0)|` rotating at `|E_BS − ω0|`; the
/// band spans every relative phase of the two contributions.
pub fn predict_steady(
    model: &ReservoirModel,
    init: &InitialState,
    pair: (usize, usize),
    report: &BoundStateReport,
) -> Result<SteadyPrediction> {
    let (m, n) = pair;
    let size = init.n_qubits();
    if m == n || m == 0 || n == 0 || m > size || n > size {
        return Err(Error::InvalidParameter(format!(
            "invalid qubit pair ({m}, {n}) for N = {size}"
        )));
    }
    let dark_m = init.dark_component(m);
    let dark_n = init.dark_component(n);

    let (bs_weight, beat_frequency) = match (report.exists, report.e_bs, report.beta_sq) {
        (true, Some(e_bs), Some(beta_sq)) => (
            beta_sq * init.collective().norm(),
            Some((e_bs - model.omega0()).abs()),
        ),
        _ => (0.0, None),
    };

    let (a, b) = (dark_m.norm(), dark_n.norm());
    let lo = 2.0 * (a - bs_weight).max(0.0) * (b - bs_weight).max(0.0);
    let hi = 2.0 * (a + bs_weight) * (b + bs_weight);
    let concurrence_min = lo.clamp(0.0, 1.0);
    let concurrence_max = hi.clamp(0.0, 1.0);
    Ok(SteadyPrediction {
        dark_m,
        dark_n,
        bs_weight,
        concurrence_min,
        concurrence_max,
        concurrence_mean: 0.5 * (concurrence_min + concurrence_max),
        beat_frequency,
    })
}
