//! Single-excitation amplitude dynamics in the interaction picture.
//!
//! Every qubit sees the same memory term, so the `N` coupled equations
//! collapse onto the collective amplitude `S(t) = Σ_l C_l(t)`:
//!
//! ```text
//! dS/dt = −N ∫_0^t f(t − t') S(t') dt'
//! C_l(t) = C_l(0) + (S(t) − S(0)) / N
//! ```
//!
//! The dark components `C_l(0) − S(0)/N` are therefore conserved exactly.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numerics::{solve_volterra_sampled, VolterraOptions};
use crate::reservoir::{LorentzianKernel, ReservoirModel, SpectralDensity};
use crate::{Complex64, Error, Result};

/// Tolerance on `Σ|C_l(0)|² = 1`.
pub const NORM_TOL: f64 = 1.0e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    amplitudes: Vec<Complex64>,
}

impl InitialState {
    /// Builds a state from 1-based qubit indices; absent qubits start in `|g⟩`.
    pub fn new(n_qubits: usize, amplitudes: &BTreeMap<usize, Complex64>) -> Result<Self> {
        let state = Self::unchecked(n_qubits, amplitudes)?;
        let norm = state.norm_sq();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "initial amplitudes have norm² {norm}, expected 1"
            )));
        }
        Ok(state)
    }

    /// Like [`InitialState::new`] but rescales the amplitudes to unit norm.
    pub fn normalized(n_qubits: usize, amplitudes: &BTreeMap<usize, Complex64>) -> Result<Self> {
        let mut state = Self::unchecked(n_qubits, amplitudes)?;
        let norm = state.norm_sq().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter(
                "initial amplitudes must not all vanish".into(),
            ));
        }
        state.amplitudes.iter_mut().for_each(|c| *c /= norm);
        Ok(state)
    }

    fn unchecked(n_qubits: usize, amplitudes: &BTreeMap<usize, Complex64>) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 qubits, got {n_qubits}"
            )));
        }
        let mut values = vec![Complex64::default(); n_qubits];
        for (&index, &c) in amplitudes {
            if index == 0 || index > n_qubits {
                return Err(Error::InvalidParameter(format!(
                    "qubit index {index} outside 1..={n_qubits}"
                )));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "amplitude of qubit {index} is not finite"
                )));
            }
            values[index - 1] = c;
        }
        Ok(Self { amplitudes: values })
    }

    /// `(|e,g⟩ + |g,e⟩)/√2` on qubits `m`, `n` (1-based).
    pub fn symmetric_pair(n_qubits: usize, m: usize, n: usize) -> Result<Self> {
        Self::pair(n_qubits, m, n, std::f64::consts::FRAC_1_SQRT_2)
    }

    /// `(|e,g⟩ − |g,e⟩)/√2` on qubits `m`, `n`: a dark state.
    pub fn antisymmetric_pair(n_qubits: usize, m: usize, n: usize) -> Result<Self> {
        Self::pair(n_qubits, m, n, -std::f64::consts::FRAC_1_SQRT_2)
    }

    fn pair(n_qubits: usize, m: usize, n: usize, second: f64) -> Result<Self> {
        if m == n {
            return Err(Error::InvalidParameter(format!(
                "pair indices must differ, got ({m}, {n})"
            )));
        }
        let map = BTreeMap::from([
            (m, Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)),
            (n, Complex64::new(second, 0.0)),
        ]);
        Self::new(n_qubits, &map)
    }

    pub fn n_qubits(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude of qubit `l` (1-based).
    pub fn amplitude(&self, l: usize) -> Complex64 {
        self.amplitudes[l - 1]
    }

    pub fn collective(&self) -> Complex64 {
        self.amplitudes.iter().sum()
    }

    /// Conserved dark component `C_l(0) − S(0)/N` of qubit `l` (1-based).
    pub fn dark_component(&self, l: usize) -> Complex64 {
        self.amplitude(l) - self.collective() / self.n_qubits() as f64
    }

    fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t_grid: Vec<f64>,
    /// `amplitudes[l - 1][i] = C_l(t_i)`.
    pub amplitudes: Vec<Vec<Complex64>>,
    pub collective: Vec<Complex64>,
}

impl Trajectory {
    /// Rebuilds every amplitude from the collective series.
    pub fn from_collective(
        init: &InitialState,
        t_grid: Vec<f64>,
        collective: Vec<Complex64>,
    ) -> Self {
        let n = init.n_qubits() as f64;
        let s0 = init.collective();
        let amplitudes = init
            .amplitudes()
            .iter()
            .map(|&c0| collective.iter().map(|&s| c0 + (s - s0) / n).collect())
            .collect();
        Self {
            t_grid,
            amplitudes,
            collective,
        }
    }

    /// Single-point trajectory at `t = 0`.
    pub fn snapshot(init: &InitialState) -> Self {
        Self::from_collective(init, vec![0.0], vec![init.collective()])
    }

    pub fn len(&self) -> usize {
        self.t_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_grid.is_empty()
    }

    /// Series `C_l(t_i)` for qubit `l` (1-based).
    pub fn amplitude(&self, l: usize) -> &[Complex64] {
        &self.amplitudes[l - 1]
    }

    /// Largest `Σ_l |C_l(t_i)|²` over the grid.
    pub fn max_norm_sq(&self) -> f64 {
        (0..self.len())
            .map(|i| self.amplitudes.iter().map(|c| c[i].norm_sqr()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Markovian,
    NonMarkovian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeClassification {
    pub regime: Regime,
    /// Set when `γ0 = λ/(2N)` exactly (critically damped, `D = 0`).
    pub boundary: bool,
}

/// Markovian when `γ0 < λ/(2N)`, non-Markovian otherwise.
pub fn classify_regime(model: &ReservoirModel, n_qubits: usize) -> Result<RegimeClassification> {
    let (gamma0, lambda) = lorentzian_params(model)?;
    let threshold = lambda / (2.0 * n_qubits as f64);
    Ok(if gamma0 < threshold {
        RegimeClassification {
            regime: Regime::Markovian,
            boundary: false,
        }
    } else {
        RegimeClassification {
            regime: Regime::NonMarkovian,
            boundary: gamma0 == threshold,
        }
    })
}

fn lorentzian_params(model: &ReservoirModel) -> Result<(f64, f64)> {
    match model.density() {
        SpectralDensity::Lorentzian { gamma0, lambda } => Ok((gamma0, lambda)),
        SpectralDensity::OhmicFamily { .. } => Err(Error::InvalidParameter(
            "analytic propagation needs a Lorentzian reservoir".into(),
        )),
    }
}

/// `D = √(λ² − 2γ0λN)` on the principal branch; imaginary in the
/// non-Markovian regime.
pub fn lorentzian_discriminant(gamma0: f64, lambda: f64, n_qubits: usize) -> Complex64 {
    Complex64::new(
        lambda * lambda - 2.0 * gamma0 * lambda * n_qubits as f64,
        0.0,
    )
    .sqrt()
}

/// Collective propagator `G(t) = e^{−λt/2}[cosh(Dt/2) + (λ/D) sinh(Dt/2)]`.
///
/// Evaluated as a sum of decaying exponentials so that large `t` does not
/// overflow; for small `|Dt|` the `sinh(x)/x` factor uses its series.
pub fn lorentzian_propagator(lambda: f64, d: Complex64, t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let dt = d * t;
    let slow = ((d - lambda) * (0.5 * t)).exp();
    let fast = ((-d - lambda) * (0.5 * t)).exp();
    let cosh_part = 0.5 * (slow + fast);
    let sinh_part = if dt.norm() < 1e-3 {
        // (λ/D) sinh(Dt/2) e^{−λt/2} = (λt/2) e^{−λt/2} · sinhc(Dt/2)
        let x = dt * 0.5;
        let x2 = x * x;
        let sinhc = 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
        sinhc * (0.5 * lambda * t * (-0.5 * lambda * t).exp())
    } else {
        (slow - fast) * (0.5 * lambda) / d
    };
    (cosh_part + sinh_part).re
}

/// Closed-form propagation for the exponential Lorentzian kernel.
pub fn propagate_lorentzian_analytic(
    model: &ReservoirModel,
    init: &InitialState,
    t_grid: &[f64],
) -> Result<Trajectory> {
    let (gamma0, lambda) = lorentzian_params(model)?;
    if let Some(t) = t_grid.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::Domain(format!(
            "time grid must be non-negative and finite, found {t}"
        )));
    }
    let n = init.n_qubits();
    let d = lorentzian_discriminant(gamma0, lambda, n);
    let s0 = init.collective();
    let collective = t_grid
        .iter()
        .map(|&t| {
            if t == 0.0 {
                s0
            } else {
                s0 * lorentzian_propagator(lambda, d, t)
            }
        })
        .collect();
    Ok(Trajectory::from_collective(
        init,
        t_grid.to_vec(),
        collective,
    ))
}

/// Numerical propagation through the scalar Volterra reduction.
pub fn propagate_volterra(
    model: &ReservoirModel,
    init: &InitialState,
    opts: &VolterraOptions,
    lorentzian: LorentzianKernel,
) -> Result<Trajectory> {
    opts.validate()?;
    let kernel = model.kernel(lorentzian);
    let samples: Vec<Complex64> = (0..opts.grid_len())
        .into_par_iter()
        .map(|k| kernel.eval(k as f64 * opts.dt))
        .collect::<Result<_>>()?;
    propagate_sampled(&samples, init, opts)
}

/// Propagation with an arbitrary kernel `f(τ)`.
pub fn propagate_with_kernel<K>(
    kernel: K,
    init: &InitialState,
    opts: &VolterraOptions,
) -> Result<Trajectory>
where
    K: Fn(f64) -> Complex64,
{
    opts.validate()?;
    let samples: Vec<Complex64> = (0..opts.grid_len())
        .map(|k| kernel(k as f64 * opts.dt))
        .collect();
    propagate_sampled(&samples, init, opts)
}

fn propagate_sampled(
    samples: &[Complex64],
    init: &InitialState,
    opts: &VolterraOptions,
) -> Result<Trajectory> {
    let collective = solve_volterra_sampled(samples, init.n_qubits(), init.collective(), opts)?;
    Ok(Trajectory::from_collective(init, opts.grid(), collective))
}
