//! Reservoir spectral densities and their correlation kernels
//!
//! ```text
//! f(τ) = ∫ J(ω) e^{i(ω0 − ω)τ} dω
//! ```
//!
//! Two families are supported. The Lorentzian
//! `J(ω) = γ0 λ² / (2π ((ω − ω0)² + λ²))` is centred on the qubit frequency.
//! The Ohmic family `J(ω) = (γ/2π) ωc^{1−s} ω^s e^{−ω/ωc}` covers
//! sub-Ohmic (`s < 1`), Ohmic (`s = 1`) and super-Ohmic (`s > 1`) baths.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma as gamma_fn;

use crate::numerics::{integrate_semi_infinite, QUAD_TOL};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralDensity {
    Lorentzian { gamma0: f64, lambda: f64 },
    OhmicFamily { s: f64, gamma: f64, omega_c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirModel {
    #[serde(flatten)]
    density: SpectralDensity,
    omega0: f64,
}

/// Which frequency domain the Lorentzian kernel integrates over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LorentzianKernel {
    /// `ω ∈ (−∞, ∞)`: the pure exponential `(γ0λ/2) e^{−λτ}`.
    #[default]
    Exponential,
    /// `ω ∈ [0, ∞)`, matching the domain of the bound-state equation.
    HalfLine,
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

impl ReservoirModel {
    pub fn new(density: SpectralDensity, omega0: f64) -> Result<Self> {
        check_positive("omega0", omega0)?;
        match density {
            SpectralDensity::Lorentzian { gamma0, lambda } => {
                check_positive("gamma0", gamma0)?;
                check_positive("lambda", lambda)?;
            }
            SpectralDensity::OhmicFamily { s, gamma, omega_c } => {
                check_positive("s", s)?;
                check_positive("gamma", gamma)?;
                check_positive("omega_c", omega_c)?;
            }
        }
        Ok(Self { density, omega0 })
    }

    /// Lorentzian reservoir with `omega0 = 1`.
    pub fn lorentzian(gamma0: f64, lambda: f64) -> Result<Self> {
        Self::new(SpectralDensity::Lorentzian { gamma0, lambda }, 1.0)
    }

    /// Ohmic-family reservoir with `omega0 = 1`.
    pub fn ohmic(s: f64, gamma: f64, omega_c: f64) -> Result<Self> {
        Self::new(SpectralDensity::OhmicFamily { s, gamma, omega_c }, 1.0)
    }

    pub fn with_omega0(self, omega0: f64) -> Result<Self> {
        Self::new(self.density, omega0)
    }

    pub fn density(&self) -> SpectralDensity {
        self.density
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn is_lorentzian(&self) -> bool {
        matches!(self.density, SpectralDensity::Lorentzian { .. })
    }

    /// `J(ω)` without the domain check; callers guarantee `ω ≥ 0`.
    pub(crate) fn density_at(&self, omega: f64) -> f64 {
        match self.density {
            SpectralDensity::Lorentzian { gamma0, lambda } => {
                let detuning = omega - self.omega0;
                gamma0 * lambda * lambda / (2.0 * PI * (detuning * detuning + lambda * lambda))
            }
            SpectralDensity::OhmicFamily { s, gamma, omega_c } => {
                if omega == 0.0 {
                    return 0.0;
                }
                gamma / (2.0 * PI)
                    * omega_c.powf(1.0 - s)
                    * omega.powf(s)
                    * (-omega / omega_c).exp()
            }
        }
    }

    /// Correlation kernel evaluator for this model.
    pub fn kernel(&self, lorentzian: LorentzianKernel) -> CorrelationKernel {
        let omega0 = self.omega0;
        match self.density {
            SpectralDensity::Lorentzian { gamma0, lambda } => match lorentzian {
                LorentzianKernel::Exponential => CorrelationKernel::Exponential {
                    amplitude: 0.5 * gamma0 * lambda,
                    rate: lambda,
                },
                LorentzianKernel::HalfLine => CorrelationKernel::LorentzianHalfLine {
                    gamma0,
                    lambda,
                    omega0,
                },
            },
            SpectralDensity::OhmicFamily { s, gamma, omega_c } => CorrelationKernel::Ohmic {
                prefactor: gamma / (2.0 * PI) * omega_c.powf(1.0 - s) * gamma_fn(s + 1.0),
                exponent: s + 1.0,
                inv_cutoff: 1.0 / omega_c,
                omega0,
            },
        }
    }
}

/// Precomputed correlation kernel `f(τ)` for `τ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrelationKernel {
    Exponential {
        amplitude: f64,
        rate: f64,
    },
    LorentzianHalfLine {
        gamma0: f64,
        lambda: f64,
        omega0: f64,
    },
    Ohmic {
        prefactor: f64,
        exponent: f64,
        inv_cutoff: f64,
        omega0: f64,
    },
}

impl CorrelationKernel {
    pub fn eval(&self, tau: f64) -> Result<Complex64> {
        match *self {
            Self::Exponential { amplitude, rate } => {
                Ok(Complex64::new(amplitude * (-rate * tau).exp(), 0.0))
            }
            Self::Ohmic {
                prefactor,
                exponent,
                inv_cutoff,
                omega0,
            } => {
                let base = Complex64::new(inv_cutoff, tau);
                Ok(Complex64::from_polar(prefactor, omega0 * tau) * base.powf(-exponent))
            }
            Self::LorentzianHalfLine {
                gamma0,
                lambda,
                omega0,
            } => {
                // Full-line exponential minus the negative-frequency part. The
                // latter, ∫_0^∞ J(−u) e^{iuτ} du, is evaluated on the rotated
                // contour u = iv where it becomes non-oscillatory; the poles at
                // u = −ω0 ± iλ lie outside the first quadrant.
                let amp = gamma0 * lambda * lambda / (2.0 * PI);
                let rotated = integrate_semi_infinite(
                    |v| {
                        let z = Complex64::new(omega0, v);
                        Complex64::new(0.0, amp * (-v * tau).exp()) / (z * z + lambda * lambda)
                    },
                    0.0,
                    QUAD_TOL,
                    QUAD_TOL,
                )?;
                let full = 0.5 * gamma0 * lambda * (-lambda * tau).exp();
                Ok(Complex64::new(full, 0.0)
                    - Complex64::from_polar(1.0, omega0 * tau) * rotated.value)
            }
        }
    }
}

pub fn spectral_density(model: &ReservoirModel, omega: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!(
            "spectral density needs omega >= 0, got {omega}"
        )));
    }
    Ok(model.density_at(omega))
}

/// `f(τ)` using the exponential (full-line) kernel for Lorentzian models.
pub fn correlation_kernel(model: &ReservoirModel, tau: f64) -> Result<Complex64> {
    correlation_kernel_with(model, LorentzianKernel::Exponential, tau)
}

pub fn correlation_kernel_with(
    model: &ReservoirModel,
    lorentzian: LorentzianKernel,
    tau: f64,
) -> Result<Complex64> {
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!(
            "correlation kernel needs tau >= 0, got {tau}"
        )));
    }
    model.kernel(lorentzian).eval(tau)
}
