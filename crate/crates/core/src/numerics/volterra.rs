//! Predictor–corrector solver for the scalar convolution Volterra
//! integro-differential equation
//!
//! ```text
//! dS/dt = -N ∫_0^t f(t - t') S(t') dt',    S(0) = s0
//! ```
//!
//! The memory integral is discretised with the trapezoidal rule on a uniform
//! grid and the time derivative with the trapezoidal (Crank–Nicolson) rule,
//! giving a second-order scheme. The implicit trapezoidal step is resolved by
//! a forward-Euler predictor followed by a fixed number of corrector sweeps.
//! Total cost is `O(M²)` kernel-sample multiplications for `M` grid points.

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolterraOptions {
    pub dt: f64,
    pub t_max: f64,
    pub corrector_iterations: usize,
}

impl Default for VolterraOptions {
    fn default() -> Self {
        Self {
            dt: 1.0e-3,
            t_max: 50.0,
            corrector_iterations: 2,
        }
    }
}

impl VolterraOptions {
    pub fn new(dt: f64, t_max: f64) -> Result<Self> {
        let opts = Self {
            dt,
            t_max,
            ..Self::default()
        };
        opts.validate()?;
        Ok(opts)
    }

    pub fn with_corrector_iterations(mut self, iterations: usize) -> Self {
        self.corrector_iterations = iterations;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_max >= self.dt && self.t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_max must be at least dt, got t_max = {}, dt = {}",
                self.t_max, self.dt
            )));
        }
        if self.corrector_iterations == 0 {
            return Err(Error::InvalidParameter(
                "corrector_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Number of grid points, `floor(t_max/dt) + 1`.
    pub fn grid_len(&self) -> usize {
        uniform_grid_len(self.dt, self.t_max)
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.grid_len()).map(|i| i as f64 * self.dt).collect()
    }
}

/// `floor(t_max/dt) + 1`, tolerant of the last point landing a few ulps
/// short of `t_max` because `dt` is not representable.
pub fn uniform_grid_len(dt: f64, t_max: f64) -> usize {
    let ratio = t_max / dt;
    let nearest = ratio.round();
    let steps = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        ratio.floor()
    };
    steps as usize + 1
}

pub fn solve_volterra_scalar<K>(
    kernel: K,
    multiplier: usize,
    s0: Complex64,
    opts: &VolterraOptions,
) -> Result<Vec<Complex64>>
where
    K: Fn(f64) -> Complex64,
{
    opts.validate()?;
    let samples: Vec<Complex64> = (0..opts.grid_len())
        .map(|k| kernel(k as f64 * opts.dt))
        .collect();
    solve_volterra_sampled(&samples, multiplier, s0, opts)
}

/// Same as [`solve_volterra_scalar`] with the kernel given as samples
/// `f(k·dt)` for `k = 0..grid_len`.
pub fn solve_volterra_sampled(
    samples: &[Complex64],
    multiplier: usize,
    s0: Complex64,
    opts: &VolterraOptions,
) -> Result<Vec<Complex64>> {
    opts.validate()?;
    if multiplier == 0 {
        return Err(Error::InvalidParameter(
            "multiplier must be positive".into(),
        ));
    }
    if !(s0.re.is_finite() && s0.im.is_finite()) {
        return Err(Error::NonFinite { step: 0 });
    }
    let m = opts.grid_len();
    if samples.len() != m {
        return Err(Error::InvalidParameter(format!(
            "expected {m} kernel samples, got {}",
            samples.len()
        )));
    }
    if let Some(bad) = samples
        .iter()
        .position(|f| !(f.re.is_finite() && f.im.is_finite()))
    {
        return Err(Error::NonFinite { step: bad });
    }

    let h = opts.dt;

    let scale = -(multiplier as f64) * h;
    let half_f0 = samples[0] * 0.5;

    let mut s = Vec::with_capacity(m);
    s.push(s0);
    let mut deriv_prev = Complex64::default();

    for i in 1..m {
        // Known part of the memory sum: endpoint at t' = 0 plus interior nodes.
        let interior: Complex64 = samples[1..i]
            .iter()
            .rev()
            .zip(&s[1..i])
            .fold(Complex64::default(), |acc, (f, x)| acc + f * x);
        let history = samples[i] * s0 * 0.5 + interior;

        let s_prev = s[i - 1];
        let mut s_i = s_prev + deriv_prev * h;
        let mut deriv = scale * (history + half_f0 * s_i);
        for _ in 0..opts.corrector_iterations {
            s_i = s_prev + (deriv_prev + deriv) * (0.5 * h);
            deriv = scale * (history + half_f0 * s_i);
        }

        if !(s_i.re.is_finite() && s_i.im.is_finite()) {
            return Err(Error::NonFinite { step: i });
        }
        s.push(s_i);
        deriv_prev = deriv;
    }
    Ok(s)
}
