//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands on finite
//! and semi-infinite intervals.

use num_complex::Complex64;

use crate::{Error, Result};

/// Upper bound on the number of subintervals kept by the adaptive driver.
pub const MAX_SUBDIVISIONS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
}

// 15-point Kronrod abscissae on [-1, 1] (positive half, centre last).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// 7-point Gauss weights, paired with XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    splittable: bool,
}

/// One G7–K15 panel with the QUADPACK error heuristic applied to the
/// complex modulus.
fn gauss_kronrod_15<F>(f: &F, a: f64, b: f64) -> Panel
where
    F: Fn(f64) -> Complex64,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.norm() * WGK[7];
    let mut values = [(Complex64::default(), Complex64::default()); 7];

    for (j, &x) in XGK[..7].iter().enumerate() {
        let dx = half * x;
        let lo = f(centre - dx);
        let hi = f(centre + dx);
        values[j] = (lo, hi);
        kronrod += (lo + hi) * WGK[j];
        abs_sum += (lo.norm() + hi.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (lo + hi) * WG[j / 2];
        }
    }

    let mean = kronrod * 0.5;
    let mut asc = (fc - mean).norm() * WGK[7];
    for (j, (lo, hi)) in values.iter().enumerate() {
        asc += ((lo - mean).norm() + (hi - mean).norm()) * WGK[j];
    }

    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).norm();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    let width_floor = 1.0e3 * f64::EPSILON * centre.abs().max(f64::MIN_POSITIVE);
    Panel {
        a,
        b,
        value,
        error,
        splittable: (b - a).abs() > width_floor,
    }
}

/// Adaptive bisection driven by the panel with the largest error estimate.
///
/// Endpoint singularities are handled by the bisection itself: the panel
/// touching the singular endpoint keeps the largest error and is split
/// repeatedly, giving a geometrically graded mesh toward that endpoint.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "integration limits [{a}, {b}] must be finite"
        )));
    }
    if !(abs_tol >= 0.0 && rel_tol >= 0.0) || (abs_tol == 0.0 && rel_tol == 0.0) {
        return Err(Error::InvalidParameter(format!(
            "quadrature tolerances abs={abs_tol}, rel={rel_tol}"
        )));
    }
    if a == b {
        return Ok(QuadResult {
            value: Complex64::default(),
            abs_error_estimate: 0.0,
        });
    }

    let mut panels = vec![gauss_kronrod_15(&f, a, b)];
    loop {
        let value: Complex64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !(value.re.is_finite() && value.im.is_finite() && error.is_finite()) {
            return Err(Error::QuadratureNonConvergence {
                estimate: value,
                error_bound: error,
                subdivisions: panels.len(),
            });
        }
        if error <= abs_tol.max(rel_tol * value.norm()) {
            return Ok(QuadResult {
                value,
                abs_error_estimate: error,
            });
        }

        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.splittable)
            .max_by(|(_, p), (_, q)| p.error.total_cmp(&q.error))
            .map(|(i, _)| i);
        let Some(worst) = worst else {
            return Err(Error::QuadratureNonConvergence {
                estimate: value,
                error_bound: error,
                subdivisions: panels.len(),
            });
        };
        if panels.len() >= MAX_SUBDIVISIONS {
            return Err(Error::QuadratureNonConvergence {
                estimate: value,
                error_bound: error,
                subdivisions: panels.len(),
            });
        }

        let Panel { a, b, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (a + b);
        panels.push(gauss_kronrod_15(&f, a, mid));
        panels.push(gauss_kronrod_15(&f, mid, b));
    }
}

/// Integrates `f` over `[lower, ∞)` after the substitution
/// `ω = lower + u/(1 − u)`, `u ∈ [0, 1)`.
///
/// The integrand must decay at infinity at least like `1/ω²` for the mapped
/// integrand to stay bounded near `u = 1`; it may carry an integrable
/// power-law singularity at `lower`.
pub fn integrate_semi_infinite<F>(
    f: F,
    lower: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    if !lower.is_finite() {
        return Err(Error::Domain(format!("lower limit {lower} must be finite")));
    }
    let mapped = |u: f64| {
        let v = 1.0 - u;
        let omega = lower + u / v;
        let value = f(omega);
        if value == Complex64::default() {
            // Avoid 0 * inf when the tail underflows before the Jacobian.
            value
        } else {
            value / (v * v)
        }
    };
    integrate_interval(mapped, 0.0, 1.0, abs_tol, rel_tol)
}
