//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral `E1(x)` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0);
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let contrib = term / k as f64;
            sum += contrib;
            if contrib.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        // Modified Lentz evaluation of the continued fraction.
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let delta = c * d;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Closed-form `y(E)` for the Ohmic `s = 1` density with `γ = ωc = ω0 = 1`.
pub fn ohmic_s1_y(n: usize, e: f64) -> f64 {
    let a = -e;
    1.0 - n as f64 / (2.0 * std::f64::consts::PI) * (1.0 - a * a.exp() * exp_integral_e1(a))
}

/// Root of `y(E) = E` located by a uniform scan with linear interpolation.
pub fn scan_root(g: impl Fn(f64) -> f64, e_min: f64, e_max: f64, step: f64) -> Option<f64> {
    let steps = ((e_max - e_min) / step).round() as usize;
    let mut prev_e = e_min;
    let mut prev_g = g(prev_e);
    for k in 1..=steps {
        let e = e_min + k as f64 * step;
        let ge = g(e);
        if prev_g.signum() != ge.signum() {
            return Some(prev_e + (e - prev_e) * prev_g / (prev_g - ge));
        }
        prev_e = e;
        prev_g = ge;
    }
    None
}

/// Mean of `values` over samples with `lo <= t <= hi`.
pub fn window_mean(t: &[f64], values: &[f64], lo: f64, hi: f64) -> f64 {
    let picked: Vec<f64> = t
        .iter()
        .zip(values)
        .filter(|(&ti, _)| ti >= lo - 1e-12 && ti <= hi + 1e-12)
        .map(|(_, &v)| v)
        .collect();
    picked.iter().sum::<f64>() / picked.len() as f64
}
