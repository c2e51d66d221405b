//! Bracketed root finding: bisection safeguarded secant steps.

use crate::{Error, Result};

const MAX_ITERATIONS: usize = 500;

/// Finds a root of `g` in `[a, b]`.
///
/// Each iteration proposes a secant (false-position) point from the current
/// bracket ends. The proposal is accepted only if it lies strictly inside
/// the bracket and the previous step shrank the bracket by at least half;
/// otherwise the midpoint is used. The bracket always keeps a sign change,
/// so the returned point never leaves `[a, b]`.
///
/// Terminates when `|g(x)| <= g_tol` or the bracket is narrower than
/// `x_tol`; in the latter case the bracket end with the smaller `|g|` is
/// returned.
pub fn find_root_bracketed<G>(g: G, a: f64, b: f64, x_tol: f64, g_tol: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut g_lo = g(lo);
    let mut g_hi = g(hi);
    if !(g_lo.is_finite() && g_hi.is_finite()) {
        return Err(Error::Domain(format!(
            "non-finite function value at bracket ends: g({lo}) = {g_lo}, g({hi}) = {g_hi}"
        )));
    }
    if g_lo.abs() <= g_tol && g_lo.abs() <= g_hi.abs() {
        return Ok(lo);
    }
    if g_hi.abs() <= g_tol {
        return Ok(hi);
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::InvalidBracket { ga: g_lo, gb: g_hi });
    }

    let mut last_width = hi - lo;
    let mut force_bisection = false;
    for _ in 0..MAX_ITERATIONS {
        let width = hi - lo;
        if width <= x_tol {
            return Ok(if g_lo.abs() <= g_hi.abs() { lo } else { hi });
        }

        let secant = hi - g_hi * (hi - lo) / (g_hi - g_lo);
        let x = if !force_bisection && secant > lo && secant < hi {
            secant
        } else {
            lo + 0.5 * width
        };
        if x <= lo || x >= hi {
            // Bracket is at floating-point resolution.
            return Ok(if g_lo.abs() <= g_hi.abs() { lo } else { hi });
        }

        let gx = g(x);
        if !gx.is_finite() {
            return Err(Error::Domain(format!(
                "non-finite function value g({x}) = {gx}"
            )));
        }
        if gx.abs() <= g_tol {
            return Ok(x);
        }
        if gx.signum() == g_lo.signum() {
            lo = x;
            g_lo = gx;
        } else {
            hi = x;
            g_hi = gx;
        }

        let new_width = hi - lo;
        force_bisection = new_width > 0.5 * last_width;
        last_width = new_width;
    }
    Err(Error::RootNonConvergence(MAX_ITERATIONS))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let x = find_root_bracketed(|e| e + 1.0, -2.0, 0.0, 1e-10, 1e-10).unwrap();
        assert!((x + 1.0).abs() <= 1e-10);
    }

    #[test]
    fn quadratic_root() {
        let x = find_root_bracketed(|e| e * e - 2.0, 0.0, 2.0, 1e-10, 1e-10).unwrap();
        assert!((x - std::f64::consts::SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn reversed_bracket_is_accepted() {
        let x = find_root_bracketed(|e| e * e - 2.0, 2.0, 0.0, 1e-12, 1e-14).unwrap();
        assert!((x - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn invalid_bracket_names_both_values() {
        let err = find_root_bracketed(|e| e * e + 1.0, -1.0, 2.0, 1e-10, 1e-10).unwrap_err();
        assert_eq!(err, Error::InvalidBracket { ga: 2.0, gb: 5.0 });
    }

    #[test]
    fn root_at_endpoint() {
        assert_eq!(
            find_root_bracketed(|e| e, 0.0, 1.0, 1e-10, 1e-10).unwrap(),
            0.0
        );
    }

    #[test]
    fn flat_secant_falls_back_to_bisection() {
        // Secant steps alone crawl on this function; the safeguard must kick in.
        let g = |x: f64| (x - 0.3).powi(3) * 1e3 + 1e-9 * (x - 0.3);
        let x = find_root_bracketed(g, -5.0, 5.0, 1e-12, 1e-30).unwrap();
        assert!((x - 0.3).abs() < 1e-9);
    }

    #[test]
    fn discontinuous_sign_change_terminates_on_width() {
        let g = |x: f64| if x < 0.25 { -1.0 } else { 1.0 };
        let x = find_root_bracketed(g, 0.0, 1.0, 1e-10, 1e-10).unwrap();
        assert!((x - 0.25).abs() <= 1e-10);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn root_stays_in_bracket(root in -10.0f64..10.0, slope in 0.1f64..10.0, cubic in 0.0f64..2.0) {
            let g = |x: f64| slope * (x - root) + cubic * (x - root).powi(3);
            let (a, b) = (-12.0, 12.0);
            let x = find_root_bracketed(g, a, b, 1e-12, 1e-10).unwrap();
            prop_assert!(x >= a && x <= b);
            prop_assert!(g(x).abs() <= 1e-10 || (x - root).abs() <= 1e-12);
        }
    }
}
