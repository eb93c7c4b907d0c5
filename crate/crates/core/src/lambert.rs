//! Principal branch of the Lambert W function on the non-negative axis, and
//! the block-detection parameter it selects.

use crate::error::CodeError;

/// `W0(x)` for `x >= 0`: the `w >= 0` solving `w e^w = x`.
///
/// Halley iteration from `ln(1 + x)`, kept inside the bracket
/// `[0, ln(1 + x)]` by falling back to bisection.
pub fn lambert_w0(x: f64) -> Result<f64, CodeError> {
    if x.is_nan() || x < 0.0 {
        return Err(CodeError::Domain(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut lo = 0.0_f64;
    let mut hi = x.ln_1p();
    let mut w = hi;
    for _ in 0..200 {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            return Ok(w);
        }
        if f > 0.0 {
            hi = w;
        } else {
            lo = w;
        }
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let mut next = w - f / denom;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - w).abs() <= 4.0 * f64::EPSILON * w.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        w = next;
    }
    Ok(w)
}

/// `2 ln(sqrt(e) n^(1-alpha) p) / W(2e ln(sqrt(e) n^(1-alpha) p))` for a
/// target error-decay rate `p_target`.
pub fn delta_star(n: usize, alpha: f64, p_target: f64) -> Result<f64, CodeError> {
    let arg = std::f64::consts::E.sqrt() * (n as f64).powf(1.0 - alpha) * p_target;
    if !(arg.is_finite() && arg > 1.0) {
        return Err(CodeError::Domain(arg));
    }
    let log = arg.ln();
    Ok(2.0 * log / lambert_w0(2.0 * std::f64::consts::E * log)?)
}

/// `ceil(delta_star)`, the integer code parameter.
pub fn select_delta(n: usize, alpha: f64, p_target: f64) -> Result<usize, CodeError> {
    delta_star(n, alpha, p_target).map(|d| d.ceil() as usize)
}

/// The default target `p(n) = n^(2 alpha - 1)`, which balances the two error
/// terms for `alpha < 1` and gives `p(n) = n` at `alpha = 1`.
pub fn default_p_target(n: usize, alpha: f64) -> f64 {
    (n as f64).powf(2.0 * alpha - 1.0)
}
