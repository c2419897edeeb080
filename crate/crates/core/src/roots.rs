//! Bracketed scalar root finding.
//!
//! The solver keeps a sign-changing bracket at every step and proposes a
//! secant (regula falsi) point from the bracket ends; when the proposal is
//! not finite, leaves the bracket, or the bracket has not shrunk by half
//! over the last two steps, it falls back to bisection. Convergence is
//! therefore guaranteed for any continuous function with a sign change,
//! while smooth simple roots are reached in a handful of iterations.

use crate::error::{Error, Result};

/// Default iteration cap for [`bracketed_root`].
pub const MAX_ITERATIONS: usize = 400;

/// Finds a root of `f` in `[lo, hi]` where `f(lo)` and `f(hi)` have
/// opposite signs (or one of them is zero).
///
/// Stops once the bracket width is at most `rtol * max(|lo|, |hi|)` or an
/// exact zero is hit. `f` may return `-inf`/`+inf` at the bracket ends.
pub fn bracketed_root<F>(f: F, lo: f64, hi: f64, rtol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    bracketed_root_with_cap(f, lo, hi, rtol, MAX_ITERATIONS)
}

pub fn bracketed_root_with_cap<F>(f: F, lo: f64, hi: f64, rtol: f64, cap: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::Precondition(format!(
            "bracket [{lo}, {hi}] is empty or not ordered"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::Precondition(format!(
            "no sign change on [{lo}, {hi}]: f(lo) = {fa}, f(hi) = {fb}"
        )));
    }
    // Bracket widths one and two steps back.
    let mut history = [f64::INFINITY; 2];
    for iteration in 0..cap {
        let width = b - a;
        if width <= rtol * a.abs().max(b.abs()) {
            return Ok(0.5 * (a + b));
        }
        let secant = if fa.is_finite() && fb.is_finite() {
            b - fb * (b - a) / (fb - fa)
        } else {
            f64::NAN
        };
        // Regula falsi can stall with one end fixed; require the bracket to
        // halve every two steps or bisect.
        let stalled = width > 0.5 * history[1];
        let x = if !stalled && secant > a && secant < b {
            secant
        } else {
            0.5 * (a + b)
        };
        history = [width, history[0]];
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.is_nan() {
            return Err(Error::NoConvergence {
                iterations: iteration,
                lo: a,
                hi: b,
            });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    Err(Error::NoConvergence {
        iterations: cap,
        lo: a,
        hi: b,
    })
}
