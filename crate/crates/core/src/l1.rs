//! The divergence condition on `phi(s) = (int_{dB_s} w^q)^{-1/(p-1)}` and
//! iterated-logarithm growth classes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{estimate_rate, log_spaced, log_sphere_integral, GrowthSample, Regime};
use crate::radial::{ModelManifold, RadialFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum L1Verdict {
    /// `phi` is not integrable at infinity.
    ConditionHolds,
    ConditionFails,
    /// `phi` is integrable at infinity but infinite on an initial interval,
    /// so the condition holds for small lower limits only.
    HoldsOnlyForSmallR,
}

/// Exponent of `phi(s) ~ s^{-alpha/(p-1)}` when the sphere integral grows like `s^alpha`.
pub fn phi_exponent(alpha: f64, p: f64) -> f64 {
    -alpha / (p - 1.0)
}

/// `alpha = -inf` encodes `w = 0` everywhere.
pub fn classify_l1_condition(alpha: f64, p: f64, finite_radius_infinite: bool) -> L1Verdict {
    if alpha / (p - 1.0) <= 1.0 {
        L1Verdict::ConditionHolds
    } else if finite_radius_infinite {
        L1Verdict::HoldsOnlyForSmallR
    } else {
        L1Verdict::ConditionFails
    }
}

/// Least-squares slope of `ln(omega g w^q)` against `ln s` on `n`
/// log-spaced radii in `[s_lo, s_hi]`.
pub fn sphere_log_slope<P: RadialFn + ?Sized>(
    model: &ModelManifold,
    profile: &P,
    q: f64,
    s0: f64,
    s_lo: f64,
    s_hi: f64,
    n: usize,
) -> Result<f64> {
    let samples = log_spaced(s_lo, s_hi, n)?
        .into_iter()
        .map(|s| {
            Ok(GrowthSample {
                r: s,
                log_g: log_sphere_integral(model, profile, q, s0, s)?,
                quad_error: 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(estimate_rate(&samples, Regime::Logarithmic)?.rate)
}

/// `g_n(t) = prod_{j=1..n} log^{(j)}(t)`; every factor must be positive.
pub fn iterated_log(n: u32, t: f64) -> Result<f64> {
    let mut product = 1.0;
    let mut x = t;
    for depth in 1..=n {
        x = x.ln();
        if !(x > 0.0) {
            return Err(Error::Domain {
                what: "t",
                value: t,
                reason: format!("the {depth}-fold logarithm is {x}, not positive"),
            });
        }
        product *= x;
    }
    Ok(product)
}
