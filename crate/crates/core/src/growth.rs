//! Ball and sphere integrals of truncated powers, and growth-rate fits.
//!
//! With `w = (v - s0)_+` and `t0` the radius where `v` crosses `s0`,
//!
//! ```text
//! G(R) = omega int_{t0}^R g(s) w(s)^q ds
//! H(R) = omega int_{t0}^R g(s) w(s)^{q-p} v'(s)^p ds
//! ```
//!
//! All values are logarithms. Integrals over the superlevel set are taken
//! in the offset `d = s - t0` and `w` is evaluated as `v(t0 + d) - v(t0)`,
//! which keeps `w` accurate relative to `d` right at the crossing, where
//! the integrand of `H` is singular for `q < p`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{log_integrate, QuadOptions};
use crate::radial::{ModelManifold, RadialFn};
use crate::report::sentinel;
use crate::roots::bracketed_root;

/// Relative singular-value floor below which a fit design is rank deficient.
const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample {
    #[serde(rename = "R")]
    pub r: f64,
    /// `ln G(R)`, `-inf` when the superlevel set misses the ball.
    #[serde(rename = "logG", with = "sentinel")]
    pub log_g: f64,
    /// Estimated relative quadrature error of `G(R)`.
    pub quad_error: f64,
}

/// Radius `t0` where `w` becomes positive, or `None` if `v <= s0` on
/// `[min_radius, r]`.
pub fn superlevel_start<P: RadialFn + ?Sized>(
    model: &ModelManifold,
    profile: &P,
    s0: f64,
    r: f64,
) -> Result<Option<f64>> {
    let lo = model.warp.min_radius().max(profile.min_radius());
    let t0 = match profile.level_crossing(s0) {
        Some(t) => t,
        None => {
            if profile.value(lo) > s0 {
                0.0
            } else if profile.value(r) <= s0 {
                return Ok(None);
            } else {
                bracketed_root(|t| profile.value(t) - s0, lo, r, 1e-15)?
            }
        }
    };
    if t0 >= r {
        return Ok(None);
    }
    if t0 < lo {
        return Err(Error::Precondition(format!(
            "the superlevel set {{v > {s0}}} starts at {t0}, below the declared domain r >= {lo}"
        )));
    }
    Ok(Some(t0))
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "q",
            value: q,
            reason: "must be positive",
        })
    }
}

/// `ln G(R)` with its relative quadrature error.
pub fn log_ball_integral<P: RadialFn + ?Sized>(
    model: &ModelManifold,
    profile: &P,
    q: f64,
    s0: f64,
    r: f64,
    opts: &QuadOptions,
) -> Result<GrowthSample> {
    check_q(q)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain {
            what: "R",
            value: r,
            reason: "must be positive and finite".into(),
        });
    }
    let Some(t0) = superlevel_start(model, profile, s0, r)? else {
        return Ok(GrowthSample {
            r,
            log_g: f64::NEG_INFINITY,
            quad_error: 0.0,
        });
    };
    let ln_omega = model.sphere_factor.ln();
    // integrate in the offset d = s - t0
    let integrand = |d: f64| ln_omega + model.warp.ln_value(t0 + d) + q * profile.ln_increment(t0, d);
    let quad = log_integrate(
        integrand,
        0.0,
        r - t0,
        &QuadOptions {
            endpoint_exponent: None,
            ..*opts
        },
    )?;
    Ok(GrowthSample {
        r,
        log_g: quad.ln_value,
        quad_error: quad.rel_error,
    })
}

/// `ln(omega g(s) w(s)^q)`, `-inf` where `v(s) <= s0`.
pub fn log_sphere_integral<P: RadialFn + ?Sized>(
    model: &ModelManifold,
    profile: &P,
    q: f64,
    s0: f64,
    s: f64,
) -> Result<f64> {
    check_q(q)?;
    let lo = model.warp.min_radius().max(profile.min_radius());
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain {
            what: "s",
            value: s,
            reason: "must be positive and finite".into(),
        });
    }
    if s < lo {
        // increasing profiles stay below s0 up to t0
        return match profile.level_crossing(s0) {
            Some(t0) if s <= t0 => Ok(f64::NEG_INFINITY),
            _ => Err(Error::Domain {
                what: "s",
                value: s,
                reason: format!("below the declared domain r >= {lo}"),
            }),
        };
    }
    let lw = profile.ln_excess(s, s0);
    if lw == f64::NEG_INFINITY {
        return Ok(lw);
    }
    Ok(model.ln_sphere_area(s) + q * lw)
}

/// `ln H(R)` and its relative quadrature error.
///
/// For `q < p` the integrand blows up like `(s - t0)^{q-p}`; the lower
/// end is handled by a change of variables.
pub fn log_gradient_integral<P: RadialFn + ?Sized>(
    model: &ModelManifold,
    profile: &P,
    p: f64,
    q: f64,
    s0: f64,
    r: f64,
    opts: &QuadOptions,
) -> Result<(f64, f64)> {
    check_q(q)?;
    if !(q > p - 1.0) {
        return Err(Error::Precondition(format!("q = {q} must exceed p - 1 = {}", p - 1.0)));
    }
    let Some(t0) = superlevel_start(model, profile, s0, r)? else {
        return Ok((f64::NEG_INFINITY, 0.0));
    };
    let ln_omega = model.sphere_factor.ln();
    let integrand = |d: f64| {
        let s = t0 + d;
        ln_omega + model.warp.ln_value(s) + (q - p) * profile.ln_increment(t0, d) + p * profile.ln_d1(s)
    };
    let endpoint_exponent = if q < p { Some(q - p) } else { None };
    let quad = log_integrate(
        integrand,
        0.0,
        r - t0,
        &QuadOptions {
            endpoint_exponent,
            ..*opts
        },
    )?;
    Ok((quad.ln_value, quad.rel_error))
}

/// `ln int_r^R (omega g w^q)^{-1/(p-1)} ds`; `+inf` when `w` vanishes on
/// part of `[r, R]`.
#[allow(clippy::too_many_arguments)]
pub fn log_phi_integral<P: RadialFn + ?Sized>(
    model: &ModelManifold,
    profile: &P,
    p: f64,
    q: f64,
    s0: f64,
    r: f64,
    big_r: f64,
    opts: &QuadOptions,
) -> Result<(f64, f64)> {
    check_q(q)?;
    match superlevel_start(model, profile, s0, big_r)? {
        Some(t0) if t0 <= r => {}
        _ if r == big_r => return Ok((f64::NEG_INFINITY, 0.0)),
        _ => return Ok((f64::INFINITY, 0.0)),
    }
    let ln_omega = model.sphere_factor.ln();
    let integrand = |s: f64| -(ln_omega + model.warp.ln_value(s) + q * profile.ln_excess(s, s0)) / (p - 1.0);
    let quad = log_integrate(
        integrand,
        r,
        big_r,
        &QuadOptions {
            endpoint_exponent: None,
            ..*opts
        },
    )?;
    Ok((quad.ln_value, quad.rel_error))
}

/// `n` log-spaced radii from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(Error::Precondition(format!(
            "log-spaced range needs 0 < lo < hi and n >= 2 (got {lo}, {hi}, {n})"
        )));
    }
    let step = (hi / lo).ln() / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i + 1 == n { hi } else { lo * (step * i as f64).exp() })
        .collect())
}

pub fn ball_samples<P: RadialFn + ?Sized>(
    model: &ModelManifold,
    profile: &P,
    q: f64,
    s0: f64,
    radii: &[f64],
    opts: &QuadOptions,
) -> Result<Vec<GrowthSample>> {
    radii
        .iter()
        .map(|&r| log_ball_integral(model, profile, q, s0, r, opts))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    /// `ln G ~ (rate / beta) R^beta`.
    Power { beta: f64 },
    /// `ln G ~ rate ln R`.
    Logarithmic,
}

/// Fitted tail rate; for user profiles this is a fitted limit, not a liminf.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub regime: Regime,
    pub rate: f64,
    /// Largest absolute deviation of the fit from the samples.
    pub fit_residual: f64,
    pub window: (f64, f64),
}

/// Least-squares tail fit of `ln G`.
///
/// Power regime: `ln G = A R^beta + B ln R + D`, rate `A beta`.
/// Logarithmic regime: `ln G = l ln R + D`, rate `l`.
pub fn estimate_rate(samples: &[GrowthSample], regime: Regime) -> Result<RateEstimate> {
    let usable: Vec<&GrowthSample> = samples.iter().filter(|s| s.log_g.is_finite()).collect();
    if usable.len() < 4 {
        return Err(Error::Precondition(format!(
            "rate fit needs at least 4 samples with finite logG, got {}",
            usable.len()
        )));
    }
    if usable.windows(2).any(|w| !(w[1].r > w[0].r)) || usable[0].r <= 0.0 {
        return Err(Error::Precondition(
            "sample radii must be positive and strictly increasing".into(),
        ));
    }
    let columns: Vec<Box<dyn Fn(f64) -> f64>> = match regime {
        Regime::Power { beta } => {
            if !(beta > 0.0) {
                return Err(Error::RankDeficient(format!(
                    "power regime with beta = {beta} is degenerate; use the logarithmic regime"
                )));
            }
            vec![
                Box::new(move |r: f64| r.powf(beta)),
                Box::new(f64::ln),
                Box::new(|_| 1.0),
            ]
        }
        Regime::Logarithmic => vec![Box::new(f64::ln), Box::new(|_| 1.0)],
    };
    let (n, k) = (usable.len(), columns.len());
    let mut design = DMatrix::from_fn(n, k, |i, j| columns[j](usable[i].r));
    let mut scales = vec![1.0; k];
    for (j, scale) in scales.iter_mut().enumerate() {
        let norm = design.column(j).amax();
        if norm > 0.0 {
            *scale = norm;
            design.column_mut(j).scale_mut(1.0 / norm);
        }
    }
    let rhs = DVector::from_iterator(n, usable.iter().map(|s| s.log_g));
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > RANK_TOL * smax) {
        return Err(Error::RankDeficient(format!(
            "fit design has condition number {:e}; widen the window or use the logarithmic regime",
            smax / smin
        )));
    }
    let coef = svd.solve(&rhs, 0.0).map_err(|e| Error::RankDeficient(e.to_string()))?;
    let fit_residual = (&design * &coef - &rhs).amax();
    let lead = coef[0] / scales[0];
    let rate = match regime {
        Regime::Power { beta } => lead * beta,
        Regime::Logarithmic => lead,
    };
    Ok(RateEstimate {
        regime,
        rate,
        fit_residual,
        window: (usable[0].r, usable[n - 1].r),
    })
}
