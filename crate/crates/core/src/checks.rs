//! Numerical verification of the integral inequalities along the
//! extremal examples.
//!
//! Every check compares two logarithms and records the margin in the
//! direction of the claimed inequality. The tolerance is a base value
//! plus ten times the summed relative quadrature errors of the integrals
//! involved (a relative error `e` shifts a logarithm by at most about `e`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{log_ball_integral, log_gradient_integral, log_phi_integral};
use crate::params::{comparison_constants, cutoff_prefactor, ComparisonConstants};
use crate::quadrature::QuadOptions;
use crate::radial::RadialFn;
use crate::report::sentinel;
use crate::sharp::SharpExample;

pub const DEFAULT_BASE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    #[serde(with = "sentinel")]
    pub lhs: f64,
    #[serde(with = "sentinel")]
    pub rhs: f64,
    /// Positive when the inequality holds strictly.
    #[serde(with = "sentinel")]
    pub margin: f64,
    pub passed: bool,
    pub tolerance: f64,
}

impl CheckReport {
    fn from_margin(name: &str, lhs: f64, rhs: f64, margin: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            margin,
            passed: margin >= -tolerance,
            tolerance,
        }
    }

    /// Records `lhs >= rhs`.
    pub fn at_least(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = if rhs == f64::NEG_INFINITY || lhs == f64::INFINITY {
            f64::INFINITY
        } else {
            lhs - rhs
        };
        Self::from_margin(name, lhs, rhs, margin, tolerance)
    }

    /// Records `lhs <= rhs`.
    pub fn at_most(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = if lhs == f64::NEG_INFINITY || rhs == f64::INFINITY {
            f64::INFINITY
        } else {
            rhs - lhs
        };
        Self::from_margin(name, lhs, rhs, margin, tolerance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub base_tol: f64,
    pub quad: QuadOptions,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            base_tol: DEFAULT_BASE_TOL,
            quad: QuadOptions::default(),
        }
    }
}

impl CheckOptions {
    fn tolerance(&self, quad_errors: &[f64]) -> f64 {
        self.base_tol + 10.0 * quad_errors.iter().sum::<f64>()
    }
}

fn require_nonnegative_potential(ex: &SharpExample) -> Result<()> {
    if ex.potential_nonnegative_on_superlevel_set() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "V < 0 on ({}, {}) inside the superlevel set; raise s0 or pick another (a, c)",
            ex.t0, ex.positive_radius
        )))
    }
}

/// Smallest relaxation `eps` with `r^mu V(r) >= lambda - eps` for all
/// `r >= t0`.
///
/// `r^mu V(r)` increases to `lambda`, so the worst radius is `t0`.
pub fn default_eps(ex: &SharpExample) -> f64 {
    let lambda = ex.params.lambda();
    (lambda - ex.t0.powf(ex.params.mu()) * ex.potential.value(ex.t0)).max(0.0)
}

/// Smallest radius from which `r^mu V(r) >= lambda - eps`.
///
/// Writing `r^mu V = lambda - D r^{-beta}` with
/// `D = (p-1)(1-beta) beta^{p-1} c^{p-1}`, this is `(D / eps)^{1/beta}`.
pub fn safe_radius(ex: &SharpExample, eps: f64) -> f64 {
    let p = ex.params.p();
    let beta = ex.beta();
    if ex.is_critical() || beta == 1.0 {
        return ex.t0;
    }
    let d = (p - 1.0) * (1.0 - beta) * beta.powf(p - 1.0) * ex.c.powf(p - 1.0);
    if eps <= 0.0 {
        return f64::INFINITY;
    }
    (d / eps).powf(1.0 / beta).max(ex.t0)
}

fn ln_g(ex: &SharpExample, r: f64, opts: &CheckOptions) -> Result<(f64, f64)> {
    let s = log_ball_integral(&ex.model, &ex.profile, ex.params.q(), ex.s0, r, &opts.quad)?;
    Ok((s.log_g, s.quad_error))
}

fn ln_h(ex: &SharpExample, r: f64, opts: &CheckOptions) -> Result<(f64, f64)> {
    log_gradient_integral(
        &ex.model,
        &ex.profile,
        ex.params.p(),
        ex.params.q(),
        ex.s0,
        r,
        &opts.quad,
    )
}

fn ln_add(x: f64, y: f64) -> f64 {
    let m = x.max(y);
    if m == f64::NEG_INFINITY {
        m
    } else {
        m + ((x - m).exp() + (y - m).exp()).ln()
    }
}

/// Growth of `Phi = G + c R^mu H` from `R1` to `R`:
///
/// `ln Phi(R) >= (c3 / beta)(R^beta - R1^beta) + ln G(R1)` for `mu < p`,
/// `ln Phi(R) >= c5 ln(R / R1) + ln G(R1)` with `c = c6` for `mu = p`.
///
/// `eps` defaults to [`default_eps`].
pub fn check_phi_lower_bound(
    ex: &SharpExample,
    r1: f64,
    r: f64,
    eps: Option<f64>,
    opts: &CheckOptions,
) -> Result<CheckReport> {
    require_nonnegative_potential(ex)?;
    if !(r1 > ex.t0 && r >= r1) {
        return Err(Error::Precondition(format!(
            "need t0 = {} < R1 = {r1} <= R = {r}",
            ex.t0
        )));
    }
    let eps = eps.unwrap_or_else(|| default_eps(ex));
    let safe = safe_radius(ex, eps);
    if r1 < safe {
        return Err(Error::Precondition(format!(
            "R1 = {r1} is below the radius {safe} from which r^mu V(r) >= lambda - eps"
        )));
    }
    let cc: ComparisonConstants = comparison_constants(&ex.params, eps)?;
    let mu = ex.params.mu();
    let (lg, eg) = ln_g(ex, r, opts)?;
    let (lh, eh) = ln_h(ex, r, opts)?;
    let (lg1, eg1) = ln_g(ex, r1, opts)?;
    let (weight, increment) = if ex.is_critical() {
        let (c5, c6) = (cc.c5.unwrap_or(f64::NAN), cc.c6.unwrap_or(f64::NAN));
        (c6, c5 * (r / r1).ln())
    } else {
        let beta = ex.beta();
        (cc.c2, cc.c3 / beta * (r.powf(beta) - r1.powf(beta)))
    };
    let lhs = ln_add(lg, weight.ln() + mu * r.ln() + lh);
    let rhs = increment + lg1;
    let name = if ex.is_critical() {
        "phi_lower_bound_log"
    } else {
        "phi_lower_bound"
    };
    Ok(CheckReport::at_least(name, lhs, rhs, opts.tolerance(&[eg, eh, eg1])))
}

/// Cutoff estimate `prefactor * G(R + h) >= h^p H(R)`.
pub fn check_caccioppoli(ex: &SharpExample, r: f64, h: f64, opts: &CheckOptions) -> Result<CheckReport> {
    require_nonnegative_potential(ex)?;
    if !(r > ex.t0) {
        return Err(Error::Precondition(format!("need R = {r} > t0 = {}", ex.t0)));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "h",
            value: h,
            reason: "must be positive and finite",
        });
    }
    let (lg, eg) = ln_g(ex, r + h, opts)?;
    let (lh, eh) = ln_h(ex, r, opts)?;
    let lhs = cutoff_prefactor(&ex.params).ln() + lg;
    let rhs = ex.params.p() * h.ln() + lh;
    Ok(CheckReport::at_least(
        "caccioppoli",
        lhs,
        rhs,
        opts.tolerance(&[eg, eh]),
    ))
}

/// Local gradient bound
/// `H(r) <= (p-1)^{p-1} / min{1, gamma^p} * (int_r^R (omega g w^q)^{-1/(p-1)})^{1-p}`.
pub fn check_local_integral_bound(ex: &SharpExample, r: f64, big_r: f64, opts: &CheckOptions) -> Result<CheckReport> {
    require_nonnegative_potential(ex)?;
    if !(r > 0.0 && big_r > r) {
        return Err(Error::Precondition(format!("need 0 < r = {r} < R = {big_r}")));
    }
    let p = ex.params.p();
    let gamma = ex.params.derive_exponents().gamma;
    let (lh, eh) = ln_h(ex, r, opts)?;
    let (lj, ej) = log_phi_integral(&ex.model, &ex.profile, p, ex.params.q(), ex.s0, r, big_r, &opts.quad)?;
    let rhs = (p - 1.0) * (p - 1.0).ln() - gamma.powf(p).min(1.0).ln() + (1.0 - p) * lj;
    Ok(CheckReport::at_most(
        "local_integral_bound",
        lh,
        rhs,
        opts.tolerance(&[eh, (p - 1.0) * ej]),
    ))
}

/// Two-sided integration-by-parts bracket for `ln G(R)`, `mu < p`.
///
/// With `K = a + qc`, `E(s) = exp(K s^beta) s^{1-beta}` and `T = t0 + 1`:
///
/// ```text
/// G(R) <= omega E(R) / (K beta)
/// G(R) >= omega (1 - s0/v(T))^q (E(R) - E(T)) / (K beta + (1-beta) T^{-beta})
/// ```
///
/// Returns `(lower, upper)`; requires `R > T`.
pub fn ibp_bracket(ex: &SharpExample, r: f64) -> Result<(f64, f64)> {
    if ex.is_critical() {
        return Err(Error::Precondition("the bracket applies to mu < p only".into()));
    }
    let t = ex.t0 + 1.0;
    if !(r > t) {
        return Err(Error::Precondition(format!("need R = {r} > t0 + 1 = {t}")));
    }
    let beta = ex.beta();
    let q = ex.params.q();
    let k = ex.a + q * ex.c;
    let ln_e = |s: f64| k * s.powf(beta) + (1.0 - beta) * s.ln();
    let ln_omega = ex.model.sphere_factor.ln();
    let upper = ln_omega + ln_e(r) - (k * beta).ln();
    let a2 = k * beta + (1.0 - beta) * t.powf(-beta);
    let shrink = q * (-(ex.s0.ln() - ex.profile.ln_value(t)).exp()).ln_1p();
    let lower = ln_omega + shrink + ln_e(r) + (-(ln_e(t) - ln_e(r)).exp()).ln_1p() - a2.ln();
    Ok((lower, upper))
}
