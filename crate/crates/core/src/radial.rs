//! Rotationally symmetric model manifolds, radial profiles and the radial
//! p-Laplacian.
//!
//! A model manifold carries the metric `dr^2 + g(r)^2 dtheta^2`; the area
//! of the geodesic sphere of radius `s` is `omega * g(s)`. For a radial
//! function `u = v(r)` with `v' > 0`,
//!
//! ```text
//! Delta_p u = (p - 1) (v')^{p-2} v'' + (g'/g) (v')^{p-1}.
//! ```
//!
//! The exponential families overflow `f64` long before the radii of
//! interest, so every radial function also exposes its logarithm, its
//! logarithmic derivative `v'/v` and the ratio `v''/v`; residuals are
//! evaluated after dividing through by `v^{p-1}`.
//!
//! The smooth splice near the pole (where `g(t) = t` for small `t`) is
//! never evaluated: the sharp families declare `t >= 1` as their domain
//! and all integrals start beyond it.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A smooth radial function with analytic first and second derivatives.
pub trait RadialFn {
    /// Smallest radius at which the function may be evaluated.
    fn min_radius(&self) -> f64;

    fn value(&self, t: f64) -> f64;
    fn d1(&self, t: f64) -> f64;
    fn d2(&self, t: f64) -> f64;

    fn ln_value(&self, t: f64) -> f64 {
        self.value(t).ln()
    }

    fn ln_d1(&self, t: f64) -> f64 {
        self.d1(t).ln()
    }

    /// `f'(t) / f(t)`.
    fn log_derivative(&self, t: f64) -> f64 {
        self.d1(t) / self.value(t)
    }

    /// `f''(t) / f(t)`.
    fn d2_ratio(&self, t: f64) -> f64 {
        self.d2(t) / self.value(t)
    }

    /// `ln(f(t) - level)`, or `-inf` where `f(t) <= level`.
    fn ln_excess(&self, t: f64, level: f64) -> f64 {
        let w = self.value(t) - level;
        if w > 0.0 {
            w.ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    /// `ln(f(t0 + delta) - f(t0))` for `delta > 0`, accurate relative to
    /// `delta` when `delta` is far below the resolution of `t0`.
    fn ln_increment(&self, t0: f64, delta: f64) -> f64 {
        let w = self.value(t0 + delta) - self.value(t0);
        if w > 0.0 {
            w.ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Radius where an increasing function reaches `level`, `Some(0.0)`
    /// if it exceeds `level` everywhere. `None` means "not known in closed
    /// form".
    fn level_crossing(&self, _level: f64) -> Option<f64> {
        None
    }
}

/// `ln(e^x - 1)` for `x > 0` without overflow.
pub(crate) fn ln_expm1(x: f64) -> f64 {
    if x > 30.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

/// `ln(exp(ln_f) - level)` written as `ln(level) + ln(expm1(ln_f - ln(level)))`
/// so that neither term overflows.
fn ln_excess_from_log(ln_f: f64, level: f64) -> f64 {
    if level > 0.0 {
        let x = ln_f - level.ln();
        if x > 0.0 {
            level.ln() + ln_expm1(x)
        } else {
            f64::NEG_INFINITY
        }
    } else if level == 0.0 {
        ln_f
    } else {
        ln_f + (-level * (-ln_f).exp()).ln_1p()
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ProfileFamily {
    /// `v(t) = t^c`.
    PowerLaw { c: f64 },
    /// `v(t) = exp(c t^beta)`.
    ExpPower { c: f64, beta: f64 },
    /// `v(t) = slope * t + offset`.
    Affine { slope: f64, offset: f64 },
    /// `v(t) = t^{(p-n)/(p-1)} - 1`, p-harmonic on `R^n` minus the origin.
    PHarmonicRn { n: u32, p: f64 },
}

/// An increasing radial profile `v` together with its valid domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub family: ProfileFamily,
    pub min_radius: f64,
}

impl RadialProfile {
    pub fn power_law(c: f64) -> Result<Self> {
        check_positive("c", c)?;
        Ok(Self {
            family: ProfileFamily::PowerLaw { c },
            min_radius: 1.0,
        })
    }

    pub fn exp_power(c: f64, beta: f64) -> Result<Self> {
        check_positive("c", c)?;
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                reason: "must lie in (0, 1]",
            });
        }
        Ok(Self {
            family: ProfileFamily::ExpPower { c, beta },
            min_radius: 1.0,
        })
    }

    pub fn affine(slope: f64, offset: f64) -> Result<Self> {
        check_positive("slope", slope)?;
        Ok(Self {
            family: ProfileFamily::Affine { slope, offset },
            min_radius: f64::MIN_POSITIVE,
        })
    }

    pub fn p_harmonic_rn(n: u32, p: f64) -> Result<Self> {
        if !(p > n as f64 && p.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "the R^n p-harmonic profile is increasing only for p > n",
            });
        }
        Ok(Self {
            family: ProfileFamily::PHarmonicRn { n, p },
            min_radius: f64::MIN_POSITIVE,
        })
    }

    pub fn with_min_radius(mut self, min_radius: f64) -> Self {
        self.min_radius = min_radius;
        self
    }

    fn rn_exponent(n: u32, p: f64) -> f64 {
        (p - n as f64) / (p - 1.0)
    }
}

impl RadialFn for RadialProfile {
    fn min_radius(&self) -> f64 {
        self.min_radius
    }

    fn value(&self, t: f64) -> f64 {
        match self.family {
            ProfileFamily::PowerLaw { c } => t.powf(c),
            ProfileFamily::ExpPower { c, beta } => (c * t.powf(beta)).exp(),
            ProfileFamily::Affine { slope, offset } => slope * t + offset,
            ProfileFamily::PHarmonicRn { n, p } => t.powf(Self::rn_exponent(n, p)) - 1.0,
        }
    }

    fn d1(&self, t: f64) -> f64 {
        match self.family {
            ProfileFamily::PowerLaw { c } => c * t.powf(c - 1.0),
            ProfileFamily::ExpPower { c, beta } => c * beta * t.powf(beta - 1.0) * (c * t.powf(beta)).exp(),
            ProfileFamily::Affine { slope, .. } => slope,
            ProfileFamily::PHarmonicRn { n, p } => {
                let a = Self::rn_exponent(n, p);
                a * t.powf(a - 1.0)
            }
        }
    }

    fn d2(&self, t: f64) -> f64 {
        match self.family {
            ProfileFamily::PowerLaw { c } => c * (c - 1.0) * t.powf(c - 2.0),
            ProfileFamily::ExpPower { .. } => self.d2_ratio(t) * self.value(t),
            ProfileFamily::Affine { .. } => 0.0,
            ProfileFamily::PHarmonicRn { n, p } => {
                let a = Self::rn_exponent(n, p);
                a * (a - 1.0) * t.powf(a - 2.0)
            }
        }
    }

    fn ln_value(&self, t: f64) -> f64 {
        match self.family {
            ProfileFamily::PowerLaw { c } => c * t.ln(),
            ProfileFamily::ExpPower { c, beta } => c * t.powf(beta),
            _ => self.value(t).ln(),
        }
    }

    fn ln_d1(&self, t: f64) -> f64 {
        match self.family {
            ProfileFamily::PowerLaw { c } => c.ln() + (c - 1.0) * t.ln(),
            ProfileFamily::ExpPower { c, beta } => (c * beta).ln() + (beta - 1.0) * t.ln() + c * t.powf(beta),
            _ => self.d1(t).ln(),
        }
    }

    fn log_derivative(&self, t: f64) -> f64 {
        match self.family {
            ProfileFamily::PowerLaw { c } => c / t,
            ProfileFamily::ExpPower { c, beta } => c * beta * t.powf(beta - 1.0),
            _ => self.d1(t) / self.value(t),
        }
    }

    fn d2_ratio(&self, t: f64) -> f64 {
        match self.family {
            ProfileFamily::PowerLaw { c } => c * (c - 1.0) / (t * t),
            ProfileFamily::ExpPower { c, beta } => {
                let rho = c * beta * t.powf(beta - 1.0);
                rho * rho + c * beta * (beta - 1.0) * t.powf(beta - 2.0)
            }
            _ => self.d2(t) / self.value(t),
        }
    }

    fn ln_excess(&self, t: f64, level: f64) -> f64 {
        match self.family {
            ProfileFamily::PowerLaw { .. } | ProfileFamily::ExpPower { .. } => {
                ln_excess_from_log(self.ln_value(t), level)
            }
            _ => {
                let w = self.value(t) - level;
                if w > 0.0 {
                    w.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    fn ln_increment(&self, t0: f64, delta: f64) -> f64 {
        // log-ratio ln((t0 + delta) / t0)
        let lr = (delta / t0).ln_1p();
        match self.family {
            ProfileFamily::PowerLaw { c } => c * t0.ln() + (c * lr).exp_m1().ln(),
            ProfileFamily::ExpPower { c, beta } => {
                let base = c * t0.powf(beta);
                base + ln_expm1(base * (beta * lr).exp_m1())
            }
            ProfileFamily::Affine { slope, .. } => (slope * delta).ln(),
            ProfileFamily::PHarmonicRn { n, p } => {
                let a = Self::rn_exponent(n, p);
                a * t0.ln() + (a * lr).exp_m1().ln()
            }
        }
    }

    fn level_crossing(&self, level: f64) -> Option<f64> {
        let t = match self.family {
            ProfileFamily::PowerLaw { c } => {
                if level <= 0.0 {
                    0.0
                } else {
                    level.powf(1.0 / c)
                }
            }
            ProfileFamily::ExpPower { c, beta } => {
                if level <= 1.0 {
                    0.0
                } else {
                    (level.ln() / c).powf(1.0 / beta)
                }
            }
            ProfileFamily::Affine { slope, offset } => ((level - offset) / slope).max(0.0),
            ProfileFamily::PHarmonicRn { n, p } => {
                if level <= -1.0 {
                    0.0
                } else {
                    (level + 1.0).powf(1.0 / Self::rn_exponent(n, p))
                }
            }
        };
        Some(t)
    }
}

/// Warp function `g` of a model manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Warp {
    /// `g(t) = t^exponent`, declared for `t >= 1`.
    PowerLaw { exponent: f64 },
    /// `g(t) = exp(a t^beta)`, declared for `t >= 1`.
    ExpPower { a: f64, beta: f64 },
    /// Flat `R^n`: `g(t) = t^{n-1}`.
    Euclidean { n: u32 },
}

impl RadialFn for Warp {
    fn min_radius(&self) -> f64 {
        match self {
            Warp::PowerLaw { .. } | Warp::ExpPower { .. } => 1.0,
            Warp::Euclidean { .. } => f64::MIN_POSITIVE,
        }
    }

    fn value(&self, t: f64) -> f64 {
        self.ln_value(t).exp()
    }

    fn d1(&self, t: f64) -> f64 {
        self.log_derivative(t) * self.value(t)
    }

    fn d2(&self, t: f64) -> f64 {
        match *self {
            Warp::PowerLaw { exponent: e } => e * (e - 1.0) * t.powf(e - 2.0),
            Warp::ExpPower { a, beta } => {
                let rho = a * beta * t.powf(beta - 1.0);
                (rho * rho + a * beta * (beta - 1.0) * t.powf(beta - 2.0)) * self.value(t)
            }
            Warp::Euclidean { n } => {
                let e = n as f64 - 1.0;
                e * (e - 1.0) * t.powf(e - 2.0)
            }
        }
    }

    fn ln_value(&self, t: f64) -> f64 {
        match *self {
            Warp::PowerLaw { exponent } => exponent * t.ln(),
            Warp::ExpPower { a, beta } => a * t.powf(beta),
            Warp::Euclidean { n } => (n as f64 - 1.0) * t.ln(),
        }
    }

    fn log_derivative(&self, t: f64) -> f64 {
        match *self {
            Warp::PowerLaw { exponent } => exponent / t,
            Warp::ExpPower { a, beta } => a * beta * t.powf(beta - 1.0),
            Warp::Euclidean { n } => (n as f64 - 1.0) / t,
        }
    }
}

/// Area of the unit sphere in `R^n`, `2 pi^{n/2} / Gamma(n/2)`.
pub fn unit_sphere_area(n: u32) -> f64 {
    // Gamma(n/2) by the recurrence from Gamma(1) or Gamma(1/2).
    let (mut gamma, mut x) = if n.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let half_n = n as f64 / 2.0;
    while x < half_n {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(half_n) / gamma
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelManifold {
    pub warp: Warp,
    /// `omega`: the sphere of radius `s` has area `omega * g(s)`.
    pub sphere_factor: f64,
}

impl ModelManifold {
    /// A model surface: `omega = 2 pi`.
    pub fn surface(warp: Warp) -> Self {
        Self {
            warp,
            sphere_factor: 2.0 * PI,
        }
    }

    pub fn euclidean(n: u32) -> Self {
        Self {
            warp: Warp::Euclidean { n },
            sphere_factor: unit_sphere_area(n),
        }
    }

    pub fn with_sphere_factor(mut self, omega: f64) -> Result<Self> {
        check_positive("sphere_factor", omega)?;
        self.sphere_factor = omega;
        Ok(self)
    }

    /// `ln(omega g(t))`.
    pub fn ln_sphere_area(&self, t: f64) -> f64 {
        self.sphere_factor.ln() + self.warp.ln_value(t)
    }
}

/// A positive potential `V(r)` with declared asymptotics `r^mu V(r) -> lambda`.
#[derive(Clone)]
pub struct Potential {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    lambda: f64,
    mu: f64,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("lambda", &self.lambda)
            .field("mu", &self.mu)
            .finish_non_exhaustive()
    }
}

impl Potential {
    pub fn new<F>(eval: F, lambda: f64, mu: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            lambda,
            mu,
        }
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0, 0.0, 0.0)
    }

    pub fn constant(level: f64) -> Self {
        Self::new(move |_| level, level, 0.0)
    }

    /// The potential that makes the sharp profile an exact solution.
    pub fn sharp(p: f64, mu: f64, a: f64, c: f64) -> Result<Self> {
        check_sharp_inputs(p, mu, a, c)?;
        let lambda = sharp_lambda(p, mu, a, c);
        Ok(Self::new(move |r| sharp_value(p, mu, a, c, r), lambda, mu))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let inner = Arc::clone(&self.eval);
        Self {
            eval: Arc::new(move |r| factor * inner(r)),
            lambda: factor * self.lambda,
            mu: self.mu,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        (self.eval)(r)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

fn check_sharp_inputs(p: f64, mu: f64, a: f64, c: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "must satisfy p > 1",
        });
    }
    if !(0.0..=p).contains(&mu) {
        return Err(Error::InvalidParameter {
            name: "mu",
            value: mu,
            reason: "must lie in [0, p]",
        });
    }
    if !(c > 0.0 && (p - 1.0) * c + a > 0.0) {
        return Err(Error::Precondition(format!(
            "(a, c) = ({a}, {c}) must satisfy c > 0 and (p - 1) c + a > 0"
        )));
    }
    Ok(())
}

/// `lambda = beta^p c^{p-1} ((p-1) c + a)`; at `mu = p` the factor
/// `beta^p` is dropped.
pub(crate) fn sharp_lambda(p: f64, mu: f64, a: f64, c: f64) -> f64 {
    let base = c.powf(p - 1.0) * ((p - 1.0) * c + a);
    if mu == p {
        base
    } else {
        (1.0 - mu / p).powf(p) * base
    }
}

fn sharp_value(p: f64, mu: f64, a: f64, c: f64, r: f64) -> f64 {
    if mu == p {
        return c.powf(p - 1.0) * ((p - 1.0) * c + a) / r.powf(p);
    }
    let beta = 1.0 - mu / p;
    let bracket = (p - 1.0) * (1.0 + (beta - 1.0) / (c * beta * r.powf(beta))) * c + a;
    bracket * beta.powf(p) * c.powf(p - 1.0) / r.powf(mu)
}

/// The potential making `v = exp(c r^beta)` on `g = exp(a r^beta)`
/// (`mu < p`), or `v = r^c` on `g = r^{a+p-1}` (`mu = p`), an exact
/// solution of `Delta_p u = V u^{p-1}`.
pub fn potential_sharp(p: f64, mu: f64, a: f64, c: f64, r: f64) -> Result<f64> {
    check_sharp_inputs(p, mu, a, c)?;
    if !(r >= 1.0) {
        return Err(Error::Domain {
            what: "r",
            value: r,
            reason: "sharp potentials are declared on r >= 1".into(),
        });
    }
    Ok(sharp_value(p, mu, a, c, r))
}

/// Smallest radius `>= 1` beyond which the sharp potential is positive.
///
/// For `0 < mu < p` the correction term is negative and decays like
/// `r^{-beta}`; `V(r) > 0` iff `r^beta > (p-1)(1-beta) / (beta((p-1)c + a))`.
pub fn sharp_positive_radius(p: f64, mu: f64, a: f64, c: f64) -> Result<f64> {
    check_sharp_inputs(p, mu, a, c)?;
    if mu == 0.0 || mu == p {
        return Ok(1.0);
    }
    let beta = 1.0 - mu / p;
    let threshold = (p - 1.0) * (1.0 - beta) / (beta * ((p - 1.0) * c + a));
    Ok(threshold.powf(1.0 / beta).max(1.0))
}

fn check_domain<W: RadialFn + ?Sized, P: RadialFn + ?Sized>(warp: &W, profile: &P, r: f64) -> Result<()> {
    let lo = warp.min_radius().max(profile.min_radius());
    if r.is_finite() && r >= lo {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "r",
            value: r,
            reason: format!("outside the declared domain r >= {lo}"),
        })
    }
}

/// `Delta_p u` at radius `r` for `u = v(r)`.
pub fn p_laplacian_radial<P: RadialFn + ?Sized>(model: &ModelManifold, profile: &P, p: f64, r: f64) -> Result<f64> {
    check_domain(&model.warp, profile, r)?;
    let dv = profile.d1(r);
    if !(dv > 0.0) {
        return Err(Error::Domain {
            what: "v'(r)",
            value: dv,
            reason: "only increasing radial profiles are supported".into(),
        });
    }
    Ok((p - 1.0) * dv.powf(p - 2.0) * profile.d2(r) + model.warp.log_derivative(r) * dv.powf(p - 1.0))
}

/// `Delta_p u / v^{p-1}`, finite wherever `v > 0` even when `v` overflows.
pub fn p_laplacian_scaled<P: RadialFn + ?Sized>(model: &ModelManifold, profile: &P, p: f64, r: f64) -> Result<f64> {
    check_domain(&model.warp, profile, r)?;
    let rho = profile.log_derivative(r);
    if !(rho > 0.0) {
        return Err(Error::Domain {
            what: "v'(r)/v(r)",
            value: rho,
            reason: "requires v > 0 and v' > 0".into(),
        });
    }
    Ok((p - 1.0) * rho.powf(p - 2.0) * profile.d2_ratio(r) + model.warp.log_derivative(r) * rho.powf(p - 1.0))
}

fn five_point(f: impl Fn(f64) -> f64, r: f64, h: f64) -> (f64, f64, f64) {
    let (m2, m1, z, p1, p2) = (f(r - 2.0 * h), f(r - h), f(r), f(r + h), f(r + 2.0 * h));
    let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    let d2 = (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * h * h);
    (z, d1, d2)
}

/// Recomputes the radial p-Laplacian from 5-point central differences of
/// `v` and of `ln g` and returns `|fd - analytic| / max(1, |analytic|)`.
///
/// Where `v > 0` on the whole stencil the comparison is made on
/// `Delta_p u / v^{p-1}`, differencing `v(t)/v(r)`; otherwise on
/// `Delta_p u` itself.
pub fn fd_cross_check<P: RadialFn + ?Sized>(model: &ModelManifold, profile: &P, p: f64, r: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Domain {
            what: "h",
            value: h,
            reason: "step must be positive".into(),
        });
    }
    check_domain(&model.warp, profile, r - 2.0 * h).map_err(|_| Error::Domain {
        what: "h",
        value: h,
        reason: format!("stencil r - 2h = {} leaves the valid domain", r - 2.0 * h),
    })?;
    check_domain(&model.warp, profile, r + 2.0 * h)?;

    let ln_g = |t: f64| model.warp.ln_value(t);
    let (_, g_ratio, _) = five_point(ln_g, r, h);

    let positive = (-2..=2).all(|i| profile.value(r + i as f64 * h) > 0.0);
    let (fd, analytic) = if positive {
        let ln_vr = profile.ln_value(r);
        let (_, rho, ratio2) = five_point(|t| (profile.ln_value(t) - ln_vr).exp(), r, h);
        let fd = (p - 1.0) * rho.powf(p - 2.0) * ratio2 + g_ratio * rho.powf(p - 1.0);
        (fd, p_laplacian_scaled(model, profile, p, r)?)
    } else {
        let (_, dv, d2v) = five_point(|t| profile.value(t), r, h);
        let fd = (p - 1.0) * dv.powf(p - 2.0) * d2v + g_ratio * dv.powf(p - 1.0);
        (fd, p_laplacian_radial(model, profile, p, r)?)
    };
    Ok((fd - analytic).abs() / analytic.abs().max(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// Largest signed residual over the grid; `<= tol` certifies a subsolution.
    pub max_signed: f64,
    pub max_abs: f64,
    pub worst_radius: f64,
}

/// Signed relative residual `(V v^{p-1} - Delta_p u) / (V v^{p-1})` over a
/// radius grid; where `V = 0` the absolute residual `-Delta_p u` is used.
pub fn subsolution_residual<P: RadialFn + ?Sized>(
    model: &ModelManifold,
    profile: &P,
    potential: &Potential,
    p: f64,
    s0: f64,
    grid: &[f64],
) -> Result<Residual> {
    if grid.is_empty() {
        return Err(Error::Precondition("residual grid is empty".into()));
    }
    let mut out = Residual {
        max_signed: f64::NEG_INFINITY,
        max_abs: 0.0,
        worst_radius: grid[0],
    };
    for &r in grid {
        check_domain(&model.warp, profile, r)?;
        if profile.ln_excess(r, s0) == f64::NEG_INFINITY {
            return Err(Error::Domain {
                what: "r",
                value: r,
                reason: format!("v(r) <= s0 = {s0}: outside the superlevel set"),
            });
        }
        let v_pot = potential.value(r);
        let res = if v_pot != 0.0 {
            let scaled = p_laplacian_scaled(model, profile, p, r)?;
            (v_pot - scaled) / v_pot
        } else {
            -p_laplacian_radial(model, profile, p, r)?
        };
        if res > out.max_signed {
            out.max_signed = res;
        }
        if res.abs() > out.max_abs || res.is_nan() {
            out.max_abs = res.abs();
            out.worst_radius = r;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct CorruptedSecond<'a>(&'a RadialProfile, f64);

    impl RadialFn for CorruptedSecond<'_> {
        fn min_radius(&self) -> f64 {
            self.0.min_radius()
        }
        fn value(&self, t: f64) -> f64 {
            self.0.value(t)
        }
        fn d1(&self, t: f64) -> f64 {
            self.0.d1(t)
        }
        fn d2(&self, t: f64) -> f64 {
            self.1 * self.0.d2(t)
        }
        fn ln_value(&self, t: f64) -> f64 {
            self.0.ln_value(t)
        }
        fn log_derivative(&self, t: f64) -> f64 {
            self.0.log_derivative(t)
        }
        fn d2_ratio(&self, t: f64) -> f64 {
            self.1 * self.0.d2_ratio(t)
        }
    }

    #[test]
    fn rn_profile_is_p_harmonic() {
        let model = ModelManifold::euclidean(2);
        let profile = RadialProfile::p_harmonic_rn(2, 3.0).unwrap();
        let lap = p_laplacian_radial(&model, &profile, 3.0, 2.0).unwrap();
        assert!(lap.abs() < 1e-15);
    }

    #[test]
    fn flat_linear_profile() {
        let model = ModelManifold::surface(Warp::PowerLaw { exponent: 1.0 });
        let profile = RadialProfile::power_law(1.0).unwrap();
        let lap = p_laplacian_radial(&model, &profile, 2.0, 5.0).unwrap();
        assert!((lap - 0.2).abs() < 1e-15);
    }

    #[test]
    fn exponential_example_solves_equation() {
        // a = 0, c = 1, beta = 1, p = 2: Delta u = e^r and V = 1.
        let model = ModelManifold::surface(Warp::ExpPower { a: 0.0, beta: 1.0 });
        let profile = RadialProfile::exp_power(1.0, 1.0).unwrap();
        let lap = p_laplacian_radial(&model, &profile, 2.0, 3.0).unwrap();
        assert!((lap - 3f64.exp()).abs() < 1e-12);
        let v = potential_sharp(2.0, 0.0, 0.0, 1.0, 3.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!((lap - v * profile.value(3.0)).abs() < 1e-12);
    }

    #[test]
    fn laplacian_domain_errors() {
        let model = ModelManifold::surface(Warp::PowerLaw { exponent: 1.0 });
        let profile = RadialProfile::power_law(2.0).unwrap();
        assert!(matches!(
            p_laplacian_radial(&model, &profile, 2.0, 0.5),
            Err(Error::Domain { .. })
        ));
        let affine = RadialProfile::affine(1.0, 0.0).unwrap();
        assert!(p_laplacian_radial(&model, &affine, 2.0, 0.5).is_err());
    }

    #[test]
    fn non_increasing_profiles_are_rejected() {
        assert!(RadialProfile::power_law(-1.0).is_err());
        assert!(RadialProfile::exp_power(0.0, 1.0).is_err());
        assert!(RadialProfile::exp_power(1.0, 1.5).is_err());
        assert!(RadialProfile::affine(-1.0, 0.0).is_err());
        assert!(RadialProfile::p_harmonic_rn(3, 2.0).is_err());
    }

    #[test]
    fn sharp_potential_examples() {
        // beta = 1 removes the correction: V = ((p-1)c + a) c^{p-1} = 1.
        for r in [1.0, 7.0, 1e4] {
            assert_eq!(potential_sharp(2.0, 0.0, 0.0, 1.0, r).unwrap(), 1.0);
        }
        assert!((potential_sharp(2.0, 2.0, 0.0, 1.0, 10.0).unwrap() - 0.01).abs() < 1e-17);
        assert!(potential_sharp(2.0, 0.0, -2.0, 1.0, 2.0).is_err());
        assert!(potential_sharp(2.0, 0.0, 0.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn sharp_potential_asymptotics() {
        let (p, mu, a, c) = (3.0, 1.5, 1.0, 0.5);
        let beta = 1.0 - mu / p;
        let lambda = sharp_lambda(p, mu, a, c);
        for r in [1e3f64, 1e6] {
            let scaled = r.powf(mu) * potential_sharp(p, mu, a, c, r).unwrap();
            let bound = beta / (c * beta * r.powf(beta)) * (p - 1.0) * c / ((p - 1.0) * c + a);
            let rel = (scaled - lambda).abs() / lambda;
            assert!(rel <= bound * (1.0 + 1e-9), "r = {r}: {rel} > {bound}");
        }
    }

    #[test]
    fn positivity_radius() {
        let (p, mu, a, c) = (3.0, 1.5, -1.0, 1.0);
        let r0 = sharp_positive_radius(p, mu, a, c).unwrap();
        assert!((r0 - 4.0).abs() < 1e-12);
        assert!(potential_sharp(p, mu, a, c, 3.9).unwrap() < 0.0);
        assert!(potential_sharp(p, mu, a, c, 4.1).unwrap() > 0.0);
        assert_eq!(sharp_positive_radius(2.0, 0.0, -1.0, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn fd_agrees_for_builtin_families() {
        let cases: Vec<(ModelManifold, RadialProfile, f64)> = vec![
            (
                ModelManifold::surface(Warp::ExpPower { a: 1.0, beta: 0.5 }),
                RadialProfile::exp_power(2.0, 0.5).unwrap(),
                2.0,
            ),
            (
                ModelManifold::surface(Warp::PowerLaw { exponent: 1.5 }),
                RadialProfile::power_law(1.3).unwrap(),
                2.5,
            ),
            (
                ModelManifold::euclidean(3),
                RadialProfile::affine(2.0, 1.0).unwrap(),
                1.7,
            ),
            (
                ModelManifold::euclidean(2),
                RadialProfile::p_harmonic_rn(2, 3.0).unwrap(),
                3.0,
            ),
        ];
        for (model, profile, p) in cases {
            for r in [3.0, 8.0, 20.0] {
                let dev = fd_cross_check(&model, &profile, p, r, 1e-4 * r).unwrap();
                assert!(dev <= 1e-6, "{profile:?} r={r}: {dev}");
            }
        }
    }

    #[test]
    fn fd_detects_corrupted_second_derivative() {
        let model = ModelManifold::surface(Warp::PowerLaw { exponent: 1.0 });
        let base = RadialProfile::power_law(3.0).unwrap();
        let bad = CorruptedSecond(&base, 1.1);
        let (p, r) = (2.5, 2.0);
        let dev = fd_cross_check(&model, &bad, p, r, 1e-4 * r).unwrap();
        // analytic (corrupted) value and the injected error, both scaled by v^{p-1}
        let rho = base.log_derivative(r);
        let injected = 0.1 * (p - 1.0) * rho.powf(p - 2.0) * base.d2_ratio(r);
        let reference = p_laplacian_scaled(&model, &bad, p, r).unwrap();
        let expected = injected / reference.abs().max(1.0);
        assert!((dev - expected).abs() < 1e-6 * expected.max(1.0), "{dev} vs {expected}");
    }

    #[test]
    fn fd_step_must_stay_in_domain() {
        let model = ModelManifold::surface(Warp::PowerLaw { exponent: 1.0 });
        let profile = RadialProfile::power_law(1.0).unwrap();
        assert!(matches!(
            fd_cross_check(&model, &profile, 2.0, 1.5, 0.5),
            Err(Error::Domain { what: "h", .. })
        ));
    }

    #[test]
    fn residual_of_scaled_potential() {
        let (p, a, c) = (2.0, 0.0, 1.0);
        let model = ModelManifold::surface(Warp::ExpPower { a, beta: 1.0 });
        let profile = RadialProfile::exp_power(c, 1.0).unwrap();
        let potential = Potential::sharp(p, 0.0, a, c).unwrap();
        let grid: Vec<f64> = (0..50).map(|i| 2.0 + 20.0 * i as f64).collect();
        let exact = subsolution_residual(&model, &profile, &potential, p, 2.0, &grid).unwrap();
        assert!(exact.max_abs < 1e-12);
        let scaled = subsolution_residual(&model, &profile, &potential.scaled(1.1), p, 2.0, &grid).unwrap();
        assert!((scaled.max_signed - 0.1 / 1.1).abs() < 1e-12);
    }

    #[test]
    fn residual_of_p_harmonic_profile() {
        let model = ModelManifold::euclidean(2);
        let profile = RadialProfile::p_harmonic_rn(2, 3.0).unwrap();
        let grid: Vec<f64> = (1..40).map(|i| 1.5 + 2.5 * i as f64).collect();
        let res = subsolution_residual(&model, &profile, &Potential::zero(), 3.0, 0.0, &grid).unwrap();
        assert!(res.max_abs < 1e-15);
    }

    #[test]
    fn residual_preconditions() {
        let model = ModelManifold::euclidean(2);
        let profile = RadialProfile::p_harmonic_rn(2, 3.0).unwrap();
        assert!(subsolution_residual(&model, &profile, &Potential::zero(), 3.0, 0.0, &[]).is_err());
        // v(0.5) < 0 = s0
        assert!(subsolution_residual(&model, &profile, &Potential::zero(), 3.0, 0.0, &[0.5]).is_err());
    }

    #[test]
    fn unit_sphere_areas() {
        assert!((unit_sphere_area(1) - 2.0).abs() < 1e-15);
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn increment_resolves_tiny_offsets() {
        let profile = RadialProfile::exp_power(2.0, 0.5).unwrap();
        let t0 = 3.7;
        for delta in [1e-20, 1e-12, 1e-3] {
            // v'(t0) delta to second order
            let ln_first = profile.ln_d1(t0) + f64::ln(delta);
            assert!((profile.ln_increment(t0, delta) - ln_first).abs() < 1e-2 * delta.max(1e-15).sqrt());
        }
        let direct = (profile.value(t0 + 2.0) - profile.value(t0)).ln();
        assert!((profile.ln_increment(t0, 2.0) - direct).abs() < 1e-13);
        for profile in [
            RadialProfile::power_law(1.7).unwrap(),
            RadialProfile::affine(2.0, -1.0).unwrap(),
            RadialProfile::p_harmonic_rn(2, 3.0).unwrap(),
        ] {
            let direct = (profile.value(t0 + 0.5) - profile.value(t0)).ln();
            assert!((profile.ln_increment(t0, 0.5) - direct).abs() < 1e-13, "{profile:?}");
            let tiny = profile.ln_increment(t0, 1e-30);
            assert!(
                (tiny - (profile.ln_d1(t0) + 1e-30f64.ln())).abs() < 1e-12,
                "{profile:?}"
            );
        }
    }

    #[test]
    fn excess_logarithm_matches_direct_evaluation() {
        let profile = RadialProfile::exp_power(1.0, 0.5).unwrap();
        for t in [5.0, 9.0, 40.0] {
            let direct = (profile.value(t) - 2.0).ln();
            assert!((profile.ln_excess(t, 2.0) - direct).abs() < 1e-12);
        }
        assert_eq!(profile.ln_excess(0.25, 2.0), f64::NEG_INFINITY);
        // no overflow far out
        assert!((profile.ln_excess(1e8, 2.0) - 1e4).abs() < 1e-9);
    }
}
