//! Extremal examples attaining equality in the growth estimates.
//!
//! For `mu < p`, with `beta = 1 - mu/p`, the pair `g = exp(a t^beta)`,
//! `v = exp(c t^beta)` solves `Delta_p v = V v^{p-1}` for the potential of
//! [`potential_sharp`](crate::radial::potential_sharp), and the ball
//! integrals of `(v - s0)^q` grow like `exp((a + qc) R^beta)`. For
//! `mu = p` the power pair `g = t^{a+p-1}`, `v = t^c` gives polynomial
//! growth of order `a + qc + p`. Equality with the lower bounds requires
//! `(a, c)` on the ray `(p-1) a = (q - p(p-1)) c`.

use crate::error::{Error, Result};
use crate::params::{compute_c0, Params};
use crate::radial::{sharp_lambda, sharp_positive_radius, ModelManifold, Potential, RadialFn, RadialProfile, Warp};

/// Relative tolerance for accepting a user-supplied `(a, c)` on the extremal ray.
const RAY_TOL: f64 = 1e-12;

/// Feasible `(a, c)` for the three ranges of `q` relative to `p(p-1)`.
pub fn choose_ac(p: f64, q: f64) -> Result<(f64, f64)> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "must satisfy p > 1",
        });
    }
    if !(q > p - 1.0 && q.is_finite()) {
        return Err(Error::Precondition(format!("q = {q} must exceed p - 1 = {}", p - 1.0)));
    }
    let knee = p * (p - 1.0);
    Ok(if q < knee {
        (-1.0, (p - 1.0) / (knee - q))
    } else if q == knee {
        (0.0, 1.0)
    } else {
        (1.0, (p - 1.0) / (q - knee))
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SharpOptions {
    /// Any other point of the extremal ray.
    pub ac: Option<(f64, f64)>,
    /// Truncation level; must exceed `v(1)`. Defaults to `2 v(1)`.
    pub s0: Option<f64>,
    /// Sphere factor `omega`; defaults to `2 pi`.
    pub sphere_factor: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SharpExample {
    /// `lambda` is derived from `(a, c)`, `k = 1`.
    pub params: Params,
    pub a: f64,
    pub c: f64,
    pub model: ModelManifold,
    pub profile: RadialProfile,
    pub potential: Potential,
    pub s0: f64,
    /// `v(t0) = s0`.
    pub t0: f64,
    /// Exact limit of the normalised growth functional.
    pub expected_rate: f64,
    /// Smallest radius `>= 1` beyond which `V > 0`.
    pub positive_radius: f64,
}

impl SharpExample {
    pub fn beta(&self) -> f64 {
        self.params.derive_exponents().beta
    }

    pub fn is_critical(&self) -> bool {
        self.params.is_critical()
    }

    /// The sharp growth bound the example attains: `C0`, or `C0 + p` when `mu = p`.
    pub fn sharp_bound(&self) -> f64 {
        let c0 = compute_c0(&self.params);
        if self.is_critical() {
            c0 + self.params.p()
        } else {
            c0
        }
    }

    /// `V >= 0` on the whole superlevel set.
    pub fn potential_nonnegative_on_superlevel_set(&self) -> bool {
        self.positive_radius <= self.t0
    }
}

pub fn build_sharp_example(p: f64, q: f64, mu: f64) -> Result<SharpExample> {
    build_sharp_example_with(p, q, mu, &SharpOptions::default())
}

pub fn build_sharp_example_with(p: f64, q: f64, mu: f64, opts: &SharpOptions) -> Result<SharpExample> {
    let (a, c) = match opts.ac {
        None => choose_ac(p, q)?,
        Some((a, c)) => {
            choose_ac(p, q)?;
            let lhs = (p - 1.0) * a;
            let rhs = (q - p * (p - 1.0)) * c;
            let scale = lhs.abs().max(rhs.abs()).max(c.abs());
            if (lhs - rhs).abs() > RAY_TOL * scale {
                return Err(Error::Precondition(format!(
                    "(a, c) = ({a}, {c}) is off the extremal ray (p-1) a = (q - p(p-1)) c"
                )));
            }
            (a, c)
        }
    };
    if !(c > 0.0 && (p - 1.0) * c + a > 0.0) {
        return Err(Error::Precondition(format!(
            "(a, c) = ({a}, {c}) must satisfy c > 0 and (p - 1) c + a > 0"
        )));
    }
    if !(0.0..=p).contains(&mu) {
        return Err(Error::InvalidParameter {
            name: "mu",
            value: mu,
            reason: "must lie in [0, p]",
        });
    }

    let critical = mu == p;
    let beta = 1.0 - mu / p;
    let (warp, profile) = if critical {
        (Warp::PowerLaw { exponent: a + p - 1.0 }, RadialProfile::power_law(c)?)
    } else {
        (Warp::ExpPower { a, beta }, RadialProfile::exp_power(c, beta)?)
    };
    let mut model = ModelManifold::surface(warp);
    if let Some(omega) = opts.sphere_factor {
        model = model.with_sphere_factor(omega)?;
    }

    let v1 = profile.value(1.0);
    let s0 = opts.s0.unwrap_or(2.0 * v1);
    if !(s0 > v1 && s0.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "s0",
            value: s0,
            reason: "must exceed v(1) so that the superlevel set avoids the splice region",
        });
    }
    let t0 = if critical {
        s0.powf(1.0 / c)
    } else {
        (s0.ln() / c).powf(1.0 / beta)
    };

    let lambda = sharp_lambda(p, mu, a, c);
    let params = Params::new(p, q, mu, lambda, 1.0)?;
    let expected_rate = if critical { a + q * c + p } else { (a + q * c) * beta };

    Ok(SharpExample {
        params,
        a,
        c,
        model,
        profile,
        potential: Potential::sharp(p, mu, a, c)?,
        s0,
        t0,
        expected_rate,
        positive_radius: sharp_positive_radius(p, mu, a, c)?,
    })
}

/// The example grid used for verification: `p in {1.5, 2, 3}`, one `q` per
/// `(a, c)` branch, `mu in {0, p/2, p}`.
///
/// Every `q` gives `c >= 1`, and for `p = 3` the lower branch uses `q = 5`
/// so that `V > 0` on the whole superlevel set at `mu = p/2`.
pub fn verification_grid() -> Vec<(f64, f64, f64)> {
    let branches: [(f64, [f64; 3]); 3] = [
        (1.5, [0.625, 0.75, 1.25]),
        (2.0, [1.5, 2.0, 3.0]),
        (3.0, [5.0, 6.0, 8.0]),
    ];
    let mut grid = Vec::with_capacity(27);
    for (p, qs) in branches {
        for q in qs {
            for mu in [0.0, 0.5 * p, p] {
                grid.push((p, q, mu));
            }
        }
    }
    grid
}
