//! Parameter space, sharp growth constants and the comparison constants
//! used when integrating the growth differential inequality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::bracketed_root;

/// Relative bracket width at which [`solve_c1`] stops.
pub const C1_RTOL: f64 = 1e-13;

/// The quintuple `(p, q, mu, lambda, k)`.
///
/// `p > 1` is the operator exponent, `q > p - 1` the integral exponent,
/// `mu` in `[0, p]` the decay exponent of the potential, `lambda > 0` its
/// asymptotic level and `k > 0` the coercivity constant of the operator
/// (`k = 1` for the p-Laplacian).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    p: f64,
    q: f64,
    mu: f64,
    lambda: f64,
    k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedExponents {
    /// Conjugate exponent `p / (p - 1)`.
    pub p_conj: f64,
    /// `q - p + 1`, positive.
    pub gamma: f64,
    /// `1 - mu / p`, in `[0, 1]`.
    pub beta: f64,
}

impl Params {
    pub fn new(p: f64, q: f64, mu: f64, lambda: f64, k: f64) -> Result<Self> {
        let check = |name, value: f64, ok: bool, reason| {
            if value.is_finite() && ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, value, reason })
            }
        };
        check("p", p, p > 1.0, "must satisfy p > 1")?;
        check("q", q, q > p - 1.0, "must satisfy q > p - 1")?;
        check("mu", mu, (0.0..=p).contains(&mu), "must lie in [0, p]")?;
        check("lambda", lambda, lambda > 0.0, "must be positive")?;
        check("k", k, k > 0.0, "must be positive")?;
        Ok(Self { p, q, mu, lambda, k })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// True when `mu == p`, the logarithmic-growth regime.
    pub fn is_critical(&self) -> bool {
        self.mu == self.p
    }

    pub fn derive_exponents(&self) -> DerivedExponents {
        DerivedExponents {
            p_conj: self.p / (self.p - 1.0),
            gamma: self.q - self.p + 1.0,
            beta: 1.0 - self.mu / self.p,
        }
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.p, self.q, self.mu, lambda, self.k)
    }
}

/// `C0 = p gamma^{1/p'} lambda^{1/p} / ((p-1)^{1/p'} k)`.
pub fn compute_c0(params: &Params) -> f64 {
    c0_with_level(params, params.lambda)
}

fn c0_with_level(params: &Params, level: f64) -> f64 {
    let DerivedExponents { p_conj, gamma, .. } = params.derive_exponents();
    let p = params.p;
    p * gamma.powf(1.0 / p_conj) * level.powf(1.0 / p) / ((p - 1.0).powf(1.0 / p_conj) * params.k)
}

/// The unique `C1 > p` with `C1^{1/p} (C1 - p)^{1/p'} = c0`.
///
/// The root always lies in `(max(p, c0), p + c0)`; the solver works on the
/// logarithm of the defining relation, which is strictly increasing there.
pub fn solve_c1(p: f64, c0: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "must satisfy p > 1",
        });
    }
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "C0",
            value: c0,
            reason: "must be positive and finite",
        });
    }
    let p_conj = p / (p - 1.0);
    let ln_c0 = c0.ln();
    let residual = |c: f64| c.ln() / p + (c - p).ln() / p_conj - ln_c0;
    bracketed_root(residual, p.max(c0), p + c0, C1_RTOL)
}

/// Constants of the growth argument for a relaxation `eps` of `lambda`.
///
/// `c4`, `c5`, `c6` are only defined in the critical regime `mu = p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConstants {
    pub eps: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: Option<f64>,
    pub c5: Option<f64>,
    pub c6: Option<f64>,
    /// Cutoff constant bounding the auxiliary functional by a shifted ball integral.
    #[serde(rename = "C2")]
    pub big_c2: f64,
}

pub fn comparison_constants(params: &Params, eps: f64) -> Result<ComparisonConstants> {
    if !(eps >= 0.0 && eps < params.lambda) {
        return Err(Error::Precondition(format!(
            "relaxation eps = {eps} must satisfy 0 <= eps < lambda = {}",
            params.lambda
        )));
    }
    let DerivedExponents { p_conj, gamma, .. } = params.derive_exponents();
    let (p, k) = (params.p, params.k);
    let level = params.lambda - eps;
    let pp = p * p_conj;

    let c1 = (p - 1.0).powf(1.0 / pp) * level.powf(1.0 / pp) * gamma.powf(-1.0 / pp) * k.powf(1.0 / p);
    let c2 = gamma / (level * k.powf(p_conj));
    let c3 = c0_with_level(params, level);

    let (c4, c5, c6) = if params.is_critical() {
        let c5 = solve_c1(p, c3)?;
        let c4 = (p * level).powf(1.0 / p) / c5.powf(1.0 / p);
        let c6 = (p - 1.0) * c5.powf(p_conj) / (p * level).powf(p_conj);
        (Some(c4), Some(c5), Some(c6))
    } else {
        (None, None, None)
    };

    let big_c2 = 1.0 + c2 * cutoff_prefactor(params);
    Ok(ComparisonConstants {
        eps,
        c1,
        c2,
        c3,
        c4,
        c5,
        c6,
        big_c2,
    })
}

/// `k^{pp'} (p-1)^{p-1} 4^p / (gamma min{1, gamma^{p-1}})`: the factor by
/// which `G(R + h)` dominates `h^p H(R)`.
pub fn cutoff_prefactor(params: &Params) -> f64 {
    let DerivedExponents { p_conj, gamma, .. } = params.derive_exponents();
    let p = params.p;
    params.k.powf(p * p_conj) * (p - 1.0).powf(p - 1.0) * 4f64.powf(p) / (gamma * 1f64.min(gamma.powf(p - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiouvilleVerdict {
    /// Every solution with the claimed growth vanishes identically.
    ForcedZero,
    Inconclusive,
}

/// Classifies a claimed exponential growth rate `growth` of `int_{B_R} |u|^q`
/// against the Liouville threshold `C0`; the threshold itself is excluded.
pub fn liouville_check(params: &Params, growth: f64) -> LiouvilleVerdict {
    if growth < compute_c0(params) {
        LiouvilleVerdict::ForcedZero
    } else {
        LiouvilleVerdict::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(Params::new(1.0, 2.0, 0.0, 1.0, 1.0).is_err());
        assert!(Params::new(2.0, 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(Params::new(2.0, 2.0, 2.5, 1.0, 1.0).is_err());
        assert!(Params::new(2.0, 2.0, -0.1, 1.0, 1.0).is_err());
        assert!(Params::new(2.0, 2.0, 0.0, 0.0, 1.0).is_err());
        assert!(Params::new(2.0, 2.0, 0.0, 1.0, 0.0).is_err());
        assert!(Params::new(f64::NAN, 2.0, 0.0, 1.0, 1.0).is_err());
        let err = Params::new(2.0, 0.5, 0.0, 1.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("`q`"));
    }

    #[test]
    fn derived_exponents_examples() {
        let d = Params::new(2.0, 2.0, 0.0, 1.0, 1.0).unwrap().derive_exponents();
        assert_eq!((d.p_conj, d.gamma, d.beta), (2.0, 1.0, 1.0));
        let d = Params::new(3.0, 4.0, 3.0, 1.0, 1.0).unwrap().derive_exponents();
        assert_eq!((d.p_conj, d.gamma, d.beta), (1.5, 2.0, 0.0));
        let d = Params::new(1.5, 1.0, 0.75, 1.0, 1.0).unwrap().derive_exponents();
        assert!(rel(d.p_conj, 3.0) < 1e-15);
        assert_eq!((d.gamma, d.beta), (0.5, 0.5));
    }

    #[test]
    fn c0_examples() {
        let c0 = compute_c0(&Params::new(2.0, 2.0, 0.0, 1.0, 1.0).unwrap());
        assert!(rel(c0, 2.0) < 1e-15);
        let c0 = compute_c0(&Params::new(2.0, 3.0, 0.0, 4.0, 1.0).unwrap());
        assert!(rel(c0, 4.0 * 2f64.sqrt()) < 1e-14);
        let c0 = compute_c0(&Params::new(2.0, 2.0, 0.0, 1.0, 2.0).unwrap());
        assert!(rel(c0, 1.0) < 1e-15);
    }

    #[test]
    fn c1_examples() {
        assert!(rel(solve_c1(2.0, 2.0 * 2f64.sqrt()).unwrap(), 4.0) < 1e-12);
        assert!(rel(solve_c1(3.0, 4f64.cbrt()).unwrap(), 4.0) < 1e-12);
        let tiny = solve_c1(2.0, 1e-9).unwrap();
        assert!(tiny > 2.0 && tiny - 2.0 < 1e-12);
    }

    #[test]
    fn c1_rejects_bad_input() {
        assert!(solve_c1(1.0, 1.0).is_err());
        assert!(solve_c1(2.0, 0.0).is_err());
        assert!(solve_c1(2.0, f64::INFINITY).is_err());
    }

    #[test]
    fn comparison_constants_at_unit_parameters() {
        let params = Params::new(2.0, 2.0, 0.0, 1.0, 1.0).unwrap();
        let cc = comparison_constants(&params, 0.0).unwrap();
        assert!(rel(cc.c1, 1.0) < 1e-15);
        assert!(rel(cc.c2, 1.0) < 1e-15);
        assert!(rel(cc.c3, 2.0) < 1e-15);
        assert!(cc.c5.is_none());
        // C2 = 1 + c2 * 1 * 1 * 16 / (1 * 1)
        assert!(rel(cc.big_c2, 17.0) < 1e-15);
    }

    #[test]
    fn comparison_constants_critical_regime() {
        let params = Params::new(2.0, 2.0, 2.0, 1.0, 1.0).unwrap();
        let cc = comparison_constants(&params, 0.0).unwrap();
        let c5 = cc.c5.unwrap();
        assert!(rel(c5, 1.0 + 5f64.sqrt()) < 1e-12);
        // c5 (c5 - 2) = c3^2
        assert!(rel(c5 * (c5 - 2.0), cc.c3 * cc.c3) < 1e-12);
        let (c4, c6) = (cc.c4.unwrap(), cc.c6.unwrap());
        // the three matching relations of the critical case
        assert!(rel((params.p() - 1.0) / c4.powf(4.0), c6) < 1e-12);
        assert!(rel(2.0 / (c4 * c4), c5) < 1e-12);
        assert!(rel(c6 * (1.0 - 2.0 / c5), 1.0) < 1e-12);
    }

    #[test]
    fn comparison_constants_identities() {
        let params = Params::new(2.7, 3.1, 0.4, 0.8, 1.3).unwrap();
        let d = params.derive_exponents();
        let cc = comparison_constants(&params, 0.2).unwrap();
        let pp = params.p() * d.p_conj;
        assert!(rel(cc.c2, (params.p() - 1.0) / cc.c1.powf(pp)) < 1e-12);
        assert!(rel(cc.c3, params.p() * 0.6 / cc.c1.powf(params.p())) < 1e-12);
    }

    #[test]
    fn eps_must_stay_below_lambda() {
        let params = Params::new(2.0, 2.0, 0.0, 1.0, 1.0).unwrap();
        assert!(comparison_constants(&params, 1.0).is_err());
        assert!(comparison_constants(&params, -1e-3).is_err());
    }

    #[test]
    fn liouville_examples() {
        let params = Params::new(2.0, 2.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(liouville_check(&params, 1.9), LiouvilleVerdict::ForcedZero);
        assert_eq!(liouville_check(&params, 2.0), LiouvilleVerdict::Inconclusive);
        assert_eq!(liouville_check(&params, 2.1), LiouvilleVerdict::Inconclusive);
    }
}
