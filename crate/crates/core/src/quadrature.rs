//! Adaptive Gauss–Kronrod quadrature of positive integrands given by
//! their logarithm.
//!
//! Each panel is evaluated on `exp(ln f - m)` where `m` is the largest
//! log-value at the panel nodes, so that integrands of size `e^{10^4}` and
//! beyond never overflow. Panel results and error estimates are kept as
//! logarithms and combined with log-sum-exp in panel order, which makes
//! the result independent of any evaluation schedule.
//!
//! Refinement is global: every round splits all panels whose error exceeds
//! an equal share of the tolerance budget, until the summed error is below
//! `rel_tol` times the summed value.

use crate::error::{Error, Result};

/// Kronrod abscissae on `[0, 1)`, descending; odd indices are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Number of uniform panels when the interval is not geometrically wide.
const UNIFORM_PANELS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Target for `error / value`.
    pub rel_tol: f64,
    pub max_panels: usize,
    /// Exponent `kappa` in `(-1, 0)` when the integrand behaves like
    /// `(s - a)^kappa` at the lower end.
    pub endpoint_exponent: Option<f64>,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_panels: 20_000,
            endpoint_exponent: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogQuad {
    /// `ln` of the integral; `-inf` when it vanishes.
    pub ln_value: f64,
    /// Estimated relative error.
    pub rel_error: f64,
    pub panels: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    ln_value: f64,
    ln_error: f64,
}

/// `ln(sum(exp(x)))` of an iterator, exact for all `-inf` input.
pub fn log_sum_exp<I: IntoIterator<Item = f64> + Clone>(xs: I) -> f64 {
    let m = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + xs.into_iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn ln_add(x: f64, y: f64) -> f64 {
    let m = x.max(y);
    if m == f64::NEG_INFINITY {
        m
    } else {
        m + ((x - m).exp() + (y - m).exp()).ln()
    }
}

fn gk15<F: Fn(f64) -> f64>(ln_f: &F, a: f64, b: f64) -> Result<Panel> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut lf = [0.0; 15];
    lf[7] = ln_f(centre);
    for j in 0..7 {
        let dx = half * XGK[j];
        lf[j] = ln_f(centre - dx);
        lf[14 - j] = ln_f(centre + dx);
    }
    if let Some(bad) = lf.iter().position(|x| x.is_nan() || *x == f64::INFINITY) {
        let x = if bad == 7 {
            centre
        } else if bad < 7 {
            centre - half * XGK[bad]
        } else {
            centre + half * XGK[14 - bad]
        };
        return Err(Error::Domain {
            what: "integrand",
            value: x,
            reason: format!("log-integrand is {} at this point", lf[bad]),
        });
    }
    let m = lf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return Ok(Panel {
            a,
            b,
            ln_value: m,
            ln_error: m,
        });
    }
    let f: Vec<f64> = lf.iter().map(|x| (x - m).exp()).collect();
    let fc = f[7];
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    for j in 0..7 {
        let pair = f[j] + f[14 - j];
        resk += WGK[j] * pair;
        if j % 2 == 1 {
            resg += WG[j / 2] * pair;
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((f[j] - mean).abs() + (f[14 - j] - mean).abs());
    }
    // integrand is non-negative: resabs = resk
    let (value, resasc) = (resk * half, resasc * half);
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    err = err.max(50.0 * f64::EPSILON * value);
    Ok(Panel {
        a,
        b,
        ln_value: m + value.ln(),
        ln_error: m + err.ln(),
    })
}

fn initial_nodes(a: f64, b: f64) -> Vec<f64> {
    if a > 0.0 && b / a > 4.0 {
        let n = ((b / a).log2().ceil() as usize).clamp(UNIFORM_PANELS, 400);
        let ratio = (b / a).ln() / n as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| a * (ratio * i as f64).exp()).collect();
        nodes.push(b);
        nodes
    } else {
        let n = UNIFORM_PANELS;
        (0..=n)
            .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
            .collect()
    }
}

fn integrate_plain<F: Fn(f64) -> f64>(ln_f: &F, a: f64, b: f64, opts: &QuadOptions) -> Result<LogQuad> {
    let nodes = initial_nodes(a, b);
    let mut panels = Vec::with_capacity(4 * nodes.len());
    for w in nodes.windows(2) {
        panels.push(gk15(ln_f, w[0], w[1])?);
    }
    let mut evaluations = 15 * panels.len();
    let ln_tol = opts.rel_tol.ln();
    loop {
        let total = log_sum_exp(panels.iter().map(|p| p.ln_value));
        let err = log_sum_exp(panels.iter().map(|p| p.ln_error));
        let rel_error = if total == f64::NEG_INFINITY {
            0.0
        } else {
            (err - total).exp()
        };
        if total == f64::NEG_INFINITY || err - total <= ln_tol {
            return Ok(LogQuad {
                ln_value: total,
                rel_error,
                panels: panels.len(),
                evaluations,
            });
        }
        let threshold = ln_tol + total - (panels.len() as f64).ln();
        let splits = panels.iter().filter(|p| p.ln_error > threshold).count();
        let width_exhausted = panels
            .iter()
            .filter(|p| p.ln_error > threshold)
            .any(|p| 0.5 * (p.a + p.b) <= p.a || 0.5 * (p.a + p.b) >= p.b);
        if splits == 0 || panels.len() + splits > opts.max_panels || width_exhausted {
            return Err(Error::Quadrature {
                ln_estimate: total,
                rel_error,
                panels: panels.len(),
            });
        }
        let mut next = Vec::with_capacity(panels.len() + splits);
        for p in panels {
            if p.ln_error > threshold {
                let mid = 0.5 * (p.a + p.b);
                next.push(gk15(ln_f, p.a, mid)?);
                next.push(gk15(ln_f, mid, p.b)?);
                evaluations += 30;
            } else {
                next.push(p);
            }
        }
        panels = next;
    }
}

/// `ln(int_a^b exp(ln_f(s)) ds)` for a non-negative integrand.
///
/// `ln_f` is only sampled at interior points. `a == b` gives `-inf`.
pub fn log_integrate<F: Fn(f64) -> f64>(ln_f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<LogQuad> {
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::Precondition(format!(
            "integration interval [{a}, {b}] must be finite and ordered"
        )));
    }
    if a == b {
        return Ok(LogQuad {
            ln_value: f64::NEG_INFINITY,
            rel_error: 0.0,
            panels: 0,
            evaluations: 0,
        });
    }
    let kappa = match opts.endpoint_exponent {
        Some(k) if k < 0.0 => k,
        _ => return integrate_plain(&ln_f, a, b, opts),
    };
    if !(kappa > -1.0) {
        return Err(Error::InvalidParameter {
            name: "endpoint_exponent",
            value: kappa,
            reason: "must exceed -1 for an integrable endpoint",
        });
    }
    // s = a + tau^m removes (s - a)^kappa on the first unit of the interval.
    let m = 1.0 / (kappa + 1.0);
    let split = (a + 1.0).min(b);
    let tau_max = (split - a).powf(1.0 / m);
    let ln_m = m.ln();
    let head = integrate_plain(
        &|tau: f64| ln_f(a + tau.powf(m)) + ln_m + (m - 1.0) * tau.ln(),
        0.0,
        tau_max,
        opts,
    )?;
    if split == b {
        return Ok(head);
    }
    let tail = integrate_plain(&ln_f, split, b, opts)?;
    let ln_value = ln_add(head.ln_value, tail.ln_value);
    let ln_err = ln_add(head.ln_value + head.rel_error.ln(), tail.ln_value + tail.rel_error.ln());
    Ok(LogQuad {
        ln_value,
        rel_error: if ln_value == f64::NEG_INFINITY {
            0.0
        } else {
            (ln_err - ln_value).exp()
        },
        panels: head.panels + tail.panels,
        evaluations: head.evaluations + tail.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn polynomial_is_exact() {
        // int_0^2 x^3 = 4
        let q = log_integrate(|x: f64| 3.0 * x.ln(), 0.0, 2.0, &QuadOptions::default()).unwrap();
        assert!(rel(q.ln_value.exp(), 4.0) < 1e-14);
    }

    #[test]
    fn exponential_far_beyond_overflow() {
        // int_0^R e^{t} = e^R - 1
        let r = 20_000.0;
        let q = log_integrate(|t| t, 0.0, r, &QuadOptions::default()).unwrap();
        assert!((q.ln_value - r).abs() < 1e-10 * r);
        assert!(q.rel_error <= 1e-12);
    }

    #[test]
    fn stretched_exponential() {
        // int_1^R e^{2 sqrt t} dt = [e^{2 sqrt t}(sqrt t - 1/2)]_1^R
        let r: f64 = 1e6;
        let exact = 2.0 * r.sqrt() + (r.sqrt() - 0.5).ln();
        let q = log_integrate(|t: f64| 2.0 * t.sqrt(), 1.0, r, &QuadOptions::default()).unwrap();
        assert!(rel(q.ln_value, exact) < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        // int_0^3 s^{-1/2} = 2 sqrt 3
        let opts = QuadOptions {
            endpoint_exponent: Some(-0.5),
            ..QuadOptions::default()
        };
        let q = log_integrate(|s: f64| -0.5 * s.ln(), 0.0, 3.0, &opts).unwrap();
        assert!(rel(q.ln_value.exp(), 2.0 * 3f64.sqrt()) < 1e-12);
        let short = log_integrate(|s: f64| -0.5 * s.ln(), 0.0, 0.25, &opts).unwrap();
        assert!(rel(short.ln_value.exp(), 1.0) < 1e-12);
    }

    #[test]
    fn empty_interval_and_zero_integrand() {
        let q = log_integrate(|t| t, 2.0, 2.0, &QuadOptions::default()).unwrap();
        assert_eq!(q.ln_value, f64::NEG_INFINITY);
        let z = log_integrate(|_| f64::NEG_INFINITY, 0.0, 1.0, &QuadOptions::default()).unwrap();
        assert_eq!(z.ln_value, f64::NEG_INFINITY);
        assert!(log_integrate(|t| t, 2.0, 1.0, &QuadOptions::default()).is_err());
    }

    #[test]
    fn panel_budget_error_carries_estimate() {
        let opts = QuadOptions {
            max_panels: 20,
            ..QuadOptions::default()
        };
        match log_integrate(|t| t, 0.0, 20_000.0, &opts) {
            Err(Error::Quadrature {
                ln_estimate,
                panels,
                rel_error,
            }) => {
                assert!(ln_estimate.is_finite());
                assert!(panels <= 20);
                assert!(rel_error > 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nan_integrand_is_reported() {
        let err = log_integrate(|t: f64| (t - 1.0).ln(), 0.0, 2.0, &QuadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Domain { what: "integrand", .. }));
    }

    #[test]
    fn deterministic() {
        let f = |t: f64| 3.0 * t.powf(0.7) - t.ln();
        let a = log_integrate(f, 1.0, 1e5, &QuadOptions::default()).unwrap();
        let b = log_integrate(f, 1.0, 1e5, &QuadOptions::default()).unwrap();
        assert_eq!(a.ln_value.to_bits(), b.ln_value.to_bits());
    }

    #[test]
    fn log_sum_exp_edges() {
        assert_eq!(log_sum_exp([f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
        assert!((log_sum_exp([1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
