//! One function per subcommand, each producing a [`Report`].

use std::fmt::Display;

use growthlab::checks::{
    check_caccioppoli, check_local_integral_bound, check_phi_lower_bound, default_eps, ibp_bracket,
};
use growthlab::growth::{ball_samples, log_ball_integral, log_spaced};
use growthlab::l1::{classify_l1_condition, phi_exponent, sphere_log_slope};
use growthlab::params::{comparison_constants, compute_c0, liouville_check, solve_c1};
use growthlab::radial::{fd_cross_check, subsolution_residual};
use growthlab::report::ConstantsBlock;
use growthlab::sharp::{build_sharp_example_with, SharpOptions};
use growthlab::{
    CheckOptions, CheckReport, L1Verdict, LiouvilleVerdict, ModelManifold, Params, QuadOptions, RadialFn,
    RadialProfile, Regime, Report, SharpExample,
};

use crate::args::{
    Command, ConstantsArgs, ExampleArgs, InequalityArgs, L1Args, LiouvilleArgs, RateArgs, SharpArgs, WindowArgs,
};

/// Residuals of the closed-form examples are rounding-level.
const RESIDUAL_TOL: f64 = 1e-9;
const FD_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-3;
const POWER_RATE_RTOL: f64 = 0.01;
const LOG_RATE_RTOL: f64 = 0.005;

pub type Outcome<T> = std::result::Result<T, String>;

fn fail<E: Display>(e: E) -> String {
    e.to_string()
}

pub fn run(command: &Command, opts: &CheckOptions) -> Outcome<Report> {
    match command {
        Command::Constants(args) => constants(args),
        Command::Sharp(args) => sharp(args),
        Command::Verify(args) => verify(args, opts),
        Command::Rate(args) => rate(args),
        Command::Inequalities(args) => inequalities(args, opts),
        Command::L1(args) => l1(args),
        Command::Liouville(args) => liouville(args),
    }
}

fn echo(report: &mut Report, key: &str, value: impl Display) {
    report.config.insert(key.to_string(), value.to_string());
}

fn constants_block(params: &Params, eps: f64) -> Outcome<ConstantsBlock> {
    let c0 = compute_c0(params);
    Ok(ConstantsBlock {
        c0,
        c1_sharp: solve_c1(params.p(), c0).map_err(fail)?,
        comparison: comparison_constants(params, eps).map_err(fail)?,
    })
}

fn constants(args: &ConstantsArgs) -> Outcome<Report> {
    let params = Params::new(args.p, args.q, args.mu, args.lambda, args.k).map_err(fail)?;
    let mut report = Report::new("constants");
    echo_params(&mut report, &params);
    echo(&mut report, "eps", args.eps);
    report.constants = Some(constants_block(&params, args.eps)?);
    report.provenance = vec![
        "C0 = p gamma^{1/p'} lambda^{1/p} / ((p-1)^{1/p'} k)".into(),
        "C1 = root of C^{1/p} (C-p)^{1/p'} = C0 in (p, p + C0]".into(),
        "c1..c6 from lambda - eps in place of lambda".into(),
    ];
    Ok(report)
}

fn echo_params(report: &mut Report, params: &Params) {
    echo(report, "p", params.p());
    echo(report, "q", params.q());
    echo(report, "mu", params.mu());
    echo(report, "lambda", params.lambda());
    echo(report, "k", params.k());
}

fn example(args: &ExampleArgs) -> Outcome<SharpExample> {
    let opts = SharpOptions {
        ac: args.a.zip(args.c),
        s0: args.s0,
        sphere_factor: None,
    };
    build_sharp_example_with(args.p, args.q, args.mu, &opts).map_err(fail)
}

fn example_report(command: &str, ex: &SharpExample) -> Outcome<Report> {
    let mut report = Report::new(command);
    echo_params(&mut report, &ex.params);
    echo(&mut report, "a", ex.a);
    echo(&mut report, "c", ex.c);
    echo(&mut report, "s0", ex.s0);
    echo(&mut report, "t0", ex.t0);
    report.constants = Some(constants_block(&ex.params, 0.0)?);
    report.measure("expected_rate", ex.expected_rate);
    report.measure("positive_radius", ex.positive_radius);
    report.provenance.push(if ex.is_critical() {
        "g = t^{a+p-1}, v = t^c, V = lambda t^{-p}; rate a + qc + p".to_string()
    } else {
        "g = exp(a t^beta), v = exp(c t^beta), V from Delta_p v = V v^{p-1}; rate (a + qc) beta".to_string()
    });
    Ok(report)
}

fn residual_grid(ex: &SharpExample) -> Outcome<Vec<f64>> {
    let lo = ex.t0 * (1.0 + 1e-3);
    log_spaced(lo, (10.0 * lo).max(1e3), 200).map_err(fail)
}

fn push_residual(report: &mut Report, ex: &SharpExample) -> Outcome<()> {
    let grid = residual_grid(ex)?;
    let res = subsolution_residual(&ex.model, &ex.profile, &ex.potential, ex.params.p(), ex.s0, &grid).map_err(fail)?;
    report.measure("residual_max_abs", res.max_abs);
    report.measure("residual_worst_radius", res.worst_radius);
    report.push_check(CheckReport::at_most(
        "subsolution_residual",
        res.max_signed,
        0.0,
        RESIDUAL_TOL,
    ));
    Ok(())
}

fn regime(ex: &SharpExample) -> Regime {
    if ex.is_critical() {
        Regime::Logarithmic
    } else {
        Regime::Power { beta: ex.beta() }
    }
}

/// Fitting window: explicit radii, or a default tail window in which
/// `ln G` reaches about `1e4`.
fn window_radii(ex: &SharpExample, w: &WindowArgs) -> Outcome<Vec<f64>> {
    if !w.radii.is_empty() {
        if w.radii.windows(2).any(|p| !(p[1] > p[0])) {
            return Err("radii: must be strictly increasing".into());
        }
        if !(w.radii[0] > ex.t0) {
            return Err(format!("radii: every radius must exceed t0 = {}", ex.t0));
        }
        return Ok(w.radii.clone());
    }
    let floor = ex.t0 + 1.0;
    let (rmin_default, rmax) = if ex.is_critical() {
        let rmax = w.rmax.unwrap_or(1e6);
        (floor.max(rmax / 1e3), rmax)
    } else {
        let inv = 1.0 / ex.beta();
        let rmax = w.rmax.unwrap_or_else(|| (1e4 / ex.expected_rate).powf(inv));
        (floor.max(rmax * 0.1f64.powf(inv)), rmax)
    };
    let rmin = w.rmin.unwrap_or(rmin_default);
    if !(rmin > ex.t0) {
        return Err(format!("rmin: {rmin} must exceed t0 = {}", ex.t0));
    }
    if !(rmax > rmin) {
        return Err(format!("rmax: {rmax} must exceed rmin = {rmin}"));
    }
    if w.samples < 4 {
        return Err(format!("samples: need at least 4, got {}", w.samples));
    }
    log_spaced(rmin, rmax, w.samples).map_err(fail)
}

fn push_rate(report: &mut Report, ex: &SharpExample, w: &WindowArgs) -> Outcome<()> {
    let radii = window_radii(ex, w)?;
    let samples = ball_samples(
        &ex.model,
        &ex.profile,
        ex.params.q(),
        ex.s0,
        &radii,
        &QuadOptions::default(),
    )
    .map_err(fail)?;
    let est = growthlab::growth::estimate_rate(&samples, regime(ex)).map_err(fail)?;
    let rtol = if ex.is_critical() {
        LOG_RATE_RTOL
    } else {
        POWER_RATE_RTOL
    };
    let rel = (est.rate - ex.expected_rate).abs() / ex.expected_rate.abs();
    report.measure("rate_relative_error", rel);
    report.push_check(CheckReport::at_most("rate", rel, rtol, 0.0));
    report.rate = Some(est);
    report.samples = samples;
    report
        .provenance
        .push("rate fitted by least squares on the tail of ln G".into());
    Ok(())
}

fn sharp(args: &SharpArgs) -> Outcome<Report> {
    let ex = example(&args.example)?;
    let mut report = example_report("sharp", &ex)?;
    push_residual(&mut report, &ex)?;
    if args.rate {
        push_rate(&mut report, &ex, &args.window)?;
    }
    Ok(report)
}

fn rate(args: &RateArgs) -> Outcome<Report> {
    let ex = example(&args.example)?;
    let mut report = example_report("rate", &ex)?;
    push_rate(&mut report, &ex, &args.window)?;
    Ok(report)
}

struct Radii {
    r1: f64,
    r: f64,
    h: f64,
    eps: f64,
}

fn default_radii(ex: &SharpExample, args: &InequalityArgs) -> Radii {
    let r1 = args.r1.unwrap_or(ex.t0 + 1.0);
    Radii {
        r1,
        r: args.r.unwrap_or(10.0 * r1),
        h: args.h.unwrap_or_else(|| r1.powf(ex.params.mu() / ex.params.p())),
        eps: args.eps.unwrap_or_else(|| default_eps(ex)),
    }
}

fn push_inequalities(report: &mut Report, ex: &SharpExample, radii: &Radii, opts: &CheckOptions) -> Outcome<()> {
    echo(report, "r1", radii.r1);
    echo(report, "r", radii.r);
    echo(report, "h", radii.h);
    echo(report, "eps", radii.eps);
    echo(report, "tol", opts.base_tol);
    let checks = [
        check_phi_lower_bound(ex, radii.r1, radii.r, Some(radii.eps), opts),
        check_caccioppoli(ex, radii.r1, radii.h, opts),
        check_local_integral_bound(ex, radii.r1, radii.r, opts),
    ];
    for check in checks {
        report.push_check(check.map_err(fail)?);
    }
    report.provenance.extend([
        "Phi = G + c R^mu H grows at least like exp((c3/beta) R^beta), or R^c5 when mu = p".to_string(),
        "cutoff: prefactor G(R + h) >= h^p H(R)".to_string(),
        "local: H(r) <= (p-1)^{p-1} / min(1, gamma^p) (int_r^R (omega g w^q)^{-1/(p-1)})^{1-p}".to_string(),
    ]);
    Ok(())
}

fn inequalities(args: &InequalityArgs, opts: &CheckOptions) -> Outcome<Report> {
    let ex = example(&args.example)?;
    let mut report = example_report("inequalities", &ex)?;
    let radii = default_radii(&ex, args);
    push_inequalities(&mut report, &ex, &radii, opts)?;
    Ok(report)
}

fn verify(args: &ExampleArgs, opts: &CheckOptions) -> Outcome<Report> {
    let ex = example(args)?;
    let mut report = example_report("verify", &ex)?;
    push_residual(&mut report, &ex)?;

    let probes = [ex.t0 + 1.0, 2.0 * (ex.t0 + 1.0), 10.0 * (ex.t0 + 1.0)];
    let mut worst: f64 = 0.0;
    for r in probes {
        worst = worst.max(fd_cross_check(&ex.model, &ex.profile, ex.params.p(), r, FD_STEP).map_err(fail)?);
    }
    report.push_check(CheckReport::at_most("finite_difference", worst, 0.0, FD_TOL));

    let window = WindowArgs {
        samples: 10,
        ..WindowArgs::default()
    };
    push_rate(&mut report, &ex, &window)?;

    if !ex.is_critical() {
        let r = 10.0 * (ex.t0 + 1.0);
        let (lower, upper) = ibp_bracket(&ex, r).map_err(fail)?;
        let g = log_ball_integral(&ex.model, &ex.profile, ex.params.q(), ex.s0, r, &opts.quad).map_err(fail)?;
        let tol = opts.base_tol + 10.0 * g.quad_error;
        report.push_check(CheckReport::at_least("bracket_lower", g.log_g, lower, tol));
        report.push_check(CheckReport::at_most("bracket_upper", g.log_g, upper, tol));
        report
            .provenance
            .push("integration by parts brackets ln G between two closed forms".into());
    }

    let blank = InequalityArgs {
        example: args.clone(),
        r1: None,
        r: None,
        h: None,
        eps: None,
    };
    push_inequalities(&mut report, &ex, &default_radii(&ex, &blank), opts)?;
    Ok(report)
}

fn verdict_name(v: L1Verdict) -> &'static str {
    match v {
        L1Verdict::ConditionHolds => "condition_holds",
        L1Verdict::ConditionFails => "condition_fails",
        L1Verdict::HoldsOnlyForSmallR => "holds_only_for_small_r",
    }
}

fn l1(args: &L1Args) -> Outcome<Report> {
    let mut report = Report::new("l1");
    echo(&mut report, "p", args.p);
    let (alpha, initially_infinite) = match args.alpha {
        Some(alpha) => {
            echo(&mut report, "alpha", alpha);
            echo(&mut report, "initially_infinite", args.initially_infinite);
            (alpha, args.initially_infinite)
        }
        None => {
            echo(&mut report, "n", args.n);
            echo(&mut report, "q", args.q);
            echo(&mut report, "s0", args.s0);
            echo(&mut report, "smin", args.smin);
            echo(&mut report, "smax", args.smax);
            let profile = RadialProfile::p_harmonic_rn(args.n, args.p).map_err(fail)?;
            let model = ModelManifold::euclidean(args.n);
            let alpha = sphere_log_slope(&model, &profile, args.q, args.s0, args.smin, args.smax, 16).map_err(fail)?;
            let initially_infinite = profile
                .level_crossing(args.s0)
                .is_some_and(|t| t > profile.min_radius());
            report.provenance.push("v = t^{(p-n)/(p-1)} - 1 on R^n".into());
            (alpha, initially_infinite)
        }
    };
    report.measure("alpha", alpha);
    report.measure("phi_exponent", phi_exponent(alpha, args.p));
    report.verdict = Some(verdict_name(classify_l1_condition(alpha, args.p, initially_infinite)).into());
    report
        .provenance
        .push("phi(s) ~ s^{-alpha/(p-1)} is integrable at infinity iff alpha > p - 1".into());
    Ok(report)
}

fn liouville(args: &LiouvilleArgs) -> Outcome<Report> {
    let params = Params::new(args.p, args.q, args.mu, args.lambda, args.k).map_err(fail)?;
    let mut report = Report::new("liouville");
    echo_params(&mut report, &params);
    echo(&mut report, "growth", args.growth);
    report.constants = Some(constants_block(&params, 0.0)?);
    report.verdict = Some(
        match liouville_check(&params, args.growth) {
            LiouvilleVerdict::ForcedZero => "forced_zero",
            LiouvilleVerdict::Inconclusive => "inconclusive",
        }
        .into(),
    );
    report
        .provenance
        .push("growth below the sharp constant forces u = 0".into());
    Ok(report)
}
