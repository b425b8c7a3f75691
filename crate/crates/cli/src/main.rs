//! `qdesign`: locally D-optimal designs for binary dose-response models.
//!
//! Workflow: `fit` estimates plug-in coefficients from dose-response data,
//! `solve-wc` / `pso` compute candidate D-optimal designs, `verify` checks
//! them against the equivalence theorem, `efficiency` compares designs, and
//! `info` prints link diagnostics.
//!
//! Every command emits a JSON document with a `meta` block (tool version,
//! resolved configuration, and, with `--timings`, wall time). Outputs of
//! seeded commands are byte-deterministic unless `--timings` is given.

mod config;
mod exit;
mod output;

use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use quantal_design::fit::{self, Dataset};
use quantal_design::model::{
    Design, DesignSpace, InfoModel, Predictor, ThreeParamModel, TwoParamModel,
};
use quantal_design::pso::{self, PsoConfig};
use quantal_design::{verify, wc, Error, Link};

use crate::exit::{exit_code, CliError};
use crate::output::Meta;

#[derive(Parser)]
#[command(
    name = "qdesign",
    version,
    about = "Locally D-optimal designs for quantal response models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the WC stationarity equation for a two-point design
    SolveWc(SolveWcArgs),
    /// Particle swarm search for a weighted k-point design
    Pso(PsoArgs),
    /// Equivalence-theorem check of a design file
    Verify(VerifyArgs),
    /// D-efficiency of a design against a reference design
    Efficiency(EfficiencyArgs),
    /// Maximum-likelihood fit of dose-response data
    Fit(FitArgs),
    /// Link diagnostics at a single eta value
    Info(InfoArgs),
}

/// Options shared by every model-taking command. All fields are optional at
/// parse time so a `--config` TOML file (same keys as the long flags) can
/// fill them in; flags override the file.
#[derive(Args, Clone, Default, serde::Serialize)]
struct ModelOpts {
    /// Link: logit, probit, laplace, cloglog, `student-t:<df>`, exponential
    #[arg(long)]
    link: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    beta0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta1: Option<f64>,
    /// Power predictor exponent: eta = beta0 + beta1 * x^alpha
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    /// Use the offset predictor eta = beta0 + beta1 x + 1/(|x|+1)
    #[arg(long, default_value_t = false)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    offset: bool,
    /// Background response rate of the three-parameter model
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    /// Lower eta bound override (exponential link; default 0.5)
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    eta_low: Option<f64>,
    /// TOML file with defaults for any of the long options
    #[arg(long)]
    #[serde(skip)]
    config: Option<std::path::PathBuf>,
    /// Include wall-clock timing in the meta block (breaks byte determinism)
    #[arg(long, default_value_t = false)]
    #[serde(skip)]
    timings: bool,
}

impl ModelOpts {
    fn link(&self) -> Result<Link<f64>, CliError> {
        let name = self
            .link
            .as_deref()
            .ok_or_else(|| CliError::usage("--link is required"))?;
        let mut link = Link::parse(name)?;
        if let Some(lo) = self.eta_low {
            link = link.with_eta_lower(lo)?;
        }
        Ok(link)
    }

    fn predictor(&self) -> Result<Predictor<f64>, CliError> {
        let beta0 = self
            .beta0
            .ok_or_else(|| CliError::usage("--beta0 is required"))?;
        let beta1 = self
            .beta1
            .ok_or_else(|| CliError::usage("--beta1 is required"))?;
        let p = match (self.alpha, self.offset) {
            (Some(_), true) => {
                return Err(CliError::usage(
                    "--alpha and --offset are mutually exclusive",
                ))
            }
            (Some(alpha), false) => Predictor::Power {
                beta0,
                beta1,
                alpha,
            },
            (None, true) => Predictor::LinearWithOffset { beta0, beta1 },
            (None, false) => Predictor::Linear { beta0, beta1 },
        };
        p.validate()?;
        Ok(p)
    }

    fn two_param(&self) -> Result<TwoParamModel<f64>, CliError> {
        Ok(TwoParamModel::new(self.link()?, self.predictor()?)?)
    }

    fn three_param(&self) -> Result<ThreeParamModel<f64>, CliError> {
        let c = self
            .c
            .ok_or_else(|| CliError::usage("--c is required for the three-parameter model"))?;
        Ok(ThreeParamModel::new(c, self.link()?, self.predictor()?)?)
    }
}

#[derive(Args, serde::Serialize)]
struct SolveWcArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelOpts,
    /// eta1 scan bracket (asymmetric links)
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    bracket_lo: f64,
    #[arg(long, default_value_t = 8.0, allow_negative_numbers = true)]
    bracket_hi: f64,
    /// Optional design space for the emitted design
    #[arg(long, allow_negative_numbers = true)]
    x_lower: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x_upper: Option<f64>,
    /// Doses were multiplied by this factor before fitting; outputs are
    /// also reported divided by it (the original scale)
    #[arg(long)]
    dose_scale: Option<f64>,
    /// Write the JSON document here as well as to stdout
    #[arg(long)]
    #[serde(skip)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args, serde::Serialize)]
struct PsoArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelOpts,
    #[arg(long, allow_negative_numbers = true)]
    x_lower: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x_upper: Option<f64>,
    /// Support points per particle (default: parameter count + 1, or 3 for
    /// the three-parameter fast path)
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    particles: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    inertia: Option<f64>,
    /// Merge tolerance applied to the final design
    #[arg(long, default_value_t = 1e-3)]
    point_tol: f64,
    /// Weight below which a support point is dropped
    #[arg(long, default_value_t = 1e-3)]
    weight_tol: f64,
    #[arg(long)]
    dose_scale: Option<f64>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args, serde::Serialize)]
struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelOpts,
    /// Design JSON file to verify
    #[arg(long)]
    design: std::path::PathBuf,
    #[arg(long, default_value_t = 2001)]
    grid: usize,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Write the sensitivity curve as CSV
    #[arg(long)]
    #[serde(skip)]
    curve: Option<std::path::PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args, serde::Serialize)]
struct EfficiencyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelOpts,
    /// Design JSON file to evaluate
    #[arg(long)]
    design: std::path::PathBuf,
    /// Reference (optimal) design JSON file
    #[arg(long)]
    reference: std::path::PathBuf,
    #[arg(long)]
    #[serde(skip)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args, serde::Serialize)]
struct FitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelOpts,
    /// CSV data file with header dose,trials,events
    #[arg(long)]
    data: std::path::PathBuf,
    /// Multiply doses by this factor before fitting
    #[arg(long)]
    dose_scale: Option<f64>,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args, serde::Serialize)]
struct InfoArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelOpts,
    #[arg(long, allow_negative_numbers = true)]
    eta: f64,
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = match cli.command {
        Command::SolveWc(args) => cmd_solve_wc(args, started),
        Command::Pso(args) => cmd_pso(args, started),
        Command::Verify(args) => cmd_verify(args, started),
        Command::Efficiency(args) => cmd_efficiency(args, started),
        Command::Fit(args) => cmd_fit(args, started),
        Command::Info(args) => cmd_info(args, started),
    };
    if let Err(e) = result {
        eprintln!("qdesign: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn opt_space(lo: Option<f64>, hi: Option<f64>) -> Result<Option<DesignSpace<f64>>, CliError> {
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok(Some(DesignSpace::new(lo, hi)?)),
        (None, None) => Ok(None),
        _ => Err(CliError::usage(
            "--x-lower and --x-upper must be given together",
        )),
    }
}

#[derive(serde::Serialize)]
struct WcOutput {
    design: Design<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    design_original_scale: Option<Vec<f64>>,
    eta1: f64,
    eta2: f64,
    residual_norm: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    all_roots: Vec<wc::WcSolution<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    sign_change_intervals: Vec<(f64, f64)>,
    meta: Meta,
}

fn cmd_solve_wc(mut args: SolveWcArgs, started: Instant) -> Result<(), CliError> {
    config::apply_file(&mut args.model)?;
    let link = args.model.link()?;
    let predictor = args.model.predictor()?;
    if matches!(predictor, Predictor::LinearWithOffset { .. }) {
        return Err(CliError::usage(
            "solve-wc needs an invertible predictor; use the pso command for --offset",
        ));
    }

    let (eta1, eta2, residual, roots, intervals) = if link.is_symmetric() {
        let root = wc::solve_symmetric(&link)?;
        let residual = wc::wc_residual(&link, root, -root)?.abs();
        (root, -root, residual, Vec::new(), Vec::new())
    } else {
        let lo = link.domain().lower.max(args.bracket_lo);
        let report = match wc::solve_asymmetric(&link, (lo, args.bracket_hi)) {
            Ok(r) => r,
            Err(e) => {
                if let Error::NoValidRoot { sign_changes } = &e {
                    eprintln!(
                        "qdesign: warning: {} sign-change interval(s) scanned and rejected \
                         (numerical multiplicity; companion points leave the domain): {:?}",
                        sign_changes.len(),
                        sign_changes
                    );
                }
                return Err(e.into());
            }
        };
        if report.roots.len() > 1 {
            eprintln!(
                "qdesign: warning: {} candidate roots found; reporting the one with the \
                 largest criterion value",
                report.roots.len()
            );
        }
        let s = report.solution;
        (
            s.eta1,
            s.eta2,
            s.residual_norm,
            report.roots,
            report.sign_changes,
        )
    };

    let space = opt_space(args.x_lower, args.x_upper)?;
    let design = wc::design_from_eta(&predictor, &[eta1, eta2], space)?;
    let design_original_scale = args
        .dose_scale
        .map(|s| design.points().iter().map(|x| x / s).collect());

    let out = WcOutput {
        design,
        design_original_scale,
        eta1,
        eta2,
        residual_norm: residual,
        all_roots: roots,
        sign_change_intervals: intervals,
        meta: Meta::new(
            "solve-wc",
            serde_json::to_value(&args)?,
            started,
            args.model.timings,
        ),
    };
    output::emit(&out, args.out.as_deref())
}

#[derive(serde::Serialize)]
struct PsoOutput {
    design: Design<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    design_original_scale: Option<Vec<f64>>,
    log_det: f64,
    seed: u64,
    meta: Meta,
}

fn cmd_pso(mut args: PsoArgs, started: Instant) -> Result<(), CliError> {
    config::apply_file(&mut args.model)?;
    let three_param = args.model.c.is_some();
    let space = opt_space(args.x_lower, args.x_upper)?
        .ok_or_else(|| CliError::usage("--x-lower and --x-upper are required"))?;

    let defaults = PsoConfig::<f64>::default();
    // default support size is one past the parameter count; collapse
    // reveals the true support afterwards
    let cfg = PsoConfig {
        seed: args.seed.unwrap_or(1),
        k_points: args.k.unwrap_or(if three_param { 4 } else { 3 }),
        n_particles: args.particles.unwrap_or(defaults.n_particles),
        n_iterations: args.iterations.unwrap_or(defaults.n_iterations),
        c1: args.c1.unwrap_or(defaults.c1),
        c2: args.c2.unwrap_or(defaults.c2),
        inertia: args.inertia.unwrap_or(defaults.inertia),
    };

    let run = if three_param {
        let model = args.model.three_param()?;
        pso::optimize_3p(&model, space, &cfg)?
    } else {
        let model = args.model.two_param()?;
        pso::optimize(
            move |d: &Design<f64>| model.d_criterion(d).unwrap_or(f64::NEG_INFINITY),
            space,
            &cfg,
        )?
    };
    let design = pso::collapse(&run.design, args.point_tol, args.weight_tol)?;
    let design_original_scale = args
        .dose_scale
        .map(|s| design.points().iter().map(|x| x / s).collect());

    let mut meta = Meta::new(
        "pso",
        serde_json::to_value(&args)?,
        started,
        args.model.timings,
    );
    meta.extra("pso_config", serde_json::to_value(cfg)?);
    let out = PsoOutput {
        design,
        design_original_scale,
        log_det: run.value,
        seed: cfg.seed,
        meta,
    };
    output::emit(&out, args.out.as_deref())
}

#[derive(serde::Serialize)]
struct VerifyOutput {
    verdict: verify::Verdict<f64>,
    meta: Meta,
}

fn cmd_verify(mut args: VerifyArgs, started: Instant) -> Result<(), CliError> {
    config::apply_file(&mut args.model)?;
    let design: Design<f64> = output::read_json(&args.design)?;
    let three_param = args.model.c.is_some();

    let (verdict, curve) = if three_param {
        let model = args.model.three_param()?;
        let v = verify::check_global(&model, &design, args.grid, args.tol)?;
        let c = args
            .curve
            .as_ref()
            .map(|_| verify::sensitivity_curve(&model, &design, args.grid))
            .transpose()?;
        (v, c)
    } else {
        let model = args.model.two_param()?;
        let v = verify::check_global(&model, &design, args.grid, args.tol)?;
        let c = args
            .curve
            .as_ref()
            .map(|_| verify::sensitivity_curve(&model, &design, args.grid))
            .transpose()?;
        (v, c)
    };
    if let (Some(path), Some(curve)) = (args.curve.as_ref(), curve) {
        std::fs::write(path, verify::curve_to_csv(&curve)).map_err(CliError::io)?;
    }
    let out = VerifyOutput {
        verdict,
        meta: Meta::new(
            "verify",
            serde_json::to_value(&args)?,
            started,
            args.model.timings,
        ),
    };
    output::emit(&out, args.out.as_deref())
}

#[derive(serde::Serialize)]
struct EfficiencyOutput {
    d_efficiency: f64,
    log_det_design: f64,
    log_det_reference: f64,
    parameters: usize,
    meta: Meta,
}

fn cmd_efficiency(mut args: EfficiencyArgs, started: Instant) -> Result<(), CliError> {
    config::apply_file(&mut args.model)?;
    let design: Design<f64> = output::read_json(&args.design)?;
    let reference: Design<f64> = output::read_json(&args.reference)?;
    let three_param = args.model.c.is_some();

    let (eff, ld, lr, dim) = if three_param {
        let m = args.model.three_param()?;
        (
            m.d_efficiency(&design, &reference)?,
            m.d_criterion(&design)?,
            m.d_criterion(&reference)?,
            3,
        )
    } else {
        let m = args.model.two_param()?;
        (
            m.d_efficiency(&design, &reference)?,
            m.d_criterion(&design)?,
            m.d_criterion(&reference)?,
            2,
        )
    };
    let out = EfficiencyOutput {
        d_efficiency: eff,
        log_det_design: ld,
        log_det_reference: lr,
        parameters: dim,
        meta: Meta::new(
            "efficiency",
            serde_json::to_value(&args)?,
            started,
            args.model.timings,
        ),
    };
    output::emit(&out, args.out.as_deref())
}

#[derive(serde::Serialize)]
struct FitOutput {
    beta0: f64,
    beta1: f64,
    se: [f64; 2],
    wald_ci_beta0: (f64, f64),
    wald_ci_beta1: (f64, f64),
    loglik: f64,
    converged: bool,
    iterations: usize,
    meta: Meta,
}

fn cmd_fit(mut args: FitArgs, started: Instant) -> Result<(), CliError> {
    config::apply_file(&mut args.model)?;
    let link = args.model.link()?;
    let file = std::fs::File::open(&args.data).map_err(CliError::io)?;
    let mut data = Dataset::<f64>::from_csv(file)?;
    if let Some(scale) = args.dose_scale {
        data = data.scaled(scale)?;
    }
    let fit = fit::fit_mle(&data, &link, args.max_iter, args.tol)?;
    let out = FitOutput {
        beta0: fit.beta0,
        beta1: fit.beta1,
        se: fit.se,
        wald_ci_beta0: fit.wald_ci(0),
        wald_ci_beta1: fit.wald_ci(1),
        loglik: fit.loglik,
        converged: fit.converged,
        iterations: fit.iterations,
        meta: Meta::new(
            "fit",
            serde_json::to_value(&args)?,
            started,
            args.model.timings,
        ),
    };
    output::emit(&out, args.out.as_deref())
}

#[derive(serde::Serialize)]
struct InfoOutput {
    link: String,
    eta: f64,
    density: f64,
    cdf: f64,
    survival: f64,
    density_derivative: f64,
    weight: f64,
    w_function: f64,
    meta: Meta,
}

fn cmd_info(mut args: InfoArgs, started: Instant) -> Result<(), CliError> {
    config::apply_file(&mut args.model)?;
    let link = args.model.link()?;
    let eta = args.eta;
    let out = InfoOutput {
        link: link.name(),
        eta,
        density: link.density(eta)?,
        cdf: link.cdf(eta)?,
        survival: link.survival(eta)?,
        density_derivative: link.density_derivative(eta)?,
        weight: link.weight(eta)?,
        w_function: link.w_function(eta)?,
        meta: Meta::new(
            "info",
            serde_json::to_value(&args)?,
            started,
            args.model.timings,
        ),
    };
    output::emit(&out, None)
}
