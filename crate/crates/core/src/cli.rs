//! Command-line front end.
//!
//! Every command writes its artifacts plus a `run.json` (the full argument
//! vector and resolved configuration) into `--out`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::json;

use crate::activesubspace::{
    estimate, GradientConfig, Parallelism, DEFAULT_FD_STEP, DEFAULT_QUAD_ORDER,
};
use crate::dimensions::format_rational;
use crate::error::{Error, Result};
use crate::io::{
    fmt_f64, read_matrix_csv, write_csv, write_json, write_matrix_csv, write_rational_matrix_csv,
};
use crate::model::{resolve_model, ModelSpec};
use crate::pigroups::PiDecomposition;
use crate::pipeflow::{
    builtin_model, bulk_velocity_with, friction_factor, reynolds, BuiltinModel, PipeState, Regime,
    RE_CRIT,
};
use crate::quadrature::tensor_grid;
use crate::subspace::{convergence_sweep_model, inclusion_residual, SweepResult};

pub const THREADS_ENV: &str = "RIDGELAW_THREADS";
pub const DEFAULT_STEPS: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

#[derive(Debug, Parser)]
#[command(
    name = "ridgelaw",
    version,
    about = "Dimensional analysis and active subspaces of physical laws"
)]
pub struct Cli {
    /// Directory receiving CSV/JSON artifacts.
    #[arg(long, global = true, default_value = "ridgelaw-out")]
    pub out: PathBuf,

    /// Worker threads for gradient accumulation (falls back to RIDGELAW_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact pi decomposition: D, rank, w, W, A.
    Pi {
        /// Model file or built-in id.
        model: String,
    },
    /// Eigendecomposition of the gradient outer-product matrix.
    Active(ActiveArgs),
    /// Inclusion residual of one column space in another.
    Inclusion {
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long)]
        enclosing: PathBuf,
    },
    /// Inclusion residual against the finite-difference step.
    Sweep(SweepArgs),
    /// The pipe-flow laboratory.
    #[command(subcommand)]
    Pipeflow(PipeflowCommand),
}

#[derive(Debug, Args)]
pub struct EstimationArgs {
    #[arg(long, default_value_t = DEFAULT_QUAD_ORDER)]
    pub quad_order: usize,
    /// Critical Reynolds number of the regime switch.
    #[arg(long, default_value_t = RE_CRIT)]
    pub re_crit: f64,
}

#[derive(Debug, Args)]
pub struct ActiveArgs {
    /// Built-in id or a model file naming a built-in evaluator.
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value_t = DEFAULT_FD_STEP)]
    pub fd_step: f64,
    /// Active-subspace dimension (defaults to the model's expected value).
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub est: EstimationArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub model: String,
    /// Comma-separated, strictly descending.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_STEPS)]
    pub steps: Vec<f64>,
    #[command(flatten)]
    pub est: EstimationArgs,
}

#[derive(Debug, Subcommand)]
pub enum PipeflowCommand {
    /// Velocity, Reynolds number, friction factor and regime at one state.
    Eval {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        diam: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        dpdl: f64,
        #[arg(long, default_value_t = RE_CRIT)]
        re_crit: f64,
    },
    /// Eigenvalues and convergence sweep for one regime.
    Reproduce {
        #[arg(long)]
        regime: Regime,
        #[arg(long, default_value_t = DEFAULT_FD_STEP)]
        fd_step: f64,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_STEPS)]
        steps: Vec<f64>,
        #[command(flatten)]
        est: EstimationArgs,
    },
}

impl clap::ValueEnum for Regime {
    fn value_variants<'a>() -> &'a [Self] {
        &[Regime::Laminar, Regime::Turbulent]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(self.as_str()))
    }
}

/// Parses `argv` (including the program name), runs, and returns the exit status.
pub fn run_command<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli, &argv) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn check_estimation(quad_order: usize, fd_step: Option<f64>, steps: Option<&[f64]>) -> Result<()> {
    if quad_order == 0 {
        return Err(Error::Usage("--quad-order must be at least 1".into()));
    }
    if let Some(h) = fd_step {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Usage(format!("--fd-step must be positive, got {h}")));
        }
    }
    if let Some(steps) = steps {
        if steps.is_empty()
            || steps.iter().any(|&h| !(h > 0.0 && h.is_finite()))
            || steps.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::Usage(
                "--steps must be positive and strictly descending".into(),
            ));
        }
    }
    Ok(())
}

fn threads(cli: &Cli) -> Result<Parallelism> {
    let t = match cli.threads {
        Some(t) => Some(t),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|_| Error::Usage(format!("{THREADS_ENV}={v} is not a count")))?,
            ),
            Err(_) => None,
        },
    };
    if t == Some(0) {
        return Err(Error::Usage("--threads must be at least 1".into()));
    }
    Ok(Parallelism(t))
}

/// Runs a parsed command and returns the text printed on success.
pub fn run(cli: &Cli, argv: &[String]) -> Result<String> {
    let par = threads(cli)?;
    std::fs::create_dir_all(&cli.out)?;
    let out = cli.out.as_path();
    let (summary, config) = match &cli.command {
        Command::Pi { model } => cmd_pi(out, model)?,
        Command::Active(a) => cmd_active(out, a, par)?,
        Command::Inclusion {
            candidate,
            enclosing,
        } => cmd_inclusion(out, candidate, enclosing)?,
        Command::Sweep(s) => cmd_sweep(out, s, par)?,
        Command::Pipeflow(PipeflowCommand::Eval {
            rho,
            mu,
            diam,
            eps,
            dpdl,
            re_crit,
        }) => cmd_eval(
            out,
            PipeState::new(*rho, *mu, *diam, *eps, *dpdl)?,
            *re_crit,
        )?,
        Command::Pipeflow(PipeflowCommand::Reproduce {
            regime,
            fd_step,
            steps,
            est,
        }) => cmd_reproduce(out, *regime, *fd_step, steps, est, par)?,
    };
    write_json(
        &out.join("run.json"),
        &json!({
            "tool": "ridgelaw",
            "version": env!("CARGO_PKG_VERSION"),
            "argv": argv,
            "threads": par.0,
            "config": config,
        }),
    )?;
    Ok(summary)
}

fn names(v: &[String]) -> Vec<String> {
    v.to_vec()
}

fn pi_group_label(dec: &PiDecomposition, col: &[num_rational::BigRational]) -> String {
    let parts: Vec<String> = dec
        .d
        .column_names
        .iter()
        .zip(col)
        .filter(|(_, e)| !num_traits::Zero::is_zero(*e))
        .map(|(n, e)| format!("{n}^{}", format_rational(e)))
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

pub fn write_decomposition(out: &Path, dec: &PiDecomposition) -> Result<serde_json::Value> {
    let qn = names(&dec.d.column_names);
    let units = names(dec.d.system.names());
    let pi_names: Vec<String> = (1..=dec.n()).map(|i| format!("pi{i}")).collect();
    let mut a_names = Vec::new();
    if !dec.qoi_dimensionless {
        a_names.push("w".to_string());
    }
    a_names.extend(pi_names.iter().cloned());

    write_rational_matrix_csv(&out.join("D.csv"), "unit", &units, &qn, &dec.d.entries)?;
    let w_matrix = crate::exact::RationalMatrix::from_columns(dec.w.len(), std::slice::from_ref(&dec.w));
    write_rational_matrix_csv(
        &out.join("w.csv"),
        "quantity",
        &qn,
        &["w".to_string()],
        &w_matrix,
    )?;
    write_rational_matrix_csv(
        &out.join("W.csv"),
        "quantity",
        &qn,
        &pi_names,
        &dec.null_basis,
    )?;
    write_rational_matrix_csv(&out.join("A.csv"), "quantity", &qn, &a_names, &dec.a)?;

    let groups: Vec<String> = dec
        .null_basis
        .columns()
        .iter()
        .map(|c| pi_group_label(dec, c))
        .collect();
    let value = json!({
        "units": units,
        "quantities": qn,
        "qoi": { "name": dec.qoi_name, "dimension": dec.qoi_dimension.exponents().iter().map(format_rational).collect::<Vec<_>>() },
        "rank": dec.rank,
        "n": dec.n(),
        "complete": !dec.is_incomplete(),
        "qoi_dimensionless": dec.qoi_dimensionless,
        "D": dec.d.entries.to_strings(),
        "w": dec.w.iter().map(format_rational).collect::<Vec<_>>(),
        "W": dec.null_basis.to_strings(),
        "A": dec.a.to_strings(),
        "pi_groups": groups,
    });
    write_json(&out.join("pi.json"), &value)?;
    Ok(value)
}

fn cmd_pi(out: &Path, model: &str) -> Result<(String, serde_json::Value)> {
    let spec = resolve_model(model)?;
    let dec = spec.decompose()?;
    let value = write_decomposition(out, &dec)?;
    let mut s = format!(
        "model {}\nD =\n{:?}rank = {}\n",
        spec.name, dec.d.entries, dec.rank
    );
    if dec.is_incomplete() {
        s.push_str(&format!(
            "warning: rank {} < {} units; using n = m - rank\n",
            dec.rank,
            dec.d.k()
        ));
    }
    s.push_str(&format!(
        "w = [{}]\nW =\n{:?}A =\n{:?}pi groups: {}",
        dec.w
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(", "),
        dec.null_basis,
        dec.a,
        value["pi_groups"]
            .as_array()
            .map(|g| g
                .iter()
                .filter_map(|x| x.as_str())
                .collect::<Vec<_>>()
                .join("; "))
            .unwrap_or_default()
    ));
    Ok((s, json!({ "command": "pi", "model": model })))
}

/// Resolves a model argument to a runnable built-in, honouring ranges from a file.
fn runnable_model(arg: &str, re_crit: f64) -> Result<(BuiltinModel, ModelSpec)> {
    let spec = resolve_model(arg)?;
    let regime = spec.builtin.ok_or_else(|| {
        Error::Schema(format!(
            "model `{}` names no built-in evaluator (set \"builtin\")",
            spec.name
        ))
    })?;
    let mut model = builtin_model(regime)?.with_re_crit(re_crit);
    let decls = spec.quantity_decls()?;
    if decls.len() != model.quantities.len() {
        return Err(Error::Schema(format!(
            "built-in `{}` takes {} quantities",
            regime.model_id(),
            model.quantities.len()
        )));
    }
    model.log_bounds = decls.iter().map(|d| d.log_bounds()).collect();
    Ok((model, spec))
}

#[derive(Serialize)]
struct ActiveReport {
    model: String,
    quad_order: usize,
    fd_step: f64,
    points: usize,
    re_crit: f64,
    eigenvalues: Vec<f64>,
    ratios: Vec<f64>,
    clamped: bool,
    k: usize,
    inclusion_r2: f64,
    turbulent_fraction: f64,
}

fn turbulent_fraction(model: &BuiltinModel, quad_order: usize) -> Result<f64> {
    let grid = tensor_grid(quad_order, &model.log_bounds)?;
    let turbulent = grid
        .iter()
        .filter(|(x, _)| model.solve_log(x).regime == Regime::Turbulent)
        .count();
    Ok(turbulent as f64 / grid.len() as f64)
}

fn write_eigen(
    out: &Path,
    quantities: &[String],
    eigenvalues: &[f64],
    vectors: &DMatrix<f64>,
) -> Result<()> {
    let top = eigenvalues[0];
    let rows: Vec<Vec<String>> = eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            vec![
                (i + 1).to_string(),
                fmt_f64(l),
                fmt_f64(if top > 0.0 { l / top } else { 0.0 }),
            ]
        })
        .collect();
    write_csv(
        &out.join("eigenvalues.csv"),
        &["index".into(), "eigenvalue".into(), "ratio".into()],
        &rows,
    )?;
    let cols: Vec<String> = (1..=vectors.ncols()).map(|i| format!("u{i}")).collect();
    write_matrix_csv(
        &out.join("eigenvectors.csv"),
        "quantity",
        quantities,
        &cols,
        vectors,
    )
}

fn active_report(
    out: &Path,
    model: &BuiltinModel,
    id: &str,
    quad_order: usize,
    fd_step: f64,
    k: usize,
    par: Parallelism,
) -> Result<ActiveReport> {
    let grid = tensor_grid(quad_order, &model.log_bounds)?;
    let est = estimate(
        &|x: &[f64]| model.eval_log(x),
        &grid,
        &GradientConfig::new(fd_step)?,
        par,
    )?;
    let u = crate::activesubspace::active_subspace(&est, k)?;
    let r2 = inclusion_residual(&u, &model.decomposition.a_f64())?.total;
    let quantities = names(&model.decomposition.d.column_names);
    write_eigen(out, &quantities, &est.eigenvalues, &est.eigenvectors)?;
    let report = ActiveReport {
        model: id.to_string(),
        quad_order,
        fd_step,
        points: grid.len(),
        re_crit: model.re_crit,
        ratios: est.ratios(),
        eigenvalues: est.eigenvalues,
        clamped: est.clamped,
        k,
        inclusion_r2: r2,
        turbulent_fraction: turbulent_fraction(model, quad_order)?,
    };
    write_json(&out.join("active.json"), &report)?;
    Ok(report)
}

fn cmd_active(out: &Path, a: &ActiveArgs, par: Parallelism) -> Result<(String, serde_json::Value)> {
    check_estimation(a.est.quad_order, Some(a.fd_step), None)?;
    let (model, spec) = runnable_model(&a.model, a.est.re_crit)?;
    let k = a.k.unwrap_or_else(|| model.regime.active_dimension());
    let r = active_report(out, &model, &spec.name, a.est.quad_order, a.fd_step, k, par)?;
    let lines: Vec<String> = r
        .eigenvalues
        .iter()
        .zip(&r.ratios)
        .map(|(l, q)| format!("  {l:.6e}  ({q:.3e})"))
        .collect();
    let summary = format!(
        "{}: {} points, h = {:e}\neigenvalues (ratio to first):\n{}\ninclusion r2 (k = {}) = {:.3e}",
        r.model,
        r.points,
        r.fd_step,
        lines.join("\n"),
        r.k,
        r.inclusion_r2
    );
    let config = json!({
        "command": "active", "model": a.model, "quad_order": a.est.quad_order,
        "fd_step": a.fd_step, "k": k, "re_crit": a.est.re_crit,
    });
    Ok((summary, config))
}

fn cmd_inclusion(
    out: &Path,
    candidate: &Path,
    enclosing: &Path,
) -> Result<(String, serde_json::Value)> {
    let b1 = read_matrix_csv(candidate)?;
    let b2 = read_matrix_csv(enclosing)?;
    let report = inclusion_residual(&b1, &b2)?;
    write_json(&out.join("inclusion.json"), &report)?;
    let rows: Vec<Vec<String>> = report
        .per_column_residuals
        .iter()
        .enumerate()
        .map(|(i, r)| vec![(i + 1).to_string(), fmt_f64(*r)])
        .collect();
    write_csv(
        &out.join("inclusion.csv"),
        &["column".into(), "residual2".into()],
        &rows,
    )?;
    let config = json!({ "command": "inclusion", "candidate": candidate, "enclosing": enclosing });
    Ok((format!("r2 = {}", fmt_f64(report.total)), config))
}

pub fn write_sweep(out: &Path, sweep: &SweepResult) -> Result<()> {
    let rows: Vec<Vec<String>> = sweep
        .points
        .iter()
        .map(|p| {
            vec![
                fmt_f64(p.h),
                fmt_f64(p.r2),
                p.slope_so_far.map_or_else(|| "nan".into(), fmt_f64),
            ]
        })
        .collect();
    write_csv(
        &out.join("sweep.csv"),
        &["h".into(), "r2".into(), "slope_so_far".into()],
        &rows,
    )?;
    write_json(&out.join("sweep.json"), sweep)
}

fn sweep_summary(sweep: &SweepResult) -> String {
    let lines: Vec<String> = sweep
        .points
        .iter()
        .map(|p| format!("  h = {:.0e}  r2 = {:.6e}", p.h, p.r2))
        .collect();
    format!(
        "{} sweep (k = {}):\n{}\nlog-log slope = {}",
        sweep.regime,
        sweep.k,
        lines.join("\n"),
        sweep
            .slope
            .map_or_else(|| "n/a".into(), |s| format!("{s:.4}"))
    )
}

fn cmd_sweep(out: &Path, s: &SweepArgs, par: Parallelism) -> Result<(String, serde_json::Value)> {
    check_estimation(s.est.quad_order, None, Some(&s.steps))?;
    let (model, _) = runnable_model(&s.model, s.est.re_crit)?;
    let sweep = convergence_sweep_model(&model, &s.steps, s.est.quad_order, par)?;
    write_sweep(out, &sweep)?;
    let config = json!({
        "command": "sweep", "model": s.model, "steps": s.steps,
        "quad_order": s.est.quad_order, "re_crit": s.est.re_crit,
    });
    Ok((sweep_summary(&sweep), config))
}

fn cmd_eval(out: &Path, state: PipeState, re_crit: f64) -> Result<(String, serde_json::Value)> {
    let sol = bulk_velocity_with(&state, re_crit);
    let value = json!({
        "V": sol.velocity,
        "Re": reynolds(&state, sol.velocity),
        "f": friction_factor(&state, sol.velocity)?,
        "regime": sol.regime,
    });
    write_json(&out.join("eval.json"), &value)?;
    let config =
        json!({ "command": "pipeflow eval", "state": state.as_array(), "re_crit": re_crit });
    Ok((serde_json::to_string_pretty(&value)?, config))
}

fn cmd_reproduce(
    out: &Path,
    regime: Regime,
    fd_step: f64,
    steps: &[f64],
    est: &EstimationArgs,
    par: Parallelism,
) -> Result<(String, serde_json::Value)> {
    check_estimation(est.quad_order, Some(fd_step), Some(steps))?;
    let model = builtin_model(regime)?.with_re_crit(est.re_crit);
    let report = active_report(
        out,
        &model,
        regime.model_id(),
        est.quad_order,
        fd_step,
        regime.active_dimension(),
        par,
    )?;
    let sweep = convergence_sweep_model(&model, steps, est.quad_order, par)?;
    write_sweep(out, &sweep)?;
    write_json(
        &out.join("reproduce.json"),
        &json!({
            "regime": regime,
            "active": report,
            "sweep_slope": sweep.slope,
            "sweep_monotone": sweep.is_monotone_decreasing(),
        }),
    )?;
    let summary = format!(
        "{regime}: eigenvalue ratios {:?}\nturbulent fraction {:.4}\n{}",
        report
            .ratios
            .iter()
            .map(|r| format!("{r:.3e}"))
            .collect::<Vec<_>>(),
        report.turbulent_fraction,
        sweep_summary(&sweep)
    );
    let config = json!({
        "command": "pipeflow reproduce", "regime": regime, "fd_step": fd_step,
        "steps": steps, "quad_order": est.quad_order, "re_crit": est.re_crit,
    });
    Ok((summary, config))
}
