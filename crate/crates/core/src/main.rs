use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tdssp::certify::{certify, closed_form_c, Family, MaxROptions};
use tdssp::registry::{self, Params, DEFAULT_K, DEFAULT_KAPPA, DEFAULT_STEPS};
use tdssp::sweep::{convergence, convergence_csv, order_report, tv_sweep, ConvergenceProblem, SweepOptions};
use tdssp::{Error, Result};

#[derive(Parser)]
#[command(name = "tdssp", version, about = "SSP two-derivative integrators: certificates, order checks and TV experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Total-variation sweep over lambda = dt/dx on upwind advection of a step.
    TvSweep {
        #[arg(long)]
        method: String,
        #[arg(long, default_value_t = 0.000625)]
        dx: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = 0.05)]
        lambda_min: f64,
        #[arg(long, default_value_t = 2.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 0.0025)]
        lambda_step: f64,
        #[arg(long, default_value_t = 1e-4)]
        refine: f64,
        #[arg(long, default_value_t = 1e-10)]
        rise_tol: f64,
        #[arg(long = "K", default_value_t = DEFAULT_K)]
        k: f64,
        #[arg(long, default_value_t = DEFAULT_KAPPA)]
        kappa: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify the SSP coefficient of a method and emit the certificate as JSON.
    Certify {
        #[arg(long)]
        method: String,
        #[arg(long = "K", default_value_t = DEFAULT_K)]
        k_const: f64,
        #[arg(long, default_value_t = DEFAULT_KAPPA)]
        kappa: f64,
        /// Number of steps for the k-step GLM family.
        #[arg(long = "k", default_value_t = DEFAULT_STEPS)]
        steps: usize,
        #[arg(long, default_value_t = 100.0)]
        r_max: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate order-condition residuals and emit the report as JSON.
    OrderCheck {
        #[arg(long)]
        method: String,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Temporal convergence study at t = 1: dt, error, observed order.
    Convergence {
        #[arg(long)]
        method: String,
        /// ode-riccati or relax-ode; chosen from the method class when omitted.
        #[arg(long)]
        problem: Option<String>,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025,0.0125")]
        dt_list: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit every registry entry as JSON.
    ListMethods {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Io(e.to_string()))
}

fn family_of(name: &str) -> Option<Family> {
    match name {
        "td-ts" => Some(Family::Taylor),
        "td-2s4p" => Some(Family::TwoStageFourth),
        "td-2s3p" => Some(Family::TwoStageThird),
        "td-3s5p" => Some(Family::ThreeStageFifth),
        _ => None,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::TvSweep { method, dx, steps, lambda_min, lambda_max, lambda_step, refine, rise_tol, k, kappa, out } => {
            let spec = registry::lookup_with(&method, &Params { k, kappa, ..Params::default() })?;
            let opts = SweepOptions { dx, steps, lambda_min, lambda_max, lambda_step, refine, rise_tol };
            let res = tv_sweep(&spec, &opts)?;
            emit(&out, &res.to_csv())?;
            eprintln!(
                "{}: lambda_obs = {:.4}{}",
                res.method,
                res.lambda_obs,
                if res.always_rose { " (total variation rises at every sampled lambda)" } else { "" }
            );
            Ok(())
        }
        Cmd::Certify { method, k_const, kappa, steps, r_max, out } => {
            let spec = registry::lookup_with(&method, &Params { k: k_const, kappa, steps })?;
            let cert = certify(&spec, &MaxROptions { r_max, ..MaxROptions::default() })?;
            emit(&out, &json(&cert)?)?;
            if let Some(f) = family_of(spec.name) {
                let c = closed_form_c(f, k_const)?;
                let r = cert.certified_r.as_f64();
                eprintln!("closed form = {c}, certified = {r}, delta = {:e}", r - c);
            }
            Ok(())
        }
        Cmd::OrderCheck { method, order, tol, k, out } => {
            let spec = registry::lookup_with(&method, &Params { steps: k, ..Params::default() })?;
            let mut rep = order_report(&spec, order.unwrap_or(spec.order))?;
            if let Some(t) = tol {
                rep = rep.with_tol(t);
            }
            emit(&out, &json(&rep)?)?;
            if rep.satisfied {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{} fails order {} (max residual {:e} > {:e})",
                    spec.name, rep.p, rep.max_abs_residual, rep.tol
                )))
            }
        }
        Cmd::Convergence { method, problem, dt_list, k, out } => {
            let spec = registry::lookup_with(&method, &Params { steps: k, ..Params::default() })?;
            let problem = match problem {
                Some(p) => ConvergenceProblem::parse(&p)?,
                None => ConvergenceProblem::for_method(&spec),
            };
            let rows = convergence(&spec, problem, &dt_list)?;
            emit(&out, &convergence_csv(spec.name, &rows))
        }
        Cmd::ListMethods { out } => {
            let all: Vec<_> = registry::all().iter().map(|m| m.export()).collect();
            emit(&out, &json(&all)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
