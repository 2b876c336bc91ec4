//! Experiment drivers: the total-variation λ-sweep and temporal convergence studies.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrate::{integrate, Starting, State, System};
use crate::order::{imex_glm_residuals, imex_mdrk_residuals, mdrk_residuals, OrderReport};
use crate::problems::{step_ic, Advection, FdotVariant, RelaxationOde, Riccati};
use crate::registry::{Base, Method, MethodSpec};

/// Sweep settings; the defaults match the reference experiment: 1600 cells, 50 steps.
#[derive(Debug, Clone, Serialize)]
pub struct SweepOptions {
    pub dx: f64,
    pub steps: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_step: f64,
    /// Width to which the first rise is bracketed.
    pub refine: f64,
    /// A per-step rise above this counts as a rise.
    pub rise_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            dx: 1.0 / 1600.0,
            steps: 50,
            lambda_min: 0.05,
            lambda_max: 2.0,
            lambda_step: 0.0025,
            refine: 1e-4,
            rise_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub max_rise_step: f64,
    pub max_rise_initial: f64,
    /// The run overflowed before finishing; both rises are then infinite.
    pub blew_up: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub method: String,
    pub rows: Vec<SweepRow>,
    /// Largest λ below the first rise, refined by bisection; 0 if the first sample already rises.
    pub lambda_obs: f64,
    /// No sampled λ rose.
    pub never_rose: bool,
    /// Every sampled λ rose.
    pub always_rose: bool,
}

impl SweepResult {
    /// CSV with a `#` schema line and a trailing `#` summary line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# tv-sweep v1: lambda,max_rise_step,max_rise_initial,blew_up\n");
        out.push_str("lambda,max_rise_step,max_rise_initial,blew_up\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.lambda, r.max_rise_step, r.max_rise_initial, r.blew_up));
        }
        out.push_str(&format!("# method={} lambda_obs={:.4}\n", self.method, self.lambda_obs));
        out
    }
}

/// Advection discretization matching a method's base condition.
pub fn advection_for(spec: &MethodSpec, m: usize) -> Result<Advection> {
    if spec.explicit().is_none() {
        return Err(Error::ClassMismatch {
            method: spec.name.to_string(),
            reason: "the total-variation sweep needs an explicit two-derivative method".into(),
        });
    }
    let variant = match spec.base {
        Base::TaylorSeries { .. } => FdotVariant::SquaredUpwind,
        _ => FdotVariant::Centered,
    };
    Ok(Advection::new(m, variant))
}

/// Run one λ point from the step initial data.
pub fn tv_row(spec: &MethodSpec, sys: &Advection, steps: usize, lambda: f64) -> Result<SweepRow> {
    let u0 = step_ic(sys.m);
    match integrate(spec, sys, &u0, lambda * sys.dx, steps, Starting::SingleStep) {
        Ok((_, rep)) => Ok(SweepRow {
            lambda,
            max_rise_step: rep.max_rise_step,
            max_rise_initial: rep.max_rise_initial,
            blew_up: false,
        }),
        Err(Error::BlowUp { .. }) => {
            Ok(SweepRow { lambda, max_rise_step: f64::INFINITY, max_rise_initial: f64::INFINITY, blew_up: true })
        }
        Err(e) => Err(e),
    }
}

/// Total-variation sweep over λ = Δt/Δx.
pub fn tv_sweep(spec: &MethodSpec, opts: &SweepOptions) -> Result<SweepResult> {
    if !(opts.dx > 0.0 && opts.lambda_step > 0.0 && opts.lambda_min > 0.0 && opts.lambda_max >= opts.lambda_min) {
        return Err(Error::InvalidParameter("sweep needs dx, lambda_step, lambda_min > 0 and lambda_max >= lambda_min".into()));
    }
    if opts.steps == 0 {
        return Err(Error::InvalidParameter("steps must be at least 1".into()));
    }
    let m = (1.0 / opts.dx).round() as usize;
    if m < 4 || ((1.0 / m as f64) - opts.dx).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("dx = {} must be 1/m with m >= 4", opts.dx)));
    }
    let sys = advection_for(spec, m)?;
    let n = ((opts.lambda_max - opts.lambda_min) / opts.lambda_step + 1e-9).floor() as usize + 1;
    let rows: Vec<SweepRow> = (0..n)
        .into_par_iter()
        .map(|i| tv_row(spec, &sys, opts.steps, opts.lambda_min + i as f64 * opts.lambda_step))
        .collect::<Result<_>>()?;
    let rises = |r: &SweepRow| r.blew_up || r.max_rise_step > opts.rise_tol;
    let first = rows.iter().position(rises);
    let always_rose = rows.iter().all(rises);
    let lambda_obs = match first {
        None => rows.last().map_or(0.0, |r| r.lambda),
        Some(0) => 0.0,
        Some(i) => {
            let (mut lo, mut hi) = (rows[i - 1].lambda, rows[i].lambda);
            while hi - lo > opts.refine {
                let mid = 0.5 * (lo + hi);
                if rises(&tv_row(spec, &sys, opts.steps, mid)?) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            lo
        }
    };
    Ok(SweepResult { method: spec.name.to_string(), rows, lambda_obs, never_rose: first.is_none(), always_rose })
}

/// Order-condition report at order `p` for any registry entry.
pub fn order_report(spec: &MethodSpec, p: usize) -> Result<OrderReport> {
    let rep = match &spec.method {
        Method::Explicit(m) => mdrk_residuals(m, p)?,
        Method::Implicit(m) => mdrk_residuals(&m.to_butcher(), p)?,
        Method::ImexRk(m) => imex_mdrk_residuals(&m.to_butcher(), p)?,
        Method::ImexGlm(m) => imex_glm_residuals(&m.to_butcher(), p)?,
    };
    Ok(rep.named(spec.name).with_tol(spec.residual_tol))
}

/// Smooth problems for convergence studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceProblem {
    /// `u' = -u^2`, `u(0) = 1`, integrated to `t = 1`.
    Riccati,
    /// Relaxing pair with a nonlinear explicit part, integrated to `t = 1`.
    RelaxOde,
}

impl ConvergenceProblem {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ode-riccati" => Ok(Self::Riccati),
            "relax-ode" => Ok(Self::RelaxOde),
            _ => Err(Error::InvalidParameter(format!("unknown problem {s}; available: ode-riccati, relax-ode"))),
        }
    }

    /// Default problem for a method class.
    pub fn for_method(spec: &MethodSpec) -> Self {
        match spec.method {
            Method::Explicit(_) | Method::Implicit(_) => Self::Riccati,
            _ => Self::RelaxOde,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub error: f64,
    /// `log2`-style rate against the previous row; `None` on the first row.
    pub observed_order: Option<f64>,
}

/// Max-norm errors at `t = 1` for each `dt` (each must divide 1 evenly) and observed orders.
pub fn convergence(spec: &MethodSpec, problem: ConvergenceProblem, dts: &[f64]) -> Result<Vec<ConvergenceRow>> {
    let run = |sys: &dyn System, u0: &State, exact: &State, dt: f64| -> Result<f64> {
        let n = (1.0 / dt).round() as usize;
        if n == 0 || (n as f64 * dt - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("dt = {dt} must divide the unit interval")));
        }
        let (u, _) = integrate(spec, sys, u0, dt, n, Starting::Exact)?;
        Ok((u - exact).amax())
    };
    let errors: Vec<f64> = match (problem, &spec.method) {
        (ConvergenceProblem::Riccati, Method::Explicit(_)) => {
            let sys = Riccati::explicit();
            let u0 = State::from_vec(vec![1.0]);
            let exact = sys.exact(&u0, 1.0).expect("closed form");
            dts.iter().map(|&dt| run(&sys, &u0, &exact, dt)).collect::<Result<_>>()?
        }
        (ConvergenceProblem::Riccati, Method::Implicit(_)) => {
            let sys = Riccati::implicit();
            let u0 = State::from_vec(vec![1.0]);
            let exact = sys.exact(&u0, 1.0).expect("closed form");
            dts.iter().map(|&dt| run(&sys, &u0, &exact, dt)).collect::<Result<_>>()?
        }
        (ConvergenceProblem::RelaxOde, Method::ImexRk(_) | Method::ImexGlm(_)) => {
            let sys = RelaxationOde::default();
            let u0 = sys.initial();
            let exact = sys.reference(&u0, 1.0, 20_000);
            dts.iter().map(|&dt| run(&sys, &u0, &exact, dt)).collect::<Result<_>>()?
        }
        _ => {
            return Err(Error::ClassMismatch {
                method: spec.name.to_string(),
                reason: format!("{problem:?} does not suit this method class"),
            })
        }
    };
    Ok(dts
        .iter()
        .zip(&errors)
        .enumerate()
        .map(|(i, (&dt, &error))| ConvergenceRow {
            dt,
            error,
            observed_order: (i > 0).then(|| (errors[i - 1] / error).ln() / (dts[i - 1] / dt).ln()),
        })
        .collect())
}

/// CSV of a convergence table with a `#` schema line.
pub fn convergence_csv(method: &str, rows: &[ConvergenceRow]) -> String {
    let mut out = format!("# convergence v1 method={method}: dt,error,observed_order\ndt,error,observed_order\n");
    for r in rows {
        let p = r.observed_order.map_or(String::new(), |p| p.to_string());
        out.push_str(&format!("{},{},{p}\n", r.dt, r.error));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::lookup;

    #[test]
    fn coarse_sweep_brackets_taylor() {
        let opts = SweepOptions { dx: 1.0 / 200.0, lambda_step: 0.05, refine: 1e-3, ..Default::default() };
        let r = tv_sweep(&lookup("td-ts").unwrap(), &opts).unwrap();
        assert!(r.lambda_obs > 0.6 && r.lambda_obs < 0.7, "{}", r.lambda_obs);
        assert!(r.to_csv().starts_with("# "));
    }

    #[test]
    fn sweep_rejects_imex() {
        let e = tv_sweep(&lookup("imex-rk-p2").unwrap(), &SweepOptions::default()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn taylor_converges_second_order() {
        let rows = convergence(&lookup("td-ts").unwrap(), ConvergenceProblem::Riccati, &[0.1, 0.05, 0.025]).unwrap();
        let p = rows[2].observed_order.unwrap();
        assert!((p - 2.0).abs() < 0.2, "{p}");
    }

    #[test]
    fn wrong_pairing() {
        let spec = lookup("imex-rk-p2").unwrap();
        assert!(convergence(&spec, ConvergenceProblem::Riccati, &[0.1]).is_err());
    }
}
