//! Time-stepping engines for the four method classes, a driver, and the
//! convex-functional monitor.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::registry::{self, Method, MethodSpec};
use crate::tableau::{ButcherTd, ImexGlm, ImexRk, ImplicitNd};

pub type State = DVector<f64>;

/// Relative bound on the implicit stage residual, before stiffness scaling.
pub const STAGE_RESIDUAL_TOL: f64 = 1e-12;
/// A run is declared blown up once the functional exceeds this multiple of its start value.
pub const BLOWUP_FACTOR: f64 = 1e10;

/// A semi-discrete system `u' = F_ex(u) + F_im(u)` with derivative terms.
///
/// Explicit two-derivative methods use `f_ex`/`fdot_ex`; implicit methods use
/// `f_im`/`fdot_im` through [`System::stage_solve`]; IMEX methods use `f_ex` and the
/// implicit pair.
pub trait System: Sync {
    fn dim(&self) -> usize;

    fn f_ex(&self, u: &State) -> State {
        State::zeros(u.len())
    }
    fn fdot_ex(&self, u: &State) -> State {
        State::zeros(u.len())
    }
    fn f_im(&self, u: &State) -> State {
        State::zeros(u.len())
    }
    fn fdot_im(&self, u: &State) -> State {
        State::zeros(u.len())
    }

    /// Solve `u = a + gamma f_im(u) + gamma_dot fdot_im(u)`.
    fn stage_solve(&self, a: &State, gamma: f64, gamma_dot: f64) -> Result<State> {
        if gamma == 0.0 && gamma_dot == 0.0 {
            Ok(a.clone())
        } else {
            Err(Error::ClassMismatch { method: "implicit".into(), reason: "system has no implicit stage solver".into() })
        }
    }

    /// Size of the implicit operator for a stage solve, used to scale the residual
    /// check: a correctly rounded solution of a stiff stage leaves a residual
    /// proportional to this value.
    fn stage_scale(&self, _gamma: f64, _gamma_dot: f64) -> f64 {
        1.0
    }

    /// The monitored convex functional.
    fn functional(&self, u: &State) -> f64;

    /// Forward Euler step limit.
    fn dt_fe(&self) -> f64;

    /// Exact (or dense reference) solution at time `t` from `u0`, when available.
    fn exact(&self, _u0: &State, _t: f64) -> Option<State> {
        None
    }
}

fn finite(u: &State, stage: usize) -> Result<()> {
    if u.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::BlowUp { step: 0, stage })
    }
}

fn column_used(m: &DMatrix<f64>, w: &DVector<f64>, j: usize) -> bool {
    w[j] != 0.0 || m.column(j).iter().any(|x| *x != 0.0)
}

/// One step of an explicit two-derivative Runge–Kutta method.
pub fn step_explicit<S: System + ?Sized>(m: &ButcherTd, sys: &S, u: &State, dt: f64) -> Result<State> {
    if !m.is_explicit() {
        return Err(Error::ClassMismatch { method: "tableau".into(), reason: "not explicit".into() });
    }
    let s = m.stages();
    let (a, ad, b, bd) = (m.a(), m.a_dot(), m.b(), m.b_dot());
    let dt2 = dt * dt;
    let mut f: Vec<Option<State>> = vec![None; s];
    let mut fd: Vec<Option<State>> = vec![None; s];
    for i in 0..s {
        let mut y = u.clone();
        for j in 0..i {
            if a[(i, j)] != 0.0 {
                y.axpy(dt * a[(i, j)], f[j].as_ref().expect("evaluated"), 1.0);
            }
            if ad[(i, j)] != 0.0 {
                y.axpy(dt2 * ad[(i, j)], fd[j].as_ref().expect("evaluated"), 1.0);
            }
        }
        finite(&y, i + 1)?;
        if column_used(a, b, i) {
            f[i] = Some(sys.f_ex(&y));
        }
        if column_used(ad, bd, i) {
            fd[i] = Some(sys.fdot_ex(&y));
        }
    }
    let mut out = u.clone();
    for j in 0..s {
        if b[j] != 0.0 {
            out.axpy(dt * b[j], f[j].as_ref().expect("evaluated"), 1.0);
        }
        if bd[j] != 0.0 {
            out.axpy(dt2 * bd[j], fd[j].as_ref().expect("evaluated"), 1.0);
        }
    }
    finite(&out, s + 1)?;
    Ok(out)
}

fn solve_stage<S: System + ?Sized>(sys: &S, a: &State, gamma: f64, gamma_dot: f64, stage: usize) -> Result<State> {
    if gamma == 0.0 && gamma_dot == 0.0 {
        return Ok(a.clone());
    }
    let u = sys.stage_solve(a, gamma, gamma_dot)?;
    finite(&u, stage)?;
    let residual = (&u - a - gamma * sys.f_im(&u) - gamma_dot * sys.fdot_im(&u)).amax();
    let bound = STAGE_RESIDUAL_TOL * (1.0 + a.amax()) * sys.stage_scale(gamma, gamma_dot);
    if !(residual <= bound) {
        return Err(Error::SolverResidual { residual, bound });
    }
    Ok(u)
}

/// One step of an implicit negative-derivative method.
pub fn step_implicit_nd<S: System + ?Sized>(m: &ImplicitNd, sys: &S, u: &State, dt: f64) -> Result<State> {
    let s = m.stages();
    let mut y: Vec<State> = Vec::with_capacity(s);
    for i in 0..s {
        let mut a = m.re[i] * u;
        for (j, yj) in y.iter().enumerate() {
            if m.p[(i, j)] != 0.0 {
                a.axpy(m.p[(i, j)], yj, 1.0);
            }
        }
        y.push(solve_stage(sys, &a, dt * m.d[i], dt * dt * m.d_dot[i], i + 1)?);
    }
    Ok(y.pop().expect("at least one stage"))
}

/// Explicit building blocks `y_j + (dt/r) F_ex(y_j)`, computed only where a weight uses them.
fn fe_block<S: System + ?Sized>(sys: &S, y: &State, dt_over_r: f64) -> State {
    let mut out = y.clone();
    out.axpy(dt_over_r, &sys.f_ex(y), 1.0);
    out
}

/// One step of a two-derivative IMEX Runge–Kutta method.
pub fn step_imex_rk<S: System + ?Sized>(m: &ImexRk, sys: &S, u: &State, dt: f64) -> Result<State> {
    let s = m.stages();
    let h = dt / m.r;
    let mut y: Vec<State> = Vec::with_capacity(s);
    let mut fe: Vec<Option<State>> = Vec::with_capacity(s);
    for i in 0..s {
        let mut a = m.re[i] * u;
        for j in 0..i {
            if m.p[(i, j)] != 0.0 {
                a.axpy(m.p[(i, j)], &y[j], 1.0);
            }
            if m.w[(i, j)] != 0.0 {
                a.axpy(m.w[(i, j)], fe[j].as_ref().expect("evaluated"), 1.0);
            }
        }
        let yi = solve_stage(sys, &a, dt * m.d[i], dt * dt * m.d_dot[i], i + 1)?;
        let used = (i + 1..s).any(|k| m.w[(k, i)] != 0.0);
        fe.push(used.then(|| fe_block(sys, &yi, h)));
        y.push(yi);
    }
    Ok(y.pop().expect("at least one stage"))
}

/// One step of a two-derivative IMEX GLM. `hist` holds `u^{n+1-k}, ..., u^n`, oldest first.
pub fn step_imex_glm<S: System + ?Sized>(m: &ImexGlm, sys: &S, hist: &[State], dt: f64) -> Result<State> {
    if hist.len() != m.k {
        return Err(Error::HistoryLength { got: hist.len(), need: m.k });
    }
    let s = m.stages();
    let h = dt / m.r;
    let mut y: Vec<State> = Vec::with_capacity(s);
    let mut fe: Vec<Option<State>> = Vec::with_capacity(s);
    for i in 0..s {
        let mut a = State::zeros(sys.dim());
        for (l, ul) in hist.iter().enumerate() {
            if m.rh[(i, l)] != 0.0 {
                a.axpy(m.rh[(i, l)], ul, 1.0);
            }
        }
        for j in 0..i {
            if m.p[(i, j)] != 0.0 {
                a.axpy(m.p[(i, j)], &y[j], 1.0);
            }
            if m.w[(i, j)] != 0.0 {
                a.axpy(m.w[(i, j)], fe[j].as_ref().expect("evaluated"), 1.0);
            }
        }
        let yi = solve_stage(sys, &a, dt * m.d[i], dt * dt * m.d_dot[i], i + 1)?;
        let used = m.v[i] != 0.0 || (i + 1..s).any(|k| m.w[(k, i)] != 0.0);
        fe.push(used.then(|| fe_block(sys, &yi, h)));
        y.push(yi);
    }
    let mut out = State::zeros(sys.dim());
    for (l, ul) in hist.iter().enumerate() {
        if m.gamma[l] != 0.0 {
            out.axpy(m.gamma[l], ul, 1.0);
        }
    }
    for j in 0..s {
        if m.q[j] != 0.0 {
            out.axpy(m.q[j], &y[j], 1.0);
        }
        if m.v[j] != 0.0 {
            out.axpy(m.v[j], fe[j].as_ref().expect("evaluated"), 1.0);
        }
    }
    finite(&out, s + 1)?;
    Ok(out)
}

/// One step of any one-step method.
pub fn step<S: System + ?Sized>(method: &Method, sys: &S, u: &State, dt: f64) -> Result<State> {
    match method {
        Method::Explicit(m) => step_explicit(m, sys, u, dt),
        Method::Implicit(m) => step_implicit_nd(m, sys, u, dt),
        Method::ImexRk(m) => step_imex_rk(m, sys, u, dt),
        Method::ImexGlm(m) if m.k == 1 => step_imex_glm(m, sys, std::slice::from_ref(u), dt),
        Method::ImexGlm(m) => Err(Error::HistoryLength { got: 1, need: m.k }),
    }
}

/// How GLM history beyond `u0` is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Starting {
    /// From [`System::exact`].
    Exact,
    /// With the registry one-step IMEX method of the same order at the same step size.
    SingleStep,
}

/// Functional values over a run and their maximal rises.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorReport {
    pub dt: f64,
    /// Functional at steps `0..=n`.
    pub functional: Vec<f64>,
    /// `max_n (f(u^{n+1}) - f(u^n))`.
    pub max_rise_step: f64,
    /// `max_n (f(u^{n+1}) - f(u^0))`.
    pub max_rise_initial: f64,
    /// First step index taken by the method itself (earlier ones are starting values).
    pub method_from: usize,
    pub starting: Option<Starting>,
}

impl MonitorReport {
    fn new(dt: f64, functional: Vec<f64>, method_from: usize, starting: Option<Starting>) -> Self {
        let f0 = functional[0];
        let max_rise_step = functional.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        let max_rise_initial = functional[1..].iter().map(|f| f - f0).fold(f64::NEG_INFINITY, f64::max);
        Self { dt, functional, max_rise_step, max_rise_initial, method_from, starting }
    }

    /// Largest `f(u^{n+1}) - max(f(u^{n+1-k}), ..., f(u^n))` over steps taken by the method.
    pub fn max_rise_over_window(&self, k: usize) -> f64 {
        let f = &self.functional;
        (self.method_from.max(k - 1)..f.len() - 1)
            .map(|n| {
                let window = f[n + 1 - k..=n].iter().copied().fold(f64::NEG_INFINITY, f64::max);
                f[n + 1] - window
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV with a versioned schema comment line.
    pub fn to_csv(&self) -> String {
        let f0 = self.functional[0];
        let mut out = String::from("# monitor v1: step,t,functional,rise_from_prev,rise_from_initial\n");
        out.push_str("step,t,functional,rise_from_prev,rise_from_initial\n");
        for (n, f) in self.functional.iter().enumerate() {
            let prev = if n == 0 { 0.0 } else { f - self.functional[n - 1] };
            out.push_str(&format!("{n},{},{f},{prev},{}\n", n as f64 * self.dt, f - f0));
        }
        out
    }
}

fn bootstrap_method(order: usize) -> Result<Method> {
    let name = if order >= 3 { "imex-rk-p3" } else { "imex-rk-p2" };
    Ok(registry::lookup(name)?.method)
}

/// Integrate `n_steps` steps of size `dt` from `u0`.
///
/// GLMs with `k > 1` take their first `k - 1` steps from `starting`; every other
/// method ignores it.
pub fn integrate<S: System + ?Sized>(
    spec: &MethodSpec,
    sys: &S,
    u0: &State,
    dt: f64,
    n_steps: usize,
    starting: Starting,
) -> Result<(State, MonitorReport)> {
    if n_steps == 0 {
        return Err(Error::InvalidParameter("n_steps must be at least 1".into()));
    }
    let f0 = sys.functional(u0);
    let limit = BLOWUP_FACTOR * f0.abs().max(f64::MIN_POSITIVE);
    let mut functional = Vec::with_capacity(n_steps + 1);
    functional.push(f0);
    let check = |u: &State, n: usize, functional: &mut Vec<f64>| -> Result<()> {
        let f = sys.functional(u);
        if !f.is_finite() || f > limit {
            return Err(Error::BlowUp { step: n, stage: 0 });
        }
        functional.push(f);
        Ok(())
    };
    let tag = |e: Error, n: usize| match e {
        Error::BlowUp { stage, .. } => Error::BlowUp { step: n, stage },
        e => e,
    };
    match &spec.method {
        Method::ImexGlm(m) if m.k > 1 => {
            let mut hist: VecDeque<State> = VecDeque::with_capacity(m.k);
            hist.push_back(u0.clone());
            let boot = bootstrap_method(spec.order)?;
            let first = (m.k - 1).min(n_steps);
            for n in 1..=first {
                let u = match starting {
                    Starting::Exact => sys.exact(u0, n as f64 * dt).ok_or_else(|| {
                        Error::InvalidParameter("exact starting values requested but the problem has none".into())
                    })?,
                    Starting::SingleStep => step(&boot, sys, hist.back().expect("nonempty"), dt).map_err(|e| tag(e, n))?,
                };
                check(&u, n, &mut functional)?;
                hist.push_back(u);
            }
            for n in m.k..=n_steps {
                let h: Vec<State> = hist.iter().cloned().collect();
                let u = step_imex_glm(m, sys, &h, dt).map_err(|e| tag(e, n))?;
                check(&u, n, &mut functional)?;
                hist.pop_front();
                hist.push_back(u);
            }
            let last = hist.pop_back().expect("nonempty");
            Ok((last, MonitorReport::new(dt, functional, m.k - 1, Some(starting))))
        }
        method => {
            let mut u = u0.clone();
            for n in 1..=n_steps {
                u = step(method, sys, &u, dt).map_err(|e| tag(e, n))?;
                check(&u, n, &mut functional)?;
            }
            Ok((u, MonitorReport::new(dt, functional, 0, None)))
        }
    }
}
