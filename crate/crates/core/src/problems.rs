//! Semi-discrete model problems.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::integrate::System;

/// Periodic total variation `sum_j |u_{j+1} - u_j|`.
pub fn total_variation(u: &[f64]) -> f64 {
    let m = u.len();
    (0..m).map(|j| (u[(j + 1) % m] - u[j]).abs()).sum()
}

/// Indicator of `[1/4, 1/2]` sampled at cell centres `(j + 1/2)/m`.
pub fn step_ic(m: usize) -> DVector<f64> {
    DVector::from_fn(m, |j, _| {
        let x = (j as f64 + 0.5) / m as f64;
        if (0.25..=0.5).contains(&x) {
            1.0
        } else {
            0.0
        }
    })
}

/// Upwind difference `(u_{j+1} - u_j)/dx` with periodic wrap.
pub fn upwind_f(u: &[f64], dx: f64) -> Vec<f64> {
    let m = u.len();
    (0..m).map(|j| (u[(j + 1) % m] - u[j]) / dx).collect()
}

/// Centred second difference `(u_{j+1} - 2u_j + u_{j-1})/dx^2`.
pub fn centered_fdot(u: &[f64], dx: f64) -> Vec<f64> {
    let m = u.len();
    let h2 = dx * dx;
    (0..m).map(|j| (u[(j + 1) % m] - 2.0 * u[j] + u[(j + m - 1) % m]) / h2).collect()
}

/// Upwind difference applied twice: `(u_{j+2} - 2u_{j+1} + u_j)/dx^2`.
pub fn squared_upwind_fdot(u: &[f64], dx: f64) -> Vec<f64> {
    let m = u.len();
    let h2 = dx * dx;
    (0..m).map(|j| (u[(j + 2) % m] - 2.0 * u[(j + 1) % m] + u[j]) / h2).collect()
}

/// Plot-ready CSV of a grid function: `j, x_j, u_j`.
pub fn grid_csv(u: &[f64]) -> String {
    let m = u.len();
    let mut out = String::from("# grid v1: j,x,u\nj,x,u\n");
    for (j, v) in u.iter().enumerate() {
        out.push_str(&format!("{j},{},{v}\n", (j as f64 + 0.5) / m as f64));
    }
    out
}

/// Second-derivative discretization paired with the upwind first derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdotVariant {
    /// Centred stencil; satisfies the second-derivative condition with `K = 1/sqrt 2`.
    Centered,
    /// Upwind applied twice; satisfies the Taylor series condition with `kappa = 1`.
    SquaredUpwind,
}

/// Linear advection `u_t = u_x` on the periodic unit interval.
#[derive(Debug, Clone)]
pub struct Advection {
    pub m: usize,
    pub dx: f64,
    pub variant: FdotVariant,
}

impl Advection {
    pub fn new(m: usize, variant: FdotVariant) -> Self {
        Self { m, dx: 1.0 / m as f64, variant }
    }

    /// Base-condition constant for this variant (`K` or `kappa`).
    pub fn base_constant(&self) -> f64 {
        match self.variant {
            FdotVariant::Centered => std::f64::consts::FRAC_1_SQRT_2,
            FdotVariant::SquaredUpwind => 1.0,
        }
    }
}

impl System for Advection {
    fn dim(&self) -> usize {
        self.m
    }
    fn f_ex(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(upwind_f(u.as_slice(), self.dx))
    }
    fn fdot_ex(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(match self.variant {
            FdotVariant::Centered => centered_fdot(u.as_slice(), self.dx),
            FdotVariant::SquaredUpwind => squared_upwind_fdot(u.as_slice(), self.dx),
        })
    }
    fn functional(&self, u: &DVector<f64>) -> f64 {
        total_variation(u.as_slice())
    }
    fn dt_fe(&self) -> f64 {
        self.dx
    }
}

/// Two-velocity kinetic relaxation model on `m` periodic cells.
///
/// The state stores `f+` in the first `m` entries and `f-` in the last `m`. The
/// equilibrium map is the projection `G(p, q) = (p + q)(theta, 1 - theta)`, so
/// `theta = 1/2` relaxes both populations to their average. The stiff part is
/// `F_im = (G u - u)/eps` and its derivative term is defined as `-F_im`.
///
/// With `transport` set, `F_ex` moves `f+` right and `f-` left with unit speed
/// using upwind differences; otherwise `F_ex = 0` and only relaxation acts.
#[derive(Debug, Clone)]
pub struct Relaxation {
    pub m: usize,
    pub eps: f64,
    pub theta: f64,
    pub transport: bool,
}

impl Relaxation {
    /// Relaxation-only model; forward Euler on `F_im` is contractive for `dt <= eps`.
    pub fn toy(m: usize, eps: f64) -> Self {
        Self { m, eps, theta: 0.5, transport: false }
    }

    /// Transport plus relaxation; forward Euler on `F_ex` is contractive for `dt <= dx`.
    pub fn pde(m: usize, eps: f64) -> Self {
        Self { m, eps, theta: 0.5, transport: true }
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.m as f64
    }

    /// Apply the equilibrium projection.
    pub fn project(&self, u: &DVector<f64>) -> DVector<f64> {
        let m = self.m;
        let mut out = DVector::zeros(2 * m);
        for j in 0..m {
            let s = u[j] + u[m + j];
            out[j] = self.theta * s;
            out[m + j] = (1.0 - self.theta) * s;
        }
        out
    }

    /// Closed-form solve of `u = a + gamma F_im(u) + gamma_dot Fdot_im(u)`:
    /// with `mu = (gamma - gamma_dot)/eps`, `u = G a + (a - G a)/(1 + mu)`.
    pub fn solve(&self, a: &DVector<f64>, gamma: f64, gamma_dot: f64) -> DVector<f64> {
        let mu = (gamma - gamma_dot) / self.eps;
        let ga = self.project(a);
        &ga + (a - &ga) / (1.0 + mu)
    }

    /// Non-equilibrium initial data: a step in `f+` and a shifted, scaled step in `f-`.
    pub fn initial(&self) -> DVector<f64> {
        let m = self.m;
        let s = step_ic(m);
        DVector::from_fn(2 * m, |i, _| if i < m { s[i] } else { 0.5 * s[(i - m + m / 4) % m] })
    }

    /// Smooth initial data for convergence studies.
    pub fn smooth_initial(&self) -> DVector<f64> {
        let m = self.m;
        let tau = std::f64::consts::TAU;
        DVector::from_fn(2 * m, |i, _| {
            let x = ((i % m) as f64 + 0.5) / m as f64;
            if i < m {
                1.0 + 0.5 * (tau * x).sin()
            } else {
                1.0 + 0.25 * (tau * x).cos()
            }
        })
    }
}

impl System for Relaxation {
    fn dim(&self) -> usize {
        2 * self.m
    }
    fn f_ex(&self, u: &DVector<f64>) -> DVector<f64> {
        let m = self.m;
        if !self.transport {
            return DVector::zeros(2 * m);
        }
        let dx = self.dx();
        DVector::from_fn(2 * m, |i, _| {
            if i < m {
                -(u[i] - u[(i + m - 1) % m]) / dx
            } else {
                let j = i - m;
                (u[m + (j + 1) % m] - u[i]) / dx
            }
        })
    }
    fn f_im(&self, u: &DVector<f64>) -> DVector<f64> {
        (self.project(u) - u) / self.eps
    }
    fn fdot_im(&self, u: &DVector<f64>) -> DVector<f64> {
        -self.f_im(u)
    }
    fn stage_solve(&self, a: &DVector<f64>, gamma: f64, gamma_dot: f64) -> Result<DVector<f64>> {
        if 1.0 + (gamma - gamma_dot) / self.eps <= 0.0 {
            return Err(Error::InvalidParameter(format!("stage solve with gamma = {gamma}, gamma_dot = {gamma_dot}")));
        }
        Ok(self.solve(a, gamma, gamma_dot))
    }
    fn stage_scale(&self, gamma: f64, gamma_dot: f64) -> f64 {
        1.0 + ((gamma - gamma_dot) / self.eps).abs()
    }
    fn functional(&self, u: &DVector<f64>) -> f64 {
        let m = self.m;
        total_variation(&u.as_slice()[..m]) + total_variation(&u.as_slice()[m..])
    }
    fn dt_fe(&self) -> f64 {
        if self.transport {
            self.dx()
        } else {
            self.eps
        }
    }
}

/// Small smooth IMEX test problem: one relaxing pair `(x, y)` with `eps = 1`,
/// driven by a nonlinear non-stiff term. With `eps = 1` the derivative term
/// `-F_im` coincides with `F_im' F_im`, so IMEX order conditions apply unreduced.
#[derive(Debug, Clone)]
pub struct RelaxationOde {
    inner: Relaxation,
}

impl Default for RelaxationOde {
    fn default() -> Self {
        Self { inner: Relaxation { m: 1, eps: 1.0, theta: 0.5, transport: false } }
    }
}

impl RelaxationOde {
    pub fn initial(&self) -> DVector<f64> {
        DVector::from_vec(vec![1.0, 0.2])
    }

    fn rhs(&self, u: &DVector<f64>) -> DVector<f64> {
        self.f_ex(u) + self.f_im(u)
    }

    /// Classical RK4 on the full right-hand side with `n` steps, used as the reference.
    pub fn reference(&self, u0: &DVector<f64>, t: f64, n: usize) -> DVector<f64> {
        let h = t / n as f64;
        let mut u = u0.clone();
        for _ in 0..n {
            let k1 = self.rhs(&u);
            let k2 = self.rhs(&(&u + 0.5 * h * &k1));
            let k3 = self.rhs(&(&u + 0.5 * h * &k2));
            let k4 = self.rhs(&(&u + h * &k3));
            u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        u
    }
}

impl System for RelaxationOde {
    fn dim(&self) -> usize {
        2
    }
    fn f_ex(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(vec![u[1].sin(), -u[0] * u[0] * u[0] / 3.0])
    }
    fn f_im(&self, u: &DVector<f64>) -> DVector<f64> {
        self.inner.f_im(u)
    }
    fn fdot_im(&self, u: &DVector<f64>) -> DVector<f64> {
        self.inner.fdot_im(u)
    }
    fn stage_solve(&self, a: &DVector<f64>, gamma: f64, gamma_dot: f64) -> Result<DVector<f64>> {
        self.inner.stage_solve(a, gamma, gamma_dot)
    }
    fn stage_scale(&self, gamma: f64, gamma_dot: f64) -> f64 {
        self.inner.stage_scale(gamma, gamma_dot)
    }
    fn functional(&self, u: &DVector<f64>) -> f64 {
        u.amax()
    }
    fn dt_fe(&self) -> f64 {
        1.0
    }
    fn exact(&self, u0: &DVector<f64>, t: f64) -> Option<DVector<f64>> {
        let n = ((t / 1e-4).ceil() as usize).max(1);
        Some(self.reference(u0, t, n))
    }
}

/// Which part of the right-hand side carries `-u^2` in [`Riccati`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Explicit,
    Implicit,
}

/// Scalar Riccati equation `u' = -u^2`, `Fdot = 2u^3`, exact solution `u0/(1 + u0 t)`.
#[derive(Debug, Clone)]
pub struct Riccati {
    pub split: Split,
}

impl Riccati {
    pub fn explicit() -> Self {
        Self { split: Split::Explicit }
    }
    pub fn implicit() -> Self {
        Self { split: Split::Implicit }
    }
    fn f(u: &DVector<f64>) -> DVector<f64> {
        u.map(|x| -x * x)
    }
    fn fdot(u: &DVector<f64>) -> DVector<f64> {
        u.map(|x| 2.0 * x * x * x)
    }
}

impl System for Riccati {
    fn dim(&self) -> usize {
        1
    }
    fn f_ex(&self, u: &DVector<f64>) -> DVector<f64> {
        match self.split {
            Split::Explicit => Self::f(u),
            Split::Implicit => DVector::zeros(u.len()),
        }
    }
    fn fdot_ex(&self, u: &DVector<f64>) -> DVector<f64> {
        match self.split {
            Split::Explicit => Self::fdot(u),
            Split::Implicit => DVector::zeros(u.len()),
        }
    }
    fn f_im(&self, u: &DVector<f64>) -> DVector<f64> {
        match self.split {
            Split::Implicit => Self::f(u),
            Split::Explicit => DVector::zeros(u.len()),
        }
    }
    fn fdot_im(&self, u: &DVector<f64>) -> DVector<f64> {
        match self.split {
            Split::Implicit => Self::fdot(u),
            Split::Explicit => DVector::zeros(u.len()),
        }
    }
    /// Newton iteration on `g(u) = u - a + gamma u^2 - 2 gamma_dot u^3`.
    fn stage_solve(&self, a: &DVector<f64>, gamma: f64, gamma_dot: f64) -> Result<DVector<f64>> {
        if self.split == Split::Explicit {
            return Ok(a.clone());
        }
        let mut out = a.clone();
        for (x, &ai) in out.iter_mut().zip(a.iter()) {
            let mut u = ai;
            for _ in 0..100 {
                let g = u - ai + gamma * u * u - 2.0 * gamma_dot * u * u * u;
                let dg = 1.0 + 2.0 * gamma * u - 6.0 * gamma_dot * u * u;
                let du = g / dg;
                u -= du;
                if du.abs() <= 1e-16 * (1.0 + u.abs()) {
                    break;
                }
            }
            *x = u;
        }
        Ok(out)
    }
    fn stage_scale(&self, gamma: f64, gamma_dot: f64) -> f64 {
        1.0 + 2.0 * gamma.abs() + 6.0 * gamma_dot.abs()
    }
    fn functional(&self, u: &DVector<f64>) -> f64 {
        u.amax()
    }
    fn dt_fe(&self) -> f64 {
        1.0
    }
    fn exact(&self, u0: &DVector<f64>, t: f64) -> Option<DVector<f64>> {
        Some(u0.map(|x| x / (1.0 + x * t)))
    }
}

/// Linear system `u' = L u` with `Fdot = L^2 u`.
#[derive(Debug, Clone)]
pub struct Linear {
    pub l: DMatrix<f64>,
    l2: DMatrix<f64>,
}

impl Linear {
    pub fn new(l: DMatrix<f64>) -> Self {
        let l2 = &l * &l;
        Self { l, l2 }
    }
}

impl System for Linear {
    fn dim(&self) -> usize {
        self.l.nrows()
    }
    fn f_ex(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.l * u
    }
    fn fdot_ex(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.l2 * u
    }
    fn functional(&self, u: &DVector<f64>) -> f64 {
        u.norm()
    }
    fn dt_fe(&self) -> f64 {
        1.0
    }
}
