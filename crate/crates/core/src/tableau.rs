//! Coefficient representations for two-derivative methods and the conversions
//! between sign-structured (Shu–Osher type) and Butcher forms.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Tolerance for the row-sum consistency checks of the sign-structured forms.
pub const CONSISTENCY_TOL: f64 = 1e-12;

/// Build a dense matrix from row slices.
pub fn mat(rows: &[&[f64]]) -> DMatrix<f64> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

/// Build a vector from a slice.
pub fn vec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

fn is_strictly_lower(m: &DMatrix<f64>) -> bool {
    (0..m.nrows()).all(|i| (i..m.ncols()).all(|j| m[(i, j)] == 0.0))
}

/// Butcher-form two-derivative Runge–Kutta tableau.
///
/// Stages are `y_i = u + dt * sum_j a_ij F(y_j) + dt^2 * sum_j adot_ij Fdot(y_j)` and the
/// update is `u + dt * b^T F(y) + dt^2 * bdot^T Fdot(y)`. Abscissas are always
/// recomputed from the matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTd {
    a: DMatrix<f64>,
    a_dot: DMatrix<f64>,
    b: DVector<f64>,
    b_dot: DVector<f64>,
    c: DVector<f64>,
    c_dot: DVector<f64>,
}

impl ButcherTd {
    pub fn new(a: DMatrix<f64>, a_dot: DMatrix<f64>, b: DVector<f64>, b_dot: DVector<f64>) -> Result<Self> {
        let s = b.len();
        if a.shape() != (s, s) || a_dot.shape() != (s, s) || b_dot.len() != s || s == 0 {
            return Err(Error::InvalidParameter(format!(
                "inconsistent tableau shapes: A {:?}, Adot {:?}, b {}, bdot {}",
                a.shape(),
                a_dot.shape(),
                s,
                b_dot.len()
            )));
        }
        let e = DVector::from_element(s, 1.0);
        let c = &a * &e;
        let c_dot = &a_dot * &e;
        Ok(Self { a, a_dot, b, b_dot, c, c_dot })
    }

    /// Convenience constructor from row slices.
    pub fn from_rows(a: &[&[f64]], a_dot: &[&[f64]], b: &[f64], b_dot: &[f64]) -> Result<Self> {
        Self::new(mat(a), mat(a_dot), vec(b), vec(b_dot))
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }
    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
    pub fn a_dot(&self) -> &DMatrix<f64> {
        &self.a_dot
    }
    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }
    pub fn b_dot(&self) -> &DVector<f64> {
        &self.b_dot
    }
    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }
    pub fn c_dot(&self) -> &DVector<f64> {
        &self.c_dot
    }

    /// True when both `A` and `Adot` are strictly lower triangular.
    pub fn is_explicit(&self) -> bool {
        is_strictly_lower(&self.a) && is_strictly_lower(&self.a_dot)
    }

    /// Padded Shu–Osher pair of this tableau.
    pub fn so_pair(&self) -> SoPair {
        SoPair::from_butcher(self)
    }
}

/// Padded matrices `S = [[A, 0], [b^T, 0]]` and `Sdot = [[Adot, 0], [bdot^T, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoPair {
    pub s: DMatrix<f64>,
    pub s_dot: DMatrix<f64>,
}

impl SoPair {
    pub fn from_butcher(m: &ButcherTd) -> Self {
        let n = m.stages();
        let pad = |a: &DMatrix<f64>, b: &DVector<f64>| {
            let mut out = DMatrix::zeros(n + 1, n + 1);
            out.view_mut((0, 0), (n, n)).copy_from(a);
            for j in 0..n {
                out[(n, j)] = b[j];
            }
            out
        };
        Self { s: pad(&m.a, &m.b), s_dot: pad(&m.a_dot, &m.b_dot) }
    }

    /// Recover the Butcher tableau by block extraction.
    pub fn to_butcher(&self) -> Result<ButcherTd> {
        let n = self.s.nrows() - 1;
        let a = self.s.view((0, 0), (n, n)).into_owned();
        let a_dot = self.s_dot.view((0, 0), (n, n)).into_owned();
        let b = self.s.row(n).columns(0, n).transpose();
        let b_dot = self.s_dot.row(n).columns(0, n).transpose();
        ButcherTd::new(a, a_dot, b, b_dot)
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }
}

/// Implicit method built from backward-Euler and negative-derivative solves:
/// `u_i = r_i u^n + sum_j p_ij u_j + dt d_i G(u_i) + dt^2 ddot_i Gdot(u_i)`, with `u^{n+1} = u_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitNd {
    pub re: DVector<f64>,
    pub p: DMatrix<f64>,
    pub d: DVector<f64>,
    pub d_dot: DVector<f64>,
}

impl ImplicitNd {
    pub fn new(re: DVector<f64>, p: DMatrix<f64>, d: DVector<f64>, d_dot: DVector<f64>) -> Result<Self> {
        let m = Self { re, p, d, d_dot };
        m.validate()?;
        Ok(m)
    }

    pub fn stages(&self) -> usize {
        self.d.len()
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.stages();
        if self.re.len() != s || self.p.shape() != (s, s) || self.d_dot.len() != s {
            return Err(Error::InvalidParameter("implicit method shape mismatch".into()));
        }
        if !is_strictly_lower(&self.p) {
            return Err(Error::InvalidParameter("P must be strictly lower triangular".into()));
        }
        for i in 0..s {
            let sum = self.re[i] + self.p.row(i).sum();
            if (sum - 1.0).abs() > CONSISTENCY_TOL {
                return Err(Error::InvalidParameter(format!("stage {} coefficients sum to {sum}", i + 1)));
            }
        }
        Ok(())
    }

    /// Butcher form: `A = (I-P)^{-1} diag(D)`, `Adot = (I-P)^{-1} diag(Ddot)`, weights are last rows.
    pub fn to_butcher(&self) -> ButcherTd {
        let s = self.stages();
        let m = DMatrix::identity(s, s) - &self.p;
        let a = unit_lower_solve(&m, &DMatrix::from_diagonal(&self.d));
        let a_dot = unit_lower_solve(&m, &DMatrix::from_diagonal(&self.d_dot));
        let b = a.row(s - 1).transpose();
        let b_dot = a_dot.row(s - 1).transpose();
        ButcherTd::new(a, a_dot, b, b_dot).expect("square by construction")
    }
}

/// Two-derivative IMEX Runge–Kutta method in sign-structured form.
///
/// Stage `i` is `r_i u^n + sum_j p_ij u_j + sum_j w_ij (u_j + dt/r F_ex(u_j))` followed by an
/// implicit solve with `dt d_i` and `dt^2 ddot_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImexRk {
    pub re: DVector<f64>,
    pub p: DMatrix<f64>,
    pub w: DMatrix<f64>,
    pub d: DVector<f64>,
    pub d_dot: DVector<f64>,
    pub r: f64,
}

impl ImexRk {
    pub fn new(
        re: DVector<f64>,
        p: DMatrix<f64>,
        w: DMatrix<f64>,
        d: DVector<f64>,
        d_dot: DVector<f64>,
        r: f64,
    ) -> Result<Self> {
        let m = Self { re, p, w, d, d_dot, r };
        m.validate()?;
        Ok(m)
    }

    pub fn stages(&self) -> usize {
        self.d.len()
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.stages();
        if self.re.len() != s || self.p.shape() != (s, s) || self.w.shape() != (s, s) || self.d_dot.len() != s {
            return Err(Error::InvalidParameter("IMEX method shape mismatch".into()));
        }
        if !(self.r > 0.0) {
            return Err(Error::InvalidParameter(format!("r must be positive, got {}", self.r)));
        }
        if !is_strictly_lower(&self.p) || !is_strictly_lower(&self.w) {
            return Err(Error::InvalidParameter("P and W must be strictly lower triangular".into()));
        }
        for i in 0..s {
            let sum = self.re[i] + self.p.row(i).sum() + self.w.row(i).sum();
            if (sum - 1.0).abs() > CONSISTENCY_TOL {
                return Err(Error::InvalidParameter(format!("stage {} coefficients sum to {sum}", i + 1)));
            }
        }
        Ok(())
    }

    pub fn to_butcher(&self) -> ButcherImex {
        let s = self.stages();
        let m = DMatrix::identity(s, s) - &self.p - &self.w;
        let a_hat = unit_lower_solve(&m, &self.w) / self.r;
        let a = unit_lower_solve(&m, &DMatrix::from_diagonal(&self.d));
        let a_dot = unit_lower_solve(&m, &DMatrix::from_diagonal(&self.d_dot));
        let last = |x: &DMatrix<f64>| x.row(s - 1).transpose();
        ButcherImex::new(a_hat.clone(), a.clone(), a_dot.clone(), last(&a_hat), last(&a), last(&a_dot))
    }
}

/// Butcher form of a two-derivative IMEX Runge–Kutta method.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherImex {
    pub a_hat: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub a_dot: DMatrix<f64>,
    pub b_hat: DVector<f64>,
    pub b: DVector<f64>,
    pub b_dot: DVector<f64>,
    pub c_hat: DVector<f64>,
    pub c: DVector<f64>,
    pub c_dot: DVector<f64>,
}

impl ButcherImex {
    pub fn new(
        a_hat: DMatrix<f64>,
        a: DMatrix<f64>,
        a_dot: DMatrix<f64>,
        b_hat: DVector<f64>,
        b: DVector<f64>,
        b_dot: DVector<f64>,
    ) -> Self {
        let e = DVector::from_element(b.len(), 1.0);
        let c_hat = &a_hat * &e;
        let c = &a * &e;
        let c_dot = &a_dot * &e;
        Self { a_hat, a, a_dot, b_hat, b, b_dot, c_hat, c, c_dot }
    }
}

/// k-step, s-stage two-derivative IMEX general linear method.
///
/// Column `l` of `rh` multiplies `u^{n+l-k}` (so the last column is `u^n`).
#[derive(Debug, Clone, PartialEq)]
pub struct ImexGlm {
    pub k: usize,
    pub rh: DMatrix<f64>,
    pub p: DMatrix<f64>,
    pub w: DMatrix<f64>,
    pub d: DVector<f64>,
    pub d_dot: DVector<f64>,
    pub gamma: DVector<f64>,
    pub q: DVector<f64>,
    pub v: DVector<f64>,
    pub r: f64,
}

impl ImexGlm {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        rh: DMatrix<f64>,
        p: DMatrix<f64>,
        w: DMatrix<f64>,
        d: DVector<f64>,
        d_dot: DVector<f64>,
        gamma: DVector<f64>,
        q: DVector<f64>,
        v: DVector<f64>,
        r: f64,
    ) -> Result<Self> {
        let k = rh.ncols();
        let m = Self { k, rh, p, w, d, d_dot, gamma, q, v, r };
        m.validate()?;
        Ok(m)
    }

    pub fn stages(&self) -> usize {
        self.d.len()
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.stages();
        let k = self.k;
        if k == 0
            || self.rh.shape() != (s, k)
            || self.p.shape() != (s, s)
            || self.w.shape() != (s, s)
            || self.d_dot.len() != s
            || self.gamma.len() != k
            || self.q.len() != s
            || self.v.len() != s
        {
            return Err(Error::InvalidParameter("GLM shape mismatch".into()));
        }
        if !(self.r > 0.0) {
            return Err(Error::InvalidParameter(format!("r must be positive, got {}", self.r)));
        }
        if !is_strictly_lower(&self.p) || !is_strictly_lower(&self.w) {
            return Err(Error::InvalidParameter("P and W must be strictly lower triangular".into()));
        }
        for i in 0..s {
            let sum = self.rh.row(i).sum() + self.p.row(i).sum() + self.w.row(i).sum();
            if (sum - 1.0).abs() > CONSISTENCY_TOL {
                return Err(Error::InvalidParameter(format!("stage {} coefficients sum to {sum}", i + 1)));
            }
        }
        let out = self.gamma.sum() + self.q.sum() + self.v.sum();
        if (out - 1.0).abs() > CONSISTENCY_TOL {
            return Err(Error::InvalidParameter(format!("output coefficients sum to {out}")));
        }
        Ok(())
    }

    pub fn to_butcher(&self) -> ButcherGlm {
        let s = self.stages();
        let m = DMatrix::identity(s, s) - &self.p - &self.w;
        let t = unit_lower_solve(&m, &self.rh);
        let minv_w = unit_lower_solve(&m, &self.w);
        let a_hat = &minv_w / self.r;
        let a = unit_lower_solve(&m, &DMatrix::from_diagonal(&self.d));
        let a_dot = unit_lower_solve(&m, &DMatrix::from_diagonal(&self.d_dot));
        let qv = (&self.q + &self.v).transpose();
        let theta = &self.gamma + (&qv * &t).transpose();
        let b_hat = ((&qv * &minv_w).transpose() + &self.v) / self.r;
        let b = (&qv * &a).transpose();
        let b_dot = (&qv * &a_dot).transpose();
        ButcherGlm::new(self.k, t, a_hat, a, a_dot, theta, b_hat, b, b_dot)
    }
}

/// Butcher form of a two-derivative IMEX general linear method.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherGlm {
    pub k: usize,
    pub t: DMatrix<f64>,
    pub a_hat: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub a_dot: DMatrix<f64>,
    pub theta: DVector<f64>,
    pub b_hat: DVector<f64>,
    pub b: DVector<f64>,
    pub b_dot: DVector<f64>,
    /// Step offsets `[1-k, 2-k, ..., 0]` of the history entries.
    pub ell: DVector<f64>,
}

impl ButcherGlm {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        k: usize,
        t: DMatrix<f64>,
        a_hat: DMatrix<f64>,
        a: DMatrix<f64>,
        a_dot: DMatrix<f64>,
        theta: DVector<f64>,
        b_hat: DVector<f64>,
        b: DVector<f64>,
        b_dot: DVector<f64>,
    ) -> Self {
        let ell = DVector::from_fn(k, |i, _| i as f64 + 1.0 - k as f64);
        Self { k, t, a_hat, a, a_dot, theta, b_hat, b, b_dot, ell }
    }
}

/// Solve `M X = B` for unit lower triangular `M` by forward substitution.
pub fn unit_lower_solve(m: &DMatrix<f64>, rhs: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut x = rhs.clone();
    for col in 0..x.ncols() {
        for i in 0..n {
            let mut acc = x[(i, col)];
            for j in 0..i {
                acc -= m[(i, j)] * x[(j, col)];
            }
            x[(i, col)] = acc / m[(i, i)];
        }
    }
    x
}

/// Row-major copy of a matrix, for serialization.
pub fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Row-major decimal strings; the shortest round-trip form keeps quoted decimal digits intact.
pub fn decimal_rows(m: &DMatrix<f64>) -> Vec<Vec<String>> {
    (0..m.nrows()).map(|i| m.row(i).iter().map(|x| format!("{x}")).collect()).collect()
}

pub fn decimal_vec(v: &DVector<f64>) -> Vec<String> {
    v.iter().map(|x| format!("{x}")).collect()
}
