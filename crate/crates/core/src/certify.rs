//! SSP certificates.
//!
//! Explicit methods are certified by checking that the padded pair `(S, Sdot)`
//! admits a nonnegative decomposition into forward Euler and second-derivative
//! (or Taylor series) steps at a given `r`, and then locating the largest such `r`.
//! Implicit, IMEX and GLM methods are certified from the signs of their coefficients.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::families::{self, ROOT_SCAN_MAX};
use crate::registry::{Base, Method, MethodSpec, DEFAULT_K};
use crate::roots::smallest_positive_root;
use crate::tableau::{rows_of, unit_lower_solve, ImexGlm, ImexRk, ImplicitNd, SoPair};

/// Entrywise tolerance: entries above `-ENTRY_TOL` count as nonnegative.
pub const ENTRY_TOL: f64 = 1e-12;

/// Which base condition an explicit method is decomposed against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionClass {
    Sd,
    Ts,
    NdImplicit,
    Imex,
    ImexGlm,
}

/// Certified coefficient. Unconditional certificates are a distinct state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CertifiedR {
    Value(f64),
    Unconditional,
}

impl CertifiedR {
    /// Numeric value, with the unconditional state mapped to infinity.
    pub fn as_f64(&self) -> f64 {
        match self {
            CertifiedR::Value(r) => *r,
            CertifiedR::Unconditional => f64::INFINITY,
        }
    }
}

impl Serialize for CertifiedR {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CertifiedR::Value(r) => s.serialize_f64(*r),
            CertifiedR::Unconditional => s.serialize_str("unconditional"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub label: String,
    pub pass: bool,
    pub worst_entry: f64,
}

/// Nonnegative decomposition coefficients at the certified `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transformed {
    /// Weights on `u^n` for each stage and the output.
    pub base: Vec<f64>,
    /// Weights on the forward Euler (or Taylor series) building blocks.
    pub first: Vec<Vec<f64>>,
    /// Weights on the second-derivative building blocks.
    pub second: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub method: String,
    pub class: ConditionClass,
    pub param: Option<f64>,
    pub certified_r: CertifiedR,
    pub conditions: Vec<ConditionCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transformed: Option<Transformed>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

/// Outcome of one feasibility evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// Most negative entry of each of the three expressions.
    pub worst: [f64; 3],
    pub transformed: Transformed,
}

fn is_strictly_lower(m: &DMatrix<f64>) -> bool {
    (0..m.nrows()).all(|i| (i..m.ncols()).all(|j| m[(i, j)] == 0.0))
}

fn solve(m: &DMatrix<f64>, rhs: &DMatrix<f64>, strictly_lower: bool) -> Result<DMatrix<f64>> {
    if strictly_lower {
        return Ok(unit_lower_solve(m, rhs));
    }
    let lu = m.clone().lu();
    lu.solve(rhs).ok_or_else(|| Error::SingularMatrix("decomposition matrix".into()))
}

fn evaluate(
    so: &SoPair,
    r: f64,
    second_scale: f64,
    first_rhs: &DMatrix<f64>,
    third_scale: f64,
    tol: f64,
) -> Result<Feasibility> {
    let n = so.dim();
    let lower = is_strictly_lower(&so.s) && is_strictly_lower(&so.s_dot);
    let m = DMatrix::identity(n, n) + r * &so.s + second_scale * &so.s_dot;
    let mut rhs = DMatrix::zeros(n, 1 + 2 * n);
    rhs.column_mut(0).fill(1.0);
    rhs.view_mut((0, 1), (n, n)).copy_from(first_rhs);
    rhs.view_mut((0, 1 + n), (n, n)).copy_from(&so.s_dot);
    let x = solve(&m, &rhs, lower)?;
    let base: DVector<f64> = x.column(0).into_owned();
    let first = r * x.view((0, 1), (n, n)).into_owned();
    let second = third_scale * x.view((0, 1 + n), (n, n)).into_owned();
    let worst = [base.min(), first.min(), second.min()];
    Ok(Feasibility {
        feasible: worst.iter().all(|w| *w >= -tol),
        worst,
        transformed: Transformed { base: base.iter().copied().collect(), first: rows_of(&first), second: rows_of(&second) },
    })
}

/// Second-derivative feasibility at `r`:
/// `M^{-1} e >= 0`, `r M^{-1} S >= 0`, `(r^2/K^2) M^{-1} Sdot >= 0` with `M = I + r S + (r^2/K^2) Sdot`.
pub fn feasible_sd(so: &SoPair, k: f64, r: f64, tol: f64) -> Result<Feasibility> {
    let c = r * r / (k * k);
    evaluate(so, r, c, &so.s, c, tol)
}

/// Taylor series feasibility at `r`:
/// `M^{-1} e >= 0`, `r M^{-1}(S - (2r/kappa) Sdot) >= 0`, `(2r^2/kappa^2) M^{-1} Sdot >= 0`
/// with `M = I + r S + (2r^2/kappa^2)(1 - kappa) Sdot`.
pub fn feasible_ts(so: &SoPair, kappa: f64, r: f64, tol: f64) -> Result<Feasibility> {
    let c = 2.0 * r * r / (kappa * kappa);
    let first = &so.s - (2.0 * r / kappa) * &so.s_dot;
    evaluate(so, r, c * (1.0 - kappa), &first, c, tol)
}

/// Options of the scan-and-bisect driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxROptions {
    pub r_max: f64,
    pub scan: f64,
    pub bisect_tol: f64,
    pub entry_tol: f64,
}

impl Default for MaxROptions {
    fn default() -> Self {
        Self { r_max: 100.0, scan: 1e-3, bisect_tol: 1e-10, entry_tol: ENTRY_TOL }
    }
}

/// Result of [`max_r`]: the edge of the feasible prefix and whether feasible points
/// were also seen beyond it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxR {
    pub r: f64,
    pub disconnected: bool,
}

/// The explicit base conditions that [`max_r`] can scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scan {
    Sd(f64),
    Ts(f64),
}

fn feasible(so: &SoPair, class: Scan, r: f64, tol: f64) -> Result<Feasibility> {
    match class {
        Scan::Sd(k) => feasible_sd(so, k, r, tol),
        Scan::Ts(kappa) => feasible_ts(so, kappa, r, tol),
    }
}

/// Supremum of the feasible prefix `(0, r]`: scan on a uniform grid, then bisect the
/// first feasible-to-infeasible transition. Feasibility is not assumed monotone; any
/// feasible point past that transition sets `disconnected`.
pub fn max_r(so: &SoPair, class: Scan, opts: &MaxROptions) -> Result<MaxR> {
    let param = match class {
        Scan::Sd(k) => k,
        Scan::Ts(kappa) => kappa,
    };
    if !(param > 0.0) {
        return Err(Error::InvalidParameter(format!("base-condition constant must be positive, got {param}")));
    }
    let n = (opts.r_max / opts.scan).round() as usize;
    let flags: Vec<bool> = (1..=n)
        .into_par_iter()
        .map(|i| feasible(so, class, i as f64 * opts.scan, opts.entry_tol).map(|f| f.feasible))
        .collect::<Result<_>>()?;
    let Some(first_bad) = flags.iter().position(|f| !f) else {
        return Ok(MaxR { r: n as f64 * opts.scan, disconnected: false });
    };
    let disconnected = flags[first_bad..].iter().any(|f| *f);
    if first_bad == 0 {
        return Ok(MaxR { r: 0.0, disconnected });
    }
    let mut lo = first_bad as f64 * opts.scan;
    let mut hi = (first_bad + 1) as f64 * opts.scan;
    while hi - lo > opts.bisect_tol {
        let mid = 0.5 * (lo + hi);
        if feasible(so, class, mid, opts.entry_tol)?.feasible {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(MaxR { r: lo, disconnected })
}

const LABELS: [&str; 3] = ["base weights >= 0", "first-derivative weights >= 0", "second-derivative weights >= 0"];

/// Certificate of an explicit method against one base condition.
pub fn certify_explicit(name: &str, so: &SoPair, class: Scan, opts: &MaxROptions) -> Result<Certificate> {
    let found = max_r(so, class, opts)?;
    let at = if found.r > 0.0 { found.r } else { opts.scan };
    let f = feasible(so, class, at, opts.entry_tol)?;
    let conditions = LABELS
        .iter()
        .zip(f.worst)
        .map(|(l, w)| ConditionCheck { label: format!("{l} at r = {at}"), pass: w >= -opts.entry_tol, worst_entry: w })
        .collect();
    let mut diagnostics = Vec::new();
    if found.disconnected {
        diagnostics.push("feasible points found beyond the first infeasible scan point".into());
    }
    let (cc, param) = match class {
        Scan::Sd(k) => (ConditionClass::Sd, k),
        Scan::Ts(kappa) => (ConditionClass::Ts, kappa),
    };
    Ok(Certificate {
        method: name.to_string(),
        class: cc,
        param: Some(param),
        certified_r: CertifiedR::Value(found.r),
        conditions,
        transformed: (found.r > 0.0).then_some(f.transformed),
        diagnostics,
    })
}

fn nonneg(label: &str, xs: impl Iterator<Item = f64>) -> ConditionCheck {
    let worst = xs.fold(f64::INFINITY, f64::min);
    let worst = if worst.is_finite() { worst } else { 0.0 };
    ConditionCheck { label: label.to_string(), pass: worst >= -ENTRY_TOL, worst_entry: worst }
}

fn nonpos(label: &str, xs: impl Iterator<Item = f64>) -> ConditionCheck {
    let worst = xs.fold(f64::NEG_INFINITY, f64::max);
    let worst = if worst.is_finite() { worst } else { 0.0 };
    ConditionCheck { label: label.to_string(), pass: worst <= ENTRY_TOL, worst_entry: worst }
}

/// Sign certificate of an implicit method: unconditional when `Re, P, D >= 0` and `Ddot <= 0`.
pub fn sign_certificate_implicit(name: &str, m: &ImplicitNd) -> Certificate {
    let conditions = vec![
        nonneg("Re >= 0", m.re.iter().copied()),
        nonneg("P >= 0", m.p.iter().copied()),
        nonneg("D >= 0", m.d.iter().copied()),
        nonpos("Ddot <= 0", m.d_dot.iter().copied()),
    ];
    let ok = conditions.iter().all(|c| c.pass);
    Certificate {
        method: name.to_string(),
        class: ConditionClass::NdImplicit,
        param: None,
        certified_r: if ok { CertifiedR::Unconditional } else { CertifiedR::Value(0.0) },
        conditions,
        transformed: None,
        diagnostics: Vec::new(),
    }
}

/// Sign certificate of an IMEX Runge–Kutta method: `r` when all signs hold, else 0.
pub fn sign_certificate_imex(name: &str, m: &ImexRk) -> Certificate {
    let conditions = vec![
        nonneg("Re >= 0", m.re.iter().copied()),
        nonneg("P >= 0", m.p.iter().copied()),
        nonneg("W >= 0", m.w.iter().copied()),
        nonneg("D >= 0", m.d.iter().copied()),
        nonpos("Ddot <= 0", m.d_dot.iter().copied()),
    ];
    let ok = conditions.iter().all(|c| c.pass);
    Certificate {
        method: name.to_string(),
        class: ConditionClass::Imex,
        param: None,
        certified_r: CertifiedR::Value(if ok { m.r } else { 0.0 }),
        conditions,
        transformed: None,
        diagnostics: Vec::new(),
    }
}

/// Sign certificate of an IMEX GLM: adds `Gamma, Q, V >= 0` to the IMEX conditions.
pub fn sign_certificate_glm(name: &str, m: &ImexGlm) -> Certificate {
    let conditions = vec![
        nonneg("R >= 0", m.rh.iter().copied()),
        nonneg("P >= 0", m.p.iter().copied()),
        nonneg("W >= 0", m.w.iter().copied()),
        nonneg("D >= 0", m.d.iter().copied()),
        nonpos("Ddot <= 0", m.d_dot.iter().copied()),
        nonneg("Gamma >= 0", m.gamma.iter().copied()),
        nonneg("Q >= 0", m.q.iter().copied()),
        nonneg("V >= 0", m.v.iter().copied()),
    ];
    let ok = conditions.iter().all(|c| c.pass);
    Certificate {
        method: name.to_string(),
        class: ConditionClass::ImexGlm,
        param: None,
        certified_r: CertifiedR::Value(if ok { m.r } else { 0.0 }),
        conditions,
        transformed: None,
        diagnostics: Vec::new(),
    }
}

/// Certify any registry entry with the condition class its metadata names.
pub fn certify(spec: &MethodSpec, opts: &MaxROptions) -> Result<Certificate> {
    match &spec.method {
        Method::Explicit(m) => {
            let class = match spec.base {
                Base::SecondDerivative { k } => Scan::Sd(k),
                Base::TaylorSeries { kappa } => Scan::Ts(kappa),
                _ => Scan::Sd(DEFAULT_K),
            };
            certify_explicit(spec.name, &m.so_pair(), class, opts)
        }
        Method::Implicit(m) => Ok(sign_certificate_implicit(spec.name, m)),
        Method::ImexRk(m) => Ok(sign_certificate_imex(spec.name, m)),
        Method::ImexGlm(m) => Ok(sign_certificate_glm(spec.name, m)),
    }
}

/// Families with closed-form (or single-root) SSP coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Taylor,
    TwoStageFourth,
    TwoStageThird,
    ThreeStageFifth,
}

/// Closed-form SSP coefficient of a family as a function of `K`.
pub fn closed_form_c(family: Family, k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("K must be positive, got {k}")));
    }
    let none = |what: &str| Error::NoPositiveRoot { what: what.into(), r_max: ROOT_SCAN_MAX };
    match family {
        Family::Taylor => Ok(k * (2.0 + k * k).sqrt() - k * k),
        Family::TwoStageFourth => {
            let k2 = k * k;
            let quartic = |r: f64| r.powi(4) + 4.0 * k2 * r.powi(3) - 12.0 * k2 * r * r - 24.0 * k2 * k2 * r + 24.0 * k2 * k2;
            smallest_positive_root(quartic, ROOT_SCAN_MAX, 1e-3, 1e-13).ok_or_else(|| none("two-stage fourth-order quartic"))
        }
        Family::TwoStageThird => families::explicit_2s3p(k).map(|c| c.r),
        Family::ThreeStageFifth => families::explicit_3s5p(k).map(|c| c.r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{explicit_2s4p, explicit_nonssp_2s3p, explicit_taylor, ts_3s4p};

    const K: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn taylor_feasibility_bracket() {
        let so = explicit_taylor().so_pair();
        assert!(feasible_sd(&so, K, 0.61, ENTRY_TOL).unwrap().feasible);
        assert!(!feasible_sd(&so, K, 0.63, ENTRY_TOL).unwrap().feasible);
    }

    #[test]
    fn tiny_r_is_feasible_for_nonnegative_pairs() {
        let so = explicit_2s4p().so_pair();
        assert!(feasible_sd(&so, K, 1e-9, ENTRY_TOL).unwrap().feasible);
    }

    #[test]
    fn ts_method_bracket() {
        let so = ts_3s4p(1.0).unwrap().so_pair();
        assert!(feasible_ts(&so, 1.0, 0.99, ENTRY_TOL).unwrap().feasible);
        assert!(!feasible_ts(&so, 1.0, 1.01, ENTRY_TOL).unwrap().feasible);
    }

    #[test]
    fn taylor_max_r() {
        let r = max_r(&explicit_taylor().so_pair(), Scan::Sd(K), &MaxROptions::default()).unwrap();
        assert!((r.r - 0.618034).abs() < 1e-6);
        assert!(!r.disconnected);
    }

    #[test]
    fn nonssp_is_infeasible() {
        let r = max_r(&explicit_nonssp_2s3p().so_pair(), Scan::Sd(K), &MaxROptions::default()).unwrap();
        assert_eq!(r.r, 0.0);
    }

    #[test]
    fn closed_forms() {
        assert!((closed_form_c(Family::Taylor, K).unwrap() - (1.25f64.sqrt() - 0.5)).abs() < 1e-15);
        let c = closed_form_c(Family::Taylor, 100.0).unwrap();
        assert!(c > 0.99 && c < 1.0);
        assert!((closed_form_c(Family::TwoStageFourth, K).unwrap() - 0.67885).abs() < 1e-4);
        assert!(closed_form_c(Family::Taylor, -1.0).is_err());
    }

    #[test]
    fn flipped_sign_fails() {
        let mut m = crate::families::implicit_nd(2).unwrap();
        assert_eq!(sign_certificate_implicit("x", &m).certified_r, CertifiedR::Unconditional);
        m.d_dot[0] = 0.5;
        let c = sign_certificate_implicit("x", &m);
        assert_eq!(c.certified_r, CertifiedR::Value(0.0));
        assert!(!c.conditions[3].pass);
    }

    #[test]
    fn unconditional_serializes_as_word() {
        let c = sign_certificate_implicit("nd", &crate::families::implicit_nd(4).unwrap());
        let j = serde_json::to_value(&c).unwrap();
        assert_eq!(j["certified_r"], "unconditional");
    }
}
