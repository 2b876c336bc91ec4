//! Named registry over every method in the crate.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{self, literal_cubic_2s3p_root};
use crate::tableau::{decimal_rows, decimal_vec, ButcherTd, ImexGlm, ImexRk, ImplicitNd};

/// Default second-derivative constant of the centred advection example.
pub const DEFAULT_K: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// Default Taylor-series constant of the squared-upwind advection example.
pub const DEFAULT_KAPPA: f64 = 1.0;
/// Default step count of the k-step GLM family.
pub const DEFAULT_STEPS: usize = 3;

/// Residual tolerance for closed-form coefficient sets.
pub const TOL_CLOSED_FORM: f64 = 1e-12;
/// Residual tolerance for sets stored as 15-digit decimals.
pub const TOL_DECIMAL: f64 = 1e-8;

/// Stable identifiers, in listing order.
pub const NAMES: &[&str] = &[
    "td-ts",
    "td-2s3p",
    "td-2s4p",
    "td-3s5p",
    "ts-3s4p",
    "td-2s3p-nonssp",
    "nd-implicit-p2",
    "nd-implicit-p3",
    "nd-implicit-p4",
    "imex-rk-p2",
    "imex-rk-p3",
    "imex-glm-1step-p2",
    "imex-glm-2step-p2",
    "imex-glm-kstep-p2",
    "imex-glm-2step-p3",
];

/// Accepted alternative spellings.
pub const ALIASES: &[(&str, &str)] = &[("imex-glm-2step-5stage-p3", "imex-glm-2step-p3")];

/// The four coefficient classes.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Explicit(ButcherTd),
    Implicit(ImplicitNd),
    ImexRk(ImexRk),
    ImexGlm(ImexGlm),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodClass {
    ExplicitTd,
    ImplicitNd,
    ImexRk,
    ImexGlm,
}

/// Base condition an explicit method is certified against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Base {
    /// Forward Euler plus the second-derivative condition with constant `k`.
    SecondDerivative { k: f64 },
    /// Forward Euler plus the Taylor series condition with constant `kappa`.
    TaylorSeries { kappa: f64 },
    /// Sign conditions on the coefficient sets (implicit and IMEX classes).
    Sign,
    /// Not SSP; kept only as an experimental comparator.
    None,
}

/// Parameters of the parametric entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub k: f64,
    pub kappa: f64,
    pub steps: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self { k: DEFAULT_K, kappa: DEFAULT_KAPPA, steps: DEFAULT_STEPS }
    }
}

/// A registry entry: coefficients plus the metadata needed to test and certify them.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpec {
    pub name: &'static str,
    pub method: Method,
    pub order: usize,
    pub base: Base,
    /// SSP coefficient quoted alongside the method, when one is quoted.
    pub ssp_coefficient: Option<f64>,
    /// `r` produced by a root-finding constructor.
    pub solved_r: Option<f64>,
    /// Tolerance for the order-condition residuals.
    pub residual_tol: f64,
    /// Free-form remarks about the coefficient set.
    pub notes: Vec<String>,
}

impl MethodSpec {
    pub fn class(&self) -> MethodClass {
        match self.method {
            Method::Explicit(_) => MethodClass::ExplicitTd,
            Method::Implicit(_) => MethodClass::ImplicitNd,
            Method::ImexRk(_) => MethodClass::ImexRk,
            Method::ImexGlm(_) => MethodClass::ImexGlm,
        }
    }

    pub fn stages(&self) -> usize {
        match &self.method {
            Method::Explicit(m) => m.stages(),
            Method::Implicit(m) => m.stages(),
            Method::ImexRk(m) => m.stages(),
            Method::ImexGlm(m) => m.stages(),
        }
    }

    pub fn steps(&self) -> usize {
        match &self.method {
            Method::ImexGlm(m) => m.k,
            _ => 1,
        }
    }

    pub fn is_ssp(&self) -> bool {
        self.base != Base::None
    }

    pub fn explicit(&self) -> Option<&ButcherTd> {
        match &self.method {
            Method::Explicit(m) => Some(m),
            _ => None,
        }
    }

    /// JSON-ready export with every matrix as row-major decimal strings.
    pub fn export(&self) -> MethodExport {
        let mut matrices = BTreeMap::new();
        let mut put_m = |n: &str, m: &DMatrix<f64>| {
            matrices.insert(n.to_string(), decimal_rows(m));
        };
        match &self.method {
            Method::Explicit(m) => {
                put_m("A", m.a());
                put_m("Adot", m.a_dot());
                put_m("b", &row(m.b()));
                put_m("bdot", &row(m.b_dot()));
            }
            Method::Implicit(m) => {
                put_m("Re", &row(&m.re));
                put_m("P", &m.p);
                put_m("D", &row(&m.d));
                put_m("Ddot", &row(&m.d_dot));
            }
            Method::ImexRk(m) => {
                put_m("Re", &row(&m.re));
                put_m("P", &m.p);
                put_m("W", &m.w);
                put_m("D", &row(&m.d));
                put_m("Ddot", &row(&m.d_dot));
            }
            Method::ImexGlm(m) => {
                put_m("R", &m.rh);
                put_m("P", &m.p);
                put_m("W", &m.w);
                put_m("D", &row(&m.d));
                put_m("Ddot", &row(&m.d_dot));
                put_m("Gamma", &row(&m.gamma));
                put_m("Q", &row(&m.q));
                put_m("V", &row(&m.v));
            }
        }
        let r = match &self.method {
            Method::ImexRk(m) => Some(decimal_vec(&DVector::from_element(1, m.r))[0].clone()),
            Method::ImexGlm(m) => Some(decimal_vec(&DVector::from_element(1, m.r))[0].clone()),
            _ => None,
        };
        MethodExport {
            name: self.name,
            class: self.class(),
            k: self.steps(),
            s: self.stages(),
            order: self.order,
            base: self.base,
            ssp_coefficient: self.ssp_coefficient,
            r,
            matrices,
            notes: self.notes.clone(),
        }
    }
}

fn row(v: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(1, v.len(), v.as_slice())
}

/// Serializable view of a [`MethodSpec`].
#[derive(Debug, Clone, Serialize)]
pub struct MethodExport {
    pub name: &'static str,
    pub class: MethodClass,
    pub k: usize,
    pub s: usize,
    pub order: usize,
    pub base: Base,
    pub ssp_coefficient: Option<f64>,
    pub r: Option<String>,
    pub matrices: BTreeMap<String, Vec<Vec<String>>>,
    pub notes: Vec<String>,
}

fn canonical(name: &str) -> Option<&'static str> {
    NAMES
        .iter()
        .copied()
        .find(|n| *n == name)
        .or_else(|| ALIASES.iter().find(|(a, _)| *a == name).map(|(_, n)| *n))
}

/// Look up a method with default parameters.
pub fn lookup(name: &str) -> Result<MethodSpec> {
    lookup_with(name, &Params::default())
}

/// Look up a method; parametric entries use `params`.
pub fn lookup_with(name: &str, params: &Params) -> Result<MethodSpec> {
    let name = canonical(name)
        .ok_or_else(|| Error::UnknownMethod { name: name.to_string(), available: NAMES.join(", ") })?;
    let sd = Base::SecondDerivative { k: params.k };
    let spec = |method, order, base, ssp: Option<f64>, tol| MethodSpec {
        name,
        method,
        order,
        base,
        ssp_coefficient: ssp,
        solved_r: None,
        residual_tol: tol,
        notes: Vec::new(),
    };
    let out = match name {
        "td-ts" => {
            let k = params.k;
            spec(
                Method::Explicit(families::explicit_taylor()),
                2,
                sd,
                Some(k * (2.0 + k * k).sqrt() - k * k),
                TOL_CLOSED_FORM,
            )
        }
        "td-2s3p" => {
            let c = families::explicit_2s3p(params.k)?;
            let mut m = spec(Method::Explicit(c.tableau), 3, sd, None, TOL_CLOSED_FORM);
            if params.k == DEFAULT_K {
                m.ssp_coefficient = Some(1.0400);
            }
            m.solved_r = Some(c.r);
            let literal = literal_cubic_2s3p_root(params.k);
            m.notes.push(format!(
                "r = {} from the feasibility cubic; the literal cubic's smallest positive root is {}",
                c.r,
                literal.map_or("absent".to_string(), |x| x.to_string())
            ));
            m
        }
        "td-2s4p" => {
            let mut m = spec(Method::Explicit(families::explicit_2s4p()), 4, sd, None, TOL_CLOSED_FORM);
            if params.k == DEFAULT_K {
                m.ssp_coefficient = Some(0.6788);
            }
            m
        }
        "td-3s5p" => {
            let c = families::explicit_3s5p(params.k)?;
            let mut m = spec(Method::Explicit(c.tableau), 5, sd, None, TOL_CLOSED_FORM);
            if params.k == DEFAULT_K {
                m.ssp_coefficient = Some(0.6746);
            }
            m.solved_r = Some(c.r);
            m
        }
        "ts-3s4p" => {
            let kappa = params.kappa;
            let ssp = if kappa >= 1.0 { 1.0 } else { 2.0 * kappa / (kappa + 1.0) };
            spec(
                Method::Explicit(families::ts_3s4p(kappa)?),
                4,
                Base::TaylorSeries { kappa },
                Some(ssp),
                TOL_CLOSED_FORM,
            )
        }
        "td-2s3p-nonssp" => {
            let mut m = spec(Method::Explicit(families::explicit_nonssp_2s3p()), 3, Base::None, None, TOL_CLOSED_FORM);
            m.notes.push("not SSP; comparator for the total-variation experiment".into());
            m
        }
        "nd-implicit-p2" => spec(Method::Implicit(families::implicit_nd(2)?), 2, Base::Sign, None, TOL_CLOSED_FORM),
        "nd-implicit-p3" => spec(Method::Implicit(families::implicit_nd(3)?), 3, Base::Sign, None, TOL_CLOSED_FORM),
        "nd-implicit-p4" => spec(Method::Implicit(families::implicit_nd(4)?), 4, Base::Sign, None, TOL_DECIMAL),
        "imex-rk-p2" => spec(Method::ImexRk(families::imex_rk(2)?), 2, Base::Sign, Some(1.0), TOL_CLOSED_FORM),
        "imex-rk-p3" => {
            spec(Method::ImexRk(families::imex_rk(3)?), 3, Base::Sign, Some(0.904402174130635), TOL_DECIMAL)
        }
        "imex-glm-1step-p2" => {
            let m = families::imex_glm_1step_p2()?;
            let r = m.r;
            spec(Method::ImexGlm(m), 2, Base::Sign, Some(r), TOL_CLOSED_FORM)
        }
        "imex-glm-2step-p2" => {
            let m = families::imex_glm_2step_p2()?;
            let r = m.r;
            let mut s = spec(Method::ImexGlm(m), 2, Base::Sign, Some(r), TOL_CLOSED_FORM);
            s.notes.push("stage 1 copies u^n; stage 3 draws r31 from u^(n-1)".into());
            s
        }
        "imex-glm-kstep-p2" => {
            let m = families::imex_glm_kstep_p2(params.steps)?;
            let r = m.r;
            spec(Method::ImexGlm(m), 2, Base::Sign, Some(r), TOL_CLOSED_FORM)
        }
        "imex-glm-2step-p3" => {
            let mut s =
                spec(Method::ImexGlm(families::imex_glm_2step_p3()?), 3, Base::Sign, Some(1.080445742835932), TOL_DECIMAL);
            s.notes.push("stored with three history columns; the first carries a 1.327e-11 weight".into());
            s
        }
        _ => unreachable!("canonical() only returns registered names"),
    };
    Ok(out)
}

/// Every registry entry at default parameters.
pub fn all() -> Vec<MethodSpec> {
    NAMES.iter().map(|n| lookup(n).expect("registered")).collect()
}
